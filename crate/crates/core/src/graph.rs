//! Directed simple graphs with stable, input-ordered edge indices.
//!
//! Vertices are the dense integers `1..=n`. The position of an edge in the
//! edge list is its identity: edge `e_i` (1-based) carries the canonical
//! weight `2^(i-1)`, so the order must survive every round-trip.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// 1-based vertex id.
pub type Vertex = usize;

/// 0-based position of an edge in the edge list; `e_{id+1}` in 1-based notation.
pub type EdgeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: duplicate edge ({tail}, {head})")]
    DuplicateEdge { line: usize, tail: Vertex, head: Vertex },
    #[error("line {line}: vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { line: usize, vertex: Vertex, n: usize },
    #[error("cannot place {m} distinct non-loop edges on {n} vertices")]
    InfeasibleEdgeCount { n: usize, m: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    // per vertex, edge ids sorted by head vertex (ties impossible in a simple graph)
    out: Vec<Vec<EdgeId>>,
    // per vertex, incoming edge ids in edge-index order
    inc: Vec<Vec<EdgeId>>,
}

impl Graph {
    /// Builds a graph, rejecting out-of-range endpoints and parallel edges.
    /// Error line numbers refer to 1-based edge positions.
    pub fn new(n: usize, edges: Vec<(Vertex, Vertex)>) -> Result<Self, GraphError> {
        Self::build(n, edges, |i| i + 1)
    }

    fn build(n: usize, edges: Vec<(Vertex, Vertex)>, line_of: impl Fn(usize) -> usize) -> Result<Self, GraphError> {
        let mut seen = HashSet::with_capacity(edges.len());
        for (i, &(t, h)) in edges.iter().enumerate() {
            for v in [t, h] {
                if v == 0 || v > n {
                    return Err(GraphError::VertexOutOfRange {
                        line: line_of(i),
                        vertex: v,
                        n,
                    });
                }
            }
            if !seen.insert((t, h)) {
                return Err(GraphError::DuplicateEdge {
                    line: line_of(i),
                    tail: t,
                    head: h,
                });
            }
        }
        let mut out = vec![Vec::new(); n + 1];
        let mut inc = vec![Vec::new(); n + 1];
        for (id, &(t, h)) in edges.iter().enumerate() {
            out[t].push(id);
            inc[h].push(id);
        }
        for list in &mut out {
            list.sort_by_key(|&e| edges[e].1);
        }
        Ok(Self { n, edges, out, inc })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (Vertex, Vertex) {
        self.edges[id]
    }

    pub fn tail(&self, id: EdgeId) -> Vertex {
        self.edges[id].0
    }

    pub fn head(&self, id: EdgeId) -> Vertex {
        self.edges[id].1
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n
    }

    /// Outgoing edges of `v`, ordered by head vertex.
    pub fn out_edges(&self, v: Vertex) -> &[EdgeId] {
        &self.out[v]
    }

    /// Incoming edges of `v`, in edge-index order.
    pub fn in_edges(&self, v: Vertex) -> &[EdgeId] {
        &self.inc[v]
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        (1..=self.n).contains(&v)
    }

    /// Parses the edge-list text format: a header `n m` followed by `m`
    /// lines `tail head`. Blank lines are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing header `n m`".into(),
        })?;
        let (n, m) = parse_pair(hline, header)?;
        let mut edges = Vec::with_capacity(m);
        let mut line_nos = Vec::with_capacity(m);
        for (line, body) in lines {
            if edges.len() == m {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("more than {m} edge lines"),
                });
            }
            edges.push(parse_pair(line, body)?);
            line_nos.push(line);
        }
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: line_nos.last().copied().unwrap_or(hline),
                msg: format!("expected {m} edge lines, found {}", edges.len()),
            });
        }
        Self::build(n, edges, |i| line_nos[i])
    }

    /// Inverse of [`Graph::parse_edge_list`]; no trailing newline.
    pub fn serialize(&self) -> String {
        let mut s = format!("{} {}", self.n, self.m());
        for &(t, h) in &self.edges {
            let _ = write!(s, "\n{t} {h}");
        }
        s
    }

    /// Graphviz export. Edges are labelled with their 1-based index.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for v in self.vertices() {
            let _ = writeln!(s, "  {v};");
        }
        for (id, &(t, h)) in self.edges.iter().enumerate() {
            let _ = writeln!(s, "  {t} -> {h} [label=\"e{}\"];", id + 1);
        }
        s.push('}');
        s
    }
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize), GraphError> {
    let mut it = text.split_whitespace();
    let mut next = |what: &str| -> Result<usize, GraphError> {
        let tok = it.next().ok_or_else(|| GraphError::Parse {
            line,
            msg: format!("missing {what}"),
        })?;
        tok.parse().map_err(|_| GraphError::Parse {
            line,
            msg: format!("invalid {what} `{tok}`"),
        })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if it.next().is_some() {
        return Err(GraphError::Parse {
            line,
            msg: "trailing tokens".into(),
        });
    }
    Ok((a, b))
}

/// Uniform random simple graph without self-loops, deterministic in `(n, m, seed)`.
pub fn gen_random(n: usize, m: usize, seed: u64) -> Result<Graph, GraphError> {
    let pairs = n * n.saturating_sub(1);
    if m > pairs {
        return Err(GraphError::InfeasibleEdgeCount { n, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = index::sample(&mut rng, pairs, m)
        .into_iter()
        .map(|k| {
            let tail = k / (n - 1);
            let mut head = k % (n - 1);
            if head >= tail {
                head += 1;
            }
            (tail + 1, head + 1)
        })
        .collect();
    Graph::new(n, edges)
}

/// Series composition of `layers` diamonds. Vertex 1 is the source and
/// vertex `3*layers + 1` the sink; there are `2^layers` source-sink paths,
/// all of length `2*layers`.
pub fn gen_diamond_stack(layers: usize) -> Result<Graph, GraphError> {
    if layers == 0 {
        return Err(GraphError::InvalidParams(
            "diamond stack needs at least one layer".into(),
        ));
    }
    let mut edges = Vec::with_capacity(4 * layers);
    for d in 0..layers {
        let top = 3 * d + 1;
        let (left, right, bottom) = (top + 1, top + 2, top + 3);
        edges.extend([(top, left), (top, right), (left, bottom), (right, bottom)]);
    }
    Graph::new(3 * layers + 1, edges)
}

/// `rows x cols` grid with edges to the right and downward neighbours.
/// Cell `(r, c)` is vertex `r*cols + c + 1`.
pub fn gen_grid(rows: usize, cols: usize) -> Result<Graph, GraphError> {
    if rows == 0 || cols == 0 {
        return Err(GraphError::InvalidParams(format!("grid {rows}x{cols} is empty")));
    }
    let id = |r: usize, c: usize| r * cols + c + 1;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::new(rows * cols, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_g1() {
        let g = Graph::parse_edge_list("3 3\n1 2\n2 3\n1 3").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(1, 2), (2, 3), (1, 3)]);
        assert_eq!(g.serialize(), "3 3\n1 2\n2 3\n1 3");
    }

    #[test]
    fn parse_empty_graph() {
        let g = Graph::parse_edge_list("1 0").unwrap();
        assert_eq!((g.n(), g.m()), (1, 0));
        assert_eq!(g.serialize(), "1 0");
    }

    #[test]
    fn parse_rejects_duplicates_with_line() {
        let err = Graph::parse_edge_list("2 2\n1 2\n1 2").unwrap_err();
        assert_eq!(
            err,
            GraphError::DuplicateEdge {
                line: 3,
                tail: 1,
                head: 2
            }
        );
    }

    #[test]
    fn parse_rejects_out_of_range() {
        let err = Graph::parse_edge_list("2 1\n1 3").unwrap_err();
        assert!(matches!(err, GraphError::VertexOutOfRange { vertex: 3, .. }));
        assert!(Graph::parse_edge_list("2 1\n0 1").is_err());
    }

    #[test]
    fn parse_rejects_wrong_edge_count() {
        assert!(Graph::parse_edge_list("3 2\n1 2").is_err());
        assert!(Graph::parse_edge_list("3 1\n1 2\n2 3").is_err());
        assert!(Graph::parse_edge_list("").is_err());
        assert!(Graph::parse_edge_list("3 x").is_err());
    }

    #[test]
    fn self_loops_allowed() {
        let g = Graph::parse_edge_list("2 2\n1 1\n1 2").unwrap();
        assert_eq!(g.out_edges(1), &[0, 1]);
    }

    #[test]
    fn out_edges_sorted_by_head() {
        let g = Graph::new(4, vec![(1, 4), (1, 2), (1, 3)]).unwrap();
        let heads: Vec<_> = g.out_edges(1).iter().map(|&e| g.head(e)).collect();
        assert_eq!(heads, vec![2, 3, 4]);
        assert_eq!(g.in_edges(4), &[0]);
    }

    #[test]
    fn random_edgeless_and_saturated() {
        let g = gen_random(5, 0, 7).unwrap();
        assert_eq!((g.n(), g.m()), (5, 0));
        let g = gen_random(4, 12, 1).unwrap();
        let mut e = g.edges().to_vec();
        e.sort();
        let all: Vec<_> = (1..=4)
            .flat_map(|a| (1..=4).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        assert_eq!(e, all);
        assert!(matches!(
            gen_random(4, 13, 1),
            Err(GraphError::InfeasibleEdgeCount { .. })
        ));
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(gen_random(16, 40, 3).unwrap(), gen_random(16, 40, 3).unwrap());
        assert_ne!(gen_random(16, 40, 3).unwrap(), gen_random(16, 40, 4).unwrap());
    }

    #[test]
    fn diamond_one_layer() {
        let g = gen_diamond_stack(1).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edges(), &[(1, 2), (1, 3), (2, 4), (3, 4)]);
        let g2 = gen_diamond_stack(2).unwrap();
        assert_eq!((g2.n(), g2.m()), (7, 8));
        assert!(gen_diamond_stack(0).is_err());
    }

    #[test]
    fn grid_shapes() {
        let g = gen_grid(1, 1).unwrap();
        assert_eq!((g.n(), g.m()), (1, 0));
        let g = gen_grid(2, 2).unwrap();
        assert_eq!(g.edges(), &[(1, 2), (1, 3), (2, 4), (3, 4)]);
        assert!(gen_grid(0, 0).is_err());
    }

    #[test]
    fn dot_export_labels_edges() {
        let dot = gen_diamond_stack(1).unwrap().to_dot();
        assert!(dot.contains("1 -> 2 [label=\"e1\"]"));
        assert!(dot.contains("3 -> 4 [label=\"e4\"]"));
    }
}
