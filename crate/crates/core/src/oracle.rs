//! Brute-force ground truth. Nothing here is space-efficient; these routines
//! exist to judge the small-space pipeline.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use serde::Serialize;

use crate::graph::{EdgeId, Graph, Vertex};
use crate::numeric::{CensusSum, Distance, LimbWeight, NumericError, WeightAssignment};

/// One row of a [`DistTable`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistEntry {
    pub dist: Distance,
    /// Minimal length among minimum-weight paths; `None` when unreachable.
    pub len: Option<usize>,
    /// Number of distinct minimum-weight paths, saturated at `n + 1`.
    pub count: u64,
}

/// Length-bounded single-source distances, minimal lengths and path counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistTable {
    pub source: Vertex,
    pub bound: usize,
    entries: Vec<DistEntry>,
}

impl DistTable {
    pub fn entry(&self, v: Vertex) -> &DistEntry {
        &self.entries[v - 1]
    }

    pub fn entries(&self) -> impl Iterator<Item = (Vertex, &DistEntry)> {
        self.entries.iter().enumerate().map(|(i, e)| (i + 1, e))
    }

    /// `(c, D)`: vertices within weight `k` and the sum of their distances.
    pub fn census(&self, k: &LimbWeight) -> Result<(usize, CensusSum), NumericError> {
        census_of(self.entries.iter().map(|e| &e.dist), k)
    }
}

fn census_of<'a>(
    dists: impl Iterator<Item = &'a Distance>,
    k: &LimbWeight,
) -> Result<(usize, CensusSum), NumericError> {
    let mut c = 0;
    let mut sum = CensusSum::zero(k.len(), k.base());
    for d in dists {
        if let Distance::Finite(d) = d {
            if d <= k {
                c += 1;
                sum.add(d)?;
            }
        }
    }
    Ok((c, sum))
}

/// Exact `d^i(u, .)`, `l^i(u, .)` and `|P^i(u, .)|` by dynamic programming
/// over (exact length, vertex).
///
/// Minimum-weight walks of exactly `l` edges are counted layer by layer; a
/// layer contributes to the final count only where it attains the overall
/// minimum, and such walks are simple paths because every edge weight is
/// positive. Bounds beyond `n - 1` are clamped for the same reason.
pub fn bounded_shortest_paths(g: &Graph, w: &WeightAssignment, u: Vertex, i: usize) -> Result<DistTable, NumericError> {
    let n = g.n();
    let cap = n as u64 + 1;
    let bound = i.min(n.saturating_sub(1));
    let mut best: Vec<DistEntry> = vec![
        DistEntry {
            dist: Distance::Infinite,
            len: None,
            count: 0
        };
        n
    ];
    best[u - 1] = DistEntry {
        dist: Distance::Finite(w.zero()),
        len: Some(0),
        count: 1,
    };

    let mut layer: Vec<Option<(LimbWeight, u64)>> = vec![None; n + 1];
    layer[u] = Some((w.zero(), 1));
    for l in 1..=bound {
        let mut next: Vec<Option<(LimbWeight, u64)>> = vec![None; n + 1];
        for (e, &(x, v)) in g.edges().iter().enumerate() {
            let Some((dx, cx)) = &layer[x] else { continue };
            let cand = dx.checked_add(w.weight(e))?;
            match &mut next[v] {
                slot @ None => *slot = Some((cand, *cx)),
                Some((dv, cv)) => match cand.cmp(dv) {
                    Ordering::Less => {
                        *dv = cand;
                        *cv = *cx;
                    }
                    Ordering::Equal => *cv = (*cv + cx).min(cap),
                    Ordering::Greater => {}
                },
            }
        }
        for v in 1..=n {
            let Some((dv, cv)) = &next[v] else { continue };
            let entry = &mut best[v - 1];
            match entry.dist.finite().map(|d| dv.cmp(d)) {
                None | Some(Ordering::Less) => {
                    *entry = DistEntry {
                        dist: Distance::Finite(dv.clone()),
                        len: Some(l),
                        count: *cv,
                    }
                }
                Some(Ordering::Equal) => entry.count = (entry.count + cv).min(cap),
                Some(Ordering::Greater) => {}
            }
        }
        layer = next;
    }
    Ok(DistTable {
        source: u,
        bound: i,
        entries: best,
    })
}

/// Outcome of [`brute_min_unique`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MinUnique {
    Ok,
    Witness { u: Vertex, v: Vertex },
}

impl MinUnique {
    pub fn is_ok(&self) -> bool {
        matches!(self, MinUnique::Ok)
    }
}

/// Whether every pair has at most one minimum-weight path of length `<= i`;
/// otherwise the lexicographically first violating pair.
pub fn brute_min_unique(g: &Graph, w: &WeightAssignment, i: usize) -> Result<MinUnique, NumericError> {
    for u in g.vertices() {
        let table = bounded_shortest_paths(g, w, u, i)?;
        let witness = table.entries().find(|(_, e)| e.count > 1).map(|(v, _)| v);
        if let Some(v) = witness {
            return Ok(MinUnique::Witness { u, v });
        }
    }
    Ok(MinUnique::Ok)
}

/// `|P^i(u, v)|`, saturated at `n + 1`.
pub fn count_min_weight_paths(
    g: &Graph,
    w: &WeightAssignment,
    u: Vertex,
    v: Vertex,
    i: usize,
) -> Result<u64, NumericError> {
    Ok(bounded_shortest_paths(g, w, u, i)?.entry(v).count)
}

/// All simple `u -> v` paths of at most `max_len` edges, ordered by length
/// and then by edge-index sequence. Exponential; meant for tiny graphs.
pub fn enumerate_paths(g: &Graph, u: Vertex, v: Vertex, max_len: usize) -> Vec<Vec<EdgeId>> {
    fn dfs(
        g: &Graph,
        at: Vertex,
        target: Vertex,
        max_len: usize,
        on_path: &mut [bool],
        path: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
    ) {
        if at == target {
            out.push(path.clone());
            return;
        }
        if path.len() == max_len {
            return;
        }
        let mut edges = g.out_edges(at).to_vec();
        edges.sort_unstable();
        for e in edges {
            let h = g.head(e);
            if on_path[h] {
                continue;
            }
            on_path[h] = true;
            path.push(e);
            dfs(g, h, target, max_len, on_path, path, out);
            path.pop();
            on_path[h] = false;
        }
    }
    let mut on_path = vec![false; g.n() + 1];
    on_path[u] = true;
    let mut out = Vec::new();
    dfs(g, u, v, max_len, &mut on_path, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

pub fn path_weight(w: &WeightAssignment, path: &[EdgeId]) -> Result<LimbWeight, NumericError> {
    path.iter().try_fold(w.zero(), |acc, &e| acc.checked_add(w.weight(e)))
}

pub fn bfs_reach(g: &Graph, u: Vertex) -> BTreeSet<Vertex> {
    let mut seen = vec![false; g.n() + 1];
    let mut queue = VecDeque::from([u]);
    seen[u] = true;
    while let Some(x) = queue.pop_front() {
        for &e in g.out_edges(x) {
            let h = g.head(e);
            if !seen[h] {
                seen[h] = true;
                queue.push_back(h);
            }
        }
    }
    (1..=g.n()).filter(|&v| seen[v]).collect()
}

/// Row of a [`SettledTable`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SettledEntry {
    pub dist: Distance,
    pub len: Option<usize>,
    /// Last edge of the chosen path; `None` for the source and unreached vertices.
    pub parent: Option<EdgeId>,
}

/// Distances as the stage-by-stage census builds them: a vertex is reached
/// only through a settled predecessor `x` whose own chosen path leaves room
/// for one more edge (`len(x) + 1 <= i`).
///
/// When `i >= n - 1` this coincides with [`bounded_shortest_paths`]. For
/// binding bounds it can differ: a vertex whose best `<= i`-edge path runs
/// through a heavier, shorter prefix is missed or overweighted here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SettledTable {
    pub source: Vertex,
    pub bound: usize,
    entries: Vec<SettledEntry>,
}

impl SettledTable {
    pub fn entry(&self, v: Vertex) -> &SettledEntry {
        &self.entries[v - 1]
    }

    pub fn census(&self, k: &LimbWeight) -> Result<(usize, CensusSum), NumericError> {
        census_of(self.entries.iter().map(|e| &e.dist), k)
    }

    /// Edge sequence of the chosen path to `v`, or `None` if unreached.
    pub fn path_to(&self, g: &Graph, v: Vertex) -> Option<Vec<EdgeId>> {
        if !self.entry(v).dist.is_finite() {
            return None;
        }
        let mut path = Vec::new();
        let mut at = v;
        while let Some(e) = self.entry(at).parent {
            path.push(e);
            at = g.tail(e);
        }
        path.reverse();
        Some(path)
    }
}

/// Hop-pruned Dijkstra. Among predecessors reaching a vertex at the same
/// weight, the one giving the shorter path wins, then the smaller edge index.
pub fn settled_shortest_paths(
    g: &Graph,
    w: &WeightAssignment,
    u: Vertex,
    i: usize,
) -> Result<SettledTable, NumericError> {
    let n = g.n();
    let mut entries = vec![
        SettledEntry {
            dist: Distance::Infinite,
            len: None,
            parent: None
        };
        n
    ];
    let mut done = vec![false; n + 1];
    entries[u - 1] = SettledEntry {
        dist: Distance::Finite(w.zero()),
        len: Some(0),
        parent: None,
    };
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((w.zero(), 0usize, u)));
    while let Some(Reverse((d, l, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        let current = &entries[x - 1];
        if current.len != Some(l) || current.dist.finite() != Some(&d) {
            continue;
        }
        done[x] = true;
        if l + 1 > i {
            continue;
        }
        for &e in g.out_edges(x) {
            let v = g.head(e);
            if done[v] {
                continue;
            }
            let cand = d.checked_add(w.weight(e))?;
            let entry = &mut entries[v - 1];
            let better = match entry.dist.finite() {
                None => true,
                Some(dv) => {
                    (&cand, l + 1, e) < (dv, entry.len.unwrap_or(usize::MAX), entry.parent.unwrap_or(usize::MAX))
                }
            };
            if better {
                *entry = SettledEntry {
                    dist: Distance::Finite(cand.clone()),
                    len: Some(l + 1),
                    parent: Some(e),
                };
                heap.push(Reverse((cand, l + 1, v)));
            }
        }
    }
    Ok(SettledTable {
        source: u,
        bound: i,
        entries,
    })
}
