//! The unambiguous reachability pipeline.
//!
//! * [`dist_subroutine`] is the only nondeterministic step: it guesses the
//!   ball around a source and a path to each member, and accepts only when
//!   the guessed ball matches the census `(c, D)`.
//! * [`next_weight_value`] and [`inductive_update`] advance the census from
//!   one realized distance value to the next, flagging any vertex reached by
//!   two qualifying predecessors at the same weight.
//! * [`check_min_unique`] runs the stepping loop from every source.
//! * [`build_weights_and_decide`] grows limb weights round by round until the
//!   graph is min-unique for all lengths, then answers the `s -> t` query.
//!
//! Deterministic parts call the distance routine through a [`Session`],
//! which runs it either guided (the default, following the single accepting
//! path selected from a brute-force table) or by exhaustive enumeration.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::harness::{self, reject, ChoiceLabel, ChoicePoint, Chooser, Guide, Halt, HarnessError};
use crate::metrics::{LiveVar, RoundLog, RunTrace};
use crate::numeric::{
    base_for, ceil_log2, compose_round_weight, initial_prime_cap, CensusSum, Distance, LimbWeight, NumericError,
    PrimePool, WeightAssignment,
};
use crate::oracle::{settled_shortest_paths, SettledTable};

#[derive(Debug, Error)]
pub enum CoreError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("guided distance routine failed at {census}")]
    Stage {
        census: Box<BallCensus>,
        #[source]
        source: HarnessError,
    },
    #[error("enumerating the distance routine at {census} failed")]
    Harness {
        census: Box<BallCensus>,
        #[source]
        source: HarnessError,
    },
    #[error("promise violated at {census}: {accepting} accepting paths")]
    Ambiguous { census: Box<BallCensus>, accepting: u64 },
    #[error("invariant breached: {0}")]
    Invariant(String),
    #[error("prime cap exceeded supported range ({0})")]
    PrimeCapOverflow(u64),
}

/// `(u, i, k, c_k^i(u), D_k^i(u))`: the ball of weight `k` around `source`
/// over paths of at most `bound` edges, with its size and distance sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BallCensus {
    pub source: Vertex,
    pub bound: usize,
    pub radius: LimbWeight,
    pub count: usize,
    pub sum: CensusSum,
}

impl BallCensus {
    /// The radius-zero ball: just the source.
    pub fn initial(w: &WeightAssignment, source: Vertex, bound: usize) -> Self {
        Self {
            source,
            bound,
            radius: w.zero(),
            count: 1,
            sum: w.zero_sum(),
        }
    }
}

impl fmt::Display for BallCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(u={}, i={}, k={}, c={}, D={})",
            self.source, self.bound, self.radius, self.count, self.sum
        )
    }
}

/// Answer of the distance routine for one vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DistAnswer {
    pub within: bool,
    pub dist: Distance,
    pub len: Option<usize>,
}

impl DistAnswer {
    pub fn outside() -> Self {
        Self {
            within: false,
            dist: Distance::Infinite,
            len: None,
        }
    }
}

// Guesses a walk of weight <= k and at most `bound` edges from the source
// to `target`, one outgoing edge at a time; arriving at `target` ends it.
fn guess_path(
    g: &Graph,
    w: &WeightAssignment,
    census: &BallCensus,
    target: Vertex,
    chooser: &mut dyn Chooser,
    steps: &mut u64,
) -> Result<(LimbWeight, usize), Halt> {
    let mut at = census.source;
    let mut d = w.zero();
    let mut len = 0;
    while at != target {
        let out = g.out_edges(at);
        if out.is_empty() {
            return Err(reject("guessed path hit a dead end"));
        }
        *steps += 1;
        let j = chooser.choose(ChoicePoint {
            label: ChoiceLabel::Step { at, target },
            arity: out.len(),
        })?;
        let e = out[j];
        len += 1;
        if len > census.bound {
            return Err(reject("guessed path longer than i"));
        }
        d = d
            .checked_add(w.weight(e))
            .map_err(|e| reject(format!("guessed path weight: {e}")))?;
        *steps += 1;
        if d > census.radius {
            return Err(reject("guessed path heavier than k"));
        }
        at = g.head(e);
    }
    Ok((d, len))
}

// The body of the distance routine, reporting every vertex guessed into the
// ball. The sequence of guesses does not depend on which vertex is queried.
fn ball_walk(
    g: &Graph,
    w: &WeightAssignment,
    census: &BallCensus,
    chooser: &mut dyn Chooser,
    steps: &mut u64,
    mut on_member: impl FnMut(Vertex, &LimbWeight, usize),
) -> Result<(), Halt> {
    let n = g.n();
    let mut count = 0usize;
    let mut sum = w.zero_sum();
    for x in 1..=n {
        *steps += 1;
        let inside = chooser.choose(ChoicePoint {
            label: ChoiceLabel::InBall { vertex: x },
            arity: 2,
        })?;
        if inside == 1 {
            let (d, len) = guess_path(g, w, census, x, chooser, steps)?;
            count += 1;
            sum.add(&d).map_err(|e| reject(format!("census sum: {e}")))?;
            *steps += 1;
            if count > census.count {
                return Err(reject(format!("count exceeds c = {}", census.count)));
            }
            if sum > census.sum {
                return Err(reject(format!("sum {sum} exceeds D = {}", census.sum)));
            }
            on_member(x, &d, len);
        } else if count + (n - x) < census.count {
            return Err(reject(format!("count can no longer reach c = {}", census.count)));
        }
    }
    if count != census.count || sum != census.sum {
        return Err(reject(format!(
            "census mismatch: count {count} sum {sum} vs c = {} D = {}",
            census.count, census.sum
        )));
    }
    Ok(())
}

/// Decides `d^i(u, v) <= k` and, when it holds, returns `d^i(u, v)` and
/// `l^i(u, v)`. Written against a [`Chooser`] so it runs under either mode of
/// the [`harness`]; under the census promise exactly one computation path
/// accepts.
pub fn dist_subroutine(
    g: &Graph,
    w: &WeightAssignment,
    census: &BallCensus,
    v: Vertex,
    chooser: &mut dyn Chooser,
) -> Result<DistAnswer, Halt> {
    let mut answer = DistAnswer::outside();
    let mut steps = 0;
    ball_walk(g, w, census, chooser, &mut steps, |x, d, len| {
        if x == v {
            answer = DistAnswer {
                within: true,
                dist: Distance::Finite(d.clone()),
                len: Some(len),
            };
        }
    })?;
    Ok(answer)
}

/// Ball members `(d, len)` by vertex, as guessed on one computation path.
pub type Members = Vec<Option<(LimbWeight, usize)>>;

/// Enumerates the distance routine at `census` once for all query vertices.
///
/// The routine's guesses never depend on which vertex is queried, so every
/// `v` sees the same computation tree: the accepting count is shared and the
/// answer for `v` is read off the accepting path's members.
pub fn enumerate_stage(
    g: &Graph,
    w: &WeightAssignment,
    census: &BallCensus,
) -> Result<harness::RunOutcome<Members>, HarnessError> {
    harness::run_enumerate(
        |ch: &mut dyn Chooser| {
            let mut members = vec![None; g.n() + 1];
            let mut steps = 0;
            ball_walk(g, w, census, ch, &mut steps, |x, d, len| {
                members[x] = Some((d.clone(), len))
            })?;
            Ok(members)
        },
        enumeration_depth_cap(g, census.bound),
    )
}

/// The answer for `v` carried by an accepting path's members.
pub fn answer_for(members: &Members, v: Vertex) -> DistAnswer {
    match &members[v] {
        Some((d, len)) => DistAnswer {
            within: true,
            dist: Distance::Finite(d.clone()),
            len: Some(*len),
        },
        None => DistAnswer::outside(),
    }
}

/// Depth cap for enumerating the distance routine: one membership guess per
/// vertex plus at most `bound` steps per guessed path.
pub fn enumeration_depth_cap(g: &Graph, bound: usize) -> usize {
    g.n() * (bound + 1) + 1
}

/// Guide selecting the computation path consistent with a [`SettledTable`]:
/// a vertex is guessed inside iff its table distance is within the radius,
/// and its path is the table's chosen path.
pub struct TableGuide<'a> {
    g: &'a Graph,
    table: &'a SettledTable,
    radius: &'a LimbWeight,
    /// Target whose path is cached, with `(tail, out-edge position)` per hop.
    target: Option<Vertex>,
    hops: Vec<(Vertex, usize)>,
}

impl<'a> TableGuide<'a> {
    pub fn new(g: &'a Graph, table: &'a SettledTable, radius: &'a LimbWeight) -> Self {
        Self {
            g,
            table,
            radius,
            target: None,
            hops: Vec::new(),
        }
    }

    fn load(&mut self, target: Vertex) {
        self.target = Some(target);
        self.hops.clear();
        let mut v = target;
        while let Some(e) = self.table.entry(v).parent {
            let tail = self.g.tail(e);
            let out = self.g.out_edges(tail);
            let pos = out.binary_search_by_key(&v, |&x| self.g.head(x)).ok();
            self.hops.push((tail, pos.unwrap_or(usize::MAX)));
            v = tail;
        }
    }
}

impl Guide for TableGuide<'_> {
    fn answer(&mut self, point: &ChoicePoint) -> usize {
        match point.label {
            ChoiceLabel::InBall { vertex } => {
                usize::from(self.table.entry(vertex).dist.finite().is_some_and(|d| d <= self.radius))
            }
            ChoiceLabel::Step { at, target } => {
                if self.target != Some(target) {
                    self.load(target);
                }
                self.hops
                    .iter()
                    .find(|&&(tail, _)| tail == at)
                    .map_or(point.arity, |&(_, pos)| pos.min(point.arity))
            }
            ChoiceLabel::Other { .. } => point.arity,
        }
    }
}

/// How a [`Session`] evaluates the distance routine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Follow the table-selected path; every check on it is asserted.
    Guided,
    /// Explore all guesses; anything but exactly one accepting path is an error.
    Enumerate,
}

/// Deliberate corruptions for negative tests.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Faults {
    /// Add one to `c` in the first census handed to the distance routine.
    pub corrupt_census: bool,
}

/// Recording of one min-uniqueness check (or of the final query).
#[derive(Clone, Debug, Serialize)]
pub struct CheckLog {
    pub purpose: CheckPurpose,
    pub bound: usize,
    #[serde(skip)]
    pub weights: WeightAssignment,
    pub stages: Vec<StageLog>,
    /// Distinct distance-routine invocations, in issue order.
    pub calls: Vec<CallLog>,
    pub bad: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckPurpose {
    Round { round: usize, prime: u64 },
    FinalQuery { s: Vertex, t: Vertex },
}

#[derive(Clone, Debug, Serialize)]
pub struct StageLog {
    pub census: BallCensus,
    pub next: Distance,
    pub bad: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CallLog {
    pub census: BallCensus,
    pub vertex: Vertex,
    pub answer: DistAnswer,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RecordOptions {
    pub stages: bool,
    pub calls: bool,
}

// Answers of the distance routine for every vertex at one census.
struct StageMemo {
    census: BallCensus,
    members: Vec<Option<(LimbWeight, usize)>>,
    /// Steps charged to each invocation, per queried vertex.
    cost: Vec<u64>,
    logged: Vec<bool>,
}

/// Register widths of the enclosing construction, for the space meter.
#[derive(Clone, Copy, Debug, Default)]
pub struct Frame {
    pub rounds_done: usize,
    pub prime_cap: u64,
}

/// Evaluation context for one `(graph, weights, length bound)`.
pub struct Session<'a> {
    g: &'a Graph,
    w: &'a WeightAssignment,
    bound: usize,
    mode: Mode,
    faults: Faults,
    frame: Frame,
    trace: &'a mut RunTrace,
    log: Option<CheckLog>,
    record: RecordOptions,
    table: Option<SettledTable>,
    memo: Option<StageMemo>,
}

impl<'a> Session<'a> {
    pub fn new(g: &'a Graph, w: &'a WeightAssignment, bound: usize, mode: Mode, trace: &'a mut RunTrace) -> Self {
        Self {
            g,
            w,
            bound,
            mode,
            faults: Faults::default(),
            frame: Frame {
                rounds_done: w.rounds(),
                prime_cap: w.base(),
            },
            trace,
            log: None,
            record: RecordOptions::default(),
            table: None,
            memo: None,
        }
    }

    pub fn with_faults(mut self, faults: Faults) -> Self {
        self.faults = faults;
        self
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn recording(mut self, purpose: CheckPurpose, record: RecordOptions) -> Self {
        if record.stages || record.calls {
            self.log = Some(CheckLog {
                purpose,
                bound: self.bound,
                weights: self.w.clone(),
                stages: Vec::new(),
                calls: Vec::new(),
                bad: false,
            });
        }
        self.record = record;
        self
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn take_log(&mut self) -> Option<CheckLog> {
        self.log.take()
    }

    fn census_registers(&self, census: &BallCensus) -> [LiveVar; 16] {
        let n = self.g.n() as u64;
        let vtx = ceil_log2(n + 1) as u64;
        let weight = census.radius.bit_width();
        let sum = census.sum.bit_width();
        let prime = ceil_log2(self.frame.prime_cap + 1) as u64;
        let var = |name, bits| LiveVar { name, bits };
        [
            // construction: the weight function is stored as its primes
            var("primes", self.frame.rounds_done as u64 * prime),
            var("round", vtx),
            var("s_t", 2 * vtx),
            // stepping loop
            var("source", vtx),
            var("k", weight),
            var("c", vtx),
            var("D", sum),
            var("k_next", weight),
            var("v_x_x'", 3 * vtx),
            var("mindist", weight),
            var("c_next", vtx),
            var("D_next", sum),
            // distance routine
            var("x_count_len", 3 * vtx),
            var("sum", sum),
            var("d_dist", 2 * weight),
            var("walk_at_flag", vtx + 1),
        ]
    }

    fn guided_stage(&mut self, census: &BallCensus) -> Result<StageMemo, CoreError> {
        let stale = self
            .table
            .as_ref()
            .is_none_or(|t| t.source != census.source || t.bound != census.bound);
        if stale {
            self.table = Some(settled_shortest_paths(self.g, self.w, census.source, census.bound)?);
        }
        let table = self.table.as_ref().expect("table just built");
        let mut guide = TableGuide::new(self.g, table, &census.radius);
        let n = self.g.n();
        let mut members = vec![None; n + 1];
        let mut steps = 0;
        let (g, w) = (self.g, self.w);
        harness::run_guided(
            |ch: &mut dyn Chooser| {
                steps = 0;
                members.iter_mut().for_each(|m| *m = None);
                ball_walk(g, w, census, ch, &mut steps, |x, d, len| {
                    members[x] = Some((d.clone(), len))
                })
            },
            &mut guide,
        )
        .map_err(|source| CoreError::Stage {
            census: Box::new(census.clone()),
            source,
        })?;
        Ok(StageMemo {
            census: census.clone(),
            members,
            cost: vec![steps; n + 1],
            logged: vec![false; n + 1],
        })
    }

    fn enumerated_stage(&mut self, census: &BallCensus) -> Result<StageMemo, CoreError> {
        let n = self.g.n();
        let outcome = enumerate_stage(self.g, self.w, census).map_err(|source| CoreError::Harness {
            census: Box::new(census.clone()),
            source,
        })?;
        let members = match (outcome.accepting_count, outcome.accepted_result) {
            (1, Some(m)) => m,
            (k, _) => {
                return Err(CoreError::Ambiguous {
                    census: Box::new(census.clone()),
                    accepting: k,
                })
            }
        };
        let cost = vec![outcome.choice_visits; n + 1];
        Ok(StageMemo {
            census: census.clone(),
            members,
            cost,
            logged: vec![false; n + 1],
        })
    }

    /// Makes `census` the current stage. Under [`Mode::Guided`] the routine
    /// runs once along the guide's path; under [`Mode::Enumerate`] every
    /// vertex is enumerated. Answers are then served per invocation, each
    /// charged the full cost of its own run.
    pub fn open_stage(&mut self, census: &BallCensus) -> Result<(), CoreError> {
        if self.memo.as_ref().is_some_and(|m| &m.census == census) {
            return Ok(());
        }
        let memo = match self.mode {
            Mode::Guided => self.guided_stage(census)?,
            Mode::Enumerate => self.enumerated_stage(census)?,
        };
        self.memo = Some(memo);
        let registers = self.census_registers(census);
        self.trace.record_checkpoint(&registers);
        Ok(())
    }

    /// One invocation of the distance routine for `v` at the open stage:
    /// `Some((d, len))` when `v` is inside the ball.
    #[inline]
    pub fn member(&mut self, v: Vertex) -> Option<(&LimbWeight, usize)> {
        let memo = self.memo.as_mut().expect("no open stage");
        self.trace.dist_invocations += 1;
        self.trace.steps += memo.cost[v];
        if self.record.calls && !std::mem::replace(&mut memo.logged[v], true) {
            if let Some(log) = &mut self.log {
                let answer = answer_for(&memo.members, v);
                log.calls.push(CallLog {
                    census: memo.census.clone(),
                    vertex: v,
                    answer,
                });
            }
        }
        memo.members[v].as_ref().map(|(d, len)| (d, *len))
    }

    /// Evaluates the distance routine for `v` against `census`.
    pub fn dist(&mut self, census: &BallCensus, v: Vertex) -> Result<DistAnswer, CoreError> {
        self.open_stage(census)?;
        self.member(v);
        Ok(answer_for(&self.memo.as_ref().expect("stage open").members, v))
    }
}

/// Smallest realized distance above the current radius, or infinity when
/// the ball is closed.
pub fn next_weight_value(s: &mut Session<'_>, census: &BallCensus) -> Result<Distance, CoreError> {
    let (g, w) = (s.g, s.w);
    s.open_stage(census)?;
    let mut next = Distance::Infinite;
    for v in g.vertices() {
        if s.member(v).is_some() {
            continue;
        }
        let mut best: Option<LimbWeight> = None;
        for &e in g.in_edges(v) {
            s.trace.step(1);
            let Some((dx, lx)) = s.member(g.tail(e)) else { continue };
            if lx + 1 > census.bound {
                continue;
            }
            let improves = match &best {
                None => true,
                Some(b) => dx.cmp_sum(w.weight(e), b)? == Ordering::Less,
            };
            if improves {
                best = Some(dx.checked_add(w.weight(e))?);
            }
            s.trace.step(1);
        }
        s.trace.step(1);
        if let Some(b) = best {
            if next.finite().is_none_or(|k| &b < k) {
                next = Distance::Finite(b);
            }
        }
    }
    if let Distance::Finite(k) = &next {
        if *k <= census.radius {
            return Err(CoreError::Invariant(format!(
                "next weight value {k} does not exceed k = {}",
                census.radius
            )));
        }
    }
    Ok(next)
}

/// Census at the next radius, with the min-uniqueness flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Update {
    pub count: usize,
    pub sum: CensusSum,
    pub bad: bool,
    /// First vertex found with two qualifying predecessors.
    pub witness: Option<Vertex>,
}

/// Extends the census from radius `k` to `next`, counting each vertex
/// outside the old ball once per qualifying predecessor edge.
pub fn inductive_update(s: &mut Session<'_>, census: &BallCensus, next: &LimbWeight) -> Result<Update, CoreError> {
    let (g, w) = (s.g, s.w);
    s.open_stage(census)?;
    let mut count = census.count;
    let mut sum = census.sum.clone();
    let mut witness = None;
    let qualifies = |s: &mut Session<'_>, e: usize| -> Result<bool, CoreError> {
        s.trace.step(1);
        let hit = match s.member(g.tail(e)) {
            Some((dx, lx)) if lx < census.bound => dx.cmp_sum(w.weight(e), next)? == Ordering::Equal,
            _ => return Ok(false),
        };
        s.trace.step(1);
        Ok(hit)
    };
    for v in g.vertices() {
        if s.member(v).is_some() {
            continue;
        }
        for &e in g.in_edges(v) {
            if !qualifies(s, e)? {
                continue;
            }
            count += 1;
            sum.add(next)?;
            for &other in g.in_edges(v) {
                if other != e && qualifies(s, other)? {
                    witness.get_or_insert(v);
                }
            }
        }
    }
    Ok(Update {
        count,
        sum,
        bad: witness.is_some(),
        witness,
    })
}

/// Per-source statistics of one check.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub bad: bool,
    /// `(source, vertex)` where the violation surfaced.
    pub violation: Option<(Vertex, Vertex)>,
    /// Largest number of stepping iterations from any single source.
    pub max_iterations: usize,
}

// Runs the stepping loop from `source` until the ball closes or a violation
// appears. Returns the final census and iteration count.
fn step_from(s: &mut Session<'_>, source: Vertex) -> Result<(BallCensus, usize, Option<Vertex>), CoreError> {
    let n = s.g.n();
    let mut census = BallCensus::initial(s.w, source, s.bound);
    if std::mem::take(&mut s.faults.corrupt_census) {
        census.count += 1;
    }
    let mut iterations = 0;
    loop {
        iterations += 1;
        s.trace.max_stage_iterations = s.trace.max_stage_iterations.max(iterations);
        if iterations > n {
            return Err(CoreError::Invariant(format!(
                "more than n = {n} stepping iterations from source {source}"
            )));
        }
        let next = next_weight_value(s, &census)?;
        let Distance::Finite(k_next) = &next else {
            if let Some(log) = &mut s.log {
                if s.record.stages {
                    log.stages.push(StageLog {
                        census: census.clone(),
                        next,
                        bad: false,
                    });
                }
            }
            return Ok((census, iterations, None));
        };
        let update = inductive_update(s, &census, k_next)?;
        if let Some(log) = &mut s.log {
            if s.record.stages {
                log.stages.push(StageLog {
                    census: census.clone(),
                    next: next.clone(),
                    bad: update.bad,
                });
            }
        }
        if update.bad {
            return Ok((census, iterations, update.witness));
        }
        census = BallCensus {
            source,
            bound: s.bound,
            radius: k_next.clone(),
            count: update.count,
            sum: update.sum,
        };
    }
}

/// Whether the graph is NOT min-unique for paths of at most `session.bound()`
/// edges. Stops at the first violation.
pub fn check_min_unique(s: &mut Session<'_>) -> Result<CheckOutcome, CoreError> {
    let mut outcome = CheckOutcome::default();
    for source in s.g.vertices() {
        let (_, iterations, witness) = step_from(s, source)?;
        outcome.max_iterations = outcome.max_iterations.max(iterations);
        if let Some(v) = witness {
            outcome.bad = true;
            outcome.violation = Some((source, v));
            break;
        }
    }
    if let Some(log) = &mut s.log {
        log.bad = outcome.bad;
    }
    Ok(outcome)
}

/// Convenience: guided check with a throwaway trace.
pub fn is_not_min_unique(g: &Graph, w: &WeightAssignment, bound: usize) -> Result<bool, CoreError> {
    let mut trace = RunTrace::default();
    let mut s = Session::new(g, w, bound, Mode::Guided, &mut trace);
    Ok(check_min_unique(&mut s)?.bad)
}

/// `d^i(s, t)` finite, decided by closing the ball around `s` and querying `t`.
pub fn decide_reach(s: &mut Session<'_>, source: Vertex, target: Vertex) -> Result<DistAnswer, CoreError> {
    let (census, _, witness) = step_from(s, source)?;
    if let Some(v) = witness {
        return Err(CoreError::Invariant(format!(
            "final weights not min-unique: tie at vertex {v} from source {source}"
        )));
    }
    s.dist(&census, target)
}

/// Number of doubling rounds: `ceil(log2 n)`, at least one.
pub fn round_count(n: usize) -> usize {
    (ceil_log2(n as u64) as usize).max(1)
}

/// Length bound checked in round `j`: `min(2^j, n - 1)`.
pub fn round_bound(n: usize, j: usize) -> usize {
    let cap = n.saturating_sub(1);
    if j >= usize::BITS as usize - 1 {
        cap
    } else {
        (1usize << j).min(cap)
    }
}

#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    /// Initial prime cap; defaults to `max(64, n^2)`.
    pub prime_cap: Option<u64>,
    pub mode: Option<Mode>,
    pub record: RecordOptions,
    pub faults: Faults,
}

/// Output of [`build_weights_and_decide`].
#[derive(Clone, Debug, Serialize)]
pub struct ConstructionResult {
    pub weights: WeightAssignment,
    pub q: usize,
    pub primes: Vec<u64>,
    pub prime_cap: u64,
    pub base: u64,
    pub bits_per_edge: u64,
    pub reach: bool,
    pub s: Vertex,
    pub t: Vertex,
    pub trace: RunTrace,
    #[serde(skip)]
    pub logs: Vec<CheckLog>,
}

enum RoundsError {
    Exhausted,
    Core(CoreError),
}

impl From<CoreError> for RoundsError {
    fn from(e: CoreError) -> Self {
        RoundsError::Core(e)
    }
}

impl From<NumericError> for RoundsError {
    fn from(e: NumericError) -> Self {
        match e {
            NumericError::PoolExhausted { .. } => RoundsError::Exhausted,
            e => RoundsError::Core(e.into()),
        }
    }
}

fn run_rounds(
    g: &Graph,
    prime_cap: u64,
    opts: &BuildOptions,
    trace: &mut RunTrace,
    logs: &mut Vec<CheckLog>,
) -> Result<WeightAssignment, RoundsError> {
    let n = g.n();
    let pool = PrimePool::new(prime_cap);
    let mut w = WeightAssignment::empty(g, base_for(n, prime_cap));
    let mut faults = opts.faults;
    for j in 1..=round_count(n) {
        let bound = round_bound(n, j);
        trace.rounds.push(RoundLog {
            round: j,
            length_bound: bound,
            ..Default::default()
        });
        let mut p = pool.first()?;
        loop {
            trace.rounds.last_mut().expect("round pushed").primes_tried.push(p);
            let candidate = compose_round_weight(&w, p, g)?;
            let mut session = Session::new(g, &candidate, bound, opts.mode.unwrap_or(Mode::Guided), trace)
                .with_faults(std::mem::take(&mut faults))
                .with_frame(Frame {
                    rounds_done: j,
                    prime_cap,
                })
                .recording(CheckPurpose::Round { round: j, prime: p }, opts.record);
            let outcome = check_min_unique(&mut session)?;
            logs.extend(session.take_log());
            if !outcome.bad {
                trace.rounds.last_mut().expect("round pushed").chosen = Some(p);
                w = candidate;
                break;
            }
            p = pool.next_after(p)?;
        }
    }
    Ok(w)
}

/// Answers `s -> t` over finished weights, closing the ball around `s` with
/// the full length bound `n - 1`.
#[allow(clippy::too_many_arguments)]
pub fn query_with_weights(
    g: &Graph,
    w: &WeightAssignment,
    s: Vertex,
    t: Vertex,
    opts: &BuildOptions,
    prime_cap: u64,
    trace: &mut RunTrace,
    logs: &mut Vec<CheckLog>,
) -> Result<DistAnswer, CoreError> {
    for v in [s, t] {
        if !g.contains_vertex(v) {
            return Err(CoreError::Invariant(format!("query vertex {v} not in 1..={}", g.n())));
        }
    }
    let bound = g.n().saturating_sub(1);
    let mut session = Session::new(g, w, bound, opts.mode.unwrap_or(Mode::Guided), trace)
        .with_frame(Frame {
            rounds_done: w.rounds(),
            prime_cap,
        })
        .recording(CheckPurpose::FinalQuery { s, t }, opts.record);
    let answer = decide_reach(&mut session, s, t)?;
    logs.extend(session.take_log());
    Ok(answer)
}

/// Builds min-unique limb weights for `g` and decides whether `t` is
/// reachable from `s`.
///
/// Round `j` appends one residue limb, trying odd primes in ascending order
/// until the graph is min-unique for paths of at most `min(2^j, n - 1)`
/// edges. If a round runs out of primes the cap doubles and construction
/// restarts from round one.
pub fn build_weights_and_decide(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    opts: &BuildOptions,
) -> Result<ConstructionResult, CoreError> {
    for v in [s, t] {
        if !g.contains_vertex(v) {
            return Err(CoreError::Invariant(format!("query vertex {v} not in 1..={}", g.n())));
        }
    }
    let n = g.n();
    let mut prime_cap = opts.prime_cap.unwrap_or_else(|| initial_prime_cap(n)).max(3);
    let mut trace = RunTrace::default();
    let mut logs = Vec::new();
    let weights = loop {
        if prime_cap.checked_mul(n as u64 + 1).is_none_or(|x| x > u64::MAX / 4) {
            return Err(CoreError::PrimeCapOverflow(prime_cap));
        }
        trace.prime_cap = prime_cap;
        logs.clear();
        match run_rounds(g, prime_cap, opts, &mut trace, &mut logs) {
            Ok(w) => break w,
            Err(RoundsError::Exhausted) => {
                trace.restarts += 1;
                trace.rounds.clear();
                prime_cap *= 2;
            }
            Err(RoundsError::Core(e)) => return Err(e),
        }
    };
    let q = weights.rounds();
    let answer = query_with_weights(g, &weights, s, t, opts, prime_cap, &mut trace, &mut logs)?;
    Ok(ConstructionResult {
        q,
        primes: weights.primes().to_vec(),
        prime_cap,
        base: weights.base(),
        bits_per_edge: weights.bits_per_edge(),
        weights,
        reach: answer.within,
        s,
        t,
        trace,
        logs,
    })
}
