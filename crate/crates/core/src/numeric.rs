//! Primes, modular powers of two, and carry-free limb-vector weights.
//!
//! A weight built over `q` rounds is the integer `sum_j limb_j * B^(q-j)`.
//! Because `B` is chosen larger than any per-limb path sum, that integer is
//! never materialized: addition is limb-wise and comparison is lexicographic,
//! most-significant (earliest round) limb first.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::graph::Graph;

pub type Limbs = SmallVec<[u64; 8]>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumericError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("prime pool exhausted above {last} (cap {cap})")]
    PoolExhausted { last: u64, cap: u64 },
    #[error("limb weights differ in shape: {a_len} limbs base {a_base} vs {b_len} limbs base {b_base}")]
    ShapeMismatch {
        a_len: usize,
        a_base: u64,
        b_len: usize,
        b_base: u64,
    },
    #[error("limb {index} overflows base {base}: sum {sum}")]
    LimbOverflow { index: usize, sum: u64, base: u64 },
    #[error("arithmetic on infinity")]
    InfiniteOperand,
    #[error("invalid weight assignment: {0}")]
    InvalidAssignment(String),
}

/// Deterministic Miller-Rabin; exact for every `u64`.
pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if x.is_multiple_of(p) {
            return x == p;
        }
    }
    let mut d = x - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut y = pow_mod(a, d, x);
        if y == 1 || y == x - 1 {
            continue;
        }
        for _ in 1..s {
            y = mul_mod(y, y, x);
            if y == x - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// `2^exp mod p` by repeated squaring. Never zero for odd `p`.
pub fn mod_pow2(exp: u64, p: u64) -> Result<u64, NumericError> {
    if p.is_multiple_of(2) || !is_prime(p) {
        return Err(NumericError::NotOddPrime(p));
    }
    Ok(pow_mod(2, exp, p))
}

/// Smallest prime strictly greater than `p`.
pub fn next_prime(p: u64) -> u64 {
    let mut x = p + 1;
    while !is_prime(x) {
        x += 1;
    }
    x
}

/// The odd primes in `[3, cap]`, walked in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePool {
    cap: u64,
}

impl PrimePool {
    pub fn new(cap: u64) -> Self {
        Self { cap }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn first(&self) -> Result<u64, NumericError> {
        self.next_after(2)
    }

    pub fn next_after(&self, p: u64) -> Result<u64, NumericError> {
        let next = next_prime(p.max(2));
        if next > self.cap {
            Err(NumericError::PoolExhausted { last: p, cap: self.cap })
        } else {
            Ok(next)
        }
    }
}

/// Initial prime cap for an `n`-vertex graph.
pub fn initial_prime_cap(n: usize) -> u64 {
    (n as u64 * n as u64).max(64)
}

/// Radix that keeps every limb of every path weight (at most `n - 1` edges,
/// residues below `p_max`) strictly below it.
pub fn base_for(n: usize, p_max: u64) -> u64 {
    n.max(1) as u64 * p_max + 1
}

/// Bits needed to store any value in `[0, bound)`, i.e. `ceil(log2 bound)`.
pub fn ceil_log2(bound: u64) -> u32 {
    if bound <= 1 {
        0
    } else {
        64 - (bound - 1).leading_zeros()
    }
}

/// A finite weight: one residue limb per round, most significant first.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LimbWeight {
    limbs: Limbs,
    base: u64,
}

impl LimbWeight {
    pub fn new(limbs: impl Into<Limbs>, base: u64) -> Result<Self, NumericError> {
        let limbs = limbs.into();
        if let Some((index, &sum)) = limbs.iter().enumerate().find(|(_, &l)| l >= base) {
            return Err(NumericError::LimbOverflow { index, sum, base });
        }
        Ok(Self { limbs, base })
    }

    pub fn zero(len: usize, base: u64) -> Self {
        Self {
            limbs: SmallVec::from_elem(0, len),
            base,
        }
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.limbs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.limbs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Storage width: `len * ceil(log2 B)`.
    pub fn bit_width(&self) -> u64 {
        self.limbs.len() as u64 * ceil_log2(self.base) as u64
    }

    fn check_shape(&self, other: &Self) -> Result<(), NumericError> {
        if self.limbs.len() != other.limbs.len() || self.base != other.base {
            return Err(NumericError::ShapeMismatch {
                a_len: self.limbs.len(),
                a_base: self.base,
                b_len: other.limbs.len(),
                b_base: other.base,
            });
        }
        Ok(())
    }

    /// Limb-wise sum; any limb reaching `B` is an invariant breach.
    pub fn checked_add(&self, other: &Self) -> Result<Self, NumericError> {
        self.check_shape(other)?;
        let mut limbs = self.limbs.clone();
        for (index, (a, &b)) in limbs.iter_mut().zip(&other.limbs).enumerate() {
            let sum = *a + b;
            if sum >= self.base {
                return Err(NumericError::LimbOverflow {
                    index,
                    sum,
                    base: self.base,
                });
            }
            *a = sum;
        }
        Ok(Self { limbs, base: self.base })
    }

    /// Compares `self + addend` with `target` without building the sum.
    /// Overflow is checked on every limb, as in [`Self::checked_add`].
    pub fn cmp_sum(&self, addend: &Self, target: &Self) -> Result<Ordering, NumericError> {
        self.check_shape(addend)?;
        self.check_shape(target)?;
        let mut order = Ordering::Equal;
        for (index, ((&a, &b), &t)) in self.limbs.iter().zip(&addend.limbs).zip(&target.limbs).enumerate() {
            let sum = a + b;
            if sum >= self.base {
                return Err(NumericError::LimbOverflow {
                    index,
                    sum,
                    base: self.base,
                });
            }
            if order == Ordering::Equal {
                order = sum.cmp(&t);
            }
        }
        Ok(order)
    }

    /// The first `j` limbs (the weight as it stood after round `j`).
    pub fn prefix(&self, j: usize) -> Self {
        Self {
            limbs: self.limbs[..j].into(),
            base: self.base,
        }
    }

    fn push_limb(&mut self, limb: u64) {
        debug_assert!(limb < self.base);
        self.limbs.push(limb);
    }
}

impl Ord for LimbWeight {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.limbs.len(), other.limbs.len());
        self.limbs.cmp(&other.limbs)
    }
}

impl PartialOrd for LimbWeight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for LimbWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LimbWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.limbs.as_slice())
    }
}

/// A limb weight or the infinity sentinel, which sorts above every finite value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Distance {
    Finite(LimbWeight),
    Infinite,
}

impl Distance {
    pub fn is_finite(&self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn finite(&self) -> Option<&LimbWeight> {
        match self {
            Distance::Finite(w) => Some(w),
            Distance::Infinite => None,
        }
    }
}

impl From<LimbWeight> for Distance {
    fn from(w: LimbWeight) -> Self {
        Distance::Finite(w)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(w) => write!(f, "{w}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Lexicographic comparison; infinity equals itself and exceeds everything else.
pub fn limb_compare(a: &Distance, b: &Distance) -> Result<Ordering, NumericError> {
    match (a, b) {
        (Distance::Finite(x), Distance::Finite(y)) => {
            x.check_shape(y)?;
            Ok(x.limbs.cmp(&y.limbs))
        }
        (Distance::Finite(_), Distance::Infinite) => Ok(Ordering::Less),
        (Distance::Infinite, Distance::Finite(_)) => Ok(Ordering::Greater),
        (Distance::Infinite, Distance::Infinite) => Ok(Ordering::Equal),
    }
}

pub fn limb_add(a: &Distance, b: &Distance) -> Result<LimbWeight, NumericError> {
    match (a, b) {
        (Distance::Finite(x), Distance::Finite(y)) => x.checked_add(y),
        _ => Err(NumericError::InfiniteOperand),
    }
}

/// Exact integer sum of several limb weights, carry-normalized in base `B`
/// with one extra leading digit. Used for the ball census `D`, which sums up
/// to `n` distances and can therefore overflow individual limbs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CensusSum {
    // digits[0] is the overflow digit; digits[1..] align with the limbs
    digits: Limbs,
    base: u64,
}

impl CensusSum {
    pub fn zero(len: usize, base: u64) -> Self {
        Self {
            digits: SmallVec::from_elem(0, len + 1),
            base,
        }
    }

    pub fn from_weight(w: &LimbWeight) -> Self {
        let mut s = Self::zero(w.len(), w.base);
        s.digits[1..].copy_from_slice(&w.limbs);
        s
    }

    pub fn add(&mut self, w: &LimbWeight) -> Result<(), NumericError> {
        if w.len() + 1 != self.digits.len() || w.base != self.base {
            return Err(NumericError::ShapeMismatch {
                a_len: self.digits.len() - 1,
                a_base: self.base,
                b_len: w.len(),
                b_base: w.base,
            });
        }
        let mut carry = 0u64;
        for j in (0..self.digits.len()).rev() {
            let limb = if j == 0 { 0 } else { w.limbs[j - 1] };
            let t = self.digits[j] as u128 + limb as u128 + carry as u128;
            if j == 0 {
                self.digits[0] = u64::try_from(t).map_err(|_| NumericError::LimbOverflow {
                    index: 0,
                    sum: u64::MAX,
                    base: self.base,
                })?;
            } else {
                self.digits[j] = (t % self.base as u128) as u64;
                carry = (t / self.base as u128) as u64;
            }
        }
        Ok(())
    }

    pub fn plus(mut self, w: &LimbWeight) -> Result<Self, NumericError> {
        self.add(w)?;
        Ok(self)
    }

    /// Base-`B` digits, overflow digit first.
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn bit_width(&self) -> u64 {
        let top = 64 - self.digits[0].leading_zeros() as u64;
        (self.digits.len() as u64 - 1) * ceil_log2(self.base) as u64 + top.max(1)
    }
}

impl fmt::Debug for CensusSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for CensusSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits[0] == 0 {
            write!(f, "{:?}", &self.digits[1..])
        } else {
            write!(f, "{}:{:?}", self.digits[0], &self.digits[1..])
        }
    }
}

/// Per-edge limb weights after some number of rounds, plus the primes that
/// produced them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AssignmentJson", into = "AssignmentJson")]
pub struct WeightAssignment {
    n: usize,
    base: u64,
    primes: Vec<u64>,
    rounds: usize,
    weights: Vec<LimbWeight>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentJson {
    n: usize,
    m: usize,
    #[serde(rename = "B")]
    base: u64,
    primes: Vec<u64>,
    limbs: Vec<Vec<u64>>,
}

impl From<WeightAssignment> for AssignmentJson {
    fn from(w: WeightAssignment) -> Self {
        Self {
            n: w.n,
            m: w.weights.len(),
            base: w.base,
            primes: w.primes,
            limbs: w.weights.iter().map(|l| l.limbs.to_vec()).collect(),
        }
    }
}

impl TryFrom<AssignmentJson> for WeightAssignment {
    type Error = NumericError;

    fn try_from(j: AssignmentJson) -> Result<Self, Self::Error> {
        if j.limbs.len() != j.m {
            return Err(NumericError::InvalidAssignment(format!(
                "m = {} but {} limb vectors",
                j.m,
                j.limbs.len()
            )));
        }
        let mut w = WeightAssignment::from_limbs(j.n, j.base, j.limbs)?;
        if j.m == 0 {
            w.rounds = j.primes.len();
        }
        if !j.primes.is_empty() {
            if j.primes.len() != w.rounds {
                return Err(NumericError::InvalidAssignment(format!(
                    "{} primes for {} rounds",
                    j.primes.len(),
                    w.rounds
                )));
            }
            w.primes = j.primes;
        }
        Ok(w)
    }
}

impl WeightAssignment {
    /// The round-0 assignment: every edge has an empty limb vector.
    pub fn empty(g: &Graph, base: u64) -> Self {
        Self {
            n: g.n(),
            base,
            primes: Vec::new(),
            rounds: 0,
            weights: vec![LimbWeight::zero(0, base); g.m()],
        }
    }

    /// Hand-built weights (test fixtures and fault injection); no primes recorded.
    pub fn from_limbs(n: usize, base: u64, limbs: Vec<Vec<u64>>) -> Result<Self, NumericError> {
        let rounds = limbs.first().map_or(0, Vec::len);
        let weights = limbs
            .into_iter()
            .map(|l| {
                if l.len() != rounds {
                    return Err(NumericError::InvalidAssignment(
                        "edges carry different limb counts".into(),
                    ));
                }
                LimbWeight::new(l, base)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            n,
            base,
            primes: Vec::new(),
            rounds,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn weight(&self, e: usize) -> &LimbWeight {
        &self.weights[e]
    }

    pub fn weights(&self) -> &[LimbWeight] {
        &self.weights
    }

    pub fn zero(&self) -> LimbWeight {
        LimbWeight::zero(self.rounds, self.base)
    }

    pub fn zero_sum(&self) -> CensusSum {
        CensusSum::zero(self.rounds, self.base)
    }

    /// Bits of one edge weight: `rounds * ceil(log2 B)`.
    pub fn bits_per_edge(&self) -> u64 {
        self.rounds as u64 * ceil_log2(self.base) as u64
    }

    /// The assignment as it stood after round `j`.
    pub fn truncate(&self, j: usize) -> Self {
        assert!(j <= self.rounds);
        Self {
            n: self.n,
            base: self.base,
            primes: self.primes[..j.min(self.primes.len())].to_vec(),
            rounds: j,
            weights: self.weights.iter().map(|w| w.prefix(j)).collect(),
        }
    }
}

/// One round of the doubling construction: every edge `e_i` gains the new
/// least-significant limb `2^(i-1) mod p`.
pub fn compose_round_weight(prev: &WeightAssignment, p: u64, g: &Graph) -> Result<WeightAssignment, NumericError> {
    if g.m() != prev.m() || g.n() != prev.n {
        return Err(NumericError::InvalidAssignment(
            "assignment was built for a different graph".into(),
        ));
    }
    if p >= prev.base {
        return Err(NumericError::InvalidAssignment(format!(
            "prime {p} does not fit below base {}",
            prev.base
        )));
    }
    let mut next = prev.clone();
    let mut residue = mod_pow2(0, p)?;
    for w in &mut next.weights {
        w.push_limb(residue);
        residue = residue * 2 % p;
    }
    next.primes.push(p);
    next.rounds += 1;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_diamond_stack, Graph};

    fn w(limbs: &[u64], base: u64) -> LimbWeight {
        LimbWeight::new(limbs.to_vec(), base).unwrap()
    }

    #[test]
    fn cmp_sum_matches_materialized_sum() {
        let w = |l: &[u64]| LimbWeight::new(l.to_vec(), 10).unwrap();
        assert_eq!(w(&[1, 2]).cmp_sum(&w(&[3, 4]), &w(&[4, 6])).unwrap(), Ordering::Equal);
        assert_eq!(w(&[1, 2]).cmp_sum(&w(&[3, 4]), &w(&[4, 7])).unwrap(), Ordering::Less);
        assert_eq!(w(&[1, 2]).cmp_sum(&w(&[3, 4]), &w(&[3, 9])).unwrap(), Ordering::Greater);
        assert!(matches!(
            w(&[1, 8]).cmp_sum(&w(&[0, 4]), &w(&[0, 0])),
            Err(NumericError::LimbOverflow {
                index: 1,
                sum: 12,
                base: 10
            })
        ));
    }

    #[test]
    fn mod_pow2_examples() {
        assert_eq!(mod_pow2(0, 3), Ok(1));
        assert_eq!(mod_pow2(4, 5), Ok(16 % 5));
        assert_eq!(mod_pow2(3, 5), Ok(8 % 5));
        assert_eq!(mod_pow2(3, 2), Err(NumericError::NotOddPrime(2)));
        assert_eq!(mod_pow2(3, 9), Err(NumericError::NotOddPrime(9)));
    }

    #[test]
    fn primality_matches_trial_division() {
        let trial = |x: u64| x >= 2 && (2..x).take_while(|d| d * d <= x).all(|d| !x.is_multiple_of(d));
        for x in 0..5000 {
            assert_eq!(is_prime(x), trial(x), "{x}");
        }
        assert!(is_prime(97));
        assert!(!is_prime(1));
        assert!(is_prime(2));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn next_prime_examples() {
        assert_eq!(next_prime(2), 3);
        assert_eq!(next_prime(3), 5);
        assert_eq!(next_prime(13), 17);
        let pool = PrimePool::new(20);
        assert_eq!(pool.first(), Ok(3));
        assert_eq!(pool.next_after(17), Ok(19));
        assert!(matches!(pool.next_after(19), Err(NumericError::PoolExhausted { .. })));
    }

    #[test]
    fn compare_examples() {
        let cmp = |a: &[u64], b: &[u64]| limb_compare(&w(a, 10).into(), &w(b, 10).into()).unwrap();
        assert_eq!(cmp(&[2, 1], &[2, 0]), Ordering::Greater);
        assert_eq!(cmp(&[1, 9], &[2, 0]), Ordering::Less);
        assert_eq!(
            limb_compare(&w(&[3, 3], 10).into(), &Distance::Infinite),
            Ok(Ordering::Less)
        );
        assert_eq!(
            limb_compare(&Distance::Infinite, &Distance::Infinite),
            Ok(Ordering::Equal)
        );
        assert!(limb_compare(&w(&[1], 10).into(), &w(&[1, 0], 10).into()).is_err());
        assert!(limb_compare(&w(&[1], 10).into(), &w(&[1], 11).into()).is_err());
    }

    #[test]
    fn add_examples() {
        let x = w(&[4, 7], 10);
        assert_eq!(limb_add(&w(&[0, 0], 10).into(), &x.clone().into()), Ok(x));
        assert_eq!(
            limb_add(&w(&[1, 2], 10).into(), &w(&[2, 2], 10).into()),
            Ok(w(&[3, 4], 10))
        );
        assert!(matches!(
            limb_add(&w(&[5, 2], 10).into(), &w(&[5, 2], 10).into()),
            Err(NumericError::LimbOverflow {
                index: 0,
                sum: 10,
                base: 10
            })
        ));
        assert_eq!(
            limb_add(&Distance::Infinite, &w(&[1], 10).into()),
            Err(NumericError::InfiniteOperand)
        );
    }

    #[test]
    fn census_sum_carries() {
        let mut s = CensusSum::zero(2, 10);
        s.add(&w(&[9, 9], 10)).unwrap();
        s.add(&w(&[0, 3], 10)).unwrap();
        assert_eq!(s.digits(), &[1, 0, 2]);
        assert!(s > CensusSum::from_weight(&w(&[9, 9], 10)));
    }

    #[test]
    fn round_one_g1_and_d1() {
        let g1 = Graph::parse_edge_list("3 3\n1 2\n2 3\n1 3").unwrap();
        let r1 = compose_round_weight(&WeightAssignment::empty(&g1, 100), 3, &g1).unwrap();
        let limbs: Vec<_> = r1.weights().iter().map(|w| w.limbs().to_vec()).collect();
        assert_eq!(limbs, vec![vec![1], vec![2], vec![1]]);

        let d1 = gen_diamond_stack(1).unwrap();
        let r1 = compose_round_weight(&WeightAssignment::empty(&d1, 257), 3, &d1).unwrap();
        let limbs: Vec<_> = r1.weights().iter().map(|w| w.limbs().to_vec()).collect();
        assert_eq!(limbs, vec![vec![1], vec![2], vec![1], vec![2]]);
        let r2 = compose_round_weight(&r1, 3, &d1).unwrap();
        let limbs: Vec<_> = r2.weights().iter().map(|w| w.limbs().to_vec()).collect();
        assert_eq!(limbs, vec![vec![1, 1], vec![2, 2], vec![1, 1], vec![2, 2]]);
        assert_eq!(r2.primes(), &[3, 3]);
        assert_eq!(r2.truncate(1), r1);
        assert!(compose_round_weight(&r1, 2, &d1).is_err());
    }

    #[test]
    fn assignment_json_shape() {
        let d1 = gen_diamond_stack(1).unwrap();
        let r1 = compose_round_weight(&WeightAssignment::empty(&d1, 257), 5, &d1).unwrap();
        let json = serde_json::to_string(&r1).unwrap();
        assert_eq!(json, r#"{"n":4,"m":4,"B":257,"primes":[5],"limbs":[[1],[2],[4],[3]]}"#);
        let back: WeightAssignment = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r1);
        assert!(serde_json::from_str::<WeightAssignment>(r#"{"n":4,"m":1,"B":5,"primes":[],"limbs":[[7]]}"#).is_err());
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(257), 9);
        assert_eq!(ceil_log2(256), 8);
    }
}
