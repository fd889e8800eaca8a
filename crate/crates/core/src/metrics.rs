//! Step counting and an abstract register-footprint meter.
//!
//! "Space" here is the total bit width of the variables the pipeline keeps
//! live at its deepest point (primes encoding the weight function, ball
//! census, loop indices, the distance routine's counters). It is a proxy
//! for work-tape usage, not process memory; the brute-force oracle is never
//! metered.

use serde::Serialize;
use thiserror::Error;

/// Largest rise in the local log-log step slope allowed between consecutive
/// sweep points before the report flags super-polynomial drift.
pub const DRIFT_TOLERANCE: f64 = 0.5;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RoundLog {
    pub round: usize,
    pub length_bound: usize,
    pub primes_tried: Vec<u64>,
    pub chosen: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunTrace {
    /// Edge inspections, limb comparisons and choice-point visits.
    pub steps: u64,
    pub peak_register_bits: u64,
    pub rounds: Vec<RoundLog>,
    pub restarts: u32,
    pub prime_cap: u64,
    pub dist_invocations: u64,
    /// Most stepping iterations any single source needed in any check.
    pub max_stage_iterations: usize,
}

/// One live variable in a register census.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiveVar {
    pub name: &'static str,
    pub bits: u64,
}

impl RunTrace {
    pub fn step(&mut self, k: u64) {
        self.steps += k;
    }

    /// Raises the peak to the census total if larger. An empty census is a no-op.
    pub fn record_checkpoint(&mut self, census: &[LiveVar]) {
        let total = census.iter().map(|v| v.bits).sum();
        self.peak_register_bits = self.peak_register_bits.max(total);
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("scaling report needs at least 4 distinct sizes, got {0}")]
    TooFewPoints(usize),
    #[error("non-positive measurement at n = {0}")]
    NonPositive(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    pub steps: u64,
    pub peak_bits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub steps: u64,
    pub peak_bits: u64,
    pub log2n_squared: u64,
    pub bits_ratio: f64,
    /// Slope of log(steps) against log(n) from the previous row.
    pub local_exponent: Option<f64>,
    pub savitch_steps: f64,
    pub savitch_local_exponent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub note: &'static str,
    pub rows: Vec<ScalingRow>,
    pub step_exponent: f64,
    /// Least-squares `a` in `peak_bits ~ a * ceil(log2 n)^2`.
    pub bits_coefficient: f64,
    pub drift_flagged: bool,
    pub bits_ratio_non_increasing: bool,
}

const NOTE: &str = "space = bit width of live pipeline registers (abstract census, not process memory); \
steps = edge inspections + limb comparisons + choice points; savitch column is a recurrence count for context";

/// Step count of a Savitch-style midpoint recursion deciding reachability
/// within `n` steps: `T(1) = 1`, `T(l) = 2n * T(ceil(l/2)) + n`.
pub fn savitch_steps(n: usize) -> f64 {
    fn t(n: f64, l: usize) -> f64 {
        if l <= 1 {
            1.0
        } else {
            2.0 * n * t(n, l.div_ceil(2)) + n
        }
    }
    t(n as f64, n.max(1))
}

pub fn ceil_log2_sq(n: usize) -> u64 {
    let l = crate::numeric::ceil_log2(n as u64).max(1) as u64;
    l * l
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Least-squares fit of `log(steps)` against `log(n)` plus per-size ratios
/// `peak_bits / ceil(log2 n)^2`. Points are sorted by `n`.
pub fn scaling_report(points: &[SweepPoint]) -> Result<ScalingReport, MetricsError> {
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.n);
    pts.dedup_by_key(|p| p.n);
    if pts.len() < 4 {
        return Err(MetricsError::TooFewPoints(pts.len()));
    }
    if let Some(p) = pts.iter().find(|p| p.steps == 0 || p.n < 2) {
        return Err(MetricsError::NonPositive(p.n));
    }
    let ln_n: Vec<f64> = pts.iter().map(|p| (p.n as f64).ln()).collect();
    let ln_steps: Vec<f64> = pts.iter().map(|p| (p.steps as f64).ln()).collect();
    let ln_sav: Vec<f64> = pts.iter().map(|p| savitch_steps(p.n).ln()).collect();

    let mut rows = Vec::with_capacity(pts.len());
    for (idx, p) in pts.iter().enumerate() {
        let l2 = ceil_log2_sq(p.n);
        let local = |ys: &[f64]| (idx > 0).then(|| (ys[idx] - ys[idx - 1]) / (ln_n[idx] - ln_n[idx - 1]));
        rows.push(ScalingRow {
            n: p.n,
            steps: p.steps,
            peak_bits: p.peak_bits,
            log2n_squared: l2,
            bits_ratio: p.peak_bits as f64 / l2 as f64,
            local_exponent: local(&ln_steps),
            savitch_steps: ln_sav[idx].exp(),
            savitch_local_exponent: local(&ln_sav),
        });
    }
    let locals: Vec<f64> = rows.iter().filter_map(|r| r.local_exponent).collect();
    let drift_flagged = locals.windows(2).any(|w| w[1] > w[0] + DRIFT_TOLERANCE);
    let num: f64 = rows.iter().map(|r| r.peak_bits as f64 * r.log2n_squared as f64).sum();
    let den: f64 = rows.iter().map(|r| (r.log2n_squared as f64).powi(2)).sum();
    let first = rows.first().map_or(0.0, |r| r.bits_ratio);
    let last = rows.last().map_or(0.0, |r| r.bits_ratio);
    Ok(ScalingReport {
        note: NOTE,
        step_exponent: slope(&ln_n, &ln_steps),
        bits_coefficient: num / den,
        drift_flagged,
        bits_ratio_non_increasing: last <= first,
        rows,
    })
}

impl ScalingReport {
    /// Aligned plain-text view of the report.
    pub fn to_table(&self) -> String {
        let mut s = format!("# {}\n", self.note);
        s.push_str(&format!(
            "{:>6} {:>16} {:>10} {:>8} {:>8} {:>8} {:>12} {:>8}\n",
            "n", "steps", "peak_bits", "log2^2", "ratio", "slope", "savitch", "sav_slp"
        ));
        let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3}"));
        for r in &self.rows {
            s.push_str(&format!(
                "{:>6} {:>16} {:>10} {:>8} {:>8.3} {:>8} {:>12.3e} {:>8}\n",
                r.n,
                r.steps,
                r.peak_bits,
                r.log2n_squared,
                r.bits_ratio,
                opt(r.local_exponent),
                r.savitch_steps,
                opt(r.savitch_local_exponent)
            ));
        }
        s.push_str(&format!(
            "step exponent {:.3}; bits coefficient {:.3}; drift flagged {}; ratio non-increasing {}\n",
            self.step_exponent, self.bits_coefficient, self.drift_flagged, self.bits_ratio_non_increasing
        ));
        s
    }
}
