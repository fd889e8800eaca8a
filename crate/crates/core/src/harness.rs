//! Nondeterministic procedures and the two ways of running them.
//!
//! A procedure is ordinary code that asks a [`Chooser`] for every guess it
//! makes and returns `Err(Halt::Reject(..))` when a computation path halts
//! and rejects. [`run_enumerate`] explores every guess sequence depth-first
//! and counts accepting computation paths; [`run_guided`] follows the single
//! path an external guide selects and treats any rejection on it as a failed
//! assertion.

use serde::Serialize;
use thiserror::Error;

use crate::graph::Vertex;

/// What a choice point is deciding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChoiceLabel {
    /// Is `vertex` inside the current ball? Branch 0 = no, 1 = yes.
    InBall { vertex: Vertex },
    /// Next edge of a guessed path toward `target`, leaving `at`. Branch `j`
    /// is the `j`-th outgoing edge of `at` ordered by head vertex.
    Step { at: Vertex, target: Vertex },
    /// Free-form choice for procedures outside the distance routine.
    Other { tag: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChoicePoint {
    pub label: ChoiceLabel,
    pub arity: usize,
}

/// One recorded guess.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChoiceRecord {
    pub label: ChoiceLabel,
    pub arity: usize,
    pub taken: usize,
}

/// The guess log of one computation path.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChoiceScript(pub Vec<ChoiceRecord>);

impl ChoiceScript {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Why a computation path stopped without accepting.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Halt {
    #[error("rejected: {0}")]
    Reject(String),
    #[error("more than {cap} choice points on one path")]
    DepthCap { cap: usize },
    #[error("guide answered {taken} at {label:?} with arity {arity}")]
    BadGuide {
        label: ChoiceLabel,
        arity: usize,
        taken: usize,
    },
    #[error("replay diverged at choice {index}")]
    ReplayDiverged { index: usize },
}

pub fn reject(reason: impl Into<String>) -> Halt {
    Halt::Reject(reason.into())
}

pub trait Chooser {
    /// Picks a branch in `0..point.arity`. `arity` is at least 1.
    fn choose(&mut self, point: ChoicePoint) -> Result<usize, Halt>;
}

/// Supplies the intended branch at each choice point of a guided run.
pub trait Guide {
    fn answer(&mut self, point: &ChoicePoint) -> usize;
}

impl<F: FnMut(&ChoicePoint) -> usize> Guide for F {
    fn answer(&mut self, point: &ChoicePoint) -> usize {
        self(point)
    }
}

/// Result of exhaustive exploration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunOutcome<T> {
    pub accepting_count: u64,
    /// Payload of the accepting path, present iff exactly one path accepts.
    pub accepted_result: Option<T>,
    pub accepting_script: Option<ChoiceScript>,
    pub rejected: u64,
    /// Choice points visited over the whole exploration.
    pub choice_visits: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HarnessError {
    #[error("depth cap exceeded: more than {cap} choice points on one path")]
    DepthCapExceeded { cap: usize },
    #[error("guided run failed check: {reason}")]
    CheckFailed { reason: String, script: ChoiceScript },
    #[error("guide gave branch {taken} for {label:?} with arity {arity}")]
    BadGuide {
        label: ChoiceLabel,
        arity: usize,
        taken: usize,
    },
    #[error("replay diverged from script at choice {index}")]
    ReplayDiverged { index: usize },
}

impl HarnessError {
    fn from_halt(h: Halt, script: ChoiceScript) -> Self {
        match h {
            Halt::Reject(reason) => HarnessError::CheckFailed { reason, script },
            Halt::DepthCap { cap } => HarnessError::DepthCapExceeded { cap },
            Halt::BadGuide { label, arity, taken } => HarnessError::BadGuide { label, arity, taken },
            Halt::ReplayDiverged { index } => HarnessError::ReplayDiverged { index },
        }
    }
}

struct Frame {
    label: ChoiceLabel,
    arity: usize,
    taken: usize,
}

// Follows the frames as a prefix, opening new frames at branch 0 past it.
struct PrefixChooser<'a> {
    frames: &'a mut Vec<Frame>,
    pos: usize,
    cap: usize,
    visits: u64,
}

impl Chooser for PrefixChooser<'_> {
    fn choose(&mut self, point: ChoicePoint) -> Result<usize, Halt> {
        assert!(point.arity >= 1, "choice point {:?} with no branches", point.label);
        self.visits += 1;
        let pos = self.pos;
        self.pos += 1;
        if let Some(f) = self.frames.get(pos) {
            debug_assert_eq!(
                (f.label, f.arity),
                (point.label, point.arity),
                "nondeterministic replay"
            );
            return Ok(f.taken);
        }
        if pos >= self.cap {
            return Err(Halt::DepthCap { cap: self.cap });
        }
        self.frames.push(Frame {
            label: point.label,
            arity: point.arity,
            taken: 0,
        });
        Ok(0)
    }
}

/// Explores every guess sequence of `procedure` depth-first, branch 0 first.
///
/// The procedure is re-executed from the start for each path, following the
/// recorded prefix; it must be deterministic given its guesses. Rejecting
/// branches end their subtree immediately.
pub fn run_enumerate<T, F>(mut procedure: F, depth_cap: usize) -> Result<RunOutcome<T>, HarnessError>
where
    F: FnMut(&mut dyn Chooser) -> Result<T, Halt>,
{
    let mut frames: Vec<Frame> = Vec::new();
    let mut outcome = RunOutcome {
        accepting_count: 0,
        accepted_result: None,
        accepting_script: None,
        rejected: 0,
        choice_visits: 0,
    };
    loop {
        let mut chooser = PrefixChooser {
            frames: &mut frames,
            pos: 0,
            cap: depth_cap,
            visits: 0,
        };
        let result = procedure(&mut chooser);
        let (visited, used) = (chooser.visits, chooser.pos);
        outcome.choice_visits += visited;
        // a path may end before consuming a stale deeper suffix
        frames.truncate(used);
        match result {
            Ok(payload) => {
                outcome.accepting_count += 1;
                if outcome.accepting_count == 1 {
                    outcome.accepted_result = Some(payload);
                    outcome.accepting_script = Some(ChoiceScript(
                        frames
                            .iter()
                            .map(|f| ChoiceRecord {
                                label: f.label,
                                arity: f.arity,
                                taken: f.taken,
                            })
                            .collect(),
                    ));
                } else {
                    outcome.accepted_result = None;
                    outcome.accepting_script = None;
                }
            }
            Err(Halt::Reject(_)) => outcome.rejected += 1,
            Err(Halt::DepthCap { cap }) => return Err(HarnessError::DepthCapExceeded { cap }),
            Err(other) => return Err(HarnessError::from_halt(other, ChoiceScript::default())),
        }
        loop {
            match frames.last_mut() {
                None => return Ok(outcome),
                Some(f) if f.taken + 1 < f.arity => {
                    f.taken += 1;
                    break;
                }
                Some(_) => {
                    frames.pop();
                }
            }
        }
    }
}

struct GuidedChooser<'g, G: ?Sized> {
    guide: &'g mut G,
    script: Vec<ChoiceRecord>,
}

impl<G: Guide + ?Sized> Chooser for GuidedChooser<'_, G> {
    fn choose(&mut self, point: ChoicePoint) -> Result<usize, Halt> {
        let taken = self.guide.answer(&point);
        if taken >= point.arity {
            return Err(Halt::BadGuide {
                label: point.label,
                arity: point.arity,
                taken,
            });
        }
        self.script.push(ChoiceRecord {
            label: point.label,
            arity: point.arity,
            taken,
        });
        Ok(taken)
    }
}

/// Runs the single computation path chosen by `guide`. Any rejection on
/// that path is a failed check and surfaces as an error.
pub fn run_guided<T, F, G>(mut procedure: F, guide: &mut G) -> Result<(T, ChoiceScript), HarnessError>
where
    F: FnMut(&mut dyn Chooser) -> Result<T, Halt>,
    G: Guide + ?Sized,
{
    let mut chooser = GuidedChooser {
        guide,
        script: Vec::new(),
    };
    match procedure(&mut chooser) {
        Ok(payload) => Ok((payload, ChoiceScript(chooser.script))),
        Err(h) => Err(HarnessError::from_halt(h, ChoiceScript(chooser.script))),
    }
}

struct ReplayChooser<'a> {
    script: &'a ChoiceScript,
    pos: usize,
}

impl Chooser for ReplayChooser<'_> {
    fn choose(&mut self, point: ChoicePoint) -> Result<usize, Halt> {
        let index = self.pos;
        let rec = self.script.0.get(index).ok_or(Halt::ReplayDiverged { index })?;
        if rec.label != point.label || rec.arity != point.arity {
            return Err(Halt::ReplayDiverged { index });
        }
        self.pos += 1;
        Ok(rec.taken)
    }
}

/// Re-executes a recorded computation path.
pub fn replay<T, F>(mut procedure: F, script: &ChoiceScript) -> Result<T, HarnessError>
where
    F: FnMut(&mut dyn Chooser) -> Result<T, Halt>,
{
    let mut chooser = ReplayChooser { script, pos: 0 };
    let result = procedure(&mut chooser);
    let used = chooser.pos;
    match result {
        Ok(v) if used == script.len() => Ok(v),
        Ok(_) => Err(HarnessError::ReplayDiverged { index: used }),
        Err(h) => Err(HarnessError::from_halt(h, script.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn other(tag: u32, arity: usize) -> ChoicePoint {
        ChoicePoint {
            label: ChoiceLabel::Other { tag },
            arity,
        }
    }

    #[test]
    fn no_choices_accepts_once() {
        let out = run_enumerate(|_: &mut dyn Chooser| Ok(true), 8).unwrap();
        assert_eq!(out.accepting_count, 1);
        assert_eq!(out.accepted_result, Some(true));
        assert_eq!(out.rejected, 0);
    }

    #[test]
    fn counts_accepting_leaves() {
        // three binary guesses; accept when exactly two are 1
        let out = run_enumerate(
            |c: &mut dyn Chooser| {
                let mut ones = 0;
                for t in 0..3 {
                    ones += c.choose(other(t, 2))?;
                }
                if ones == 2 {
                    Ok(ones)
                } else {
                    Err(reject("wrong weight"))
                }
            },
            16,
        )
        .unwrap();
        assert_eq!(out.accepting_count, 3);
        assert_eq!(out.accepted_result, None);
        assert_eq!(out.rejected, 5);
    }

    #[test]
    fn variable_arity_and_early_reject() {
        // first guess picks how many further guesses follow
        let out = run_enumerate(
            |c: &mut dyn Chooser| {
                let k = c.choose(other(0, 3))?;
                if k == 0 {
                    return Err(reject("pruned"));
                }
                let mut s = 0;
                for t in 0..k {
                    s += c.choose(other(1 + t as u32, 2))?;
                }
                if s == k {
                    Ok(k)
                } else {
                    Err(reject("not all ones"))
                }
            },
            16,
        )
        .unwrap();
        assert_eq!(out.accepting_count, 2);
        assert_eq!(out.rejected, 1 + 1 + 3);
    }

    #[test]
    fn unique_accepting_path_replays() {
        let proc_ = |c: &mut dyn Chooser| {
            let a = c.choose(other(0, 4))?;
            let b = c.choose(other(1, 4))?;
            if a + b == 5 && a > b {
                Ok((a, b))
            } else {
                Err(reject("no"))
            }
        };
        let out = run_enumerate(proc_, 4).unwrap();
        assert_eq!(out.accepting_count, 1);
        assert_eq!(out.accepted_result, Some((3, 2)));
        let script = out.accepting_script.clone().unwrap();
        assert_eq!(replay(proc_, &script).unwrap(), out.accepted_result.unwrap());
        let mut guide = |p: &ChoicePoint| script.0.iter().find(|r| r.label == p.label).unwrap().taken;
        let (payload, guided_script) = run_guided(proc_, &mut guide).unwrap();
        assert_eq!(Some(payload), out.accepted_result);
        assert_eq!(guided_script, script);
    }

    #[test]
    fn depth_cap_aborts() {
        let err = run_enumerate(
            |c: &mut dyn Chooser| -> Result<(), Halt> {
                loop {
                    c.choose(other(0, 1))?;
                }
            },
            10,
        )
        .unwrap_err();
        assert_eq!(err, HarnessError::DepthCapExceeded { cap: 10 });
    }

    #[test]
    fn guided_failures_surface() {
        let proc_ = |c: &mut dyn Chooser| {
            if c.choose(other(0, 2))? == 1 {
                Ok(())
            } else {
                Err(reject("count mismatch"))
            }
        };
        let err = run_guided(proc_, &mut |_: &ChoicePoint| 0).unwrap_err();
        assert!(matches!(err, HarnessError::CheckFailed { ref reason, .. } if reason == "count mismatch"));
        let err = run_guided(proc_, &mut |_: &ChoicePoint| 7).unwrap_err();
        assert!(matches!(err, HarnessError::BadGuide { taken: 7, arity: 2, .. }));
        assert!(run_guided(proc_, &mut |_: &ChoicePoint| 1).is_ok());
    }
}
