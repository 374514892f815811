//! Brute-force reference solvers.
//!
//! Everything here enumerates subsets and asks the EDF engine whether they
//! can be scheduled. Exponential, deliberately simple, and independent of the
//! dynamic program it is used to check.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::edf::{self, EdfError};
use crate::model::{Instance, Method, Schedule, Solution, Time, Weight};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{n} candidate jobs exceed the oracle limit of {max_n}")]
    TooLarge { n: usize, max_n: usize },
    #[error("cell is undefined: {0}")]
    Undefined(String),
    #[error(transparent)]
    Edf(#[from] EdfError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_n: usize,
}

impl OracleLimits {
    /// Whole-instance enumeration.
    pub const GLOBAL: OracleLimits = OracleLimits { max_n: 20 };
    /// Per-cell sweeps, which run once per table entry.
    pub const CELL: OracleLimits = OracleLimits { max_n: 12 };

    fn check(&self, n: usize) -> Result<(), OracleError> {
        if n > self.max_n {
            Err(OracleError::TooLarge { n, max_n: self.max_n })
        } else {
            Ok(())
        }
    }
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits::GLOBAL
    }
}

/// How "a single block" and "no gap" are judged on an EDF schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockSense {
    /// The machine never idles.
    Busy,
    /// Never idles and no block boundary falls inside the interval, so an
    /// empty gap (a completion coinciding with the next release) also counts.
    Structural,
}

fn subsets(candidates: &[usize]) -> impl Iterator<Item = BTreeSet<usize>> + '_ {
    (0u64..1 << candidates.len()).map(move |mask| {
        candidates
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &j)| j)
            .collect()
    })
}

/// Maximum-weight feasible set by enumerating every subset of the real jobs.
/// Equal weights resolve to the lexicographically smallest index set.
pub fn oracle_solve(instance: &Instance, limits: OracleLimits) -> Result<Solution, OracleError> {
    let candidates: Vec<usize> = instance.real_jobs().iter().map(|j| j.idx).collect();
    limits.check(candidates.len())?;
    let mut best: (Weight, BTreeSet<usize>) = (0, BTreeSet::new());
    for set in subsets(&candidates) {
        let w = instance.total_weight(&set);
        if w < best.0 || (w == best.0 && set >= best.1) {
            continue;
        }
        if edf::is_feasible(instance, &set)? {
            best = (w, set);
        }
    }
    let (weight, completed) = best;
    let (schedule, _) = edf::edf_schedule(instance, &completed)?;
    Ok(Solution { completed, weight, schedule, method: Method::Oracle })
}

fn window_candidates(instance: &Instance, k: usize, x: Time, y: Time) -> Vec<usize> {
    (1..=k).filter(|&j| (x..y).contains(&instance.r(j))).collect()
}

/// Best weight of a subset of jobs `1..=k`, all released in `[r_i, r_j)` and
/// completable inside that window.
pub fn oracle_f(
    instance: &Instance,
    k: usize,
    i: usize,
    j: usize,
    limits: OracleLimits,
) -> Result<Weight, OracleError> {
    let (x, y) = (instance.r(i), instance.r(j));
    if x > y {
        return Err(OracleError::Undefined(format!("F[{k}][{i}][{j}] with r_i > r_j")));
    }
    let candidates = window_candidates(instance, k, x, y);
    limits.check(candidates.len())?;
    let mut best = 0;
    for set in subsets(&candidates) {
        let w = instance.total_weight(&set);
        if w > best && edf::is_feasible_window(instance, &set, x, y)? {
            best = w;
        }
    }
    Ok(best)
}

/// Single block of exactly `a` jobs covering `[r_i, r_i + a*p)`, judged by
/// [`BlockSense::Busy`]. `None` when no such block exists (and `a > 0`).
pub fn oracle_g(
    instance: &Instance,
    k: usize,
    i: usize,
    a: usize,
    limits: OracleLimits,
) -> Result<Option<Weight>, OracleError> {
    oracle_g_with(instance, k, i, a, limits, BlockSense::Busy)
}

pub fn oracle_g_with(
    instance: &Instance,
    k: usize,
    i: usize,
    a: usize,
    limits: OracleLimits,
    sense: BlockSense,
) -> Result<Option<Weight>, OracleError> {
    if a == 0 {
        return Ok(Some(0));
    }
    let x = instance.r(i);
    let y = x + a as Time * instance.p();
    let candidates = window_candidates(instance, k, x, y);
    limits.check(candidates.len())?;
    let mut best = None;
    for set in subsets(&candidates).filter(|s| s.len() == a) {
        let w = instance.total_weight(&set);
        if best.is_some_and(|b| w <= b) || !edf::is_feasible_window(instance, &set, x, y)? {
            continue;
        }
        // a jobs completed inside a window of length a*p keep it fully busy.
        let single = match sense {
            BlockSense::Busy => true,
            BlockSense::Structural => {
                let (schedule, _) = edf::edf_schedule_until(instance, &set, y)?;
                let blocks = edf::blocks(instance, &schedule)?;
                blocks.len() == 1 && blocks[0].start == x && blocks[0].end == y
            }
        };
        if single {
            best = Some(w);
        }
    }
    Ok(best)
}

/// Best `(k, r_i, r_j)`-feasible set whose EDF schedule has no idle time in
/// `[r_i, r_{k+1})`, judged by [`BlockSense::Busy`]. `None` when no set qualifies.
pub fn oracle_h(
    instance: &Instance,
    k: usize,
    i: usize,
    j: usize,
    limits: OracleLimits,
) -> Result<Option<Weight>, OracleError> {
    oracle_h_with(instance, k, i, j, limits, BlockSense::Busy)
}

pub fn oracle_h_with(
    instance: &Instance,
    k: usize,
    i: usize,
    j: usize,
    limits: OracleLimits,
    sense: BlockSense,
) -> Result<Option<Weight>, OracleError> {
    let (x, y) = (instance.r(i), instance.r(j));
    if x == y {
        return Ok(Some(0));
    }
    if k >= instance.n() || !(x <= instance.r(k + 1) && instance.r(k + 1) <= y) {
        return Err(OracleError::Undefined(format!("H[{k}][{i}][{j}]")));
    }
    let until = instance.r(k + 1);
    let candidates = window_candidates(instance, k, x, y);
    limits.check(candidates.len())?;
    let mut best = None;
    for set in subsets(&candidates) {
        let w = instance.total_weight(&set);
        if best.is_some_and(|b| w <= b) || !edf::is_feasible_window(instance, &set, x, y)? {
            continue;
        }
        let (schedule, _) = edf::edf_schedule_until(instance, &set, y)?;
        let ok = match sense {
            BlockSense::Busy => busy_on(&schedule, x, until),
            BlockSense::Structural => {
                until == x || {
                    let blocks = edf::blocks(instance, &schedule)?;
                    blocks.first().is_some_and(|b| b.start == x && b.end >= until)
                }
            }
        };
        if ok {
            best = Some(w);
        }
    }
    Ok(best)
}

fn busy_on(schedule: &Schedule, x: Time, until: Time) -> bool {
    let mut covered = x;
    for s in schedule.segments() {
        if covered >= until {
            break;
        }
        if s.end <= covered {
            continue;
        }
        if s.start > covered {
            return false;
        }
        covered = s.end;
    }
    covered >= until
}
