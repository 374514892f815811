//! Seeded instance generator.
//!
//! The random stream is SplitMix64 seeded with the 64-bit seed. Integers in
//! `[lo, hi]` are drawn by rejection: take `x = next_u64()`, retry while
//! `x < 2^64 mod m` with `m = hi - lo + 1`, then return `lo + x mod m`. Draw
//! order per job is fixed by each family (see [`Family`]), so a seed
//! reproduces the same file in any implementation of these rules.

use std::fmt;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use thiserror::Error;

use crate::format::InstanceFile;
use crate::model::{RawJob, Time, Weight};

/// Largest value accepted for `horizon`, `max_window`, `max_weight` and `n * p`.
pub const MAX_PARAM: i64 = 1 << 40;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// Instance shape. Per job `i = 0..n`, draws happen in the listed order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `r ~ U[0, horizon]`, `d = r + p + U[0, max_window - p]`, `w ~ U[0, max_weight]`.
    Uniform,
    /// `r ~ U[0, horizon]`, `d = r + p`, `w ~ U[0, max_weight]`.
    Tight,
    /// Job 0: `r ~ U[0, horizon]`, `d = r + max_window`. Job `i > 0`: parent
    /// `q ~ U[0, i-1]`, `len ~ U[p, d_q - r_q]`, `r = r_q + U[0, d_q - r_q - len]`,
    /// `d = r + len`. Then `w ~ U[0, max_weight]`. Every window lies inside
    /// its parent's.
    Nested,
    /// `r = i * floor(p / 2)`, `d = r + max_window`, `w ~ U[0, max_weight]`.
    Staircase,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Uniform, Family::Tight, Family::Nested, Family::Staircase];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Uniform => "uniform",
            Family::Tight => "tight",
            Family::Nested => "nested",
            Family::Staircase => "staircase",
        })
    }
}

impl FromStr for Family {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Family::Uniform),
            "tight" => Ok(Family::Tight),
            "nested" => Ok(Family::Nested),
            "staircase" => Ok(Family::Staircase),
            other => Err(GenError::Invalid(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    pub p: Time,
    pub horizon: Time,
    pub max_window: Time,
    pub max_weight: Weight,
    pub seed: u64,
    pub family: Family,
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |msg: String| Err(GenError::Invalid(msg));
        if self.p < 1 {
            return bad(format!("p must be at least 1, got {}", self.p));
        }
        if self.max_window < self.p {
            return bad(format!("max_window {} is shorter than p {}", self.max_window, self.p));
        }
        if self.horizon < 0 || self.max_weight < 0 {
            return bad("horizon and max_weight must be non-negative".into());
        }
        let n_p = (self.n as i128) * (self.p as i128);
        if [self.horizon, self.max_window, self.max_weight].iter().any(|&v| v > MAX_PARAM)
            || n_p > MAX_PARAM as i128
        {
            return bad("parameters must stay below 2^40".into());
        }
        Ok(())
    }
}

struct Stream(SplitMix64);

impl Stream {
    fn new(seed: u64) -> Self {
        Stream(SplitMix64::seed_from_u64(seed))
    }

    /// Uniform integer in `[lo, hi]`.
    fn range(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let m = (hi - lo) as u64 + 1;
        let reject = m.wrapping_neg() % m;
        loop {
            let x = self.0.next_u64();
            if x >= reject {
                return lo + (x % m) as i64;
            }
        }
    }
}

pub fn generate(params: &GenParams) -> Result<InstanceFile, GenError> {
    params.validate()?;
    let GenParams { n, p, horizon, max_window, max_weight, seed, family } = *params;
    let mut rng = Stream::new(seed);
    let mut jobs: Vec<RawJob> = Vec::with_capacity(n);
    for i in 0..n {
        let (r, d) = match family {
            Family::Uniform => {
                let r = rng.range(0, horizon);
                (r, r + p + rng.range(0, max_window - p))
            }
            Family::Tight => {
                let r = rng.range(0, horizon);
                (r, r + p)
            }
            Family::Nested if i == 0 => {
                let r = rng.range(0, horizon);
                (r, r + max_window)
            }
            Family::Nested => {
                let parent = &jobs[rng.range(0, i as i64 - 1) as usize];
                let span = parent.d - parent.r;
                let len = rng.range(p, span);
                let r = parent.r + rng.range(0, span - len);
                (r, r + len)
            }
            Family::Staircase => {
                let r = i as Time * (p / 2);
                (r, r + max_window)
            }
        };
        let w = rng.range(0, max_weight);
        jobs.push(RawJob::new(format!("j{}", i + 1), r, d, w));
    }
    Ok(InstanceFile { p, jobs })
}
