//! Runtime scaling harness: times table construction plus reconstruction on
//! generated instances and fits the slope of `log(time)` against `log(n)`.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dp::{self, DpError};
use crate::gen::{self, Family, GenError, GenParams};

pub const DEFAULT_SIZES: [usize; 4] = [50, 100, 150, 200];
pub const DEFAULT_REPEATS: usize = 3;

/// Sizes whose median is below this are left out of the fit (timer noise).
const MIN_FIT_SECONDS: f64 = 0.010;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("sizes must be non-empty and strictly increasing")]
    BadSizes,
    #[error("repeats must be at least 1")]
    BadRepeats,
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Dp(#[from] DpError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub sizes: Vec<usize>,
    /// Median wall-clock seconds per size.
    pub times: Vec<f64>,
    /// Least-squares slope of `ln(time)` over `ln(n)`.
    pub fitted_exponent: f64,
    pub repeats: usize,
    pub seed: u64,
}

/// Generator settings for a bench instance of `n` jobs: uniform family,
/// `p = 3`, `horizon = n*p`, `max_window = n*p/2 + p`, `max_weight = 1000`,
/// seed `seed + n`.
pub fn bench_params(n: usize, seed: u64) -> GenParams {
    let p = 3;
    GenParams {
        n,
        p,
        horizon: n as i64 * p,
        max_window: n as i64 * p / 2 + p,
        max_weight: 1000,
        seed: seed.wrapping_add(n as u64),
        family: Family::Uniform,
    }
}

pub fn run(sizes: &[usize], repeats: usize, seed: u64) -> Result<BenchReport, BenchError> {
    run_with_budget(sizes, repeats, seed, dp::DEFAULT_MEMORY_BUDGET)
}

pub fn run_with_budget(
    sizes: &[usize],
    repeats: usize,
    seed: u64,
    budget: usize,
) -> Result<BenchReport, BenchError> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BenchError::BadSizes);
    }
    if repeats == 0 {
        return Err(BenchError::BadRepeats);
    }
    // Refuse up front rather than after the smaller sizes have run.
    for &n in sizes {
        let bytes = dp::table_bytes(n + 1);
        if bytes > budget {
            return Err(DpError::TooLarge { n: n + 1, bytes, budget }.into());
        }
    }

    let mut times = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let instance = gen::generate(&bench_params(n, seed))?.normalize().map_err(GenError::from)?;
        let mut samples = Vec::with_capacity(repeats);
        for _ in 0..repeats {
            let start = Instant::now();
            let tables = dp::compute_tables_with_budget(&instance, budget)?;
            let set = dp::reconstruct(&tables, &instance)?;
            samples.push(start.elapsed().as_secs_f64());
            drop((tables, set));
        }
        samples.sort_by(f64::total_cmp);
        times.push(samples[samples.len() / 2]);
    }

    let fitted_exponent = fit_exponent(sizes, &times);
    Ok(BenchReport { sizes: sizes.to_vec(), times, fitted_exponent, repeats, seed })
}

/// Slope of the least-squares line through `(ln n, ln t)`. The smallest size
/// is skipped when it ran under 10 ms and at least two points remain.
pub fn fit_exponent(sizes: &[usize], times: &[f64]) -> f64 {
    let mut points: Vec<(f64, f64)> =
        sizes.iter().zip(times).map(|(&n, &t)| ((n as f64).ln(), t.max(f64::MIN_POSITIVE).ln())).collect();
    if points.len() > 2 && times[0] < MIN_FIT_SECONDS {
        points.remove(0);
    }
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        f64::NAN
    } else {
        sxy / sxx
    }
}
