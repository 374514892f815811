//! The O(n^4) dynamic program for maximum weighted throughput.
//!
//! Three value tables are indexed by a job bound `k` (only jobs `1..=k` may be
//! used) and a time window given by release times:
//!
//! * `F[k][i][j]`: best weight of a set of jobs released in `[r_i, r_j)` that
//!   can all be completed inside that window;
//! * `G[k][i][a]`: best weight of a single block of `a` jobs covering
//!   `[r_i, r_i + a*p)`;
//! * `H[k][i][j]`: like `F`, but the schedule may not idle before `r_{k+1}`.
//!
//! Every cell records which alternative attained its maximum so an optimal set
//! can be rebuilt top-down without re-evaluating any recurrence.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::edf::{self, EdfError};
use crate::model::{Instance, Method, Solution, Time, Weight};

/// Default table memory budget.
pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 30;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DpError {
    #[error("{n} jobs need about {bytes} bytes of tables, above the {budget} byte budget")]
    TooLarge { n: usize, bytes: usize, budget: usize },
    #[error("table invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Edf(#[from] EdfError),
}

/// Attaining alternative of an `F` cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FChoice {
    /// `r_i > r_j`; the cell has no meaning.
    Undefined,
    /// Empty window.
    Base,
    /// Nothing starts at `r_i`; continue from the next later release.
    Skip,
    /// A block of `a` jobs at `r_i`, then the rest of the window.
    Block { a: u16 },
}

/// Attaining alternative of a `G` cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GChoice {
    /// `k = 0` or `a = 0`.
    Base,
    /// Job `k` cannot be in the block; value copied from level `k-1`.
    Copy,
    /// Job `k` left out.
    Keep,
    /// Job `k` runs uninterrupted at the end of the block.
    Append,
    /// Job `k` is last interrupted by job `l`.
    Split { l: u16 },
}

/// Attaining alternative of an `H` cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HChoice {
    /// `k = n` or `r_{k+1}` outside `[r_i, r_j]`.
    Undefined,
    /// Empty window.
    Base,
    /// No block length reaches `r_{k+1}` without passing `r_j`.
    Unattained,
    /// (H): a block of `a` jobs at `r_i`, then the rest of the window.
    Block { a: u16 },
}

/// A table entry, for reconstruction and diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    F { k: usize, i: usize, j: usize },
    G { k: usize, i: usize, a: usize },
    H { k: usize, i: usize, j: usize },
}

/// `min(n, ceil((y - x) / p) - 1)`: the most jobs that fit in `[x, y)` while
/// leaving it not completely filled. Equals `-1` when `x == y`.
pub fn delta(instance: &Instance, x: Time, y: Time) -> i64 {
    delta_raw(x, y, instance.p(), instance.n())
}

#[inline]
fn delta_raw(x: Time, y: Time, p: Time, n: usize) -> i64 {
    debug_assert!(x <= y);
    let span = y - x;
    let ceil = (span + p - 1) / p;
    (ceil - 1).min(n as i64)
}

/// Release-ordered view of an instance answering "first job released at or
/// after x" queries. Ties go to the lower index.
#[derive(Clone, Debug)]
struct Releases {
    order: Vec<usize>,
    times: Vec<Time>,
}

impl Releases {
    fn new(instance: &Instance) -> Self {
        let mut order: Vec<usize> = (1..=instance.n()).collect();
        order.sort_by_key(|&j| (instance.r(j), j));
        let times = order.iter().map(|&j| instance.r(j)).collect();
        Releases { order, times }
    }

    fn at_or_after(&self, x: Time) -> Option<usize> {
        self.order.get(self.times.partition_point(|&r| r < x)).copied()
    }

    fn after(&self, x: Time) -> Option<usize> {
        self.order.get(self.times.partition_point(|&r| r <= x)).copied()
    }

    fn earliest(&self) -> usize {
        self.order[0]
    }
}

/// First job released at or after `x` (lowest index among equal releases);
/// `None` when `x` is past the dummy's release.
pub fn lambda(instance: &Instance, x: Time) -> Option<usize> {
    Releases::new(instance).at_or_after(x)
}

/// First job released strictly after `x`; `None` when `x >= r_n`.
pub fn lambda_plus(instance: &Instance, x: Time) -> Option<usize> {
    Releases::new(instance).after(x)
}

/// Size in bytes of the tables for `n` jobs (dummy included).
pub fn table_bytes(n: usize) -> usize {
    let cell = std::mem::size_of::<Weight>() + 4;
    let fh = (n + 1) * n * n;
    let g = (n + 1) * n * (n + 1);
    (2 * fh + g) * cell
}

pub struct Tables {
    n: usize,
    p: Time,
    r: Vec<Time>,
    f: Vec<Weight>,
    f_choice: Vec<FChoice>,
    g: Vec<Weight>,
    g_choice: Vec<GChoice>,
    h: Vec<Weight>,
    h_choice: Vec<HChoice>,
}

impl Tables {
    #[inline]
    fn fi(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.n + (i - 1)) * self.n + (j - 1)
    }

    #[inline]
    fn gi(&self, k: usize, i: usize, a: usize) -> usize {
        (k * self.n + (i - 1)) * (self.n + 1) + a
    }

    /// Number of jobs including the dummy.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self, k: usize, i: usize, j: usize) -> Weight {
        self.f[self.fi(k, i, j)]
    }

    pub fn f_choice(&self, k: usize, i: usize, j: usize) -> FChoice {
        self.f_choice[self.fi(k, i, j)]
    }

    pub fn g(&self, k: usize, i: usize, a: usize) -> Weight {
        self.g[self.gi(k, i, a)]
    }

    pub fn g_choice(&self, k: usize, i: usize, a: usize) -> GChoice {
        self.g_choice[self.gi(k, i, a)]
    }

    /// `None` for undefined or unattained cells.
    pub fn h(&self, k: usize, i: usize, j: usize) -> Option<Weight> {
        let idx = self.fi(k, i, j);
        match self.h_choice[idx] {
            HChoice::Undefined | HChoice::Unattained => None,
            _ => Some(self.h[idx]),
        }
    }

    pub fn h_choice(&self, k: usize, i: usize, j: usize) -> HChoice {
        self.h_choice[self.fi(k, i, j)]
    }

    pub fn h_defined(&self, k: usize, i: usize, j: usize) -> bool {
        self.h_choice(k, i, j) != HChoice::Undefined
    }

    pub fn value(&self, cell: Cell) -> Option<Weight> {
        match cell {
            Cell::F { k, i, j } => match self.f_choice(k, i, j) {
                FChoice::Undefined => None,
                _ => Some(self.f(k, i, j)),
            },
            Cell::G { k, i, a } => Some(self.g(k, i, a)),
            Cell::H { k, i, j } => self.h(k, i, j),
        }
    }

    /// Table contents as a serializable dump, skipping `F`/`H` cells with `r_i > r_j`.
    pub fn dump(&self) -> TablesDump {
        let n = self.n;
        let mut dump = TablesDump { n, p: self.p, f: Vec::new(), g: Vec::new(), h: Vec::new() };
        for k in 0..=n {
            for i in 1..=n {
                for a in 0..=n {
                    dump.g.push(CellDump {
                        k,
                        i,
                        x: a,
                        value: Some(self.g(k, i, a)),
                        choice: self.g_choice(k, i, a),
                    });
                }
                for j in (1..=n).filter(|&j| self.r[j] >= self.r[i]) {
                    dump.f.push(CellDump {
                        k,
                        i,
                        x: j,
                        value: Some(self.f(k, i, j)),
                        choice: self.f_choice(k, i, j),
                    });
                    dump.h.push(CellDump {
                        k,
                        i,
                        x: j,
                        value: self.h(k, i, j),
                        choice: self.h_choice(k, i, j),
                    });
                }
            }
        }
        dump
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CellDump<C> {
    pub k: usize,
    pub i: usize,
    /// `j` for `F`/`H`, `a` for `G`.
    pub x: usize,
    pub value: Option<Weight>,
    pub choice: C,
}

#[derive(Clone, Debug, Serialize)]
pub struct TablesDump {
    pub n: usize,
    pub p: Time,
    pub f: Vec<CellDump<FChoice>>,
    pub g: Vec<CellDump<GChoice>>,
    pub h: Vec<CellDump<HChoice>>,
}

pub fn compute_tables(instance: &Instance) -> Result<Tables, DpError> {
    compute_tables_with_budget(instance, DEFAULT_MEMORY_BUDGET)
}

/// Fills `F`, `G` and `H` bottom-up. For each `k`, all of `G[k]` is computed
/// first (it reads level `k-1` only), then `F[k]` and `H[k]` by decreasing
/// release of `i`, so every reference lands on a finished cell.
pub fn compute_tables_with_budget(instance: &Instance, budget: usize) -> Result<Tables, DpError> {
    let n = instance.n();
    let bytes = table_bytes(n);
    if bytes > budget || n > u16::MAX as usize {
        return Err(DpError::TooLarge { n, bytes, budget });
    }
    let p = instance.p();
    let releases = Releases::new(instance);
    let mut r = vec![0; n + 1];
    let mut d = vec![0; n + 1];
    let mut w = vec![0; n + 1];
    for job in instance.jobs() {
        (r[job.idx], d[job.idx], w[job.idx]) = (job.r, job.d, job.w);
    }
    let r_n = r[n];

    // lam_block[i][a] = lambda(r_i + a*p) when r_i + a*p <= r_n.
    let lam_block: Vec<Vec<usize>> = (0..=n)
        .map(|i| {
            if i == 0 {
                return Vec::new();
            }
            (0..=n)
                .map_while(|a| {
                    let t = r[i] + a as Time * p;
                    (t <= r_n).then(|| releases.at_or_after(t).expect("t <= r_n"))
                })
                .collect()
        })
        .collect();
    let lam_next: Vec<Option<usize>> =
        (0..=n).map(|i| if i == 0 { None } else { releases.after(r[i]) }).collect();
    // Descending release, ascending index among equal releases.
    let mut sweep: Vec<usize> = (1..=n).collect();
    sweep.sort_by_key(|&i| (std::cmp::Reverse(r[i]), i));

    let fh_len = (n + 1) * n * n;
    let g_len = (n + 1) * n * (n + 1);
    let mut t = Tables {
        n,
        p,
        r: r.clone(),
        f: vec![0; fh_len],
        f_choice: vec![FChoice::Undefined; fh_len],
        g: vec![0; g_len],
        g_choice: vec![GChoice::Base; g_len],
        h: vec![0; fh_len],
        h_choice: vec![HChoice::Undefined; fh_len],
    };

    for k in 0..=n {
        if k > 0 {
            for i in 1..=n {
                for a in 1..=n {
                    let (value, choice) = g_cell(&t, &releases, &r, &d, &w, k, i, a);
                    let idx = t.gi(k, i, a);
                    t.g[idx] = value;
                    t.g_choice[idx] = choice;
                }
            }
        }

        for &i in &sweep {
            for j in 1..=n {
                if r[j] < r[i] {
                    continue;
                }
                let idx = t.fi(k, i, j);
                let lam = &lam_block[i];

                // F
                let (fv, fc) = if r[j] == r[i] {
                    (0, FChoice::Base)
                } else {
                    let next = lam_next[i].expect("r_i < r_j <= r_n");
                    let mut best = (t.f(k, next, j), FChoice::Skip);
                    for (a, &after) in lam.iter().enumerate().skip(1) {
                        if r[i] + a as Time * p > r[j] {
                            break;
                        }
                        let v = t.g(k, i, a) + t.f(k, after, j);
                        if v > best.0 {
                            best = (v, FChoice::Block { a: a as u16 });
                        }
                    }
                    best
                };
                t.f[idx] = fv;
                t.f_choice[idx] = fc;

                // H
                let (hv, hc) = if r[j] == r[i] {
                    (0, HChoice::Base)
                } else if k == n || !(r[i] <= r[k + 1] && r[k + 1] <= r[j]) {
                    (0, HChoice::Undefined)
                } else {
                    let first = ((r[k + 1] - r[i] + p - 1) / p) as usize;
                    let mut best = (0, HChoice::Unattained);
                    for (a, &after) in lam.iter().enumerate().skip(first) {
                        if r[i] + a as Time * p > r[j] {
                            break;
                        }
                        let v = t.g(k, i, a) + t.f(k, after, j);
                        if best.1 == HChoice::Unattained || v > best.0 {
                            best = (v, HChoice::Block { a: a as u16 });
                        }
                    }
                    best
                };
                t.h[idx] = hv;
                t.h_choice[idx] = hc;
            }
        }
    }
    Ok(t)
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn g_cell(
    t: &Tables,
    releases: &Releases,
    r: &[Time],
    d: &[Time],
    w: &[Weight],
    k: usize,
    i: usize,
    a: usize,
) -> (Weight, GChoice) {
    let p = t.p;
    let end = r[i] + a as Time * p;
    let last_start = end - p;
    if r[k] < r[i] || r[k] > last_start || d[k] < end {
        return (t.g(k - 1, i, a), GChoice::Copy);
    }
    let mut best = (t.g(k - 1, i, a), GChoice::Keep);
    let appended = t.g(k - 1, i, a - 1) + w[k];
    if appended > best.0 {
        best = (appended, GChoice::Append);
    }
    let from = releases.times.partition_point(|&x| x <= r[k]);
    for pos in from..releases.order.len() {
        let rl = releases.times[pos];
        if rl >= end {
            break;
        }
        let l = releases.order[pos];
        let Some(before) = t.h(k - 1, i, l) else {
            continue;
        };
        let b = delta_raw(rl, end, p, t.n) as usize;
        let v = before + t.g(k - 1, l, b) + w[k];
        if v > best.0 {
            best = (v, GChoice::Split { l: l as u16 });
        }
    }
    best
}

/// Rebuilds the job set behind `cell` by following the recorded choices.
pub fn reconstruct_cell(
    tables: &Tables,
    instance: &Instance,
    cell: Cell,
) -> Result<BTreeSet<usize>, DpError> {
    let releases = Releases::new(instance);
    let p = instance.p();
    let n = tables.n;
    let lam = |t: Time| {
        releases.at_or_after(t).ok_or_else(|| DpError::Invariant(format!("no release at or after {t}")))
    };
    let mut jobs = BTreeSet::new();
    let mut stack = vec![cell];
    while let Some(cell) = stack.pop() {
        if tables.value(cell) == Some(0) {
            continue;
        }
        match cell {
            Cell::F { k, i, j } => match tables.f_choice(k, i, j) {
                FChoice::Undefined => {
                    return Err(DpError::Invariant(format!("expanding undefined {cell:?}")))
                }
                FChoice::Base => {}
                FChoice::Skip => {
                    let next = releases
                        .after(instance.r(i))
                        .ok_or_else(|| DpError::Invariant(format!("{cell:?} skips past r_n")))?;
                    stack.push(Cell::F { k, i: next, j });
                }
                FChoice::Block { a } => {
                    let a = a as usize;
                    stack.push(Cell::G { k, i, a });
                    stack.push(Cell::F { k, i: lam(instance.r(i) + a as Time * p)?, j });
                }
            },
            Cell::G { k, i, a } => match tables.g_choice(k, i, a) {
                GChoice::Base => {}
                GChoice::Copy | GChoice::Keep => stack.push(Cell::G { k: k - 1, i, a }),
                GChoice::Append => {
                    stack.push(Cell::G { k: k - 1, i, a: a - 1 });
                    jobs.insert(k);
                }
                GChoice::Split { l } => {
                    let l = l as usize;
                    let end = instance.r(i) + a as Time * p;
                    let b = delta_raw(instance.r(l), end, p, n) as usize;
                    stack.push(Cell::H { k: k - 1, i, j: l });
                    stack.push(Cell::G { k: k - 1, i: l, a: b });
                    jobs.insert(k);
                }
            },
            Cell::H { k, i, j } => match tables.h_choice(k, i, j) {
                HChoice::Undefined | HChoice::Unattained => {
                    return Err(DpError::Invariant(format!("expanding {cell:?} without a value")))
                }
                HChoice::Base => {}
                HChoice::Block { a } => {
                    let a = a as usize;
                    stack.push(Cell::G { k, i, a });
                    stack.push(Cell::F { k, i: lam(instance.r(i) + a as Time * p)?, j });
                }
            },
        }
    }
    Ok(jobs)
}

/// The root cell `F[n][e][n]`, `e` being the earliest-released job.
pub fn root(instance: &Instance) -> Cell {
    let n = instance.n();
    Cell::F { k: n, i: Releases::new(instance).earliest(), j: n }
}

/// An optimal job set for the whole instance.
pub fn reconstruct(tables: &Tables, instance: &Instance) -> Result<BTreeSet<usize>, DpError> {
    reconstruct_cell(tables, instance, root(instance))
}

/// Maximum-weight feasible set with its earliest-deadline schedule.
pub fn solve(instance: &Instance) -> Result<Solution, DpError> {
    solve_with_budget(instance, DEFAULT_MEMORY_BUDGET)
}

pub fn solve_with_budget(instance: &Instance, budget: usize) -> Result<Solution, DpError> {
    let tables = compute_tables_with_budget(instance, budget)?;
    solve_from_tables(&tables, instance)
}

pub fn solve_from_tables(tables: &Tables, instance: &Instance) -> Result<Solution, DpError> {
    let completed = reconstruct(tables, instance)?;
    let weight = tables.value(root(instance)).unwrap_or(0);
    let realized = instance.total_weight(&completed);
    if realized != weight {
        return Err(DpError::Invariant(format!(
            "reconstructed set weighs {realized}, table says {weight}"
        )));
    }
    let (schedule, done) = edf::edf_schedule(instance, &completed)?;
    if done != completed {
        return Err(DpError::Invariant("reconstructed set is not feasible".into()));
    }
    Ok(Solution { completed, weight, schedule, method: Method::Dp })
}
