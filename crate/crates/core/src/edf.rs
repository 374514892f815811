//! Event-driven earliest-deadline-first scheduling.
//!
//! The running job can only change at a release, a completion or a deadline,
//! so the simulation jumps between those events instead of stepping through
//! time units. Priority is `(d, idx)`: among released jobs the one with the
//! smaller deadline runs, lower index on ties.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::model::{Instance, Schedule, Segment, Time};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EdfError {
    #[error("job index {0} is not part of the instance")]
    UnknownJob(usize),
    #[error("segment of job {job} on [{start},{end}) is empty")]
    EmptySegment { job: usize, start: Time, end: Time },
    #[error("segments of jobs {first} and {second} overlap at time {at}")]
    Overlap { first: usize, second: usize, at: Time },
}

/// Maximal busy interval of a schedule, split at empty gaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub start: Time,
    pub end: Time,
    pub jobs: BTreeSet<usize>,
}

/// Earliest-deadline schedule of `subset`. Jobs that reach their deadline
/// unfinished are abandoned there and their partial runs are removed, so the
/// returned schedule only holds completed jobs.
pub fn edf_schedule(
    instance: &Instance,
    subset: &BTreeSet<usize>,
) -> Result<(Schedule, BTreeSet<usize>), EdfError> {
    simulate(instance, subset, None)
}

/// True iff EDF completes every job of `subset`.
pub fn is_feasible(instance: &Instance, subset: &BTreeSet<usize>) -> Result<bool, EdfError> {
    let (_, completed) = edf_schedule(instance, subset)?;
    Ok(completed.len() == subset.len())
}

/// True iff every job of `subset` is released in `[x, y)` and EDF completes
/// all of them by `min(d, y)`.
pub fn is_feasible_window(
    instance: &Instance,
    subset: &BTreeSet<usize>,
    x: Time,
    y: Time,
) -> Result<bool, EdfError> {
    debug_assert!(x <= y);
    check_known(instance, subset)?;
    if subset.iter().any(|&j| !(x..y).contains(&instance.r(j))) {
        return Ok(false);
    }
    let (_, completed) = simulate(instance, subset, Some(y))?;
    Ok(completed.len() == subset.len())
}

/// EDF schedule with every deadline clipped to `horizon`.
pub fn edf_schedule_until(
    instance: &Instance,
    subset: &BTreeSet<usize>,
    horizon: Time,
) -> Result<(Schedule, BTreeSet<usize>), EdfError> {
    simulate(instance, subset, Some(horizon))
}

fn check_known(instance: &Instance, subset: &BTreeSet<usize>) -> Result<(), EdfError> {
    match subset.iter().find(|&&j| !instance.contains(j)) {
        Some(&j) => Err(EdfError::UnknownJob(j)),
        None => Ok(()),
    }
}

fn simulate(
    instance: &Instance,
    subset: &BTreeSet<usize>,
    horizon: Option<Time>,
) -> Result<(Schedule, BTreeSet<usize>), EdfError> {
    check_known(instance, subset)?;
    let p = instance.p();
    let deadline = |j: usize| match horizon {
        Some(h) => instance.d(j).min(h),
        None => instance.d(j),
    };

    let mut arrivals: Vec<usize> = subset.iter().copied().collect();
    arrivals.sort_by_key(|&j| (instance.r(j), j));
    let mut remaining = vec![p; instance.n() + 1];
    let mut pending: BinaryHeap<Reverse<(Time, usize)>> = BinaryHeap::new();
    let mut segments: Vec<Segment> = Vec::with_capacity(2 * arrivals.len());
    let mut completed = BTreeSet::new();

    let mut next = 0;
    let mut t = match arrivals.first() {
        Some(&j) => instance.r(j),
        None => return Ok((Schedule::default(), completed)),
    };
    loop {
        while next < arrivals.len() && instance.r(arrivals[next]) <= t {
            let j = arrivals[next];
            pending.push(Reverse((instance.d(j), j)));
            next += 1;
        }
        // Drop anything whose deadline has passed; the most urgent job expires first.
        while let Some(&Reverse((_, j))) = pending.peek() {
            if deadline(j) <= t {
                pending.pop();
            } else {
                break;
            }
        }
        let next_release = arrivals.get(next).map(|&j| instance.r(j));
        let Some(&Reverse((_, j))) = pending.peek() else {
            match next_release {
                Some(r) => {
                    t = r;
                    continue;
                }
                None => break,
            }
        };

        let mut end = (t + remaining[j]).min(deadline(j));
        if let Some(r) = next_release {
            end = end.min(r);
        }
        match segments.last_mut() {
            Some(last) if last.job == j && last.end == t => last.end = end,
            _ => segments.push(Segment::new(j, t, end)),
        }
        remaining[j] -= end - t;
        t = end;
        if remaining[j] == 0 {
            pending.pop();
            completed.insert(j);
        }
    }

    segments.retain(|s| completed.contains(&s.job));
    Ok((Schedule::new(segments), completed))
}

/// Splits a schedule into blocks. A busy stretch is cut at time `t` when every
/// job released before `t` has already finished by `t`; that is the empty gap
/// between a block ending at a completion and the next one starting at a release.
pub fn blocks(instance: &Instance, schedule: &Schedule) -> Result<Vec<Block>, EdfError> {
    let segments = schedule.segments();
    for s in segments {
        if !instance.contains(s.job) {
            return Err(EdfError::UnknownJob(s.job));
        }
        if s.is_empty() {
            return Err(EdfError::EmptySegment { job: s.job, start: s.start, end: s.end });
        }
    }
    for w in segments.windows(2) {
        if w[1].start < w[0].end {
            return Err(EdfError::Overlap { first: w[0].job, second: w[1].job, at: w[1].start });
        }
    }

    // Latest completion among jobs released before t, via a prefix maximum
    // over jobs sorted by release.
    let completions = schedule.completion_times();
    let mut by_release: Vec<(Time, Time)> =
        completions.iter().map(|(&j, &c)| (instance.r(j), c)).collect();
    by_release.sort_unstable();
    let mut prefix_max = Vec::with_capacity(by_release.len());
    let mut acc = Time::MIN;
    for &(_, c) in &by_release {
        acc = acc.max(c);
        prefix_max.push(acc);
    }
    let settled_by = |t: Time| {
        let released_before = by_release.partition_point(|&(r, _)| r < t);
        released_before == 0 || prefix_max[released_before - 1] <= t
    };

    let mut out: Vec<Block> = Vec::new();
    for s in segments {
        match out.last_mut() {
            Some(b) if b.end == s.start && !settled_by(s.start) => {
                b.end = s.end;
                b.jobs.insert(s.job);
            }
            _ => out.push(Block { start: s.start, end: s.end, jobs: BTreeSet::from([s.job]) }),
        }
    }
    Ok(out)
}
