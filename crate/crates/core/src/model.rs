//! Instances, schedules and the schedule validator.
//!
//! Times and weights are plain 64-bit integers. A schedule is a list of
//! half-open execution segments `[start, end)`; time units are never
//! enumerated one by one.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Time = i64;
pub type Weight = i64;

/// Bound on absolute times and weights accepted by [`normalize`]. Keeps every
/// intermediate sum the solver forms (`r + a*p`, `n * max(w)`) well inside `i64`.
pub const MAX_MAGNITUDE: i64 = 1 << 52;

/// Label given to the appended dummy job.
pub const DUMMY_LABEL: &str = "__dummy__";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("job length p must be at least 1, got {0}")]
    InvalidLength(Time),
    #[error("job {label:?} has negative weight {weight}")]
    NegativeWeight { label: String, weight: Weight },
    #[error("job label {0:?} appears more than once")]
    DuplicateLabel(String),
    #[error("job {label:?}: value {value} exceeds the supported magnitude 2^52")]
    OutOfRange { label: String, value: i64 },
    #[error("instance is too large: n * max(w) or max(d) + n * p would overflow")]
    Overflow,
}

/// A job as supplied by a caller, before sorting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawJob {
    pub id: String,
    pub r: Time,
    pub d: Time,
    pub w: Weight,
}

impl RawJob {
    pub fn new(id: impl Into<String>, r: Time, d: Time, w: Weight) -> Self {
        RawJob { id: id.into(), r, d, w }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Job {
    /// Caller-supplied label.
    pub id: String,
    /// 1-based position in deadline order.
    pub idx: usize,
    pub r: Time,
    pub d: Time,
    pub w: Weight,
}

/// A normalized instance: jobs sorted by `(d, id)` with a zero-weight dummy
/// job appended as the last index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    p: Time,
    jobs: Vec<Job>,
    dropped: Vec<RawJob>,
}

impl Instance {
    pub fn p(&self) -> Time {
        self.p
    }

    /// Number of jobs including the dummy.
    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    /// Jobs in index order, dummy last.
    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    /// Jobs excluding the dummy.
    pub fn real_jobs(&self) -> &[Job] {
        &self.jobs[..self.jobs.len() - 1]
    }

    /// Jobs that can never complete (`d < r + p`) and were set aside.
    pub fn dropped(&self) -> &[RawJob] {
        &self.dropped
    }

    /// Job by 1-based index. Panics on an index outside `1..=n`.
    pub fn job(&self, idx: usize) -> &Job {
        &self.jobs[idx - 1]
    }

    pub fn contains(&self, idx: usize) -> bool {
        (1..=self.n()).contains(&idx)
    }

    pub fn dummy(&self) -> &Job {
        self.jobs.last().expect("instance always holds the dummy job")
    }

    pub fn r(&self, idx: usize) -> Time {
        self.jobs[idx - 1].r
    }

    pub fn d(&self, idx: usize) -> Time {
        self.jobs[idx - 1].d
    }

    pub fn w(&self, idx: usize) -> Weight {
        self.jobs[idx - 1].w
    }

    pub fn find(&self, id: &str) -> Option<usize> {
        self.real_jobs().iter().find(|j| j.id == id).map(|j| j.idx)
    }

    /// The raw jobs this instance was built from (retained and dropped, dummy
    /// excluded), in index order followed by the dropped ones.
    pub fn to_raw(&self) -> Vec<RawJob> {
        self.real_jobs()
            .iter()
            .map(|j| RawJob::new(j.id.clone(), j.r, j.d, j.w))
            .chain(self.dropped.iter().cloned())
            .collect()
    }

    pub fn total_weight(&self, set: &BTreeSet<usize>) -> Weight {
        set.iter().map(|&i| self.w(i)).sum()
    }
}

/// Sorts jobs by deadline (ties by label), drops jobs that cannot fit their
/// window, and appends the dummy job `(r = max d, d = r + p, w = 0)`.
pub fn normalize(raw: &[RawJob], p: Time) -> Result<Instance, ModelError> {
    if p < 1 {
        return Err(ModelError::InvalidLength(p));
    }
    if p > MAX_MAGNITUDE {
        return Err(ModelError::OutOfRange { label: "p".into(), value: p });
    }
    let mut seen = HashSet::new();
    for job in raw {
        if job.w < 0 {
            return Err(ModelError::NegativeWeight { label: job.id.clone(), weight: job.w });
        }
        for v in [job.r, job.d, job.w] {
            if v.unsigned_abs() > MAX_MAGNITUDE as u64 {
                return Err(ModelError::OutOfRange { label: job.id.clone(), value: v });
            }
        }
        if job.id == DUMMY_LABEL || !seen.insert(job.id.as_str()) {
            return Err(ModelError::DuplicateLabel(job.id.clone()));
        }
    }

    let (mut kept, dropped): (Vec<RawJob>, Vec<RawJob>) =
        raw.iter().cloned().partition(|j| j.d >= j.r + p);
    kept.sort_by(|a, b| a.d.cmp(&b.d).then_with(|| a.id.cmp(&b.id)));

    let n = kept.len() as i128 + 1;
    let max_w = kept.iter().map(|j| j.w as i128).max().unwrap_or(0);
    let max_d = kept.iter().map(|j| j.d as i128).max().unwrap_or(0);
    if n * max_w > i64::MAX as i128 || max_d + (n + 2) * p as i128 > i64::MAX as i128 {
        return Err(ModelError::Overflow);
    }

    let dummy_r = kept.iter().map(|j| j.d).max().unwrap_or(0);
    let mut jobs: Vec<Job> = kept
        .into_iter()
        .enumerate()
        .map(|(pos, j)| Job { id: j.id, idx: pos + 1, r: j.r, d: j.d, w: j.w })
        .collect();
    jobs.push(Job { id: DUMMY_LABEL.into(), idx: jobs.len() + 1, r: dummy_r, d: dummy_r + p, w: 0 });
    Ok(Instance { p, jobs, dropped })
}

/// Maximal run of one job on `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    pub job: usize,
    pub start: Time,
    pub end: Time,
}

impl Segment {
    pub fn new(job: usize, start: Time, end: Time) -> Self {
        Segment { job, start, end }
    }

    pub fn len(&self) -> Time {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    segments: Vec<Segment>,
}

impl Schedule {
    /// Builds a schedule, sorting segments by start time.
    pub fn new(mut segments: Vec<Segment>) -> Self {
        segments.sort_by_key(|s| (s.start, s.end, s.job));
        Schedule { segments }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Total scheduled length per job.
    pub fn units(&self) -> BTreeMap<usize, Time> {
        let mut units = BTreeMap::new();
        for s in &self.segments {
            *units.entry(s.job).or_insert(0) += s.len();
        }
        units
    }

    /// Latest segment end per job.
    pub fn completion_times(&self) -> BTreeMap<usize, Time> {
        let mut done = BTreeMap::new();
        for s in &self.segments {
            let e = done.entry(s.job).or_insert(s.end);
            *e = (*e).max(s.end);
        }
        done
    }

    /// Copy of the schedule without the given job's segments.
    pub fn without(&self, job: usize) -> Schedule {
        Schedule { segments: self.segments.iter().copied().filter(|s| s.job != job).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dp,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Dp => f.write_str("dp"),
            Method::Oracle => f.write_str("oracle"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub completed: BTreeSet<usize>,
    pub weight: Weight,
    pub schedule: Schedule,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownJob { job: String },
    EmptySegment { job: usize, start: Time, end: Time },
    Overlap { first: usize, second: usize, start: Time, end: Time },
    BeforeRelease { job: usize, start: Time, release: Time },
    AfterDeadline { job: usize, end: Time, deadline: Time },
    PartialUnits { job: usize, units: Time, p: Time },
    CompletedWithoutUnits { job: usize },
    ExecutedNotCompleted { job: usize },
    WeightMismatch { claimed: Weight, actual: Weight },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::UnknownJob { ref job } => write!(f, "unknown job {job:?}"),
            Violation::EmptySegment { job, start, end } => {
                write!(f, "job {job}: empty segment [{start},{end})")
            }
            Violation::Overlap { first, second, start, end } => {
                write!(f, "jobs {first} and {second} overlap on [{start},{end})")
            }
            Violation::BeforeRelease { job, start, release } => {
                write!(f, "job {job}: segment starts at {start}, before release {release}")
            }
            Violation::AfterDeadline { job, end, deadline } => {
                write!(f, "job {job}: segment ends at {end}, exceeds deadline {deadline}")
            }
            Violation::PartialUnits { job, units, p } => {
                write!(f, "job {job}: {units} units scheduled, expected 0 or {p}")
            }
            Violation::CompletedWithoutUnits { job } => {
                write!(f, "job {job} is listed as completed but never runs")
            }
            Violation::ExecutedNotCompleted { job } => {
                write!(f, "job {job} receives p units but is not listed as completed")
            }
            Violation::WeightMismatch { claimed, actual } => {
                write!(f, "claimed weight {claimed} but completed jobs weigh {actual}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a solution against the instance. Every violation found is reported.
pub fn validate(instance: &Instance, solution: &Solution) -> ValidationReport {
    let mut violations = Vec::new();
    let p = instance.p();
    let segments = solution.schedule.segments();

    for s in segments {
        if !instance.contains(s.job) {
            violations.push(Violation::UnknownJob { job: s.job.to_string() });
            continue;
        }
        if s.is_empty() {
            violations.push(Violation::EmptySegment { job: s.job, start: s.start, end: s.end });
            continue;
        }
        let job = instance.job(s.job);
        if s.start < job.r {
            violations.push(Violation::BeforeRelease { job: s.job, start: s.start, release: job.r });
        }
        if s.end > job.d {
            violations.push(Violation::AfterDeadline { job: s.job, end: s.end, deadline: job.d });
        }
    }

    // Sorted by start: a segment overlaps an earlier one iff it starts before
    // the furthest end seen so far.
    let mut reach: Option<Segment> = None;
    for s in segments.iter().filter(|s| !s.is_empty()) {
        if let Some(prev) = reach {
            if s.start < prev.end {
                violations.push(Violation::Overlap {
                    first: prev.job,
                    second: s.job,
                    start: s.start,
                    end: s.end.min(prev.end),
                });
            }
            if s.end > prev.end {
                reach = Some(*s);
            }
        } else {
            reach = Some(*s);
        }
    }

    let units = solution.schedule.units();
    for (&job, &u) in &units {
        if u != 0 && u != p {
            violations.push(Violation::PartialUnits { job, units: u, p });
        } else if u == p && !solution.completed.contains(&job) {
            violations.push(Violation::ExecutedNotCompleted { job });
        }
    }
    for &job in &solution.completed {
        if !instance.contains(job) {
            violations.push(Violation::UnknownJob { job: job.to_string() });
        } else if units.get(&job).copied().unwrap_or(0) == 0 {
            violations.push(Violation::CompletedWithoutUnits { job });
        }
    }

    let actual: Weight =
        solution.completed.iter().filter(|&&j| instance.contains(j)).map(|&j| instance.w(j)).sum();
    if actual != solution.weight {
        violations.push(Violation::WeightMismatch { claimed: solution.weight, actual });
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(jobs: &[(&str, Time, Time, Weight)]) -> Vec<RawJob> {
        jobs.iter().map(|&(id, r, d, w)| RawJob::new(id, r, d, w)).collect()
    }

    fn ids(inst: &Instance) -> Vec<&str> {
        inst.jobs().iter().map(|j| j.id.as_str()).collect()
    }

    #[test]
    fn equal_deadlines_keep_label_order() {
        let inst = normalize(&raw(&[("B", 0, 2, 3), ("A", 0, 2, 5)]), 2).unwrap();
        assert_eq!(ids(&inst), ["A", "B", DUMMY_LABEL]);
        let dummy = inst.dummy();
        assert_eq!((dummy.idx, dummy.r, dummy.d, dummy.w), (3, 2, 4, 0));
    }

    #[test]
    fn too_short_window_is_dropped() {
        let inst = normalize(&raw(&[("A", 0, 1, 9)]), 2).unwrap();
        assert_eq!(inst.n(), 1);
        assert_eq!(inst.dropped(), &raw(&[("A", 0, 1, 9)])[..]);
        assert_eq!((inst.dummy().r, inst.dummy().d), (0, 2));
    }

    #[test]
    fn sorted_by_deadline() {
        let inst = normalize(&raw(&[("A", 1, 3, 4), ("B", 0, 4, 7)]), 2).unwrap();
        assert_eq!(ids(&inst), ["A", "B", DUMMY_LABEL]);
        assert_eq!((inst.r(3), inst.d(3)), (4, 6));
    }

    #[test]
    fn empty_input_holds_only_dummy() {
        let inst = normalize(&[], 3).unwrap();
        assert_eq!(inst.n(), 1);
        assert_eq!((inst.dummy().r, inst.dummy().d, inst.dummy().w), (0, 3, 0));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(normalize(&[], 0), Err(ModelError::InvalidLength(0)));
        assert!(matches!(
            normalize(&raw(&[("A", 0, 5, -1)]), 1),
            Err(ModelError::NegativeWeight { .. })
        ));
        assert!(matches!(
            normalize(&raw(&[("A", 0, 5, 1), ("A", 1, 5, 1)]), 1),
            Err(ModelError::DuplicateLabel(_))
        ));
        assert!(matches!(
            normalize(&raw(&[("A", 0, 1 << 60, 1)]), 1),
            Err(ModelError::OutOfRange { .. })
        ));
    }

    #[test]
    fn normalize_is_idempotent() {
        let inst = normalize(&raw(&[("c", 3, 9, 1), ("a", 0, 4, 2), ("b", 0, 1, 5)]), 2).unwrap();
        let again = normalize(&inst.to_raw(), inst.p()).unwrap();
        assert_eq!(inst, again);
    }

    fn one_job() -> Instance {
        normalize(&raw(&[("A", 0, 2, 6), ("B", 0, 3, 1)]), 2).unwrap()
    }

    fn solution(segments: Vec<Segment>, completed: &[usize], weight: Weight) -> Solution {
        Solution {
            completed: completed.iter().copied().collect(),
            weight,
            schedule: Schedule::new(segments),
            method: Method::Dp,
        }
    }

    #[test]
    fn accepts_valid_solution() {
        let inst = one_job();
        let report = validate(&inst, &solution(vec![Segment::new(1, 0, 2)], &[1], 6));
        assert!(report.ok(), "{:?}", report);
    }

    #[test]
    fn reports_overlap() {
        let inst = one_job();
        let sol = solution(vec![Segment::new(1, 0, 2), Segment::new(2, 1, 3)], &[1, 2], 7);
        let report = validate(&inst, &sol);
        assert_eq!(
            report.violations,
            vec![Violation::Overlap { first: 1, second: 2, start: 1, end: 2 }]
        );
    }

    #[test]
    fn reports_deadline_excess() {
        let inst = one_job();
        let report = validate(&inst, &solution(vec![Segment::new(2, 2, 4)], &[2], 1));
        assert_eq!(report.violations, vec![Violation::AfterDeadline { job: 2, end: 4, deadline: 3 }]);
        assert!(report.violations[0].to_string().contains("exceeds deadline"));
    }

    #[test]
    fn reports_unit_and_weight_errors() {
        let inst = one_job();
        let report = validate(&inst, &solution(vec![Segment::new(1, 0, 1)], &[1, 2], 3));
        assert!(report.violations.contains(&Violation::PartialUnits { job: 1, units: 1, p: 2 }));
        assert!(report.violations.contains(&Violation::CompletedWithoutUnits { job: 2 }));
        assert!(report.violations.contains(&Violation::WeightMismatch { claimed: 3, actual: 7 }));

        let report = validate(&inst, &solution(vec![Segment::new(1, 0, 2)], &[], 0));
        assert_eq!(report.violations, vec![Violation::ExecutedNotCompleted { job: 1 }]);
    }
}
