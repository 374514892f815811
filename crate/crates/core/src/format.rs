//! JSON instance and solution files.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    self, Instance, Method, ModelError, RawJob, Schedule, Segment, Solution, Time, ValidationReport,
    Violation, Weight,
};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `{"p": int, "jobs": [{"id": string, "r": int, "d": int, "w": int}, ...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub p: Time,
    pub jobs: Vec<RawJob>,
}

impl InstanceFile {
    pub fn normalize(&self) -> Result<Instance, ModelError> {
        model::normalize(&self.jobs, self.p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub id: String,
    pub start: Time,
    pub end: Time,
}

/// `{"weight": int, "completed": [ids], "segments": [{"id", "start", "end"}], "method": "dp"|"oracle"}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub weight: Weight,
    pub completed: Vec<String>,
    pub segments: Vec<SegmentRecord>,
    pub method: Method,
}

impl SolutionFile {
    pub fn from_solution(instance: &Instance, solution: &Solution) -> Self {
        let label = |idx: usize| instance.job(idx).id.clone();
        SolutionFile {
            weight: solution.weight,
            completed: solution.completed.iter().map(|&j| label(j)).collect(),
            segments: solution
                .schedule
                .segments()
                .iter()
                .map(|s| SegmentRecord { id: label(s.job), start: s.start, end: s.end })
                .collect(),
            method: solution.method,
        }
    }

    /// Maps labels back to job indices. Labels the instance does not know are
    /// returned as violations and left out of the solution.
    pub fn resolve(&self, instance: &Instance) -> (Solution, Vec<Violation>) {
        let mut unknown = Vec::new();
        let mut lookup = |id: &str| {
            let found = instance.find(id);
            if found.is_none() {
                unknown.push(Violation::UnknownJob { job: id.to_string() });
            }
            found
        };
        let completed: BTreeSet<usize> = self.completed.iter().filter_map(|id| lookup(id)).collect();
        let segments: Vec<Segment> = self
            .segments
            .iter()
            .filter_map(|s| lookup(&s.id).map(|j| Segment::new(j, s.start, s.end)))
            .collect();
        let solution = Solution {
            completed,
            weight: self.weight,
            schedule: Schedule::new(segments),
            method: self.method,
        };
        (solution, unknown)
    }

    pub fn validate(&self, instance: &Instance) -> ValidationReport {
        let (solution, mut violations) = self.resolve(instance);
        violations.extend(model::validate(instance, &solution).violations);
        ValidationReport { violations }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FormatError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text)
        .map_err(|source| FormatError::Json { path: path.display().to_string(), source })
}

/// Pretty-printed JSON with a trailing newline. Output is byte-stable for equal values.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    std::fs::write(path, to_json(value))
        .map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}
