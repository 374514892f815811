//! Exact preemptive scheduling of equal-length weighted jobs on a single
//! machine, maximizing the total weight of jobs completed by their deadlines.
//!
//! * [`model`]: jobs, instances, schedules and the schedule validator.
//! * [`edf`]: earliest-deadline-first engine, feasibility and block structure.
//! * [`dp`]: the O(n^4) dynamic program and solution reconstruction.
//! * [`oracle`]: brute-force solvers used to certify the dynamic program.
//! * [`gen`], [`bench`], [`format`], [`cli`]: generator, timing harness, file
//!   formats and the command-line front end.
//!
//! ```
//! use wtsched::{dp, model::{normalize, RawJob}};
//!
//! let jobs = [RawJob::new("a", 1, 3, 4), RawJob::new("b", 0, 4, 7)];
//! let instance = normalize(&jobs, 2).unwrap();
//! let solution = dp::solve(&instance).unwrap();
//! assert_eq!(solution.weight, 11);
//! ```

pub mod bench;
pub mod cli;
pub mod dp;
pub mod edf;
pub mod format;
pub mod gen;
pub mod model;
pub mod oracle;

pub use dp::solve;
pub use model::{normalize, Instance, Job, RawJob, Schedule, Segment, Solution};
pub use oracle::oracle_solve;
