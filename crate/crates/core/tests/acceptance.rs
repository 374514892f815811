//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use wtsched::bench;
use wtsched::dp;
use wtsched::edf;
use wtsched::model::{validate, Instance, Solution};
use wtsched::oracle::{self, OracleError, OracleLimits};

const PS: [i64; 4] = [1, 2, 3, 5];

struct Outcome {
    name: &'static str,
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(name: &'static str, pass: bool, summary: String) -> Self {
        Outcome { name, pass, summary, details: Vec::new() }
    }
}

/// First failure plus a count, so a broken criterion stays readable.
#[derive(Default)]
struct Tally {
    checked: usize,
    failed: usize,
    above: usize,
    below: usize,
    first: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    /// Like `check` on `dp == oracle`, also counting which side is larger.
    /// `None` ranks below every value.
    fn compare<T: Ord>(&mut self, dp: T, oracle: T, what: impl FnOnce() -> String) {
        match dp.cmp(&oracle) {
            std::cmp::Ordering::Greater => self.above += 1,
            std::cmp::Ordering::Less => self.below += 1,
            std::cmp::Ordering::Equal => {}
        }
        self.check(dp == oracle, what);
    }

    fn ok(&self) -> bool {
        self.failed == 0
    }

    fn line(&self, label: &str) -> String {
        let mut s = format!("{label}: {}/{} agree", self.checked - self.failed, self.checked);
        if self.above + self.below > 0 {
            s.push_str(&format!(" (dp above oracle {}, below {})", self.above, self.below));
        }
        if let Some(first) = &self.first {
            s.push_str(&format!("; first mismatch {first}"));
        }
        s
    }
}

fn describe(inst: &Instance) -> String {
    let jobs: Vec<String> =
        inst.real_jobs().iter().map(|j| format!("({},{},{})", j.r, j.d, j.w)).collect();
    format!("p={} [{}]", inst.p(), jobs.join(" "))
}

/// Solved instances and their completed sets, shared by criteria 3 and 4.
#[derive(Default)]
struct Solved {
    solutions: Vec<(Instance, Solution)>,
    sets: Vec<(Instance, BTreeSet<usize>)>,
}

fn global_equivalence(solved: &mut Solved) -> Outcome {
    let start = Instant::now();
    let instances = common::sweep(1..=8, &PS, 4, 1_000);
    let mut tally = Tally::default();
    for inst in instances {
        let sol = dp::solve(&inst).expect("dp solves");
        let best = oracle::oracle_solve(&inst, OracleLimits::GLOBAL).expect("oracle solves");
        tally.check(sol.weight == best.weight, || {
            format!("dp {} vs oracle {} on {}", sol.weight, best.weight, describe(&inst))
        });
        solved.sets.push((inst.clone(), best.completed.clone()));
        solved.sets.push((inst.clone(), sol.completed.clone()));
        solved.solutions.push((inst, sol));
    }
    let summary = format!("{} ({:.1} s)", tally.line("instances"), start.elapsed().as_secs_f64());
    Outcome::new("1 global oracle equivalence", tally.ok() && tally.checked >= 500, summary)
}

fn cell_equivalence(solved: &mut Solved) -> Outcome {
    let start = Instant::now();
    let instances = common::sweep(1..=6, &PS, 2, 2_000);
    let count = instances.len();
    let lim = OracleLimits::CELL;
    let (mut f, mut g, mut h) = (Tally::default(), Tally::default(), Tally::default());
    for inst in instances {
        let t = dp::compute_tables(&inst).expect("tables");
        let n = inst.n();
        for k in 0..=n {
            for i in 1..=n {
                for a in 0..=n {
                    if let Some(o) = oracle::oracle_g(&inst, k, i, a, lim).expect("oracle G") {
                        let v = t.g(k, i, a);
                        g.compare(v, o, || format!("G[{k}][{i}][{a}] dp {v} vs {o} on {}", describe(&inst)));
                    }
                }
                for j in (1..=n).filter(|&j| inst.r(j) >= inst.r(i)) {
                    let o = oracle::oracle_f(&inst, k, i, j, lim).expect("oracle F");
                    let v = t.f(k, i, j);
                    f.compare(v, o, || format!("F[{k}][{i}][{j}] dp {v} vs {o} on {}", describe(&inst)));

                    if !t.h_defined(k, i, j) {
                        continue;
                    }
                    match oracle::oracle_h(&inst, k, i, j, lim) {
                        Ok(o) => {
                            let v = t.h(k, i, j);
                            h.compare(v, o, || {
                                format!("H[{k}][{i}][{j}] dp {v:?} vs {o:?} on {}", describe(&inst))
                            });
                        }
                        Err(OracleError::Undefined(_)) => {}
                        Err(e) => panic!("oracle H: {e}"),
                    }
                }
            }
        }
        let sol = dp::solve_from_tables(&t, &inst).expect("dp solves");
        solved.sets.push((inst.clone(), sol.completed.clone()));
        solved.solutions.push((inst, sol));
    }
    let pass = f.ok() && g.ok() && h.ok() && count >= 100;
    let summary = format!("{count} instances, n <= 6 ({:.1} s)", start.elapsed().as_secs_f64());
    let mut out = Outcome::new("2 per-cell oracle equivalence", pass, summary);
    out.details = vec![f.line("F cells"), g.line("G cells"), h.line("H cells")];
    out
}

fn schedule_validity(solved: &Solved) -> Outcome {
    let mut tally = Tally::default();
    for (inst, sol) in &solved.solutions {
        let report = validate(inst, sol);
        let units = sol.schedule.units();
        let realized: BTreeSet<usize> =
            units.iter().filter(|&(_, &u)| u == inst.p()).map(|(&j, _)| j).collect();
        let weight = inst.total_weight(&realized);
        tally.check(report.ok() && weight == sol.weight && realized == sol.completed, || {
            let v: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
            format!("[{}] realized {weight} vs {} on {}", v.join("; "), sol.weight, describe(inst))
        });
    }
    Outcome::new("3 schedule validity", tally.ok(), tally.line("schedules"))
}

fn edf_structure(solved: &Solved) -> Outcome {
    let mut tally = Tally::default();
    let mut blocks_seen = 0;
    for (inst, set) in &solved.sets {
        let (schedule, completed) = edf::edf_schedule(inst, set).expect("edf");
        tally.check(&completed == set, || format!("{set:?} not completed on {}", describe(inst)));
        let done = schedule.completion_times();
        for block in edf::blocks(inst, &schedule).expect("blocks") {
            blocks_seen += 1;
            let a = block.jobs.len() as i64;
            tally.check(block.end - block.start == a * inst.p(), || {
                format!("block [{}, {}) holds {a} jobs on {}", block.start, block.end, describe(inst))
            });
            let last = *block.jobs.iter().max().expect("non-empty block");
            tally.check(done[&last] == block.end, || {
                format!("job {last} ends at {} not {} on {}", done[&last], block.end, describe(inst))
            });
            let mut rest = set.clone();
            rest.remove(&last);
            let (reduced, still) = edf::edf_schedule(inst, &rest).expect("edf");
            let mut expected = done.clone();
            expected.remove(&last);
            tally.check(still == rest && reduced.completion_times() == expected, || {
                format!("removing {last} from {set:?} moved completions on {}", describe(inst))
            });
        }
    }
    let summary = format!("{} sets, {blocks_seen} blocks; {}", solved.sets.len(), tally.line("checks"));
    Outcome::new("4 EDF structure", tally.ok(), summary)
}

fn complexity() -> Outcome {
    let n_max = *bench::DEFAULT_SIZES.last().unwrap();
    let bytes = dp::table_bytes(n_max + 1);
    let budget = dp::DEFAULT_MEMORY_BUDGET;
    match bench::run(&bench::DEFAULT_SIZES, 3, 0) {
        Ok(report) => {
            let times: Vec<String> = report
                .sizes
                .iter()
                .zip(&report.times)
                .map(|(n, t)| format!("n={n} {t:.3}s"))
                .collect();
            let pass = report.fitted_exponent <= 4.5 && bytes <= budget;
            let summary = format!(
                "exponent {:.2} (limit 4.5); {}; tables at n={n_max} use {:.0} MiB of {:.0} MiB",
                report.fitted_exponent,
                times.join(", "),
                bytes as f64 / (1 << 20) as f64,
                budget as f64 / (1 << 20) as f64,
            );
            Outcome::new("5 complexity scaling", pass, summary)
        }
        Err(e) => Outcome::new("5 complexity scaling", false, format!("bench failed: {e}")),
    }
}

fn run_bin(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_wtsched"))
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn determinism() -> Outcome {
    let dir = tempfile::TempDir::new().expect("temp dir");
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let same = |a: &str, b: &str| std::fs::read(Path::new(a)).ok() == std::fs::read(Path::new(b)).ok();
    let mut tally = Tally::default();
    for (family, seed) in [("uniform", "3"), ("tight", "4"), ("nested", "5"), ("staircase", "6")] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let inst = path(&format!("{family}-{run}.json"));
            let sol = path(&format!("{family}-{run}-sol.json"));
            let gen = [
                "gen", "--n", "25", "--p", "3", "--horizon", "60", "--max-window", "12",
                "--max-weight", "100", "--seed", seed, "--family", family, "--output", &inst,
            ];
            let ok = run_bin(&gen) && run_bin(&["solve", "--input", &inst, "--output", &sol]);
            tally.check(ok, || format!("{family} run {run} failed"));
            outputs.push((inst, sol));
        }
        tally.check(same(&outputs[0].0, &outputs[1].0), || format!("{family} generator output differs"));
        tally.check(same(&outputs[0].1, &outputs[1].1), || format!("{family} solution output differs"));
    }
    Outcome::new("6 determinism", tally.ok(), tally.line("comparisons"))
}

fn main() -> ExitCode {
    let mut solved = Solved::default();
    let outcomes = [
        global_equivalence(&mut solved),
        cell_equivalence(&mut solved),
        schedule_validity(&solved),
        edf_structure(&solved),
        complexity(),
        determinism(),
    ];
    println!();
    for o in &outcomes {
        println!("{} criterion {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.name, o.summary);
        for d in &o.details {
            println!("       {d}");
        }
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("\nacceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
