//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 parse or parameter error,
//! 3 resource refusal.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bench::{self, BenchError};
use crate::dp::{self, DpError};
use crate::format::{self, FormatError, InstanceFile, SolutionFile};
use crate::gen::{self, Family, GenParams};
use crate::model::Instance;
use crate::oracle::{self, OracleError, OracleLimits};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "wtsched", version, about = "Maximum weighted throughput for equal-length preemptive jobs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance with the dynamic program.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Also write every table cell with its attaining choice.
        #[arg(long)]
        dump_tables: Option<PathBuf>,
    },
    /// Check a solution file against an instance.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Solve by exhaustive subset enumeration.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = OracleLimits::GLOBAL.max_n)]
        max_n: usize,
    },
    /// Generate a seeded random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        horizon: i64,
        #[arg(long)]
        max_window: i64,
        #[arg(long)]
        max_weight: i64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "uniform")]
        family: String,
        #[arg(long)]
        output: PathBuf,
    },
    /// Time the solver across sizes and fit the growth exponent.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_SIZES)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = bench::DEFAULT_REPEATS)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Failure { code: EXIT_USAGE, message: e.to_string() }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::usage(e)
    }
}

impl From<DpError> for Failure {
    fn from(e: DpError) -> Self {
        let code = match e {
            DpError::TooLarge { .. } => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let code = match e {
            OracleError::TooLarge { .. } => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Dp(e) => e.into(),
            other => Failure::usage(other),
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let file: InstanceFile = format::read_json(path)?;
    let instance = file.normalize().map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    for job in instance.dropped() {
        eprintln!("note: job {:?} cannot fit its window (d < r + p) and is ignored", job.id);
    }
    Ok(instance)
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Solve { input, output, dump_tables } => {
            let instance = load_instance(&input)?;
            let tables = dp::compute_tables(&instance)?;
            let solution = dp::solve_from_tables(&tables, &instance)?;
            format::write_json(&output, &SolutionFile::from_solution(&instance, &solution))?;
            if let Some(path) = dump_tables {
                format::write_json(&path, &tables.dump())?;
            }
            Ok(EXIT_OK)
        }
        Command::Validate { instance, solution } => {
            let inst = load_instance(&instance)?;
            let sol: SolutionFile = format::read_json(&solution)?;
            let report = sol.validate(&inst);
            if report.ok() {
                println!("valid");
                Ok(EXIT_OK)
            } else {
                for v in &report.violations {
                    println!("violation: {v}");
                }
                Ok(EXIT_INVALID)
            }
        }
        Command::Oracle { input, output, max_n } => {
            let instance = load_instance(&input)?;
            let solution = oracle::oracle_solve(&instance, OracleLimits { max_n })?;
            format::write_json(&output, &SolutionFile::from_solution(&instance, &solution))?;
            Ok(EXIT_OK)
        }
        Command::Gen { n, p, horizon, max_window, max_weight, seed, family, output } => {
            let family: Family = family.parse().map_err(Failure::usage)?;
            let params = GenParams { n, p, horizon, max_window, max_weight, seed, family };
            let file = gen::generate(&params).map_err(Failure::usage)?;
            format::write_json(&output, &file)?;
            Ok(EXIT_OK)
        }
        Command::Bench { sizes, repeats, seed, output } => {
            let report = bench::run(&sizes, repeats, seed)?;
            for (n, t) in report.sizes.iter().zip(&report.times) {
                println!("n = {n:>5}  median {t:.4} s");
            }
            println!("fitted exponent {:.3}", report.fitted_exponent);
            format::write_json(&output, &report)?;
            Ok(EXIT_OK)
        }
    }
}
