//! Command-line front end: `cost`, `optimize`, `verify` and `bench`.
//!
//! Exit codes: 0 on success, 1 for usage or parse errors, 2 when
//! verification fails, 3 when a check is inconclusive under `--strict`.

mod bench;
mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use revquant::optimize::PrepMode;
use revquant::{EquivalenceOptions, OptimizeOptions, VerifyMode};

pub use bench::{bench_directory, BenchRow, CSV_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "revquant", version, about = "Cost, optimize and verify reversible circuits in .real format")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the cost and gate distribution of a circuit.
    Cost {
        input: PathBuf,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Optimize a circuit and verify the result.
    Optimize {
        input: PathBuf,
        /// Where to write the optimized circuit (default: stdout, with the
        /// report on stderr).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the report as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the output even if verification fails.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        opt: OptimizeArgs,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Check that B implements A. Lines of B beyond A's are ancillae that
    /// start in 0 and must return to 0. Exits 0 only when equivalent.
    Verify {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Optimize every `.real` file in a directory and tabulate the results.
    Bench {
        directory: PathBuf,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write the rows as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        opt: OptimizeArgs,
        #[command(flatten)]
        check: CheckArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PrepArg {
    Hadamard,
    FixedPoint,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PrePass {
    Commute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyArg {
    Exhaustive,
    Sample,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Budget {
    Auto,
    Lines(usize),
}

fn parse_budget(s: &str) -> Result<Budget, String> {
    if s == "auto" {
        return Ok(Budget::Auto);
    }
    s.parse().map(Budget::Lines).map_err(|_| format!("expected a line count or `auto`, got `{s}`"))
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    /// Maximum number of ancilla lines; `auto` is one fewer than the input's lines.
    #[arg(long, value_parser = parse_budget, default_value = "auto")]
    ancilla_budget: Budget,
    #[arg(long, value_enum, default_value = "auto")]
    prep: PrepArg,
    #[arg(long, value_enum)]
    pre_pass: Option<PrePass>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    passes: u32,
}

impl OptimizeArgs {
    fn options(&self) -> OptimizeOptions {
        OptimizeOptions {
            ancilla_budget: match self.ancilla_budget {
                Budget::Auto => None,
                Budget::Lines(n) => Some(n),
            },
            prep: match self.prep {
                PrepArg::Hadamard => PrepMode::Hadamard,
                PrepArg::FixedPoint => PrepMode::FixedPoint,
                PrepArg::Auto => PrepMode::Auto,
            },
            passes: self.passes as usize,
            commute_pre_pass: self.pre_pass == Some(PrePass::Commute),
            ..OptimizeOptions::default()
        }
    }
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Exhaustive when the register is small enough, sampled otherwise.
    #[arg(long, value_enum)]
    verify: Option<VerifyArg>,
    /// Seed for sampled verification.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sampled inputs.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Treat inconclusive verification as a failure (exit code 3).
    #[arg(long)]
    strict: bool,
}

impl CheckArgs {
    /// `None` when verification is off.
    fn options(&self) -> Option<EquivalenceOptions> {
        let mode = match self.verify {
            None => VerifyMode::Auto,
            Some(VerifyArg::Exhaustive) => VerifyMode::Exhaustive,
            Some(VerifyArg::Sample) => VerifyMode::Sample,
            Some(VerifyArg::Off) => return None,
        };
        Some(EquivalenceOptions { mode, seed: self.seed, samples: self.samples, ..EquivalenceOptions::default() })
    }
}

/// Run the command line `args` (including the program name), writing
/// regular output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Cost { input, json } => commands::cost(&input, json, out),
        Command::Optimize { input, output, json, force, opt, check } => commands::optimize(
            &commands::OptimizeJob {
                input: &input,
                output: output.as_deref(),
                json: json.as_deref(),
                force,
                options: opt.options(),
                check: check.options(),
                strict: check.strict,
            },
            out,
            err,
        ),
        Command::Verify { a, b, check } => commands::verify(&a, &b, check.options(), out),
        Command::Bench { directory, csv, json, opt, check } => bench::run(
            &directory,
            csv.as_deref(),
            json.as_deref(),
            &opt.options(),
            check.options().unwrap_or_default(),
            out,
        ),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Failure of a command before it could produce a verdict.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Rewrite(#[from] revquant::RewriteError),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn optimize_args(extra: &[&str]) -> (OptimizeArgs, CheckArgs) {
        let argv = ["revquant", "optimize", "x.real"].into_iter().chain(extra.iter().copied());
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Optimize { opt, check, .. } => (opt, check),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn budget_parsing() {
        assert_eq!(parse_budget("auto"), Ok(Budget::Auto));
        assert_eq!(parse_budget("4"), Ok(Budget::Lines(4)));
        assert!(parse_budget("-1").is_err());
    }

    #[test]
    fn defaults_map_to_library_defaults() {
        let (o, c) = optimize_args(&[]);
        let opts = o.options();
        let lib = OptimizeOptions::default();
        assert_eq!((opts.ancilla_budget, opts.prep, opts.passes), (lib.ancilla_budget, lib.prep, lib.passes));
        assert!(!opts.commute_pre_pass);
        let check = c.options().unwrap();
        assert_eq!((check.mode, check.samples, check.seed), (VerifyMode::Auto, 1000, 0));
    }

    #[test]
    fn flags_are_forwarded() {
        let (o, c) = optimize_args(&["--ancilla-budget", "2", "--prep", "fixed-point", "--pre-pass", "commute", "--passes", "3", "--verify", "off"]);
        let opts = o.options();
        assert_eq!((opts.ancilla_budget, opts.prep, opts.passes), (Some(2), PrepMode::FixedPoint, 3));
        assert!(opts.commute_pre_pass);
        assert!(c.options().is_none());
    }
}
