use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use uncertainty::io::{read_observable_pair, write_output};
use uncertainty::report::{self, OutputFormat};
use uncertainty::sampling::SampleConfig;
use uncertainty::saturation::Target;
use uncertainty::{Error, Execution, Tolerance};

#[derive(Parser)]
#[command(name = "uncertainty", version, about = "Evaluate and saturate quantum uncertainty bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every bound and checker over sampled observables and states.
    Verify {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Rank of the sampled density matrices (defaults to n).
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run trials on one thread.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the built-in golden instances.
    Reproduce {
        #[command(flatten)]
        common: Common,
    },
    /// Construct an orthonormal pair saturating a Maccone–Pati bound.
    Saturate {
        /// JSON file with two matrices: {"a": M, "b": M} or [M, M].
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = TargetArg::Mp3)]
        target: TargetArg,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1e-12)]
    tol_abs: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_rel: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

impl Common {
    fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.tol_abs, self.tol_rel)
    }

    fn format(&self) -> OutputFormat {
        match self.format {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Mp3,
    Mp6,
}

/// Either an exit code from a finished run or an error to report.
fn run(cli: Cli) -> Result<u8, Error> {
    let (text, out, code) = match cli.command {
        Command::Verify { n, rank, trials, seed, sequential, common } => {
            let config = SampleConfig { dimension: n, rank: rank.unwrap_or(n), seed, count: trials };
            let execution = if sequential { Execution::Sequential } else { Execution::Parallel };
            let r = report::cmd_verify(&config, &common.tolerance(), execution)?;
            for f in &r.summary.failures {
                eprintln!("trial {}: {}", f.trial, f.message);
            }
            (r.render(common.format())?, common.out, r.exit_code())
        }
        Command::Reproduce { common } => {
            let r = report::cmd_reproduce(&common.tolerance())?;
            if !r.failed.is_empty() {
                eprintln!("failed goldens: {}", r.failed.join(", "));
            }
            (r.render(common.format())?, common.out, r.exit_code())
        }
        Command::Saturate { input, target, common } => {
            let (a, b) = read_observable_pair(&input)?;
            let target = match target {
                TargetArg::Mp3 => Target::Mp3,
                TargetArg::Mp6 => Target::Mp6,
            };
            let input = Some(input.display().to_string());
            let r = match report::cmd_saturate(&a, &b, target, &common.tolerance(), input) {
                Ok(r) => r,
                // the inputs were valid, so a failed construction is exit 2
                Err(e) if !e.is_input_error() => {
                    eprintln!("error: {e}");
                    return Ok(2);
                }
                Err(e) => return Err(e),
            };
            if !r.saturated {
                eprintln!("construction misses saturation: relative gap {:e}", r.relative_gap);
            }
            (r.render(common.format())?, common.out, r.exit_code())
        }
    };
    write_output(out.as_deref(), &text)?;
    Ok(code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_invariant_violation() { 2 } else { 1 })
        }
    }
}
