use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ucw_cli::{emit, run, CliError, Overrides};

#[derive(Parser)]
#[command(name = "ucw", version, about = "Verification campaigns for uniformly convex W-hyperbolic spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and write a report.
    Verify(VerifyArgs),
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// File of key=value settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// axioms, cat0, property_g, lambda_convexity, afp, rates, shadow, prox or all.
    #[arg(long)]
    suite: Option<String>,
    /// all, euclidean[:n=2,r=1], lp[:n=2,p=4,r=1], poincare[:r=0.9] or tree[:file=PATH,r=3].
    #[arg(long)]
    model: Option<String>,
    /// Trials per sampled check.
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Tolerance of inequality checks.
    #[arg(long)]
    tol: Option<String>,
    /// Point accuracy of proxes.
    #[arg(long)]
    prox_tol: Option<String>,
    /// Report file; standard output when absent.
    #[arg(long)]
    out: Option<String>,
    /// json or csv.
    #[arg(long)]
    format: Option<String>,
}

fn verify(args: VerifyArgs) -> Result<i32, CliError> {
    let file = match &args.config {
        Some(path) => Overrides::read(path)?,
        None => Overrides::default(),
    };
    let flags = Overrides {
        seed: args.seed,
        suite: args.suite,
        model: args.model,
        trials: args.trials,
        tol: args.tol,
        prox_tol: args.prox_tol,
        out: args.out,
        format: args.format,
    };
    let config = file.then(flags).resolve()?;
    let report = run(config);
    let path = emit(&report)?;
    let c = report.body.counts;
    eprintln!(
        "pass {} fail {} inconclusive {} skipped {} errors {} in {:.1}s{}",
        c.pass,
        c.fail,
        c.inconclusive,
        c.skipped,
        report.body.errors,
        report.wall_clock_seconds,
        path.map(|p| format!(", report in {}", p.display())).unwrap_or_default()
    );
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify(args) => verify(args).unwrap_or_else(|e| {
            eprintln!("error: {e}");
            e.exit_code()
        }),
    };
    ExitCode::from(code as u8)
}
