use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use warpcone::harness::{report, run_scenario, ExperimentKind, Overrides};

/// Run warped-cone experiments from TOML scenario files.
#[derive(Parser)]
#[command(name = "warpcone", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding the scenario's.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Size cap for complete base graphs and word balls.
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    WarpMetric(RunArgs),
    QuotientCheck(RunArgs),
    FaithfulRadius(RunArgs),
    SchreierFamily(RunArgs),
    Spectral(RunArgs),
    Distortion(RunArgs),
    EmbedProfinite(RunArgs),
    KernelCheck(RunArgs),
    RoeTransfer(RunArgs),
    ConeSlice(RunArgs),
    /// Summarize every manifest in a directory.
    Report {
        #[arg(long, default_value = "out")]
        dir: PathBuf,
    },
}

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn run(kind: ExperimentKind, args: RunArgs) -> ExitCode {
    match std::fs::read_to_string(&args.config)
        .map_err(warpcone::Error::from)
        .and_then(|t| warpcone::harness::Scenario::parse(&t))
    {
        Ok(s) if s.kind != kind => {
            eprintln!(
                "error: {} declares kind `{}`, not `{kind}`",
                args.config.display(),
                s.kind
            );
            return ExitCode::from(EXIT_USAGE);
        }
        Ok(_) => {}
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let overrides = Overrides {
        out: args.out,
        seed: args.seed,
        cap: args.cap,
    };
    match run_scenario(&args.config, &overrides) {
        Ok(outcome) => {
            let m = &outcome.manifest;
            let failed: Vec<_> = m.assertions.iter().filter(|a| !a.passed).collect();
            println!(
                "{} {}: {}/{} checks passed, wrote {}",
                m.run.kind,
                m.scenario.name,
                m.assertions.len() - failed.len(),
                m.assertions.len(),
                outcome.csv_path.display()
            );
            for a in &failed {
                println!("  FAIL {}: {}", a.invariant, a.detail);
            }
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::WarpMetric(a) => (ExperimentKind::WarpMetric, a),
        Command::QuotientCheck(a) => (ExperimentKind::QuotientCheck, a),
        Command::FaithfulRadius(a) => (ExperimentKind::FaithfulRadius, a),
        Command::SchreierFamily(a) => (ExperimentKind::SchreierFamily, a),
        Command::Spectral(a) => (ExperimentKind::Spectral, a),
        Command::Distortion(a) => (ExperimentKind::Distortion, a),
        Command::EmbedProfinite(a) => (ExperimentKind::EmbedProfinite, a),
        Command::KernelCheck(a) => (ExperimentKind::KernelCheck, a),
        Command::RoeTransfer(a) => (ExperimentKind::RoeTransfer, a),
        Command::ConeSlice(a) => (ExperimentKind::ConeSlice, a),
        Command::Report { dir } => {
            return match report(&dir) {
                Ok((summary, long)) => {
                    println!("wrote {} and {}", summary.display(), long.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_USAGE)
                }
            };
        }
    };
    run(kind, args)
}
