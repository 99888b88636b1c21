use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pilotguard_harness::{parse_spec_for, run_experiment, write_csv, write_csv_file, ExperimentKind, HarnessError};

#[derive(Parser)]
#[command(name = "pilotguard", version, about = "Pilot-spoofing detection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Average Bob/Eve SNR under MRT on a spoofable pilot estimate.
    SnrCurves(RunArgs),
    /// Empirical and closed-form ROC of the detector.
    Roc(RunArgs),
    /// Detection probability against training length.
    PdVsN(RunArgs),
    /// Detection probability against antenna count.
    PdVsM(RunArgs),
    /// Detection probability against spoofing power.
    PdVsPe(RunArgs),
    /// Channel-estimation error of LS and CEE.
    MseVsN(RunArgs),
    /// Ergodic secrecy rate of MRT, ZF and GED beams.
    SecrecyVsPa(RunArgs),
    /// Closed-form values only.
    TheoryTable(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Override the trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (defaults to `output_path` from the config, else stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::SnrCurves(a) => (ExperimentKind::SnrCurves, a),
            Command::Roc(a) => (ExperimentKind::Roc, a),
            Command::PdVsN(a) => (ExperimentKind::PdVsN, a),
            Command::PdVsM(a) => (ExperimentKind::PdVsM, a),
            Command::PdVsPe(a) => (ExperimentKind::PdVsPe, a),
            Command::MseVsN(a) => (ExperimentKind::MseVsN, a),
            Command::SecrecyVsPa(a) => (ExperimentKind::SecrecyVsPa, a),
            Command::TheoryTable(a) => (ExperimentKind::TheoryTable, a),
        }
    }
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<(), HarnessError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|source| HarnessError::Io { path: args.config.clone(), source })?;
    let mut spec = parse_spec_for(&text, Some(kind))?;
    if let Some(t) = args.trials {
        spec.trials = t;
    }
    if let Some(s) = args.seed {
        spec.master_seed = s;
    }
    if args.out.is_some() {
        spec.output_path = args.out;
    }
    let rows = run_experiment(&spec)?;
    match &spec.output_path {
        Some(path) => write_csv_file(&rows, path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv(&rows, &mut lock)
                .map_err(|e| HarnessError::Io { path: "<stdout>".into(), source: std::io::Error::other(e) })?;
            lock.flush().map_err(|source| HarnessError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (kind, args) = cli.command.split();
    match run(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pilotguard: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
