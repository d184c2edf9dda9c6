//! Command line harness: runs configured problems, replays the
//! self-check suites, and sweeps parameter grids.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use bregkit::algorithms::RunStatus;
use bregkit::config::{AlgorithmChoice, RunConfig};
use bregkit::report::{execute_run, summarize, sweep_csv, trace_csv, CellOutcome};
use bregkit::suites::{run_suite, SuiteKind};

#[derive(Parser)]
#[command(
    name = "bregkit",
    version,
    about = "Fixed-point and equilibrium solver over Bregman geometries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured problem; writes a trace CSV and a JSON summary.
    Run(RunArgs),
    /// Measure self-check suites against a configuration.
    Check(CheckArgs),
    /// Run every cell of the configured parameter grid into one table.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path prefix; files get .csv / .json extensions.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Scheme to run: main, halpern, zegeye, or kumam.
    #[arg(long, value_parser = parse_algo)]
    algo: Option<AlgorithmChoice>,
    /// Override the iteration budget.
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Suite to run: core-identities, projection, resolvent, or
    /// algorithm. All four when omitted.
    #[arg(long, value_parser = parse_suite)]
    suite: Option<SuiteKind>,
    /// Override the iteration budget of the algorithm suite.
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Base scheme for cells that do not override it.
    #[arg(long, value_parser = parse_algo)]
    algo: Option<AlgorithmChoice>,
    /// Override the iteration budget of every cell.
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
}

fn parse_algo(s: &str) -> Result<AlgorithmChoice, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_suite(s: &str) -> Result<SuiteKind, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read configuration {}", path.display()))?;
    RunConfig::parse(&text).with_context(|| format!("invalid configuration {}", path.display()))
}

fn write_output(path: &str, contents: &str) -> Result<()> {
    if let Some(parent) = Path::new(path).parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("cannot create output directory {}", parent.display()))?;
        }
    }
    fs::write(path, contents).with_context(|| format!("cannot write {path}"))
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode> {
    let mut cfg = load_config(&args.common.config)?;
    if let Some(algo) = args.algo {
        cfg.algorithm = algo;
    }
    if let Some(n) = args.max_iter {
        cfg.stop.max_iterations = n;
    }
    if let Some(s) = args.common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.common.out {
        cfg.out = Some(o.clone());
    }
    let prefix = cfg.out.clone().unwrap_or_else(|| "bregkit-run".to_string());

    log::info!("running {} on {}", cfg.algorithm.name(), args.common.config.display());
    let run = execute_run(&cfg)?;
    let summary = summarize(&run)?;

    let csv_path = format!("{prefix}.csv");
    let json_path = format!("{prefix}.json");
    write_output(&csv_path, &trace_csv(&run.trace))?;
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    write_output(&json_path, &json)?;

    println!(
        "{algo}: {status} after {iters} iterations, final distance to witness {dist:.3e}",
        algo = summary.algorithm,
        status = summary.status,
        iters = summary.iterations,
        dist = summary.final_dist_to_witness,
    );
    for note in &summary.notes {
        println!("note: {note}");
    }
    println!("trace: {csv_path}");
    println!("summary: {json_path}");

    Ok(match run.trace.status {
        RunStatus::Converged => ExitCode::SUCCESS,
        RunStatus::MaxIterations => ExitCode::from(2),
    })
}

fn cmd_check(args: &CheckArgs) -> Result<ExitCode> {
    let mut cfg = load_config(&args.common.config)?;
    if let Some(n) = args.max_iter {
        cfg.stop.max_iterations = n;
    }
    if let Some(s) = args.common.seed {
        cfg.seed = s;
    }
    let prefix = args
        .common
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| "bregkit-check".to_string());

    let kinds: Vec<SuiteKind> =
        args.suite.map(|k| vec![k]).unwrap_or_else(|| SuiteKind::ALL.to_vec());
    let mut all_passed = true;
    for kind in kinds {
        match run_suite(kind, &cfg) {
            Ok(report) => {
                print!("{}", report.render_text());
                let mut json = serde_json::to_string_pretty(&report)?;
                json.push('\n');
                write_output(&format!("{prefix}-{}.json", kind.name()), &json)?;
                all_passed &= report.passed;
            }
            Err(e) => {
                eprintln!("suite {} could not run: {e}", kind.name());
                all_passed = false;
            }
        }
    }
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode> {
    let mut cfg = load_config(&args.common.config)?;
    if let Some(algo) = args.algo {
        cfg.algorithm = algo;
    }
    if let Some(n) = args.max_iter {
        cfg.stop.max_iterations = n;
    }
    if let Some(s) = args.common.seed {
        cfg.seed = s;
    }
    let prefix = args
        .common
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| "bregkit-sweep".to_string());

    let rows = bregkit::report::execute_sweep(&cfg);
    let table = sweep_csv(&rows);
    let csv_path = format!("{prefix}.csv");
    write_output(&csv_path, &table)?;
    print!("{table}");
    println!("table: {csv_path}");

    let mut failed = false;
    for (cell_cfg, outcome) in &rows {
        if let CellOutcome::Failed(msg) = outcome {
            eprintln!("cell {}: {msg}", cell_cfg.algorithm.name());
            failed = true;
        }
    }
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Check(args) => cmd_check(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
