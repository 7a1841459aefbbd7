use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fragsim::experiment::{
    self, config::LoadedRun, csv_out, runner, scenarios, ExperimentError, SweepSpec,
};
use fragsim::{DecisionLogMode, PolicyConfig};

/// Dynamic fragment allocation simulator.
#[derive(Debug, Parser)]
#[command(name = "fragsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one simulation and write its metrics.
    Run(RunArgs),
    /// Run a parameter sweep.
    Sweep(SweepArgs),
    /// Tabulate the analytical threshold residency.
    Oracle(OracleArgs),
    /// Run one workload under several policies.
    Compare(CompareArgs),
    /// Write the bundled topology and experiment configs.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; CSV goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces the workload seed (takes precedence over FRAGSIM_SEED).
    #[arg(long)]
    seed_override: Option<u64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Also write every policy decision, not only migrations.
    #[arg(long)]
    log_decisions: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    n: usize,
    /// Comma-separated designated-site probabilities.
    #[arg(long = "x-s", value_delimiter = ',', required = true)]
    x_s: Vec<f64>,
    /// Comma-separated thresholds; `a..b` expands to the inclusive range.
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated policies: optimal, threshold:T, nna, nna:T, fna.
    #[arg(long, value_delimiter = ',', required = true)]
    policies: Vec<String>,
}

#[derive(Debug, Args)]
struct FixturesArgs {
    #[arg(long)]
    out: PathBuf,
}

fn emit(out: Option<&Path>, name: &str, bytes: &[u8]) -> Result<(), ExperimentError> {
    match out {
        Some(dir) => csv_out::write_file(&dir.join(name), bytes),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| ExperimentError::io(Path::new("<stdout>"), e)),
    }
}

fn parse_thresholds(items: &[String]) -> Result<Vec<usize>, ExperimentError> {
    let bad = |s: &str| ExperimentError::config("t", format!("invalid threshold '{s}'"));
    let mut out = Vec::new();
    for item in items {
        match item.split_once("..") {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad(item))?;
                let b: usize = b.trim().parse().map_err(|_| bad(item))?;
                if a > b {
                    return Err(bad(item));
                }
                out.extend(a..=b);
            }
            None => out.push(item.trim().parse().map_err(|_| bad(item))?),
        }
    }
    Ok(out)
}

fn run(args: RunArgs) -> Result<(), ExperimentError> {
    let seed = experiment::resolve_seed_override(args.common.seed_override)?;
    let loaded = LoadedRun::load(&args.common.config)?;
    let mode = if args.log_decisions {
        DecisionLogMode::All
    } else {
        DecisionLogMode::MovesOnly
    };
    let outcome = runner::run_single(&loaded, seed, mode)?;
    let configured = loaded.config.output.clone().unwrap_or_default();
    match &args.common.out {
        Some(dir) => {
            csv_out::write_file(&dir.join("metrics.csv"), &outcome.metrics_csv())?;
            if args.log_decisions || configured.decisions.is_some() {
                csv_out::write_file(&dir.join("decisions.csv"), &outcome.decisions_csv())?;
            }
        }
        None => {
            match &configured.metrics {
                Some(p) => csv_out::write_file(&loaded.base_dir.join(p), &outcome.metrics_csv())?,
                None => emit(None, "", &outcome.metrics_csv())?,
            }
            if let Some(p) = &configured.decisions {
                csv_out::write_file(&loaded.base_dir.join(p), &outcome.decisions_csv())?;
            } else if args.log_decisions {
                emit(None, "", &outcome.decisions_csv())?;
            }
        }
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), ExperimentError> {
    let seed = experiment::resolve_seed_override(args.common.seed_override)?;
    let (spec, base_dir) = SweepSpec::load(&args.common.config)?;
    let rows = runner::run_sweep(&spec, &base_dir, seed)?;
    emit(
        args.common.out.as_deref(),
        "sweep.csv",
        &runner::sweep_csv(&rows),
    )
}

fn oracle(args: OracleArgs) -> Result<(), ExperimentError> {
    let t = parse_thresholds(&args.t)?;
    let rows = runner::oracle_grid(args.n, &args.x_s, &t)?;
    emit(
        args.out.as_deref(),
        "oracle.csv",
        &runner::oracle_csv(&rows),
    )
}

fn compare(args: CompareArgs) -> Result<(), ExperimentError> {
    let seed = experiment::resolve_seed_override(args.common.seed_override)?;
    let policies = args
        .policies
        .iter()
        .map(|p| {
            PolicyConfig::parse_short(p.trim()).map_err(|m| ExperimentError::config("policies", m))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let loaded = LoadedRun::load(&args.common.config)?;
    let rows = runner::compare(&loaded, &policies, seed)?;
    emit(
        args.common.out.as_deref(),
        "compare.csv",
        &runner::compare_csv(&rows),
    )
}

fn fixtures(args: FixturesArgs) -> Result<(), ExperimentError> {
    for path in scenarios::write_all(&args.out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Oracle(a) => oracle(a),
        Command::Compare(a) => compare(a),
        Command::Fixtures(a) => fixtures(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fragsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
