//! `wrs-lab`: reproducible experiment runner for the weighted random sums laboratory.

mod config;
mod error;
mod experiments;
mod output;
mod selftest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wrs_core::paths::{fmt_full, read_path_csv};
use wrs_core::pvariation::{pvar, PvarQuery};

use crate::config::ExperimentConfig;
use crate::error::{CliError, EXIT_FAIL};
use crate::experiments::experiment_registry;
use crate::output::{summary_text, write_artifacts};

#[derive(Parser)]
#[command(name = "wrs-lab", version, about = "Weighted random sums laboratory")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Experiment config (TOML). Without it the experiment's defaults are used.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed; overrides `master_seed` in the config.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory; overrides `output_dir` (default `out/<experiment>`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for replica parallelism. Outputs do not depend on it.
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Mixed-normal CLT: KS of X_m(T)/sqrt(V_m) against N(0,1).
    SimulateClt,
    /// Remainder rate: log-log slope of E sup|R_{n,m}| in n.
    Rate,
    /// Fractional integration-by-parts identity check.
    IdentityCheck,
    /// p-variation of a path CSV (index, t, value); prints the scalar.
    Pvar(PvarArgs),
    /// p-variation distribution scan and Lépingle ratio across m.
    PvarScan,
    /// Fourth-moment tightness constant of the increments.
    Tightness,
    /// Characteristic-function check of stable convergence.
    StableCf,
    /// Fast property and oracle suite.
    Selftest {
        /// Deliberately break one check to exercise failure reporting.
        #[arg(long, value_enum)]
        inject_fault: Option<selftest::Fault>,
    },
}

#[derive(Args)]
struct PvarArgs {
    /// Path CSV as written by the library (`# wrs-lab csv v1`, then index,t,value).
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Exponent p >= 1.
    #[arg(long)]
    p: f64,
    /// Left end of the interval (default: first point).
    #[arg(long)]
    a: Option<f64>,
    /// Right end of the interval (default: last point).
    #[arg(long)]
    b: Option<f64>,
}

impl Command {
    fn experiment(&self) -> Option<&'static str> {
        Some(match self {
            Command::SimulateClt => "clt",
            Command::Rate => "rate",
            Command::IdentityCheck => "identity",
            Command::PvarScan => "pvar-scan",
            Command::Tightness => "tightness",
            Command::StableCf => "stable-cf",
            Command::Pvar(_) | Command::Selftest { .. } => return None,
        })
    }
}

fn manifest(cfg: &ExperimentConfig) -> String {
    format!(
        "# wrs-lab manifest v1\n# wrs-lab {}\n# {}\n{}",
        env!("CARGO_PKG_VERSION"),
        wrs_core::CSV_VERSION_LINE.trim_start_matches("# "),
        cfg.to_toml()
    )
}

fn run_experiment(name: &str, global: &GlobalArgs) -> Result<bool, CliError> {
    let exp = experiment_registry().build(name, &())?;
    let mut cfg = match &global.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::with_replicas(exp.default_replicas()),
    };
    if let Some(seed) = global.seed {
        cfg.master_seed = Some(seed);
    }
    if let Some(out) = &global.out {
        cfg.output_dir = Some(out.clone());
    }
    let mut cfg = exp.resolve(cfg)?;
    let dir = cfg
        .output_dir
        .get_or_insert_with(|| Path::new("out").join(name))
        .clone();
    let artifacts = exp.run(&cfg)?;
    write_artifacts(&dir, &artifacts, &manifest(&cfg))?;
    print!("{}", summary_text(&artifacts));
    println!("artifacts: {}", dir.display());
    Ok(artifacts.pass)
}

fn run_pvar(args: &PvarArgs) -> Result<(), CliError> {
    PvarQuery::new(
        args.p,
        args.a.unwrap_or(f64::NEG_INFINITY),
        args.b.unwrap_or(f64::INFINITY),
    )
    .map_err(|e| CliError::Config(format!("p, a, b: {e}")))?;
    let file = std::fs::File::open(&args.input)
        .map_err(|e| CliError::Config(format!("input: cannot open {}: {e}", args.input.display())))?;
    let rows = read_path_csv(file)?;
    if rows.iter().enumerate().any(|(i, r)| r.index != i) {
        return Err(CliError::Config(
            "input: indices must run 0, 1, 2, ...".to_string(),
        ));
    }
    let a = args.a.unwrap_or(f64::NEG_INFINITY);
    let b = args.b.unwrap_or(f64::INFINITY);
    let values: Vec<f64> = rows
        .iter()
        .filter(|r| r.t >= a && r.t <= b)
        .map(|r| r.value)
        .collect();
    if values.is_empty() {
        return Err(CliError::Config(
            "a, b: no path points in the interval".to_string(),
        ));
    }
    println!("{}", fmt_full(pvar(&values, args.p)?));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.global.threads {
        if k == 0 {
            eprintln!("config error: threads: must be positive");
            return ExitCode::from(error::EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("runtime error: {e}");
            return ExitCode::from(error::EXIT_RUNTIME);
        }
    }
    let result = match &cli.command {
        Command::Selftest { inject_fault } => Ok(selftest::run(*inject_fault)),
        Command::Pvar(args) => run_pvar(args).map(|_| true),
        cmd => run_experiment(cmd.experiment().expect("experiment subcommand"), &cli.global),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
