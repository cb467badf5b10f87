use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;
use rotor_gibbs_harness::plot::emit_plot_data;
use rotor_gibbs_harness::{run_experiment, ExperimentConfig, ExperimentKind, HarnessError};

/// Environment variable naming the base directory for experiment output.
const OUT_ENV: &str = "ROTOR_GIBBS_OUT";

#[derive(Parser)]
#[command(name = "rotor-gibbs", version, about = "Run rotor-model experiments and emit CSV data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the circle heat kernel and check its normalisation.
    #[command(alias = "kernel")]
    KernelTable(RunArgs),
    /// Closed-form ground states against the numeric oracle, with Hessian labels.
    #[command(alias = "groundstate")]
    GroundstateScan(RunArgs),
    /// Scan βJ across the Dobrushin threshold.
    Dobrushin(RunArgs),
    /// Girsanov weights of free paths: martingale property and pathwise bound.
    GirsanovCheck(RunArgs),
    /// Metropolis chains from both ground states at low and high temperature.
    Metastability(RunArgs),
    /// Low-energy dual clusters of the final metastability configurations.
    PercolationScan(RunArgs),
    /// Boundary sensitivity of the central spin under frozen rings.
    Badprobe(RunArgs),
    /// Chessboard estimate on the 2×2 torus by exact quadrature.
    Chessboard(RunArgs),
    /// Truncated cluster expansion against brute-force ln Z.
    PolymerCheck(RunArgs),
    /// Convert CSV outputs into gnuplot-style .dat files.
    PlotData(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: config out_dir, else $ROTOR_GIBBS_OUT/<experiment>, else out/<experiment>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the base seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for replica and path parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// CSV files or directories containing them.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "plot")]
    out: PathBuf,
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<bool, HarnessError> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(kind, path)?,
        None => ExperimentConfig::new(kind),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(HarnessError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| HarnessError::Usage(e.to_string()))?;
    }
    let out = args
        .out
        .or_else(|| config.out_dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(|base| PathBuf::from(base).join(kind.name())))
        .unwrap_or_else(|| PathBuf::from("out").join(kind.name()));
    let record = run_experiment(&config, &out)?;
    println!("{} [{:?}] -> {}", kind, record.status, out.display());
    for c in &record.checks {
        println!("  {} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if let Some(e) = &record.error {
        println!("  ERROR {e}");
    }
    Ok(record.passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::KernelTable(a) => run(ExperimentKind::KernelTable, a),
        Command::GroundstateScan(a) => run(ExperimentKind::GroundstateScan, a),
        Command::Dobrushin(a) => run(ExperimentKind::Dobrushin, a),
        Command::GirsanovCheck(a) => run(ExperimentKind::GirsanovCheck, a),
        Command::Metastability(a) => run(ExperimentKind::Metastability, a),
        Command::PercolationScan(a) => run(ExperimentKind::PercolationScan, a),
        Command::Badprobe(a) => run(ExperimentKind::Badprobe, a),
        Command::Chessboard(a) => run(ExperimentKind::Chessboard, a),
        Command::PolymerCheck(a) => run(ExperimentKind::PolymerCheck, a),
        Command::PlotData(a) => emit_plot_data(&a.inputs, &a.out).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
            true
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            error!("{e}");
            eprintln!("rotor-gibbs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
