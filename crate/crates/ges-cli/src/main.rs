use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ges_cli::aggregate::{aggregate, collect_series};
use ges_cli::config::{ExperimentConfig, RawConfig, KNOWN_KEYS};
use ges_cli::experiment::run_experiment;
use ges_cli::gradcheck::grad_check;
use ges_cli::sweep::{run_sweep, Grid};
use ges_cli::CliError;

#[derive(Parser)]
#[command(
    name = "ges",
    version,
    about = "Policy search with evolution strategies guided by differentiable simulators",
    after_long_help = key_reference()
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file, one CSV per seed.
    Run {
        /// Experiment config file (key = value lines).
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed list, e.g. 1,2,3.
        #[arg(long)]
        seed_list: Option<String>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override any config key, e.g. --set ges.alpha=0.3 (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Aggregate seed CSVs from run directories into quantile/CI curves.
    Aggregate {
        /// Run directories containing seed_*.csv files.
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check simulator gradients against central finite differences.
    GradCheck {
        /// Simulator to check: pendulum | mass-spring.
        #[arg(long)]
        experiment: String,
        /// Comma-separated finite-difference steps.
        #[arg(long, default_value = "1e-4,1e-5,1e-6")]
        steps: String,
        /// Seed for the probed parameter vector and coordinates.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of sampled coordinates per check.
        #[arg(long, default_value_t = 12)]
        coords: usize,
        /// Optional config file with simulator overrides.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Cartesian-product hyperparameter sweep from a grid file.
    Sweep {
        /// Grid file: config syntax where values may be comma lists.
        #[arg(long)]
        grid: PathBuf,
        /// Output directory for combo runs and the ranking.
        #[arg(long)]
        out: PathBuf,
    },
}

fn key_reference() -> String {
    let mut out = String::from("Configuration keys:\n");
    for (key, doc) in KNOWN_KEYS {
        out.push_str(&format!("  {key:<22} {doc}\n"));
    }
    out
}

fn init_threads() {
    if let Ok(value) = std::env::var("THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            if n >= 1 {
                // Ignore failure: the global pool may already exist in tests.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            seed_list,
            out,
            overrides,
        } => {
            let mut raw = RawConfig::from_file(&config)?;
            for spec in &overrides {
                raw.apply_override(spec)?;
            }
            if let Some(seeds) = seed_list {
                raw.set("seeds", &seeds, "cli");
            }
            if let Some(dir) = out {
                raw.set("out", &dir.display().to_string(), "cli");
            }
            let cfg = ExperimentConfig::resolve(&raw)?;
            let dir = run_experiment(&cfg)?;
            println!("run complete: {}", dir.display());
            Ok(())
        }
        Command::Aggregate { dirs, out } => {
            let series = collect_series(&dirs)?;
            let result = aggregate(&series)?;
            if result.resampled {
                eprintln!(
                    "note: input episode grids differ; resampled to the coarsest grid with best-cost carry-forward"
                );
            }
            std::fs::write(&out, &result.csv)
                .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", out.display())))?;
            println!("aggregate written: {}", out.display());
            Ok(())
        }
        Command::GradCheck {
            experiment,
            steps,
            seed,
            coords,
            config,
        } => {
            let raw = match config {
                Some(path) => RawConfig::from_file(&path)?,
                None => {
                    // Simulator checks need no experiment key of their own.
                    let placeholder = if experiment == "mass-spring" {
                        "experiment = mass-spring-naive\n"
                    } else {
                        "experiment = pendulum-gap\n"
                    };
                    RawConfig::from_text(placeholder, "default")?
                }
            };
            let cfg = ExperimentConfig::resolve(&raw)?;
            let steps: Vec<f64> = steps
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::config(format!("bad step `{s}`")))
                })
                .collect::<Result<_, _>>()?;
            let report = grad_check(&cfg, &experiment, &steps, seed, coords)?;
            print!("{}", report.render());
            let worst = report.worst_smooth_error();
            if worst > 1e-3 {
                return Err(CliError::check(format!(
                    "smooth-regime gradient error {worst:.3e} exceeds 1e-3"
                )));
            }
            println!("gradient check passed (worst smooth-regime error {worst:.3e})");
            Ok(())
        }
        Command::Sweep { grid, out } => {
            let grid = Grid::from_file(&grid)?;
            let cap = grid
                .base
                .iter()
                .find(|(k, _)| k == "sweep.cap")
                .map(|(_, v)| v.parse::<usize>().unwrap_or(256))
                .unwrap_or(256);
            let result = run_sweep(&grid, &out, cap)?;
            let best = &result.ranked[0];
            println!(
                "sweep complete: {} configurations, best combo {} (median final best cost {})",
                result.ranked.len(),
                best.combo_index,
                best.median_final_best
            );
            println!("ranking: {}", out.join("ranked.csv").display());
            println!("best config: {}", out.join("best_config.conf").display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
