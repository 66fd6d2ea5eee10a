//! Experiment wiring and the run artifact layout: one CSV per seed plus an
//! atomically written manifest echoing the resolved configuration.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use ges_core::{
    cma_run, first_order_run, guided_es_run, init_params, ms_rollout, ms_rollout_grad,
    pendulum_rollout, pendulum_rollout_grad, perturb_spec, sim_guided_real_run, vanilla_es_run,
    ParamVector, RunOutput, RunRecord, SurrogateStep,
};

use crate::config::{Algorithm, Experiment, ExperimentConfig};
use crate::CliError;

/// Fixed run CSV schema; the column order is part of the output contract.
pub const CSV_HEADER: &str = "iteration,episodes,cost,best_cost,wall_ms,seed";
pub const CSV_SCHEMA_VERSION: &str = "1";

pub fn seed_csv_name(seed: u64) -> String {
    format!("seed_{seed}.csv")
}

pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.iteration, r.episodes_used, r.cost, r.best_cost, r.wall_ms, r.seed
        ));
    }
    out
}

#[derive(Debug, Serialize)]
struct SeedSummary {
    seed: u64,
    iterations: usize,
    episodes: u64,
    drs_rollouts: u64,
    final_best_cost: f64,
    warnings: usize,
    failure: Option<String>,
}

#[derive(Debug, Serialize)]
struct Manifest {
    version: String,
    csv_schema: String,
    csv_header: String,
    config: BTreeMap<String, String>,
    seeds: Vec<SeedSummary>,
}

/// Run every seed of the experiment, writing artifacts under the output
/// directory. Per-seed CSVs survive mid-run failures; the error reported is
/// the first failing seed's.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&cfg.output_dir).map_err(|e| {
        CliError::config(format!(
            "cannot create output dir {}: {e}",
            cfg.output_dir.display()
        ))
    })?;

    let outputs: Vec<(u64, Result<RunOutput, CliError>)> = cfg
        .seeds
        .par_iter()
        .map(|&seed| (seed, run_seed(cfg, seed)))
        .collect();

    let mut summaries = Vec::with_capacity(outputs.len());
    let mut first_error: Option<CliError> = None;
    for (seed, result) in outputs {
        match result {
            Ok(out) => {
                let csv = records_to_csv(&out.records);
                let path = cfg.output_dir.join(seed_csv_name(seed));
                fs::write(&path, csv).map_err(|e| {
                    CliError::runtime(format!("cannot write {}: {e}", path.display()))
                })?;
                for w in &out.warnings {
                    eprintln!("seed {seed}: warning: {w}");
                }
                let failure = out.failure.as_ref().map(|e| e.to_string());
                if let Some(f) = &failure {
                    eprintln!("seed {seed}: failed: {f}");
                    if first_error.is_none() {
                        first_error = Some(CliError::runtime(format!("seed {seed}: {f}")));
                    }
                }
                summaries.push(SeedSummary {
                    seed,
                    iterations: out.records.len(),
                    episodes: out.records.last().map(|r| r.episodes_used).unwrap_or(0),
                    drs_rollouts: out.drs_rollouts,
                    final_best_cost: out.final_best_cost(),
                    warnings: out.warnings.len(),
                    failure,
                });
            }
            Err(e) => {
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        csv_schema: CSV_SCHEMA_VERSION.to_string(),
        csv_header: CSV_HEADER.to_string(),
        config: cfg.echo.clone(),
        seeds: summaries,
    };
    write_manifest(&cfg.output_dir, &manifest)?;

    match first_error {
        None => Ok(cfg.output_dir.clone()),
        Some(e) => Err(e),
    }
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), CliError> {
    let body = serde_json::to_string_pretty(manifest)
        .map_err(|e| CliError::runtime(format!("manifest serialization: {e}")))?;
    let tmp = dir.join("manifest.json.tmp");
    let path = dir.join("manifest.json");
    {
        let mut f = fs::File::create(&tmp)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", tmp.display())))?;
        f.write_all(body.as_bytes())
            .and_then(|_| f.write_all(b"\n"))
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", tmp.display())))?;
    }
    fs::rename(&tmp, &path)
        .map_err(|e| CliError::runtime(format!("cannot rename manifest: {e}")))?;
    Ok(())
}

/// One seed of the configured (experiment, algorithm) pair.
pub fn run_seed(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput, CliError> {
    match cfg.experiment {
        Experiment::PendulumGap => run_pendulum_seed(cfg, seed),
        Experiment::MassSpringNaive => run_mass_spring_seed(cfg, seed),
        Experiment::SyntheticQuadratic => run_synthetic_seed(cfg, seed),
    }
}

fn run_pendulum_seed(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput, CliError> {
    let nominal = cfg.pendulum;
    let real = perturb_spec(&nominal, &cfg.gap, cfg.gap_seed).map_err(CliError::from_core)?;
    let mlp = cfg.policy().expect("pendulum policy");
    let n = mlp.total_param_count();
    let groups = mlp.param_groups();
    let theta0 = init_params(&mlp, seed);
    let episode_ms = cfg.episode_ms();

    let f_real = |x: &ParamVector| pendulum_rollout(&real, &mlp, x).map(|r| r.cost);
    let drs = |x: &ParamVector| {
        pendulum_rollout_grad(&nominal, &mlp, x).map(|r| (r.cost, r.grad.unwrap()))
    };

    let out = match cfg.algorithm {
        Algorithm::GuidedEs => {
            let mut opt_real = cfg.opt.build(n, groups.clone())?;
            let opt_sim = cfg.opt_sim.build(n, groups)?;
            sim_guided_real_run(
                &f_real,
                &drs,
                theta0,
                &cfg.ges,
                &mut opt_real,
                &opt_sim,
                cfg.t_sim,
                cfg.budget,
                seed,
                episode_ms,
            )
        }
        Algorithm::VanillaEs => {
            let mut opt = cfg.opt.build(n, groups)?;
            vanilla_es_run(&f_real, theta0, &cfg.ges, &mut opt, cfg.budget, seed, episode_ms)
        }
        Algorithm::CmaEs => cma_run(
            &f_real,
            theta0,
            cfg.cma_sigma0,
            cfg.cma_lambda,
            cfg.budget,
            seed,
            episode_ms,
        ),
        Algorithm::FirstOrder => {
            // Descend the nominal simulator, spend the budget measuring the
            // transferred policy on the real system.
            let mut opt = cfg.opt.build(n, groups)?;
            let eval = |x: &ParamVector| {
                let (_, grad) = drs(x)?;
                let real_cost = f_real(x)?;
                Ok((real_cost, grad))
            };
            first_order_run(&eval, theta0, &mut opt, cfg.budget, seed, episode_ms)
        }
    };
    Ok(out)
}

fn run_mass_spring_seed(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput, CliError> {
    let spec = cfg.mass_spring.clone();
    let mlp = cfg.policy().expect("mass-spring policy");
    let n = mlp.total_param_count();
    let groups = mlp.param_groups();
    let theta0 = init_params(&mlp, seed);
    let episode_ms = cfg.episode_ms();

    let f = |x: &ParamVector| ms_rollout(&spec, &mlp, x).map(|r| r.cost);
    let fg = |x: &ParamVector| ms_rollout_grad(&spec, &mlp, x).map(|r| (r.cost, r.grad.unwrap()));

    let out = match cfg.algorithm {
        Algorithm::GuidedEs => {
            // The naive simulator gradient of the objective itself is the
            // surrogate.
            let mut opt = cfg.opt.build(n, groups)?;
            let surrogate = |x: &ParamVector| match fg(x) {
                Ok((_, grad)) => SurrogateStep {
                    direction: Some(grad),
                    drs_rollouts: 1,
                    warning: None,
                },
                Err(e) => SurrogateStep {
                    direction: None,
                    drs_rollouts: 1,
                    warning: Some(format!("surrogate rollout failed: {e}")),
                },
            };
            guided_es_run(
                &f,
                surrogate,
                theta0,
                &cfg.ges,
                &mut opt,
                cfg.budget,
                seed,
                episode_ms,
            )
        }
        Algorithm::VanillaEs => {
            let mut opt = cfg.opt.build(n, groups)?;
            vanilla_es_run(&f, theta0, &cfg.ges, &mut opt, cfg.budget, seed, episode_ms)
        }
        Algorithm::CmaEs => cma_run(
            &f,
            theta0,
            cfg.cma_sigma0,
            cfg.cma_lambda,
            cfg.budget,
            seed,
            episode_ms,
        ),
        Algorithm::FirstOrder => {
            let mut opt = cfg.opt.build(n, groups)?;
            first_order_run(&fg, theta0, &mut opt, cfg.budget, seed, episode_ms)
        }
    };
    Ok(out)
}

fn run_synthetic_seed(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput, CliError> {
    let q = cfg.quadratic;
    let rot = cfg.quad_rot_deg;
    let n = q.dim;
    let theta0 = q.initial_point(seed);
    let groups = vec![0..n];

    let f = |x: &ParamVector| Ok(q.cost(x));
    let fg = |x: &ParamVector| Ok((q.cost(x), q.rotated_grad(x, rot, seed)));

    let out = match cfg.algorithm {
        Algorithm::GuidedEs => {
            let mut opt = cfg.opt.build(n, groups)?;
            let surrogate = |x: &ParamVector| SurrogateStep {
                direction: Some(q.rotated_grad(x, rot, seed)),
                drs_rollouts: 1,
                warning: None,
            };
            guided_es_run(&f, surrogate, theta0, &cfg.ges, &mut opt, cfg.budget, seed, 0.0)
        }
        Algorithm::VanillaEs => {
            let mut opt = cfg.opt.build(n, groups)?;
            vanilla_es_run(&f, theta0, &cfg.ges, &mut opt, cfg.budget, seed, 0.0)
        }
        Algorithm::CmaEs => cma_run(
            &f,
            theta0,
            cfg.cma_sigma0,
            cfg.cma_lambda,
            cfg.budget,
            seed,
            0.0,
        ),
        Algorithm::FirstOrder => {
            let mut opt = cfg.opt.build(n, groups)?;
            first_order_run(&fg, theta0, &mut opt, cfg.budget, seed, 0.0)
        }
    };
    Ok(out)
}
