//! Evolution strategies: the guided estimator with its structured
//! perturbations, plus isotropic and CMA-ES baselines and the training
//! loops built on them.

mod cma;
mod runner;
mod subspace;

pub use cma::{cma_ask, cma_tell, default_lambda, CmaState};
pub use runner::{
    cma_run, first_order_run, guided_es_run, sim_guided_real_run, vanilla_es_run, RunOutput,
    RunRecord, SurrogateStep,
};
pub use subspace::{GuidingSubspace, SubspaceUpdate};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParamVector;

/// Guided-ES search hyperparameters. `alpha` in [0, 1] trades the isotropic
/// part of the search covariance against the guiding subspace:
/// Sigma = (alpha/n) I + ((1-alpha)/k) U U^T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GesConfig {
    pub alpha: f64,
    pub sigma: f64,
    pub beta: f64,
    /// Antithetic pairs per iteration; one iteration costs 2 * population
    /// objective episodes.
    pub population: usize,
    /// Guiding subspace capacity.
    pub k: usize,
    /// Replace raw losses by centered ranks in the estimator. Off by
    /// default: the raw antithetic difference is the reference estimator.
    pub fitness_shaping: bool,
}

impl Default for GesConfig {
    fn default() -> Self {
        GesConfig {
            alpha: 0.5,
            sigma: 0.1,
            beta: 2.0,
            population: 8,
            k: 1,
            fitness_shaping: false,
        }
    }
}

impl GesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!(
                "ges.alpha must be in [0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidConfig("ges.sigma must be > 0".into()));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidConfig("ges.beta must be > 0".into()));
        }
        if self.population == 0 {
            return Err(Error::InvalidConfig("ges.pop must be >= 1".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("ges.k must be >= 1".into()));
        }
        Ok(())
    }
}

/// One iteration's worth of perturbations and their antithetic loss pairs.
#[derive(Debug, Clone)]
pub struct PerturbationBatch {
    pub epsilons: Vec<ParamVector>,
    /// (f(theta + eps_i), f(theta - eps_i)) per perturbation.
    pub losses: Vec<(f64, f64)>,
}

/// Draw one perturbation eps ~ N(0, sigma^2 Sigma) without forming Sigma:
/// eps = sigma * (sqrt(alpha/n) xi_full + sqrt((1-alpha)/k_eff) U xi_sub).
///
/// With an empty subspace (or alpha = 1) the draw degenerates to the
/// isotropic N(0, sigma^2/n I) and consumes exactly n normals, so a guided
/// run at alpha = 1 is bit-identical to the isotropic baseline on the same
/// stream.
pub fn sample_perturbation(
    sub: &GuidingSubspace,
    cfg: &GesConfig,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> ParamVector {
    let k_eff = sub.k_eff();
    // Before the first surrogate arrives the subspace is empty and the draw
    // is fully isotropic (alpha treated as 1).
    let alpha = if k_eff == 0 { 1.0 } else { cfg.alpha };
    let full_scale = cfg.sigma * (alpha / n as f64).sqrt();
    let mut eps: Vec<f64> = (0..n)
        .map(|_| full_scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    if alpha < 1.0 && k_eff > 0 {
        let sub_scale = cfg.sigma * ((1.0 - alpha) / k_eff as f64).sqrt();
        for basis in sub.basis() {
            let xi: f64 = rng.sample(StandardNormal);
            let w = sub_scale * xi;
            for (e, b) in eps.iter_mut().zip(basis.iter()) {
                *e += w * b;
            }
        }
    }
    ParamVector::new(eps)
}

/// The antithetic estimator:
/// g = beta / (2 sigma^2 P) * sum_i eps_i * (f(theta+eps_i) - f(theta-eps_i)).
pub fn ges_gradient_estimate(batch: &PerturbationBatch, cfg: &GesConfig) -> Result<ParamVector> {
    debug_assert_eq!(batch.epsilons.len(), batch.losses.len());
    for (i, (plus, minus)) in batch.losses.iter().enumerate() {
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFiniteLoss { index: i });
        }
    }
    let p = batch.epsilons.len();
    let n = batch.epsilons.first().map(|e| e.len()).unwrap_or(0);
    let scale = cfg.beta / (2.0 * cfg.sigma * cfg.sigma * p as f64);

    let diffs: Vec<f64> = if cfg.fitness_shaping {
        shaped_differences(&batch.losses)
    } else {
        batch.losses.iter().map(|(a, b)| a - b).collect()
    };

    let mut g = ParamVector::zeros(n);
    for (eps, diff) in batch.epsilons.iter().zip(diffs.iter()) {
        g.axpy(eps, scale * diff);
    }
    Ok(g)
}

/// Centered-rank transform over the 2P losses, then recombined into
/// per-pair differences.
fn shaped_differences(losses: &[(f64, f64)]) -> Vec<f64> {
    let mut flat: Vec<(f64, usize)> = Vec::with_capacity(losses.len() * 2);
    for (i, (plus, minus)) in losses.iter().enumerate() {
        flat.push((*plus, 2 * i));
        flat.push((*minus, 2 * i + 1));
    }
    flat.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = flat.len();
    let mut shaped = vec![0.0; m];
    for (rank, &(_, idx)) in flat.iter().enumerate() {
        shaped[idx] = if m > 1 {
            rank as f64 / (m - 1) as f64 - 0.5
        } else {
            0.0
        };
    }
    (0..losses.len())
        .map(|i| shaped[2 * i] - shaped[2 * i + 1])
        .collect()
}

/// The isotropic baseline estimator: identical code path with Sigma = I/n,
/// i.e. the guided estimator at alpha = 1 with no subspace.
pub fn vanilla_es_gradient(batch: &PerturbationBatch, sigma: f64, beta: f64) -> Result<ParamVector> {
    let cfg = GesConfig {
        alpha: 1.0,
        sigma,
        beta,
        population: batch.epsilons.len().max(1),
        k: 1,
        fitness_shaping: false,
    };
    ges_gradient_estimate(batch, &cfg)
}
