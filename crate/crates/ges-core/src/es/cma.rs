//! Full-covariance (mu/mu_w, lambda) CMA-ES baseline: weighted recombination,
//! rank-one plus rank-mu covariance update, cumulative step-size adaptation.
//! Search dimensions stay in the low hundreds here, so the eigensystem is
//! refreshed every generation with a cyclic Jacobi sweep.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::params::ParamVector;

const MAX_CONDITION: f64 = 1e14;

/// Default population size: 4 + floor(3 ln n).
pub fn default_lambda(n: usize) -> usize {
    4 + (3.0 * (n as f64).ln()).floor() as usize
}

#[derive(Debug, Clone)]
pub struct CmaState {
    pub mean: ParamVector,
    pub sigma: f64,
    n: usize,
    lambda: usize,
    mu: usize,
    weights: Vec<f64>,
    mu_eff: f64,
    c_sigma: f64,
    d_sigma: f64,
    c_c: f64,
    c_1: f64,
    c_mu: f64,
    chi_n: f64,
    cov: Vec<Vec<f64>>,
    p_sigma: Vec<f64>,
    p_c: Vec<f64>,
    /// Eigenvectors of cov, one column per eigenvalue.
    eig_vectors: Vec<Vec<f64>>,
    /// Square roots of the (clamped) eigenvalues.
    eig_sqrt: Vec<f64>,
    generation: u64,
    /// Times the eigenvalue clamp fired.
    pub recondition_count: u64,
}

impl CmaState {
    pub fn new(mean: ParamVector, sigma: f64, lambda: usize) -> Result<Self> {
        let n = mean.len();
        if n == 0 {
            return Err(Error::InvalidConfig("cma: empty mean".into()));
        }
        if lambda < 4 {
            return Err(Error::InvalidConfig(format!(
                "cma: lambda must be >= 4, got {lambda}"
            )));
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidConfig("cma: sigma0 must be > 0".into()));
        }
        let mu = lambda / 2;
        let mut weights: Vec<f64> = (0..mu)
            .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - ((i + 1) as f64).ln())
            .collect();
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let nf = n as f64;
        let c_sigma = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
        let c_1 = 2.0 / ((nf + 1.3).powi(2) + mu_eff);
        let c_mu = (2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0).powi(2) + mu_eff))
            .min(1.0 - c_1);
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));

        let mut cov = vec![vec![0.0; n]; n];
        let mut eig_vectors = vec![vec![0.0; n]; n];
        for i in 0..n {
            cov[i][i] = 1.0;
            eig_vectors[i][i] = 1.0;
        }

        Ok(CmaState {
            mean,
            sigma,
            n,
            lambda,
            mu,
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            chi_n,
            cov,
            p_sigma: vec![0.0; n],
            p_c: vec![0.0; n],
            eig_vectors,
            eig_sqrt: vec![1.0; n],
            generation: 0,
            recondition_count: 0,
        })
    }

    pub fn with_default_lambda(mean: ParamVector, sigma: f64) -> Result<Self> {
        let lambda = default_lambda(mean.len());
        CmaState::new(mean, sigma, lambda)
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Smallest and largest covariance eigenvalues (after clamping).
    pub fn eigen_range(&self) -> (f64, f64) {
        let lo = self.eig_sqrt.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.eig_sqrt.iter().cloned().fold(0.0f64, f64::max);
        (lo * lo, hi * hi)
    }

    fn sample_candidate(&self, rng: &mut ChaCha8Rng) -> ParamVector {
        // x = mean + sigma * B D z.
        let z: Vec<f64> = (0..self.n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let mut x = self.mean.clone();
        for j in 0..self.n {
            let w = self.sigma * self.eig_sqrt[j] * z[j];
            for i in 0..self.n {
                x[i] += w * self.eig_vectors[i][j];
            }
        }
        x
    }
}

/// Sample a generation of candidates.
pub fn cma_ask(state: &CmaState, lambda: usize, rng: &mut ChaCha8Rng) -> Result<Vec<ParamVector>> {
    if lambda != state.lambda {
        return Err(Error::InvalidConfig(format!(
            "cma: ask lambda {lambda} does not match configured {}",
            state.lambda
        )));
    }
    Ok((0..lambda).map(|_| state.sample_candidate(rng)).collect())
}

/// Rank the candidates by loss and apply the standard mean, path and
/// covariance updates.
pub fn cma_tell(state: &mut CmaState, candidates: &[ParamVector], losses: &[f64]) -> Result<()> {
    if candidates.len() != state.lambda || losses.len() != state.lambda {
        return Err(Error::DimensionMismatch {
            context: "cma tell",
            expected: state.lambda,
            actual: candidates.len().min(losses.len()),
        });
    }
    for (i, l) in losses.iter().enumerate() {
        if !l.is_finite() {
            return Err(Error::NonFiniteLoss { index: i });
        }
    }
    let n = state.n;
    let nf = n as f64;

    let mut order: Vec<usize> = (0..state.lambda).collect();
    order.sort_by(|&a, &b| losses[a].total_cmp(&losses[b]).then(a.cmp(&b)));

    // y_i = (x_i - mean) / sigma for the selected candidates.
    let old_mean = state.mean.clone();
    let selected: Vec<Vec<f64>> = order[..state.mu]
        .iter()
        .map(|&idx| {
            (0..n)
                .map(|i| (candidates[idx][i] - old_mean[i]) / state.sigma)
                .collect()
        })
        .collect();

    let mut y_w = vec![0.0; n];
    for (w, y) in state.weights.iter().zip(selected.iter()) {
        for i in 0..n {
            y_w[i] += w * y[i];
        }
    }

    for i in 0..n {
        state.mean[i] = old_mean[i] + state.sigma * y_w[i];
    }

    // C^{-1/2} y_w = B D^{-1} B^T y_w.
    let mut bty = vec![0.0; n];
    for j in 0..n {
        let mut acc = 0.0;
        for i in 0..n {
            acc += state.eig_vectors[i][j] * y_w[i];
        }
        bty[j] = acc / state.eig_sqrt[j];
    }
    let mut c_inv_sqrt_yw = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += state.eig_vectors[i][j] * bty[j];
        }
        c_inv_sqrt_yw[i] = acc;
    }

    let cs = state.c_sigma;
    let path_scale = (cs * (2.0 - cs) * state.mu_eff).sqrt();
    for i in 0..n {
        state.p_sigma[i] = (1.0 - cs) * state.p_sigma[i] + path_scale * c_inv_sqrt_yw[i];
    }
    let p_sigma_norm = state.p_sigma.iter().map(|v| v * v).sum::<f64>().sqrt();

    state.generation += 1;
    let expected = (1.0 - (1.0 - cs).powi(2 * state.generation as i32)).sqrt();
    let h_sigma = if p_sigma_norm / expected < (1.4 + 2.0 / (nf + 1.0)) * state.chi_n {
        1.0
    } else {
        0.0
    };

    let cc = state.c_c;
    let pc_scale = (cc * (2.0 - cc) * state.mu_eff).sqrt();
    for i in 0..n {
        state.p_c[i] = (1.0 - cc) * state.p_c[i] + h_sigma * pc_scale * y_w[i];
    }

    // Covariance: rank-one on p_c plus rank-mu on the selected steps.
    let delta_h = (1.0 - h_sigma) * cc * (2.0 - cc);
    let decay = 1.0 - state.c_1 - state.c_mu + state.c_1 * delta_h;
    for i in 0..n {
        for j in 0..=i {
            let mut v = decay * state.cov[i][j] + state.c_1 * state.p_c[i] * state.p_c[j];
            for (w, y) in state.weights.iter().zip(selected.iter()) {
                v += state.c_mu * w * y[i] * y[j];
            }
            state.cov[i][j] = v;
            state.cov[j][i] = v;
        }
    }

    state.sigma *= ((cs / state.d_sigma) * (p_sigma_norm / state.chi_n - 1.0)).exp();

    refresh_eigensystem(state);
    Ok(())
}

/// Recompute B and D from cov, clamping the condition number at 1e14 (the
/// clamp rewrites cov so the state stays consistent).
fn refresh_eigensystem(state: &mut CmaState) {
    let n = state.n;
    let (mut values, vectors) = jacobi_eigen(&state.cov);

    let max_val = values.iter().cloned().fold(f64::MIN, f64::max).max(1e-300);
    let floor = max_val / MAX_CONDITION;
    let mut clamped = false;
    for v in &mut values {
        if *v < floor {
            *v = floor;
            clamped = true;
        }
    }
    if clamped {
        state.recondition_count += 1;
        for i in 0..n {
            for j in 0..=i {
                let mut acc = 0.0;
                for (k, val) in values.iter().enumerate() {
                    acc += vectors[i][k] * val * vectors[j][k];
                }
                state.cov[i][j] = acc;
                state.cov[j][i] = acc;
            }
        }
    }
    state.eig_vectors = vectors;
    state.eig_sqrt = values.iter().map(|v| v.sqrt()).collect();
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns the
/// eigenvalues and the matrix whose columns are the eigenvectors.
fn jacobi_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let diag_norm: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-14 * diag_norm {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    (values, v)
}
