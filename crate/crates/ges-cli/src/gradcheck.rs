//! Validation of the simulator gradients: central finite differences on
//! sampled coordinates against the adjoint sweep, per requested step size.

use rand::seq::index::sample;

use ges_core::rng::{substream, tag};
use ges_core::{
    init_params, ms_rollout, ms_rollout_grad, pendulum_rollout, pendulum_rollout_grad,
    MassSpringSpec, MlpSpec, ParamVector,
};

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Debug, Clone)]
pub struct RegimeReport {
    pub regime: &'static str,
    pub smooth: bool,
    /// (step, max relative error, median relative error)
    pub rows: Vec<(f64, f64, f64)>,
}

#[derive(Debug)]
pub struct GradCheckReport {
    pub regimes: Vec<RegimeReport>,
}

impl GradCheckReport {
    /// Smallest max-error over the probed steps, per smooth regime.
    pub fn worst_smooth_error(&self) -> f64 {
        self.regimes
            .iter()
            .filter(|r| r.smooth)
            .map(|r| {
                r.rows
                    .iter()
                    .map(|(_, max, _)| *max)
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for regime in &self.regimes {
            out.push_str(&format!(
                "{} ({})\n",
                regime.regime,
                if regime.smooth {
                    "smooth: gated"
                } else {
                    "non-smooth: informational"
                }
            ));
            out.push_str("  step        max_rel_err   median_rel_err\n");
            for (step, max, med) in &regime.rows {
                out.push_str(&format!("  {step:<10.1e}  {max:<12.3e}  {med:<12.3e}\n"));
            }
        }
        out
    }
}

fn check_coords(
    f: &dyn Fn(&ParamVector) -> f64,
    theta: &ParamVector,
    grad: &ParamVector,
    coords: &[usize],
    step: f64,
) -> (f64, f64) {
    let scale = grad.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    let floor = (1e-3 * scale).max(1e-12);
    // Differences cannot resolve slopes below round-off on the cost itself;
    // when both routes sit under that band they agree by construction.
    let f0 = f(theta);
    let negligible = 1e-9 * f0.abs().max(1.0);
    let mut errs: Vec<f64> = Vec::with_capacity(coords.len());
    let mut probe = theta.clone();
    for &i in coords {
        let orig = probe[i];
        probe[i] = orig + step;
        let hi = f(&probe);
        probe[i] = orig - step;
        let lo = f(&probe);
        probe[i] = orig;
        let fd = (hi - lo) / (2.0 * step);
        let err = if grad[i].abs() <= negligible && fd.abs() <= negligible {
            0.0
        } else {
            (grad[i] - fd).abs() / grad[i].abs().max(fd.abs()).max(floor)
        };
        errs.push(err);
    }
    errs.sort_by(f64::total_cmp);
    let max = *errs.last().unwrap_or(&0.0);
    let median = errs.get(errs.len() / 2).copied().unwrap_or(0.0);
    (max, median)
}

fn sample_coords(n: usize, count: usize, seed: u64, regime: u64) -> Vec<usize> {
    let mut rng = substream(seed, &[tag::GRADCHECK, regime]);
    let count = count.min(n);
    let mut coords = sample(&mut rng, n, count).into_vec();
    coords.sort_unstable();
    coords
}

/// Run the gradient check for one experiment's simulators.
pub fn grad_check(
    cfg: &ExperimentConfig,
    experiment: &str,
    steps: &[f64],
    seed: u64,
    coords: usize,
) -> Result<GradCheckReport, CliError> {
    if steps.is_empty() {
        return Err(CliError::config("grad-check needs at least one step size"));
    }
    let mut regimes = Vec::new();
    match experiment {
        "pendulum" => {
            let spec = cfg.pendulum;
            let mlp = MlpSpec::tanh_policy(spec.obs_dim(), cfg.policy_hidden, 1);
            let theta = init_params(&mlp, seed);
            let grad = pendulum_rollout_grad(&spec, &mlp, &theta)
                .map_err(CliError::from_core)?
                .grad
                .unwrap();
            let f = |x: &ParamVector| pendulum_rollout(&spec, &mlp, x).unwrap().cost;
            let idx = sample_coords(theta.len(), coords, seed, 0);
            let rows = steps
                .iter()
                .map(|&s| {
                    let (max, med) = check_coords(&f, &theta, &grad, &idx, s);
                    (s, max, med)
                })
                .collect();
            regimes.push(RegimeReport {
                regime: "pendulum full episode",
                smooth: true,
                rows,
            });
        }
        "mass-spring" => {
            // Contact-free regime: airborne robot, short horizon. Internal
            // forces cannot move the center of mass, so both routes must
            // agree on a (near-)zero gradient.
            let mut airborne = cfg.mass_spring.clone();
            for m in &mut airborne.masses {
                m.pos[1] += 1.0;
            }
            airborne.horizon = airborne.horizon.min(60);
            regimes.push(ms_regime(
                "mass-spring contact-free",
                true,
                &airborne,
                cfg.policy_hidden,
                steps,
                seed,
                coords,
                1,
            )?);

            // Full episode with contacts: reported, expected not to match.
            regimes.push(ms_regime(
                "mass-spring with contacts",
                false,
                &cfg.mass_spring,
                cfg.policy_hidden,
                steps,
                seed,
                coords,
                2,
            )?);
        }
        other => {
            return Err(CliError::config(format!(
                "grad-check supports `pendulum` and `mass-spring`, got `{other}`"
            )))
        }
    }
    Ok(GradCheckReport { regimes })
}

#[allow(clippy::too_many_arguments)]
fn ms_regime(
    name: &'static str,
    smooth: bool,
    spec: &MassSpringSpec,
    hidden: usize,
    steps: &[f64],
    seed: u64,
    coords: usize,
    regime_tag: u64,
) -> Result<RegimeReport, CliError> {
    let mlp = MlpSpec::tanh_policy(spec.control_features, hidden, spec.actuated_count());
    let theta = init_params(&mlp, seed);
    let grad = ms_rollout_grad(spec, &mlp, &theta)
        .map_err(CliError::from_core)?
        .grad
        .unwrap();
    let f = |x: &ParamVector| ms_rollout(spec, &mlp, x).unwrap().cost;
    let idx = sample_coords(theta.len(), coords, seed, regime_tag);
    let rows = steps
        .iter()
        .map(|&s| {
            let (max, med) = check_coords(&f, &theta, &grad, &idx, s);
            (s, max, med)
        })
        .collect();
    Ok(RegimeReport {
        regime: name,
        smooth,
        rows,
    })
}
