//! Training loops: the guided strategy, its isotropic reduction, the CMA-ES
//! baseline, plain first-order descent, and the transfer loop that distills
//! a guiding direction from inner simulator descent.
//!
//! Budgets count objective (episode) evaluations only; surrogate rollouts
//! are metered separately. Perturbation `i` of iteration `t` always draws
//! from the substream keyed by `(seed, t, i)`, so results are bit-identical
//! at any parallelism degree.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::es::{
    cma_ask, cma_tell, ges_gradient_estimate, sample_perturbation, CmaState, GesConfig,
    GuidingSubspace, PerturbationBatch, SubspaceUpdate,
};
use crate::optim::Optimizer;
use crate::params::ParamVector;
use crate::rng::{substream, tag};

/// One per-iteration log row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRecord {
    pub iteration: u64,
    /// Cumulative budgeted episodes after this iteration.
    pub episodes_used: u64,
    /// Cost statistic for this iteration: the mean over the episodes it
    /// evaluated (antithetic batch, generation, or single descent episode).
    pub cost: f64,
    /// Best episode cost observed so far; non-increasing.
    pub best_cost: f64,
    /// Cumulative system time spent on budgeted episodes, in milliseconds
    /// (episodes * episode duration); deterministic by construction.
    pub wall_ms: u64,
    pub seed: u64,
}

/// Everything a runner produces: the per-iteration log, the final solution,
/// surrogate-rollout metering, surfaced warnings, and the failure that ended
/// the run early, if any. Partial logs are always preserved.
#[derive(Debug)]
pub struct RunOutput {
    pub records: Vec<RunRecord>,
    pub final_params: ParamVector,
    pub drs_rollouts: u64,
    pub warnings: Vec<String>,
    pub failure: Option<Error>,
}

impl RunOutput {
    pub fn final_best_cost(&self) -> f64 {
        self.records
            .last()
            .map(|r| r.best_cost)
            .unwrap_or(f64::INFINITY)
    }

    /// Episodes consumed when `best_cost` first dropped to `threshold` or
    /// below; `None` if it never did.
    pub fn episodes_to_threshold(&self, threshold: f64) -> Option<u64> {
        self.records
            .iter()
            .find(|r| r.best_cost <= threshold)
            .map(|r| r.episodes_used)
    }
}

/// What a surrogate oracle returns for one outer iteration.
#[derive(Debug)]
pub struct SurrogateStep {
    /// Guiding direction for the subspace; `None` skips the update.
    pub direction: Option<ParamVector>,
    /// Simulator rollouts spent producing it (not budgeted).
    pub drs_rollouts: u64,
    pub warning: Option<String>,
}

impl SurrogateStep {
    pub fn none() -> Self {
        SurrogateStep {
            direction: None,
            drs_rollouts: 0,
            warning: None,
        }
    }
}

struct LoopState {
    records: Vec<RunRecord>,
    episodes: u64,
    best: f64,
    warnings: Vec<String>,
    drs_rollouts: u64,
    episode_ms: f64,
    seed: u64,
}

impl LoopState {
    fn new(seed: u64, episode_ms: f64) -> Self {
        LoopState {
            records: Vec::new(),
            episodes: 0,
            best: f64::INFINITY,
            warnings: Vec::new(),
            drs_rollouts: 0,
            episode_ms,
            seed,
        }
    }

    fn record(&mut self, iteration: u64, cost: f64) {
        self.records.push(RunRecord {
            iteration,
            episodes_used: self.episodes,
            cost,
            best_cost: self.best,
            wall_ms: (self.episodes as f64 * self.episode_ms).round() as u64,
            seed: self.seed,
        });
    }

    fn finish(self, final_params: ParamVector, failure: Option<Error>) -> RunOutput {
        RunOutput {
            records: self.records,
            final_params,
            drs_rollouts: self.drs_rollouts,
            warnings: self.warnings,
            failure,
        }
    }
}

/// The guided loop: fetch a surrogate direction, refresh the guiding
/// subspace, sample structured antithetic perturbations, estimate the
/// search gradient, and step the optimizer. Each iteration consumes
/// `2 * population` budgeted episodes.
pub fn guided_es_run<F, S>(
    objective: &F,
    mut surrogate: S,
    theta0: ParamVector,
    cfg: &GesConfig,
    opt: &mut Optimizer,
    budget: u64,
    seed: u64,
    episode_ms: f64,
) -> RunOutput
where
    F: Fn(&ParamVector) -> Result<f64> + Sync,
    S: FnMut(&ParamVector) -> SurrogateStep,
{
    if let Err(e) = cfg.validate() {
        return LoopState::new(seed, episode_ms).finish(theta0, Some(e));
    }
    let n = theta0.len();
    let per_iteration = 2 * cfg.population as u64;
    let mut state = LoopState::new(seed, episode_ms);
    let mut subspace = GuidingSubspace::new(cfg.k);
    let mut theta = theta0;
    let mut iteration = 0u64;

    while state.episodes + per_iteration <= budget {
        let step = surrogate(&theta);
        state.drs_rollouts += step.drs_rollouts;
        if let Some(w) = step.warning {
            state.warnings.push(format!("iteration {iteration}: {w}"));
        }
        if let Some(direction) = step.direction {
            if direction.is_finite() {
                if subspace.update(&direction) == SubspaceUpdate::IgnoredZeroGradient {
                    state
                        .warnings
                        .push(format!("iteration {iteration}: zero surrogate ignored"));
                }
            } else {
                state.warnings.push(format!(
                    "iteration {iteration}: non-finite surrogate skipped"
                ));
            }
        }

        let evals: Vec<Result<(ParamVector, f64, f64)>> = (0..cfg.population)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(seed, &[tag::PERTURBATION, iteration, i as u64]);
                let eps = sample_perturbation(&subspace, cfg, n, &mut rng);
                let plus = objective(&theta.add_scaled(&eps, 1.0))?;
                let minus = objective(&theta.add_scaled(&eps, -1.0))?;
                Ok((eps, plus, minus))
            })
            .collect();

        let mut batch = PerturbationBatch {
            epsilons: Vec::with_capacity(cfg.population),
            losses: Vec::with_capacity(cfg.population),
        };
        let mut failure = None;
        for result in evals {
            match result {
                Ok((eps, plus, minus)) => {
                    batch.epsilons.push(eps);
                    batch.losses.push((plus, minus));
                }
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failure {
            return state.finish(theta, Some(e));
        }

        let grad = match ges_gradient_estimate(&batch, cfg) {
            Ok(g) => g,
            Err(e) => return state.finish(theta, Some(e)),
        };

        state.episodes += per_iteration;
        let mut sum = 0.0;
        for (plus, minus) in &batch.losses {
            state.best = state.best.min(*plus).min(*minus);
            sum += plus + minus;
        }
        state.record(iteration, sum / per_iteration as f64);

        match opt.step(&theta, &grad) {
            Ok(next) => theta = next,
            Err(e) => return state.finish(theta, Some(e)),
        }
        iteration += 1;
    }
    state.finish(theta, None)
}

/// Isotropic antithetic baseline: the guided loop with alpha pinned to 1 and
/// no surrogate, sharing the exact code path (and therefore bit-identical to
/// a guided run at alpha = 1 under the same seed).
pub fn vanilla_es_run<F>(
    objective: &F,
    theta0: ParamVector,
    cfg: &GesConfig,
    opt: &mut Optimizer,
    budget: u64,
    seed: u64,
    episode_ms: f64,
) -> RunOutput
where
    F: Fn(&ParamVector) -> Result<f64> + Sync,
{
    let vanilla = GesConfig {
        alpha: 1.0,
        ..*cfg
    };
    guided_es_run(
        objective,
        |_: &ParamVector| SurrogateStep::none(),
        theta0,
        &vanilla,
        opt,
        budget,
        seed,
        episode_ms,
    )
}

/// Transfer loop: each outer iteration copies the current solution, runs
/// `t_sim` inner descent steps on the differentiable simulator, and feeds
/// the net displacement `theta_sim - theta` to the guided loop as the
/// surrogate direction. Inner divergence skips the surrogate for that
/// iteration, leaving the subspace unchanged.
#[allow(clippy::too_many_arguments)]
pub fn sim_guided_real_run<F, G>(
    f_real: &F,
    drs_grad: &G,
    theta0: ParamVector,
    cfg: &GesConfig,
    opt_real: &mut Optimizer,
    opt_sim: &Optimizer,
    t_sim: usize,
    budget: u64,
    seed: u64,
    episode_ms: f64,
) -> RunOutput
where
    F: Fn(&ParamVector) -> Result<f64> + Sync,
    G: Fn(&ParamVector) -> Result<(f64, ParamVector)> + Sync,
{
    if t_sim == 0 {
        return LoopState::new(seed, episode_ms).finish(
            theta0,
            Some(Error::InvalidConfig("ges.t_sim must be >= 1".into())),
        );
    }
    let opt_sim_template = opt_sim.clone();
    let surrogate = move |theta: &ParamVector| -> SurrogateStep {
        let mut inner_opt = opt_sim_template.clone();
        inner_opt.reset();
        let mut theta_sim = theta.clone();
        let mut used = 0;
        for _ in 0..t_sim {
            match drs_grad(&theta_sim) {
                Ok((_, grad)) => {
                    used += 1;
                    match inner_opt.step(&theta_sim, &grad) {
                        Ok(next) if next.is_finite() => theta_sim = next,
                        _ => {
                            return SurrogateStep {
                                direction: None,
                                drs_rollouts: used,
                                warning: Some("inner descent diverged; surrogate skipped".into()),
                            }
                        }
                    }
                }
                Err(e) => {
                    return SurrogateStep {
                        direction: None,
                        drs_rollouts: used,
                        warning: Some(format!("inner simulator failed ({e}); surrogate skipped")),
                    }
                }
            }
        }
        SurrogateStep {
            direction: Some(theta_sim.sub(theta)),
            drs_rollouts: used,
            warning: None,
        }
    };
    guided_es_run(
        f_real,
        surrogate,
        theta0,
        cfg,
        opt_real,
        budget,
        seed,
        episode_ms,
    )
}

/// Pure first-order descent on a differentiable objective. One call to the
/// oracle is one budgeted episode (its forward pass) and one gradient
/// rollout.
pub fn first_order_run<F>(
    eval_grad: &F,
    theta0: ParamVector,
    opt: &mut Optimizer,
    budget: u64,
    seed: u64,
    episode_ms: f64,
) -> RunOutput
where
    F: Fn(&ParamVector) -> Result<(f64, ParamVector)>,
{
    let mut state = LoopState::new(seed, episode_ms);
    let mut theta = theta0;
    let mut iteration = 0u64;
    while state.episodes + 1 <= budget {
        let (cost, grad) = match eval_grad(&theta) {
            Ok(pair) => pair,
            Err(e) => return state.finish(theta, Some(e)),
        };
        state.episodes += 1;
        state.drs_rollouts += 1;
        if !cost.is_finite() {
            return state.finish(theta, Some(Error::NonFiniteLoss { index: 0 }));
        }
        state.best = state.best.min(cost);
        state.record(iteration, cost);

        match opt.step(&theta, &grad) {
            Ok(next) => theta = next,
            Err(e) => return state.finish(theta, Some(e)),
        }
        iteration += 1;
    }
    state.finish(theta, None)
}

/// CMA-ES baseline loop. Each generation consumes lambda budgeted episodes.
pub fn cma_run<F>(
    objective: &F,
    theta0: ParamVector,
    sigma0: f64,
    lambda: Option<usize>,
    budget: u64,
    seed: u64,
    episode_ms: f64,
) -> RunOutput
where
    F: Fn(&ParamVector) -> Result<f64> + Sync,
{
    let mut state = LoopState::new(seed, episode_ms);
    let lambda = lambda.unwrap_or_else(|| crate::es::default_lambda(theta0.len()));
    let mut cma = match CmaState::new(theta0.clone(), sigma0, lambda) {
        Ok(c) => c,
        Err(e) => return state.finish(theta0, Some(e)),
    };
    let per_generation = lambda as u64;
    let mut generation = 0u64;

    while state.episodes + per_generation <= budget {
        let mut rng = substream(seed, &[tag::CMA, generation]);
        let candidates = match cma_ask(&cma, lambda, &mut rng) {
            Ok(c) => c,
            Err(e) => return state.finish(cma.mean.clone(), Some(e)),
        };
        let evals: Vec<Result<f64>> = candidates.par_iter().map(|c| objective(c)).collect();
        let mut losses = Vec::with_capacity(lambda);
        for result in evals {
            match result {
                Ok(l) => losses.push(l),
                Err(e) => return state.finish(cma.mean.clone(), Some(e)),
            }
        }

        state.episodes += per_generation;
        let mut sum = 0.0;
        for l in &losses {
            state.best = state.best.min(*l);
            sum += l;
        }
        state.record(generation, sum / per_generation as f64);

        if let Err(e) = cma_tell(&mut cma, &candidates, &losses) {
            return state.finish(cma.mean.clone(), Some(e));
        }
        generation += 1;
    }
    state.finish(cma.mean.clone(), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::QuadraticSpec;

    fn quad() -> QuadraticSpec {
        QuadraticSpec { dim: 12, cond: 10.0 }
    }

    fn start(q: &QuadraticSpec, seed: u64) -> ParamVector {
        q.initial_point(seed)
    }

    #[test]
    fn budget_zero_returns_empty_records_and_unchanged_params() {
        let q = quad();
        let theta0 = start(&q, 1);
        let cfg = GesConfig::default();
        let mut opt = Optimizer::sgd(0.01, q.dim);
        let objective = |x: &ParamVector| Ok(q.cost(x));
        let out = guided_es_run(
            &objective,
            |t: &ParamVector| SurrogateStep {
                direction: Some(q.grad(t)),
                drs_rollouts: 1,
                warning: None,
            },
            theta0.clone(),
            &cfg,
            &mut opt,
            0,
            1,
            0.0,
        );
        assert!(out.records.is_empty());
        assert_eq!(out.final_params, theta0);
        assert!(out.failure.is_none());
    }

    #[test]
    fn episode_accounting_and_monotone_best() {
        let q = quad();
        let cfg = GesConfig {
            population: 4,
            ..GesConfig::default()
        };
        let mut opt = Optimizer::sgd(0.05, q.dim);
        let objective = |x: &ParamVector| Ok(q.cost(x));
        let out = vanilla_es_run(&objective, start(&q, 2), &cfg, &mut opt, 100, 3, 2.5);
        // 100 / 8 = 12 full iterations.
        assert_eq!(out.records.len(), 12);
        let mut prev_best = f64::INFINITY;
        for (i, r) in out.records.iter().enumerate() {
            assert_eq!(r.iteration, i as u64);
            assert_eq!(r.episodes_used, 8 * (i as u64 + 1));
            assert_eq!(r.wall_ms, (r.episodes_used as f64 * 2.5).round() as u64);
            assert!(r.best_cost <= prev_best);
            prev_best = r.best_cost;
        }
    }

    #[test]
    fn guided_run_beats_vanilla_with_exact_surrogate() {
        // Median over 5 seeds at an equal episode budget.
        let q = quad();
        let budget = 1200;
        let mut guided_finals = Vec::new();
        let mut vanilla_finals = Vec::new();
        for seed in 0..5u64 {
            let cfg = GesConfig {
                alpha: 0.5,
                sigma: 0.3,
                population: 4,
                ..GesConfig::default()
            };
            let objective = |x: &ParamVector| Ok(q.cost(x));
            let mut opt = Optimizer::fromage(0.05, q.dim, vec![0..q.dim]).unwrap();
            let out = guided_es_run(
                &objective,
                |t: &ParamVector| SurrogateStep {
                    direction: Some(q.grad(t)),
                    drs_rollouts: 1,
                    warning: None,
                },
                start(&q, 100 + seed),
                &cfg,
                &mut opt,
                budget,
                seed,
                0.0,
            );
            guided_finals.push(out.final_best_cost());

            let mut opt = Optimizer::fromage(0.05, q.dim, vec![0..q.dim]).unwrap();
            let out = vanilla_es_run(
                &objective,
                start(&q, 100 + seed),
                &cfg,
                &mut opt,
                budget,
                seed,
                0.0,
            );
            vanilla_finals.push(out.final_best_cost());
        }
        guided_finals.sort_by(f64::total_cmp);
        vanilla_finals.sort_by(f64::total_cmp);
        assert!(
            guided_finals[2] < vanilla_finals[2],
            "guided median {} vs vanilla median {}",
            guided_finals[2],
            vanilla_finals[2]
        );
    }

    #[test]
    fn rotated_surrogate_still_converges() {
        // A surrogate rotated 80 degrees away from the gradient keeps a
        // positive correlation, and the guided run still converges.
        let q = quad();
        let cfg = GesConfig {
            alpha: 0.5,
            sigma: 0.2,
            population: 8,
            ..GesConfig::default()
        };
        let objective = |x: &ParamVector| Ok(q.cost(x));
        let mut opt = Optimizer::fromage(0.05, q.dim, vec![0..q.dim]).unwrap();
        let out = guided_es_run(
            &objective,
            |t: &ParamVector| SurrogateStep {
                direction: Some(q.rotated_grad(t, 80.0, 4)),
                drs_rollouts: 1,
                warning: None,
            },
            start(&q, 7),
            &cfg,
            &mut opt,
            40_000,
            11,
            0.0,
        );
        assert!(out.failure.is_none());
        let final_cost = q.cost(&out.final_params);
        assert!(final_cost < 1e-3, "final solution cost {final_cost}");
    }

    #[test]
    fn alpha_one_guided_is_bit_identical_to_vanilla() {
        let q = quad();
        let cfg = GesConfig {
            alpha: 1.0,
            sigma: 0.25,
            population: 6,
            ..GesConfig::default()
        };
        let objective = |x: &ParamVector| Ok(q.cost(x));
        for seed in [0u64, 9, 42] {
            let mut opt_a = Optimizer::fromage(0.1, q.dim, vec![0..q.dim]).unwrap();
            let guided = guided_es_run(
                &objective,
                |t: &ParamVector| SurrogateStep {
                    direction: Some(q.grad(t)),
                    drs_rollouts: 1,
                    warning: None,
                },
                start(&q, seed),
                &cfg,
                &mut opt_a,
                600,
                seed,
                1.0,
            );
            let mut opt_b = Optimizer::fromage(0.1, q.dim, vec![0..q.dim]).unwrap();
            let vanilla =
                vanilla_es_run(&objective, start(&q, seed), &cfg, &mut opt_b, 600, seed, 1.0);

            assert_eq!(guided.records.len(), vanilla.records.len());
            for (a, b) in guided.records.iter().zip(vanilla.records.iter()) {
                assert_eq!(a.cost.to_bits(), b.cost.to_bits());
                assert_eq!(a.best_cost.to_bits(), b.best_cost.to_bits());
                assert_eq!(a.episodes_used, b.episodes_used);
            }
            for (a, b) in guided
                .final_params
                .iter()
                .zip(vanilla.final_params.iter())
            {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn runs_are_independent_of_thread_count() {
        let q = quad();
        let cfg = GesConfig {
            population: 8,
            sigma: 0.3,
            ..GesConfig::default()
        };
        let objective = |x: &ParamVector| Ok(q.cost(x));
        let run = || {
            let mut opt = Optimizer::sgd(0.02, q.dim);
            guided_es_run(
                &objective,
                |t: &ParamVector| SurrogateStep {
                    direction: Some(q.grad(t)),
                    drs_rollouts: 1,
                    warning: None,
                },
                start(&q, 3),
                &cfg,
                &mut opt,
                320,
                17,
                0.0,
            )
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(single.records.len(), multi.records.len());
        for (a, b) in single.records.iter().zip(multi.records.iter()) {
            assert_eq!(a.cost.to_bits(), b.cost.to_bits());
            assert_eq!(a.best_cost.to_bits(), b.best_cost.to_bits());
        }
        for (a, b) in single.final_params.iter().zip(multi.final_params.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn single_inner_sgd_step_gives_antiparallel_direction() {
        // t_sim = 1 with sgd: the surrogate is exactly -eta * grad.
        let q = quad();
        let theta = start(&q, 5);
        let eta = 0.07;
        let opt_sim = Optimizer::sgd(eta, q.dim);
        let drs = |x: &ParamVector| Ok((q.cost(x), q.grad(x)));

        // Reach into the surrogate via a run with budget for one iteration.
        let cfg = GesConfig {
            population: 1,
            ..GesConfig::default()
        };
        let mut opt_real = Optimizer::sgd(0.0, q.dim);
        let objective = |x: &ParamVector| Ok(q.cost(x));
        let out = sim_guided_real_run(
            &objective,
            &drs,
            theta.clone(),
            &cfg,
            &mut opt_real,
            &opt_sim,
            1,
            2,
            0,
            0.0,
        );
        assert!(out.failure.is_none());
        assert_eq!(out.drs_rollouts, 1);

        // Direct check of the algebra.
        let expected = q.grad(&theta).scale(-eta);
        let mut inner = opt_sim.clone();
        let actual = inner.step(&theta, &q.grad(&theta)).unwrap().sub(&theta);
        for (a, b) in actual.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_gap_transfer_beats_vanilla_on_episodes_to_threshold() {
        // DRS identical to the real objective: the guided transfer loop must
        // hit the threshold earlier than the isotropic baseline (median of 5).
        let q = quad();
        let budget = 2000;
        let threshold = 0.05;
        let mut ges_hits = Vec::new();
        let mut ves_hits = Vec::new();
        for seed in 0..5u64 {
            let theta0 = start(&q, 50 + seed);
            let zero_cost = q.cost(&theta0);
            let thr = threshold * zero_cost;
            let cfg = GesConfig {
                alpha: 0.5,
                sigma: 0.3,
                population: 4,
                ..GesConfig::default()
            };
            let objective = |x: &ParamVector| Ok(q.cost(x));
            let drs = |x: &ParamVector| Ok((q.cost(x), q.grad(x)));
            let mut opt_real = Optimizer::fromage(0.1, q.dim, vec![0..q.dim]).unwrap();
            let opt_sim = Optimizer::fromage(0.1, q.dim, vec![0..q.dim]).unwrap();
            let ges = sim_guided_real_run(
                &objective,
                &drs,
                theta0.clone(),
                &cfg,
                &mut opt_real,
                &opt_sim,
                3,
                budget,
                seed,
                0.0,
            );
            ges_hits.push(ges.episodes_to_threshold(thr).unwrap_or(budget));

            let mut opt = Optimizer::fromage(0.1, q.dim, vec![0..q.dim]).unwrap();
            let ves = vanilla_es_run(&objective, theta0, &cfg, &mut opt, budget, seed, 0.0);
            ves_hits.push(ves.episodes_to_threshold(thr).unwrap_or(budget));
        }
        ges_hits.sort_unstable();
        ves_hits.sort_unstable();
        assert!(
            ges_hits[2] < ves_hits[2],
            "guided median {} vs vanilla median {}",
            ges_hits[2],
            ves_hits[2]
        );
    }

    #[test]
    fn first_order_descends_a_smooth_objective() {
        let q = quad();
        let eval = |x: &ParamVector| Ok((q.cost(x), q.grad(x)));
        let mut opt = Optimizer::fromage(0.05, q.dim, vec![0..q.dim]).unwrap();
        let theta0 = start(&q, 30);
        let c0 = q.cost(&theta0);
        let out = first_order_run(&eval, theta0, &mut opt, 300, 0, 0.0);
        assert!(out.failure.is_none());
        assert_eq!(out.records.len(), 300);
        assert_eq!(out.drs_rollouts, 300);
        assert!(out.final_best_cost() < 0.01 * c0);
    }

    #[test]
    fn cma_runner_minimizes_the_sphere() {
        let sphere = |x: &ParamVector| Ok(x.dot(x));
        let out = cma_run(
            &sphere,
            ParamVector::new(vec![3.0; 10]),
            1.0,
            None,
            5000,
            0,
            0.0,
        );
        assert!(out.failure.is_none());
        assert!(out.final_best_cost() <= 1e-8, "{}", out.final_best_cost());
    }

    #[test]
    fn failures_preserve_partial_logs() {
        let q = quad();
        let cfg = GesConfig {
            population: 2,
            ..GesConfig::default()
        };
        let calls = std::sync::atomic::AtomicU64::new(0);
        let objective = |x: &ParamVector| {
            let c = calls.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
            if c >= 10 {
                Err(Error::NonFiniteState { step: 99 })
            } else {
                Ok(q.cost(x))
            }
        };
        let mut opt = Optimizer::sgd(0.01, q.dim);
        let out = vanilla_es_run(&objective, start(&q, 1), &cfg, &mut opt, 1000, 0, 0.0);
        assert!(out.failure.is_some());
        assert!(!out.records.is_empty());
        assert!(out.records.len() < 250);
    }
}
