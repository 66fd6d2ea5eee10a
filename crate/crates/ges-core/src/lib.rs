//! Policy search with evolution strategies guided by differentiable
//! simulators.
//!
//! The crate provides:
//!
//! - flat parameter vectors and small tanh policy networks ([`policy`]),
//! - two differentiable simulators with hand-written adjoints: a
//!   torque-limited pendulum with an energy-tracking cost ([`pendulum`]) and
//!   a planar mass-spring walker with deliberately naive sticking contact
//!   ([`mass_spring`]),
//! - first-order update rules including the norm-ratio Fromage rule
//!   ([`optim`]),
//! - the guided evolution strategy: a low-rank guiding subspace built from
//!   recent surrogate gradients, structured antithetic perturbations, the
//!   corresponding gradient estimator, and the training loops, next to
//!   isotropic-ES and CMA-ES baselines ([`es`]).
//!
//! Everything is deterministic given a master seed: each stochastic site
//! draws from its own derived stream ([`rng`]), so runs reproduce exactly at
//! any parallelism degree.

pub mod error;
pub mod es;
pub mod mass_spring;
pub mod optim;
pub mod params;
pub mod pendulum;
pub mod policy;
pub mod rng;
pub mod synthetic;

pub use error::{Error, Result};
pub use es::{
    cma_ask, cma_tell, cma_run, default_lambda, first_order_run, ges_gradient_estimate,
    guided_es_run, sample_perturbation, sim_guided_real_run, vanilla_es_gradient, vanilla_es_run,
    CmaState, GesConfig, GuidingSubspace, PerturbationBatch, RunOutput, RunRecord, SubspaceUpdate,
    SurrogateStep,
};
pub use mass_spring::{
    ms_controls, ms_rollout, ms_rollout_grad, ms_step, MassPoint, MassSpringSpec, MassSpringState,
    Spring,
};
pub use optim::{Optimizer, OptimizerKind};
pub use params::{ParamVector, RolloutResult};
pub use pendulum::{
    pendulum_energy, pendulum_rollout, pendulum_rollout_grad, pendulum_step, perturb_spec,
    target_energy, GapFactor, GapSpec, PendulumSpec, PendulumState,
};
pub use policy::{init_params, mlp_forward, mlp_forward_backward, Activation, MlpSpec, OutputSquash};
pub use synthetic::QuadraticSpec;
