//! Shared fixtures for the benchmark targets.

use ges_core::{init_params, MassSpringSpec, MlpSpec, ParamVector, PendulumSpec};

pub fn pendulum_fixture() -> (PendulumSpec, MlpSpec, ParamVector) {
    let spec = PendulumSpec {
        horizon: 800,
        ..PendulumSpec::default()
    };
    let mlp = MlpSpec::tanh_policy(spec.obs_dim(), 16, 1);
    let params = init_params(&mlp, 7);
    (spec, mlp, params)
}

pub fn mass_spring_fixture() -> (MassSpringSpec, MlpSpec, ParamVector) {
    let spec = MassSpringSpec::default();
    let mlp = MlpSpec::tanh_policy(spec.control_features, 16, spec.actuated_count());
    let params = init_params(&mlp, 7);
    (spec, mlp, params)
}
