//! Adjoint exactness against central finite differences, the independent
//! oracle for both simulators' reverse passes.
//!
//! Two metrics per comparison: the normwise relative error (the criterion,
//! robust to FD round-off on near-zero coordinates), and a coordinate-wise
//! check floored at 1e-4 of the largest entry (catches localized bugs).

use ges_core::{
    init_params, ms_rollout, ms_rollout_grad, pendulum_rollout, pendulum_rollout_grad, MassPoint,
    MassSpringSpec, MlpSpec, ParamVector, PendulumSpec, Spring,
};

fn central_diff(f: &dyn Fn(&ParamVector) -> f64, theta: &ParamVector, step: f64) -> ParamVector {
    let mut grad = ParamVector::zeros(theta.len());
    let mut probe = theta.clone();
    for i in 0..theta.len() {
        let orig = probe[i];
        probe[i] = orig + step;
        let hi = f(&probe);
        probe[i] = orig - step;
        let lo = f(&probe);
        probe[i] = orig;
        grad[i] = (hi - lo) / (2.0 * step);
    }
    grad
}

fn normwise_rel_err(analytic: &ParamVector, fd: &ParamVector) -> f64 {
    let denom = analytic.norm().max(fd.norm());
    if denom == 0.0 {
        return 0.0;
    }
    analytic.sub(fd).norm() / denom
}

fn coordinate_rel_err(analytic: &ParamVector, fd: &ParamVector) -> f64 {
    let scale = analytic
        .iter()
        .chain(fd.iter())
        .map(|v| v.abs())
        .fold(0.0f64, f64::max);
    // The floor sits well above the FD round-off (~eps * |cost| / step) so
    // the check stays meaningful for every significant coordinate.
    let floor = (1e-3 * scale).max(1e-12);
    analytic
        .iter()
        .zip(fd.iter())
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(floor))
        .fold(0.0, f64::max)
}

#[test]
fn pendulum_adjoint_matches_finite_differences() {
    let spec = PendulumSpec {
        horizon: 200,
        ..PendulumSpec::default()
    };
    let mlp = MlpSpec::tanh_policy(8, 16, 1);
    let f = |theta: &ParamVector| pendulum_rollout(&spec, &mlp, theta).unwrap().cost;

    let mut worst_norm = 0.0f64;
    let mut worst_coord = 0.0f64;
    for seed in 0..20 {
        let theta = init_params(&mlp, seed);
        let grad = pendulum_rollout_grad(&spec, &mlp, &theta)
            .unwrap()
            .grad
            .unwrap();
        let fd = central_diff(&f, &theta, 1e-5);
        worst_norm = worst_norm.max(normwise_rel_err(&grad, &fd));
        worst_coord = worst_coord.max(coordinate_rel_err(&grad, &fd));
    }
    assert!(worst_norm <= 1e-4, "normwise relative error {worst_norm}");
    assert!(
        worst_coord <= 1e-4,
        "coordinate relative error {worst_coord}"
    );
}

#[test]
fn pendulum_adjoint_holds_at_full_horizon() {
    let spec = PendulumSpec::default();
    let mlp = MlpSpec::tanh_policy(8, 16, 1);
    let f = |theta: &ParamVector| pendulum_rollout(&spec, &mlp, theta).unwrap().cost;
    let theta = init_params(&mlp, 77);
    let grad = pendulum_rollout_grad(&spec, &mlp, &theta)
        .unwrap()
        .grad
        .unwrap();
    let fd = central_diff(&f, &theta, 1e-5);
    let err = normwise_rel_err(&grad, &fd);
    assert!(err <= 1e-4, "normwise relative error {err}");
}

/// Airborne configuration: the robot never reaches the ground within the
/// horizon.
fn airborne_spec() -> MassSpringSpec {
    let mut spec = MassSpringSpec::default();
    for m in &mut spec.masses {
        m.pos[1] += 1.0;
    }
    spec.horizon = 60;
    spec
}

#[test]
fn mass_spring_contact_free_gradient_is_conservative_and_matches_fd() {
    // In free flight the internal spring forces cannot move the center of
    // mass, so the displacement cost is parameter-independent: both the
    // adjoint and the differences must vanish (to FD round-off).
    let spec = airborne_spec();
    let mlp = MlpSpec::tanh_policy(6, 16, 4);
    let f = |theta: &ParamVector| ms_rollout(&spec, &mlp, theta).unwrap().cost;

    for seed in 0..20 {
        let theta = init_params(&mlp, 1000 + seed);
        let result = ms_rollout_grad(&spec, &mlp, &theta).unwrap();
        for state in &result.trajectory {
            for p in &state.positions {
                assert!(p[1] > spec.ground_y);
            }
        }
        let grad = result.grad.unwrap();
        let fd = central_diff(&f, &theta, 1e-5);
        assert!(grad.norm() <= 1e-10, "phantom adjoint: {}", grad.norm());
        assert!(fd.norm() <= 1e-8, "fd noise beyond round-off: {}", fd.norm());
        assert!(normwise_rel_err(&grad, &fd) <= 1e-4 || grad.norm().max(fd.norm()) <= 1e-8);
    }
}

#[test]
fn mass_spring_stable_contact_adjoint_matches_finite_differences() {
    // Standing on the ground the contact pattern is stable under the FD
    // probes, the dynamics are piecewise-smooth, and the displacement cost
    // genuinely depends on the parameters. This exercises the contact
    // pullback for real.
    let spec = MassSpringSpec {
        horizon: 150,
        ..MassSpringSpec::default()
    };
    let mlp = MlpSpec::tanh_policy(6, 16, 4);
    let f = |theta: &ParamVector| ms_rollout(&spec, &mlp, theta).unwrap().cost;

    let mut worst = 0.0f64;
    for seed in 0..20 {
        let theta = init_params(&mlp, 4000 + seed);
        let grad = ms_rollout_grad(&spec, &mlp, &theta).unwrap().grad.unwrap();
        assert!(grad.norm() > 0.0, "gradient unexpectedly zero");
        let fd = central_diff(&f, &theta, 1e-5);
        worst = worst.max(normwise_rel_err(&grad, &fd));
    }
    assert!(worst <= 1e-4, "normwise relative error {worst}");
}

#[test]
fn mass_spring_contact_gradient_is_finite_over_long_horizons() {
    let spec = MassSpringSpec {
        horizon: 800,
        ..MassSpringSpec::default()
    };
    let mlp = MlpSpec::tanh_policy(6, 16, 4);
    for seed in 0..5 {
        let theta = init_params(&mlp, 2000 + seed);
        let r = ms_rollout_grad(&spec, &mlp, &theta).unwrap();
        assert!(r.grad.unwrap().is_finite());
        assert!(r.cost.is_finite());
    }
}

#[test]
fn mass_spring_two_mass_chain_adjoint() {
    // Minimal robot on the ground exercising the actuated-spring pullback:
    // one mass anchored by sticking contact, one free.
    let mut spec = MassSpringSpec {
        masses: vec![
            MassPoint {
                pos: [0.0, 0.0],
                mass: 0.2,
            },
            MassPoint {
                pos: [0.08, 0.09],
                mass: 0.1,
            },
        ],
        springs: vec![Spring {
            i: 0,
            j: 1,
            rest_length: 0.12,
            stiffness: 200.0,
            actuated: true,
        }],
        horizon: 60,
        ..MassSpringSpec::default()
    };
    spec.reset_rest_lengths();
    let mlp = MlpSpec::tanh_policy(6, 8, 1);
    let f = |theta: &ParamVector| ms_rollout(&spec, &mlp, theta).unwrap().cost;
    for seed in 0..10 {
        let theta = init_params(&mlp, 3000 + seed);
        let grad = ms_rollout_grad(&spec, &mlp, &theta).unwrap().grad.unwrap();
        let fd = central_diff(&f, &theta, 1e-5);
        let err = normwise_rel_err(&grad, &fd);
        assert!(err <= 1e-4, "seed {seed}: normwise relative error {err}");
    }
}
