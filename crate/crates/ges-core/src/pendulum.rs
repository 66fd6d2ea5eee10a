//! Torque-limited pendulum with an energy-tracking cost, its exact
//! reverse-mode gradient, and a perturbed variant standing in for the real
//! system in the transfer experiment.
//!
//! Angle is measured from the horizontal, so hanging straight down is
//! -pi/2 and the potential term is m*g*l*sin(angle).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ParamVector, RolloutResult};
use crate::policy::{mlp_forward, mlp_forward_backward, MlpSpec};
use crate::rng::{substream, tag};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumSpec {
    /// Bob mass, kg.
    pub m: f64,
    /// Arm length, m.
    pub l: f64,
    /// Rotational inertia, kg m^2.
    pub j: f64,
    /// Gravity, m/s^2.
    pub g: f64,
    /// Viscous damping, N m s/rad.
    pub b: f64,
    /// Torque limit, N m.
    pub u_max: f64,
    /// Integration step, s.
    pub dt: f64,
    /// Steps per episode.
    pub horizon: usize,
    /// Number of past (angle, velocity) pairs fed to the policy.
    pub obs_history: usize,
}

impl Default for PendulumSpec {
    fn default() -> Self {
        let (m, l, g) = (1.0, 0.5, 9.81);
        PendulumSpec {
            m,
            l,
            j: m * l * l,
            g,
            b: 0.05,
            u_max: 0.35 * m * g * l,
            dt: 0.01,
            horizon: 400,
            obs_history: 4,
        }
    }
}

impl PendulumSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m", self.m),
            ("l", self.l),
            ("j", self.j),
            ("g", self.g),
            ("u_max", self.u_max),
            ("dt", self.dt),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("pendulum.{name} must be > 0")));
            }
        }
        if self.b < 0.0 || !self.b.is_finite() {
            return Err(Error::InvalidConfig("pendulum.b must be >= 0".into()));
        }
        if self.horizon == 0 || self.obs_history == 0 {
            return Err(Error::InvalidConfig(
                "pendulum horizon and obs_history must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Policy input width: obs_history pairs of (angle, velocity).
    pub fn obs_dim(&self) -> usize {
        2 * self.obs_history
    }

    /// Velocity scale used to normalize observations: the angular speed a
    /// full swing from rest reaches at the bottom.
    fn velocity_scale(&self) -> f64 {
        (2.0 * self.m * self.g * self.l / self.j).sqrt()
    }

    fn initial_state(&self) -> PendulumState {
        PendulumState {
            angle: -std::f64::consts::FRAC_PI_2,
            velocity: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumState {
    pub angle: f64,
    pub velocity: f64,
}

/// Mechanical energy: 0.5 * J * velocity^2 + m * g * l * sin(angle).
pub fn pendulum_energy(state: &PendulumState, spec: &PendulumSpec) -> f64 {
    0.5 * spec.j * state.velocity * state.velocity + spec.m * spec.g * spec.l * state.angle.sin()
}

/// Energy of the target motion, m*g*l*sin(2*pi): identically zero, the energy
/// of a swing whose extremes reach the horizontal on both sides.
pub fn target_energy(_spec: &PendulumSpec) -> f64 {
    0.0
}

/// Semi-implicit Euler step under an already-clamped torque.
pub fn pendulum_step(state: &PendulumState, torque: f64, spec: &PendulumSpec) -> PendulumState {
    let accel = (-spec.m * spec.g * spec.l * state.angle.cos() - spec.b * state.velocity + torque)
        / spec.j;
    let velocity = state.velocity + spec.dt * accel;
    let angle = state.angle + spec.dt * velocity;
    PendulumState { angle, velocity }
}

/// Multiplicative gap applied to a subset of the physical constants.
/// A factor with `lo == hi` is deterministic; otherwise the multiplier is
/// drawn uniformly from [lo, hi], deterministically per seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapFactor {
    pub lo: f64,
    pub hi: f64,
}

impl GapFactor {
    pub fn fixed(x: f64) -> Self {
        GapFactor { lo: x, hi: x }
    }

    pub fn identity() -> Self {
        GapFactor::fixed(1.0)
    }

    fn validate(&self, field: &'static str) -> Result<()> {
        for v in [self.lo, self.hi] {
            if !(0.5..=2.0).contains(&v) {
                return Err(Error::GapOutOfRange { field, value: v });
            }
        }
        if self.lo > self.hi {
            return Err(Error::GapOutOfRange {
                field,
                value: self.lo,
            });
        }
        Ok(())
    }

    fn sample(&self, seed: u64, field_tag: u64) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            substream(seed, &[tag::GAP, field_tag]).random_range(self.lo..=self.hi)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSpec {
    pub m: GapFactor,
    pub l: GapFactor,
    pub b: GapFactor,
}

impl GapSpec {
    pub fn identity() -> Self {
        GapSpec {
            m: GapFactor::identity(),
            l: GapFactor::identity(),
            b: GapFactor::identity(),
        }
    }
}

/// Apply a parameter gap: m, l and b are multiplied by their factors, all
/// other fields are left untouched.
pub fn perturb_spec(spec: &PendulumSpec, gap: &GapSpec, seed: u64) -> Result<PendulumSpec> {
    gap.m.validate("m")?;
    gap.l.validate("l")?;
    gap.b.validate("b")?;
    let mut out = *spec;
    out.m = spec.m * gap.m.sample(seed, 0);
    out.l = spec.l * gap.l.sample(seed, 1);
    out.b = spec.b * gap.b.sample(seed, 2);
    Ok(out)
}

/// Observation at step t: the last `obs_history` (angle, velocity) pairs,
/// most recent first, slots before the episode start filled with the initial
/// state. Angles are scaled by 1/pi and velocities by the swing speed scale.
fn observation(states: &[PendulumState], t: usize, spec: &PendulumSpec, out: &mut Vec<f64>) {
    let v_scale = spec.velocity_scale();
    out.clear();
    for i in 0..spec.obs_history {
        let idx = t.saturating_sub(i);
        let s = &states[idx];
        out.push(s.angle / std::f64::consts::PI);
        out.push(s.velocity / v_scale);
    }
}

fn check_policy_dims(spec: &PendulumSpec, mlp: &MlpSpec) -> Result<()> {
    if mlp.input_dim != spec.obs_dim() {
        return Err(Error::DimensionMismatch {
            context: "pendulum policy input",
            expected: spec.obs_dim(),
            actual: mlp.input_dim,
        });
    }
    if mlp.output_dim != 1 {
        return Err(Error::DimensionMismatch {
            context: "pendulum policy output",
            expected: 1,
            actual: mlp.output_dim,
        });
    }
    Ok(())
}

struct Forward {
    states: Vec<PendulumState>,
    cost: f64,
}

fn run_forward(spec: &PendulumSpec, mlp: &MlpSpec, params: &ParamVector) -> Result<Forward> {
    check_policy_dims(spec, mlp)?;
    let target = target_energy(spec);
    let mut states = Vec::with_capacity(spec.horizon + 1);
    states.push(spec.initial_state());
    let mut obs = Vec::with_capacity(spec.obs_dim());

    let e0 = pendulum_energy(&states[0], spec) - target;
    let mut cost = e0 * e0;
    for t in 0..spec.horizon {
        observation(&states, t, spec, &mut obs);
        let y = mlp_forward(mlp, params, &obs)?[0];
        let torque = spec.u_max * y;
        let next = pendulum_step(&states[t], torque, spec);
        if !next.angle.is_finite() || !next.velocity.is_finite() {
            return Err(Error::NonFiniteState { step: t + 1 });
        }
        let e = pendulum_energy(&next, spec) - target;
        cost += e * e;
        states.push(next);
    }
    Ok(Forward { states, cost })
}

/// Run one episode; cost is the sum over all visited states of the squared
/// energy error, with unit weight per step.
pub fn pendulum_rollout(
    spec: &PendulumSpec,
    mlp: &MlpSpec,
    params: &ParamVector,
) -> Result<RolloutResult<PendulumState>> {
    let fwd = run_forward(spec, mlp, params)?;
    Ok(RolloutResult {
        cost: fwd.cost,
        trajectory: fwd.states,
        grad: None,
    })
}

/// Episode cost plus its exact gradient w.r.t. the policy parameters,
/// computed by an adjoint sweep over the stored trajectory. The forward pass
/// is shared with [`pendulum_rollout`], so the cost is bit-identical.
pub fn pendulum_rollout_grad(
    spec: &PendulumSpec,
    mlp: &MlpSpec,
    params: &ParamVector,
) -> Result<RolloutResult<PendulumState>> {
    let fwd = run_forward(spec, mlp, params)?;
    let states = &fwd.states;
    let target = target_energy(spec);
    let mgl = spec.m * spec.g * spec.l;
    let v_scale = spec.velocity_scale();

    // Direct cost term: d/ds of (E(s) - E*)^2 at every visited state.
    let mut adj: Vec<(f64, f64)> = states
        .iter()
        .map(|s| {
            let e = pendulum_energy(s, spec) - target;
            (2.0 * e * mgl * s.angle.cos(), 2.0 * e * spec.j * s.velocity)
        })
        .collect();

    let mut grad = ParamVector::zeros(params.len());
    let mut obs = Vec::with_capacity(spec.obs_dim());
    for t in (0..spec.horizon).rev() {
        let (da_next, dv_next) = adj[t + 1];
        let s = &states[t];

        // Through the semi-implicit update: w = v + dt*acc(a, v, u), a' = a + dt*w.
        let w_bar = dv_next + spec.dt * da_next;
        let a_bar = da_next + w_bar * spec.dt * mgl * s.angle.sin() / spec.j;
        let v_bar = w_bar * (1.0 - spec.dt * spec.b / spec.j);
        let u_bar = w_bar * spec.dt / spec.j;

        adj[t].0 += a_bar;
        adj[t].1 += v_bar;

        // Through the policy: u = u_max * y(obs; params).
        let y_adjoint = spec.u_max * u_bar;
        if y_adjoint != 0.0 {
            observation(states, t, spec, &mut obs);
            let (_, pg, og) = mlp_forward_backward(mlp, params, &obs, &[y_adjoint])?;
            grad.axpy(&pg, 1.0);
            for i in 0..spec.obs_history {
                let idx = t.saturating_sub(i);
                adj[idx].0 += og[2 * i] / std::f64::consts::PI;
                adj[idx].1 += og[2 * i + 1] / v_scale;
            }
        }
    }

    Ok(RolloutResult {
        cost: fwd.cost,
        trajectory: fwd.states,
        grad: Some(grad),
    })
}
