//! Parameter-update rules shared by the inner simulator descent and the
//! outer evolution-strategy loop.

use serde::{Deserialize, Serialize};
use std::ops::Range;

use crate::error::{Error, Result};
use crate::params::ParamVector;

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
const NORM_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Adam,
    Fromage,
}

/// Single-owner optimizer state: accumulators plus the parameter grouping
/// used by the per-layer Fromage rule.
#[derive(Debug, Clone)]
pub struct Optimizer {
    pub kind: OptimizerKind,
    pub learning_rate: f64,
    /// Pre-normalize the gradient to unit norm before the update rule
    /// (sgd/adam only; Fromage normalizes by construction).
    pub normalize_grad: bool,
    param_groups: Vec<Range<usize>>,
    step_count: u64,
    first_moment: Vec<f64>,
    second_moment: Vec<f64>,
}

impl Optimizer {
    /// `param_groups` must partition [0, n). Pass a single full range to run
    /// Fromage in global-norm mode.
    pub fn new(
        kind: OptimizerKind,
        learning_rate: f64,
        n: usize,
        param_groups: Vec<Range<usize>>,
    ) -> Result<Self> {
        let mut covered = 0;
        for g in &param_groups {
            if g.start != covered || g.end > n {
                return Err(Error::InvalidConfig(format!(
                    "param groups must partition [0, {n}) in order"
                )));
            }
            covered = g.end;
        }
        if covered != n {
            return Err(Error::InvalidConfig(format!(
                "param groups cover [0, {covered}) but n = {n}"
            )));
        }
        Ok(Optimizer {
            kind,
            learning_rate,
            normalize_grad: false,
            param_groups,
            step_count: 0,
            first_moment: vec![0.0; n],
            second_moment: vec![0.0; n],
        })
    }

    pub fn with_normalize_grad(mut self, on: bool) -> Self {
        self.normalize_grad = on;
        self
    }

    pub fn sgd(learning_rate: f64, n: usize) -> Self {
        Optimizer::new(OptimizerKind::Sgd, learning_rate, n, vec![0..n]).unwrap()
    }

    pub fn adam(learning_rate: f64, n: usize) -> Self {
        Optimizer::new(OptimizerKind::Adam, learning_rate, n, vec![0..n]).unwrap()
    }

    pub fn fromage(learning_rate: f64, n: usize, param_groups: Vec<Range<usize>>) -> Result<Self> {
        Optimizer::new(OptimizerKind::Fromage, learning_rate, n, param_groups)
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// Reset accumulators and the step counter, keeping the configuration.
    pub fn reset(&mut self) {
        self.step_count = 0;
        self.first_moment.iter_mut().for_each(|v| *v = 0.0);
        self.second_moment.iter_mut().for_each(|v| *v = 0.0);
    }

    /// One update. Errors on non-finite gradients so the caller can decide
    /// whether to skip the iteration.
    pub fn step(&mut self, params: &ParamVector, grad: &ParamVector) -> Result<ParamVector> {
        if params.len() != self.first_moment.len() || grad.len() != params.len() {
            return Err(Error::DimensionMismatch {
                context: "optimizer step",
                expected: self.first_moment.len(),
                actual: grad.len(),
            });
        }
        if !grad.is_finite() {
            return Err(Error::NonFiniteGradient);
        }

        let grad = if self.normalize_grad && self.kind != OptimizerKind::Fromage {
            let norm = grad.norm().max(NORM_GUARD);
            grad.scale(1.0 / norm)
        } else {
            grad.clone()
        };

        self.step_count += 1;
        let eta = self.learning_rate;
        let out = match self.kind {
            OptimizerKind::Sgd => params.add_scaled(&grad, -eta),
            OptimizerKind::Adam => {
                let t = self.step_count as i32;
                let bc1 = 1.0 - ADAM_BETA1.powi(t);
                let bc2 = 1.0 - ADAM_BETA2.powi(t);
                let mut out = params.clone();
                for i in 0..params.len() {
                    let g = grad[i];
                    self.first_moment[i] = ADAM_BETA1 * self.first_moment[i] + (1.0 - ADAM_BETA1) * g;
                    self.second_moment[i] =
                        ADAM_BETA2 * self.second_moment[i] + (1.0 - ADAM_BETA2) * g * g;
                    let m_hat = self.first_moment[i] / bc1;
                    let v_hat = self.second_moment[i] / bc2;
                    out[i] -= eta * m_hat / (v_hat.sqrt() + ADAM_EPS);
                }
                out
            }
            OptimizerKind::Fromage => {
                // Per group: theta' = (theta - eta * (|theta|/|g|) * g) / sqrt(1 + eta^2),
                // falling back to a plain normalized step when the group norm vanishes.
                let shrink = (1.0 + eta * eta).sqrt();
                let mut out = params.clone();
                for group in &self.param_groups {
                    let theta = &params.as_slice()[group.clone()];
                    let g = &grad.as_slice()[group.clone()];
                    let theta_norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let g_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(NORM_GUARD);
                    if theta_norm < NORM_GUARD {
                        for (i, idx) in group.clone().enumerate() {
                            out[idx] = theta[i] - eta * g[i] / g_norm;
                        }
                    } else {
                        let scale = eta * theta_norm / g_norm;
                        for (i, idx) in group.clone().enumerate() {
                            out[idx] = (theta[i] - scale * g[i]) / shrink;
                        }
                    }
                }
                out
            }
        };
        Ok(out)
    }
}
