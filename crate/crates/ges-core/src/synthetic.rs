//! Synthetic quadratic objective with a controllable surrogate corruption,
//! used to exercise the search loops without a simulator in the way.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::params::ParamVector;
use crate::rng::{substream, tag};

/// f(theta) = 0.5 * sum_i lambda_i theta_i^2 with eigenvalues log-spaced
/// from 1 to `cond`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticSpec {
    pub dim: usize,
    pub cond: f64,
}

impl Default for QuadraticSpec {
    fn default() -> Self {
        QuadraticSpec {
            dim: 20,
            cond: 10.0,
        }
    }
}

impl QuadraticSpec {
    pub fn eigenvalue(&self, i: usize) -> f64 {
        if self.dim <= 1 {
            return 1.0;
        }
        let t = i as f64 / (self.dim - 1) as f64;
        self.cond.powf(t)
    }

    pub fn cost(&self, theta: &ParamVector) -> f64 {
        0.5 * theta
            .iter()
            .enumerate()
            .map(|(i, v)| self.eigenvalue(i) * v * v)
            .sum::<f64>()
    }

    pub fn grad(&self, theta: &ParamVector) -> ParamVector {
        ParamVector::new(
            theta
                .iter()
                .enumerate()
                .map(|(i, v)| self.eigenvalue(i) * v)
                .collect(),
        )
    }

    /// Seeded starting point, uniform in [-1, 1]^dim.
    pub fn initial_point(&self, seed: u64) -> ParamVector {
        let mut rng = substream(seed, &[tag::SYNTHETIC, 0]);
        ParamVector::new((0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect())
    }

    /// Exact gradient rotated by `angle_deg` toward a fixed seeded direction,
    /// preserving the norm. For angles below 90 degrees the result stays
    /// positively correlated with the true gradient.
    pub fn rotated_grad(&self, theta: &ParamVector, angle_deg: f64, seed: u64) -> ParamVector {
        let g = self.grad(theta);
        let g_norm = g.norm();
        if g_norm == 0.0 || angle_deg == 0.0 || self.dim < 2 {
            return g;
        }
        let mut rng = substream(seed, &[tag::SYNTHETIC, 1]);
        let mut axis =
            ParamVector::new((0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect());
        // Orthogonalize the seeded axis against g.
        let g_hat = g.scale(1.0 / g_norm);
        axis.axpy(&g_hat, -g_hat.dot(&axis));
        let axis_norm = axis.norm();
        if axis_norm < 1e-12 {
            return g;
        }
        let axis = axis.scale(1.0 / axis_norm);
        let phi = angle_deg.to_radians();
        let mut out = g_hat.scale(phi.cos());
        out.axpy(&axis, phi.sin());
        out.scale(g_norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_finite_differences() {
        let q = QuadraticSpec { dim: 6, cond: 25.0 };
        let theta = q.initial_point(3);
        let g = q.grad(&theta);
        let step = 1e-6;
        for i in 0..q.dim {
            let mut hi = theta.clone();
            hi[i] += step;
            let mut lo = theta.clone();
            lo[i] -= step;
            let fd = (q.cost(&hi) - q.cost(&lo)) / (2.0 * step);
            assert!((fd - g[i]).abs() < 1e-6 * g[i].abs().max(1.0));
        }
    }

    #[test]
    fn rotation_preserves_norm_and_sets_the_angle() {
        let q = QuadraticSpec::default();
        let theta = q.initial_point(9);
        let g = q.grad(&theta);
        for deg in [10.0, 45.0, 80.0] {
            let r = q.rotated_grad(&theta, deg, 5);
            assert!((r.norm() - g.norm()).abs() < 1e-9 * g.norm());
            let cos = r.dot(&g) / (r.norm() * g.norm());
            assert!((cos - deg.to_radians().cos()).abs() < 1e-9);
        }
    }
}
