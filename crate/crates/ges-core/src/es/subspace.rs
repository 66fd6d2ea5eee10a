//! Guiding subspace: a ring buffer of recent surrogate gradients and the
//! orthonormal basis of their span.

use std::collections::VecDeque;

use crate::params::ParamVector;

/// Threshold below which a residual direction is treated as linearly
/// dependent, relative to the largest history column norm.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceUpdate {
    Updated,
    /// An all-zero gradient was offered; the history is unchanged.
    IgnoredZeroGradient,
}

#[derive(Debug, Clone)]
pub struct GuidingSubspace {
    history: VecDeque<ParamVector>,
    basis: Vec<ParamVector>,
    capacity: usize,
}

impl GuidingSubspace {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "subspace capacity must be >= 1");
        GuidingSubspace {
            history: VecDeque::with_capacity(capacity),
            basis: Vec::new(),
            capacity,
        }
    }

    /// Number of retained, numerically independent directions.
    pub fn k_eff(&self) -> usize {
        self.basis.len()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Orthonormal basis columns spanning the retained history.
    pub fn basis(&self) -> &[ParamVector] {
        &self.basis
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    /// Append a surrogate gradient, evicting the oldest beyond capacity, and
    /// recompute the basis by column-pivoted Gram-Schmidt. Columns whose
    /// residual norm falls under 1e-10 times the largest column norm are
    /// dropped, reducing `k_eff`.
    pub fn update(&mut self, new_grad: &ParamVector) -> SubspaceUpdate {
        if new_grad.iter().all(|v| *v == 0.0) {
            return SubspaceUpdate::IgnoredZeroGradient;
        }
        if self.history.len() == self.capacity {
            self.history.pop_front();
        }
        self.history.push_back(new_grad.clone());
        self.recompute_basis();
        SubspaceUpdate::Updated
    }

    fn recompute_basis(&mut self) {
        let mut residuals: Vec<ParamVector> = self.history.iter().cloned().collect();
        let max_norm = residuals
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        let threshold = RANK_TOL * max_norm;

        self.basis.clear();
        while self.basis.len() < residuals.len() {
            // Pivot: take the residual with the largest norm.
            let (best, norm) = residuals
                .iter()
                .enumerate()
                .skip(self.basis.len())
                .map(|(i, c)| (i, c.norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if norm < threshold || norm == 0.0 {
                break;
            }
            residuals.swap(self.basis.len(), best);
            let mut q = residuals[self.basis.len()].scale(1.0 / norm);
            // One re-orthogonalization pass keeps U^T U = I to ~1e-15.
            for b in &self.basis {
                let proj = b.dot(&q);
                q.axpy(b, -proj);
            }
            let qn = q.norm();
            if qn < RANK_TOL {
                break;
            }
            let q = q.scale(1.0 / qn);
            for r in residuals.iter_mut().skip(self.basis.len() + 1) {
                let proj = q.dot(r);
                r.axpy(&q, -proj);
            }
            self.basis.push(q);
        }
    }

    /// Frobenius norm of U^T U - I.
    pub fn orthonormality_defect(&self) -> f64 {
        let k = self.basis.len();
        let mut sum = 0.0;
        for a in 0..k {
            for b in 0..k {
                let dot = self.basis[a].dot(&self.basis[b]);
                let target = if a == b { 1.0 } else { 0.0 };
                sum += (dot - target).powi(2);
            }
        }
        sum.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> ParamVector {
        ParamVector::new(v.to_vec())
    }

    #[test]
    fn single_gradient_normalizes() {
        let mut sub = GuidingSubspace::new(3);
        assert_eq!(sub.update(&pv(&[3.0, 0.0, 0.0])), SubspaceUpdate::Updated);
        assert_eq!(sub.k_eff(), 1);
        assert_eq!(sub.basis()[0].as_slice(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn duplicate_direction_keeps_rank_one() {
        let mut sub = GuidingSubspace::new(3);
        sub.update(&pv(&[1.0, 0.0, 0.0]));
        sub.update(&pv(&[1.0, 0.0, 0.0]));
        assert_eq!(sub.history_len(), 2);
        assert_eq!(sub.k_eff(), 1);
    }

    #[test]
    fn two_independent_columns_span_the_plane() {
        // History {[1,0,0], [1,1,0]}: span(U) = span(e1, e2).
        let mut sub = GuidingSubspace::new(3);
        sub.update(&pv(&[1.0, 0.0, 0.0]));
        sub.update(&pv(&[1.0, 1.0, 0.0]));
        assert_eq!(sub.k_eff(), 2);
        assert!(sub.orthonormality_defect() <= 1e-12);
        // Projector onto span(U) must match the projector onto the e1-e2 plane.
        for probe in [pv(&[1.0, 0.0, 0.0]), pv(&[0.0, 1.0, 0.0])] {
            let mut proj = ParamVector::zeros(3);
            for b in sub.basis() {
                proj.axpy(b, b.dot(&probe));
            }
            assert!(proj.sub(&probe).norm() < 1e-12);
        }
        let out_of_plane = pv(&[0.0, 0.0, 1.0]);
        let mut proj = ParamVector::zeros(3);
        for b in sub.basis() {
            proj.axpy(b, b.dot(&out_of_plane));
        }
        assert!(proj.norm() < 1e-12);
    }

    #[test]
    fn zero_gradient_is_ignored() {
        let mut sub = GuidingSubspace::new(2);
        sub.update(&pv(&[1.0, 2.0, 3.0]));
        let before = sub.history_len();
        assert_eq!(
            sub.update(&pv(&[0.0, 0.0, 0.0])),
            SubspaceUpdate::IgnoredZeroGradient
        );
        assert_eq!(sub.history_len(), before);
        assert_eq!(sub.k_eff(), 1);
    }

    #[test]
    fn eviction_keeps_only_recent_directions() {
        let mut sub = GuidingSubspace::new(2);
        sub.update(&pv(&[1.0, 0.0, 0.0]));
        sub.update(&pv(&[0.0, 1.0, 0.0]));
        sub.update(&pv(&[0.0, 0.0, 1.0]));
        assert_eq!(sub.history_len(), 2);
        assert_eq!(sub.k_eff(), 2);
        // e1 was evicted: nothing of the basis projects onto it.
        let e1 = pv(&[1.0, 0.0, 0.0]);
        for b in sub.basis() {
            assert!(b.dot(&e1).abs() < 1e-12);
        }
    }

    #[test]
    fn orthonormality_holds_for_random_histories() {
        use rand::Rng;
        let mut rng = crate::rng::substream(3, &[77]);
        for n in [5usize, 20, 60] {
            let mut sub = GuidingSubspace::new(4);
            for _ in 0..10 {
                let g: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                sub.update(&ParamVector::new(g));
                assert!(sub.orthonormality_defect() <= 1e-10);
                assert!(sub.k_eff() <= 4);
            }
        }
    }
}
