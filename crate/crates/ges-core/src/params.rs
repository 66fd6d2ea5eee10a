use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Flat vector of policy parameters. The single search-space point type shared
/// by the simulators, the first-order optimizers and the evolution strategies.
///
/// Length is fixed by the policy architecture for the lifetime of an
/// experiment; every operation that returns a `ParamVector` keeps all entries
/// finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Self {
        ParamVector(values)
    }

    pub fn zeros(n: usize) -> Self {
        ParamVector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFiniteGradient)
        }
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &ParamVector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }

    /// self + scale * other, element-wise.
    pub fn add_scaled(&self, other: &ParamVector, scale: f64) -> ParamVector {
        debug_assert_eq!(self.len(), other.len());
        ParamVector(
            self.0
                .iter()
                .zip(other.iter())
                .map(|(a, b)| a + scale * b)
                .collect(),
        )
    }

    /// In-place self += scale * other.
    pub fn axpy(&mut self, other: &ParamVector, scale: f64) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.0.iter_mut().zip(other.iter()) {
            *a += scale * b;
        }
    }

    pub fn sub(&self, other: &ParamVector) -> ParamVector {
        self.add_scaled(other, -1.0)
    }

    pub fn scale(&self, factor: f64) -> ParamVector {
        ParamVector(self.0.iter().map(|v| v * factor).collect())
    }
}

impl std::ops::Index<usize> for ParamVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for ParamVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(values: Vec<f64>) -> Self {
        ParamVector(values)
    }
}

/// Result of one simulator episode: scalar cost, the visited states, and
/// (for the differentiable path) the cost gradient w.r.t. the parameters.
#[derive(Debug, Clone)]
pub struct RolloutResult<S> {
    pub cost: f64,
    pub trajectory: Vec<S>,
    pub grad: Option<ParamVector>,
}
