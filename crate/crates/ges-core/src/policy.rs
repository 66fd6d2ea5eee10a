//! Small feedforward policy networks evaluated by both simulators.
//!
//! Parameters live in a flat [`ParamVector`] with a layer-major packing: for
//! each layer in order, the weight matrix row-major (`fan_out` rows of
//! `fan_in` entries) followed by the `fan_out` biases. ES-side vector
//! arithmetic never needs to know the structure.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::ops::Range;

use crate::error::{Error, Result};
use crate::params::ParamVector;
use crate::rng::{substream, tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Tanh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputSquash {
    Tanh,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub output_dim: usize,
    pub activation: Activation,
    pub output_squash: OutputSquash,
}

impl MlpSpec {
    /// Single hidden layer of tanh units with a tanh-squashed output, the
    /// default policy shape for both simulators.
    pub fn tanh_policy(input_dim: usize, hidden: usize, output_dim: usize) -> Self {
        MlpSpec {
            input_dim,
            hidden_dims: vec![hidden],
            output_dim,
            activation: Activation::Tanh,
            output_squash: OutputSquash::Tanh,
        }
    }

    /// Layer sizes as (fan_in, fan_out) pairs.
    pub fn layers(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.hidden_dims.len() + 2);
        dims.push(self.input_dim);
        dims.extend_from_slice(&self.hidden_dims);
        dims.push(self.output_dim);
        dims.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Total parameter count: sum over layers of (fan_in + 1) * fan_out.
    pub fn total_param_count(&self) -> usize {
        self.layers()
            .iter()
            .map(|&(fi, fo)| (fi + 1) * fo)
            .sum()
    }

    /// Index ranges partitioning the flat vector by layer, in packing order.
    /// Used as optimizer parameter groups.
    pub fn param_groups(&self) -> Vec<Range<usize>> {
        let mut groups = Vec::new();
        let mut offset = 0;
        for (fi, fo) in self.layers() {
            let len = (fi + 1) * fo;
            groups.push(offset..offset + len);
            offset += len;
        }
        groups
    }

    fn check_params(&self, params: &ParamVector) -> Result<()> {
        let expected = self.total_param_count();
        if params.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "mlp params",
                expected,
                actual: params.len(),
            });
        }
        Ok(())
    }

    fn check_obs(&self, obs: &[f64]) -> Result<()> {
        if obs.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                context: "mlp observation",
                expected: self.input_dim,
                actual: obs.len(),
            });
        }
        Ok(())
    }
}

/// Seeded parameter initialization: weights uniform in
/// [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
pub fn init_params(spec: &MlpSpec, seed: u64) -> ParamVector {
    let mut rng = substream(seed, &[tag::INIT]);
    let mut values = Vec::with_capacity(spec.total_param_count());
    for (fan_in, fan_out) in spec.layers() {
        let bound = 1.0 / (fan_in as f64).sqrt();
        for _ in 0..fan_in * fan_out {
            values.push(rng.random_range(-bound..bound));
        }
        values.extend(std::iter::repeat(0.0).take(fan_out));
    }
    ParamVector::new(values)
}

/// Forward pass. Hidden layers apply tanh; the output layer applies the
/// configured squash.
pub fn mlp_forward(spec: &MlpSpec, params: &ParamVector, obs: &[f64]) -> Result<Vec<f64>> {
    spec.check_params(params)?;
    spec.check_obs(obs)?;
    let p = params.as_slice();
    let layers = spec.layers();
    let last = layers.len() - 1;

    let mut activation = obs.to_vec();
    let mut offset = 0;
    for (l, &(fan_in, fan_out)) in layers.iter().enumerate() {
        let weights = &p[offset..offset + fan_in * fan_out];
        let biases = &p[offset + fan_in * fan_out..offset + (fan_in + 1) * fan_out];
        offset += (fan_in + 1) * fan_out;

        let mut next = Vec::with_capacity(fan_out);
        for o in 0..fan_out {
            let row = &weights[o * fan_in..(o + 1) * fan_in];
            let z: f64 = row
                .iter()
                .zip(activation.iter())
                .map(|(w, a)| w * a)
                .sum::<f64>()
                + biases[o];
            let squash = if l < last {
                true
            } else {
                spec.output_squash == OutputSquash::Tanh
            };
            next.push(if squash { z.tanh() } else { z });
        }
        activation = next;
    }
    Ok(activation)
}

/// Forward pass plus exact reverse-mode derivatives of
/// `out_adjoint . output` w.r.t. the parameters and the observation.
pub fn mlp_forward_backward(
    spec: &MlpSpec,
    params: &ParamVector,
    obs: &[f64],
    out_adjoint: &[f64],
) -> Result<(Vec<f64>, ParamVector, Vec<f64>)> {
    spec.check_params(params)?;
    spec.check_obs(obs)?;
    if out_adjoint.len() != spec.output_dim {
        return Err(Error::DimensionMismatch {
            context: "mlp output adjoint",
            expected: spec.output_dim,
            actual: out_adjoint.len(),
        });
    }

    let p = params.as_slice();
    let layers = spec.layers();
    let last = layers.len() - 1;

    // Forward, keeping each layer's input activation and post-squash output.
    let mut activations: Vec<Vec<f64>> = vec![obs.to_vec()];
    let mut offsets = Vec::with_capacity(layers.len());
    let mut offset = 0;
    for (l, &(fan_in, fan_out)) in layers.iter().enumerate() {
        offsets.push(offset);
        let weights = &p[offset..offset + fan_in * fan_out];
        let biases = &p[offset + fan_in * fan_out..offset + (fan_in + 1) * fan_out];
        offset += (fan_in + 1) * fan_out;

        let input = activations.last().unwrap();
        let squash = l < last || spec.output_squash == OutputSquash::Tanh;
        let mut out = Vec::with_capacity(fan_out);
        for o in 0..fan_out {
            let row = &weights[o * fan_in..(o + 1) * fan_in];
            let z: f64 =
                row.iter().zip(input.iter()).map(|(w, a)| w * a).sum::<f64>() + biases[o];
            out.push(if squash { z.tanh() } else { z });
        }
        activations.push(out);
    }

    // Reverse sweep. With y = tanh(z), dy/dz = 1 - y^2 recovered from the
    // stored post-activation value.
    let mut param_grad = vec![0.0; params.len()];
    let mut delta = out_adjoint.to_vec();
    for (l, &(fan_in, fan_out)) in layers.iter().enumerate().rev() {
        let squash = l < last || spec.output_squash == OutputSquash::Tanh;
        let output = &activations[l + 1];
        let input = &activations[l];
        let base = offsets[l];

        // Through the nonlinearity.
        let dz: Vec<f64> = if squash {
            delta
                .iter()
                .zip(output.iter())
                .map(|(d, y)| d * (1.0 - y * y))
                .collect()
        } else {
            delta.clone()
        };

        let weights = &p[base..base + fan_in * fan_out];
        let mut prev_delta = vec![0.0; fan_in];
        for o in 0..fan_out {
            let row = &weights[o * fan_in..(o + 1) * fan_in];
            for i in 0..fan_in {
                param_grad[base + o * fan_in + i] += dz[o] * input[i];
                prev_delta[i] += dz[o] * row[i];
            }
            param_grad[base + fan_in * fan_out + o] += dz[o];
        }
        delta = prev_delta;
    }

    let output = activations.pop().unwrap();
    Ok((output, ParamVector::new(param_grad), delta))
}
