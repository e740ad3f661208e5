//! Minimal multilayer perceptron with hand-written backpropagation.
//! Hidden layers use tanh; the output layer is linear.

use crate::rng::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    /// Layer sizes, input first.
    pub sizes: Vec<usize>,
    /// Per layer, row-major `out x in`.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

/// Gradient accumulator shaped like an `Mlp`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrads {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl MlpGrads {
    pub fn zeros_like(net: &Mlp) -> Self {
        MlpGrads {
            weights: net.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: net.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn squared_norm(&self) -> f64 {
        self.weights
            .iter()
            .chain(self.biases.iter())
            .flat_map(|v| v.iter())
            .map(|g| g * g)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.squared_norm().sqrt()
    }
}

/// Post-activation values per layer; index 0 is the input itself.
pub type Activations = Vec<Vec<f64>>;

impl Mlp {
    /// Xavier-uniform initialization.
    pub fn new(sizes: &[usize], rng: &mut Rng) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output sizes");
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in sizes.windows(2) {
            let (n_in, n_out) = (pair[0], pair[1]);
            let bound = (6.0 / (n_in + n_out) as f64).sqrt();
            weights.push((0..n_in * n_out).map(|_| rng.uniform(-bound, bound)).collect());
            biases.push(vec![0.0; n_out]);
        }
        Mlp { sizes: sizes.to_vec(), weights, biases }
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn param_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.forward_full(x).pop().unwrap()
    }

    /// Forward pass keeping every layer's post-activation for backprop.
    pub fn forward_full(&self, x: &[f64]) -> Activations {
        debug_assert_eq!(x.len(), self.input_dim());
        let last = self.num_layers() - 1;
        let mut acts: Activations = Vec::with_capacity(self.num_layers() + 1);
        acts.push(x.to_vec());
        for l in 0..self.num_layers() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let input = &acts[l];
            let mut out = vec![0.0; n_out];
            for (i, o) in out.iter_mut().enumerate() {
                let row = &self.weights[l][i * n_in..(i + 1) * n_in];
                let mut acc = self.biases[l][i];
                for (w, v) in row.iter().zip(input.iter()) {
                    acc += w * v;
                }
                *o = if l == last { acc } else { acc.tanh() };
            }
            acts.push(out);
        }
        acts
    }

    /// Accumulate parameter gradients for dL/d(output) into `grads`.
    /// Returns dL/d(input) for callers that chain further.
    pub fn backward(&self, acts: &Activations, grad_out: &[f64], grads: &mut MlpGrads) -> Vec<f64> {
        let last = self.num_layers() - 1;
        let mut delta = grad_out.to_vec();
        for l in (0..self.num_layers()).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            // Output layer is linear; hidden layers need the tanh derivative.
            if l != last {
                for (d, a) in delta.iter_mut().zip(acts[l + 1].iter()) {
                    *d *= 1.0 - a * a;
                }
            }
            let input = &acts[l];
            for i in 0..n_out {
                let d = delta[i];
                grads.biases[l][i] += d;
                let row = &mut grads.weights[l][i * n_in..(i + 1) * n_in];
                for (g, v) in row.iter_mut().zip(input.iter()) {
                    *g += d * v;
                }
            }
            let mut grad_in = vec![0.0; n_in];
            for i in 0..n_out {
                let row = &self.weights[l][i * n_in..(i + 1) * n_in];
                let d = delta[i];
                for (gi, w) in grad_in.iter_mut().zip(row.iter()) {
                    *gi += d * w;
                }
            }
            delta = grad_in;
        }
        delta
    }

    /// One gradient-descent step: w -= lr * g.
    pub fn apply_gradients(&mut self, grads: &MlpGrads, lr: f64) {
        for (w, g) in self.weights.iter_mut().zip(grads.weights.iter()) {
            for (wi, gi) in w.iter_mut().zip(g.iter()) {
                *wi -= lr * gi;
            }
        }
        for (b, g) in self.biases.iter_mut().zip(grads.biases.iter()) {
            for (bi, gi) in b.iter_mut().zip(g.iter()) {
                *bi -= lr * gi;
            }
        }
    }

    /// Flat view of all parameters, for checksums and finite differences.
    pub fn params_mut(&mut self) -> Vec<&mut f64> {
        self.weights
            .iter_mut()
            .chain(self.biases.iter_mut())
            .flat_map(|v| v.iter_mut())
            .collect()
    }

    pub fn params(&self) -> Vec<f64> {
        self.weights
            .iter()
            .chain(self.biases.iter())
            .flat_map(|v| v.iter().copied())
            .collect()
    }
}

/// Concatenate state features with a one-hot skill code; the standard way a
/// skill conditions any network here.
pub fn skill_input(state: &[f64], z: usize, num_skills: usize) -> Vec<f64> {
    debug_assert!(z < num_skills);
    let mut x = Vec::with_capacity(state.len() + num_skills);
    x.extend_from_slice(state);
    for i in 0..num_skills {
        x.push(if i == z { 1.0 } else { 0.0 });
    }
    x
}
