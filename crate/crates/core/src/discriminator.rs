//! Discriminators estimating q(z|s), the posterior over skills given a
//! state: Laplace-smoothed counts for tabular states, a small softmax
//! classifier for continuous states, optionally reading only a feature
//! projection f(s) of the observation.

use crate::error::{Error, Result};
use crate::learner::mlp::{Mlp, MlpGrads};
use crate::learner::soft_q::{argmax, softmax_scaled};
use crate::rng::Rng;
use serde::{Deserialize, Serialize};

/// Selects which state coordinates the discriminator sees. Empty means the
/// raw state.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FeatureProjection {
    pub indices: Vec<usize>,
}

impl FeatureProjection {
    pub fn identity() -> Self {
        FeatureProjection { indices: Vec::new() }
    }

    pub fn coords(indices: Vec<usize>) -> Self {
        FeatureProjection { indices }
    }

    pub fn output_dim(&self, input_dim: usize) -> usize {
        if self.indices.is_empty() {
            input_dim
        } else {
            self.indices.len()
        }
    }

    pub fn apply(&self, state: &[f64]) -> Vec<f64> {
        if self.indices.is_empty() {
            state.to_vec()
        } else {
            self.indices.iter().map(|&i| state[i]).collect()
        }
    }

    pub fn validate(&self, input_dim: usize) -> Result<()> {
        for &i in &self.indices {
            if i >= input_dim {
                return Err(Error::config(format!(
                    "feature projection index {i} out of range for {input_dim}-dim states"
                )));
            }
        }
        Ok(())
    }
}

/// Count-based posterior with Laplace smoothing; unseen states predict
/// uniform, and smoothing keeps every probability strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabularDiscriminator {
    pub num_states: usize,
    pub num_skills: usize,
    /// Flat `[state][skill]` visit counts.
    pub counts: Vec<f64>,
    /// Smoothing pseudo-count.
    pub lambda: f64,
}

impl TabularDiscriminator {
    pub fn new(num_states: usize, num_skills: usize) -> Self {
        Self::with_smoothing(num_states, num_skills, 1.0)
    }

    pub fn with_smoothing(num_states: usize, num_skills: usize, lambda: f64) -> Self {
        assert!(lambda > 0.0, "smoothing must be positive");
        TabularDiscriminator {
            num_states,
            num_skills,
            counts: vec![0.0; num_states * num_skills],
            lambda,
        }
    }

    pub fn predict(&self, state: usize) -> Vec<f64> {
        let base = state * self.num_skills;
        let row = &self.counts[base..base + self.num_skills];
        let total: f64 = row.iter().sum();
        let denom = total + self.num_skills as f64 * self.lambda;
        row.iter().map(|c| (c + self.lambda) / denom).collect()
    }

    pub fn update(&mut self, state: usize, z_true: usize) {
        self.counts[state * self.num_skills + z_true] += 1.0;
    }
}

/// Bounded FIFO of labeled states the softmax discriminator trains from.
/// Sampling updates from recent history instead of the instantaneous
/// transition keeps the classifier from chasing the skill of the current
/// episode, which would otherwise reward every skill for any state it
/// happens to visit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscReplay {
    pub capacity: usize,
    pub states: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub cursor: usize,
}

impl DiscReplay {
    pub fn new(capacity: usize) -> Self {
        DiscReplay { capacity, states: Vec::new(), labels: Vec::new(), cursor: 0 }
    }

    pub fn push(&mut self, state: Vec<f64>, label: usize) {
        if self.states.len() < self.capacity {
            self.states.push(state);
            self.labels.push(label);
        } else {
            self.states[self.cursor] = state;
            self.labels[self.cursor] = label;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// MLP classifier over f(s), trained by one cross-entropy SGD step per
/// environment step, each step drawn from a bounded replay of the policy's
/// own recent transitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxDiscriminator {
    pub mlp: Mlp,
    pub num_skills: usize,
    pub lr: f64,
    pub projection: FeatureProjection,
    pub replay: DiscReplay,
}

impl SoftmaxDiscriminator {
    pub fn new(
        state_dim: usize,
        num_skills: usize,
        hidden: &[usize],
        lr: f64,
        projection: FeatureProjection,
        rng: &mut Rng,
    ) -> Self {
        let input_dim = projection.output_dim(state_dim);
        let mut sizes = vec![input_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(num_skills);
        SoftmaxDiscriminator {
            mlp: Mlp::new(&sizes, rng),
            num_skills,
            lr,
            projection,
            replay: DiscReplay::new(4096),
        }
    }

    pub fn predict(&self, state: &[f64]) -> Vec<f64> {
        let logits = self.mlp.forward(&self.projection.apply(state));
        softmax_scaled(&logits, 1.0)
    }

    /// Cross-entropy loss of a single labeled state; used by the gradient
    /// check.
    pub fn loss(&self, state: &[f64], z_true: usize) -> f64 {
        -self.predict(state)[z_true].ln()
    }

    pub fn gradients(&self, state: &[f64], z_true: usize) -> MlpGrads {
        let input = self.projection.apply(state);
        let acts = self.mlp.forward_full(&input);
        let probs = softmax_scaled(acts.last().unwrap(), 1.0);
        let mut grad_out = probs;
        grad_out[z_true] -= 1.0;
        let mut grads = MlpGrads::zeros_like(&self.mlp);
        self.mlp.backward(&acts, &grad_out, &mut grads);
        grads
    }

    /// One SGD step on the cross-entropy of (state, z_true).
    pub fn update(&mut self, state: &[f64], z_true: usize) {
        let grads = self.gradients(state, z_true);
        self.mlp.apply_gradients(&grads, self.lr);
    }

    /// Record the fresh transition, then take one SGD step on a sample drawn
    /// from the replay window.
    pub fn update_replayed(&mut self, state: &[f64], z_true: usize, rng: &mut Rng) {
        self.replay.push(state.to_vec(), z_true);
        let i = rng.below(self.replay.len());
        let sample_state = self.replay.states[i].clone();
        let sample_label = self.replay.labels[i];
        self.update(&sample_state, sample_label);
    }
}

/// Either discriminator behind one prediction surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Discriminator {
    Tabular(TabularDiscriminator),
    Softmax(SoftmaxDiscriminator),
}

impl Discriminator {
    pub fn num_skills(&self) -> usize {
        match self {
            Discriminator::Tabular(d) => d.num_skills,
            Discriminator::Softmax(d) => d.num_skills,
        }
    }

    /// Posterior over skills for a state given as (features, tabular index).
    pub fn predict(&self, features: &[f64], index: Option<usize>) -> Vec<f64> {
        match self {
            Discriminator::Tabular(d) => d.predict(index.expect("tabular state index")),
            Discriminator::Softmax(d) => d.predict(features),
        }
    }

    pub fn update(&mut self, features: &[f64], index: Option<usize>, z_true: usize) {
        match self {
            Discriminator::Tabular(d) => d.update(index.expect("tabular state index"), z_true),
            Discriminator::Softmax(d) => d.update(features, z_true),
        }
    }
}

/// Fraction of states whose argmax prediction matches the generating skill;
/// argmax ties break to the lowest index.
pub fn disc_accuracy(predictions: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    if predictions.is_empty() || predictions.len() != labels.len() {
        return Err(Error::input("accuracy needs a non-empty labeled batch"));
    }
    let hits = predictions
        .iter()
        .zip(labels.iter())
        .filter(|(p, &z)| argmax(p) == z)
        .count();
    Ok(hits as f64 / labels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use proptest::prelude::*;

    #[test]
    fn unseen_state_predicts_uniform() {
        let d = TabularDiscriminator::new(4, 2);
        assert_eq!(d.predict(3), vec![0.5, 0.5]);
    }

    #[test]
    fn smoothed_count_formula() {
        let mut d = TabularDiscriminator::new(2, 2);
        d.update(0, 0);
        let p = d.predict(0);
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_update_prediction() {
        // One observation: predicted mass on the label is (1+l)/(1+Kl).
        let lambda = 0.5;
        let mut d = TabularDiscriminator::with_smoothing(3, 4, lambda);
        d.update(1, 2);
        let p = d.predict(1);
        assert!((p[2] - (1.0 + lambda) / (1.0 + 4.0 * lambda)).abs() < 1e-12);
    }

    #[test]
    fn zero_logits_predict_uniform() {
        let mut rng = Rng::seed_from(2);
        let mut d = SoftmaxDiscriminator::new(2, 4, &[8], 0.1, FeatureProjection::identity(), &mut rng);
        for w in d.mlp.weights.iter_mut().flat_map(|v| v.iter_mut()) {
            *w = 0.0;
        }
        for p in d.predict(&[0.3, 0.7]) {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_lr_softmax_update_is_noop() {
        let mut rng = Rng::seed_from(3);
        let mut d = SoftmaxDiscriminator::new(2, 3, &[4], 0.0, FeatureProjection::identity(), &mut rng);
        let before = d.mlp.params();
        d.update(&[0.1, 0.9], 1);
        assert_eq!(d.mlp.params(), before);
    }

    #[test]
    fn softmax_gradient_matches_finite_differences() {
        let mut rng = Rng::seed_from(17);
        for _ in 0..5 {
            let mut d =
                SoftmaxDiscriminator::new(2, 3, &[4], 0.1, FeatureProjection::identity(), &mut rng);
            let state = [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
            let z = rng.below(3);
            let grads = d.gradients(&state, z);
            let flat: Vec<f64> = grads
                .weights
                .iter()
                .chain(grads.biases.iter())
                .flat_map(|v| v.iter().copied())
                .collect();
            let h = 1e-5;
            for p in 0..d.mlp.param_count() {
                let orig = *d.mlp.params_mut()[p];
                *d.mlp.params_mut()[p] = orig + h;
                let up = d.loss(&state, z);
                *d.mlp.params_mut()[p] = orig - h;
                let down = d.loss(&state, z);
                *d.mlp.params_mut()[p] = orig;
                let numeric = (up - down) / (2.0 * h);
                let denom = numeric.abs().max(flat[p].abs()).max(1e-6);
                assert!(
                    (numeric - flat[p]).abs() / denom < 1e-4,
                    "param {p}: {numeric} vs {}",
                    flat[p]
                );
            }
        }
    }

    #[test]
    fn projection_restricts_input() {
        let mut rng = Rng::seed_from(4);
        let proj = FeatureProjection::coords(vec![0]);
        let d = SoftmaxDiscriminator::new(2, 2, &[4], 0.1, proj, &mut rng);
        assert_eq!(d.mlp.input_dim(), 1);
        // Predictions ignore the projected-out coordinate entirely.
        let a = d.predict(&[0.4, 0.1]);
        let b = d.predict(&[0.4, 0.9]);
        assert_eq!(a, b);
    }

    #[test]
    fn projection_index_validation() {
        assert!(FeatureProjection::coords(vec![2]).validate(2).is_err());
        assert!(FeatureProjection::coords(vec![0, 1]).validate(2).is_ok());
    }

    #[test]
    fn accuracy_on_separable_data() {
        let mut d = TabularDiscriminator::new(2, 2);
        for _ in 0..50 {
            d.update(0, 0);
            d.update(1, 1);
        }
        let preds = vec![d.predict(0), d.predict(1)];
        assert_eq!(disc_accuracy(&preds, &[0, 1]).unwrap(), 1.0);
    }

    #[test]
    fn uniform_predictor_balanced_labels() {
        // Ties break to index 0, so a uniform predictor scores the label-0
        // fraction: exactly one half on a balanced batch.
        let preds = vec![vec![0.5, 0.5]; 10];
        let labels = [0, 1, 0, 1, 0, 1, 0, 1, 0, 1];
        assert_eq!(disc_accuracy(&preds, &labels).unwrap(), 0.5);
    }

    #[test]
    fn permuted_labels_score_near_chance() {
        // Confident predictor, labels shuffled at random: accuracy should sit
        // near 1/K within 3 sigma of the binomial deviation.
        let k = 4;
        let n = 4000;
        let mut rng = Rng::seed_from(9);
        let mut preds = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let mut p = vec![0.02; k];
            p[rng.below(k)] = 0.94;
            preds.push(p);
            labels.push(rng.below(k));
        }
        let acc = disc_accuracy(&preds, &labels).unwrap();
        let p = 1.0 / k as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((acc - p).abs() < 3.0 * sigma, "accuracy {acc} vs chance {p}");
    }

    #[test]
    fn empty_batch_is_input_error() {
        assert!(matches!(disc_accuracy(&[], &[]), Err(Error::Input(_))));
    }

    #[test]
    fn tabular_converges_to_empirical_frequencies() {
        // The smoothing washes out at rate Kl/(n+Kl) in sup norm.
        let mut d = TabularDiscriminator::new(1, 2);
        let mut n = 0.0;
        for i in 0..400 {
            d.update(0, if i % 4 == 0 { 1 } else { 0 });
            n += 1.0;
            let p = d.predict(0);
            let emp0 = d.counts[0] / n;
            let bound = 2.0 * d.lambda / (n + 2.0 * d.lambda);
            assert!((p[0] - emp0).abs() <= bound + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn predictions_always_sum_to_one(
            c0 in 0.0f64..100.0, c1 in 0.0f64..100.0, c2 in 0.0f64..100.0,
        ) {
            let mut d = TabularDiscriminator::new(1, 3);
            d.counts = vec![c0, c1, c2];
            let p = d.predict(0);
            let total: f64 = p.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            prop_assert!(p.iter().all(|&x| x > 0.0));
        }

        #[test]
        fn softmax_predictions_sum_to_one(s0 in -2.0f64..2.0, s1 in -2.0f64..2.0, seed in 0u64..32) {
            let mut rng = Rng::seed_from(seed);
            let d = SoftmaxDiscriminator::new(
                2, 5, &[6], 0.1, FeatureProjection::identity(), &mut rng,
            );
            let p = d.predict(&[s0, s1]);
            let total: f64 = p.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }
}
