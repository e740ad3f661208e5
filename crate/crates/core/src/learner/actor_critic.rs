//! Skill-conditioned Gaussian policy and soft value network for continuous
//! environments, trained with Monte-Carlo-return advantages plus an entropy
//! bonus. All gradients are hand-derived and checked against finite
//! differences in the tests.

use crate::error::{Error, Result};
use crate::learner::mlp::{skill_input, Mlp, MlpGrads};
use crate::rng::Rng;
use serde::{Deserialize, Serialize};

pub const LOG_STD_MIN: f64 = -5.0;
pub const LOG_STD_MAX: f64 = 2.0;
const SQUASH_EPS: f64 = 1e-9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;
const HALF_LN_2PI_E: f64 = 1.418_938_533_204_672_7;

/// Policy head: (state ⊕ one-hot skill) -> (mean, raw log-std) per action
/// dimension. Raw log-stds are squashed smoothly into
/// [`LOG_STD_MIN`, `LOG_STD_MAX`]; actions are squashed into the symmetric
/// action box by `scale * tanh(u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPolicyNet {
    pub mlp: Mlp,
    pub action_scale: Vec<f64>,
    pub state_dim: usize,
    pub num_skills: usize,
}

/// One policy draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSample {
    /// Squashed action inside the box.
    pub action: Vec<f64>,
    /// Log-density of `action`, including the squashing Jacobian correction.
    pub log_prob: f64,
    /// Pre-squash Gaussian draw, kept for the policy-gradient update.
    pub presquash: Vec<f64>,
}

fn bound_log_std(raw: f64) -> f64 {
    LOG_STD_MIN + (LOG_STD_MAX - LOG_STD_MIN) * 0.5 * (raw.tanh() + 1.0)
}

fn bound_log_std_grad(raw: f64) -> f64 {
    let t = raw.tanh();
    (LOG_STD_MAX - LOG_STD_MIN) * 0.5 * (1.0 - t * t)
}

impl GaussianPolicyNet {
    pub fn new(
        state_dim: usize,
        num_skills: usize,
        action_scale: Vec<f64>,
        hidden: &[usize],
        rng: &mut Rng,
    ) -> Self {
        let mut sizes = vec![state_dim + num_skills];
        sizes.extend_from_slice(hidden);
        sizes.push(2 * action_scale.len());
        let mut mlp = Mlp::new(&sizes, rng);
        // Upweight the one-hot skill inputs so skills start with visibly
        // different mean-action fields; the discriminator then has a signal
        // to latch onto from the first episodes.
        let n_in = sizes[0];
        let n_out = sizes[1];
        for row in 0..n_out {
            for col in state_dim..n_in {
                mlp.weights[0][row * n_in + col] *= 3.0;
            }
        }
        GaussianPolicyNet { mlp, action_scale, state_dim, num_skills }
    }

    pub fn action_dim(&self) -> usize {
        self.action_scale.len()
    }

    pub fn input(&self, state: &[f64], z: usize) -> Vec<f64> {
        skill_input(state, z, self.num_skills)
    }

    /// Mean and bounded log-std for a network input.
    pub fn mean_log_std_of_input(&self, input: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let raw = self.mlp.forward(input);
        let a = self.action_dim();
        let mean = raw[..a].to_vec();
        let log_std = raw[a..].iter().map(|&t| bound_log_std(t)).collect();
        (mean, log_std)
    }

    pub fn mean_log_std(&self, state: &[f64], z: usize) -> (Vec<f64>, Vec<f64>) {
        self.mean_log_std_of_input(&self.input(state, z))
    }

    /// Draw an action with explicit standard-normal noise.
    pub fn sample_with_noise(&self, state: &[f64], z: usize, noise: &[f64]) -> Result<ActionSample> {
        let (mean, log_std) = self.mean_log_std(state, z);
        if !mean.iter().chain(log_std.iter()).all(|x| x.is_finite()) {
            return Err(Error::numeric("policy head produced non-finite outputs"));
        }
        let mut action = Vec::with_capacity(mean.len());
        let mut presquash = Vec::with_capacity(mean.len());
        let mut log_prob = 0.0;
        for i in 0..mean.len() {
            let std = log_std[i].exp();
            let u = mean[i] + std * noise[i];
            let t = u.tanh();
            action.push(self.action_scale[i] * t);
            presquash.push(u);
            let zscore = (u - mean[i]) / std;
            log_prob += -HALF_LN_2PI - log_std[i] - 0.5 * zscore * zscore;
            log_prob -= (self.action_scale[i] * (1.0 - t * t) + SQUASH_EPS).ln();
        }
        Ok(ActionSample { action, log_prob, presquash })
    }

    pub fn sample(&self, state: &[f64], z: usize, rng: &mut Rng) -> Result<ActionSample> {
        let noise: Vec<f64> = (0..self.action_dim()).map(|_| rng.next_normal()).collect();
        self.sample_with_noise(state, z, &noise)
    }

    /// Deterministic action at the distribution mode.
    pub fn mean_action(&self, state: &[f64], z: usize) -> Vec<f64> {
        let (mean, _) = self.mean_log_std(state, z);
        mean.iter()
            .zip(self.action_scale.iter())
            .map(|(m, s)| s * m.tanh())
            .collect()
    }

    /// Log-density of a given in-box action (inverse squash + Jacobian).
    pub fn log_density(&self, state: &[f64], z: usize, action: &[f64]) -> f64 {
        let (mean, log_std) = self.mean_log_std(state, z);
        let mut lp = 0.0;
        for i in 0..mean.len() {
            let ratio = (action[i] / self.action_scale[i]).clamp(-1.0 + 1e-12, 1.0 - 1e-12);
            let u = ratio.atanh();
            let std = log_std[i].exp();
            let zscore = (u - mean[i]) / std;
            lp += -HALF_LN_2PI - log_std[i] - 0.5 * zscore * zscore;
            lp -= (self.action_scale[i] * (1.0 - ratio * ratio) + SQUASH_EPS).ln();
        }
        lp
    }
}

/// Soft state-value head: (state ⊕ one-hot skill) -> scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueNet {
    pub mlp: Mlp,
    pub state_dim: usize,
    pub num_skills: usize,
}

impl ValueNet {
    pub fn new(state_dim: usize, num_skills: usize, hidden: &[usize], rng: &mut Rng) -> Self {
        let mut sizes = vec![state_dim + num_skills];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        ValueNet { mlp: Mlp::new(&sizes, rng), state_dim, num_skills }
    }

    pub fn value_of_input(&self, input: &[f64]) -> f64 {
        self.mlp.forward(input)[0]
    }

    pub fn value(&self, state: &[f64], z: usize) -> f64 {
        self.value_of_input(&skill_input(state, z, self.num_skills))
    }
}

/// One episode's transitions, already paired with the conditioning input.
#[derive(Debug, Clone, Default)]
pub struct EpisodeBatch {
    /// Per step: (s_t ⊕ one-hot z).
    pub inputs: Vec<Vec<f64>>,
    /// Per step: the pre-squash Gaussian draw u_t.
    pub presquash: Vec<Vec<f64>>,
    /// Per step: reward r_t.
    pub rewards: Vec<f64>,
    /// (s_T ⊕ one-hot z) for the bootstrap tail of truncated episodes.
    pub final_input: Vec<f64>,
    /// True terminations carry no tail value; truncations bootstrap.
    pub terminal: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct AcHyper {
    pub alpha: f64,
    pub gamma: f64,
    pub actor_lr: f64,
    pub value_lr: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct UpdateStats {
    pub mean_return: f64,
    pub actor_grad_norm: f64,
    pub value_grad_norm: f64,
}

/// Discounted returns with a bootstrapped tail value for the truncation.
pub fn discounted_returns(rewards: &[f64], gamma: f64, bootstrap: f64) -> Vec<f64> {
    let mut returns = vec![0.0; rewards.len()];
    let mut acc = bootstrap;
    for (t, &r) in rewards.iter().enumerate().rev() {
        acc = r + gamma * acc;
        returns[t] = acc;
    }
    returns
}

/// Mean over the batch of
/// `-advantage * log N(u; mean, std) - alpha * H[Gaussian(std)]`,
/// with advantages and pre-squash draws held fixed. The squashing Jacobian
/// is constant in the parameters given `u`, so it does not appear here.
pub fn actor_loss(
    actor: &GaussianPolicyNet,
    inputs: &[Vec<f64>],
    presquash: &[Vec<f64>],
    advantages: &[f64],
    alpha: f64,
) -> f64 {
    let b = inputs.len() as f64;
    let mut loss = 0.0;
    for ((input, u), &adv) in inputs.iter().zip(presquash.iter()).zip(advantages.iter()) {
        let (mean, log_std) = actor.mean_log_std_of_input(input);
        let mut log_n = 0.0;
        let mut ent = 0.0;
        for i in 0..mean.len() {
            let std = log_std[i].exp();
            let zscore = (u[i] - mean[i]) / std;
            log_n += -HALF_LN_2PI - log_std[i] - 0.5 * zscore * zscore;
            ent += log_std[i] + HALF_LN_2PI_E;
        }
        loss += -adv * log_n - alpha * ent;
    }
    loss / b
}

pub fn actor_gradients(
    actor: &GaussianPolicyNet,
    inputs: &[Vec<f64>],
    presquash: &[Vec<f64>],
    advantages: &[f64],
    alpha: f64,
) -> MlpGrads {
    let b = inputs.len() as f64;
    let a_dim = actor.action_dim();
    let mut grads = MlpGrads::zeros_like(&actor.mlp);
    for ((input, u), &adv) in inputs.iter().zip(presquash.iter()).zip(advantages.iter()) {
        let acts = actor.mlp.forward_full(input);
        let raw = acts.last().unwrap().clone();
        let mut grad_out = vec![0.0; 2 * a_dim];
        for i in 0..a_dim {
            let mean = raw[i];
            let log_std = bound_log_std(raw[a_dim + i]);
            let inv_var = (-2.0 * log_std).exp();
            let diff = u[i] - mean;
            // d/dmean of -adv*logN.
            grad_out[i] = -adv * diff * inv_var / b;
            // d/dlog_std of (-adv*logN - alpha*H), chained through the bound.
            let dls = (-adv * (diff * diff * inv_var - 1.0) - alpha) / b;
            grad_out[a_dim + i] = dls * bound_log_std_grad(raw[a_dim + i]);
        }
        actor.mlp.backward(&acts, &grad_out, &mut grads);
    }
    grads
}

/// Mean squared error of the value head against fixed targets.
pub fn value_loss(value: &ValueNet, inputs: &[Vec<f64>], targets: &[f64]) -> f64 {
    let b = inputs.len() as f64;
    inputs
        .iter()
        .zip(targets.iter())
        .map(|(input, &g)| {
            let v = value.value_of_input(input);
            (v - g) * (v - g)
        })
        .sum::<f64>()
        / b
}

pub fn value_gradients(value: &ValueNet, inputs: &[Vec<f64>], targets: &[f64]) -> MlpGrads {
    let b = inputs.len() as f64;
    let mut grads = MlpGrads::zeros_like(&value.mlp);
    for (input, &g) in inputs.iter().zip(targets.iter()) {
        let acts = value.mlp.forward_full(input);
        let v = acts.last().unwrap()[0];
        value.mlp.backward(&acts, &[2.0 * (v - g) / b], &mut grads);
    }
    grads
}

/// One gradient step on the entropy-regularized actor and value losses for a
/// full episode batch. Advantages are standardized within the episode before
/// the policy-gradient step; raw returns remain the value targets.
pub fn actor_critic_update(
    actor: &mut GaussianPolicyNet,
    value: &mut ValueNet,
    batch: &EpisodeBatch,
    hyper: AcHyper,
) -> Result<UpdateStats> {
    if batch.inputs.is_empty() {
        return Err(Error::input("episode batch is empty"));
    }
    let bootstrap = if batch.terminal {
        0.0
    } else {
        value.value_of_input(&batch.final_input)
    };
    let returns = discounted_returns(&batch.rewards, hyper.gamma, bootstrap);
    let mut advantages: Vec<f64> = batch
        .inputs
        .iter()
        .zip(returns.iter())
        .map(|(input, &g)| g - value.value_of_input(input))
        .collect();
    let n = advantages.len() as f64;
    let mean = advantages.iter().sum::<f64>() / n;
    let var = advantages.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    for a in advantages.iter_mut() {
        *a = (*a - mean) / (std + 1e-8);
    }

    let value_grads = value_gradients(value, &batch.inputs, &returns);
    let actor_grads = actor_gradients(actor, &batch.inputs, &batch.presquash, &advantages, hyper.alpha);

    let actor_norm = actor_grads.norm();
    let value_norm = value_grads.norm();
    if !actor_norm.is_finite() || !value_norm.is_finite() || actor_norm > 1e6 || value_norm > 1e6 {
        return Err(Error::numeric(format!(
            "exploding gradient: actor norm {actor_norm:.3e}, value norm {value_norm:.3e}, \
             mean return {:.3e}",
            returns.iter().sum::<f64>() / returns.len() as f64
        )));
    }

    actor.mlp.apply_gradients(&actor_grads, hyper.actor_lr);
    value.mlp.apply_gradients(&value_grads, hyper.value_lr);

    Ok(UpdateStats {
        mean_return: returns[0],
        actor_grad_norm: actor_norm,
        value_grad_norm: value_norm,
    })
}
