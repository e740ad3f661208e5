//! Skill-conditioned maximum-entropy learners: tabular soft Q-learning for
//! discrete environments, Gaussian-policy actor-critic for continuous ones.

pub mod actor_critic;
pub mod mlp;
pub mod soft_q;

pub use actor_critic::{
    actor_critic_update, actor_gradients, actor_loss, discounted_returns, value_gradients,
    value_loss, AcHyper, ActionSample, EpisodeBatch, GaussianPolicyNet, UpdateStats, ValueNet,
    LOG_STD_MAX, LOG_STD_MIN,
};
pub use mlp::{skill_input, Mlp, MlpGrads};
pub use soft_q::{argmax, policy_entropy, soft_value_of_row, softmax_scaled, SoftQTable};
