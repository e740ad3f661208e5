//! Unsupervised skill discovery at desk scale.
//!
//! Skills are latent-conditioned maximum-entropy policies trained on a
//! mutual-information pseudo-reward: a discriminator learns to infer the
//! active skill from visited states, and each skill is rewarded for visiting
//! states the discriminator attributes to it. The crate provides the
//! environments, both learner families, the discriminators, the training
//! loop, exact gridworld analytics for the objective's closed-form optimum,
//! and the downstream uses of a trained skill set (finetuning, hierarchical
//! control, imitation).

pub mod checkpoint;
pub mod diayn;
pub mod discriminator;
pub mod downstream;
pub mod envs;
pub mod error;
pub mod info;
pub mod learner;
pub mod metrics;
pub mod oracle;
pub mod rng;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use diayn::{
    effective_num_skills, estimate_objective, pseudo_reward, resume_train, reward_histogram,
    rollout, run_episode, train, update_learned_prior, Agent, DiscInput, MetricRecord,
    ObjectiveReport, PriorMode, SkillPrior, StepRecord, TrainConfig, TrainResult, TrainState,
    Trajectory,
};
pub use discriminator::{
    disc_accuracy, Discriminator, FeatureProjection, SoftmaxDiscriminator, TabularDiscriminator,
};
pub use downstream::{
    eval_skill_return, finetune, imitate, imitate_with, meta_eval, meta_train, select_best_skill,
    trajectory_distance, ExpertTrajectory, FinetuneResult, InitMode, MetaController, MetaResult,
};
pub use envs::{Action, Env, EnvConfig, GridWorld, HallwayRoom, MountainCar, Move, PointBox, TaskReward};
pub use error::{Error, Result};
pub use rng::Rng;
