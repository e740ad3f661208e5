//! The core skill-discovery training loop: sample a skill from the prior,
//! roll out its policy, reward states the discriminator attributes to the
//! skill, and update learner and discriminator online. Also hosts prior
//! management (fixed-uniform vs learned) and objective estimation.

use crate::discriminator::{FeatureProjection, SoftmaxDiscriminator, TabularDiscriminator};
use crate::envs::{Action, Env, EnvConfig, TaskReward};
use crate::error::{Error, Result};
use crate::info::entropy;
use crate::learner::{
    actor_critic_update, argmax, skill_input, AcHyper, EpisodeBatch, GaussianPolicyNet,
    SoftQTable, ValueNet,
};
use crate::rng::Rng;
use serde::{Deserialize, Serialize};

const HALF_LN_2PI_E: f64 = 1.418_938_533_204_672_7;

/// Skill reward: log q(z|s) - log p(z) with the baseline subtracted, or the
/// bare log q(z|s) when the baseline is disabled.
pub fn pseudo_reward(q_vec: &[f64], prior: &[f64], z: usize, baseline: bool) -> Result<f64> {
    if z >= q_vec.len() || z >= prior.len() {
        return Err(Error::input(format!("skill {z} out of range")));
    }
    let r = q_vec[z].ln();
    Ok(if baseline { r - prior[z].ln() } else { r })
}

/// exp(H[Z]): how many skills a prior meaningfully samples.
pub fn effective_num_skills(prior: &[f64]) -> f64 {
    entropy(prior).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorMode {
    FixedUniform,
    Learned,
}

/// Categorical skill distribution. Fixed-uniform mode never mutates `p`, so
/// the vector stays bit-identical for the whole run. Learned mode tracks an
/// exponential moving average `ell` of each skill's mean discriminator
/// log-probability and renormalizes p = softmax(ell).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillPrior {
    pub p: Vec<f64>,
    pub mode: PriorMode,
    pub ema_decay: f64,
    pub ell: Vec<f64>,
}

impl SkillPrior {
    pub fn fixed_uniform(k: usize) -> Self {
        SkillPrior {
            p: vec![1.0 / k as f64; k],
            mode: PriorMode::FixedUniform,
            ema_decay: 0.0,
            ell: vec![(1.0 / k as f64).ln(); k],
        }
    }

    pub fn learned(k: usize, ema_decay: f64) -> Self {
        SkillPrior {
            p: vec![1.0 / k as f64; k],
            mode: PriorMode::Learned,
            ema_decay,
            ell: vec![(1.0 / k as f64).ln(); k],
        }
    }

    pub fn num_skills(&self) -> usize {
        self.p.len()
    }

    pub fn sample(&self, rng: &mut Rng) -> usize {
        rng.sample_index(&self.p)
    }

    pub fn entropy(&self) -> f64 {
        entropy(&self.p)
    }

    pub fn effective_skills(&self) -> f64 {
        effective_num_skills(&self.p)
    }

    /// Record one finished episode of skill `z` whose states scored
    /// `mean_log_q` under the discriminator. No-op for fixed-uniform priors;
    /// unsampled skills keep their stale scores.
    pub fn observe_episode(&mut self, z: usize, mean_log_q: f64) {
        if self.mode != PriorMode::Learned {
            return;
        }
        let mut scores = self.ell.clone();
        scores[z] = mean_log_q;
        update_learned_prior(self, &scores);
    }
}

/// Blend fresh per-skill scores into the EMA and renormalize the prior as
/// p = softmax(ell). Passing a skill's previous `ell` entry as its score
/// leaves that entry exactly unchanged.
pub fn update_learned_prior(prior: &mut SkillPrior, scores: &[f64]) {
    debug_assert_eq!(scores.len(), prior.ell.len());
    let d = prior.ema_decay;
    for (ell, &s) in prior.ell.iter_mut().zip(scores.iter()) {
        *ell = d * *ell + (1.0 - d) * s;
    }
    let m = prior.ell.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = prior.ell.iter().map(|&e| (e - m).exp()).collect();
    let total: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= total;
    }
    prior.p = w;
}

/// Which state the discriminator scores: the state an action was taken from,
/// or the state it produced (the default).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscInput {
    Current,
    Next,
}

/// Full training configuration. Everything except the environment has a
/// documented default, so config files may stay minimal; unknown keys are
/// rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub env: EnvConfig,
    /// Number of skills K.
    #[serde(default = "defaults::skills")]
    pub skills: usize,
    /// Entropy temperature.
    #[serde(default = "defaults::alpha")]
    pub alpha: f64,
    #[serde(default = "defaults::gamma")]
    pub gamma: f64,
    #[serde(default = "defaults::episodes")]
    pub episodes: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::prior_mode")]
    pub prior_mode: PriorMode,
    #[serde(default = "defaults::ema_decay")]
    pub ema_decay: f64,
    /// Subtract log p(z) from the skill reward.
    #[serde(default = "defaults::baseline")]
    pub baseline: bool,
    #[serde(default = "defaults::disc_input")]
    pub disc_input: DiscInput,
    /// Coordinate subset the discriminator sees; empty means the raw state.
    #[serde(default)]
    pub feature_projection: Vec<usize>,
    /// Tabular soft-Q learning rate.
    #[serde(default = "defaults::q_lr")]
    pub q_lr: f64,
    #[serde(default = "defaults::actor_lr")]
    pub actor_lr: f64,
    #[serde(default = "defaults::value_lr")]
    pub value_lr: f64,
    #[serde(default = "defaults::disc_lr")]
    pub disc_lr: f64,
    #[serde(default = "defaults::hidden")]
    pub hidden: Vec<usize>,
    #[serde(default = "defaults::disc_hidden")]
    pub disc_hidden: Vec<usize>,
    /// Metric reporting cadence in episodes.
    #[serde(default = "defaults::report_every")]
    pub report_every: u64,
}

mod defaults {
    use super::{DiscInput, PriorMode};

    pub fn skills() -> usize {
        2
    }
    pub fn alpha() -> f64 {
        0.1
    }
    pub fn gamma() -> f64 {
        0.99
    }
    pub fn episodes() -> u64 {
        1000
    }
    pub fn prior_mode() -> PriorMode {
        PriorMode::FixedUniform
    }
    pub fn ema_decay() -> f64 {
        0.9
    }
    pub fn baseline() -> bool {
        true
    }
    pub fn disc_input() -> DiscInput {
        DiscInput::Next
    }
    pub fn q_lr() -> f64 {
        0.1
    }
    pub fn actor_lr() -> f64 {
        3e-3
    }
    pub fn value_lr() -> f64 {
        1e-2
    }
    pub fn disc_lr() -> f64 {
        0.05
    }
    pub fn hidden() -> Vec<usize> {
        vec![32, 32]
    }
    pub fn disc_hidden() -> Vec<usize> {
        vec![32]
    }
    pub fn report_every() -> u64 {
        50
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            env: EnvConfig::gridworld(4),
            skills: 2,
            alpha: 0.1,
            gamma: 0.99,
            episodes: 1000,
            seed: 0,
            prior_mode: PriorMode::FixedUniform,
            ema_decay: 0.9,
            baseline: true,
            disc_input: DiscInput::Next,
            feature_projection: Vec::new(),
            q_lr: 0.1,
            actor_lr: 3e-3,
            value_lr: 1e-2,
            disc_lr: 0.05,
            hidden: vec![32, 32],
            disc_hidden: vec![32],
            report_every: 50,
        }
    }
}

impl TrainConfig {
    pub fn new(env: EnvConfig, skills: usize) -> Self {
        TrainConfig { env, skills, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.skills < 2 {
            return Err(Error::config("skills must be >= 2"));
        }
        if self.alpha <= 0.0 {
            return Err(Error::config("alpha must be positive"));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::config("gamma must be in [0, 1)"));
        }
        if self.episodes == 0 {
            return Err(Error::config("episodes must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.ema_decay) {
            return Err(Error::config("ema_decay must be in [0, 1)"));
        }
        if self.report_every == 0 {
            return Err(Error::config("report_every must be >= 1"));
        }
        let env = self.env.build()?;
        self.env.episode_len()?;
        if env.is_discrete() && !self.feature_projection.is_empty() {
            return Err(Error::config(
                "feature_projection applies only to continuous environments",
            ));
        }
        FeatureProjection::coords(self.feature_projection.clone()).validate(env.state_dim())?;
        Ok(())
    }
}

/// The learner/discriminator bundle for one environment family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Agent {
    Tabular {
        qtable: SoftQTable,
        disc: TabularDiscriminator,
    },
    Continuous {
        actor: GaussianPolicyNet,
        value: ValueNet,
        disc: SoftmaxDiscriminator,
        actor_lr: f64,
        value_lr: f64,
    },
}

impl Agent {
    pub fn build(cfg: &TrainConfig, env: &Env, rng: &mut Rng) -> Result<Agent> {
        let k = cfg.skills;
        match env {
            Env::Grid(_) => {
                let n_states = env.num_states().unwrap();
                Ok(Agent::Tabular {
                    qtable: SoftQTable::new(
                        k,
                        n_states,
                        env.num_actions(),
                        cfg.alpha,
                        cfg.gamma,
                        cfg.q_lr,
                    ),
                    disc: TabularDiscriminator::new(n_states, k),
                })
            }
            _ => {
                let scale = env
                    .action_scale()
                    .ok_or_else(|| Error::config("continuous env without action scale"))?;
                let dim = env.state_dim();
                let projection = FeatureProjection::coords(cfg.feature_projection.clone());
                Ok(Agent::Continuous {
                    actor: GaussianPolicyNet::new(dim, k, scale, &cfg.hidden, rng),
                    value: ValueNet::new(dim, k, &cfg.hidden, rng),
                    disc: SoftmaxDiscriminator::new(
                        dim,
                        k,
                        &cfg.disc_hidden,
                        cfg.disc_lr,
                        projection,
                        rng,
                    ),
                    actor_lr: cfg.actor_lr,
                    value_lr: cfg.value_lr,
                })
            }
        }
    }

    pub fn num_skills(&self) -> usize {
        match self {
            Agent::Tabular { qtable, .. } => qtable.num_skills,
            Agent::Continuous { actor, .. } => actor.num_skills,
        }
    }

    /// Stochastic action draw; continuous agents also return the pre-squash
    /// value their update needs.
    pub fn act(
        &self,
        features: &[f64],
        index: Option<usize>,
        z: usize,
        rng: &mut Rng,
    ) -> Result<(Action, Option<Vec<f64>>)> {
        match self {
            Agent::Tabular { qtable, .. } => {
                let probs = qtable.policy(z, index.expect("tabular state index"));
                Ok((Action::Discrete(rng.sample_index(&probs)), None))
            }
            Agent::Continuous { actor, .. } => {
                let sample = actor.sample(features, z, rng)?;
                Ok((Action::Continuous(sample.action), Some(sample.presquash)))
            }
        }
    }

    pub fn act_greedy(&self, features: &[f64], index: Option<usize>, z: usize) -> Action {
        match self {
            Agent::Tabular { qtable, .. } => {
                Action::Discrete(qtable.greedy(z, index.expect("tabular state index")))
            }
            Agent::Continuous { actor, .. } => Action::Continuous(actor.mean_action(features, z)),
        }
    }

    pub fn disc_predict(&self, features: &[f64], index: Option<usize>) -> Vec<f64> {
        match self {
            Agent::Tabular { disc, .. } => disc.predict(index.expect("tabular state index")),
            Agent::Continuous { disc, .. } => disc.predict(features),
        }
    }

    pub fn disc_update(&mut self, features: &[f64], index: Option<usize>, z: usize, rng: &mut Rng) {
        match self {
            Agent::Tabular { disc, .. } => disc.update(index.expect("tabular state index"), z),
            Agent::Continuous { disc, .. } => disc.update_replayed(features, z, rng),
        }
    }

    /// Entropy of the action distribution at a state, in nats. Continuous
    /// policies report the closed-form entropy of the pre-squash Gaussian.
    pub fn policy_entropy_at(&self, features: &[f64], index: Option<usize>, z: usize) -> f64 {
        match self {
            Agent::Tabular { qtable, .. } => {
                entropy(&qtable.policy(z, index.expect("tabular state index")))
            }
            Agent::Continuous { actor, .. } => {
                let (_, log_std) = actor.mean_log_std(features, z);
                log_std.iter().map(|ls| ls + HALF_LN_2PI_E).sum()
            }
        }
    }
}

/// One transition of a rollout.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub state: Vec<f64>,
    pub action: Action,
    pub next_state: Vec<f64>,
    pub pseudo_reward: f64,
}

/// One episode executed under a fixed skill.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub skill: usize,
    pub steps: Vec<StepRecord>,
}

impl Trajectory {
    pub fn states(&self) -> Vec<Vec<f64>> {
        self.steps.iter().map(|s| s.state.clone()).collect()
    }

    /// The states the skill produced (all next-states).
    pub fn visited(&self) -> Vec<Vec<f64>> {
        self.steps.iter().map(|s| s.next_state.clone()).collect()
    }

    pub fn final_state(&self) -> Option<&[f64]> {
        self.steps.last().map(|s| s.next_state.as_slice())
    }

    pub fn mean_pseudo_reward(&self) -> f64 {
        if self.steps.is_empty() {
            return 0.0;
        }
        self.steps.iter().map(|s| s.pseudo_reward).sum::<f64>() / self.steps.len() as f64
    }
}

/// Accumulators for the metric window since the previous report. Persisted
/// so a restored run reports exactly what the unbroken run would have.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricWindow {
    pub reward_sum: f64,
    pub log_q_sum: f64,
    pub entropy_sum: f64,
    pub steps: u64,
    pub hits: u64,
}

/// Persisted training state: everything needed to resume bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainState {
    pub config: TrainConfig,
    pub env: Env,
    pub agent: Agent,
    pub prior: SkillPrior,
    pub episodes_done: u64,
    pub rng: Rng,
    pub window: MetricWindow,
}

impl TrainState {
    pub fn init(config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let env = config.env.build()?;
        let mut rng = Rng::seed_from(config.seed);
        let agent = Agent::build(&config, &env, &mut rng)?;
        let prior = match config.prior_mode {
            PriorMode::FixedUniform => SkillPrior::fixed_uniform(config.skills),
            PriorMode::Learned => SkillPrior::learned(config.skills, config.ema_decay),
        };
        Ok(TrainState {
            config,
            env,
            agent,
            prior,
            episodes_done: 0,
            rng,
            window: MetricWindow::default(),
        })
    }
}

/// One row of the metric log, aggregated over the episodes since the
/// previous report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub episode: u64,
    pub skill: usize,
    pub mean_pseudo_reward: f64,
    pub disc_accuracy: f64,
    pub h_z: f64,
    pub h_z_given_s: f64,
    pub h_a_given_sz: f64,
    pub effective_skills: f64,
}

/// Exact or estimated decomposition of the objective for a skill set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveReport {
    pub h_z: f64,
    pub h_z_given_s: f64,
    pub h_a_given_sz: f64,
    /// H[Z] - H[Z|S] + H[A|S,Z].
    pub f_estimate: f64,
    /// Variational form: H[A|S,Z] + E[log q(z|s) - log p(z)].
    pub g_estimate: f64,
    pub effective_skills: f64,
}

struct EpisodeOutcome {
    trajectory: Trajectory,
    mean_log_q: f64,
    sum_log_q: f64,
    sum_entropy: f64,
    disc_hits: usize,
}

fn action_index(a: &Action) -> usize {
    match a {
        Action::Discrete(i) => *i,
        Action::Continuous(_) => unreachable!("discrete action expected"),
    }
}

fn run_learning_episode(
    state: &mut TrainState,
    z: usize,
    steps_per_episode: usize,
) -> Result<EpisodeOutcome> {
    let k = state.config.skills;
    let baseline = state.config.baseline;
    let disc_input = state.config.disc_input;
    let mut features = state.env.reset();
    let mut index = state.env.state_index(&features);
    let mut steps = Vec::with_capacity(steps_per_episode);
    let mut batch = EpisodeBatch::default();
    let mut sum_log_q = 0.0;
    let mut sum_entropy = 0.0;
    let mut disc_hits = 0usize;

    for _ in 0..steps_per_episode {
        sum_entropy += state.agent.policy_entropy_at(&features, index, z);
        let (action, presquash) = state.agent.act(&features, index, z, &mut state.rng)?;
        let (next_features, done) = state.env.step(&action)?;
        let next_index = state.env.state_index(&next_features);

        let (disc_feats, disc_idx) = match disc_input {
            DiscInput::Next => (next_features.clone(), next_index),
            DiscInput::Current => (features.clone(), index),
        };
        let q_vec = state.agent.disc_predict(&disc_feats, disc_idx);
        let reward = pseudo_reward(&q_vec, &state.prior.p, z, baseline)?;
        sum_log_q += q_vec[z].ln();
        if argmax(&q_vec) == z {
            disc_hits += 1;
        }

        match &mut state.agent {
            Agent::Tabular { qtable, .. } => {
                qtable.update(z, index.unwrap(), action_index(&action), reward, next_index.unwrap());
            }
            Agent::Continuous { .. } => {
                batch.inputs.push(skill_input(&features, z, k));
                batch.presquash.push(presquash.unwrap());
                batch.rewards.push(reward);
            }
        }
        state.agent.disc_update(&disc_feats, disc_idx, z, &mut state.rng);

        steps.push(StepRecord {
            state: features,
            action,
            next_state: next_features.clone(),
            pseudo_reward: reward,
        });
        features = next_features;
        index = next_index;
        if done {
            batch.terminal = true;
            break;
        }
    }

    if let Agent::Continuous { actor, value, actor_lr, value_lr, .. } = &mut state.agent {
        batch.final_input = skill_input(&features, z, k);
        let hyper = AcHyper {
            alpha: state.config.alpha,
            gamma: state.config.gamma,
            actor_lr: *actor_lr,
            value_lr: *value_lr,
        };
        actor_critic_update(actor, value, &batch, hyper)?;
    }

    let n = steps.len().max(1) as f64;
    Ok(EpisodeOutcome {
        trajectory: Trajectory { skill: z, steps },
        mean_log_q: sum_log_q / n,
        sum_log_q,
        sum_entropy,
        disc_hits,
    })
}

/// Execute one learning episode under skill `z` with Algorithm-1 ordering:
/// act, step, score the configured discriminator input, compute the skill
/// reward, update the learner, update the discriminator.
pub fn run_episode(state: &mut TrainState, z: usize) -> Result<Trajectory> {
    if z >= state.config.skills {
        return Err(Error::input(format!("skill {z} out of range")));
    }
    let steps = state.config.env.episode_len()?;
    Ok(run_learning_episode(state, z, steps)?.trajectory)
}

/// Evaluation rollout without any learning.
#[allow(clippy::too_many_arguments)]
pub fn rollout(
    env: &mut Env,
    agent: &Agent,
    prior: &SkillPrior,
    z: usize,
    steps_per_episode: usize,
    baseline: bool,
    disc_input: DiscInput,
    greedy: bool,
    rng: &mut Rng,
) -> Result<Trajectory> {
    let mut features = env.reset();
    let mut index = env.state_index(&features);
    let mut steps = Vec::with_capacity(steps_per_episode);
    for _ in 0..steps_per_episode {
        let action = if greedy {
            agent.act_greedy(&features, index, z)
        } else {
            agent.act(&features, index, z, rng)?.0
        };
        let (next_features, done) = env.step(&action)?;
        let next_index = env.state_index(&next_features);
        let (disc_feats, disc_idx) = match disc_input {
            DiscInput::Next => (&next_features, next_index),
            DiscInput::Current => (&features, index),
        };
        let q_vec = agent.disc_predict(disc_feats, disc_idx);
        let reward = pseudo_reward(&q_vec, &prior.p, z, baseline)?;
        steps.push(StepRecord {
            state: features,
            action,
            next_state: next_features.clone(),
            pseudo_reward: reward,
        });
        features = next_features;
        index = next_index;
        if done {
            break;
        }
    }
    Ok(Trajectory { skill: z, steps })
}

/// Result of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub state: TrainState,
    pub reports: Vec<MetricRecord>,
}

/// Train from scratch for the configured number of episodes.
pub fn train(config: &TrainConfig) -> Result<TrainResult> {
    let mut state = TrainState::init(config.clone())?;
    let episodes = config.episodes;
    let reports = resume_train(&mut state, episodes)?;
    Ok(TrainResult { state, reports })
}

/// Continue a (possibly restored) training state for `episodes` more
/// episodes, sampling a skill from the prior at each episode start and
/// emitting a metric record every `report_every` episodes.
pub fn resume_train(state: &mut TrainState, episodes: u64) -> Result<Vec<MetricRecord>> {
    let steps_per_episode = state.config.env.episode_len()?;
    let report_every = state.config.report_every;
    let mut reports = Vec::new();

    for _ in 0..episodes {
        let z = state.prior.sample(&mut state.rng);
        let outcome = run_learning_episode(state, z, steps_per_episode).map_err(|e| match e {
            Error::Numeric(msg) => {
                Error::Numeric(format!("episode {}: {msg}", state.episodes_done))
            }
            other => other,
        })?;
        state.episodes_done += 1;

        state.window.reward_sum += outcome
            .trajectory
            .steps
            .iter()
            .map(|s| s.pseudo_reward)
            .sum::<f64>();
        state.window.log_q_sum += outcome.sum_log_q;
        state.window.entropy_sum += outcome.sum_entropy;
        state.window.steps += outcome.trajectory.steps.len() as u64;
        state.window.hits += outcome.disc_hits as u64;

        state.prior.observe_episode(z, outcome.mean_log_q);

        if state.episodes_done % report_every == 0 {
            let steps_f = state.window.steps.max(1) as f64;
            reports.push(MetricRecord {
                episode: state.episodes_done,
                skill: z,
                mean_pseudo_reward: state.window.reward_sum / steps_f,
                disc_accuracy: state.window.hits as f64 / steps_f,
                h_z: state.prior.entropy(),
                h_z_given_s: -state.window.log_q_sum / steps_f,
                h_a_given_sz: state.window.entropy_sum / steps_f,
                effective_skills: state.prior.effective_skills(),
            });
            state.window = MetricWindow::default();
        }
    }
    Ok(reports)
}

/// Estimate the objective decomposition from fresh on-policy rollouts of a
/// trained state. The state is not touched; evaluation draws from its own
/// stream derived from the run seed.
pub fn estimate_objective(state: &TrainState, eval_episodes: usize) -> Result<ObjectiveReport> {
    if eval_episodes == 0 {
        return Err(Error::input("eval_episodes must be >= 1"));
    }
    let steps_per_episode = state.config.env.episode_len()?;
    let mut env = state.env.clone();
    let mut rng = Rng::seed_from(state.config.seed ^ 0x0b1e_c71e);
    let mut sum_log_q = 0.0;
    let mut sum_log_p = 0.0;
    let mut sum_entropy = 0.0;
    let mut total_steps = 0usize;
    for _ in 0..eval_episodes {
        let z = state.prior.sample(&mut rng);
        let traj = rollout(
            &mut env,
            &state.agent,
            &state.prior,
            z,
            steps_per_episode,
            true,
            state.config.disc_input,
            false,
            &mut rng,
        )?;
        for step in &traj.steps {
            let feats = match state.config.disc_input {
                DiscInput::Next => &step.next_state,
                DiscInput::Current => &step.state,
            };
            let idx = env.state_index(feats);
            let q = state.agent.disc_predict(feats, idx);
            sum_log_q += q[z].ln();
            sum_log_p += state.prior.p[z].ln();
            let sidx = env.state_index(&step.state);
            sum_entropy += state.agent.policy_entropy_at(&step.state, sidx, z);
        }
        total_steps += traj.steps.len();
    }
    let n = total_steps.max(1) as f64;
    let h_z = state.prior.entropy();
    let h_z_given_s = -sum_log_q / n;
    let h_a_given_sz = sum_entropy / n;
    Ok(ObjectiveReport {
        h_z,
        h_z_given_s,
        h_a_given_sz,
        f_estimate: h_z - h_z_given_s + h_a_given_sz,
        g_estimate: h_a_given_sz + (sum_log_q - sum_log_p) / n,
        effective_skills: state.prior.effective_skills(),
    })
}

/// Greedy per-skill evaluation under an external task reward the skills never
/// observed. Returns one list of episode returns per skill.
pub fn reward_histogram(
    state: &TrainState,
    task: &TaskReward,
    episodes_per_skill: usize,
) -> Result<Vec<Vec<f64>>> {
    let steps_per_episode = state.config.env.episode_len()?;
    let mut env = state.env.clone();
    let mut rng = Rng::seed_from(state.config.seed ^ 0x4157);
    let mut out = Vec::with_capacity(state.config.skills);
    for z in 0..state.config.skills {
        let mut returns = Vec::with_capacity(episodes_per_skill);
        for _ in 0..episodes_per_skill {
            let traj = rollout(
                &mut env,
                &state.agent,
                &state.prior,
                z,
                steps_per_episode,
                state.config.baseline,
                state.config.disc_input,
                true,
                &mut rng,
            )?;
            let mut total = 0.0;
            for step in &traj.steps {
                total += task.reward(&step.state, &step.next_state)?;
            }
            returns.push(total);
        }
        out.push(returns);
    }
    Ok(out)
}
