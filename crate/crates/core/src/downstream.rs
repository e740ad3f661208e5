//! Using a trained skill set: pick the best skill for a task, finetune it,
//! compose skills with a meta-controller, or retrieve the skill that best
//! imitates an expert's state trajectory.

use crate::diayn::{rollout, Agent, TrainState};
use crate::envs::{Action, Env, TaskReward};
use crate::error::{Error, Result};
use crate::learner::{
    actor_critic_update, argmax, skill_input, AcHyper, EpisodeBatch,
};
use crate::rng::Rng;
use serde::{Deserialize, Serialize};

/// Expert demonstration: states only, no actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpertTrajectory {
    pub states: Vec<Vec<f64>>,
}

impl ExpertTrajectory {
    pub fn new(states: Vec<Vec<f64>>) -> Self {
        ExpertTrajectory { states }
    }
}

fn check_task_compatible(env: &Env, task: &TaskReward) -> Result<()> {
    if let TaskReward::GoalDistance { goal } = task {
        if goal.len() != env.state_dim() {
            return Err(Error::config(format!(
                "goal has {} dims but env {} has {}-dim states",
                goal.len(),
                env.id(),
                env.state_dim()
            )));
        }
    }
    Ok(())
}

/// Mean greedy episode return of one skill under a task reward.
pub fn eval_skill_return(
    state: &TrainState,
    z: usize,
    task: &TaskReward,
    eval_episodes: usize,
) -> Result<f64> {
    check_task_compatible(&state.env, task)?;
    let steps = state.config.env.episode_len()?;
    let mut env = state.env.clone();
    let mut rng = Rng::seed_from(state.config.seed ^ 0xbe57);
    let mut total = 0.0;
    for _ in 0..eval_episodes.max(1) {
        let traj = rollout(
            &mut env,
            &state.agent,
            &state.prior,
            z,
            steps,
            state.config.baseline,
            state.config.disc_input,
            true,
            &mut rng,
        )?;
        for step in &traj.steps {
            total += task.reward(&step.state, &step.next_state)?;
        }
    }
    Ok(total / eval_episodes.max(1) as f64)
}

/// Evaluate every skill greedily and return the winner and its mean reward;
/// ties break to the lowest index.
pub fn select_best_skill(
    state: &TrainState,
    task: &TaskReward,
    eval_episodes: usize,
) -> Result<(usize, f64)> {
    let k = state.agent.num_skills();
    let mut best = (0usize, f64::NEG_INFINITY);
    for z in 0..k {
        let mean = eval_skill_return(state, z, task, eval_episodes)?;
        if mean > best.1 {
            best = (z, mean);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// Copy the pretrained policy and value parameters of the best skill.
    Pretrained,
    /// Fresh parameters of the same architecture: the control arm.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinetuneResult {
    /// Per-episode training return under the task reward.
    pub curve: Vec<f64>,
    /// Greedy evaluation after adaptation.
    pub final_return: f64,
    /// Which skill the run adapted (always 0 for random init).
    pub skill: usize,
}

/// Continue RL from the best skill's parameters with the task reward
/// replacing the skill reward. `budget` of zero performs no updates, so the
/// result is exactly the best-skill baseline evaluation.
pub fn finetune(
    state: &TrainState,
    task: &TaskReward,
    budget: u64,
    init: InitMode,
    seed: u64,
    eval_episodes: usize,
) -> Result<FinetuneResult> {
    check_task_compatible(&state.env, task)?;
    let steps = state.config.env.episode_len()?;
    let mut rng = Rng::seed_from(seed);

    let (mut agent, z) = match init {
        InitMode::Pretrained => {
            let (z, _) = select_best_skill(state, task, eval_episodes.max(1))?;
            (state.agent.clone(), z)
        }
        InitMode::Random => {
            let fresh = Agent::build(&state.config, &state.env, &mut rng)?;
            (fresh, 0)
        }
    };

    let mut env = state.env.clone();
    let mut curve = Vec::with_capacity(budget as usize);
    for _ in 0..budget {
        let episode_return = task_episode(&mut env, &mut agent, z, task, steps, &state.config, &mut rng)?;
        curve.push(episode_return);
    }

    // Greedy evaluation of the adapted policy.
    let eval_state = TrainState {
        agent,
        ..state.clone()
    };
    let final_return = eval_skill_return(&eval_state, z, task, eval_episodes.max(1))?;
    Ok(FinetuneResult { curve, final_return, skill: z })
}

/// One training episode under the external task reward, updating only the
/// learner (the discriminator has no role once the task reward is known).
fn task_episode(
    env: &mut Env,
    agent: &mut Agent,
    z: usize,
    task: &TaskReward,
    steps: usize,
    cfg: &crate::diayn::TrainConfig,
    rng: &mut Rng,
) -> Result<f64> {
    let mut features = env.reset();
    let mut index = env.state_index(&features);
    let mut batch = EpisodeBatch::default();
    let mut episode_return = 0.0;
    for _ in 0..steps {
        let (action, presquash) = agent.act(&features, index, z, rng)?;
        let (next_features, done) = env.step(&action)?;
        let next_index = env.state_index(&next_features);
        let reward = task.reward(&features, &next_features)?;
        episode_return += reward;
        match agent {
            Agent::Tabular { qtable, .. } => {
                let a = match action {
                    Action::Discrete(a) => a,
                    Action::Continuous(_) => unreachable!(),
                };
                qtable.update(z, index.unwrap(), a, reward, next_index.unwrap());
            }
            Agent::Continuous { .. } => {
                batch.inputs.push(skill_input(&features, z, agent.num_skills()));
                batch.presquash.push(presquash.unwrap());
                batch.rewards.push(reward);
            }
        }
        features = next_features;
        index = next_index;
        if done {
            batch.terminal = true;
            break;
        }
    }
    let k = agent.num_skills();
    if let Agent::Continuous { actor, value, actor_lr, value_lr, .. } = agent {
        batch.final_input = skill_input(&features, z, k);
        let hyper = AcHyper {
            alpha: cfg.alpha,
            gamma: cfg.gamma,
            actor_lr: *actor_lr,
            value_lr: *value_lr,
        };
        actor_critic_update(actor, value, &batch, hyper)?;
    }
    Ok(episode_return)
}

/// Tabular Q-controller over (discretized state, skill choice); each chosen
/// skill runs for `k_horizon` environment steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaController {
    pub q: Vec<f64>,
    pub num_meta_states: usize,
    pub num_skills: usize,
    pub k_horizon: usize,
    pub bins_per_dim: usize,
    pub lr: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl MetaController {
    pub fn new(env: &Env, num_skills: usize, k_horizon: usize, lr: f64, gamma: f64, epsilon: f64) -> Self {
        let bins_per_dim: usize = 10;
        let num_meta_states = match env.num_states() {
            Some(n) => n,
            None => bins_per_dim.pow(env.state_dim() as u32),
        };
        MetaController {
            q: vec![0.0; num_meta_states * num_skills],
            num_meta_states,
            num_skills,
            k_horizon,
            bins_per_dim,
            lr,
            gamma,
            epsilon,
        }
    }

    /// Meta-state of an observation: the exact cell on grids, a fixed-grid
    /// discretization on continuous state spaces (same observation space as
    /// the skills).
    pub fn meta_state(&self, env: &Env, features: &[f64]) -> usize {
        if let Some(idx) = env.state_index(features) {
            return idx;
        }
        let bounds = env.state_bounds();
        let b = self.bins_per_dim;
        let mut idx = 0usize;
        for (dim, (lo, hi)) in bounds.iter().enumerate() {
            let frac = ((features[dim] - lo) / (hi - lo)).clamp(0.0, 1.0);
            let bin = ((frac * b as f64) as usize).min(b - 1);
            idx = idx * b + bin;
        }
        idx
    }

    pub fn greedy_skill(&self, m: usize) -> usize {
        argmax(&self.q[m * self.num_skills..(m + 1) * self.num_skills])
    }

    fn choose(&self, m: usize, rng: &mut Rng) -> usize {
        if rng.next_f64() < self.epsilon {
            rng.below(self.num_skills)
        } else {
            self.greedy_skill(m)
        }
    }

    fn update(&mut self, m: usize, z: usize, reward: f64, m_next: usize, terminal: bool) {
        let best_next = if terminal {
            0.0
        } else {
            let row = &self.q[m_next * self.num_skills..(m_next + 1) * self.num_skills];
            row[argmax(row)]
        };
        let gamma_k = self.gamma.powi(self.k_horizon as i32);
        let i = m * self.num_skills + z;
        self.q[i] += self.lr * (reward + gamma_k * best_next - self.q[i]);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetaResult {
    pub controller: MetaController,
    /// Per-episode task return during meta-training.
    pub curve: Vec<f64>,
}

/// Train a meta-controller by Q-learning over the k-step semi-MDP induced by
/// frozen skills.
pub fn meta_train(
    state: &TrainState,
    task: &TaskReward,
    k_horizon: usize,
    budget_episodes: u64,
    seed: u64,
) -> Result<MetaResult> {
    if k_horizon == 0 {
        return Err(Error::input("k_horizon must be >= 1"));
    }
    check_task_compatible(&state.env, task)?;
    let steps = state.config.env.episode_len()?;
    let mut rng = Rng::seed_from(seed);
    let mut env = state.env.clone();
    let mut controller = MetaController::new(&env, state.agent.num_skills(), k_horizon, 0.5, state.config.gamma, 0.2);
    let mut curve = Vec::with_capacity(budget_episodes as usize);

    for _ in 0..budget_episodes {
        let mut features = env.reset();
        let mut index = env.state_index(&features);
        let mut episode_return = 0.0;
        let mut t = 0usize;
        let mut terminated = false;
        while t < steps && !terminated {
            let m = controller.meta_state(&env, &features);
            let z = controller.choose(m, &mut rng);
            // Execute the frozen skill for up to k steps.
            let mut option_reward = 0.0;
            let mut discount = 1.0;
            for _ in 0..k_horizon {
                if t >= steps {
                    break;
                }
                let (action, _) = state.agent.act(&features, index, z, &mut rng)?;
                let (next_features, done) = env.step(&action)?;
                let r = task.reward(&features, &next_features)?;
                episode_return += r;
                option_reward += discount * r;
                discount *= state.config.gamma;
                features = next_features;
                index = env.state_index(&features);
                t += 1;
                if done {
                    terminated = true;
                    break;
                }
            }
            let m_next = controller.meta_state(&env, &features);
            controller.update(m, z, option_reward, m_next, terminated || t >= steps);
        }
        curve.push(episode_return);
    }
    Ok(MetaResult { controller, curve })
}

/// Greedy evaluation of a trained meta-controller.
pub fn meta_eval(
    state: &TrainState,
    controller: &MetaController,
    task: &TaskReward,
    episodes: usize,
    seed: u64,
) -> Result<f64> {
    let steps = state.config.env.episode_len()?;
    let mut env = state.env.clone();
    let mut rng = Rng::seed_from(seed);
    let mut total = 0.0;
    for _ in 0..episodes.max(1) {
        let mut features = env.reset();
        let mut index = env.state_index(&features);
        let mut t = 0usize;
        'episode: while t < steps {
            let m = controller.meta_state(&env, &features);
            let z = controller.greedy_skill(m);
            for _ in 0..controller.k_horizon {
                if t >= steps {
                    break;
                }
                let (action, _) = state.agent.act(&features, index, z, &mut rng)?;
                let (next_features, done) = env.step(&action)?;
                total += task.reward(&features, &next_features)?;
                features = next_features;
                index = env.state_index(&features);
                t += 1;
                if done {
                    break 'episode;
                }
            }
        }
    }
    Ok(total / episodes.max(1) as f64)
}

/// Retrieve the skill whose discriminator probabilities best explain an
/// expert state sequence: argmax_z sum_t log q(z|s_t), ties to the lowest
/// index. The score is the per-step geometric mean of q(z_hat|s_t).
pub fn imitate_with<F>(predict: F, tau: &ExpertTrajectory) -> Result<(usize, f64)>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if tau.states.is_empty() {
        return Err(Error::input("expert trajectory is empty"));
    }
    let mut totals: Option<Vec<f64>> = None;
    for s in &tau.states {
        let q = predict(s);
        let acc = totals.get_or_insert_with(|| vec![0.0; q.len()]);
        for (t, &qi) in acc.iter_mut().zip(q.iter()) {
            *t += qi.max(1e-300).ln();
        }
    }
    let totals = totals.unwrap();
    let z_hat = argmax(&totals);
    let score = (totals[z_hat] / tau.states.len() as f64).exp();
    Ok((z_hat, score))
}

/// Imitation against a trained run's discriminator.
pub fn imitate(state: &TrainState, tau: &ExpertTrajectory) -> Result<(usize, f64)> {
    for s in &tau.states {
        if s.len() != state.env.state_dim() {
            return Err(Error::input("expert state dimensionality does not match env"));
        }
    }
    imitate_with(
        |s| {
            let idx = state.env.state_index(s);
            state.agent.disc_predict(s, idx)
        },
        tau,
    )
}

/// Mean Euclidean distance between two state sequences, truncated to the
/// shorter one.
pub fn trajectory_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::input("cannot compare empty trajectories"));
    }
    let n = a.len().min(b.len());
    let mut total = 0.0;
    for t in 0..n {
        let d2: f64 = a[t]
            .iter()
            .zip(b[t].iter())
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        total += d2.sqrt();
    }
    Ok(total / n as f64)
}
