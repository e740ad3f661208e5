//! Episodic environments with deterministic seeded dynamics.
//!
//! All environments are value-like: independently instantiable, cheap to
//! clone, and safe to move between threads. A single instance is mutated by
//! one rollout at a time.

pub mod gridworld;
pub mod hallway;
pub mod mountain_car;
pub mod pointbox;
pub mod task;

pub use gridworld::{step_cell, GridWorld, Move};
pub use hallway::HallwayRoom;
pub use mountain_car::MountainCar;
pub use pointbox::PointBox;
pub use task::TaskReward;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// An action for either action-space family.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Discrete(usize),
    Continuous(Vec<f64>),
}

/// Environment selection and parameters, loadable from structured-text config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvConfig {
    /// One of "gridworld", "pointbox", "hallway", "mountaincar".
    pub name: String,
    /// Gridworld cells per side.
    #[serde(default)]
    pub n: Option<usize>,
    /// Steps per episode; per-environment default when omitted.
    #[serde(default)]
    pub episode_len: Option<usize>,
}

impl EnvConfig {
    pub fn gridworld(n: usize) -> Self {
        EnvConfig { name: "gridworld".into(), n: Some(n), episode_len: None }
    }

    pub fn named(name: &str) -> Self {
        EnvConfig { name: name.into(), n: None, episode_len: None }
    }

    pub fn build(&self) -> Result<Env> {
        let env = match self.name.as_str() {
            "gridworld" => {
                let n = self
                    .n
                    .ok_or_else(|| Error::config("env.n is required for gridworld"))?;
                if n == 0 {
                    return Err(Error::config("env.n must be positive"));
                }
                Env::Grid(GridWorld::new(n))
            }
            "pointbox" => Env::Point(PointBox::new()),
            "hallway" => Env::Hallway(HallwayRoom::new()),
            "mountaincar" => Env::Car(MountainCar::new()),
            other => {
                return Err(Error::config(format!(
                    "unknown env name {other:?} (expected gridworld, pointbox, hallway, or mountaincar)"
                )))
            }
        };
        Ok(env)
    }

    pub fn episode_len(&self) -> Result<usize> {
        let default = match self.name.as_str() {
            "gridworld" => 50,
            "pointbox" | "hallway" => 100,
            "mountaincar" => 200,
            other => return Err(Error::config(format!("unknown env name {other:?}"))),
        };
        let len = self.episode_len.unwrap_or(default);
        if len == 0 {
            return Err(Error::config("env.episode_len must be >= 1"));
        }
        Ok(len)
    }
}

/// A concrete environment instance holding its current state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Env {
    Grid(GridWorld),
    Point(PointBox),
    Hallway(HallwayRoom),
    Car(MountainCar),
}

impl Env {
    /// Stable identifier used for checkpoint/env compatibility checks.
    pub fn id(&self) -> String {
        match self {
            Env::Grid(g) => format!("gridworld-{}", g.side),
            Env::Point(_) => "pointbox".into(),
            Env::Hallway(_) => "hallway".into(),
            Env::Car(_) => "mountaincar".into(),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Env::Grid(_))
    }

    /// Dimension of the state feature vector.
    pub fn state_dim(&self) -> usize {
        2
    }

    /// Number of tabular states (discrete environments only).
    pub fn num_states(&self) -> Option<usize> {
        match self {
            Env::Grid(g) => Some(g.side * g.side),
            _ => None,
        }
    }

    /// Number of discrete actions, or the continuous action dimension.
    pub fn num_actions(&self) -> usize {
        match self {
            Env::Grid(_) => 4,
            Env::Point(_) | Env::Hallway(_) => 2,
            Env::Car(_) => 1,
        }
    }

    /// Half-width of the symmetric continuous action box per dimension.
    pub fn action_scale(&self) -> Option<Vec<f64>> {
        match self {
            Env::Grid(_) => None,
            Env::Point(_) | Env::Hallway(_) => Some(vec![0.1, 0.1]),
            Env::Car(_) => Some(vec![1.0]),
        }
    }

    /// Per-dimension (low, high) bounds of the state space.
    pub fn state_bounds(&self) -> Vec<(f64, f64)> {
        match self {
            Env::Grid(g) => {
                let n = g.side as f64;
                vec![(1.0, n), (1.0, n)]
            }
            Env::Point(_) | Env::Hallway(_) => vec![(0.0, 1.0), (0.0, 1.0)],
            Env::Car(_) => vec![(-1.2, 0.6), (-0.07, 0.07)],
        }
    }

    /// Reset to the fixed start state and return its features.
    pub fn reset(&mut self) -> Vec<f64> {
        match self {
            Env::Grid(g) => {
                g.reset();
                g.features()
            }
            Env::Point(p) => {
                p.reset();
                p.features()
            }
            Env::Hallway(h) => {
                h.reset();
                h.features()
            }
            Env::Car(c) => {
                c.reset();
                c.features()
            }
        }
    }

    /// Advance one step. Returns the next state's features and whether the
    /// environment terminated on its own.
    pub fn step(&mut self, action: &Action) -> Result<(Vec<f64>, bool)> {
        match (self, action) {
            (Env::Grid(g), Action::Discrete(a)) => {
                let mv = Move::from_index(*a)
                    .ok_or_else(|| Error::input(format!("action index {a} out of range")))?;
                g.step(mv);
                Ok((g.features(), false))
            }
            (Env::Point(p), Action::Continuous(a)) => {
                let s = p.step(a)?;
                Ok((s.to_vec(), false))
            }
            (Env::Hallway(h), Action::Continuous(a)) => {
                let s = h.step(a)?;
                Ok((s.to_vec(), false))
            }
            (Env::Car(c), Action::Continuous(a)) => {
                if a.len() != 1 {
                    return Err(Error::input("mountain car expects a 1-dimensional action"));
                }
                let done = c.step(a[0]);
                Ok((c.features(), done))
            }
            _ => Err(Error::config("action kind does not match environment")),
        }
    }

    /// Tabular state index of a feature vector (discrete environments only).
    pub fn state_index(&self, features: &[f64]) -> Option<usize> {
        match self {
            Env::Grid(g) => {
                let x = features[0].round() as i64;
                let y = features[1].round() as i64;
                Some(g.index_of((x, y)))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_builds_each_env() {
        assert!(EnvConfig::gridworld(4).build().is_ok());
        assert!(EnvConfig::named("pointbox").build().is_ok());
        assert!(EnvConfig::named("hallway").build().is_ok());
        assert!(EnvConfig::named("mountaincar").build().is_ok());
        assert!(EnvConfig::named("cartpole").build().is_err());
    }

    #[test]
    fn gridworld_requires_side() {
        let cfg = EnvConfig::named("gridworld");
        assert!(cfg.build().is_err());
    }

    #[test]
    fn default_episode_lengths() {
        assert_eq!(EnvConfig::gridworld(4).episode_len().unwrap(), 50);
        assert_eq!(EnvConfig::named("pointbox").episode_len().unwrap(), 100);
        assert_eq!(EnvConfig::named("mountaincar").episode_len().unwrap(), 200);
    }

    #[test]
    fn mismatched_action_kind_is_config_error() {
        let mut env = EnvConfig::gridworld(4).build().unwrap();
        env.reset();
        let err = env.step(&Action::Continuous(vec![0.1, 0.1])).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn replay_is_bit_identical() {
        for cfg in [
            EnvConfig::gridworld(5),
            EnvConfig::named("pointbox"),
            EnvConfig::named("hallway"),
            EnvConfig::named("mountaincar"),
        ] {
            let mut a = cfg.build().unwrap();
            let mut b = cfg.build().unwrap();
            let actions: Vec<Action> = (0..40)
                .map(|i| {
                    if a.is_discrete() {
                        Action::Discrete(i % 4)
                    } else {
                        let d = a.num_actions();
                        Action::Continuous(vec![if i % 2 == 0 { 0.07 } else { -0.05 }; d])
                    }
                })
                .collect();
            let run = |env: &mut Env| -> Vec<Vec<f64>> {
                let mut states = vec![env.reset()];
                for act in &actions {
                    let (s, _) = env.step(act).unwrap();
                    states.push(s);
                }
                states
            };
            assert_eq!(run(&mut a), run(&mut b));
        }
    }
}
