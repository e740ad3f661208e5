//! External task rewards used only by downstream evaluation and adaptation;
//! unsupervised training never observes them.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub enum TaskReward {
    /// Negative squared Euclidean distance from the next state to a goal.
    GoalDistance { goal: Vec<f64> },
    /// Displacement of the first state coordinate over the step.
    XProgress,
    /// Arbitrary reward of the (previous, next) state pair.
    Custom(Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>),
}

impl fmt::Debug for TaskReward {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaskReward::GoalDistance { goal } => write!(f, "GoalDistance({goal:?})"),
            TaskReward::XProgress => write!(f, "XProgress"),
            TaskReward::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl TaskReward {
    pub fn goal(goal: Vec<f64>) -> Self {
        TaskReward::GoalDistance { goal }
    }

    /// Reward for the transition `prev -> next`.
    pub fn reward(&self, prev: &[f64], next: &[f64]) -> Result<f64> {
        match self {
            TaskReward::GoalDistance { goal } => {
                if goal.len() != next.len() {
                    return Err(Error::input(format!(
                        "goal has {} dims but state has {}",
                        goal.len(),
                        next.len()
                    )));
                }
                Ok(-goal
                    .iter()
                    .zip(next.iter())
                    .map(|(g, s)| (s - g) * (s - g))
                    .sum::<f64>())
            }
            TaskReward::XProgress => {
                if prev.is_empty() || next.is_empty() {
                    return Err(Error::input("state has no coordinates"));
                }
                Ok(next[0] - prev[0])
            }
            TaskReward::Custom(f) => Ok(f(prev, next)),
        }
    }
}

/// Config-friendly description of a task reward (custom rewards are
/// library-only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskRewardConfig {
    /// "goal_distance" or "x_progress".
    pub kind: String,
    #[serde(default)]
    pub goal: Option<Vec<f64>>,
}

impl TaskRewardConfig {
    pub fn build(&self) -> Result<TaskReward> {
        match self.kind.as_str() {
            "goal_distance" => {
                let goal = self
                    .goal
                    .clone()
                    .ok_or_else(|| Error::config("task.goal is required for goal_distance"))?;
                Ok(TaskReward::GoalDistance { goal })
            }
            "x_progress" => Ok(TaskReward::XProgress),
            other => Err(Error::config(format!("unknown task reward kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_distance_at_goal() {
        let tr = TaskReward::goal(vec![0.2, 0.2]);
        assert_eq!(tr.reward(&[0.0, 0.0], &[0.2, 0.2]).unwrap(), 0.0);
    }

    #[test]
    fn squared_distance() {
        let tr = TaskReward::goal(vec![0.0, 0.0]);
        assert!((tr.reward(&[0.0, 0.0], &[0.3, 0.4]).unwrap() + 0.25).abs() < 1e-12);
        let tr = TaskReward::goal(vec![1.0, 1.0]);
        assert!((tr.reward(&[0.0, 0.0], &[0.0, 0.0]).unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn x_progress_is_displacement() {
        let tr = TaskReward::XProgress;
        assert!((tr.reward(&[-0.5, 0.0], &[-0.45, 0.01]).unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let tr = TaskReward::goal(vec![0.1, 0.2, 0.3]);
        assert!(matches!(
            tr.reward(&[0.0, 0.0], &[0.0, 0.0]),
            Err(Error::Input(_))
        ));
    }
}
