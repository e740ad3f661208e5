//! Structured-text run configuration: one TOML file with per-command
//! sections, fully validated before any compute, unknown keys rejected.
//! Command-line flags override file values.

use diayn_core::envs::task::TaskRewardConfig;
use diayn_core::{Error, Result, TaskReward, TrainConfig};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    /// Global seed; overrides the train section's seed when set.
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub train: Option<toml::Value>,
    pub eval: Option<EvalSection>,
    pub finetune: Option<FinetuneSection>,
    pub hier: Option<HierSection>,
    pub imitate: Option<ImitateSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub checkpoint: Option<PathBuf>,
    pub episodes: Option<usize>,
    pub task: Option<TaskRewardConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FinetuneSection {
    pub checkpoint: Option<PathBuf>,
    pub budget: Option<u64>,
    pub init: Option<String>,
    pub eval_episodes: Option<usize>,
    pub seed: Option<u64>,
    pub task: Option<TaskRewardConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HierSection {
    pub checkpoint: Option<PathBuf>,
    pub k: Option<usize>,
    pub budget: Option<u64>,
    pub eval_episodes: Option<usize>,
    pub seed: Option<u64>,
    pub task: Option<TaskRewardConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ImitateSection {
    pub checkpoint: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
}

pub fn load_file_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::config(format!("cannot read config {}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", p.display())))
        }
    }
}

/// Decode the [train] section into a full TrainConfig, keeping serde's
/// line-precise error messages (a missing env key is named explicitly).
pub fn train_config_from_section(section: Option<toml::Value>) -> Result<TrainConfig> {
    let value = section.ok_or_else(|| Error::config("config file needs a [train] section"))?;
    value
        .try_into::<TrainConfig>()
        .map_err(|e| Error::config(format!("[train] section: {e}")))
}

/// Build the task reward a command was given, from file section and flags.
pub fn resolve_task(
    section_task: Option<&TaskRewardConfig>,
    kind_flag: Option<&str>,
    goal_flag: Option<&[f64]>,
) -> Result<TaskReward> {
    let cfg = match (kind_flag, section_task) {
        (Some(kind), _) => TaskRewardConfig { kind: kind.to_string(), goal: goal_flag.map(|g| g.to_vec()) },
        (None, Some(t)) => {
            let mut t = t.clone();
            if let Some(g) = goal_flag {
                t.goal = Some(g.to_vec());
            }
            t
        }
        (None, None) => {
            return Err(Error::config(
                "no task reward given (set [<command>].task in the config or pass --task-kind)",
            ))
        }
    };
    cfg.build()
}

pub fn parse_goal(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("bad goal coordinate {s:?}")))
        })
        .collect()
}
