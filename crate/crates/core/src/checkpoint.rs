//! Versioned checkpoint persistence. The document is pretty-printed JSON:
//! human-diffable at desk scale, and floating-point values round-trip
//! bit-exactly, so save -> load -> save reproduces identical bytes and a
//! restored run continues exactly where the original left off.

use crate::diayn::TrainState;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub env_id: String,
    pub state: TrainState,
}

impl Checkpoint {
    pub fn of(state: &TrainState) -> Checkpoint {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            env_id: state.env.id(),
            state: state.clone(),
        }
    }
}

pub fn checkpoint_to_string(state: &TrainState) -> Result<String> {
    let doc = Checkpoint::of(state);
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::format(format!("checkpoint encode failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn checkpoint_from_str(text: &str) -> Result<TrainState> {
    let doc: Checkpoint = serde_json::from_str(text)
        .map_err(|e| Error::format(format!("checkpoint decode failed: {e}")))?;
    if doc.version != CHECKPOINT_VERSION {
        return Err(Error::format(format!(
            "checkpoint version {} unsupported (expected {CHECKPOINT_VERSION})",
            doc.version
        )));
    }
    if doc.env_id != doc.state.env.id() {
        return Err(Error::format("checkpoint env_id does not match its payload"));
    }
    Ok(doc.state)
}

pub fn save_checkpoint(path: &Path, state: &TrainState) -> Result<()> {
    std::fs::write(path, checkpoint_to_string(state)?)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<TrainState> {
    let text = std::fs::read_to_string(path)?;
    checkpoint_from_str(&text)
}
