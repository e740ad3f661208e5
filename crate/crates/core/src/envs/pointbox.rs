//! 2D point navigation in the unit box. Actions displace the position
//! directly and are clipped to [-0.1, 0.1] per axis; positions that would
//! leave the box are projected back onto it.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const ACTION_LIMIT: f64 = 0.1;

/// Clip an action component to the [-0.1, 0.1] box.
pub fn clip_action(a: f64) -> f64 {
    a.clamp(-ACTION_LIMIT, ACTION_LIMIT)
}

/// One step of the box dynamics: clamp(s + clip(a), 0, 1) componentwise.
pub fn step(s: [f64; 2], a: &[f64]) -> Result<[f64; 2]> {
    if a.len() != 2 {
        return Err(Error::input("point box expects a 2-dimensional action"));
    }
    if !a.iter().all(|x| x.is_finite()) {
        return Err(Error::input("non-finite action component"));
    }
    Ok([
        (s[0] + clip_action(a[0])).clamp(0.0, 1.0),
        (s[1] + clip_action(a[1])).clamp(0.0, 1.0),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointBox {
    state: [f64; 2],
}

impl Default for PointBox {
    fn default() -> Self {
        Self::new()
    }
}

impl PointBox {
    pub fn new() -> Self {
        PointBox { state: [0.5, 0.5] }
    }

    pub fn reset(&mut self) -> [f64; 2] {
        self.state = [0.5, 0.5];
        self.state
    }

    pub fn state(&self) -> [f64; 2] {
        self.state
    }

    pub fn step(&mut self, a: &[f64]) -> Result<[f64; 2]> {
        self.state = step(self.state, a)?;
        Ok(self.state)
    }

    pub fn features(&self) -> Vec<f64> {
        self.state.to_vec()
    }
}
