//! Continuous mountain car. An underpowered car in a valley must build
//! momentum to reach the flag on the right hill.

use serde::{Deserialize, Serialize};

pub const POS_MIN: f64 = -1.2;
pub const POS_MAX: f64 = 0.6;
pub const VEL_MAX: f64 = 0.07;
pub const GOAL_POS: f64 = 0.45;
pub const START_POS: f64 = -0.5;

/// One step of the dynamics. Returns (position, velocity, done).
pub fn step(pos: f64, vel: f64, action: f64) -> (f64, f64, bool) {
    let a = action.clamp(-1.0, 1.0);
    let mut v = (vel + 0.0015 * a - 0.0025 * (3.0 * pos).cos()).clamp(-VEL_MAX, VEL_MAX);
    let mut p = pos + v;
    if p < POS_MIN {
        p = POS_MIN;
        v = 0.0;
    } else if p > POS_MAX {
        p = POS_MAX;
    }
    (p, v, p >= GOAL_POS)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MountainCar {
    pos: f64,
    vel: f64,
}

impl Default for MountainCar {
    fn default() -> Self {
        Self::new()
    }
}

impl MountainCar {
    pub fn new() -> Self {
        MountainCar { pos: START_POS, vel: 0.0 }
    }

    pub fn reset(&mut self) -> (f64, f64) {
        self.pos = START_POS;
        self.vel = 0.0;
        (self.pos, self.vel)
    }

    pub fn state(&self) -> (f64, f64) {
        (self.pos, self.vel)
    }

    pub fn step(&mut self, action: f64) -> bool {
        let (p, v, done) = step(self.pos, self.vel, action);
        self.pos = p;
        self.vel = v;
        done
    }

    pub fn features(&self) -> Vec<f64> {
        vec![self.pos, self.vel]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_evaluation_at_rest() {
        let (_, v, done) = step(-0.5, 0.0, 0.0);
        assert!((v - (-0.0025 * (-1.5f64).cos())).abs() < 1e-15);
        assert!(!done);
    }

    #[test]
    fn threshold_crossing_terminates() {
        let (p, _, done) = step(0.449, 0.07, 1.0);
        assert!(done && p >= GOAL_POS);
    }

    #[test]
    fn zero_action_stays_in_valley() {
        let mut car = MountainCar::new();
        for _ in 0..200 {
            let done = car.step(0.0);
            assert!(!done);
            let (p, v) = car.state();
            assert!((POS_MIN..GOAL_POS).contains(&p), "escaped valley: {p}");
            assert!(p < 0.0, "climbed without thrust: {p}");
            assert!(v.abs() <= VEL_MAX);
        }
    }

    #[test]
    fn left_wall_zeroes_velocity() {
        let (p, v, _) = step(POS_MIN + 0.001, -0.05, -1.0);
        assert_eq!(p, POS_MIN);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn bounds_always_hold() {
        let mut pos = START_POS;
        let mut vel = 0.0;
        for i in 0..1000 {
            let a = if i % 17 < 9 { 1.0 } else { -1.0 };
            let (p, v, done) = step(pos, vel, a);
            assert!((POS_MIN..=POS_MAX).contains(&p));
            assert!(v.abs() <= VEL_MAX);
            if done {
                break;
            }
            pos = p;
            vel = v;
        }
    }
}
