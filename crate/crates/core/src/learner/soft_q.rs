//! Tabular soft Q-learning for discrete environments: entropy-regularized
//! values with a Boltzmann policy at temperature `alpha`.

use crate::info::entropy;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftQTable {
    pub num_skills: usize,
    pub num_states: usize,
    pub num_actions: usize,
    /// Flat `[skill][state][action]` table.
    pub q: Vec<f64>,
    /// Entropy temperature.
    pub alpha: f64,
    pub gamma: f64,
    pub lr: f64,
}

impl SoftQTable {
    pub fn new(num_skills: usize, num_states: usize, num_actions: usize, alpha: f64, gamma: f64, lr: f64) -> Self {
        assert!(alpha > 0.0, "alpha must be positive");
        SoftQTable {
            num_skills,
            num_states,
            num_actions,
            q: vec![0.0; num_skills * num_states * num_actions],
            alpha,
            gamma,
            lr,
        }
    }

    fn base(&self, z: usize, s: usize) -> usize {
        (z * self.num_states + s) * self.num_actions
    }

    pub fn q_row(&self, z: usize, s: usize) -> &[f64] {
        let b = self.base(z, s);
        &self.q[b..b + self.num_actions]
    }

    pub fn q_value(&self, z: usize, s: usize, a: usize) -> f64 {
        self.q[self.base(z, s) + a]
    }

    pub fn set_q(&mut self, z: usize, s: usize, a: usize, v: f64) {
        let i = self.base(z, s) + a;
        self.q[i] = v;
    }

    /// Soft state value V = alpha * logsumexp(Q / alpha), computed stably.
    pub fn soft_value(&self, z: usize, s: usize) -> f64 {
        soft_value_of_row(self.q_row(z, s), self.alpha)
    }

    /// One soft Bellman update on a single transition:
    /// Q(z,s,a) += lr * (r + gamma * V(z,s') - Q(z,s,a)).
    pub fn update(&mut self, z: usize, s: usize, a: usize, r: f64, s_next: usize) {
        let target = r + self.gamma * self.soft_value(z, s_next);
        let i = self.base(z, s) + a;
        self.q[i] += self.lr * (target - self.q[i]);
    }

    /// Boltzmann policy pi(a|s,z) proportional to exp(Q/alpha).
    pub fn policy(&self, z: usize, s: usize) -> Vec<f64> {
        softmax_scaled(self.q_row(z, s), self.alpha)
    }

    /// Deterministic greedy action; ties break to the lowest index.
    pub fn greedy(&self, z: usize, s: usize) -> usize {
        argmax(self.q_row(z, s))
    }
}

/// Lowest-index argmax.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// alpha * logsumexp(row / alpha) with the max factored out.
pub fn soft_value_of_row(row: &[f64], alpha: f64) -> f64 {
    let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = row.iter().map(|&q| ((q - m) / alpha).exp()).sum();
    m + alpha * sum.ln()
}

/// softmax(row / alpha), shift-invariant by construction.
pub fn softmax_scaled(row: &[f64], alpha: f64) -> Vec<f64> {
    let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = row.iter().map(|&q| ((q - m) / alpha).exp()).collect();
    let total: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= total;
    }
    w
}

/// Shannon entropy (nats) of an action distribution.
pub fn policy_entropy(dist: &[f64]) -> f64 {
    entropy(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use proptest::prelude::*;

    #[test]
    fn soft_value_uniform_row() {
        let t = SoftQTable::new(1, 1, 4, 0.1, 0.99, 0.1);
        assert!((t.soft_value(0, 0) - 0.1 * 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn soft_value_recovers_max_as_alpha_vanishes() {
        let mut t = SoftQTable::new(1, 1, 4, 1e-9, 0.99, 0.1);
        t.set_q(0, 0, 0, 1.0);
        assert!((t.soft_value(0, 0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn soft_value_direct_logsumexp() {
        // Independent evaluation of log(e + e^2 + e^3 + e^4).
        let direct = (1f64.exp() + 2f64.exp() + 3f64.exp() + 4f64.exp()).ln();
        let row = [1.0, 2.0, 3.0, 4.0];
        assert!((soft_value_of_row(&row, 1.0) - direct).abs() < 1e-12);
        assert!((direct - 4.4402).abs() < 1e-4);
    }

    #[test]
    fn one_step_bandit_update() {
        let mut t = SoftQTable::new(1, 2, 4, 0.1, 0.0, 1.0);
        t.update(0, 0, 2, 1.0, 1);
        assert!((t.q_value(0, 0, 2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_lr_is_noop() {
        let mut t = SoftQTable::new(1, 2, 4, 0.1, 0.9, 0.0);
        let before = t.q.clone();
        t.update(0, 0, 1, 5.0, 1);
        assert_eq!(t.q, before);
    }

    #[test]
    fn two_state_chain_reaches_soft_bellman_fixed_point() {
        // Chain: state 0 -(any action)-> state 1, state 1 -> state 0.
        // Rewards: 1 when leaving state 0, 0 otherwise.
        let alpha = 0.1;
        let gamma = 0.9;
        let reward = |s: usize| if s == 0 { 1.0 } else { 0.0 };

        // Oracle: independent soft value iteration on Q directly.
        let mut q_star = vec![[0.0f64; 2]; 2]; // [state][action]
        for _ in 0..2000 {
            let v: Vec<f64> = q_star.iter().map(|row| soft_value_of_row(row, alpha)).collect();
            for s in 0..2 {
                for a in 0..2 {
                    q_star[s][a] = reward(s) + gamma * v[1 - s];
                }
            }
        }

        // Learner: repeated sweeps with lr = 1 on the deterministic transitions.
        let mut t = SoftQTable::new(1, 2, 2, alpha, gamma, 1.0);
        for _ in 0..2000 {
            for s in 0..2 {
                for a in 0..2 {
                    t.update(0, s, a, reward(s), 1 - s);
                }
            }
        }
        for s in 0..2 {
            for a in 0..2 {
                assert!(
                    (t.q_value(0, s, a) - q_star[s][a]).abs() < 1e-10,
                    "fixed point mismatch at ({s},{a})"
                );
            }
        }
    }

    #[test]
    fn constant_row_gives_uniform_policy() {
        let t = SoftQTable::new(1, 1, 4, 0.5, 0.99, 0.1);
        let p = t.policy(0, 0);
        for x in p {
            assert!((x - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn log3_row_gives_half_mass() {
        let alpha = 0.37;
        let mut t = SoftQTable::new(1, 1, 4, alpha, 0.99, 0.1);
        t.set_q(0, 0, 0, alpha * 3f64.ln());
        let p = t.policy(0, 0);
        assert!((p[0] - 0.5).abs() < 1e-12);
        for x in &p[1..] {
            assert!((x - 1.0 / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn huge_alpha_gives_uniform_policy() {
        let mut t = SoftQTable::new(1, 1, 4, 1e12, 0.99, 0.1);
        t.set_q(0, 0, 0, 100.0);
        t.set_q(0, 0, 1, -50.0);
        for x in t.policy(0, 0) {
            assert!((x - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn policy_entropy_examples() {
        assert!((policy_entropy(&[0.25; 4]) - 4f64.ln()).abs() < 1e-12);
        assert_eq!(policy_entropy(&[1.0, 0.0, 0.0, 0.0]), 0.0);
        assert!((policy_entropy(&[0.5, 0.5, 0.0, 0.0]) - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_decreases_as_one_entry_grows_from_uniform() {
        let mut rng = Rng::seed_from(31);
        for _ in 0..20 {
            let i = rng.below(4);
            let mut prev = f64::INFINITY;
            for step in 0..30 {
                let mut row = [1.0; 4];
                row[i] += 0.05 * step as f64;
                let h = policy_entropy(&softmax_scaled(&row, 1.0));
                assert!(h <= prev + 1e-12, "entropy rose while raising entry {i}");
                prev = h;
            }
        }
    }

    #[test]
    fn greedy_ties_break_low() {
        assert_eq!(argmax(&[1.0, 1.0, 0.5]), 0);
        assert_eq!(argmax(&[0.0, 2.0, 2.0]), 1);
    }

    proptest! {
        #[test]
        fn softmax_is_shift_invariant(
            q0 in -5.0f64..5.0, q1 in -5.0f64..5.0,
            q2 in -5.0f64..5.0, q3 in -5.0f64..5.0,
            c in -10.0f64..10.0,
        ) {
            let row = [q0, q1, q2, q3];
            let shifted = [q0 + c, q1 + c, q2 + c, q3 + c];
            let p = softmax_scaled(&row, 0.3);
            let ps = softmax_scaled(&shifted, 0.3);
            for (a, b) in p.iter().zip(ps.iter()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn soft_value_dominates_every_q(
            q0 in -5.0f64..5.0, q1 in -5.0f64..5.0,
            q2 in -5.0f64..5.0, q3 in -5.0f64..5.0,
        ) {
            let row = [q0, q1, q2, q3];
            let v = soft_value_of_row(&row, 0.2);
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for &q in &row {
                prop_assert!(v >= q - 1e-12);
            }
            prop_assert!(v <= max + 0.2 * 4f64.ln() + 1e-12);
        }
    }
}
