//! Entropy and mutual-information helpers for discrete distributions,
//! all in nats (base e).

/// Shannon entropy of a probability vector. Zero entries contribute zero.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum()
}

/// A joint distribution p(s, z) over a finite state set and skill set,
/// stored row-major: `p[s][z]`.
#[derive(Debug, Clone)]
pub struct Joint {
    pub p: Vec<Vec<f64>>,
}

impl Joint {
    pub fn new(p: Vec<Vec<f64>>) -> Self {
        Joint { p }
    }

    pub fn num_states(&self) -> usize {
        self.p.len()
    }

    pub fn num_skills(&self) -> usize {
        self.p.first().map_or(0, |row| row.len())
    }

    pub fn state_marginal(&self) -> Vec<f64> {
        self.p.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn skill_marginal(&self) -> Vec<f64> {
        let k = self.num_skills();
        let mut m = vec![0.0; k];
        for row in &self.p {
            for (z, v) in row.iter().enumerate() {
                m[z] += v;
            }
        }
        m
    }

    /// H[Z] from the skill marginal.
    pub fn skill_entropy(&self) -> f64 {
        entropy(&self.skill_marginal())
    }

    /// H[Z|S] = -sum_{s,z} p(s,z) log p(z|s).
    pub fn conditional_skill_entropy(&self) -> f64 {
        let ps = self.state_marginal();
        let mut h = 0.0;
        for (row, &psm) in self.p.iter().zip(ps.iter()) {
            if psm <= 0.0 {
                continue;
            }
            for &psz in row {
                if psz > 0.0 {
                    h -= psz * (psz / psm).ln();
                }
            }
        }
        h
    }

    /// I(S;Z) computed directly from the joint.
    pub fn mutual_information(&self) -> f64 {
        let ps = self.state_marginal();
        let pz = self.skill_marginal();
        let mut mi = 0.0;
        for (s, row) in self.p.iter().enumerate() {
            for (z, &psz) in row.iter().enumerate() {
                if psz > 0.0 {
                    mi += psz * (psz / (ps[s] * pz[z])).ln();
                }
            }
        }
        mi
    }

    /// E_{s,z}[log p(z|s)] under this joint, for the exact posterior.
    pub fn expected_log_posterior(&self) -> f64 {
        let ps = self.state_marginal();
        let mut e = 0.0;
        for (row, &psm) in self.p.iter().zip(ps.iter()) {
            if psm <= 0.0 {
                continue;
            }
            for &psz in row {
                if psz > 0.0 {
                    e += psz * (psz / psm).ln();
                }
            }
        }
        e
    }

    /// E_{s,z}[log q(z|s)] for an arbitrary per-state classifier `q[s][z]`.
    /// By Jensen this never exceeds `expected_log_posterior`.
    pub fn expected_log_classifier(&self, q: &[Vec<f64>]) -> f64 {
        let mut e = 0.0;
        for (s, row) in self.p.iter().enumerate() {
            for (z, &psz) in row.iter().enumerate() {
                if psz > 0.0 {
                    e += psz * q[s][z].ln();
                }
            }
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn random_joint(rng: &mut Rng, states: usize, skills: usize) -> Joint {
        let mut p: Vec<Vec<f64>> = (0..states)
            .map(|_| (0..skills).map(|_| rng.next_f64() + 1e-3).collect())
            .collect();
        let total: f64 = p.iter().flatten().sum();
        for row in &mut p {
            for v in row.iter_mut() {
                *v /= total;
            }
        }
        Joint::new(p)
    }

    #[test]
    fn entropy_basics() {
        assert!((entropy(&[0.25; 4]) - 4f64.ln()).abs() < 1e-12);
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
        assert!((entropy(&[0.5, 0.5, 0.0, 0.0]) - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn mi_identity_on_random_joints() {
        let mut rng = Rng::seed_from(42);
        for _ in 0..200 {
            let j = random_joint(&mut rng, 4, 2);
            let lhs = j.mutual_information();
            let rhs = j.skill_entropy() - j.conditional_skill_entropy();
            assert!((lhs - rhs).abs() < 1e-9, "identity violated: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn classifier_bound_never_exceeds_posterior() {
        let mut rng = Rng::seed_from(7);
        for _ in 0..200 {
            let j = random_joint(&mut rng, 4, 2);
            let mut q: Vec<Vec<f64>> = (0..4)
                .map(|_| {
                    let a = rng.next_f64() + 1e-6;
                    let b = rng.next_f64() + 1e-6;
                    vec![a / (a + b), b / (a + b)]
                })
                .collect();
            let exact = j.expected_log_posterior();
            let bound = j.expected_log_classifier(&q);
            assert!(bound <= exact + 1e-12, "bound {bound} above exact {exact}");
            // Plugging the true posterior in recovers the exact value.
            let ps = j.state_marginal();
            for (s, row) in q.iter_mut().enumerate() {
                for (z, v) in row.iter_mut().enumerate() {
                    *v = j.p[s][z] / ps[s];
                }
            }
            assert!((j.expected_log_classifier(&q) - exact).abs() < 1e-12);
        }
    }
}
