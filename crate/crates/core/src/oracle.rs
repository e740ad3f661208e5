//! Exact analytics for gridworld skills: stationary distributions by power
//! iteration, exact objective decompositions from transition kernels, and
//! the closed forms for evenly partitioned grids, including the idealized
//! half-grid construction whose border cells forfeit a quarter of their
//! action entropy per transition blocked by the partition.

use crate::envs::gridworld::{step_cell, Move};
use crate::envs::GridWorld;
use crate::error::{Error, Result};
use crate::info::{entropy, Joint};
use crate::diayn::ObjectiveReport;

pub const STATIONARY_TOL: f64 = 1e-12;
pub const STATIONARY_MAX_ITERS: usize = 100_000;

/// Row-stochastic transition matrix over a finite state set.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    pub n: usize,
    /// Row-major n x n.
    pub p: Vec<f64>,
}

impl MarkovChain {
    pub fn zeros(n: usize) -> Self {
        MarkovChain { n, p: vec![0.0; n * n] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.n + j]
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.p[i * self.n + j] += v;
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            let row = &self.p[i * self.n..(i + 1) * self.n];
            if row.iter().any(|&v| v < 0.0) {
                return Err(Error::input(format!("negative entry in row {i}")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::input(format!("row {i} sums to {sum}, not 1")));
            }
        }
        Ok(())
    }

    fn apply(&self, rho: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let ri = rho[i];
            if ri == 0.0 {
                continue;
            }
            let row = &self.p[i * self.n..(i + 1) * self.n];
            for (o, &p) in out.iter_mut().zip(row.iter()) {
                *o += ri * p;
            }
        }
        out
    }

    /// Fixed point of the chain by lazy power iteration from the uniform
    /// distribution, to within `STATIONARY_TOL` in L1.
    pub fn stationary_distribution(&self) -> Result<Vec<f64>> {
        let uniform = vec![1.0 / self.n as f64; self.n];
        self.stationary_from(&uniform)
    }

    /// Fixed point reached from a given start distribution. The lazy map
    /// rho' = (rho + rho P) / 2 shares fixed points with P and converges for
    /// periodic chains too.
    pub fn stationary_from(&self, start: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        let mut rho = start.to_vec();
        for _ in 0..STATIONARY_MAX_ITERS {
            let next = self.apply(&rho);
            let mut diff = 0.0;
            for (a, b) in rho.iter().zip(next.iter()) {
                diff += (a - b).abs();
            }
            rho.iter_mut().zip(next.iter()).for_each(|(a, &b)| *a = 0.5 * *a + 0.5 * b);
            if diff < STATIONARY_TOL {
                // Normalize away accumulated rounding.
                let total: f64 = rho.iter().sum();
                for x in rho.iter_mut() {
                    *x /= total;
                }
                return Ok(rho);
            }
        }
        Err(Error::numeric(format!(
            "power iteration did not converge within {STATIONARY_MAX_ITERS} iterations \
             (chain may be reducible or too slowly mixing)"
        )))
    }

    /// Entrywise detailed balance: rho_i P_ij == rho_j P_ji.
    pub fn detailed_balance_holds(&self, rho: &[f64], tol: f64) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if (rho[i] * self.get(i, j) - rho[j] * self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Transition kernel induced on a grid by per-state action distributions.
pub fn chain_from_policy(grid: &GridWorld, policy: &[Vec<f64>]) -> MarkovChain {
    let n = grid.num_states();
    debug_assert_eq!(policy.len(), n);
    let mut chain = MarkovChain::zeros(n);
    for s in 0..n {
        let cell = grid.cell_of(s);
        for (a, mv) in Move::ALL.iter().enumerate() {
            let t = grid.index_of(step_cell(grid.side, cell, *mv));
            chain.add(s, t, policy[s][a]);
        }
    }
    chain
}

/// One skill prepared for exact analysis: its state kernel, the per-state
/// action entropy it is credited with, and the start distribution its
/// stationary solve uses.
#[derive(Debug, Clone)]
pub struct SkillChain {
    pub chain: MarkovChain,
    pub action_entropy: Vec<f64>,
    pub start: Vec<f64>,
}

impl SkillChain {
    /// From explicit action distributions, started at the grid's start cell.
    pub fn from_policy(grid: &GridWorld, policy: &[Vec<f64>]) -> SkillChain {
        let n = grid.num_states();
        let mut start = vec![0.0; n];
        start[grid.index_of(grid.start_cell())] = 1.0;
        SkillChain {
            chain: chain_from_policy(grid, policy),
            action_entropy: policy.iter().map(|row| entropy(row)).collect(),
            start,
        }
    }

    /// The idealized region-restricted uniform walk: every move fires with
    /// probability 1/4; moves leaving the grid or the region stay in place.
    /// Action entropy follows the border-counting convention: each move
    /// blocked by the partition (not by the grid wall) forfeits a quarter of
    /// log 4.
    pub fn region_uniform(grid: &GridWorld, region: &[bool]) -> Result<SkillChain> {
        let n = grid.num_states();
        if region.len() != n || !region.iter().any(|&r| r) {
            return Err(Error::input("region must be a non-empty cell subset"));
        }
        let mut chain = MarkovChain::zeros(n);
        let mut action_entropy = vec![0.0; n];
        let size = region.iter().filter(|&&r| r).count();
        let mut start = vec![0.0; n];
        for s in 0..n {
            if !region[s] {
                chain.add(s, s, 1.0);
                continue;
            }
            start[s] = 1.0 / size as f64;
            let cell = grid.cell_of(s);
            let mut blocked_by_partition = 0usize;
            for mv in Move::ALL {
                let next_cell = step_cell(grid.side, cell, mv);
                let t = grid.index_of(next_cell);
                if region[t] {
                    chain.add(s, t, 0.25);
                } else {
                    chain.add(s, s, 0.25);
                    blocked_by_partition += 1;
                }
            }
            action_entropy[s] = (4 - blocked_by_partition) as f64 / 4.0 * 4f64.ln();
        }
        Ok(SkillChain { chain, action_entropy, start })
    }
}

/// Exact objective decomposition for a set of skills on a gridworld:
/// p(s, z) = p(z) * rho_z(s) with each rho_z solved to fixed point, no
/// sampling anywhere.
pub fn exact_objective(skills: &[SkillChain], prior: &[f64]) -> Result<ObjectiveReport> {
    if skills.is_empty() || skills.len() != prior.len() {
        return Err(Error::input("need one prior entry per skill"));
    }
    let n = skills[0].chain.n;
    let mut rhos = Vec::with_capacity(skills.len());
    for skill in skills {
        let rho = skill.chain.stationary_from(&skill.start)?;
        // Stationarity sanity: rho must actually be a fixed point.
        let rerolled = skill.chain.apply(&rho);
        let drift: f64 = rho.iter().zip(rerolled.iter()).map(|(a, b)| (a - b).abs()).sum();
        if drift > 1e-9 {
            return Err(Error::numeric(format!(
                "stationary solve drifted by {drift:.3e}; chain is not at a fixed point"
            )));
        }
        rhos.push(rho);
    }

    let joint = Joint::new(
        (0..n)
            .map(|s| rhos.iter().zip(prior.iter()).map(|(rho, &pz)| pz * rho[s]).collect())
            .collect(),
    );
    let h_z = entropy(prior);
    let h_z_given_s = joint.conditional_skill_entropy();
    let mut h_a_given_sz = 0.0;
    for (skill, (rho, &pz)) in skills.iter().zip(rhos.iter().zip(prior.iter())) {
        for (s, &mass) in rho.iter().enumerate() {
            if mass > 0.0 {
                h_a_given_sz += pz * mass * skill.action_entropy[s];
            }
        }
    }
    let f = h_z - h_z_given_s + h_a_given_sz;
    Ok(ObjectiveReport {
        h_z,
        h_z_given_s,
        h_a_given_sz,
        f_estimate: f,
        // Exact posterior: the variational form collapses onto F.
        g_estimate: f,
        effective_skills: h_z.exp(),
    })
}

/// Closed form for the evenly split N x N grid: the achieved action entropy
/// log(4) * (1 - 1/(2N)) and its additive gap log(4) / (2N) from the
/// unpartitioned optimum.
pub fn lemma2_closed_form(n: usize) -> Result<(f64, f64)> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::input(format!(
            "even partition undefined for side {n} (need even n >= 2)"
        )));
    }
    let ln4 = 4f64.ln();
    let h = ln4 * (1.0 - 1.0 / (2.0 * n as f64));
    let gap = ln4 / (2.0 * n as f64);
    Ok((h, gap))
}

/// Bottom-half (or top-half) region mask of an even-sided grid.
pub fn half_grid_region(grid: &GridWorld, top: bool) -> Vec<bool> {
    let n = grid.side;
    (0..grid.num_states())
        .map(|s| {
            let (_, y) = grid.cell_of(s);
            if top {
                y > (n / 2) as i64
            } else {
                y <= (n / 2) as i64
            }
        })
        .collect()
}

/// Objective of an idealized skill-per-region assignment on a w x h grid:
/// skills occupy their cells uniformly (so H[Z|S] = 0), the prior is uniform,
/// and each cell pays a quarter of log 4 per transition blocked by the
/// partition.
pub fn partition_objective(dims: (usize, usize), partition: &[usize], num_skills: usize) -> Result<f64> {
    let (w, h) = dims;
    if partition.len() != w * h {
        return Err(Error::input("partition must label every cell"));
    }
    if partition.iter().any(|&z| z >= num_skills) {
        return Err(Error::input("partition labels a cell with an unknown skill"));
    }
    let mut sizes = vec![0usize; num_skills];
    for &z in partition {
        sizes[z] += 1;
    }
    if sizes.iter().any(|&c| c == 0) {
        return Err(Error::input("every skill needs at least one cell"));
    }

    let idx = |x: usize, y: usize| y * w + x;
    let mut h_a = 0.0;
    for y in 0..h {
        for x in 0..w {
            let z = partition[idx(x, y)];
            let mut blocked = 0usize;
            let mut neighbors: Vec<usize> = Vec::with_capacity(4);
            if x > 0 {
                neighbors.push(idx(x - 1, y));
            }
            if x + 1 < w {
                neighbors.push(idx(x + 1, y));
            }
            if y > 0 {
                neighbors.push(idx(x, y - 1));
            }
            if y + 1 < h {
                neighbors.push(idx(x, y + 1));
            }
            for &t in &neighbors {
                if partition[t] != z {
                    blocked += 1;
                }
            }
            let cell_entropy = (4 - blocked) as f64 / 4.0 * 4f64.ln();
            h_a += cell_entropy / (num_skills as f64 * sizes[z] as f64);
        }
    }
    let h_z = (num_skills as f64).ln();
    Ok(h_z + h_a)
}

/// Number of adjacent cell pairs assigned to different skills.
pub fn border_length(dims: (usize, usize), partition: &[usize]) -> usize {
    let (w, h) = dims;
    let idx = |x: usize, y: usize| y * w + x;
    let mut len = 0;
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w && partition[idx(x, y)] != partition[idx(x + 1, y)] {
                len += 1;
            }
            if y + 1 < h && partition[idx(x, y)] != partition[idx(x, y + 1)] {
                len += 1;
            }
        }
    }
    len
}

/// Construct the half-grid skill pair and verify the claimed optimum: each
/// skill's stationary distribution is uniform 2/N^2 over its half, and the
/// kernel satisfies detailed balance entrywise.
pub fn verify_fig5_policy(n: usize) -> Result<bool> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::input("half partition needs an even grid side"));
    }
    let grid = GridWorld::new(n);
    for top in [false, true] {
        let region = half_grid_region(&grid, top);
        let skill = SkillChain::region_uniform(&grid, &region)?;
        if !verify_region_uniform(&skill, &region, n) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The checkable core of the construction, exposed so tests can perturb the
/// kernel and watch the verification fail.
pub fn verify_region_uniform(skill: &SkillChain, region: &[bool], n: usize) -> bool {
    // Start concentrated at the first region cell to make the solve
    // non-trivial rather than starting at the answer.
    let mut start = vec![0.0; skill.chain.n];
    match region.iter().position(|&r| r) {
        Some(first) => start[first] = 1.0,
        None => return false,
    }
    let rho = match skill.chain.stationary_from(&start) {
        Ok(r) => r,
        Err(_) => return false,
    };
    let expected = 2.0 / (n * n) as f64;
    for (s, &inside) in region.iter().enumerate() {
        let want = if inside { expected } else { 0.0 };
        if (rho[s] - want).abs() > 1e-9 {
            return false;
        }
    }
    skill.chain.detailed_balance_holds(&rho, 1e-12)
}

/// All total two-skill partitions of a small grid, encoded as bitmasks.
/// Intended for exhaustive enumeration; capped at 16 cells.
pub fn enumerate_two_skill_partitions(dims: (usize, usize)) -> Result<Vec<Vec<usize>>> {
    let cells = dims.0 * dims.1;
    if cells > 16 {
        return Err(Error::input("enumeration capped at grids with <= 16 cells"));
    }
    let mut out = Vec::new();
    for mask in 1u32..((1u32 << cells) - 1) {
        out.push((0..cells).map(|c| ((mask >> c) & 1) as usize).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    /// Dense solve of rho P = rho with sum(rho) = 1 by Gaussian elimination;
    /// the independent cross-check for power iteration.
    fn stationary_linear_solve(chain: &MarkovChain) -> Vec<f64> {
        let n = chain.n;
        // (P^T - I) rho = 0, last equation replaced by sum = 1.
        let mut a = vec![vec![0.0f64; n + 1]; n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = chain.get(j, i) - if i == j { 1.0 } else { 0.0 };
            }
        }
        for j in 0..n {
            a[n - 1][j] = 1.0;
        }
        a[n - 1][n] = 1.0;
        // Gaussian elimination with partial pivoting.
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap())
                .unwrap();
            a.swap(col, pivot);
            let pv = a[col][col];
            assert!(pv.abs() > 1e-14, "singular system");
            for j in col..=n {
                a[col][j] /= pv;
            }
            for row in 0..n {
                if row != col && a[row][col].abs() > 0.0 {
                    let factor = a[row][col];
                    for j in col..=n {
                        a[row][j] -= factor * a[col][j];
                    }
                }
            }
        }
        (0..n).map(|i| a[i][n]).collect()
    }

    fn uniform_walk_chain(n: usize) -> (GridWorld, MarkovChain) {
        let grid = GridWorld::new(n);
        let policy = vec![vec![0.25; 4]; grid.num_states()];
        let chain = chain_from_policy(&grid, &policy);
        (grid, chain)
    }

    #[test]
    fn clamped_uniform_walk_matches_linear_solve() {
        // The stay-in-place walk has a symmetric kernel, so its fixed point
        // is exactly uniform; both solvers must find it.
        let (_, chain) = uniform_walk_chain(4);
        let by_power = chain.stationary_distribution().unwrap();
        let by_solve = stationary_linear_solve(&chain);
        for (a, b) in by_power.iter().zip(by_solve.iter()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            assert!((a - 1.0 / 16.0).abs() < 1e-9);
        }
        let total: f64 = by_power.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn feasible_move_walk_matches_linear_solve_and_is_nonuniform() {
        // Uniform over feasible moves instead: a graph random walk whose
        // fixed point weights cells by degree, hence non-uniform.
        let grid = GridWorld::new(4);
        let n = grid.num_states();
        let policy: Vec<Vec<f64>> = (0..n)
            .map(|s| {
                let cell = grid.cell_of(s);
                let feasible: Vec<bool> = Move::ALL
                    .iter()
                    .map(|&mv| step_cell(grid.side, cell, mv) != cell)
                    .collect();
                let deg = feasible.iter().filter(|&&f| f).count() as f64;
                feasible.iter().map(|&f| if f { 1.0 / deg } else { 0.0 }).collect()
            })
            .collect();
        let chain = chain_from_policy(&grid, &policy);
        let by_power = chain.stationary_distribution().unwrap();
        let by_solve = stationary_linear_solve(&chain);
        for (a, b) in by_power.iter().zip(by_solve.iter()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        let spread = by_power.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - by_power.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread > 1e-3, "unexpectedly uniform: spread {spread}");
        // Degree-proportional check: corners have degree 2, interior 4.
        let corner = by_power[grid.index_of((1, 1))];
        let interior = by_power[grid.index_of((2, 2))];
        assert!((interior / corner - 2.0).abs() < 1e-6);
    }

    #[test]
    fn half_grid_construction_is_uniform_two_over_n_squared() {
        let grid = GridWorld::new(4);
        let region = half_grid_region(&grid, false);
        let skill = SkillChain::region_uniform(&grid, &region).unwrap();
        let rho = skill.chain.stationary_from(&skill.start).unwrap();
        for (s, &inside) in region.iter().enumerate() {
            let want = if inside { 2.0 / 16.0 } else { 0.0 };
            assert!((rho[s] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn absorbing_state_gives_one_hot() {
        let mut chain = MarkovChain::zeros(3);
        chain.add(0, 1, 1.0);
        chain.add(1, 2, 1.0);
        chain.add(2, 2, 1.0);
        let rho = chain.stationary_distribution().unwrap();
        assert!((rho[2] - 1.0).abs() < 1e-9);
        assert!(rho[0].abs() < 1e-9 && rho[1].abs() < 1e-9);
    }

    #[test]
    fn exact_objective_on_half_partition_hits_lemma_values() {
        for n in [2usize, 4, 6] {
            let grid = GridWorld::new(n);
            let bottom = SkillChain::region_uniform(&grid, &half_grid_region(&grid, false)).unwrap();
            let top = SkillChain::region_uniform(&grid, &half_grid_region(&grid, true)).unwrap();
            let report = exact_objective(&[bottom, top], &[0.5, 0.5]).unwrap();
            assert!(report.h_z_given_s.abs() < 1e-12, "H[Z|S] = {}", report.h_z_given_s);
            assert!((report.h_z - 2f64.ln()).abs() < 1e-12);
            let (h, _) = lemma2_closed_form(n).unwrap();
            assert!(
                (report.h_a_given_sz - h).abs() < 1e-9,
                "n={n}: {} vs {h}",
                report.h_a_given_sz
            );
        }
    }

    #[test]
    fn identical_skills_confuse_maximally() {
        let (grid, _) = uniform_walk_chain(4);
        let policy = vec![vec![0.25; 4]; grid.num_states()];
        let a = SkillChain::from_policy(&grid, &policy);
        let b = SkillChain::from_policy(&grid, &policy);
        let report = exact_objective(&[a, b], &[0.5, 0.5]).unwrap();
        assert!((report.h_z_given_s - 2f64.ln()).abs() < 1e-9);
        // F loses the whole log 2: it reduces to the entropy term alone.
        assert!((report.f_estimate - report.h_a_given_sz).abs() < 1e-9);
    }

    #[test]
    fn exact_objective_agrees_with_monte_carlo_on_random_policies() {
        let mut rng = Rng::seed_from(99);
        let grid = GridWorld::new(3);
        let n = grid.num_states();
        let mut skills = Vec::new();
        for _ in 0..2 {
            let policy: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let raw: Vec<f64> = (0..4).map(|_| rng.next_f64() + 0.1).collect();
                    let total: f64 = raw.iter().sum();
                    raw.into_iter().map(|x| x / total).collect()
                })
                .collect();
            skills.push(SkillChain::from_policy(&grid, &policy));
        }
        let exact = exact_objective(&skills, &[0.5, 0.5]).unwrap();

        // Monte-Carlo oracle: simulate each chain for a million steps and
        // plug the empirical distributions into the same decomposition.
        let total_steps = 1_000_000usize;
        let mut rhos = Vec::new();
        for skill in &skills {
            let mut counts = vec![0u64; n];
            let mut s = grid.index_of(grid.start_cell());
            for _ in 0..total_steps {
                let row = &skill.chain.p[s * n..(s + 1) * n];
                s = rng.sample_index(row);
                counts[s] += 1;
            }
            rhos.push(counts.iter().map(|&c| c as f64 / total_steps as f64).collect::<Vec<_>>());
        }
        let joint = Joint::new(
            (0..n).map(|s| rhos.iter().map(|rho: &Vec<f64>| 0.5 * rho[s]).collect()).collect(),
        );
        let mc_h_z_given_s = joint.conditional_skill_entropy();
        let mut mc_h_a = 0.0;
        for (skill, rho) in skills.iter().zip(rhos.iter()) {
            for (s, &mass) in rho.iter().enumerate() {
                mc_h_a += 0.5 * mass * skill.action_entropy[s];
            }
        }
        let mc_f = 2f64.ln() - mc_h_z_given_s + mc_h_a;
        assert!(
            (mc_f - exact.f_estimate).abs() < 0.01,
            "monte carlo {mc_f} vs exact {}",
            exact.f_estimate
        );
    }

    #[test]
    fn lemma2_values() {
        let (h4, gap4) = lemma2_closed_form(4).unwrap();
        assert!((h4 - 4f64.ln() * 7.0 / 8.0).abs() < 1e-15);
        assert!((h4 - 1.21300).abs() < 1e-5);
        assert!((gap4 - 0.17329).abs() < 1e-5);

        let (h2, _) = lemma2_closed_form(2).unwrap();
        assert!((h2 - 4f64.ln() * 0.75).abs() < 1e-15);
        assert!((h2 - 1.03972).abs() < 1e-5);

        assert!(lemma2_closed_form(3).is_err());
        assert!(lemma2_closed_form(0).is_err());

        let mut prev = f64::INFINITY;
        for n in (2..=40).step_by(2) {
            let (_, gap) = lemma2_closed_form(n).unwrap();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 0.02);
    }

    #[test]
    fn n2_all_states_are_border() {
        // For the 2x2 grid both rows touch the partition; the closed form
        // must equal the all-border entropy directly.
        let (h2, _) = lemma2_closed_form(2).unwrap();
        let all_border = 0.75 * 4f64.ln();
        assert!((h2 - all_border).abs() < 1e-15);
    }

    #[test]
    fn long_axis_split_beats_short_axis_split() {
        // 4 x 8 grid: cutting across the long axis gives a border of 4
        // (two 4x4 halves); cutting across the short axis gives 8.
        let dims = (8usize, 4usize);
        let long_split: Vec<usize> = (0..32).map(|c| if c % 8 < 4 { 0 } else { 1 }).collect();
        let short_split: Vec<usize> = (0..32).map(|c| if c / 8 < 2 { 0 } else { 1 }).collect();
        assert_eq!(border_length(dims, &long_split), 4);
        assert_eq!(border_length(dims, &short_split), 8);
        let better = partition_objective(dims, &long_split, 2).unwrap();
        let worse = partition_objective(dims, &short_split, 2).unwrap();
        assert!(better > worse, "{better} vs {worse}");
    }

    #[test]
    fn symmetric_splits_score_equal() {
        let dims = (4usize, 4usize);
        let horizontal: Vec<usize> = (0..16).map(|c| if c / 4 < 2 { 0 } else { 1 }).collect();
        let vertical: Vec<usize> = (0..16).map(|c| if c % 4 < 2 { 0 } else { 1 }).collect();
        let a = partition_objective(dims, &horizontal, 2).unwrap();
        let b = partition_objective(dims, &vertical, 2).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn single_skill_reduces_to_entropy_term() {
        let dims = (3usize, 3usize);
        let partition = vec![0usize; 9];
        let v = partition_objective(dims, &partition, 1).unwrap();
        // H[Z] = 0 and no borders: the full log 4 everywhere.
        assert!((v - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn empty_class_rejected() {
        let dims = (2usize, 2usize);
        assert!(partition_objective(dims, &[0, 0, 0, 0], 2).is_err());
    }

    #[test]
    fn fig5_verification_passes_and_perturbation_fails() {
        assert!(verify_fig5_policy(4).unwrap());
        assert!(verify_fig5_policy(6).unwrap());
        assert!(verify_fig5_policy(3).is_err());

        // Perturb one transition pair: move mass from a self-loop onto a
        // neighbor, keeping rows stochastic but breaking the symmetry.
        let grid = GridWorld::new(4);
        let region = half_grid_region(&grid, false);
        let mut skill = SkillChain::region_uniform(&grid, &region).unwrap();
        let s = grid.index_of((1, 1));
        let t = grid.index_of((2, 1));
        let n = skill.chain.n;
        skill.chain.p[s * n + s] -= 0.1;
        skill.chain.p[s * n + t] += 0.1;
        assert!(!verify_region_uniform(&skill, &region, 4));
    }

    #[test]
    fn unregularized_optimum_over_all_partitions() {
        // Any total two-skill partition with uniform-over-region skills has
        // H[Z|S] = 0 and H[Z] = log 2, so the half split must sit at the
        // global maximum of the unregularized objective.
        for dims in [(2usize, 2usize), (4usize, 4usize)] {
            let grid = GridWorld::new(dims.0);
            let mut best = f64::NEG_INFINITY;
            for partition in enumerate_two_skill_partitions(dims).unwrap() {
                let region: Vec<bool> = partition.iter().map(|&z| z == 0).collect();
                let a = match SkillChain::region_uniform(&grid, &region) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                let flipped: Vec<bool> = region.iter().map(|&r| !r).collect();
                let b = match SkillChain::region_uniform(&grid, &flipped) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                let report = exact_objective(&[a, b], &[0.5, 0.5]).unwrap();
                let unregularized = report.h_z - report.h_z_given_s;
                best = best.max(unregularized);
                assert!(unregularized <= 2f64.ln() + 1e-9);
            }
            let half = half_grid_region(&grid, false);
            let a = SkillChain::region_uniform(&grid, &half).unwrap();
            let flipped: Vec<bool> = half.iter().map(|&r| !r).collect();
            let b = SkillChain::region_uniform(&grid, &flipped).unwrap();
            let report = exact_objective(&[a, b], &[0.5, 0.5]).unwrap();
            assert!((report.h_z - report.h_z_given_s - best).abs() < 1e-9);
        }
    }
}
