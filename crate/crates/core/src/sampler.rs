//! Sampling the tree-indexed Markov chain on a finite Cayley subtree.
//!
//! Vertices are numbered in level order with the root at 0. The root has
//! `k + 1` children and every other internal vertex `k`. The root spin is
//! drawn from the stationary law, every other spin from its parent's row.
//!
//! Each draw uses a ChaCha8 stream keyed by `(seed, vertex)` at a word
//! position fixed by the sample index. A configuration therefore does not
//! depend on traversal order or on how samples are split across threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{stationary, TransitionKernel};
use crate::error::{Error, Result};
use crate::model::WandAdmissibility;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub k: u32,
    pub depth: u32,
    pub seed: u64,
}

impl TreeConfig {
    pub fn new(k: u32, depth: u32, seed: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("tree order k must be >= 2, got {k}")));
        }
        let cfg = Self { k, depth, seed };
        // refuse trees whose size overflows
        cfg.checked_vertex_count()
            .ok_or_else(|| Error::Domain(format!("tree of order {k} and depth {depth} is too large")))?;
        Ok(cfg)
    }

    fn checked_vertex_count(&self) -> Option<usize> {
        let mut total: usize = 1;
        let mut level: usize = 1;
        for l in 1..=self.depth {
            level = if l == 1 { self.k as usize + 1 } else { level.checked_mul(self.k as usize)? };
            total = total.checked_add(level)?;
        }
        Some(total)
    }

    /// `1 + (k+1)(k^n − 1)/(k − 1)` vertices for depth `n`.
    pub fn vertex_count(&self) -> usize {
        self.level_start(self.depth + 1)
    }

    pub fn level_size(&self, level: u32) -> usize {
        match level {
            0 => 1,
            l => (self.k as usize + 1) * (self.k as usize).pow(l - 1),
        }
    }

    /// Index of the first vertex of `level`.
    pub fn level_start(&self, level: u32) -> usize {
        (0..level).map(|l| self.level_size(l)).sum()
    }

    /// Parent of vertex `v > 0`.
    pub fn parent(&self, v: usize) -> usize {
        assert!(v > 0, "the root has no parent");
        let k = self.k as usize;
        if v <= k + 1 {
            return 0;
        }
        let mut level = 1;
        let mut start = 1;
        while start + self.level_size(level) <= v {
            start += self.level_size(level);
            level += 1;
        }
        let prev_start = start - self.level_size(level - 1);
        prev_start + (v - start) / k
    }
}

/// Spins indexed by level-order vertex id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub tree: TreeConfig,
    pub spins: Vec<u8>,
}

impl Configuration {
    pub fn spin(&self, v: usize) -> u8 {
        self.spins[v]
    }

    pub fn level(&self, level: u32) -> &[u8] {
        let start = self.tree.level_start(level);
        &self.spins[start..start + self.tree.level_size(level)]
    }

    /// Parent-child pairs `(parent spin, child spin)` in level order.
    pub fn edges(&self) -> impl Iterator<Item = (u8, u8)> + '_ {
        (1..self.spins.len()).map(move |v| (self.spins[self.tree.parent(v)], self.spins[v]))
    }

    pub fn violations(&self, adm: &WandAdmissibility) -> usize {
        self.edges()
            .filter(|&(a, b)| !adm.is_admissible(a as usize, b as usize).unwrap_or(false))
            .count()
    }
}

/// Samples per batch: 32 draws of two words fill one ChaCha buffer.
const CHUNK: u64 = 32;

struct Draws {
    base: ChaCha8Rng,
}

impl Draws {
    fn new(seed: u64) -> Self {
        Self { base: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniforms in `[0, 1)` for `vertex` and samples `first..first + out.len()`.
    /// Sample `i` always reads words `2i` and `2i + 1` of the vertex's stream.
    fn fill(&self, vertex: usize, first: u64, out: &mut [f64]) {
        let mut rng = self.base.clone();
        rng.set_stream(vertex as u64);
        rng.set_word_pos(u128::from(first) * 2);
        for u in out {
            *u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        }
    }
}

/// Inverse-CDF draw that never returns a zero-probability state.
fn pick(row: &[f64; 3], u: f64) -> u8 {
    let mut cum = 0.0;
    let mut last = 0;
    for (s, &p) in row.iter().enumerate() {
        if p > 0.0 {
            cum += p;
            last = s;
            if u < cum {
                return s as u8;
            }
        }
    }
    last as u8
}

/// Samples `first..first + count`, stored vertex-major: the spin of vertex
/// `v` in sample `first + j` is at `v * count + j`.
fn sample_batch(kern: &TransitionKernel, pi: &[f64; 3], tree: &TreeConfig, draws: &Draws, first: u64, count: usize) -> Vec<u8> {
    let n = tree.vertex_count();
    let mut spins = vec![0u8; n * count];
    let mut u = vec![0.0; count];
    draws.fill(0, first, &mut u);
    for j in 0..count {
        spins[j] = pick(pi, u[j]);
    }
    let k = tree.k as usize;
    let mut child = 1;
    let mut parent = 0;
    while child < n {
        let fanout = if parent == 0 { k + 1 } else { k };
        for _ in 0..fanout.min(n - child) {
            draws.fill(child, first, &mut u);
            for j in 0..count {
                let row = &kern.p()[spins[parent * count + j] as usize];
                spins[child * count + j] = pick(row, u[j]);
            }
            child += 1;
        }
        parent += 1;
    }
    spins
}

fn sample_indexed(kern: &TransitionKernel, pi: &[f64; 3], tree: &TreeConfig, draws: &Draws, index: u64) -> Configuration {
    Configuration { tree: *tree, spins: sample_batch(kern, pi, tree, draws, index, 1) }
}

/// One configuration on the subtree described by `cfg`.
pub fn sample(kern: &TransitionKernel, cfg: &TreeConfig) -> Result<Configuration> {
    let pi = stationary(kern)?;
    Ok(sample_indexed(kern, &pi, cfg, &Draws::new(cfg.seed), 0))
}

/// The `index`-th configuration of the stream [`estimate_marginals`] uses.
pub fn sample_nth(kern: &TransitionKernel, cfg: &TreeConfig, index: u64) -> Result<Configuration> {
    let pi = stationary(kern)?;
    Ok(sample_indexed(kern, &pi, cfg, &Draws::new(cfg.seed), index))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalStats {
    pub tree: TreeConfig,
    pub n_samples: u64,
    /// Spin frequencies per level, root first.
    pub level_freqs: Vec<[f64; 3]>,
    /// Frequencies of `(parent spin, child spin)` over all edges.
    pub pair_freqs: [[f64; 3]; 3],
    pub violations: u64,
    /// Analytic stationary distribution, for comparison.
    pub stationary: [f64; 3],
}

impl EmpiricalStats {
    /// Largest deviation of any level marginal from the stationary law, in
    /// units of `√(π(1−π)/n)`.
    pub fn max_sigma_deviation(&self) -> f64 {
        let n = self.n_samples as f64;
        self.level_freqs
            .iter()
            .flat_map(|freqs| {
                freqs.iter().zip(&self.stationary).map(move |(f, p)| {
                    let sigma = (p * (1.0 - p) / n).sqrt();
                    (f - p).abs() / sigma
                })
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone)]
struct Counts {
    levels: Vec<[u64; 3]>,
    pairs: [[u64; 3]; 3],
    violations: u64,
}

impl Counts {
    fn new(depth: u32) -> Self {
        Self { levels: vec![[0; 3]; depth as usize + 1], pairs: [[0; 3]; 3], violations: 0 }
    }

    fn merge(mut self, other: Counts) -> Self {
        for (a, b) in self.levels.iter_mut().zip(&other.levels) {
            for s in 0..3 {
                a[s] += b[s];
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                self.pairs[i][j] += other.pairs[i][j];
            }
        }
        self.violations += other.violations;
        self
    }
}

/// Level marginals and edge-pair frequencies over `n_samples` independent
/// configurations (sample indices `0..n_samples`).
pub fn estimate_marginals(kern: &TransitionKernel, cfg: &TreeConfig, n_samples: u64) -> Result<EmpiricalStats> {
    if n_samples == 0 {
        return Err(Error::Domain("n_samples must be >= 1".into()));
    }
    let pi = stationary(kern)?;
    let draws = Draws::new(cfg.seed);
    let adm = WandAdmissibility::new(2)?;
    let n = cfg.vertex_count();
    let parents: Vec<usize> = (1..n).map(|v| cfg.parent(v)).collect();
    let levels: Vec<usize> = (0..=cfg.depth)
        .flat_map(|l| std::iter::repeat_n(l as usize, cfg.level_size(l)))
        .collect();
    let chunks = n_samples.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .fold(
            || Counts::new(cfg.depth),
            |mut acc, c| {
                let first = c * CHUNK;
                let count = CHUNK.min(n_samples - first) as usize;
                let spins = sample_batch(kern, &pi, cfg, &draws, first, count);
                for (v, block) in spins.chunks_exact(count).enumerate() {
                    for &s in block {
                        acc.levels[levels[v]][s as usize] += 1;
                    }
                }
                for (i, &p) in parents.iter().enumerate() {
                    let v = i + 1;
                    for j in 0..count {
                        let (a, b) = (spins[p * count + j] as usize, spins[v * count + j] as usize);
                        acc.pairs[a][b] += 1;
                        if !adm.is_admissible(a, b).unwrap_or(false) {
                            acc.violations += 1;
                        }
                    }
                }
                acc
            },
        )
        .reduce(|| Counts::new(cfg.depth), Counts::merge);

    let level_freqs = counts
        .levels
        .iter()
        .map(|c| {
            let total = (c[0] + c[1] + c[2]) as f64;
            c.map(|v| v as f64 / total)
        })
        .collect();
    let edge_total: u64 = counts.pairs.iter().flatten().sum();
    let pair_freqs = if edge_total == 0 {
        [[0.0; 3]; 3]
    } else {
        counts.pairs.map(|r| r.map(|v| v as f64 / edge_total as f64))
    };
    Ok(EmpiricalStats {
        tree: *cfg,
        n_samples,
        level_freqs,
        pair_freqs,
        violations: counts.violations,
        stationary: pi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::kernel_of;
    use crate::model::TisgmSolution;
    use crate::tisgm::solve_k2_closed_form;

    fn uniform_kernel() -> TransitionKernel {
        kernel_of(&TisgmSolution::new(1.0, 1.0).unwrap(), 2, 1.0).unwrap()
    }

    #[test]
    fn tree_geometry() {
        let t = TreeConfig::new(2, 3, 0).unwrap();
        // 1 + 3·(2³ − 1)/(2 − 1)
        assert_eq!(t.vertex_count(), 22);
        assert_eq!(t.level_size(1), 3);
        assert_eq!(t.level_size(3), 12);
        assert_eq!(t.level_start(2), 4);
        assert_eq!(t.parent(1), 0);
        assert_eq!(t.parent(3), 0);
        assert_eq!(t.parent(4), 1);
        assert_eq!(t.parent(5), 1);
        assert_eq!(t.parent(6), 2);
        assert_eq!(t.parent(9), 3);
        assert_eq!(t.parent(10), 4);
        assert_eq!(t.parent(21), 9);
        for k in 2..6u32 {
            for depth in 1..5u32 {
                let t = TreeConfig::new(k, depth, 0).unwrap();
                let formula = 1 + (k as usize + 1) * ((k as usize).pow(depth) - 1) / (k as usize - 1);
                assert_eq!(t.vertex_count(), formula);
            }
        }
        assert!(TreeConfig::new(1, 3, 0).is_err());
        assert!(TreeConfig::new(10, 40, 0).is_err());
    }

    #[test]
    fn depth_zero() {
        let cfg = TreeConfig::new(2, 0, 7).unwrap();
        let c = sample(&uniform_kernel(), &cfg).unwrap();
        assert_eq!(c.spins.len(), 1);
        assert!(c.spin(0) <= 2);
    }

    #[test]
    fn samples_are_admissible_and_reproducible() {
        let theta = 0.9;
        let sol = solve_k2_closed_form(theta).unwrap()[0];
        let kern = kernel_of(&sol, 2, theta).unwrap();
        let cfg = TreeConfig::new(2, 6, 42).unwrap();
        let adm = WandAdmissibility::new(2).unwrap();
        let a = sample(&kern, &cfg).unwrap();
        let b = sample(&kern, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.violations(&adm), 0);
        assert!(a.edges().all(|e| e != (1, 1)));
        let other = sample(&kern, &TreeConfig::new(2, 6, 43).unwrap()).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn single_sample_gives_indicators() {
        let cfg = TreeConfig::new(2, 2, 1).unwrap();
        let stats = estimate_marginals(&uniform_kernel(), &cfg, 1).unwrap();
        for f in stats.level_freqs.iter().take(1) {
            assert_eq!(f.iter().filter(|v| **v == 1.0).count(), 1);
        }
        for f in &stats.level_freqs {
            assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(estimate_marginals(&uniform_kernel(), &cfg, 0).is_err());
    }

    #[test]
    fn batches_match_single_draws() {
        let theta = 0.4;
        let sol = solve_k2_closed_form(theta).unwrap()[1];
        let kern = kernel_of(&sol, 2, theta).unwrap();
        let cfg = TreeConfig::new(2, 3, 5).unwrap();
        let pi = stationary(&kern).unwrap();
        let draws = Draws::new(cfg.seed);
        let batch = sample_batch(&kern, &pi, &cfg, &draws, 40, 7);
        for j in 0..7 {
            let single = sample_nth(&kern, &cfg, 40 + j as u64).unwrap();
            for v in 0..cfg.vertex_count() {
                assert_eq!(batch[v * 7 + j], single.spin(v));
            }
        }
    }

    #[test]
    fn pick_skips_zero_entries() {
        assert_eq!(pick(&[0.5, 0.5, 0.0], 0.999_999_999_999), 1);
        assert_eq!(pick(&[0.0, 0.3, 0.7], 0.0), 1);
        assert_eq!(pick(&[0.3, 0.0, 0.7], 0.3), 2);
    }

    #[test]
    fn stats_match_sample_nth() {
        let kern = uniform_kernel();
        let cfg = TreeConfig::new(3, 2, 9).unwrap();
        let stats = estimate_marginals(&kern, &cfg, 3).unwrap();
        let mut root = [0.0; 3];
        for i in 0..3 {
            root[sample_nth(&kern, &cfg, i).unwrap().spin(0) as usize] += 1.0 / 3.0;
        }
        for s in 0..3 {
            assert!((stats.level_freqs[0][s] - root[s]).abs() < 1e-12);
        }
    }
}
