use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use super::sbm::sample_within;
use super::{balanced_labels, seeded_rng, GraphSource, PlantedGraph};
use crate::error::{Error, Result};
use crate::linalg::SparseSymMatrix;

/// Sparse noisy pairwise similarities: `c` measurements per item on average,
/// Gaussian values whose mean depends on whether the two items share a group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseParams {
    pub n: usize,
    pub q: usize,
    pub c: f64,
    pub mean_in: f64,
    pub mean_out: f64,
    pub variance: f64,
}

impl PairwiseParams {
    /// Means ±0.75 and unit variance.
    pub fn new(n: usize, q: usize, c: f64) -> Self {
        Self {
            n,
            q,
            c,
            mean_in: 0.75,
            mean_out: -0.75,
            variance: 1.0,
        }
    }

    pub fn with_means(mut self, mean_in: f64, mean_out: f64) -> Self {
        self.mean_in = mean_in;
        self.mean_out = mean_out;
        self
    }

    pub fn with_variance(mut self, variance: f64) -> Self {
        self.variance = variance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 0 || self.n < 2 || self.n % self.q != 0 {
            return Err(Error::Infeasible(format!("n = {} must be a multiple of q = {}", self.n, self.q)));
        }
        if !(self.variance > 0.0) {
            return Err(Error::Infeasible(format!("variance {} must be positive", self.variance)));
        }
        if !(self.c >= 0.0 && self.c < self.n as f64) {
            return Err(Error::Infeasible(format!("c = {} must lie in [0, n)", self.c)));
        }
        Ok(())
    }

    pub(crate) fn write_kv(&self, kv: &mut dyn FnMut(&str, &dyn fmt::Display)) {
        kv("n", &self.n);
        kv("q", &self.q);
        kv("c", &self.c);
        kv("mean_in", &self.mean_in);
        kv("mean_out", &self.mean_out);
        kv("variance", &self.variance);
    }
}

/// Erdős–Rényi topology with mean degree `c`; each edge carries a similarity
/// drawn from `Normal(mean_in, variance)` or `Normal(mean_out, variance)`.
pub fn gen_pairwise(p: &PairwiseParams, seed: u64) -> Result<PlantedGraph> {
    p.validate()?;
    let mut rng = seeded_rng(seed);
    let labels = balanced_labels(p.n, p.q);
    let mut pairs = Vec::new();
    sample_within(&mut rng, p.n, p.c / (p.n as f64 - 1.0), |i, j| pairs.push((i, j)));
    let sd = p.variance.sqrt();
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(i, j)| {
            let z: f64 = rng.sample(StandardNormal);
            let mean = if labels[i] == labels[j] { p.mean_in } else { p.mean_out };
            (i, j, mean + sd * z)
        })
        .collect();
    Ok(PlantedGraph {
        adjacency: SparseSymMatrix::from_undirected(p.n, edges)?,
        labels,
        q: p.q,
        source: GraphSource::Pairwise(*p),
        injections: Vec::new(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_symmetric() {
        let g = gen_pairwise(&PairwiseParams::new(500, 2, 5.0), 1).unwrap();
        let a = &g.adjacency;
        for i in 0..a.n() {
            let (cols, vals) = a.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                assert_eq!(a.get(j, i), w);
            }
        }
    }

    #[test]
    fn intra_group_weight_mean() {
        let p = PairwiseParams::new(4000, 2, 10.0);
        let g = gen_pairwise(&p, 7).unwrap();
        let (mut sum_in, mut n_in, mut sum_out, mut n_out) = (0.0, 0usize, 0.0, 0usize);
        for (i, j, w) in g.adjacency.upper_entries() {
            if g.labels[i] == g.labels[j] {
                sum_in += w;
                n_in += 1;
            } else {
                sum_out += w;
                n_out += 1;
            }
        }
        let sigma_in = 1.0 / (n_in as f64).sqrt();
        let sigma_out = 1.0 / (n_out as f64).sqrt();
        assert!((sum_in / n_in as f64 - 0.75).abs() < 3.0 * sigma_in);
        assert!((sum_out / n_out as f64 + 0.75).abs() < 3.0 * sigma_out);
    }

    #[test]
    fn mean_degree_matches() {
        let g = gen_pairwise(&PairwiseParams::new(4000, 2, 6.0), 3).unwrap();
        let mean = 2.0 * g.adjacency.edge_count() as f64 / 4000.0;
        // Sd of the mean degree is sqrt(2c/n) ≈ 0.055.
        assert!((mean - 6.0).abs() < 0.2, "{mean}");
    }

    #[test]
    fn equal_means_carry_no_group_signal() {
        let p = PairwiseParams::new(2000, 2, 8.0).with_means(0.3, 0.3);
        let g = gen_pairwise(&p, 5).unwrap();
        let mut sums = [0.0; 2];
        let mut counts = [0usize; 2];
        for (i, j, w) in g.adjacency.upper_entries() {
            let k = (g.labels[i] == g.labels[j]) as usize;
            sums[k] += w;
            counts[k] += 1;
        }
        let diff = sums[1] / counts[1] as f64 - sums[0] / counts[0] as f64;
        let sd = (1.0 / counts[0] as f64 + 1.0 / counts[1] as f64).sqrt();
        assert!(diff.abs() < 3.5 * sd);
    }

    #[test]
    fn invalid_parameters() {
        assert!(gen_pairwise(&PairwiseParams::new(100, 2, 5.0).with_variance(0.0), 0).is_err());
        assert!(gen_pairwise(&PairwiseParams::new(100, 2, 100.0), 0).is_err());
        assert!(gen_pairwise(&PairwiseParams::new(101, 2, 5.0), 0).is_err());
    }

    #[test]
    fn deterministic() {
        let p = PairwiseParams::new(300, 3, 4.0);
        assert_eq!(gen_pairwise(&p, 11).unwrap(), gen_pairwise(&p, 11).unwrap());
    }
}
