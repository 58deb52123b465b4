use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use super::sbm::sample_rect;
use super::seeded_rng;
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

/// A rank-`r` matrix `U Vᵀ` with a subset of its entries revealed.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionInstance {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    /// Row-major `n × r`.
    pub u_true: Vec<f64>,
    /// Row-major `m × r`.
    pub v_true: Vec<f64>,
    /// Revealed entries of `U Vᵀ`; its pattern is the revealed set.
    pub observed: SparseMatrix,
}

impl CompletionInstance {
    /// Builds an instance from explicit factors and revealed positions.
    pub fn from_factors(n: usize, m: usize, r: usize, u_true: Vec<f64>, v_true: Vec<f64>, revealed: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if u_true.len() != n * r || v_true.len() != m * r {
            return Err(Error::Infeasible(format!("factor sizes do not match {n}x{r} and {m}x{r}")));
        }
        let mut inst = Self {
            n,
            m,
            r,
            u_true,
            v_true,
            observed: SparseMatrix::from_triplets(n, m, [])?,
        };
        let entries: BTreeSet<(usize, usize)> = revealed.into_iter().collect();
        inst.observed = inst.observe(entries)?;
        Ok(inst)
    }

    pub fn u_row(&self, i: usize) -> &[f64] {
        &self.u_true[i * self.r..(i + 1) * self.r]
    }

    pub fn v_row(&self, j: usize) -> &[f64] {
        &self.v_true[j * self.r..(j + 1) * self.r]
    }

    /// Ground-truth entry `(U Vᵀ)_ij`.
    pub fn truth(&self, i: usize, j: usize) -> f64 {
        self.u_row(i).iter().zip(self.v_row(j)).map(|(a, b)| a * b).sum()
    }

    pub fn revealed(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.observed.triplets().map(|(i, j, _)| (i, j))
    }

    pub fn revealed_count(&self) -> usize {
        self.observed.nnz()
    }

    fn observe(&self, entries: BTreeSet<(usize, usize)>) -> Result<SparseMatrix> {
        SparseMatrix::from_triplets(self.n, self.m, entries.into_iter().map(|(i, j)| (i, j, self.truth(i, j))))
    }
}

/// Rank-`r` instance with iid standard normal factors; each entry is revealed
/// independently with probability `c / √(nm)`.
pub fn gen_completion(n: usize, m: usize, r: usize, c: f64, seed: u64) -> Result<CompletionInstance> {
    if r == 0 || r > n.min(m) {
        return Err(Error::Infeasible(format!("rank {r} invalid for a {n}x{m} matrix")));
    }
    let p = c / ((n * m) as f64).sqrt();
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Infeasible(format!("c = {c} reveals more than every entry")));
    }
    let mut rng = seeded_rng(seed);
    let u_true: Vec<f64> = (0..n * r).map(|_| rng.sample(StandardNormal)).collect();
    let v_true: Vec<f64> = (0..m * r).map(|_| rng.sample(StandardNormal)).collect();
    let mut revealed = Vec::new();
    sample_rect(&mut rng, n, m, p, |i, j| revealed.push((i, j)));
    CompletionInstance::from_factors(n, m, r, u_true, v_true, revealed)
}

/// Reveals `count` dense blocks: each picks `size` rows and `size` columns and
/// reveals every crossing entry.
pub fn add_bipartite_cliques(inst: CompletionInstance, count: usize, size: usize, seed: u64) -> Result<CompletionInstance> {
    if size > inst.n.min(inst.m) {
        return Err(Error::Infeasible(format!("block size {size} exceeds {}x{}", inst.n, inst.m)));
    }
    if count == 0 {
        return Ok(inst);
    }
    let mut rng = seeded_rng(seed);
    let mut entries: BTreeSet<(usize, usize)> = inst.revealed().collect();
    for _ in 0..count {
        let rows = index::sample(&mut rng, inst.n, size).into_vec();
        let cols = index::sample(&mut rng, inst.m, size).into_vec();
        for &i in &rows {
            for &j in &cols {
                entries.insert((i, j));
            }
        }
    }
    let observed = inst.observe(entries)?;
    Ok(CompletionInstance { observed, ..inst })
}
