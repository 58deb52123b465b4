use std::fmt;

use rand::Rng;

use super::{balanced_labels, seeded_rng, GraphSource, PlantedGraph, Xoshiro256PlusPlus};
use crate::error::{Error, Result};
use crate::linalg::SparseSymMatrix;

/// Stochastic block model with `q` equal groups, mean degree `c` and
/// `eps = c_out / c_in`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbmParams {
    pub n: usize,
    pub q: usize,
    pub c: f64,
    pub eps: f64,
}

impl SbmParams {
    pub fn new(n: usize, q: usize, c: f64, eps: f64) -> Self {
        Self { n, q, c, eps }
    }

    /// `c_in = q c / (1 + (q − 1) eps)`.
    pub fn c_in(&self) -> f64 {
        self.q as f64 * self.c / (1.0 + (self.q as f64 - 1.0) * self.eps)
    }

    pub fn c_out(&self) -> f64 {
        self.eps * self.c_in()
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 0 || self.n == 0 || self.n % self.q != 0 {
            return Err(Error::Infeasible(format!("n = {} must be a positive multiple of q = {}", self.n, self.q)));
        }
        if !(0.0..=1.0).contains(&self.eps) {
            return Err(Error::Infeasible(format!("eps = {} outside [0, 1]", self.eps)));
        }
        if !(self.c >= 0.0) || self.c_in() > self.n as f64 {
            return Err(Error::Infeasible(format!("c = {} gives c_in = {} > n", self.c, self.c_in())));
        }
        Ok(())
    }

    pub(crate) fn write_kv(&self, kv: &mut dyn FnMut(&str, &dyn fmt::Display)) {
        kv("n", &self.n);
        kv("q", &self.q);
        kv("c", &self.c);
        kv("eps", &self.eps);
    }
}

/// Geometric skip length for success probability `p` in (0, 1).
fn skip(rng: &mut Xoshiro256PlusPlus, log_q: f64) -> u64 {
    let r: f64 = rng.random();
    let s = ((1.0 - r).ln() / log_q).floor();
    if s >= u64::MAX as f64 {
        u64::MAX
    } else {
        s as u64
    }
}

/// Bernoulli(p) sample of the pairs `{(i, j) : 0 <= j < i < size}`.
pub(crate) fn sample_within(rng: &mut Xoshiro256PlusPlus, size: usize, p: f64, mut emit: impl FnMut(usize, usize)) {
    if p <= 0.0 || size < 2 {
        return;
    }
    if p >= 1.0 {
        for i in 1..size {
            for j in 0..i {
                emit(i, j);
            }
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let total = (size as u64) * (size as u64 - 1) / 2;
    let mut idx: u64 = 0;
    let mut row: u64 = 1;
    let mut row_start: u64 = 0;
    loop {
        idx = idx.saturating_add(skip(rng, log_q));
        if idx >= total {
            break;
        }
        while idx >= row_start + row {
            row_start += row;
            row += 1;
        }
        emit(row as usize, (idx - row_start) as usize);
        idx += 1;
    }
}

/// Bernoulli(p) sample of the pairs in `0..rows × 0..cols`.
pub(crate) fn sample_rect(rng: &mut Xoshiro256PlusPlus, rows: usize, cols: usize, p: f64, mut emit: impl FnMut(usize, usize)) {
    if p <= 0.0 || rows == 0 || cols == 0 {
        return;
    }
    if p >= 1.0 {
        for i in 0..rows {
            for j in 0..cols {
                emit(i, j);
            }
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let total = rows as u64 * cols as u64;
    let mut idx: u64 = 0;
    loop {
        idx = idx.saturating_add(skip(rng, log_q));
        if idx >= total {
            break;
        }
        emit((idx / cols as u64) as usize, (idx % cols as u64) as usize);
        idx += 1;
    }
}

fn group_ranges(n: usize, q: usize) -> Vec<std::ops::Range<usize>> {
    (0..q).map(|a| a * n / q..(a + 1) * n / q).collect()
}

/// Planted partition graph: intra-group pairs connect with probability
/// `c_in / n`, inter-group pairs with `c_out / n`.
pub fn gen_sbm(p: &SbmParams, seed: u64) -> Result<PlantedGraph> {
    p.validate()?;
    let mut rng = seeded_rng(seed);
    let groups = group_ranges(p.n, p.q);
    let p_in = p.c_in() / p.n as f64;
    let p_out = p.c_out() / p.n as f64;
    let mut edges = Vec::new();
    for a in 0..p.q {
        let ga = &groups[a];
        sample_within(&mut rng, ga.len(), p_in, |i, j| edges.push((ga.start + i, ga.start + j, 1.0)));
        for gb in &groups[a + 1..] {
            sample_rect(&mut rng, ga.len(), gb.len(), p_out, |i, j| edges.push((ga.start + i, gb.start + j, 1.0)));
        }
    }
    Ok(PlantedGraph {
        adjacency: SparseSymMatrix::from_undirected(p.n, edges)?,
        labels: balanced_labels(p.n, p.q),
        q: p.q,
        source: GraphSource::Sbm(*p),
        injections: Vec::new(),
        seed,
    })
}

/// Degree-corrected SBM with propensities drawn from a power law with
/// exponent `−gamma`, truncated to `[1, n^{1/(gamma−1)}]`.
pub fn gen_dcsbm(p: &SbmParams, gamma: f64, seed: u64) -> Result<PlantedGraph> {
    if !(gamma > 2.0) {
        return Err(Error::Infeasible(format!("power-law exponent {gamma} must exceed 2")));
    }
    p.validate()?;
    let mut rng = seeded_rng(seed);
    let theta_max = (p.n as f64).powf(1.0 / (gamma - 1.0));
    let tail = theta_max.powf(1.0 - gamma);
    let theta: Vec<f64> = (0..p.n)
        .map(|_| {
            let u: f64 = rng.random();
            (1.0 - u * (1.0 - tail)).powf(1.0 / (1.0 - gamma))
        })
        .collect();
    let mut g = sample_dcsbm(p, &theta, &mut rng)?;
    g.source = GraphSource::DcSbm { sbm: *p, gamma };
    g.seed = seed;
    Ok(g)
}

/// Degree-corrected SBM with explicit propensities (normalized to mean one
/// inside each group). Equal propensities reduce to [`gen_sbm`]'s ensemble.
pub fn gen_dcsbm_with_propensities(p: &SbmParams, theta: &[f64], seed: u64) -> Result<PlantedGraph> {
    p.validate()?;
    if theta.len() != p.n || theta.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Infeasible("propensities must be positive, one per node".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut g = sample_dcsbm(p, theta, &mut rng)?;
    g.seed = seed;
    Ok(g)
}

fn sample_dcsbm(p: &SbmParams, theta: &[f64], rng: &mut Xoshiro256PlusPlus) -> Result<PlantedGraph> {
    let groups = group_ranges(p.n, p.q);
    let mut theta = theta.to_vec();
    // Members of each group sorted by decreasing propensity.
    let mut sorted: Vec<Vec<usize>> = Vec::with_capacity(p.q);
    for g in &groups {
        let sum: f64 = theta[g.clone()].iter().sum();
        let norm = g.len() as f64 / sum;
        theta[g.clone()].iter_mut().for_each(|t| *t *= norm);
        let mut members: Vec<usize> = g.clone().collect();
        members.sort_by(|&a, &b| theta[b].total_cmp(&theta[a]).then(a.cmp(&b)));
        sorted.push(members);
    }
    let k_in = p.c_in() / p.n as f64;
    let k_out = p.c_out() / p.n as f64;
    let mut edges = Vec::new();
    for a in 0..p.q {
        chung_lu_block(rng, &theta, &sorted[a], None, k_in, &mut edges);
        for b in a + 1..p.q {
            chung_lu_block(rng, &theta, &sorted[a], Some(&sorted[b]), k_out, &mut edges);
        }
    }
    Ok(PlantedGraph {
        adjacency: SparseSymMatrix::from_undirected(p.n, edges)?,
        labels: balanced_labels(p.n, p.q),
        q: p.q,
        source: GraphSource::Sbm(*p),
        injections: Vec::new(),
        seed: 0,
    })
}

/// Edges with probability `min(1, k θ_u θ_v)` between the (descending-sorted)
/// lists `left` and `right` (or within `left` when `right` is `None`), using
/// skip sampling over the monotone probability sequence.
fn chung_lu_block(
    rng: &mut Xoshiro256PlusPlus,
    theta: &[f64],
    left: &[usize],
    right: Option<&[usize]>,
    k: f64,
    edges: &mut Vec<(usize, usize, f64)>,
) {
    if k <= 0.0 {
        return;
    }
    let same = right.is_none();
    let right = right.unwrap_or(left);
    let prob = |u: usize, v: usize| (k * theta[u] * theta[v]).min(1.0);
    for (ui, &u) in left.iter().enumerate() {
        let mut vi = if same { ui + 1 } else { 0 };
        if vi >= right.len() {
            continue;
        }
        let mut p = prob(u, right[vi]);
        while vi < right.len() && p > 0.0 {
            if p < 1.0 {
                let r: f64 = rng.random();
                let jump = ((1.0 - r).ln() / (1.0 - p).ln()).floor();
                if jump >= (right.len() - vi) as f64 {
                    break;
                }
                vi += jump as usize;
            }
            let v = right[vi];
            let q = prob(u, v);
            let r: f64 = rng.random();
            if r < q / p {
                edges.push((u, v, 1.0));
            }
            p = q;
            vi += 1;
        }
    }
}
