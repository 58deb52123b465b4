//! Turning spectra into answers: k-means on eigenvector embeddings, overlap
//! with a planted partition, detectability thresholds, rank estimation and
//! low-rank completion.

mod completion;
mod detect;

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub use completion::{
    als_complete, complete, completion_spectrum, estimate_rank, rmse, spectral_init, AlsOptions, CompletionMethod, CompletionOptions, CompletionOutcome,
    CompletionResult, CompletionSpectrum, Penalty,
};
pub use detect::{detect, detect_xlaplacian, DetectMethod, DetectOptions, Problem};

use crate::error::{contract, Error, Result};
use crate::linalg::{EigenPairs, SparseSymMatrix};
use crate::models::PairwiseParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
    /// Scale every embedded row to unit length before clustering (zero rows
    /// stay at the origin).
    pub normalize_rows: bool,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iter: 100,
            seed: 0,
            normalize_rows: true,
        }
    }
}

impl KMeansOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_normalize_rows(mut self, on: bool) -> Self {
        self.normalize_rows = on;
        self
    }
}

/// Labels and within-cluster sum of squares of a k-means run.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub labels: Vec<usize>,
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm with k-means++ seeding on the rows of the row-major
/// `points` matrix (`dim` columns); the best of `restarts` runs is kept.
pub fn kmeans(points: &[f64], dim: usize, k: usize, opts: &KMeansOptions) -> Result<KMeans> {
    if dim == 0 || points.len() % dim != 0 {
        return Err(contract(format!("{} values do not form rows of width {dim}", points.len())));
    }
    let n = points.len() / dim;
    if k == 0 || k > n {
        return Err(contract(format!("cannot form {k} clusters from {n} points")));
    }
    let row = |i: usize| &points[i * dim..(i + 1) * dim];
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(opts.seed);
    let mut best: Option<KMeans> = None;
    for _ in 0..opts.restarts.max(1) {
        // k-means++ seeding.
        let mut centers: Vec<f64> = Vec::with_capacity(k * dim);
        centers.extend_from_slice(row(rng.random_range(0..n)));
        let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(row(i), &centers[..dim])).collect();
        for _ in 1..k {
            let total: f64 = d2.iter().sum();
            let pick = if total > 0.0 {
                let mut t = rng.random::<f64>() * total;
                let mut pick = n - 1;
                for (i, &d) in d2.iter().enumerate() {
                    if t < d {
                        pick = i;
                        break;
                    }
                    t -= d;
                }
                pick
            } else {
                rng.random_range(0..n)
            };
            let c = centers.len();
            centers.extend_from_slice(row(pick));
            for (i, d) in d2.iter_mut().enumerate() {
                *d = d.min(sq_dist(row(i), &centers[c..c + dim]));
            }
        }
        // Lloyd iterations.
        let mut labels = vec![usize::MAX; n];
        for _ in 0..opts.max_iter.max(1) {
            let mut changed = false;
            for i in 0..n {
                let nearest = (0..k)
                    .min_by(|&a, &b| sq_dist(row(i), &centers[a * dim..(a + 1) * dim]).total_cmp(&sq_dist(row(i), &centers[b * dim..(b + 1) * dim])))
                    .expect("k >= 1");
                if labels[i] != nearest {
                    labels[i] = nearest;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            let mut sums = vec![0.0; k * dim];
            let mut counts = vec![0usize; k];
            for i in 0..n {
                counts[labels[i]] += 1;
                for (s, x) in sums[labels[i] * dim..(labels[i] + 1) * dim].iter_mut().zip(row(i)) {
                    *s += x;
                }
            }
            for c in 0..k {
                if counts[c] == 0 {
                    // Re-seed an empty cluster at the point farthest from its center.
                    let far = (0..n)
                        .max_by(|&a, &b| {
                            let da = sq_dist(row(a), &centers[labels[a] * dim..(labels[a] + 1) * dim]);
                            let db = sq_dist(row(b), &centers[labels[b] * dim..(labels[b] + 1) * dim]);
                            da.total_cmp(&db)
                        })
                        .expect("n >= 1");
                    centers[c * dim..(c + 1) * dim].copy_from_slice(row(far));
                } else {
                    for (dst, s) in centers[c * dim..(c + 1) * dim].iter_mut().zip(&sums[c * dim..(c + 1) * dim]) {
                        *dst = s / counts[c] as f64;
                    }
                }
            }
        }
        let inertia: f64 = (0..n).map(|i| sq_dist(row(i), &centers[labels[i] * dim..(labels[i] + 1) * dim])).sum();
        if best.as_ref().is_none_or(|b| inertia < b.inertia) {
            best = Some(KMeans { labels, inertia });
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Clusters the nodes into `q` groups using the eigenvectors whose 1-based
/// ranks lie in `ranks` as coordinates.
pub fn embed_kmeans(pairs: &EigenPairs, q: usize, ranks: RangeInclusive<usize>, opts: &KMeansOptions) -> Result<Vec<usize>> {
    let (lo, hi) = (*ranks.start(), *ranks.end());
    if lo == 0 || hi < lo || hi > pairs.len() {
        return Err(contract(format!("eigenvector ranks {lo}..={hi} unavailable among {} vectors", pairs.len())));
    }
    let vectors: Vec<&[f64]> = pairs.vectors[lo - 1..hi].iter().map(Vec::as_slice).collect();
    embed_vectors_kmeans(&vectors, q, opts)
}

/// k-means on the rows of the matrix whose columns are `vectors`, optionally
/// projected onto the unit sphere first.
pub fn embed_vectors_kmeans(vectors: &[&[f64]], q: usize, opts: &KMeansOptions) -> Result<Vec<usize>> {
    let n = vectors.first().map_or(0, |v| v.len());
    if q == 1 {
        return Ok(vec![0; n]);
    }
    let dim = vectors.len();
    let mut points = vec![0.0; n * dim];
    for (c, v) in vectors.iter().enumerate() {
        for i in 0..n {
            points[i * dim + c] = v[i];
        }
    }
    if opts.normalize_rows {
        for row in points.chunks_mut(dim) {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|x| *x /= norm);
            }
        }
    }
    Ok(kmeans(&points, dim, q, opts)?.labels)
}

/// Overlap with the label map that realizes it: `permutation[p]` is the true
/// label assigned to predicted label `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub labels: Vec<usize>,
    pub overlap: f64,
    pub permutation: Vec<usize>,
}

/// Fraction of nodes whose predicted label matches the truth, maximized over
/// relabellings of the prediction (exhaustive for `q ≤ 8`, greedy beyond).
pub fn overlap(pred: &[usize], truth: &[usize], q: usize) -> Result<f64> {
    Ok(match_labels(pred, truth, q)?.overlap)
}

pub fn match_labels(pred: &[usize], truth: &[usize], q: usize) -> Result<ClusteringResult> {
    if pred.len() != truth.len() {
        return Err(contract(format!("label vectors of length {} and {}", pred.len(), truth.len())));
    }
    if let Some(&bad) = pred.iter().chain(truth).find(|&&l| l >= q) {
        return Err(contract(format!("label {bad} outside 0..{q}")));
    }
    let n = pred.len();
    let mut confusion = vec![vec![0usize; q]; q];
    for (&p, &t) in pred.iter().zip(truth) {
        confusion[p][t] += 1;
    }
    let permutation = if q <= 8 { best_assignment(&confusion) } else { greedy_assignment(&confusion) };
    let agree: usize = (0..q).map(|p| confusion[p][permutation[p]]).sum();
    Ok(ClusteringResult {
        labels: pred.iter().map(|&p| permutation[p]).collect(),
        overlap: if n == 0 { 1.0 } else { agree as f64 / n as f64 },
        permutation,
    })
}

fn best_assignment(confusion: &[Vec<usize>]) -> Vec<usize> {
    fn search(row: usize, confusion: &[Vec<usize>], used: &mut [bool], current: &mut Vec<usize>, score: usize, best: &mut (usize, Vec<usize>)) {
        if row == confusion.len() {
            if score > best.0 || best.1.is_empty() {
                *best = (score, current.clone());
            }
            return;
        }
        for t in 0..confusion.len() {
            if !used[t] {
                used[t] = true;
                current.push(t);
                search(row + 1, confusion, used, current, score + confusion[row][t], best);
                current.pop();
                used[t] = false;
            }
        }
    }
    let q = confusion.len();
    let mut best = (0, Vec::new());
    search(0, confusion, &mut vec![false; q], &mut Vec::with_capacity(q), 0, &mut best);
    best.1
}

fn greedy_assignment(confusion: &[Vec<usize>]) -> Vec<usize> {
    let q = confusion.len();
    let mut cells: Vec<(usize, usize, usize)> = (0..q).flat_map(|p| (0..q).map(move |t| (p, t, 0))).collect();
    for c in &mut cells {
        c.2 = confusion[c.0][c.1];
    }
    cells.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let mut perm = vec![usize::MAX; q];
    let mut taken = vec![false; q];
    for (p, t, _) in cells {
        if perm[p] == usize::MAX && !taken[t] {
            perm[p] = t;
            taken[t] = true;
        }
    }
    perm
}

/// Detectability threshold `ε* = (√c − 1) / (√c − 1 + q)` of the symmetric SBM.
pub fn sbm_threshold(c: f64, q: usize) -> Result<f64> {
    if !(c > 1.0) {
        return Err(Error::Infeasible(format!("mean degree {c} <= 1: no giant component, structure undetectable")));
    }
    let s = c.sqrt() - 1.0;
    Ok(s / (s + q as f64))
}

/// Excess degree `⟨k²⟩ / ⟨k⟩ − 1` of the (unweighted) degree sequence.
pub fn excess_degree(a: &SparseSymMatrix) -> Result<f64> {
    let deg = a.degrees();
    let k1: f64 = deg.iter().map(|&d| d as f64).sum();
    if k1 == 0.0 {
        return Err(Error::Infeasible("excess degree of an edgeless graph".into()));
    }
    let k2: f64 = deg.iter().map(|&d| (d * d) as f64).sum();
    Ok(k2 / k1 - 1.0)
}

fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

/// Integrand of the information-theoretic limit for Gaussian similarities.
pub fn pairwise_limit_integrand(p: &PairwiseParams, s: f64) -> f64 {
    let sd = p.variance.sqrt();
    let pin = normal_pdf(s, p.mean_in, sd);
    let pout = normal_pdf(s, p.mean_out, sd);
    let denom = pin + (p.q as f64 - 1.0) * pout;
    if denom <= 0.0 {
        0.0
    } else {
        (pin - pout).powi(2) / denom
    }
}

/// Integration window `[μ̄ − 12σ, μ̄ + 12σ]` around the midpoint of the means.
pub fn pairwise_limit_window(p: &PairwiseParams) -> (f64, f64) {
    let mid = 0.5 * (p.mean_in + p.mean_out);
    let half = 0.5 * (p.mean_in - p.mean_out).abs() + 12.0 * p.variance.sqrt();
    (mid - half, mid + half)
}

/// Critical measurement density `ĉ` with
/// `1/ĉ = (1/q) ∫ (p_in − p_out)² / (p_in + (q − 1) p_out) ds`, by adaptive
/// Simpson quadrature. Returns infinity when the integral vanishes.
pub fn pairwise_limit(p: &PairwiseParams) -> Result<f64> {
    if !(p.variance > 0.0) || p.q < 2 {
        return Err(contract("pairwise limit needs positive variance and q >= 2"));
    }
    let (a, b) = pairwise_limit_window(p);
    let f = |s: f64| pairwise_limit_integrand(p, s);
    let integral = adaptive_simpson(&f, a, b, 1e-8);
    if integral <= 1e-300 {
        return Ok(f64::INFINITY);
    }
    Ok(p.q as f64 / integral)
}

/// Adaptive Simpson quadrature to relative tolerance `rel_tol` (measured
/// against a coarse estimate of the integral's magnitude).
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    // A fixed pre-split keeps narrow peaks from being missed by the first panels.
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    let coarse: f64 = (0..pieces)
        .map(|k| {
            let (x0, x1) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            simpson(f, x0, x1)
        })
        .sum();
    let abs_tol = rel_tol * coarse.abs().max(1e-300) / pieces as f64;
    (0..pieces)
        .map(|k| {
            let (x0, x1) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let whole = simpson(f, x0, x1);
            simpson_rec(f, x0, x1, whole, abs_tol, 50)
        })
        .sum()
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
}

fn simpson_rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> f64 {
    let m = 0.5 * (a + b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, left, 0.5 * tol, depth - 1) + simpson_rec(f, m, b, right, 0.5 * tol, depth - 1)
}
