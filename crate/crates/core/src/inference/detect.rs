use std::fmt;
use std::str::FromStr;

use super::{embed_kmeans, embed_vectors_kmeans, KMeansOptions};
use crate::baselines::{bethe_hessian, default_bethe_parameter, gaussian_coupling, nonbacktracking_companion, sym_laplacian, weighted_bethe_hessian, zeta_scan};
use crate::error::{contract, Result};
use crate::linalg::{top_eigenpairs, EigenOptions, LinearOperator, SparseSymMatrix};
use crate::models::PairwiseParams;
use crate::xlap::{learn_regularization, LearningConfig, XLaplacianState};

/// Spectral clustering pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectMethod {
    Adjacency,
    NormLaplacian,
    RankOne,
    BetheHessian,
    NonBacktracking,
    XLaplacian,
}

impl DetectMethod {
    pub const ALL: [DetectMethod; 6] = [
        DetectMethod::Adjacency,
        DetectMethod::NormLaplacian,
        DetectMethod::RankOne,
        DetectMethod::BetheHessian,
        DetectMethod::NonBacktracking,
        DetectMethod::XLaplacian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectMethod::Adjacency => "adjacency",
            DetectMethod::NormLaplacian => "norm-laplacian",
            DetectMethod::RankOne => "rank-one",
            DetectMethod::BetheHessian => "bethe-hessian",
            DetectMethod::NonBacktracking => "nonbacktracking",
            DetectMethod::XLaplacian => "xlaplacian",
        }
    }
}

impl fmt::Display for DetectMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method {s:?} (expected one of {})", Self::ALL.map(|m| m.name()).join(", ")))
    }
}

/// What the matrix encodes, which decides the eigenvectors that carry the
/// partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Problem {
    /// Unweighted graph with assortative communities. The leading vector of
    /// adjacency-like operators tracks degrees and is skipped.
    Community,
    /// Signed similarity graph from the Gaussian pairwise model; there is no
    /// trivial leading vector, so the top `q − 1` vectors are used.
    Pairwise(PairwiseParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectOptions {
    pub eigen: EigenOptions,
    pub kmeans: KMeansOptions,
    pub eta: f64,
    /// IPR threshold; `None` means `5/n`.
    pub delta: Option<f64>,
    pub max_steps: usize,
    /// Values of `ζ n` scanned by the rank-one method (which needs ground truth).
    pub zeta_grid: Vec<f64>,
    /// Bethe Hessian parameter; `None` means `√ĉ`.
    pub bethe_r: Option<f64>,
    pub nb_tol: f64,
    pub nb_max_iter: usize,
    /// Also feed the leading vector of adjacency-like operators to k-means on
    /// community problems.
    pub include_leading: bool,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            eigen: EigenOptions::default(),
            kmeans: KMeansOptions::default(),
            eta: 10.0,
            delta: None,
            max_steps: 500,
            zeta_grid: (0..=20).map(|k| k as f64 * 0.1).collect(),
            bethe_r: None,
            nb_tol: 1e-6,
            nb_max_iter: 2000,
            include_leading: false,
        }
    }
}

impl DetectOptions {
    pub fn learning_config(&self, q: usize, n: usize) -> LearningConfig {
        let mut cfg = LearningConfig::new(q, n).with_eta(self.eta).with_max_steps(self.max_steps).with_eigen(self.eigen);
        if let Some(d) = self.delta {
            cfg = cfg.with_delta(d);
        }
        cfg
    }
}

/// Partitions the nodes of `a` into `q` groups with the chosen operator.
///
/// `truth` is only consulted by [`DetectMethod::RankOne`], whose ζ is tuned
/// against it.
pub fn detect(a: &SparseSymMatrix, q: usize, method: DetectMethod, problem: Problem, opts: &DetectOptions, truth: Option<&[usize]>) -> Result<Vec<usize>> {
    let n = a.n();
    if q == 0 || q > n {
        return Err(contract(format!("q = {q} invalid for {n} nodes")));
    }
    if q == 1 {
        return Ok(vec![0; n]);
    }
    let pairwise = matches!(problem, Problem::Pairwise(_));
    // 1-based ranks of the informative vectors among the top `q`.
    let ranks = match (pairwise, opts.include_leading) {
        (true, _) => 1..=q - 1,
        (false, true) => 1..=q,
        (false, false) => 2..=q,
    };
    let km = &opts.kmeans;
    match (method, problem) {
        (DetectMethod::Adjacency, _) => {
            let pairs = top_eigenpairs(&LinearOperator::new(a.clone()), q, &opts.eigen, None)?;
            embed_kmeans(&pairs, q, ranks, km)
        }
        (DetectMethod::XLaplacian, _) => Ok(detect_xlaplacian(a, q, problem, opts)?.0),
        (DetectMethod::BetheHessian, Problem::Community) => {
            let r = match opts.bethe_r {
                Some(r) => r,
                None => default_bethe_parameter(a)?,
            };
            let pairs = top_eigenpairs(&bethe_hessian(a, r)?.negated(), q, &opts.eigen, None)?;
            embed_kmeans(&pairs, q, 1..=q, km)
        }
        (DetectMethod::BetheHessian, Problem::Pairwise(p)) => {
            let h = weighted_bethe_hessian(a, gaussian_coupling(p.mean_in, p.mean_out, p.variance));
            let pairs = top_eigenpairs(&h.negated(), q - 1, &opts.eigen, None)?;
            embed_kmeans(&pairs, q, 1..=q - 1, km)
        }
        (DetectMethod::NormLaplacian, Problem::Community) => {
            let pairs = top_eigenpairs(&sym_laplacian(a).negated(), q, &opts.eigen, None)?;
            embed_kmeans(&pairs, q, ranks, km)
        }
        (DetectMethod::RankOne, Problem::Community) => {
            let truth = truth.ok_or_else(|| contract("the rank-one method tunes zeta against ground-truth labels"))?;
            let grid: Vec<f64> = opts.zeta_grid.iter().map(|z| z / n as f64).collect();
            let scan = zeta_scan(a, truth, q, &grid, &opts.eigen, km)?;
            let op = crate::baselines::rank_one_regularized(a, scan.best_zeta)?;
            let pairs = top_eigenpairs(&op, q, &opts.eigen, None)?;
            embed_kmeans(&pairs, q, 1..=q - 1, km)
        }
        (DetectMethod::NonBacktracking, Problem::Community) => {
            let nb = nonbacktracking_companion(a);
            let pairs = nb.top_real_eigenpairs(q, opts.nb_tol, opts.nb_max_iter, opts.eigen.seed)?;
            // Fewer real outliers than groups: cluster on what is available.
            let hi = (*ranks.end()).min(pairs.values.len());
            let vs: Vec<&[f64]> = pairs.vectors.get(*ranks.start() - 1..hi).unwrap_or(&[]).iter().map(Vec::as_slice).collect();
            if vs.is_empty() {
                return Ok(vec![0; n]);
            }
            embed_vectors_kmeans(&vs, q, km)
        }
        (m, Problem::Pairwise(_)) => Err(contract(format!("method {m} is not defined for signed similarity graphs"))),
    }
}

/// The X-Laplacian pipeline of [`detect`], also returning the learned state.
pub fn detect_xlaplacian(a: &SparseSymMatrix, q: usize, problem: Problem, opts: &DetectOptions) -> Result<(Vec<usize>, XLaplacianState)> {
    let n = a.n();
    if q < 2 || q > n {
        return Err(contract(format!("q = {q} invalid for {n} nodes")));
    }
    let ranks = match (problem, opts.include_leading) {
        (Problem::Pairwise(_), _) => 1..=q - 1,
        (Problem::Community, true) => 1..=q,
        (Problem::Community, false) => 2..=q,
    };
    let state = learn_regularization(&LinearOperator::new(a.clone()), &opts.learning_config(q, n))?;
    let labels = embed_kmeans(&state.pairs, q, ranks, &opts.kmeans)?;
    Ok((labels, state))
}
