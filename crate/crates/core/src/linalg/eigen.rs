//! Top eigenpairs of symmetric operators.
//!
//! Small problems (dimension up to `dense_threshold`) are materialized and
//! solved densely. Larger ones use a thick-restart Lanczos iteration: the
//! Krylov basis is fully reorthogonalized, the projected matrix is solved with
//! the dense QL routine, and after every `2q + 20` basis vectors the
//! leading `2q` Ritz vectors are kept and the iteration continues from a
//! residual direction.

use nalgebra::DMatrixView;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::dense::SymmetricEigen;
use super::operator::LinearOperator;
use super::{axpy, dot, norm, scale};
use crate::error::{contract, Error, Result};

pub const DEFAULT_DENSE_THRESHOLD: usize = 512;

/// Eigenpairs sorted by descending eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// `‖L v − λ v‖₂` for each pair.
    pub residuals: Vec<f64>,
    /// Absolute residual bound that every pair satisfies.
    pub tol: f64,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    /// Smallest gap between consecutive returned eigenvalues.
    pub fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::INFINITY, f64::min)
    }

    /// Keeps the leading `k` pairs.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.len());
        Self {
            values: self.values[..k].to_vec(),
            vectors: self.vectors[..k].to_vec(),
            residuals: self.residuals[..k].to_vec(),
            tol: self.tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Residual tolerance relative to the largest Ritz value magnitude.
    pub tol: f64,
    /// Number of Rayleigh–Ritz restarts before giving up.
    pub max_restarts: usize,
    pub dense_threshold: usize,
    /// Seed of the pseudo-random starting vector.
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_restarts: 1000,
            dense_threshold: DEFAULT_DENSE_THRESHOLD,
            seed: 0x5eed_1a9c,
        }
    }
}

impl EigenOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_dense_threshold(mut self, dense_threshold: usize) -> Self {
        self.dense_threshold = dense_threshold;
        self
    }

    pub fn with_max_restarts(mut self, max_restarts: usize) -> Self {
        self.max_restarts = max_restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// The `q` algebraically largest eigenpairs of `op`.
///
/// `warm_start` vectors, when supplied, seed the search space; this is what
/// makes repeated solves of slowly changing operators cheap.
pub fn top_eigenpairs(op: &LinearOperator, q: usize, opts: &EigenOptions, warm_start: Option<&EigenPairs>) -> Result<EigenPairs> {
    top_eigenpairs_guarded(op, q, 0, opts, warm_start)
}

/// Like [`top_eigenpairs`], but also returns `guard` further Ritz pairs whose
/// convergence is not waited for. Their residuals report how good they are.
pub(crate) fn top_eigenpairs_guarded(op: &LinearOperator, q: usize, guard: usize, opts: &EigenOptions, warm_start: Option<&EigenPairs>) -> Result<EigenPairs> {
    let n = op.dim();
    if q == 0 || q > n {
        return Err(contract(format!("requested {q} eigenpairs of a {n}-dimensional operator")));
    }
    if !(opts.tol > 0.0) {
        return Err(contract(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if let Some(w) = warm_start {
        if w.dim() != n && !w.is_empty() {
            return Err(contract(format!("warm start of dimension {} for operator of dimension {n}", w.dim())));
        }
    }
    let total = (q + guard).min(n);
    if n <= opts.dense_threshold {
        dense_top(op, total, opts.tol)
    } else {
        let mut solver = Lanczos::new(op, total, opts);
        solver.required = q;
        solver.run(warm_start)
    }
}

/// Every eigenpair of a small operator, descending.
pub fn full_spectrum(op: &LinearOperator) -> Result<EigenPairs> {
    dense_top(op, op.dim(), 1e-8)
}

fn dense_top(op: &LinearOperator, q: usize, tol: f64) -> Result<EigenPairs> {
    let n = op.dim();
    let eig = SymmetricEigen::new(&op.to_dense(), n)?;
    let mut values = Vec::with_capacity(q);
    let mut vectors = Vec::with_capacity(q);
    let mut residuals = Vec::with_capacity(q);
    let mut av = vec![0.0; n];
    for k in (n - q..n).rev() {
        let v = eig.vector(k).to_vec();
        let lambda = eig.values[k];
        op.apply_into(&v, &mut av);
        axpy(-lambda, &v, &mut av);
        residuals.push(norm(&av));
        values.push(lambda);
        vectors.push(v);
    }
    let magnitude = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let threshold = tol * if magnitude > 0.0 { magnitude } else { 1.0 };
    let pairs = EigenPairs {
        values,
        vectors,
        residuals,
        tol: threshold,
    };
    let worst = pairs.residuals.iter().copied().fold(0.0, f64::max);
    if worst > threshold {
        return Err(Error::NotConverged {
            restarts: 0,
            worst_residual: worst,
            best: Box::new(pairs),
        });
    }
    Ok(pairs)
}

struct Lanczos<'a> {
    op: &'a LinearOperator,
    q: usize,
    /// Leading pairs that must meet the tolerance.
    required: usize,
    opts: &'a EigenOptions,
    n: usize,
    max_basis: usize,
    keep: usize,
    rng: Xoshiro256PlusPlus,
    /// Orthonormal basis, column-major `n × len`.
    basis: Vec<f64>,
    /// `L` applied to every basis column, same layout.
    images: Vec<f64>,
    len: usize,
    /// Projected matrix `Vᵀ L V`, row-major with stride `max_basis`.
    projected: Vec<f64>,
}

impl<'a> Lanczos<'a> {
    fn new(op: &'a LinearOperator, q: usize, opts: &'a EigenOptions) -> Self {
        let n = op.dim();
        let max_basis = (2 * q + 20).min(n);
        let keep = (2 * q).min(max_basis.saturating_sub(1)).max(q);
        Self {
            op,
            q,
            required: q,
            opts,
            n,
            max_basis,
            keep,
            rng: Xoshiro256PlusPlus::seed_from_u64(opts.seed),
            basis: Vec::with_capacity(n * max_basis),
            images: Vec::with_capacity(n * max_basis),
            len: 0,
            projected: vec![0.0; max_basis * max_basis],
        }
    }

    fn column(&self, k: usize) -> &[f64] {
        &self.basis[k * self.n..(k + 1) * self.n]
    }

    fn image(&self, k: usize) -> &[f64] {
        &self.images[k * self.n..(k + 1) * self.n]
    }

    fn random_vector(&mut self) -> Vec<f64> {
        (0..self.n).map(|_| self.rng.random_range(-1.0..1.0)).collect()
    }

    /// Orthogonalizes `w` against the basis with classical Gram–Schmidt,
    /// repeated once when the first pass cancels most of `w`, and normalizes
    /// it. Returns `None` when `w` lies numerically inside the basis span.
    fn orthonormalize(&self, w: Vec<f64>) -> Option<Vec<f64>> {
        let before = norm(&w);
        self.orthonormalize_from(w, before)
    }

    /// [`Self::orthonormalize`] for a vector that may already have been
    /// partly reduced from one of norm `before`.
    fn orthonormalize_from(&self, mut w: Vec<f64>, before: f64) -> Option<Vec<f64>> {
        if before == 0.0 || !before.is_finite() {
            return None;
        }
        let mut reference = norm(&w);
        let mut after = before;
        for _ in 0..2 {
            let coeffs: Vec<f64> = (0..self.len).map(|k| dot(self.column(k), &w)).collect();
            for (k, c) in coeffs.into_iter().enumerate() {
                axpy(-c, self.column(k), &mut w);
            }
            after = norm(&w);
            if after > std::f64::consts::FRAC_1_SQRT_2 * reference {
                break;
            }
            reference = after;
        }
        if after <= 1e-10 * before {
            return None;
        }
        scale(1.0 / after, &mut w);
        Some(w)
    }

    fn push(&mut self, v: Vec<f64>) {
        let mut av = vec![0.0; self.n];
        self.op.apply_into(&v, &mut av);
        let k = self.len;
        let stride = self.max_basis;
        for i in 0..k {
            let h = dot(self.column(i), &av);
            self.projected[i * stride + k] = h;
            self.projected[k * stride + i] = h;
        }
        self.projected[k * stride + k] = dot(&v, &av);
        self.basis.extend_from_slice(&v);
        self.images.extend_from_slice(&av);
        self.len += 1;
    }

    /// Pushes `w` after orthonormalization, falling back to random directions.
    fn push_direction(&mut self, w: Vec<f64>) -> bool {
        if let Some(v) = self.orthonormalize(w) {
            self.push(v);
            return true;
        }
        for _ in 0..3 {
            let r = self.random_vector();
            if let Some(v) = self.orthonormalize(r) {
                self.push(v);
                return true;
            }
        }
        false
    }

    fn expand(&mut self) {
        while self.len < self.max_basis {
            // The projected column of the newest vector already holds its
            // Gram–Schmidt coefficients against the basis.
            let k = self.len - 1;
            let mut w = self.image(k).to_vec();
            let before = norm(&w);
            for i in 0..=k {
                axpy(-self.projected[i * self.max_basis + k], self.column(i), &mut w);
            }
            let pushed = match self.orthonormalize_from(w, before) {
                Some(v) => {
                    self.push(v);
                    true
                }
                None => self.push_direction(Vec::new()),
            };
            if !pushed {
                break;
            }
        }
    }

    fn run(mut self, warm_start: Option<&EigenPairs>) -> Result<EigenPairs> {
        if let Some(warm) = warm_start {
            for v in warm.vectors.iter().take(self.max_basis - 1) {
                if let Some(v) = self.orthonormalize(v.clone()) {
                    self.push(v);
                }
            }
        }
        let start = self.random_vector();
        self.push_direction(start);

        let n = self.n;
        let mut best: Option<EigenPairs> = None;
        for _ in 0..=self.opts.max_restarts {
            self.expand();
            let k = self.len;
            let mut h = vec![0.0; k * k];
            for i in 0..k {
                for j in 0..k {
                    h[i * k + j] = 0.5 * (self.projected[i * self.max_basis + j] + self.projected[j * self.max_basis + i]);
                }
            }
            let eig = SymmetricEigen::new(&h, k)?;
            let magnitude = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let threshold = self.opts.tol * if magnitude > 0.0 { magnitude } else { 1.0 };

            // Ritz vectors Y = V S and their images L Y = (L V) S as two
            // matrix products over the leading `keep` coefficient columns.
            let keep = self.keep.min(k);
            let mut coeffs = Vec::with_capacity(k * keep);
            let mut thetas = Vec::with_capacity(keep);
            for r in 0..keep {
                coeffs.extend_from_slice(eig.vector(k - 1 - r));
                thetas.push(eig.values[k - 1 - r]);
            }
            let s = DMatrixView::from_slice(&coeffs, k, keep);
            let ritz = DMatrixView::from_slice(&self.basis, n, k) * s;
            let ritz_images = DMatrixView::from_slice(&self.images, n, k) * s;
            let ritz = ritz.as_slice();
            let ritz_images = ritz_images.as_slice();

            let residual_vecs: Vec<Vec<f64>> = (0..keep)
                .map(|r| {
                    let mut res = ritz_images[r * n..(r + 1) * n].to_vec();
                    axpy(-thetas[r], &ritz[r * n..(r + 1) * n], &mut res);
                    res
                })
                .collect();
            let residuals: Vec<f64> = residual_vecs.iter().map(|r| norm(r)).collect();
            let wanted = self.q.min(keep);
            let required = self.required.min(wanted);
            let worst = residuals[..required].iter().copied().fold(0.0, f64::max);
            let candidate = EigenPairs {
                values: thetas[..wanted].to_vec(),
                vectors: (0..wanted).map(|r| ritz[r * n..(r + 1) * n].to_vec()).collect(),
                residuals: residuals[..wanted].to_vec(),
                tol: threshold,
            };
            if worst <= threshold || k == n {
                let mut pairs = candidate;
                for v in &mut pairs.vectors {
                    let nv = norm(v);
                    scale(1.0 / nv, v);
                }
                return Ok(pairs);
            }
            best = Some(candidate);

            // Thick restart: keep the leading Ritz vectors, on which the
            // projected matrix is diagonal, and continue from the largest
            // unconverged residual.
            let continuation = (0..required)
                .max_by(|&a, &b| residuals[a].total_cmp(&residuals[b]))
                .map(|i| residual_vecs[i].clone())
                .expect("at least one wanted pair");
            self.basis.clear();
            self.basis.extend_from_slice(ritz);
            self.images.clear();
            self.images.extend_from_slice(ritz_images);
            self.len = keep;
            let stride = self.max_basis;
            self.projected.iter_mut().for_each(|x| *x = 0.0);
            for (i, &t) in thetas.iter().enumerate() {
                self.projected[i * stride + i] = t;
            }
            self.push_direction(continuation);
        }
        let best = best.expect("at least one Rayleigh-Ritz pass");
        let worst = best.residuals.iter().copied().fold(0.0, f64::max);
        Err(Error::NotConverged {
            restarts: self.opts.max_restarts,
            worst_residual: worst,
            best: Box::new(best),
        })
    }
}
