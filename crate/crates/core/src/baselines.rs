//! Comparison operators: normalized adjacency and Laplacian, rank-one
//! regularization, Bethe Hessian, the non-backtracking companion matrix and
//! degree trimming.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{contract, Error, Result};
use crate::inference::{embed_kmeans, excess_degree, overlap, KMeansOptions};
use crate::linalg::{dot, norm, top_eigenpairs, EigenOptions, LinearOperator, SparseMatrix, SparseSymMatrix, SymmetricEigen};

/// Weighted degrees `d_i = Σ_j A_ij`.
pub fn degrees(a: &SparseSymMatrix) -> Vec<f64> {
    a.weighted_degrees()
}

/// `D^{-1/2} A D^{-1/2}`; rows and columns of isolated vertices are zero.
pub fn normalized_adjacency_matrix(a: &SparseSymMatrix) -> SparseSymMatrix {
    let inv_sqrt: Vec<f64> = degrees(a).iter().map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 }).collect();
    a.map_values(|i, j, w| w * inv_sqrt[i] * inv_sqrt[j])
}

pub fn normalized_adjacency(a: &SparseSymMatrix) -> LinearOperator {
    LinearOperator::new(normalized_adjacency_matrix(a))
}

/// `I − D^{-1/2} A D^{-1/2}`. Its smallest eigenpairs are the top eigenpairs of
/// [`LinearOperator::negated`].
pub fn sym_laplacian(a: &SparseSymMatrix) -> LinearOperator {
    LinearOperator::new(normalized_adjacency_matrix(a).scaled(-1.0))
        .with_diag(vec![1.0; a.n()])
        .expect("diagonal has matching length")
}

/// `D^{-1/2} A D^{-1/2} − ζ 11ᵀ`, with the rank-one term kept implicit.
pub fn rank_one_regularized(a: &SparseSymMatrix, zeta: f64) -> Result<LinearOperator> {
    if !(zeta >= 0.0) {
        return Err(contract(format!("zeta must be non-negative, got {zeta}")));
    }
    let n = a.n();
    let op = normalized_adjacency(a);
    if zeta == 0.0 || n == 0 {
        return Ok(op);
    }
    op.with_rank_one(-zeta * n as f64, vec![1.0 / (n as f64).sqrt(); n])
}

/// Result of a ζ grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaScan {
    pub best_zeta: f64,
    pub best_overlap: f64,
}

/// Clusters with the rank-one regularized operator for every ζ in `grid` and
/// keeps the ζ whose overlap with `labels` is highest (first one on ties).
pub fn zeta_scan(a: &SparseSymMatrix, labels: &[usize], q: usize, grid: &[f64], eigen: &EigenOptions, kmeans: &KMeansOptions) -> Result<ZetaScan> {
    if grid.is_empty() {
        return Err(contract("empty zeta grid"));
    }
    let mut best: Option<ZetaScan> = None;
    for &zeta in grid {
        let op = rank_one_regularized(a, zeta)?;
        let pairs = top_eigenpairs(&op, q.min(a.n()), eigen, None)?;
        let pred = embed_kmeans(&pairs, q, 1..=q.saturating_sub(1).max(1), kmeans)?;
        let ov = overlap(&pred, labels, q)?;
        if best.is_none_or(|b| ov > b.best_overlap) {
            best = Some(ZetaScan {
                best_zeta: zeta,
                best_overlap: ov,
            });
        }
    }
    Ok(best.expect("grid is non-empty"))
}

/// `H(r) = (r² − 1) I − r A + D`.
pub fn bethe_hessian(a: &SparseSymMatrix, r: f64) -> Result<LinearOperator> {
    if !(r >= 1.0) {
        return Err(contract(format!("Bethe Hessian parameter must be at least 1, got {r}")));
    }
    let diag: Vec<f64> = degrees(a).iter().map(|d| r * r - 1.0 + d).collect();
    LinearOperator::new(a.scaled(-r)).with_diag(diag)
}

/// `√ĉ` with ĉ the excess degree, the customary Bethe Hessian parameter.
pub fn default_bethe_parameter(a: &SparseSymMatrix) -> Result<f64> {
    Ok(excess_degree(a)?.max(1.0).sqrt())
}

/// Bethe Hessian of an Ising model with couplings `J_ij = coupling(A_ij)`:
/// `H_ii = 1 + Σ_k sinh²(J_ik)`, `H_ij = −½ sinh(2 J_ij)`.
///
/// With `J = atanh(1/r)` on an unweighted graph this is `H(r) / (r² − 1)`.
pub fn weighted_bethe_hessian(a: &SparseSymMatrix, coupling: impl Fn(f64) -> f64) -> LinearOperator {
    let mut diag = vec![1.0; a.n()];
    let off = a.map_values(|i, _, w| {
        let j = coupling(w);
        diag[i] += j.sinh().powi(2);
        -0.5 * (2.0 * j).sinh()
    });
    LinearOperator::new(off).with_diag(diag).expect("diagonal has matching length")
}

/// Couplings `½ log(p_in(s) / p_out(s))` for Gaussian similarities with the
/// given means and variance.
pub fn gaussian_coupling(mean_in: f64, mean_out: f64, variance: f64) -> impl Fn(f64) -> f64 {
    move |s| ((s - mean_out).powi(2) - (s - mean_in).powi(2)) / (4.0 * variance)
}

/// Inverse temperature β solving `ĉ · mean(tanh²(β A_ij)) = 1` over the stored
/// entries, where ĉ is the excess degree. Returns `None` when no β does.
pub fn completion_beta(a: &SparseSymMatrix) -> Result<Option<f64>> {
    let c_hat = excess_degree(a)?;
    let weights: Vec<f64> = a.values().iter().map(|w| w.abs()).filter(|&w| w > 0.0).collect();
    if weights.is_empty() {
        return Ok(None);
    }
    let f = |beta: f64| c_hat * weights.iter().map(|w| (beta * w).tanh().powi(2)).sum::<f64>() / weights.len() as f64 - 1.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Ok(None);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Zeroes the rows and columns of every node whose degree (number of stored
/// entries) exceeds `max_degree`. Degrees are those of the input, so the
/// operation is idempotent.
pub fn trim(a: &SparseSymMatrix, max_degree: usize) -> Result<SparseSymMatrix> {
    if max_degree == 0 {
        return Err(contract("trimming threshold must be positive"));
    }
    let keep: Vec<bool> = a.degrees().iter().map(|&d| d <= max_degree).collect();
    Ok(a.filter(|i, j| keep[i] && keep[j]))
}

/// Three times the mean degree, rounded up (at least 1).
pub fn default_trim_threshold(a: &SparseSymMatrix) -> usize {
    if a.n() == 0 {
        return 1;
    }
    let mean = a.nnz() as f64 / a.n() as f64;
    ((3.0 * mean).ceil() as usize).max(1)
}

/// Rectangular trimming: rows with more than `max_row` entries and columns with
/// more than `max_col` entries are zeroed.
pub fn trim_rectangular(a: &SparseMatrix, max_row: usize, max_col: usize) -> Result<SparseMatrix> {
    let mut row_deg = vec![0usize; a.rows()];
    let mut col_deg = vec![0usize; a.cols()];
    for (i, j, _) in a.triplets() {
        row_deg[i] += 1;
        col_deg[j] += 1;
    }
    SparseMatrix::from_triplets(a.rows(), a.cols(), a.triplets().filter(|&(i, j, _)| row_deg[i] <= max_row && col_deg[j] <= max_col))
}

/// Per-side default thresholds: three times the mean row and column counts.
pub fn default_rectangular_trim(a: &SparseMatrix) -> (usize, usize) {
    let nnz = a.nnz() as f64;
    let row = ((3.0 * nnz / a.rows().max(1) as f64).ceil() as usize).max(1);
    let col = ((3.0 * nnz / a.cols().max(1) as f64).ceil() as usize).max(1);
    (row, col)
}

/// The `2n × 2n` companion matrix `[[A, −(D − I)], [I, 0]]` of the quadratic
/// eigenvalue problem `det[μ² I − μ A + (D − I)] = 0`, applied matrix-free.
#[derive(Debug, Clone)]
pub struct NonBacktracking {
    a: Arc<SparseSymMatrix>,
    d_minus_one: Vec<f64>,
}

/// Real eigenpairs of the companion matrix, descending. Only the first block
/// `v` of each eigenvector `(v, v/μ)` is stored, normalized to unit length.
#[derive(Debug, Clone, PartialEq)]
pub struct NonBacktrackingPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// `‖(μ² I − μ A + D − I) v‖₂` per pair.
    pub residuals: Vec<f64>,
    pub converged: bool,
}

pub fn nonbacktracking_companion(a: &SparseSymMatrix) -> NonBacktracking {
    NonBacktracking {
        d_minus_one: a.degrees().iter().map(|&d| d as f64 - 1.0).collect(),
        a: Arc::new(a.clone()),
    }
}

/// Largest graph size solved by dense Schur decomposition (companion dimension 512).
pub const NONBACKTRACKING_DENSE_THRESHOLD: usize = 256;

impl NonBacktracking {
    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn dim(&self) -> usize {
        2 * self.n()
    }

    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n();
        let (xv, xw) = x.split_at(n);
        let (yv, yw) = y.split_at_mut(n);
        self.a.mul_vec_into(xv, yv);
        for ((yi, di), wi) in yv.iter_mut().zip(&self.d_minus_one).zip(xw) {
            *yi -= di * wi;
        }
        yw.copy_from_slice(xv);
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(contract(format!("vector length {} != companion dimension {}", x.len(), self.dim())));
        }
        let mut y = vec![0.0; x.len()];
        self.apply_into(x, &mut y);
        Ok(y)
    }

    /// Row-major dense materialization.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let m = 2 * n;
        let mut b = vec![0.0; m * m];
        for i in 0..n {
            let (cols, vals) = self.a.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                b[i * m + j] = w;
            }
            b[i * m + n + i] = -self.d_minus_one[i];
            b[(n + i) * m + i] = 1.0;
        }
        b
    }

    /// `‖(μ² I − μ A + D − I) v‖₂`.
    pub fn quadratic_residual(&self, mu: f64, v: &[f64]) -> f64 {
        let mut av = vec![0.0; v.len()];
        self.a.mul_vec_into(v, &mut av);
        v.iter()
            .zip(&av)
            .zip(&self.d_minus_one)
            .map(|((vi, avi), di)| (mu * mu * vi - mu * avi + di * vi).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Unit null vector of the symmetric matrix `μ² I − μ A + D − I`.
    fn dense_null_vector(&self, mu: f64) -> Result<Vec<f64>> {
        let n = self.n();
        let mut h = self.a.scaled(-mu).to_dense();
        for i in 0..n {
            h[i * n + i] += mu * mu + self.d_minus_one[i];
        }
        let eig = SymmetricEigen::new(&h, n)?;
        let k = (0..n)
            .min_by(|&x, &y| eig.values[x].abs().total_cmp(&eig.values[y].abs()))
            .ok_or_else(|| contract("empty graph"))?;
        Ok(eig.vector(k).to_vec())
    }

    /// The `k` largest real eigenvalues and their `v` blocks.
    ///
    /// Graphs with at most [`NONBACKTRACKING_DENSE_THRESHOLD`] nodes are solved
    /// exactly through a dense Schur decomposition. Larger graphs use subspace
    /// iteration on a block of `2k + 6` vectors with Rayleigh–Ritz extraction;
    /// if the requested pairs have not reached `tol` (relative to `|μ|`) after
    /// `max_iter` iterations the best current estimates are returned with
    /// `converged = false`.
    pub fn top_real_eigenpairs(&self, k: usize, tol: f64, max_iter: usize, seed: u64) -> Result<NonBacktrackingPairs> {
        let n = self.n();
        if k == 0 || k > self.dim() {
            return Err(contract(format!("requested {k} eigenpairs of a {}-dimensional companion", self.dim())));
        }
        if n <= NONBACKTRACKING_DENSE_THRESHOLD {
            return self.dense_top_real(k);
        }
        self.subspace_top_real(k, tol, max_iter, seed)
    }

    fn dense_top_real(&self, k: usize) -> Result<NonBacktrackingPairs> {
        let m = self.dim();
        let b = DMatrix::from_row_slice(m, m, &self.to_dense());
        let eigs = b.complex_eigenvalues();
        let mut real: Vec<f64> = eigs.iter().filter(|z| z.im.abs() <= 1e-8 * z.re.abs().max(1.0)).map(|z| z.re).collect();
        real.sort_by(|x, y| y.total_cmp(x));
        real.truncate(k);
        let mut out = NonBacktrackingPairs {
            values: Vec::new(),
            vectors: Vec::new(),
            residuals: Vec::new(),
            converged: true,
        };
        for mu in real {
            let v = self.dense_null_vector(mu)?;
            out.residuals.push(self.quadratic_residual(mu, &v));
            out.values.push(mu);
            out.vectors.push(v);
        }
        Ok(out)
    }

    fn subspace_top_real(&self, k: usize, tol: f64, max_iter: usize, seed: u64) -> Result<NonBacktrackingPairs> {
        let m = self.dim();
        let p = (2 * k + 6).min(m);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut basis: Vec<Vec<f64>> = (0..p).map(|_| (0..m).map(|_| rng.random::<f64>() - 0.5).collect()).collect();
        orthonormalize(&mut basis)?;
        let mut images = vec![vec![0.0; m]; p];
        let mut best: Option<(Vec<f64>, Vec<Vec<f64>>, Vec<f64>)> = None;
        for iter in 1..=max_iter {
            for (x, y) in basis.iter().zip(images.iter_mut()) {
                self.apply_into(x, y);
            }
            if iter % 5 == 0 || iter == max_iter {
                let (values, vectors, residuals) = ritz_real(&basis, &images, k)?;
                let done = values.len() == k && values.iter().zip(&residuals).all(|(mu, r)| *r <= tol * mu.abs().max(1.0));
                best = Some((values, vectors, residuals));
                if done {
                    return self.finish(best.expect("just set"), true);
                }
            }
            std::mem::swap(&mut basis, &mut images);
            orthonormalize(&mut basis)?;
        }
        self.finish(best.ok_or_else(|| Error::Numerical("subspace iteration ran no Rayleigh-Ritz step".into()))?, false)
    }

    fn finish(&self, (values, vectors, _): (Vec<f64>, Vec<Vec<f64>>, Vec<f64>), converged: bool) -> Result<NonBacktrackingPairs> {
        if values.is_empty() {
            return Err(Error::Numerical("no real eigenvalues found in the dominant subspace".into()));
        }
        let n = self.n();
        let mut out = NonBacktrackingPairs {
            values: Vec::new(),
            vectors: Vec::new(),
            residuals: Vec::new(),
            converged,
        };
        for (mu, x) in values.into_iter().zip(vectors) {
            let mut v = x[..n].to_vec();
            let nv = norm(&v);
            if nv == 0.0 {
                continue;
            }
            v.iter_mut().for_each(|e| *e /= nv);
            out.residuals.push(self.quadratic_residual(mu, &v));
            out.values.push(mu);
            out.vectors.push(v);
        }
        Ok(out)
    }
}

/// Modified Gram–Schmidt, applied twice.
fn orthonormalize(basis: &mut [Vec<f64>]) -> Result<()> {
    for _ in 0..2 {
        for k in 0..basis.len() {
            let (done, rest) = basis.split_at_mut(k);
            let x = &mut rest[0];
            for b in done.iter() {
                let c = dot(b, x);
                x.iter_mut().zip(b).for_each(|(xi, bi)| *xi -= c * bi);
            }
            let nx = norm(x);
            if !(nx > 0.0) || !nx.is_finite() {
                return Err(Error::Numerical("subspace iteration lost rank".into()));
            }
            x.iter_mut().for_each(|e| *e /= nx);
        }
    }
    Ok(())
}

type RitzPairs = (Vec<f64>, Vec<Vec<f64>>, Vec<f64>);

/// Real Ritz pairs of the projection `Vᵀ B V`, largest first, at most `k`.
fn ritz_real(basis: &[Vec<f64>], images: &[Vec<f64>], k: usize) -> Result<RitzPairs> {
    let p = basis.len();
    let proj = DMatrix::from_fn(p, p, |i, j| dot(&basis[i], &images[j]));
    let eigs = proj.complex_eigenvalues();
    let scale = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let mut real: Vec<f64> = eigs.iter().filter(|z| z.im.abs() <= 1e-10 * scale).map(|z| z.re).collect();
    real.sort_by(|x, y| y.total_cmp(x));
    real.truncate(k);
    let m = basis[0].len();
    let mut vectors = Vec::with_capacity(real.len());
    let mut residuals = Vec::with_capacity(real.len());
    for &mu in &real {
        let shifted = &proj - DMatrix::identity(p, p) * mu;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.ok_or_else(|| Error::Numerical("SVD without right singular vectors".into()))?;
        let smallest = (0..p)
            .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
            .expect("non-empty projection");
        let y: Vec<f64> = (0..p).map(|j| v_t[(smallest, j)]).collect();
        let mut x = vec![0.0; m];
        let mut bx = vec![0.0; m];
        for (j, yj) in y.iter().enumerate() {
            x.iter_mut().zip(&basis[j]).for_each(|(xi, bi)| *xi += yj * bi);
            bx.iter_mut().zip(&images[j]).for_each(|(xi, bi)| *xi += yj * bi);
        }
        let nx = norm(&x);
        let res = bx.iter().zip(&x).map(|(b, xi)| (b - mu * xi).powi(2)).sum::<f64>().sqrt() / nx;
        x.iter_mut().for_each(|e| *e /= nx);
        vectors.push(x);
        residuals.push(res);
    }
    Ok((real, vectors, residuals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::full_spectrum;

    fn complete(n: usize) -> SparseSymMatrix {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j, 1.0));
            }
        }
        SparseSymMatrix::from_undirected(n, e).unwrap()
    }

    fn star(leaves: usize) -> SparseSymMatrix {
        SparseSymMatrix::from_undirected(leaves + 1, (1..=leaves).map(|i| (0, i, 1.0))).unwrap()
    }

    #[test]
    fn normalized_adjacency_of_k3() {
        let pairs = full_spectrum(&normalized_adjacency(&complete(3))).unwrap();
        assert!((pairs.values[0] - 1.0).abs() < 1e-12);
        let v = &pairs.vectors[0];
        // D^{1/2} 1 is uniform for a regular graph.
        for x in v {
            assert!((x.abs() - 1.0 / 3f64.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn edgeless_normalized_adjacency_is_zero() {
        let op = normalized_adjacency(&SparseSymMatrix::zeros(5));
        assert_eq!(op.apply(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn sym_laplacian_of_k3() {
        let pairs = full_spectrum(&sym_laplacian(&complete(3))).unwrap();
        for (got, want) in pairs.values.iter().zip([1.5, 1.5, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_action_on_ones() {
        let a = star(6);
        let n = a.n();
        let zeta = 0.3;
        let op = rank_one_regularized(&a, zeta).unwrap();
        let ones = vec![1.0; n];
        let base = normalized_adjacency(&a).apply(&ones).unwrap();
        let got = op.apply(&ones).unwrap();
        for (g, b) in got.iter().zip(&base) {
            assert!((g - (b - zeta * n as f64)).abs() < 1e-12);
        }
        assert!(rank_one_regularized(&a, 0.0).unwrap().rank_one().is_none());
        assert!(rank_one_regularized(&a, -1.0).is_err());
    }

    #[test]
    fn bethe_hessian_at_one_is_laplacian() {
        let a = star(4);
        let h = bethe_hessian(&a, 1.0).unwrap().to_dense();
        let n = a.n();
        let d = a.degrees();
        let dense = a.to_dense();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { d[i] as f64 } else { 0.0 } - dense[i * n + j];
                assert_eq!(h[i * n + j], expect);
            }
        }
        assert!(bethe_hessian(&a, 0.5).is_err());
    }

    #[test]
    fn weighted_bethe_hessian_matches_unweighted_scaling() {
        let a = star(5);
        let r = 1.7f64;
        let h = bethe_hessian(&a, r).unwrap().to_dense();
        let j = (1.0 / r).atanh();
        let hw = weighted_bethe_hessian(&a, |w| j * w).to_dense();
        for (x, y) in h.iter().zip(&hw) {
            assert!((x / (r * r - 1.0) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_coupling_is_half_log_likelihood_ratio() {
        let f = gaussian_coupling(0.75, -0.75, 1.0);
        // (s + 0.75)² − (s − 0.75)² = 3 s, divided by 4.
        assert!((f(2.0) - 1.5).abs() < 1e-15);
        assert_eq!(f(0.0), 0.0);
    }

    #[test]
    fn trimming() {
        let s = star(10);
        let t = trim(&s, 5).unwrap();
        assert_eq!(t.nnz(), 0);
        assert_eq!(trim(&s, s.n()).unwrap(), s);
        assert_eq!(trim(&t, 5).unwrap(), t);
        assert!(trim(&s, 0).is_err());
    }

    #[test]
    fn rectangular_trimming() {
        let a = SparseMatrix::from_triplets(2, 4, [(0, 0, 1.0), (0, 1, 1.0), (0, 2, 1.0), (1, 3, 2.0)]).unwrap();
        let t = trim_rectangular(&a, 2, 4).unwrap();
        assert_eq!(t.nnz(), 1);
        assert_eq!(t.get(1, 3), Some(2.0));
    }

    #[test]
    fn companion_k4_leading_value() {
        let nb = nonbacktracking_companion(&complete(4));
        let pairs = nb.top_real_eigenpairs(1, 1e-10, 100, 0).unwrap();
        assert!((pairs.values[0] - 2.0).abs() < 1e-8);
        assert!(pairs.residuals[0] < 1e-6);
    }

    #[test]
    fn companion_of_edgeless_graph_has_unit_radius() {
        let nb = nonbacktracking_companion(&SparseSymMatrix::zeros(4));
        let b = DMatrix::from_row_slice(8, 8, &nb.to_dense());
        let radius = b.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(radius <= 1.0 + 1e-10);
    }

    #[test]
    fn companion_matvec_matches_dense() {
        let a = SparseSymMatrix::from_undirected(5, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 0, 1.0), (0, 2, 1.0)]).unwrap();
        let nb = nonbacktracking_companion(&a);
        let dense = nb.to_dense();
        let x: Vec<f64> = (0..10).map(|i| (i as f64 * 0.37).sin()).collect();
        let y = nb.apply(&x).unwrap();
        for i in 0..10 {
            let e: f64 = (0..10).map(|j| dense[i * 10 + j] * x[j]).sum();
            assert!((y[i] - e).abs() < 1e-12);
        }
    }
}
