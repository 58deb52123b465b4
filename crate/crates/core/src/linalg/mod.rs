//! Sparse symmetric storage, operators with lazy diagonal and rank-one terms,
//! and symmetric eigensolvers.

mod dense;
mod eigen;
mod operator;
mod sparse;

pub use dense::SymmetricEigen;
pub use eigen::{full_spectrum, top_eigenpairs, EigenOptions, EigenPairs, DEFAULT_DENSE_THRESHOLD};
pub(crate) use eigen::top_eigenpairs_guarded;
pub use operator::{bipartite_embed, LinearOperator, RankOne};
pub use sparse::{SparseMatrix, SparseSymMatrix};

/// Inner product accumulated in eight independent lanes, which lets the
/// compiler vectorize the loop.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    acc.iter().sum::<f64>() + tail
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn scale(alpha: f64, x: &mut [f64]) {
    x.iter_mut().for_each(|v| *v *= alpha);
}
