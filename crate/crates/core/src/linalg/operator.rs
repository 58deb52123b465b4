use std::sync::Arc;

use super::sparse::{SparseMatrix, SparseSymMatrix};
use crate::error::{contract, Result};

/// Lazily stored rank-one term `scale * direction * directionᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOne {
    pub scale: f64,
    pub direction: Vec<f64>,
}

/// Symmetric operator `base + diag(diag_shift) + scale * d dᵀ`.
///
/// The base matrix is shared, so adding a diagonal (as the learning loop does
/// every step) never copies the sparse structure.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    base: Arc<SparseSymMatrix>,
    diag_shift: Option<Vec<f64>>,
    rank_one: Option<RankOne>,
}

impl From<SparseSymMatrix> for LinearOperator {
    fn from(base: SparseSymMatrix) -> Self {
        Self::new(base)
    }
}

impl LinearOperator {
    pub fn new(base: SparseSymMatrix) -> Self {
        Self::from_shared(Arc::new(base))
    }

    pub fn from_shared(base: Arc<SparseSymMatrix>) -> Self {
        Self {
            base,
            diag_shift: None,
            rank_one: None,
        }
    }

    pub fn with_diag(mut self, diag: Vec<f64>) -> Result<Self> {
        if diag.len() != self.dim() {
            return Err(contract(format!("diagonal length {} != {}", diag.len(), self.dim())));
        }
        self.diag_shift = Some(diag);
        Ok(self)
    }

    /// Adds `diag` to the existing diagonal shift.
    pub fn with_added_diag(&self, diag: &[f64]) -> Result<Self> {
        if diag.len() != self.dim() {
            return Err(contract(format!("diagonal length {} != {}", diag.len(), self.dim())));
        }
        let shift = match &self.diag_shift {
            Some(d) => d.iter().zip(diag).map(|(a, b)| a + b).collect(),
            None => diag.to_vec(),
        };
        Ok(Self {
            base: Arc::clone(&self.base),
            diag_shift: Some(shift),
            rank_one: self.rank_one.clone(),
        })
    }

    /// Attaches `scale * direction directionᵀ`; `direction` must be unit length.
    pub fn with_rank_one(mut self, scale: f64, direction: Vec<f64>) -> Result<Self> {
        if direction.len() != self.dim() {
            return Err(contract(format!("direction length {} != {}", direction.len(), self.dim())));
        }
        let norm = super::norm(&direction);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(contract(format!("rank-one direction has norm {norm}")));
        }
        self.rank_one = Some(RankOne { scale, direction });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.base.n()
    }

    pub fn base(&self) -> &SparseSymMatrix {
        &self.base
    }

    pub fn shared_base(&self) -> Arc<SparseSymMatrix> {
        Arc::clone(&self.base)
    }

    pub fn diag_shift(&self) -> Option<&[f64]> {
        self.diag_shift.as_deref()
    }

    pub fn rank_one(&self) -> Option<&RankOne> {
        self.rank_one.as_ref()
    }

    /// The operator multiplied by −1.
    pub fn negated(&self) -> Self {
        Self {
            base: Arc::new(self.base.scaled(-1.0)),
            diag_shift: self.diag_shift.as_ref().map(|d| d.iter().map(|x| -x).collect()),
            rank_one: self.rank_one.as_ref().map(|r| RankOne {
                scale: -r.scale,
                direction: r.direction.clone(),
            }),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(contract(format!("vector length {} != operator dimension {}", x.len(), self.dim())));
        }
        let mut y = vec![0.0; x.len()];
        self.apply_into(x, &mut y);
        Ok(y)
    }

    /// Unchecked matvec used on hot paths; lengths are asserted in debug builds.
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.base.mul_vec_into(x, y);
        if let Some(d) = &self.diag_shift {
            for ((yi, di), xi) in y.iter_mut().zip(d).zip(x) {
                *yi += di * xi;
            }
        }
        if let Some(r) = &self.rank_one {
            let coeff = r.scale * super::dot(&r.direction, x);
            for (yi, di) in y.iter_mut().zip(&r.direction) {
                *yi += coeff * di;
            }
        }
    }

    /// Row-major dense materialization. Only sensible for small dimensions.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let mut a = self.base.to_dense();
        if let Some(d) = &self.diag_shift {
            for i in 0..n {
                a[i * n + i] += d[i];
            }
        }
        if let Some(r) = &self.rank_one {
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] += r.scale * r.direction[i] * r.direction[j];
                }
            }
        }
        a
    }
}

/// The symmetric block matrix `[[0, A], [Aᵀ, 0]]` of size `rows + cols`.
///
/// Row indices of `A` map to `0..rows`, column indices to `rows..rows+cols`.
pub fn bipartite_embed(a: &SparseMatrix) -> Result<SparseSymMatrix> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(contract(format!("bipartite embedding of an empty {}x{} matrix", a.rows(), a.cols())));
    }
    let offset = a.rows();
    SparseSymMatrix::from_undirected(offset + a.cols(), a.triplets().map(|(i, j, w)| (i, offset + j, w)))
}
