//! Spectral inference with learned diagonal regularization.
//!
//! The central object is the X-Laplacian `L_X = A + X`: a data matrix `A`
//! plus a non-positive diagonal `X` learned from the most localized of the
//! leading eigenvectors. Each learning step subtracts `η v_i²` from `X_ii`,
//! which lowers the eigenvalue of the localized vector `v` by about
//! `η Σ v_i⁴`, until every leading eigenvector is spread out.
//!
//! Modules:
//! - [`linalg`]: sparse storage, operators and eigensolvers.
//! - [`xlap`]: localization measure, the learning loop and first-order
//!   perturbation predictors.
//! - [`models`]: seeded generators for planted-partition graphs, noise
//!   injectors, pairwise similarities and matrix-completion instances.
//! - [`baselines`]: comparison operators (normalized adjacency, Laplacians,
//!   Bethe Hessian, non-backtracking companion, trimming).
//! - [`inference`]: k-means embedding, overlap, thresholds, rank estimation
//!   and alternating least squares completion.

pub mod baselines;
mod error;
pub mod inference;
pub mod linalg;
pub mod models;
pub mod xlap;

pub use error::{Error, Result};
