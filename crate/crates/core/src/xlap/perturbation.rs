//! First-order predictions of how one learning update moves the spectrum.
//!
//! A step adds the diagonal perturbation `P = −η diag(v²)`. To first order an
//! eigenvalue moves by `uᵢᵀ P uᵢ`, an eigenvector by
//! `Σ_{j≠i} (uⱼᵀ P uᵢ)/(λᵢ − λⱼ) uⱼ`, and the IPR by `4 Σ_l u_il³ û_il`.
//! These need the complete spectrum and are meant for small matrices.

use super::check_unit;
use crate::error::{contract, Error, Result};
use crate::linalg::EigenPairs;

/// Relative eigenvalue gap below which eigenvector predictions are refused.
pub const GAP_TOL: f64 = 1e-6;

/// Predicted eigenvalue change of `u` when `X ← X − η diag(v²)`.
pub fn predicted_eigenvalue_shift(u: &[f64], v: &[f64], eta: f64) -> Result<f64> {
    if u.len() != v.len() {
        return Err(contract(format!("vector lengths differ: {} vs {}", u.len(), v.len())));
    }
    check_unit(u, "u")?;
    check_unit(v, "v")?;
    Ok(-eta * u.iter().zip(v).map(|(ui, vi)| vi * vi * ui * ui).sum::<f64>())
}

/// Split of the first-order IPR change into its diagonal and off-diagonal parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IprChange {
    /// `−4η Σ_l Σ_{j≠i} u_jl² v_l² u_il⁴ / (λᵢ − λⱼ)`.
    pub signal: f64,
    /// `−4η Σ_l Σ_{j≠i} Σ_{k≠l} u_il³ v_k² u_jk u_ik u_jl / (λᵢ − λⱼ)`.
    pub crosstalk: f64,
}

impl IprChange {
    pub fn total(&self) -> f64 {
        self.signal + self.crosstalk
    }
}

/// Coupling `uⱼᵀ diag(v²) uᵢ` for each `j`, with the gap check applied.
fn couplings(i: usize, pairs: &EigenPairs, v: &[f64]) -> Result<Vec<f64>> {
    let n = pairs.dim();
    if pairs.len() != n {
        return Err(contract(format!("complete spectrum required: {} pairs for dimension {n}", pairs.len())));
    }
    if i >= n {
        return Err(contract(format!("index {i} out of range for {n} pairs")));
    }
    if v.len() != n {
        return Err(contract(format!("v has length {}, expected {n}", v.len())));
    }
    check_unit(v, "v")?;
    let lambda_max = pairs.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda_min = pairs.values.iter().copied().fold(f64::INFINITY, f64::min);
    let gap_tol = GAP_TOL * (lambda_max - lambda_min);
    let gap = (0..n)
        .filter(|&j| j != i)
        .map(|j| (pairs.values[i] - pairs.values[j]).abs())
        .fold(f64::INFINITY, f64::min);
    if gap < gap_tol {
        return Err(Error::DegenerateSpectrum { gap, gap_tol });
    }
    let ui = &pairs.vectors[i];
    Ok(pairs
        .vectors
        .iter()
        .map(|uj| (0..n).map(|k| uj[k] * v[k] * v[k] * ui[k]).sum())
        .collect())
}

/// Predicted first-order change `ûᵢ` of eigenvector `i`.
pub fn predicted_eigenvector_shift(i: usize, pairs: &EigenPairs, v: &[f64], eta: f64) -> Result<Vec<f64>> {
    let c = couplings(i, pairs, v)?;
    let n = pairs.dim();
    let mut out = vec![0.0; n];
    for (j, uj) in pairs.vectors.iter().enumerate() {
        if j == i {
            continue;
        }
        let w = -eta * c[j] / (pairs.values[i] - pairs.values[j]);
        for (o, x) in out.iter_mut().zip(uj) {
            *o += w * x;
        }
    }
    Ok(out)
}

/// First-order change of `I(uᵢ)` split into signal and cross-talk terms.
pub fn predicted_ipr_change(i: usize, pairs: &EigenPairs, v: &[f64], eta: f64) -> Result<IprChange> {
    let c = couplings(i, pairs, v)?;
    let ui = &pairs.vectors[i];
    let mut signal = 0.0;
    let mut crosstalk = 0.0;
    for (j, uj) in pairs.vectors.iter().enumerate() {
        if j == i {
            continue;
        }
        let denom = pairs.values[i] - pairs.values[j];
        // Σ_l u_il³ u_jl and its k = l part.
        let cubic: f64 = ui.iter().zip(uj).map(|(a, b)| a * a * a * b).sum();
        let diagonal: f64 = ui
            .iter()
            .zip(uj)
            .zip(v)
            .map(|((a, b), vk)| (a * a) * (a * a) * (b * b) * (vk * vk))
            .sum();
        signal += diagonal / denom;
        crosstalk += (cubic * c[j] - diagonal) / denom;
    }
    Ok(IprChange {
        signal: -4.0 * eta * signal,
        crosstalk: -4.0 * eta * crosstalk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{full_spectrum, LinearOperator, SparseSymMatrix};
    use crate::xlap::ipr;

    fn diagonal_pairs(d: &[f64]) -> EigenPairs {
        let n = d.len();
        let a = SparseSymMatrix::from_undirected(n, d.iter().enumerate().map(|(i, &x)| (i, i, x))).unwrap();
        full_spectrum(&LinearOperator::new(a)).unwrap()
    }

    fn dense_pairs(seed: u64, n: usize) -> EigenPairs {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut e = Vec::new();
        for i in 0..n {
            for j in i..n {
                e.push((i, j, rng.random_range(-1.0..1.0)));
            }
        }
        full_spectrum(&LinearOperator::new(SparseSymMatrix::from_undirected(n, e).unwrap())).unwrap()
    }

    #[test]
    fn self_shift_is_minus_eta_ipr() {
        let pairs = dense_pairs(3, 9);
        let v = &pairs.vectors[2];
        let shift = predicted_eigenvalue_shift(v, v, 0.7).unwrap();
        assert!((shift + 0.7 * ipr(v).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn uniform_v_shifts_every_eigenvalue_equally() {
        let n = 12;
        let v = vec![1.0 / (n as f64).sqrt(); n];
        let pairs = dense_pairs(5, n);
        for u in &pairs.vectors {
            let s = predicted_eigenvalue_shift(u, &v, 2.0).unwrap();
            assert!((s + 2.0 / n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn uniform_v_leaves_vectors_and_total_ipr_unchanged() {
        let n = 10;
        let v = vec![1.0 / (n as f64).sqrt(); n];
        let pairs = dense_pairs(9, n);
        for i in 0..n {
            let du = predicted_eigenvector_shift(i, &pairs, &v, 0.5).unwrap();
            assert!(du.iter().all(|x| x.abs() < 1e-13));
            let change = predicted_ipr_change(i, &pairs, &v, 0.5).unwrap();
            // The two parts cancel; individually they need not vanish.
            assert!(change.total().abs() < 1e-13, "{change:?}");
        }
    }

    #[test]
    fn coordinate_eigenvectors_do_not_move() {
        let pairs = diagonal_pairs(&[4.0, 1.0, -2.0, 0.5]);
        let e1 = vec![1.0, 0.0, 0.0, 0.0];
        for i in 0..4 {
            let du = predicted_eigenvector_shift(i, &pairs, &e1, 1.0).unwrap();
            assert!(du.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn leading_vector_signal_is_non_positive() {
        for seed in 0..20 {
            let pairs = dense_pairs(seed, 8);
            for v in &pairs.vectors {
                let change = predicted_ipr_change(0, &pairs, v, 1.0).unwrap();
                assert!(change.signal <= 0.0);
            }
        }
    }

    #[test]
    fn crosstalk_matches_triple_sum() {
        let pairs = dense_pairs(21, 7);
        let v = pairs.vectors[4].clone();
        let eta = 0.3;
        let n = 7;
        let i = 2;
        let u = &pairs.vectors;
        let mut brute = 0.0;
        for l in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                for k in (0..n).filter(|&k| k != l) {
                    brute += u[i][l].powi(3) * v[k] * v[k] * u[j][k] * u[i][k] * u[j][l] / (pairs.values[i] - pairs.values[j]);
                }
            }
        }
        let change = predicted_ipr_change(i, &pairs, &v, eta).unwrap();
        assert!((change.crosstalk - (-4.0 * eta * brute)).abs() < 1e-14);
    }

    #[test]
    fn degenerate_spectrum_rejected() {
        let pairs = diagonal_pairs(&[1.0, 1.0, 3.0]);
        let v = vec![0.6, 0.8, 0.0];
        assert!(matches!(
            predicted_eigenvector_shift(1, &pairs, &v, 1.0),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(predicted_eigenvalue_shift(&[1.0, 0.0], &[1.0], 1.0).is_err());
        let pairs = dense_pairs(1, 4);
        assert!(predicted_eigenvector_shift(0, &pairs.truncated(3), &pairs.vectors[0], 1.0).is_err());
    }
}
