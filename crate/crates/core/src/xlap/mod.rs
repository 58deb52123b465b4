//! Localization measure, regularization learning and first-order
//! perturbation predictors.

mod learn;
mod perturbation;

pub use learn::{learn_regularization, LearnedDiag, LearningConfig, StepRecord, XLaplacianState};
pub use perturbation::{predicted_eigenvalue_shift, predicted_eigenvector_shift, predicted_ipr_change, IprChange};

use crate::error::{contract, Result};
use crate::linalg::{norm, EigenPairs};

/// Tolerance on `‖v‖₂ − 1` accepted by [`ipr`].
pub const UNIT_TOL: f64 = 1e-8;

pub(crate) fn check_unit(v: &[f64], what: &str) -> Result<()> {
    let nv = norm(v);
    if (nv - 1.0).abs() > UNIT_TOL {
        return Err(contract(format!("{what} must be a unit vector, has norm {nv}")));
    }
    Ok(())
}

/// Inverse participation ratio `Σ vᵢ⁴` of a unit vector.
///
/// Ranges from `1/n` for a uniform vector to `1` for a coordinate vector.
pub fn ipr(v: &[f64]) -> Result<f64> {
    check_unit(v, "ipr argument")?;
    Ok(v.iter().map(|x| (x * x) * (x * x)).sum())
}

/// The eigenvector with the largest IPR, ties going to the leading one.
pub fn select_most_localized(pairs: &EigenPairs) -> Result<(usize, &[f64])> {
    let mut best: Option<(usize, f64)> = None;
    for (k, v) in pairs.vectors.iter().enumerate() {
        let value = ipr(v)?;
        if best.is_none_or(|(_, b)| value > b) {
            best = Some((k, value));
        }
    }
    let (k, _) = best.ok_or_else(|| contract("cannot select from an empty eigenpair set"))?;
    Ok((k, &pairs.vectors[k]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pairs_of(vectors: Vec<Vec<f64>>) -> EigenPairs {
        let k = vectors.len();
        EigenPairs {
            values: (0..k).rev().map(|x| x as f64).collect(),
            vectors,
            residuals: vec![0.0; k],
            tol: 1e-8,
        }
    }

    #[test]
    fn ipr_reference_values() {
        let n = 25;
        let uniform = vec![1.0 / (n as f64).sqrt(); n];
        assert!((ipr(&uniform).unwrap() - 1.0 / n as f64).abs() < 1e-15);
        let mut e = vec![0.0; n];
        e[7] = 1.0;
        assert_eq!(ipr(&e).unwrap(), 1.0);
        let h = 0.5f64.sqrt();
        assert!((ipr(&[h, h, 0.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ipr_rejects_non_unit() {
        assert!(matches!(ipr(&[1.0, 1.0]), Err(crate::Error::Contract(_))));
    }

    #[test]
    fn selects_coordinate_vector_over_uniform() {
        let uniform = vec![0.5; 4];
        let e = vec![0.0, 0.0, 1.0, 0.0];
        let pairs = pairs_of(vec![uniform, e.clone()]);
        let (k, v) = select_most_localized(&pairs).unwrap();
        assert_eq!(k, 1);
        assert_eq!(v, e.as_slice());
    }

    #[test]
    fn ties_go_to_lower_rank() {
        let a = vec![1.0, 0.0, 0.0];
        let b = vec![0.0, 0.0, 1.0];
        let (k, _) = select_most_localized(&pairs_of(vec![vec![0.6, 0.8, 0.0], a, b])).unwrap();
        assert_eq!(k, 1);
    }

    #[test]
    fn empty_selection_is_error() {
        assert!(select_most_localized(&pairs_of(vec![])).is_err());
    }

    proptest! {
        #[test]
        fn ipr_between_inverse_dimension_and_one(raw in prop::collection::vec(-10.0f64..10.0, 1..64)) {
            let nv = norm(&raw);
            prop_assume!(nv > 1e-6);
            let v: Vec<f64> = raw.iter().map(|x| x / nv).collect();
            let value = ipr(&v).unwrap();
            let n = v.len() as f64;
            prop_assert!(value >= 1.0 / n - 1e-12);
            prop_assert!(value <= 1.0 + 1e-12);
        }
    }
}
