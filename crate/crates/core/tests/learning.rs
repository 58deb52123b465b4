use nalgebra::DMatrix;

use xlap::inference::{detect, detect_xlaplacian, overlap, DetectMethod, DetectOptions, Problem};
use xlap::linalg::{top_eigenpairs, EigenOptions, LinearOperator};
use xlap::models::{add_cliques, add_hubs, gen_sbm, SbmParams};
use xlap::xlap::{ipr, learn_regularization, predicted_eigenvalue_shift, LearningConfig};

#[test]
fn learning_removes_clique_localization() {
    let g = add_cliques(gen_sbm(&SbmParams::new(2000, 2, 3.0, 0.1), 1).unwrap(), 10, 10, 2).unwrap();
    let a = LinearOperator::new(g.adjacency.clone());
    let cfg = LearningConfig::new(2, 2000);
    let before = top_eigenpairs(&a, 2, &EigenOptions::default(), None).unwrap();
    assert!(before.vectors.iter().any(|v| ipr(v).unwrap() > cfg.delta), "cliques localize the adjacency spectrum");

    let state = learn_regularization(&a, &cfg).unwrap();
    assert!(state.converged);
    assert!(state.steps > 0);
    for v in &state.pairs.vectors[..2] {
        assert!(ipr(v).unwrap() < cfg.delta);
    }
    assert!(state.x_diag.iter().all(|&x| x <= 0.0));
    assert!((state.trace() + cfg.eta * state.steps as f64).abs() <= 1e-9 * cfg.eta * state.steps as f64);

    // The learned operator's leading pairs are what a fresh solve finds.
    let fresh = top_eigenpairs(&state.operator(), 2, &EigenOptions::default(), None).unwrap();
    for k in 0..2 {
        assert!((fresh.values[k] - state.pairs.values[k]).abs() <= 1e-6 * fresh.values[0].abs());
    }
}

#[test]
fn eigenvalues_never_increase_along_the_trajectory() {
    // X only decreases, so by Weyl's inequality every eigenvalue is non-increasing.
    let g = add_hubs(gen_sbm(&SbmParams::new(1000, 2, 4.0, 0.2), 3).unwrap(), 5, 40, 4).unwrap();
    let state = learn_regularization(&LinearOperator::new(g.adjacency), &LearningConfig::new(3, 1000).with_eta(2.0)).unwrap();
    assert!(state.steps >= 2);
    for w in state.trajectory.windows(2) {
        for k in 0..3 {
            assert!(w[1].eigenvalues[k] <= w[0].eigenvalues[k] + 1e-7, "{:?} -> {:?}", w[0].eigenvalues, w[1].eigenvalues);
        }
    }
    for rec in &state.trajectory {
        assert!(rec.selected_ipr >= state.delta);
        assert_eq!(rec.selected_ipr, rec.iprs[rec.selected]);
    }
}

#[test]
fn single_step_matches_first_order_prediction() {
    let g = gen_sbm(&SbmParams::new(120, 2, 5.0, 0.3), 5).unwrap();
    let n = 120;
    let a = DMatrix::from_row_slice(n, n, &g.adjacency.to_dense());
    let eig = a.clone().symmetric_eigen();
    let top = eig.eigenvalues.imax();
    let u: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    let v = u.clone();
    let eta = 1e-4;
    let mut after = a.clone();
    for i in 0..n {
        after[(i, i)] -= eta * v[i] * v[i];
    }
    let moved = after.symmetric_eigen().eigenvalues.max();
    let predicted = predicted_eigenvalue_shift(&u, &v, eta).unwrap();
    assert!((moved - eig.eigenvalues[top] - predicted).abs() <= 10.0 * eta * eta);
    let check: f64 = (0..n).map(|i| u[i] * u[i] * v[i] * v[i]).sum::<f64>() * -eta;
    assert!((predicted - check).abs() <= 1e-15);
}

#[test]
fn xlaplacian_beats_adjacency_on_noisy_sbm() {
    let opts = DetectOptions::default();
    let (mut xl, mut adj) = (0.0, 0.0);
    for seed in 0..3 {
        let g = add_cliques(gen_sbm(&SbmParams::new(3000, 2, 3.0, 0.1), seed).unwrap(), 10, 10, 100 + seed).unwrap();
        let (pred, _) = detect_xlaplacian(&g.adjacency, 2, Problem::Community, &opts).unwrap();
        xl += overlap(&pred, &g.labels, 2).unwrap();
        let pred = detect(&g.adjacency, 2, DetectMethod::Adjacency, Problem::Community, &opts, None).unwrap();
        adj += overlap(&pred, &g.labels, 2).unwrap();
    }
    assert!(xl / 3.0 > 0.75, "X-Laplacian {}", xl / 3.0);
    assert!(adj / 3.0 < 0.6, "adjacency {}", adj / 3.0);
}
