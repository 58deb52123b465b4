//! Structural noise injected into an existing graph. Every injector only adds
//! edges (weight 1); existing edges, weights and labels are left untouched.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::Rng;

use super::{seeded_rng, Injection, PlantedGraph};
use crate::error::{Error, Result};
use crate::linalg::SparseSymMatrix;

fn link(rows: &mut [BTreeMap<usize, f64>], i: usize, j: usize) {
    if i != j {
        rows[i].entry(j).or_insert(1.0);
        rows[j].entry(i).or_insert(1.0);
    }
}

/// Number of nodes corresponding to a fraction `alpha` of `n`, rounded.
pub fn count_from_fraction(alpha: f64, n: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Infeasible(format!("fraction {alpha} outside [0, 1]")));
    }
    Ok((alpha * n as f64).round() as usize)
}

/// Adds `count` cliques on `size` uniformly chosen nodes each. Node sets of
/// different cliques are drawn independently and may overlap.
pub fn add_cliques(mut g: PlantedGraph, count: usize, size: usize, seed: u64) -> Result<PlantedGraph> {
    let n = g.n();
    if size > n {
        return Err(Error::Infeasible(format!("clique size {size} exceeds n = {n}")));
    }
    if count == 0 {
        return Ok(g);
    }
    let mut rng = seeded_rng(seed);
    let mut rows = g.adjacency.to_rows();
    for _ in 0..count {
        let nodes = index::sample(&mut rng, n, size).into_vec();
        for (a, &i) in nodes.iter().enumerate() {
            for &j in &nodes[a + 1..] {
                link(&mut rows, i, j);
            }
        }
    }
    g.adjacency = SparseSymMatrix::from_rows(rows);
    g.injections.push(Injection::Cliques { count, size, seed });
    Ok(g)
}

/// Turns `count` distinct random nodes into hubs: each is joined to uniformly
/// random non-neighbors until its degree reaches `degree`.
pub fn add_hubs(mut g: PlantedGraph, count: usize, degree: usize, seed: u64) -> Result<PlantedGraph> {
    let n = g.n();
    if degree >= n || count > n {
        return Err(Error::Infeasible(format!("{count} hubs of degree {degree} impossible with n = {n}")));
    }
    if count == 0 {
        return Ok(g);
    }
    let mut rng = seeded_rng(seed);
    let mut rows = g.adjacency.to_rows();
    for hub in index::sample(&mut rng, n, count).into_vec() {
        while rows[hub].len() < degree {
            let other = rng.random_range(0..n);
            if other != hub && !rows[hub].contains_key(&other) {
                link(&mut rows, hub, other);
            }
        }
    }
    g.adjacency = SparseSymMatrix::from_rows(rows);
    g.injections.push(Injection::Hubs { count, degree, seed });
    Ok(g)
}

/// For `count` distinct random nodes, connects all current neighbors of the
/// node to each other.
pub fn perturb_neighbors(mut g: PlantedGraph, count: usize, seed: u64) -> Result<PlantedGraph> {
    let n = g.n();
    if count > n {
        return Err(Error::Infeasible(format!("cannot select {count} of {n} nodes")));
    }
    if count == 0 {
        return Ok(g);
    }
    let mut rng = seeded_rng(seed);
    let mut rows = g.adjacency.to_rows();
    for center in index::sample(&mut rng, n, count).into_vec() {
        let nbrs: Vec<usize> = rows[center].keys().copied().collect();
        for (a, &i) in nbrs.iter().enumerate() {
            for &j in &nbrs[a + 1..] {
                link(&mut rows, i, j);
            }
        }
    }
    g.adjacency = SparseSymMatrix::from_rows(rows);
    g.injections.push(Injection::PerturbNeighbors { count, seed });
    Ok(g)
}
