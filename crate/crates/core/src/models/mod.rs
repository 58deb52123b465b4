//! Seeded synthetic data: planted-partition graphs and their noisy variants,
//! sparse pairwise similarities, and low-rank matrices with revealed entries.
//!
//! Every generator takes an explicit `u64` seed and draws from
//! [`Xoshiro256PlusPlus`] seeded through SplitMix64 (`seed_from_u64`), so the
//! output for a given `(params, seed)` is identical on every platform.
//! Uniform reals use the 53-bit construction of `rand`; normal variates use the
//! ziggurat sampler of `rand_distr::StandardNormal`.

mod completion;
mod io;
mod noise;
mod pairwise;
mod sbm;

use std::fmt;

pub use completion::{add_bipartite_cliques, gen_completion, CompletionInstance};
pub use io::{induced_subgraph, largest_component, load_edge_list, load_gml, read_labels, write_edge_list, write_labels, GmlGraph, LoadedGraph};
pub use noise::{add_cliques, add_hubs, count_from_fraction, perturb_neighbors};
pub use pairwise::{gen_pairwise, PairwiseParams};
pub use rand_xoshiro::Xoshiro256PlusPlus;
pub use sbm::{gen_dcsbm, gen_dcsbm_with_propensities, gen_sbm, SbmParams};

use rand::SeedableRng;

use crate::linalg::SparseSymMatrix;

/// The generator used by every model in this crate.
pub fn seeded_rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Balanced contiguous labels: node `i` belongs to group `i * q / n`.
pub(crate) fn balanced_labels(n: usize, q: usize) -> Vec<usize> {
    (0..n).map(|i| i * q / n).collect()
}

/// How a graph was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Sbm(SbmParams),
    DcSbm { sbm: SbmParams, gamma: f64 },
    Pairwise(PairwiseParams),
    EdgeList { path: String },
}

/// A noise injection applied after generation.
#[derive(Debug, Clone, PartialEq)]
pub enum Injection {
    Cliques { count: usize, size: usize, seed: u64 },
    Hubs { count: usize, degree: usize, seed: u64 },
    PerturbNeighbors { count: usize, seed: u64 },
}

/// A graph with its ground-truth partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedGraph {
    pub adjacency: SparseSymMatrix,
    pub labels: Vec<usize>,
    pub q: usize,
    pub source: GraphSource,
    pub injections: Vec<Injection>,
    pub seed: u64,
}

impl PlantedGraph {
    pub fn n(&self) -> usize {
        self.adjacency.n()
    }

    /// Generator record as `key=value` lines.
    pub fn manifest(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: &dyn fmt::Display| out.push_str(&format!("{k}={v}\n"));
        match &self.source {
            GraphSource::Sbm(p) => {
                kv("model", &"sbm");
                p.write_kv(&mut kv);
            }
            GraphSource::DcSbm { sbm, gamma } => {
                kv("model", &"dcsbm");
                sbm.write_kv(&mut kv);
                kv("gamma", gamma);
            }
            GraphSource::Pairwise(p) => {
                kv("model", &"pairwise");
                p.write_kv(&mut kv);
            }
            GraphSource::EdgeList { path } => {
                kv("model", &"edgelist");
                kv("path", path);
            }
        }
        kv("seed", &self.seed);
        for (k, inj) in self.injections.iter().enumerate() {
            match inj {
                Injection::Cliques { count, size, seed } => kv(&format!("noise.{k}"), &format!("cliques count={count} size={size} seed={seed}")),
                Injection::Hubs { count, degree, seed } => kv(&format!("noise.{k}"), &format!("hubs count={count} degree={degree} seed={seed}")),
                Injection::PerturbNeighbors { count, seed } => kv(&format!("noise.{k}"), &format!("perturb-neighbors count={count} seed={seed}")),
            }
        }
        kv("n", &self.n());
        kv("edges", &self.adjacency.edge_count());
        out
    }
}
