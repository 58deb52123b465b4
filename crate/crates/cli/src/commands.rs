//! Subcommand implementations.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;

use xlap::baselines::{
    bethe_hessian, default_bethe_parameter, gaussian_coupling, nonbacktracking_companion, rank_one_regularized, sym_laplacian, weighted_bethe_hessian,
};
use xlap::inference::{
    complete, detect, overlap, pairwise_limit, sbm_threshold, AlsOptions, CompletionMethod, CompletionOptions, DetectMethod, DetectOptions, Penalty, Problem,
};
use xlap::linalg::{top_eigenpairs, EigenOptions, LinearOperator, SparseSymMatrix};
use xlap::models::{
    add_bipartite_cliques, add_cliques, add_hubs, gen_completion, gen_dcsbm, gen_pairwise, gen_sbm, induced_subgraph, largest_component, load_edge_list,
    load_gml, perturb_neighbors, read_labels, write_edge_list, write_labels, PairwiseParams, PlantedGraph, SbmParams,
};
use xlap::xlap::{ipr, learn_regularization, LearningConfig};

use crate::config::{config_error, Config, Schema};
use crate::output::{self, num, sibling, HeaderStyle};

/// Some seeds failed; their rows were written as NaN (exit code 3).
#[derive(Debug)]
pub struct SolverFailure {
    pub failed: usize,
    pub total: usize,
}

impl std::fmt::Display for SolverFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} of {} runs failed", self.failed, self.total)
    }
}

impl std::error::Error for SolverFailure {}

/// Shared state for one invocation.
pub struct Run {
    pub cfg: Config,
    pub style: HeaderStyle,
    pub pool: rayon::ThreadPool,
}

impl Run {
    fn output(&self) -> &Path {
        Path::new(self.cfg.str("output"))
    }

    fn create(&self, path: &Path) -> Result<Box<dyn Write>> {
        output::create(path, &self.cfg, self.style)
    }
}

pub const GEN: Schema = &[
    ("seed", "0"),
    ("output", ""),
    ("model", "sbm"),
    ("n", "1000"),
    ("m", "1000"),
    ("q", "2"),
    ("c", "3"),
    ("eps", "0.1"),
    ("gamma", "2.5"),
    ("r", "2"),
    ("mean_in", "0.75"),
    ("mean_out", "-0.75"),
    ("variance", "1"),
    ("cliques", "0"),
    ("clique_size", "10"),
    ("hubs", "0"),
    ("hub_degree", "50"),
    ("perturb_neighbors", "0"),
];

pub const SPECTRUM: Schema = &[
    ("seed", "0"),
    ("output", "-"),
    ("model", "sbm"),
    ("method", "adjacency"),
    ("input", ""),
    ("n", "1000"),
    ("q", "2"),
    ("c", "3"),
    ("eps", "0.1"),
    ("gamma", "2.5"),
    ("mean_in", "0.75"),
    ("mean_out", "-0.75"),
    ("variance", "1"),
    ("cliques", "0"),
    ("clique_size", "10"),
    ("hubs", "0"),
    ("hub_degree", "50"),
    ("perturb_neighbors", "0"),
    ("k", "10"),
    ("zeta", "0"),
    ("bethe_r", "auto"),
    ("eta", "10"),
    ("delta", "auto"),
    ("max_steps", "500"),
];

pub const LEARN: Schema = &[
    ("seed", "0"),
    ("output", "-"),
    ("diag_output", ""),
    ("model", "sbm"),
    ("method", "xlaplacian"),
    ("input", ""),
    ("n", "1000"),
    ("q", "2"),
    ("c", "3"),
    ("eps", "0.1"),
    ("gamma", "2.5"),
    ("mean_in", "0.75"),
    ("mean_out", "-0.75"),
    ("variance", "1"),
    ("cliques", "0"),
    ("clique_size", "10"),
    ("hubs", "0"),
    ("hub_degree", "50"),
    ("perturb_neighbors", "0"),
    ("eta", "10"),
    ("delta", "auto"),
    ("max_steps", "500"),
];

pub const DETECT: Schema = &[
    ("seed", "0"),
    ("output", "-"),
    ("model", "sbm"),
    ("method", "adjacency,xlaplacian"),
    ("n", "1000"),
    ("q", "2"),
    ("c", "3"),
    ("eps", "0.05,0.1,0.15,0.2,0.25,0.3,0.35"),
    ("gamma", "2.5"),
    ("n_seeds", "10"),
    ("cliques", "0"),
    ("clique_size", "10"),
    ("hubs", "0"),
    ("hub_degree", "50"),
    ("perturb_neighbors", "0"),
    ("bethe_r", "auto"),
    ("eta", "10"),
    ("delta", "auto"),
    ("max_steps", "500"),
];

pub const PAIRWISE: Schema = &[
    ("seed", "0"),
    ("output", "-"),
    ("model", "pairwise"),
    ("method", "bethe-hessian,xlaplacian"),
    ("n", "1000"),
    ("q", "2"),
    ("c", "3,4,6,8,10"),
    ("mean_in", "0.75"),
    ("mean_out", "-0.75"),
    ("variance", "1"),
    ("n_seeds", "10"),
    ("cliques", "0"),
    ("clique_size", "10"),
    ("hubs", "0"),
    ("hub_degree", "50"),
    ("perturb_neighbors", "0"),
    ("eta", "10"),
    ("delta", "auto"),
    ("max_steps", "500"),
];

pub const COMPLETE: Schema = &[
    ("seed", "0"),
    ("output", "-"),
    ("model", "completion"),
    ("method", "trimmed-svd,bethe-hessian,xlaplacian"),
    ("n", "500"),
    ("m", "500"),
    ("r", "3"),
    ("c", "10,15,20,25,30"),
    ("n_seeds", "10"),
    ("cliques", "0"),
    ("clique_size", "20"),
    ("r_max", "5"),
    ("penalty", "proximal"),
    ("eta", "10"),
    ("delta", "auto"),
    ("max_steps", "5000"),
];

pub const BLOGS: Schema = &[
    ("seed", "0"),
    ("output", "-"),
    ("model", "auto"),
    ("method", "adjacency,xlaplacian"),
    ("input", ""),
    ("labels", ""),
    ("eta", "10"),
    ("delta", "auto"),
    ("max_steps", "500"),
];

// Offsets keep the noise streams independent of the generator stream.
const CLIQUE_STREAM: u64 = 0x00c1_19e5;
const HUB_STREAM: u64 = 0x0000_b0b5;
const NEIGHBOR_STREAM: u64 = 0x0009_e1b5;

#[derive(Debug, Clone, Copy)]
struct Noise {
    cliques: usize,
    clique_size: usize,
    hubs: usize,
    hub_degree: usize,
    perturb: usize,
}

impl Noise {
    fn from_config(cfg: &Config) -> Result<Self> {
        Ok(Self {
            cliques: cfg.get("cliques")?,
            clique_size: cfg.get("clique_size")?,
            hubs: cfg.get("hubs")?,
            hub_degree: cfg.get("hub_degree")?,
            perturb: cfg.get("perturb_neighbors")?,
        })
    }

    fn apply(&self, mut g: PlantedGraph, seed: u64) -> Result<PlantedGraph> {
        if self.cliques > 0 {
            g = add_cliques(g, self.cliques, self.clique_size, seed.wrapping_add(CLIQUE_STREAM))?;
        }
        if self.hubs > 0 {
            g = add_hubs(g, self.hubs, self.hub_degree, seed.wrapping_add(HUB_STREAM))?;
        }
        if self.perturb > 0 {
            g = perturb_neighbors(g, self.perturb, seed.wrapping_add(NEIGHBOR_STREAM))?;
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Model {
    Sbm,
    DcSbm,
    Pairwise,
}

/// Everything needed to draw one planted graph.
#[derive(Debug, Clone, Copy)]
struct GraphSpec {
    model: Model,
    n: usize,
    q: usize,
    c: f64,
    eps: f64,
    gamma: f64,
    mean_in: f64,
    mean_out: f64,
    variance: f64,
    noise: Noise,
}

impl GraphSpec {
    fn from_config(cfg: &Config) -> Result<Self> {
        let model = match cfg.str("model") {
            "sbm" => Model::Sbm,
            "dcsbm" => Model::DcSbm,
            "pairwise" => Model::Pairwise,
            other => return Err(config_error(format!("model {other:?} is not a graph model (expected sbm, dcsbm or pairwise)"))),
        };
        let has = |k: &str| cfg.entries().any(|(key, _)| key == k);
        let scalar = |k: &str, fallback: f64| -> Result<f64> {
            if !has(k) {
                return Ok(fallback);
            }
            Ok(cfg.list::<f64>(k)?[0])
        };
        Ok(Self {
            model,
            n: cfg.get("n")?,
            q: cfg.get("q")?,
            c: scalar("c", 3.0)?,
            eps: scalar("eps", 0.0)?,
            gamma: scalar("gamma", 2.5)?,
            mean_in: scalar("mean_in", 0.75)?,
            mean_out: scalar("mean_out", -0.75)?,
            variance: scalar("variance", 1.0)?,
            noise: Noise::from_config(cfg)?,
        })
    }

    fn pairwise_params(&self) -> PairwiseParams {
        let mut p = PairwiseParams::new(self.n, self.q, self.c).with_means(self.mean_in, self.mean_out);
        p.variance = self.variance;
        p
    }

    fn problem(&self) -> Problem {
        match self.model {
            Model::Pairwise => Problem::Pairwise(self.pairwise_params()),
            _ => Problem::Community,
        }
    }

    fn generate(&self, seed: u64) -> Result<PlantedGraph> {
        let sbm = SbmParams::new(self.n, self.q, self.c, self.eps);
        let g = match self.model {
            Model::Sbm => gen_sbm(&sbm, seed)?,
            Model::DcSbm => gen_dcsbm(&sbm, self.gamma, seed)?,
            Model::Pairwise => gen_pairwise(&self.pairwise_params(), seed)?,
        };
        self.noise.apply(g, seed)
    }
}

fn detect_options(cfg: &Config) -> Result<DetectOptions> {
    let has_bethe = cfg.entries().any(|(k, _)| k == "bethe_r");
    Ok(DetectOptions {
        eta: cfg.get("eta")?,
        delta: cfg.get_auto("delta")?,
        max_steps: cfg.get("max_steps")?,
        bethe_r: if has_bethe { cfg.get_auto("bethe_r")? } else { None },
        ..DetectOptions::default()
    })
}

/// Graph for single-instance commands: `input` if given, else generated.
fn single_graph(cfg: &Config) -> Result<(SparseSymMatrix, Problem)> {
    if let Some(path) = cfg.path("input") {
        let g = load_edge_list(path).map_err(|e| config_error(format!("reading {}: {e}", path.display())))?;
        if g.self_loops_dropped > 0 {
            eprintln!("note: dropped {} self-loops from {}", g.self_loops_dropped, path.display());
        }
        return Ok((g.adjacency, Problem::Community));
    }
    let spec = GraphSpec::from_config(cfg)?;
    Ok((spec.generate(cfg.get("seed")?)?.adjacency, spec.problem()))
}

fn write_manifest(path: &Path, run: &Run, stats: &[(&str, String)]) -> Result<()> {
    let mut w = run.create(path)?;
    for (k, v) in run.cfg.entries() {
        writeln!(w, "{k}={v}")?;
    }
    for (k, v) in stats {
        writeln!(w, "{k}={v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn gen(run: &Run) -> Result<()> {
    let cfg = &run.cfg;
    let prefix = cfg.path("output").filter(|p| *p != Path::new("-")).ok_or_else(|| config_error("gen needs output=<file prefix>"))?;
    let seed: u64 = cfg.get("seed")?;
    if cfg.str("model") == "completion" {
        let mut inst = gen_completion(cfg.get("n")?, cfg.get("m")?, cfg.get("r")?, cfg.get("c")?, seed)?;
        let cliques: usize = cfg.get("cliques")?;
        if cliques > 0 {
            inst = add_bipartite_cliques(inst, cliques, cfg.get("clique_size")?, seed.wrapping_add(CLIQUE_STREAM))?;
        }
        let entries = sibling(prefix, ".entries");
        let mut w = run.create(&entries)?;
        writeln!(w, "# shape: {} {}", inst.n, inst.m)?;
        for (i, j, x) in inst.observed.triplets() {
            writeln!(w, "{i} {j} {x:?}")?;
        }
        w.flush()?;
        let factors = sibling(prefix, ".factors");
        let mut w = run.create(&factors)?;
        writeln!(w, "# rows of U ({} x {}) then rows of V ({} x {})", inst.n, inst.r, inst.m, inst.r)?;
        for row in inst.u_true.chunks(inst.r).chain(inst.v_true.chunks(inst.r)) {
            writeln!(w, "{}", row.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" "))?;
        }
        w.flush()?;
        write_manifest(&sibling(prefix, ".manifest"), run, &[("revealed", inst.observed.nnz().to_string())])?;
        eprintln!("wrote {} revealed entries to {}", inst.observed.nnz(), entries.display());
        return Ok(());
    }
    let g = GraphSpec::from_config(cfg)?.generate(seed)?;
    let edges = sibling(prefix, ".edges");
    let mut w = run.create(&edges)?;
    write_edge_list(&g.adjacency, &mut w)?;
    w.flush()?;
    let mut w = run.create(&sibling(prefix, ".labels"))?;
    write_labels(&g.labels, &mut w)?;
    w.flush()?;
    write_manifest(&sibling(prefix, ".manifest"), run, &[("edges", g.adjacency.edge_count().to_string())])?;
    eprintln!("wrote {} nodes, {} edges to {}", g.n(), g.adjacency.edge_count(), edges.display());
    Ok(())
}

pub fn spectrum(run: &Run) -> Result<()> {
    let cfg = &run.cfg;
    let (a, problem) = single_graph(cfg)?;
    let n = a.n();
    let k: usize = cfg.get("k")?;
    if k == 0 || k > n {
        return Err(config_error(format!("k = {k} must lie in 1..={n}")));
    }
    let eig = EigenOptions::default();
    let method: DetectMethod = cfg.get("method")?;
    // (eigenvalue, vector) pairs in reporting order.
    let pairs: Vec<(f64, Vec<f64>)> = match method {
        DetectMethod::Adjacency => {
            let p = top_eigenpairs(&LinearOperator::new(a), k, &eig, None)?;
            p.values.into_iter().zip(p.vectors).collect()
        }
        DetectMethod::NormLaplacian => {
            let p = top_eigenpairs(&sym_laplacian(&a).negated(), k, &eig, None)?;
            p.values.into_iter().map(|x| -x).zip(p.vectors).collect()
        }
        DetectMethod::RankOne => {
            let p = top_eigenpairs(&rank_one_regularized(&a, cfg.get("zeta")?)?, k, &eig, None)?;
            p.values.into_iter().zip(p.vectors).collect()
        }
        DetectMethod::BetheHessian => {
            let h = match problem {
                Problem::Pairwise(p) => weighted_bethe_hessian(&a, gaussian_coupling(p.mean_in, p.mean_out, p.variance)),
                Problem::Community => {
                    let r = match cfg.get_auto("bethe_r")? {
                        Some(r) => r,
                        None => default_bethe_parameter(&a)?,
                    };
                    bethe_hessian(&a, r)?
                }
            };
            let p = top_eigenpairs(&h.negated(), k, &eig, None)?;
            p.values.into_iter().map(|x| -x).zip(p.vectors).collect()
        }
        DetectMethod::NonBacktracking => {
            let nb = nonbacktracking_companion(&a);
            let p = nb.top_real_eigenpairs(k, 1e-6, 2000, eig.seed)?;
            if !p.converged {
                eprintln!("warning: non-backtracking pairs did not reach tolerance");
            }
            p.values.into_iter().zip(p.vectors).collect()
        }
        DetectMethod::XLaplacian => {
            let opts = detect_options(cfg)?;
            let q: usize = cfg.get("q")?;
            let state = learn_regularization(&LinearOperator::new(a), &opts.learning_config(q, n))?;
            eprintln!("learned X in {} steps (converged: {})", state.steps, state.converged);
            let p = top_eigenpairs(&state.operator(), k, &eig, None)?;
            p.values.into_iter().zip(p.vectors).collect()
        }
    };
    let mut w = run.create(run.output())?;
    writeln!(w, "rank,eigenvalue,ipr")?;
    for (i, (value, vector)) in pairs.iter().enumerate() {
        writeln!(w, "{},{},{}", i + 1, num(*value), num(ipr(vector)?))?;
    }
    w.flush()?;
    Ok(())
}

pub fn learn(run: &Run) -> Result<()> {
    let cfg = &run.cfg;
    if cfg.str("method") != "xlaplacian" {
        return Err(config_error(format!("learn only supports method=xlaplacian, got {:?}", cfg.str("method"))));
    }
    let (a, _) = single_graph(cfg)?;
    let n = a.n();
    let q: usize = cfg.get("q")?;
    let mut lc = LearningConfig::new(q, n).with_eta(cfg.get("eta")?).with_max_steps(cfg.get("max_steps")?);
    if let Some(d) = cfg.get_auto("delta")? {
        lc = lc.with_delta(d);
    }
    lc.validate(n).map_err(|e| config_error(e.to_string()))?;
    let state = learn_regularization(&LinearOperator::new(a), &lc)?;

    let mut w = run.create(run.output())?;
    let lambdas: Vec<String> = (1..=q).map(|i| format!("lambda_{i}")).collect();
    let iprs: Vec<String> = (1..=q).map(|i| format!("ipr_{i}")).collect();
    writeln!(w, "step,selected_ipr,{},{}", lambdas.join(","), iprs.join(","))?;
    for (step, rec) in state.trajectory.iter().enumerate() {
        let cells: Vec<String> = rec.eigenvalues.iter().take(q).chain(rec.iprs.iter().take(q)).map(|&x| num(x)).collect();
        writeln!(w, "{step},{},{}", num(rec.selected_ipr), cells.join(","))?;
    }
    w.flush()?;

    let diag = match cfg.path("diag_output") {
        Some(p) => Some(p.to_path_buf()),
        None if run.output() != Path::new("-") => Some(sibling(run.output(), ".diag")),
        None => None,
    };
    if let Some(path) = diag {
        let mut w = run.create(&path)?;
        state.write_diag(&mut w)?;
        w.flush()?;
    }
    eprintln!("{} steps, converged: {}, trace(X) = {}", state.steps, state.converged, state.trace());
    if !state.converged {
        return Err(SolverFailure { failed: 1, total: 1 }.into());
    }
    Ok(())
}

/// Mean and standard error of the finite entries.
fn summarize(xs: &[f64]) -> (f64, f64, usize) {
    let ok: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
    let k = ok.len();
    if k == 0 {
        return (f64::NAN, f64::NAN, 0);
    }
    let mean = ok.iter().sum::<f64>() / k as f64;
    let stderr = if k > 1 {
        (ok.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64 / k as f64).sqrt()
    } else {
        0.0
    };
    (mean, stderr, k)
}

/// Runs every method on every (parameter, seed) graph of a sweep.
///
/// Returns one overlap per (parameter index, method index, seed); failed runs
/// are NaN and reported on stderr.
fn sweep_overlaps(run: &Run, specs: &[(f64, GraphSpec)], methods: &[DetectMethod], opts: &DetectOptions) -> Result<(Vec<Vec<Vec<f64>>>, usize)> {
    let base: u64 = run.cfg.get("seed")?;
    let n_seeds: u64 = run.cfg.get("n_seeds")?;
    if n_seeds == 0 {
        return Err(config_error("n_seeds must be positive"));
    }
    let tasks: Vec<(usize, u64)> = (0..specs.len()).flat_map(|p| (0..n_seeds).map(move |s| (p, base + s))).collect();
    let results: Vec<Vec<std::result::Result<f64, String>>> = run.pool.install(|| {
        tasks
            .par_iter()
            .map(|&(p, seed)| {
                let spec = &specs[p].1;
                let g = match spec.generate(seed) {
                    Ok(g) => g,
                    Err(e) => return vec![Err(e.to_string()); methods.len()],
                };
                methods
                    .iter()
                    .map(|&m| {
                        detect(&g.adjacency, spec.q, m, spec.problem(), opts, Some(&g.labels))
                            .and_then(|pred| overlap(&pred, &g.labels, spec.q))
                            .map_err(|e| e.to_string())
                    })
                    .collect()
            })
            .collect()
    });
    let mut table = vec![vec![Vec::new(); methods.len()]; specs.len()];
    let mut failed = 0;
    for (&(p, seed), row) in tasks.iter().zip(results) {
        for (mi, r) in row.into_iter().enumerate() {
            let x = r.unwrap_or_else(|e| {
                failed += 1;
                eprintln!("warning: {} at {} seed {seed}: {e}", methods[mi], specs[p].0);
                f64::NAN
            });
            table[p][mi].push(x);
        }
    }
    Ok((table, failed))
}

fn write_sweep(run: &Run, column: &str, params: &[f64], methods: &[DetectMethod], table: &[Vec<Vec<f64>>], threshold: Option<f64>) -> Result<()> {
    let mut rows: Vec<(f64, String, String)> = Vec::new();
    for (p, &x) in params.iter().enumerate() {
        for (mi, m) in methods.iter().enumerate() {
            let (mean, stderr, k) = summarize(&table[p][mi]);
            rows.push((x, m.name().to_string(), format!("{},{},{k}", num(mean), num(stderr))));
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut w = run.create(run.output())?;
    writeln!(w, "{column},method,overlap_mean,overlap_stderr,n_seeds")?;
    writeln!(w, "{},threshold,NaN,NaN,0", num(threshold.unwrap_or(f64::NAN)))?;
    for (x, m, rest) in rows {
        writeln!(w, "{},{m},{rest}", num(x))?;
    }
    w.flush()?;
    Ok(())
}

fn finish(failed: usize, total: usize) -> Result<()> {
    if failed > 0 {
        return Err(SolverFailure { failed, total }.into());
    }
    Ok(())
}

pub fn detect_sweep(run: &Run) -> Result<()> {
    let cfg = &run.cfg;
    let spec = GraphSpec::from_config(cfg)?;
    if spec.model == Model::Pairwise {
        return Err(config_error("detect runs community models (sbm, dcsbm); use cluster-pairwise for pairwise data"));
    }
    let methods: Vec<DetectMethod> = cfg.list("method")?;
    let epsilons: Vec<f64> = cfg.list("eps")?;
    let specs: Vec<(f64, GraphSpec)> = epsilons.iter().map(|&eps| (eps, GraphSpec { eps, ..spec })).collect();
    let opts = detect_options(cfg)?;
    let (table, failed) = sweep_overlaps(run, &specs, &methods, &opts)?;
    write_sweep(run, "epsilon", &epsilons, &methods, &table, sbm_threshold(spec.c, spec.q).ok())?;
    finish(failed, table.iter().flatten().map(Vec::len).sum())
}

pub fn cluster_pairwise(run: &Run) -> Result<()> {
    let cfg = &run.cfg;
    let spec = GraphSpec::from_config(cfg)?;
    if spec.model != Model::Pairwise {
        return Err(config_error(format!("cluster-pairwise needs model=pairwise, got {:?}", cfg.str("model"))));
    }
    let methods: Vec<DetectMethod> = cfg.list("method")?;
    if let Some(m) = methods.iter().find(|m| !matches!(m, DetectMethod::Adjacency | DetectMethod::BetheHessian | DetectMethod::XLaplacian)) {
        return Err(config_error(format!("method {m} is not defined for pairwise similarities")));
    }
    let cs: Vec<f64> = cfg.list("c")?;
    let specs: Vec<(f64, GraphSpec)> = cs.iter().map(|&c| (c, GraphSpec { c, ..spec })).collect();
    let opts = detect_options(cfg)?;
    let (table, failed) = sweep_overlaps(run, &specs, &methods, &opts)?;
    write_sweep(run, "c", &cs, &methods, &table, pairwise_limit(&spec.pairwise_params()).ok())?;
    finish(failed, table.iter().flatten().map(Vec::len).sum())
}

pub fn complete_sweep(run: &Run) -> Result<()> {
    let cfg = &run.cfg;
    if cfg.str("model") != "completion" {
        return Err(config_error(format!("complete needs model=completion, got {:?}", cfg.str("model"))));
    }
    let methods: Vec<CompletionMethod> = cfg.list("method")?;
    let (n, m, r): (usize, usize, usize) = (cfg.get("n")?, cfg.get("m")?, cfg.get("r")?);
    let cs: Vec<f64> = cfg.list("c")?;
    let (cliques, clique_size): (usize, usize) = (cfg.get("cliques")?, cfg.get("clique_size")?);
    let penalty = match cfg.str("penalty") {
        "ridge" => Penalty::Ridge,
        "proximal" => Penalty::Proximal,
        other => return Err(config_error(format!("penalty {other:?} (expected ridge or proximal)"))),
    };
    let opts = CompletionOptions {
        r_max: cfg.get("r_max")?,
        eta: cfg.get("eta")?,
        delta: cfg.get_auto("delta")?,
        max_steps: cfg.get("max_steps")?,
        als: AlsOptions {
            penalty,
            ..AlsOptions::default()
        },
        ..CompletionOptions::default()
    };
    let base: u64 = cfg.get("seed")?;
    let n_seeds: u64 = cfg.get("n_seeds")?;
    let tasks: Vec<(usize, u64)> = (0..cs.len()).flat_map(|p| (0..n_seeds).map(move |s| (p, base + s))).collect();
    let results: Vec<Vec<std::result::Result<(usize, f64), String>>> = run.pool.install(|| {
        tasks
            .par_iter()
            .map(|&(p, seed)| {
                let inst = gen_completion(n, m, r, cs[p], seed).and_then(|inst| {
                    if cliques > 0 {
                        add_bipartite_cliques(inst, cliques, clique_size, seed.wrapping_add(CLIQUE_STREAM))
                    } else {
                        Ok(inst)
                    }
                });
                let inst = match inst {
                    Ok(inst) => inst,
                    Err(e) => return vec![Err(e.to_string()); methods.len()],
                };
                methods
                    .iter()
                    .map(|&method| complete(&inst, method, &opts).map(|o| (o.estimated_rank, o.rmse(&inst))).map_err(|e| e.to_string()))
                    .collect()
            })
            .collect()
    });
    let mut rows: BTreeMap<(usize, CompletionMethod, u64), String> = BTreeMap::new();
    let mut failed = 0;
    for (&(p, seed), row) in tasks.iter().zip(results) {
        for (&method, res) in methods.iter().zip(row) {
            let cells = match res {
                Ok((rank, e)) => format!("{rank},{},{}", num(e), e < 1e-7),
                Err(e) => {
                    failed += 1;
                    eprintln!("warning: {method} at c = {} seed {seed}: {e}", cs[p]);
                    "NaN,NaN,false".to_string()
                }
            };
            rows.insert((p, method, seed), cells);
        }
    }
    let mut w = run.create(run.output())?;
    writeln!(w, "c,method,estimated_rank,rmse,success")?;
    let mut order: Vec<usize> = (0..cs.len()).collect();
    order.sort_by(|&a, &b| cs[a].total_cmp(&cs[b]));
    for p in order {
        let mut ms = methods.clone();
        ms.sort_by_key(|m| m.name());
        ms.dedup();
        for method in ms {
            for s in 0..n_seeds {
                if let Some(cells) = rows.get(&(p, method, base + s)) {
                    writeln!(w, "{},{method},{cells}", num(cs[p]))?;
                }
            }
        }
    }
    w.flush()?;
    finish(failed, rows.len())
}

pub fn blogs(run: &Run) -> Result<()> {
    let cfg = &run.cfg;
    let path = cfg.path("input").ok_or_else(|| config_error("blogs needs input=<polblogs.gml or edge list>; the dataset is not bundled"))?;
    if !path.exists() {
        return Err(config_error(format!("dataset {} not found", path.display())));
    }
    let gml = match cfg.str("model") {
        "gml" => true,
        "edge-list" => false,
        "auto" => path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gml")),
        other => return Err(config_error(format!("model {other:?} (expected auto, gml or edge-list)"))),
    };
    let (a, raw): (SparseSymMatrix, Vec<i64>) = if gml {
        let g = load_gml(path).map_err(|e| config_error(e.to_string()))?;
        (g.adjacency, g.values)
    } else {
        let g = load_edge_list(path).map_err(|e| config_error(e.to_string()))?;
        let labels_path = cfg.path("labels").ok_or_else(|| config_error("edge-list input needs labels=<file>"))?;
        let labels = read_labels(labels_path).map_err(|e| config_error(e.to_string()))?;
        if labels.len() != g.adjacency.n() {
            return Err(config_error(format!("{} labels for {} nodes", labels.len(), g.adjacency.n())));
        }
        (g.adjacency, labels.into_iter().map(|l| l as i64).collect())
    };
    let nodes = largest_component(&a);
    let sub = induced_subgraph(&a, &nodes)?;
    let mut distinct: Vec<i64> = nodes.iter().map(|&u| raw[u]).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let truth: Vec<usize> = nodes.iter().map(|&u| distinct.binary_search(&raw[u]).expect("value collected above")).collect();
    let q = distinct.len().max(2);
    let mut opts = detect_options(cfg)?;
    opts.kmeans.seed = cfg.get("seed")?;
    let methods: Vec<DetectMethod> = cfg.list("method")?;
    let mut w = run.create(run.output())?;
    writeln!(w, "method,nodes,misclassified")?;
    let size = nodes.len();
    for m in methods {
        let pred = detect(&sub, q, m, Problem::Community, &opts, Some(&truth)).with_context(|| format!("running {m}"))?;
        let ov = overlap(&pred, &truth, q)?;
        let wrong = size - (ov * size as f64).round() as usize;
        writeln!(w, "{m},{size},{wrong}")?;
    }
    w.flush()?;
    Ok(())
}
