use std::fmt;
use std::str::FromStr;

use crate::baselines::{completion_beta, default_rectangular_trim, trim_rectangular, weighted_bethe_hessian};
use crate::error::{contract, Error, Result};
use crate::linalg::{bipartite_embed, top_eigenpairs, EigenOptions, EigenPairs, LinearOperator, SparseMatrix};
use crate::models::CompletionInstance;
use crate::xlap::{learn_regularization, LearningConfig, XLaplacianState};

/// Rank from the largest ratio between consecutive values.
///
/// Returns the `r` in `1..=r_max` maximizing `values[r−1] / values[r]`, where
/// values are clipped below at `10⁻¹² · values[0]`; the first maximizer wins.
/// Returns 0 when every value lies below that floor (or `values[0] ≤ 0`).
pub fn estimate_rank(values: &[f64], r_max: usize) -> Result<usize> {
    if r_max == 0 || values.len() < r_max + 1 {
        return Err(contract(format!("rank estimation up to {r_max} needs {} values, got {}", r_max + 1, values.len())));
    }
    if values.windows(2).any(|w| w[0] < w[1]) {
        return Err(contract("values must be sorted in descending order"));
    }
    if !(values[0] > 0.0) {
        return Ok(0);
    }
    let floor = 1e-12 * values[0];
    let clip = |x: f64| x.max(floor);
    let mut best = (0, f64::NEG_INFINITY);
    for r in 1..=r_max {
        let ratio = clip(values[r - 1]) / clip(values[r]);
        if ratio > best.1 {
            best = (r, ratio);
        }
    }
    Ok(best.0)
}

/// Operator whose spectrum drives rank estimation and initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompletionMethod {
    /// Singular vectors of the matrix with heavy rows and columns removed.
    TrimmedSvd,
    /// Negative eigenvalues of the weighted Bethe Hessian of the bipartite graph.
    BetheHessian,
    /// X-Laplacian learned on the bipartite embedding.
    XLaplacian,
}

impl CompletionMethod {
    pub const ALL: [CompletionMethod; 3] = [CompletionMethod::TrimmedSvd, CompletionMethod::BetheHessian, CompletionMethod::XLaplacian];

    pub fn name(self) -> &'static str {
        match self {
            CompletionMethod::TrimmedSvd => "trimmed-svd",
            CompletionMethod::BetheHessian => "bethe-hessian",
            CompletionMethod::XLaplacian => "xlaplacian",
        }
    }
}

impl fmt::Display for CompletionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompletionMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown completion method {s:?} (expected one of {})", Self::ALL.map(|m| m.name()).join(", ")))
    }
}

/// How ALS treats its quadratic penalty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Penalty {
    /// `λ (‖U‖² + ‖V‖²)`, part of the objective.
    Ridge,
    /// `λ ‖u − u_prev‖²` per row update: keeps unobserved rows fixed and
    /// leaves the minimizers of the unpenalized objective unchanged.
    Proximal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlsOptions {
    pub max_iters: usize,
    /// Stop once a sweep lowers the objective by less than `tol` times its value.
    pub tol: f64,
    pub lambda: f64,
    pub penalty: Penalty,
}

impl Default for AlsOptions {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            tol: 1e-14,
            lambda: 1e-6,
            penalty: Penalty::Ridge,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionResult {
    /// Row-major `n × r`.
    pub u: Vec<f64>,
    /// Row-major `m × r`.
    pub v: Vec<f64>,
    pub r: usize,
    /// Root mean square error against the ground truth over all `n m` entries.
    pub rmse: f64,
    pub iterations: usize,
    /// Objective before the first sweep and after every sweep.
    pub objective_trace: Vec<f64>,
}

/// Root mean square difference between `U Vᵀ` and the true matrix over every entry.
pub fn rmse(inst: &CompletionInstance, u: &[f64], v: &[f64], r: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..inst.n {
        let ui = &u[i * r..(i + 1) * r];
        for j in 0..inst.m {
            let vj = &v[j * r..(j + 1) * r];
            let est: f64 = ui.iter().zip(vj).map(|(a, b)| a * b).sum();
            sum += (est - inst.truth(i, j)).powi(2);
        }
    }
    (sum / (inst.n * inst.m) as f64).sqrt()
}

fn residual_sum(obs: &SparseMatrix, u: &[f64], v: &[f64], r: usize) -> f64 {
    obs.triplets()
        .map(|(i, j, a)| {
            let est: f64 = u[i * r..(i + 1) * r].iter().zip(&v[j * r..(j + 1) * r]).map(|(x, y)| x * y).sum();
            (a - est).powi(2)
        })
        .sum()
}

fn objective(obs: &SparseMatrix, u: &[f64], v: &[f64], r: usize, opts: &AlsOptions) -> f64 {
    let fit = residual_sum(obs, u, v, r);
    match opts.penalty {
        Penalty::Ridge => fit + opts.lambda * (u.iter().map(|x| x * x).sum::<f64>() + v.iter().map(|x| x * x).sum::<f64>()),
        Penalty::Proximal => fit,
    }
}

/// Solves the `r × r` symmetric positive definite system `g x = b` in place.
fn cholesky_solve(g: &mut [f64], b: &mut [f64], r: usize) -> Result<()> {
    for j in 0..r {
        let mut d = g[j * r + j];
        for k in 0..j {
            d -= g[j * r + k] * g[j * r + k];
        }
        if !(d > 0.0) {
            return Err(Error::Numerical("normal equations are not positive definite".into()));
        }
        let d = d.sqrt();
        g[j * r + j] = d;
        for i in j + 1..r {
            let mut s = g[i * r + j];
            for k in 0..j {
                s -= g[i * r + k] * g[j * r + k];
            }
            g[i * r + j] = s / d;
        }
    }
    for i in 0..r {
        let mut s = b[i];
        for k in 0..i {
            s -= g[i * r + k] * b[k];
        }
        b[i] = s / g[i * r + i];
    }
    for i in (0..r).rev() {
        let mut s = b[i];
        for k in i + 1..r {
            s -= g[k * r + i] * b[k];
        }
        b[i] = s / g[i * r + i];
    }
    Ok(())
}

/// Exact minimization over every row of `x` with `y` fixed, rows of `x`
/// indexing the rows of `obs`.
fn update_rows(obs: &SparseMatrix, x: &mut [f64], y: &[f64], r: usize, opts: &AlsOptions) -> Result<()> {
    let mut g = vec![0.0; r * r];
    let mut b = vec![0.0; r];
    for i in 0..obs.rows() {
        g.iter_mut().for_each(|e| *e = 0.0);
        b.iter_mut().for_each(|e| *e = 0.0);
        let (cols, vals) = obs.row(i);
        for (&j, &a) in cols.iter().zip(vals) {
            let yj = &y[j * r..(j + 1) * r];
            for p in 0..r {
                b[p] += a * yj[p];
                for q in 0..=p {
                    g[p * r + q] += yj[p] * yj[q];
                }
            }
        }
        for p in 0..r {
            g[p * r + p] += opts.lambda;
            if opts.penalty == Penalty::Proximal {
                b[p] += opts.lambda * x[i * r + p];
            }
            for q in 0..p {
                g[q * r + p] = g[p * r + q];
            }
        }
        cholesky_solve(&mut g, &mut b, r)?;
        x[i * r..(i + 1) * r].copy_from_slice(&b);
    }
    Ok(())
}

/// Alternating least squares on the revealed entries from the starting
/// factors `init = (U₀, V₀)` (row-major `n × r` and `m × r`).
pub fn als_complete(inst: &CompletionInstance, r: usize, init: (Vec<f64>, Vec<f64>), opts: &AlsOptions) -> Result<CompletionResult> {
    let (mut u, mut v) = init;
    if r == 0 || u.len() != inst.n * r || v.len() != inst.m * r {
        return Err(contract(format!("initial factors do not have shapes {}x{r} and {}x{r}", inst.n, inst.m)));
    }
    if !(opts.lambda > 0.0) {
        return Err(contract("ALS needs a positive penalty weight"));
    }
    let obs = &inst.observed;
    let obs_t = obs.transpose();
    let mut trace = vec![objective(obs, &u, &v, r, opts)];
    let mut iterations = 0;
    while iterations < opts.max_iters {
        update_rows(obs, &mut u, &v, r, opts)?;
        update_rows(&obs_t, &mut v, &u, r, opts)?;
        iterations += 1;
        let f = objective(obs, &u, &v, r, opts);
        if !f.is_finite() {
            return Err(Error::Numerical(format!("ALS objective became {f} at sweep {iterations}")));
        }
        let prev = *trace.last().expect("trace starts non-empty");
        trace.push(f);
        if prev - f <= opts.tol * prev {
            break;
        }
    }
    Ok(CompletionResult {
        rmse: rmse(inst, &u, &v, r),
        u,
        v,
        r,
        iterations,
        objective_trace: trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionOptions {
    /// Largest rank considered by the estimator.
    pub r_max: usize,
    pub eigen: EigenOptions,
    pub eta: f64,
    /// IPR threshold for the X-Laplacian; `None` means `5/(n + m)`.
    pub delta: Option<f64>,
    pub max_steps: usize,
    /// Row and column trimming thresholds; `None` means three times the means.
    pub trim: Option<(usize, usize)>,
    pub als: AlsOptions,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        Self {
            r_max: 5,
            eigen: EigenOptions::default(),
            eta: 10.0,
            delta: None,
            max_steps: 5000,
            trim: None,
            als: AlsOptions {
                penalty: Penalty::Proximal,
                ..AlsOptions::default()
            },
        }
    }
}

/// Leading spectrum of a completion operator on the bipartite embedding.
#[derive(Debug, Clone)]
pub struct CompletionSpectrum {
    pub method: CompletionMethod,
    /// Top eigenpairs (for the Bethe Hessian: of its negation, so the most
    /// negative eigenvalues come first with flipped sign).
    pub pairs: EigenPairs,
    /// The learned state for [`CompletionMethod::XLaplacian`].
    pub xlap: Option<XLaplacianState>,
}

impl CompletionSpectrum {
    /// Estimated rank, at most `r_max`.
    pub fn estimated_rank(&self, r_max: usize) -> Result<usize> {
        match self.method {
            CompletionMethod::BetheHessian => Ok(self.pairs.values.iter().filter(|&&x| x > 0.0).count().min(r_max)),
            _ => estimate_rank(&self.pairs.values, r_max),
        }
    }
}

/// Computes the `r_max + 1` leading eigenpairs of the chosen operator.
pub fn completion_spectrum(observed: &SparseMatrix, method: CompletionMethod, opts: &CompletionOptions) -> Result<CompletionSpectrum> {
    if observed.nnz() == 0 {
        return Err(contract("no revealed entries"));
    }
    let dim = observed.rows() + observed.cols();
    let k = (opts.r_max + 1).min(dim);
    match method {
        CompletionMethod::TrimmedSvd => {
            let (tr, tc) = opts.trim.unwrap_or_else(|| default_rectangular_trim(observed));
            let trimmed = trim_rectangular(observed, tr, tc)?;
            let pairs = top_eigenpairs(&LinearOperator::new(bipartite_embed(&trimmed)?), k, &opts.eigen, None)?;
            Ok(CompletionSpectrum { method, pairs, xlap: None })
        }
        CompletionMethod::BetheHessian => {
            let b = bipartite_embed(observed)?;
            let beta = completion_beta(&b)?.ok_or_else(|| Error::Infeasible("no inverse temperature satisfies the Bethe condition".into()))?;
            let h = weighted_bethe_hessian(&b, |w| beta * w);
            let pairs = top_eigenpairs(&h.negated(), k, &opts.eigen, None)?;
            Ok(CompletionSpectrum { method, pairs, xlap: None })
        }
        CompletionMethod::XLaplacian => {
            let b = LinearOperator::new(bipartite_embed(observed)?);
            let mut cfg = LearningConfig::new(k, dim).with_eta(opts.eta).with_max_steps(opts.max_steps).with_eigen(opts.eigen);
            if let Some(d) = opts.delta {
                cfg = cfg.with_delta(d);
            }
            let state = learn_regularization(&b, &cfg)?;
            Ok(CompletionSpectrum {
                method,
                pairs: state.pairs.clone(),
                xlap: Some(state),
            })
        }
    }
}

/// Starting factors from the `r` leading vectors of `spectrum`.
///
/// Each bipartite eigenvector is split into its row block `a` and column block
/// `b` (normalized); `σ = aᵀ A b` estimates the matching singular value of the
/// observed matrix, and the factors get columns `√(|σ|/p) a` and
/// `sign(σ) √(|σ|/p) b`, with `p` the revealed fraction compensating for the
/// unobserved entries.
pub fn spectral_init(observed: &SparseMatrix, spectrum: &CompletionSpectrum, r: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (n, m) = (observed.rows(), observed.cols());
    if r == 0 || r > spectrum.pairs.len() {
        return Err(contract(format!("initialization of rank {r} from {} vectors", spectrum.pairs.len())));
    }
    if observed.nnz() == 0 {
        return Err(contract("no revealed entries"));
    }
    let p = observed.nnz() as f64 / (n * m) as f64;
    let mut u = vec![0.0; n * r];
    let mut v = vec![0.0; m * r];
    for k in 0..r {
        let x = &spectrum.pairs.vectors[k];
        let mut a = x[..n].to_vec();
        let mut b = x[n..].to_vec();
        for block in [&mut a, &mut b] {
            let nb = crate::linalg::norm(block);
            if nb > 0.0 {
                block.iter_mut().for_each(|e| *e /= nb);
            }
        }
        let sigma: f64 = observed.triplets().map(|(i, j, w)| a[i] * w * b[j]).sum();
        let s = (sigma.abs() / p).sqrt();
        let sign = if sigma < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            u[i * r + k] = s * a[i];
        }
        for j in 0..m {
            v[j * r + k] = sign * s * b[j];
        }
    }
    Ok((u, v))
}

/// Everything one completion run produces.
#[derive(Debug, Clone)]
pub struct CompletionOutcome {
    pub spectrum: CompletionSpectrum,
    pub estimated_rank: usize,
    /// `None` when the estimated rank is zero.
    pub result: Option<CompletionResult>,
}

impl CompletionOutcome {
    /// Full-matrix RMSE, or the RMSE of the zero matrix for rank 0.
    pub fn rmse(&self, inst: &CompletionInstance) -> f64 {
        match &self.result {
            Some(res) => res.rmse,
            None => rmse(inst, &vec![0.0; inst.n], &vec![0.0; inst.m], 1),
        }
    }
}

/// Rank estimation, spectral initialization and ALS with one operator.
pub fn complete(inst: &CompletionInstance, method: CompletionMethod, opts: &CompletionOptions) -> Result<CompletionOutcome> {
    let spectrum = completion_spectrum(&inst.observed, method, opts)?;
    let estimated_rank = spectrum.estimated_rank(opts.r_max)?;
    if estimated_rank == 0 {
        return Ok(CompletionOutcome {
            spectrum,
            estimated_rank,
            result: None,
        });
    }
    let init = spectral_init(&inst.observed, &spectrum, estimated_rank)?;
    let result = als_complete(inst, estimated_rank, init, &opts.als)?;
    Ok(CompletionOutcome {
        spectrum,
        estimated_rank,
        result: Some(result),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::gen_completion;

    #[test]
    fn rank_examples() {
        assert_eq!(estimate_rank(&[10.0, 9.0, 0.1, 0.09], 3).unwrap(), 2);
        assert_eq!(estimate_rank(&[5.0, 4.0, 3.0, 0.0, 0.0], 4).unwrap(), 3);
        assert_eq!(estimate_rank(&[0.0, 0.0, 0.0], 2).unwrap(), 0);
        assert!(estimate_rank(&[1.0, 0.5], 2).is_err());
        assert!(estimate_rank(&[1.0, 2.0, 0.5], 2).is_err());
    }

    #[test]
    fn cholesky_matches_direct_solution() {
        let mut g = vec![4.0, 2.0, 2.0, 3.0];
        let mut b = vec![2.0, 1.0];
        cholesky_solve(&mut g, &mut b, 2).unwrap();
        // [[4,2],[2,3]] x = [2,1] → x = [0.5, 0].
        assert!((b[0] - 0.5).abs() < 1e-15 && b[1].abs() < 1e-15);
    }

    fn fully_revealed(n: usize, m: usize, r: usize, seed: u64) -> CompletionInstance {
        gen_completion(n, m, r, ((n * m) as f64).sqrt(), seed).unwrap()
    }

    #[test]
    fn rank_one_exact_initialization() {
        let inst = fully_revealed(12, 9, 1, 1);
        let spec = completion_spectrum(&inst.observed, CompletionMethod::TrimmedSvd, &CompletionOptions { trim: Some((100, 100)), ..Default::default() }).unwrap();
        let (u, v) = spectral_init(&inst.observed, &spec, 1).unwrap();
        let err = rmse(&inst, &u, &v, 1);
        let scale = rmse(&inst, &vec![0.0; 12], &vec![0.0; 9], 1);
        assert!(err <= 1e-6 * scale, "{err}");
    }

    #[test]
    fn als_from_exact_start_converges_quickly() {
        let inst = fully_revealed(10, 8, 1, 2);
        let u: Vec<f64> = inst.u_true.clone();
        let v: Vec<f64> = inst.v_true.clone();
        let opts = AlsOptions {
            penalty: Penalty::Proximal,
            ..Default::default()
        };
        let res = als_complete(&inst, 1, (u, v), &opts).unwrap();
        assert!(res.rmse < 1e-10);
        assert!(res.iterations <= 3);
    }

    #[test]
    fn objective_never_increases() {
        let inst = gen_completion(60, 50, 2, 8.0, 3).unwrap();
        let spec = completion_spectrum(&inst.observed, CompletionMethod::TrimmedSvd, &CompletionOptions::default()).unwrap();
        let init = spectral_init(&inst.observed, &spec, 2).unwrap();
        for penalty in [Penalty::Ridge, Penalty::Proximal] {
            let res = als_complete(&inst, 2, init.clone(), &AlsOptions { penalty, max_iters: 200, ..Default::default() }).unwrap();
            for w in res.objective_trace.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12), "{penalty:?}: {} > {}", w[1], w[0]);
            }
        }
    }

    #[test]
    fn empty_observation_is_rejected() {
        let inst = CompletionInstance::from_factors(3, 3, 1, vec![1.0; 3], vec![1.0; 3], []).unwrap();
        assert!(completion_spectrum(&inst.observed, CompletionMethod::TrimmedSvd, &CompletionOptions::default()).is_err());
    }
}
