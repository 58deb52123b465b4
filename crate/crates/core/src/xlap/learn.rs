use std::io::{BufRead, Write};
use std::path::Path;

use super::{ipr, select_most_localized};
use crate::error::{contract, Error, Result};
use crate::linalg::{top_eigenpairs_guarded, EigenOptions, EigenPairs, LinearOperator};

/// Extra Ritz pairs carried beyond `q` (without waiting for them to converge);
/// they keep the warm start space wide enough that an eigenvalue rising into
/// the top `q` is already represented.
const GUARD_PAIRS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningConfig {
    /// Number of leading eigenvectors that must be delocalized.
    pub q: usize,
    /// Learning rate η.
    pub eta: f64,
    /// IPR threshold Δ below which a vector counts as delocalized.
    pub delta: f64,
    pub max_steps: usize,
    pub eigen: EigenOptions,
}

impl LearningConfig {
    /// Defaults for an `n`-dimensional operator: η = 10, Δ = 5/n, 500 steps.
    pub fn new(q: usize, n: usize) -> Self {
        Self {
            q,
            eta: 10.0,
            delta: 5.0 / n as f64,
            max_steps: 500,
            eigen: EigenOptions::default(),
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn with_eigen(mut self, eigen: EigenOptions) -> Self {
        self.eigen = eigen;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.eta > 0.0) {
            return Err(contract(format!("learning rate must be positive, got {}", self.eta)));
        }
        if !(self.delta > 1.0 / n as f64 && self.delta <= 1.0) {
            return Err(contract(format!("threshold {} outside (1/n, 1] for n = {n}", self.delta)));
        }
        if self.q == 0 || self.q > n {
            return Err(contract(format!("q = {} invalid for n = {n}", self.q)));
        }
        Ok(())
    }
}

/// One update of the learning loop.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Rank (0-based) of the selected vector among the leading `q`.
    pub selected: usize,
    pub selected_ipr: f64,
    pub eigenvalues: Vec<f64>,
    pub iprs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct XLaplacianState {
    pub base: LinearOperator,
    /// The learned diagonal X; every entry is ≤ 0.
    pub x_diag: Vec<f64>,
    pub steps: usize,
    pub trajectory: Vec<StepRecord>,
    pub converged: bool,
    /// Leading `q` eigenpairs of the final `base + diag(X)`.
    pub pairs: EigenPairs,
    pub eta: f64,
    pub delta: f64,
}

impl XLaplacianState {
    /// `L_X = base + diag(X)`.
    pub fn operator(&self) -> LinearOperator {
        self.base
            .with_added_diag(&self.x_diag)
            .expect("learned diagonal matches base dimension")
    }

    pub fn trace(&self) -> f64 {
        self.x_diag.iter().sum()
    }

    pub fn write_diag<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "xlap-diag {} {} {:?} {:?} {}",
            self.x_diag.len(),
            self.steps,
            self.eta,
            self.delta,
            self.converged
        )?;
        for x in &self.x_diag {
            writeln!(w, "{x:?}")?;
        }
        Ok(())
    }
}

/// Header fields and values of a serialized learned diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnedDiag {
    pub steps: usize,
    pub eta: f64,
    pub delta: f64,
    pub converged: bool,
    pub x_diag: Vec<f64>,
}

impl LearnedDiag {
    pub fn read(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        // Leading `#` lines are free-form commentary.
        let mut lines = file.lines().enumerate().skip_while(|(_, l)| l.as_ref().is_ok_and(|l| l.starts_with('#')));
        let (h, header) = lines.next().ok_or_else(|| err(1, "no header line".into()))?;
        let (h, header) = (h + 1, header?);
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 6 || fields[0] != "xlap-diag" {
            return Err(err(h, format!("bad header {header:?}")));
        }
        let n: usize = fields[1].parse().map_err(|e| err(h, format!("bad n: {e}")))?;
        let steps = fields[2].parse().map_err(|e| err(h, format!("bad steps: {e}")))?;
        let eta = fields[3].parse().map_err(|e| err(h, format!("bad eta: {e}")))?;
        let delta = fields[4].parse().map_err(|e| err(h, format!("bad delta: {e}")))?;
        let converged = fields[5].parse().map_err(|e| err(h, format!("bad converged flag: {e}")))?;
        let mut x_diag = Vec::with_capacity(n);
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            x_diag.push(line.trim().parse().map_err(|e| err(idx + 1, format!("bad value: {e}")))?);
        }
        if x_diag.len() != n {
            return Err(err(0, format!("header declares {n} values, found {}", x_diag.len())));
        }
        Ok(Self {
            steps,
            eta,
            delta,
            converged,
            x_diag,
        })
    }
}

/// Learns the diagonal regularization X for `a`.
///
/// Each step solves the leading eigenpairs of `a + diag(X)` (warm-started from
/// the previous step), picks the most localized vector `v` and, unless its IPR
/// is already below `delta`, subtracts `eta * v_i²` from every `X_ii`.
pub fn learn_regularization(a: &LinearOperator, cfg: &LearningConfig) -> Result<XLaplacianState> {
    let n = a.dim();
    cfg.validate(n)?;
    let mut x_diag = vec![0.0; n];
    let mut trajectory = Vec::new();
    let mut warm: Option<EigenPairs> = None;
    let mut steps = 0;
    loop {
        let op = a.with_added_diag(&x_diag)?;
        let solved = top_eigenpairs_guarded(&op, cfg.q, GUARD_PAIRS, &cfg.eigen, warm.as_ref()).map_err(|e| Error::Learning {
            step: steps,
            source: Box::new(e),
        })?;
        let top = solved.truncated(cfg.q);
        let iprs = top.vectors.iter().map(|v| ipr(v)).collect::<Result<Vec<_>>>()?;
        let (selected, v) = select_most_localized(&top)?;
        let selected_ipr = iprs[selected];
        let converged = selected_ipr < cfg.delta;
        if converged || steps == cfg.max_steps {
            return Ok(XLaplacianState {
                base: a.clone(),
                x_diag,
                steps,
                trajectory,
                converged,
                pairs: top,
                eta: cfg.eta,
                delta: cfg.delta,
            });
        }
        for (x, vi) in x_diag.iter_mut().zip(v) {
            *x -= cfg.eta * vi * vi;
        }
        trajectory.push(StepRecord {
            selected,
            selected_ipr,
            eigenvalues: top.values.clone(),
            iprs,
        });
        steps += 1;
        warm = Some(solved);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseSymMatrix;

    fn cycle(n: usize) -> SparseSymMatrix {
        SparseSymMatrix::from_undirected(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    fn star(leaves: usize) -> SparseSymMatrix {
        SparseSymMatrix::from_undirected(leaves + 1, (1..=leaves).map(|i| (0, i, 1.0))).unwrap()
    }

    #[test]
    fn cycle_is_already_delocalized() {
        let op = LinearOperator::new(cycle(20));
        let state = learn_regularization(&op, &LearningConfig::new(2, 20)).unwrap();
        assert!(state.converged);
        assert_eq!(state.steps, 0);
        assert!(state.trajectory.is_empty());
        assert!(state.x_diag.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn config_validation() {
        assert!(LearningConfig::new(2, 10).with_eta(0.0).validate(10).is_err());
        assert!(LearningConfig::new(2, 10).with_delta(0.1).validate(10).is_err());
        assert!(LearningConfig::new(2, 10).with_delta(1.5).validate(10).is_err());
        assert!(LearningConfig::new(0, 10).validate(10).is_err());
        assert!(LearningConfig::new(2, 10).validate(10).is_ok());
    }

    #[test]
    fn star_hub_is_suppressed_and_trace_tracks_steps() {
        // Two disjoint stars glued to a cycle: the hub vectors are localized.
        let n = 60;
        let mut edges: Vec<(usize, usize, f64)> = (0..40).map(|i| (i, (i + 1) % 40, 1.0)).collect();
        edges.extend((41..50).map(|i| (40, i, 1.0)));
        edges.extend((51..60).map(|i| (50, i, 1.0)));
        edges.push((0, 40, 1.0));
        edges.push((20, 50, 1.0));
        let a = SparseSymMatrix::from_undirected(n, edges).unwrap();
        let cfg = LearningConfig::new(2, n).with_eta(1.0).with_delta(0.05);
        let state = learn_regularization(&LinearOperator::new(a), &cfg).unwrap();
        assert!(state.steps > 0);
        assert_eq!(state.trajectory.len(), state.steps);
        let expect = -cfg.eta * state.steps as f64;
        assert!((state.trace() - expect).abs() <= 1e-9 * cfg.eta * state.steps as f64);
        assert!(state.x_diag.iter().all(|&x| x <= 0.0));
        assert!(state.x_diag[40] < -0.1 && state.x_diag[50] < -0.1);
        assert!(state.trajectory.iter().all(|r| r.selected_ipr >= cfg.delta));
        if state.converged {
            for v in &state.pairs.vectors {
                assert!(ipr(v).unwrap() < cfg.delta);
            }
        }
    }

    #[test]
    fn step_cap_reports_unconverged() {
        let a = star(30);
        let cfg = LearningConfig::new(1, 31).with_eta(0.01).with_max_steps(3);
        let state = learn_regularization(&LinearOperator::new(a), &cfg).unwrap();
        assert!(!state.converged);
        assert_eq!(state.steps, 3);
        assert_eq!(state.trajectory.len(), 3);
    }

    #[test]
    fn diag_file_round_trip() {
        let a = star(12);
        let cfg = LearningConfig::new(1, 13).with_eta(0.5).with_max_steps(4);
        let state = learn_regularization(&LinearOperator::new(a), &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.txt");
        state.write_diag(std::fs::File::create(&path).unwrap()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(&format!("xlap-diag 13 {} 0.5 ", state.steps)));
        let back = LearnedDiag::read(&path).unwrap();
        assert_eq!(back.x_diag, state.x_diag);
        assert_eq!(back.steps, state.steps);
        assert_eq!(back.converged, state.converged);

        let commented = dir.path().join("y.txt");
        std::fs::write(&commented, format!("# produced by a test\n# eta = 0.5\n{text}")).unwrap();
        assert_eq!(LearnedDiag::read(&commented).unwrap().x_diag, state.x_diag);
        std::fs::write(&commented, "# only commentary\n").unwrap();
        assert!(LearnedDiag::read(&commented).is_err());
    }
}
