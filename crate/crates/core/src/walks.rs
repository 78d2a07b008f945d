//! Transition matrices and stationary distributions for the three walks.
//!
//! * TURW: `p_ij = a_ij / d_i`
//! * MERW: `p_ij = a_ij psi_j / (lambda_1 psi_i)` with `(lambda_1, psi)` the
//!   Perron pair of `A`
//! * NBCRW: `p_ij = a_ij x_j / sum_k a_ik x_k` with `x` the non-backtracking
//!   centrality
//!
//! All three are reversible, so detailed balance is a cheap global check.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{require_connected, Graph};
use crate::linalg::solve;
use crate::nb::{nb_centrality, NbCentrality};
use crate::spectral::{sym_eig, SpectralDecomposition, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkKind {
    Turw,
    Merw,
    Nbcrw,
}

impl WalkKind {
    pub const ALL: [WalkKind; 3] = [WalkKind::Turw, WalkKind::Merw, WalkKind::Nbcrw];

    pub fn as_str(self) -> &'static str {
        match self {
            WalkKind::Turw => "turw",
            WalkKind::Merw => "merw",
            WalkKind::Nbcrw => "nbcrw",
        }
    }
}

impl fmt::Display for WalkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WalkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "turw" => Ok(WalkKind::Turw),
            "merw" => Ok(WalkKind::Merw),
            "nbcrw" => Ok(WalkKind::Nbcrw),
            other => Err(Error::InvalidParams(format!("unknown walk kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkOptions {
    pub tol: f64,
    /// NBCRW only: replace `x` by `x + delta` before weighting. Not part of
    /// the walk's definition; lets graphs with vanishing centrality through.
    pub regularize: Option<f64>,
}

impl Default for WalkOptions {
    fn default() -> Self {
        WalkOptions { tol: DEFAULT_TOL, regularize: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub kind: WalkKind,
    pub p: DMatrix<f64>,
    pub fingerprint: u64,
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    /// `max_i |sum_j p_ij - 1|`.
    pub fn row_sum_error(&self) -> f64 {
        (0..self.n()).map(|i| (self.p.row(i).sum() - 1.0).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StationaryMethod {
    ClosedForm,
    Power,
    LinearSolve,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryDistribution {
    pub kind: WalkKind,
    pub pi: Vec<f64>,
    pub method: StationaryMethod,
}

impl StationaryDistribution {
    /// `||pi P - pi||_inf`.
    pub fn balance_residual(&self, p: &TransitionMatrix) -> f64 {
        let n = self.pi.len();
        (0..n)
            .map(|j| {
                let s: f64 = (0..n).map(|i| self.pi[i] * p.p[(i, j)]).sum();
                (s - self.pi[j]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Perron pair of the adjacency matrix plus the full spectrum it came from.
#[derive(Debug, Clone)]
pub struct Perron {
    pub lambda1: f64,
    /// Strictly positive, unit 2-norm.
    pub psi1: Vec<f64>,
    pub spectrum: SpectralDecomposition,
}

pub fn perron(g: &Graph, tol: f64) -> Result<Perron> {
    require_connected(g)?;
    let spectrum = sym_eig(&g.adjacency(), tol)?;
    let n = g.n();
    let lambda1 = spectrum.values[n - 1];
    let psi1: Vec<f64> = spectrum.vectors.column(n - 1).iter().copied().collect();
    if psi1.iter().any(|&v| v <= 0.0) {
        return Err(Error::ConvergenceFailure { iterations: 0, residual: f64::NAN });
    }
    Ok(Perron { lambda1, psi1, spectrum })
}

fn no_isolated(g: &Graph) -> Result<()> {
    match (0..g.n()).find(|&i| g.degree(i) == 0) {
        Some(node) => Err(Error::IsolatedNode { node }),
        None => Ok(()),
    }
}

/// Row-normalised `a_ij score_j`; errors on rows whose neighbourhood score
/// is at most `1e-12` of the largest one.
fn score_biased(g: &Graph, kind: WalkKind, score: &[f64]) -> Result<TransitionMatrix> {
    let n = g.n();
    let denom: Vec<f64> = (0..n).map(|i| g.neighbors(i).iter().map(|&k| score[k]).sum()).collect();
    let max = denom.iter().copied().fold(0.0, f64::max);
    if let Some(node) = denom.iter().position(|&d| d <= 1e-12 * max || d == 0.0) {
        return Err(Error::ZeroDenominator { node });
    }
    let mut p = DMatrix::zeros(n, n);
    for i in 0..n {
        for &j in g.neighbors(i) {
            p[(i, j)] = score[j] / denom[i];
        }
    }
    Ok(TransitionMatrix { kind, p, fingerprint: g.fingerprint() })
}

pub fn turw_transition(g: &Graph) -> Result<TransitionMatrix> {
    no_isolated(g)?;
    let n = g.n();
    let mut p = DMatrix::zeros(n, n);
    for i in 0..n {
        let d = g.degree(i) as f64;
        for &j in g.neighbors(i) {
            p[(i, j)] = 1.0 / d;
        }
    }
    Ok(TransitionMatrix { kind: WalkKind::Turw, p, fingerprint: g.fingerprint() })
}

pub fn merw_transition(g: &Graph, tol: f64) -> Result<TransitionMatrix> {
    merw_transition_from(g, &perron(g, tol)?)
}

/// Uses `sum_k a_ik psi_k` for the row normaliser, which equals
/// `lambda_1 psi_i` up to eigen-solver error but keeps rows stochastic to
/// machine precision even where `psi_i` is tiny.
pub fn merw_transition_from(g: &Graph, perron: &Perron) -> Result<TransitionMatrix> {
    score_biased(g, WalkKind::Merw, &perron.psi1)
}

pub fn nbcrw_transition(g: &Graph, opts: WalkOptions) -> Result<TransitionMatrix> {
    let c = nb_centrality(g, opts.tol)?;
    nbcrw_transition_from(g, &c, opts.regularize)
}

pub fn nbcrw_transition_from(g: &Graph, c: &NbCentrality, regularize: Option<f64>) -> Result<TransitionMatrix> {
    let x = effective_centrality(c, regularize)?;
    score_biased(g, WalkKind::Nbcrw, &x)
}

pub(crate) fn effective_centrality(c: &NbCentrality, regularize: Option<f64>) -> Result<Vec<f64>> {
    match regularize {
        None => Ok(c.x.clone()),
        Some(delta) if delta > 0.0 && delta.is_finite() => Ok(c.x.iter().map(|x| x + delta).collect()),
        Some(delta) => Err(Error::InvalidParams(format!("regularisation must be positive, got {delta}"))),
    }
}

pub fn transition(kind: WalkKind, g: &Graph, opts: WalkOptions) -> Result<TransitionMatrix> {
    match kind {
        WalkKind::Turw => turw_transition(g),
        WalkKind::Merw => merw_transition(g, opts.tol),
        WalkKind::Nbcrw => nbcrw_transition(g, opts),
    }
}

/// `pi_i = d_i / 2E`.
pub fn stationary_turw(g: &Graph) -> Result<StationaryDistribution> {
    no_isolated(g)?;
    let two_e = 2.0 * g.edge_count() as f64;
    let pi = (0..g.n()).map(|i| g.degree(i) as f64 / two_e).collect();
    Ok(StationaryDistribution { kind: WalkKind::Turw, pi, method: StationaryMethod::ClosedForm })
}

/// `pi_i = psi_{1i}^2`.
pub fn stationary_merw_from(perron: &Perron) -> StationaryDistribution {
    let pi = perron.psi1.iter().map(|v| v * v).collect();
    StationaryDistribution { kind: WalkKind::Merw, pi, method: StationaryMethod::ClosedForm }
}

/// `pi_i = ((kappa^2 - 1)/kappa + d_i/kappa) x_i^2 / Q`.
///
/// With regularisation the eigen-relation behind that form no longer holds;
/// the strength form `pi_i = s_i / s` of the weighted network is used instead
/// (identical to the above when `delta` is absent).
pub fn stationary_nbcrw_from(g: &Graph, c: &NbCentrality, regularize: Option<f64>) -> Result<StationaryDistribution> {
    let n = g.n();
    let raw: Vec<f64> = match regularize {
        None => {
            let k = c.kappa;
            (0..n)
                .map(|i| ((k * k - 1.0) / k + g.degree(i) as f64 / k) * c.x[i] * c.x[i])
                .collect()
        }
        Some(_) => {
            let x = effective_centrality(c, regularize)?;
            (0..n)
                .map(|i| x[i] * g.neighbors(i).iter().map(|&k| x[k]).sum::<f64>())
                .collect()
        }
    };
    let q: f64 = raw.iter().sum();
    if !(q > 0.0) {
        return Err(Error::ZeroDenominator { node: 0 });
    }
    let pi = raw.iter().map(|r| r / q).collect();
    Ok(StationaryDistribution { kind: WalkKind::Nbcrw, pi, method: StationaryMethod::ClosedForm })
}

pub fn stationary_closed(kind: WalkKind, g: &Graph, opts: WalkOptions) -> Result<StationaryDistribution> {
    match kind {
        WalkKind::Turw => stationary_turw(g),
        WalkKind::Merw => Ok(stationary_merw_from(&perron(g, opts.tol)?)),
        WalkKind::Nbcrw => stationary_nbcrw_from(g, &nb_centrality(g, opts.tol)?, opts.regularize),
    }
}

/// Solves `pi (P - I) = 0, sum pi = 1` directly.
///
/// The last balance equation is redundant for an irreducible chain and is
/// replaced by the normalisation row.
pub fn stationary_generic(p: &TransitionMatrix) -> Result<StationaryDistribution> {
    let n = p.n();
    let mut sys = p.p.transpose();
    for i in 0..n {
        sys[(i, i)] -= 1.0;
    }
    for j in 0..n {
        sys[(n - 1, j)] = 1.0;
    }
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = 1.0;
    let pi = solve(&sys, &rhs)?;
    Ok(StationaryDistribution { kind: p.kind, pi, method: StationaryMethod::LinearSolve })
}

/// Power iteration on the lazy chain `(I + P)/2`, which has the same
/// stationary vector and no periodicity.
pub fn stationary_power(p: &TransitionMatrix, tol: f64, max_iter: usize) -> Result<StationaryDistribution> {
    let n = p.n();
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for it in 1..=max_iter {
        for (j, slot) in next.iter_mut().enumerate() {
            let s: f64 = (0..n).map(|i| pi[i] * p.p[(i, j)]).sum();
            *slot = 0.5 * (pi[j] + s);
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        let delta = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut pi, &mut next);
        if delta <= tol {
            return Ok(StationaryDistribution { kind: p.kind, pi, method: StationaryMethod::Power });
        }
        if it == max_iter {
            return Err(Error::ConvergenceFailure { iterations: it, residual: delta });
        }
    }
    Err(Error::ConvergenceFailure { iterations: 0, residual: f64::NAN })
}

/// `max_{i,j} |pi_i p_ij - pi_j p_ji|`.
pub fn detailed_balance_residual(pi: &[f64], p: &TransitionMatrix) -> f64 {
    let n = pi.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((pi[i] * p.p[(i, j)] - pi[j] * p.p[(j, i)]).abs());
        }
    }
    worst
}

/// Inverse participation ratio `sum_i pi_i^2`.
pub fn ipr(pi: &[f64]) -> f64 {
    pi.iter().map(|p| p * p).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_rose, RoseSpec};

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                e.push((i, j));
            }
        }
        Graph::from_edges(n, &e).unwrap()
    }

    fn star(leaves: usize) -> Graph {
        let e: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &e).unwrap()
    }

    fn rose2() -> Graph {
        make_rose(RoseSpec { m: 2, l: 4 }).unwrap()
    }

    #[test]
    fn turw_rows() {
        let p = turw_transition(&complete(3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p.p[(i, j)], if i == j { 0.0 } else { 0.5 });
            }
        }
        let s = turw_transition(&star(3)).unwrap();
        assert_eq!(s.p.row(0).iter().copied().collect::<Vec<_>>(), vec![0.0, 1. / 3., 1. / 3., 1. / 3.]);
        let r = turw_transition(&rose2()).unwrap();
        for &j in &[1, 2, 4, 5] {
            assert_eq!(r.p[(0, j)], 0.25);
        }
    }

    #[test]
    fn isolated_node_rejected() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(turw_transition(&g), Err(Error::IsolatedNode { node: 2 }));
    }

    #[test]
    fn merw_on_rose_and_star() {
        let p = merw_transition(&rose2(), 1e-12).unwrap();
        assert!((p.p[(1, 0)] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p.p[(1, 3)] - 1.0 / 3.0).abs() < 1e-12);
        let s = merw_transition(&star(3), 1e-12).unwrap();
        assert_eq!(s.p[(2, 0)], 1.0);
        assert!(s.row_sum_error() <= 1e-12);
    }

    #[test]
    fn nbcrw_on_rose() {
        let p = nbcrw_transition(&rose2(), WalkOptions::default()).unwrap();
        let want = 2.0 / (2.0 + 3f64.sqrt());
        assert!((p.p[(1, 0)] - want).abs() < 1e-12);
        assert!((p.p[(3, 1)] - 0.5).abs() < 1e-12);
        assert!((p.p[(3, 2)] - 0.5).abs() < 1e-12);
        assert!(p.row_sum_error() <= 1e-12);
    }

    #[test]
    fn regular_graphs_collapse_to_turw() {
        let g = complete(5);
        let t = turw_transition(&g).unwrap();
        let m = merw_transition(&g, 1e-12).unwrap();
        let b = nbcrw_transition(&g, WalkOptions::default()).unwrap();
        assert!((&t.p - &m.p).amax() <= 1e-9);
        assert!((&t.p - &b.p).amax() <= 1e-9);
    }

    #[test]
    fn scale_invariance_of_nbcrw() {
        let g = rose2();
        let c = nb_centrality(&g, 1e-12).unwrap();
        let base = nbcrw_transition_from(&g, &c, None).unwrap();
        for scale in [1e-6, 1.0, 1e6] {
            let mut scaled = c.clone();
            scaled.x.iter_mut().for_each(|v| *v *= scale);
            let p = nbcrw_transition_from(&g, &scaled, None).unwrap();
            assert!((&p.p - &base.p).amax() <= 1e-15);
        }
    }

    #[test]
    fn zero_denominator_gate_and_regularisation() {
        let g = rose2();
        let mut c = nb_centrality(&g, 1e-12).unwrap();
        // peripheral node 3 only sees internal nodes 1 and 2
        c.x[1] = 0.0;
        c.x[2] = 0.0;
        assert_eq!(nbcrw_transition_from(&g, &c, None), Err(Error::ZeroDenominator { node: 3 }));
        let p = nbcrw_transition_from(&g, &c, Some(1e-3)).unwrap();
        assert!(p.row_sum_error() <= 1e-12);
        assert!(nbcrw_transition_from(&g, &c, Some(-1.0)).is_err());
        let pi = stationary_nbcrw_from(&g, &c, Some(1e-3)).unwrap();
        assert!(pi.balance_residual(&p) < 1e-12);
    }

    #[test]
    fn rose_stationary_closed_forms() {
        let g = rose2();
        let opts = WalkOptions::default();
        let t = stationary_closed(WalkKind::Turw, &g, opts).unwrap();
        assert_eq!(t.pi[0], 0.25);
        assert_eq!(t.pi[1], 1.0 / 8.0);
        let b = stationary_closed(WalkKind::Nbcrw, &g, opts).unwrap();
        assert!((b.pi[0] - 1.0 / (2.0 + 3f64.sqrt())).abs() < 1e-12);
        assert!((b.pi[1] - 0.125).abs() < 1e-12);
        assert!((b.pi[3] - (2.0 * 3f64.sqrt() - 3.0) / 4.0).abs() < 1e-12);
        let m = stationary_closed(WalkKind::Merw, &g, opts).unwrap();
        for (node, want) in [(0, 1.0 / 3.0), (1, 1.0 / 8.0), (3, 1.0 / 12.0)] {
            assert!((m.pi[node] - want).abs() < 1e-12);
        }
        for s in [&t, &b, &m] {
            assert!((s.pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_stationary_oracles() {
        let k = turw_transition(&complete(6)).unwrap();
        let pi = stationary_generic(&k).unwrap();
        assert!(pi.pi.iter().all(|&v| (v - 1.0 / 6.0).abs() < 1e-14));
        assert_eq!(pi.method, StationaryMethod::LinearSolve);

        let g = make_rose(RoseSpec { m: 3, l: 4 }).unwrap();
        let p = nbcrw_transition(&g, WalkOptions::default()).unwrap();
        let closed = stationary_closed(WalkKind::Nbcrw, &g, WalkOptions::default()).unwrap();
        let generic = stationary_generic(&p).unwrap();
        for (a, b) in closed.pi.iter().zip(&generic.pi) {
            assert!((a - b).abs() < 1e-10);
        }
        let power = stationary_power(&p, 1e-15, 100_000).unwrap();
        for (a, b) in closed.pi.iter().zip(&power.pi) {
            assert!((a - b).abs() < 1e-10);
        }

        let s = star(4);
        let pm = stationary_generic(&merw_transition(&s, 1e-12).unwrap()).unwrap();
        assert!((pm.pi[0] - 0.5).abs() < 1e-12);
        for leaf in 1..5 {
            assert!((pm.pi[leaf] - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn detailed_balance_holds() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3), (0, 4)]).unwrap();
        let opts = WalkOptions::default();
        for kind in WalkKind::ALL {
            let p = transition(kind, &g, opts).unwrap();
            let pi = stationary_closed(kind, &g, opts).unwrap();
            let tol = if kind == WalkKind::Turw { 1e-12 } else { 1e-10 };
            assert!(detailed_balance_residual(&pi.pi, &p) <= tol, "{kind}");
        }
    }

    #[test]
    fn ipr_bounds() {
        assert!((ipr(&[0.01; 100]) - 0.01).abs() < 1e-15);
        let mut point = vec![0.0; 10];
        point[3] = 1.0;
        assert_eq!(ipr(&point), 1.0);
    }

    #[test]
    fn kind_round_trips_through_str() {
        for k in WalkKind::ALL {
            assert_eq!(k.as_str().parse::<WalkKind>().unwrap(), k);
        }
        assert!("pagerank".parse::<WalkKind>().is_err());
    }
}
