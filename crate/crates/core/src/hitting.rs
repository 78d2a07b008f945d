//! Hitting times `T_ij`, partial means `T_j` and the global mean `<T>`.
//!
//! Spectral routes evaluate the eigen-expansions (weighted Laplacian for
//! TURW and NBCRW, adjacency for MERW); `hitting_linear` solves one absorbing
//! system per target and shares no code with them.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{require_connected, Graph};
use crate::linalg::Lu;
use crate::nb::nb_centrality;
use crate::spectral::{sym_eig, DEFAULT_TOL};
use crate::walks::{
    effective_centrality, nbcrw_transition_from, perron, transition, TransitionMatrix, WalkKind, WalkOptions,
};
use crate::weighted::{weighted_from_centrality, weighted_laplacian, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HittingMethod {
    Spectral,
    LinearSolve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HittingReport {
    pub kind: WalkKind,
    pub method: HittingMethod,
    /// `T_ij`, zero diagonal. Optional for spectral reports.
    pub t: Option<DMatrix<f64>>,
    pub t_partial: Vec<f64>,
    pub t_global: f64,
}

impl HittingReport {
    pub fn n(&self) -> usize {
        self.t_partial.len()
    }

    pub fn max_t(&self) -> Option<f64> {
        self.t.as_ref().map(|t| t.max())
    }

    /// Largest disagreement between the stored `T_j`, `<T>` and the values
    /// re-aggregated from `t`. `None` without a matrix.
    pub fn aggregation_gap(&self) -> Option<f64> {
        let t = self.t.as_ref()?;
        let (partial, global) = aggregate(t);
        let gp = partial.iter().zip(&self.t_partial).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        Some(gp.max((global - self.t_global).abs()))
    }
}

/// `T_j = sum_i T_ij / (N-1)` and `<T> = sum_j T_j / N`.
pub fn aggregate(t: &DMatrix<f64>) -> (Vec<f64>, f64) {
    let n = t.nrows();
    let partial: Vec<f64> = (0..n).map(|j| t.column(j).sum() / (n - 1) as f64).collect();
    let global = partial.iter().sum::<f64>() / n as f64;
    (partial, global)
}

/// `max_{ij} |a_ij - b_ij|`.
pub fn max_matrix_gap(a: &HittingReport, b: &HittingReport) -> Option<f64> {
    Some((a.t.as_ref()? - b.t.as_ref()?).amax())
}

/// Spread over sources of `sum_j pi_j T_ij`, which is the same for every
/// source in an irreducible chain.
pub fn kemeny_spread(t: &DMatrix<f64>, pi: &[f64]) -> f64 {
    let n = t.nrows();
    let rows: Vec<f64> = (0..n).map(|i| (0..n).map(|j| pi[j] * t[(i, j)]).sum()).collect();
    let hi = rows.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = rows.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// Expected steps to reach `target` from every node; entry `target` is 0.
pub fn hitting_linear_target(p: &TransitionMatrix, target: usize) -> Result<Vec<f64>> {
    let n = p.n();
    if target >= n {
        return Err(Error::InvalidParams(format!("target {target} out of range for {n} nodes")));
    }
    let idx: Vec<usize> = (0..n).filter(|&i| i != target).collect();
    let mut sys = DMatrix::zeros(n - 1, n - 1);
    for (r, &i) in idx.iter().enumerate() {
        for (c, &k) in idx.iter().enumerate() {
            sys[(r, c)] = if r == c { 1.0 } else { 0.0 } - p.p[(i, k)];
        }
    }
    let sol = Lu::factor(&sys)?.solve(&vec![1.0; n - 1]);
    let mut out = vec![0.0; n];
    for (r, &i) in idx.iter().enumerate() {
        out[i] = sol[r];
    }
    Ok(out)
}

/// Solves `(I - P_{-j}) t = 1` for every target `j`, in parallel.
pub fn hitting_linear(p: &TransitionMatrix) -> Result<HittingReport> {
    let n = p.n();
    if n < 2 {
        return Err(Error::InvalidParams("need at least two nodes".into()));
    }
    let cols: Vec<Vec<f64>> = (0..n).into_par_iter().map(|j| hitting_linear_target(p, j)).collect::<Result<_>>()?;
    let t = DMatrix::from_fn(n, n, |i, j| cols[j][i]);
    let (t_partial, t_global) = aggregate(&t);
    Ok(HittingReport { kind: p.kind, method: HittingMethod::LinearSolve, t: Some(t), t_partial, t_global })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub tol: f64,
    pub with_matrix: bool,
    /// Evaluate the pairwise NBCRW formula with its printed `1/2` prefactor.
    pub verbatim_eq26: bool,
    /// See [`WalkOptions::regularize`].
    pub regularize: Option<f64>,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions { tol: DEFAULT_TOL, with_matrix: true, verbatim_eq26: false, regularize: None }
    }
}

/// Random walk on a weighted graph from the spectrum of `L = S - W`.
fn hitting_weighted(kind: WalkKind, wg: &WeightedGraph, opts: SpectralOptions) -> Result<HittingReport> {
    let n = wg.n();
    let eig = sym_eig(&weighted_laplacian(wg), opts.tol)?;
    let scale = eig.values[n - 1].abs().max(1.0);
    if eig.values[1] <= 1e-10 * scale {
        return Err(Error::NotConnected);
    }
    let s = wg.total;
    let nf = n as f64;
    let ks = 1..n;
    // c_k = sum_z s_z phi_kz
    let c: Vec<f64> = (0..n)
        .map(|k| (0..n).map(|z| wg.strengths[z] * eig.vectors[(z, k)]).sum())
        .collect();

    let t_partial: Vec<f64> = (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for k in ks.clone() {
                let phi = eig.vectors[(j, k)];
                acc += (s * phi * phi - phi * c[k]) / eig.values[k];
            }
            nf / (nf - 1.0) * acc
        })
        .collect();
    let t_global = s / (nf - 1.0) * ks.clone().map(|k| 1.0 / eig.values[k]).sum::<f64>();

    let t = if opts.with_matrix {
        let phi = eig.vectors.columns(1, n - 1);
        let inv = DMatrix::from_diagonal(&eig.values.rows(1, n - 1).map(|v| 1.0 / v));
        let g = phi * inv * phi.transpose();
        let h: Vec<f64> = (0..n).map(|i| ks.clone().map(|k| eig.vectors[(i, k)] * c[k] / eig.values[k]).sum()).collect();
        let pre = if opts.verbatim_eq26 { 0.5 } else { 1.0 };
        Some(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                pre * (s * (g[(j, j)] - g[(i, j)]) + h[i] - h[j])
            }
        }))
    } else {
        None
    };
    Ok(HittingReport { kind, method: HittingMethod::Spectral, t, t_partial, t_global })
}

/// Laplacian spectrum of the unweighted graph.
pub fn hitting_spectral_turw(g: &Graph, opts: SpectralOptions) -> Result<HittingReport> {
    require_connected(g)?;
    let wg = weighted_from_centrality(g, &vec![1.0; g.n()])?;
    hitting_weighted(WalkKind::Turw, &wg, SpectralOptions { verbatim_eq26: false, ..opts })
}

/// Laplacian spectrum of `W = XAX`.
pub fn hitting_spectral_nbcrw(g: &Graph, opts: SpectralOptions) -> Result<HittingReport> {
    let c = nb_centrality(g, opts.tol)?;
    // same gate as the transition matrix
    nbcrw_transition_from(g, &c, opts.regularize)?;
    let x = effective_centrality(&c, opts.regularize)?;
    let wg = weighted_from_centrality(g, &x)?;
    hitting_weighted(WalkKind::Nbcrw, &wg, opts)
}

/// Adjacency spectrum, `r_k = lambda_1 / (lambda_1 - lambda_k)`.
pub fn hitting_spectral_merw(g: &Graph, opts: SpectralOptions) -> Result<HittingReport> {
    let pf = perron(g, opts.tol)?;
    let n = g.n();
    let nf = n as f64;
    let eig = &pf.spectrum;
    let psi1 = &pf.psi1;
    let lead = n - 1;
    let others = 0..lead;
    let r: Vec<f64> = (0..lead).map(|k| pf.lambda1 / (pf.lambda1 - eig.values[k])).collect();
    // u_k = sum_i psi_ki / psi_1i
    let u: Vec<f64> = (0..lead).map(|k| (0..n).map(|i| eig.vectors[(i, k)] / psi1[i]).sum()).collect();

    let t_partial: Vec<f64> = (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for k in others.clone() {
                let v = eig.vectors[(j, k)];
                acc += r[k] * (nf * v * v - v * psi1[j] * u[k]);
            }
            acc / (psi1[j] * psi1[j] * (nf - 1.0))
        })
        .collect();

    let mut total = 0.0;
    for j in 0..n {
        let mut acc = 0.0;
        for k in others.clone() {
            let v = eig.vectors[(j, k)];
            acc += r[k] * (nf * v * v - v * psi1[j] * u[k]);
        }
        total += acc / (psi1[j] * psi1[j]);
    }
    let t_global = total / (nf * (nf - 1.0));

    let t = if opts.with_matrix {
        let psi = eig.vectors.columns(0, lead);
        let rd = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(r.clone()));
        let gp = psi * rd * psi.transpose();
        Some(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                (gp[(j, j)] - gp[(i, j)] * psi1[j] / psi1[i]) / (psi1[j] * psi1[j])
            }
        }))
    } else {
        None
    };
    Ok(HittingReport { kind: WalkKind::Merw, method: HittingMethod::Spectral, t, t_partial, t_global })
}

pub fn hitting_spectral(kind: WalkKind, g: &Graph, opts: SpectralOptions) -> Result<HittingReport> {
    match kind {
        WalkKind::Turw => hitting_spectral_turw(g, opts),
        WalkKind::Merw => hitting_spectral_merw(g, opts),
        WalkKind::Nbcrw => hitting_spectral_nbcrw(g, opts),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HubReport {
    pub kind: WalkKind,
    pub hub_node: usize,
    pub hub_label: u64,
    pub degree: usize,
    pub t_hub: f64,
}

pub fn hub_report(g: &Graph, kind: WalkKind, opts: SpectralOptions) -> Result<HubReport> {
    let rep = hitting_spectral(kind, g, SpectralOptions { with_matrix: false, ..opts })?;
    let hub = g.hub();
    Ok(HubReport { kind, hub_node: hub, hub_label: g.label(hub), degree: g.degree(hub), t_hub: rep.t_partial[hub] })
}

/// Printed vs corrected pairwise NBCRW formula against the other witnesses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eq26Audit {
    /// `<T>` re-aggregated from the pairwise formula with the `1/2`.
    pub verbatim_global: f64,
    /// Same without the `1/2`.
    pub corrected_global: f64,
    /// Closed spectral `<T>`.
    pub global_direct: f64,
    /// Mean of the spectral `T_j`.
    pub partial_mean_direct: f64,
    pub linear_global: f64,
    pub verbatim_max_gap: f64,
    pub corrected_max_gap: f64,
    /// `verbatim / linear`, averaged over ordered pairs.
    pub verbatim_ratio: f64,
    pub verbatim_consistent: bool,
    pub corrected_consistent: bool,
}

pub fn eq26_audit(g: &Graph, opts: SpectralOptions) -> Result<Eq26Audit> {
    let base = SpectralOptions { with_matrix: true, ..opts };
    let corrected = hitting_spectral_nbcrw(g, SpectralOptions { verbatim_eq26: false, ..base })?;
    let verbatim = hitting_spectral_nbcrw(g, SpectralOptions { verbatim_eq26: true, ..base })?;
    let p = transition(WalkKind::Nbcrw, g, WalkOptions { tol: opts.tol, regularize: opts.regularize })?;
    let linear = hitting_linear(&p)?;
    let lt = linear.t.as_ref().expect("linear report has a matrix");
    let vt = verbatim.t.as_ref().expect("requested");
    let n = g.n();
    let mut ratio = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                ratio += vt[(i, j)] / lt[(i, j)];
            }
        }
    }
    ratio /= (n * (n - 1)) as f64;
    let tol = |a: &DMatrix<f64>| 1e-7 * (1.0 + a.max());
    let verbatim_max_gap = (vt - lt).amax();
    let corrected_max_gap = (corrected.t.as_ref().expect("requested") - lt).amax();
    Ok(Eq26Audit {
        verbatim_global: aggregate(vt).1,
        corrected_global: aggregate(corrected.t.as_ref().expect("requested")).1,
        global_direct: corrected.t_global,
        partial_mean_direct: corrected.t_partial.iter().sum::<f64>() / n as f64,
        linear_global: linear.t_global,
        verbatim_max_gap,
        corrected_max_gap,
        verbatim_ratio: ratio,
        verbatim_consistent: verbatim_max_gap <= tol(lt),
        corrected_consistent: corrected_max_gap <= tol(lt),
    })
}
