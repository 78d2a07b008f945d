//! Non-backtracking matrix and non-backtracking centrality.
//!
//! The explicit `2E x 2E` matrix `B` is kept as an oracle. Production
//! centralities come from the `2N x 2N` block matrix
//!
//! ```text
//! M = | A   I - D |
//!     | I     0   |
//! ```
//!
//! whose leading eigenvector is `z = (x | x / kappa)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{validate, Graph};
use crate::spectral::{leading_eig, leading_eig_with_shift};

/// Default cap on the number of directed edges for the explicit `B` oracle.
pub const DEFAULT_B_CAP: usize = 4000;

/// Explicit non-backtracking matrix over directed edges.
#[derive(Debug, Clone)]
pub struct NbMatrix {
    /// Row/column `r` is the directed edge `directed[r] = (i, j)`, `i -> j`,
    /// in lexicographic order.
    pub directed: Vec<(usize, usize)>,
    pub matrix: DMatrix<f64>,
}

impl NbMatrix {
    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        self.directed.binary_search(&(i, j)).ok()
    }
}

/// `B[i->j, k->l] = 1` iff `j == k` and `i != l`.
pub fn build_nb_matrix(g: &Graph) -> Result<NbMatrix> {
    if g.edge_count() == 0 {
        return Err(Error::InvalidParams("graph has no edges".into()));
    }
    let mut directed: Vec<(usize, usize)> =
        g.edges().iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
    directed.sort_unstable();
    let size = directed.len();
    let mut matrix = DMatrix::zeros(size, size);
    for (r, &(i, j)) in directed.iter().enumerate() {
        for &l in g.neighbors(j) {
            if l != i {
                let c = directed.binary_search(&(j, l)).expect("edge present");
                matrix[(r, c)] = 1.0;
            }
        }
    }
    Ok(NbMatrix { directed, matrix })
}

/// Dense `2N x 2N` block matrix `M`.
pub fn build_m_matrix(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for &(u, v) in g.edges() {
        m[(u, v)] = 1.0;
        m[(v, u)] = 1.0;
    }
    for i in 0..n {
        m[(i, n + i)] = 1.0 - g.degree(i) as f64;
        m[(n + i, i)] = 1.0;
    }
    m
}

/// `out = M z` without materialising `M`.
fn apply_m(g: &Graph, z: &[f64], out: &mut [f64]) {
    let n = g.n();
    let (top, bottom) = z.split_at(n);
    let (out_top, out_bottom) = out.split_at_mut(n);
    for i in 0..n {
        let s: f64 = g.neighbors(i).iter().map(|&k| top[k]).sum();
        out_top[i] = s + (1.0 - g.degree(i) as f64) * bottom[i];
    }
    out_bottom.copy_from_slice(top);
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NbCentrality {
    pub kappa: f64,
    /// Outgoing (non-backtracking) centrality, scaled so `(x | x/kappa)` has unit norm.
    pub x: Vec<f64>,
    /// Incoming centrality, `kappa y_i = (d_i - 1) x_i`.
    pub y: Vec<f64>,
    /// `||M z - kappa z||_inf` for the normalised `z`.
    pub residual: f64,
    pub iterations: usize,
}

impl NbCentrality {
    /// `max_i |kappa y_i - (d_i - 1) x_i|`.
    pub fn incoming_identity_gap(&self, g: &Graph) -> f64 {
        (0..g.n())
            .map(|i| (self.kappa * self.y[i] - (g.degree(i) as f64 - 1.0) * self.x[i]).abs())
            .fold(0.0, f64::max)
    }

    /// `||(A - D/kappa + I/kappa) x - kappa x||_inf`.
    pub fn reduced_residual(&self, g: &Graph) -> f64 {
        let k = self.kappa;
        (0..g.n())
            .map(|i| {
                let ax: f64 = g.neighbors(i).iter().map(|&j| self.x[j]).sum();
                let lhs = ax - (g.degree(i) as f64 - 1.0) / k * self.x[i];
                (lhs - k * self.x[i]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Non-backtracking centrality of a connected, non-tree graph.
///
/// Uses `max(100 N, 10_000)` power iterations at most.
pub fn nb_centrality(g: &Graph, tol: f64) -> Result<NbCentrality> {
    nb_centrality_with(g, tol, (100 * g.n()).max(10_000))
}

pub fn nb_centrality_with(g: &Graph, tol: f64, max_iter: usize) -> Result<NbCentrality> {
    let v = validate(g);
    if !v.connected {
        return Err(Error::NotConnected);
    }
    if v.is_tree {
        return Err(Error::TreeGraph);
    }
    let n = g.n();

    // Exactly one cycle: kappa = 1 coincides with the Laplacian root of M's
    // characteristic polynomial (a defective double eigenvalue), and the
    // eigenvector condition reduces to L x = 0, so x is uniform.
    let (kappa, x, iterations) = if g.edge_count() == n {
        (1.0, vec![1.0; n], 0)
    } else {
        let shift = g.max_degree() as f64;
        // rebuilding the lower half as x / kappa feeds its error through
        // I - D, so the iterate has to be tighter than the final check
        let inner = tol / (1.0 + shift);
        let pair = leading_eig_with_shift(2 * n, |z, out| apply_m(g, z, out), inner, max_iter, shift)?;
        let mut x = pair.vector[..n].to_vec();
        let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for xi in &mut x {
            if *xi < 0.0 {
                if *xi < -1e-8 * scale {
                    return Err(Error::ConvergenceFailure {
                        iterations: pair.iterations,
                        residual: pair.residual,
                    });
                }
                *xi = 0.0;
            }
        }
        (pair.value, x, pair.iterations)
    };

    // normalise the stacked vector (x | x/kappa)
    let norm = (x.iter().map(|v| v * v).sum::<f64>() * (1.0 + 1.0 / (kappa * kappa))).sqrt();
    let x: Vec<f64> = x.iter().map(|v| v / norm).collect();
    let z: Vec<f64> = x.iter().copied().chain(x.iter().map(|v| v / kappa)).collect();
    let mut mz = vec![0.0; 2 * n];
    apply_m(g, &z, &mut mz);
    let residual = mz.iter().zip(&z).map(|(a, b)| (a - kappa * b).abs()).fold(0.0, f64::max);
    if residual > tol * (1.0 + kappa) {
        return Err(Error::ConvergenceFailure { iterations, residual });
    }
    let y = (0..n).map(|i| (g.degree(i) as f64 - 1.0) * x[i] / kappa).collect();
    Ok(NbCentrality { kappa, x, y, residual, iterations })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BvsM {
    pub kappa_b: f64,
    pub kappa_m: f64,
    pub max_gap: f64,
}

/// Leading eigenvalue of the explicit `B` against the `M` route.
pub fn verify_b_vs_m(g: &Graph, tol: f64, cap: usize) -> Result<BvsM> {
    let directed = 2 * g.edge_count();
    if directed > cap {
        return Err(Error::InvalidParams(format!(
            "explicit non-backtracking matrix would have {directed} rows (cap {cap})"
        )));
    }
    let b = build_nb_matrix(g)?;
    let kappa_b = leading_eig(&b.matrix, tol, 200 * directed.max(100))?.value;
    let kappa_m = nb_centrality(g, tol)?.kappa;
    Ok(BvsM { kappa_b, kappa_m, max_gap: (kappa_b - kappa_m).abs() })
}
