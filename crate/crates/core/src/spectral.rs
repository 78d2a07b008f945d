//! Dense eigen-solvers: full symmetric decomposition and leading-eigenpair
//! power iteration for (possibly non-symmetric) matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Default convergence tolerance for eigen computations.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Eigenvalues in ascending order with column-orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub values: DVector<f64>,
    /// Column `k` pairs with `values[k]`.
    pub vectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max_k ||M v_k - l_k v_k||_inf / (1 + |l_k|)`.
    pub fn max_residual(&self, m: &DMatrix<f64>) -> f64 {
        let mv = m * &self.vectors;
        let mut worst: f64 = 0.0;
        for k in 0..self.len() {
            let lam = self.values[k];
            for i in 0..self.len() {
                let r = (mv[(i, k)] - lam * self.vectors[(i, k)]).abs() / (1.0 + lam.abs());
                worst = worst.max(r);
            }
        }
        worst
    }

    /// `||V^T V - I||_inf` (entrywise max).
    pub fn orthogonality_error(&self) -> f64 {
        let g = self.vectors.transpose() * &self.vectors;
        let mut worst: f64 = 0.0;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

/// Largest entrywise asymmetry `max |m_ij - m_ji|`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Eigenvectors are sign-normalised so that each column's largest-magnitude
/// entry is positive (first such index on ties).
pub fn sym_eig(m: &DMatrix<f64>, tol: f64) -> Result<SpectralDecomposition> {
    if !m.is_square() {
        return Err(Error::InvalidParams(format!("matrix is {}x{}", m.nrows(), m.ncols())));
    }
    let n = m.nrows();
    let scale = m.amax().max(1.0);
    let asym = asymmetry(m);
    if asym > tol * scale {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let max_iter = 100 * n.max(10);
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, max_iter)
        .ok_or(Error::ConvergenceFailure { iterations: max_iter, residual: f64::NAN })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        if col[col.iamax()] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    Ok(SpectralDecomposition { values, vectors })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeadingEigenpair {
    pub value: f64,
    /// Unit 2-norm, largest-magnitude entry positive.
    pub vector: Vec<f64>,
    /// `||M v - value v||_inf` against the unshifted operator.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Iterate on `M + shift I` instead of `M`; the reported value is unshifted.
    pub shift: f64,
}

/// Power iteration on a matrix-free operator `apply(v, out)`: `out = M v`.
///
/// Starts from a fixed positive vector. Converged once the unshifted residual
/// drops to `tol * (1 + |value|)`.
pub fn power_iteration<F>(dim: usize, mut apply: F, opts: PowerOptions) -> Result<LeadingEigenpair>
where
    F: FnMut(&[f64], &mut [f64]),
{
    run_power(dim, &mut apply, opts, None)
}

fn run_power(
    dim: usize,
    apply: &mut dyn FnMut(&[f64], &mut [f64]),
    opts: PowerOptions,
    stall_check: Option<usize>,
) -> Result<LeadingEigenpair> {
    if dim == 0 {
        return Err(Error::InvalidParams("empty operator".into()));
    }
    let mut v = start_vector(dim);
    let mut mv = vec![0.0; dim];
    let mut history: Vec<f64> = Vec::new();
    let mut residual = f64::INFINITY;

    for it in 1..=opts.max_iter {
        apply(&v, &mut mv);
        let value: f64 = v.iter().zip(&mv).map(|(a, b)| a * b).sum();
        residual = v
            .iter()
            .zip(&mv)
            .map(|(a, b)| (b - value * a).abs())
            .fold(0.0, f64::max);
        if residual <= opts.tol * (1.0 + value.abs()) {
            let mut vector = v;
            fix_sign(&mut vector);
            return Ok(LeadingEigenpair { value, vector, residual, iterations: it });
        }
        if let Some(window) = stall_check {
            history.push(residual);
            if it >= 2 * window && residual > 0.5 * history[it - 1 - window] {
                return Err(Error::ConvergenceFailure { iterations: it, residual });
            }
        }
        // w = (M + shift I) v
        for (w, &x) in mv.iter_mut().zip(&v) {
            *w += opts.shift * x;
        }
        let norm = mv.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParams("power iteration collapsed to zero (zero matrix?)".into()));
        }
        for (a, &b) in v.iter_mut().zip(&mv) {
            *a = b / norm;
        }
    }
    Err(Error::ConvergenceFailure { iterations: opts.max_iter, residual })
}

/// Positive, deterministic and deliberately non-uniform: the uniform vector
/// is itself an eigenvector of `M` for every regular graph (eigenvalue 1).
fn start_vector(dim: usize) -> Vec<f64> {
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    let v: Vec<f64> = (0..dim).map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * GOLDEN).fract()).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Leading eigenpair by power iteration with a stall fallback.
///
/// Iterates on `m` directly first. If the residual stops shrinking (equal
/// modulus eigenvalues such as `±λ` on bipartite structure) the iteration
/// restarts on `m + shift I` with `shift` the largest absolute row sum, which
/// places every eigenvalue in the right half-plane.
pub fn leading_eig(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<LeadingEigenpair> {
    if !m.is_square() {
        return Err(Error::InvalidParams(format!("matrix is {}x{}", m.nrows(), m.ncols())));
    }
    if m.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidParams("zero matrix has no leading eigenpair".into()));
    }
    let shift = (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    leading_eig_with_shift(m.nrows(), |v, out| dense_apply(m, v, out), tol, max_iter, shift)
}

/// Same strategy as [`leading_eig`] for a matrix-free operator with a
/// caller-chosen fallback shift.
pub fn leading_eig_with_shift<F>(
    dim: usize,
    mut apply: F,
    tol: f64,
    max_iter: usize,
    shift: f64,
) -> Result<LeadingEigenpair>
where
    F: FnMut(&[f64], &mut [f64]),
{
    const STALL_WINDOW: usize = 100;
    let direct = PowerOptions { tol, max_iter, shift: 0.0 };
    match run_power(dim, &mut apply, direct, Some(STALL_WINDOW)) {
        Ok(pair) => Ok(pair),
        Err(Error::ConvergenceFailure { iterations, .. }) if iterations < max_iter => {
            let shifted = PowerOptions { tol, max_iter: max_iter - iterations, shift };
            let mut pair = run_power(dim, &mut apply, shifted, None)?;
            pair.iterations += iterations;
            Ok(pair)
        }
        Err(e) => Err(e),
    }
}

pub(crate) fn dense_apply(m: &DMatrix<f64>, v: &[f64], out: &mut [f64]) {
    let n = m.nrows();
    out.iter_mut().for_each(|x| *x = 0.0);
    // column-major storage: accumulate column by column
    for (j, &vj) in v.iter().enumerate() {
        if vj == 0.0 {
            continue;
        }
        let col = &m.as_slice()[j * n..(j + 1) * n];
        for (o, &c) in out.iter_mut().zip(col) {
            *o += c * vj;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{laplacian, Graph};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                e.push((i, j));
            }
        }
        Graph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn two_by_two_swap() {
        let m = DMatrix::from_row_slice(2, 2, &[0., 1., 1., 0.]);
        let d = sym_eig(&m, 1e-12).unwrap();
        assert!((d.values[0] + 1.0).abs() < 1e-14);
        assert!((d.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn triangle_laplacian_spectrum() {
        let d = sym_eig(&laplacian(&complete(3)), 1e-12).unwrap();
        for (got, want) in d.values.iter().zip([0.0, 3.0, 3.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn path_laplacian_spectrum() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let d = sym_eig(&laplacian(&p3), 1e-12).unwrap();
        for (got, want) in d.values.iter().zip([0.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn random_symmetric_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut m = DMatrix::zeros(8, 8);
        for i in 0..8 {
            for j in i..8 {
                let x: f64 = rng.random_range(-1.0..1.0);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        let d = sym_eig(&m, 1e-12).unwrap();
        let rebuilt = &d.vectors * DMatrix::from_diagonal(&d.values) * d.vectors.transpose();
        assert!((rebuilt - &m).amax() <= 1e-10);
        assert!(d.orthogonality_error() <= 1e-12);
        assert!(d.max_residual(&m) <= 1e-12);
        assert!(d.values.as_slice().windows(2).all(|w| w[0] <= w[1]));
        assert!((d.values.sum() - m.trace()).abs() <= 1e-9 * 8.0);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0., 1., 0.5, 0.]);
        assert!(matches!(sym_eig(&m, 1e-12), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn deterministic_output() {
        let m = laplacian(&complete(6));
        let a = sym_eig(&m, 1e-12).unwrap();
        let b = sym_eig(&m, 1e-12).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn k4_adjacency_leading() {
        let a = complete(4).adjacency();
        let p = leading_eig(&a, 1e-12, 400).unwrap();
        assert!((p.value - 3.0).abs() < 1e-12);
        for x in &p.vector {
            assert!((x - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn star_leading_pair() {
        // hub 0 with 4 leaves: bipartite, so ±2 forces the shifted fallback
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let a = star.adjacency();
        let p = leading_eig(&a, 1e-12, 500).unwrap();
        assert!((p.value - 2.0).abs() < 1e-10);
        assert!((p.vector[0] - 1.0 / 2f64.sqrt()).abs() < 1e-10);
        let full = sym_eig(&a, 1e-12).unwrap();
        assert!((p.value - full.values[4]).abs() <= 1e-8 * 3.0);
    }

    #[test]
    fn zero_matrix_is_an_error() {
        assert!(leading_eig(&DMatrix::zeros(3, 3), 1e-12, 10).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.999]);
        let err = power_iteration(2, |v, o| dense_apply(&m, v, o), PowerOptions { tol: 1e-15, max_iter: 5, shift: 0.0 });
        assert!(matches!(err, Err(Error::ConvergenceFailure { iterations: 5, .. })));
    }
}
