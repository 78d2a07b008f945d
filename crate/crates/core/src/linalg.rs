//! Dense LU factorisation with partial pivoting.
//!
//! Used by the linear-system oracles (hitting times, stationary vectors), so
//! it deliberately shares nothing with the eigen-solver path.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    /// Row-major packed `L` (unit diagonal, below) and `U` (on and above).
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factorises `a`. A pivot below `1e-13 * max|a|` is reported as singular.
    pub fn factor(a: &DMatrix<f64>) -> Result<Lu> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::InvalidParams(format!("matrix is {}x{}", n, a.ncols())));
        }
        let mut lu = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                lu[i * n + j] = a[(i, j)];
            }
        }
        let scale = lu.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let eps = 1e-13 * scale.max(f64::MIN_POSITIVE);
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].abs();
            for i in (k + 1)..n {
                let v = lu[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= eps {
                return Err(Error::Singular { pivot: k });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            let (head, tail) = lu.split_at_mut((k + 1) * n);
            let row_k = &head[k * n..];
            for row in tail.chunks_exact_mut(n) {
                let f = row[k] / pivot;
                row[k] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        row[j] -= f * row_k[j];
                    }
                }
            }
        }
        Ok(Lu { n, lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n, "right-hand side length mismatch");
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&y[..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: f64 = row[i + 1..].iter().zip(&y[i + 1..]).map(|(u, v)| u * v).sum();
            y[i] = (y[i] - s) / row[i];
        }
        y
    }
}

/// Solves `a x = b`.
pub fn solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    Ok(Lu::factor(a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_with_pivoting() {
        // zero leading pivot forces a row swap
        let a = DMatrix::from_row_slice(3, 3, &[0., 2., 1., 1., 1., 1., 2., 1., 0.]);
        let x = solve(&a, &[5., 4., 4.]).unwrap();
        for (got, want) in x.iter().zip([1., 2., 1.]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = DMatrix::from_row_slice(2, 2, &[1., 2., 2., 4.]);
        assert!(matches!(Lu::factor(&a), Err(Error::Singular { pivot: 1 })));
    }
}
