//! Weighted counterpart of a graph whose edge weights come from node scores.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    /// Symmetric weight matrix with zero diagonal.
    pub w: DMatrix<f64>,
    /// `s_i = sum_k w_ik`.
    pub strengths: Vec<f64>,
    /// `s = sum_i s_i` (every edge counted twice).
    pub total: f64,
}

impl WeightedGraph {
    pub fn n(&self) -> usize {
        self.strengths.len()
    }
}

/// `W = X A X` with `X = diag(x)`, i.e. `w_ij = a_ij x_i x_j`.
pub fn weighted_from_centrality(g: &Graph, x: &[f64]) -> Result<WeightedGraph> {
    if x.len() != g.n() {
        return Err(Error::InvalidParams(format!(
            "centrality vector has length {}, graph has {} nodes",
            x.len(),
            g.n()
        )));
    }
    if let Some(i) = x.iter().position(|&v| !(v >= 0.0)) {
        return Err(Error::InvalidParams(format!("negative centrality {} at node {i}", x[i])));
    }
    let n = g.n();
    let mut w = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        let wt = x[u] * x[v];
        w[(u, v)] = wt;
        w[(v, u)] = wt;
    }
    let strengths: Vec<f64> = (0..n).map(|i| w.row(i).sum()).collect();
    let total = strengths.iter().sum();
    Ok(WeightedGraph { w, strengths, total })
}

/// `L = S - W`.
pub fn weighted_laplacian(wg: &WeightedGraph) -> DMatrix<f64> {
    let mut l = -&wg.w;
    for (i, &s) in wg.strengths.iter().enumerate() {
        l[(i, i)] = s;
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn uniform_triangle() {
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let wg = weighted_from_centrality(&k3, &[1.0; 3]).unwrap();
        assert_eq!(wg.strengths, vec![2.0; 3]);
        assert_eq!(wg.total, 6.0);
        assert_eq!(weighted_laplacian(&wg), crate::graph::laplacian(&k3));
    }

    #[test]
    fn path_with_scores() {
        let wg = weighted_from_centrality(&path3(), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(wg.w[(0, 1)], 2.0);
        assert_eq!(wg.w[(1, 2)], 6.0);
        assert_eq!(wg.strengths, vec![2.0, 8.0, 6.0]);
        assert_eq!(wg.total, 16.0);
        // oracle: s_i = x_i * sum_k a_ik x_k
        let x = [1.0, 2.0, 3.0];
        let g = path3();
        for i in 0..3 {
            let s: f64 = g.neighbors(i).iter().map(|&k| x[k]).sum::<f64>() * x[i];
            assert_eq!(s, wg.strengths[i]);
        }
        let l = weighted_laplacian(&wg);
        let expected = DMatrix::from_row_slice(3, 3, &[2., -2., 0., -2., 8., -6., 0., -6., 6.]);
        assert_eq!(l, expected);
    }

    #[test]
    fn zero_scores_give_zero_weights() {
        let wg = weighted_from_centrality(&path3(), &[0.0; 3]).unwrap();
        assert_eq!(wg.total, 0.0);
        assert_eq!(weighted_laplacian(&wg), DMatrix::zeros(3, 3));
    }

    #[test]
    fn rejects_negative_or_misaligned_scores() {
        assert!(weighted_from_centrality(&path3(), &[1.0, -1.0, 1.0]).is_err());
        assert!(weighted_from_centrality(&path3(), &[1.0, 1.0]).is_err());
    }
}
