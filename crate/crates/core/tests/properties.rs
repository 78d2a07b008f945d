use nalgebra::DMatrix;
use proptest::prelude::*;

use nbcrw_core::graph::{laplacian, parse_edge_list, validate, ParseOptions};
use nbcrw_core::hitting::{hitting_linear, hitting_spectral, max_matrix_gap, SpectralOptions};
use nbcrw_core::models::{generate, GenModel, GenSpec};
use nbcrw_core::nb::nb_centrality;
use nbcrw_core::spectral::sym_eig;
use nbcrw_core::walks::{
    detailed_balance_residual, nbcrw_transition_from, stationary_closed, stationary_generic, transition, WalkKind,
    WalkOptions,
};
use nbcrw_core::weighted::weighted_from_centrality;
use nbcrw_core::Graph;

/// Connected graph with at least one cycle: random tree plus extra edges.
fn cyclic_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (4..=max_n)
        .prop_flat_map(|n| {
            let parents = (1..n).map(|i| 0..i).collect::<Vec<_>>();
            let extra = prop::collection::vec((0..n, 0..n), 1..2 * n);
            (Just(n), parents, extra)
        })
        .prop_filter_map("needs a cycle", |(n, parents, extra)| {
            let mut e: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
            e.extend(extra.into_iter().filter(|(a, b)| a != b));
            let g = Graph::from_edges(n, &e).ok()?;
            (!validate(&g).is_tree).then_some(g)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parsed_graphs_are_simple(pairs in prop::collection::vec((0u64..30, 0u64..30), 1..80)) {
        let text: String = pairs
            .iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| format!("{a} {b}\n"))
            .collect();
        prop_assume!(!text.is_empty());
        let g = parse_edge_list(&text, ParseOptions::default()).unwrap().graph;
        let a = g.adjacency();
        prop_assert_eq!(&a, &a.transpose());
        prop_assert!((0..g.n()).all(|i| a[(i, i)] == 0.0));
        let degree_sum: usize = g.degrees().iter().sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        for i in 0..g.n() {
            prop_assert_eq!(a.row(i).sum() as usize, g.degree(i));
        }
    }

    #[test]
    fn laplacian_kernel_counts_components(sizes in prop::collection::vec(2usize..6, 1..4)) {
        // disjoint paths and cycles
        let mut e = Vec::new();
        let mut base = 0;
        for (k, &s) in sizes.iter().enumerate() {
            for i in 0..s - 1 {
                e.push((base + i, base + i + 1));
            }
            if k % 2 == 1 && s >= 3 {
                e.push((base, base + s - 1));
            }
            base += s;
        }
        let g = Graph::from_edges(base, &e).unwrap();
        let eig = sym_eig(&laplacian(&g), 1e-12).unwrap();
        let zeros = eig.values.iter().filter(|v| v.abs() < 1e-9).count();
        prop_assert_eq!(zeros, sizes.len());
        prop_assert_eq!(g.components().len(), sizes.len());
        prop_assert!(eig.values[0].abs() < 1e-9);
    }

    #[test]
    fn sym_eig_contract(entries in prop::collection::vec(-5.0f64..5.0, 36)) {
        let m = DMatrix::from_row_slice(6, 6, &entries);
        let s = &m + m.transpose();
        let eig = sym_eig(&s, 1e-12).unwrap();
        prop_assert!(eig.max_residual(&s) <= 1e-10);
        prop_assert!(eig.orthogonality_error() <= 1e-12);
        prop_assert!(eig.values.as_slice().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((eig.values.sum() - s.trace()).abs() <= 1e-9 * 6.0 * (1.0 + s.amax()));
    }

    #[test]
    fn strengths_are_row_sums(g in cyclic_graph(12), xs in prop::collection::vec(0.0f64..3.0, 12)) {
        let x = &xs[..g.n()];
        let wg = weighted_from_centrality(&g, x).unwrap();
        for i in 0..g.n() {
            prop_assert!((wg.strengths[i] - wg.w.row(i).sum()).abs() <= 1e-12);
        }
        prop_assert_eq!(&wg.w, &wg.w.transpose());
    }

    #[test]
    fn nbcrw_is_scale_invariant(g in cyclic_graph(12), c in prop::sample::select(vec![1e-6, 1.0, 1e6])) {
        let nb = nb_centrality(&g, 1e-12).unwrap();
        let base = nbcrw_transition_from(&g, &nb, None).unwrap();
        let mut scaled = nb.clone();
        scaled.x.iter_mut().for_each(|v| *v *= c);
        let p = nbcrw_transition_from(&g, &scaled, None).unwrap();
        prop_assert!((&p.p - &base.p).amax() <= 1e-15);
    }

    #[test]
    fn centrality_invariants(g in cyclic_graph(16)) {
        let c = nb_centrality(&g, 1e-12).unwrap();
        prop_assert!(c.kappa >= 1.0 - 1e-12);
        prop_assert!(c.x.iter().all(|&v| v >= 0.0));
        prop_assert!(c.incoming_identity_gap(&g) <= 1e-9);
        prop_assert!(c.reduced_residual(&g) <= 1e-9);
        let norm: f64 = c.x.iter().map(|v| v * v).sum::<f64>() * (1.0 + 1.0 / (c.kappa * c.kappa));
        prop_assert!((norm - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn walks_are_reversible_chains(g in cyclic_graph(14)) {
        for kind in WalkKind::ALL {
            let p = transition(kind, &g, WalkOptions::default()).unwrap();
            prop_assert!(p.row_sum_error() <= 1e-12);
            for i in 0..g.n() {
                for j in 0..g.n() {
                    prop_assert!(p.p[(i, j)] == 0.0 || g.has_edge(i, j));
                }
            }
            let pi = stationary_closed(kind, &g, WalkOptions::default()).unwrap();
            prop_assert!((pi.pi.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(pi.balance_residual(&p) <= 1e-9);
            prop_assert!(detailed_balance_residual(&pi.pi, &p) <= 1e-10);
            let generic = stationary_generic(&p).unwrap();
            for (a, b) in pi.pi.iter().zip(&generic.pi) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn spectral_hitting_matches_linear(g in cyclic_graph(14)) {
        for kind in WalkKind::ALL {
            let s = hitting_spectral(kind, &g, SpectralOptions::default()).unwrap();
            let l = hitting_linear(&transition(kind, &g, WalkOptions::default()).unwrap()).unwrap();
            let gap = max_matrix_gap(&s, &l).unwrap();
            prop_assert!(gap <= 1e-7 * (1.0 + l.max_t().unwrap()), "{kind}: {gap}");
            prop_assert!(s.aggregation_gap().unwrap() <= 1e-8 * (1.0 + l.max_t().unwrap()));
            let t = l.t.as_ref().unwrap();
            for i in 0..g.n() {
                prop_assert_eq!(t[(i, i)], 0.0);
                for j in 0..g.n() {
                    prop_assert!(i == j || t[(i, j)] > 0.0);
                }
            }
        }
    }

    #[test]
    fn generators_repeat_per_seed(seed in any::<u64>(), which in 0usize..3) {
        let model = [
            GenModel::Er { n: 40, p: 0.15 },
            GenModel::Ba { n: 40, m_attach: 2 },
            GenModel::Ws { n: 40, k: 4, beta: 0.3 },
        ][which];
        let spec = GenSpec { model, seed };
        prop_assert_eq!(generate(spec).unwrap().to_edge_list(&[]), generate(spec).unwrap().to_edge_list(&[]));
    }
}
