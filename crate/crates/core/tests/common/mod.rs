#![allow(dead_code)]

use nbcrw_core::graph::validate;
use nbcrw_core::models::{gen_ba, gen_er, gen_ws, make_rose, RoseSpec};
use nbcrw_core::Graph;

pub struct Case {
    pub name: String,
    pub graph: Graph,
    /// Degree if the graph is regular.
    pub regular: Option<usize>,
}

pub fn complete(n: usize) -> Graph {
    let mut e = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            e.push((i, j));
        }
    }
    Graph::from_edges(n, &e).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &e).unwrap()
}

pub fn hypercube(dim: u32) -> Graph {
    let n = 1usize << dim;
    let mut e = Vec::new();
    for v in 0..n {
        for b in 0..dim {
            let u = v ^ (1 << b);
            if v < u {
                e.push((v, u));
            }
        }
    }
    Graph::from_edges(n, &e).unwrap()
}

/// Star with `leaves` leaves plus one chord between leaves 1 and 2.
pub fn star_chord(leaves: usize) -> Graph {
    let mut e: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    e.push((1, 2));
    Graph::from_edges(leaves + 1, &e).unwrap()
}

/// Largest component of the first seed at or after `seed` whose component is
/// not a tree.
fn core_of<F: Fn(u64) -> Graph>(make: F, seed: u64) -> (Graph, u64) {
    for s in seed.. {
        let g = make(s).largest_component().unwrap();
        let v = validate(&g);
        if g.n() >= 4 && !v.is_tree {
            return (g, s);
        }
    }
    unreachable!()
}

fn push(out: &mut Vec<Case>, name: String, graph: Graph) {
    let d = graph.degree(0);
    let regular = (0..graph.n()).all(|i| graph.degree(i) == d).then_some(d);
    out.push(Case { name, graph, regular });
}

pub fn corpus() -> Vec<Case> {
    let mut out = Vec::new();
    for m in 2..=6 {
        push(&mut out, format!("rose m={m} l=4"), make_rose(RoseSpec { m, l: 4 }).unwrap());
    }
    for (m, l) in [(3, 6), (2, 8)] {
        push(&mut out, format!("rose m={m} l={l}"), make_rose(RoseSpec { m, l }).unwrap());
    }
    for n in [20, 50, 100] {
        for p in [0.1, 0.3] {
            for seed in [1, 2] {
                let (g, s) = core_of(|s| gen_er(n, p, s).unwrap(), seed);
                push(&mut out, format!("er n={n} p={p} seed={s}"), g);
            }
        }
    }
    for n in [50, 200] {
        for m in [2, 3] {
            for seed in [1, 2] {
                push(&mut out, format!("ba n={n} m={m} seed={seed}"), gen_ba(n, m, seed).unwrap());
            }
        }
    }
    for (k, beta, seed) in [(4, 0.1, 1), (4, 0.3, 2), (6, 0.2, 3)] {
        let (g, s) = core_of(|s| gen_ws(100, k, beta, s).unwrap(), seed);
        push(&mut out, format!("ws n=100 k={k} beta={beta} seed={s}"), g);
    }
    for n in 3..=8 {
        push(&mut out, format!("complete n={n}"), complete(n));
    }
    for n in [3, 4, 5, 6, 7, 8, 9, 10] {
        push(&mut out, format!("cycle n={n}"), cycle(n));
    }
    for d in [3, 4] {
        push(&mut out, format!("hypercube d={d}"), hypercube(d));
    }
    for leaves in 3..=8 {
        push(&mut out, format!("star+chord leaves={leaves}"), star_chord(leaves));
    }
    // triangle with a pendant path and a square with a pendant edge
    push(&mut out, "lollipop".into(), Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)]).unwrap());
    push(&mut out, "two cycles".into(), Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 0), (5, 6)]).unwrap());
    out
}
