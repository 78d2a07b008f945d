//! Fixtures shared by the benchmarks.

use nbcrw_core::graph::validate;
use nbcrw_core::models::{gen_ba, gen_er, make_rose, RoseSpec};
use nbcrw_core::Graph;

/// Named benchmark graphs: a rose, an ER giant component and a BA graph.
pub fn fixtures(n: usize) -> Vec<(String, Graph)> {
    let rose = make_rose(RoseSpec { m: n.div_ceil(3).max(2), l: 4 }).expect("rose");
    let er = gen_er(n, 6.0 / n as f64, 11).expect("er");
    let er = if validate(&er).connected { er } else { er.largest_component().expect("component") };
    let ba = gen_ba(n, 2, 11).expect("ba");
    vec![(format!("rose_{}", rose.n()), rose), (format!("er_{}", er.n()), er), (format!("ba_{}", ba.n()), ba)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_connected_with_cycles() {
        for (name, g) in fixtures(60) {
            let v = validate(&g);
            assert!(v.connected && !v.is_tree, "{name}");
        }
    }
}
