//! Simple undirected graphs: ingestion, validation and derived matrices.
//!
//! Nodes are dense `0..n` internally. Each node keeps the label it had in the
//! input so reports can be written back in the caller's numbering.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Undirected edges as `(u, v)` with `u < v`, sorted lexicographically.
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    labels: Vec<u64>,
}

impl Graph {
    /// Builds a graph on `n` nodes labelled `0..n`.
    ///
    /// Duplicate edges (in either orientation) collapse to one. Self-loops and
    /// endpoints `>= n` are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::with_labels(n, edges, (0..n as u64).collect())
    }

    pub fn with_labels(n: usize, edges: &[(usize, usize)], labels: Vec<u64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("graph needs at least 2 nodes, got {n}")));
        }
        if labels.len() != n {
            return Err(Error::InvalidParams(format!(
                "{} labels for {n} nodes",
                labels.len()
            )));
        }
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParams(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::InvalidParams(format!("self-loop on node {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in &edges {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Graph { n, edges, neighbors, labels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> u64 {
        self.labels[i]
    }

    pub fn index_of_label(&self, label: u64) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Node of maximum degree; ties go to the smallest label.
    pub fn hub(&self) -> usize {
        let dmax = self.max_degree();
        (0..self.n)
            .filter(|&i| self.degree(i) == dmax)
            .min_by_key(|&i| self.labels[i])
            .unwrap_or(0)
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        a
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.neighbors[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced by `nodes`, renumbered densely in the given order.
    /// Labels carry over from this graph.
    pub fn induced(&self, nodes: &[usize]) -> Result<Graph> {
        let mut index = vec![usize::MAX; self.n];
        for (k, &v) in nodes.iter().enumerate() {
            index[v] = k;
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]))
            .collect();
        let labels = nodes.iter().map(|&v| self.labels[v]).collect();
        Graph::with_labels(nodes.len(), &edges, labels)
    }

    /// Largest connected component (first one on ties).
    pub fn largest_component(&self) -> Result<Graph> {
        let comps = self.components();
        let mut best = &comps[0];
        for c in &comps {
            if c.len() > best.len() {
                best = c;
            }
        }
        self.induced(best)
    }

    /// FNV-1a digest of node count and edge list.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut feed = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(PRIME);
            }
        };
        feed(self.n as u64);
        for &(u, v) in &self.edges {
            feed(u as u64);
            feed(v as u64);
        }
        h
    }

    /// Writes the graph in the edge-list text format, using node labels.
    ///
    /// Every line of `header` is emitted as a `#` comment, followed by a `%N`
    /// line fixing the node count (only meaningful when labels are `0..n`).
    pub fn to_edge_list(&self, header: &[String]) -> String {
        let mut out = String::new();
        for line in header {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "%N {}", self.n);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{} {}", self.labels[u], self.labels[v]);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delimiter {
    #[default]
    Whitespace,
    Comma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// 0 or 1.
    pub index_base: u64,
    pub delimiter: Delimiter,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { index_base: 0, delimiter: Delimiter::Whitespace }
    }
}

#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: Graph,
    /// Edges seen more than once in the input (either orientation).
    pub duplicate_edges: usize,
}

/// Parses an edge list: one `u v` pair per line, `#` comments, blank lines
/// ignored, optional `%N <count>` header fixing the node count.
pub fn parse_edge_list(text: &str, opts: ParseOptions) -> Result<ParsedGraph> {
    if opts.index_base > 1 {
        return Err(Error::InvalidParams(format!("index base must be 0 or 1, got {}", opts.index_base)));
    }
    let base = opts.index_base as i64;
    let mut declared_n: Option<usize> = None;
    let mut raw: Vec<(usize, i64, i64)> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("%N") {
            let count = rest.trim().parse::<usize>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad node-count header {body:?}"),
            })?;
            declared_n = Some(count);
            continue;
        }
        let tokens: Vec<&str> = match opts.delimiter {
            Delimiter::Whitespace => body.split_whitespace().collect(),
            Delimiter::Comma => body.split(',').map(str::trim).collect(),
        };
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected two node ids, found {} tokens", tokens.len()),
            });
        }
        let mut ids = [0i64; 2];
        for (slot, tok) in ids.iter_mut().zip(&tokens) {
            *slot = tok.parse::<i64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("not an integer node id: {tok:?}"),
            })?;
        }
        if ids[0] == ids[1] {
            return Err(Error::SelfLoop { line: lineno, node: ids[0].max(0) as u64 });
        }
        for &id in &ids {
            if id < base {
                return Err(Error::NodeOutOfRange { line: lineno, id });
            }
        }
        raw.push((lineno, ids[0], ids[1]));
    }

    if raw.is_empty() {
        return Err(Error::Parse { line: 0, message: "no edges in input".into() });
    }
    let max_id = raw.iter().map(|&(_, u, v)| u.max(v)).max().unwrap_or(base);
    let n = match declared_n {
        Some(n) => {
            if let Some(&(line, u, v)) = raw.iter().find(|&&(_, u, v)| u.max(v) - base >= n as i64) {
                return Err(Error::NodeOutOfRange { line, id: u.max(v) });
            }
            n
        }
        None => (max_id - base + 1) as usize,
    };

    let mut seen = BTreeSet::new();
    let mut duplicates = 0;
    let mut edges = Vec::with_capacity(raw.len());
    for &(_, u, v) in &raw {
        let (a, b) = ((u - base) as usize, (v - base) as usize);
        if seen.insert((a.min(b), a.max(b))) {
            edges.push((a, b));
        } else {
            duplicates += 1;
        }
    }
    let labels = (0..n as u64).map(|i| i + opts.index_base).collect();
    let graph = Graph::with_labels(n, &edges, labels).map_err(|e| match e {
        Error::InvalidParams(message) => Error::Parse { line: 0, message },
        other => other,
    })?;
    Ok(ParsedGraph { graph, duplicate_edges: duplicates })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphValidation {
    pub connected: bool,
    pub is_tree: bool,
    pub min_degree: usize,
    pub node_count: usize,
    pub edge_count: usize,
}

pub fn validate(g: &Graph) -> GraphValidation {
    let connected = g.components().len() == 1;
    GraphValidation {
        connected,
        is_tree: connected && g.edge_count() + 1 == g.n(),
        min_degree: g.degrees().into_iter().min().unwrap_or(0),
        node_count: g.n(),
        edge_count: g.edge_count(),
    }
}

/// Fails with `NotConnected` unless the graph is connected.
pub fn require_connected(g: &Graph) -> Result<GraphValidation> {
    let v = validate(g);
    if !v.connected {
        return Err(Error::NotConnected);
    }
    Ok(v)
}

/// Combinatorial Laplacian `L = D - A`.
pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let mut l = -g.adjacency();
    for i in 0..g.n() {
        l[(i, i)] = g.degree(i) as f64;
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ParsedGraph> {
        parse_edge_list(text, ParseOptions::default())
    }

    #[test]
    fn parses_triangle() {
        let p = parse("0 1\n1 2\n2 0").unwrap();
        assert_eq!(p.graph.n(), 3);
        assert_eq!(p.graph.edge_count(), 3);
        assert_eq!(p.duplicate_edges, 0);
    }

    #[test]
    fn one_based_duplicates_collapse() {
        let p = parse_edge_list("1 2\n2 1", ParseOptions { index_base: 1, ..Default::default() }).unwrap();
        assert_eq!(p.graph.n(), 2);
        assert_eq!(p.graph.edge_count(), 1);
        assert_eq!(p.duplicate_edges, 1);
        assert_eq!(p.graph.labels(), &[1, 2]);
    }

    #[test]
    fn rejects_self_loop() {
        assert!(matches!(parse("0 0"), Err(Error::SelfLoop { line: 1, .. })));
    }

    #[test]
    fn reports_malformed_line_number() {
        let err = parse("0 1\n# fine\n\n1 x\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 4, message: "not an integer node id: \"x\"".into() });
        assert!(matches!(parse("0 1 2"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn header_allows_isolated_nodes_and_bounds_ids() {
        let p = parse("%N 4\n0 1\n1 2").unwrap();
        assert_eq!(p.graph.n(), 4);
        assert!(!validate(&p.graph).connected);
        assert!(matches!(parse("%N 2\n0 1\n1 2"), Err(Error::NodeOutOfRange { line: 3, id: 2 })));
        assert!(matches!(
            parse_edge_list("0 1", ParseOptions { index_base: 1, ..Default::default() }),
            Err(Error::NodeOutOfRange { id: 0, .. })
        ));
    }

    #[test]
    fn comma_delimiter() {
        let p = parse_edge_list(
            "0, 1\n1,2 # trailing comment\n",
            ParseOptions { delimiter: Delimiter::Comma, ..Default::default() },
        )
        .unwrap();
        assert_eq!(p.graph.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn validation_flags() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let v = validate(&p3);
        assert!(v.connected && v.is_tree);
        assert_eq!(v.min_degree, 1);

        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let v = validate(&k3);
        assert!(v.connected && !v.is_tree);

        let split = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let v = validate(&split);
        assert!(!v.connected && !v.is_tree);
        assert_eq!(require_connected(&split), Err(Error::NotConnected));
    }

    #[test]
    fn laplacian_of_triangle() {
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let l = laplacian(&k3);
        let expected = DMatrix::from_row_slice(3, 3, &[2., -1., -1., -1., 2., -1., -1., -1., 2.]);
        assert_eq!(l, expected);
    }

    #[test]
    fn hub_breaks_ties_by_label() {
        let g = Graph::with_labels(4, &[(0, 1), (2, 3), (1, 2)], vec![10, 7, 3, 9]).unwrap();
        // nodes 1 and 2 both have degree 2; node 2 has the smaller label
        assert_eq!(g.hub(), 2);
    }

    #[test]
    fn largest_component_keeps_labels() {
        let g = Graph::from_edges(6, &[(0, 1), (2, 3), (3, 4), (4, 2)]).unwrap();
        let c = g.largest_component().unwrap();
        assert_eq!(c.n(), 3);
        assert_eq!(c.labels(), &[2, 3, 4]);
        assert_eq!(c.edge_count(), 3);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::from_edges(5, &[(0, 4), (1, 2), (2, 3)]).unwrap();
        let text = g.to_edge_list(&["model test".into()]);
        let back = parse(&text).unwrap().graph;
        assert_eq!(back, g);
    }
}
