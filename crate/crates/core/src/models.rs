//! Graph generators (rose, ER, BA, WS) and closed forms for the 4-petal rose.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::walks::WalkKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RoseSpec {
    pub m: usize,
    pub l: usize,
}

/// `m` cycles of length `l` glued at hub node 0.
///
/// Petal `i` owns nodes `1 + i(l-1) ..`: first the arm leaving the hub on one
/// side (levels `1..h-1`, `h = l/2`), then the other arm, then the node
/// farthest from the hub. For `l = 4` this gives internal nodes `3i+1`,
/// `3i+2` and peripheral node `3i+3`.
pub fn make_rose(spec: RoseSpec) -> Result<Graph> {
    let RoseSpec { m, l } = spec;
    if m < 2 {
        return Err(Error::InvalidParams(format!("rose needs m >= 2 petals, got {m}")));
    }
    if l < 4 || l % 2 != 0 {
        return Err(Error::InvalidParams(format!("rose cycle length must be even and >= 4, got {l}")));
    }
    let h = l / 2;
    let n = 1 + m * (l - 1);
    let mut edges = Vec::with_capacity(m * l);
    for i in 0..m {
        let base = 1 + i * (l - 1);
        let far = base + 2 * (h - 1);
        for arm in 0..2 {
            let start = base + arm * (h - 1);
            edges.push((0, start));
            for k in 0..(h - 2) {
                edges.push((start + k, start + k + 1));
            }
            edges.push((start + h - 2, far));
        }
    }
    Graph::from_edges(n, &edges)
}

/// Distance of every node from the hub.
pub fn rose_levels(spec: RoseSpec) -> Vec<usize> {
    let h = spec.l / 2;
    let mut lv = vec![0];
    for _ in 0..spec.m {
        for _ in 0..2 {
            lv.extend(1..h);
        }
        lv.push(h);
    }
    lv
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RoseClass {
    Hub,
    Internal,
    Peripheral,
}

/// Class of `node` in the `l = 4` rose.
pub fn rose4_class(node: usize) -> RoseClass {
    match node {
        0 => RoseClass::Hub,
        v if v % 3 == 0 => RoseClass::Peripheral,
        _ => RoseClass::Internal,
    }
}

/// Mean hitting times between node classes. Same-class entries refer to
/// nodes of one petal; pairs in different petals route through the hub.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassTimes {
    pub i_to_h: f64,
    pub p_to_h: f64,
    pub h_to_i: f64,
    /// Between the two internal nodes of one petal.
    pub i_to_i: f64,
    /// From a peripheral node to an internal node of its own petal.
    pub p_to_i: f64,
    pub h_to_p: f64,
    /// From an internal node to the peripheral node of its own petal.
    pub i_to_p: f64,
}

impl ClassTimes {
    /// `T_ij` for two nodes of the `l = 4` rose.
    pub fn pair(&self, i: usize, j: usize) -> f64 {
        use RoseClass::*;
        if i == j {
            return 0.0;
        }
        let petal = |v: usize| (v - 1) / 3;
        let to_hub = |v: usize| match rose4_class(v) {
            Hub => 0.0,
            Internal => self.i_to_h,
            Peripheral => self.p_to_h,
        };
        let from_hub = |v: usize| match rose4_class(v) {
            Hub => 0.0,
            Internal => self.h_to_i,
            Peripheral => self.h_to_p,
        };
        if i == 0 || j == 0 || petal(i) != petal(j) {
            return to_hub(i) + from_hub(j);
        }
        match (rose4_class(i), rose4_class(j)) {
            (Internal, Internal) => self.i_to_i,
            (Peripheral, Internal) => self.p_to_i,
            (Internal, Peripheral) => self.i_to_p,
            _ => unreachable!("distinct nodes in one petal"),
        }
    }

    /// Sum of `T_ij` over all ordered pairs of the rose with `m` petals.
    pub fn total(&self, m: usize) -> f64 {
        let m = m as f64;
        (6.0 * m * m - 4.0 * m) * (self.i_to_h + self.h_to_i)
            + (3.0 * m * m - 2.0 * m) * (self.p_to_h + self.h_to_p)
            + 2.0 * m * (self.i_to_i + self.p_to_i + self.i_to_p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassPi {
    pub hub: f64,
    pub internal: f64,
    pub peripheral: f64,
}

impl ClassPi {
    pub fn of(&self, node: usize) -> f64 {
        match rose4_class(node) {
            RoseClass::Hub => self.hub,
            RoseClass::Internal => self.internal,
            RoseClass::Peripheral => self.peripheral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoseWalkOracle {
    pub pi: ClassPi,
    pub times: ClassTimes,
    pub t_hub: f64,
    pub t_global: f64,
}

/// The same quantities written in terms of `N = 3m + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoseNForms {
    pub pi: ClassPi,
    pub t_hub: f64,
    pub t_global: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoseOracle4 {
    pub m: usize,
    pub n: usize,
    pub edges: usize,
    pub kappa1: f64,
    /// Outgoing non-backtracking centrality by class, unit-norm stacked `z`.
    pub x_hub: f64,
    pub x_int: f64,
    pub x_per: f64,
    /// Normaliser of the NBCRW stationary distribution.
    pub q_norm: f64,
    pub lambda1: f64,
    pub psi_hub: f64,
    pub psi_int: f64,
    pub psi_per: f64,
    pub turw: RoseWalkOracle,
    pub nbcrw: RoseWalkOracle,
    pub merw: RoseWalkOracle,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

impl RoseOracle4 {
    pub fn walk(&self, kind: WalkKind) -> &RoseWalkOracle {
        match kind {
            WalkKind::Turw => &self.turw,
            WalkKind::Nbcrw => &self.nbcrw,
            WalkKind::Merw => &self.merw,
        }
    }

    pub fn x_of(&self, node: usize) -> f64 {
        match rose4_class(node) {
            RoseClass::Hub => self.x_hub,
            RoseClass::Internal => self.x_int,
            RoseClass::Peripheral => self.x_per,
        }
    }

    pub fn psi_of(&self, node: usize) -> f64 {
        match rose4_class(node) {
            RoseClass::Hub => self.psi_hub,
            RoseClass::Internal => self.psi_int,
            RoseClass::Peripheral => self.psi_per,
        }
    }

    /// Stationary probabilities, hub time and global mean in their `N`-only
    /// form; must coincide with the `m` form.
    pub fn nforms(&self, kind: WalkKind) -> RoseNForms {
        let n = self.n as f64;
        let r = (6.0 * n - 15.0).sqrt();
        match kind {
            WalkKind::Turw => RoseNForms {
                pi: ClassPi { hub: 0.25, internal: 3.0 / (4.0 * (n - 1.0)), peripheral: 3.0 / (4.0 * (n - 1.0)) },
                t_hub: 10.0 / 3.0,
                t_global: 20.0 * (n - 1.0) * (n - 2.0) / (9.0 * n),
            },
            WalkKind::Nbcrw => RoseNForms {
                pi: ClassPi {
                    hub: (n - 1.0) / (2.0 * (n - 1.0) + 2.0 * r),
                    internal: 3.0 / (4.0 * (n - 1.0)),
                    peripheral: (3.0 * (n - 1.0) * r - 18.0 * n + 45.0) / (2.0 * (n - 1.0) * (n - 4.0).powi(2)),
                },
                t_hub: 4.0 / 3.0 + 2.0 * r / (n - 1.0),
                t_global: (2.0 * n * n + 30.0 * n - 192.0) / (9.0 * r)
                    + (268.0 + 20.0 * r) / (9.0 * n * r)
                    + (12.0 * n - 32.0) / 9.0,
            },
            WalkKind::Merw => RoseNForms {
                pi: ClassPi {
                    hub: (n - 1.0) / (2.0 * (n - 1.0) + 6.0),
                    internal: 3.0 / (4.0 * (n - 1.0)),
                    peripheral: 9.0 / (2.0 * (n + 2.0) * (n - 1.0)),
                },
                t_hub: 4.0 / 3.0 + 6.0 / (n - 1.0),
                t_global: (2.0 * n.powi(3) + 30.0 * n * n - 36.0 * n - 104.0) / (27.0 * n),
            },
        }
    }
}

fn walk_oracle(m: usize, pi: ClassPi, times: ClassTimes, t_hub: f64, t_global: f64) -> RoseWalkOracle {
    let mf = m as f64;
    let n = 3.0 * mf + 1.0;
    let w = RoseWalkOracle { pi, times, t_hub, t_global };
    assert!(close(pi.hub + 2.0 * mf * pi.internal + mf * pi.peripheral, 1.0), "class probabilities");
    assert!(close(t_hub, (2.0 * times.i_to_h + times.p_to_h) / 3.0), "hub time");
    assert!(close(t_global, times.total(m) / (n * (n - 1.0))), "global mean");
    w
}

/// Closed forms for `R_m^4`, evaluated in their `m` form.
pub fn rose4_oracle(m: usize) -> Result<RoseOracle4> {
    if m < 2 {
        return Err(Error::InvalidParams(format!("rose needs m >= 2 petals, got {m}")));
    }
    let mf = m as f64;
    let n = 3.0 * mf + 1.0;
    let s = (2.0 * mf - 1.0).sqrt();
    let k = s.sqrt();
    let k2 = k * k;
    let sm = mf.sqrt();

    let den = ((k2 + 1.0)
        * (k.powi(8)
            + 2.0 * k.powi(6)
            + 2.0 * (8.0 * mf - 3.0) * k.powi(4)
            + 2.0 * (2.0 * mf - 1.0).powi(2) * k2
            + (2.0 * mf - 1.0).powi(2)))
    .sqrt();
    let x_hub = 2.0 * sm * k.powi(3) / den;
    let x_int = k2 * (k2 + 2.0 * mf - 1.0) / (sm * den);
    let x_per = k * (k.powi(4) + 2.0 * mf - 1.0) / (sm * den);
    let q_norm = 2.0 * k * (2.0 * mf * mf + mf - 1.0 + s * (3.0 * mf - 1.0)) / ((s + 1.0) * (mf * (5.0 + s) - 2.0));

    let turw = walk_oracle(
        m,
        ClassPi { hub: 0.25, internal: 1.0 / (4.0 * mf), peripheral: 1.0 / (4.0 * mf) },
        ClassTimes {
            i_to_h: 3.0,
            p_to_h: 4.0,
            h_to_i: 6.0 * mf - 3.0,
            i_to_i: 4.0 * mf,
            p_to_i: 2.0 * mf + 1.0,
            h_to_p: 8.0 * mf - 4.0,
            i_to_p: 4.0 * mf - 1.0,
        },
        10.0 / 3.0,
        20.0 * mf * (3.0 * mf - 1.0) / (3.0 * (3.0 * mf + 1.0)),
    );

    let nbcrw = walk_oracle(
        m,
        ClassPi {
            hub: mf / (2.0 * (mf + s)),
            internal: 1.0 / (4.0 * mf),
            peripheral: (mf * s - 2.0 * mf + 1.0) / (2.0 * mf * (mf - 1.0).powi(2)),
        },
        ClassTimes {
            i_to_h: 1.0 + 2.0 * s / mf,
            p_to_h: 2.0 + 2.0 * s / mf,
            h_to_i: 4.0 * mf + 2.0 * s - 1.0 - 2.0 * s / mf,
            i_to_i: 4.0 * mf,
            p_to_i: 2.0 * mf + 1.0,
            h_to_p: (4.0 * mf * mf * s + 2.0 * mf.powi(3) + 4.0 * mf * mf - 2.0 * mf * s - 6.0 * mf + 2.0) / (mf * s),
            i_to_p: 2.0 * mf * mf / s + 2.0 * mf - 1.0,
        },
        4.0 / 3.0 + 2.0 * s / mf,
        (2.0 * mf.powi(3) + 12.0 * mf * mf - 14.0 * mf + 4.0) / (n * s) + (36.0 * mf * mf - 8.0 * mf) / (3.0 * n),
    );

    let merw = walk_oracle(
        m,
        ClassPi {
            hub: mf / (2.0 * mf + 2.0),
            internal: 1.0 / (4.0 * mf),
            peripheral: 1.0 / (2.0 * mf * (mf + 1.0)),
        },
        ClassTimes {
            i_to_h: (mf + 2.0) / mf,
            p_to_h: 2.0 * (mf + 1.0) / mf,
            h_to_i: 4.0 * mf + 1.0 - 2.0 / mf,
            i_to_i: 4.0 * mf,
            p_to_i: 2.0 * mf + 1.0,
            h_to_p: 2.0 * (mf + 1.0) * (mf * mf + mf - 1.0) / mf,
            i_to_p: 2.0 * mf * (mf + 1.0) - 1.0,
        },
        4.0 / 3.0 + 2.0 / mf,
        (6.0 * mf.powi(3) + 36.0 * mf * mf + 10.0 * mf - 12.0) / (9.0 * mf + 3.0),
    );

    let two_m2 = (2.0 * mf + 2.0).sqrt();
    Ok(RoseOracle4 {
        m,
        n: 3 * m + 1,
        edges: 4 * m,
        kappa1: k,
        x_hub,
        x_int,
        x_per,
        q_norm,
        lambda1: two_m2,
        psi_hub: sm / two_m2,
        psi_int: 1.0 / (2.0 * sm),
        psi_per: 1.0 / (sm * two_m2),
        turw,
        nbcrw,
        merw,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub m: usize,
    pub n: usize,
    pub t_global: f64,
}

pub fn scaling_table(kind: WalkKind, ms: &[usize]) -> Result<Vec<ScalingRow>> {
    ms.iter()
        .map(|&m| {
            let o = rose4_oracle(m)?;
            Ok(ScalingRow { m, n: o.n, t_global: o.walk(kind).t_global })
        })
        .collect()
}

/// Least-squares slope of `ln t_global` against `ln n`.
pub fn fit_loglog_slope(rows: &[ScalingRow]) -> Result<f64> {
    if rows.len() < 2 {
        return Err(Error::InvalidParams("slope fit needs at least two rows".into()));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.n as f64).ln(), r.t_global.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParams("slope fit needs distinct sizes".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum GenModel {
    Er { n: usize, p: f64 },
    Ba { n: usize, m_attach: usize },
    Ws { n: usize, k: usize, beta: f64 },
    Rose { m: usize, l: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub model: GenModel,
    pub seed: u64,
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.model {
            GenModel::Er { n, p } => write!(f, "er n={n} p={p} seed={}", self.seed),
            GenModel::Ba { n, m_attach } => write!(f, "ba n={n} m_attach={m_attach} seed={}", self.seed),
            GenModel::Ws { n, k, beta } => write!(f, "ws n={n} k={k} beta={beta} seed={}", self.seed),
            GenModel::Rose { m, l } => write!(f, "rose m={m} l={l}"),
        }
    }
}

pub fn generate(spec: GenSpec) -> Result<Graph> {
    match spec.model {
        GenModel::Er { n, p } => gen_er(n, p, spec.seed),
        GenModel::Ba { n, m_attach } => gen_ba(n, m_attach, spec.seed),
        GenModel::Ws { n, k, beta } => gen_ws(n, k, beta, spec.seed),
        GenModel::Rose { m, l } => make_rose(RoseSpec { m, l }),
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must lie in [0, 1], got {p}")))
    }
}

/// `G(n, p)`: each pair `i < j` in lexicographic order kept with probability `p`.
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_prob("p", p)?;
    if n < 2 {
        return Err(Error::InvalidParams(format!("need n >= 2, got {n}")));
    }
    let mut rng = rng_for(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Preferential attachment from a clique on `m_attach + 1` nodes. Each new
/// node draws `m_attach` distinct targets with probability proportional to
/// degree, redrawing on repeats.
pub fn gen_ba(n: usize, m_attach: usize, seed: u64) -> Result<Graph> {
    if m_attach < 1 || n <= m_attach + 1 {
        return Err(Error::InvalidParams(format!("BA needs 1 <= m_attach < n - 1, got n={n} m_attach={m_attach}")));
    }
    let mut rng = rng_for(seed);
    let mut edges = Vec::with_capacity(m_attach * n);
    // every node appears once per unit of degree
    let mut ends: Vec<usize> = Vec::with_capacity(2 * m_attach * n);
    for i in 0..=m_attach {
        for j in (i + 1)..=m_attach {
            edges.push((i, j));
            ends.push(i);
            ends.push(j);
        }
    }
    let mut chosen = Vec::with_capacity(m_attach);
    for v in (m_attach + 1)..n {
        chosen.clear();
        while chosen.len() < m_attach {
            let t = ends[rng.random_range(0..ends.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, v));
            ends.push(t);
            ends.push(v);
        }
    }
    Graph::from_edges(n, &edges)
}

/// Ring lattice with `k/2` neighbours per side; every lattice edge `(u, u+j)`
/// is rewired to `(u, w)` with probability `beta`, `w` uniform among nodes
/// that keep the graph simple.
pub fn gen_ws(n: usize, k: usize, beta: f64, seed: u64) -> Result<Graph> {
    check_prob("beta", beta)?;
    if k < 2 || !k.is_multiple_of(2) || k >= n {
        return Err(Error::InvalidParams(format!("WS needs even k with 2 <= k < n, got n={n} k={k}")));
    }
    let mut rng = rng_for(seed);
    let mut adj = vec![std::collections::BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if rng.random::<f64>() >= beta || !adj[u].contains(&v) || adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    let mut edges = Vec::new();
    for (u, nb) in adj.iter().enumerate() {
        edges.extend(nb.range(u + 1..).map(|&v| (u, v)));
    }
    Graph::from_edges(n, &edges)
}
