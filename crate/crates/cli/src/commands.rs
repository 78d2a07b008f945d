use std::path::Path;

use nalgebra::DMatrix;
use serde_json::{json, Value};

use nbcrw_core::graph::{parse_edge_list, Delimiter, Graph, ParseOptions};
use nbcrw_core::hitting::{
    eq26_audit, hitting_linear, hitting_linear_target, hitting_spectral, max_matrix_gap, HittingReport, SpectralOptions,
};
use nbcrw_core::models::{fit_loglog_slope, generate, rose4_oracle, scaling_table, GenModel, GenSpec};
use nbcrw_core::nb::nb_centrality;
use nbcrw_core::simulate::{simulate_hitting, simulate_stationary, SimConfig};
use nbcrw_core::walks::{
    detailed_balance_residual, ipr, perron, stationary_closed, stationary_generic, transition, WalkKind, WalkOptions,
};

use crate::args::{DelimiterArg, Global, Input, MethodArg, ModelArg, ScalingKind, SimModeArg, WalkArg};
use crate::output::{num, read_input, CliError, CliResult, InputDigest, Payload, Table};

/// Matrices above this many nodes are left out unless asked for.
const MATRIX_LIMIT: usize = 500;

pub struct Loaded {
    pub graph: Graph,
    pub digest: InputDigest,
}

pub fn load(input: &Input) -> CliResult<Loaded> {
    let (text, digest) = read_input(&input.graph)?;
    let opts = ParseOptions {
        index_base: input.index_base,
        delimiter: match input.delimiter {
            DelimiterArg::Whitespace => Delimiter::Whitespace,
            DelimiterArg::Comma => Delimiter::Comma,
        },
    };
    let parsed = parse_edge_list(&text, opts)?;
    if parsed.duplicate_edges > 0 {
        eprintln!("warning: {} duplicate edge(s) collapsed", parsed.duplicate_edges);
    }
    Ok(Loaded { graph: parsed.graph, digest })
}

fn walk_opts(g: &Global, regularize: Option<f64>) -> WalkOptions {
    WalkOptions { tol: g.tol, regularize }
}

fn node_index(g: &Graph, label: u64) -> CliResult<usize> {
    g.index_of_label(label).ok_or_else(|| CliError::invalid(format!("no node with id {label}")))
}

fn matrix_json(t: &DMatrix<f64>) -> Value {
    Value::Array((0..t.nrows()).map(|i| json!(t.row(i).iter().copied().collect::<Vec<f64>>())).collect())
}

fn per_node_table(g: &Graph, columns: Vec<(String, Vec<f64>)>) -> Table {
    let mut header = vec!["node".to_string()];
    header.extend(columns.iter().map(|c| c.0.clone()));
    let rows = (0..g.n())
        .map(|i| {
            let mut r = vec![g.label(i).to_string()];
            r.extend(columns.iter().map(|c| num(c.1[i])));
            r
        })
        .collect();
    Table { header, rows, trailer: Vec::new() }
}

pub fn centrality(global: &Global, l: &Loaded) -> CliResult<Payload> {
    let g = &l.graph;
    let c = nb_centrality(g, global.tol)?;
    let pf = perron(g, global.tol)?;
    let degrees: Vec<f64> = g.degrees().iter().map(|&d| d as f64).collect();
    let json = json!({
        "kappa": c.kappa,
        "x": c.x,
        "y": c.y,
        "residual": c.residual,
        "iterations": c.iterations,
        "lambda1": pf.lambda1,
        "psi1": pf.psi1,
        "degrees": g.degrees(),
        "labels": g.labels(),
    });
    let mut table = per_node_table(
        g,
        vec![("degree".into(), degrees), ("x".into(), c.x.clone()), ("y".into(), c.y.clone()), ("psi1".into(), pf.psi1.clone())],
    );
    table.trailer.push(format!("kappa {}", num(c.kappa)));
    table.trailer.push(format!("lambda1 {}", num(pf.lambda1)));
    Ok(Payload::Report { json, table: Some(table) })
}

pub fn stationary(global: &Global, l: &Loaded, walk: WalkArg, check: bool, regularize: Option<f64>) -> CliResult<Payload> {
    let g = &l.graph;
    let opts = walk_opts(global, regularize);
    let mut reports = Vec::new();
    let mut columns = Vec::new();
    for kind in walk.kinds() {
        let pi = stationary_closed(kind, g, opts)?;
        let s = ipr(&pi.pi);
        let mut rep = json!({ "kind": kind, "pi": pi.pi, "ipr": s, "method": pi.method });
        if check {
            let p = transition(kind, g, opts)?;
            let generic = stationary_generic(&p)?;
            let gap = pi.pi.iter().zip(&generic.pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            rep["check"] = json!({
                "linear_solve_gap": gap,
                "balance_residual": pi.balance_residual(&p),
                "detailed_balance_residual": detailed_balance_residual(&pi.pi, &p),
                "row_sum_error": p.row_sum_error(),
            });
        }
        columns.push((format!("pi_{kind}"), pi.pi.clone()));
        reports.push((kind, s, rep));
    }
    let mut table = per_node_table(g, columns);
    table.trailer.extend(reports.iter().map(|(k, s, _)| format!("ipr_{k} {}", num(*s))));
    let json = json!({ "labels": g.labels(), "reports": reports.into_iter().map(|r| r.2).collect::<Vec<_>>() });
    Ok(Payload::Report { json, table: Some(table) })
}

fn report_json(g: &Graph, r: &HittingReport, with_matrix: bool) -> Value {
    let mut v = json!({
        "kind": r.kind,
        "method": r.method,
        "t_global": r.t_global,
        "t_partial": r.t_partial,
    });
    if let Some(gap) = r.aggregation_gap() {
        v["aggregation_gap"] = json!(gap);
    }
    if with_matrix {
        if let Some(t) = &r.t {
            v["t_matrix"] = matrix_json(t);
        }
    }
    let _ = g;
    v
}

#[allow(clippy::too_many_arguments)]
pub fn hitting(
    global: &Global,
    l: &Loaded,
    walk: WalkArg,
    method: MethodArg,
    targets: &[String],
    full_matrix: bool,
    verbatim_eq26: bool,
    regularize: Option<f64>,
) -> CliResult<Payload> {
    let g = &l.graph;
    let show_matrix = full_matrix || g.n() <= MATRIX_LIMIT;
    let mut want_hub = false;
    let mut want_global = false;
    let mut nodes = Vec::new();
    for t in targets {
        match t.trim() {
            "hub" => want_hub = true,
            "global" => want_global = true,
            other => {
                let label: u64 = other.parse().map_err(|_| CliError::invalid(format!("bad target {other:?}")))?;
                nodes.push((label, node_index(g, label)?));
            }
        }
    }
    let hub = g.hub();
    let sopts = SpectralOptions { tol: global.tol, with_matrix: show_matrix, verbatim_eq26, regularize };

    let mut out = Vec::new();
    let mut columns = Vec::new();
    let mut trailer = Vec::new();
    for kind in walk.kinds() {
        let verbatim = verbatim_eq26 && kind == WalkKind::Nbcrw;
        let spectral = match method {
            MethodArg::Linear => None,
            MethodArg::Spectral => Some(hitting_spectral(kind, g, SpectralOptions { verbatim_eq26: verbatim, ..sopts })?),
            MethodArg::Both => Some(hitting_spectral(
                kind,
                g,
                SpectralOptions { verbatim_eq26: verbatim, with_matrix: true, ..sopts },
            )?),
        };
        let linear = match method {
            MethodArg::Spectral => None,
            _ => Some(hitting_linear(&transition(kind, g, walk_opts(global, regularize))?)?),
        };
        let primary = spectral.as_ref().or(linear.as_ref()).expect("at least one method");

        let mut rep = json!({ "kind": kind });
        if let Some(s) = &spectral {
            rep["spectral"] = report_json(g, s, show_matrix);
        }
        if let Some(lr) = &linear {
            rep["linear"] = report_json(g, lr, show_matrix);
        }
        if let (Some(s), Some(lr)) = (&spectral, &linear) {
            let gap = max_matrix_gap(s, lr).expect("both matrices");
            rep["comparison"] = json!({
                "max_gap": gap,
                "relative_gap": gap / (1.0 + lr.max_t().unwrap_or(0.0)),
                "t_global_gap": (s.t_global - lr.t_global).abs(),
            });
        }
        if want_hub {
            rep["hub"] = json!({ "node": g.label(hub), "degree": g.degree(hub), "t_hub": primary.t_partial[hub] });
            trailer.push(format!("t_hub_{kind} {}", num(primary.t_partial[hub])));
        }
        if want_global {
            rep["t_global"] = json!(primary.t_global);
            trailer.push(format!("t_global_{kind} {}", num(primary.t_global)));
        }
        if !nodes.is_empty() {
            rep["nodes"] = Value::Array(
                nodes.iter().map(|&(label, i)| json!({ "node": label, "t_partial": primary.t_partial[i] })).collect(),
            );
        }
        if verbatim {
            let audit = eq26_audit(g, SpectralOptions { with_matrix: true, verbatim_eq26: false, ..sopts })?;
            eprintln!(
                "note: printed pairwise NBCRW formula gives <T> = {} against {} from the linear solve (ratio {:.6})",
                audit.verbatim_global, audit.linear_global, audit.verbatim_ratio
            );
            rep["eq26_audit"] = serde_json::to_value(&audit).expect("audit serialises");
        }
        columns.push((format!("t_partial_{kind}"), primary.t_partial.clone()));
        out.push(rep);
    }
    let mut table = per_node_table(g, columns);
    table.trailer = trailer;
    let json = json!({ "labels": g.labels(), "hub": g.label(hub), "matrix_included": show_matrix, "reports": out });
    Ok(Payload::Report { json, table: Some(table) })
}

pub struct GenArgs {
    pub model: ModelArg,
    pub n: usize,
    pub p: f64,
    pub m_attach: usize,
    pub k: usize,
    pub beta: f64,
    pub m: usize,
    pub l: usize,
    pub largest_component: bool,
}

pub fn generate_cmd(global: &Global, a: &GenArgs, manifest_line: &str) -> CliResult<Payload> {
    let model = match a.model {
        ModelArg::Er => GenModel::Er { n: a.n, p: a.p },
        ModelArg::Ba => GenModel::Ba { n: a.n, m_attach: a.m_attach },
        ModelArg::Ws => GenModel::Ws { n: a.n, k: a.k, beta: a.beta },
        ModelArg::Rose => GenModel::Rose { m: a.m, l: a.l },
    };
    let spec = GenSpec { model, seed: global.seed };
    let mut g = generate(spec)?;
    if a.largest_component {
        g = g.largest_component()?;
    }
    let header = vec![
        format!("nbcrw {} generate", env!("CARGO_PKG_VERSION")),
        spec.to_string(),
        format!("nodes {} edges {}{}", g.n(), g.edge_count(), if a.largest_component { " (largest component)" } else { "" }),
        format!("manifest {manifest_line}"),
    ];
    Ok(Payload::Text(g.to_edge_list(&header)))
}

pub fn rose_oracle_cmd(m: usize, walk: WalkArg) -> CliResult<Payload> {
    let o = rose4_oracle(m)?;
    let mut json = serde_json::to_value(&o).expect("oracle serialises");
    let keep = walk.kinds();
    let mut nforms = serde_json::Map::new();
    for kind in WalkKind::ALL {
        if keep.contains(&kind) {
            nforms.insert(kind.to_string(), serde_json::to_value(o.nforms(kind)).expect("serialises"));
        } else if let Some(obj) = json.as_object_mut() {
            obj.remove(kind.as_str());
        }
    }
    json["n_forms"] = Value::Object(nforms);
    Ok(Payload::Report { json, table: None })
}

pub fn compare(global: &Global, l: &Loaded, path: &Path) -> CliResult<Payload> {
    let g = &l.graph;
    let hub = g.hub();
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "-".into());
    let sopts = SpectralOptions { tol: global.tol, with_matrix: false, ..SpectralOptions::default() };
    let header = ["graph", "walk", "n", "ipr", "pi_hub", "t_hub", "t_global"].map(String::from).to_vec();
    let mut rows = Vec::new();
    let mut out = Vec::new();
    for kind in WalkKind::ALL {
        let pi = stationary_closed(kind, g, walk_opts(global, None))?;
        let h = hitting_spectral(kind, g, sopts)?;
        let s = ipr(&pi.pi);
        rows.push(vec![
            name.clone(),
            kind.to_string(),
            g.n().to_string(),
            num(s),
            num(pi.pi[hub]),
            num(h.t_partial[hub]),
            num(h.t_global),
        ]);
        out.push(json!({
            "graph": name, "walk": kind, "n": g.n(), "ipr": s,
            "pi_hub": pi.pi[hub], "t_hub": h.t_partial[hub], "t_global": h.t_global,
        }));
    }
    let json = json!({ "hub": g.label(hub), "rows": out });
    Ok(Payload::Report { json, table: Some(Table { header, rows, trailer: Vec::new() }) })
}

pub fn parse_range(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::invalid(format!("m range must look like a:b with 2 <= a < b, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a < 2 || b <= a {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn scaling(kind: ScalingKind, range: &str) -> CliResult<Payload> {
    let (a, b) = parse_range(range)?;
    let ms: Vec<usize> = (a..=b).collect();
    let kinds = match kind {
        ScalingKind::Turw => vec![WalkKind::Turw],
        ScalingKind::Merw => vec![WalkKind::Merw],
        ScalingKind::Nbcrw => vec![WalkKind::Nbcrw],
        ScalingKind::All => WalkKind::ALL.to_vec(),
    };
    let header = ["walk", "m", "n", "t_global"].map(String::from).to_vec();
    let mut rows = Vec::new();
    let mut trailer = Vec::new();
    let mut out = Vec::new();
    for kind in kinds {
        let table = scaling_table(kind, &ms)?;
        let slope = fit_loglog_slope(&table)?;
        rows.extend(table.iter().map(|r| vec![kind.to_string(), r.m.to_string(), r.n.to_string(), num(r.t_global)]));
        trailer.push(format!("slope {kind} {}", num(slope)));
        out.push(json!({ "kind": kind, "slope": slope, "rows": table }));
    }
    Ok(Payload::Report { json: json!({ "m_range": [a, b], "fits": out }), table: Some(Table { header, rows, trailer }) })
}

pub struct SimArgs {
    pub walk: WalkArg,
    pub mode: SimModeArg,
    pub source: u64,
    pub target: Option<u64>,
    pub trials: u64,
    pub max_steps: u64,
    pub burn_in: u64,
    pub regularize: Option<f64>,
}

pub fn simulate(global: &Global, l: &Loaded, a: &SimArgs) -> CliResult<Payload> {
    let g = &l.graph;
    let kind = match a.walk.kinds().as_slice() {
        [k] => *k,
        _ => return Err(CliError::invalid("simulate needs a single walk kind")),
    };
    let opts = walk_opts(global, a.regularize);
    let p = transition(kind, g, opts)?;
    let cfg = SimConfig { seed: global.seed, trials: a.trials, max_steps: a.max_steps, burn_in: a.burn_in };
    let source = node_index(g, a.source)?;
    let json = match a.mode {
        SimModeArg::Stationary => {
            let r = simulate_stationary(&p, source, cfg)?;
            let exact = stationary_closed(kind, g, opts)?.pi;
            let z: Vec<f64> = (0..g.n()).map(|i| (r.estimates[i] - exact[i]) / r.std_errors[i]).collect();
            json!({ "kind": kind, "labels": g.labels(), "result": r, "exact": exact, "z_scores": z })
        }
        SimModeArg::Hitting => {
            let label = a.target.ok_or_else(|| CliError::invalid("hitting mode needs --target"))?;
            let target = node_index(g, label)?;
            let r = simulate_hitting(&p, source, target, cfg)?;
            let exact = hitting_linear_target(&p, target)?[source];
            let z = r.estimates.first().zip(r.std_errors.first()).map(|(e, s)| (e - exact) / s);
            json!({ "kind": kind, "source": a.source, "target": label, "result": r, "exact": exact, "z_score": z })
        }
    };
    Ok(Payload::Report { json, table: None })
}
