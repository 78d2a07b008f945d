//! Random walks biased by non-backtracking centrality, next to the unbiased
//! and maximal-entropy walks, on simple undirected graphs.
//!
//! Every quantity has at least two independent routes: spectral formulas vs
//! linear solves for hitting times, closed form vs linear solve for
//! stationary vectors, the explicit non-backtracking matrix vs its reduced
//! `2N x 2N` form, and closed forms on 4-petal rose graphs.

pub mod error;
pub mod graph;
pub mod hitting;
pub mod linalg;
pub mod models;
pub mod nb;
pub mod simulate;
pub mod spectral;
pub mod walks;
pub mod weighted;

pub use error::{Error, ErrorKind, Result};
pub use graph::{laplacian, parse_edge_list, validate, Delimiter, Graph, GraphValidation, ParseOptions, ParsedGraph};
pub use hitting::{
    eq26_audit, hitting_linear, hitting_spectral, hub_report, HittingMethod, HittingReport, HubReport, SpectralOptions,
};
pub use models::{gen_ba, gen_er, gen_ws, make_rose, rose4_oracle, GenModel, GenSpec, RoseOracle4, RoseSpec};
pub use nb::{nb_centrality, verify_b_vs_m, NbCentrality};
pub use simulate::{simulate_hitting, simulate_stationary, SimConfig, SimResult};
pub use spectral::{sym_eig, SpectralDecomposition, DEFAULT_TOL};
pub use walks::{
    detailed_balance_residual, ipr, stationary_closed, stationary_generic, transition, StationaryDistribution,
    TransitionMatrix, WalkKind, WalkOptions,
};
pub use weighted::{weighted_from_centrality, weighted_laplacian, WeightedGraph};
