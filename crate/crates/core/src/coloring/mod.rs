//! Discrepancy: exact, heuristic and hereditary values, the pigeonhole
//! partial coloring, and the halving drivers built on it.

pub mod exact;
pub mod halving;
pub mod partial;
pub mod search;

use serde::Serialize;

use crate::space::Coloring;

pub use exact::{disc_exact, hdisc_exact, HdiscResult, DISC_LIMIT, HDISC_LIMIT};
pub use halving::{
    matousek_color, matousek_color_with, spencer_color, spencer_color_with, HalvingOptions,
    HalvingResult, MatousekResult, RoundReport,
};
pub use partial::{
    entropy_budget_check, origin_sequence, partial_color, pigeonhole_exhaustive,
    pigeonhole_sample, BudgetCheck, Method, PartialColorResult,
};
pub use search::disc_heuristic;

/// A full coloring and its value `sup_t |Σ ε_i t_i|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscResult {
    pub value: f64,
    pub coloring: Coloring,
    /// True only for exhaustive results.
    pub exact: bool,
}
