//! Edge-map scoring and rule search.

mod compare;
mod search;
mod shapes;

pub use compare::{compare, localization_precision, EdgeComparison};
pub use search::{
    candidate_rules, search_rules, CorpusPair, CorpusSummary, RuleSearchReport, SearchConfig,
    CANNY_TOP_N,
};
pub use shapes::{object_boundary, synthetic_shapes, Shape, BACKGROUND, FOREGROUND};
