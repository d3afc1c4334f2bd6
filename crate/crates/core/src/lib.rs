//! Binary edge detection with twenty-five-neighborhood linear cellular
//! automata, together with the classical operators and edge-map metrics used
//! to judge it.

pub mod baselines;
pub mod engine;
pub mod error;
pub mod evaluation;
pub mod grid;
pub mod imaging;
pub mod rules;

pub use engine::{run, step_naive, step_packed, StepConfig};
pub use error::{Error, Result};
pub use grid::{BinaryGrid, BoundaryCondition};
pub use imaging::{GrayImage, PnmFormat, PnmImage, Threshold, ThresholdOrigin};
pub use rules::{parse_rule, LinearRule, NeighborOffset, NeighborhoodModel, PAPER_RULES};
