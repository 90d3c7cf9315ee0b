//! Sketch-and-solve regression state and the incremental updates that keep
//! it current under graph deltas.

mod config;
mod sketchop;
mod solve;
mod state;
mod verify;

pub use config::{Backend, EngineConfig, DEFAULT_REFRESH_INTERVAL};
pub use sketchop::Sketch;
pub use solve::{exact_solve, residual, residual_ratio};
pub use state::{build_sketch, RegressionData, RegressionState, UpdateOutcome};
pub use verify::{verify_consistency, ConsistencyReport, DEFAULT_VERIFY_TOLERANCE};
