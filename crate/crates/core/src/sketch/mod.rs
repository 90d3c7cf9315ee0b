//! Sketching operators and their row-count formulas.

mod countsketch;
mod rng;
mod sizing;
mod srht;

pub use countsketch::{CountSketch, SketchEntry};
pub use rng::SketchRng;
pub use sizing::{
    countsketch_sample_count, srht_sample_bound, srht_sample_count, SizingConstants, SizingMode,
};
pub use srht::SrhtSketch;
