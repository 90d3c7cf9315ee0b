//! Least-squares regression over graph embeddings that change one edge or
//! node at a time, kept current with sketch-and-solve and rank-one
//! pseudoinverse updates.

pub mod engine;
pub mod error;
pub mod graphstore;
pub mod harness;
pub mod io;
pub mod numkit;
pub mod scalar;
pub mod session;
pub mod sketch;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix = numkit::DenseMatrix<f64>;
pub type Vector = numkit::DenseVector<f64>;
pub type State = engine::RegressionState<f64>;
pub type F64Session = session::Session<f64>;
