//! Exact max-plus linear algebra over the rationals: matrix powers, the
//! critical graph, CSR expansions, transient thresholds, and the extremal
//! matrices attaining the Wielandt and Dulmage-Mendelsohn bounds.

pub mod bounds;
pub mod csr;
pub mod digraph;
pub mod error;
pub mod extremal;
pub mod matrix;
pub mod semiring;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{DiagonalScaling, Matrix};
pub use semiring::{MaxPlus, Rational};
