//! Numerics for Heisenberg uniqueness pairs on the hyperbola.

pub mod certify;
pub mod counterexample;
pub mod error;
pub mod fft;
pub mod fixtures;
pub mod grid;
pub mod lattice;
pub mod numerics;
pub mod parallel;
pub mod specfun;
pub mod suite;
pub mod transforms;

pub use error::{HupError, Result};
pub use grid::{Grid, GridFunction, NormReport};
