//! Discrepancy, generic chaining and coordinate-projection experiments.
//!
//! Coordinates are 0-indexed in this crate; the CLI and file formats use
//! 1-indexed coordinate sets.

pub mod chaining;
pub mod coloring;
pub mod constants;
pub mod entropy_oracle;
pub mod error;
pub mod gen;
pub mod io;
pub mod rng;
pub mod sgp_lab;
pub mod shatter;
pub mod space;

pub use constants::Constants;
pub use error::{Error, Result};
pub use space::{Coloring, IndexSet, Metric, PointSet, TOL};
