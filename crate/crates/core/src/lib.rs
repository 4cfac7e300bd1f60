//! Entire functions whose derivative orbits are distributionally irregular:
//! gap-series construction, orbit probes, integral means and weighted norms.

pub mod cli;
pub mod entire;
pub mod error;
pub mod means;
pub mod numerics;
pub mod output;
pub mod schedule;
pub mod weighted;

pub use error::{Error, Result};
