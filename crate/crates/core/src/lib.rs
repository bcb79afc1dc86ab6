//! Holistic discretisation of Burgers-type equations on a periodic grid:
//! grid operators, the closure models they define, subgrid fields, exact
//! construction of the closures, equilibrium analysis and simulation.

pub mod constructor;
pub mod error;
pub mod exec;
pub mod grid_ops;
pub mod models;
pub mod sim;
pub mod stability;
pub mod subgrid;

pub use error::{Error, Result};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
