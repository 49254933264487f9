pub mod commutators;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod finite_dim;
pub mod fock;
pub mod generator;
pub mod io;
pub mod linalg;
pub mod model;
pub mod scenario;
pub mod sparse;

pub use error::{Error, Result};
