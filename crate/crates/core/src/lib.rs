//! Factorization of plane Cremona maps into elementary links between
//! rational surfaces, with an independent polynomial oracle.

pub mod algebra;
pub mod cluster;
pub mod error;
pub mod links;
pub mod marked;
pub mod realization;

pub use error::{Error, Result};
