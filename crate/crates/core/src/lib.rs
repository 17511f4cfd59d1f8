//! Generalized double affine Hecke algebras attached to star-shaped graphs,
//! deformed preprojective algebras, and the Riemann-Hilbert correspondence
//! between their representations.

pub mod algebra;
pub mod ds;
pub mod error;
pub mod io;
pub mod linalg;
pub mod monodromy;
pub mod params;
pub mod pipeline;
pub mod rh;
pub mod rng;
pub mod scalar;
pub mod spectrum;

pub use error::{Error, ErrorClass, Result};
pub use scalar::{Field, Qi, C64};
