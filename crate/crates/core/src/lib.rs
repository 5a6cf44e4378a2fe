//! Numerical laboratory for singular solutions of `Δ²u = u^p`.
//!
//! The crate covers the closed-form constants of the problem, indicial roots,
//! singular radial profiles by shooting, the linearized mode equations, the
//! conformal Fourier symbol, a Green-function solver on the unit ball and the
//! error instrumentation of cut-off approximate solutions.

pub mod error;
pub mod params;
pub mod indicial;
pub mod quad;
pub mod delaunay;
pub mod linearized;
pub mod symbol;
pub mod auxball;
pub mod gluing;
pub mod cli;

pub use error::{Error, Result};
pub use params::{emden_coeffs, k_of, special_exponents, validate_params, EmdenCoeffs, Params};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
