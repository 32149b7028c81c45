//! Generalized totally asymmetric exclusion process on a ring and its
//! zero-range image: simulation, exact finite-size results, the Bethe-ansatz
//! cumulant generating function, and thermodynamic-limit asymptotics.

pub mod error;
pub mod asymptotics;
pub mod bethe;
pub mod exact;
pub mod oracle;
pub mod params;
pub mod scalar;
pub mod series;
pub mod sim;

pub use error::{Error, Result};
pub use params::{density_map, ExactParams, Geometry, Lambda, ModelParams, Params};
pub use scalar::{format_rational, parse_rational, Rational, Scalar};
