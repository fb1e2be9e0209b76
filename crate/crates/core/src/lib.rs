//! Total positivity for `GL_n`: exact and floating-point tests of total
//! positivity, Whitney parametrizations, Gantmacher–Krein spectra, canonical
//! bases of totally positive bilinear forms, positive flags and positive
//! curves.

pub mod bilinear;
pub mod curves;
pub mod error;
pub mod flag;
pub mod io;
pub mod matrix;
pub mod minors;
pub mod par;
pub mod poly;
pub mod sample;
pub mod scalar;
pub mod spectra;
pub mod tp;
pub mod whitney;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use par::Execution;
pub use scalar::{Rational, Scalar, Sign, Tolerance};
