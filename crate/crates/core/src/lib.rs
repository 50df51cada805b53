//! Numerical toolkit for the elliptic (XYZ) Gaudin model.

pub mod acsm;
pub mod bethe;
pub mod elliptic;
pub mod error;
pub mod spinops;

pub use elliptic::{make_context, EllipticContext};
pub use error::{Error, Result};
pub use num_complex::Complex64;
