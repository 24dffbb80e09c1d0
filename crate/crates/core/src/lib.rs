//! Scalar fields on covering anti-de Sitter space: mode families, Klein-Gordon
//! products, two-point functions, the fourth-order dipole equation and the
//! Schrödinger picture of the radial problem.

pub mod dipole;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod modes;
pub mod products;
pub mod propagators;
pub mod quadrature;
pub mod report;
pub mod specfun;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
