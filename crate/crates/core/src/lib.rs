#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]
//! Numerical verification of the Petersson norm of the Jacobi theta function.
//!
//! The norm `||theta||^2 = int_{Gamma_0(4) \ H} y^{1/2} |theta(z)|^2 dx dy / y^2`
//! is computed two independent ways: by direct quadrature over a tiling of the
//! quotient ([`petersson`]), and from the residue at `s = 1` of a Rankin-type
//! integral `I_p(s)` ([`rankin`]). The suites in [`checks`] compare the two and
//! test every identity used along the way.

pub mod checks;
pub mod config;
pub mod error;
pub mod modular;
pub mod numerics;
pub mod petersson;
pub mod point;
pub mod quadrature;
pub mod rankin;
pub mod report;
pub mod theta;

pub use error::{Error, Result};
pub use point::HalfPlanePoint;
