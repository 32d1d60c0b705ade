//! Complex arithmetic conventions and the special functions used by the
//! closed form of the Rankin integral.
//!
//! All values are binary64. Square roots and powers use the principal branch
//! (cut along the negative real axis), which is what `num_complex` provides.

mod gamma;
mod sum;
mod zeta;

pub use gamma::gamma;
pub use sum::{compensated_sum, compensated_sum_real, CompensatedSum, ComplexCompensatedSum};
pub use zeta::{zeta, zeta_shifted_laurent};

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type ComplexValue = num_complex::Complex64;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Local structure of a function with an isolated pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaurentData {
    pub pole_order: u32,
    pub residue: f64,
    pub constant_term: f64,
}

/// Shorthand for a purely real complex number.
pub fn real(x: f64) -> ComplexValue {
    ComplexValue::new(x, 0.0)
}

/// Rejects values carrying NaN or infinite components.
pub fn ensure_finite(v: ComplexValue, what: &str) -> Result<ComplexValue> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteSample(format!("{what} evaluated to {v}")))
    }
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn expm1(z: ComplexValue) -> ComplexValue {
    if z.norm() > 0.5 {
        return z.exp() - 1.0;
    }
    let ea = z.re.exp_m1();
    let (sb, cb) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    let cos_m1 = -2.0 * half * half;
    ComplexValue::new(ea * cb + cos_m1, (ea + 1.0) * sb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm1_matches_exp_away_from_zero_and_is_exact_near_it() {
        let z = ComplexValue::new(1e-12, -3e-13);
        let e = expm1(z);
        assert!((e - z).norm() < 1e-24);
        let w = ComplexValue::new(0.3, 0.2);
        assert!((expm1(w) - (w.exp() - 1.0)).norm() < 1e-15);
    }

    #[test]
    fn non_finite_values_are_rejected() {
        assert!(ensure_finite(ComplexValue::new(f64::NAN, 0.0), "x").is_err());
        assert!(ensure_finite(ComplexValue::new(1.0, f64::INFINITY), "x").is_err());
        assert!(ensure_finite(ComplexValue::new(1.0, 2.0), "x").is_ok());
    }
}
