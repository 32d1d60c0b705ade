use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::ComplexValue;

/// Largest admissible `|x|`; beyond this, reductions modulo 1 lose all
/// fractional precision.
pub const MAX_ABS_X: f64 = 1e15;

/// A point `x + iy` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    x: f64,
    y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("non-finite point {x} + {y}i")));
        }
        if !(y > 0.0) {
            return Err(Error::Domain(format!(
                "point {x} + {y}i is not in the upper half-plane"
            )));
        }
        if x.abs() >= MAX_ABS_X {
            return Err(Error::Domain(format!("|Re z| = {} exceeds {MAX_ABS_X:e}", x.abs())));
        }
        Ok(Self { x, y })
    }

    pub fn from_complex(z: ComplexValue) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn to_complex(&self) -> ComplexValue {
        ComplexValue::new(self.x, self.y)
    }

    /// `z + t` for real `t`.
    pub fn translate(&self, t: f64) -> Result<Self> {
        Self::new(self.x + t, self.y)
    }
}

impl fmt::Display for HalfPlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.x, self.y)
    }
}
