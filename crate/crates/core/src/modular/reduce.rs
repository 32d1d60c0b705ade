use super::{moebius_apply, UniModMatrix};
use crate::error::{Error, Result};
use crate::point::HalfPlanePoint;

const MAX_STEPS: usize = 10_000;
const CIRCLE_SLACK: f64 = 1e-14;

/// Maps `z` into the standard domain `|Re z| <= 1/2, |z| >= 1`.
///
/// Returns `(z', gamma)` with `z' = gamma z`. Ties are broken towards
/// `Re z' in (-1/2, 1/2]` and, on the unit circle, `Re z' >= 0`.
pub fn standard_domain_reduce(z: &HalfPlanePoint) -> Result<(HalfPlanePoint, UniModMatrix)> {
    let mut w = z.to_complex();
    let mut gamma = UniModMatrix::IDENTITY;
    for _ in 0..MAX_STEPS {
        let n = (w.re - 0.5).ceil();
        if n != 0.0 {
            w.re -= n;
            gamma = UniModMatrix::translation(-(n as i64))?.compose(&gamma)?;
        }
        let r2 = w.norm_sqr();
        if r2 < 1.0 - CIRCLE_SLACK || (r2 <= 1.0 + CIRCLE_SLACK && w.re < 0.0) {
            w = -w.inv();
            gamma = UniModMatrix::S.compose(&gamma)?;
            continue;
        }
        let reduced = HalfPlanePoint::from_complex(w)?;
        // Recompute from the integer matrix to avoid drift from the iteration.
        let exact = moebius_apply(&gamma, z)?;
        let out = if (exact.to_complex() - w).norm() < 1e-9 { exact } else { reduced };
        return Ok((out, gamma));
    }
    Err(Error::ReductionFailure(MAX_STEPS))
}
