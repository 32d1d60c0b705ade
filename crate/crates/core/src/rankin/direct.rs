use std::f64::consts::PI;
use std::sync::Mutex;

use super::ClosedFormParams;
use crate::error::{Error, Result};
use crate::quadrature::{AdaptiveQuad, QuadratureSpec};
use crate::theta::x_average;

/// Range of real `s` on which [`ip_direct`] is validated.
pub const IP_DIRECT_S_RANGE: (f64, f64) = (1.5, 4.0);
const X_TOL: f64 = 1e-11;
const Y_MAX: f64 = 4.0;
/// Above this height `A(y) - 1` is too small to resolve against 1 in binary64,
/// so the positivity check only looks at samples below it.
const Y_RESOLVED: f64 = 2.0;

/// Breakdown of a direct evaluation of `I_p(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpDirectReport {
    pub value: f64,
    /// Sum of the quadrature, head, tail and x-average error terms.
    pub error: f64,
    pub head: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Smallest sampled `D(y) = A(y) - A(p^2 y)` for `y < 2`.
    pub min_difference: f64,
    pub evaluations: usize,
}

pub fn ip_direct(params: &ClosedFormParams, quad: &QuadratureSpec) -> Result<f64> {
    ip_direct_detailed(params, quad).map(|r| r.value)
}

/// `int_0^inf y^{s - 3/2} (A(y) - A(p^2 y)) dy` by quadrature in `t = ln y`.
///
/// Below `y_min = 0.04 / p^2` the difference behaves like `K / sqrt(y)` up to
/// terms of size `exp(-pi / (4 p^2 y))`; the head is integrated in closed form
/// with `K` measured at `y_min`. Above `y_max = 4` the integrand is bounded by
/// `A(y) - 1`, which decays like `exp(-4 pi y)`.
pub fn ip_direct_detailed(params: &ClosedFormParams, quad: &QuadratureSpec) -> Result<IpDirectReport> {
    quad.validate()?;
    let s = params.s.re;
    if params.s.im != 0.0 || !(IP_DIRECT_S_RANGE.0..=IP_DIRECT_S_RANGE.1).contains(&s) {
        return Err(Error::Domain(format!(
            "direct Rankin integral is validated for real s in [1.5, 4], got {}",
            params.s
        )));
    }
    let p2 = (params.p * params.p) as f64;
    let y_min = 0.04 / p2;
    let difference = |y: f64| -> Result<f64> { Ok(x_average(y, X_TOL)? - x_average(p2 * y, X_TOL)?) };
    let lowest = Mutex::new(f64::INFINITY);
    let integrand = |t: f64| -> Result<f64> {
        let y = t.exp();
        let d = difference(y)?;
        if y < Y_RESOLVED || d < -X_TOL {
            let mut lo = lowest.lock().expect("lock poisoned");
            *lo = lo.min(d);
        }
        Ok(y.powf(s - 0.5) * d)
    };
    let budget = 0.5 * quad.tol_ip;
    let body = AdaptiveQuad::new(budget, quad.max_subdivisions)
        .parallel(true)
        .integrate(integrand, y_min.ln(), Y_MAX.ln())?;

    let k_at = |y: f64| -> Result<f64> { Ok(difference(y)? * y.sqrt()) };
    let k = k_at(y_min)?;
    let k_half = k_at(0.5 * y_min)?;
    let head_scale = y_min.powf(s - 1.0) / (s - 1.0);
    let head = k * head_scale;
    let head_error = (k - k_half).abs() * head_scale;

    let a = s - 1.5;
    let excess = (x_average(Y_MAX, X_TOL)? - 1.0).max(0.0) + X_TOL;
    let tail_bound = excess * Y_MAX.powf(s - 1.5) / (4.0 * PI - a / Y_MAX);

    // pointwise x-average errors integrated against y^{s - 3/2} on [y_min, y_max]
    let x_error = 2.0 * X_TOL * (Y_MAX.powf(s - 0.5) - y_min.powf(s - 0.5)) / (s - 0.5);

    let min_difference = *lowest.lock().expect("lock poisoned");
    if !(min_difference > 0.0) {
        return Err(Error::Invariant(format!(
            "A(y) - A(p^2 y) = {min_difference:e} is not positive"
        )));
    }
    let error = body.error + head_error + tail_bound + x_error;
    if error > quad.tol_ip {
        return Err(Error::ToleranceNotMet {
            what: format!("direct Rankin integral at s = {s}, p = {}", params.p),
            estimate: error,
            requested: quad.tol_ip,
        });
    }
    Ok(IpDirectReport {
        value: body.value + head,
        error,
        head,
        y_min,
        y_max: Y_MAX,
        min_difference,
        evaluations: body.evaluations,
    })
}
