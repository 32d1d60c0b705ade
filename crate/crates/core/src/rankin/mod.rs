//! The Rankin integral `I_p(s)`: its closed form with the Fourier constant
//! as a parameter, its direct evaluation by quadrature, Eisenstein series
//! lattice sums, and residue extraction at `s = 1`.

mod direct;
mod eisenstein;

pub use direct::{ip_direct, ip_direct_detailed, IpDirectReport, IP_DIRECT_S_RANGE};
pub use eisenstein::{
    eisenstein_residue_formula, eisenstein_residue_numeric, eisenstein_residue_numeric_with,
    eisenstein_tail_estimate, eisenstein_truncated, EisensteinParams, DEFAULT_RESIDUE_CUTOFF,
};

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modular::is_prime;
use crate::numerics::{compensated_sum, gamma, zeta, ComplexValue};

/// Circle radius and node count used by [`norm_from_residue`].
pub const NORM_RESIDUE_RADIUS: f64 = 0.25;
pub const NORM_RESIDUE_POINTS: usize = 256;

/// Arguments of the closed form: spectral parameter, odd prime, Fourier constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormParams {
    pub s: ComplexValue,
    pub p: u64,
    pub c: f64,
}

impl ClosedFormParams {
    pub fn new(s: ComplexValue, p: u64, c: f64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!("Fourier constant {c} must be positive")));
        }
        Ok(Self { s, p, c })
    }

    pub fn real(s: f64, p: u64, c: f64) -> Result<Self> {
        Self::new(ComplexValue::new(s, 0.0), p, c)
    }
}

/// `c (4 pi)^{1/2 - s} Gamma(s - 1/2) zeta(2s - 1)`, the closed form without
/// its Euler factor at `p`.
///
/// The expression is meromorphic, so it is evaluated wherever the special
/// functions are defined; it equals the integral only for `Re s > 1`.
pub fn ip_closed_full(s: ComplexValue, c: f64) -> Result<ComplexValue> {
    let half = ComplexValue::new(0.5, 0.0);
    let power = ((half - s) * (4.0 * PI).ln()).exp();
    let g = gamma(s - half)?;
    let z = zeta(s * 2.0 - 1.0)?;
    Ok(power * g * z * c)
}

/// `c (4 pi)^{1/2 - s} Gamma(s - 1/2) (1 - p^{1-2s}) zeta(2s - 1)`.
pub fn ip_closed(params: &ClosedFormParams) -> Result<ComplexValue> {
    let s = params.s;
    let euler = ComplexValue::new(1.0, 0.0)
        - ((ComplexValue::new(1.0, 0.0) - s * 2.0) * (params.p as f64).ln()).exp();
    Ok(ip_closed_full(s, params.c)? * euler)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidueMethod {
    Circle,
    Richardson,
}

impl fmt::Display for ResidueMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResidueMethod::Circle => "circle",
            ResidueMethod::Richardson => "richardson",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueEstimate {
    pub value: f64,
    pub method: ResidueMethod,
    pub error_bound: f64,
}

/// Residue at `s = 1` of a function with a simple pole there, as the mean of
/// `f(s)(s - 1)` over `n_points` equally spaced points of `|s - 1| = radius`.
///
/// The error bound adds the change against the rule with half the points,
/// the imaginary part of the mean (zero for real-analytic `f`), and a
/// rounding floor.
pub fn residue_at_1<F>(f: F, radius: f64, n_points: usize) -> Result<ResidueEstimate>
where
    F: Fn(ComplexValue) -> Result<ComplexValue> + Sync,
{
    if !(0.1..=0.4).contains(&radius) {
        return Err(Error::InvalidInput(format!("radius {radius} outside [0.1, 0.4]")));
    }
    if n_points < 16 {
        return Err(Error::InvalidInput(format!("{n_points} circle points, need >= 16")));
    }
    let sample = |k: usize, n: usize| -> Result<ComplexValue> {
        let h = ComplexValue::from_polar(radius, 2.0 * PI * k as f64 / n as f64);
        let s = ComplexValue::new(1.0, 0.0) + h;
        let v = f(s).map_err(|e| Error::NonFiniteSample(format!("f({s}) failed: {e}")))?;
        let out = v * (s - 1.0);
        if out.re.is_finite() && out.im.is_finite() {
            Ok(out)
        } else {
            Err(Error::NonFiniteSample(format!("f({s}) = {v}")))
        }
    };
    let samples = (0..n_points)
        .into_par_iter()
        .map(|k| sample(k, n_points))
        .collect::<Result<Vec<_>>>()?;
    let mean = compensated_sum(samples.iter().copied()) / n_points as f64;
    let half = n_points / 2;
    let coarse = if n_points.is_multiple_of(2) {
        compensated_sum(samples.iter().step_by(2).copied()) / half as f64
    } else {
        let v = (0..half)
            .into_par_iter()
            .map(|k| sample(k, half))
            .collect::<Result<Vec<_>>>()?;
        compensated_sum(v) / half as f64
    };
    let floor = 4.0 * f64::EPSILON * mean.norm().max(f64::MIN_POSITIVE);
    Ok(ResidueEstimate {
        value: mean.re,
        method: ResidueMethod::Circle,
        error_bound: (mean - coarse).norm() + mean.im.abs() + floor,
    })
}

/// Residue of the closed form at `s = 1` for prime `p` and constant `c`.
pub fn ip_closed_residue(p: u64, c: f64) -> Result<ResidueEstimate> {
    ClosedFormParams::real(2.0, p, c)?;
    residue_at_1(
        |s| ip_closed(&ClosedFormParams { s, p, c }),
        NORM_RESIDUE_RADIUS,
        NORM_RESIDUE_POINTS,
    )
}

/// The norm forced by equating `res I_p = (1 - 1/p) |theta|^2 / (2 pi)` with
/// the residue of the closed form.
pub fn norm_from_residue(p: u64, c: f64) -> Result<f64> {
    let res = ip_closed_residue(p, c)?;
    Ok(2.0 * PI * res.value / (1.0 - 1.0 / p as f64))
}

/// Candidate values of `res_{s=1} I_p(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueCandidates {
    pub p: u64,
    /// Closed form with leading constant 2.
    pub displayed_constant: f64,
    /// Closed form with the Parseval constant 4.
    pub parseval_constant: f64,
    /// Closed form with the fitted constant.
    pub fitted_constant: f64,
    /// The claimed value `2 (1 - 1/p)`.
    pub stated: f64,
}

impl ResidueCandidates {
    pub fn compute(p: u64, c_fit: f64) -> Result<Self> {
        Ok(Self {
            p,
            displayed_constant: ip_closed_residue(p, 2.0)?.value,
            parseval_constant: ip_closed_residue(p, 4.0)?.value,
            fitted_constant: ip_closed_residue(p, c_fit)?.value,
            stated: 2.0 * (1.0 - 1.0 / p as f64),
        })
    }

    /// `2 pi r / (1 - 1/p)` for a residue candidate `r`.
    pub fn implied_norm(&self, residue: f64) -> f64 {
        2.0 * PI * residue / (1.0 - 1.0 / self.p as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::AdaptiveQuad;

    fn cplx(re: f64) -> ComplexValue {
        ComplexValue::new(re, 0.0)
    }

    #[test]
    fn closed_form_frozen_values() {
        let v = ip_closed(&ClosedFormParams::real(2.0, 3, 2.0).unwrap()).unwrap();
        assert!((v.re - 0.046_056_905_077_826_06).abs() < 1e-13 * 0.046);
        let table = [
            (1.5, 3, 0.465_421_133_865_154_554),
            (2.0, 3, 0.092_113_810_155_652_119_4),
            (3.0, 3, 0.009_809_099_110_979_113_51),
            (1.5, 5, 0.502_654_824_574_366_918),
            (2.0, 5, 0.094_891_395_815_730_244_9),
            (3.0, 5, 0.009_846_480_695_954_772_10),
        ];
        for (s, p, expected) in table {
            let v = ip_closed(&ClosedFormParams::real(s, p, 4.0).unwrap()).unwrap();
            assert!((v.re - expected).abs() <= 1e-11 * expected, "s = {s}, p = {p}: {v}");
        }
    }

    #[test]
    fn euler_factor_identity() {
        for (s, p) in [(1.5, 3u64), (2.0, 7), (3.3, 11)] {
            let with = ip_closed(&ClosedFormParams::real(s, p, 4.0).unwrap()).unwrap();
            let without = ip_closed_full(cplx(s), 4.0).unwrap();
            let factor = 1.0 - (p as f64).powf(1.0 - 2.0 * s);
            assert!(((with / without).re - factor).abs() < 1e-12);
        }
    }

    #[test]
    fn large_prime_limit() {
        let full = ip_closed_full(cplx(2.0), 4.0).unwrap();
        let big = ip_closed(&ClosedFormParams::real(2.0, 7919, 4.0).unwrap()).unwrap();
        assert!(((big / full).re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn params_validation() {
        assert!(ClosedFormParams::real(2.0, 2, 4.0).is_err());
        assert!(ClosedFormParams::real(2.0, 9, 4.0).is_err());
        assert!(ClosedFormParams::real(2.0, 3, 0.0).is_err());
    }

    #[test]
    fn pure_pole_residue() {
        let r = residue_at_1(|s| Ok(1.0 / (s - 1.0)), 0.25, 64).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-14);
        assert!(r.error_bound > 0.0);
    }

    #[test]
    fn zeta_residue_and_radius_invariance() {
        let f = |s: ComplexValue| zeta(s * 2.0 - 1.0);
        let mut values = Vec::new();
        for radius in [0.15, 0.25, 0.35] {
            let r = residue_at_1(f, radius, 256).unwrap();
            assert!((r.value - 0.5).abs() <= 1e-10, "radius {radius}: {}", r.value);
            values.push(r.value);
        }
        assert!(values.iter().all(|v| (v - values[0]).abs() <= 1e-9));
    }

    #[test]
    fn closed_form_residue_matches_substitution() {
        for c in [2.0, 4.0, 3.7] {
            let r = ip_closed_residue(3, c).unwrap();
            assert!((r.value - c * (1.0 - 1.0 / 3.0) / 4.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn norm_is_p_independent() {
        let norms: Vec<f64> = [3u64, 5, 7].iter().map(|&p| norm_from_residue(p, 4.0).unwrap()).collect();
        for n in &norms {
            assert!((n - norms[0]).abs() <= 1e-8 * norms[0]);
            assert!((n - 2.0 * PI).abs() <= 1e-9);
        }
    }

    #[test]
    fn candidates_and_their_norms() {
        let c = ResidueCandidates::compute(5, 4.0).unwrap();
        assert!((c.displayed_constant - 0.4).abs() < 1e-9);
        assert!((c.parseval_constant - 0.8).abs() < 1e-9);
        assert!((c.stated - 1.6).abs() < 1e-15);
        assert!((c.implied_norm(c.stated) - 4.0 * PI).abs() < 1e-12);
        assert!((c.implied_norm(c.displayed_constant) - PI).abs() < 1e-8);
    }

    #[test]
    fn failing_sample_is_reported() {
        let r = residue_at_1(|_| Ok(ComplexValue::new(f64::NAN, 0.0)), 0.2, 16);
        assert!(matches!(r, Err(Error::NonFiniteSample(_))));
        assert!(residue_at_1(Ok, 0.05, 16).is_err());
        assert!(residue_at_1(Ok, 0.2, 8).is_err());
    }

    #[test]
    fn termwise_gamma_identity() {
        // int_0^inf y^{s - 3/2} e^{-4 pi y} dy at s = 2, with y = e^t
        let s = 2.0;
        let q = AdaptiveQuad::new(1e-12, 2000)
            .integrate(|t: f64| Ok((t * (s - 0.5) - 4.0 * PI * t.exp()).exp()), -60.0, 5.0)
            .unwrap();
        let exact = gamma(cplx(s - 0.5)).unwrap().re * (4.0 * PI).powf(0.5 - s);
        assert!((q.value - exact).abs() <= 1e-8 * exact);
    }
}
