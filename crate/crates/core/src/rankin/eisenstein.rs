use std::f64::consts::PI;

use rayon::prelude::*;

use super::{ResidueEstimate, ResidueMethod};
use crate::error::{Error, Result};
use crate::modular::{index_gamma0, prime_divisors};
use crate::numerics::{compensated_sum, ComplexCompensatedSum, ComplexValue};
use crate::point::HalfPlanePoint;
use crate::quadrature::AdaptiveQuad;

/// Default lattice cutoff for the residue extrapolation.
pub const DEFAULT_RESIDUE_CUTOFF: u64 = 4000;
/// Allowance on the asymptotic tail estimate, relative to its size.
const TAIL_ESTIMATE_SLACK: f64 = 0.01;

/// Parameters of `E_N(z, s) = sum over Gamma_inf \ Gamma_0(N) of Im(gamma z)^s`.
///
/// `Gamma_inf` is taken to contain `-I`, so cosets correspond to coprime
/// bottom rows `(c, d)` up to sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EisensteinParams {
    pub level: u64,
    pub s: ComplexValue,
    /// Bound on `|c|` and `|d|`.
    pub truncation: u64,
}

impl EisensteinParams {
    pub fn new(level: u64, s: ComplexValue, truncation: u64) -> Result<Self> {
        let p = Self {
            level,
            s,
            truncation,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.level == 0 {
            return Err(Error::InvalidInput("Eisenstein level must be at least 1".into()));
        }
        if self.truncation < 10 {
            return Err(Error::InvalidInput(format!(
                "lattice cutoff {} below 10",
                self.truncation
            )));
        }
        if !(self.s.re > 1.0 + 1e-9) {
            return Err(Error::Convergence(format!(
                "lattice sum diverges for Re s = {}",
                self.s.re
            )));
        }
        if self.truncation > i64::MAX as u64 / 4 {
            return Err(Error::Overflow(format!("cutoff {}", self.truncation)));
        }
        Ok(())
    }
}

/// Smallest eigenvalue of the form `|cz + d|^2` in `(c, d)`.
fn form_min_eigenvalue(z: &HalfPlanePoint) -> f64 {
    let (x, y) = (z.x(), z.y());
    let r2 = x * x + y * y;
    let tr = r2 + 1.0;
    let disc = ((r2 - 1.0).powi(2) + 4.0 * x * x).sqrt();
    // product of eigenvalues is y^2; use it to avoid cancellation
    let big = 0.5 * (tr + disc);
    y * y / big
}

/// Truncated lattice sum and a proven bound on the omitted terms.
///
/// Sums `y^s / |cz + d|^{2s}` over coprime `(c, d)` with `N | c`, `c > 0`,
/// `|c|, |d| <= C`, plus the `(0, 1)` term `y^s`; each unordered pair `+-(c, d)`
/// is counted once.
pub fn eisenstein_truncated(
    z: &HalfPlanePoint,
    params: &EisensteinParams,
) -> Result<(ComplexValue, f64)> {
    params.validate()?;
    let cutoff = params.truncation as i64;
    let level = params.level as i64;
    let (x, y) = (z.x(), z.y());
    let s = params.s;
    let ln_y = y.ln();
    let real_s = (s.im == 0.0).then_some(s.re);
    let rows: Vec<i64> = (1..=cutoff / level).map(|k| k * level).collect();
    let partials: Vec<ComplexValue> = rows
        .par_iter()
        .map(|&c| {
            let width = (2 * cutoff + 1) as usize;
            let mut blocked = vec![false; width];
            for q in prime_divisors(c as u64) {
                let q = q as i64;
                // multiples of q in [-C, C]
                let mut d = -cutoff + cutoff.rem_euclid(q);
                while d <= cutoff {
                    blocked[(d + cutoff) as usize] = true;
                    d += q;
                }
            }
            let cx = c as f64 * x;
            let cy2 = (c as f64 * y).powi(2);
            let mut acc = ComplexCompensatedSum::new();
            for (i, &skip) in blocked.iter().enumerate() {
                if skip {
                    continue;
                }
                let d = i as f64 - cutoff as f64;
                let q = (cx + d).powi(2) + cy2;
                let term = match real_s {
                    Some(sr) => ComplexValue::new((y / q).powf(sr), 0.0),
                    None => (s * (ln_y - q.ln())).exp(),
                };
                acc.add(term);
            }
            acc.value()
        })
        .collect();
    let head = match real_s {
        Some(sr) => ComplexValue::new(y.powf(sr), 0.0),
        None => (s * ln_y).exp(),
    };
    let value = compensated_sum(std::iter::once(head).chain(partials));
    let sigma = s.re;
    let lambda = form_min_eigenvalue(z);
    let tail = 4.0 * (y / lambda).powf(sigma) * (cutoff as f64).powf(2.0 - 2.0 * sigma)
        / (2.0 * sigma - 2.0);
    Ok((value, tail))
}

/// `3 / (pi [SL2(Z) : Gamma_0(N)])`, the residue at `s = 1`.
pub fn eisenstein_residue_formula(level: u64) -> Result<f64> {
    Ok(3.0 / (PI * index_gamma0(level)? as f64))
}

/// Asymptotic size of the omitted part of the lattice sum at real `s`:
/// primitive pairs with `N | c` have density `6 / (pi^2 index)`, and the sum
/// of `y^s |cz + d|^{-2s}` outside the square `[-C, C]^2` is integrated in
/// polar coordinates.
pub fn eisenstein_tail_estimate(z: &HalfPlanePoint, level: u64, s: f64, cutoff: u64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::Convergence(format!("tail estimate needs s > 1, got {s}")));
    }
    let density = 6.0 / (PI * PI * index_gamma0(level)? as f64);
    let (x, y) = (z.x(), z.y());
    let expo = 2.0 - 2.0 * s;
    let integrand = |t: f64| -> Result<f64> {
        let (sn, cs) = t.sin_cos();
        let r = 1.0 / cs.abs().max(sn.abs());
        let q = (cs * x + sn).powi(2) + (cs * y).powi(2);
        Ok(r.powf(expo) / (2.0 * s - 2.0) * (y / q).powf(s))
    };
    let h = PI / 2.0;
    let res = AdaptiveQuad::new(1e-13, 2000)
        .integrate_with_breaks(integrand, &[-h, -h / 2.0, 0.0, h / 2.0, h])?;
    Ok(density * (cutoff as f64).powf(expo) * res.value)
}

fn residual_part(z: &HalfPlanePoint, level: u64, s: f64, cutoff: u64) -> Result<(f64, f64)> {
    let params = EisensteinParams::new(level, ComplexValue::new(s, 0.0), cutoff)?;
    let (value, _) = eisenstein_truncated(z, &params)?;
    let tail = eisenstein_tail_estimate(z, level, s, cutoff)?;
    let g = (s - 1.0) * (value.re - z.y().powf(s) + tail);
    Ok((g, (s - 1.0) * tail))
}

fn log_extrapolate(near: f64, far: f64) -> Result<f64> {
    if !(near > 0.0 && far > 0.0) {
        return Err(Error::Invariant(format!(
            "non-positive residue samples {near}, {far}"
        )));
    }
    Ok((2.0 * near.ln() - far.ln()).exp())
}

/// One-sided extrapolation of `(s - 1) E_N(z, s)` to `s = 1` with the default
/// cutoff.
pub fn eisenstein_residue_numeric(z: &HalfPlanePoint, level: u64) -> Result<ResidueEstimate> {
    eisenstein_residue_numeric_with(z, level, DEFAULT_RESIDUE_CUTOFF)
}

/// One-sided extrapolation of `(s - 1) E_N(z, s)` to `s = 1`.
///
/// The analytic term `y^s` is removed and the asymptotic tail added before
/// extrapolating; `g(s) = (s - 1)(E - y^s + tail)` is sampled at
/// `s = 1.5, 1.25, 1.125` and `log g` is extrapolated linearly from the
/// steps `{1.5, 1.25}`. The same rule on `{1.25, 1.125}` gives a second value;
/// the error bound is twice their gap plus an allowance on the tail estimates.
pub fn eisenstein_residue_numeric_with(
    z: &HalfPlanePoint,
    level: u64,
    cutoff: u64,
) -> Result<ResidueEstimate> {
    if z.y() < 1.0 {
        return Err(Error::Domain(format!("residue test point needs Im z >= 1, got {}", z.y())));
    }
    let (g1, t1) = residual_part(z, level, 1.5, cutoff)?;
    let (g2, t2) = residual_part(z, level, 1.25, cutoff)?;
    let (g3, t3) = residual_part(z, level, 1.125, cutoff)?;
    let value = log_extrapolate(g2, g1)?;
    let refined = log_extrapolate(g3, g2)?;
    let tail_slack = TAIL_ESTIMATE_SLACK * (t1 + t2 + t3);
    Ok(ResidueEstimate {
        value,
        method: ResidueMethod::Richardson,
        error_bound: 2.0 * (value - refined).abs() + tail_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::{moebius_apply, UniModMatrix};

    fn pt(x: f64, y: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(x, y).unwrap()
    }

    #[test]
    fn only_trivial_coset_below_level() {
        let z = pt(0.2, 1.7);
        let params = EisensteinParams::new(50, ComplexValue::new(2.5, 0.0), 49).unwrap();
        let (v, _) = eisenstein_truncated(&z, &params).unwrap();
        assert_eq!(v.re, 1.7f64.powf(2.5));
    }

    #[test]
    fn frozen_level_four_value() {
        let params = EisensteinParams::new(4, ComplexValue::new(3.0, 0.0), 4000).unwrap();
        let (v, tail) = eisenstein_truncated(&pt(0.0, 2.0), &params).unwrap();
        assert!((v.re - 8.000_148_905_826_146).abs() < 1e-12, "{v}");
        assert!(tail < 1e-8);
    }

    #[test]
    fn complex_s_matches_real_path() {
        let z = pt(0.1, 1.3);
        let a = eisenstein_truncated(&z, &EisensteinParams::new(4, ComplexValue::new(2.0, 0.0), 200).unwrap()).unwrap();
        let b = eisenstein_truncated(&z, &EisensteinParams::new(4, ComplexValue::new(2.0, 1e-300), 200).unwrap()).unwrap();
        assert!((a.0 - b.0).norm() < 1e-13);
    }

    #[test]
    fn invariance_under_gamma0_4() {
        let z = pt(0.0, 2.0);
        let g = UniModMatrix::new(1, 0, 4, 1).unwrap();
        let gz = moebius_apply(&g, &z).unwrap();
        let params = EisensteinParams::new(4, ComplexValue::new(3.0, 0.0), 2000).unwrap();
        let (a, ta) = eisenstein_truncated(&z, &params).unwrap();
        let (b, tb) = eisenstein_truncated(&gz, &params).unwrap();
        assert!((a - b).norm() <= 2.0 * (ta + tb), "{a} vs {b}, tails {ta:e} {tb:e}");
    }

    #[test]
    fn tail_bound_shrinks_with_cutoff() {
        let z = pt(0.3, 1.1);
        let mut last = f64::INFINITY;
        for cutoff in [100u64, 200, 400, 800] {
            let params = EisensteinParams::new(4, ComplexValue::new(3.0, 0.0), cutoff).unwrap();
            let (_, tail) = eisenstein_truncated(&z, &params).unwrap();
            assert!(tail <= 0.5 * last);
            last = tail;
        }
    }

    #[test]
    fn convergence_guard() {
        assert!(matches!(
            EisensteinParams::new(4, ComplexValue::new(1.0, 0.0), 100),
            Err(Error::Convergence(_))
        ));
        assert!(EisensteinParams::new(4, ComplexValue::new(2.0, 0.0), 5).is_err());
    }

    #[test]
    fn residue_formula_values() {
        assert!((eisenstein_residue_formula(36).unwrap() - 1.0 / (24.0 * PI)).abs() < 1e-16);
        assert!((eisenstein_residue_formula(1).unwrap() - 3.0 / PI).abs() < 1e-16);
        assert!((eisenstein_residue_formula(4).unwrap() - 0.5 / PI).abs() < 1e-16);
    }

    #[test]
    fn numeric_residues_near_formula() {
        for (z, level) in [(pt(0.0, 2.0), 4u64), (pt(0.0, 1.0), 1)] {
            let est = eisenstein_residue_numeric(&z, level).unwrap();
            let exact = eisenstein_residue_formula(level).unwrap();
            let rel = (est.value - exact).abs() / exact;
            assert!(rel < 0.05, "level {level}: {} vs {exact}", est.value);
            assert!((est.value - exact).abs() <= est.error_bound.max(0.05 * exact));
            let coarse = eisenstein_residue_numeric_with(&z, level, 2000).unwrap();
            assert!((coarse.value - est.value).abs() < est.error_bound);
        }
    }
}
