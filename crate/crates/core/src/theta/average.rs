use std::f64::consts::PI;

use rayon::prelude::*;

use super::theta;
use crate::error::{Error, Result};
use crate::numerics::{compensated_sum_real, CompensatedSum};
use crate::point::HalfPlanePoint;

/// Default absolute tolerance of [`x_average`].
pub const DEFAULT_XAVG_TOL: f64 = 1e-11;
const POINT_TOL: f64 = 1e-15;
const START_NODES: usize = 32;
const MAX_NODES: usize = 1 << 22;

fn sq(x: f64, y: f64) -> Result<f64> {
    Ok(theta(&HalfPlanePoint::new(x, y)?, POINT_TOL)?.norm_sqr())
}

fn sample_sum(y: f64, xs: Vec<f64>) -> Result<f64> {
    let values = xs
        .into_par_iter()
        .map(|x| sq(x, y))
        .collect::<Result<Vec<f64>>>()?;
    Ok(compensated_sum_real(values))
}

fn check_y(y: f64, tol: f64) -> Result<()> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::Domain(format!("x-average needs y > 0, got {y}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol:e} must be positive")));
    }
    Ok(())
}

/// `A(y) = int_0^1 |theta(x + iy)|^2 dx` by the periodic trapezoid rule on
/// half a period, doubling the node count until successive values agree to
/// `tol`.
///
/// The integrand is even and 1-periodic in `x`, so the rule with `M` nodes is
/// `(1/M)[f(0) + f(1/2) + 2 sum_{j=1}^{M/2-1} f(j/M)]`.
pub fn x_average(y: f64, tol: f64) -> Result<f64> {
    check_y(y, tol)?;
    let mut m = START_NODES;
    let interior = sample_sum(y, (1..m / 2).map(|j| j as f64 / m as f64).collect())?;
    let mut ends = CompensatedSum::new();
    ends.add(sq(0.0, y)?);
    ends.add(sq(0.5, y)?);
    let ends = ends.value();
    let mut inner = interior;
    let mut prev = (ends + 2.0 * inner) / m as f64;
    while m < MAX_NODES {
        let m2 = 2 * m;
        let fresh = sample_sum(y, (0..m / 2).map(|j| (2 * j + 1) as f64 / m2 as f64).collect())?;
        inner = compensated_sum_real([inner, fresh]);
        m = m2;
        let next = (ends + 2.0 * inner) / m as f64;
        if (next - prev).abs() <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::ToleranceNotMet {
        what: format!("x-average at y = {y}"),
        estimate: f64::NAN,
        requested: tol,
    })
}

/// Same integral without using the reflection symmetry: the trapezoid rule
/// over the full period `[0, 1)`.
pub fn x_average_full_period(y: f64, tol: f64) -> Result<f64> {
    check_y(y, tol)?;
    let mut m = START_NODES;
    let mut total = sample_sum(y, (0..m).map(|j| j as f64 / m as f64).collect())?;
    let mut prev = total / m as f64;
    while m < MAX_NODES {
        let m2 = 2 * m;
        let fresh = sample_sum(y, (0..m).map(|j| (2 * j + 1) as f64 / m2 as f64).collect())?;
        total = compensated_sum_real([total, fresh]);
        m = m2;
        let next = total / m as f64;
        if (next - prev).abs() <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::ToleranceNotMet {
        what: format!("full-period x-average at y = {y}"),
        estimate: f64::NAN,
        requested: tol,
    })
}

/// `sum_{n >= 1} exp(-4 pi n^2 y)`.
pub fn fourier_model(y: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    let mut n = 1.0f64;
    loop {
        let t = (-4.0 * PI * n * n * y).exp();
        acc.add(t);
        if t < 1e-20 * acc.value() || t == 0.0 {
            break;
        }
        n += 1.0;
    }
    acc.value()
}

/// Least-squares fit of `A(y) = 1 + c sum_{n>=1} exp(-4 pi n^2 y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierFit {
    pub c: f64,
    /// Root-mean-square residual over the grid.
    pub residual: f64,
    pub grid: Vec<f64>,
    pub averages: Vec<f64>,
}

pub fn fit_fourier_constant(y_grid: &[f64]) -> Result<FourierFit> {
    if y_grid.len() < 5 {
        return Err(Error::InvalidInput(format!(
            "fit needs at least 5 grid points, got {}",
            y_grid.len()
        )));
    }
    if let Some(bad) = y_grid.iter().find(|y| !(0.05..=0.5).contains(*y)) {
        return Err(Error::InvalidInput(format!("grid point {bad} outside [0.05, 0.5]")));
    }
    let averages = y_grid
        .iter()
        .map(|&y| x_average(y, DEFAULT_XAVG_TOL))
        .collect::<Result<Vec<_>>>()?;
    let model: Vec<f64> = y_grid.iter().map(|&y| fourier_model(y)).collect();
    let mm = compensated_sum_real(model.iter().map(|m| m * m));
    if !(mm > 1e-300) {
        return Err(Error::FitDegenerate("model column vanishes on the grid".into()));
    }
    let am = compensated_sum_real(averages.iter().zip(&model).map(|(a, m)| (a - 1.0) * m));
    let c = am / mm;
    let ss = compensated_sum_real(
        averages
            .iter()
            .zip(&model)
            .map(|(a, m)| (a - 1.0 - c * m).powi(2)),
    );
    Ok(FourierFit {
        c,
        residual: (ss / y_grid.len() as f64).sqrt(),
        grid: y_grid.to_vec(),
        averages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn high_average_is_one() {
        assert!((x_average(10.0, 1e-14).unwrap() - 1.0).abs() < 1e-20);
    }

    #[test]
    fn average_against_series() {
        let a = x_average(0.1, 1e-12).unwrap();
        let series = 1.0 + 4.0 * fourier_model(0.1);
        assert!((a - series).abs() < 1e-10, "{a} vs {series}");
    }

    #[test]
    fn half_and_full_period_agree() {
        for y in [0.01, 0.07, 0.3] {
            let a = x_average(y, 1e-13).unwrap();
            let b = x_average_full_period(y, 1e-13).unwrap();
            assert!((a - b).abs() <= 1e-12, "y = {y}: {a} vs {b}");
        }
    }

    #[test]
    fn average_is_at_least_one() {
        for y in [0.003, 0.02, 0.2, 2.0, 20.0] {
            assert!(x_average(y, 1e-11).unwrap() >= 1.0);
        }
    }

    #[test]
    fn small_y_scaling() {
        let scaled: Vec<f64> = [1e-3, 5e-4, 2.5e-4]
            .iter()
            .map(|&y| x_average(y, 1e-9).unwrap() * f64::sqrt(y))
            .collect();
        let hi = scaled.iter().cloned().fold(f64::MIN, f64::max);
        let lo = scaled.iter().cloned().fold(f64::MAX, f64::min);
        assert!((hi - lo) / hi < 0.02, "{scaled:?}");
    }

    #[test]
    fn fit_recovers_parseval_constant() {
        let fit = fit_fourier_constant(&[0.05, 0.1, 0.2, 0.3, 0.5]).unwrap();
        assert!((fit.c - 4.0).abs() < 1e-8, "c = {}", fit.c);
        assert!(fit.residual <= 1e-9);
    }

    #[test]
    fn fit_input_validation() {
        assert!(matches!(fit_fourier_constant(&[0.1, 0.2]), Err(Error::InvalidInput(_))));
        assert!(fit_fourier_constant(&[0.01, 0.1, 0.2, 0.3, 0.5]).is_err());
    }
}
