//! `||theta||^2 = int y^{1/2} |theta|^2 dx dy / y^2` over `Gamma_0(4) \ H`,
//! computed by tiling the quotient with translates of the level-1 standard
//! domain, plus the pointwise identities behind the change of variables.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modular::{
    coset_reps, index_gamma0, is_prime, moebius_apply, Moebius, MoebiusMap, ProjectivePoint,
    UniModMatrix,
};
use crate::numerics::compensated_sum_real;
use crate::point::HalfPlanePoint;
use crate::quadrature::{AdaptiveQuad, QuadratureSpec};
use crate::theta::{f_invariant, theta_full, DEFAULT_POINT_TOL};

/// Truncation height of the level-`4p^2` tiling.
pub const INDEX_CHECK_HEIGHT: f64 = 20.0;
/// Per-tile tolerance of the level-`4p^2` tiling.
pub const INDEX_CHECK_TOL: f64 = 1e-7;

/// How a level-4 tile integrand is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TileForm {
    /// `F(z)`
    Identity,
    /// `F((z + k) / 4)`, equal to `F(-1/(z + k))` by Fricke invariance.
    QuarterShift(u8),
    /// `F(z / (2z + 1))`
    HalfCusp,
}

impl fmt::Display for TileForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TileForm::Identity => write!(f, "F(z)"),
            TileForm::QuarterShift(k) => write!(f, "F((z+{k})/4)"),
            TileForm::HalfCusp => write!(f, "F(z/(2z+1))"),
        }
    }
}

/// The integrand `F(rep z)` on the standard domain for one coset of `Gamma_0(4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TileIntegrand {
    pub label: ProjectivePoint,
    pub closed_form: TileForm,
}

impl TileIntegrand {
    pub fn new(label: ProjectivePoint) -> Result<Self> {
        let closed_form = match (label.c, label.d) {
            (0, 1) => TileForm::Identity,
            (1, k) if k < 4 => TileForm::QuarterShift(k as u8),
            (2, 1) => TileForm::HalfCusp,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "{label} is not a normalized point of P^1(Z/4)"
                )))
            }
        };
        Ok(Self { label, closed_form })
    }

    /// The six tiles, in coset-table order.
    pub fn all() -> Result<Vec<Self>> {
        coset_reps(4)?.labels.into_iter().map(Self::new).collect()
    }

    /// Coset representative whose action the closed form rewrites.
    pub fn rep(&self) -> Result<UniModMatrix> {
        self.label.lift(4)
    }

    pub fn eval(&self, z: &HalfPlanePoint) -> Result<f64> {
        match self.closed_form {
            TileForm::Identity => f_invariant(z),
            TileForm::QuarterShift(k) => {
                f_invariant(&HalfPlanePoint::new((z.x() + k as f64) / 4.0, z.y() / 4.0)?)
            }
            TileForm::HalfCusp => {
                let m = UniModMatrix::new(1, 0, 2, 1)?;
                f_invariant(&moebius_apply(&m, z)?)
            }
        }
    }

    /// `int_Y^inf int_{-1/2}^{1/2}` of the constant term at the tile's cusp.
    pub fn tail(&self, y_trunc: f64) -> f64 {
        match self.closed_form {
            TileForm::Identity => 2.0 / y_trunc.sqrt(),
            TileForm::QuarterShift(_) => 1.0 / y_trunc.sqrt(),
            TileForm::HalfCusp => 0.0,
        }
    }
}

/// Value and error estimate of one tile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TileResult {
    pub value: f64,
    pub error: f64,
}

/// `int f(z) dx dy / y^2` over `{|x| <= 1/2, |z| >= 1, y <= Y}`.
///
/// Outer rule in `x`, inner rule in `u = y^{-1/2}`, where the measure becomes
/// `2u du dx` and the integrand stays bounded as `y` grows.
pub fn domain_integral<F>(f: F, y_trunc: f64, tol: f64, max_intervals: usize) -> Result<TileResult>
where
    F: Fn(&HalfPlanePoint) -> Result<f64> + Sync,
{
    let inner_tol = 0.1 * tol;
    let worst_inner = Mutex::new(0.0f64);
    let min_sample = Mutex::new(f64::INFINITY);
    let u_lo = 1.0 / y_trunc.sqrt();
    let column = |x: f64| -> Result<f64> {
        let u_hi = (1.0 - x * x).powf(-0.25);
        let res = AdaptiveQuad::new(inner_tol, max_intervals).integrate(
            |u: f64| {
                let v = f(&HalfPlanePoint::new(x, 1.0 / (u * u))?)?;
                if v < 0.0 {
                    let mut m = min_sample.lock().expect("lock poisoned");
                    *m = m.min(v);
                }
                Ok(2.0 * u * v)
            },
            u_lo,
            u_hi,
        )?;
        let mut w = worst_inner.lock().expect("lock poisoned");
        *w = w.max(res.error);
        Ok(res.value)
    };
    let outer = AdaptiveQuad::new(0.5 * tol, max_intervals)
        .parallel(true)
        .integrate(column, -0.5, 0.5)?;
    let min_sample = *min_sample.lock().expect("lock poisoned");
    if min_sample < 0.0 {
        return Err(Error::Invariant(format!("negative integrand sample {min_sample:e}")));
    }
    let error = outer.error + *worst_inner.lock().expect("lock poisoned");
    if error > tol {
        return Err(Error::ToleranceNotMet {
            what: "fundamental-domain integral".into(),
            estimate: error,
            requested: tol,
        });
    }
    Ok(TileResult {
        value: outer.value,
        error,
    })
}

/// Integral of one level-4 tile up to height `spec.y_trunc`.
pub fn tile_integral(label: ProjectivePoint, spec: &QuadratureSpec) -> Result<TileResult> {
    spec.validate()?;
    let tile = TileIntegrand::new(label)?;
    domain_integral(|z| tile.eval(z), spec.y_trunc, spec.tol_tile, spec.max_subdivisions)
}

/// `6 / sqrt(Y)`: the constant terms at the cusp `oo` (width 1) and `0`
/// (width 4) integrated above height `Y`. The cusp `1/2` contributes nothing
/// at this order; the non-constant modes are below `10 exp(-pi Y)`.
pub fn tail_correction(y_trunc: f64) -> Result<f64> {
    if !(y_trunc >= 2.0) {
        return Err(Error::InvalidInput(format!("truncation height {y_trunc} below 2")));
    }
    Ok(6.0 / y_trunc.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub tile_labels: Vec<ProjectivePoint>,
    pub tile_values: Vec<f64>,
    pub tile_errors: Vec<f64>,
    pub tail_correction: f64,
    pub total: f64,
    pub ratio_to_pi: f64,
    pub y_used: f64,
}

/// Sum of the six tiles plus the cusp tails.
pub fn norm_direct(spec: &QuadratureSpec) -> Result<NormReport> {
    spec.validate()?;
    let tiles = TileIntegrand::all()?;
    let results = tiles
        .par_iter()
        .map(|t| tile_integral(t.label, spec))
        .collect::<Result<Vec<_>>>()?;
    let tail = tail_correction(spec.y_trunc)?;
    let tile_values: Vec<f64> = results.iter().map(|r| r.value).collect();
    let total = compensated_sum_real(tile_values.iter().copied().chain([tail]));
    Ok(NormReport {
        tile_labels: tiles.iter().map(|t| t.label).collect(),
        tile_errors: results.iter().map(|r| r.error).collect(),
        tile_values,
        tail_correction: tail,
        total,
        ratio_to_pi: total / PI,
        y_used: spec.y_trunc,
    })
}

fn f_full(z: &HalfPlanePoint) -> Result<f64> {
    Ok(z.y().sqrt() * theta_full(z, DEFAULT_POINT_TOL)?.norm_sqr())
}

/// `|G_p(-1/(4 p^2 z)) - F(z)/p|` with `G_p(z) = y^{1/2} |theta(p^2 z)|^2`.
pub fn fricke_pointwise_check(p: u64, z: &HalfPlanePoint) -> Result<f64> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    let p2 = (p * p) as f64;
    let w = MoebiusMap::fricke(4.0 * p2)?.apply(z)?;
    let scaled = MoebiusMap::scaling(p2)?.apply(&w)?;
    let g = w.y().sqrt() * theta_full(&scaled, DEFAULT_POINT_TOL)?.norm_sqr();
    Ok((g - f_full(z)? / p as f64).abs())
}

/// Tail of `int F(r z)` above height `Y` on the standard domain; `F(r z)`
/// equals the level-4 tile integrand of the coset containing `r`.
fn rep_tail(rep: &UniModMatrix, y_trunc: f64) -> f64 {
    match rep.c().rem_euclid(4) {
        0 => 2.0 / y_trunc.sqrt(),
        2 => 0.0,
        _ => 1.0 / y_trunc.sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TiledIntegral {
    pub level: u64,
    pub tiles: usize,
    pub value: f64,
    pub error: f64,
}

/// `int F dmu` over `Gamma_0(N) \ H` by integrating `F(r z)` with
/// `theta_full` over the standard domain for every coset representative `r`.
pub fn tiled_integral(level: u64, y_trunc: f64, tol: f64, max_intervals: usize) -> Result<TiledIntegral> {
    if !level.is_multiple_of(4) {
        return Err(Error::InvalidInput(format!(
            "F is only invariant under Gamma_0(N) for 4 | N, got {level}"
        )));
    }
    let table = coset_reps(level)?;
    let results = table
        .reps
        .par_iter()
        .map(|r| {
            let tile = domain_integral(
                |z| f_full(&moebius_apply(r, z)?),
                y_trunc,
                tol,
                max_intervals,
            )?;
            Ok((tile.value + rep_tail(r, y_trunc), tile.error))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TiledIntegral {
        level,
        tiles: table.len(),
        value: compensated_sum_real(results.iter().map(|r| r.0)),
        error: results.iter().map(|r| r.1).sum(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexScalingReport {
    pub p: u64,
    pub level: TiledIntegral,
    pub base_norm: f64,
    pub ratio: f64,
    pub expected_ratio: f64,
}

/// Ratio of `int_{Gamma_0(4p^2) \ H} F dmu` to the level-4 norm, for `p = 3`.
pub fn index_scaling_check(p: u64, spec: &QuadratureSpec) -> Result<IndexScalingReport> {
    if p != 3 {
        return Err(Error::InvalidInput(format!(
            "index scaling is only tiled for p = 3, got {p}"
        )));
    }
    let base = norm_direct(spec)?;
    let level = 4 * p * p;
    let tiled = tiled_integral(level, INDEX_CHECK_HEIGHT, INDEX_CHECK_TOL, spec.max_subdivisions)?;
    let expected = (index_gamma0(level)? / index_gamma0(4)?) as f64;
    Ok(IndexScalingReport {
        p,
        ratio: tiled.value / base.total,
        base_norm: base.total,
        level: tiled,
        expected_ratio: expected,
    })
}
