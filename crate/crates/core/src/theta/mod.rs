//! The theta series `theta(z) = sum_n exp(2 pi i n^2 z)` on the whole upper
//! half-plane, the weight-zero invariant `F(z) = y^{1/2} |theta(z)|^2`, and
//! its horizontal average `A(y)`.

mod average;

pub use average::{
    fit_fourier_constant, fourier_model, x_average, x_average_full_period, FourierFit,
    DEFAULT_XAVG_TOL,
};

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::modular::UniModMatrix;
use crate::numerics::{ComplexCompensatedSum, ComplexValue};
use crate::point::HalfPlanePoint;

/// Below this height the direct series is refused.
pub const DIRECT_MIN_Y: f64 = 0.05;
/// Default pointwise tolerance.
pub const DEFAULT_POINT_TOL: f64 = 1e-13;
/// Smallest pointwise tolerance accepted.
pub const MIN_TOL: f64 = 1e-15;
/// Iteration cap for the reduction loop.
pub const MAX_REDUCTION_STEPS: usize = 1_000_000;
const JACOBI_TOL: f64 = 1e-10;
const INVERSION_SLACK: f64 = 1e-12;

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol >= MIN_TOL {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("tolerance {tol:e} below {MIN_TOL:e}")))
    }
}

/// Number of terms `N` such that the omitted tail `sum_{|n| > N}` is below `tol`.
fn direct_terms(y: f64, tol: f64) -> usize {
    let mut n = 1usize;
    loop {
        let nf = n as f64;
        let bound = 2.0 * (-2.0 * PI * nf * nf * y).exp()
            / (1.0 - (-2.0 * PI * (2.0 * nf + 1.0) * y).exp());
        if bound <= tol {
            return n - 1;
        }
        n += 1;
    }
}

/// Direct summation, valid for `y >= 0.05`.
pub fn theta_direct(z: &HalfPlanePoint, tol: f64) -> Result<ComplexValue> {
    check_tol(tol)?;
    let y = z.y();
    if y < DIRECT_MIN_Y {
        return Err(Error::Domain(format!(
            "direct series needs Im z >= {DIRECT_MIN_Y}, got {y}"
        )));
    }
    let x = z.x() - z.x().floor();
    let n_max = direct_terms(y, tol);
    let mut acc = ComplexCompensatedSum::new();
    acc.add(ComplexValue::new(1.0, 0.0));
    for n in 1..=n_max {
        let n2 = (n * n) as f64;
        let phase = (n2 * x).fract();
        let modulus = 2.0 * (-2.0 * PI * n2 * y).exp();
        acc.add(ComplexValue::from_polar(modulus, 2.0 * PI * phase));
    }
    Ok(acc.value())
}

/// The three theta-nullwerte `theta_2, theta_3, theta_4` at a common argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaTriple {
    pub t2: ComplexValue,
    pub t3: ComplexValue,
    pub t4: ComplexValue,
}

impl ThetaTriple {
    /// `|t3^4 - t2^4 - t4^4| / |t3|^4`.
    pub fn jacobi_defect(&self) -> f64 {
        (self.t3.powi(4) - self.t2.powi(4) - self.t4.powi(4)).norm() / self.t3.norm().powi(4)
    }

    pub fn get(&self, index: u8) -> ComplexValue {
        match index {
            2 => self.t2,
            3 => self.t3,
            _ => self.t4,
        }
    }

    /// Series evaluation with nome `q = exp(i pi w)`; meant for `Im w >= 0.8`.
    pub fn evaluate(w: ComplexValue) -> Result<Self> {
        let mut s3 = ComplexCompensatedSum::new();
        let mut s4 = ComplexCompensatedSum::new();
        let mut s2 = ComplexCompensatedSum::new();
        s3.add(ComplexValue::new(1.0, 0.0));
        s4.add(ComplexValue::new(1.0, 0.0));
        let term = |k: f64| -> ComplexValue {
            // exp(i pi k w)
            ComplexValue::from_polar((-PI * k * w.im).exp(), PI * (k * w.re).rem_euclid(2.0))
        };
        let mut n = 0u64;
        loop {
            let nf = n as f64;
            let t_pair = term(nf * (nf + 1.0));
            s2.add(t_pair);
            if n >= 1 {
                let t_sq = term(nf * nf) * 2.0;
                s3.add(t_sq);
                s4.add(if n % 2 == 1 { -t_sq } else { t_sq });
                if t_pair.norm() < 1e-20 && t_sq.norm() < 1e-20 {
                    break;
                }
            }
            n += 1;
            if n > 10_000 {
                return Err(Error::Convergence(format!("nullwert series at w = {w}")));
            }
        }
        let prefactor = ComplexValue::from_polar(2.0 * (-PI * w.im / 4.0).exp(), PI * w.re / 4.0);
        let triple = Self {
            t2: prefactor * s2.value(),
            t3: s3.value(),
            t4: s4.value(),
        };
        let defect = triple.jacobi_defect();
        if !(defect <= JACOBI_TOL) {
            return Err(Error::Invariant(format!(
                "Jacobi identity defect {defect:e} at w = {w}"
            )));
        }
        Ok(triple)
    }
}

/// Which reduced-side nullwert represents each of `theta_2, theta_3, theta_4`
/// of the original argument; one of the six orderings of `(2, 3, 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriplePermutation {
    pub images: [u8; 3],
}

impl TriplePermutation {
    pub const IDENTITY: Self = Self { images: [2, 3, 4] };

    fn shift(self, odd: bool) -> Self {
        if !odd {
            return self;
        }
        Self {
            images: self.images.map(|k| match k {
                3 => 4,
                4 => 3,
                k => k,
            }),
        }
    }

    fn invert(self) -> Self {
        Self {
            images: self.images.map(|k| match k {
                2 => 4,
                4 => 2,
                k => k,
            }),
        }
    }
}

impl fmt::Display for TriplePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.images;
        write!(f, "(2,3,4)->({a},{b},{c})")
    }
}

/// Record of the reduction `w = 2z -> w'` performed by [`theta_full_traced`].
///
/// `accumulated_factor` satisfies `theta_3(w) = theta_k(w') / accumulated_factor`
/// with `k = permutation.images[1]`; each inversion at a point `w_k` multiplies
/// it by `sqrt(-i w_k)`, so its modulus is `prod |w_k|^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionTrace {
    /// `gamma` with `w' = gamma w`, or `None` if its entries overflowed.
    pub matrix: Option<UniModMatrix>,
    pub accumulated_factor: ComplexValue,
    pub permutation: TriplePermutation,
    pub reduced: ComplexValue,
    /// Points at which an inversion was applied, in order.
    pub inversion_points: Vec<ComplexValue>,
}

/// Evaluates `theta(z) = theta_3(2z)` by reducing `2z` to the standard domain.
pub fn theta_full_traced(z: &HalfPlanePoint) -> Result<(ComplexValue, ThetaTriple, ReductionTrace)> {
    let mut w = z.to_complex() * 2.0;
    let mut perm = TriplePermutation::IDENTITY;
    // factors[i] belongs to theta_{2+i} of the original argument
    let mut factors = [ComplexValue::new(1.0, 0.0); 3];
    let mut matrix = Some(UniModMatrix::IDENTITY);
    let mut inversion_points = Vec::new();
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps > MAX_REDUCTION_STEPS {
            return Err(Error::ReductionFailure(MAX_REDUCTION_STEPS));
        }
        let n = (w.re + 0.5).floor();
        if n != 0.0 {
            w.re -= n;
            let odd = n.rem_euclid(2.0) == 1.0;
            let eighth = n.rem_euclid(8.0);
            for (i, k) in perm.images.iter().enumerate() {
                if *k == 2 {
                    factors[i] *= ComplexValue::from_polar(1.0, -PI * eighth / 4.0);
                }
            }
            perm = perm.shift(odd);
            matrix = matrix.and_then(|m| {
                UniModMatrix::translation(-(n as i64))
                    .and_then(|t| t.compose(&m))
                    .ok()
            });
        }
        if w.norm_sqr() >= 1.0 - INVERSION_SLACK {
            break;
        }
        let root = (ComplexValue::new(0.0, -1.0) * w).sqrt();
        for f in factors.iter_mut() {
            *f *= root;
        }
        inversion_points.push(w);
        w = -w.inv();
        perm = perm.invert();
        matrix = matrix.and_then(|m| UniModMatrix::S.compose(&m).ok());
    }
    let triple = ThetaTriple::evaluate(w)?;
    let acc = factors[1];
    let value = triple.get(perm.images[1]) / acc;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonFiniteSample(format!("theta at {z}")));
    }
    let trace = ReductionTrace {
        matrix,
        accumulated_factor: acc,
        permutation: perm,
        reduced: w,
        inversion_points,
    };
    Ok((value, triple, trace))
}

/// `theta(z)` on the whole upper half-plane via the reduction engine.
///
/// The reduced evaluation is carried to full working precision; `tol` is
/// validated but does not truncate anything.
pub fn theta_full(z: &HalfPlanePoint, tol: f64) -> Result<ComplexValue> {
    check_tol(tol)?;
    theta_full_traced(z).map(|(v, _, _)| v)
}

/// Direct series above [`DIRECT_MIN_Y`], reduction engine below.
pub fn theta(z: &HalfPlanePoint, tol: f64) -> Result<ComplexValue> {
    if z.y() >= DIRECT_MIN_Y {
        theta_direct(z, tol)
    } else {
        theta_full(z, tol)
    }
}

/// `F(z) = y^{1/2} |theta(z)|^2`.
pub fn f_invariant(z: &HalfPlanePoint) -> Result<f64> {
    let t = theta(z, DEFAULT_POINT_TOL)?;
    Ok(z.y().sqrt() * t.norm_sqr())
}
