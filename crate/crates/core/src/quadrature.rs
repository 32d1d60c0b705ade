//! Globally adaptive Gauss–Kronrod (7/15) quadrature and the shared
//! integration contract.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::CompensatedSum;

/// Tolerances and limits shared by every integral in the crate.
///
/// All integrals are taken against the hyperbolic measure `dx dy / y^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Truncation height of the fundamental-domain integrals.
    pub y_trunc: f64,
    /// Absolute tolerance per fundamental-domain tile.
    pub tol_tile: f64,
    /// Absolute tolerance of the direct Rankin integral.
    pub tol_ip: f64,
    /// Maximum number of intervals any adaptive rule may create.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            y_trunc: 100.0,
            tol_tile: 1e-9,
            tol_ip: 1e-7,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.y_trunc >= 2.0 && self.y_trunc.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "truncation height {} must be at least 2",
                self.y_trunc
            )));
        }
        for (name, tol) in [("tol_tile", self.tol_tile), ("tol_ip", self.tol_ip)] {
            if !(1e-14..=1e-2).contains(&tol) {
                return Err(Error::InvalidInput(format!(
                    "{name} = {tol:e} outside [1e-14, 1e-2]"
                )));
            }
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidInput("max_subdivisions must be positive".into()));
        }
        Ok(())
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive Gauss–Kronrod integrator.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate (`|K15 - G7|` per interval) drops below `tol`. With `parallel`
/// set, the fifteen nodes of each interval are evaluated on the rayon pool;
/// results are combined in a fixed order, so the value does not depend on the
/// number of workers.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveQuad {
    pub tol: f64,
    pub max_intervals: usize,
    pub parallel: bool,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

impl AdaptiveQuad {
    pub fn new(tol: f64, max_intervals: usize) -> Self {
        Self {
            tol,
            max_intervals,
            parallel: false,
        }
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<QuadResult>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates over consecutive intervals delimited by `breaks`.
    pub fn integrate_with_breaks<F>(&self, f: F, breaks: &[f64]) -> Result<QuadResult>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput(format!(
                "integration breakpoints must be strictly increasing, got {breaks:?}"
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance {} must be positive", self.tol)));
        }
        let mut heap = BinaryHeap::new();
        let mut evaluations = 0;
        for w in breaks.windows(2) {
            heap.push(self.kronrod(&f, w[0], w[1])?);
            evaluations += 15;
        }
        loop {
            let total_error: f64 = heap.iter().map(|s| s.error).sum();
            if total_error <= self.tol {
                break;
            }
            if heap.len() >= self.max_intervals {
                return Err(Error::ToleranceNotMet {
                    what: format!("adaptive quadrature on [{}, {}]", breaks[0], breaks[breaks.len() - 1]),
                    estimate: total_error,
                    requested: self.tol,
                });
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if !(worst.a < mid && mid < worst.b) {
                return Err(Error::ToleranceNotMet {
                    what: format!("interval [{}, {}] cannot be bisected further", worst.a, worst.b),
                    estimate: total_error,
                    requested: self.tol,
                });
            }
            heap.push(self.kronrod(&f, worst.a, mid)?);
            heap.push(self.kronrod(&f, mid, worst.b)?);
            evaluations += 30;
        }
        let mut segments = heap.into_vec();
        segments.sort_by(|x, y| x.a.total_cmp(&y.a));
        let mut value = CompensatedSum::new();
        let mut error = 0.0;
        for s in &segments {
            value.add(s.value);
            error += s.error;
        }
        Ok(QuadResult {
            value: value.value(),
            error,
            evaluations,
        })
    }

    fn kronrod<F>(&self, f: &F, a: f64, b: f64) -> Result<Segment>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut nodes = [0.0; 15];
        for i in 0..7 {
            nodes[2 * i] = center - half * XGK[i];
            nodes[2 * i + 1] = center + half * XGK[i];
        }
        nodes[14] = center;
        let eval = |x: &f64| -> Result<f64> {
            let v = f(*x)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFiniteSample(format!("integrand at {x} returned {v}")))
            }
        };
        let values: Vec<f64> = if self.parallel {
            nodes.par_iter().map(eval).collect::<Result<_>>()?
        } else {
            nodes.iter().map(eval).collect::<Result<_>>()?
        };
        let mut kronrod = WGK[7] * values[14];
        let mut gauss = WG[3] * values[14];
        for i in 0..7 {
            let pair = values[2 * i] + values[2 * i + 1];
            kronrod += WGK[i] * pair;
            if i % 2 == 1 {
                gauss += WG[i / 2] * pair;
            }
        }
        Ok(Segment {
            a,
            b,
            value: kronrod * half,
            error: ((kronrod - gauss) * half).abs(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let q = AdaptiveQuad::new(1e-14, 10);
        let r = q.integrate(|x| Ok(x.powi(5) - 3.0 * x * x + 1.0), -1.0, 2.0).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0) + 3.0;
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let q = AdaptiveQuad::new(1e-10, 500);
        let r = q.integrate(|x| Ok(1.0 / x.sqrt()), 0.0, 1.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn parallel_evaluation_is_bitwise_identical() {
        let f = |x: f64| Ok((10.0 * x).sin() * (-x).exp());
        let serial = AdaptiveQuad::new(1e-12, 200).integrate(f, 0.0, 5.0).unwrap();
        let par = AdaptiveQuad::new(1e-12, 200).parallel(true).integrate(f, 0.0, 5.0).unwrap();
        assert_eq!(serial, par);
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let q = AdaptiveQuad::new(1e-14, 4);
        let err = q.integrate(|x| Ok((50.0 * x).sin().abs()), 0.0, 10.0).unwrap_err();
        assert!(err.is_budget_exhausted());
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let q = AdaptiveQuad::new(1e-8, 10);
        assert!(matches!(
            q.integrate(|_| Ok(f64::NAN), 0.0, 1.0),
            Err(Error::NonFiniteSample(_))
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::default().validate().is_ok());
        let bad = QuadratureSpec { y_trunc: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = QuadratureSpec { tol_tile: 1e-20, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
