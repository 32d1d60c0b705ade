//! Riemann zeta function via Borwein's accelerated alternating series for
//! the Dirichlet eta function, `zeta(s) = eta(s) / (1 - 2^(1-s))`.

use std::f64::consts::{LN_2, PI};

use super::{ensure_finite, expm1, ComplexCompensatedSum, ComplexValue, LaurentData, EULER_GAMMA};
use crate::error::{Error, Result};

const POLE_DISTANCE: f64 = 1e-12;
const MIN_TERMS: usize = 24;
const MAX_TERMS: usize = 400;

/// Riemann zeta function for complex `s != 1`.
pub fn zeta(s: ComplexValue) -> Result<ComplexValue> {
    let one = ComplexValue::new(1.0, 0.0);
    if (s - one).norm() < POLE_DISTANCE {
        return Err(Error::PoleArgument(format!("zeta at {s}")));
    }
    let n = term_count(s);
    let weights = borwein_weights(n);
    let mut eta = ComplexCompensatedSum::new();
    for (k, w) in weights.iter().enumerate() {
        let base = ((k + 1) as f64).ln();
        let term = *w * (-s * base).exp();
        if k % 2 == 0 {
            eta.add(term);
        } else {
            eta.add(-term);
        }
    }
    // 1 - 2^(1-s) = -expm1((1-s) ln 2)
    let denom = -expm1((one - s) * LN_2);
    ensure_finite(eta.value() / denom, "zeta")
}

/// Laurent data of `s -> zeta(2s - 1)` at `s = 1`.
///
/// Near `u = 1`, `zeta(u) = 1/(u-1) + gamma + ...`; with `u = 2s - 1` the
/// polar part becomes `(1/2)/(s-1)` and the constant term is unchanged.
pub fn zeta_shifted_laurent() -> LaurentData {
    LaurentData {
        pole_order: 1,
        residue: 0.5,
        constant_term: EULER_GAMMA,
    }
}

fn term_count(s: ComplexValue) -> usize {
    // The truncation error is bounded by 3 (1 + 2|t|) e^{pi|t|/2} / (3 + sqrt 8)^n
    // up to the size of the eta factor; aim for 1e-17.
    let t = s.im.abs();
    let budget = (3.0 * (1.0 + 2.0 * t) / 1e-17).ln() + 0.5 * PI * t + 2.0 * (1.0 - s.re).max(0.0);
    let n = (budget / (3.0 + 8f64.sqrt()).ln()).ceil() as usize + 2;
    n.clamp(MIN_TERMS, MAX_TERMS)
}

/// Normalised weights `(d_n - d_k) / d_n` for `k = 0..n`.
fn borwein_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    // t_i = n (n+i-1)! 4^i / ((n-i)! (2i)!), t_0 = 1
    let mut terms = Vec::with_capacity(n + 1);
    let mut t = 1.0;
    terms.push(t);
    for i in 0..n {
        let fi = i as f64;
        t *= 2.0 * (nf + fi) * (nf - fi) / ((fi + 1.0) * (2.0 * fi + 1.0));
        terms.push(t);
    }
    let total: f64 = terms.iter().sum();
    let mut weights = vec![0.0; n];
    let mut suffix = 0.0;
    for k in (0..n).rev() {
        suffix += terms[k + 1];
        weights[k] = suffix / total;
    }
    weights
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    /// Euler–Maclaurin summation, used only as an independent oracle.
    fn zeta_euler_maclaurin(s: ComplexValue) -> ComplexValue {
        const BERNOULLI: [f64; 10] = [
            1.0 / 6.0,
            -1.0 / 30.0,
            1.0 / 42.0,
            -1.0 / 30.0,
            5.0 / 66.0,
            -691.0 / 2730.0,
            7.0 / 6.0,
            -3617.0 / 510.0,
            43867.0 / 798.0,
            -174_611.0 / 330.0,
        ];
        // Cut-off grows with |s| so the remainder stays negligible, while
        // staying small enough that N^(1-s) does not swamp the rounding.
        let cutoff = (1.2 * s.norm()).ceil().max(12.0) as usize;
        let big_n = cutoff as f64;
        let pow = |n: f64, e: ComplexValue| (e * n.ln()).exp();
        let mut head = crate::numerics::ComplexCompensatedSum::new();
        for n in 1..cutoff {
            head.add(pow(n as f64, -s));
        }
        let mut sum = head.value();
        let one = c(1.0, 0.0);
        sum += pow(big_n, one - s) / (s - one);
        sum += pow(big_n, -s) * 0.5;
        let mut rising = s; // s (s+1) ... (s + 2k - 2)
        let mut factorial = 2.0; // (2k)!
        for (k, b) in BERNOULLI.iter().enumerate() {
            let k1 = (k + 1) as f64;
            let exponent = -s - (2.0 * k1 - 1.0);
            sum += rising * (*b / factorial) * pow(big_n, exponent);
            rising = rising * (s + 2.0 * k1 - 1.0) * (s + 2.0 * k1);
            factorial *= (2.0 * k1 + 1.0) * (2.0 * k1 + 2.0);
        }
        sum
    }

    /// Hasse's globally convergent series for eta, used as a second oracle.
    fn eta_hasse(s: ComplexValue, terms: usize) -> ComplexValue {
        let mut total = c(0.0, 0.0);
        for n in 0..terms {
            let mut inner = c(0.0, 0.0);
            let mut binom = 1.0;
            for k in 0..=n {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                inner += (-s * ((k + 1) as f64).ln()).exp() * (sign * binom);
                binom = binom * (n - k) as f64 / (k + 1) as f64;
            }
            total += inner * 0.5f64.powi(n as i32 + 1);
        }
        total
    }

    fn rel(a: ComplexValue, b: ComplexValue) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn oracle_reproduces_known_constants() {
        let z2 = zeta_euler_maclaurin(c(2.0, 0.0));
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-14);
    }

    #[test]
    fn integer_values() {
        let z2 = zeta(c(2.0, 0.0)).unwrap();
        assert!(rel(z2, zeta_euler_maclaurin(c(2.0, 0.0))) < 1e-12);
        assert!((z2.re - 1.644_934_066_848_226).abs() < 1e-13);
        let z3 = zeta(c(3.0, 0.0)).unwrap();
        assert!((z3.re - 1.202_056_903_159_594).abs() < 1e-13);
        assert!(rel(z3, zeta_euler_maclaurin(c(3.0, 0.0))) < 1e-12);
        let z4 = zeta(c(4.0, 0.0)).unwrap();
        assert!((z4.re - PI.powi(4) / 90.0).abs() < 1e-12 * z4.re);
    }

    #[test]
    fn value_at_zero_matches_eta_continuation() {
        let z0 = zeta(c(0.0, 0.0)).unwrap();
        let oracle = eta_hasse(c(0.0, 0.0), 40) / (1.0 - 2.0);
        assert!((oracle.re + 0.5).abs() < 1e-14);
        assert!((z0 - c(-0.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn complex_arguments_match_euler_maclaurin() {
        let points = [
            c(0.5, 14.0),
            c(-1.5, 3.0),
            c(2.0, 50.0),
            c(0.3, -20.0),
            c(1.0, 0.8),
            c(1.6, -0.7),
            c(0.2, 0.1),
            c(-1.9, -30.0),
        ];
        for s in points {
            let got = zeta(s).unwrap();
            let want = zeta_euler_maclaurin(s);
            assert!(rel(got, want) < 1e-12, "zeta({s}) = {got}, oracle {want}");
        }
        // Frozen high-precision reference at a point near the critical line.
        let frozen = c(0.022_241_142_609_993_589, -0.103_258_123_266_450_06);
        assert!(rel(zeta(c(0.5, 14.0)).unwrap(), frozen) < 1e-12);
    }

    #[test]
    fn pole_is_rejected() {
        assert!(matches!(zeta(c(1.0, 0.0)), Err(Error::PoleArgument(_))));
        assert!(zeta(c(1.0 + 1e-9, 0.0)).is_ok());
    }

    #[test]
    fn residue_limit_extrapolates_to_one() {
        // (s-1) zeta(s) = 1 + gamma (s-1) + O((s-1)^2): a two-point linear
        // extrapolation from the closest samples removes the linear term.
        let samples: Vec<(f64, f64)> = (2..=6)
            .map(|k| {
                let s = 1.0 + 10f64.powi(-k);
                let h = s - 1.0;
                (h, h * zeta(c(s, 0.0)).unwrap().re)
            })
            .collect();
        let (h1, v1) = samples[3];
        let (h2, v2) = samples[4];
        let limit = v2 - h2 * (v1 - v2) / (h1 - h2);
        assert!((limit - 1.0).abs() < 1e-8, "limit {limit}");
        for (h, v) in samples {
            assert!((v - 1.0 - EULER_GAMMA * h).abs() < h * h);
        }
    }

    #[test]
    fn shifted_laurent_data() {
        let l = zeta_shifted_laurent();
        assert_eq!(l.pole_order, 1);
        assert_eq!(l.residue, 0.5);
        let s = 1.0 + 1e-6;
        let v = (s - 1.0) * zeta(c(2.0 * s - 1.0, 0.0)).unwrap().re;
        assert!((v - 0.5).abs() < 1e-4);
        let h = 1e-4;
        let v = zeta(c(1.0 + 2.0 * h, 0.0)).unwrap().re - l.residue / h;
        assert!((v - l.constant_term).abs() < 1e-3);
    }
}
