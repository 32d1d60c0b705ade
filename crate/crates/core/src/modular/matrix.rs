use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::ComplexValue;
use crate::point::HalfPlanePoint;

const ENTRY_BOUND: i64 = 1 << 62;

/// Integer matrix `(a, b; c, d)` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UniModMatrix {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl UniModMatrix {
    pub const IDENTITY: Self = Self { a: 1, b: 0, c: 0, d: 1 };
    /// `z -> -1/z`.
    pub const S: Self = Self { a: 0, b: -1, c: 1, d: 0 };
    /// `z -> z + 1`.
    pub const T: Self = Self { a: 1, b: 1, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if [a, b, c, d].iter().any(|e| e.unsigned_abs() > ENTRY_BOUND as u64) {
            return Err(Error::Overflow(format!("matrix entry exceeds 2^62 in ({a},{b};{c},{d})")));
        }
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(Error::InvalidInput(format!(
                "({a},{b};{c},{d}) has determinant {det}, expected 1"
            )));
        }
        Ok(Self { a, b, c, d })
    }

    /// `z -> z + n`.
    pub fn translation(n: i64) -> Result<Self> {
        Self::new(1, n, 0, 1)
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    /// Matrix product `self * rhs`, failing on overflow.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        let entry = |x: i64, y: i64, u: i64, v: i64| -> Result<i64> {
            let v = x as i128 * y as i128 + u as i128 * v as i128;
            if v.unsigned_abs() > ENTRY_BOUND as u128 {
                Err(Error::Overflow("matrix product exceeds 2^62".into()))
            } else {
                Ok(v as i64)
            }
        };
        Ok(Self {
            a: entry(self.a, rhs.a, self.b, rhs.c)?,
            b: entry(self.a, rhs.b, self.b, rhs.d)?,
            c: entry(self.c, rhs.a, self.d, rhs.c)?,
            d: entry(self.c, rhs.b, self.d, rhs.d)?,
        })
    }
}

impl fmt::Display for UniModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.a, self.b, self.c, self.d)
    }
}

/// Real Möbius transformation with positive determinant, for maps such as
/// `z -> -1/(4p^2 z)` and `z -> p^2 z` that are not in `SL2(Z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MoebiusMap {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0 && det.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "Moebius map ({a},{b};{c},{d}) must have positive determinant, got {det}"
            )));
        }
        Ok(Self { a, b, c, d })
    }

    /// The Fricke involution `z -> -1/(N z)`.
    pub fn fricke(level: f64) -> Result<Self> {
        Self::new(0.0, -1.0, level, 0.0)
    }

    /// `z -> k z`.
    pub fn scaling(k: f64) -> Result<Self> {
        Self::new(k, 0.0, 0.0, 1.0)
    }
}

impl From<UniModMatrix> for MoebiusMap {
    fn from(m: UniModMatrix) -> Self {
        Self {
            a: m.a as f64,
            b: m.b as f64,
            c: m.c as f64,
            d: m.d as f64,
        }
    }
}

/// Anything acting on the upper half-plane by a fractional linear map.
pub trait Moebius {
    /// `(a, b, c, d)` as reals.
    fn coefficients(&self) -> (f64, f64, f64, f64);

    fn apply(&self, z: &HalfPlanePoint) -> Result<HalfPlanePoint> {
        moebius_apply(self, z)
    }
}

impl Moebius for UniModMatrix {
    fn coefficients(&self) -> (f64, f64, f64, f64) {
        (self.a as f64, self.b as f64, self.c as f64, self.d as f64)
    }
}

impl Moebius for MoebiusMap {
    fn coefficients(&self) -> (f64, f64, f64, f64) {
        (self.a, self.b, self.c, self.d)
    }
}

/// `(az + b)/(cz + d)`, with the imaginary part taken from the exact
/// formula `y det / |cz + d|^2` so it stays positive.
pub fn moebius_apply<M: Moebius + ?Sized>(m: &M, z: &HalfPlanePoint) -> Result<HalfPlanePoint> {
    let (a, b, c, d) = m.coefficients();
    let w = z.to_complex();
    let den = w * c + d;
    let num = w * a + b;
    let den_norm = den.norm_sqr();
    if !(den_norm > 0.0) {
        return Err(Error::Domain(format!("cz + d vanishes at {z}")));
    }
    let x = (num * den.conj()).re / den_norm;
    let y = z.y() * (a * d - b * c) / den_norm;
    HalfPlanePoint::new(x, y)
}

/// Complex-valued form of [`moebius_apply`] used where no validation is needed.
pub fn moebius_complex<M: Moebius + ?Sized>(m: &M, w: ComplexValue) -> ComplexValue {
    let (a, b, c, d) = m.coefficients();
    (w * a + b) / (w * c + d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn pt(x: f64, y: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(x, y).unwrap()
    }

    #[test]
    fn determinant_is_enforced() {
        assert!(UniModMatrix::new(1, 1, 0, 1).is_ok());
        assert!(UniModMatrix::new(2, 0, 0, 1).is_err());
        assert!(UniModMatrix::new(i64::MAX, 0, 0, 1).is_err());
    }

    #[test]
    fn product_and_inverse() {
        let m = UniModMatrix::new(2, 1, 7, 4).unwrap();
        assert_eq!(m.compose(&m.inverse()).unwrap(), UniModMatrix::IDENTITY);
        let big = UniModMatrix::new(1, 1 << 61, 0, 1).unwrap();
        assert!(big.compose(&big).is_err() || big.compose(&big).unwrap().b() == 1 << 62);
        let huge = UniModMatrix::new(1, (1 << 62) - 1, 0, 1).unwrap();
        assert!(huge.compose(&huge).is_err());
    }

    #[test]
    fn identity_and_fixed_point() {
        let z = pt(0.3, 0.7);
        assert_eq!(moebius_apply(&UniModMatrix::IDENTITY, &z).unwrap(), z);
        let i = pt(0.0, 1.0);
        let w = moebius_apply(&UniModMatrix::S, &i).unwrap();
        assert!(w.x().abs() < 1e-16 && (w.y() - 1.0).abs() < 1e-16);
    }

    #[test]
    fn fricke_imaginary_part_formula() {
        let f = MoebiusMap::fricke(36.0).unwrap();
        let w = f.apply(&pt(0.0, 1.0 / 6.0)).unwrap();
        assert!((w.y() - 1.0 / 6.0).abs() < 1e-15);
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let z = pt(rng.gen_range(-2.0..2.0), rng.gen_range(0.01..5.0));
            let w = f.apply(&z).unwrap();
            let expected = z.y() / (36.0 * z.to_complex().norm_sqr());
            assert!((w.y() - expected).abs() <= 1e-14 * expected);
            let wc = moebius_complex(&f, z.to_complex());
            assert!((wc.re - w.x()).abs() < 1e-12 * wc.norm().max(1.0));
        }
    }

    #[test]
    fn upper_half_plane_is_preserved() {
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..200 {
            let z = pt(rng.gen_range(-10.0..10.0), rng.gen_range(1e-3..10.0));
            let a = rng.gen_range(-20..20);
            let c = rng.gen_range(-20..20);
            let (g, x, y) = super::super::ext_gcd(a, c);
            if g != 1 {
                continue;
            }
            // a x + c y = 1  =>  (a, -y; c, x)
            let m = UniModMatrix::new(a, -y, c, x).unwrap();
            assert!(moebius_apply(&m, &z).unwrap().y() > 0.0);
        }
    }

    #[test]
    fn negative_determinant_maps_are_rejected() {
        assert!(MoebiusMap::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(MoebiusMap::scaling(9.0).is_ok());
    }
}
