use std::fmt;

use super::{ext_gcd, gcd, index_gamma0, UniModMatrix};
use crate::error::{Error, Result};

/// Largest level accepted by [`coset_reps`].
pub const MAX_COSET_LEVEL: u64 = 10_000;

/// A point `(c : d)` of the projective line over `Z/N`, in normal form:
/// `c` is the divisor `gcd(c, N)` (0 when it equals N) and `d` is the least
/// residue in its orbit under the remaining unit scalings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint {
    pub c: u64,
    pub d: u64,
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", self.c, self.d)
    }
}

impl ProjectivePoint {
    /// Normal form of `(c : d)` mod `level`.
    pub fn normalize(c: i64, d: i64, level: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidInput("level must be at least 1".into()));
        }
        let n = level as i64;
        if level == 1 {
            return Ok(Self { c: 0, d: 0 });
        }
        let c = c.rem_euclid(n);
        let d = d.rem_euclid(n);
        if gcd(gcd(c, d), n) != 1 {
            return Err(Error::InvalidInput(format!("({c}:{d}) is not a point of P^1(Z/{n})")));
        }
        let g = gcd(c, n);
        let m = n / g;
        // u = (c/g)^{-1} mod m, lifted to a unit mod n; then u c = g mod n.
        let u0 = if m == 1 { 1 } else { ext_gcd(c / g, m).1.rem_euclid(m) };
        let u = (0..g)
            .map(|k| (u0 + k * m).rem_euclid(n))
            .find(|&u| gcd(u, n) == 1)
            .expect("a unit lift always exists");
        let c_norm = (u as i128 * c as i128).rem_euclid(n as i128) as i64;
        let d_scaled = (u as i128 * d as i128).rem_euclid(n as i128) as i64;
        debug_assert_eq!(c_norm, g % n);
        // Units v = 1 mod m fix c; pick the least image of d.
        let d_norm = (0..g)
            .map(|k| 1 + k * m)
            .filter(|&v| gcd(v, n) == 1)
            .map(|v| (v as i128 * d_scaled as i128).rem_euclid(n as i128) as i64)
            .min()
            .expect("v = 1 is always admissible");
        Ok(Self {
            c: c_norm as u64,
            d: d_norm as u64,
        })
    }

    /// Lifts the label to a matrix of `SL2(Z)` whose bottom row is congruent
    /// to `(c, d)` mod `level`.
    pub fn lift(&self, level: u64) -> Result<UniModMatrix> {
        if level == 1 {
            return Ok(UniModMatrix::IDENTITY);
        }
        let n = level as i64;
        let (c, mut d) = (self.c as i64, self.d as i64);
        let c = if c == 0 {
            // gcd(d, N) = 1, so (N, d) is a coprime lift unless d is already 1.
            if d == 1 {
                0
            } else {
                n
            }
        } else {
            c
        };
        if c != 0 {
            let mut steps = 0;
            while gcd(c, d) != 1 {
                d += n;
                steps += 1;
                if steps > 10 * n {
                    return Err(Error::Invariant(format!("no coprime lift of {self} mod {n}")));
                }
            }
        }
        // a d - b c = 1
        let (g, x, y) = ext_gcd(d, c);
        debug_assert_eq!(g, 1);
        let (mut a, mut b) = (x, -y);
        if c != 0 {
            let k = a.div_euclid(c);
            a -= k * c;
            b -= k * d;
        }
        UniModMatrix::new(a, b, c, d)
    }
}

/// Right-coset representatives of `Gamma_0(N)` in `SL2(Z)`.
///
/// `SL2(Z) = disjoint union of Gamma_0(N) r_i`, and `m` lies in the coset of
/// `r_i` exactly when the bottom row of `m` reduces to `labels[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosetTable {
    pub level: u64,
    pub reps: Vec<UniModMatrix>,
    pub labels: Vec<ProjectivePoint>,
}

impl CosetTable {
    /// Index of the coset containing `m`.
    pub fn coset_of(&self, m: &UniModMatrix) -> Result<usize> {
        let label = ProjectivePoint::normalize(m.c(), m.d(), self.level)?;
        self.position(&label)
            .ok_or_else(|| Error::Invariant(format!("label {label} missing from coset table")))
    }

    pub fn position(&self, label: &ProjectivePoint) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Enumerates `P^1(Z/N)` and lifts every label to a representative.
pub fn coset_reps(level: u64) -> Result<CosetTable> {
    if !(1..=MAX_COSET_LEVEL).contains(&level) {
        return Err(Error::InvalidInput(format!(
            "coset level {level} outside [1, {MAX_COSET_LEVEL}]"
        )));
    }
    let mut labels = Vec::new();
    if level == 1 {
        labels.push(ProjectivePoint { c: 0, d: 0 });
    } else {
        let n = level as i64;
        for g in (1..=n).filter(|g| n % g == 0) {
            let c = g % n;
            for d in 0..n {
                if gcd(g, d) != 1 {
                    continue;
                }
                let p = ProjectivePoint::normalize(c, d, level)?;
                if p.c == c as u64 && p.d == d as u64 {
                    labels.push(p);
                }
            }
        }
    }
    let expected = index_gamma0(level)? as usize;
    if labels.len() != expected {
        return Err(Error::Invariant(format!(
            "found {} labels for level {level}, expected index {expected}",
            labels.len()
        )));
    }
    let reps = labels.iter().map(|l| l.lift(level)).collect::<Result<Vec<_>>>()?;
    Ok(CosetTable { level, reps, labels })
}

/// A cusp: infinity or a reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cusp {
    Infinity,
    Rational { num: i64, den: i64 },
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cusp::Infinity => write!(f, "oo"),
            Cusp::Rational { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

/// A cusp of `Gamma_0(4)`, its width, and the coset tiles (0-based indices
/// into [`CosetTable::reps`]) whose copy of the standard domain touches it.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspInfo {
    pub representative: Cusp,
    pub width: u64,
    pub tile_indices: Vec<usize>,
}

/// Cusp data of `Gamma_0(4)`: `oo` (width 1), `0` (width 4), `1/2` (width 1).
pub fn cusp_data_gamma0_4() -> Result<Vec<CuspInfo>> {
    let table = coset_reps(4)?;
    let tiles = |labels: &[(u64, u64)]| -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|&(c, d)| {
                table
                    .position(&ProjectivePoint { c, d })
                    .ok_or_else(|| Error::Invariant(format!("label ({c}:{d}) missing")))
            })
            .collect()
    };
    Ok(vec![
        CuspInfo {
            representative: Cusp::Infinity,
            width: 1,
            tile_indices: tiles(&[(0, 1)])?,
        },
        CuspInfo {
            representative: Cusp::Rational { num: 0, den: 1 },
            width: 4,
            tile_indices: tiles(&[(1, 0), (1, 1), (1, 2), (1, 3)])?,
        },
        CuspInfo {
            representative: Cusp::Rational { num: 1, den: 2 },
            width: 1,
            tile_indices: tiles(&[(2, 1)])?,
        },
    ])
}
