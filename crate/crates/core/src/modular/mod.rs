//! Integer matrix machinery for `Gamma_0(N)`: membership, index, right-coset
//! representatives labelled by the projective line mod N, cusp data for
//! level 4, and reduction into the standard fundamental domain.

mod cosets;
mod matrix;
mod reduce;

pub use cosets::{coset_reps, cusp_data_gamma0_4, CosetTable, Cusp, CuspInfo, ProjectivePoint};
pub use matrix::{moebius_apply, moebius_complex, Moebius, MoebiusMap, UniModMatrix};
pub use reduce::standard_domain_reduce;

use crate::error::{Error, Result};

/// Levels above this are rejected by [`index_gamma0`].
pub const MAX_INDEX_LEVEL: u64 = 1 << 31;

/// Whether `m` lies in `Gamma_0(N)`, i.e. `N | c`.
pub fn in_gamma0(m: &UniModMatrix, level: u64) -> bool {
    level >= 1 && m.c().unsigned_abs().is_multiple_of(level)
}

/// `[SL2(Z) : Gamma_0(N)] = N prod_{q | N} (1 + 1/q)`.
pub fn index_gamma0(level: u64) -> Result<u64> {
    if level == 0 {
        return Err(Error::InvalidInput("level must be at least 1".into()));
    }
    if level > MAX_INDEX_LEVEL {
        return Err(Error::Overflow(format!("level {level} exceeds 2^31")));
    }
    let mut index = level;
    for q in prime_divisors(level) {
        index = index / q * (q + 1);
    }
    Ok(index)
}

/// Distinct prime divisors in increasing order.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            primes.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    primes
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_divisors(n) == [n]
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// Extended Euclid: returns `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}
