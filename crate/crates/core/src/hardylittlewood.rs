//! Primes represented by `a m^2 + b m + c` and the Hardy-Littlewood constant
//! for such a polynomial, together with the polynomial attached to a trace
//! `r` of a CM curve.

use crate::arith::{factorize, gcd, is_prime};
use crate::constants::{euler_product, ConstantError, ConstantResult, DirichletChar, Mode, Shape};
use crate::curves::CurveSpec;
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

/// Largest `x` accepted by [`count_poly_primes`].
pub const POLY_COUNT_CEILING: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HlError {
    #[error("D = {d} needs an even trace, got r = {r}")]
    Parity { d: u32, r: i64 },
    #[error("r = 0 is excluded")]
    ZeroTrace,
    #[error("{a}m^2 + {b}m + {c}: {reason}")]
    Degenerate { a: i64, b: i64, c: i64, reason: &'static str },
    #[error("x = {0} above {POLY_COUNT_CEILING}")]
    BoundTooLarge(u64),
    #[error(transparent)]
    Constant(#[from] ConstantError),
}

/// `a m^2 + b m + c` with `a > 0`, non-square discriminant, coprime
/// coefficients, and `a + b`, `c` not both even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadPoly {
    a: i64,
    b: i64,
    c: i64,
}

fn is_square(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as f64).sqrt() as i128;
    (r.saturating_sub(2)..=r + 2).any(|s| s >= 0 && s * s == n)
}

impl QuadPoly {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self, HlError> {
        let fail = |reason| Err(HlError::Degenerate { a, b, c, reason });
        if a <= 0 {
            return fail("leading coefficient must be positive");
        }
        let disc = b as i128 * b as i128 - 4 * a as i128 * c as i128;
        if is_square(disc) {
            return fail("discriminant is a square");
        }
        let g = gcd(gcd(a.unsigned_abs(), b.unsigned_abs()), c.unsigned_abs());
        if g != 1 {
            return fail("coefficients share a factor");
        }
        if (a + b) % 2 == 0 && c % 2 == 0 {
            return fail("every value is even");
        }
        Ok(Self { a, b, c })
    }

    pub fn coefficients(&self) -> (i64, i64, i64) {
        (self.a, self.b, self.c)
    }

    pub fn discriminant(&self) -> i128 {
        self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128
    }

    pub fn eval(&self, m: i64) -> i128 {
        let m = m as i128;
        (self.a as i128 * m + self.b as i128) * m + self.c as i128
    }

    /// `(d0, f)` with `discriminant = d0 f^2` and `d0` fundamental.
    pub fn fundamental_part(&self) -> (i64, u64) {
        let disc = self.discriminant();
        let mut core: i128 = disc.signum();
        let mut f: u64 = 1;
        for (p, e) in factorize(disc.unsigned_abs() as u64) {
            core *= (p as i128).pow(e % 2);
            f *= p.pow(e / 2);
        }
        if core.rem_euclid(4) != 1 {
            // core is 2 or 3 mod 4, so 4 | f^2
            core *= 4;
            f /= 2;
        }
        (core as i64, f)
    }
}

/// The polynomial whose prime values carry the primes with `a_p = r`.
///
/// For `D = 1, 2 (mod 4)`, `p = (r/2)^2 + D n^2`, which needs `r` even. For
/// `D = 3 (mod 4)`, `p = D m^2 - D r m + (D+1)/4 r^2`, from `4p = r^2 + D n^2`
/// with `n = r - 2m`.
pub fn poly_for(curve: &CurveSpec, r: i64) -> Result<QuadPoly, HlError> {
    let d = curve.d as i64;
    if r == 0 {
        return Err(HlError::ZeroTrace);
    }
    if d % 4 == 3 {
        QuadPoly::new(d, -d * r, (d + 1) / 4 * r * r)
    } else if r % 2 != 0 {
        Err(HlError::Parity { d: curve.d, r })
    } else {
        QuadPoly::new(d, 0, (r / 2) * (r / 2))
    }
}

/// The exact part `gcd(2, a+b) delta / phi(delta)` of the front factor, with
/// `delta` the odd part of `gcd(a, b)`.
pub fn front_rational(poly: &QuadPoly) -> (u64, u64) {
    let (a, b, _) = poly.coefficients();
    let g = gcd(a.unsigned_abs(), b.unsigned_abs());
    let delta = g >> g.trailing_zeros();
    let phi = factorize(delta).iter().map(|&(p, e)| (p - 1) * p.pow(e - 1)).product::<u64>();
    let two = gcd(2, (a + b).unsigned_abs());
    let num = two * delta;
    let h = gcd(num, phi);
    (num / h, phi / h)
}

/// `gcd(2, a+b) delta / (sqrt(a) phi(delta)) prod_{p !| 2a} (1 - (disc/p)/(p-1))`.
pub fn hl_constant(poly: &QuadPoly, bound: u64, mode: Mode) -> Result<ConstantResult, HlError> {
    let (d0, f) = poly.fundamental_part();
    let chi = DirichletChar::new(d0)?;
    let mut exclude: BTreeSet<u64> = factorize(2 * poly.a as u64 * f).into_iter().map(|(p, _)| p).collect();
    exclude.insert(2);
    let product = euler_product(chi, &exclude, Shape::HardyLittlewood, bound, mode)?;
    let (num, den) = front_rational(poly);
    Ok(product.scaled(num as f64 / den as f64 / (poly.a as f64).sqrt()))
}

/// Distinct primes `p <= x` with `p = a m^2 + b m + c` for some `m >= m_start`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolyCount {
    pub x: u64,
    pub m_start: i64,
    pub count: u64,
}

/// Range of `m >= m_start` whose values can lie in `[2, x]`.
fn m_range(poly: &QuadPoly, x: u64, m_start: i64) -> std::ops::RangeInclusive<i64> {
    let (a, b, c) = (poly.a as f64, poly.b as f64, poly.c as f64);
    let disc = b * b - 4.0 * a * (c - x as f64);
    if disc < 0.0 {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    let hi = ((-b + disc.sqrt()) / (2.0 * a)).floor() as i64 + 1;
    m_start..=hi
}

fn prime_values(poly: &QuadPoly, x: u64, m_start: i64) -> impl Iterator<Item = (i64, i128, bool)> + '_ {
    m_range(poly, x, m_start).filter_map(move |m| {
        let v = poly.eval(m);
        (v >= 0 && v <= x as i128).then(|| (m, v, v >= 2 && is_prime(v as u64)))
    })
}

pub fn count_poly_primes(poly: &QuadPoly, x: u64, m_start: i64) -> Result<PolyCount, HlError> {
    if x > POLY_COUNT_CEILING {
        return Err(HlError::BoundTooLarge(x));
    }
    let primes: BTreeSet<i128> = prime_values(poly, x, m_start).filter(|t| t.2).map(|t| t.1).collect();
    Ok(PolyCount { x, m_start, count: primes.len() as u64 })
}

/// Every value `<= x` as CSV rows `m,value,is_prime`.
pub fn poly_values_csv(poly: &QuadPoly, x: u64, m_start: i64) -> Result<String, HlError> {
    if x > POLY_COUNT_CEILING {
        return Err(HlError::BoundTooLarge(x));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["m", "value", "is_prime"]).expect("in-memory writer");
    for (m, v, p) in prime_values(poly, x, m_start) {
        w.serialize((m, v as i64, p)).expect("in-memory writer");
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf8"))
}
