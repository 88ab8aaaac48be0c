//! The registered CM curves, their short Weierstrass forms, and reduction
//! modulo primes.

mod registry;

pub use registry::{class_members, lookup, registry};

use crate::arith::kronecker;
use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

pub type Q = Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("{curve} has bad reduction at {p}")]
    BadReduction { curve: &'static str, p: u64 },
    #[error("{0}: short form is singular")]
    Singular(&'static str),
    #[error("{0}: operation needs D >= 7")]
    NotApplicable(&'static str),
}

/// One registered CM curve in long Weierstrass form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveSpec {
    pub id: &'static str,
    /// `[a1, a2, a3, a4, a6]`
    pub ainvs: [i64; 5],
    #[serde(rename = "D")]
    pub d: u32,
    pub disc_k: i64,
    #[serde(rename = "f")]
    pub order_conductor: u32,
    pub m_e: u32,
    pub bad_primes: &'static [u64],
    pub isogeny_class: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

/// `c4`, `c6` and the discriminant of a long Weierstrass model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Invariants {
    pub c4: i128,
    pub c6: i128,
    pub disc: i128,
}

impl CurveSpec {
    pub fn invariants(&self) -> Invariants {
        let [a1, a2, a3, a4, a6] = self.ainvs.map(|v| v as i128);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        Invariants {
            c4: b2 * b2 - 24 * b4,
            c6: -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6,
            disc: -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6,
        }
    }

    /// j-invariant as an exact rational.
    pub fn j_invariant(&self) -> Q {
        let inv = self.invariants();
        // c4^3 overflows i128 for the largest models, so divide out first.
        let c4 = Q::from_integer(inv.c4);
        c4 * c4 * (c4 / Q::from_integer(inv.disc))
    }

    /// Kronecker symbol `(disc_K / n)`.
    pub fn chi(&self, n: i64) -> i32 {
        kronecker(self.disc_k, n).expect("n != 0")
    }

    pub fn is_bad(&self, p: u64) -> bool {
        p <= 3 || self.bad_primes.contains(&p)
    }
}

/// `y^2 = x^3 + A x + B` over the rationals, with the integral model
/// `(A u^4, B u^6)` obtained from the scaling `(x, y) -> (x / u^2, y / u^3)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShortForm {
    #[serde(serialize_with = "ser_q")]
    pub a: Q,
    #[serde(serialize_with = "ser_q")]
    pub b: Q,
    pub u: i128,
    pub a_int: i128,
    pub b_int: i128,
}

fn ser_q<S: serde::Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl ShortForm {
    /// Coefficients of the `y^2 = 4x^3 + a x + b` normalization.
    pub fn four_x_cubed(&self) -> (Q, Q) {
        (self.a * 4, self.b * 4)
    }

    pub fn reduce_unchecked(&self, p: u64) -> CurveModP {
        let m = p as i128;
        CurveModP {
            p,
            a: self.a_int.rem_euclid(m) as u64,
            b: self.b_int.rem_euclid(m) as u64,
        }
    }
}

/// A short Weierstrass curve over `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurveModP {
    pub p: u64,
    pub a: u64,
    pub b: u64,
}

impl CurveModP {
    /// `4a^3 + 27b^2 mod p`.
    pub fn discriminant(&self) -> u64 {
        let p = self.p as u128;
        let (a, b) = (self.a as u128, self.b as u128);
        ((4 * (a * a % p) * a + 27 * (b * b % p)) % p) as u64
    }
}

/// Completes the square in `y` and removes the `x^2` term.
pub fn to_short(curve: &CurveSpec) -> Result<ShortForm, CurveError> {
    let inv = curve.invariants();
    let a = Q::new(-inv.c4, 48);
    let b = Q::new(-inv.c6, 864);
    let u = [1i128, 2, 3, 6]
        .into_iter()
        .find(|&u| (a * u.pow(4)).is_integer() && (b * u.pow(6)).is_integer())
        .expect("u = 6 always clears denominators");
    let a_int = (a * u.pow(4)).to_integer();
    let b_int = (b * u.pow(6)).to_integer();
    if 4 * a_int * a_int * a_int + 27 * b_int * b_int == 0 {
        return Err(CurveError::Singular(curve.id));
    }
    Ok(ShortForm { a, b, u, a_int, b_int })
}

/// Reduction of the short model at a prime `p` of good reduction.
///
/// `p` is assumed prime. Primes 2 and 3 and the curve's bad primes are
/// rejected.
pub fn reduce(curve: &CurveSpec, p: u64) -> Result<CurveModP, CurveError> {
    if curve.is_bad(p) {
        return Err(CurveError::BadReduction { curve: curve.id, p });
    }
    let e = to_short(curve)?.reduce_unchecked(p);
    if e.discriminant() == 0 {
        return Err(CurveError::BadReduction { curve: curve.id, p });
    }
    Ok(e)
}

/// `(a, b)` of `y^2 = 4x^3 + a x + b` at twist parameter `g = 1`, for each
/// `D >= 7`. The general member of the family is `(a g^2, b g^3)`.
pub fn wanxi_table(d: u32) -> Option<(Q, Q)> {
    let q = |n: i128, den: i128| Q::new(n, den);
    Some(match d {
        7 => (q(-35, 4), q(-49, 8)),
        11 => (q(-88, 3), q(847, 27)),
        19 => (q(-152, 1), q(361, 1)),
        43 => (q(-3440, 1), q(38829, 1)),
        67 => (q(-29480, 1), q(974113, 1)),
        163 => (q(-8697680, 1), q(185801 * 163 * 163, 1)),
        _ => return None,
    })
}

/// The twist parameter `g` placing the curve in its `D`-family, if any.
///
/// For `D = 1` the family is `y^2 = x^3 - g x`, for `D = 3` it is
/// `y^2 = x^3 + g`, and for `D >= 7` it is the tabulated `(a g^2, b g^3)`.
/// Curves outside the family (the conductor-2 orders in the first two
/// classes) give `None`.
pub fn family_parameter(curve: &CurveSpec) -> Option<i128> {
    let s = to_short(curve).ok()?;
    let g = match curve.d {
        1 if s.b == Q::from_integer(0) => -s.a,
        3 if s.a == Q::from_integer(0) => s.b,
        1 | 3 => return None,
        d => {
            let (a0, b0) = wanxi_table(d)?;
            let (a, b) = s.four_x_cubed();
            let g = (b / b0) / (a / a0);
            if a0 * g * g != a || b0 * g * g * g != b {
                return None;
            }
            g
        }
    };
    g.is_integer().then(|| g.to_integer())
}

/// Whether the curve's `4x^3` form equals the tabulated row at `g = 1`.
pub fn verify_wanxi_form(curve: &CurveSpec) -> Result<bool, CurveError> {
    let table = wanxi_table(curve.d).ok_or(CurveError::NotApplicable(curve.id))?;
    Ok(to_short(curve)?.four_x_cubed() == table)
}

/// The registry as pretty-printed JSON.
pub fn registry_json() -> String {
    serde_json::to_string_pretty(registry()).expect("registry serializes")
}
