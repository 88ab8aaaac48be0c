//! The two constants attached to `(E, r)`: `omega_bar`, from the explicit
//! Hardy-Littlewood formulas for the four CM families, and `C`, from the
//! Galois model at level `m_E`. Both end in an Euler product over primes,
//! evaluated by [`euler_product`].

mod euler;

pub use euler::{
    euler_product, is_fundamental, l_closed, l_euler_partial, l_one, l_two, ConstantResult, DirichletChar,
    Method, Mode, Shape, CM_DISCS, MAX_BOUND, MAX_CHAR_MODULUS, MIN_BOUND,
};

use crate::arith::{factorize, jacobi, pow_mod};
use crate::curves::{family_parameter, lookup, CurveSpec};
use crate::galois::{kappa, GaloisError};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use std::f64::consts::PI;
use thiserror::Error;

pub type Rat = Ratio<i64>;

/// Default prime bound for Euler products.
pub const DEFAULT_BOUND: u64 = 1_000_000;

/// Floor for the denominator of the relative difference in [`verify_equality`].
pub const REL_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstantError {
    #[error("r = 0 is excluded")]
    ZeroTrace,
    #[error("{0} is not a supported fundamental discriminant")]
    UnsupportedDiscriminant(i64),
    #[error("no omega_bar formula for D = {0}")]
    UnsupportedD(u32),
    #[error("prime bound {0} outside [{MIN_BOUND}, {MAX_BOUND}]")]
    BoundOutOfRange(u64),
    #[error("{0} is not in its D-family normal form")]
    Normalization(&'static str),
    #[error("g = {g} has no decomposition for D = {d}")]
    BadParameter { d: u32, g: i128 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error(transparent)]
    Galois(#[from] GaloisError),
}

/// `g = (-1)^delta 2^lambda D^mu g1` with `g1 > 0` coprime to `2D` (to 6
/// when `D = 3`). For `D` in `{1, 2}` the `D^mu` factor is absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GDecomposition {
    pub delta: u8,
    pub lambda: u32,
    pub mu: u32,
    pub g1: u64,
}

impl GDecomposition {
    pub fn new(d: u32, g: i128) -> Result<Self, ConstantError> {
        let bad = ConstantError::BadParameter { d, g };
        if g == 0 {
            return Err(bad);
        }
        let delta = u8::from(g < 0);
        let mut rest = g.unsigned_abs();
        let lambda = rest.trailing_zeros();
        rest >>= lambda;
        let mut mu = 0;
        if d >= 3 {
            while rest % d as u128 == 0 {
                rest /= d as u128;
                mu += 1;
            }
        }
        let g1 = u64::try_from(rest).map_err(|_| bad)?;
        Ok(Self { delta, lambda, mu, g1 })
    }

    pub fn g(&self, d: u32) -> i128 {
        let sign = if self.delta == 1 { -1 } else { 1 };
        let dpow = if d >= 3 { (d as i128).pow(self.mu) } else { 1 };
        sign * (1i128 << self.lambda) * dpow * self.g1 as i128
    }
}

/// Decomposition of the curve's own family parameter.
pub fn decompose_g(curve: &CurveSpec) -> Result<GDecomposition, ConstantError> {
    let g = family_parameter(curve).ok_or(ConstantError::Normalization(curve.id))?;
    GDecomposition::new(curve.d, g)
}

/// Parameter used for `omega_bar`: the curve's own, or that of its class
/// representative when the curve is not in family form. Isogenous curves
/// share every `a_p`, hence the constant.
fn omega_parameter(curve: &CurveSpec) -> Result<GDecomposition, ConstantError> {
    decompose_g(curve).or_else(|e| match lookup(curve.isogeny_class) {
        Some(rep) if rep.id != curve.id => decompose_g(rep),
        _ => Err(e),
    })
}

fn sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `Re(i^k)`
fn re_i(k: i64) -> i64 {
    [1, 0, -1, 0][k.rem_euclid(4) as usize]
}

/// `Re(w^k)` for a primitive cube root of unity `w`.
fn re_w(k: i64) -> Rat {
    if k.rem_euclid(3) == 0 {
        Rat::from_integer(1)
    } else {
        Rat::new(-1, 2)
    }
}

/// `Omega_j(D; g1; r) = prod_{p^nu || g1, p !| r, j !| nu} -1 / (p - 1 - (-D/p))`.
pub fn omega_factor(d: u32, g1: u64, r: i64, j: u32) -> Rat {
    factorize(g1)
        .into_iter()
        .filter(|&(p, nu)| r % p as i64 != 0 && nu % j != 0)
        .map(|(p, _)| Rat::new(-1, p as i64 - 1 - jacobi(-(d as i64), p) as i64))
        .product()
}

fn kappa_d1(g: &GDecomposition, r: i64) -> Rat {
    let (delta, lambda) = (g.delta as i64, g.lambda as i64);
    let g1 = g.g1 as i128;
    let half_g1 = ((g1 - 1) / 2) as i64;
    let w2 = omega_factor(1, g.g1, r, 2);
    let w4 = omega_factor(1, g.g1, r, 4);
    if r % 4 == 0 {
        let q = r / 4;
        Rat::from_integer(1) - w2 * sign(lambda * q)
            + w4 * (sign(q * (delta + half_g1)) * (1 - sign(q)) * re_i(1 + lambda * q))
    } else if lambda % 2 == 0 {
        let eighth = ((g1 * g1 - 1) / 8 % 2) as i64;
        let s = sign((r - 2) / 4 + eighth);
        Rat::from_integer(1) + w2 + w4 * (s * (1 - sign(delta + (lambda + g1 as i64 - 1) / 2)))
    } else {
        Rat::from_integer(1)
    }
}

fn zeta1_d3(g: &GDecomposition, r: i64) -> Rat {
    let (lambda, mu) = (g.lambda as i64, g.mu as i64);
    let t = ((g.g1 as i128 * g.g1 as i128 - 1) / 3 % 3) as i64;
    if r.rem_euclid(6) == 2 || r.rem_euclid(6) == 4 {
        Rat::from_integer(1) + re_w(mu) * re_w(lambda + t) * 2
    } else {
        re_w(1 + t) + re_w(mu) * (re_w(2 - lambda + t) + re_w(2 + lambda))
    }
}

/// Cases checked in order: `r = +-8, +-20 (mod 24)`, `r = +-2 (mod 12)`,
/// `r = +-5 (mod 6)`. The sign is `+` when `r` matches the positive residue.
fn zeta2_d3(g: &GDecomposition, r: i64) -> Rat {
    let (delta, lambda, mu) = (g.delta as i64, g.lambda as i64, g.mu as i64);
    let half_g1 = ((g.g1 - 1) / 2) as i64;
    let pm = |m: i64, res: i64| -> Option<i64> {
        let v = r.rem_euclid(m);
        if v == res {
            Some(1)
        } else if v == m - res {
            Some(-1)
        } else {
            None
        }
    };
    if let Some(s) = pm(24, 8) {
        Rat::from_integer(s * sign(delta + lambda + mu + half_g1))
    } else if let Some(s) = pm(24, 20) {
        Rat::from_integer(s * sign(delta + mu + half_g1))
    } else if let Some(s) = pm(12, 2) {
        Rat::new(s * (1 + sign(lambda)), 2)
    } else if let Some(s) = pm(6, 5) {
        Rat::new(s * (1 + sign(lambda)) * (1 + sign(delta + mu + half_g1)), 4)
    } else {
        Rat::from_integer(0)
    }
}

fn kappa_d3(g: &GDecomposition, r: i64) -> Rat {
    let z1 = zeta1_d3(g, r);
    let z2 = zeta2_d3(g, r);
    let w2 = omega_factor(3, g.g1, r, 2);
    let w6 = omega_factor(3, g.g1, r, 6);
    let two_thirds = Rat::new(2, 3);
    let j = jacobi(3, g.g1) as i64;
    Rat::from_integer(1) + two_thirds * z1 * w2 + z2 * j * (w2 + two_thirds * z1 * w6)
}

/// `xi(D, r)` for odd `D >= 7`.
pub fn xi(d: u32, r: i64) -> i64 {
    let d = d as i64;
    let even = r % 2 == 0;
    let coprime = r % d != 0;
    match () {
        _ if d % 4 == 1 && even && coprime => 1,
        _ if d % 4 == 3 && even && coprime => 1,
        _ if d % 8 == 3 && !even && coprime => 2,
        _ => 0,
    }
}

/// `xi_D(g, r)`: the sign factor in front of `Omega_2` for `D >= 7`.
pub fn xi_d(g: &GDecomposition, r: i64) -> Rat {
    let (delta, lambda, mu) = (g.delta as i64, g.lambda as i64, g.mu as i64);
    let half_g1 = ((g.g1 - 1) / 2) as i64;
    if r % 2 != 0 {
        Rat::new((1 + sign(lambda)) * (sign(half_g1) + sign(delta + mu)), 4)
    } else if r % 4 == 0 {
        Rat::from_integer(sign(delta + mu + lambda * (r / 4)))
    } else {
        Rat::new(sign(half_g1) * (1 + sign(lambda)), 2)
    }
}

/// `omega_bar = front * sqrt(radicand) * prod_{p !| 2r} (1 - chi(p)/(p-1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OmegaFront {
    #[serde(serialize_with = "ser_rat")]
    pub rational: Rat,
    pub radicand: u32,
}

fn ser_rat<S: serde::Serializer>(q: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl OmegaFront {
    fn zero() -> Self {
        Self { rational: Rat::from_integer(0), radicand: 1 }
    }

    pub fn is_zero(&self) -> bool {
        *self.rational.numer() == 0
    }

    pub fn value(&self) -> f64 {
        *self.rational.numer() as f64 / *self.rational.denom() as f64 * (self.radicand as f64).sqrt()
    }
}

/// Discriminant of the CM field for each supported `D`.
pub fn field_disc(d: u32) -> Result<i64, ConstantError> {
    match d {
        1 => Ok(-4),
        2 => Ok(-8),
        3 => Ok(-3),
        7 | 11 | 19 | 43 | 67 | 163 => Ok(-(d as i64)),
        _ => Err(ConstantError::UnsupportedD(d)),
    }
}

/// The exact front factor of `omega_bar` for the family member `g`.
pub fn omega_front(d: u32, g: &GDecomposition, r: i64) -> Result<OmegaFront, ConstantError> {
    if r == 0 {
        return Err(ConstantError::ZeroTrace);
    }
    field_disc(d)?;
    let front = match d {
        1 if r % 2 != 0 => return Ok(OmegaFront::zero()),
        1 => OmegaFront { rational: kappa_d1(g, r) / 4, radicand: 1 },
        2 if r.rem_euclid(4) != 2 => return Ok(OmegaFront::zero()),
        2 => {
            let e = (r - 2) * (r + 10) / 32 + g.delta as i64 + g.lambda as i64 + ((g.g1 - 1) / 2) as i64;
            let j = jacobi(2, g.g1) as i64;
            let inner = Rat::from_integer(1) + Rat::new(sign(e) * j, 2) * omega_factor(2, g.g1, r, 2);
            // 1/sqrt(2) = sqrt(2)/2
            OmegaFront { rational: inner / 2, radicand: 2 }
        }
        3 if r % 3 == 0 => return Ok(OmegaFront::zero()),
        3 => {
            let xi3 = if r % 2 == 0 { 1 } else { 2 };
            OmegaFront { rational: kappa_d3(g, r) * xi3 / 12, radicand: 3 }
        }
        _ if r % d as i64 == 0 => return Ok(OmegaFront::zero()),
        _ => {
            let dm = d as u64;
            let two_pow = pow_mod(2, g.lambda as u64 + 1, dm) as i128;
            let top = (two_pow * g.g1 as i128 % dm as i128 * r as i128).rem_euclid(dm as i128);
            let symbol = jacobi(top as i64, dm) as i64;
            let inner = Rat::from_integer(1) + xi_d(g, r) * symbol * omega_factor(d, g.g1, r, 2);
            OmegaFront { rational: inner * xi(d, r) / (2 * (d as i64 - 1)), radicand: d }
        }
    };
    Ok(front)
}

fn prime_divisors(n: i64) -> BTreeSet<u64> {
    factorize(n.unsigned_abs()).into_iter().map(|(p, _)| p).collect()
}

fn zero_result(bound: u64, mode: Mode) -> ConstantResult {
    ConstantResult { value: 0.0, method: mode.into(), truncation: bound, est_error: 0.0 }
}

/// `omega_bar` for a member of the `D`-family with parameter `g`.
pub fn omega_bar_for(d: u32, g: &GDecomposition, r: i64, bound: u64, mode: Mode) -> Result<ConstantResult, ConstantError> {
    let front = omega_front(d, g, r)?;
    if front.is_zero() {
        return Ok(zero_result(bound, mode));
    }
    let chi = DirichletChar::new(field_disc(d)?)?;
    let mut exclude = prime_divisors(r);
    exclude.insert(2);
    let product = euler_product(chi, &exclude, Shape::HardyLittlewood, bound, mode)?;
    Ok(product.scaled(front.value()))
}

/// `omega_bar_{E,r}` for a registry curve.
pub fn omega_bar(curve: &CurveSpec, r: i64, bound: u64, mode: Mode) -> Result<ConstantResult, ConstantError> {
    omega_bar_for(curve.d, &omega_parameter(curve)?, r, bound, mode)
}

/// `kappa * prod_{l | r, l !| m_E} l / (l - chi(l))`, exact.
pub fn lt_rational(curve: &CurveSpec, r: i64) -> Result<Ratio<i128>, ConstantError> {
    if r == 0 {
        return Err(ConstantError::ZeroTrace);
    }
    let k = kappa(curve, r)?;
    let mut q = Ratio::new(*k.numer() as i128, *k.denom() as i128);
    for l in prime_divisors(r) {
        if curve.m_e as u64 % l != 0 {
            let li = l as i128;
            q *= Ratio::new(li, li - curve.chi(l as i64) as i128);
        }
    }
    Ok(q)
}

/// `C_{E,r} = (m_E / 2 pi) kappa prod_{l | r, l !| m_E} l/(l - chi(l)) prod_{l !| m_E r} LT(l)`.
pub fn lt_constant(curve: &CurveSpec, r: i64, bound: u64, mode: Mode) -> Result<ConstantResult, ConstantError> {
    let q = lt_rational(curve, r)?;
    if *q.numer() == 0 {
        return Ok(zero_result(bound, mode));
    }
    let chi = DirichletChar::new(curve.disc_k)?;
    let mut exclude = prime_divisors(r);
    exclude.extend(prime_divisors(curve.m_e as i64));
    let product = euler_product(chi, &exclude, Shape::LangTrotter, bound, mode)?;
    let front = *q.numer() as f64 / *q.denom() as f64 * curve.m_e as f64 / (2.0 * PI);
    Ok(product.scaled(front))
}

/// One `(curve, r)` comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualityRow {
    pub curve: &'static str,
    pub r: i64,
    pub omega_bar: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub method: Method,
    pub bound: u64,
    pub est_error: f64,
    /// `|C - omega_bar| / max(omega_bar, 1e-12)`
    pub diff: f64,
    pub zero_class_agrees: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualityReport {
    pub tol: f64,
    pub rows: Vec<EqualityRow>,
}

impl EqualityReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&EqualityRow> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("rows serialize")
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }
}

pub fn rows_to_csv(rows: &[EqualityRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("row serializes");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf8")
}

/// Both constants for one `(curve, r)` at the same bound and mode.
pub fn compare(curve: &'static CurveSpec, r: i64, tol: f64, bound: u64, mode: Mode) -> Result<EqualityRow, ConstantError> {
    let w = omega_bar(curve, r, bound, mode)?;
    let c = lt_constant(curve, r, bound, mode)?;
    let diff = (c.value - w.value).abs() / w.value.max(REL_FLOOR);
    let zero_class_agrees = (w.value == 0.0) == (c.value == 0.0);
    let close = (w.value.abs() <= tol && c.value.abs() <= tol) || diff <= tol;
    Ok(EqualityRow {
        curve: curve.id,
        r,
        omega_bar: w.value,
        c: c.value,
        method: mode.into(),
        bound,
        est_error: w.est_error.max(c.est_error),
        diff,
        zero_class_agrees,
        pass: zero_class_agrees && close,
    })
}

/// Compares `omega_bar` and `C` for each `r`. A row passes when the zero
/// classes agree exactly and either both values are within `tol` of zero
/// or their relative difference is at most `tol`.
pub fn verify_equality(
    curve: &'static CurveSpec,
    rs: &[i64],
    tol: f64,
    bound: u64,
    mode: Mode,
) -> Result<EqualityReport, ConstantError> {
    if !(tol > 0.0) {
        return Err(ConstantError::BadTolerance(tol));
    }
    if rs.contains(&0) {
        return Err(ConstantError::ZeroTrace);
    }
    let rows = rs
        .par_iter()
        .map(|&r| compare(curve, r, tol, bound, mode))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EqualityReport { tol, rows })
}
