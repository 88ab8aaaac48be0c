use super::ConstantError;
use crate::arith::{factorize, kronecker, sieve, PrimeTable};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Smallest prime bound accepted by [`euler_product`].
pub const MIN_BOUND: u64 = 1_000;
/// Largest prime bound accepted by [`euler_product`].
pub const MAX_BOUND: u64 = 100_000_000;

/// Largest `|disc|` accepted by [`DirichletChar::new`].
pub const MAX_CHAR_MODULUS: u64 = 10_000_000;

/// Field discriminants of the nine class-number-one imaginary quadratic fields.
pub const CM_DISCS: [i64; 9] = [-3, -4, -7, -8, -11, -19, -43, -67, -163];

/// Whether `d` is the discriminant of a quadratic field.
pub fn is_fundamental(d: i64) -> bool {
    let squarefree = |n: u64| factorize(n).iter().all(|&(_, e)| e == 1);
    if d == 1 || d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// `n -> kronecker(disc, n)` for a fundamental discriminant `disc`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DirichletChar {
    disc: i64,
}

impl DirichletChar {
    pub fn new(disc: i64) -> Result<Self, ConstantError> {
        if disc.unsigned_abs() <= MAX_CHAR_MODULUS && is_fundamental(disc) {
            Ok(Self { disc })
        } else {
            Err(ConstantError::UnsupportedDiscriminant(disc))
        }
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn modulus(&self) -> u64 {
        self.disc.unsigned_abs()
    }

    pub fn value(&self, n: u64) -> i32 {
        kronecker(self.disc, n as i64).expect("n > 0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `prod (1 - chi(p)/(p-1))`
    HardyLittlewood,
    /// `prod (1 - chi(p)/((p-1)(p-chi(p))))`
    LangTrotter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Direct,
    #[default]
    Accelerated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Direct,
    Accelerated,
    ClosedForm,
}

impl From<Mode> for Method {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Direct => Method::Direct,
            Mode::Accelerated => Method::Accelerated,
        }
    }
}

/// A numerically evaluated constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantResult {
    pub value: f64,
    pub method: Method,
    /// Prime bound of the truncated product (0 for closed forms).
    pub truncation: u64,
    pub est_error: f64,
}

impl ConstantResult {
    pub(crate) fn scaled(self, by: f64) -> Self {
        Self { value: self.value * by, est_error: self.est_error * by.abs(), ..self }
    }
}

/// `L(1, chi)` for the class-number-one discriminants.
pub fn l_closed(disc: i64) -> Result<f64, ConstantError> {
    Ok(match disc {
        -4 => PI / 4.0,
        -3 => PI / (3.0 * 3f64.sqrt()),
        -8 => PI / (2.0 * 2f64.sqrt()),
        -7 | -11 | -19 | -43 | -67 | -163 => PI / (-disc as f64).sqrt(),
        _ => return Err(ConstantError::UnsupportedDiscriminant(disc)),
    })
}

/// `L(1, chi)`: [`l_closed`] where it applies, otherwise the finite
/// formulas `-pi |d|^(-3/2) sum a chi(a)` for `d < 0` and
/// `-d^(-1/2) sum chi(a) log sin(pi a / d)` for `d > 0`.
pub fn l_one(chi: DirichletChar) -> f64 {
    if let Ok(v) = l_closed(chi.disc()) {
        return v;
    }
    l_one_finite(chi)
}

fn l_one_finite(chi: DirichletChar) -> f64 {
    let k = chi.modulus();
    let kf = k as f64;
    if chi.disc() < 0 {
        let s: f64 = (1..k).map(|a| a as f64 * chi.value(a) as f64).sum();
        -PI * s / (kf * kf.sqrt())
    } else {
        let s: f64 = (1..k).map(|a| chi.value(a) as f64 * (PI * a as f64 / kf).sin().ln()).sum();
        -s / kf.sqrt()
    }
}

/// Hurwitz zeta `zeta(2, q)` by Euler-Maclaurin summation.
fn hurwitz2(q: f64) -> f64 {
    const N: u32 = 30;
    // B_2 .. B_12
    const BERNOULLI: [f64; 6] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let head: f64 = (0..N).map(|n| (n as f64 + q).powi(-2)).sum();
    let x = N as f64 + q;
    let mut tail = 1.0 / x + 0.5 / (x * x);
    for (j, b) in BERNOULLI.iter().enumerate() {
        tail += b / x.powi(2 * j as i32 + 3);
    }
    head + tail
}

/// `L(2, chi)` from Hurwitz zeta values over the residues mod `|disc|`.
pub fn l_two(chi: DirichletChar) -> f64 {
    let k = chi.modulus();
    let kf = k as f64;
    (1..k)
        .map(|a| chi.value(a) as f64 * hurwitz2(a as f64 / kf))
        .sum::<f64>()
        / (kf * kf)
}

/// Truncated Euler product `prod_{p <= bound} (1 - chi(p)/p)^-1` for
/// `L(1, chi)`, returned as the mean of the last two partial products to
/// damp the oscillation of the partial products.
pub fn l_euler_partial(chi: DirichletChar, bound: u64) -> Result<f64, ConstantError> {
    let table = primes(bound)?;
    let mut prev = 1.0;
    let mut acc = 1.0;
    for p in table.iter() {
        prev = acc;
        acc /= 1.0 - chi.value(p) as f64 / p as f64;
    }
    Ok(0.5 * (prev + acc))
}

fn primes(bound: u64) -> Result<Arc<PrimeTable>, ConstantError> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<PrimeTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("prime cache").get(&bound) {
        return Ok(t.clone());
    }
    let table = Arc::new(sieve(bound).map_err(|_| ConstantError::BoundOutOfRange(bound))?);
    cache.lock().expect("prime cache").insert(bound, table.clone());
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Factor {
    Hl,
    Lt,
    /// `LT(p) / (1 - chi(p)/p^2)`, which is `1 + O(p^-3)`.
    Remainder,
}

impl Factor {
    fn at(self, chi: DirichletChar, p: u64) -> f64 {
        let c = chi.value(p) as f64;
        let p = p as f64;
        let lt = 1.0 - c / ((p - 1.0) * (p - c));
        match self {
            Factor::Hl => 1.0 - c / (p - 1.0),
            Factor::Lt => lt,
            Factor::Remainder => lt / (1.0 - c / (p * p)),
        }
    }
}

/// Product of a factor over the odd primes up to `bound`, computed once per
/// `(chi, bound, factor)` in increasing prime order.
fn odd_base(chi: DirichletChar, bound: u64, factor: Factor) -> Result<f64, ConstantError> {
    type Key = (i64, u64, Factor);
    static CACHE: OnceLock<Mutex<HashMap<Key, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (chi.disc(), bound, factor);
    if let Some(&v) = cache.lock().expect("product cache").get(&key) {
        return Ok(v);
    }
    let table = primes(bound)?;
    let v = table.iter().skip(1).fold(1.0, |acc, p| acc * factor.at(chi, p));
    cache.lock().expect("product cache").insert(key, v);
    Ok(v)
}

/// Product of `factor` over primes `p <= bound` outside `exclude`.
fn truncated(chi: DirichletChar, exclude: &BTreeSet<u64>, bound: u64, factor: Factor) -> Result<f64, ConstantError> {
    let mut v = odd_base(chi, bound, factor)?;
    if !exclude.contains(&2) {
        v *= factor.at(chi, 2);
    }
    for &p in exclude.iter().filter(|&&p| p > 2 && p <= bound) {
        v /= factor.at(chi, p);
    }
    Ok(v)
}

fn accelerated(chi: DirichletChar, exclude: &BTreeSet<u64>, shape: Shape, bound: u64) -> Result<f64, ConstantError> {
    let mut v = truncated(chi, exclude, bound, Factor::Remainder)? / l_two(chi);
    for &p in exclude {
        let (c, pf) = (chi.value(p) as f64, p as f64);
        v /= 1.0 - c / (pf * pf);
        if shape == Shape::HardyLittlewood {
            v /= 1.0 - c / pf;
        }
    }
    if shape == Shape::HardyLittlewood {
        v /= l_one(chi);
    }
    Ok(v)
}

/// `prod_{p not in exclude}` of the chosen shape.
///
/// Direct mode truncates at `bound`; its `est_error` is the distance to the
/// accelerated value at the same bound. Accelerated mode divides by
/// `L(1, chi)` (hardy_littlewood shape only) and `L(2, chi)`, then truncates
/// the `1 + O(p^-3)` remainder; its `est_error` bounds that tail plus the
/// accumulated rounding.
pub fn euler_product(
    chi: DirichletChar,
    exclude: &BTreeSet<u64>,
    shape: Shape,
    bound: u64,
    mode: Mode,
) -> Result<ConstantResult, ConstantError> {
    if !(MIN_BOUND..=MAX_BOUND).contains(&bound) {
        return Err(ConstantError::BoundOutOfRange(bound));
    }
    let acc = accelerated(chi, exclude, shape, bound)?;
    let n = primes(bound)?.len() as f64;
    let bf = bound as f64;
    let acc_err = acc.abs() * (1.1 / (bf * bf) + n * f64::EPSILON);
    Ok(match mode {
        Mode::Accelerated => {
            ConstantResult { value: acc, method: Method::Accelerated, truncation: bound, est_error: acc_err }
        }
        Mode::Direct => {
            let factor = match shape {
                Shape::HardyLittlewood => Factor::Hl,
                Shape::LangTrotter => Factor::Lt,
            };
            let value = truncated(chi, exclude, bound, factor)?;
            ConstantResult { value, method: Method::Direct, truncation: bound, est_error: (value - acc).abs() + acc_err }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(d: i64) -> DirichletChar {
        DirichletChar::new(d).unwrap()
    }

    #[test]
    fn l_two_known_values() {
        // Catalan's constant, and L(2, chi_-3)
        assert!((l_two(chi(-4)) - 0.915_965_594_177_219).abs() < 1e-14);
        assert!((l_two(chi(-3)) - 0.781_302_412_896_486_3).abs() < 1e-14);
    }

    #[test]
    fn l_two_matches_partial_sums() {
        for d in CM_DISCS {
            let c = chi(d);
            let n = 2_000_000u64;
            let s: f64 = (1..=n).map(|k| c.value(k) as f64 / (k as f64 * k as f64)).sum();
            // partial sums of a mean-zero periodic sequence over n^2 converge at rate |disc|/n^2
            assert!((s - l_two(c)).abs() < 1e-9, "disc {d}");
        }
    }

    #[test]
    fn finite_formula_matches_closed_forms() {
        for d in CM_DISCS {
            let c = chi(d);
            assert!((l_one_finite(c) - l_closed(d).unwrap()).abs() < 1e-13, "disc {d}");
        }
        // h(-15) = 2, h(-20) = 2, and L(1, chi_5) = 2 log(golden ratio) / sqrt(5)
        assert!((l_one(chi(-15)) - 2.0 * PI / 15f64.sqrt()).abs() < 1e-13);
        assert!((l_one(chi(-20)) - 2.0 * PI / 20f64.sqrt()).abs() < 1e-13);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((l_one(chi(5)) - 2.0 * phi.ln() / 5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn fundamental_discriminants() {
        let f: Vec<i64> = (-30..30).filter(|&d| is_fundamental(d)).collect();
        assert_eq!(f, [-24, -23, -20, -19, -15, -11, -8, -7, -4, -3, 5, 8, 12, 13, 17, 21, 24, 28, 29]);
        assert!(DirichletChar::new(-12).is_err());
    }

    #[test]
    fn closed_forms() {
        assert_eq!(l_closed(-4).unwrap(), PI / 4.0);
        assert_eq!(l_closed(-3).unwrap(), PI / (3.0 * 3f64.sqrt()));
        assert_eq!(l_closed(-11).unwrap(), PI / 11f64.sqrt());
        assert!(matches!(l_closed(-5), Err(ConstantError::UnsupportedDiscriminant(-5))));
    }

    #[test]
    fn closed_forms_match_the_series() {
        // L(1, chi) = sum chi(n)/n, with partial sums accurate to |disc|/n
        for d in CM_DISCS {
            let c = chi(d);
            let n = 4_000_000u64;
            let s: f64 = (1..=n).map(|k| c.value(k) as f64 / k as f64).sum();
            assert!((s - l_closed(d).unwrap()).abs() < 2e-4, "disc {d}");
        }
    }

    #[test]
    fn euler_partial_product_for_gaussian_l_value() {
        let v = l_euler_partial(chi(-4), 10_000_000).unwrap();
        assert!((v - PI / 4.0).abs() <= 1e-4);
    }

    #[test]
    fn direct_and_accelerated_agree() {
        let none = BTreeSet::new();
        let b = 1_000_000u64;
        let hl = |d| {
            let dir = euler_product(chi(d), &none, Shape::HardyLittlewood, b, Mode::Direct).unwrap();
            let acc = euler_product(chi(d), &none, Shape::HardyLittlewood, b, Mode::Accelerated).unwrap();
            assert!(dir.est_error >= (dir.value - acc.value).abs());
            ((dir.value - acc.value).abs(), acc.value)
        };
        assert!(hl(-4).0 <= 1e-5);
        // For the other characters the direct product carries the prime-square
        // bias, of relative size about 1/(sqrt(B) log sqrt(B)).
        let bias = 1.0 / (1_000.0 * 1_000f64.ln());
        for d in CM_DISCS {
            let (gap, value) = hl(d);
            assert!(gap <= 3.0 * bias * value, "disc {d}");
            let dir = euler_product(chi(d), &none, Shape::LangTrotter, b, Mode::Direct).unwrap();
            let acc = euler_product(chi(d), &none, Shape::LangTrotter, b, Mode::Accelerated).unwrap();
            assert!((dir.value - acc.value).abs() <= 1e-8, "disc {d}");
        }
    }

    #[test]
    fn accelerated_is_stable_in_the_bound() {
        let ex: BTreeSet<u64> = [2, 5, 7].into();
        for d in CM_DISCS {
            for shape in [Shape::HardyLittlewood, Shape::LangTrotter] {
                let lo = euler_product(chi(d), &ex, shape, 100_000, Mode::Accelerated).unwrap();
                let hi = euler_product(chi(d), &ex, shape, 1_000_000, Mode::Accelerated).unwrap();
                assert!((lo.value - hi.value).abs() <= 1e-6);
                assert!(hi.est_error < 1e-9);
            }
        }
    }

    #[test]
    fn ramified_exclusions_are_neutral() {
        // chi(11) = 0, so excluding 11 changes nothing
        let c = chi(-11);
        let a = euler_product(c, &BTreeSet::new(), Shape::HardyLittlewood, 10_000, Mode::Direct).unwrap();
        let b = euler_product(c, &[11].into(), Shape::HardyLittlewood, 10_000, Mode::Direct).unwrap();
        assert!((a.value - b.value).abs() < 1e-15);
    }

    #[test]
    fn exclusion_matches_fresh_product() {
        let c = chi(-7);
        let ex: BTreeSet<u64> = [2, 3, 13].into();
        let got = euler_product(c, &ex, Shape::LangTrotter, 5_000, Mode::Direct).unwrap().value;
        let want: f64 = sieve(5_000)
            .unwrap()
            .iter()
            .filter(|p| !ex.contains(p))
            .map(|p| Factor::Lt.at(c, p))
            .product();
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn hl_factors_as_l_value_times_lt() {
        // 1 - chi/(p-1) = (1 - chi/p) * LT(p) prime by prime
        for d in CM_DISCS {
            let c = chi(d);
            for p in [3u64, 5, 7, 11, 13, 101] {
                let lhs = Factor::Hl.at(c, p);
                let rhs = (1.0 - c.value(p) as f64 / p as f64) * Factor::Lt.at(c, p);
                assert!((lhs - rhs).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bound_limits() {
        let none = BTreeSet::new();
        assert!(euler_product(chi(-4), &none, Shape::LangTrotter, 999, Mode::Direct).is_err());
        assert!(euler_product(chi(-4), &none, Shape::LangTrotter, MAX_BOUND + 1, Mode::Direct).is_err());
    }
}
