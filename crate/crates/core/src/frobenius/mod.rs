//! Frobenius traces `a_p = p + 1 - #E(F_p)`: a point-counting oracle, the
//! fast path through the CM field, and counting of `a_p = r` over primes.

mod cache;
mod count;
mod point;

pub use cache::TraceCache;
pub use count::{count_records, count_traces, trace_records, CountResult, COUNT_CEILING};

use crate::arith::{cornacchia_factored, jacobi, sqrt_mod};
use crate::curves::{to_short, CurveError, CurveModP, CurveSpec, ShortForm};
use point::{Arith, Jacobian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Primes below this use point counting instead of the CM path.
pub const NAIVE_CROSSOVER: u64 = 10_000;

/// Random points tried before falling back to point counting.
pub const DISAMBIGUATION_POINTS: usize = 8;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Error)]
pub enum FrobeniusError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("p = {p}: candidates {candidates:?} all survive")]
    Ambiguous { p: u64, candidates: Vec<i64> },
    #[error("counting bound {x} above the ceiling {ceiling}")]
    BoundTooLarge { x: u64, ceiling: u64 },
    #[error("trace cache: {0}")]
    Cache(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Cm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub p: u64,
    pub ap: i64,
    pub method: Method,
}

/// `a_p` as minus the sum of `(x^3 + ax + b | p)` over `x mod p`.
pub fn ap_naive(e: &CurveModP) -> i64 {
    let p = e.p;
    let cubic = |x: u64| ((x * x % p * x % p) + e.a * x % p + e.b) % p;
    let sum: i64 = if p < 1 << 22 {
        let mut chi = vec![-1i8; p as usize];
        chi[0] = 0;
        for y in 1..=(p - 1) / 2 {
            chi[(y * y % p) as usize] = 1;
        }
        (0..p).map(|x| chi[cubic(x) as usize] as i64).sum()
    } else {
        (0..p).map(|x| jacobi(cubic(x) as i64, p) as i64).sum()
    };
    -sum
}

/// Candidate traces `+-t` over all solutions of `t^2 + |disc| v^2 = 4p`.
pub fn trace_candidates(disc_k: i64, p: u64) -> Vec<i64> {
    let d = disc_k.unsigned_abs();
    let mut out: Vec<i64> = cornacchia_factored(d, 4 * p, &[(2, 2), (p, 1)])
        .into_iter()
        .filter(|s| s.x > 0 && s.y > 0)
        .flat_map(|s| [s.x as i64, -(s.x as i64)])
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn random_point(e: &CurveModP, rng: &mut ChaCha8Rng) -> Jacobian {
    let p = e.p;
    loop {
        let x = rng.gen_range(0..p);
        let rhs = (x * x % p * x % p + e.a * x % p + e.b) % p;
        if rhs == 0 {
            continue;
        }
        if let Some(y) = sqrt_mod(rhs as i64, p) {
            let y = if rng.gen::<bool>() { y } else { p - y };
            return Jacobian::affine(x, y);
        }
    }
}

/// Keeps the candidates `t` with `[p + 1 - t] P = O` for up to `points`
/// random `P`, stopping once one candidate is left.
pub fn disambiguate(
    e: &CurveModP,
    candidates: &[i64],
    rng: &mut ChaCha8Rng,
    points: usize,
) -> Result<i64, FrobeniusError> {
    let ar = Arith::new(e);
    let mut alive = candidates.to_vec();
    for _ in 0..points {
        if alive.len() <= 1 {
            break;
        }
        let q = random_point(e, rng);
        let order_multiple = ar.mul(q, e.p + 1);
        alive.retain(|&t| ar.eq(order_multiple, ar.mul_signed(q, t)));
    }
    match alive.as_slice() {
        [t] => Ok(*t),
        _ => Err(FrobeniusError::Ambiguous { p: e.p, candidates: alive }),
    }
}

fn rng_for(seed: u64, p: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Computes `a_p` for one curve at good primes.
#[derive(Debug, Clone)]
pub struct TraceEngine<'a> {
    curve: &'a CurveSpec,
    short: ShortForm,
    seed: u64,
    crossover: u64,
}

impl<'a> TraceEngine<'a> {
    pub fn new(curve: &'a CurveSpec, seed: u64) -> Result<Self, FrobeniusError> {
        Ok(Self { curve, short: to_short(curve)?, seed, crossover: NAIVE_CROSSOVER })
    }

    pub fn with_crossover(mut self, crossover: u64) -> Self {
        self.crossover = crossover;
        self
    }

    pub fn curve(&self) -> &CurveSpec {
        self.curve
    }

    pub fn reduce(&self, p: u64) -> Result<CurveModP, FrobeniusError> {
        if self.curve.is_bad(p) {
            return Err(CurveError::BadReduction { curve: self.curve.id, p }.into());
        }
        Ok(self.short.reduce_unchecked(p))
    }

    pub fn naive(&self, p: u64) -> Result<i64, FrobeniusError> {
        Ok(ap_naive(&self.reduce(p)?))
    }

    /// The CM path, falling back to point counting if the sampled points
    /// do not isolate one candidate.
    pub fn cm(&self, p: u64) -> Result<i64, FrobeniusError> {
        let e = self.reduce(p)?;
        if self.curve.chi(p as i64) == -1 {
            return Ok(0);
        }
        let candidates = trace_candidates(self.curve.disc_k, p);
        let mut rng = rng_for(self.seed, p);
        match disambiguate(&e, &candidates, &mut rng, DISAMBIGUATION_POINTS) {
            Ok(t) => Ok(t),
            Err(FrobeniusError::Ambiguous { .. }) => Ok(ap_naive(&e)),
            Err(other) => Err(other),
        }
    }

    pub fn record(&self, p: u64) -> Result<TraceRecord, FrobeniusError> {
        if p < self.crossover {
            Ok(TraceRecord { p, ap: self.naive(p)?, method: Method::Naive })
        } else {
            Ok(TraceRecord { p, ap: self.cm(p)?, method: Method::Cm })
        }
    }
}

/// `a_p` through the CM path with the default seed.
pub fn ap_cm(curve: &CurveSpec, p: u64) -> Result<i64, FrobeniusError> {
    TraceEngine::new(curve, DEFAULT_SEED)?.cm(p)
}
