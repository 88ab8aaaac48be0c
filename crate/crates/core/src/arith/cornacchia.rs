use super::modular::{gcd, sqrt_mod_prime_power};
use super::sieve::isqrt;
use serde::{Deserialize, Serialize};

/// A representation `x^2 + d*y^2 = m` with `x, y >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FormSolution {
    pub x: u64,
    pub y: u64,
    pub d: u64,
    pub m: u64,
}

impl FormSolution {
    pub fn holds(&self) -> bool {
        let lhs = self.x as u128 * self.x as u128 + self.d as u128 * self.y as u128 * self.y as u128;
        lhs == self.m as u128
    }
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5;
    while p * p <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All solutions of `x^2 + d*y^2 = m` with `x, y >= 0`, sorted by `x`.
///
/// Imprimitive solutions are found by running the primitive algorithm on
/// `m / f^2` for each square divisor `f^2`. Requires `m < 2^62`.
pub fn cornacchia(d: u64, m: u64) -> Vec<FormSolution> {
    cornacchia_factored(d, m, &factorize(m))
}

/// Same as [`cornacchia`] with the factorization of `m` supplied.
pub fn cornacchia_factored(d: u64, m: u64, factors: &[(u64, u32)]) -> Vec<FormSolution> {
    assert!(d >= 1 && m >= 1);
    debug_assert_eq!(factors.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), m);
    let mut out = Vec::new();

    // Solutions with y = 0 or x = 0 are handled directly.
    let s = isqrt(m);
    if s * s == m {
        out.push((s, 0));
    }
    if m % d == 0 {
        let q = m / d;
        let t = isqrt(q);
        if t * t == q {
            out.push((0, t));
        }
    }

    for (f, reduced) in square_divisors(factors) {
        let mp: u64 = reduced.iter().map(|&(p, e)| p.pow(e)).product();
        for (x, y) in primitive(d, mp, &reduced) {
            out.push((x * f, y * f));
        }
    }

    out.sort_unstable();
    out.dedup();
    out.into_iter().map(|(x, y)| FormSolution { x, y, d, m }).collect()
}

/// Pairs `(f, factorization of m / f^2)` over all `f` with `f^2 | m`.
fn square_divisors(factors: &[(u64, u32)]) -> Vec<(u64, Vec<(u64, u32)>)> {
    let mut acc = vec![(1u64, Vec::new())];
    for &(p, e) in factors {
        let mut next = Vec::new();
        for (f, rest) in &acc {
            let mut pf = 1;
            for j in 0..=e / 2 {
                let mut r: Vec<(u64, u32)> = rest.clone();
                if e - 2 * j > 0 {
                    r.push((p, e - 2 * j));
                }
                next.push((f * pf, r));
                pf *= p;
            }
        }
        acc = next;
    }
    acc
}

/// Solutions with `x, y > 0` and `gcd(x, y) = 1`.
fn primitive(d: u64, m: u64, factors: &[(u64, u32)]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    if m <= d {
        return out;
    }
    let minus_d = -(d as i64);
    let mut roots = vec![0u64];
    let mut modulus = 1u64;
    for &(p, e) in factors {
        let pe = p.pow(e);
        let local = sqrt_mod_prime_power(minus_d, p, e);
        if local.is_empty() {
            return out;
        }
        roots = crt_all(&roots, modulus, &local, pe);
        modulus *= pe;
    }
    for &x0 in &roots {
        for start in [x0, (m - x0) % m] {
            let (mut a, mut b) = (m, start);
            while (b as u128) * (b as u128) >= m as u128 {
                (a, b) = (b, a % b);
            }
            let rest = m - b * b;
            if b == 0 || rest % d != 0 {
                continue;
            }
            let q = rest / d;
            let y = isqrt(q);
            if y > 0 && y * y == q && gcd(b, y) == 1 {
                out.push((b, y));
                if d == 1 {
                    // x and y are interchangeable; Euclid only yields one order
                    out.push((y, b));
                }
            }
        }
    }
    out
}

fn crt_all(r1: &[u64], m1: u64, r2: &[u64], m2: u64) -> Vec<u64> {
    let m = m1 as u128 * m2 as u128;
    // u = m1^{-1} mod m2
    let u = super::modular::modular_inverse(m1 % m2, m2).unwrap_or(0) as u128;
    let mut out = Vec::with_capacity(r1.len() * r2.len());
    for &a in r1 {
        for &b in r2 {
            let diff = (b as u128 + m2 as u128 - a as u128 % m2 as u128) % m2 as u128;
            let t = diff * u % m2 as u128;
            out.push(((a as u128 + m1 as u128 * t) % m) as u64);
        }
    }
    out
}
