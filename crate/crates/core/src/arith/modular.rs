use super::ArithError;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> i32 {
    assert!(n % 2 == 1, "Jacobi symbol needs an odd lower entry");
    let mut a = (a as i128).rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut sign = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        a >>= tz;
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        (a, n) = (n % a, a);
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Legendre symbol for an odd prime `p` (not checked).
pub fn legendre(a: i64, p: u64) -> i32 {
    jacobi(a, p)
}

/// Kronecker symbol `(a/n)`.
pub fn kronecker(a: i64, n: i64) -> Result<i32, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroModulus);
    }
    let mut sign = 1;
    if n < 0 && a < 0 {
        sign = -1;
    }
    let mut m = n.unsigned_abs();
    let tz = m.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return Ok(0);
        }
        // (a/2) = 1 for a = +-1 mod 8, -1 for a = +-3 mod 8
        let r = a.rem_euclid(8);
        if tz % 2 == 1 && (r == 3 || r == 5) {
            sign = -sign;
        }
        m >>= tz;
    }
    Ok(sign * jacobi(a, m))
}

/// Square root of `a` modulo an odd prime `p`, by Tonelli-Shanks.
///
/// Returns the root in `[0, (p-1)/2]`, or `None` for a non-residue. The
/// primality of `p` is the caller's responsibility; a composite `p` gives
/// an unspecified answer. Requires `p < 2^63`.
pub fn sqrt_mod(a: i64, p: u64) -> Option<u64> {
    let a = (a as i128).rem_euclid(p as i128) as u64;
    if a == 0 {
        return Some(0);
    }
    if legendre(a as i64, p) != 1 {
        return None;
    }
    let root = if p % 4 == 3 {
        pow_mod(a, (p + 1) / 4, p)
    } else {
        tonelli_shanks(a, p)
    };
    Some(root.min(p - root))
}

fn tonelli_shanks(a: u64, p: u64) -> u64 {
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while legendre(z as i64, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// Every `x` in `[0, p^k)` with `x^2 = a (mod p^k)`, sorted.
///
/// `p` must be prime and `p^k < 2^63`. Odd `p` not dividing `a` uses Hensel
/// lifting; otherwise roots are lifted one digit at a time by trial, which
/// is fine for the moduli met here.
pub fn sqrt_mod_prime_power(a: i64, p: u64, k: u32) -> Vec<u64> {
    assert!(k >= 1);
    let a_mod = |m: u64| (a as i128).rem_euclid(m as i128) as u64;
    let mut roots: Vec<u64> = if p == 2 {
        vec![a_mod(2)]
    } else {
        match sqrt_mod(a, p) {
            None => return Vec::new(),
            Some(0) => vec![0],
            Some(r) => vec![r, p - r],
        }
    };
    let mut pk = p;
    let hensel = p != 2 && a_mod(p) != 0;
    for _ in 1..k {
        let next = pk * p;
        let target = a_mod(next);
        if hensel {
            // x' = x - (x^2 - a) / (2x)
            for x in roots.iter_mut() {
                let fx = (mul_mod(*x, *x, next) + next - target) % next;
                let inv = modular_inverse(mul_mod(2, *x, next), next).expect("unit");
                *x = (*x + next - mul_mod(fx, inv, next)) % next;
            }
        } else {
            let mut lifted = Vec::new();
            for &x in &roots {
                for t in 0..p {
                    let y = x + t * pk;
                    if mul_mod(y, y, next) == target {
                        lifted.push(y);
                    }
                }
            }
            roots = lifted;
        }
        pk = next;
        if roots.is_empty() {
            break;
        }
    }
    roots.sort_unstable();
    roots.dedup();
    roots
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn modular_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m as i128) as u64)
}
