use super::{MatrixGroup, ResidueMatrix};
use crate::arith::{gcd, modular_inverse};
use serde::Serialize;

/// `(N, delta, phi)` with `delta` and `phi` reduced modulo `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CartanParams {
    pub n: u32,
    pub delta: u32,
    pub phi: u32,
}

impl CartanParams {
    pub fn new(n: u32, delta: i64, phi: i64) -> Self {
        assert!(n >= 2);
        let r = |v: i64| v.rem_euclid(n as i64) as u32;
        Self { n, delta: r(delta), phi: r(phi) }
    }

    /// Parameters housing the order of conductor `f` in the field of
    /// discriminant `disc_k`.
    ///
    /// With `Df = disc_k * f^2`: if `Df = 0 mod 4` or `N` is odd, take
    /// `delta = Df / 4` (division mod `N` when `N` is odd) and `phi = 0`;
    /// otherwise `delta = (disc_k - 1) f^2 / 4` and `phi = f`.
    pub fn for_order(disc_k: i64, f: u32, n: u32) -> Self {
        let df = disc_k * (f as i64).pow(2);
        if df.rem_euclid(4) == 0 {
            Self::new(n, df / 4, 0)
        } else if n % 2 == 1 {
            let inv4 = modular_inverse(4, n as u64).expect("odd modulus") as i64;
            Self::new(n, (df.rem_euclid(n as i64) * inv4) % n as i64, 0)
        } else {
            Self::new(n, (disc_k - 1) * (f as i64).pow(2) / 4, f as i64)
        }
    }

    /// `(a + b phi, b; delta b, a)`.
    pub fn element(&self, a: u32, b: u32) -> ResidueMatrix {
        let (a, b) = (a as i64, b as i64);
        ResidueMatrix::new(self.n, a + b * self.phi as i64, b, self.delta as i64 * b, a)
    }

    /// `c_phi = (-1 0; phi 1)`.
    pub fn c_phi(&self) -> ResidueMatrix {
        ResidueMatrix::new(self.n, -1, 0, self.phi as i64, 1)
    }
}

/// The Cartan subgroup: all `(a + b phi, b; delta b, a)` with unit
/// determinant `a^2 + ab phi - delta b^2`.
pub fn cartan(params: &CartanParams) -> MatrixGroup {
    let n = params.n;
    let mut els = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let g = params.element(a, b);
            if gcd(g.det() as u64, n as u64) == 1 {
                els.push(g);
            }
        }
    }
    MatrixGroup::from_elements(
        n,
        els,
        format!("C(delta={}, phi={}) mod {}", params.delta, params.phi, n),
    )
}

/// The Cartan together with `c_phi`, which normalizes it and squares to
/// the identity.
pub fn normalizer(params: &CartanParams) -> MatrixGroup {
    let c = cartan(params);
    let cp = params.c_phi();
    let mut els: Vec<ResidueMatrix> = c.elements().to_vec();
    els.extend(c.elements().iter().map(|g| g.mul(&cp)));
    MatrixGroup::from_elements(
        params.n,
        els,
        format!("N(delta={}, phi={}) mod {}", params.delta, params.phi, params.n),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factorize, kronecker};

    fn predicted_order(n: u32, disc: i64) -> u64 {
        let mut num = (n as u64).pow(2) as i128;
        let mut den = 1i128;
        for (p, _) in factorize(n as u64) {
            let chi = kronecker(disc, p as i64).unwrap() as i128;
            num *= (p as i128 - 1) * (p as i128 - chi);
            den *= (p as i128) * (p as i128);
        }
        assert_eq!(num % den, 0);
        (num / den) as u64
    }

    #[test]
    fn examples() {
        let c = cartan(&CartanParams::new(4, 1, 0));
        assert_eq!(c.order(), 8);
        for g in c.elements() {
            assert_eq!((g.a, g.b), (g.d, g.c));
            assert!([1, 3].contains(&g.det()));
        }
        assert_eq!(cartan(&CartanParams::new(4, -2, 1)).order(), 4);
        assert_eq!(cartan(&CartanParams::new(5, -1, 0)).order(), 16);
    }

    #[test]
    fn normalizer_has_index_two() {
        for p in [CartanParams::new(4, 1, 0), CartanParams::new(7, 3, 0), CartanParams::new(4, 2, 1)] {
            let c = cartan(&p);
            let nn = normalizer(&p);
            assert_eq!(nn.order(), 2 * c.order());
            assert!(nn.check_axioms());
            assert!(c.is_subset_of(&nn));
        }
        assert_eq!(normalizer(&CartanParams::new(4, 1, 0)).order(), 16);
        let deg = normalizer(&CartanParams::new(3, 0, 0));
        assert!(deg.contains(&ResidueMatrix::new(3, -1, 0, 0, 1)));
    }

    #[test]
    fn order_formula_and_group_axioms() {
        // (disc_k, f) pairs over split, inert and ramified primes
        for (disc, f) in [(-4i64, 1u32), (-4, 2), (-3, 1), (-3, 2), (-7, 1), (-11, 1), (-19, 1), (-43, 1)] {
            for n in [3u32, 4, 5, 7, 8, 9, 11, 12, 13, 19, 25, 28] {
                let params = CartanParams::for_order(disc, f, n);
                let c = cartan(&params);
                let housed = disc * (f as i64).pow(2);
                assert_eq!(c.order() as u64, predicted_order(n, housed), "disc={disc} f={f} n={n}");
                if c.order() <= 200 {
                    assert!(c.check_axioms(), "disc={disc} f={f} n={n}");
                    assert!(c.is_abelian());
                } else {
                    assert!(c.check_axioms_sampled(500, n as u64));
                }
            }
        }
    }

    #[test]
    fn house_rules() {
        assert_eq!(CartanParams::for_order(-3, 2, 4), CartanParams::new(4, 1, 0));
        assert_eq!(CartanParams::for_order(-7, 1, 4), CartanParams::new(4, 2, 1));
        assert_eq!(CartanParams::for_order(-163, 1, 163), CartanParams::new(163, 0, 0));
        assert_eq!(CartanParams::for_order(-4, 2, 8), CartanParams::new(8, 4, 0));
        // odd N: delta = disc/4 mod N
        let p = CartanParams::for_order(-7, 1, 5);
        assert_eq!((4 * p.delta as i64 + 7).rem_euclid(5), 0);
    }
}
