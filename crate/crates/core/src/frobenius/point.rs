//! Jacobian-coordinate arithmetic on `y^2 = x^3 + ax + b` over `F_p`, for
//! `p < 2^32` so that products of residues fit in a `u64`.

use crate::curves::CurveModP;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Field {
    p: u64,
}

impl Field {
    pub(crate) fn new(p: u64) -> Self {
        assert!(p < 1 << 32, "field arithmetic assumes p < 2^32");
        Self { p }
    }

    #[inline]
    fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    #[inline]
    fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
}

/// `(X, Y, Z)` stands for `(X / Z^2, Y / Z^3)`; `Z = 0` is the identity.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Jacobian {
    x: u64,
    y: u64,
    z: u64,
}

impl Jacobian {
    pub(crate) const INFINITY: Self = Self { x: 1, y: 1, z: 0 };

    pub(crate) fn affine(x: u64, y: u64) -> Self {
        Self { x, y, z: 1 }
    }

    #[cfg(test)]
    pub(crate) fn is_infinity(&self) -> bool {
        self.z == 0
    }

    pub(crate) fn neg(self, f: Field) -> Self {
        Self { y: f.sub(0, self.y), ..self }
    }
}

pub(crate) struct Arith {
    f: Field,
    a: u64,
}

impl Arith {
    pub(crate) fn new(e: &CurveModP) -> Self {
        Self { f: Field::new(e.p), a: e.a }
    }

    #[cfg(test)]
    pub(crate) fn field(&self) -> Field {
        self.f
    }

    pub(crate) fn double(&self, p: Jacobian) -> Jacobian {
        let f = self.f;
        if p.z == 0 || p.y == 0 {
            return Jacobian::INFINITY;
        }
        let yy = f.mul(p.y, p.y);
        let s = f.mul(4, f.mul(p.x, yy));
        let zz = f.mul(p.z, p.z);
        let m = f.add(f.mul(3, f.mul(p.x, p.x)), f.mul(self.a, f.mul(zz, zz)));
        let x3 = f.sub(f.mul(m, m), f.add(s, s));
        let y3 = f.sub(f.mul(m, f.sub(s, x3)), f.mul(8, f.mul(yy, yy)));
        let z3 = f.mul(2, f.mul(p.y, p.z));
        Jacobian { x: x3, y: y3, z: z3 }
    }

    /// `p + q` where `q` is affine (`q.z == 1`).
    pub(crate) fn add_mixed(&self, p: Jacobian, q: Jacobian) -> Jacobian {
        let f = self.f;
        if p.z == 0 {
            return q;
        }
        if q.z == 0 {
            return p;
        }
        let z1z1 = f.mul(p.z, p.z);
        let u2 = f.mul(q.x, z1z1);
        let s2 = f.mul(q.y, f.mul(p.z, z1z1));
        if u2 == p.x {
            return if s2 == p.y { self.double(p) } else { Jacobian::INFINITY };
        }
        let h = f.sub(u2, p.x);
        let r = f.sub(s2, p.y);
        let hh = f.mul(h, h);
        let hhh = f.mul(h, hh);
        let v = f.mul(p.x, hh);
        let x3 = f.sub(f.sub(f.mul(r, r), hhh), f.add(v, v));
        let y3 = f.sub(f.mul(r, f.sub(v, x3)), f.mul(p.y, hhh));
        let z3 = f.mul(p.z, h);
        Jacobian { x: x3, y: y3, z: z3 }
    }

    /// `[k] q` for affine `q`, left-to-right double and add.
    pub(crate) fn mul(&self, q: Jacobian, k: u64) -> Jacobian {
        let mut acc = Jacobian::INFINITY;
        if k == 0 {
            return acc;
        }
        for bit in (0..64 - k.leading_zeros()).rev() {
            acc = self.double(acc);
            if (k >> bit) & 1 == 1 {
                acc = self.add_mixed(acc, q);
            }
        }
        acc
    }

    /// `[k] q` for a signed scalar.
    pub(crate) fn mul_signed(&self, q: Jacobian, k: i64) -> Jacobian {
        let r = self.mul(q, k.unsigned_abs());
        if k < 0 {
            r.neg(self.f)
        } else {
            r
        }
    }

    pub(crate) fn eq(&self, p: Jacobian, q: Jacobian) -> bool {
        let f = self.f;
        match (p.z == 0, q.z == 0) {
            (true, true) => true,
            (true, false) | (false, true) => false,
            _ => {
                let pz2 = f.mul(p.z, p.z);
                let qz2 = f.mul(q.z, q.z);
                f.mul(p.x, qz2) == f.mul(q.x, pz2)
                    && f.mul(p.y, f.mul(qz2, q.z)) == f.mul(q.y, f.mul(pz2, p.z))
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn to_affine(&self, p: Jacobian) -> Option<(u64, u64)> {
        use crate::arith::pow_mod;
        if p.z == 0 {
            return None;
        }
        let pr = self.f.p;
        let zi = pow_mod(p.z, pr - 2, pr);
        let zi2 = self.f.mul(zi, zi);
        Some((self.f.mul(p.x, zi2), self.f.mul(p.y, self.f.mul(zi2, zi))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(e: &CurveModP) -> Vec<(u64, u64)> {
        let p = e.p;
        let mut out = Vec::new();
        for x in 0..p {
            let rhs = (x * x % p * x + e.a * x + e.b) % p;
            for y in 0..p {
                if y * y % p == rhs {
                    out.push((x, y));
                }
            }
        }
        out
    }

    #[test]
    fn group_order_annihilates_every_point() {
        for (p, a, b) in [(101u64, 4u64, 0u64), (103, 0, 1), (97, 3, 7), (13, 2, 3)] {
            let e = CurveModP { p, a, b };
            let pts = points(&e);
            let n = pts.len() as u64 + 1;
            let ar = Arith::new(&e);
            for &(x, y) in &pts {
                let q = Jacobian::affine(x, y);
                assert!(ar.mul(q, n).is_infinity(), "p={p} ({x},{y})");
            }
        }
    }

    #[test]
    fn doubling_and_addition_agree_with_scalar_multiples() {
        let e = CurveModP { p: 1009, a: 17, b: 5 };
        let ar = Arith::new(&e);
        let base = points(&e)
            .into_iter()
            .find(|&(_, y)| y != 0)
            .unwrap();
        let q = Jacobian::affine(base.0, base.1);
        let mut acc = Jacobian::INFINITY;
        for k in 1..200u64 {
            acc = ar.add_mixed(acc, q);
            assert!(ar.eq(acc, ar.mul(q, k)), "k={k}");
            assert_eq!(ar.to_affine(acc), ar.to_affine(ar.mul(q, k)));
        }
        assert!(ar.eq(ar.mul_signed(q, -5), ar.mul(q, 5).neg(ar.field())));
    }
}
