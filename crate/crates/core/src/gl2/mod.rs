//! Finite subgroups of `GL_2(Z/NZ)` stored as explicit sorted element lists.

mod cartan;

pub use cartan::{cartan, normalizer, CartanParams};

use crate::arith::{gcd, mul_mod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("matrix {0} is not invertible")]
    NotInvertible(ResidueMatrix),
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u32, u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("{0} does not divide {1}")]
    NotDivisor(u32, u32),
}

/// `(a b; c d)` over `Z/NZ`. Ordering is lexicographic in `(a, b, c, d)`
/// for a fixed modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ResidueMatrix {
    pub n: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl std::fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({} {}; {} {}) mod {}", self.a, self.b, self.c, self.d, self.n)
    }
}

fn red(v: i64, n: u32) -> u32 {
    v.rem_euclid(n as i64) as u32
}

impl ResidueMatrix {
    pub fn new(n: u32, a: i64, b: i64, c: i64, d: i64) -> Self {
        assert!(n >= 2, "modulus must be at least 2");
        Self { n, a: red(a, n), b: red(b, n), c: red(c, n), d: red(d, n) }
    }

    pub fn identity(n: u32) -> Self {
        Self::new(n, 1, 0, 0, 1)
    }

    pub fn scalar(n: u32, s: i64) -> Self {
        Self::new(n, s, 0, 0, s)
    }

    pub fn entries(&self) -> [u32; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> u32 {
        let n = self.n as u64;
        let ad = self.a as u64 * self.d as u64 % n;
        let bc = self.b as u64 * self.c as u64 % n;
        ((ad + n - bc) % n) as u32
    }

    pub fn trace(&self) -> u32 {
        (self.a + self.d) % self.n
    }

    pub fn is_invertible(&self) -> bool {
        gcd(self.det() as u64, self.n as u64) == 1
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        let n = self.n as u64;
        let m = |x: u32, y: u32, z: u32, w: u32| ((x as u64 * y as u64 + z as u64 * w as u64) % n) as u32;
        Self {
            n: self.n,
            a: m(self.a, o.a, self.b, o.c),
            b: m(self.a, o.b, self.b, o.d),
            c: m(self.c, o.a, self.d, o.c),
            d: m(self.c, o.b, self.d, o.d),
        }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.n as u64;
        let inv = crate::arith::modular_inverse(self.det() as u64, n)?;
        let s = |v: u32| mul_mod(v as u64, inv, n) as i64;
        Some(Self::new(self.n, s(self.d), -s(self.b), -s(self.c), s(self.a)))
    }

    /// Image under `Z/NZ -> Z/mZ` for `m | N`.
    pub fn reduce(&self, m: u32) -> Self {
        debug_assert_eq!(self.n % m, 0);
        Self { n: m, a: self.a % m, b: self.b % m, c: self.c % m, d: self.d % m }
    }
}

/// A finite subgroup of `GL_2(Z/NZ)` with a free-form label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixGroup {
    n: u32,
    elements: Vec<ResidueMatrix>,
    label: String,
}

#[derive(Serialize)]
struct GroupDump<'a> {
    modulus: u32,
    label: &'a str,
    order: usize,
    elements: Vec<[u32; 4]>,
}

impl MatrixGroup {
    /// Wraps an element list without checking the group axioms.
    pub fn from_elements(n: u32, mut elements: Vec<ResidueMatrix>, label: impl Into<String>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        Self { n, elements, label: label.into() }
    }

    pub fn modulus(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[ResidueMatrix] {
        &self.elements
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn contains(&self, g: &ResidueMatrix) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn is_subset_of(&self, other: &MatrixGroup) -> bool {
        self.n == other.n && self.elements.iter().all(|g| other.contains(g))
    }

    /// Identity, invertibility, inverses, and closure, checked on all pairs.
    pub fn check_axioms(&self) -> bool {
        let id = ResidueMatrix::identity(self.n);
        self.contains(&id)
            && self.elements.iter().all(|g| g.is_invertible() && g.inverse().is_some_and(|h| self.contains(&h)))
            && self.elements.iter().all(|g| self.elements.iter().all(|h| self.contains(&g.mul(h))))
    }

    /// Closure and inverses checked on `samples` random pairs.
    pub fn check_axioms_sampled(&self, samples: usize, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = self.elements.len();
        self.contains(&ResidueMatrix::identity(self.n))
            && (0..samples).all(|_| {
                let g = &self.elements[rng.gen_range(0..k)];
                let h = &self.elements[rng.gen_range(0..k)];
                self.contains(&g.mul(h)) && g.inverse().is_some_and(|i| self.contains(&i))
            })
    }

    pub fn is_abelian(&self) -> bool {
        self.elements.iter().all(|g| self.elements.iter().all(|h| g.mul(h) == h.mul(g)))
    }

    /// Number of elements with each trace.
    pub fn trace_census(&self) -> BTreeMap<u32, u64> {
        let mut out = BTreeMap::new();
        for g in &self.elements {
            *out.entry(g.trace()).or_insert(0) += 1;
        }
        out
    }

    /// The image of the group modulo a divisor `m` of `N`.
    pub fn project(&self, m: u32) -> Result<MatrixGroup, GroupError> {
        if self.n % m != 0 {
            return Err(GroupError::NotDivisor(m, self.n));
        }
        let els = self.elements.iter().map(|g| g.reduce(m)).collect();
        Ok(MatrixGroup::from_elements(m, els, format!("{} mod {m}", self.label)))
    }

    /// Elements of `self` whose image modulo `image.modulus()` lies in `image`.
    pub fn preimage_within(&self, image: &MatrixGroup) -> Result<MatrixGroup, GroupError> {
        let m = image.modulus();
        if self.n % m != 0 {
            return Err(GroupError::NotDivisor(m, self.n));
        }
        let els = self.elements.iter().copied().filter(|g| image.contains(&g.reduce(m))).collect();
        Ok(MatrixGroup::from_elements(self.n, els, format!("preimage of {} in {}", image.label, self.label)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GroupDump {
            modulus: self.n,
            label: &self.label,
            order: self.order(),
            elements: self.elements.iter().map(ResidueMatrix::entries).collect(),
        })
        .expect("group serializes")
    }
}

/// The subgroup generated by `generators`.
///
/// Generators already in the group built so far are skipped, so long
/// generator lists (such as all squares of a group) stay cheap.
pub fn generated_subgroup(
    n: u32,
    generators: &[ResidueMatrix],
    label: impl Into<String>,
) -> Result<MatrixGroup, GroupError> {
    for g in generators {
        if g.n != n {
            return Err(GroupError::ModulusMismatch(g.n, n));
        }
        if !g.is_invertible() {
            return Err(GroupError::NotInvertible(*g));
        }
    }
    let id = ResidueMatrix::identity(n);
    let mut set: HashSet<ResidueMatrix> = HashSet::from([id]);
    let mut used: Vec<ResidueMatrix> = Vec::new();
    for g in generators {
        if set.contains(g) {
            continue;
        }
        used.push(*g);
        let mut queue: VecDeque<ResidueMatrix> = set.iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            for s in &used {
                let y = x.mul(s);
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(MatrixGroup::from_elements(n, set.into_iter().collect(), label))
}

/// The subgroup generated by the squares of `g`.
pub fn squares_subgroup(g: &MatrixGroup) -> MatrixGroup {
    let mut sq: Vec<ResidueMatrix> = g.elements.iter().map(ResidueMatrix::square).collect();
    sq.sort_unstable();
    sq.dedup();
    generated_subgroup(g.n, &sq, format!("squares of {}", g.label)).expect("squares are invertible")
}

/// The residue mod `m n` congruent to `x mod m` and `y mod n`.
pub fn crt_lift(x: u32, m: u32, y: u32, n: u32) -> u32 {
    let inv = crate::arith::modular_inverse(m as u64 % n as u64, n as u64).expect("coprime moduli");
    let t = ((y as u64 + n as u64 - x as u64 % n as u64) % n as u64) * inv % n as u64;
    (x as u64 + m as u64 * t) as u32
}

/// `G1 x G2` embedded in `GL_2(Z/mnZ)` entrywise by the Chinese remainder theorem.
pub fn crt_combine(g1: &MatrixGroup, g2: &MatrixGroup) -> Result<MatrixGroup, GroupError> {
    let (m, n) = (g1.n, g2.n);
    if gcd(m as u64, n as u64) != 1 {
        return Err(GroupError::NotCoprime(m, n));
    }
    let mn = m * n;
    let mut els = Vec::with_capacity(g1.order() * g2.order());
    for x in &g1.elements {
        for y in &g2.elements {
            els.push(ResidueMatrix {
                n: mn,
                a: crt_lift(x.a, m, y.a, n),
                b: crt_lift(x.b, m, y.b, n),
                c: crt_lift(x.c, m, y.c, n),
                d: crt_lift(x.d, m, y.d, n),
            });
        }
    }
    Ok(MatrixGroup::from_elements(mn, els, format!("{} x {}", g1.label, g2.label)))
}
