//! Explicit models of `Gal(K(E[m_E])/K)` inside `GL_2(Z/m_E Z)`, the trace
//! ratio `kappa`, and the pullback check at multiples of `m_E`.
//!
//! Each model is a CRT product of prime-power parts. For a prime power
//! `l^k` the part is chosen from the Cartan `C(l^k)` housing the CM order:
//!
//! * `D = 1`, `l = 2`: `<5I, (-1 -1; -delta -1)>` (this is `<(3 3; 0 3)>` mod 4).
//! * `l` odd and ramified in `K`: the subgroup generated by squares of `C(l^k)`.
//! * every other `l`: the whole Cartan.
//!
//! The first two classes use the conductor-2 order as their house.

use crate::arith::factorize;
use crate::curves::{class_members, registry, CurveSpec};
use crate::gl2::{cartan, crt_combine, generated_subgroup, squares_subgroup, CartanParams, MatrixGroup, ResidueMatrix};
use num_rational::Ratio;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

pub type Kappa = Ratio<i64>;

/// Containers above this size are not enumerated by [`verify_m_e`]; the
/// check then runs on the prime-power parts only.
const COMPOSITE_CHECK_LIMIT: usize = 400_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaloisError {
    #[error("r = 0 is excluded")]
    ZeroTrace,
    #[error("multiplier {0} not in {{2, 3, 5}}")]
    BadMultiplier(u32),
    #[error("{curve}: kappa_{parity} = {got}, expected {want}")]
    TableMismatch { curve: &'static str, parity: &'static str, got: Kappa, want: Kappa },
}

/// The model group of one curve with its construction recipe.
#[derive(Debug, Clone)]
pub struct GaloisModel {
    pub curve_id: &'static str,
    pub group: MatrixGroup,
    pub recipe: Vec<String>,
    census: BTreeMap<u32, u64>,
}

impl GaloisModel {
    pub fn modulus(&self) -> u32 {
        self.group.modulus()
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn census(&self) -> &BTreeMap<u32, u64> {
        &self.census
    }

    /// Share of group elements with trace `r mod m_E`.
    pub fn kappa(&self, r: i64) -> Result<Kappa, GaloisError> {
        if r == 0 {
            return Err(GaloisError::ZeroTrace);
        }
        let res = r.rem_euclid(self.modulus() as i64) as u32;
        let hits = self.census.get(&res).copied().unwrap_or(0);
        Ok(Kappa::new(hits as i64, self.order() as i64))
    }

    pub fn gamma(&self) -> GammaSet {
        GammaSet {
            m_e: self.modulus(),
            residues: self.census.iter().filter(|(_, &c)| c > 0).map(|(&r, _)| r).collect(),
        }
    }
}

/// Residues mod `m_E` attained as traces of the model group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaSet {
    pub m_e: u32,
    pub residues: BTreeSet<u32>,
}

impl GammaSet {
    pub fn contains(&self, r: i64) -> bool {
        self.residues.contains(&(r.rem_euclid(self.m_e as i64) as u32))
    }
}

/// Conductor of the order used as the Cartan house for a class.
fn house_conductor(curve: &CurveSpec) -> u32 {
    match curve.d {
        1 | 3 => 2,
        _ => 1,
    }
}

fn house(curve: &CurveSpec, n: u32) -> CartanParams {
    CartanParams::for_order(curve.disc_k, house_conductor(curve), n)
}

/// `J_2 = <5I, (-1 -1; -delta -1)>` in `C(delta, 0)(2^k)`.
pub fn j2(delta: u32, n: u32) -> MatrixGroup {
    let gens = [ResidueMatrix::scalar(n, 5), ResidueMatrix::new(n, -1, -1, -(delta as i64), -1)];
    generated_subgroup(n, &gens, format!("J2 mod {n}")).expect("invertible generators")
}

/// `J_1 = <5I, (1 1; delta 1)>` in `C(delta, 0)(2^k)`.
pub fn j1(delta: u32, n: u32) -> MatrixGroup {
    let gens = [ResidueMatrix::scalar(n, 5), ResidueMatrix::new(n, 1, 1, delta as i64, 1)];
    generated_subgroup(n, &gens, format!("J1 mod {n}")).expect("invertible generators")
}

/// The model's part at the prime power `l^k`, with a recipe line.
fn part(curve: &CurveSpec, l: u32, k: u32) -> (MatrixGroup, String) {
    let n = l.pow(k);
    let params = house(curve, n);
    let ramified_odd = l % 2 == 1 && curve.disc_k % l as i64 == 0;
    if curve.d == 1 && l == 2 {
        let g = j2(params.delta, n);
        (g, format!("mod {n}: J2 = <5I, (-1 -1; -delta -1)>, delta = {}", params.delta))
    } else if ramified_odd {
        let g = squares_subgroup(&cartan(&params));
        let line = format!("mod {n}: squares of C(delta={}, phi={})", params.delta, params.phi);
        (g, line)
    } else {
        let line = format!("mod {n}: full Cartan C(delta={}, phi={})", params.delta, params.phi);
        (cartan(&params), line)
    }
}

/// The model group at an arbitrary modulus `n` built from the same recipes.
pub fn group_at(curve: &CurveSpec, n: u32) -> (MatrixGroup, Vec<String>) {
    let mut recipe = Vec::new();
    let mut acc: Option<MatrixGroup> = None;
    for (l, k) in factorize(n as u64) {
        let (g, line) = part(curve, l as u32, k);
        recipe.push(line);
        acc = Some(match acc {
            None => g,
            Some(prev) => crt_combine(&prev, &g).expect("distinct primes"),
        });
    }
    let group = acc.expect("n >= 2").relabel(format!("{} model mod {n}", curve.isogeny_class));
    (group, recipe)
}

/// `kappa_odd` and `kappa_even` for the classes with `D >= 7`.
pub const TABLE1: [(u32, (i64, i64), (i64, i64)); 6] = [
    (7, (0, 1), (1, 6)),
    (11, (1, 15), (1, 30)),
    (19, (1, 27), (1, 54)),
    (43, (1, 63), (1, 126)),
    (67, (1, 99), (1, 198)),
    (163, (1, 243), (1, 486)),
];

pub fn table1_expected(d: u32) -> Option<(Kappa, Kappa)> {
    TABLE1
        .iter()
        .find(|row| row.0 == d)
        .map(|&(_, (a, b), (c, e))| (Kappa::new(a, b), Kappa::new(c, e)))
}

/// The common value of `kappa` over odd and over even residues in `Gamma`
/// (zero when no residue of that parity occurs). `None` marks a parity
/// class on which `kappa` is not constant.
pub fn parity_kappas(model: &GaloisModel) -> (Option<Kappa>, Option<Kappa>) {
    let mut odd = BTreeSet::new();
    let mut even = BTreeSet::new();
    let order = model.order() as i64;
    for (&r, &c) in model.census() {
        let k = Kappa::new(c as i64, order);
        if r % 2 == 1 {
            odd.insert(k);
        } else {
            even.insert(k);
        }
    }
    let single = |s: BTreeSet<Kappa>| match s.len() {
        0 => Some(Kappa::from_integer(0)),
        1 => s.into_iter().next(),
        _ => None,
    };
    (single(odd), single(even))
}

fn build_uncached(curve: &'static CurveSpec) -> Result<GaloisModel, GaloisError> {
    let (group, recipe) = group_at(curve, curve.m_e);
    let census = group.trace_census();
    let model = GaloisModel { curve_id: curve.id, group, recipe, census };
    if let Some((odd, even)) = table1_expected(curve.d) {
        let (got_odd, got_even) = parity_kappas(&model);
        for (parity, got, want) in [("odd", got_odd, odd), ("even", got_even, even)] {
            let got = got.unwrap_or(Kappa::from_integer(-1));
            if got != want {
                return Err(GaloisError::TableMismatch { curve: curve.id, parity, got, want });
            }
        }
    }
    Ok(model)
}

type ModelCache = Mutex<HashMap<&'static str, Arc<GaloisModel>>>;

/// The cached model of the curve's isogeny class, labelled with the class
/// representative.
fn class_model(curve: &CurveSpec) -> Result<Arc<GaloisModel>, GaloisError> {
    static CACHE: OnceLock<ModelCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(m) = cache.lock().expect("cache lock").get(curve.isogeny_class) {
        return Ok(m.clone());
    }
    let rep = registry()
        .iter()
        .find(|c| c.id == curve.isogeny_class)
        .or_else(|| class_members(curve).next())
        .expect("registry curve");
    let model = Arc::new(build_uncached(rep)?);
    cache.lock().expect("cache lock").insert(curve.isogeny_class, model.clone());
    Ok(model)
}

/// The model for a registry curve. Models are shared per isogeny class and
/// cached after the first build; `D >= 7` models are checked against the
/// stored `kappa` table before they are returned.
pub fn build_group(curve: &CurveSpec) -> Result<Arc<GaloisModel>, GaloisError> {
    let m = class_model(curve)?;
    if m.curve_id == curve.id {
        return Ok(m);
    }
    let id = registry().iter().find(|c| c.id == curve.id).map_or(m.curve_id, |c| c.id);
    Ok(Arc::new(GaloisModel { curve_id: id, ..(*m).clone() }))
}

pub fn kappa(curve: &CurveSpec, r: i64) -> Result<Kappa, GaloisError> {
    class_model(curve)?.kappa(r)
}

pub fn gamma_set(curve: &CurveSpec) -> Result<GammaSet, GaloisError> {
    Ok(class_model(curve)?.gamma())
}

/// Outcome of the pullback check at `multiplier * m_E`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PullbackReport {
    pub curve: &'static str,
    pub modulus: u32,
    /// Per prime `l`: (`l`-part order at the large modulus, preimage order, agrees).
    pub parts: Vec<(u32, usize, usize, bool)>,
    /// Whether the composite groups were compared as well.
    pub composite_checked: bool,
    pub holds: bool,
}

/// Checks that the model at `multiplier * m_E` is the full preimage of the
/// model at `m_E` inside the Cartan at the larger modulus.
///
/// The check runs on each prime-power part. When the composite Cartan is
/// small enough it is also run on the CRT-combined groups.
pub fn verify_m_e(curve: &CurveSpec, multiplier: u32) -> Result<PullbackReport, GaloisError> {
    if ![2, 3, 5].contains(&multiplier) {
        return Err(GaloisError::BadMultiplier(multiplier));
    }
    let small = curve.m_e;
    let big = small * multiplier;
    let small_f: BTreeMap<u64, u32> = factorize(small as u64).into_iter().collect();
    let mut parts = Vec::new();
    let mut containers = Vec::new();
    for (l, kb) in factorize(big as u64) {
        let l32 = l as u32;
        let (g_big, _) = part(curve, l32, kb);
        let container = cartan(&house(curve, l32.pow(kb)));
        let expected = match small_f.get(&l) {
            Some(&ks) => container.preimage_within(&part(curve, l32, ks).0).expect("divisor"),
            None => container.clone(),
        };
        parts.push((l32, g_big.order(), expected.order(), g_big.elements() == expected.elements()));
        containers.push(container);
    }
    let mut holds = parts.iter().all(|p| p.3);
    let container_size: usize = containers.iter().map(MatrixGroup::order).product();
    let composite_checked = container_size <= COMPOSITE_CHECK_LIMIT;
    if composite_checked {
        let container = containers
            .into_iter()
            .reduce(|a, b| crt_combine(&a, &b).expect("coprime"))
            .expect("nonempty");
        let (g_big, _) = group_at(curve, big);
        let (g_small, _) = group_at(curve, small);
        let pre = container.preimage_within(&g_small).expect("divisor");
        holds &= pre.elements() == g_big.elements();
    }
    Ok(PullbackReport { curve: curve.id, modulus: big, parts, composite_checked, holds })
}

/// One reproduced row of the `kappa` table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table1Row {
    pub curve: &'static str,
    #[serde(rename = "D")]
    pub d: u32,
    pub m_e: u32,
    pub group_order: usize,
    #[serde(serialize_with = "ser_kappa")]
    pub kappa_odd: Kappa,
    #[serde(serialize_with = "ser_kappa")]
    pub kappa_even: Kappa,
}

fn ser_kappa<S: serde::Serializer>(k: &Kappa, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&k.to_string())
}

/// Live computation of the table rows for `E3..E8`, without the stored-table gate.
pub fn table1_rows() -> Vec<Table1Row> {
    ["E3", "E4", "E5", "E6", "E7", "E8"]
        .iter()
        .map(|id| {
            let curve = crate::curves::lookup(id).expect("registry curve");
            let (group, recipe) = group_at(curve, curve.m_e);
            let census = group.trace_census();
            let model = GaloisModel { curve_id: curve.id, group, recipe, census };
            let (odd, even) = parity_kappas(&model);
            Table1Row {
                curve: curve.id,
                d: curve.d,
                m_e: curve.m_e,
                group_order: model.order(),
                kappa_odd: odd.unwrap_or(Kappa::from_integer(-1)),
                kappa_even: even.unwrap_or(Kappa::from_integer(-1)),
            }
        })
        .collect()
}
