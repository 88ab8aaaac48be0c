//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits nonzero when a criterion fails for a reason not recorded in
//! `KNOWN_DEVIATIONS`.

use lang_trotter::arith::{kronecker, sieve};
use lang_trotter::constants::{
    euler_product, l_closed, lt_constant, verify_equality, xi, DirichletChar, Mode, Shape, CM_DISCS, DEFAULT_BOUND,
};
use lang_trotter::curves::{class_members, lookup, registry, verify_wanxi_form, wanxi_table, CurveSpec, Q};
use lang_trotter::frobenius::{count_traces, TraceEngine, DEFAULT_SEED};
use lang_trotter::galois::{build_group, table1_expected, table1_rows, verify_m_e, Kappa};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

/// Criteria whose failure is an analysed conflict rather than a defect.
const KNOWN_DEVIATIONS: [(u32, &str); 2] = [
    (2, "E2s model order is 24 (8 from the 4-part times 3 from the 3-part); kappa pattern holds exactly"),
    (7, "sqrt(x)/log x undershoots the integral main term by 1 + 2/log x + ..., which outweighs the 1e6 -> 1e7 convergence"),
];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn curve(id: &str) -> &'static CurveSpec {
    lookup(id).expect("registry curve")
}

fn criterion_1() -> Verdict {
    let m_e = [28, 44, 76, 172, 268, 652];
    let rows = table1_rows();
    let mut bad = Vec::new();
    for (row, want_m) in rows.iter().zip(m_e) {
        let (odd, even) = table1_expected(row.d).expect("stored row");
        if row.kappa_odd != odd || row.kappa_even != even || row.m_e != want_m {
            bad.push(format!("{} got ({}, {}, m_E {})", row.curve, row.kappa_odd, row.kappa_even, row.m_e));
        }
    }
    let largest = rows.iter().map(|r| r.group_order).max().unwrap_or(0);
    if bad.is_empty() && rows.len() == 6 {
        verdict(true, format!("6 rows exact, largest group {largest} elements"))
    } else {
        verdict(false, bad.join("; "))
    }
}

fn criterion_2() -> Verdict {
    let e1s = build_group(curve("E1s")).expect("E1s model");
    let e1s_ok = e1s.order() == 4 && e1s.census() == &BTreeMap::from([(2, 4)]);
    let e2s = build_group(curve("E2s")).expect("E2s model");
    let half = Kappa::new(1, 2);
    let kappa_ok = (-50..=50).filter(|&r| r != 0).all(|r: i64| {
        let want = if [2, 8].contains(&r.rem_euclid(12)) { half } else { Kappa::from_integer(0) };
        e2s.kappa(r).expect("nonzero r") == want
    });
    let order_ok = e2s.order() == 16;
    let detail = format!(
        "E1s order {} census {:?} [{}]; E2s kappa = 1/2 exactly at r = 2, 8 mod 12 else 0 [{}]; E2s order {} vs stated 16 [{}]",
        e1s.order(),
        e1s.census(),
        ok(e1s_ok),
        ok(kappa_ok),
        e2s.order(),
        ok(order_ok)
    );
    verdict(e1s_ok && kappa_ok && order_ok, detail)
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "mismatch"
    }
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let rs: Vec<i64> = (-50..=50).filter(|&r| r != 0).collect();
    let mut rows = 0;
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for c in registry() {
        let report = verify_equality(c, &rs, 1e-6, DEFAULT_BOUND, Mode::Accelerated).expect("valid inputs");
        rows += report.rows.len();
        for row in &report.rows {
            if row.omega_bar != 0.0 {
                worst = worst.max(row.diff);
            }
        }
        failures.extend(report.failures().iter().map(|f| format!("{} r={}", f.curve, f.r)));
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && rows == 2000 && secs < 300.0;
    let mut detail = format!("{rows} rows, worst relative diff {worst:.2e}, {secs:.1}s");
    if !failures.is_empty() {
        detail += &format!("; failing: {}", failures.join(", "));
    }
    verdict(pass, detail)
}

const ORACLE_BOUND: u64 = 20_000;

fn good_primes(c: &CurveSpec) -> Vec<u64> {
    sieve(ORACLE_BOUND)
        .expect("small sieve")
        .primes()
        .iter()
        .map(|&p| p as u64)
        .filter(|&p| !c.is_bad(p))
        .collect()
}

fn criterion_4() -> Verdict {
    let mismatches: Vec<String> = registry()
        .par_iter()
        .flat_map_iter(|c| {
            let engine = TraceEngine::new(c, DEFAULT_SEED).expect("engine");
            good_primes(c)
                .into_iter()
                .filter(move |&p| engine.naive(p).unwrap() != engine.cm(p).unwrap())
                .map(move |p| format!("{} p={p}", c.id))
        })
        .collect();
    let mut partner_bad = Vec::new();
    let mut pairs = 0;
    for c in registry() {
        for other in class_members(c).filter(|o| o.id > c.id) {
            pairs += 1;
            let (e1, e2) = (TraceEngine::new(c, DEFAULT_SEED).unwrap(), TraceEngine::new(other, DEFAULT_SEED).unwrap());
            let shared: Vec<u64> = good_primes(c).into_iter().filter(|&p| !other.is_bad(p)).collect();
            if shared.iter().any(|&p| e1.cm(p).unwrap() != e2.cm(p).unwrap()) {
                partner_bad.push(format!("{}~{}", c.id, other.id));
            }
        }
    }
    let pass = mismatches.is_empty() && partner_bad.is_empty();
    let mut detail = format!("naive = CM for all good p <= {ORACLE_BOUND} on 20 curves; {pairs} isogenous pairs agree");
    if !pass {
        detail = format!("naive/CM mismatches: {:?}; partner mismatches: {:?}", mismatches, partner_bad);
    }
    verdict(pass, detail)
}

fn criterion_5() -> Verdict {
    let bad: Vec<String> = registry()
        .par_iter()
        .flat_map_iter(|c| {
            let engine = TraceEngine::new(c, DEFAULT_SEED).expect("engine");
            good_primes(c)
                .into_iter()
                .filter(move |&p| {
                    let inert = kronecker(c.disc_k, p as i64).unwrap() == -1;
                    (engine.naive(p).unwrap() == 0) != inert
                })
                .map(move |p| format!("{} p={p}", c.id))
        })
        .collect();
    verdict(bad.is_empty(), if bad.is_empty() { format!("point counts up to {ORACLE_BOUND}, 20 curves") } else { bad.join(", ") })
}

/// Traces in `[-50, 50]` for which the count is unconditionally bounded.
fn vanishing_rs(c: &CurveSpec) -> Vec<i64> {
    (-50..=50i64)
        .filter(|&r| r != 0)
        .filter(|&r| match c.d {
            1 => r % 2 != 0,
            3 => r % 3 == 0,
            d => r % d as i64 == 0 || xi(d, r) == 0,
        })
        .collect()
}

fn criterion_6() -> Verdict {
    let x = 1_000_000;
    let mut worst = (0, "none", 0);
    let mut over = Vec::new();
    let mut classes = 0;
    for c in registry() {
        let rs = vanishing_rs(c);
        classes += rs.len();
        for (r, res) in count_traces(c, x, &rs, DEFAULT_SEED).expect("count") {
            if res.count > worst.0 {
                worst = (res.count, c.id, r);
            }
            if res.count > 10 {
                over.push(format!("{} r={r}: {}", c.id, res.count));
            }
        }
    }
    let peak = if worst.0 == 0 { "every count is 0".to_string() } else { format!("max count {} ({} r={})", worst.0, worst.1, worst.2) };
    let detail = format!("{classes} (curve, r) classes at x = 1e6, {peak}");
    verdict(over.is_empty(), if over.is_empty() { detail } else { format!("{detail}; over 10: {}", over.join(", ")) })
}

/// `int_2^x dt / (2 sqrt(t) log t)`, integrated in `u = sqrt(t)` by Simpson's rule.
fn integral_main_term(x: f64) -> f64 {
    let (a, b) = (2f64.sqrt(), x.sqrt());
    let n = 200_000;
    let h = (b - a) / n as f64;
    let f = |u: f64| 1.0 / (2.0 * u.ln());
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// `(count, C, x)` for each case.
fn counts_at(cases: &[(&str, i64)], x: u64) -> Vec<(f64, f64, f64)> {
    cases
        .iter()
        .map(|&(id, r)| {
            let c = curve(id);
            let count = count_traces(c, x, &[r], DEFAULT_SEED).expect("count")[&r].count as f64;
            let constant = lt_constant(c, r, DEFAULT_BOUND, Mode::Accelerated).expect("constant").value;
            (count, constant, x as f64)
        })
        .collect()
}

/// Ratios of counts to `C * main(x)`, with E1 at r = +-2 pooled into one case.
fn case_ratios(v: &[(f64, f64, f64)], main: impl Fn(f64) -> f64) -> ([f64; 4], [f64; 3]) {
    let each: Vec<f64> = v.iter().map(|&(n, c, x)| n / (c * main(x))).collect();
    let m = main(v[0].2);
    let pooled = (v[0].0 + v[1].0) / ((v[0].1 + v[1].1) * m);
    ([each[0], each[1], each[2], each[3]], [pooled, each[2], each[3]])
}

fn criterion_7() -> Verdict {
    let cases = [("E1", 2), ("E1", -2), ("E2", 2), ("E4", 2)];
    let small = counts_at(&cases, 1_000_000);
    let large = counts_at(&cases, 10_000_000);
    let crude = |x: f64| x.sqrt() / x.ln();
    let closer = |a: &[f64; 3], b: &[f64; 3]| (0..3).filter(|&i| (b[i] - 1.0).abs() <= (a[i] - 1.0).abs()).count();
    let (s_each, s_cases) = case_ratios(&small, crude);
    let (l_each, l_cases) = case_ratios(&large, crude);
    let in_band = s_each.iter().all(|r| (0.6..=1.4).contains(r));
    let moved = closer(&s_cases, &l_cases);
    let (si, si_cases) = case_ratios(&small, integral_main_term);
    let (li, li_cases) = case_ratios(&large, integral_main_term);
    let fmt = |a: &[f64; 4], b: &[f64; 4]| {
        cases
            .iter()
            .enumerate()
            .map(|(i, (id, r))| format!("{id} r={r}: {:.3} -> {:.3}", a[i], b[i]))
            .collect::<Vec<_>>()
            .join(", ")
    };
    verdict(
        in_band && moved >= 2,
        format!(
            "ratios 1e6 -> 1e7: {}; in band at 1e6 [{}]; {moved} of 3 cases no farther from 1 (E1 pooled over r = +-2); \
             against the integral main term: {}; {} of 3 no farther from 1",
            fmt(&s_each, &l_each),
            ok(in_band),
            fmt(&si, &li),
            closer(&si_cases, &li_cases)
        ),
    )
}

fn criterion_8() -> Verdict {
    let closed = [(-4, PI / 4.0), (-3, PI / (3.0 * 3f64.sqrt()))];
    let mut closed_ok = closed.iter().all(|&(d, v)| l_closed(d).unwrap() == v);
    for d in [7i64, 11, 19, 43, 67, 163] {
        closed_ok &= l_closed(-d).unwrap() == PI / (d as f64).sqrt();
    }
    let none = BTreeSet::new();
    let gap = |disc: i64, shape: Shape| {
        let chi = DirichletChar::new(disc).unwrap();
        let d = euler_product(chi, &none, shape, DEFAULT_BOUND, Mode::Direct).unwrap().value;
        let a = euler_product(chi, &none, shape, DEFAULT_BOUND, Mode::Accelerated).unwrap().value;
        (d - a).abs()
    };
    let hl4 = gap(-4, Shape::HardyLittlewood);
    let lt_worst = CM_DISCS.iter().map(|&d| gap(d, Shape::LangTrotter)).fold(0.0, f64::max);
    let others: Vec<String> = CM_DISCS
        .iter()
        .filter(|&&d| d != -4)
        .map(|&d| format!("{d}: {:.1e}", gap(d, Shape::HardyLittlewood)))
        .collect();
    let pass = closed_ok && hl4 <= 1e-5 && lt_worst <= 1e-8;
    verdict(
        pass,
        format!(
            "closed forms exact [{}]; HL gap chi_-4 {hl4:.2e}; LT worst gap {lt_worst:.2e}; HL gaps elsewhere (truncation bias, informational) {}",
            ok(closed_ok),
            others.join(", ")
        ),
    )
}

fn criterion_9() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for id in ["E1s", "E2s"] {
        for m in [2, 3] {
            let report = verify_m_e(curve(id), m).expect("pullback check");
            pass &= report.holds;
            parts.push(format!("{id} x{m} (mod {}) {}", report.modulus, ok(report.holds)));
        }
    }
    verdict(pass, parts.join(", "))
}

fn criterion_10() -> Verdict {
    let mut pass = true;
    let mut failing = Vec::new();
    for id in ["E3", "E4", "E5", "E6", "E7", "E8"] {
        let holds = verify_wanxi_form(curve(id)).unwrap_or(false);
        pass &= holds;
        if !holds {
            failing.push(id);
        }
    }
    let example = wanxi_table(19) == Some((Q::from_integer(-152), Q::from_integer(361)));
    pass &= example;
    verdict(
        pass,
        if failing.is_empty() {
            format!("E3..E8 reduce to the tabulated (a, b); D = 19 row (-152, 361) [{}]", ok(example))
        } else {
            format!("failing: {}", failing.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Verdict); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut undocumented = 0;
    for (n, check) in criteria {
        let v = check();
        let known = KNOWN_DEVIATIONS.iter().find(|k| k.0 == n);
        let tag = match (v.pass, known) {
            (true, _) => "PASS".to_string(),
            (false, Some((_, why))) => format!("FAIL (documented deviation: {why})"),
            (false, None) => {
                undocumented += 1;
                "FAIL".to_string()
            }
        };
        println!("criterion {n:>2} {tag}: {}", v.detail);
    }
    if undocumented > 0 {
        println!("{undocumented} undocumented failure(s)");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
