use crate::args::{Format, RunConfig};
use crate::error::CliError;
use crate::table1;
use lang_trotter::constants::{lt_constant, verify_equality, EqualityRow};
use lang_trotter::curves::{registry, registry_json, CurveSpec};
use lang_trotter::frobenius::{count_records, count_traces, CountResult, TraceCache};
use lang_trotter::galois::build_group;
use lang_trotter::hardylittlewood::{count_poly_primes, poly_for};
use serde::Serialize;
use std::collections::BTreeMap;

/// Rendered report plus the exit status it implies.
pub struct Outcome {
    pub report: String,
    pub status: i32,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Self { report, status: 0 }
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn csv_rows<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("row serializes");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf8")
}

/// Left-aligned text table with two spaces between columns.
fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

fn sci(v: f64) -> String {
    format!("{v:.10e}")
}

fn equality_rows(cfg: &RunConfig) -> Result<Vec<EqualityRow>, CliError> {
    let mut rows = Vec::with_capacity(cfg.curves.len() * cfg.rs.len());
    for &curve in &cfg.curves {
        let report = verify_equality(curve, &cfg.rs, cfg.tol, cfg.bound, cfg.mode).map_err(CliError::run)?;
        rows.extend(report.rows);
    }
    Ok(rows)
}

fn equality_text(rows: &[EqualityRow], with_pass: bool) -> String {
    let mut headers = vec!["curve", "r", "omega_bar", "C", "diff"];
    if with_pass {
        headers.push("result");
    }
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let mut cells = vec![row.curve.to_string(), row.r.to_string(), sci(row.omega_bar), sci(row.c), format!("{:.3e}", row.diff)];
            if with_pass {
                cells.push(if row.pass { "PASS" } else { "FAIL" }.to_string());
            }
            cells
        })
        .collect();
    table(&headers, &body)
}

pub fn constants(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = equality_rows(cfg)?;
    let report = match cfg.format {
        Format::Json => json(&rows),
        Format::Csv => csv_rows(&rows),
        Format::Text => equality_text(&rows, false),
    };
    Ok(Outcome::ok(report))
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    tol: f64,
    bound: u64,
    rows: usize,
    failures: usize,
    all_pass: bool,
    results: &'a [EqualityRow],
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = equality_rows(cfg)?;
    let failures = rows.iter().filter(|r| !r.pass).count();
    let report = match cfg.format {
        Format::Json => json(&VerifyReport {
            tol: cfg.tol,
            bound: cfg.bound,
            rows: rows.len(),
            failures,
            all_pass: failures == 0,
            results: &rows,
        }),
        Format::Csv => csv_rows(&rows),
        Format::Text => {
            let worst = rows.iter().filter(|r| r.omega_bar != 0.0).map(|r| r.diff).fold(0.0, f64::max);
            format!(
                "{}\n{} of {} rows pass at tol {:e} (bound {}, worst relative diff {:.3e})\n",
                equality_text(&rows, true),
                rows.len() - failures,
                rows.len(),
                cfg.tol,
                cfg.bound,
                worst
            )
        }
    };
    Ok(Outcome { report, status: if failures == 0 { 0 } else { 1 } })
}

#[derive(Debug, Serialize)]
struct CountRow {
    curve: &'static str,
    r: i64,
    x: u64,
    count: u64,
    excluded: usize,
    #[serde(rename = "C")]
    c: f64,
    predicted: f64,
    ratio: Option<f64>,
    poly: Option<String>,
    poly_count: Option<u64>,
}

fn trace_counts(cfg: &RunConfig, curve: &CurveSpec) -> Result<BTreeMap<i64, CountResult>, CliError> {
    match &cfg.cache_dir {
        Some(dir) => {
            let records = TraceCache::new(dir).records(curve, cfg.x, cfg.seed).map_err(CliError::run)?;
            Ok(count_records(curve, &records, cfg.x, &cfg.rs))
        }
        None => count_traces(curve, cfg.x, &cfg.rs, cfg.seed).map_err(CliError::run),
    }
}

pub fn count(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let x = cfg.x as f64;
    let scale = if cfg.x >= 3 { x.sqrt() / x.ln() } else { 0.0 };
    let mut rows = Vec::new();
    for &curve in &cfg.curves {
        let counts = trace_counts(cfg, curve)?;
        for &r in &cfg.rs {
            let found = &counts[&r];
            let c = lt_constant(curve, r, cfg.bound, cfg.mode).map_err(CliError::run)?.value;
            let predicted = c * scale;
            let (poly, poly_count) = if cfg.with_poly {
                match poly_for(curve, r) {
                    Ok(p) => {
                        let n = count_poly_primes(&p, cfg.x, cfg.m_start).map_err(CliError::run)?.count;
                        let (a, b, c) = p.coefficients();
                        (Some(format!("{a}m^2{b:+}m{c:+}")), Some(n))
                    }
                    Err(_) => (None, None),
                }
            } else {
                (None, None)
            };
            rows.push(CountRow {
                curve: curve.id,
                r,
                x: cfg.x,
                count: found.count,
                excluded: found.excluded.len(),
                c,
                predicted,
                ratio: (predicted > 0.0).then(|| found.count as f64 / predicted),
                poly,
                poly_count,
            });
        }
    }
    let report = match cfg.format {
        Format::Json => json(&rows),
        Format::Csv => csv_rows(&rows),
        Format::Text => {
            let mut headers = vec!["curve", "r", "x", "count", "predicted", "ratio"];
            if cfg.with_poly {
                headers.extend(["poly", "poly_count"]);
            }
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|row| {
                    let mut cells = vec![
                        row.curve.to_string(),
                        row.r.to_string(),
                        row.x.to_string(),
                        row.count.to_string(),
                        format!("{:.4}", row.predicted),
                        row.ratio.map_or("-".to_string(), |v| format!("{v:.4}")),
                    ];
                    if cfg.with_poly {
                        cells.push(row.poly.clone().unwrap_or_else(|| "-".into()));
                        cells.push(row.poly_count.map_or("-".to_string(), |n| n.to_string()));
                    }
                    cells
                })
                .collect();
            table(&headers, &body)
        }
    };
    Ok(Outcome::ok(report))
}

#[derive(Serialize)]
struct Table1Report<'a> {
    rows: &'a [table1::Row],
    mismatches: &'a [table1::Mismatch],
    matches: bool,
}

pub fn table1(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let stored_text = match &cfg.expected {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("expected table {}: {e}", path.display())))?,
        None => table1::STORED.to_string(),
    };
    let stored = table1::parse_stored(&stored_text)?;
    let live = table1::live_rows()?;
    let mismatches = table1::diff(&live, &stored);
    let report = match cfg.format {
        Format::Json => json(&Table1Report { rows: &live, mismatches: &mismatches, matches: mismatches.is_empty() }),
        Format::Csv => csv_rows(&live),
        Format::Text => {
            let mut headers = vec!["curve"];
            headers.extend(table1::COLUMNS);
            let body: Vec<Vec<String>> = live
                .iter()
                .map(|row| {
                    std::iter::once(row.curve.clone())
                        .chain(table1::COLUMNS.iter().map(|c| row.get(c).to_string()))
                        .collect()
                })
                .collect();
            let mut out = table(&headers, &body);
            if mismatches.is_empty() {
                out += "\nall cells match the stored table\n";
            }
            for m in &mismatches {
                out += &format!("mismatch {} {}: stored {}, computed {}\n", m.curve, m.column, m.expected, m.found);
            }
            out
        }
    };
    if cfg.format == Format::Csv {
        for m in &mismatches {
            eprintln!("mismatch {} {}: stored {}, computed {}", m.curve, m.column, m.expected, m.found);
        }
    }
    Ok(Outcome { report, status: if mismatches.is_empty() { 0 } else { 1 } })
}

#[derive(Serialize)]
struct RegistryRow {
    id: &'static str,
    #[serde(rename = "D")]
    d: u32,
    disc_k: i64,
    f: u32,
    m_e: u32,
    isogeny_class: &'static str,
    ainvs: String,
    bad_primes: String,
}

pub fn registry_view(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let selected: Vec<&CurveSpec> = if cfg.curves.is_empty() { registry().iter().collect() } else { cfg.curves.clone() };
    let rows: Vec<RegistryRow> = selected
        .iter()
        .map(|c| RegistryRow {
            id: c.id,
            d: c.d,
            disc_k: c.disc_k,
            f: c.order_conductor,
            m_e: c.m_e,
            isogeny_class: c.isogeny_class,
            ainvs: format!("{:?}", c.ainvs),
            bad_primes: c.bad_primes.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
        })
        .collect();
    let report = match cfg.format {
        Format::Json if cfg.curves.is_empty() => registry_json() + "\n",
        Format::Json => json(&selected),
        Format::Csv => csv_rows(&rows),
        Format::Text => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.id.to_string(),
                        r.d.to_string(),
                        r.m_e.to_string(),
                        r.isogeny_class.to_string(),
                        r.ainvs.clone(),
                        r.bad_primes.clone(),
                    ]
                })
                .collect();
            table(&["id", "D", "m_E", "class", "ainvs", "bad primes"], &body)
        }
    };
    Ok(Outcome::ok(report))
}

#[derive(Serialize)]
struct CensusRow {
    residue: u32,
    elements: u64,
    kappa: String,
}

#[derive(Serialize)]
struct GroupReport<'a> {
    curve: &'static str,
    isogeny_class: &'static str,
    modulus: u32,
    order: usize,
    recipe: &'a [String],
    census: &'a [CensusRow],
}

pub fn group(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let curve = cfg.curves[0];
    let model = build_group(curve).map_err(CliError::run)?;
    let order = model.order() as i64;
    let census: Vec<CensusRow> = model
        .census()
        .iter()
        .map(|(&residue, &elements)| CensusRow {
            residue,
            elements,
            kappa: lang_trotter::galois::Kappa::new(elements as i64, order).to_string(),
        })
        .collect();
    let report = match cfg.format {
        Format::Json => json(&GroupReport {
            curve: curve.id,
            isogeny_class: curve.isogeny_class,
            modulus: model.modulus(),
            order: model.order(),
            recipe: &model.recipe,
            census: &census,
        }),
        Format::Csv => csv_rows(&census),
        Format::Text => {
            let mut out = format!(
                "{} (class {}): model of order {} in GL_2(Z/{}Z)\n",
                curve.id,
                curve.isogeny_class,
                model.order(),
                model.modulus()
            );
            for step in &model.recipe {
                out += &format!("  {step}\n");
            }
            out.push('\n');
            let body: Vec<Vec<String>> =
                census.iter().map(|c| vec![c.residue.to_string(), c.elements.to_string(), c.kappa.clone()]).collect();
            out + &table(&["trace mod m_E", "elements", "kappa"], &body)
        }
    };
    Ok(Outcome::ok(report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_table_alignment() {
        let t = table(&["a", "bb"], &[vec!["xyz".into(), "1".into()]]);
        assert_eq!(t, "a    bb\nxyz  1\n");
    }
}
