use crate::error::CliError;
use lang_trotter::arith::jacobi;
use lang_trotter::constants::{xi, xi_d, GDecomposition};
use lang_trotter::curves::lookup;
use lang_trotter::galois::{build_group, parity_kappas};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// The published table, one row per curve.
pub const STORED: &str = "\
curve,D,m_e,kappa_odd,kappa_even,sym_2r_d,xi_odd,xi_even,xi_d
E3,7,28,0,1/6,1,0,1,1
E4,11,44,1/15,1/30,1,2,1,1
E5,19,76,1/27,1/54,1,2,1,1
E6,43,172,1/63,1/126,1,2,1,1
E7,67,268,1/99,1/198,1,2,1,1
E8,163,652,1/243,1/486,1,2,1,1
";

pub const COLUMNS: [&str; 8] = ["D", "m_e", "kappa_odd", "kappa_even", "sym_2r_d", "xi_odd", "xi_even", "xi_d"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub curve: String,
    #[serde(rename = "D")]
    pub d: String,
    pub m_e: String,
    pub kappa_odd: String,
    pub kappa_even: String,
    pub sym_2r_d: String,
    pub xi_odd: String,
    pub xi_even: String,
    pub xi_d: String,
}

impl Row {
    pub fn get(&self, column: &str) -> &str {
        match column {
            "D" => &self.d,
            "m_e" => &self.m_e,
            "kappa_odd" => &self.kappa_odd,
            "kappa_even" => &self.kappa_even,
            "sym_2r_d" => &self.sym_2r_d,
            "xi_odd" => &self.xi_odd,
            "xi_even" => &self.xi_even,
            "xi_d" => &self.xi_d,
            _ => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub curve: String,
    pub column: String,
    pub expected: String,
    pub found: String,
}

pub fn parse_stored(text: &str) -> Result<Vec<Row>, CliError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<Row>, _>>()
        .map_err(|e| CliError::Usage(format!("stored table: {e}")))
}

/// Joins the distinct values of a column entry; a single value prints as itself.
fn joined<T: ToString + Ord>(values: BTreeSet<T>) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join("|")
}

fn live_row(id: &str) -> Result<Row, CliError> {
    let curve = lookup(id).ok_or_else(|| CliError::run(format!("{id} missing from registry")))?;
    let model = build_group(curve).map_err(CliError::run)?;
    let (odd, even) = parity_kappas(&model);
    let kappa = |k: Option<_>| k.map_or("mixed".to_string(), |k: lang_trotter::galois::Kappa| k.to_string());
    let d = curve.d as i64;
    let g = GDecomposition::new(curve.d, 1).map_err(CliError::run)?;
    let gamma: Vec<i64> = model.gamma().residues.iter().map(|&r| r as i64).filter(|r| r % d != 0).collect();
    let sym: BTreeSet<i32> = gamma.iter().map(|&r| jacobi(2 * r, curve.d as u64)).collect();
    let xid: BTreeSet<_> = gamma.iter().map(|&r| xi_d(&g, r)).collect();
    Ok(Row {
        curve: curve.id.to_string(),
        d: curve.d.to_string(),
        m_e: model.modulus().to_string(),
        kappa_odd: kappa(odd),
        kappa_even: kappa(even),
        sym_2r_d: joined(sym),
        xi_odd: xi(curve.d, 1).to_string(),
        xi_even: xi(curve.d, 2).to_string(),
        xi_d: joined(xid),
    })
}

/// Live rows for E3..E8 from the Galois models and the closed formulas.
pub fn live_rows() -> Result<Vec<Row>, CliError> {
    ["E3", "E4", "E5", "E6", "E7", "E8"].iter().map(|id| live_row(id)).collect()
}

pub fn diff(live: &[Row], stored: &[Row]) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for row in live {
        let Some(want) = stored.iter().find(|s| s.curve == row.curve) else {
            out.push(Mismatch {
                curve: row.curve.clone(),
                column: "curve".into(),
                expected: "(missing)".into(),
                found: row.curve.clone(),
            });
            continue;
        };
        for col in COLUMNS {
            if want.get(col).trim() != row.get(col) {
                out.push(Mismatch {
                    curve: row.curve.clone(),
                    column: col.into(),
                    expected: want.get(col).trim().into(),
                    found: row.get(col).into(),
                });
            }
        }
    }
    for s in stored.iter().filter(|s| !live.iter().any(|l| l.curve == s.curve)) {
        out.push(Mismatch {
            curve: s.curve.clone(),
            column: "curve".into(),
            expected: s.curve.clone(),
            found: "(missing)".into(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_table_parses() {
        let rows = parse_stored(STORED).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[5].kappa_even, "1/486");
    }

    #[test]
    fn diff_reports_each_cell() {
        let stored = parse_stored(STORED).unwrap();
        let mut live = stored.clone();
        assert!(diff(&live, &stored).is_empty());
        live[0].kappa_even = "1/7".into();
        live.pop();
        let d = diff(&live, &stored);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].column, "kappa_even");
        assert_eq!(d[1].curve, "E8");
    }
}
