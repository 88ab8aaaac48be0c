use super::{FrobeniusError, TraceEngine, TraceRecord};
use crate::arith::sieve;
use crate::curves::CurveSpec;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Largest `x` accepted by the counting functions.
pub const COUNT_CEILING: u64 = 100_000_000;

const CHUNK: usize = 8192;

/// `pi_{E,r}(x)`: good primes `p <= x` with `a_p = r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountResult {
    pub x: u64,
    pub r: i64,
    pub count: u64,
    pub excluded: Vec<u64>,
}

fn check_bound(x: u64) -> Result<(), FrobeniusError> {
    if x > COUNT_CEILING {
        return Err(FrobeniusError::BoundTooLarge { x, ceiling: COUNT_CEILING });
    }
    Ok(())
}

fn good_and_bad(curve: &CurveSpec, x: u64) -> Result<(Vec<u32>, Vec<u64>), FrobeniusError> {
    if x < 2 {
        return Ok((Vec::new(), Vec::new()));
    }
    let table = sieve(x).map_err(|e| FrobeniusError::Cache(e.to_string()))?;
    let (bad, good): (Vec<u32>, Vec<u32>) =
        table.primes().iter().partition(|&&p| curve.is_bad(p as u64));
    Ok((good, bad.into_iter().map(u64::from).collect()))
}

/// Every good prime `p <= x` with its trace, sorted by `p`.
pub fn trace_records(curve: &CurveSpec, x: u64, seed: u64) -> Result<Vec<TraceRecord>, FrobeniusError> {
    check_bound(x)?;
    let engine = TraceEngine::new(curve, seed)?;
    let (good, _) = good_and_bad(curve, x)?;
    let chunks: Vec<Result<Vec<TraceRecord>, FrobeniusError>> = good
        .par_chunks(CHUNK)
        .map(|chunk| chunk.iter().map(|&p| engine.record(p as u64)).collect())
        .collect();
    let mut out = Vec::with_capacity(good.len());
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Counts `a_p = r` for every `r` in `targets` in one pass over the primes.
pub fn count_traces(
    curve: &CurveSpec,
    x: u64,
    targets: &[i64],
    seed: u64,
) -> Result<BTreeMap<i64, CountResult>, FrobeniusError> {
    check_bound(x)?;
    let engine = TraceEngine::new(curve, seed)?;
    let (good, excluded) = good_and_bad(curve, x)?;
    let partial: Vec<Result<Vec<u64>, FrobeniusError>> = good
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut counts = vec![0u64; targets.len()];
            for &p in chunk {
                let ap = engine.record(p as u64)?.ap;
                for (slot, &r) in counts.iter_mut().zip(targets) {
                    if ap == r {
                        *slot += 1;
                    }
                }
            }
            Ok(counts)
        })
        .collect();
    let mut totals = vec![0u64; targets.len()];
    for c in partial {
        for (t, v) in totals.iter_mut().zip(c?) {
            *t += v;
        }
    }
    Ok(targets
        .iter()
        .zip(totals)
        .map(|(&r, count)| (r, CountResult { x, r, count, excluded: excluded.clone() }))
        .collect())
}

/// Counting over precomputed records (for instance from a [`super::TraceCache`]).
pub fn count_records(
    curve: &CurveSpec,
    records: &[TraceRecord],
    x: u64,
    targets: &[i64],
) -> BTreeMap<i64, CountResult> {
    let excluded: Vec<u64> = curve_bad_up_to(curve, x);
    targets
        .iter()
        .map(|&r| {
            let count = records.iter().filter(|t| t.p <= x && t.ap == r).count() as u64;
            (r, CountResult { x, r, count, excluded: excluded.clone() })
        })
        .collect()
}

fn curve_bad_up_to(curve: &CurveSpec, x: u64) -> Vec<u64> {
    let mut bad: Vec<u64> = [2u64, 3].into_iter().chain(curve.bad_primes.iter().copied()).collect();
    bad.sort_unstable();
    bad.dedup();
    bad.retain(|&p| p <= x);
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::lookup;

    #[test]
    fn inert_primes_below_one_hundred() {
        let e1 = lookup("E1").unwrap();
        let res = count_traces(e1, 100, &[0], 1).unwrap();
        // 13 primes below 100 are 3 mod 4; p = 3 is always excluded
        assert_eq!(res[&0].count, 12);
        assert_eq!(res[&0].excluded, [2, 3]);
    }

    #[test]
    fn records_and_direct_counts_agree() {
        let e = lookup("E2s").unwrap();
        let recs = trace_records(e, 30_000, 3).unwrap();
        let targets = [-4, 2, 8, 0];
        let direct = count_traces(e, 30_000, &targets, 3).unwrap();
        assert_eq!(count_records(e, &recs, 30_000, &targets), direct);
        assert!(recs.windows(2).all(|w| w[0].p < w[1].p));
    }

    #[test]
    fn ceiling_is_enforced() {
        let e = lookup("E1").unwrap();
        assert!(matches!(
            count_traces(e, COUNT_CEILING + 1, &[2], 0),
            Err(FrobeniusError::BoundTooLarge { .. })
        ));
    }

    #[test]
    fn monotone_in_x() {
        let e = lookup("E4").unwrap();
        let mut last = 0;
        for x in [1_000u64, 5_000, 20_000, 50_000] {
            let c = count_traces(e, x, &[2], 0).unwrap()[&2].count;
            assert!(c >= last);
            last = c;
        }
    }
}
