use super::{trace_records, FrobeniusError, TraceRecord};
use crate::curves::CurveSpec;
use std::fs;
use std::path::{Path, PathBuf};

/// CSV files of trace records, one per curve and bound, named
/// `<id>-<bound>.csv` with header `p,ap,method`.
///
/// Files are written to a temporary name and renamed into place, so a
/// reader never sees a partial file. Only one process should write to a
/// directory at a time.
#[derive(Debug, Clone)]
pub struct TraceCache {
    dir: PathBuf,
}

fn cache_err(e: impl std::fmt::Display) -> FrobeniusError {
    FrobeniusError::Cache(e.to_string())
}

impl TraceCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, curve: &CurveSpec, bound: u64) -> PathBuf {
        self.dir.join(format!("{}-{}.csv", curve.id, bound))
    }

    /// Smallest cached bound `>= x` for this curve.
    fn covering(&self, curve: &CurveSpec, x: u64) -> Option<PathBuf> {
        let prefix = format!("{}-", curve.id);
        let entries = fs::read_dir(&self.dir).ok()?;
        entries
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                let bound: u64 = name.strip_prefix(&prefix)?.strip_suffix(".csv")?.parse().ok()?;
                (bound >= x).then_some((bound, e.path()))
            })
            .min_by_key(|(b, _)| *b)
            .map(|(_, p)| p)
    }

    /// Records with `p <= x`, if some cached file covers `x`.
    pub fn load(&self, curve: &CurveSpec, x: u64) -> Result<Option<Vec<TraceRecord>>, FrobeniusError> {
        let Some(path) = self.covering(curve, x) else {
            return Ok(None);
        };
        let mut reader = csv::Reader::from_path(&path).map_err(cache_err)?;
        let mut out = Vec::new();
        for row in reader.deserialize() {
            let rec: TraceRecord = row.map_err(cache_err)?;
            if rec.p > x {
                break;
            }
            out.push(rec);
        }
        Ok(Some(out))
    }

    pub fn store(&self, curve: &CurveSpec, bound: u64, records: &[TraceRecord]) -> Result<PathBuf, FrobeniusError> {
        fs::create_dir_all(&self.dir).map_err(cache_err)?;
        let path = self.path(curve, bound);
        let tmp = path.with_extension(format!("csv.tmp{}", std::process::id()));
        {
            let mut w = csv::Writer::from_path(&tmp).map_err(cache_err)?;
            for r in records {
                w.serialize(r).map_err(cache_err)?;
            }
            w.flush().map_err(cache_err)?;
        }
        fs::rename(&tmp, &path).map_err(cache_err)?;
        Ok(path)
    }

    /// Cached records up to `x`, computing and storing them on a miss.
    pub fn records(&self, curve: &CurveSpec, x: u64, seed: u64) -> Result<Vec<TraceRecord>, FrobeniusError> {
        if let Some(recs) = self.load(curve, x)? {
            return Ok(recs);
        }
        let recs = trace_records(curve, x, seed)?;
        self.store(curve, x, &recs)?;
        Ok(recs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::lookup;

    #[test]
    fn roundtrip_and_prefix_loading() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TraceCache::new(dir.path());
        let e = lookup("E5").unwrap();
        assert!(cache.load(e, 1000).unwrap().is_none());
        let full = cache.records(e, 5000, 1).unwrap();
        let text = fs::read_to_string(cache.path(e, 5000)).unwrap();
        assert!(text.starts_with("p,ap,method\n5,"));
        let part = cache.load(e, 1000).unwrap().unwrap();
        assert_eq!(part, full.iter().copied().filter(|r| r.p <= 1000).collect::<Vec<_>>());
        assert!(cache.load(e, 6000).unwrap().is_none());
        assert!(cache.load(lookup("E6").unwrap(), 10).unwrap().is_none());
    }
}
