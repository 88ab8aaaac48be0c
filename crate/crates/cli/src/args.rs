use crate::error::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use lang_trotter::constants::{Mode, DEFAULT_BOUND, MAX_BOUND, MIN_BOUND};
use lang_trotter::curves::{lookup, registry, CurveSpec};
use lang_trotter::frobenius::{COUNT_CEILING, DEFAULT_SEED};
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

const DEFAULT_TOL: f64 = 1e-6;
const DEFAULT_X: u64 = 1_000_000;
const DEFAULT_R: &str = "-50..50";

#[derive(Debug, Parser)]
#[command(name = "lang-trotter", version, about = "Lang-Trotter and Hardy-Littlewood constants for CM elliptic curves")]
pub struct Cli {
    /// File of `key = value` lines; flags on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Constants,
    Verify,
    Count,
    Table1,
    Registry,
    Group,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print omega_bar and C side by side.
    Constants(Opts),
    /// Check omega_bar = C; exit 1 on any FAIL.
    Verify(Opts),
    /// Count primes with a_p = r and compare with C sqrt(x)/log x.
    Count(Opts),
    /// Reproduce the kappa table for E3..E8 and diff it against the stored values.
    Table1(Opts),
    /// List the registered curves.
    Registry(Opts),
    /// Show the Galois model of one curve.
    Group(Opts),
}

impl Command {
    pub fn split(self) -> (CommandKind, Opts) {
        match self {
            Command::Constants(o) => (CommandKind::Constants, o),
            Command::Verify(o) => (CommandKind::Verify, o),
            Command::Count(o) => (CommandKind::Count, o),
            Command::Table1(o) => (CommandKind::Table1, o),
            Command::Registry(o) => (CommandKind::Registry, o),
            Command::Group(o) => (CommandKind::Group, o),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Direct,
    Accelerated,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Direct => Mode::Direct,
            ModeArg::Accelerated => Mode::Accelerated,
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct Opts {
    /// Curve id (repeatable or comma separated), e.g. E1, E2s.
    #[arg(long, value_delimiter = ',')]
    pub curve: Vec<String>,
    /// Select all 20 registered curves.
    #[arg(long)]
    pub all: bool,
    /// Traces: `a..b` (inclusive, 0 skipped), a comma list, or a single value.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    /// Counting bound, e.g. 1e6.
    #[arg(long)]
    pub x: Option<String>,
    /// Euler product truncation bound.
    #[arg(long)]
    pub bound: Option<String>,
    /// Relative tolerance for verify.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Directory for cached Frobenius traces.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Seed for point sampling in trace disambiguation.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also count primes represented by the trace polynomial.
    #[arg(long)]
    pub with_poly: bool,
    /// First m used by the polynomial count.
    #[arg(long, allow_hyphen_values = true)]
    pub m_start: Option<i64>,
    /// Replacement for the stored table (CSV), used by table1.
    #[arg(long, hide = true)]
    pub expected: Option<PathBuf>,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub curves: Vec<&'static CurveSpec>,
    pub rs: Vec<i64>,
    pub x: u64,
    pub bound: u64,
    pub tol: f64,
    pub mode: Mode,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub seed: u64,
    pub with_poly: bool,
    pub m_start: i64,
    pub expected: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Integer that may be written in scientific notation (`1e6`).
pub fn parse_count(s: &str) -> Result<u64, CliError> {
    let t = s.trim().replace('_', "");
    if let Ok(n) = t.parse::<u64>() {
        return Ok(n);
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v < u64::MAX as f64 => Ok(v as u64),
        _ => Err(usage(format!("not a non-negative integer: {s}"))),
    }
}

fn parse_trace(s: &str) -> Result<i64, CliError> {
    s.trim().parse().map_err(|_| usage(format!("not an integer trace: {s}")))
}

/// Expands an r selector into a sorted set of nonzero traces.
pub fn parse_rs(s: &str) -> Result<Vec<i64>, CliError> {
    let mut out = BTreeSet::new();
    for piece in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = piece.split_once("..") {
            let (a, b) = (parse_trace(a)?, parse_trace(b.trim_start_matches('='))?);
            if a > b {
                return Err(usage(format!("empty range {piece}")));
            }
            out.extend((a..=b).filter(|&r| r != 0));
        } else {
            let r = parse_trace(piece)?;
            if r == 0 {
                return Err(usage("r = 0 is not a valid trace"));
            }
            out.insert(r);
        }
    }
    if out.is_empty() {
        return Err(usage(format!("no traces selected by {s:?}")));
    }
    Ok(out.into_iter().collect())
}

/// Reads `key = value` lines; `#` starts a comment, values may be quoted.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key = value", n + 1)))?;
        let key = k.trim().replace('_', "-");
        let value = v.trim().trim_matches('"').to_string();
        if !KEYS.contains(&key.as_str()) {
            return Err(usage(format!("config line {}: unknown key {key}", n + 1)));
        }
        map.insert(key, value);
    }
    Ok(map)
}

const KEYS: [&str; 12] =
    ["curve", "all", "r", "x", "bound", "tol", "mode", "format", "cache-dir", "seed", "with-poly", "m-start"];

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(usage(format!("{key}: expected true or false, got {v}"))),
    }
}

fn parse_enum<T: ValueEnum>(key: &str, v: &str) -> Result<T, CliError> {
    T::from_str(v, true).map_err(|_| usage(format!("{key}: invalid value {v}")))
}

fn resolve_curves(ids: &[String], all: bool, needed: bool) -> Result<Vec<&'static CurveSpec>, CliError> {
    if all && !ids.is_empty() {
        return Err(usage("--curve and --all are mutually exclusive"));
    }
    if all {
        return Ok(registry().iter().collect());
    }
    if ids.is_empty() && needed {
        return Err(usage("select curves with --curve <id> or --all"));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for id in ids {
        let curve = lookup(id.trim()).ok_or_else(|| usage(format!("unknown curve {id}")))?;
        if seen.insert(curve.id) {
            out.push(curve);
        }
    }
    Ok(out)
}

impl RunConfig {
    pub fn resolve(command: CommandKind, opts: Opts, file: BTreeMap<String, String>) -> Result<Self, CliError> {
        let get = |k: &str| file.get(k).map(String::as_str);
        let tol = match (opts.tol, get("tol")) {
            (Some(t), _) => t,
            (None, Some(s)) => s.parse().map_err(|_| usage(format!("tol: not a number: {s}")))?,
            (None, None) => DEFAULT_TOL,
        };
        if !(tol.is_finite() && tol > 0.0) {
            return Err(usage(format!("--tol must be positive, got {tol}")));
        }
        let file_curves: Vec<String> = get("curve")
            .map(|v| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
            .unwrap_or_default();
        let (ids, all) = if opts.all || !opts.curve.is_empty() {
            (opts.curve, opts.all)
        } else {
            (file_curves, get("all").map(|v| parse_bool("all", v)).transpose()?.unwrap_or(false))
        };
        let needed = matches!(command, CommandKind::Constants | CommandKind::Verify | CommandKind::Count | CommandKind::Group);
        let curves = resolve_curves(&ids, all, needed)?;
        if command == CommandKind::Group && curves.len() != 1 {
            return Err(usage("group takes exactly one --curve"));
        }

        let rs = parse_rs(opts.r.as_deref().or(get("r")).unwrap_or(DEFAULT_R))?;
        let x = match opts.x.as_deref().or(get("x")) {
            Some(s) => parse_count(s)?,
            None => DEFAULT_X,
        };
        if x > COUNT_CEILING {
            return Err(usage(format!("--x {x} exceeds the ceiling {COUNT_CEILING}")));
        }
        let bound = match opts.bound.as_deref().or(get("bound")) {
            Some(s) => parse_count(s)?,
            None => DEFAULT_BOUND,
        };
        if !(MIN_BOUND..=MAX_BOUND).contains(&bound) {
            return Err(usage(format!("--bound must lie in [{MIN_BOUND}, {MAX_BOUND}], got {bound}")));
        }
        let mode = match (opts.mode, get("mode")) {
            (Some(m), _) => m,
            (None, Some(s)) => parse_enum("mode", s)?,
            (None, None) => ModeArg::Accelerated,
        };
        let format = match (opts.format, get("format")) {
            (Some(f), _) => f,
            (None, Some(s)) => parse_enum("format", s)?,
            (None, None) => Format::Text,
        };
        let seed = match (opts.seed, get("seed")) {
            (Some(s), _) => s,
            (None, Some(s)) => s.parse().map_err(|_| usage(format!("seed: not an integer: {s}")))?,
            (None, None) => DEFAULT_SEED,
        };
        let m_start = match (opts.m_start, get("m-start")) {
            (Some(m), _) => m,
            (None, Some(s)) => s.parse().map_err(|_| usage(format!("m-start: not an integer: {s}")))?,
            (None, None) => 1,
        };
        let with_poly = opts.with_poly || get("with-poly").map(|v| parse_bool("with-poly", v)).transpose()?.unwrap_or(false);
        let cache_dir = opts.cache_dir.or_else(|| get("cache-dir").map(PathBuf::from));

        Ok(Self {
            command,
            curves,
            rs,
            x,
            bound,
            tol,
            mode: mode.into(),
            format,
            cache_dir,
            seed,
            with_poly,
            m_start,
            expected: opts.expected,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_selectors() {
        assert_eq!(parse_rs("-10..10").unwrap().len(), 20);
        assert_eq!(parse_rs("-3..-1").unwrap(), vec![-3, -2, -1]);
        assert_eq!(parse_rs("2,4,-6").unwrap(), vec![-6, 2, 4]);
        assert_eq!(parse_rs("1..=3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_rs("7").unwrap(), vec![7]);
        assert!(parse_rs("0").is_err());
        assert!(parse_rs("5..1").is_err());
        assert!(parse_rs("a").is_err());
    }

    #[test]
    fn counts_accept_scientific_notation() {
        assert_eq!(parse_count("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_count("1_000").unwrap(), 1000);
        assert_eq!(parse_count("2.5e3").unwrap(), 2500);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-1").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = BTreeMap::from([
            ("curve".to_string(), "E2".to_string()),
            ("tol".to_string(), "1e-3".to_string()),
            ("r".to_string(), "2".to_string()),
        ]);
        let opts = Opts { tol: Some(1e-9), ..Default::default() };
        let cfg = RunConfig::resolve(CommandKind::Verify, opts, file).unwrap();
        assert_eq!(cfg.curves[0].id, "E2");
        assert_eq!(cfg.tol, 1e-9);
        assert_eq!(cfg.rs, vec![2]);
    }

    #[test]
    fn invalid_settings() {
        let bad = |opts: Opts| RunConfig::resolve(CommandKind::Verify, opts, BTreeMap::new()).is_err();
        let e1 = || vec!["E1".to_string()];
        assert!(bad(Opts { curve: e1(), tol: Some(0.0), ..Default::default() }));
        assert!(bad(Opts { curve: vec!["E9".into()], ..Default::default() }));
        assert!(bad(Opts { curve: e1(), all: true, ..Default::default() }));
        assert!(bad(Opts::default()));
        assert!(bad(Opts { curve: e1(), bound: Some("10".into()), ..Default::default() }));
        assert!(bad(Opts { curve: e1(), x: Some("1e9".into()), ..Default::default() }));
    }
}
