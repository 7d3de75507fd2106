use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use resampling_lll::domain::{DependencyGraph, FlawId, FlawSet};
use resampling_lll::schema::{load_instance, parse_instance, Instance};
use resampling_lll::LllError;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::{InlineGraph, Output};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Lll(LllError),
    Io(String),
}

impl From<LllError> for CliError {
    fn from(e: LllError) -> Self {
        CliError::Lll(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lll(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => EXIT_INPUT,
            CliError::Lll(e) => match e {
                LllError::Input(_) => EXIT_INPUT,
                LllError::Resource { .. } | LllError::Capability(_) => EXIT_RESOURCE,
                LllError::Contract { .. }
                | LllError::Strategy(_)
                | LllError::Causality(_)
                | LllError::NoCertificate { .. } => EXIT_FAIL,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn input(msg: impl Into<String>) -> CliError {
    CliError::Lll(LllError::input(msg))
}

/// A report wrapped with the tool version, a hash of the configuration and
/// instance bytes, and the seeds used.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub passed: bool,
    pub result: &'a T,
}

pub struct Provenance {
    pub command: &'static str,
    pub config_hash: String,
}

impl Provenance {
    pub fn new<C: Serialize>(command: &'static str, config: &C, instance: Option<&[u8]>) -> Self {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(config).expect("configuration serializes"));
        if let Some(bytes) = instance {
            h.update(bytes);
        }
        Provenance { command, config_hash: format!("{:x}", h.finalize()) }
    }

    pub fn wrap<'a, T: Serialize>(&self, seeds: Vec<u64>, passed: bool, result: &'a T) -> Envelope<'a, T> {
        Envelope {
            tool: "lll",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            config_hash: self.config_hash.clone(),
            seeds,
            passed,
            result,
        }
    }
}

pub fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

pub fn require_json(output: &Output) -> CliResult<()> {
    match output.format {
        crate::args::Format::Json => Ok(()),
        crate::args::Format::Csv => Err(input("csv output is only produced by the run command")),
    }
}

pub fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> CliResult<(Instance, Vec<u8>)> {
    let bytes = read_file(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| input("instance file is not UTF-8"))?;
    let file = parse_instance(text)?;
    Ok((load_instance(&file)?, bytes))
}

/// Parses `a/b`, decimals such as `0.25`, or any float literal, exactly
/// when possible.
pub fn parse_rational(s: &str) -> CliResult<BigRational> {
    let s = s.trim();
    let bad = || input(format!("not a number: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let plain = s.trim_start_matches(['-', '+']);
    if !plain.is_empty() && plain.chars().all(|c| c.is_ascii_digit() || c == '.') && plain.matches('.').count() <= 1 {
        let (int, frac) = plain.split_once('.').unwrap_or((plain, ""));
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let v = BigRational::new(digits, den);
        return Ok(if s.starts_with('-') { -v } else { v });
    }
    let x: f64 = s.parse().map_err(|_| bad())?;
    BigRational::from_float(x).ok_or_else(bad)
}

pub fn parse_rationals(xs: &[String]) -> CliResult<Vec<BigRational>> {
    xs.iter().map(|s| parse_rational(s)).collect()
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn parse_floats(xs: &[String]) -> CliResult<Vec<f64>> {
    Ok(parse_rationals(xs)?.iter().map(to_f64).collect())
}

pub fn inline_graph(g: &InlineGraph) -> CliResult<Option<DependencyGraph>> {
    let Some(n) = g.flaws else {
        if !g.relation.is_empty() {
            return Err(input("--relation needs --flaws"));
        }
        return Ok(None);
    };
    let mut edges = Vec::new();
    for pair in &g.relation {
        let (a, b) = pair.split_once('-').ok_or_else(|| input(format!("relation pair {pair:?} is not f-g")))?;
        let a: usize = a.trim().parse().map_err(|_| input(format!("bad flaw id in {pair:?}")))?;
        let b: usize = b.trim().parse().map_err(|_| input(format!("bad flaw id in {pair:?}")))?;
        edges.push((a, b));
    }
    Ok(Some(DependencyGraph::from_edges(n, &edges)?))
}

/// `-` or the empty string is `∅`; otherwise comma-separated flaw ids.
pub fn parse_flaw_set(s: &str, n: usize) -> CliResult<FlawSet> {
    let s = s.trim();
    if s.is_empty() || s == "-" {
        return Ok(FlawSet::new());
    }
    let mut out = FlawSet::new();
    for part in s.split(',') {
        let f: usize = part.trim().parse().map_err(|_| input(format!("bad flaw id {part:?}")))?;
        if f >= n {
            return Err(input(format!("flaw {f} out of range")));
        }
        out.insert(FlawId(f as u32));
    }
    Ok(out)
}

pub fn parse_flaw_list(s: &str) -> CliResult<Vec<FlawId>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| p.trim().parse::<u32>().map(FlawId).map_err(|_| input(format!("bad flaw id {p:?}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(parse_rational("0.4").unwrap(), r(2, 5));
        assert_eq!(parse_rational("1/3").unwrap(), r(1, 3));
        assert_eq!(parse_rational("-2.5").unwrap(), r(-5, 2));
        assert_eq!(parse_rational("1e-1").unwrap(), BigRational::from_float(0.1).unwrap());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn flaw_sets() {
        assert!(parse_flaw_set("-", 3).unwrap().is_empty());
        assert_eq!(parse_flaw_set("0,2", 3).unwrap().len(), 2);
        assert!(parse_flaw_set("3", 3).is_err());
    }
}
