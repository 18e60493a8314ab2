use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cfrac::CosetPoint;
use crate::error::{Error, Result};
use crate::transfer::{DigitBound, Scheme};

pub const THREADS_ENV: &str = "MIXLAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Simulate,
    Spectrum,
    Dimension,
    Lyapunov,
    Markov,
    Bf,
    Kms,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Spectrum => "spectrum",
            Command::Dimension => "dimension",
            Command::Lyapunov => "lyapunov",
            Command::Markov => "markov",
            Command::Bf => "bf",
            Command::Kms => "kms",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

impl OutputFormat {
    pub fn json(self) -> bool {
        self != OutputFormat::Csv
    }

    pub fn csv(self) -> bool {
        self != OutputFormat::Json
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "both" => Ok(OutputFormat::Both),
            _ => Err(Error::Parse(format!("format must be json, csv or both, got {s:?}"))),
        }
    }
}

/// Raw `key -> value` settings, from flags or from a config file.
pub type Settings = BTreeMap<String, String>;

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<Settings> {
    let mut out = Settings::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected `key = value`", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Parse(format!("config line {}: unknown key {:?}", i + 1, k.trim())));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<Settings> {
    parse_config_file(&std::fs::read_to_string(path)?)
}

pub const KEYS: &[&str] = &[
    "N", "beta", "depth", "M", "tol", "eras", "samples", "length", "seed", "omega", "omega-minus", "sheet", "digits",
    "scheme", "cosets", "h", "level", "out", "format", "threads",
];

/// Fully resolved settings of one run; echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(rename = "N")]
    pub n: Option<DigitBound>,
    pub beta: Vec<f64>,
    pub depth: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub tol: Option<f64>,
    pub eras: Option<usize>,
    pub samples: Option<usize>,
    pub length: Option<usize>,
    pub seed: u64,
    pub omega: Option<String>,
    pub omega_minus: Option<f64>,
    pub sheet: Option<CosetPoint>,
    pub digits: Option<Vec<u64>>,
    pub scheme: Option<Scheme>,
    pub cosets: bool,
    pub h: Option<f64>,
    pub level: Option<usize>,
    pub out: PathBuf,
    pub format: OutputFormat,
    pub threads: Option<usize>,
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Invalid(format!("invalid value for --{key}: {v:?}")))
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').map(|p| parse(key, p)).collect()
}

impl RunConfig {
    /// Merges `flags` over `file`, then `MIXLAB_THREADS` for the thread count.
    pub fn resolve(command: Command, flags: &Settings, file: &Settings, env_threads: Option<&str>) -> Result<Self> {
        let get = |k: &str| flags.get(k).or_else(|| file.get(k)).map(String::as_str);
        let opt = |k: &str| -> Result<Option<usize>> { get(k).map(|v| parse(k, v)).transpose() };
        let optf = |k: &str| -> Result<Option<f64>> { get(k).map(|v| parse(k, v)).transpose() };
        let threads = match get("threads") {
            Some(v) => Some(parse("threads", v)?),
            None => env_threads.map(|v| parse::<usize>(THREADS_ENV, v)).transpose()?,
        };
        let c = RunConfig {
            command,
            n: get("N").map(|v| v.parse().map_err(|e: Error| Error::Invalid(e.to_string()))).transpose()?,
            beta: get("beta").map(|v| list("beta", v)).transpose()?.unwrap_or_default(),
            depth: opt("depth")?,
            m: opt("M")?,
            tol: optf("tol")?,
            eras: opt("eras")?,
            samples: opt("samples")?,
            length: opt("length")?,
            seed: get("seed").map(|v| parse("seed", v)).transpose()?.unwrap_or(0),
            omega: get("omega").map(str::to_string),
            omega_minus: optf("omega-minus")?,
            sheet: get("sheet").map(|v| parse("sheet", v)).transpose()?,
            digits: get("digits").map(|v| list("digits", v)).transpose()?,
            scheme: get("scheme").map(|v| parse("scheme", v)).transpose()?,
            cosets: get("cosets").map(|v| parse("cosets", v)).transpose()?.unwrap_or(false),
            h: optf("h")?,
            level: opt("level")?,
            out: PathBuf::from(get("out").unwrap_or("mixlab-out")),
            format: get("format").map(|v| parse("format", v)).transpose()?.unwrap_or(OutputFormat::Both),
            threads,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(Error::Invalid(format!("--{name} must be positive"))),
            _ => Ok(()),
        };
        positive("tol", self.tol)?;
        positive("h", self.h)?;
        for (name, v) in [("depth", self.depth), ("M", self.m), ("eras", self.eras), ("samples", self.samples), ("threads", self.threads)] {
            if v == Some(0) {
                return Err(Error::Invalid(format!("--{name} must be >= 1")));
            }
        }
        if self.beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::Invalid("--beta must be finite".into()));
        }
        if self.omega.is_some() && self.digits.is_some() {
            return Err(Error::Invalid("give either --omega or --digits, not both".into()));
        }
        Ok(())
    }

    /// SHA-256 of the JSON echo of the settings that affect results
    /// (everything except `out`, `format` and `threads`).
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(m) = v.as_object_mut() {
            for k in ["out", "format", "threads"] {
                m.remove(k);
            }
        }
        let bytes = serde_json::to_vec(&v).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(pairs: &[(&str, &str)]) -> Settings {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn flags_override_file_and_env_is_a_fallback() {
        let file = parse_config_file("# run\nN = 3\nbeta = 1.5, 2\nthreads = 2\nseed=9\n").unwrap();
        let flags = settings(&[("N", "5")]);
        let c = RunConfig::resolve(Command::Spectrum, &flags, &file, Some("7")).unwrap();
        assert_eq!(c.n, Some(DigitBound::Finite(5)));
        assert_eq!(c.beta, vec![1.5, 2.0]);
        assert_eq!(c.threads, Some(2));
        assert_eq!(c.seed, 9);
        let c = RunConfig::resolve(Command::Spectrum, &Settings::new(), &Settings::new(), Some("7")).unwrap();
        assert_eq!(c.threads, Some(7));
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(parse_config_file("N 3").is_err());
        assert!(parse_config_file("colour = red").is_err());
        let none = Settings::new();
        for bad in [("tol", "-1"), ("N", "zero"), ("depth", "0"), ("format", "xml"), ("sheet", "2")] {
            assert!(RunConfig::resolve(Command::Bf, &settings(&[bad]), &none, None).is_err(), "{bad:?}");
        }
        let both = settings(&[("omega", "golden"), ("digits", "1,2")]);
        assert!(RunConfig::resolve(Command::Simulate, &both, &none, None).is_err());
    }

    #[test]
    fn hash_round_trips() {
        let c = RunConfig::resolve(Command::Kms, &settings(&[("beta", "1.2"), ("N", "2")]), &Settings::new(), None).unwrap();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back.hash(), c.hash());
        assert_eq!(c.hash().len(), 64);
    }
}
