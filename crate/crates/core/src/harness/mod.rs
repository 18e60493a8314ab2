//! The `mixlab` command line: configuration, reports and atomic output.

mod cli;
mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cli::{parse_args, Cli};
pub use config::{parse_config_file, read_config_file, Command, OutputFormat, RunConfig, Settings, KEYS, THREADS_ENV};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit code for an error: 2 validation, 3 non-convergence, 4 inadmissible parameter.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } | Error::Bracket { .. } => 3,
        Error::Inadmissible { .. } => 4,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
        _ => 2,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub artifact: String,
    pub version: String,
    pub config: RunConfig,
    pub config_hash: String,
    pub results: serde_json::Value,
    pub diagnostics: serde_json::Value,
    pub wall_clock_seconds: f64,
}

/// What a command handler produces.
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: serde_json::Value,
    pub diagnostics: serde_json::Value,
    pub files: Vec<OutputFile>,
    pub summary: String,
}

/// Which `--format` settings write a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Json,
    Csv,
    Always,
}

#[derive(Debug)]
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
    pub kind: FileKind,
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn report_path(config: &RunConfig) -> PathBuf {
    config.out.join(format!("{}_report.json", config.command.name()))
}

/// Reads a report back and checks its embedded hash.
pub fn read_report(path: &Path) -> Result<Report> {
    let r: Report = serde_json::from_slice(&std::fs::read(path)?)?;
    if r.config.hash() != r.config_hash {
        return Err(Error::Invalid(format!("{}: config hash mismatch", path.display())));
    }
    Ok(r)
}

/// Runs one configured command, writes its artifacts, and returns the
/// printable summary.
pub fn execute(config: &RunConfig) -> Result<String> {
    if let Some(t) = config.threads {
        // the global pool can be set once per process; later calls keep the first size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let start = Instant::now();
    let outcome = commands::dispatch(config)?;
    let elapsed = start.elapsed().as_secs_f64();
    for f in &outcome.files {
        let wanted = match f.kind {
            FileKind::Json => config.format.json(),
            FileKind::Csv => config.format.csv(),
            FileKind::Always => true,
        };
        if wanted {
            write_atomic(&config.out.join(&f.name), &f.bytes)?;
        }
    }
    if config.format.json() {
        let report = Report {
            artifact: "mixlab".into(),
            version: ARTIFACT_VERSION.into(),
            config: config.clone(),
            config_hash: config.hash(),
            results: outcome.results,
            diagnostics: outcome.diagnostics,
            wall_clock_seconds: elapsed,
        };
        let mut bytes = serde_json::to_vec_pretty(&report)?;
        bytes.push(b'\n');
        write_atomic(&report_path(config), &bytes)?;
    }
    Ok(outcome.summary)
}

/// Parses arguments, runs, prints; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env = std::env::var(THREADS_ENV).ok();
    let config = match parse_args(args, env.as_deref()) {
        Ok(Some(c)) => c,
        Ok(None) => return 0,
        Err(e) => {
            eprintln!("mixlab: {e}");
            return exit_code(&e);
        }
    };
    match execute(&config) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("mixlab {}: {e}", config.command.name());
            exit_code(&e)
        }
    }
}
