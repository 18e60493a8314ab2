use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{read_config_file, Command, RunConfig, Settings};
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "mixlab", version, about = "Continued-fraction dynamics of the mixmaster universe")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Evolve a mixmaster universe along a coded geodesic.
    Simulate(Flags),
    /// Leading eigenvalue and pressure of a transfer operator.
    Spectrum(Flags),
    /// Hausdorff dimension of E_N.
    Dimension(Flags),
    /// Lyapunov exponents, spectral and Monte Carlo.
    Lyapunov(Flags),
    /// The Markov partition matrix A_N and its graph.
    Markov(Flags),
    /// Bowen-Franks group and K-theory of A_N.
    Bf(Flags),
    /// KMS admissibility and Gibbs cylinder masses.
    Kms(Flags),
}

/// Every flag is optional; a `--config` file fills the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Plain `key = value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Digit bound, a positive integer or `inf`.
    #[arg(long = "N")]
    pub n: Option<String>,
    /// Inverse temperature; a comma list runs a sweep.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Ulam cylinder depth.
    #[arg(long)]
    pub depth: Option<String>,
    /// Collocation size.
    #[arg(long = "M")]
    pub m: Option<String>,
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub eras: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    /// Digits per Monte Carlo sample.
    #[arg(long)]
    pub length: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Forward endpoint: `golden`, `sqrt2m1`, `(a+b*sqrt(d))/c` or a decimal.
    #[arg(long, conflicts_with = "digits")]
    pub omega: Option<String>,
    /// Backward endpoint, at most -1.
    #[arg(long = "omega-minus", allow_hyphen_values = true)]
    pub omega_minus: Option<String>,
    /// Initial coset label: 0, 1 or inf.
    #[arg(long)]
    pub sheet: Option<String>,
    /// Period of a purely periodic expansion, e.g. `3,1,2`.
    #[arg(long)]
    pub digits: Option<String>,
    /// `ulam` or `collocation`.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Act on the three sheets of [0,1] x P1(F2).
    #[arg(long)]
    pub cosets: bool,
    /// Finite-difference step in beta.
    #[arg(long)]
    pub h: Option<String>,
    /// Word length for cylinder tables.
    #[arg(long)]
    pub level: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    /// json, csv or both.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub threads: Option<String>,
}

impl Flags {
    fn settings(&self) -> Settings {
        let pairs = [
            ("N", &self.n),
            ("beta", &self.beta),
            ("depth", &self.depth),
            ("M", &self.m),
            ("tol", &self.tol),
            ("eras", &self.eras),
            ("samples", &self.samples),
            ("length", &self.length),
            ("seed", &self.seed),
            ("omega", &self.omega),
            ("omega-minus", &self.omega_minus),
            ("sheet", &self.sheet),
            ("digits", &self.digits),
            ("scheme", &self.scheme),
            ("h", &self.h),
            ("level", &self.level),
            ("out", &self.out),
            ("format", &self.format),
            ("threads", &self.threads),
        ];
        let mut s: Settings = pairs.iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect();
        if self.cosets {
            s.insert("cosets".into(), "true".into());
        }
        s
    }
}

/// `Ok(None)` when clap printed help or version.
pub fn parse_args<I, T>(args: I, env_threads: Option<&str>) -> Result<Option<RunConfig>>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(None);
        }
        Err(e) => return Err(Error::Invalid(e.to_string())),
    };
    let (command, flags) = match cli.command {
        Sub::Simulate(f) => (Command::Simulate, f),
        Sub::Spectrum(f) => (Command::Spectrum, f),
        Sub::Dimension(f) => (Command::Dimension, f),
        Sub::Lyapunov(f) => (Command::Lyapunov, f),
        Sub::Markov(f) => (Command::Markov, f),
        Sub::Bf(f) => (Command::Bf, f),
        Sub::Kms(f) => (Command::Kms, f),
    };
    let file = match &flags.config {
        Some(p) => read_config_file(p)?,
        None => Settings::new(),
    };
    RunConfig::resolve(command, &flags.settings(), &file, env_threads).map(Some)
}
