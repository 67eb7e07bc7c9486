//! Command-line driver: rates from Hamiltonian files, entropy curves,
//! parameter scans and the verification suite.

pub mod config;
pub mod curve;
pub mod hamiltonian;
pub mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use purify::micro_rates::{coupling_rates, QuditHamiltonian};
use thiserror::Error;

use config::{Cli, Command, RatesArgs, ScanArgs, ThetaArgs, VerifyArgs};
use curve::{fmt17, CurveConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Compute(purify::Error),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0} verification check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::Validation(_) => 3,
            CliError::Config(_) => 4,
            CliError::Compute(_) | CliError::Io(_) | CliError::ChecksFailed(_) => 1,
        }
    }
}

impl From<purify::Error> for CliError {
    fn from(e: purify::Error) -> Self {
        match e {
            purify::Error::Invariant { .. } | purify::Error::NonEntangling => CliError::Validation(e.to_string()),
            purify::Error::Parameter(_) | purify::Error::Size(_) => CliError::Config(e.to_string()),
            e => CliError::Compute(e),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn output(path: Option<&Path>, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

pub fn run_rates(args: &RatesArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.file.display())))?;
    let (d, m) = hamiltonian::parse_hamiltonian(&text)?;
    let h = if args.real { QuditHamiltonian::new_real(d, m)? } else { QuditHamiltonian::new(d, m)? };
    let r = coupling_rates(&h, args.f)?;
    output(args.out.as_deref(), stdout, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["d", "omega", "gamma", "tumbling", "f", "g"])?;
        let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
        csv.write_record([d.to_string(), fmt17(r.omega), fmt17(r.gamma), fmt17(r.tumbling), opt(r.f), opt(r.g)])?;
        csv.flush()?;
        Ok(())
    })
}

fn curve_config(m: &config::MethodArgs, gamma: f64) -> CurveConfig {
    CurveConfig { method: m.method, boundary: m.boundary.into(), gamma, variant: m.eq69_variant.into() }
}

pub fn run_theta(args: &ThetaArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let times = args.time.grid()?;
    let g = args.g()?;
    let rows = curve::curve(&curve_config(&args.method, args.time.gamma), args.n, g, &times)?;
    output(args.out.as_deref(), stdout, |w| curve::write_csv(&rows, w))
}

pub fn run_scan(args: &ScanArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let times = args.time.grid()?;
    let gs = args.g_grid()?;
    let rows = curve::scan(&curve_config(&args.method, args.time.gamma), &gs, &args.n, &times)?;
    output(args.out.as_deref(), stdout, |w| curve::write_csv(&rows, w))
}

pub fn run_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let checks = verify::run_checks(args.seed, verify::Fault::default())?;
    if verify::report(&checks, stdout)? {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(checks.iter().filter(|c| !c.pass).count()))
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Rates(a) => run_rates(a, stdout),
        Command::Theta(a) => run_theta(a, stdout),
        Command::Scan(a) => run_scan(a, stdout),
        Command::Verify(a) => run_verify(a, stdout),
    }
}
