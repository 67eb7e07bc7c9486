//! Command-line arguments and their validation.

use clap::{Args, Parser, Subcommand, ValueEnum};
use purify::obc_analytics::PrefactorVariant;
use purify::spin_oracle::MAX_DENSE_SITES;
use purify::Boundary;

use crate::CliError;

#[derive(Debug, Clone, Parser)]
#[command(name = "purify", version, about = "Purification dynamics of monitored qudit chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Rates Ω, γ, Γ (and g) of a two-qudit Hamiltonian file.
    Rates(RatesArgs),
    /// Entropy curve S(t) for one chain.
    Theta(ThetaArgs),
    /// Entropy over a (g, N, t) grid, evaluated in parallel.
    Scan(ScanArgs),
    /// Cross-method and identity checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RatesArgs {
    /// Hamiltonian file.
    pub file: std::path::PathBuf,
    /// Measurement rate; adds g = 2f/γ to the output.
    #[arg(long)]
    pub f: Option<f64>,
    /// Require real matrix entries.
    #[arg(long)]
    pub real: bool,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Pbc,
    Obc,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Pbc => Boundary::Periodic,
            BoundaryArg::Obc => Boundary::Open,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Dense,
    Product,
    Roots,
    Correlation,
    Asymptotic,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Dense => "dense",
            Method::Product => "product",
            Method::Roots => "roots",
            Method::Correlation => "correlation",
            Method::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Paper,
    Appendix,
}

impl From<VariantArg> for PrefactorVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Paper => PrefactorVariant::Paper,
            VariantArg::Appendix => PrefactorVariant::Appendix,
        }
    }
}

/// Time grid in output units; evaluation happens at γt.
#[derive(Debug, Clone, Args)]
pub struct TimeArgs {
    #[arg(long, default_value_t = 0.1)]
    pub t_min: f64,
    #[arg(long, default_value_t = 100.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 50)]
    pub t_steps: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    pub t_spacing: Spacing,
    /// Rate γ; time values are given and reported in units where γ is
    /// this value.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
}

impl TimeArgs {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let (lo, hi, n) = (self.t_min, self.t_max, self.t_steps);
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi < lo {
            return Err(CliError::Config(format!("time range [{lo}, {hi}] must satisfy 0 <= t-min <= t-max")));
        }
        if n == 0 {
            return Err(CliError::Config("t-steps must be >= 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(CliError::Config(format!("gamma = {} must be > 0", self.gamma)));
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        let frac = |i: usize| i as f64 / (n - 1) as f64;
        Ok(match self.t_spacing {
            Spacing::Linear => (0..n).map(|i| lo + (hi - lo) * frac(i)).collect(),
            Spacing::Log => {
                if !(lo > 0.0) {
                    return Err(CliError::Config("log spacing needs t-min > 0".into()));
                }
                let mut g: Vec<f64> = (0..n).map(|i| (lo.ln() + (hi / lo).ln() * frac(i)).exp()).collect();
                g[0] = lo;
                g[n - 1] = hi;
                g
            }
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    #[arg(long, value_enum, default_value_t = BoundaryArg::Pbc)]
    pub boundary: BoundaryArg,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Prefactor of the open-chain mixed-phase expression.
    #[arg(long, value_enum, default_value_t = VariantArg::Appendix)]
    pub eq69_variant: VariantArg,
}

#[derive(Debug, Clone, Args)]
pub struct ThetaArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, required_unless_present = "f", conflicts_with = "f")]
    pub g: Option<f64>,
    /// Measurement rate; g = 2f/γ.
    #[arg(long)]
    pub f: Option<f64>,
    #[command(flatten)]
    pub time: TimeArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

impl ThetaArgs {
    pub fn g(&self) -> Result<f64, CliError> {
        let g = match (self.g, self.f) {
            (Some(g), _) => g,
            (None, Some(f)) => 2.0 * f / self.time.gamma,
            (None, None) => return Err(CliError::Config("one of --g or --f is required".into())),
        };
        check_g(g)?;
        Ok(g)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Chain sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long)]
    pub g_min: f64,
    #[arg(long)]
    pub g_max: f64,
    #[arg(long, default_value_t = 11)]
    pub g_steps: usize,
    #[command(flatten)]
    pub time: TimeArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

impl ScanArgs {
    pub fn g_grid(&self) -> Result<Vec<f64>, CliError> {
        let (lo, hi, n) = (self.g_min, self.g_max, self.g_steps);
        if n == 0 || hi < lo {
            return Err(CliError::Config(format!("g range [{lo}, {hi}] with {n} steps is empty")));
        }
        let grid: Vec<f64> = if n == 1 {
            vec![lo]
        } else {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        };
        grid.iter().try_for_each(|&g| check_g(g))?;
        Ok(grid)
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Seed for the randomized draws.
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
}

fn check_g(g: f64) -> Result<(), CliError> {
    if !(g >= 0.0 && g.is_finite()) {
        return Err(CliError::Config(format!("g = {g} must be finite and >= 0")));
    }
    Ok(())
}

/// Method/boundary/size compatibility.
pub fn check_method(method: Method, boundary: Boundary, n: usize, g: f64) -> Result<(), CliError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(CliError::Config(format!("N = {n} must be even and >= 2")));
    }
    let bad = |why: &str| Err(CliError::Config(format!("method {} {why}", method.as_str())));
    match (method, boundary) {
        (Method::Correlation, Boundary::Periodic) => bad("requires --boundary obc"),
        (Method::Product | Method::Roots, Boundary::Open) => bad("requires --boundary pbc"),
        (Method::Dense, _) if n > MAX_DENSE_SITES => bad(&format!("supports N <= {MAX_DENSE_SITES}")),
        (Method::Correlation, _) if n > purify::gaussian_fermions::MAX_CORRELATION_MODES => {
            bad(&format!("supports N <= {}", purify::gaussian_fermions::MAX_CORRELATION_MODES))
        }
        (Method::Asymptotic, _) if g == 0.0 => bad("has no closed form at g = 0"),
        (Method::Asymptotic, Boundary::Open) if g >= 1.0 => bad("has no open-chain closed form for g >= 1"),
        _ => Ok(()),
    }
}
