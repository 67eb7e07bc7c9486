//! Entropy curves and scans.

use std::io::Write;

use purify::gaussian_fermions::CorrelationTheta;
use purify::obc_analytics::{late_time_obc, mixed_asymptote_obc, PrefactorVariant};
use purify::pbc_analytics::{
    critical_entropy, late_time_pbc, mixed_asymptote_pbc, purifying_entropy, theta_product_mp, theta_root_product,
    CriticalRegime,
};
use purify::spin_oracle::DenseTheta;
use purify::{Boundary, ChainSpec, Theta};
use rayon::prelude::*;

use crate::config::{check_method, Method};
use crate::CliError;

pub const HEADER: [&str; 8] = ["method", "boundary", "N", "g", "t", "log_theta", "entropy", "valid"];

/// Largest N for which `auto` uses the dense oracle.
pub const AUTO_DENSE_MAX: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub method: Method,
    pub boundary: Boundary,
    pub n: usize,
    pub g: f64,
    /// In output units.
    pub t: f64,
    pub log_theta: f64,
    pub entropy: f64,
    pub valid: bool,
}

impl Row {
    /// Entropy comes from Θ directly, so it stays finite where ln Θ
    /// underflows f64 (entropy above about 708).
    pub fn new(method: Method, boundary: Boundary, n: usize, g: f64, t: f64, theta: Theta, valid: bool) -> Self {
        Row { method, boundary, n, g, t, log_theta: theta.log_theta() + 0.0, entropy: theta.entropy(), valid }
    }

    pub fn record(&self) -> [String; 8] {
        [
            self.method.as_str().to_string(),
            self.boundary.as_str().to_string(),
            self.n.to_string(),
            fmt17(self.g),
            fmt17(self.t),
            fmt17(self.log_theta),
            fmt17(self.entropy),
            u8::from(self.valid).to_string(),
        ]
    }
}

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Curve parameters shared by `theta` and `scan`.
#[derive(Debug, Clone, Copy)]
pub struct CurveConfig {
    pub method: Method,
    pub boundary: Boundary,
    pub gamma: f64,
    pub variant: PrefactorVariant,
}

enum Exact {
    Dense(Box<DenseTheta>),
    Correlation(Box<CorrelationTheta>),
    Product,
    Roots,
}

impl Exact {
    fn method(&self) -> Method {
        match self {
            Exact::Dense(_) => Method::Dense,
            Exact::Correlation(_) => Method::Correlation,
            Exact::Product => Method::Product,
            Exact::Roots => Method::Roots,
        }
    }

    fn theta(&self, n: usize, g: f64, t: f64) -> Result<Theta, CliError> {
        Ok(match self {
            Exact::Dense(d) => Theta::from_log(d.log_theta(t).min(0.0))?,
            Exact::Correlation(c) => Theta::from_log(c.log_theta(t)?.min(0.0))?,
            Exact::Product => theta_product_mp(n, g, t)?,
            Exact::Roots => theta_root_product(n, g, t)?,
        })
    }
}

/// A closed form for S at dimensionless time t, with its window flag.
/// `None` when no closed form covers (boundary, g).
pub fn asymptotic_entropy(
    boundary: Boundary,
    n: usize,
    g: f64,
    t: f64,
    variant: PrefactorVariant,
) -> Result<Option<(f64, bool)>, CliError> {
    if g == 0.0 || t == 0.0 {
        return Ok(None);
    }
    let nk = -(n as f64) * g.ln();
    Ok(match boundary {
        Boundary::Periodic if g < 1.0 => {
            if t.ln() > nk {
                Some((late_time_pbc(n, g, 1.0, t)?, true))
            } else {
                let a = mixed_asymptote_pbc(n, g, t)?;
                Some((a.entropy, a.valid))
            }
        }
        Boundary::Periodic if g == 1.0 => {
            let c = critical_entropy(n, t)?;
            Some(match c.regime {
                CriticalRegime::Early => (c.early.entropy, true),
                CriticalRegime::Intermediate => (c.intermediate.entropy, true),
                CriticalRegime::Late => (c.late.entropy, true),
                CriticalRegime::Crossover => (c.pochhammer, false),
            })
        }
        Boundary::Periodic => {
            let p = purifying_entropy(n, g, t)?;
            Some((p.entropy, !p.fallback))
        }
        Boundary::Open if g < 1.0 => {
            if t.ln() > nk {
                Some((late_time_obc(n, g, 1.0, t)?, true))
            } else {
                let a = mixed_asymptote_obc(n, g, t, variant)?;
                Some((a.entropy, a.valid))
            }
        }
        Boundary::Open => None,
    })
}

fn asymptotic_row(cfg: &CurveConfig, n: usize, g: f64, t_out: f64) -> Result<Option<Row>, CliError> {
    let Some((s, valid)) = asymptotic_entropy(cfg.boundary, n, g, cfg.gamma * t_out, cfg.variant)? else {
        return Ok(None);
    };
    if !(s >= 0.0) {
        return Ok(None);
    }
    Ok(Some(Row::new(Method::Asymptotic, cfg.boundary, n, g, t_out, Theta::from_entropy(s)?, valid)))
}

/// Rows for one (N, g) over the time grid, sorted by t. `auto` adds a
/// separate asymptotic row at every in-window point.
pub fn curve(cfg: &CurveConfig, n: usize, g: f64, times: &[f64]) -> Result<Vec<Row>, CliError> {
    check_method(cfg.method, cfg.boundary, n, g)?;
    let spec = ChainSpec::new(n, g, cfg.boundary)?;
    let exact = match (cfg.method, cfg.boundary) {
        (Method::Asymptotic, _) => None,
        (Method::Dense, _) => Some(Exact::Dense(Box::new(DenseTheta::new(&spec)?))),
        (Method::Auto, _) if n <= AUTO_DENSE_MAX => Some(Exact::Dense(Box::new(DenseTheta::new(&spec)?))),
        (Method::Correlation | Method::Auto, Boundary::Open) => {
            Some(Exact::Correlation(Box::new(CorrelationTheta::new(&spec)?)))
        }
        (Method::Roots, _) => Some(Exact::Roots),
        _ => Some(Exact::Product),
    };
    let mut rows = Vec::new();
    for &t_out in times {
        let t = cfg.gamma * t_out;
        if let Some(e) = &exact {
            rows.push(Row::new(e.method(), cfg.boundary, n, g, t_out, e.theta(n, g, t)?, true));
        }
        match cfg.method {
            Method::Asymptotic => {
                let row = asymptotic_row(cfg, n, g, t_out)?.ok_or_else(|| {
                    CliError::Config(format!("no closed form gives a non-negative entropy at t = {t_out}"))
                })?;
                rows.push(row);
            }
            Method::Auto => {
                if let Some(row) = asymptotic_row(cfg, n, g, t_out)?.filter(|r| r.valid) {
                    rows.push(row);
                }
            }
            _ => {}
        }
    }
    Ok(rows)
}

/// All (g, N) curves, evaluated in parallel and returned g-major, then
/// N, then t.
pub fn scan(cfg: &CurveConfig, gs: &[f64], ns: &[usize], times: &[f64]) -> Result<Vec<Row>, CliError> {
    for &g in gs {
        for &n in ns {
            check_method(cfg.method, cfg.boundary, n, g)?;
        }
    }
    let points: Vec<(f64, usize)> = gs.iter().flat_map(|&g| ns.iter().map(move |&n| (g, n))).collect();
    let blocks: Vec<Result<Vec<Row>, CliError>> = points.par_iter().map(|&(g, n)| curve(cfg, n, g, times)).collect();
    let mut rows = Vec::new();
    for b in blocks {
        rows.extend(b?);
    }
    Ok(rows)
}
