//! Cross-method and identity checks behind `purify verify`.

use std::io::Write;

use purify::fock_oracle::{correlation, gaussian_state, random_generator, trace_product};
use purify::gaussian_fermions::{gaussian_overlap, gaussian_product, CorrelationMatrix, CorrelationTheta};
use purify::micro_rates::{coupling_rates, pauli_decompose, random_hamiltonian, split_local_interaction};
use purify::pbc_analytics::{critical_entropy, theta_product, theta_root_product};
use purify::spin_oracle::DenseTheta;
use purify::{Boundary, ChainSpec, Theta};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curve::fmt17;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub tolerance: f64,
    pub observed: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(name: &'static str, tolerance: f64, observed: f64) -> Self {
        CheckResult { name, tolerance, observed, pass: observed <= tolerance }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: observed {} (tolerance {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            fmt17(self.observed),
            fmt17(self.tolerance)
        )
    }
}

/// Deliberate perturbations for testing the checks themselves.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Fault {
    /// Relative perturbation applied to the momentum-product ln Θ.
    pub product: f64,
}

const GRID_N: [usize; 3] = [4, 6, 8];
const GRID_G: [f64; 4] = [0.3, 0.5, 1.0, 2.0];
const GRID_T: [f64; 4] = [0.5, 2.0, 5.0, 20.0];

fn max_over_grid(boundary: Boundary, mut f: impl FnMut(&ChainSpec, &DenseTheta, f64) -> Result<f64, CliError>) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for n in GRID_N {
        for g in GRID_G {
            let spec = ChainSpec::new(n, g, boundary)?;
            let dense = DenseTheta::new(&spec)?;
            for t in GRID_T {
                let err = f(&spec, &dense, t)?;
                worst = if err.is_nan() { f64::INFINITY } else { worst.max(err) };
            }
        }
    }
    Ok(worst)
}

/// Every check, collected rather than stopping at the first failure.
pub fn run_checks(seed: u64, fault: Fault) -> Result<Vec<CheckResult>, CliError> {
    let mut out = Vec::new();

    let e = max_over_grid(Boundary::Periodic, |s, d, t| {
        let p = theta_product(s.n, s.g, t)? * (1.0 + fault.product);
        Ok((p - d.log_theta(t)).abs())
    })?;
    out.push(CheckResult::new("product vs dense (periodic)", 1e-8, e));

    let e = max_over_grid(Boundary::Periodic, |s, _, t| {
        Ok((theta_root_product(s.n, s.g, t)?.log_theta() - theta_product(s.n, s.g, t)?).abs())
    })?;
    out.push(CheckResult::new("root product vs momentum product", 1e-8, e));

    let e = max_over_grid(Boundary::Open, |s, d, t| {
        Ok((CorrelationTheta::new(s)?.log_theta(t)? - d.log_theta(t)).abs())
    })?;
    out.push(CheckResult::new("correlation vs dense (open)", 1e-8, e));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for d in 2..=3 {
        let df = d as f64;
        let pre = df.powi(4) / (df * df - 1.0).powi(2);
        for _ in 0..20 {
            let h = random_hamiltonian(d, false, &mut rng).traceless_part();
            let r = coupling_rates(&h, None)?;
            let (loc, int) = split_local_interaction(&pauli_decompose(&h));
            worst = worst
                .max((r.gamma / 2.0 - pre * int.norm_sqr()).abs() / (r.gamma / 2.0))
                .max((r.tumbling - pre * loc.norm_sqr()).abs() / r.tumbling);
        }
    }
    out.push(CheckResult::new("rates vs Pauli norms (random H)", 1e-10, worst));

    let (mut ov, mut prod) = (0.0f64, 0.0f64);
    for n in 1..=3 {
        for _ in 0..10 {
            let r1 = gaussian_state(&random_generator(n, 1.0, &mut rng))?;
            let r2 = gaussian_state(&random_generator(n, 1.0, &mut rng))?;
            let g1 = CorrelationMatrix::new(correlation(&r1)?)?;
            let g2 = CorrelationMatrix::new(correlation(&r2)?)?;
            ov = ov.max((gaussian_overlap(&g1, &g2)? - trace_product(&r1, &r2).ln()).abs());
            prod = prod.max((gaussian_product(&g1, &g2)?.matrix - correlation(&(&r1 * &r2))?).amax());
        }
    }
    out.push(CheckResult::new("Gaussian overlap vs Fock space", 1e-10, ov));
    out.push(CheckResult::new("Gaussian product vs Fock space", 1e-10, prod));

    let mut worst = 0.0f64;
    for &th in &[1e-6, 0.1, 0.5, 0.9, 0.999] {
        let s = Theta::from_value(th)?.entropy();
        worst = worst.max((s - ((1.0 + th) / (1.0 - th)).ln()).abs());
    }
    out.push(CheckResult::new("entropy map", 1e-12, worst));

    let mut worst = 0.0f64;
    for t in [10.0, 20.0, 40.0] {
        let c = critical_entropy(400, t)?;
        worst = worst.max((c.exact * (2.0 * t + 1.0) / (400.0 * std::f64::consts::PI) - 1.0).abs());
    }
    out.push(CheckResult::new("critical intermediate form", 0.05, worst));

    Ok(out)
}

/// Prints one line per check and a summary; true when all pass.
pub fn report<W: Write>(checks: &[CheckResult], mut out: W) -> Result<bool, CliError> {
    for c in checks {
        writeln!(out, "{}", c.line())?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    writeln!(out, "{} checks, {} failed", checks.len(), failed)?;
    Ok(failed == 0)
}
