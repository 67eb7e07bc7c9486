//! The order parameter Θ ∈ [0, 1] and its Rényi-2 entropy
//! S = log((1+Θ)/(1−Θ)).
//!
//! Θ is stored as `ℓ = ln(−ln Θ)`. Near the mixed-phase plateau Θ is
//! within 1e−20 (or far less) of one, so neither Θ nor ln Θ survives in
//! double precision while ℓ does.

use crate::error::{Error, Result};

/// Θ stored as ln(−ln Θ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta {
    ln_neg_ln: f64,
}

impl Theta {
    /// Θ = 1.
    pub const ONE: Theta = Theta { ln_neg_ln: f64::NEG_INFINITY };
    /// Θ = 0.
    pub const ZERO: Theta = Theta { ln_neg_ln: f64::INFINITY };

    pub fn from_ln_neg_ln(ln_neg_ln: f64) -> Result<Self> {
        if ln_neg_ln.is_nan() {
            return Err(Error::Domain("ln(-ln theta) is NaN".into()));
        }
        Ok(Theta { ln_neg_ln })
    }

    /// From ln Θ, which must be ≤ 0.
    pub fn from_log(log_theta: f64) -> Result<Self> {
        if log_theta.is_nan() || log_theta > 0.0 {
            return Err(Error::Domain(format!("log theta = {log_theta} is not <= 0")));
        }
        Ok(Theta { ln_neg_ln: (-log_theta).ln() })
    }

    /// Like [`Theta::from_log`], but clamps positive roundoff (up to `tol`)
    /// to Θ = 1.
    pub fn from_log_clamped(log_theta: f64, tol: f64) -> Result<Self> {
        if log_theta > 0.0 && log_theta <= tol {
            return Ok(Theta::ONE);
        }
        Self::from_log(log_theta)
    }

    pub fn from_value(theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::Domain(format!("theta = {theta} outside [0, 1]")));
        }
        Ok(Theta { ln_neg_ln: (-theta.ln()).ln() })
    }

    /// Inverse of the entropy map: Θ = tanh(S/2).
    pub fn from_entropy(s: f64) -> Result<Self> {
        if s.is_nan() || s < 0.0 {
            return Err(Error::Domain(format!("entropy {s} is negative")));
        }
        if s > 40.0 {
            // ln coth(S/2) ≈ 2e^{−S}
            return Ok(Theta { ln_neg_ln: std::f64::consts::LN_2 - s });
        }
        if s < 1.0 {
            return Ok(Theta { ln_neg_ln: (-(0.5 * s).tanh().ln()).ln() });
        }
        // −ln tanh(S/2) = −ln1p(−2e^{−S}/(1 + e^{−S}))
        let e = (-s).exp();
        Ok(Theta { ln_neg_ln: (-(-2.0 * e / (1.0 + e)).ln_1p()).ln() })
    }

    pub fn ln_neg_ln(&self) -> f64 {
        self.ln_neg_ln
    }

    /// −ln Θ.
    pub fn neg_log(&self) -> f64 {
        self.ln_neg_ln.exp()
    }

    pub fn log_theta(&self) -> f64 {
        -self.neg_log()
    }

    pub fn value(&self) -> f64 {
        (-self.neg_log()).exp()
    }

    pub fn entropy(&self) -> f64 {
        entropy_from_ln_neg_ln(self.ln_neg_ln)
    }
}

/// S = log((1+Θ)/(1−Θ)) = ln coth(x/2) with x = −ln Θ = e^ℓ.
fn entropy_from_ln_neg_ln(l: f64) -> f64 {
    if l == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let x = l.exp();
    if x < 1e-8 {
        // coth(x/2) = 2/x + x/6 + ...
        return std::f64::consts::LN_2 - l + x * x / 12.0;
    }
    let e = (-x).exp();
    if x > 1.0 {
        e.ln_1p() - (-e).ln_1p()
    } else {
        e.ln_1p() - (-(-x).exp_m1()).ln()
    }
}

/// S̃⁽²⁾ = log((1+Θ)/(1−Θ)) from ln Θ.
pub fn theta_to_entropy(log_theta: f64) -> Result<f64> {
    Ok(Theta::from_log(log_theta)?.entropy())
}

/// Stable ln(eᵃ + eᵇ).
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Stable ln Σ exp(vᵢ).
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
