//! Periodic chains: momentum-sector products, the root-based infinite
//! product, and the closed-form asymptotics of the entropy in the mixed,
//! purifying and critical regimes.
//!
//! All exact paths return a [`Theta`], i.e. ln(−ln Θ), because on the
//! mixed-phase plateau −ln Θ is of order gᴺ.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::gaussian_fermions::Parity;
use crate::roots::{bisect, newton_polish};
use crate::theta::{log_sum_exp, Theta};

/// λ(k) = √(1 + g² − 2g cos k), evaluated as √((1−g)² + 4g sin²(k/2)).
pub fn dispersion(g: f64, k: f64) -> f64 {
    let s = (0.5 * k).sin();
    ((1.0 - g).powi(2) + 4.0 * g * s * s).sqrt()
}

/// 1 − A with A = (1 − g cos k)/λ, without the cancellation at small g.
fn one_minus_a(g: f64, k: f64, lambda: f64) -> f64 {
    let c = 1.0 - g * k.cos();
    if c > 0.0 {
        let s = g * k.sin();
        s * s / (lambda + c) / lambda
    } else {
        (lambda - c) / lambda
    }
}

/// ln θ(k, t) with θ = cosh(λt)[1 + tanh(λt)(1 − g cos k)/λ].
///
/// At λ = 0 (g = 1, k = 0) the limit θ → 1 + (1 − g cos k)t = 1 is used.
pub fn theta_factor(g: f64, k: f64, t: f64) -> f64 {
    let lambda = dispersion(g, k);
    if lambda == 0.0 {
        return ((1.0 - g * k.cos()) * t).ln_1p();
    }
    let b = one_minus_a(g, k, lambda);
    lambda * t + (0.5 * b * (-2.0 * lambda * t).exp_m1()).ln_1p()
}

/// Wavevectors of one parity sector.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub n: usize,
    pub parity: Parity,
    /// k = lπ/N, l odd for even parity, l = 2, 4, .., N−2 for odd parity.
    pub wavevectors: Vec<f64>,
    /// k = 0 and k = π, present only in the odd sector.
    pub special: Vec<f64>,
}

pub fn momentum_grid(n: usize, parity: Parity) -> Result<MomentumGrid> {
    check_n(n)?;
    let step = PI / n as f64;
    let (wavevectors, special) = match parity {
        Parity::Even => ((1..n).step_by(2).map(|l| l as f64 * step).collect(), vec![]),
        Parity::Odd => ((2..n).step_by(2).map(|l| l as f64 * step).collect(), vec![0.0, PI]),
    };
    Ok(MomentumGrid { n, parity, wavevectors, special })
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Parameter(format!("N = {n} must be even and >= 2")));
    }
    Ok(())
}

fn check_gt(g: f64, t: f64) -> Result<()> {
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::Parameter(format!("g = {g} must be finite and >= 0")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Parameter(format!("t = {t} must be finite and >= 0")));
    }
    Ok(())
}

/// ln Θ = t + Σ_{l even} ln θ(lπ/N) − Σ_{l odd} ln θ(lπ/N) in double
/// precision. Accurate in absolute terms only, so positive roundoff is
/// returned as 0; see [`theta_exact_pbc`] for the plateau.
pub fn theta_product(n: usize, g: f64, t: f64) -> Result<f64> {
    check_n(n)?;
    check_gt(g, t)?;
    let odd = momentum_grid(n, Parity::Odd)?;
    let even = momentum_grid(n, Parity::Even)?;
    let num: f64 = odd.wavevectors.iter().map(|&k| theta_factor(g, k, t)).sum();
    let den: f64 = even.wavevectors.iter().map(|&k| theta_factor(g, k, t)).sum();
    Ok((t + num - den).min(0.0))
}

/// The same product in multiple precision, with the working precision
/// raised until the cancellation between sectors is resolved to 64 bits.
pub fn theta_product_mp(n: usize, g: f64, t: f64) -> Result<Theta> {
    check_n(n)?;
    check_gt(g, t)?;
    if g == 0.0 || t == 0.0 {
        return Ok(Theta::ONE);
    }
    let mut bits: u32 = 128;
    loop {
        let (sum, abs_sum) = mp_product(n, g, t, bits);
        // −ln Θ = −sum
        let neg = Float::with_val(bits, -&sum);
        if neg > 0 {
            let need = abs_sum.log2() - Float::with_val(bits, neg.log2_ref()).to_f64() + 64.0;
            if need <= bits as f64 {
                return Theta::from_ln_neg_ln(neg.ln().to_f64());
            }
            bits = ((need + 32.0).ceil().min(65536.0) as u32).max(2 * bits).min(1 << 16);
        } else {
            bits *= 2;
        }
        if bits >= 1 << 16 {
            return Err(Error::Internal(format!(
                "momentum product unresolved at {bits} bits (N = {n}, g = {g}, t = {t})"
            )));
        }
    }
}

fn mp_product(n: usize, g: f64, t: f64, bits: u32) -> (Float, f64) {
    let gf = Float::with_val(bits, g);
    let tf = Float::with_val(bits, t);
    let pi = Float::with_val(bits, Constant::Pi);
    let one = Float::with_val(bits, 1);
    let mut sum = tf.clone();
    let mut abs_sum = t;
    for l in 1..n {
        let k = Float::with_val(bits, &pi * l as u32) / n as u32;
        let half = Float::with_val(bits, &k / 2u32).sin();
        let one_minus_g = Float::with_val(bits, &one - &gf);
        let h2 = Float::with_val(bits, half.square_ref());
        let lam2 = Float::with_val(bits, one_minus_g.square_ref()) + 4u32 * Float::with_val(bits, &gf * &h2);
        let lambda = lam2.sqrt();
        let c = Float::with_val(bits, &one - Float::with_val(bits, &gf * k.clone().cos()));
        let b = if c > 0 {
            let s = Float::with_val(bits, &gf * k.clone().sin());
            let denom = Float::with_val(bits, &lambda + &c) * &lambda;
            Float::with_val(bits, s.square_ref()) / denom
        } else {
            Float::with_val(bits, &lambda - &c) / &lambda
        };
        let lt = Float::with_val(bits, &lambda * &tf);
        let e = Float::with_val(bits, &lt * -2i32).exp_m1();
        let term = lt + (b * e / 2u32).ln_1p();
        abs_sum += term.to_f64().abs();
        if l % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
    }
    (sum, abs_sum)
}

/// Roots x_q of t·ε(x) + φ(x) = π(q + ½), ε = √(2g cosh x − 1 − g²),
/// φ = atan2(g cosh x − 1, ε).
///
/// For g > 1 and t(g² − 1)/2 > 1 the q = 0 entry lies below ln g, where ε
/// is imaginary; it solves tanh(tμ) = μ/(g cosh x − 1) with
/// μ = √(1 + g² − 2g cosh x) instead, and its residual refers to that
/// equation.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub g: f64,
    pub t: f64,
    pub roots: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// The root equation written in δ = x − |ln g| so that roots exponentially
/// close to |ln g| keep full relative precision.
struct RootEquation {
    g: f64,
    t: f64,
    x0: f64,
    above: bool,
}

impl RootEquation {
    fn new(g: f64, t: f64) -> Self {
        RootEquation { g, t, x0: g.ln().abs(), above: g > 1.0 }
    }

    fn g2(&self) -> f64 {
        self.g * self.g
    }

    fn eps2(&self, d: f64) -> f64 {
        if self.above {
            (self.g2() * d.exp() - 1.0) * (-(-d).exp_m1())
        } else {
            d.exp_m1() * (1.0 - self.g2() * (-d).exp())
        }
    }

    /// g cosh x − 1 and g sinh x.
    fn nu_sh(&self, d: f64) -> (f64, f64) {
        let g2 = self.g2();
        if self.above {
            (0.5 * (g2 * d.exp_m1() + (-d).exp_m1() + g2 - 1.0), 0.5 * (g2 * d.exp() - (-d).exp()))
        } else {
            (0.5 * (d.exp_m1() + g2 * (-d).exp_m1() + g2 - 1.0), 0.5 * (d.exp() - g2 * (-d).exp()))
        }
    }

    fn h(&self, d: f64) -> f64 {
        let e = self.eps2(d).max(0.0).sqrt();
        let (nu, _) = self.nu_sh(d);
        self.t * e + nu.atan2(e)
    }

    fn dh(&self, d: f64) -> f64 {
        let e = self.eps2(d).max(0.0).sqrt();
        let (nu, sh) = self.nu_sh(d);
        self.t * sh / e + (e * e - nu) / (e * sh)
    }

    /// Eq. for the root below ln g, in η = ln g − x: positive near η = 0
    /// when tν > 1, negative at η = ln g.
    fn inner(&self, eta: f64) -> f64 {
        let g = self.g;
        let mu2 = -g * (-eta).exp_m1() * (g - eta.exp() / g);
        let mu = mu2.max(0.0).sqrt();
        let nu = 0.5 * (self.g2() * (-eta).exp_m1() + eta.exp_m1() + self.g2() - 1.0);
        (self.t * mu).tanh() * nu - mu
    }

    fn inner_scale(&self, eta: f64) -> f64 {
        let g = self.g;
        (-g * (-eta).exp_m1() * (g - eta.exp() / g)).max(0.0).sqrt().max(f64::MIN_POSITIVE)
    }

    /// The same equation in x: g²sinh²x/(ν+μ) − 2ν/(e^{2tμ}+1), with
    /// μ² = (g − eˣ)(g − e⁻ˣ), ν = g cosh x − 1; returns (value, scale).
    fn inner_x(&self, x: f64) -> (f64, f64) {
        let g = self.g;
        let mu = ((g - x.exp()) * (g - (-x).exp())).max(0.0).sqrt();
        let nu = g * x.cosh() - 1.0;
        let a = (g * x.sinh()).powi(2) / (nu + mu);
        let b = 2.0 * nu / ((2.0 * self.t * mu).exp() + 1.0);
        (a - b, a.max(b).max(f64::MIN_POSITIVE))
    }

    /// (ln x, residual) of the root below ln g. Near x = 0 the root is
    /// located in ln x, since it scales as e^{−t(g−1)}.
    fn solve_inner(&self) -> Result<(f64, f64)> {
        let half = 0.5 * self.x0;
        if self.inner_x(half).0 <= 0.0 {
            let mut lo = 0.5 * half;
            while self.inner(lo) <= 0.0 {
                lo *= 0.5;
                if lo < 1e-300 {
                    return Ok((self.x0.ln(), 0.0));
                }
            }
            let eta = bisect(|e| self.inner(e), lo, half, 1e-15, 0.0)?;
            return Ok(((self.x0 - eta).ln(), self.inner(eta).abs() / self.inner_scale(eta)));
        }
        let u_min = -690.0f64;
        if self.inner_x(u_min.exp()).0 >= 0.0 {
            // f ≈ g²x²/(2(g−1)) − 2(g−1)e^{−2t(g−1)} up to O(x²) corrections
            let gm = self.g - 1.0;
            return Ok(((2.0 * gm / self.g).ln() - self.t * gm, 0.0));
        }
        let f = |u: f64| self.inner_x(u.exp()).0;
        let u = bisect(f, u_min, half.ln(), 1e-15, 0.0)?;
        let (v, scale) = self.inner_x(u.exp());
        Ok((u, v.abs() / scale))
    }

    /// Root of h(δ) = target on [lo, ∞), or `None` when h stays below the
    /// target up to δ = 700.
    fn solve(&self, target: f64, lo: f64) -> Result<Option<f64>> {
        let mut hi = if lo > 0.0 { 2.0 * lo } else { 1.0 };
        while self.h(hi) < target {
            if hi >= 700.0 {
                return Ok(None);
            }
            hi = (2.0 * hi).min(700.0);
        }
        let f = |d: f64| self.h(d) - target;
        let d = bisect(f, lo, hi, 1e-15, 0.0)?;
        Ok(Some(newton_polish(f, |d| self.dh(d), d, lo, hi)))
    }

    /// Lower bracket for the q = 0 root when g > 1 and tν < 1: h starts at
    /// π/2, dips, and then grows.
    fn dip(&self) -> Option<f64> {
        let mut d = 1.0;
        while d > 1e-300 {
            if self.h(d) < FRAC_PI_2 {
                return Some(d);
            }
            d *= 0.5;
        }
        None
    }

    /// Calls `visit(x, ln x, residual)` for q = 0, 1, … until `visit`
    /// returns false, `q_max` roots have been produced, or no further root
    /// exists.
    fn for_each_root(&self, q_max: usize, mut visit: impl FnMut(f64, f64, f64) -> bool) -> Result<()> {
        // at t = 0 the left side stays below π/2
        if self.t == 0.0 {
            return Ok(());
        }
        let mut lo = 0.0;
        let mut q0 = 0;
        let mut produced = 0;
        if self.above && q_max > 0 {
            let nu0 = 0.5 * (self.g2() - 1.0);
            if self.t * nu0 >= 1.0 {
                let (ln_x, res) = self.solve_inner()?;
                produced += 1;
                if !visit(ln_x.exp(), ln_x, res) {
                    return Ok(());
                }
                q0 = 1;
            } else if let Some(dlo) = self.dip() {
                lo = dlo;
            } else {
                produced += 1;
                if !visit(self.x0, self.x0.ln(), 0.0) {
                    return Ok(());
                }
                q0 = 1;
            }
        }
        let mut q = q0;
        while produced < q_max {
            let target = PI * (q as f64 + 0.5);
            let Some(d) = self.solve(target, lo)? else { break };
            let res = (self.h(d) - target).abs() / target.max(1.0);
            if res > 1e-10 {
                return Err(Error::Root(format!(
                    "root q = {q} (g = {}, t = {}) has residual {res:e}",
                    self.g, self.t
                )));
            }
            produced += 1;
            if !visit(self.x0 + d, (self.x0 + d).ln(), res) {
                break;
            }
            lo = d;
            q += 1;
        }
        Ok(())
    }
}

pub fn quantization_roots(g: f64, t: f64, q_max: usize) -> Result<RootSet> {
    check_gt(g, t)?;
    if g == 0.0 {
        return Err(Error::Parameter("g must be > 0 for the root equation".into()));
    }
    let eq = RootEquation::new(g, t);
    let mut roots = Vec::new();
    let mut residuals = Vec::new();
    eq.for_each_root(q_max, |x, _, r| {
        roots.push(x);
        residuals.push(r);
        true
    })?;
    Ok(RootSet { g, t, roots, residuals })
}

/// ln(2 artanh e^{−y}) = ln(−ln tanh(y/2)).
fn ln_neg_ln_tanh_half(y: f64) -> f64 {
    if y > 18.0 {
        let u = (-y).exp();
        LN_2 - y + (u * u / 3.0).ln_1p()
    } else {
        ((-y).exp().ln_1p() - (-(-y).exp_m1()).ln()).ln()
    }
}

/// The same from ln y, for y that may underflow.
fn ln_neg_ln_tanh_half_of_ln(ln_y: f64) -> f64 {
    if ln_y < -20.0 {
        let y = ln_y.exp();
        (LN_2 - ln_y + y * y / 12.0).ln()
    } else {
        ln_neg_ln_tanh_half(ln_y.exp())
    }
}

const ROOT_CAP: usize = 2_000_000;

/// ln Θ = Σ_q ln tanh(N x_q / 2), summed until the next term is below
/// 1e−16 of the accumulated value.
pub fn theta_root_product(n: usize, g: f64, t: f64) -> Result<Theta> {
    check_n(n)?;
    check_gt(g, t)?;
    if g == 0.0 || t == 0.0 {
        return Ok(Theta::ONE);
    }
    let eq = RootEquation::new(g, t);
    let nf = n as f64;
    let mut acc = f64::NEG_INFINITY;
    let mut count = 0usize;
    eq.for_each_root(ROOT_CAP, |_, ln_x, _| {
        let term = ln_neg_ln_tanh_half_of_ln(nf.ln() + ln_x);
        acc = log_sum_exp(&[acc, term]);
        count += 1;
        term >= acc - 37.5
    })?;
    if count >= ROOT_CAP {
        return Err(Error::Internal(format!("root product did not converge in {ROOT_CAP} roots")));
    }
    Theta::from_ln_neg_ln(acc)
}

/// Rough number of roots that contribute to the root product.
fn root_count_estimate(n: usize, g: f64, t: f64) -> f64 {
    let eq = RootEquation::new(g, t);
    eq.h(45.0 / n as f64) / PI
}

/// Exact Θ for a periodic chain: the root product, or the
/// multiple-precision momentum product when too many roots contribute.
pub fn theta_exact_pbc(n: usize, g: f64, t: f64) -> Result<Theta> {
    check_n(n)?;
    check_gt(g, t)?;
    if g == 0.0 || t == 0.0 {
        return Ok(Theta::ONE);
    }
    if root_count_estimate(n, g, t) > 50_000.0 {
        theta_product_mp(n, g, t)
    } else {
        theta_root_product(n, g, t)
    }
}

/// A closed-form approximation with its validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptote {
    pub log_theta: f64,
    /// The closed-form entropy.
    pub entropy: f64,
    /// The entropy implied by `log_theta`, NaN when `log_theta` ≥ 0.
    pub entropy_from_log_theta: f64,
    /// Whether t lies inside the stated window.
    pub valid: bool,
}

fn entropy_or_nan(log_theta: f64) -> f64 {
    Theta::from_log(log_theta).map(|th| th.entropy()).unwrap_or(f64::NAN)
}

fn check_mixed(n: usize, g: f64, t: f64) -> Result<()> {
    check_n(n)?;
    check_gt(g, t)?;
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::Parameter(format!("mixed-phase asymptotics need 0 < g < 1, got {g}")));
    }
    Ok(())
}

/// ln Θ ≈ −√((1−g²)/(πN))·e^{−NK}·(t + 2/(1−g²)) and
/// S ≈ NK − ln(t/√N) + ½ ln(4π/(1−g²)), K = −ln g. Valid for
/// 2/(1−g²) ≤ t ≤ e^{NK}.
pub fn mixed_asymptote_pbc(n: usize, g: f64, t: f64) -> Result<Asymptote> {
    check_mixed(n, g, t)?;
    let nf = n as f64;
    let k = -g.ln();
    let w = 1.0 - g * g;
    let log_theta = -(w / (PI * nf)).sqrt() * (-nf * k).exp() * (t + 2.0 / w);
    let entropy = nf * k - (t / nf.sqrt()).ln() + 0.5 * (4.0 * PI / w).ln();
    let valid = t >= 2.0 / w && t.ln() <= nf * k;
    Ok(Asymptote { log_theta, entropy, entropy_from_log_theta: entropy_or_nan(log_theta), valid })
}

/// S ≈ 2 exp(−γt·√((1−g²)/(πN))·e^{−NK}), for γt ≳ e^{NK}.
pub fn late_time_pbc(n: usize, g: f64, gamma: f64, t: f64) -> Result<f64> {
    check_mixed(n, g, t)?;
    let nf = n as f64;
    let rate = ((1.0 - g * g) / (PI * nf)).sqrt() * (nf * g.ln()).exp();
    Ok(2.0 * (-gamma * t * rate).exp())
}

/// Purifying-phase entropy S ≈ N·x₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Purifying {
    pub entropy: f64,
    /// Root of tanh(tμ) = μ/(g cosh x − 1) in (0, ln g); NaN on fallback.
    pub x0: f64,
    /// N·(2(g−1)/g)·e^{−t(g−1)}.
    pub large_t_entropy: f64,
    /// Set when no root exists and `entropy` comes from the exact product.
    pub fallback: bool,
}

pub fn purifying_entropy(n: usize, g: f64, t: f64) -> Result<Purifying> {
    check_n(n)?;
    check_gt(g, t)?;
    if g <= 1.0 {
        return Err(Error::Parameter(format!("purifying phase needs g > 1, got {g}")));
    }
    let nf = n as f64;
    let large_t_entropy = nf * 2.0 * (g - 1.0) / g * (-t * (g - 1.0)).exp();
    let eq = RootEquation::new(g, t);
    if t * 0.5 * (g * g - 1.0) > 1.0 {
        let (ln_x, _) = eq.solve_inner()?;
        let x0 = ln_x.exp();
        if x0 < eq.x0 {
            return Ok(Purifying { entropy: nf * x0, x0, large_t_entropy, fallback: false });
        }
    }
    let entropy = theta_root_product(n, g, t)?.entropy();
    Ok(Purifying { entropy, x0: f64::NAN, large_t_entropy, fallback: true })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalRegime {
    /// t ≪ 1.
    Early,
    /// 1 ≪ t ≪ N.
    Intermediate,
    /// t ≫ N.
    Late,
    /// Between the windows above.
    Crossover,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeForm {
    pub entropy: f64,
    pub valid: bool,
}

/// Entropy at g = 1: the exact root product and the three closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Critical {
    pub exact: f64,
    /// −N ln(t/2).
    pub early: RegimeForm,
    /// Nπ/(2t + 1).
    pub intermediate: RegimeForm,
    /// 2√2·e^{−πt/(4N)}.
    pub late: RegimeForm,
    /// The entropy of the q-Pochhammer ratio (a; q)∞/(−a; q)∞ with
    /// a = e^{−Nπ/(2t)}, q = e^{−Nπ/t}.
    pub pochhammer: f64,
    pub regime: CriticalRegime,
}

pub fn critical_regime(n: usize, t: f64) -> CriticalRegime {
    let nf = n as f64;
    if t < 0.1 {
        CriticalRegime::Early
    } else if (3.0..=nf / 3.0).contains(&t) {
        CriticalRegime::Intermediate
    } else if t >= 3.0 * nf {
        CriticalRegime::Late
    } else {
        CriticalRegime::Crossover
    }
}

/// ln[(a; q)∞/(−a; q)∞] for 0 < a, q < 1.
fn log_pochhammer_ratio(a: f64, q: f64) -> f64 {
    let mut acc = 0.0;
    let mut aq = a;
    for _ in 0..100_000_000u64 {
        if aq < 1e-18 {
            break;
        }
        acc += (-aq).ln_1p() - aq.ln_1p();
        aq *= q;
    }
    acc
}

pub fn critical_entropy(n: usize, t: f64) -> Result<Critical> {
    check_n(n)?;
    check_gt(1.0, t)?;
    let nf = n as f64;
    let exact = theta_exact_pbc(n, 1.0, t)?.entropy();
    let regime = critical_regime(n, t);
    let early = RegimeForm { entropy: -nf * (0.5 * t).ln(), valid: regime == CriticalRegime::Early };
    let intermediate = RegimeForm {
        entropy: nf * PI / (2.0 * t + 1.0),
        valid: regime == CriticalRegime::Intermediate,
    };
    let late = RegimeForm {
        entropy: 2.0 * 2f64.sqrt() * (-PI * t / (4.0 * nf)).exp(),
        valid: regime == CriticalRegime::Late,
    };
    let pochhammer = if t > 0.0 {
        let a = (-nf * PI / (2.0 * t)).exp();
        let lt = log_pochhammer_ratio(a, a * a);
        Theta::from_log(lt.min(0.0))?.entropy()
    } else {
        f64::INFINITY
    };
    Ok(Critical { exact, early, intermediate, late, pochhammer, regime })
}
