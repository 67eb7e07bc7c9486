//! Open chains: bulk wavevectors, the Majorana edge mode, the explicit
//! eigenvectors of D, the exact plateau product for Θ and its large-N
//! asymptotics.

use std::f64::consts::PI;

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::linalg::{frobenius, log_abs_det, RMatrix};
use crate::roots::{bisect, newton_polish};
use crate::theta::Theta;

fn check(n: usize, g: f64) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Parameter(format!("N = {n} must be even and >= 2")));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::Parameter(format!("g = {g} must be finite and >= 0")));
    }
    Ok(())
}

/// φ(k) = atan2(g sin k, 1 − g cos k).
fn phase(g: f64, k: f64) -> f64 {
    (g * k.sin()).atan2(1.0 - g * k.cos())
}

fn phase_slope(g: f64, k: f64) -> f64 {
    g * (k.cos() - g) / (1.0 + g * g - 2.0 * g * k.cos())
}

/// sin(Nk) − g sin((N+1)k), zero exactly when tan(Nk) = g sin k/(1 − g cos k).
pub fn bulk_residual(n: usize, g: f64, k: f64) -> f64 {
    let nf = n as f64;
    (nf * k).sin() - g * ((nf + 1.0) * k).sin()
}

/// Real solutions k of tan(Nk) = g sin k/(1 − g cos k) in (0, π), each
/// tagged with its branch label l: Nk − φ(k) = lπ.
#[derive(Debug, Clone, PartialEq)]
pub struct BulkWavevectors {
    pub n: usize,
    pub g: f64,
    pub k: Vec<f64>,
    pub labels: Vec<usize>,
    pub residuals: Vec<f64>,
}

impl BulkWavevectors {
    pub fn count(&self) -> usize {
        self.k.len()
    }
}

/// For g < 1 the cells are ((l−½)π/N, (l+½)π/N), l = 1..N−1, plus a root
/// in (0, π/2N) when N(1−g) ≤ g; for g ≥ 1 they are (lπ/N, (l+1)π/N),
/// l = 0..N−1.
pub fn bulk_wavevectors(n: usize, g: f64) -> Result<BulkWavevectors> {
    check(n, g)?;
    let nf = n as f64;
    let step = PI / nf;
    let mut cells: Vec<(usize, f64, f64)> = Vec::with_capacity(n);
    if g < 1.0 {
        if nf * (1.0 - g) < g {
            cells.push((0, 1e-300, 0.5 * step));
        }
        cells.extend((1..n).map(|l| (l, (l as f64 - 0.5) * step, (l as f64 + 0.5) * step)));
    } else {
        // φ(0) is ill-defined at g = 1, so the first cell starts just above 0
        cells.extend((0..n).map(|l| (l, (l as f64 * step).max(1e-300), (l as f64 + 1.0) * step)));
    }
    let mut out = BulkWavevectors { n, g, k: vec![], labels: vec![], residuals: vec![] };
    for (l, lo, hi) in cells {
        let target = l as f64 * PI;
        let f = |k: f64| nf * k - phase(g, k) - target;
        let k = bisect(f, lo, hi, 1e-16, 0.0)?;
        let k = newton_polish(f, |k| nf - phase_slope(g, k), k, lo, hi);
        let r = bulk_residual(n, g, k);
        if r.abs() > 1e-12 {
            return Err(Error::Root(format!("wavevector l = {l} has residual {r:e}")));
        }
        out.k.push(k);
        out.labels.push(l);
        out.residuals.push(r);
    }
    Ok(out)
}

/// The edge mode k₀ = iK of an open chain with g < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeMode {
    /// Decay rate K, solving sinh(NK) = g sinh((N+1)K).
    pub k: f64,
    /// λ₀ = √(1 + g² − 2g cosh K).
    pub lambda0: f64,
    /// −ln g, the N → ∞ limit of K.
    pub k_limit: f64,
    /// (1 − g²)·gᴺ.
    pub asymptote: f64,
    /// |1 − g sinh((N+1)K)/sinh(NK)|.
    pub residual: f64,
}

/// The edge equation in δ = −ln g − K:
/// (1+T)(e^{−δ} − 1) + (1−T)(1 − g²e^{δ}) = 0 with T = tanh(NK).
fn edge_equation(n: usize, g: f64, d: f64) -> f64 {
    let k = -g.ln() - d;
    let omt = 2.0 / ((2.0 * n as f64 * k).exp() + 1.0);
    (2.0 - omt) * (-d).exp_m1() + omt * (1.0 - g * g * d.exp())
}

fn edge_delta(n: usize, g: f64) -> Result<f64> {
    if !(g > 0.0 && g < 1.0) || (n as f64) * (1.0 - g) <= g {
        return Err(Error::NoEdgeMode(g));
    }
    let k0 = -g.ln();
    let mut hi = 1e-300;
    while edge_equation(n, g, hi) > 0.0 {
        hi *= 2.0;
        if hi >= k0 {
            return Err(Error::NoEdgeMode(g));
        }
    }
    bisect(|d| edge_equation(n, g, d), 0.5 * hi, hi, 1e-15, 0.0)
}

pub fn edge_mode(n: usize, g: f64) -> Result<EdgeMode> {
    check(n, g)?;
    let d = edge_delta(n, g)?;
    let k_limit = -g.ln();
    let k = k_limit - d;
    let lambda0 = (-(-d).exp_m1() * (1.0 - g * g * d.exp())).sqrt();
    let residual = (1.0 - g * (k.cosh() + k.sinh() / (n as f64 * k).tanh())).abs();
    if residual > 1e-12 {
        return Err(Error::Root(format!("edge mode residual {residual:e}")));
    }
    let asymptote = (1.0 - g * g) * (n as f64 * g.ln()).exp();
    Ok(EdgeMode { k, lambda0, k_limit, asymptote, residual })
}

/// Bulk wavevectors and, for g < 1, the edge mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ObcSpectrum {
    pub n: usize,
    pub g: f64,
    pub bulk: BulkWavevectors,
    pub edge: Option<EdgeMode>,
}

impl ObcSpectrum {
    pub fn bulk_energies(&self) -> Vec<f64> {
        self.bulk.k.iter().map(|&k| crate::pbc_analytics::dispersion(self.g, k)).collect()
    }
}

pub fn obc_spectrum(n: usize, g: f64) -> Result<ObcSpectrum> {
    let bulk = bulk_wavevectors(n, g)?;
    let edge = match edge_mode(n, g) {
        Ok(e) => Some(e),
        Err(Error::NoEdgeMode(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(ObcSpectrum { n, g, bulk, edge })
}

/// The orthogonal O = [[u, v], [v, u]] with OᵀDO = diag(λ, −λ), built
/// from sinusoidal profiles in y = i − N/2 and normalized numerically.
/// Columns follow the spectrum order: the edge mode (if any) first, then
/// the bulk modes by increasing k.
pub fn obc_eigenvectors(n: usize, g: f64) -> Result<RMatrix> {
    check(n, g)?;
    if g == 0.0 {
        return Err(Error::Parameter("the sinusoidal construction needs g > 0".into()));
    }
    let spec = obc_spectrum(n, g)?;
    let m = n / 2;
    let mf = m as f64;
    let mut u = RMatrix::zeros(n, n);
    let mut v = RMatrix::zeros(n, n);
    let mut col = 0;
    if let Some(edge) = spec.edge {
        let kk = edge.k;
        for i in 1..n {
            let y = i as f64 - mf;
            u[(i, 0)] = (kk * y).sinh() / (kk * mf).sinh();
            v[(i, 0)] = (kk * y).cosh() / (kk * mf).cosh();
        }
        v[(0, 0)] = 2.0;
        col = 1;
    }
    for (&k, &l) in spec.bulk.k.iter().zip(&spec.bulk.labels) {
        let odd = l % 2 == 1;
        for i in 1..n {
            let y = i as f64 - mf;
            let (c, s) = ((k * y).cos() / (k * mf).cos(), (k * y).sin() / (k * mf).sin());
            if odd {
                u[(i, col)] = c;
                v[(i, col)] = s;
            } else {
                u[(i, col)] = s;
                v[(i, col)] = c;
            }
        }
        if odd {
            u[(0, col)] = 2.0;
        } else {
            v[(0, col)] = 2.0;
        }
        col += 1;
    }
    for j in 0..n {
        let norm = (u.column(j).norm_squared() + v.column(j).norm_squared()).sqrt();
        u.column_mut(j).unscale_mut(norm);
        v.column_mut(j).unscale_mut(norm);
    }
    let mut o = RMatrix::zeros(2 * n, 2 * n);
    o.view_mut((0, 0), (n, n)).copy_from(&u);
    o.view_mut((0, n), (n, n)).copy_from(&v);
    o.view_mut((n, 0), (n, n)).copy_from(&v);
    o.view_mut((n, n), (n, n)).copy_from(&u);
    let res = frobenius(&(o.transpose() * &o - RMatrix::identity(2 * n, 2 * n)));
    if !(res <= 1e-8) {
        return Err(Error::Invariant { invariant: "eigenvector normalization", residual: res });
    }
    Ok(o)
}

/// ln Θ ≈ −tλ₀ + B with the t-independent part
/// B = ln tanh(NK/2) − ln sinh K + Σ_{l odd} ln(cosh K − cos k_l)
///     − Σ_{l even} ln(cosh K − cos k_l),
/// evaluated in multiple precision since B is of order e^{−NK} while its
/// terms are of order one.
#[derive(Debug, Clone)]
pub struct ObcProduct {
    pub n: usize,
    pub g: f64,
    bits: u32,
    bracket: Float,
    lambda0: Float,
}

/// Newton iteration in multiple precision from a double-precision seed.
fn mp_newton(bits: u32, seed: f64, step: impl Fn(&Float) -> Float) -> Float {
    let mut x = Float::with_val(bits, seed);
    let tol = Float::with_val(bits, Float::i_exp(1, 8 - bits as i32));
    for _ in 0..64 {
        let dx = step(&x);
        x -= &dx;
        let rel = Float::with_val(bits, dx.abs_ref()) / Float::with_val(bits, x.abs_ref());
        if rel <= tol {
            break;
        }
    }
    x
}

impl ObcProduct {
    pub fn new(n: usize, g: f64) -> Result<Self> {
        check(n, g)?;
        let spec = obc_spectrum(n, g)?;
        let edge = spec.edge.ok_or(Error::NoEdgeMode(g))?;
        let nf = n as f64;
        let bits = (128.0 + nf * edge.k / std::f64::consts::LN_2 + nf.log2()).ceil() as u32;
        let gf = Float::with_val(bits, g);
        let g2 = Float::with_val(bits, gf.square_ref());
        let k_limit = Float::with_val(bits, gf.ln_ref()) * -1i32;
        let pi = Float::with_val(bits, Constant::Pi);

        let delta = mp_newton(bits, k_limit.to_f64() - edge.k, |d| {
            let k = Float::with_val(bits, &k_limit - d);
            let e2 = Float::with_val(bits, &k * (2 * n) as u32).exp();
            let omt = Float::with_val(bits, 2u32 / (e2 + 1u32));
            let opt = Float::with_val(bits, 2u32 - &omt);
            let em = Float::with_val(bits, -d).exp_m1();
            let ep = Float::with_val(bits, d.exp_ref());
            let p = Float::with_val(bits, 1u32 - Float::with_val(bits, &g2 * &ep));
            let f = Float::with_val(bits, &opt * &em) + Float::with_val(bits, &omt * &p);
            let one_t2 = Float::with_val(bits, &omt * &opt);
            let df = -(Float::with_val(bits, &opt * Float::with_val(bits, &em + 1u32))
                + Float::with_val(bits, &omt * Float::with_val(bits, &g2 * &ep)))
                - Float::with_val(bits, one_t2 * n as u32) * (Float::with_val(bits, &em - &p));
            f / df
        });
        let kk = Float::with_val(bits, &k_limit - &delta);
        let em = Float::with_val(bits, (-delta.clone()).exp_m1());
        let p = Float::with_val(bits, 1u32 - Float::with_val(bits, &g2 * delta.clone().exp()));
        let lambda0 = Float::with_val(bits, -em * p).sqrt();

        let mut bracket = Float::with_val(bits, Float::with_val(bits, &kk * n as u32) / 2u32).tanh().ln();
        bracket -= Float::with_val(bits, kk.sinh_ref()).ln();
        let cosh_k = Float::with_val(bits, kk.cosh_ref());
        for (&k, &l) in spec.bulk.k.iter().zip(&spec.bulk.labels) {
            let target = Float::with_val(bits, &pi * l as u32);
            let kl = mp_newton(bits, k, |k| {
                let (s, c) = (Float::with_val(bits, k.sin_ref()), Float::with_val(bits, k.cos_ref()));
                let y = Float::with_val(bits, &gf * &s);
                let x = Float::with_val(bits, 1u32 - Float::with_val(bits, &gf * &c));
                let ph = y.atan2(&x);
                let f = Float::with_val(bits, k * n as u32) - ph - &target;
                let den = Float::with_val(bits, 1u32 + &g2) - Float::with_val(bits, &gf * &c) * 2u32;
                let slope = Float::with_val(bits, &gf * Float::with_val(bits, &c - &gf)) / den;
                let df = Float::with_val(bits, n as u32 - slope);
                f / df
            });
            let term = Float::with_val(bits, &cosh_k - kl.cos()).ln();
            if l % 2 == 1 {
                bracket += term;
            } else {
                bracket -= term;
            }
        }
        Ok(ObcProduct { n, g, bits, bracket, lambda0 })
    }

    pub fn bracket(&self) -> f64 {
        self.bracket.to_f64()
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0.to_f64()
    }

    fn log_theta_mp(&self, t: f64) -> Float {
        let tf = Float::with_val(self.bits, t);
        Float::with_val(self.bits, &self.bracket - Float::with_val(self.bits, &tf * &self.lambda0))
    }

    /// ln Θ; positive before the plateau sets in.
    pub fn log_theta(&self, t: f64) -> f64 {
        self.log_theta_mp(t).to_f64()
    }

    pub fn theta(&self, t: f64) -> Result<Theta> {
        let l = self.log_theta_mp(t);
        if l >= 0 {
            return Err(Error::Domain(format!("plateau product gives log theta = {} >= 0 at t = {t}", l.to_f64())));
        }
        Theta::from_ln_neg_ln((-l).ln().to_f64())
    }

    /// [3/(1−g), 0.1/λ₀].
    pub fn window(&self) -> (f64, f64) {
        (3.0 / (1.0 - self.g), 0.1 / self.lambda0())
    }
}

/// ln Θ from the plateau product, with a flag for t inside
/// [3/(1−g), 0.1/λ₀].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactObc {
    pub log_theta: f64,
    pub valid: bool,
}

pub fn theta_exact_obc(n: usize, g: f64, t: f64) -> Result<ExactObc> {
    let p = ObcProduct::new(n, g)?;
    let (lo, hi) = p.window();
    Ok(ExactObc { log_theta: p.log_theta(t), valid: t >= lo && t <= hi })
}

/// The t-independent part B from the Vandermonde determinant ratio
/// Θ = tanh(mK)·det C̄·det S/(det S̄·det C), m = N/2, with k₀ = iK.
pub fn vandermonde_bracket(n: usize, g: f64) -> Result<f64> {
    let spec = obc_spectrum(n, g)?;
    let edge = spec.edge.ok_or(Error::NoEdgeMode(g))?;
    let m = n / 2;
    let kk = edge.k;
    let odd: Vec<f64> = spec.bulk.k.iter().zip(&spec.bulk.labels).filter(|(_, &l)| l % 2 == 1).map(|(&k, _)| k).collect();
    let even: Vec<f64> = spec.bulk.k.iter().zip(&spec.bulk.labels).filter(|(_, &l)| l % 2 == 0).map(|(&k, _)| k).collect();
    let c_bar = RMatrix::from_fn(m + 1, m + 1, |r, c| {
        let r = r as f64;
        if c == 0 {
            (r * kk).cosh()
        } else {
            (r * odd[c - 1]).cos()
        }
    });
    let s = RMatrix::from_fn(m - 1, m - 1, |r, c| ((r + 1) as f64 * even[c]).sin());
    let c_mat = RMatrix::from_fn(m, m, |r, c| (r as f64 * odd[c]).cos());
    let s_bar = RMatrix::from_fn(m, m, |r, c| {
        let r = (r + 1) as f64;
        if c == 0 {
            (r * kk).sinh()
        } else {
            (r * even[c - 1]).sin()
        }
    });
    let tol = 0.0;
    Ok((m as f64 * kk).tanh().ln() + log_abs_det(&c_bar, tol) + log_abs_det(&s, tol)
        - log_abs_det(&s_bar, tol)
        - log_abs_det(&c_mat, tol))
}

/// The √(N/π) prefactor of the large-N expression for ln Θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefactorVariant {
    /// c = 1.
    Paper,
    /// c = 2.
    Appendix,
}

impl PrefactorVariant {
    pub fn c(&self) -> f64 {
        match self {
            PrefactorVariant::Paper => 1.0,
            PrefactorVariant::Appendix => 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObcAsymptote {
    /// 2e^{−NK}(c√(N/π)√(1−g²) − 1 − (1−g²)t/2).
    pub log_theta: f64,
    /// NK − ln t + ln(2/(1−g²)).
    pub entropy: f64,
    /// Entropy implied by `log_theta`; NaN when `log_theta` ≥ 0.
    pub entropy_from_log_theta: f64,
    /// 2√(N/((1−g²)π)).
    pub t_c: f64,
    /// t_c ≤ t ≤ e^{NK}.
    pub valid: bool,
}

pub fn critical_time_obc(n: usize, g: f64) -> f64 {
    2.0 * (n as f64 / ((1.0 - g * g) * PI)).sqrt()
}

pub fn mixed_asymptote_obc(n: usize, g: f64, t: f64, variant: PrefactorVariant) -> Result<ObcAsymptote> {
    check(n, g)?;
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::Parameter(format!("mixed-phase asymptotics need 0 < g < 1, got {g}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Parameter(format!("t = {t} must be > 0")));
    }
    let nf = n as f64;
    let k = -g.ln();
    let w = 1.0 - g * g;
    let log_theta = 2.0 * (-nf * k).exp() * (variant.c() * (nf / PI).sqrt() * w.sqrt() - 1.0 - w * t / 2.0);
    let entropy = nf * k - t.ln() + (2.0 / w).ln();
    let entropy_from_log_theta = Theta::from_log(log_theta).map(|th| th.entropy()).unwrap_or(f64::NAN);
    let t_c = critical_time_obc(n, g);
    Ok(ObcAsymptote { log_theta, entropy, entropy_from_log_theta, t_c, valid: t >= t_c && t.ln() <= nf * k })
}

/// S ≈ 2 exp(−(1−g²)·γt·e^{−NK}).
pub fn late_time_obc(n: usize, g: f64, gamma: f64, t: f64) -> Result<f64> {
    check(n, g)?;
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::Parameter(format!("late-time form needs 0 < g < 1, got {g}")));
    }
    Ok(2.0 * (-(1.0 - g * g) * gamma * t * (n as f64 * g.ln()).exp()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_limit_wavevectors() {
        let b = bulk_wavevectors(8, 0.0).unwrap();
        for (i, &k) in b.k.iter().enumerate() {
            assert!((k - (i + 1) as f64 * PI / 8.0).abs() < 1e-15);
        }
    }

    #[test]
    fn root_counts() {
        assert_eq!(bulk_wavevectors(10, 0.7).unwrap().count(), 9);
        assert_eq!(bulk_wavevectors(10, 1.5).unwrap().count(), 10);
        // N(1−g) < g: the edge mode turns into a real root
        assert_eq!(bulk_wavevectors(4, 0.9).unwrap().count(), 4);
        assert!(matches!(edge_mode(4, 0.9), Err(Error::NoEdgeMode(_))));
    }

    #[test]
    fn no_edge_mode_above_one() {
        assert!(matches!(edge_mode(10, 1.2), Err(Error::NoEdgeMode(_))));
    }

    #[test]
    fn edge_asymptote_example() {
        let e = edge_mode(10, 0.5).unwrap();
        assert!((e.asymptote - 0.75 / 1024.0).abs() < 1e-15);
        assert!((e.lambda0 / e.asymptote - 1.0).abs() < 0.02);
    }

    #[test]
    fn critical_time_example() {
        assert!((critical_time_obc(100, 0.5) - 13.029).abs() < 1e-3);
    }
}
