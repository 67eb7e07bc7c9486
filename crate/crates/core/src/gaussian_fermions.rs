//! Free-fermion evaluation of the effective chain.
//!
//! Modes are ordered α = (a₀ … a_{N−1}, a₀† … a_{N−1}†) and the generator
//! is H = ½ α†·D·α. A Gaussian state is described by its correlation
//! matrix Γ_{μν} = 2 Tr(ρ α_ν† α_μ) − δ_{μν}; for a Hermitian ρ ∝
//! exp(½ α†Wα) this is tanh(W/2). The index order is the one under which
//! the product formula of [`gaussian_product`] holds for non-Hermitian
//! products ρρ′ as well.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use std::sync::{Arc, Mutex};

use rug::{Assign, Float};

use crate::linalg::{frobenius, log_abs_det, mp_log_abs_det, mp_symmetric_eigen, MpMatrix, RMatrix};
use crate::spin_oracle::{Boundary, ChainSpec};
use crate::theta::Theta;

/// Fermion parity sector of a periodic chain. Even parity carries
/// antiperiodic fermions (k = lπ/N, l odd); odd parity carries periodic
/// ones (l even).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

pub const MAX_CORRELATION_MODES: usize = 400;

/// η = [[0, 1], [1, 0]] in N×N blocks.
pub fn eta(n: usize) -> RMatrix {
    let mut e = RMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        e[(i, n + i)] = 1.0;
        e[(n + i, i)] = 1.0;
    }
    e
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrandDynamicalMatrix {
    pub n: usize,
    pub matrix: RMatrix,
    pub boundary: Boundary,
    /// `None` for open chains.
    pub parity: Option<Parity>,
}

impl GrandDynamicalMatrix {
    /// ‖η Dᵀ η + D‖_F.
    pub fn particle_hole_residual(&self) -> f64 {
        let e = eta(self.n);
        frobenius(&(&e * self.matrix.transpose() * &e + &self.matrix))
    }

    pub fn decompose(&self) -> Result<SpectralDecomposition> {
        SpectralDecomposition::new(&self.matrix)
    }
}

/// Accumulates c·X†Y into M, where X and Y are a (`false`) or a† (`true`)
/// on the given sites.
struct Builder {
    n: usize,
    m: RMatrix,
}

impl Builder {
    fn add(&mut self, c: f64, x: (bool, usize), y: (bool, usize)) {
        // X† = α†_μ  ⇒  α_μ = X†
        let row = if x.0 { x.1 } else { self.n + x.1 };
        let col = if y.0 { self.n + y.1 } else { y.1 };
        self.m[(row, col)] += c;
    }

    fn finish(self) -> RMatrix {
        let e = eta(self.n);
        &self.m - &e * self.m.transpose() * &e
    }
}

fn open_chain(n: usize, g: f64) -> Builder {
    let mut b = Builder { n, m: RMatrix::zeros(2 * n, 2 * n) };
    for i in 1..n {
        b.add(1.0, (true, i), (false, i));
    }
    let c = -0.5 * g;
    for i in 1..=n {
        let (j, k) = (i % n, i - 1);
        b.add(c, (false, j), (false, k));
        b.add(-c, (false, j), (true, k));
        b.add(c, (true, j), (false, k));
        b.add(-c, (true, j), (true, k));
    }
    b
}

/// The grand dynamical matrix, scaled by γ. Open chains give one matrix;
/// periodic chains give the even- and odd-parity sectors in that order.
pub fn grand_dynamical_matrix(spec: &ChainSpec) -> Result<Vec<GrandDynamicalMatrix>> {
    spec.validate()?;
    let n = spec.n;
    let sectors: Vec<(Option<Parity>, f64)> = match spec.boundary {
        Boundary::Open => vec![(None, 0.0)],
        Boundary::Periodic => vec![(Some(Parity::Even), -1.0), (Some(Parity::Odd), 1.0)],
    };
    Ok(sectors
        .into_iter()
        .map(|(parity, s)| {
            let mut b = open_chain(n, spec.g);
            if s != 0.0 {
                b.add(s, (true, 0), (false, 0));
            }
            GrandDynamicalMatrix { n, matrix: b.finish() * spec.gamma, boundary: spec.boundary, parity }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub n: usize,
    pub matrix: RMatrix,
}

impl CorrelationMatrix {
    pub fn new(matrix: RMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || !matrix.nrows().is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "correlation matrix must be 2N x 2N, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(CorrelationMatrix { n: matrix.nrows() / 2, matrix })
    }

    pub fn zero(n: usize) -> Self {
        CorrelationMatrix { n, matrix: RMatrix::zeros(2 * n, 2 * n) }
    }

    /// diag(−1 … −1, 1 … 1), optionally with the first entry of each block
    /// flipped.
    pub fn reference(n: usize, flipped: bool) -> Self {
        let mut m = RMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(i, i)] = -1.0;
            m[(n + i, n + i)] = 1.0;
        }
        if flipped {
            m[(0, 0)] = 1.0;
            m[(n, n)] = -1.0;
        }
        CorrelationMatrix { n, matrix: m }
    }
}

/// D = O·diag(λ)·Oᵀ for the real symmetric D.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: RMatrix,
}

impl SpectralDecomposition {
    pub fn new(d: &RMatrix) -> Result<Self> {
        let asym = frobenius(&(d - d.transpose()));
        if asym > 1e-12 * frobenius(d).max(1.0) {
            return Err(Error::Invariant { invariant: "symmetry of D", residual: asym });
        }
        let eig = SymmetricEigen::new(d.clone());
        let o = eig.eigenvectors;
        let dim = o.nrows();
        let orth = frobenius(&(o.transpose() * &o - RMatrix::identity(dim, dim)));
        if orth > 1e-10 {
            return Err(Error::Invariant { invariant: "orthogonality of the eigenbasis", residual: orth });
        }
        Ok(SpectralDecomposition { eigenvalues: eig.eigenvalues.iter().copied().collect(), vectors: o })
    }

    fn build(&self, f: impl Fn(usize, f64) -> f64) -> CorrelationMatrix {
        let o = &self.vectors;
        let diag: Vec<f64> = self.eigenvalues.iter().enumerate().map(|(i, &l)| f(i, l)).collect();
        let mut scaled = o.clone();
        for (j, &v) in diag.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        CorrelationMatrix { n: o.nrows() / 2, matrix: scaled * o.transpose() }
    }

    /// Γ[−tD] = O·tanh(−tΛ/2)·Oᵀ, with tanh replaced by ±1 once |tλ| > 40.
    pub fn correlation_at(&self, t: f64) -> CorrelationMatrix {
        self.build(|_, l| saturating_tanh(-t * l))
    }

    /// As [`Self::correlation_at`], but with every mode except the
    /// `keep` smallest |λ| pairs fully saturated.
    pub fn saturated_at(&self, t: f64, keep: usize) -> CorrelationMatrix {
        let mut order: Vec<usize> = (0..self.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| self.eigenvalues[a].abs().total_cmp(&self.eigenvalues[b].abs()));
        let soft: Vec<usize> = order.into_iter().take(2 * keep).collect();
        self.build(|i, l| if soft.contains(&i) { saturating_tanh(-t * l) } else { -l.signum() })
    }
}

/// tanh(x/2), exactly ±1 once |x| > 40.
fn saturating_tanh(x: f64) -> f64 {
    if x.abs() > 40.0 {
        x.signum()
    } else {
        (0.5 * x).tanh()
    }
}

pub fn correlation_matrix(d: &GrandDynamicalMatrix, t: f64) -> Result<CorrelationMatrix> {
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("t = {t} must be >= 0")));
    }
    Ok(d.decompose()?.correlation_at(t))
}

fn check_pair(a: &CorrelationMatrix, b: &CorrelationMatrix) -> Result<()> {
    if a.n != b.n {
        return Err(Error::Parameter(format!("mode counts differ: {} vs {}", a.n, b.n)));
    }
    Ok(())
}

/// ln|Tr ρρ′| = ½ ln|det((1 + ΓΓ′)/2)|; −∞ when 1 + ΓΓ′ is singular to
/// 1e−14.
pub fn gaussian_overlap(a: &CorrelationMatrix, b: &CorrelationMatrix) -> Result<f64> {
    check_pair(a, b)?;
    let dim = 2 * a.n;
    let m = (RMatrix::identity(dim, dim) + &a.matrix * &b.matrix) * 0.5;
    Ok(0.5 * log_abs_det(&m, 1e-14))
}

/// Correlation matrix of ρρ′/Tr(ρρ′): 1 − (1 − Γ′)(1 + ΓΓ′)⁻¹(1 − Γ).
pub fn gaussian_product(a: &CorrelationMatrix, b: &CorrelationMatrix) -> Result<CorrelationMatrix> {
    check_pair(a, b)?;
    let dim = 2 * a.n;
    let id = RMatrix::identity(dim, dim);
    let m = &id + &a.matrix * &b.matrix;
    let scale = m.amax();
    let lu = m.lu();
    let u = lu.u();
    let pivot = (0..dim).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if !(pivot > 1e-14 * scale) {
        return Err(Error::Singular(format!(
            "1 + GG' has relative pivot {:.3e}",
            pivot / scale
        )));
    }
    let rhs = &id - &a.matrix;
    let x = lu.solve(&rhs).ok_or_else(|| Error::Singular("1 + GG' is not invertible".into()))?;
    Ok(CorrelationMatrix { n: a.n, matrix: &id - (&id - &b.matrix) * x })
}

/// Θ(t) for an open chain from overlaps with the two reference states,
/// reusing one spectral decomposition across times.
#[derive(Debug, Clone)]
pub struct CorrelationTheta {
    d: RMatrix,
    decomposition: SpectralDecomposition,
    plus: CorrelationMatrix,
    minus: CorrelationMatrix,
    mp: Arc<Mutex<Option<MpEigen>>>,
}

/// Eigenvalues and eigenvectors of D in extended precision.
type MpEigen = (Vec<Float>, MpMatrix);

/// Below this ln Θ the f64 overlaps lose digits to cancellation and the
/// extended-precision path takes over.
const MP_SWITCH: f64 = -8.0;
pub const MAX_MP_MODES: usize = 40;

impl CorrelationTheta {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        spec.validate()?;
        if spec.boundary != Boundary::Open {
            return Err(Error::Parameter("the correlation-matrix path supports open chains only".into()));
        }
        if spec.n > MAX_CORRELATION_MODES {
            return Err(Error::Size(format!("N = {} exceeds {MAX_CORRELATION_MODES}", spec.n)));
        }
        let d = grand_dynamical_matrix(spec)?.remove(0);
        Ok(CorrelationTheta {
            decomposition: d.decompose()?,
            d: d.matrix,
            plus: CorrelationMatrix::reference(spec.n, false),
            minus: CorrelationMatrix::reference(spec.n, true),
            mp: Arc::new(Mutex::new(None)),
        })
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    /// ln Θ; may exceed zero by roundoff. Deep in the decay (ln Θ < −8),
    /// or when D has a mode below 1e−6 of its spectral radius, the
    /// overlaps are recomputed in extended precision for N ≤ 40.
    pub fn log_theta(&self, t: f64) -> Result<f64> {
        let l = self.log_theta_f64(t)?;
        let ev = &self.decomposition.eigenvalues;
        let top = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let soft = ev.iter().fold(f64::INFINITY, |m, x| m.min(x.abs())) / top;
        if l > MP_SWITCH && soft > 1e-6 || self.plus.n > MAX_MP_MODES {
            return Ok(l);
        }
        let scale = (1.0 + t * top * self.d.nrows() as f64) / soft.max(1e-300);
        let mut bits = if l.is_finite() { required_bits(l, scale) } else { 512 };
        for _ in 0..6 {
            let l = self.log_theta_mp(t, bits);
            let need = required_bits(l, scale);
            if need <= bits || !l.is_finite() && bits >= 8192 {
                return Ok(l);
            }
            bits = need.max(2 * bits);
        }
        Ok(self.log_theta_mp(t, bits))
    }

    /// ln Θ in plain f64 arithmetic.
    pub fn log_theta_f64(&self, t: f64) -> Result<f64> {
        let gamma = self.decomposition.correlation_at(t);
        Ok(gaussian_overlap(&gamma, &self.plus)? - gaussian_overlap(&gamma, &self.minus)?)
    }

    fn log_theta_mp(&self, t: f64, bits: u32) -> f64 {
        let mut cache = self.mp.lock().unwrap_or_else(|e| e.into_inner());
        if cache.as_ref().is_none_or(|(l, _)| l[0].prec() < bits) {
            *cache = Some(mp_symmetric_eigen(&self.d, bits.div_ceil(256) * 256));
        }
        let (lambda, v) = cache.as_ref().unwrap();
        let dim = v.n;
        let th: Vec<Float> = lambda
            .iter()
            .map(|l| (Float::with_val(bits, l * t) * -0.5f64).tanh())
            .collect();
        let mut gamma = vec![Float::new(bits); dim * dim];
        let mut tmp = Float::new(bits);
        for i in 0..dim {
            for j in 0..=i {
                let mut acc = Float::new(bits);
                for (k, th_k) in th.iter().enumerate() {
                    tmp.assign(v.at(i, k) * th_k);
                    tmp *= v.at(j, k);
                    acc += &tmp;
                }
                gamma[j * dim + i] = acc.clone();
                gamma[i * dim + j] = acc;
            }
        }
        let overlap = |r: &RMatrix| {
            let data = (0..dim * dim)
                .map(|idx| {
                    let (i, j) = (idx / dim, idx % dim);
                    let mut x = Float::with_val(bits, &gamma[idx] * r[(j, j)]);
                    if i == j {
                        x += 1u32;
                    }
                    x / 2u32
                })
                .collect();
            0.5 * mp_log_abs_det(MpMatrix { n: dim, data })
        };
        overlap(&self.plus.matrix) - overlap(&self.minus.matrix)
    }

    pub fn theta(&self, t: f64) -> Result<Theta> {
        Theta::from_log_clamped(self.log_theta(t)?, 1e-12)
    }
}

/// Working precision that resolves a ratio e^{2l} of determinants whose
/// entries carry relative error amplified by `scale`.
fn required_bits(l: f64, scale: f64) -> u32 {
    (96.0 + (-2.0 * l + scale.ln()) / std::f64::consts::LN_2).ceil() as u32
}

pub fn theta_correlation(spec: &ChainSpec, t: f64) -> Result<Theta> {
    CorrelationTheta::new(spec)?.theta(t)
}
