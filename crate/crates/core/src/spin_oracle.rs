//! Dense imaginary-time evolution of the effective two-replica chain.
//!
//! Configurations are bit strings with site 0 the most significant bit;
//! bit 0 is |I⟩ (σz = +1) and bit 1 is |S⟩. In the d → ∞ limit the
//! generator is the transverse-field Ising model
//! H = −(γ/2)(Σ σzσz + g Σ σx). At finite d the generator acts on
//! coefficient vectors over the non-orthogonal states |I⟩, |S⟩.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::{frobenius, spd_sqrt_pair, RMatrix};
use crate::replica_algebra::{gram_matrix, measurement_operator, pair_generator};
use crate::theta::{log_sum_exp, Theta};

pub const MAX_DENSE_SITES: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Open,
}

impl Boundary {
    pub fn as_str(&self) -> &'static str {
        match self {
            Boundary::Periodic => "pbc",
            Boundary::Open => "obc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DMode {
    Infinite,
    Finite(usize),
}

/// One effective chain: N sites, field g, rate γ, boundary and local
/// dimension treatment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub n: usize,
    pub g: f64,
    pub gamma: f64,
    pub boundary: Boundary,
    pub d_mode: DMode,
}

impl ChainSpec {
    /// γ = 1 and d → ∞.
    pub fn new(n: usize, g: f64, boundary: Boundary) -> Result<Self> {
        let spec = ChainSpec { n, g, gamma: 1.0, boundary, d_mode: DMode::Infinite };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        let spec = ChainSpec { gamma, ..self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_d(self, d: usize) -> Result<Self> {
        let spec = ChainSpec { d_mode: DMode::Finite(d), ..self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || !self.n.is_multiple_of(2) {
            return Err(Error::Parameter(format!("N = {} must be even and >= 2", self.n)));
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(Error::Parameter(format!("g = {} must be finite and >= 0", self.g)));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::Parameter(format!("gamma = {} must be > 0", self.gamma)));
        }
        if let DMode::Finite(d) = self.d_mode {
            if d < 2 {
                return Err(Error::Parameter(format!("d = {d} must be >= 2")));
            }
        }
        Ok(())
    }

    /// Measurement rate f = gγ/2.
    pub fn f(&self) -> f64 {
        0.5 * self.g * self.gamma
    }

    fn bonds(&self) -> Vec<(usize, usize)> {
        let mut b: Vec<(usize, usize)> = (0..self.n - 1).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic {
            b.push((self.n - 1, 0));
        }
        b
    }

    fn check_dense(&self, max: usize) -> Result<()> {
        self.validate()?;
        if self.n > max {
            return Err(Error::Size(format!("N = {} exceeds the dense limit {max}", self.n)));
        }
        Ok(())
    }
}

fn bit(state: usize, site: usize, n: usize) -> usize {
    (state >> (n - 1 - site)) & 1
}

/// Adds `op` (4×4 on the (site i, site j) pair, index 2·bitᵢ + bitⱼ).
fn add_two_site(h: &mut RMatrix, op: &RMatrix, i: usize, j: usize, n: usize) {
    let (mi, mj) = (1 << (n - 1 - i), 1 << (n - 1 - j));
    for s in 0..h.ncols() {
        let col = 2 * bit(s, i, n) + bit(s, j, n);
        let base = s & !mi & !mj;
        for row in 0..4 {
            let v = op[(row, col)];
            if v != 0.0 {
                let target = base | if row & 2 != 0 { mi } else { 0 } | if row & 1 != 0 { mj } else { 0 };
                h[(target, s)] += v;
            }
        }
    }
}

fn add_one_site(h: &mut RMatrix, op: &RMatrix, i: usize, n: usize) {
    let mi = 1 << (n - 1 - i);
    for s in 0..h.ncols() {
        let col = bit(s, i, n);
        for row in 0..2 {
            let v = op[(row, col)];
            if v != 0.0 {
                let target = (s & !mi) | if row == 1 { mi } else { 0 };
                h[(target, s)] += v;
            }
        }
    }
}

/// The effective generator on 2^N configurations. At finite d this is
/// Σ H_{i,i+1} − f Σ (M_i − 1) on coefficient vectors, with the bond
/// generator built from Ω = γ(d²−1)²/2.
pub fn build_effective_hamiltonian(spec: &ChainSpec) -> Result<RMatrix> {
    spec.check_dense(MAX_DENSE_SITES)?;
    let n = spec.n;
    let dim = 1usize << n;
    let mut h = RMatrix::zeros(dim, dim);
    let x = RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    match spec.d_mode {
        DMode::Infinite => {
            let zz = RMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, -1.0, 1.0]));
            for (i, j) in spec.bonds() {
                add_two_site(&mut h, &(&zz * (-0.5 * spec.gamma)), i, j, n);
            }
            for i in 0..n {
                add_one_site(&mut h, &(&x * (-0.5 * spec.gamma * spec.g)), i, n);
            }
        }
        DMode::Finite(d) => {
            let d = d as f64;
            let omega = spec.gamma * (d * d - 1.0).powi(2) / 2.0;
            let pair = pair_generator(omega, d)?.matrix;
            for (i, j) in spec.bonds() {
                add_two_site(&mut h, &pair, i, j, n);
            }
            let local = (measurement_operator(d) - RMatrix::identity(2, 2)) * (-spec.f());
            for i in 0..n {
                add_one_site(&mut h, &local, i, n);
            }
        }
    }
    Ok(h)
}

/// Block of the d → ∞ generator in the C = Πσx sector `sign` (±1), in the
/// basis (|s⟩ ± |s̄⟩)/√2 over configurations with site 0 in |I⟩.
fn sector_block(spec: &ChainSpec, sign: f64) -> RMatrix {
    let n = spec.n;
    let half = 1usize << (n - 1);
    let mask = (1usize << n) - 1;
    let top = 1usize << (n - 1);
    let mut h = RMatrix::zeros(half, half);
    let bonds = spec.bonds();
    let field = -0.5 * spec.gamma * spec.g;
    for s in 0..half {
        let diag: f64 = bonds
            .iter()
            .map(|&(i, j)| if bit(s, i, n) == bit(s, j, n) { 1.0 } else { -1.0 })
            .sum::<f64>()
            * (-0.5 * spec.gamma);
        h[(s, s)] += diag;
        for site in 0..n {
            let s2 = s ^ (1 << (n - 1 - site));
            if s2 & top == 0 {
                h[(s, s2)] += field;
            } else {
                h[(s, s2 ^ mask)] += sign * field;
            }
        }
    }
    h
}

/// Spectral data of both C sectors, reusable across times.
#[derive(Debug, Clone)]
pub struct DenseTheta {
    even: (Vec<f64>, Vec<f64>),
    odd: (Vec<f64>, Vec<f64>),
}

impl DenseTheta {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        spec.check_dense(MAX_DENSE_SITES)?;
        if spec.d_mode != DMode::Infinite {
            return Err(Error::Parameter("theta_dense requires the d -> infinity chain".into()));
        }
        let weights = |sign: f64| {
            let eig = SymmetricEigen::new(sector_block(spec, sign));
            let lambdas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            let log_w: Vec<f64> = (0..lambdas.len())
                .map(|k| 2.0 * eig.eigenvectors[(0, k)].abs().ln())
                .collect();
            (lambdas, log_w)
        };
        Ok(DenseTheta { even: weights(1.0), odd: weights(-1.0) })
    }

    /// ln ⟨±|e^{−tH}|±⟩ for the even (+) and odd (−) sectors.
    pub fn log_sector_weights(&self, t: f64) -> (f64, f64) {
        let lse = |(l, w): &(Vec<f64>, Vec<f64>)| {
            let terms: Vec<f64> = l.iter().zip(w).map(|(l, w)| w - t * l).collect();
            log_sum_exp(&terms)
        };
        (lse(&self.even), lse(&self.odd))
    }

    /// ln Θ = ln(odd weight / even weight); Θ ≤ 1.
    pub fn log_theta(&self, t: f64) -> f64 {
        let (e, o) = self.log_sector_weights(t);
        o - e
    }

    pub fn theta(&self, t: f64) -> Result<Theta> {
        let (e, o) = self.log_sector_weights(t);
        if !e.is_finite() || !o.is_finite() {
            return Err(Error::Domain(format!("sector weights underflowed at t = {t}")));
        }
        Theta::from_log_clamped(o - e, 1e-13 * (e.abs() + o.abs()).max(1.0))
    }
}

/// Θ as the ratio of the C-odd to the C-even imaginary-time weight of the
/// all-aligned states |±⟩ = (|I⟩^N ± |S⟩^N)/√2.
pub fn theta_dense(spec: &ChainSpec, t: f64) -> Result<Theta> {
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("t = {t} must be >= 0")));
    }
    DenseTheta::new(spec)?.theta(t)
}

/// Input and output sites of a region, 0-based.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegionSpec {
    pub a_in: Vec<usize>,
    pub a_out: Vec<usize>,
}

impl RegionSpec {
    pub fn all_outputs(n: usize) -> Self {
        RegionSpec { a_in: Vec::new(), a_out: (0..n).collect() }
    }

    fn configuration(sites: &[usize], n: usize) -> Result<usize> {
        let mut s = 0;
        for &i in sites {
            if i >= n {
                return Err(Error::Parameter(format!("site {i} outside 0..{n}")));
            }
            s |= 1 << (n - 1 - i);
        }
        Ok(s)
    }
}

/// −log |⟨Ψ_Aout| T(t) |Ψ_Ain⟩ / ⟨I^N| T(t) |Ψ_Ain⟩| with Ψ_A carrying |S⟩
/// on the sites of A and |I⟩ elsewhere. At finite d the bra is paired with
/// the ket through the per-site Gram matrix [[d², d], [d, d²]].
pub fn entropy_matrix_element(spec: &ChainSpec, t: f64, region: &RegionSpec) -> Result<f64> {
    spec.check_dense(12)?;
    let n = spec.n;
    let s_in = RegionSpec::configuration(&region.a_in, n)?;
    let s_out = RegionSpec::configuration(&region.a_out, n)?;
    let h = build_effective_hamiltonian(spec)?;
    let dim = h.nrows();

    // bra/ket vectors in a frame where the generator is symmetric
    let (sym, bra_out, bra_ref, ket) = match spec.d_mode {
        DMode::Infinite => {
            let unit = |s: usize| {
                let mut v = vec![0.0; dim];
                v[s] = 1.0;
                v
            };
            (h, unit(s_out), unit(0), unit(s_in))
        }
        DMode::Finite(d) => {
            // Wg = G⁻¹, so Wg^{∓1/2} = G^{±1/2}
            let (root, inv_root) = spd_sqrt_pair(&gram_matrix(2, d as f64))?;
            let tensor_power = |m: &RMatrix| {
                RMatrix::from_fn(dim, dim, |r, s| (0..n).map(|i| m[(bit(r, i, n), bit(s, i, n))]).product())
            };
            let root_n = tensor_power(&root);
            let sim = &root_n * h * tensor_power(&inv_root);
            let product = |s: usize| -> Vec<f64> { root_n.column(s).iter().copied().collect() };
            let resid = frobenius(&(&sim - sim.transpose())) / frobenius(&sim).max(1.0);
            if resid > 1e-10 {
                return Err(Error::Internal(format!("hermitized generator asymmetric ({resid:e})")));
            }
            let sym = (&sim + sim.transpose()) * 0.5;
            (sym, product(s_out), product(0), product(s_in))
        }
    };

    let eig = SymmetricEigen::new(sym);
    let lmin = eig.eigenvalues.min();
    let element = |bra: &[f64]| -> f64 {
        (0..dim)
            .map(|k| {
                let v = eig.eigenvectors.column(k);
                let a: f64 = bra.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
                let b: f64 = ket.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
                a * b * (-t * (eig.eigenvalues[k] - lmin)).exp()
            })
            .sum()
    };
    let num = element(&bra_out);
    let den = element(&bra_ref);
    if num == 0.0 || den == 0.0 {
        return Err(Error::Domain("vanishing transfer-matrix element".into()));
    }
    Ok(-(num / den).abs().ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_site_open_chain() {
        let spec = ChainSpec::new(2, 0.7, Boundary::Open).unwrap();
        let h = build_effective_hamiltonian(&spec).unwrap();
        let x = RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let z = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let id = RMatrix::identity(2, 2);
        let expected = (z.kronecker(&z) + (x.kronecker(&id) + id.kronecker(&x)) * 0.7) * -0.5;
        assert!(frobenius(&(h - expected)) < 1e-15);
    }

    #[test]
    fn odd_or_tiny_chains_rejected() {
        assert!(ChainSpec::new(3, 0.5, Boundary::Open).is_err());
        assert!(ChainSpec::new(4, -0.1, Boundary::Open).is_err());
        let big = ChainSpec::new(16, 0.5, Boundary::Open).unwrap();
        assert!(matches!(build_effective_hamiltonian(&big), Err(Error::Size(_))));
    }

    #[test]
    fn theta_is_one_at_zero_time_and_zero_field() {
        let spec = ChainSpec::new(6, 0.5, Boundary::Periodic).unwrap();
        assert_eq!(theta_dense(&spec, 0.0).unwrap(), Theta::ONE);
        let flat = ChainSpec::new(6, 0.0, Boundary::Open).unwrap();
        for t in [0.5, 3.0, 20.0] {
            assert!(theta_dense(&flat, t).unwrap().log_theta().abs() < 1e-13);
        }
    }

    #[test]
    fn empty_region_is_zero() {
        let spec = ChainSpec::new(4, 0.8, Boundary::Open).unwrap();
        let s = entropy_matrix_element(&spec, 1.3, &RegionSpec::default()).unwrap();
        assert!(s.abs() < 1e-14);
    }
}
