//! Effective rates of a microscopic two-qudit coupling.
//!
//! The coupling is expanded on generalized Pauli strings XᵃZᵇ ⊗ XˢZᵗ with
//! X|j⟩ = |j+1 mod d⟩ and Z|j⟩ = ωʲ|j⟩, ω = e^{2πi/d}. Basis states are
//! ordered |i⟩⊗|j⟩ ↦ i·d + j.

use nalgebra::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_c, CMatrix, RMatrix};

type C64 = Complex<f64>;

const VALIDATION_TOL: f64 = 1e-12;
const OMEGA_TOL: f64 = 1e-10;

/// A swap-symmetric Hermitian coupling between two qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditHamiltonian {
    d: usize,
    matrix: CMatrix,
}

impl QuditHamiltonian {
    /// Validates hermiticity and swap symmetry, both to 1e−12 relative
    /// Frobenius residual.
    pub fn new(d: usize, matrix: CMatrix) -> Result<Self> {
        if d < 2 {
            return Err(Error::Parameter(format!("local dimension d = {d} must be >= 2")));
        }
        let n = d * d;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Parameter(format!(
                "matrix is {}x{}, expected {n}x{n} for d = {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = frobenius_c(&matrix).max(1.0);
        let herm = frobenius_c(&(&matrix - matrix.adjoint())) / scale;
        if herm > VALIDATION_TOL {
            return Err(Error::Invariant { invariant: "hermiticity", residual: herm });
        }
        let swap = swap_matrix(d);
        let sym = frobenius_c(&(&matrix - &swap * &matrix * &swap)) / scale;
        if sym > VALIDATION_TOL {
            return Err(Error::Invariant { invariant: "swap symmetry", residual: sym });
        }
        Ok(QuditHamiltonian { d, matrix })
    }

    /// Paper mode: additionally requires real entries.
    pub fn new_real(d: usize, matrix: CMatrix) -> Result<Self> {
        let scale = frobenius_c(&matrix).max(1.0);
        let imag = matrix.iter().map(|z| z.im * z.im).sum::<f64>().sqrt() / scale;
        if imag > VALIDATION_TOL {
            return Err(Error::Invariant { invariant: "real entries", residual: imag });
        }
        Self::new(d, matrix)
    }

    pub fn from_real(d: usize, matrix: &RMatrix) -> Result<Self> {
        Self::new_real(d, matrix.map(|x| C64::new(x, 0.0)))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// H − tr(H)/d² · 1.
    pub fn traceless_part(&self) -> QuditHamiltonian {
        let n = self.d * self.d;
        let shift = self.matrix.trace() / n as f64;
        let mut m = self.matrix.clone();
        for i in 0..n {
            m[(i, i)] -= shift;
        }
        QuditHamiltonian { d: self.d, matrix: m }
    }

    /// Adds the local term A ⊗ 1 + 1 ⊗ A.
    pub fn with_local_term(&self, a: &CMatrix) -> Result<QuditHamiltonian> {
        let id = CMatrix::identity(self.d, self.d);
        let m = &self.matrix + a.kronecker(&id) + id.kronecker(a);
        QuditHamiltonian::new(self.d, m)
    }
}

/// SWAP|i j⟩ = |j i⟩.
pub fn swap_matrix(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
        }
    }
    s
}

fn root_of_unity(d: usize, power: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (power % d) as f64 / d as f64)
}

/// XᵃZᵇ on one qudit.
pub fn pauli_operator(d: usize, a: usize, b: usize) -> CMatrix {
    let mut p = CMatrix::zeros(d, d);
    for j in 0..d {
        p[((j + a) % d, j)] = root_of_unity(d, b * j);
    }
    p
}

/// Coefficients h_{ab;st} of H = Σ h_{ab;st} XᵃZᵇ ⊗ XˢZᵗ.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliCoefficients {
    d: usize,
    h: Vec<C64>,
}

impl PauliCoefficients {
    fn index(&self, a: usize, b: usize, s: usize, t: usize) -> usize {
        let d = self.d;
        ((a * d + b) * d + s) * d + t
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, a: usize, b: usize, s: usize, t: usize) -> C64 {
        self.h[self.index(a, b, s, t)]
    }

    /// All coefficients, ordered by (a, b, s, t) with t fastest.
    pub fn values(&self) -> &[C64] {
        &self.h
    }

    pub fn norm_sqr(&self) -> f64 {
        self.h.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Σ h_{ab;st} XᵃZᵇ ⊗ XˢZᵗ.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.d;
        let mut m = CMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                for s in 0..d {
                    for t in 0..d {
                        let c = self.get(a, b, s, t);
                        if c == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for j in 0..d {
                            for k in 0..d {
                                let row = ((j + a) % d) * d + (k + s) % d;
                                m[(row, j * d + k)] += c * root_of_unity(d, b * j + t * k);
                            }
                        }
                    }
                }
            }
        }
        m
    }

    /// max |h_{ab;st} − h_{st;ab}|.
    pub fn swap_residual(&self) -> f64 {
        let d = self.d;
        let mut worst: f64 = 0.0;
        for (a, b, s, t) in quadruples(d) {
            worst = worst.max((self.get(a, b, s, t) - self.get(s, t, a, b)).norm());
        }
        worst
    }

    /// max |h_{−a−b;−s−t} − h*_{ab;st} ω^{ab+st}|.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.d;
        let neg = |x: usize| (d - x) % d;
        let mut worst: f64 = 0.0;
        for (a, b, s, t) in quadruples(d) {
            let lhs = self.get(neg(a), neg(b), neg(s), neg(t));
            let rhs = self.get(a, b, s, t).conj() * root_of_unity(d, a * b + s * t);
            worst = worst.max((lhs - rhs).norm());
        }
        worst
    }
}

fn quadruples(d: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..d * d * d * d).map(move |i| (i / (d * d * d), (i / (d * d)) % d, (i / d) % d, i % d))
}

/// Coefficients via tr((XᵃZᵇ ⊗ XˢZᵗ)† H)/d².
pub fn pauli_decompose(h: &QuditHamiltonian) -> PauliCoefficients {
    let d = h.d;
    let m = &h.matrix;
    let mut out = PauliCoefficients { d, h: vec![C64::new(0.0, 0.0); d * d * d * d] };
    for (a, b, s, t) in quadruples(d) {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..d {
            for k in 0..d {
                let row = ((j + a) % d) * d + (k + s) % d;
                acc += root_of_unity(d, b * j + t * k).conj() * m[(row, j * d + k)];
            }
        }
        let idx = out.index(a, b, s, t);
        out.h[idx] = acc / (d * d) as f64;
    }
    out
}

/// Splits into the non-entangling part (a = b = 0 or s = t = 0) and the
/// interaction part.
pub fn split_local_interaction(c: &PauliCoefficients) -> (PauliCoefficients, PauliCoefficients) {
    let zero = C64::new(0.0, 0.0);
    let mut loc = c.clone();
    let mut int = c.clone();
    for (a, b, s, t) in quadruples(c.d) {
        let idx = c.index(a, b, s, t);
        if (a == 0 && b == 0) || (s == 0 && t == 0) {
            int.h[idx] = zero;
        } else {
            loc.h[idx] = zero;
        }
    }
    (loc, int)
}

/// tr₁ over the first qudit.
pub fn partial_trace_first(d: usize, m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(d, d);
    for j in 0..d {
        for s in 0..d {
            for k in 0..d {
                out[(s, k)] += m[(j * d + s, j * d + k)];
            }
        }
    }
    out
}

/// Ω = d²tr(H²) − 2d·tr((tr₁H)²) + (tr H)² for any d²×d² matrix, with
/// roundoff below 1e−10 of the d²tr(H²) scale set to zero.
pub fn entangling_power_matrix(d: usize, m: &CMatrix) -> Result<f64> {
    let df = d as f64;
    let tr_h2 = (m * m).trace().re;
    let p = partial_trace_first(d, m);
    let tr_p2 = (&p * &p).trace().re;
    let tr_h = m.trace();
    let omega = df * df * tr_h2 - 2.0 * df * tr_p2 + (tr_h * tr_h).re;
    let tol = OMEGA_TOL * (df * df * tr_h2).abs().max(1.0);
    if omega.abs() <= tol {
        return Ok(0.0);
    }
    if omega < 0.0 {
        return Err(Error::Internal(format!("entangling power {omega:e} is negative")));
    }
    Ok(omega)
}

pub fn entangling_power(h: &QuditHamiltonian) -> f64 {
    // validated input keeps Ω within roundoff of a non-negative squared norm
    entangling_power_matrix(h.d, &h.matrix).unwrap_or(0.0)
}

/// Ω, γ, Γ and, when a measurement rate is supplied, g = 2f/γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingRates {
    pub d: usize,
    pub omega: f64,
    pub gamma: f64,
    pub tumbling: f64,
    pub f: Option<f64>,
    pub g: Option<f64>,
}

pub fn coupling_rates(h: &QuditHamiltonian, f: Option<f64>) -> Result<CouplingRates> {
    let d = h.d as f64;
    let denom = (d * d - 1.0).powi(2);
    let omega = entangling_power_matrix(h.d, &h.matrix)?;
    let gamma = 2.0 * omega / denom;
    let p = partial_trace_first(h.d, &h.matrix);
    let tumbling = (2.0 * d * (&p * &p).trace().re / denom).max(0.0);
    let g = match f {
        None => None,
        Some(f) if !(f >= 0.0) => {
            return Err(Error::Parameter(format!("measurement rate f = {f} must be >= 0")))
        }
        Some(_) if gamma == 0.0 => return Err(Error::NonEntangling),
        Some(f) => Some(2.0 * f / gamma),
    };
    Ok(CouplingRates { d: h.d, omega, gamma, tumbling, f, g })
}

/// A random swap-symmetric Hermitian coupling with entries drawn uniformly
/// from [−1, 1]; `real` selects paper mode.
pub fn random_hamiltonian<R: Rng + ?Sized>(d: usize, real: bool, rng: &mut R) -> QuditHamiltonian {
    let n = d * d;
    let a = CMatrix::from_fn(n, n, |_, _| {
        let re = rng.random_range(-1.0..1.0);
        let im = if real { 0.0 } else { rng.random_range(-1.0..1.0) };
        C64::new(re, im)
    });
    let herm = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    let swap = swap_matrix(d);
    let m = (&herm + &swap * &herm * &swap) * C64::new(0.5, 0.0);
    QuditHamiltonian { d, matrix: m }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(d: usize, m: RMatrix) -> QuditHamiltonian {
        QuditHamiltonian::from_real(d, &m).unwrap()
    }

    fn sigma(which: char) -> RMatrix {
        match which {
            'x' => RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            'z' => RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
            _ => RMatrix::identity(2, 2),
        }
    }

    #[test]
    fn zz_is_a_single_pauli_string() {
        let h = real(2, sigma('z').kronecker(&sigma('z')));
        let c = pauli_decompose(&h);
        for (a, b, s, t) in quadruples(2) {
            let expect = if (a, b, s, t) == (0, 1, 0, 1) { 1.0 } else { 0.0 };
            assert!((c.get(a, b, s, t) - C64::new(expect, 0.0)).norm() < 1e-15);
        }
        assert_eq!(entangling_power(&h), 16.0);
        let r = coupling_rates(&h, Some(0.0)).unwrap();
        assert!((r.gamma - 32.0 / 9.0).abs() < 1e-14);
        assert_eq!(r.tumbling, 0.0);
        assert_eq!(r.g, Some(0.0));
    }

    #[test]
    fn local_field_has_no_gamma() {
        let x = sigma('x');
        let id = sigma('1');
        let h = real(2, x.kronecker(&id) + id.kronecker(&x));
        let r = coupling_rates(&h, None).unwrap();
        assert_eq!(r.omega, 0.0);
        assert_eq!(r.gamma, 0.0);
        assert!((r.tumbling - 32.0 / 9.0).abs() < 1e-14);
        assert_eq!(coupling_rates(&h, Some(1.0)), Err(Error::NonEntangling));
        let (loc, int) = split_local_interaction(&pauli_decompose(&h));
        assert!(int.norm_sqr() < 1e-28);
        assert!((loc.norm_sqr() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix() {
        let h = real(2, RMatrix::zeros(4, 4));
        let r = coupling_rates(&h, None).unwrap();
        assert_eq!((r.omega, r.gamma, r.tumbling), (0.0, 0.0, 0.0));
        assert!(pauli_decompose(&h).values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn validation_names_the_invariant() {
        let mut m = RMatrix::zeros(4, 4);
        m[(0, 1)] = 1.0;
        match QuditHamiltonian::from_real(2, &m) {
            Err(Error::Invariant { invariant, residual }) => {
                assert_eq!(invariant, "hermiticity");
                assert!(residual > 0.1);
            }
            other => panic!("unexpected {other:?}"),
        }
        let z = sigma('z');
        let id = sigma('1');
        match QuditHamiltonian::from_real(2, &z.kronecker(&id)) {
            Err(Error::Invariant { invariant, .. }) => assert_eq!(invariant, "swap symmetry"),
            other => panic!("unexpected {other:?}"),
        }
        let mut c = CMatrix::zeros(4, 4);
        c[(0, 3)] = C64::new(0.0, 1.0);
        c[(3, 0)] = C64::new(0.0, -1.0);
        assert!(QuditHamiltonian::new(2, c.clone()).is_ok());
        assert!(QuditHamiltonian::new_real(2, c).is_err());
    }

    #[test]
    fn pauli_commutation() {
        // ZX = ωXZ
        let d = 3;
        let x = pauli_operator(d, 1, 0);
        let z = pauli_operator(d, 0, 1);
        let lhs = &z * &x;
        let rhs = &x * &z * root_of_unity(d, 1);
        assert!(frobenius_c(&(lhs - rhs)) < 1e-14);
    }
}
