//! Dense Fock-space construction of Gaussian fermionic states, used to
//! check the correlation-matrix formulas.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{kron_all, symmetric_function, RMatrix};

pub const MAX_FOCK_MODES: usize = 6;

/// Jordan-Wigner annihilators a_i = Z ⊗ … ⊗ Z ⊗ σ⁻ ⊗ 1 ⊗ … on 2^N states,
/// mode 0 most significant.
pub fn annihilators(n: usize) -> Result<Vec<RMatrix>> {
    if n == 0 || n > MAX_FOCK_MODES {
        return Err(Error::Size(format!("Fock oracle supports 1..={MAX_FOCK_MODES} modes, got {n}")));
    }
    let lower = RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let z = RMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]));
    let id = RMatrix::identity(2, 2);
    Ok((0..n)
        .map(|i| {
            let factors: Vec<RMatrix> = (0..n)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => z.clone(),
                    std::cmp::Ordering::Equal => lower.clone(),
                    std::cmp::Ordering::Greater => id.clone(),
                })
                .collect();
            kron_all(&factors)
        })
        .collect())
}

/// α = (a₀ … a_{N−1}, a₀† … a_{N−1}†).
pub fn mode_vector(n: usize) -> Result<Vec<RMatrix>> {
    let a = annihilators(n)?;
    let mut alpha = a.clone();
    alpha.extend(a.iter().map(|x| x.transpose()));
    Ok(alpha)
}

/// Random W = [[A, B], [−B, −A]], A symmetric, B antisymmetric, entries
/// of size `scale`.
pub fn random_generator<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> RMatrix {
    let mut w = RMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..=i {
            let a = scale * rng.random_range(-1.0..1.0);
            w[(i, j)] = a;
            w[(j, i)] = a;
            w[(n + i, n + j)] = -a;
            w[(n + j, n + i)] = -a;
            if i != j {
                let b = scale * rng.random_range(-1.0..1.0);
                w[(i, n + j)] = b;
                w[(j, n + i)] = -b;
                w[(n + i, j)] = -b;
                w[(n + j, i)] = b;
            }
        }
    }
    w
}

/// ρ = exp(½ α†Wα)/Z.
pub fn gaussian_state(w: &RMatrix) -> Result<RMatrix> {
    let n = w.nrows() / 2;
    let alpha = mode_vector(n)?;
    let dim = 1 << n;
    let mut q = RMatrix::zeros(dim, dim);
    for m in 0..2 * n {
        for k in 0..2 * n {
            if w[(m, k)] != 0.0 {
                q += (alpha[m].transpose() * &alpha[k]) * (0.5 * w[(m, k)]);
            }
        }
    }
    let q = (&q + q.transpose()) * 0.5;
    let rho = symmetric_function(&q, f64::exp);
    let tr = rho.trace();
    Ok(rho / tr)
}

/// Γ_{μν} = 2 Tr(ρ α_ν† α_μ)/Tr ρ − δ_{μν}; ρ need not be Hermitian.
pub fn correlation(rho: &RMatrix) -> Result<RMatrix> {
    let n = rho.nrows().trailing_zeros() as usize;
    let alpha = mode_vector(n)?;
    let tr = rho.trace();
    Ok(RMatrix::from_fn(2 * n, 2 * n, |m, k| {
        let op = alpha[k].transpose() * &alpha[m];
        2.0 * (rho * op).trace() / tr - if m == k { 1.0 } else { 0.0 }
    }))
}

pub fn trace_product(a: &RMatrix, b: &RMatrix) -> f64 {
    (a * b).trace()
}
