//! Small dense-matrix helpers on top of nalgebra.

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use rug::{Assign, Float};

use crate::error::{Error, Result};

pub type RMatrix = DMatrix<f64>;
pub type CMatrix = DMatrix<Complex<f64>>;

pub fn frobenius(m: &RMatrix) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn frobenius_c(m: &CMatrix) -> f64 {
    m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product of a list of factors, first factor most significant.
pub fn kron_all(factors: &[RMatrix]) -> RMatrix {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

/// `op` acting on `site` of an `n`-site chain with local dimension
/// `op.nrows()`; site 0 is the most significant factor.
pub fn site_operator(op: &RMatrix, site: usize, n: usize) -> RMatrix {
    let q = op.nrows();
    let id = RMatrix::identity(q, q);
    let factors: Vec<RMatrix> = (0..n).map(|i| if i == site { op.clone() } else { id.clone() }).collect();
    kron_all(&factors)
}

/// Applies `f` to the eigenvalues of a real symmetric matrix.
pub fn symmetric_function(m: &RMatrix, f: impl Fn(f64) -> f64) -> RMatrix {
    let eig = SymmetricEigen::new(m.clone());
    let v = &eig.eigenvectors;
    let d = RMatrix::from_diagonal(&eig.eigenvalues.map(f));
    v * d * v.transpose()
}

/// Symmetric positive-definite square root and inverse square root.
pub fn spd_sqrt_pair(m: &RMatrix) -> Result<(RMatrix, RMatrix)> {
    let eig = SymmetricEigen::new(m.clone());
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Internal("matrix is not positive definite".into()));
    }
    let v = &eig.eigenvectors;
    let s = RMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let si = RMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    Ok((v * s * v.transpose(), v * si * v.transpose()))
}

/// ln|det m| from a partially pivoted LU factorization, accumulating the
/// logarithm pivot by pivot. Returns −∞ when a pivot falls below
/// `tol · max|m|`.
pub fn log_abs_det(m: &RMatrix, tol: f64) -> f64 {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let lu = m.clone().lu();
    let u = lu.u();
    let mut acc = 0.0;
    for i in 0..u.nrows() {
        let p = u[(i, i)].abs();
        if p <= tol * scale {
            return f64::NEG_INFINITY;
        }
        acc += p.ln();
    }
    acc
}

/// Operator 2-norm via the largest singular value.
pub fn operator_norm(m: &RMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

pub fn commutator_norm(a: &RMatrix, b: &RMatrix) -> f64 {
    frobenius(&(a * b - b * a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mp_eigen_and_det_match_f64() {
        let m = RMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        let (vals, v) = mp_symmetric_eigen(&m, 200);
        let mut got: Vec<f64> = vals.iter().map(|x| x.to_f64()).collect();
        got.sort_by(f64::total_cmp);
        let mut want: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-13);
        }
        let vtv = mp_mul(&mp_transpose(&v), &v);
        for i in 0..3 {
            for j in 0..3 {
                let e = vtv.at(i, j).to_f64() - if i == j { 1.0 } else { 0.0 };
                assert!(e.abs() < 1e-50);
            }
        }
        let direct = m.determinant().abs().ln();
        assert!((mp_log_abs_det(MpMatrix::from_f64(&m, 200)) - direct).abs() < 1e-14);
        assert_eq!(mp_log_abs_det(MpMatrix::from_f64(&RMatrix::zeros(2, 2), 100)), f64::NEG_INFINITY);
    }

    #[test]
    fn log_det_matches_direct() {
        let m = RMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        let direct = m.determinant().abs().ln();
        assert!((log_abs_det(&m, 1e-14) - direct).abs() < 1e-13);
    }

    #[test]
    fn singular_gives_neg_infinity() {
        let m = RMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(log_abs_det(&m, 1e-14), f64::NEG_INFINITY);
    }

    #[test]
    fn sqrt_pair_inverts() {
        let m = RMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        let (s, si) = spd_sqrt_pair(&m).unwrap();
        assert!(frobenius(&(&s * &s - &m)) < 1e-14);
        assert!(frobenius(&(&s * &si - RMatrix::identity(2, 2))) < 1e-14);
    }
}

/// Square matrix of `rug` floats, row-major.
#[derive(Debug, Clone)]
pub struct MpMatrix {
    pub n: usize,
    pub data: Vec<Float>,
}

impl MpMatrix {
    pub fn from_f64(m: &RMatrix, bits: u32) -> Self {
        let n = m.nrows();
        MpMatrix { n, data: (0..n * n).map(|i| Float::with_val(bits, m[(i / n, i % n)])).collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> &Float {
        &self.data[i * self.n + j]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut Float {
        &mut self.data[i * self.n + j]
    }
}

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix carried
/// at `bits` of precision. Returns the eigenvalues and the eigenvector
/// matrix, eigenvectors in columns. The sweep starts from the f64
/// eigenbasis, so only a few quadratically convergent sweeps are needed.
pub fn mp_symmetric_eigen(m: &RMatrix, bits: u32) -> (Vec<Float>, MpMatrix) {
    let n = m.nrows();
    let start = SymmetricEigen::new(m.clone()).eigenvectors;
    let mut v = MpMatrix::from_f64(&start, bits);
    orthonormalize_columns(&mut v);
    orthonormalize_columns(&mut v);
    let mut a = MpMatrix::from_f64(m, bits);
    a = mp_mul(&mp_mul(&mp_transpose(&v), &a), &v);
    let frob2 = Float::with_val(bits, m.iter().map(|x| x * x).sum::<f64>());
    let tol = Float::with_val(bits, &frob2 * Float::with_val(bits, Float::i_exp(1, -2 * bits as i32)));
    let mut tmp = Float::new(bits);
    let mut scratch = [Float::new(bits), Float::new(bits), Float::new(bits)];
    for _sweep in 0..100 {
        let mut off = Float::new(bits);
        for p in 0..n {
            for q in p + 1..n {
                tmp.assign(a.at(p, q).square_ref());
                off += &tmp;
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a.at(p, q).is_zero() {
                    continue;
                }
                let tau = Float::with_val(bits, a.at(q, q) - a.at(p, p)) / Float::with_val(bits, a.at(p, q) * 2u32);
                let root = (Float::with_val(bits, tau.square_ref()) + 1u32).sqrt();
                let mut t = (Float::with_val(bits, tau.abs_ref()) + &root).recip();
                if tau.is_sign_negative() {
                    t = -t;
                }
                let c = (Float::with_val(bits, t.square_ref()) + 1u32).sqrt().recip();
                let s = Float::with_val(bits, &t * &c);
                for k in 0..n {
                    rotate(&mut a, (k, p), (k, q), &c, &s, &mut scratch);
                }
                for k in 0..n {
                    rotate(&mut a, (p, k), (q, k), &c, &s, &mut scratch);
                }
                for k in 0..n {
                    rotate(&mut v, (k, p), (k, q), &c, &s, &mut scratch);
                }
                a.at_mut(p, q).assign(0u32);
                a.at_mut(q, p).assign(0u32);
            }
        }
    }
    let values = (0..n).map(|i| a.at(i, i).clone()).collect();
    (values, v)
}

/// Modified Gram-Schmidt on the columns.
fn orthonormalize_columns(v: &mut MpMatrix) {
    let n = v.n;
    let bits = v.data[0].prec();
    let mut tmp = Float::new(bits);
    for j in 0..n {
        for i in 0..j {
            let mut dot = Float::new(bits);
            for k in 0..n {
                tmp.assign(v.at(k, i) * v.at(k, j));
                dot += &tmp;
            }
            for k in 0..n {
                tmp.assign(&dot * v.at(k, i));
                *v.at_mut(k, j) -= &tmp;
            }
        }
        let mut norm = Float::new(bits);
        for k in 0..n {
            tmp.assign(v.at(k, j).square_ref());
            norm += &tmp;
        }
        norm.sqrt_mut();
        for k in 0..n {
            *v.at_mut(k, j) /= &norm;
        }
    }
}

/// (x, y) ← (c·x − s·y, s·x + c·y).
fn rotate(a: &mut MpMatrix, x: (usize, usize), y: (usize, usize), c: &Float, s: &Float, w: &mut [Float; 3]) {
    let [u, v, tmp] = w;
    u.assign(c * a.at(x.0, x.1));
    tmp.assign(s * a.at(y.0, y.1));
    *u -= &*tmp;
    v.assign(s * a.at(x.0, x.1));
    tmp.assign(c * a.at(y.0, y.1));
    *v += &*tmp;
    std::mem::swap(a.at_mut(x.0, x.1), u);
    std::mem::swap(a.at_mut(y.0, y.1), v);
}

pub fn mp_transpose(a: &MpMatrix) -> MpMatrix {
    let n = a.n;
    MpMatrix { n, data: (0..n * n).map(|i| a.at(i % n, i / n).clone()).collect() }
}

pub fn mp_mul(a: &MpMatrix, b: &MpMatrix) -> MpMatrix {
    let n = a.n;
    let bits = a.data.first().map_or(64, |x| x.prec());
    let mut tmp = Float::new(bits);
    let data = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let mut acc = Float::new(bits);
            for k in 0..n {
                tmp.assign(a.at(i, k) * b.at(k, j));
                acc += &tmp;
            }
            acc
        })
        .collect();
    MpMatrix { n, data }
}

/// ln|det m| by Gaussian elimination with partial pivoting; −∞ for an
/// exactly singular matrix.
pub fn mp_log_abs_det(mut m: MpMatrix) -> f64 {
    let n = m.n;
    if n == 0 {
        return 0.0;
    }
    let bits = m.data[0].prec();
    let mut acc = Float::new(bits);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m.at(i, col).cmp_abs(m.at(j, col)).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        if m.at(piv, col).is_zero() {
            return f64::NEG_INFINITY;
        }
        if piv != col {
            for k in 0..n {
                m.data.swap(piv * n + k, col * n + k);
            }
        }
        let pivot = m.at(col, col).clone();
        acc += Float::with_val(bits, pivot.abs_ref()).ln();
        for r in col + 1..n {
            if m.at(r, col).is_zero() {
                continue;
            }
            let factor = Float::with_val(bits, m.at(r, col) / &pivot);
            for k in col + 1..n {
                let sub = Float::with_val(bits, &factor * m.at(col, k));
                *m.at_mut(r, k) -= sub;
            }
        }
    }
    acc.to_f64()
}
