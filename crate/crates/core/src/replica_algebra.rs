//! Permutation-state algebra for k replicas.
//!
//! Permutations are in one-line notation, `p[i]` being the image of `i`, and
//! S_k is enumerated in lexicographic order so that the identity has index
//! 0 (and the swap index 1 for k = 2). A permutation state |σ⟩ pairs forward
//! copy i with backward copy σ(i); overlaps are ⟨σ|τ⟩ = d^{#cycles(σ⁻¹τ)}.
//!
//! Two-site operators act on the product basis (II, IS, SI, SS), index
//! 2·left + right. The measurement-extended site space is ordered
//! (I, S, X) with |X⟩ = |O⟩ − d/(d+1)(|I⟩ + |S⟩).

use nalgebra::{Complex, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{kron_all, operator_norm, spd_sqrt_pair, CMatrix, RMatrix};
use crate::micro_rates::QuditHamiltonian;

type C64 = Complex<f64>;

pub type Permutation = Vec<usize>;

/// S_k in lexicographic order.
pub fn permutations(k: usize) -> Vec<Permutation> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                extend(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

pub fn identity(k: usize) -> Permutation {
    (0..k).collect()
}

pub fn inverse(p: &[usize]) -> Permutation {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

/// (p∘q)(i) = p(q(i)).
pub fn compose(p: &[usize], q: &[usize]) -> Permutation {
    q.iter().map(|&i| p[i]).collect()
}

pub fn cycle_count(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut cycles = 0;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
        }
    }
    cycles
}

/// Cycle lengths in decreasing order.
pub fn cycle_type(p: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut lengths = Vec::new();
    for start in 0..p.len() {
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len > 0 {
            lengths.push(len);
        }
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    lengths
}

/// Number of positions where σ and τ differ.
pub fn hamming(sigma: &[usize], tau: &[usize]) -> usize {
    sigma.iter().zip(tau).filter(|(a, b)| a != b).count()
}

/// ⟨σ|τ⟩ = d^{#cycles(σ⁻¹τ)}.
pub fn overlap(sigma: &[usize], tau: &[usize], d: f64) -> f64 {
    d.powi(cycle_count(&compose(&inverse(sigma), tau)) as i32)
}

pub fn gram_matrix(k: usize, d: f64) -> RMatrix {
    let perms = permutations(k);
    RMatrix::from_fn(perms.len(), perms.len(), |i, j| overlap(&perms[i], &perms[j], d))
}

/// Inverse of the Gram matrix; singular for d < k.
pub fn weingarten_matrix(k: usize, d: f64) -> Result<RMatrix> {
    gram_matrix(k, d)
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("Gram matrix of S_{k} at d = {d}")))
}

/// 1/(d(d²−1)) · [[d, −1], [−1, d]].
pub fn weingarten_s2(d: f64) -> Result<RMatrix> {
    if !(d >= 2.0) {
        return Err(Error::Parameter(format!("d = {d} must be >= 2")));
    }
    let c = 1.0 / (d * (d * d - 1.0));
    Ok(RMatrix::from_row_slice(2, 2, &[c * d, -c, -c, c * d]))
}

/// Closed-form Weingarten function Wg(π, d) for k ≤ 3 and d ≥ k.
pub fn weingarten_function(p: &[usize], d: f64) -> Result<f64> {
    if !(d >= p.len() as f64) {
        return Err(Error::Singular(format!("Gram matrix of S_{} at d = {d}", p.len())));
    }
    let d2 = d * d;
    let value = match cycle_type(p).as_slice() {
        [1] => 1.0 / d,
        [1, 1] => 1.0 / (d2 - 1.0),
        [2] => -1.0 / (d * (d2 - 1.0)),
        [1, 1, 1] => (d2 - 2.0) / (d * (d2 - 1.0) * (d2 - 4.0)),
        [2, 1] => -1.0 / ((d2 - 1.0) * (d2 - 4.0)),
        [3] => 2.0 / (d * (d2 - 1.0) * (d2 - 4.0)),
        other => {
            return Err(Error::Parameter(format!("no closed form for cycle type {other:?}")))
        }
    };
    Ok(value)
}

/// A vector in the span of permutation states, coefficients indexed by
/// the lexicographic enumeration of S_k.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationVector {
    pub k: usize,
    pub coefficients: Vec<C64>,
}

impl PermutationVector {
    pub fn new(k: usize, coefficients: Vec<C64>) -> Result<Self> {
        let n = permutations(k).len();
        if coefficients.len() != n {
            return Err(Error::Parameter(format!(
                "{} coefficients given, S_{k} has {n} elements",
                coefficients.len()
            )));
        }
        Ok(PermutationVector { k, coefficients })
    }

    pub fn basis(k: usize, index: usize) -> Self {
        let n = permutations(k).len();
        let mut c = vec![C64::new(0.0, 0.0); n];
        c[index] = C64::new(1.0, 0.0);
        PermutationVector { k, coefficients: c }
    }

    /// ⟨self|other⟩ through the Gram matrix.
    pub fn inner(&self, other: &PermutationVector, d: f64) -> C64 {
        let g = gram_matrix(self.k, d);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.coefficients.len() {
            for j in 0..other.coefficients.len() {
                acc += self.coefficients[i].conj() * other.coefficients[j] * g[(i, j)];
            }
        }
        acc
    }

    /// Applies Σ_σ |σ⟩⟨σ*| with ⟨σ*| = Σ_τ Wg(στ⁻¹)⟨τ| from the k ≤ 3
    /// closed forms.
    pub fn resolve_identity(&self, d: f64) -> Result<PermutationVector> {
        let perms = permutations(self.k);
        let g = gram_matrix(self.k, d);
        let n = perms.len();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (s, sigma) in perms.iter().enumerate() {
            for (r, rho) in perms.iter().enumerate() {
                let w = weingarten_function(&compose(sigma, &inverse(rho)), d)?;
                for t in 0..n {
                    out[s] += self.coefficients[t] * (w * g[(r, t)]);
                }
            }
        }
        Ok(PermutationVector { k: self.k, coefficients: out })
    }
}

fn pauli_x() -> RMatrix {
    RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

fn pauli_z() -> RMatrix {
    RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// A two-site generator together with the rates that built it.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGenerator {
    /// Per-site dimension: 2 for (I, S), 3 for (I, S, X).
    pub dim: usize,
    pub matrix: RMatrix,
    pub gamma: f64,
    pub tumbling: f64,
    pub d: f64,
}

/// Ω · (Wg⊗Wg) · (1 − σz⊗σz).
pub fn pair_generator(omega: f64, d: f64) -> Result<PairGenerator> {
    if !(omega >= 0.0) {
        return Err(Error::Parameter(format!("omega = {omega} must be >= 0")));
    }
    let wg = weingarten_s2(d)?;
    let zz = pauli_z().kronecker(&pauli_z());
    let matrix = wg.kronecker(&wg) * (RMatrix::identity(4, 4) - zz) * omega;
    let gamma = 2.0 * omega / (d * d - 1.0).powi(2);
    Ok(PairGenerator { dim: 2, matrix, gamma, tumbling: 0.0, d })
}

/// (Wg^{−1/2}⊗Wg^{−1/2}) · gen · (Wg^{1/2}⊗Wg^{1/2}).
pub fn hermitize_generator(gen: &PairGenerator) -> Result<PairGenerator> {
    if gen.dim != 2 {
        return Err(Error::Parameter("hermitization is defined for the 2-state generator".into()));
    }
    let (s, si) = spd_sqrt_pair(&weingarten_s2(gen.d)?)?;
    let matrix = si.kronecker(&si) * &gen.matrix * s.kronecker(&s);
    Ok(PairGenerator { matrix, ..gen.clone() })
}

/// (d/(d+1)) · (1 + σx) on (I, S).
pub fn measurement_operator(d: f64) -> RMatrix {
    (RMatrix::identity(2, 2) + pauli_x()) * (d / (d + 1.0))
}

/// The measurement operator on (I, S, X). M sends I, S and O to O; in
/// the X frame O = X + c(I + S) with c = d/(d+1), and M|X⟩ = (1 − 2c)M|O⟩.
pub fn measurement_operator_extended(d: f64) -> RMatrix {
    let c = d / (d + 1.0);
    let image = [c, c, 1.0];
    let mut m = RMatrix::zeros(3, 3);
    for r in 0..3 {
        m[(r, 0)] = image[r];
        m[(r, 1)] = image[r];
        m[(r, 2)] = (1.0 - 2.0 * c) * image[r];
    }
    m
}

/// Coefficient change from the (I, S, X) frame to (I, S, O).
pub fn x_to_o_frame(d: f64) -> RMatrix {
    let c = d / (d + 1.0);
    RMatrix::from_row_slice(3, 3, &[1.0, 0.0, -c, 0.0, 1.0, -c, 0.0, 0.0, 1.0])
}

/// The 2×2 operator H_X acting on an (I, S) site whose neighbour is in |X⟩.
pub fn x_neighbour_operator(gamma: f64, tumbling: f64, d: f64) -> RMatrix {
    let d3 = d * d * d;
    let diag = tumbling * (d + 1.0) * (d * d - 1.0) / d3 + gamma * (1.0 - (d + 1.0) / d3);
    RMatrix::identity(2, 2) * diag + pauli_x() * (gamma / (d * d))
}

/// Energy of two neighbouring |X⟩ states.
pub fn xx_energy(gamma: f64, tumbling: f64, d: f64) -> f64 {
    let d2 = d * d;
    let r = d * (d2 - 1.0);
    gamma / d2 * (1.0 - 2.0 / r) + 2.0 * tumbling / d2 * (1.0 + (1.0 + d2) / r)
}

/// The 9×9 generator on (I, S, X)⊗(I, S, X), index 3·left + right.
pub fn extended_pair_generator(gamma: f64, tumbling: f64, d: f64) -> Result<PairGenerator> {
    if !(gamma >= 0.0 && tumbling >= 0.0) {
        return Err(Error::Parameter("rates must be >= 0".into()));
    }
    let omega = gamma * (d * d - 1.0).powi(2) / 2.0;
    let h2 = pair_generator(omega, d)?.matrix;
    let hx = x_neighbour_operator(gamma, tumbling, d);
    let mut m = RMatrix::zeros(9, 9);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for e in 0..2 {
                    m[(3 * a + b, 3 * c + e)] = h2[(2 * a + b, 2 * c + e)];
                }
            }
        }
    }
    for a in 0..2 {
        for c in 0..2 {
            m[(3 * 2 + a, 3 * 2 + c)] += hx[(a, c)];
            m[(3 * a + 2, 3 * c + 2)] += hx[(a, c)];
        }
    }
    m[(8, 8)] += xx_energy(gamma, tumbling, d);
    Ok(PairGenerator { dim: 3, matrix: m, gamma, tumbling, d })
}

/// Restriction of the extended generator to the X-free sector.
pub fn x_free_block(gen: &PairGenerator) -> RMatrix {
    let idx = [0usize, 1, 3, 4];
    RMatrix::from_fn(4, 4, |i, j| gen.matrix[(idx[i], idx[j])])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tumbling {
    Finite(f64),
    Infinite,
}

/// Open chain of `n` three-state sites: Σ bonds H^M − f Σ (M_i − 1).
pub fn extended_chain_generator(n: usize, gamma: f64, tumbling: f64, f: f64, d: f64) -> Result<RMatrix> {
    if !(2..=6).contains(&n) {
        return Err(Error::Size(format!("N = {n}: extended chain supports 2 <= N <= 6")));
    }
    let pair = extended_pair_generator(gamma, tumbling, d)?.matrix;
    let id = RMatrix::identity(3, 3);
    let dim = 3usize.pow(n as u32);
    let mut h = RMatrix::zeros(dim, dim);
    for i in 0..n - 1 {
        let mut factors = vec![id.clone(); n - 1];
        factors[i] = pair.clone();
        h += kron_all(&factors);
    }
    let local = measurement_operator_extended(d) - &id;
    for i in 0..n {
        let mut factors = vec![id.clone(); n];
        factors[i] = local.clone();
        h -= kron_all(&factors) * f;
    }
    Ok(h)
}

fn x_free_configurations(n: usize) -> Vec<usize> {
    (0..1usize << n)
        .map(|bits| (0..n).fold(0, |acc, i| acc * 3 + ((bits >> (n - 1 - i)) & 1)))
        .collect()
}

/// ‖P e^{−tH^M} P − e^{−t·PH^MP}‖₂ on the X-free sector, one value per Γ.
pub fn gamma_projection_deviation(
    n: usize,
    gamma: f64,
    f: f64,
    d: f64,
    t: f64,
    tumbling_values: &[Tumbling],
) -> Result<Vec<f64>> {
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("t = {t} must be >= 0")));
    }
    let idx = x_free_configurations(n);
    let m = idx.len();
    let mut out = Vec::with_capacity(tumbling_values.len());
    for tv in tumbling_values {
        let big = match *tv {
            Tumbling::Infinite => {
                out.push(0.0);
                continue;
            }
            Tumbling::Finite(g) => g,
        };
        let h = extended_chain_generator(n, gamma, big, f, d)?;
        let full = (&h * -t).exp();
        let compressed = RMatrix::from_fn(m, m, |i, j| full[(idx[i], idx[j])]);
        let projected = RMatrix::from_fn(m, m, |i, j| h[(idx[i], idx[j])]);
        out.push(operator_norm(&(compressed - (projected * -t).exp())));
    }
    Ok(out)
}

/// ⟨κ|⊗⟨ε| (U⊗U*)^{⊗k} |σ⟩⊗|τ⟩ with U = exp(−iH·dt), by explicit index
/// summation; (κ, σ) sit on the first qudit and (ε, τ) on the second.
pub fn contraction_oracle(
    h: &QuditHamiltonian,
    dt: f64,
    kappa: &[usize],
    epsilon: &[usize],
    sigma: &[usize],
    tau: &[usize],
) -> Result<C64> {
    let k = kappa.len();
    if [epsilon.len(), sigma.len(), tau.len()].iter().any(|&l| l != k) || k == 0 {
        return Err(Error::Parameter("permutations must share one degree k >= 1".into()));
    }
    let d = h.d();
    let terms = (d as f64).powi(4 * k as i32);
    if terms > 1e7 {
        return Err(Error::Size(format!("d^(4k) = {terms:e} exceeds 1e7")));
    }
    let u = unitary(h, dt);
    let dd = d * d;
    let entry = |c: usize, e: usize, a: usize, b: usize| u[(c * d + e, a * d + b)];
    let (ki, ei, si, ti) = (inverse(kappa), inverse(epsilon), inverse(sigma), inverse(tau));

    let mut digits = vec![0usize; 4 * k];
    let mut total = C64::new(0.0, 0.0);
    let count = dd.pow(2 * k as u32);
    for _ in 0..count {
        let (a, rest) = digits.split_at(k);
        let (b, rest) = rest.split_at(k);
        let (c, e) = rest.split_at(k);
        let mut p = C64::new(1.0, 0.0);
        for i in 0..k {
            p *= entry(c[i], e[i], a[i], b[i]);
        }
        for j in 0..k {
            p *= entry(c[ki[j]], e[ei[j]], a[si[j]], b[ti[j]]).conj();
        }
        total += p;
        for digit in digits.iter_mut() {
            *digit += 1;
            if *digit < d {
                break;
            }
            *digit = 0;
        }
    }
    Ok(total)
}

fn unitary(h: &QuditHamiltonian, dt: f64) -> CMatrix {
    let eig = SymmetricEigen::new(h.matrix().clone());
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, -l * dt)));
    v * phases * v.adjoint()
}

/// Polynomial content of a contraction value in dt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtFit {
    pub value0: C64,
    pub dt2: C64,
    pub dt1: C64,
    pub dt3: C64,
}

/// Fits the contraction value around dt = 0 using step `h`, `h/2`, `h/4`:
/// the dt² coefficient by two rounds of Richardson extrapolation, the
/// odd coefficients from the antisymmetric part v(dt) − v(−dt).
pub fn dt_fit(
    ham: &QuditHamiltonian,
    h: f64,
    kappa: &[usize],
    epsilon: &[usize],
    sigma: &[usize],
    tau: &[usize],
) -> Result<DtFit> {
    let v = |dt: f64| contraction_oracle(ham, dt, kappa, epsilon, sigma, tau);
    let v0 = v(0.0)?;
    let steps = [h, h / 2.0, h / 4.0];
    let mut even = [C64::new(0.0, 0.0); 3];
    let mut odd = [C64::new(0.0, 0.0); 3];
    for (i, &s) in steps.iter().enumerate() {
        let plus = v(s)?;
        let minus = v(-s)?;
        even[i] = ((plus + minus) * 0.5 - v0) / (s * s);
        odd[i] = (plus - minus) * 0.5;
    }
    let r1 = (even[1] * 4.0 - even[0]) / 3.0;
    let r2 = (even[2] * 4.0 - even[1]) / 3.0;
    let dt2 = (r2 * 16.0 - r1) / 15.0;
    let (o1, o2) = (odd[0] / h, odd[1] / (h / 2.0));
    let dt3 = (o1 - o2) / (0.75 * h * h);
    let dt1 = o2 - dt3 * (h * h / 4.0);
    Ok(DtFit { value0: v0, dt2, dt1, dt3 })
}

/// Shared-box counts between the chains of the left pair (σ, κ) and
/// those of the right pair (τ, ε).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPartition {
    pub k: usize,
    /// Forward boxes per (left chain, right chain).
    pub m: Vec<Vec<u32>>,
    /// Backward boxes per (left chain, right chain).
    pub m_bar: Vec<Vec<u32>>,
}

impl ChainPartition {
    pub fn frobenius_sq(&self) -> f64 {
        let mut acc = 0.0;
        for (row, row_bar) in self.m.iter().zip(&self.m_bar) {
            for (x, y) in row.iter().zip(row_bar) {
                let diff = *x as f64 - *y as f64;
                acc += diff * diff;
            }
        }
        acc
    }
}

/// Chains joining forward box i to backward boxes p(i) and q(i); returns a
/// chain label per box, forward boxes first.
fn chains(p: &[usize], q: &[usize]) -> (Vec<usize>, usize) {
    let k = p.len();
    let mut parent: Vec<usize> = (0..2 * k).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..k {
        for target in [p[i], q[i]] {
            let a = find(&mut parent, i);
            let b = find(&mut parent, k + target);
            parent[a] = b;
        }
    }
    let mut root_label = vec![usize::MAX; 2 * k];
    let mut next = 0;
    let labels = (0..2 * k)
        .map(|x| {
            let r = find(&mut parent, x);
            if root_label[r] == usize::MAX {
                root_label[r] = next;
                next += 1;
            }
            root_label[r]
        })
        .collect();
    (labels, next)
}

pub fn chain_partition(kappa: &[usize], epsilon: &[usize], sigma: &[usize], tau: &[usize]) -> ChainPartition {
    let k = kappa.len();
    let (left, nl) = chains(sigma, kappa);
    let (right, nr) = chains(tau, epsilon);
    let mut m = vec![vec![0u32; nr]; nl];
    let mut m_bar = vec![vec![0u32; nr]; nl];
    for b in 0..k {
        m[left[b]][right[b]] += 1;
        m_bar[left[k + b]][right[k + b]] += 1;
    }
    ChainPartition { k, m, m_bar }
}

/// The dt² correction of a k-replica unit-cell element.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaCorrection {
    pub partition: ChainPartition,
    pub frobenius_sq: f64,
    /// #cycles(κ⁻¹σ) and #cycles(ε⁻¹τ).
    pub overlap_cycles: (usize, usize),
}

impl ReplicaCorrection {
    /// −(1/(2d⁴)) · Ω · ⟨κ|σ⟩⟨ε|τ⟩ · ‖M − M̄‖².
    pub fn coefficient(&self, d: f64, omega: f64) -> f64 {
        let overlaps = d.powi((self.overlap_cycles.0 + self.overlap_cycles.1) as i32);
        -omega * overlaps * self.frobenius_sq / (2.0 * d.powi(4))
    }
}

pub fn replica_correction(kappa: &[usize], epsilon: &[usize], sigma: &[usize], tau: &[usize]) -> Result<ReplicaCorrection> {
    let k = kappa.len();
    let valid = |p: &[usize]| p.len() == k && inverse(p).len() == k && {
        let mut s = p.to_vec();
        s.sort_unstable();
        s == identity(k)
    };
    if k < 1 || ![kappa, epsilon, sigma, tau].iter().all(|p| valid(p)) {
        return Err(Error::Parameter("expected four permutations of one degree".into()));
    }
    let partition = chain_partition(kappa, epsilon, sigma, tau);
    let frobenius_sq = partition.frobenius_sq();
    let overlap_cycles = (
        cycle_count(&compose(&inverse(kappa), sigma)),
        cycle_count(&compose(&inverse(epsilon), tau)),
    );
    Ok(ReplicaCorrection { partition, frobenius_sq, overlap_cycles })
}

/// Effective Hamiltonian of n replicas on an open chain of `sites` sites:
/// (γ/2) Σ D(σᵢ, σᵢ₊₁) − f Σ M⁽ⁿ⁾ᵢ with D the Hamming distance and
/// M⁽ⁿ⁾ the all-ones matrix on S_n.
pub fn replica_hamiltonian(n: usize, sites: usize, gamma: f64, f: f64) -> Result<RMatrix> {
    let perms = permutations(n);
    let q = perms.len();
    let dim = (q as f64).powi(sites as i32);
    if dim > 1e4 || sites == 0 {
        return Err(Error::Size(format!("(n!)^N = {dim} exceeds 1e4")));
    }
    let dim = dim as usize;
    let config = |mut idx: usize| {
        let mut c = vec![0; sites];
        for i in (0..sites).rev() {
            c[i] = idx % q;
            idx /= q;
        }
        c
    };
    let mut h = RMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let c = config(idx);
        let pair: usize = (0..sites - 1).map(|i| hamming(&perms[c[i]], &perms[c[i + 1]])).sum();
        h[(idx, idx)] += 0.5 * gamma * pair as f64;
    }
    let ones = RMatrix::from_element(q, q, 1.0);
    let id = RMatrix::identity(q, q);
    for i in 0..sites {
        let mut factors = vec![id.clone(); sites];
        factors[i] = ones.clone();
        h -= kron_all(&factors) * f;
    }
    Ok(h)
}

/// Representation of σ ↦ πσ (left) or σ ↦ σπ (right) on every site.
pub fn global_action(n: usize, sites: usize, pi: &[usize], left: bool) -> RMatrix {
    let perms = permutations(n);
    let q = perms.len();
    let position = |p: &Permutation| perms.iter().position(|x| x == p).expect("permutation of S_n");
    let local = RMatrix::from_fn(q, q, |r, c| {
        let image = if left { compose(pi, &perms[c]) } else { compose(&perms[c], pi) };
        if position(&image) == r {
            1.0
        } else {
            0.0
        }
    });
    kron_all(&vec![local; sites])
}
