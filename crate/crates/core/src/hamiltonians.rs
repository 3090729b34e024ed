//! Problem and mixer Hamiltonians, their compression to a standard-basis
//! selection, and the closed-form mixer unitary.
//!
//! `H_P` is diagonal with entry `x` equal to the number of clauses satisfied
//! by `x`; `H_B = Σ_j X_j` has a 1 exactly at Hamming-distance-1 pairs. For a
//! selection `S` of basis states the compressed operators `S^H H S` are the
//! principal submatrices on the selected indices, so neither full operator is
//! ever formed on the production path.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::cnf::{count_satisfied, CnfFormula};
use crate::modelcount::ModelSet;
use crate::numerics::{
    apply_single_qubit_gate_in_place, mixer_gate, ComplexVector, DenseMatrix, DiagonalUnitary,
    HermitianEigen, HermitianMatrix, UnitaryMatrix,
};
use crate::{Error, Real, Result};

/// Dense full-space oracles refuse larger instances.
pub const DENSE_ORACLE_MAX_QUBITS: usize = 14;

/// Strictly ascending computational-basis indices spanning a subspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionBasis {
    n: usize,
    indices: Vec<u64>,
}

impl SelectionBasis {
    pub fn new(n: usize, indices: Vec<u64>) -> Result<Self> {
        if n > crate::cnf::MAX_VARIABLES {
            return Err(Error::TooManyVariables { n, limit: crate::cnf::MAX_VARIABLES });
        }
        if let Some(&last) = indices.last() {
            if last >> n != 0 {
                return Err(Error::InvalidBasis(format!("index {last} outside [0, 2^{n})")));
            }
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBasis("indices must be strictly ascending".into()));
        }
        Ok(Self { n, indices })
    }

    /// Every basis state: `S = I`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, (0..1u64 << n).collect())
    }

    /// Basis spanned by the models of a formula. Fails if the enumeration was
    /// truncated, since the subspace would be incomplete.
    pub fn from_models(models: &ModelSet) -> Result<Self> {
        if models.truncated {
            return Err(Error::ModelCapExceeded { cap: models.models.len() });
        }
        Self::new(models.n, models.models.clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Subspace dimension `d`.
    pub fn d(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn full_dim(&self) -> usize {
        1usize << self.n
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    /// Position of basis state `x` within the selection.
    pub fn position(&self, x: u64) -> Option<usize> {
        self.indices.binary_search(&x).ok()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.position(x).is_some()
    }

    /// `P_Z = S S^H` as a dense `2^n x 2^n` matrix (oracle use).
    pub fn projector<T: Real>(&self) -> Result<DenseMatrix<T>> {
        guard_dense(self.n)?;
        let mut p = DenseMatrix::zeros(self.full_dim(), self.full_dim());
        for &x in &self.indices {
            p.set(x as usize, x as usize, Complex::new(T::one(), T::zero()));
        }
        Ok(p)
    }

    /// `S` as a dense `2^n x d` matrix of selected standard basis columns.
    pub fn embedding<T: Real>(&self) -> Result<DenseMatrix<T>> {
        guard_dense(self.n)?;
        let mut s = DenseMatrix::zeros(self.full_dim(), self.d());
        for (a, &x) in self.indices.iter().enumerate() {
            s.set(x as usize, a, Complex::new(T::one(), T::zero()));
        }
        Ok(s)
    }
}

fn guard_dense(n: usize) -> Result<()> {
    if n > DENSE_ORACLE_MAX_QUBITS {
        return Err(Error::TooLarge { n, limit: DENSE_ORACLE_MAX_QUBITS });
    }
    Ok(())
}

/// Real diagonal operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalHamiltonian<T> {
    diag: Vec<T>,
}

impl<T: Real> DiagonalHamiltonian<T> {
    pub fn new(diag: Vec<T>) -> Self {
        Self { diag }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diag
    }

    /// `exp(-i t H)`.
    pub fn unitary(&self, t: T) -> DiagonalUnitary<T> {
        DiagonalUnitary::from_hamiltonian(&self.diag, t)
    }

    pub fn to_hermitian(&self) -> HermitianMatrix<T> {
        HermitianMatrix::from_real_diagonal(&self.diag)
    }

    /// `<v|H|v>`.
    pub fn expectation(&self, v: &ComplexVector<T>) -> Result<T> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: v.dim() });
        }
        Ok(v.iter().zip(&self.diag).map(|(a, &h)| a.norm_sqr() * h).sum())
    }
}

/// `<x|H_P|x>`: clauses of `f` satisfied by `x`, computed in `O(m)`.
#[inline]
pub fn hp_entry<T: Real>(f: &CnfFormula, x: u64) -> T {
    T::from_count(count_satisfied(f, x))
}

/// The full `2^n` diagonal of `H_P`. Only for oracle-scale `n`.
pub fn hp_diagonal<T: Real>(f: &CnfFormula) -> Result<DiagonalHamiltonian<T>> {
    if f.n() > crate::modelcount::BRUTE_FORCE_MAX_VARIABLES {
        return Err(Error::TooLarge { n: f.n(), limit: crate::modelcount::BRUTE_FORCE_MAX_VARIABLES });
    }
    Ok(DiagonalHamiltonian::new((0..1u64 << f.n()).map(|x| hp_entry(f, x)).collect()))
}

#[inline]
pub fn hamming_distance(k: u64, l: u64) -> u32 {
    (k ^ l).count_ones()
}

/// `<k|H_B|l>` for `H_B = Σ_j X_j`: 1 at Hamming distance one, else 0.
/// `n` only bounds the indices.
#[inline]
pub fn hb_entry<T: Real>(k: u64, l: u64, n: usize) -> T {
    debug_assert!(k >> n == 0 && l >> n == 0);
    if hamming_distance(k, l) == 1 {
        T::one()
    } else {
        T::zero()
    }
}

/// `<k|exp(-i δ H_B)|l> = cos(δ)^(n - h) (-i sin δ)^h` with `h` the Hamming
/// distance of `k` and `l`.
pub fn ub_entry<T: Real>(k: u64, l: u64, n: usize, delta: T) -> Complex<T> {
    let h = hamming_distance(k, l) as i32;
    let magnitude = delta.cos().powi(n as i32 - h) * delta.sin().powi(h);
    // (-i)^h cycles through 1, -i, -1, i.
    match h % 4 {
        0 => Complex::new(magnitude, T::zero()),
        1 => Complex::new(T::zero(), -magnitude),
        2 => Complex::new(-magnitude, T::zero()),
        _ => Complex::new(T::zero(), magnitude),
    }
}

/// `exp(-i δ H_B) ψ` as one `exp(-i δ X)` per qubit, `O(n 2^n)`.
pub fn apply_ub_full<T: Real>(state: &ComplexVector<T>, delta: T) -> Result<ComplexVector<T>> {
    let mut out = state.clone();
    apply_ub_full_in_place(out.as_mut_slice(), delta)?;
    Ok(out)
}

pub fn apply_ub_full_in_place<T: Real>(amplitudes: &mut [Complex<T>], delta: T) -> Result<()> {
    let n = crate::numerics::qubit_count(amplitudes.len())?;
    let gate = mixer_gate(delta);
    for q in 0..n {
        apply_single_qubit_gate_in_place(amplitudes, &gate, q)?;
    }
    Ok(())
}

/// Dense `H_B` on `n` qubits (oracle use).
pub fn hb_full_matrix<T: Real>(n: usize) -> Result<HermitianMatrix<T>> {
    guard_dense(n)?;
    let dim = 1usize << n;
    HermitianMatrix::new(DenseMatrix::from_real_fn(dim, dim, |k, l| hb_entry(k as u64, l as u64, n)))
}

/// Dense `exp(-i δ H_B)` from the closed form (oracle use).
pub fn ub_full_matrix<T: Real>(n: usize, delta: T) -> Result<DenseMatrix<T>> {
    guard_dense(n)?;
    let dim = 1usize << n;
    Ok(DenseMatrix::from_fn(dim, dim, |k, l| ub_entry(k as u64, l as u64, n, delta)))
}

/// Dense `H_P` (oracle use).
pub fn hp_full_matrix<T: Real>(f: &CnfFormula) -> Result<HermitianMatrix<T>> {
    guard_dense(f.n())?;
    Ok(hp_diagonal::<T>(f)?.to_hermitian())
}

/// `S^H H S` for a standard-basis selection: the principal submatrix.
pub fn reduce_dense<T: Real>(h: &HermitianMatrix<T>, basis: &SelectionBasis) -> Result<HermitianMatrix<T>> {
    if h.dim() != basis.full_dim() {
        return Err(Error::DimensionMismatch { expected: basis.full_dim(), actual: h.dim() });
    }
    let idx: Vec<usize> = basis.indices().iter().map(|&x| x as usize).collect();
    Ok(h.principal_submatrix(&idx))
}

/// `S^H H S` for an arbitrary isometry `S` (`2^n x d`, orthonormal columns)
/// by dense products, `O(d 4^n)`. Oracle helper for `n <= 10`.
pub fn reduce_general<T: Real>(h: &HermitianMatrix<T>, s: &DenseMatrix<T>) -> Result<HermitianMatrix<T>> {
    if s.rows() > 1 << 10 {
        return Err(Error::TooLarge { n: crate::numerics::qubit_count(s.rows()).unwrap_or(usize::MAX), limit: 10 });
    }
    let hs = h.matrix().matmul(s)?;
    let reduced = s.adjoint().matmul(&hs)?;
    // Rounding in the products can leave ulp-level asymmetry.
    let sym = DenseMatrix::from_fn(reduced.rows(), reduced.cols(), |i, j| {
        (reduced.get(i, j) + reduced.get(j, i).conj()) * T::lit(0.5)
    });
    HermitianMatrix::new(sym)
}

/// Compressed problem and mixer Hamiltonians with their unitaries for a
/// fixed time step.
#[derive(Clone, Debug)]
pub struct ReducedOperators<T> {
    basis: Arc<SelectionBasis>,
    hp_red: DiagonalHamiltonian<T>,
    hb_red: HermitianMatrix<T>,
    hb_eigen: HermitianEigen<T>,
    delta: T,
    up_red: DiagonalUnitary<T>,
    ub_red: UnitaryMatrix<T>,
}

/// Builds `Ĥ_P = S^H H_P S`, `Ĥ_B = S^H H_B S` and their exponentials for
/// step `delta`.
///
/// Entry cost is `O(m)` for `Ĥ_P` and `O(1)` for `Ĥ_B`, `O(d^2)` entries in
/// total, plus one `d x d` eigendecomposition. An empty basis gives empty
/// operators.
pub fn build_reduced<T: Real>(
    f_problem: &CnfFormula,
    basis: impl Into<Arc<SelectionBasis>>,
    delta: T,
) -> Result<ReducedOperators<T>> {
    let basis = basis.into();
    if basis.n() != f_problem.n() {
        return Err(Error::BasisMismatch { basis_n: basis.n(), formula_n: f_problem.n() });
    }
    let idx = basis.indices();
    let d = idx.len();
    let hp_red = DiagonalHamiltonian::new(idx.iter().map(|&x| hp_entry(f_problem, x)).collect());
    let mut hb = DenseMatrix::zeros(d, d);
    let one = Complex::new(T::one(), T::zero());
    for a in 0..d {
        for b in (a + 1)..d {
            if hamming_distance(idx[a], idx[b]) == 1 {
                hb.set(a, b, one);
                hb.set(b, a, one);
            }
        }
    }
    let hb_red = HermitianMatrix::new(hb)?;
    let hb_eigen = hb_red.eigen();
    let up_red = hp_red.unitary(delta);
    let ub_red = hb_eigen.unitary(delta);
    Ok(ReducedOperators { basis, hp_red, hb_red, hb_eigen, delta, up_red, ub_red })
}

impl<T: Real> ReducedOperators<T> {
    /// Same compressed Hamiltonians, unitaries for a different step. Reuses
    /// the eigendecomposition of `Ĥ_B`.
    pub fn with_delta(&self, delta: T) -> Self {
        Self {
            basis: Arc::clone(&self.basis),
            hp_red: self.hp_red.clone(),
            hb_red: self.hb_red.clone(),
            hb_eigen: self.hb_eigen.clone(),
            delta,
            up_red: self.hp_red.unitary(delta),
            ub_red: self.hb_eigen.unitary(delta),
        }
    }

    pub fn basis(&self) -> &Arc<SelectionBasis> {
        &self.basis
    }

    pub fn d(&self) -> usize {
        self.basis.d()
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn hp_red(&self) -> &DiagonalHamiltonian<T> {
        &self.hp_red
    }

    pub fn hb_red(&self) -> &HermitianMatrix<T> {
        &self.hb_red
    }

    pub fn up_red(&self) -> &DiagonalUnitary<T> {
        &self.up_red
    }

    pub fn ub_red(&self) -> &UnitaryMatrix<T> {
        &self.ub_red
    }

    /// Index pairs `(a, b)`, `a < b`, where `Ĥ_B` has a 1.
    pub fn adjacency(&self) -> Vec<(usize, usize)> {
        let d = self.d();
        let mut pairs = Vec::new();
        for a in 0..d {
            for b in (a + 1)..d {
                if self.hb_red.get(a, b).re != T::zero() {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }

    pub fn export(&self) -> ReducedExport {
        ReducedExport {
            schema_version: crate::SCHEMA_VERSION,
            n: self.basis.n(),
            full_dim: self.basis.full_dim() as u64,
            d: self.d(),
            delta: self.delta.as_f64(),
            indices: self.basis.indices().to_vec(),
            hp_diagonal: self.hp_red.diagonal().iter().map(|x| x.as_f64()).collect(),
            hb_adjacency: self.adjacency(),
        }
    }
}

/// JSON view of [`ReducedOperators`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedExport {
    pub schema_version: u32,
    pub n: usize,
    pub full_dim: u64,
    pub d: usize,
    pub delta: f64,
    pub indices: Vec<u64>,
    pub hp_diagonal: Vec<f64>,
    pub hb_adjacency: Vec<(usize, usize)>,
}
