//! Compression to and lifting from a Zeno subspace.
//!
//! For `P_Z = S S^H` and `H_Z = P_Z H P_Z`, the component `r = (I - P_Z) ψ_0`
//! never moves, and `exp(-i t H_Z) ψ_0 - r = S exp(-i t S^H H S) S^H ψ_0`.
//! [`compress`] and [`lift`] are the `S^H` and `S` halves of that identity;
//! [`zeno_full_reference`] evaluates the left-hand side densely so the two
//! can be compared.

use std::sync::Arc;

use num_complex::Complex;

use crate::hamiltonians::SelectionBasis;
use crate::numerics::{expm_multiply_taylor, qubit_count, ComplexVector, HermitianMatrix, LinearOperator};
use crate::{Error, Real, Result};

/// Dense Zeno references refuse larger instances.
pub const ZENO_ORACLE_MAX_QUBITS: usize = 12;

/// Normalized state on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct FullState<T> {
    n: usize,
    amplitudes: ComplexVector<T>,
}

impl<T: Real> FullState<T> {
    /// Requires a power-of-two dimension and unit norm within `1e-10`.
    pub fn new(amplitudes: ComplexVector<T>) -> Result<Self> {
        let n = qubit_count(amplitudes.dim())?;
        let norm_sq = amplitudes.norm_sqr();
        if !((norm_sq - T::one()).abs() <= T::unitary_tol()) {
            return Err(Error::NotNormalized { norm_sq: norm_sq.as_f64() });
        }
        Ok(Self { n, amplitudes })
    }

    pub(crate) fn from_raw(n: usize, amplitudes: ComplexVector<T>) -> Self {
        debug_assert_eq!(amplitudes.dim(), 1 << n);
        Self { n, amplitudes }
    }

    /// `|x>`.
    pub fn basis_state(n: usize, x: u64) -> Self {
        Self::from_raw(n, ComplexVector::basis(1 << n, x as usize))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.dim()
    }

    pub fn amplitudes(&self) -> &ComplexVector<T> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> ComplexVector<T> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.norm_sqr()
    }

    /// Infinity-norm distance.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.amplitudes.max_abs_diff(&other.amplitudes)
    }
}

/// Amplitudes in the coordinates of a selection basis. Its norm is
/// `||P_Z ψ_0||` of the state it came from, not 1 in general.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState<T> {
    amplitudes: ComplexVector<T>,
    basis: Arc<SelectionBasis>,
}

impl<T: Real> ReducedState<T> {
    pub fn new(amplitudes: ComplexVector<T>, basis: Arc<SelectionBasis>) -> Result<Self> {
        if amplitudes.dim() != basis.d() {
            return Err(Error::DimensionMismatch { expected: basis.d(), actual: amplitudes.dim() });
        }
        Ok(Self { amplitudes, basis })
    }

    pub fn amplitudes(&self) -> &ComplexVector<T> {
        &self.amplitudes
    }

    pub fn basis(&self) -> &Arc<SelectionBasis> {
        &self.basis
    }

    pub fn d(&self) -> usize {
        self.amplitudes.dim()
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.norm_sqr()
    }
}

/// Orthogonal split `ψ = S ψ̂ + r`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZenoSplit<T> {
    pub reduced: ReducedState<T>,
    /// `r = (I - P_Z) ψ`, zero on every selected index.
    pub residual: ComplexVector<T>,
}

impl<T: Real> ZenoSplit<T> {
    pub fn new(reduced: ReducedState<T>, residual: ComplexVector<T>) -> Result<Self> {
        let basis = reduced.basis();
        if residual.dim() != basis.full_dim() {
            return Err(Error::DimensionMismatch { expected: basis.full_dim(), actual: residual.dim() });
        }
        let zero = Complex::new(T::zero(), T::zero());
        if basis.indices().iter().any(|&x| residual[x as usize] != zero) {
            return Err(Error::InvalidBasis("residual has support on the selected indices".into()));
        }
        Ok(Self { reduced, residual })
    }

    pub fn residual_norm_sqr(&self) -> T {
        self.residual.norm_sqr()
    }
}

/// Gathers `ψ̂ = S^H ψ` and zeroes those entries to leave `r`. `O(2^n)`.
pub fn compress<T: Real>(psi: &FullState<T>, basis: impl Into<Arc<SelectionBasis>>) -> Result<ZenoSplit<T>> {
    let basis = basis.into();
    if psi.dim() != basis.full_dim() {
        return Err(Error::DimensionMismatch { expected: basis.full_dim(), actual: psi.dim() });
    }
    let mut residual = psi.amplitudes().clone();
    let zero = Complex::new(T::zero(), T::zero());
    let reduced: ComplexVector<T> = basis
        .indices()
        .iter()
        .map(|&x| std::mem::replace(&mut residual[x as usize], zero))
        .collect();
    Ok(ZenoSplit { reduced: ReducedState { amplitudes: reduced, basis }, residual })
}

/// `S ψ̂ + r`. Exact inverse of [`compress`].
pub fn lift<T: Real>(split: &ZenoSplit<T>) -> Result<FullState<T>> {
    let basis = split.reduced.basis();
    if split.residual.dim() != basis.full_dim() {
        return Err(Error::DimensionMismatch { expected: basis.full_dim(), actual: split.residual.dim() });
    }
    if split.reduced.d() != basis.d() {
        return Err(Error::DimensionMismatch { expected: basis.d(), actual: split.reduced.d() });
    }
    let mut out = split.residual.clone();
    for (a, &x) in basis.indices().iter().enumerate() {
        out[x as usize] += split.reduced.amplitudes[a];
    }
    Ok(FullState::from_raw(basis.n(), out))
}

/// Applies `u` to the reduced state `repetitions` times, `O(repetitions d^2)`
/// for dense `u`.
pub fn evolve_reduced<T: Real, U: LinearOperator<T> + ?Sized>(
    state: &ReducedState<T>,
    u: &U,
    repetitions: usize,
) -> Result<ReducedState<T>> {
    if u.dim() != state.d() {
        return Err(Error::DimensionMismatch { expected: state.d(), actual: u.dim() });
    }
    let mut current = state.amplitudes.as_slice().to_vec();
    let mut scratch = current.clone();
    for _ in 0..repetitions {
        u.apply_into(&current, &mut scratch);
        std::mem::swap(&mut current, &mut scratch);
    }
    Ok(ReducedState { amplitudes: ComplexVector::new(current), basis: Arc::clone(&state.basis) })
}

pub(crate) fn guard_oracle(n: usize) -> Result<()> {
    if n > ZENO_ORACLE_MAX_QUBITS {
        return Err(Error::TooLarge { n, limit: ZENO_ORACLE_MAX_QUBITS });
    }
    Ok(())
}

/// `P_Z H P_Z` as a dense full-space matrix.
pub fn project_hamiltonian<T: Real>(h: &HermitianMatrix<T>, basis: &SelectionBasis) -> Result<HermitianMatrix<T>> {
    guard_oracle(basis.n())?;
    if h.dim() != basis.full_dim() {
        return Err(Error::DimensionMismatch { expected: basis.full_dim(), actual: h.dim() });
    }
    let p = basis.projector::<T>()?;
    let projected = p.matmul(h.matrix())?.matmul(&p)?;
    HermitianMatrix::new(projected)
}

/// `exp(-i t P_Z H P_Z) ψ_0` computed entirely in the full space, by Taylor
/// propagation rather than diagonalization.
///
/// Test oracle for `n <= 12`.
pub fn zeno_full_reference<T: Real>(
    psi0: &FullState<T>,
    h: &HermitianMatrix<T>,
    basis: &SelectionBasis,
    t: T,
) -> Result<FullState<T>> {
    guard_oracle(psi0.n())?;
    if psi0.dim() != basis.full_dim() {
        return Err(Error::DimensionMismatch { expected: basis.full_dim(), actual: psi0.dim() });
    }
    let hz = project_hamiltonian(h, basis)?;
    let evolved = expm_multiply_taylor(hz.matrix(), t, psi0.amplitudes())?;
    Ok(FullState::from_raw(psi0.n(), evolved))
}

/// `|| exp(-i t H_Z) ψ_0 - r - S exp(-i t S^H H S) S^H ψ_0 ||_∞`.
pub fn verify_zeno_identity<T: Real>(
    psi0: &FullState<T>,
    h: &HermitianMatrix<T>,
    basis: &SelectionBasis,
    t: T,
) -> Result<T> {
    let reference = zeno_full_reference(psi0, h, basis, t)?;
    let split = compress(psi0, basis.clone())?;
    let lhs = reference.amplitudes().sub(&split.residual)?;

    let reduced_h = crate::hamiltonians::reduce_dense(h, basis)?;
    let evolved = reduced_h.eigen().apply_exp(t, split.reduced.amplitudes())?;
    let mut rhs = ComplexVector::zeros(basis.full_dim());
    for (a, &x) in basis.indices().iter().enumerate() {
        rhs[x as usize] = evolved[a];
    }
    lhs.max_abs_diff(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{build_reduced, hb_full_matrix};
    use crate::numerics::{DenseMatrix, DiagonalUnitary};
    use crate::cnf::CnfFormula;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn example_state() -> FullState<f64> {
        let s = 1.0 / 3f64.sqrt();
        FullState::new(ComplexVector::from_real(&[s, s, 0.0, s])).unwrap()
    }

    fn example_basis() -> Arc<SelectionBasis> {
        Arc::new(SelectionBasis::new(2, vec![0, 1, 2]).unwrap())
    }

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> FullState<f64> {
        let v: ComplexVector<f64> =
            (0..1 << n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = v.norm();
        FullState::new(v.scaled(c(1.0 / norm, 0.0))).unwrap()
    }

    #[test]
    fn compress_example_state() {
        let s = 1.0 / 3f64.sqrt();
        let split = compress(&example_state(), example_basis()).unwrap();
        assert_eq!(split.reduced.amplitudes(), &ComplexVector::from_real(&[s, s, 0.0]));
        assert_eq!(split.residual, ComplexVector::from_real(&[0.0, 0.0, 0.0, s]));
        assert!((split.reduced.norm_sqr() + split.residual_norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compress_with_trivial_bases() {
        let psi = example_state();
        let full = compress(&psi, SelectionBasis::full(2).unwrap()).unwrap();
        assert_eq!(full.reduced.amplitudes(), psi.amplitudes());
        assert_eq!(full.residual_norm_sqr(), 0.0);
        let empty = compress(&psi, SelectionBasis::new(2, vec![]).unwrap()).unwrap();
        assert_eq!(empty.reduced.d(), 0);
        assert_eq!(&empty.residual, psi.amplitudes());
        assert!(compress(&psi, SelectionBasis::full(3).unwrap()).is_err());
    }

    #[test]
    fn lift_inverts_compress_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let psi = random_state(n, &mut rng);
            let indices: Vec<u64> = (0..1u64 << n).filter(|_| rng.gen_bool(0.4)).collect();
            let split = compress(&psi, SelectionBasis::new(n, indices).unwrap()).unwrap();
            assert_eq!(lift(&split).unwrap(), psi);
        }
    }

    #[test]
    fn lift_example_final_state() {
        let s = 1.0 / 3f64.sqrt();
        let t: f64 = 0.6;
        let reduced = ComplexVector::new(vec![
            Complex::from_polar(s, -t),
            Complex::from_polar(s, -2.0 * t),
            c(0.0, 0.0),
        ]);
        let split = ZenoSplit::new(
            ReducedState::new(reduced.clone(), example_basis()).unwrap(),
            ComplexVector::from_real(&[0.0, 0.0, 0.0, s]),
        )
        .unwrap();
        let lifted = lift(&split).unwrap();
        assert_eq!(lifted.amplitudes()[0], reduced[0]);
        assert_eq!(lifted.amplitudes()[1], reduced[1]);
        assert_eq!(lifted.amplitudes()[2], reduced[2]);
        assert_eq!(lifted.amplitudes()[3], c(s, 0.0));
    }

    #[test]
    fn lift_of_zero_reduced_part_is_the_residual() {
        let residual = ComplexVector::from_real(&[0.0, 0.0, 0.0, 1.0]);
        let split = ZenoSplit::new(
            ReducedState::new(ComplexVector::zeros(3), example_basis()).unwrap(),
            residual.clone(),
        )
        .unwrap();
        assert_eq!(lift(&split).unwrap().amplitudes(), &residual);
        // A residual overlapping the selection is rejected.
        assert!(ZenoSplit::new(
            ReducedState::new(ComplexVector::zeros(3), example_basis()).unwrap(),
            ComplexVector::from_real(&[1.0, 0.0, 0.0, 0.0]),
        )
        .is_err());
    }

    #[test]
    fn diagonal_reduced_evolution() {
        let s = 1.0 / 3f64.sqrt();
        let delta = 0.25;
        let split = compress(&example_state(), example_basis()).unwrap();
        let up = DiagonalUnitary::from_hamiltonian(&[1.0, 2.0, 2.0], delta);
        let evolved = evolve_reduced(&split.reduced, &up, 1).unwrap();
        let expected = ComplexVector::new(vec![
            Complex::from_polar(s, -delta),
            Complex::from_polar(s, -2.0 * delta),
            c(0.0, 0.0),
        ]);
        assert!(evolved.amplitudes().max_abs_diff(&expected).unwrap() < 1e-15);
        assert_eq!(evolve_reduced(&split.reduced, &up, 0).unwrap(), split.reduced);
    }

    #[test]
    fn reduced_evolution_preserves_norm() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[-1, -2], &[1, 2]]).unwrap();
        let ops = build_reduced::<f64>(&f, example_basis(), 0.3).unwrap();
        let split = compress(&example_state(), ops.basis().clone()).unwrap();
        let before = split.reduced.norm_sqr();
        for reps in [1, 7, 50] {
            let after = evolve_reduced(&split.reduced, ops.ub_red(), reps).unwrap();
            assert!((after.norm_sqr() - before).abs() < 1e-10);
        }
        assert!(evolve_reduced(&split.reduced, &DiagonalUnitary::from_hamiltonian(&[1.0], 0.1), 1).is_err());
    }

    #[test]
    fn projected_mixer_of_the_example() {
        let projected = project_hamiltonian(&hb_full_matrix::<f64>(2).unwrap(), &example_basis()).unwrap();
        let expected = DenseMatrix::from_real_rows(&[
            &[0.0, 1.0, 1.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(projected.matrix(), &expected);
    }

    #[test]
    fn full_basis_reference_is_plain_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_state(4, &mut rng);
        let hb = hb_full_matrix::<f64>(4).unwrap();
        let zeno = zeno_full_reference(&psi, &hb, &SelectionBasis::full(4).unwrap(), 0.9).unwrap();
        let plain = crate::hamiltonians::apply_ub_full(psi.amplitudes(), 0.9).unwrap();
        assert!(zeno.amplitudes().max_abs_diff(&plain).unwrap() < 1e-10);
    }

    #[test]
    fn identity_on_a_random_six_qubit_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 6;
        let psi = random_state(n, &mut rng);
        let indices: Vec<u64> = (0..1u64 << n).filter(|_| rng.gen_bool(0.5)).collect();
        let basis = SelectionBasis::new(n, indices).unwrap();
        let hb = hb_full_matrix::<f64>(n).unwrap();
        let t = 1.7;
        assert!(verify_zeno_identity(&psi, &hb, &basis, t).unwrap() <= 1e-9);
        assert!(verify_zeno_identity(&psi, &hb, &basis, 0.0).unwrap() <= 1e-14);

        // Residual is invariant under the projected evolution.
        let reference = zeno_full_reference(&psi, &hb, &basis, t).unwrap();
        let before = compress(&psi, basis.clone()).unwrap();
        let after = compress(&reference, basis.clone()).unwrap();
        assert!(after.residual.max_abs_diff(&before.residual).unwrap() < 1e-10);
        // And the reduced route reproduces the reference.
        let ops = build_reduced::<f64>(&CnfFormula::empty(n).unwrap(), basis, t).unwrap();
        let evolved = evolve_reduced(&before.reduced, ops.ub_red(), 1).unwrap();
        let lifted = lift(&ZenoSplit { reduced: evolved, residual: before.residual }).unwrap();
        assert!(lifted.max_abs_diff(&reference).unwrap() < 1e-10);
    }

    #[test]
    fn oracle_scale_guard() {
        let psi = FullState::<f64>::basis_state(13, 0);
        let h = HermitianMatrix::from_real_diagonal(&[0.0; 4]);
        assert!(matches!(
            zeno_full_reference(&psi, &h, &SelectionBasis::full(2).unwrap(), 0.1),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn full_state_validation() {
        assert!(FullState::new(ComplexVector::<f64>::from_real(&[1.0, 1.0])).is_err());
        assert!(FullState::new(ComplexVector::<f64>::from_real(&[1.0, 0.0, 0.0])).is_err());
        assert!(FullState::new(ComplexVector::<f64>::from_real(&[0.6, 0.8])).is_ok());
    }
}
