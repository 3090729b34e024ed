//! Dense complex linear algebra: state vectors, square and rectangular
//! matrices, the Hermitian matrix exponential and single-qubit gates.
//!
//! Basis index `x` of a `2^n` vector encodes an assignment with qubit 0 as
//! the least-significant bit. Every module in the crate shares that
//! convention.

mod eigen;
mod gates;
mod matrix;
mod vector;

pub use eigen::{expm_hermitian, HermitianEigen};
pub use gates::{
    apply_single_qubit_gate, apply_single_qubit_gate_in_place, hadamard, identity_gate,
    mixer_gate, pauli_x, Gate,
};
pub use matrix::{
    expm_multiply_taylor, matvec, DenseMatrix, DiagonalUnitary, HermitianMatrix, LinearOperator,
    UnitaryMatrix,
};
pub use vector::ComplexVector;

use crate::{Error, Result};

/// Number of qubits `n` for a state of dimension `2^n`.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}
