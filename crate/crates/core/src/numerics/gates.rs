use num_complex::Complex;

use super::{qubit_count, ComplexVector};
use crate::{Error, Real, Result};

/// Single-qubit gate as a row-major 2x2 matrix.
pub type Gate<T> = [[Complex<T>; 2]; 2];

fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub fn identity_gate<T: Real>() -> Gate<T> {
    let (o, z) = (T::one(), T::zero());
    [[c(o, z), c(z, z)], [c(z, z), c(o, z)]]
}

pub fn pauli_x<T: Real>() -> Gate<T> {
    let (o, z) = (T::one(), T::zero());
    [[c(z, z), c(o, z)], [c(o, z), c(z, z)]]
}

pub fn hadamard<T: Real>() -> Gate<T> {
    let h = T::FRAC_1_SQRT_2();
    let z = T::zero();
    [[c(h, z), c(h, z)], [c(h, z), c(-h, z)]]
}

/// `exp(-i δ X) = cos δ I - i sin δ X`.
pub fn mixer_gate<T: Real>(delta: T) -> Gate<T> {
    let (cos, sin) = (delta.cos(), delta.sin());
    let z = T::zero();
    [[c(cos, z), c(z, -sin)], [c(z, -sin), c(cos, z)]]
}

/// Applies `I ⊗ … ⊗ gate ⊗ … ⊗ I` with `gate` acting on bit `qubit` of
/// the basis index. Cost `O(2^n)`.
pub fn apply_single_qubit_gate<T: Real>(
    state: &ComplexVector<T>,
    gate: &Gate<T>,
    qubit: usize,
) -> Result<ComplexVector<T>> {
    let mut out = state.clone();
    apply_single_qubit_gate_in_place(out.as_mut_slice(), gate, qubit)?;
    Ok(out)
}

pub fn apply_single_qubit_gate_in_place<T: Real>(
    amplitudes: &mut [Complex<T>],
    gate: &Gate<T>,
    qubit: usize,
) -> Result<()> {
    let n = qubit_count(amplitudes.len())?;
    if qubit >= n {
        return Err(Error::QubitOutOfRange { qubit, n });
    }
    let stride = 1usize << qubit;
    let [[g00, g01], [g10, g11]] = *gate;
    for block in amplitudes.chunks_exact_mut(stride << 1) {
        let (low, high) = block.split_at_mut(stride);
        for (a0, a1) in low.iter_mut().zip(high.iter_mut()) {
            let (x0, x1) = (*a0, *a1);
            *a0 = g00 * x0 + g01 * x1;
            *a1 = g10 * x0 + g11 * x1;
        }
    }
    Ok(())
}
