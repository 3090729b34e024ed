//! Simulation of constrained QAOA by exact Zeno-subspace reduction.
//!
//! The feasible set of a constraint formula (the models of a CNF prefix) spans
//! a subspace `Z` of the `2^n`-dimensional state space. Evolution under the
//! projected Hamiltonian `P_Z H P_Z` leaves the component outside `Z`
//! untouched and acts on the component inside `Z` exactly like the `d x d`
//! principal submatrix of `H`, so a whole QAOA schedule can be run in
//! dimension `d` and lifted back at the end.
//!
//! The numerical layers ([`numerics`], [`hamiltonians`], [`zeno`], [`qaoa`])
//! are generic over the real scalar type (see [`Real`]); the aliases at the
//! crate root fix it to `f64`, which is what the benchmarks and the CLI use.
#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x <= tol)` also rejects NaN.

pub mod bench;
pub mod cnf;
mod error;
pub mod hamiltonians;
pub mod modelcount;
pub mod numerics;
pub mod qaoa;
mod scalar;
pub mod verify;
pub mod zeno;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

/// JSON documents produced by this crate carry this version tag.
pub const SCHEMA_VERSION: u32 = 1;

pub type Complex64 = Complex<f64>;
pub type ComplexVector64 = numerics::ComplexVector<f64>;
pub type DenseMatrix64 = numerics::DenseMatrix<f64>;
pub type HermitianMatrix64 = numerics::HermitianMatrix<f64>;
pub type UnitaryMatrix64 = numerics::UnitaryMatrix<f64>;
pub type DiagonalHamiltonian64 = hamiltonians::DiagonalHamiltonian<f64>;
pub type ReducedOperators64 = hamiltonians::ReducedOperators<f64>;
pub type FullState64 = zeno::FullState<f64>;
pub type ReducedState64 = zeno::ReducedState<f64>;
pub type ZenoSplit64 = zeno::ZenoSplit<f64>;
pub type Schedule64 = qaoa::Schedule<f64>;
pub type RunResult64 = qaoa::RunResult<f64>;

pub type Complex32 = Complex<f32>;
pub type FullState32 = zeno::FullState<f32>;
pub type RunResult32 = qaoa::RunResult<f32>;
