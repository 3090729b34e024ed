//! Randomized verification suites shared by the CLI and the test suites.
//!
//! Each suite draws its cases from a single seed, evaluates the reduced path
//! against an independent full-space computation, and reports the worst
//! discrepancy.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cnf::{constraint_prefix_len, random_3sat, CnfFormula};
use crate::hamiltonians::{hb_full_matrix, hp_full_matrix, SelectionBasis};
use crate::modelcount::{enumerate_models_dpll, DEFAULT_MODEL_CAP};
use crate::numerics::{ComplexVector, DenseMatrix, HermitianMatrix};
use crate::qaoa::{run_full_zeno, run_reduced, InitialState, Schedule, Stage};
use crate::zeno::{verify_zeno_identity, FullState};
use crate::{Error, Result};

/// Equivalence tolerance for both suites.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub seed: u64,
    pub max_state_error: f64,
    /// Only for the schedule suite.
    pub max_expectation_error: Option<f64>,
    /// Description of the case with the largest error.
    pub worst_case: String,
    pub tolerance: f64,
}

impl SuiteReport {
    pub fn max_error(&self) -> f64 {
        self.max_state_error.max(self.max_expectation_error.unwrap_or(0.0))
    }

    pub fn passed(&self) -> bool {
        self.max_error() <= self.tolerance
    }
}

/// Which Hamiltonian a evolution case evolves under.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum HamiltonianKind {
    Problem,
    Mixer,
    Random,
}

pub fn random_state(n: usize, rng: &mut impl Rng) -> FullState<f64> {
    let v: ComplexVector<f64> =
        (0..1usize << n).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.norm();
    FullState::new(v.scaled(Complex::new(1.0 / norm, 0.0))).expect("normalized")
}

pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianMatrix<f64> {
    let mut a = DenseMatrix::zeros(dim, dim);
    for i in 0..dim {
        a.set(i, i, Complex::new(rng.gen_range(-1.0..1.0), 0.0));
        for j in i + 1..dim {
            let z = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            a.set(i, j, z);
            a.set(j, i, z.conj());
        }
    }
    HermitianMatrix::new(a).expect("constructed hermitian")
}

/// A random 3-SAT formula with `m = 4n` and a non-empty constraint prefix.
fn draw_constrained(n: usize, rng: &mut impl Rng) -> Result<(CnfFormula, usize, SelectionBasis)> {
    loop {
        let f = random_3sat(n, 4 * n, rng.gen())?;
        let mut k = constraint_prefix_len(rng.gen_range(0.3..=1.0), f.m())?;
        loop {
            let basis = SelectionBasis::from_models(&enumerate_models_dpll(&f.prefix(k)?, DEFAULT_MODEL_CAP))?;
            if !basis.is_empty() {
                return Ok((f, k, basis));
            }
            if k == 0 {
                break;
            }
            k /= 2;
        }
    }
}

/// `||U_Z(t) ψ_0 - r - S exp(-i t S^H H S) S^H ψ_0||_∞` over random cases:
/// `n` in `3..=max_n`, constraint bases from random 3-SAT prefixes, `H` one
/// of `H_P`, `H_B` or a random Hermitian matrix, `t` in `[0, 5]`.
pub fn evolution_suite(cases: usize, seed: u64, max_n: usize) -> Result<SuiteReport> {
    if cases == 0 || !(3..=10).contains(&max_n) {
        return Err(Error::InvalidParams(format!("need cases >= 1 and 3 <= max_n <= 10, got {cases}, {max_n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (f64::NEG_INFINITY, String::new());
    for case in 0..cases {
        let n = rng.gen_range(3..=max_n);
        let (f, k, basis) = draw_constrained(n, &mut rng)?;
        let kind = [HamiltonianKind::Problem, HamiltonianKind::Mixer, HamiltonianKind::Random][case % 3];
        let h = match kind {
            HamiltonianKind::Problem => hp_full_matrix(&f)?,
            HamiltonianKind::Mixer => hb_full_matrix(n)?,
            HamiltonianKind::Random => random_hermitian(1 << n, &mut rng),
        };
        let psi0 = random_state(n, &mut rng);
        let t = rng.gen_range(0.0..=5.0);
        let err = verify_zeno_identity(&psi0, &h, &basis, t)?;
        if err > worst.0 {
            worst = (err, format!("case {case}: n={n} k={k} d={} H={kind:?} t={t:.4}", basis.d()));
        }
    }
    Ok(SuiteReport {
        suite: "evolution".into(),
        cases,
        seed,
        max_state_error: worst.0,
        max_expectation_error: None,
        worst_case: worst.1,
        tolerance: EQUIVALENCE_TOL,
    })
}

/// Reduced QAOA runs lifted back against the dense projected-Hamiltonian
/// runs: `n` in `3..=max_n`, up to 4 stages, powers up to 5, half of the
/// cases from the uniform state and half from a random state.
pub fn schedule_suite(cases: usize, seed: u64, max_n: usize) -> Result<SuiteReport> {
    if cases == 0 || !(3..=10).contains(&max_n) {
        return Err(Error::InvalidParams(format!("need cases >= 1 and 3 <= max_n <= 10, got {cases}, {max_n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_state = (f64::NEG_INFINITY, String::new());
    let mut worst_expectation = 0.0f64;
    for case in 0..cases {
        let n = rng.gen_range(3..=max_n);
        let (f, k, basis) = draw_constrained(n, &mut rng)?;
        let kappa = rng.gen_range(1..=4);
        let mut stages: Vec<Stage> =
            (0..kappa).map(|_| Stage::new(rng.gen_range(0..=5), rng.gen_range(0..=5))).collect();
        if stages.iter().all(|s| s.mixer_steps + s.problem_steps == 0) {
            stages[0].mixer_steps = 1;
        }
        let schedule = Schedule::new(stages, rng.gen_range(0.05..=1.0))?;
        let psi0 = if case % 2 == 0 {
            InitialState::Uniform
        } else {
            // Keep a guaranteed overlap with the subspace.
            let mut v = random_state(n, &mut rng).into_amplitudes();
            v[basis.indices()[0] as usize] += Complex::new(1.0, 0.0);
            let norm = v.norm();
            InitialState::State(FullState::new(v.scaled(Complex::new(1.0 / norm, 0.0)))?)
        };
        let reduced = run_reduced(&f, k, &schedule, &psi0)?;
        let full = run_full_zeno(&f, k, &schedule, &psi0)?;
        let err = reduced.lift()?.max_abs_diff(&full.lift()?)?;
        let exp_err = (reduced.expectation_full - full.expectation_full)
            .abs()
            .max((reduced.expectation_constrained - full.expectation_constrained).abs());
        worst_expectation = worst_expectation.max(exp_err);
        if err > worst_state.0 {
            worst_state = (err, format!("case {case}: n={n} k={k} d={} schedule={schedule} δ={:.4}", basis.d(), schedule.delta()));
        }
    }
    Ok(SuiteReport {
        suite: "schedule".into(),
        cases,
        seed,
        max_state_error: worst_state.0,
        max_expectation_error: Some(worst_expectation),
        worst_case: worst_state.1,
        tolerance: EQUIVALENCE_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evolution_small_suite_passes() {
        let report = evolution_suite(12, 3, 7).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.cases, 12);
    }

    #[test]
    fn schedule_small_suite_passes() {
        let report = schedule_suite(10, 5, 7).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.max_expectation_error.is_some());
    }

    #[test]
    fn suites_are_seeded() {
        assert_eq!(evolution_suite(4, 9, 6).unwrap(), evolution_suite(4, 9, 6).unwrap());
    }

    #[test]
    fn invalid_parameters() {
        assert!(evolution_suite(0, 1, 6).is_err());
        assert!(schedule_suite(3, 1, 11).is_err());
    }

    #[test]
    fn random_hermitian_is_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let h = random_hermitian(9, &mut rng);
        assert_eq!(h.matrix().hermiticity_deviation(), 0.0);
    }
}
