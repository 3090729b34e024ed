//! QAOA schedule evaluation.
//!
//! A schedule `(k_i, l_i)_{i=1..κ}` with step `δ` produces
//! `U_B^{k_κ} U_P^{l_κ} ⋯ U_B^{k_1} U_P^{l_1} ψ_0`: within each stage the
//! problem unitary acts first. [`run_reduced`] evaluates the constrained
//! version in the Zeno subspace; [`run_full`] and [`run_full_zeno`] are the
//! full-space references.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cnf::{count_satisfied, CnfFormula};
use crate::hamiltonians::{
    apply_ub_full_in_place, build_reduced, hb_full_matrix, hp_entry, ReducedOperators, SelectionBasis,
};
use crate::modelcount::{enumerate_models_dpll, DEFAULT_MODEL_CAP};
use crate::numerics::{expm_multiply_taylor, ComplexVector, DenseMatrix, HermitianMatrix};
use crate::zeno::{compress, evolve_reduced, guard_oracle, FullState, ReducedState};
use crate::{Error, Real, Result};

/// [`run_full`] refuses larger instances.
pub const FULL_RUN_MAX_QUBITS: usize = 20;

pub const DEFAULT_DELTA: f64 = 0.1;

/// One stage: `l` problem steps followed by `k` mixer steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    /// `k_i`: powers of `U_B`.
    pub mixer_steps: usize,
    /// `l_i`: powers of `U_P`.
    pub problem_steps: usize,
}

impl Stage {
    pub fn new(mixer_steps: usize, problem_steps: usize) -> Self {
        Self { mixer_steps, problem_steps }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule<T> {
    stages: Vec<Stage>,
    delta: T,
}

impl<T: Real> Schedule<T> {
    /// At least one stage, not all powers zero, `delta > 0`.
    pub fn new(stages: Vec<Stage>, delta: T) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidSchedule("needs at least one stage".into()));
        }
        if stages.iter().all(|s| s.mixer_steps == 0 && s.problem_steps == 0) {
            return Err(Error::InvalidSchedule("all powers are zero".into()));
        }
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(Error::InvalidSchedule(format!("time step must be positive, got {delta}")));
        }
        Ok(Self { stages, delta })
    }

    /// Parses `"k1:l1,k2:l2,..."` (mixer power, then problem power).
    pub fn parse(literal: &str, delta: T) -> Result<Self> {
        let stages = literal
            .split(',')
            .map(|part| {
                let part = part.trim();
                let (k, l) = part
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidSchedule(format!("stage {part:?} is not `k:l`")))?;
                let parse = |s: &str| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidSchedule(format!("bad power {s:?} in {part:?}")))
                };
                Ok(Stage::new(parse(k)?, parse(l)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(stages, delta)
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn kappa(&self) -> usize {
        self.stages.len()
    }

    /// `ν = Σ (k_i + l_i)`, the number of unitary applications.
    pub fn nu(&self) -> usize {
        self.stages.iter().map(|s| s.mixer_steps + s.problem_steps).sum()
    }
}

impl<T: Real> fmt::Display for Schedule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.stages.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}:{}", s.mixer_steps, s.problem_steps)?;
        }
        Ok(())
    }
}

/// Initial state of a run.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState<T> {
    /// `Σ_x |x> / sqrt(2^n)`, never materialized on the reduced path.
    Uniform,
    State(FullState<T>),
}

/// `Σ_x |x> / sqrt(2^n)`.
pub fn initial_uniform<T: Real>(n: usize) -> FullState<T> {
    let dim = 1usize << n;
    let amp = Complex::new(T::one() / T::from_count(dim).sqrt(), T::zero());
    FullState::new(ComplexVector::new(vec![amp; dim])).expect("uniform state is normalized")
}

/// The static component outside the Zeno subspace.
#[derive(Clone, Debug, PartialEq)]
pub enum Residual<T> {
    /// No component outside the represented basis.
    Zero,
    /// `1/sqrt(2^n)` on every non-selected index.
    Uniform,
    Explicit(ComplexVector<T>),
}

#[derive(Clone, Debug)]
pub struct RunResult<T> {
    pub final_reduced: ReducedState<T>,
    pub residual: Residual<T>,
    pub residual_norm_sq: T,
    /// `<ψ̂|Ĥ_P|ψ̂> / ||ψ̂||^2`: expected clause count within the feasible set.
    pub expectation_constrained: T,
    /// `<w|H_P|w>` on the lifted state.
    pub expectation_full: T,
    pub nu: usize,
    /// Clause count `m` of the problem formula.
    pub m: usize,
    pub k_constraint: usize,
    pub schedule: Schedule<T>,
    pub wall_time: Duration,
}

impl<T: Real> RunResult<T> {
    pub fn n(&self) -> usize {
        self.final_reduced.basis().n()
    }

    pub fn d(&self) -> usize {
        self.final_reduced.d()
    }

    pub fn basis(&self) -> &Arc<SelectionBasis> {
        self.final_reduced.basis()
    }

    /// `S ψ̂ + r` as a full state vector.
    pub fn lift(&self) -> Result<FullState<T>> {
        let basis = self.basis();
        let n = basis.n();
        if n > crate::modelcount::BRUTE_FORCE_MAX_VARIABLES {
            return Err(Error::TooLarge { n, limit: crate::modelcount::BRUTE_FORCE_MAX_VARIABLES });
        }
        let dim = basis.full_dim();
        let mut out = match &self.residual {
            Residual::Zero => ComplexVector::zeros(dim),
            Residual::Uniform => {
                let amp = Complex::new(T::one() / T::from_count(dim).sqrt(), T::zero());
                let mut v = ComplexVector::new(vec![amp; dim]);
                for &x in basis.indices() {
                    v[x as usize] = Complex::new(T::zero(), T::zero());
                }
                v
            }
            Residual::Explicit(r) => r.clone(),
        };
        for (a, &x) in basis.indices().iter().enumerate() {
            out[x as usize] += self.final_reduced.amplitudes()[a];
        }
        FullState::new(out)
    }

    /// Outcome probabilities `|w_x|^2`, listed sparsely for the reduced part
    /// and the explicit residual; a uniform residual is one lumped bucket.
    fn outcome_weights(&self) -> (Vec<(u64, f64)>, f64) {
        let basis = self.basis();
        let mut weights: Vec<(u64, f64)> = basis
            .indices()
            .iter()
            .zip(self.final_reduced.amplitudes().iter())
            .map(|(&x, a)| (x, a.norm_sqr().as_f64()))
            .collect();
        let mut lumped = 0.0;
        match &self.residual {
            Residual::Zero => {}
            Residual::Uniform => lumped = self.residual_norm_sq.as_f64(),
            Residual::Explicit(r) => weights.extend(
                r.iter()
                    .enumerate()
                    .filter(|(_, a)| a.norm_sqr() > T::zero())
                    .map(|(x, a)| (x as u64, a.norm_sqr().as_f64())),
            ),
        }
        (weights, lumped)
    }

    /// Total outcome probability; 1 up to rounding.
    pub fn total_probability(&self) -> f64 {
        let (weights, lumped) = self.outcome_weights();
        weights.iter().map(|(_, w)| w).sum::<f64>() + lumped
    }

    pub fn report(&self) -> RunReport {
        RunReport {
            schema_version: crate::SCHEMA_VERSION,
            n: self.n(),
            m: self.m,
            k_constraint: self.k_constraint,
            d: self.d(),
            full_dim: 1u64 << self.n(),
            schedule: self.schedule.to_string(),
            delta: self.schedule.delta().as_f64(),
            nu: self.nu,
            reduced_norm_sq: self.final_reduced.norm_sqr().as_f64(),
            residual_norm_sq: self.residual_norm_sq.as_f64(),
            expectation_constrained: self.expectation_constrained.as_f64(),
            expectation_full: self.expectation_full.as_f64(),
            basis: self.basis().indices().to_vec(),
            final_reduced: self
                .final_reduced
                .amplitudes()
                .iter()
                .map(|a| [a.re.as_f64(), a.im.as_f64()])
                .collect(),
        }
    }
}

/// Serializable view of a [`RunResult`]. Leaves out the wall time so that
/// reports are reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub n: usize,
    pub m: usize,
    pub k_constraint: usize,
    pub d: usize,
    pub full_dim: u64,
    pub schedule: String,
    pub delta: f64,
    pub nu: usize,
    pub reduced_norm_sq: f64,
    pub residual_norm_sq: f64,
    pub expectation_constrained: f64,
    pub expectation_full: f64,
    /// Selected basis indices, aligned with `final_reduced`.
    pub basis: Vec<u64>,
    /// `[re, im]` per reduced amplitude.
    pub final_reduced: Vec<[f64; 2]>,
}

/// A problem formula with its compressed operators for constraint prefix
/// `k_constraint`. Built once, run for many schedules.
#[derive(Clone, Debug)]
pub struct ConstrainedProblem<T> {
    formula: CnfFormula,
    k_constraint: usize,
    ops: ReducedOperators<T>,
}

impl<T: Real> ConstrainedProblem<T> {
    /// Enumerates the models of the first `k_constraint` clauses and builds
    /// the reduced operators. Fails with `EmptySubspace` when there are none.
    pub fn new(f: &CnfFormula, k_constraint: usize, delta: T) -> Result<Self> {
        let models = enumerate_models_dpll(&f.prefix(k_constraint)?, DEFAULT_MODEL_CAP);
        let basis = SelectionBasis::from_models(&models)?;
        Self::with_basis(f, k_constraint, basis, delta)
    }

    pub fn with_basis(f: &CnfFormula, k_constraint: usize, basis: SelectionBasis, delta: T) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::EmptySubspace { k: k_constraint });
        }
        let ops = build_reduced(f, basis, delta)?;
        Ok(Self { formula: f.clone(), k_constraint, ops })
    }

    pub fn operators(&self) -> &ReducedOperators<T> {
        &self.ops
    }

    pub fn basis(&self) -> &Arc<SelectionBasis> {
        self.ops.basis()
    }

    pub fn d(&self) -> usize {
        self.ops.d()
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    /// Copy whose unitaries use step `delta`.
    pub fn with_delta(&self, delta: T) -> Self {
        Self { formula: self.formula.clone(), k_constraint: self.k_constraint, ops: self.ops.with_delta(delta) }
    }

    /// Runs a schedule in the reduced space. `O(ν d^2)`; `wall_time` covers
    /// the run only, not the build.
    pub fn run(&self, schedule: &Schedule<T>, psi0: &InitialState<T>) -> Result<RunResult<T>> {
        if schedule.delta() != self.ops.delta() {
            return self.with_delta(schedule.delta()).run(schedule, psi0);
        }
        let start = Instant::now();
        let basis = self.ops.basis();
        let n = basis.n();
        let dim = T::from_f64((n as f64).exp2()).expect("2^n representable");

        let (reduced, residual, residual_norm_sq) = match psi0 {
            InitialState::Uniform => {
                let amp = Complex::new(T::one() / dim.sqrt(), T::zero());
                let reduced = ReducedState::new(ComplexVector::new(vec![amp; basis.d()]), Arc::clone(basis))?;
                let residual_norm_sq = (dim - T::from_count(basis.d())) / dim;
                (reduced, Residual::Uniform, residual_norm_sq)
            }
            InitialState::State(psi) => {
                let split = compress(psi, Arc::clone(basis))?;
                let norm = split.residual_norm_sqr();
                (split.reduced, Residual::Explicit(split.residual), norm)
            }
        };

        let mut state = reduced;
        for stage in schedule.stages() {
            state = evolve_reduced(&state, self.ops.up_red(), stage.problem_steps)?;
            state = evolve_reduced(&state, self.ops.ub_red(), stage.mixer_steps)?;
        }

        let hp = self.ops.hp_red().diagonal();
        let reduced_norm_sq = state.norm_sqr();
        if reduced_norm_sq <= T::zero() {
            return Err(Error::ZeroOverlap);
        }
        let inside: T = state.amplitudes().iter().zip(hp).map(|(a, &h)| a.norm_sqr() * h).sum();
        let outside = match &residual {
            Residual::Zero => T::zero(),
            Residual::Uniform => {
                let total = T::from_u128(self.formula.total_satisfied_count()).expect("count representable");
                let selected: T = hp.iter().copied().sum();
                (total - selected) / dim
            }
            Residual::Explicit(r) => r
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm_sqr() > T::zero())
                .map(|(x, a)| a.norm_sqr() * hp_entry::<T>(&self.formula, x as u64))
                .sum(),
        };

        Ok(RunResult {
            final_reduced: state,
            residual,
            residual_norm_sq,
            expectation_constrained: inside / reduced_norm_sq,
            expectation_full: inside + outside,
            nu: schedule.nu(),
            m: self.formula.m(),
            k_constraint: self.k_constraint,
            schedule: schedule.clone(),
            wall_time: start.elapsed(),
        })
    }
}

/// Constrained QAOA in the Zeno subspace of the first `k_constraint` clauses.
/// `wall_time` includes enumeration and the operator build.
pub fn run_reduced<T: Real>(
    f: &CnfFormula,
    k_constraint: usize,
    schedule: &Schedule<T>,
    psi0: &InitialState<T>,
) -> Result<RunResult<T>> {
    let start = Instant::now();
    let problem = ConstrainedProblem::new(f, k_constraint, schedule.delta())?;
    let mut result = problem.run(schedule, psi0)?;
    result.wall_time = start.elapsed();
    Ok(result)
}

fn full_result<T: Real>(
    f: &CnfFormula,
    amplitudes: Vec<Complex<T>>,
    hp: &[T],
    selected: Option<&SelectionBasis>,
    k_constraint: usize,
    schedule: &Schedule<T>,
    start: Instant,
) -> Result<RunResult<T>> {
    let n = f.n();
    let expectation_full = amplitudes.iter().zip(hp).map(|(a, &h)| a.norm_sqr() * h).sum();
    let expectation_constrained = match selected {
        None => expectation_full,
        Some(basis) => {
            let mut weight = T::zero();
            let mut inside = T::zero();
            for &x in basis.indices() {
                let p = amplitudes[x as usize].norm_sqr();
                weight += p;
                inside += p * hp[x as usize];
            }
            if weight <= T::zero() {
                return Err(Error::ZeroOverlap);
            }
            inside / weight
        }
    };
    let full_basis = Arc::new(SelectionBasis::full(n)?);
    Ok(RunResult {
        final_reduced: ReducedState::new(ComplexVector::new(amplitudes), full_basis)?,
        residual: Residual::Zero,
        residual_norm_sq: T::zero(),
        expectation_constrained,
        expectation_full,
        nu: schedule.nu(),
        m: f.m(),
        k_constraint,
        schedule: schedule.clone(),
        wall_time: start.elapsed(),
    })
}

fn materialize<T: Real>(n: usize, psi0: &InitialState<T>) -> Result<Vec<Complex<T>>> {
    let psi = match psi0 {
        InitialState::Uniform => initial_uniform(n),
        InitialState::State(psi) => psi.clone(),
    };
    if psi.n() != n {
        return Err(Error::DimensionMismatch { expected: 1 << n, actual: psi.dim() });
    }
    Ok(psi.into_amplitudes().into_inner())
}

/// Unconstrained QAOA in the full space with implicit operators: `U_P` as
/// diagonal phases, `U_B` as one single-qubit gate per qubit. `O(ν n 2^n)`.
pub fn run_full<T: Real>(f: &CnfFormula, schedule: &Schedule<T>, psi0: &InitialState<T>) -> Result<RunResult<T>> {
    let n = f.n();
    if n > FULL_RUN_MAX_QUBITS {
        return Err(Error::TooLarge { n, limit: FULL_RUN_MAX_QUBITS });
    }
    let start = Instant::now();
    let mut amps = materialize(n, psi0)?;
    let hp: Vec<T> = (0..1u64 << n).map(|x| T::from_count(count_satisfied(f, x))).collect();
    let delta = schedule.delta();
    let phases: Vec<Complex<T>> = hp.iter().map(|&h| Complex::from_polar(T::one(), -delta * h)).collect();
    for stage in schedule.stages() {
        for _ in 0..stage.problem_steps {
            for (a, p) in amps.iter_mut().zip(&phases) {
                *a *= p;
            }
        }
        for _ in 0..stage.mixer_steps {
            apply_ub_full_in_place(&mut amps, delta)?;
        }
    }
    full_result(f, amps, &hp, None, 0, schedule, start)
}

/// Constrained QAOA evaluated densely in the full space with the projected
/// Hamiltonians `P_Z H_P P_Z` and `P_Z H_B P_Z`, propagated by Taylor series
/// (no diagonalization). Oracle for `n <= 12`.
pub fn run_full_zeno<T: Real>(
    f: &CnfFormula,
    k_constraint: usize,
    schedule: &Schedule<T>,
    psi0: &InitialState<T>,
) -> Result<RunResult<T>> {
    let n = f.n();
    guard_oracle(n)?;
    let start = Instant::now();
    let models = enumerate_models_dpll(&f.prefix(k_constraint)?, DEFAULT_MODEL_CAP);
    let basis = SelectionBasis::from_models(&models)?;
    if basis.is_empty() {
        return Err(Error::EmptySubspace { k: k_constraint });
    }
    let dim = basis.full_dim();
    let hp: Vec<T> = (0..dim as u64).map(|x| hp_entry(f, x)).collect();
    let hp_full = HermitianMatrix::from_real_diagonal(&hp);
    let hb_full = hb_full_matrix::<T>(n)?;

    let projector: Vec<T> = (0..dim as u64).map(|x| if basis.contains(x) { T::one() } else { T::zero() }).collect();
    // P H P for the diagonal 0/1 projector P.
    let project = |h: &HermitianMatrix<T>| {
        HermitianMatrix::new(DenseMatrix::from_fn(dim, dim, |i, j| h.get(i, j) * (projector[i] * projector[j])))
    };
    let hp_z = project(&hp_full)?;
    let hb_z = project(&hb_full)?;

    let delta = schedule.delta();
    let mut w = ComplexVector::new(materialize(n, psi0)?);
    for stage in schedule.stages() {
        for _ in 0..stage.problem_steps {
            w = expm_multiply_taylor(hp_z.matrix(), delta, &w)?;
        }
        for _ in 0..stage.mixer_steps {
            w = expm_multiply_taylor(hb_z.matrix(), delta, &w)?;
        }
    }
    full_result(f, w.into_inner(), &hp, Some(&basis), k_constraint, schedule, start)
}

/// Draws `shots` measurement outcomes from the lifted final state.
pub fn sample<T: Real>(result: &RunResult<T>, shots: usize, seed: u64) -> Result<BTreeMap<u64, usize>> {
    if shots == 0 {
        return Err(Error::InvalidParams("shots must be at least 1".into()));
    }
    let (weights, lumped) = result.outcome_weights();
    let total = weights.iter().map(|(_, w)| w).sum::<f64>() + lumped;
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm_sq: total });
    }
    let mut buckets: Vec<f64> = weights.iter().map(|&(_, w)| w).collect();
    buckets.push(lumped);
    let dist = WeightedIndex::new(&buckets).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = result.basis();
    let dim = 1u64 << basis.n();
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let bucket = dist.sample(&mut rng);
        let x = if bucket < weights.len() {
            weights[bucket].0
        } else {
            // Uniform over the complement of the selection.
            loop {
                let x = rng.gen_range(0..dim);
                if !basis.contains(x) {
                    break x;
                }
            }
        };
        *counts.entry(x).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Ranges for randomly drawn schedules (inclusive).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpace {
    pub kappa: (usize, usize),
    pub powers: (usize, usize),
    pub delta: (f64, f64),
}

impl Default for ScheduleSpace {
    fn default() -> Self {
        Self { kappa: (1, 5), powers: (0, 10), delta: (0.05, 1.0) }
    }
}

impl ScheduleSpace {
    fn validate(&self) -> Result<()> {
        let ok = self.kappa.0 >= 1
            && self.kappa.0 <= self.kappa.1
            && self.powers.0 <= self.powers.1
            && self.powers.1 >= 1
            && self.delta.0 > 0.0
            && self.delta.0 <= self.delta.1;
        if !ok {
            return Err(Error::InvalidParams(format!("invalid schedule space {self:?}")));
        }
        Ok(())
    }

    /// One schedule; redraws if every power came out zero.
    pub fn draw<T: Real>(&self, rng: &mut impl Rng) -> Result<Schedule<T>> {
        self.validate()?;
        loop {
            let kappa = rng.gen_range(self.kappa.0..=self.kappa.1);
            let stages: Vec<Stage> = (0..kappa)
                .map(|_| {
                    Stage::new(
                        rng.gen_range(self.powers.0..=self.powers.1),
                        rng.gen_range(self.powers.0..=self.powers.1),
                    )
                })
                .collect();
            let delta = if self.delta.0 == self.delta.1 {
                self.delta.0
            } else {
                rng.gen_range(self.delta.0..=self.delta.1)
            };
            if stages.iter().any(|s| s.mixer_steps + s.problem_steps > 0) {
                return Schedule::new(stages, T::lit(delta));
            }
        }
    }

    /// The first `trials` schedules drawn for `seed`.
    pub fn draw_many<T: Real>(&self, trials: usize, seed: u64) -> Result<Vec<Schedule<T>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..trials).map(|_| self.draw(&mut rng)).collect()
    }
}

/// Best of `trials` random schedules by `expectation_constrained` (earliest
/// wins ties). Trials run in parallel; the result depends only on the seed.
pub fn random_search<T: Real>(
    f: &CnfFormula,
    k_constraint: usize,
    space: &ScheduleSpace,
    trials: usize,
    seed: u64,
    psi0: &InitialState<T>,
) -> Result<RunResult<T>> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let schedules = space.draw_many::<T>(trials, seed)?;
    let problem = ConstrainedProblem::new(f, k_constraint, schedules[0].delta())?;
    let results = schedules
        .par_iter()
        .map(|s| problem.run(s, psi0))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.expectation_constrained > results[best].expectation_constrained {
            best = i;
        }
    }
    Ok(results.into_iter().nth(best).expect("at least one trial"))
}

/// Wrong-order variant (mixer before problem within a stage) used to check
/// that the equivalence tests can tell the orders apart.
#[cfg(test)]
pub(crate) fn run_reduced_mixer_first<T: Real>(
    problem: &ConstrainedProblem<T>,
    schedule: &Schedule<T>,
) -> Result<ComplexVector<T>> {
    let basis = problem.basis();
    let amp = Complex::new(T::one() / T::from_count(basis.full_dim()).sqrt(), T::zero());
    let mut state = ReducedState::new(ComplexVector::new(vec![amp; basis.d()]), Arc::clone(basis))?;
    let ops = problem.operators().with_delta(schedule.delta());
    for stage in schedule.stages() {
        state = evolve_reduced(&state, ops.ub_red(), stage.mixer_steps)?;
        state = evolve_reduced(&state, ops.up_red(), stage.problem_steps)?;
    }
    let mut out = ComplexVector::zeros(basis.full_dim());
    for x in 0..basis.full_dim() {
        out[x] = amp;
    }
    for (a, &x) in basis.indices().iter().enumerate() {
        out[x as usize] = state.amplitudes()[a];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::random_3sat;
    use crate::numerics::{apply_single_qubit_gate, hadamard, matvec};
    use crate::hamiltonians::ub_full_matrix;

    fn xor_formula() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(2, &[&[-1, -2], &[1, 2]]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn uniform_state() {
        let psi = initial_uniform::<f64>(2);
        assert_eq!(psi.amplitudes(), &ComplexVector::from_real(&[0.5; 4]));
        for n in [1, 5, 12, 20] {
            assert!((initial_uniform::<f64>(n).norm_sqr() - 1.0).abs() < 1e-12);
        }
        let mut v = ComplexVector::<f64>::basis(8, 0);
        for q in 0..3 {
            v = apply_single_qubit_gate(&v, &hadamard(), q).unwrap();
        }
        assert!(v.max_abs_diff(initial_uniform::<f64>(3).amplitudes()).unwrap() < 1e-15);
    }

    #[test]
    fn schedule_validation_and_parsing() {
        assert!(Schedule::<f64>::new(vec![], 0.1).is_err());
        assert!(Schedule::<f64>::new(vec![Stage::new(0, 0)], 0.1).is_err());
        assert!(Schedule::<f64>::new(vec![Stage::new(1, 0)], 0.0).is_err());
        assert!(Schedule::<f64>::new(vec![Stage::new(1, 0)], f64::NAN).is_err());
        let s = Schedule::<f64>::parse("2:3, 0:1", 0.2).unwrap();
        assert_eq!(s.stages(), &[Stage::new(2, 3), Stage::new(0, 1)]);
        assert_eq!(s.nu(), 6);
        assert_eq!(s.kappa(), 2);
        assert_eq!(s.to_string(), "2:3,0:1");
        assert!(Schedule::<f64>::parse("2-3", 0.2).is_err());
        assert!(Schedule::<f64>::parse("a:1", 0.2).is_err());
    }

    #[test]
    fn single_problem_step_in_the_reduced_space() {
        let delta = 0.3;
        let schedule = Schedule::<f64>::new(vec![Stage::new(0, 1)], delta).unwrap();
        let r = run_reduced(&xor_formula(), 1, &schedule, &InitialState::Uniform).unwrap();
        let expected = ComplexVector::new(vec![
            Complex::from_polar(0.5, -delta),
            Complex::from_polar(0.5, -2.0 * delta),
            Complex::from_polar(0.5, -2.0 * delta),
        ]);
        assert!(r.final_reduced.amplitudes().max_abs_diff(&expected).unwrap() < 1e-15);
        assert_eq!(r.d(), 3);
        assert!((r.residual_norm_sq - 0.25).abs() < 1e-15);
        assert_eq!(r.nu, 1);
        assert!((r.expectation_constrained - 5.0 / 3.0).abs() < 1e-12);
        assert!((r.expectation_full - 1.5).abs() < 1e-12);
    }

    #[test]
    fn single_problem_step_in_the_full_space() {
        let delta = 0.3;
        let schedule = Schedule::<f64>::new(vec![Stage::new(0, 1)], delta).unwrap();
        let r = run_full(&xor_formula(), &schedule, &InitialState::Uniform).unwrap();
        let expected = ComplexVector::new(
            [1.0, 2.0, 2.0, 1.0].iter().map(|&h| Complex::from_polar(0.5, -delta * h)).collect(),
        );
        assert!(r.final_reduced.amplitudes().max_abs_diff(&expected).unwrap() < 1e-15);
        assert!((r.expectation_full - 1.5).abs() < 1e-12);
    }

    #[test]
    fn tiny_step_keeps_initial_expectation() {
        let schedule = Schedule::<f64>::new(vec![Stage::new(1, 1)], 1e-9).unwrap();
        let full = run_full(&xor_formula(), &schedule, &InitialState::Uniform).unwrap();
        assert!((full.expectation_full - 1.5).abs() < 1e-8);
        let f = random_3sat(8, 32, 1).unwrap();
        let avg = (0..256).map(|x| count_satisfied(&f, x) as f64).sum::<f64>() / 256.0;
        let reduced = run_reduced(&f, 10, &schedule, &InitialState::Uniform).unwrap();
        assert!((reduced.expectation_full - avg).abs() < 1e-7);
    }

    #[test]
    fn tautological_constraint_matches_full_run() {
        let f = random_3sat(7, 28, 3).unwrap();
        let schedule = Schedule::<f64>::parse("3:2,1:4,2:0", 0.4).unwrap();
        let reduced = run_reduced(&f, 0, &schedule, &InitialState::Uniform).unwrap();
        let full = run_full(&f, &schedule, &InitialState::Uniform).unwrap();
        let diff = reduced.lift().unwrap().max_abs_diff(&full.lift().unwrap()).unwrap();
        assert!(diff < 1e-9, "{diff}");
        let zeno = run_full_zeno(&f, 0, &schedule, &InitialState::Uniform).unwrap();
        assert!(zeno.lift().unwrap().max_abs_diff(&full.lift().unwrap()).unwrap() < 1e-9);
        assert!((reduced.expectation_full - full.expectation_full).abs() < 1e-9);
    }

    #[test]
    fn full_run_matches_dense_mixer_matrix() {
        let f = random_3sat(6, 24, 10).unwrap();
        let schedule = Schedule::<f64>::parse("2:1,1:3", 0.35).unwrap();
        let r = run_full(&f, &schedule, &InitialState::Uniform).unwrap();
        let ub = ub_full_matrix(6, 0.35).unwrap();
        let mut w = initial_uniform::<f64>(6).into_amplitudes();
        for stage in schedule.stages() {
            for _ in 0..stage.problem_steps {
                w = (0..64).map(|x| w[x] * Complex::from_polar(1.0, -0.35 * count_satisfied(&f, x as u64) as f64)).collect();
            }
            for _ in 0..stage.mixer_steps {
                w = matvec(&ub, &w).unwrap();
            }
        }
        assert!(r.final_reduced.amplitudes().max_abs_diff(&w).unwrap() < 1e-12);
    }

    #[test]
    fn reduced_matches_full_zeno_with_explicit_initial_state() {
        let f = random_3sat(6, 24, 21).unwrap();
        let schedule = Schedule::<f64>::parse("1:2,3:1", 0.5).unwrap();
        let mut v = ComplexVector::<f64>::zeros(64);
        for x in 0..64 {
            v[x] = c((x as f64 * 0.37).sin(), (x as f64 * 0.11).cos());
        }
        let norm = v.norm();
        let psi = InitialState::State(FullState::new(v.scaled(c(1.0 / norm, 0.0))).unwrap());
        let reduced = run_reduced(&f, 12, &schedule, &psi).unwrap();
        let zeno = run_full_zeno(&f, 12, &schedule, &psi).unwrap();
        assert!(reduced.lift().unwrap().max_abs_diff(&zeno.lift().unwrap()).unwrap() < 1e-9);
        assert!((reduced.expectation_full - zeno.expectation_full).abs() < 1e-9);
        assert!((reduced.expectation_constrained - zeno.expectation_constrained).abs() < 1e-9);
    }

    #[test]
    fn stage_order_matters() {
        let f = xor_formula();
        let schedule = Schedule::<f64>::parse("1:1,2:1", 0.6).unwrap();
        let problem = ConstrainedProblem::new(&f, 1, 0.6).unwrap();
        let right = problem.run(&schedule, &InitialState::Uniform).unwrap().lift().unwrap();
        let wrong = run_reduced_mixer_first(&problem, &schedule).unwrap();
        let zeno = run_full_zeno(&f, 1, &schedule, &InitialState::Uniform).unwrap().lift().unwrap();
        assert!(right.max_abs_diff(&zeno).unwrap() < 1e-9);
        assert!(wrong.max_abs_diff(zeno.amplitudes()).unwrap() > 1e-3);
    }

    #[test]
    fn unsatisfiable_prefix_is_reported() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1], &[-1], &[2]]).unwrap();
        let schedule = Schedule::<f64>::parse("1:1", 0.1).unwrap();
        assert_eq!(
            run_reduced(&f, 2, &schedule, &InitialState::Uniform).unwrap_err(),
            Error::EmptySubspace { k: 2 }
        );
        assert!(matches!(run_full_zeno(&f, 2, &schedule, &InitialState::Uniform), Err(Error::EmptySubspace { .. })));
    }

    #[test]
    fn orthogonal_initial_state_is_reported() {
        let f = xor_formula();
        let schedule = Schedule::<f64>::parse("1:1", 0.1).unwrap();
        let psi = InitialState::State(FullState::basis_state(2, 3));
        assert_eq!(run_reduced(&f, 1, &schedule, &psi).unwrap_err(), Error::ZeroOverlap);
    }

    #[test]
    fn size_guards() {
        let f = random_3sat(21, 10, 0).unwrap();
        let schedule = Schedule::<f64>::parse("1:1", 0.1).unwrap();
        assert!(matches!(run_full(&f, &schedule, &InitialState::Uniform), Err(Error::TooLarge { .. })));
        let g = random_3sat(13, 10, 0).unwrap();
        assert!(matches!(run_full_zeno(&g, 5, &schedule, &InitialState::Uniform), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn sampling_a_basis_state() {
        let f = xor_formula();
        let schedule = Schedule::<f64>::parse("0:3", 0.2).unwrap();
        let psi = InitialState::State(FullState::basis_state(2, 1));
        let r = run_reduced(&f, 1, &schedule, &psi).unwrap();
        let counts = sample(&r, 1000, 4).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[&1], 1000);
        assert!(sample(&r, 0, 4).is_err());
    }

    #[test]
    fn sampling_the_uniform_state() {
        // δ tiny: the final state is uniform up to phases of order 1e-12.
        let schedule = Schedule::<f64>::parse("0:1", 1e-12).unwrap();
        let r = run_reduced(&xor_formula(), 1, &schedule, &InitialState::Uniform).unwrap();
        assert!((r.total_probability() - 1.0).abs() < 1e-12);
        let counts = sample(&r, 100_000, 17).unwrap();
        assert_eq!(counts.len(), 4);
        for (&x, &count) in &counts {
            assert!((count as i64 - 25_000).abs() <= 500, "outcome {x}: {count}");
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let f = random_3sat(8, 32, 2).unwrap();
        let schedule = Schedule::<f64>::parse("2:2,3:1", 0.3).unwrap();
        let r = run_reduced(&f, 16, &schedule, &InitialState::Uniform).unwrap();
        assert_eq!(sample(&r, 500, 9).unwrap(), sample(&r, 500, 9).unwrap());
        assert!((r.total_probability() - 1.0).abs() < 1e-12);
        // Residual outcomes are reachable.
        let counts = sample(&r, 2000, 9).unwrap();
        assert!(counts.keys().any(|&x| !r.basis().contains(x)));
    }

    #[test]
    fn random_search_single_trial_equals_run() {
        let f = random_3sat(8, 32, 5).unwrap();
        let space = ScheduleSpace::default();
        let best = random_search(&f, 20, &space, 1, 77, &InitialState::<f64>::Uniform).unwrap();
        let drawn = &space.draw_many::<f64>(1, 77).unwrap()[0];
        let direct = run_reduced(&f, 20, drawn, &InitialState::Uniform).unwrap();
        assert_eq!(&best.schedule, drawn);
        assert_eq!(best.final_reduced, direct.final_reduced);
        assert_eq!(best.expectation_constrained, direct.expectation_constrained);
    }

    #[test]
    fn random_search_is_monotone_in_trials() {
        let f = random_3sat(8, 32, 6).unwrap();
        let space = ScheduleSpace::default();
        let mut last = f64::NEG_INFINITY;
        for trials in [1, 2, 5, 10, 20] {
            let best = random_search(&f, 16, &space, trials, 3, &InitialState::<f64>::Uniform).unwrap();
            assert!(best.expectation_constrained >= last);
            last = best.expectation_constrained;
        }
    }

    #[test]
    fn random_search_approaches_the_feasible_optimum() {
        // Exhaustive sweep over small schedules first, as an oracle for what
        // the schedule family can reach.
        let f = xor_formula();
        let problem = ConstrainedProblem::new(&f, 1, 0.1).unwrap();
        let mut sweep_best = f64::NEG_INFINITY;
        for step in 1..=20 {
            let delta = 0.05 * step as f64;
            for k in 0..=6 {
                for l in 0..=6 {
                    if k + l == 0 {
                        continue;
                    }
                    let s = Schedule::<f64>::new(vec![Stage::new(k, l)], delta).unwrap();
                    let r = problem.run(&s, &InitialState::Uniform).unwrap();
                    sweep_best = sweep_best.max(r.expectation_constrained);
                }
            }
        }
        assert!(sweep_best > 1.95 && sweep_best <= 2.0 + 1e-12, "sweep {sweep_best}");
        let best = random_search(&f, 1, &ScheduleSpace::default(), 400, 11, &InitialState::<f64>::Uniform).unwrap();
        assert!(best.expectation_constrained > 1.95, "search {}", best.expectation_constrained);
        assert!(best.expectation_constrained <= 2.0 + 1e-12);
    }

    #[test]
    fn single_precision_runs() {
        let f = random_3sat(6, 24, 8).unwrap();
        let schedule = Schedule::<f32>::parse("2:1,1:2", 0.3).unwrap();
        let r32 = run_reduced(&f, 10, &schedule, &InitialState::Uniform).unwrap();
        let r64 = run_reduced(&f, 10, &Schedule::<f64>::parse("2:1,1:2", 0.3).unwrap(), &InitialState::Uniform).unwrap();
        assert!((r32.expectation_full as f64 - r64.expectation_full).abs() < 1e-4);
    }

    #[test]
    fn report_serializes() {
        let schedule = Schedule::<f64>::parse("1:1", 0.2).unwrap();
        let r = run_reduced(&xor_formula(), 1, &schedule, &InitialState::Uniform).unwrap();
        let report = r.report();
        assert_eq!(report.schema_version, 1);
        assert_eq!(report.d, 3);
        assert_eq!(report.basis, vec![0, 1, 2]);
        let json = serde_json::to_string(&report).unwrap();
        assert_eq!(serde_json::from_str::<RunReport>(&json).unwrap(), report);
    }
}
