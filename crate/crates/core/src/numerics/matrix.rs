use num_complex::Complex;

use super::eigen::HermitianEigen;
use super::ComplexVector;
use crate::{Error, Real, Result};

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::new(T::zero(), T::zero()); rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self::from_fn(rows, cols, |i, j| Complex::new(f(i, j), T::zero()))
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, actual: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { rows: n_rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[T]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex::new(x, T::zero())).collect())
                .collect(),
        )
    }

    /// Diagonal matrix with the given (complex) diagonal.
    pub fn from_diagonal(diag: &[Complex<T>]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex<T>) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: rhs.rows });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * factor).collect() }
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |i, j| {
            self.get(i / rhs.rows, j / rhs.cols) * rhs.get(i % rhs.rows, j % rhs.cols)
        })
    }

    /// Entrywise infinity norm of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> Result<T> {
        self.check_same_shape(rhs)?;
        Ok(self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|a| a.norm()).fold(T::zero(), T::max)
    }

    /// `max |a_ij - conj(a_ji)|`; infinite for non-square matrices.
    pub fn hermiticity_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let n = self.rows;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `max |(U^H U - I)_ij|`; infinite for non-square matrices.
    pub fn unitarity_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let gram = self.adjoint().matmul(self).expect("square");
        gram.max_abs_diff(&Self::identity(self.rows)).expect("same shape")
    }

    fn check_same_shape(&self, rhs: &Self) -> Result<()> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, actual: rhs.rows });
        }
        if self.cols != rhs.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: rhs.cols });
        }
        Ok(())
    }
}

/// Dense matrix-vector product.
pub fn matvec<T: Real>(m: &DenseMatrix<T>, v: &ComplexVector<T>) -> Result<ComplexVector<T>> {
    if m.cols() != v.dim() {
        return Err(Error::DimensionMismatch { expected: m.cols(), actual: v.dim() });
    }
    let mut out = vec![Complex::new(T::zero(), T::zero()); m.rows()];
    dense_apply(m, v.as_slice(), &mut out);
    Ok(ComplexVector::new(out))
}

#[inline]
fn dense_apply<T: Real>(m: &DenseMatrix<T>, input: &[Complex<T>], output: &mut [Complex<T>]) {
    for (i, o) in output.iter_mut().enumerate() {
        let row = m.row(i);
        let mut re = T::zero();
        let mut im = T::zero();
        for (a, x) in row.iter().zip(input) {
            re += a.re * x.re - a.im * x.im;
            im += a.re * x.im + a.im * x.re;
        }
        *o = Complex::new(re, im);
    }
}

/// A square operator that can be applied to amplitude slices.
pub trait LinearOperator<T: Real> {
    fn dim(&self) -> usize;

    /// Writes `A * input` to `output`. Both slices have length `dim()`.
    fn apply_into(&self, input: &[Complex<T>], output: &mut [Complex<T>]);

    fn apply(&self, v: &ComplexVector<T>) -> Result<ComplexVector<T>> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: v.dim() });
        }
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.dim()];
        self.apply_into(v.as_slice(), &mut out);
        Ok(ComplexVector::new(out))
    }
}

impl<T: Real> LinearOperator<T> for DenseMatrix<T> {
    fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    fn apply_into(&self, input: &[Complex<T>], output: &mut [Complex<T>]) {
        dense_apply(self, input, output);
    }
}

/// A dense matrix verified to be Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    inner: DenseMatrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Fails with `NonHermitianInput` unless `m` is square and Hermitian to
    /// within the construction tolerance (relative to its largest entry).
    pub fn new(m: DenseMatrix<T>) -> Result<Self> {
        let deviation = m.hermiticity_deviation();
        let tol = T::construction_tol() * T::one().max(m.max_abs());
        if !(deviation <= tol) {
            return Err(Error::NonHermitianInput { deviation: deviation.as_f64() });
        }
        Ok(Self { inner: m })
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let d: Vec<_> = diag.iter().map(|&x| Complex::new(x, T::zero())).collect();
        Self { inner: DenseMatrix::from_diagonal(&d) }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> DenseMatrix<T> {
        self.inner
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.inner.get(i, j)
    }

    /// Principal submatrix on `indices` (the compression `S^H H S` for a
    /// standard-basis selection `S`).
    pub fn principal_submatrix(&self, indices: &[usize]) -> Self {
        let d = indices.len();
        Self {
            inner: DenseMatrix::from_fn(d, d, |a, b| self.inner.get(indices[a], indices[b])),
        }
    }

    pub fn eigen(&self) -> HermitianEigen<T> {
        HermitianEigen::new(self)
    }

    /// `exp(-i t H)`.
    pub fn expm(&self, t: T) -> UnitaryMatrix<T> {
        self.eigen().unitary(t)
    }
}

impl<T: Real> LinearOperator<T> for HermitianMatrix<T> {
    fn dim(&self) -> usize {
        self.inner.rows()
    }

    fn apply_into(&self, input: &[Complex<T>], output: &mut [Complex<T>]) {
        dense_apply(&self.inner, input, output);
    }
}

/// A dense unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix<T> {
    inner: DenseMatrix<T>,
}

impl<T: Real> UnitaryMatrix<T> {
    /// Fails with `NonUnitary` unless `U^H U = I` within the unitary tolerance.
    pub fn new(m: DenseMatrix<T>) -> Result<Self> {
        let deviation = m.unitarity_deviation();
        if !(deviation <= T::unitary_tol()) {
            return Err(Error::NonUnitary { deviation: deviation.as_f64() });
        }
        Ok(Self { inner: m })
    }

    pub(crate) fn new_unchecked(m: DenseMatrix<T>) -> Self {
        Self { inner: m }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> DenseMatrix<T> {
        self.inner
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.inner.get(i, j)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        Ok(Self { inner: self.inner.matmul(&rhs.inner)? })
    }
}

impl<T: Real> LinearOperator<T> for UnitaryMatrix<T> {
    fn dim(&self) -> usize {
        self.inner.rows()
    }

    fn apply_into(&self, input: &[Complex<T>], output: &mut [Complex<T>]) {
        dense_apply(&self.inner, input, output);
    }
}

/// Diagonal unitary stored as its phases.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalUnitary<T> {
    phases: Vec<Complex<T>>,
}

impl<T: Real> DiagonalUnitary<T> {
    /// `exp(-i t diag(h))`.
    pub fn from_hamiltonian(diag: &[T], t: T) -> Self {
        Self { phases: diag.iter().map(|&h| Complex::from_polar(T::one(), -t * h)).collect() }
    }

    pub fn phases(&self) -> &[Complex<T>] {
        &self.phases
    }

    pub fn to_dense(&self) -> UnitaryMatrix<T> {
        UnitaryMatrix { inner: DenseMatrix::from_diagonal(&self.phases) }
    }
}

impl<T: Real> LinearOperator<T> for DiagonalUnitary<T> {
    fn dim(&self) -> usize {
        self.phases.len()
    }

    fn apply_into(&self, input: &[Complex<T>], output: &mut [Complex<T>]) {
        for ((o, x), p) in output.iter_mut().zip(input).zip(&self.phases) {
            *o = x * p;
        }
    }
}

/// `exp(-i t A) v` by a truncated Taylor series on `s` substeps, each with
/// `||t A / s||_∞ <= 1/2`, iterating only over nonzero entries of `A`.
///
/// Independent of the eigensolver; the full-space oracles use it so that
/// they do not share arithmetic with the reduced path.
pub fn expm_multiply_taylor<T: Real>(a: &DenseMatrix<T>, t: T, v: &ComplexVector<T>) -> Result<ComplexVector<T>> {
    let n = a.rows();
    if !a.is_square() || v.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: v.dim() });
    }
    let zero = Complex::new(T::zero(), T::zero());
    let sparse: Vec<Vec<(usize, Complex<T>)>> = (0..n)
        .map(|i| a.row(i).iter().enumerate().filter(|(_, x)| **x != zero).map(|(j, x)| (j, *x)).collect())
        .collect();
    let norm = sparse
        .iter()
        .map(|row| row.iter().map(|(_, x)| x.norm()).sum::<T>())
        .fold(T::zero(), T::max);
    let mut w = v.as_slice().to_vec();
    if norm == T::zero() || t == T::zero() {
        return Ok(ComplexVector::new(w));
    }
    let steps = (t.abs() * norm * T::lit(2.0)).ceil().to_usize().unwrap_or(1).max(1);
    let h = Complex::new(T::zero(), -t / T::from_count(steps));
    let max_abs = |x: &[Complex<T>]| x.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    for _ in 0..steps {
        let mut term = w.clone();
        for k in 1..=200 {
            let factor = h / T::from_count(k);
            let next: Vec<Complex<T>> =
                sparse.iter().map(|row| row.iter().fold(zero, |acc, &(j, x)| acc + x * term[j]) * factor).collect();
            term = next;
            for (acc, x) in w.iter_mut().zip(&term) {
                *acc += x;
            }
            if max_abs(&term) <= T::epsilon() * T::lit(0.01) * max_abs(&w) {
                break;
            }
        }
    }
    Ok(ComplexVector::new(w))
}
