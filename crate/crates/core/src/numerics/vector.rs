use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::{Error, Real, Result};

/// Dense complex vector of amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector<T> {
    entries: Vec<Complex<T>>,
}

impl<T: Real> ComplexVector<T> {
    pub fn new(entries: Vec<Complex<T>>) -> Self {
        Self { entries }
    }

    pub fn from_real(entries: &[T]) -> Self {
        Self::new(entries.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![Complex::new(T::zero(), T::zero()); dim])
    }

    /// Standard basis vector `e_{index+1}`, i.e. `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = Complex::new(T::one(), T::zero());
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.entries
    }

    pub fn into_inner(self) -> Vec<Complex<T>> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex<T>> {
        self.entries.iter()
    }

    pub fn norm_sqr(&self) -> T {
        self.entries.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: T) -> bool {
        (self.norm_sqr() - T::one()).abs() <= tol
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_dim(other.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Infinity norm of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_dim(other.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self::new(self.entries.iter().map(|a| a * factor).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self::new(
            self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self::new(
            self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        ))
    }

    /// `|a_x|^2` for every entry.
    pub fn probabilities(&self) -> Vec<T> {
        self.entries.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_dim(&self, actual: usize) -> Result<()> {
        if actual != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual });
        }
        Ok(())
    }
}

impl<T> Index<usize> for ComplexVector<T> {
    type Output = Complex<T>;

    fn index(&self, index: usize) -> &Complex<T> {
        &self.entries[index]
    }
}

impl<T> IndexMut<usize> for ComplexVector<T> {
    fn index_mut(&mut self, index: usize) -> &mut Complex<T> {
        &mut self.entries[index]
    }
}

impl<T> From<Vec<Complex<T>>> for ComplexVector<T> {
    fn from(entries: Vec<Complex<T>>) -> Self {
        Self { entries }
    }
}

impl<T> FromIterator<Complex<T>> for ComplexVector<T> {
    fn from_iter<I: IntoIterator<Item = Complex<T>>>(iter: I) -> Self {
        Self { entries: iter.into_iter().collect() }
    }
}
