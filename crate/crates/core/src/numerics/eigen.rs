use num_complex::Complex;

use super::{ComplexVector, DenseMatrix, HermitianMatrix, UnitaryMatrix};
use crate::{Real, Result};

const MAX_QL_ITERATIONS: usize = 64;

/// Spectral decomposition `H = V diag(values) V^H` of a Hermitian matrix.
///
/// Eigenvalues are ascending; column `j` of `vectors` belongs to `values[j]`.
/// One decomposition yields `exp(-i t H)` for any `t`.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    values: Vec<T>,
    vectors: DenseMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// Splits the index set into the connected components of the nonzero
    /// pattern and diagonalizes each block separately (Householder
    /// tridiagonalization, then implicit QL). A projected Hamiltonian that
    /// lives on a small block of a large space costs only as much as the
    /// block.
    pub fn new(h: &HermitianMatrix<T>) -> Self {
        let n = h.dim();
        let a = h.matrix();
        let mut vectors = DenseMatrix::zeros(n, n);
        let mut values = Vec::with_capacity(n);
        for block in components(a) {
            let sub = DenseMatrix::from_fn(block.len(), block.len(), |i, j| a.get(block[i], block[j]));
            let (vals, vecs) = dense_eigen(sub);
            let col0 = values.len();
            values.extend(vals);
            for (r, &row) in block.iter().enumerate() {
                for c in 0..block.len() {
                    vectors.set(row, col0 + c, vecs.get(r, c));
                }
            }
        }
        Self::sorted(values, vectors)
    }

    fn sorted(values: Vec<T>, vectors: DenseMatrix<T>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite eigenvalues"));
        let sorted_values = order.iter().map(|&i| values[i]).collect();
        let sorted_vectors = DenseMatrix::from_fn(n, n, |r, c| vectors.get(r, order[c]));
        Self { values: sorted_values, vectors: sorted_vectors }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn vectors(&self) -> &DenseMatrix<T> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `exp(-i t H) = V diag(exp(-i t λ_j)) V^H`.
    pub fn unitary(&self, t: T) -> UnitaryMatrix<T> {
        let n = self.dim();
        let phases: Vec<Complex<T>> =
            self.values.iter().map(|&l| Complex::from_polar(T::one(), -t * l)).collect();
        // (V diag(phases)) V^H, accumulated row by row.
        let mut out = DenseMatrix::zeros(n, n);
        let scaled: Vec<Complex<T>> = (0..n * n)
            .map(|idx| self.vectors.get(idx / n, idx % n) * phases[idx % n])
            .collect();
        let data = out.as_mut_slice();
        for i in 0..n {
            let row_i = &scaled[i * n..(i + 1) * n];
            for j in 0..n {
                let row_j = self.vectors.row(j);
                let mut acc = Complex::new(T::zero(), T::zero());
                for (x, y) in row_i.iter().zip(row_j) {
                    acc += x * y.conj();
                }
                data[i * n + j] = acc;
            }
        }
        UnitaryMatrix::new_unchecked(out)
    }

    /// `exp(-i t H) v` in `O(dim^2)` without forming the exponential.
    pub fn apply_exp(&self, t: T, v: &ComplexVector<T>) -> Result<ComplexVector<T>> {
        let n = self.dim();
        if v.dim() != n {
            return Err(crate::Error::DimensionMismatch { expected: n, actual: v.dim() });
        }
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); n];
        for i in 0..n {
            let vi = v[i];
            if vi.re == T::zero() && vi.im == T::zero() {
                continue;
            }
            for (c, e) in coeffs.iter_mut().zip(self.vectors.row(i)) {
                *c += e.conj() * vi;
            }
        }
        for (c, &l) in coeffs.iter_mut().zip(&self.values) {
            *c *= Complex::from_polar(T::one(), -t * l);
        }
        let out = (0..n)
            .map(|i| {
                self.vectors
                    .row(i)
                    .iter()
                    .zip(&coeffs)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (e, c)| acc + e * c)
            })
            .collect();
        Ok(out)
    }
}

/// Index sets of the connected components of the graph with an edge
/// wherever `a_ij != 0`, each sorted ascending.
fn components<T: Real>(a: &DenseMatrix<T>) -> Vec<Vec<usize>> {
    let n = a.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let zero = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for (j, &x) in a.row(i).iter().enumerate().skip(i + 1) {
            if x != zero {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = root(&mut parent, i);
        groups[r].push(i);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

/// Eigenpairs of a dense Hermitian matrix, unsorted.
///
/// `A = Q T Q^H` by Householder reflections, the complex subdiagonal of `T`
/// is rotated real by a diagonal phase matrix `D`, and the real symmetric
/// tridiagonal `D^H T D = Z Λ Z^T` is solved by implicit QL. Eigenvectors
/// are the columns of `Q D Z`.
fn dense_eigen<T: Real>(mut a: DenseMatrix<T>) -> (Vec<T>, DenseMatrix<T>) {
    let n = a.rows();
    let zero = Complex::new(T::zero(), T::zero());
    if n == 1 {
        return (vec![a.get(0, 0).re], DenseMatrix::identity(1));
    }
    let mut q = DenseMatrix::<T>::identity(n);
    for k in 0..n.saturating_sub(2) {
        householder_step(&mut a, &mut q, k);
    }

    let diag: Vec<T> = (0..n).map(|i| a.get(i, i).re).collect();
    let mut sub = vec![T::zero(); n];
    let mut phase = vec![Complex::new(T::one(), T::zero()); n];
    for k in 0..n - 1 {
        let e = a.get(k + 1, k);
        let mag = e.norm();
        sub[k] = mag;
        phase[k + 1] = if mag > T::zero() { phase[k] * (e / mag) } else { phase[k] };
    }

    let (values, zt) = tridiagonal_ql(diag, sub);

    // V = Q D Z, with zt holding Z transposed.
    let qd: Vec<Complex<T>> = (0..n * n).map(|idx| q.get(idx / n, idx % n) * phase[idx % n]).collect();
    let mut v = DenseMatrix::zeros(n, n);
    for r in 0..n {
        let row = &qd[r * n..(r + 1) * n];
        for c in 0..n {
            let z = &zt[c * n..(c + 1) * n];
            let mut acc = zero;
            for (x, &w) in row.iter().zip(z) {
                acc += x * w;
            }
            v.set(r, c, acc);
        }
    }
    (values, v)
}

/// One Householder reflection `P = I - β u u^H` zeroing column `k` below the
/// subdiagonal: `A <- P A P`, `Q <- Q P`.
fn householder_step<T: Real>(a: &mut DenseMatrix<T>, q: &mut DenseMatrix<T>, k: usize) {
    let n = a.rows();
    let zero = Complex::new(T::zero(), T::zero());
    let lo = k + 1;
    let x: Vec<Complex<T>> = (lo..n).map(|i| a.get(i, k)).collect();
    let tail = x[1..].iter().map(|z| z.norm_sqr()).sum::<T>();
    if tail == T::zero() {
        return;
    }
    let alpha = (tail + x[0].norm_sqr()).sqrt();
    let x0_mag = x[0].norm();
    let unit = if x0_mag > T::zero() { x[0] / x0_mag } else { Complex::new(T::one(), T::zero()) };
    let mut u = x;
    u[0] += unit * alpha;
    let beta = T::lit(2.0) / u.iter().map(|z| z.norm_sqr()).sum::<T>();
    let m = n - lo;

    // p = β A22 u, K = β (u^H p) / 2, w = p - K u, A22 <- A22 - u w^H - w u^H.
    let mut p = vec![zero; m];
    for (i, pi) in p.iter_mut().enumerate() {
        let row = &a.row(lo + i)[lo..];
        let mut acc = zero;
        for (x, y) in row.iter().zip(&u) {
            acc += x * y;
        }
        *pi = acc * beta;
    }
    let uhp: Complex<T> = u.iter().zip(&p).map(|(x, y)| x.conj() * y).sum();
    let kk = uhp.re * beta / T::lit(2.0);
    let w: Vec<Complex<T>> = p.iter().zip(&u).map(|(pi, ui)| pi - ui * kk).collect();
    let data = a.as_mut_slice();
    for i in 0..m {
        for j in 0..m {
            data[(lo + i) * n + lo + j] -= u[i] * w[j].conj() + w[i] * u[j].conj();
        }
    }
    // Column k below the subdiagonal is now (−unit·alpha, 0, …).
    let e = -unit * alpha;
    data[lo * n + k] = e;
    data[k * n + lo] = e.conj();
    for i in lo + 1..n {
        data[i * n + k] = zero;
        data[k * n + i] = zero;
    }

    // Q <- Q P: Q[:, lo..] -= β (Q[:, lo..] u) u^H.
    let qd = q.as_mut_slice();
    for r in 0..n {
        let row = &mut qd[r * n + lo..(r + 1) * n];
        let mut s = zero;
        for (x, y) in row.iter().zip(&u) {
            s += x * y;
        }
        s *= beta;
        for (x, y) in row.iter_mut().zip(&u) {
            *x -= s * y.conj();
        }
    }
}

/// Implicit QL with Wilkinson-type shifts on a real symmetric tridiagonal
/// matrix (`sub[i]` couples `i` and `i + 1`). Returns the eigenvalues and the
/// eigenvectors as rows of a row-major `n x n` array.
fn tridiagonal_ql<T: Real>(mut d: Vec<T>, mut e: Vec<T>) -> (Vec<T>, Vec<T>) {
    let n = d.len();
    let mut zt = vec![T::zero(); n * n];
    for i in 0..n {
        zt[i * n + i] = T::one();
    }
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l || iterations == MAX_QL_ITERATIONS {
                break;
            }
            iterations += 1;
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r } else { -r });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (head, rest) = zt.split_at_mut((i + 1) * n);
                let zi = &mut head[i * n..];
                let zi1 = &mut rest[..n];
                for (x, y) in zi.iter_mut().zip(zi1.iter_mut()) {
                    let f = *y;
                    *y = s * *x + c * f;
                    *x = c * *x - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    (d, zt)
}

/// `exp(-i t H)` by Hermitian eigendecomposition.
///
/// Fails with `NonHermitianInput` when `h` is not Hermitian.
pub fn expm_hermitian<T: Real>(h: &DenseMatrix<T>, t: T) -> Result<UnitaryMatrix<T>> {
    let h = HermitianMatrix::new(h.clone())?;
    Ok(h.expm(t))
}
