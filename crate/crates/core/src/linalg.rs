//! Dense complex vectors and matrices.
//!
//! Everything here is finite-dimensional and row-major. Deviation metrics use
//! the Frobenius norm; strong-operator statements are decided by applying
//! operators to a finite panel of probe vectors.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for the `unitary` and `projection` flag checks.
pub const FLAG_TOLERANCE: f64 = 1e-10;

/// Gram-matrix tolerance accepted by [`projector_from_vectors`].
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: vec![ZERO; dim] }
    }

    /// The `index`-th standard basis vector.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = ONE;
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    /// `<self, other>`, linear in the first slot.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.entries.iter().zip(&other.entries).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "distance dimension mismatch");
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.entries.iter().map(|z| z * c).collect())
    }

    /// `self += c * x`
    pub fn axpy(&mut self, c: Complex64, x: &Self) {
        assert_eq!(self.dim(), x.dim(), "axpy dimension mismatch");
        for (a, b) in self.entries.iter_mut().zip(&x.entries) {
            *a += c * b;
        }
    }

    /// Tensor product `self ⊗ other` in the row-major Kronecker convention.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                out.push(a * b);
            }
        }
        Self::new(out)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale(Complex64::new(1.0 / n, 0.0))
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.iter()).finish()
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        let mut out = self.clone();
        out.axpy(ONE, rhs);
        out
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        let mut out = self.clone();
        out.axpy(-ONE, rhs);
        out
    }
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = *d;
        }
        m
    }

    /// The rank-one operator `x y*`.
    pub fn outer(x: &ComplexVector, y: &ComplexVector) -> Self {
        Self::from_fn(x.dim(), y.dim(), |i, j| x.entries()[i] * y.entries()[j].conj())
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

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::new((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * c).collect() }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: Complex64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "axpy shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// True when every entry is exactly zero.
    pub fn is_exact_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "distance shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn checked_apply(&self, x: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != x.dim() {
            return Err(Error::DimensionMismatch { expected: self.cols, found: x.dim() });
        }
        Ok(ComplexVector::new(
            (0..self.rows).map(|i| self.row(i).iter().zip(x.entries()).map(|(a, b)| a * b).sum()).collect(),
        ))
    }

    pub fn apply(&self, x: &ComplexVector) -> ComplexVector {
        self.checked_apply(x).expect("matrix-vector dimension mismatch")
    }

    /// `‖A*A − I‖_F ≤ 1e−10`.
    pub fn is_unitary(&self) -> bool {
        self.is_square() && (&self.adjoint() * self).frobenius_distance(&Self::identity(self.rows)) <= FLAG_TOLERANCE
    }

    /// `‖A² − A‖_F ≤ 1e−10` and `‖A* − A‖_F ≤ 1e−10`.
    pub fn is_projection(&self) -> bool {
        self.is_square()
            && (self * self).frobenius_distance(self) <= FLAG_TOLERANCE
            && self.adjoint().frobenius_distance(self) <= FLAG_TOLERANCE
    }

    /// Largest singular value by power iteration on `A*A`.
    pub fn operator_norm(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let gram = &self.adjoint() * self;
        // Deterministic start with no special alignment to standard axes.
        let mut v = ComplexVector::new(
            (0..gram.cols).map(|i| Complex64::new(1.0 + 0.37 * i as f64, 0.11 * (i as f64 + 1.0))).collect(),
        )
        .normalized();
        let mut lambda = 0.0;
        for _ in 0..10_000 {
            let w = gram.apply(&v);
            let next = w.norm();
            if next == 0.0 {
                return 0.0;
            }
            v = w.scale(Complex64::new(1.0 / next, 0.0));
            if (next - lambda).abs() <= 1e-13 * next {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.sqrt()
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Runs cyclic Jacobi on the real symmetric embedding `[[X, −Y], [Y, X]]`
    /// of `H = X + iY`, whose spectrum is that of `H` with every value doubled.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        assert!(self.is_square(), "hermitian_eigenvalues needs a square matrix");
        let n = self.rows;
        let size = 2 * n;
        let mut a = vec![0.0f64; size * size];
        for i in 0..n {
            for j in 0..n {
                // symmetrize to absorb rounding in the imaginary skew part
                let z = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
                a[i * size + j] = z.re;
                a[(i + n) * size + (j + n)] = z.re;
                a[i * size + (j + n)] = -z.im;
                a[(i + n) * size + j] = z.im;
            }
        }
        jacobi_symmetric(&mut a, size);
        let mut diag: Vec<f64> = (0..size).map(|i| a[i * size + i]).collect();
        diag.sort_by(|x, y| x.partial_cmp(y).expect("NaN eigenvalue"));
        diag.into_iter().step_by(2).collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        kron(self, other)
    }
}

fn jacobi_symmetric(a: &mut [f64], n: usize) {
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if total == 0.0 {
        return;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total {
            return;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_mul(rhs).expect("matrix product dimension mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.axpy(ONE, rhs);
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.axpy(-ONE, rhs);
        out
    }
}

/// Kronecker product: `(a ⊗ b)(x ⊗ y) = (ax) ⊗ (by)`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.get(i, j);
            if aij.re == 0.0 && aij.im == 0.0 {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out.data[(i * b.rows + k) * cols + j * b.cols + l] = aij * b.get(k, l);
                }
            }
        }
    }
    out
}

/// `P = Σ v_i v_i*` for an orthonormal family in `ℂ^dim`.
pub fn projector_from_vectors(dim: usize, basis: &[ComplexVector]) -> Result<ComplexMatrix> {
    for v in basis {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.dim() });
        }
    }
    let deviation = gram_deviation(basis);
    if deviation > ORTHONORMAL_TOLERANCE {
        return Err(Error::NonOrthonormalInput { deviation });
    }
    let mut p = ComplexMatrix::zeros(dim, dim);
    for v in basis {
        p.axpy(ONE, &ComplexMatrix::outer(v, v));
    }
    Ok(p)
}

/// Frobenius distance between the Gram matrix of `vectors` and the identity.
pub fn gram_deviation(vectors: &[ComplexVector]) -> f64 {
    let mut sum = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            sum += (a.inner(b) - target).norm_sqr();
        }
    }
    sum.sqrt()
}

/// Left-to-right product `F_1 F_2 ⋯ F_n`.
pub fn chain_product(factors: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyInput("chain_product factors"))?;
    rest.iter().try_fold(first.clone(), |acc, f| acc.checked_mul(f))
}
