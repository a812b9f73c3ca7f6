//! Dense complex linear algebra over composite Hilbert spaces.
//!
//! Matrices are stored row-major. Every space handled by this crate is at
//! most a few hundred dimensions (two copies of two qutrits is 81), so dense
//! storage and naive products are adequate.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance (max-norm) for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, " ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != data.len() {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::Shape(format!(
                "trace of product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut acc = ZERO;
        for i in 0..self.rows {
            let row = self.row(i);
            for (j, a) in row.iter().enumerate() {
                acc += a * other[(j, i)];
            }
        }
        Ok(acc)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `⟨a|self|b⟩`.
    pub fn sandwich(&self, a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
        let mb = self.apply(b)?;
        if a.len() != self.rows {
            return Err(Error::Shape("bra length does not match matrix rows".into()));
        }
        Ok(a.iter().zip(&mb).map(|(x, y)| x.conj() * y).sum())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "elementwise operation on {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Max-norm distance `max |self[i,j] − other[i,j]|`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |M[i,j] − conj(M[j,i])|`, or infinity for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        tensor(self, other)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.checked_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.checked_sub(rhs).expect("matrix difference shape mismatch")
    }
}

/// Ordered local dimensions of a tensor-product space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsystemShape {
    dims: Vec<usize>,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Shape(format!("invalid subsystem dims {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    fn check_operator(&self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() || m.rows() != self.total() {
            return Err(Error::Shape(format!(
                "{}x{} operator does not act on a space with dims {:?}",
                m.rows(),
                m.cols(),
                self.dims
            )));
        }
        Ok(())
    }

    fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (k, &d) in self.dims.iter().enumerate().rev() {
            out[k] = index % d;
            index /= d;
        }
        out
    }
}

fn compose(dims: &[usize], digits: &[usize]) -> usize {
    dims.iter().zip(digits).fold(0, |acc, (&d, &x)| acc * d + x)
}

/// Kronecker product; `(A⊗B)[i·rb + k, j·cb + l] = A[i,j]·B[k,l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(a.rows * rb, a.cols * cb);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors.
pub fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Traces out the factors listed in `traced`, returning the operator on the
/// remaining factors (kept in their original order).
pub fn partial_trace(m: &ComplexMatrix, shape: &SubsystemShape, traced: &[usize]) -> Result<ComplexMatrix> {
    shape.check_operator(m)?;
    let n = shape.factors();
    let mut is_traced = vec![false; n];
    for &t in traced {
        if t >= n {
            return Err(Error::Shape(format!("factor index {t} out of range for {n} factors")));
        }
        if is_traced[t] {
            return Err(Error::Shape(format!("factor {t} listed twice")));
        }
        is_traced[t] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&k| !is_traced[k]).collect();
    let gone: Vec<usize> = (0..n).filter(|&k| is_traced[k]).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| shape.dims[k]).collect();
    let gone_dims: Vec<usize> = gone.iter().map(|&k| shape.dims[k]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let gone_total: usize = gone_dims.iter().product();

    // full index for each (kept multi-index, traced multi-index)
    let full_index = |kept_idx: usize, gone_idx: usize| {
        let kd = SubsystemShape { dims: kept_dims.clone() }.digits(kept_idx);
        let gd = if gone.is_empty() { Vec::new() } else { SubsystemShape { dims: gone_dims.clone() }.digits(gone_idx) };
        let mut digits = vec![0; n];
        for (p, &k) in kept.iter().enumerate() {
            digits[k] = kd[p];
        }
        for (p, &k) in gone.iter().enumerate() {
            digits[k] = gd[p];
        }
        compose(&shape.dims, &digits)
    };
    let table: Vec<Vec<usize>> = (0..kept_total)
        .map(|i| (0..gone_total).map(|t| full_index(i, t)).collect())
        .collect();

    Ok(ComplexMatrix::from_fn(kept_total, kept_total, |i, j| {
        table[i].iter().zip(&table[j]).map(|(&a, &b)| m[(a, b)]).sum()
    }))
}

/// Reorders tensor factors: factor `k` of the output is factor `perm[k]` of
/// the input. Equivalent to conjugation `P M P†` by the reordering unitary.
pub fn permute_subsystems(m: &ComplexMatrix, shape: &SubsystemShape, perm: &[usize]) -> Result<ComplexMatrix> {
    shape.check_operator(m)?;
    let n = shape.factors();
    if perm.len() != n {
        return Err(Error::Shape(format!("permutation of length {} for {n} factors", perm.len())));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::Shape(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen[p] = true;
    }
    let new_shape = SubsystemShape { dims: perm.iter().map(|&p| shape.dims[p]).collect() };
    let total = shape.total();
    let source: Vec<usize> = (0..total)
        .map(|y| {
            let yd = new_shape.digits(y);
            let mut xd = vec![0; n];
            for (k, &p) in perm.iter().enumerate() {
                xd[p] = yd[k];
            }
            compose(&shape.dims, &xd)
        })
        .collect();
    Ok(ComplexMatrix::from_fn(total, total, |i, j| m[(source[i], source[j])]))
}

/// Orthonormalizes the columns of `m` (modified Gram-Schmidt, two passes).
///
/// For a complex Gaussian input the result is a Haar-distributed isometry:
/// this is QR with the diagonal of R made positive.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = (m.rows, m.cols);
    if cols > rows {
        return Err(Error::Shape(format!("cannot orthonormalize {cols} columns in dimension {rows}")));
    }
    let mut q: Vec<Vec<Complex64>> = (0..cols).map(|c| m.column(c)).collect();
    for k in 0..cols {
        for _ in 0..2 {
            for j in 0..k {
                let (done, rest) = q.split_at_mut(k);
                let overlap: Complex64 = done[j].iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in rest[0].iter_mut().zip(&done[j]) {
                    *x -= overlap * y;
                }
            }
        }
        let norm = q[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-13 {
            return Err(Error::Validation("columns are numerically linearly dependent".into()));
        }
        for x in q[k].iter_mut() {
            *x /= norm;
        }
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |r, c| q[c][r]))
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// `V·diag(f(λ))·V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fl: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| self.vectors[(i, k)] * self.vectors[(j, k)].conj() * fl[k]).sum()
        })
    }
}

/// Hermitian eigendecomposition with ascending real eigenvalues and
/// orthonormal eigenvector columns. The input is symmetrized before solving.
pub fn eig_hermitian(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Shape(format!("eigendecomposition of non-square {}x{}", m.rows, m.cols)));
    }
    let defect = m.hermiticity_defect();
    if defect > tol {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian: defect {defect:.3e} exceeds {tol:.1e}"
        )));
    }
    let n = m.rows;
    let h = m.hermitian_part();
    let dm = DMatrix::from_row_slice(n, n, h.as_slice());
    let eig = SymmetricEigen::new(dm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Singular values of `m`, in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let dm = DMatrix::from_row_slice(m.rows, m.cols, &m.data);
    let mut values: Vec<f64> = dm.singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}
