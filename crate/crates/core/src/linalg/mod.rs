//! Dense complex linear algebra: matrices, state vectors, and a Jacobi
//! eigensolver for Hermitian matrices.

mod eigen;
mod jacobi;

pub use eigen::{
    decomposition_residuals, eig_hermitian, evolve_state, spectral_norm, BlockOperator, SpectralDecomposition,
};
pub use jacobi::MAX_SWEEPS;

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Complex dot product `Σ a_k b_k` without conjugation.
///
/// Four independent accumulators keep the loop pipelined.
#[inline]
pub(crate) fn dot_unconj(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    let mut re = [0.0f64; 4];
    let mut im = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for j in 0..4 {
            let x = a[4 * c + j];
            let y = b[4 * c + j];
            re[j] += x.re * y.re - x.im * y.im;
            im[j] += x.re * y.im + x.im * y.re;
        }
    }
    for k in 4 * chunks..a.len() {
        let x = a[k];
        let y = b[k];
        re[0] += x.re * y.re - x.im * y.im;
        im[0] += x.re * y.im + x.im * y.re;
    }
    C64::new((re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3]))
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "from_row_major",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    op: "from_real_rows",
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Ok(ComplexMatrix { rows: r, cols: c, data })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        let mut m = Self::zeros(d, d);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * d + i] = C64::new(v, 0.0);
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

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Top-left `rows × cols` block.
    pub fn block(&self, rows: usize, cols: usize) -> Self {
        assert!(rows <= self.rows && cols <= self.cols);
        Self::from_fn(rows, cols, |i, j| self.get(i, j))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a != ZERO {
                    axpy(a, other.row(l), out_row);
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &StateVector) -> Result<StateVector> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch {
                op: "matvec",
                expected: self.cols,
                found: v.dim(),
            });
        }
        let amps = (0..self.rows)
            .map(|i| dot_unconj(self.row(i), v.amplitudes()))
            .collect();
        Ok(StateVector::from_amplitudes(amps))
    }

    /// `self · x` into a preallocated buffer.
    pub(crate) fn matvec_into(&self, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot_unconj(self.row(i), x);
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> Result<f64> {
        spectral_norm(self)
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, mut exp: u64) -> Result<ComplexMatrix> {
        if !self.is_square() {
            return Err(Error::usage("matrix power of a non-square matrix"));
        }
        let mut acc = Self::identity(self.rows);
        let mut base = self.clone();
        let mut first = true;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = if first { base.clone() } else { acc.matmul(&base)? };
                first = false;
            }
            exp >>= 1;
            if exp > 0 {
                base = base.matmul(&base)?;
            }
        }
        Ok(acc)
    }

    fn zip_with(&self, other: &ComplexMatrix, op: &'static str, f: impl Fn(C64, C64) -> C64) -> Result<ComplexMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch {
                op,
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, "sub", |a, b| a - b)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix add: shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix sub: shape mismatch")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product: shape mismatch")
    }
}

/// Square matrix equal to its conjugate transpose.
///
/// Construction symmetrizes the input as `(M + M†)/2`, so rounding-level
/// asymmetry from products is absorbed rather than rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                op: "HermitianMatrix::new",
                expected: m.rows,
                found: m.cols,
            });
        }
        if m.rows == 0 {
            return Err(Error::usage("Hermitian matrix must have dimension >= 1"));
        }
        let d = m.rows;
        let sym = ComplexMatrix::from_fn(d, d, |i, j| (m.get(i, j) + m.get(j, i).conj()) * 0.5);
        Ok(HermitianMatrix(sym))
    }

    /// Largest entrywise deviation `|M_ij − conj(M_ji)|` of a square matrix.
    pub fn asymmetry(m: &ComplexMatrix) -> f64 {
        let d = m.rows.min(m.cols);
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((m.get(i, j) - m.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn from_real_diagonal(values: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diagonal(values))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0.get(i, j)
    }

    pub fn try_add(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(HermitianMatrix(self.0.try_add(&other.0)?))
    }

    /// `self + shift · I`
    pub fn shifted(&self, shift: f64) -> HermitianMatrix {
        let mut m = self.0.clone();
        for i in 0..m.rows {
            let v = m.get(i, i) + shift;
            m.set(i, i, v);
        }
        HermitianMatrix(m)
    }

    pub fn scaled(&self, s: f64) -> HermitianMatrix {
        HermitianMatrix(self.0.scale(C64::new(s, 0.0)))
    }

    pub fn matvec(&self, v: &StateVector) -> Result<StateVector> {
        self.0.matvec(v)
    }

    /// Top-left `d × d` block, again Hermitian.
    pub fn block(&self, d: usize) -> HermitianMatrix {
        HermitianMatrix(self.0.block(d, d))
    }

    /// Commutator `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &HermitianMatrix) -> Result<ComplexMatrix> {
        let ab = self.0.matmul(&other.0)?;
        let ba = other.0.matmul(&self.0)?;
        ab.try_sub(&ba)
    }
}

/// Complex state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<C64>) -> Self {
        StateVector { amps }
    }

    pub fn from_real(amps: &[f64]) -> Self {
        StateVector {
            amps: amps.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    /// Rescales to unit norm; rejects the zero vector.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let v = StateVector { amps };
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::usage("cannot normalize a zero or non-finite vector"));
        }
        Ok(v.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn basis(index: usize, dim: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::usage(format!(
                "basis index {index} outside dimension {dim}"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        vector_norm2(&self.amps)
    }

    /// `⟨self|other⟩`, conjugating the left argument.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_dim(other, "inner")?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scale(&self, s: C64) -> StateVector {
        StateVector {
            amps: self.amps.iter().map(|a| a * s).collect(),
        }
    }

    pub fn try_sub(&self, other: &StateVector) -> Result<StateVector> {
        self.check_dim(other, "sub")?;
        Ok(StateVector {
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn try_add(&self, other: &StateVector) -> Result<StateVector> {
        self.check_dim(other, "add")?;
        Ok(StateVector {
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        })
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.check_dim(other, "distance")?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    fn check_dim(&self, other: &StateVector, op: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                op,
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// Euclidean norm, scaled to avoid overflow on large entries.
pub fn vector_norm2(v: &[C64]) -> f64 {
    let scale = v.iter().map(|x| x.re.abs().max(x.im.abs())).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = v.iter().map(|x| (x / scale).norm_sqr()).sum();
    scale * s.sqrt()
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

pub fn matvec(a: &ComplexMatrix, v: &StateVector) -> Result<StateVector> {
    a.matvec(v)
}
