//! Compressed-sparse-row complex matrices.
//!
//! Only the handful of operations the generator assembly needs: products,
//! sums, adjoints, Kronecker products and matrix-vector products. Entries are
//! stored exactly as computed; the only entries removed are exact zeros.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::linalg::{CMatrix, CVector, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self::from_triplets(
            diag.len(),
            diag.len(),
            diag.iter().enumerate().map(|(i, &z)| (i, i, z)),
        )
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); nrows];
        for (r, col, z) in triplets {
            assert!(r < nrows && col < ncols, "triplet ({r}, {col}) outside {nrows}x{ncols}");
            rows[r].push((col, z));
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(col, _)| col);
            let mut iter = row.into_iter().peekable();
            while let Some((col, mut z)) = iter.next() {
                while let Some(&(next, w)) = iter.peek() {
                    if next != col {
                        break;
                    }
                    z += w;
                    iter.next();
                }
                if z != ZERO {
                    indices.push(col);
                    values.push(z);
                }
            }
            indptr.push(indices.len());
        }
        Self { nrows, ncols, indptr, indices, values }
    }

    pub fn from_dense(m: &CMatrix) -> Self {
        let mut triplets = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != ZERO {
                    triplets.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), triplets)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzeros of row `i` as `(col, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, z)| (i, j, z)))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let span = self.indptr[i]..self.indptr[i + 1];
        match self.indices[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.nrows, self.ncols);
        for (i, j, z) in self.triplets() {
            m[(i, j)] = z;
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        if s == ZERO {
            return Self::zeros(self.nrows, self.ncols);
        }
        let mut out = self.clone();
        out.values.iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|z| *z = z.conj());
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.triplets().map(|(i, j, z)| (j, i, z)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(i, j, z)| (j, i, z.conj())),
        )
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        assert_eq!(v.len(), self.ncols, "matrix-vector shape mismatch");
        CVector::from_fn(self.nrows, |i, _| self.row(i).map(|(j, z)| z * v[j]).sum())
    }

    /// Dense product `self · m`.
    pub fn mul_dense(&self, m: &CMatrix) -> CMatrix {
        assert_eq!(m.nrows(), self.ncols, "matrix-matrix shape mismatch");
        let mut out = CMatrix::zeros(self.nrows, m.ncols());
        for i in 0..self.nrows {
            for (k, z) in self.row(i) {
                for j in 0..m.ncols() {
                    out[(i, j)] += z * m[(k, j)];
                }
            }
        }
        out
    }

    /// Dense product `m · self`.
    pub fn left_mul_dense(&self, m: &CMatrix) -> CMatrix {
        assert_eq!(m.ncols(), self.nrows, "matrix-matrix shape mismatch");
        let mut out = CMatrix::zeros(m.nrows(), self.ncols);
        for k in 0..self.nrows {
            for (j, z) in self.row(k) {
                for i in 0..m.nrows() {
                    out[(i, j)] += m[(i, k)] * z;
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "sparse product shape mismatch");
        let mut acc = vec![ZERO; other.ncols];
        let mut touched = vec![false; other.ncols];
        let mut cols = Vec::new();
        let mut triplets = Vec::new();
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !touched[j] {
                        touched[j] = true;
                        cols.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            for &j in &cols {
                triplets.push((i, j, acc[j]));
                acc[j] = ZERO;
                touched[j] = false;
            }
            cols.clear();
        }
        Self::from_triplets(self.nrows, other.ncols, triplets)
    }

    /// `self ⊗ other` with the standard block layout.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = other.shape();
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.triplets() {
            for (k, l, b) in other.triplets() {
                triplets.push((i * p + k, j * q + l, a * b));
            }
        }
        Self::from_triplets(self.nrows * p, self.ncols * q, triplets)
    }

    /// Dense principal-style compression onto the given row/column index lists.
    pub fn compress(&self, rows: &[usize], cols: &[usize]) -> CMatrix {
        let mut col_pos = vec![usize::MAX; self.ncols];
        for (k, &j) in cols.iter().enumerate() {
            col_pos[j] = k;
        }
        let mut out = CMatrix::zeros(rows.len(), cols.len());
        for (r, &i) in rows.iter().enumerate() {
            for (j, z) in self.row(i) {
                if col_pos[j] != usize::MAX {
                    out[(r, col_pos[j])] = z;
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut sums = vec![0.0; self.ncols];
        for (_, j, z) in self.triplets() {
            sums[j] += z.norm();
        }
        sums.into_iter().fold(0.0, f64::max)
    }
}

impl Add for &SparseMatrix {
    type Output = SparseMatrix;

    fn add(self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sparse sum shape mismatch");
        SparseMatrix::from_triplets(self.nrows, self.ncols, self.triplets().chain(rhs.triplets()))
    }
}

impl Sub for &SparseMatrix {
    type Output = SparseMatrix;

    fn sub(self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sparse difference shape mismatch");
        SparseMatrix::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets().chain(rhs.triplets().map(|(i, j, z)| (i, j, -z))),
        )
    }
}

impl Neg for &SparseMatrix {
    type Output = SparseMatrix;

    fn neg(self) -> SparseMatrix {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &SparseMatrix {
    type Output = SparseMatrix;

    fn mul(self, rhs: &SparseMatrix) -> SparseMatrix {
        self.matmul(rhs)
    }
}

impl Mul<&CVector> for &SparseMatrix {
    type Output = CVector;

    fn mul(self, rhs: &CVector) -> CVector {
        self.mul_vec(rhs)
    }
}

/// Sum of scaled terms, skipping zero coefficients.
pub fn linear_combination<'a, I>(nrows: usize, ncols: usize, terms: I) -> SparseMatrix
where
    I: IntoIterator<Item = (Complex64, &'a SparseMatrix)>,
{
    let mut triplets = Vec::new();
    for (s, m) in terms {
        if s == ZERO {
            continue;
        }
        triplets.extend(m.triplets().map(|(i, j, z)| (i, j, s * z)));
    }
    SparseMatrix::from_triplets(nrows, ncols, triplets)
}
