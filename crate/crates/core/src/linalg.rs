//! Dense complex linear-algebra helpers shared by the rest of the crate.
//!
//! Everything here works on `nalgebra` dynamic matrices over `Complex64`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// max |m - m†|
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

/// max |m - mᵀ|
pub fn symmetry_error(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.transpose()))
}

/// max |r r† - 1|
pub fn unitarity_error(r: &CMatrix) -> f64 {
    if !r.is_square() {
        return f64::INFINITY;
    }
    let n = r.nrows();
    max_abs(&(r * r.adjoint() - CMatrix::identity(n, n)))
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in ascending order.
///
/// The input is symmetrized first; columns of the returned matrix are the
/// matching orthonormal eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank with threshold `rel_tol * σ_max`.
pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&top) = s.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// ⟨x, y⟩, antilinear in the first slot.
#[inline]
pub fn inner(x: &CVector, y: &CVector) -> Complex64 {
    x.dotc(y)
}

/// Column-stacking vectorization: `vec(ρ)[i + D·j] = ρ[i, j]`.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Dense matrix exponential (Padé scaling and squaring).
pub fn expm(m: &CMatrix) -> CMatrix {
    m.exp()
}

/// Computes `exp(t·A) v` for an operator given only through its action.
///
/// The interval is split into `s = ⌈|t|·‖A‖₁⌉` substeps so that every
/// substep has norm at most one, and each substep is summed as a Taylor
/// series until the next term drops below machine precision.
pub fn expm_action<F>(apply: F, norm1: f64, v: &CVector, t: f64) -> CVector
where
    F: Fn(&CVector) -> CVector,
{
    if t == 0.0 || norm1 == 0.0 {
        return v.clone();
    }
    let substeps = (t.abs() * norm1).ceil().max(1.0) as usize;
    let h = t / substeps as f64;
    let mut out = v.clone();
    for _ in 0..substeps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..=60 {
            term = apply(&term).scale(h / k as f64);
            acc += &term;
            let tn = term.norm();
            if tn <= f64::EPSILON * 0.25 * acc.norm() || tn == 0.0 {
                break;
            }
        }
        out = acc;
    }
    out
}

/// Incrementally built orthonormal set with a relative drop tolerance.
///
/// A candidate is kept when its residual after two passes of modified
/// Gram–Schmidt exceeds `drop_tol` times the largest norm of any
/// candidate retained so far.
#[derive(Debug, Clone)]
pub struct OrthonormalSet {
    vectors: Vec<CVector>,
    drop_tol: f64,
    scale: f64,
}

impl OrthonormalSet {
    pub fn new(drop_tol: f64) -> Self {
        Self { vectors: Vec::new(), drop_tol, scale: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<CVector> {
        self.vectors
    }

    /// Returns `true` when `candidate` enlarged the span.
    pub fn push(&mut self, candidate: &CVector) -> bool {
        let norm = candidate.norm();
        if norm == 0.0 || !norm.is_finite() {
            return false;
        }
        let reference = self.scale.max(norm);
        let mut r = candidate.clone();
        for _ in 0..2 {
            for q in &self.vectors {
                let p = q.dotc(&r);
                r.axpy(-p, q, ONE);
            }
        }
        let rn = r.norm();
        if rn <= self.drop_tol * reference {
            return false;
        }
        self.scale = reference;
        self.vectors.push(r.unscale(rn));
        true
    }
}

/// Complex Gaussian vector normalized to unit length.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    loop {
        let v = CVector::from_fn(dim, |_, _| {
            c(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let n = v.norm();
        if n > 0.0 {
            return v.unscale(n);
        }
    }
}

/// Complex Gaussian matrix with i.i.d. standard normal real and imaginary parts.
pub fn random_complex_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix with phase fix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let z = random_complex_matrix(rng, n, n);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    hermitian_part(&random_complex_matrix(rng, n, n))
}

pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let z = random_complex_matrix(rng, n, n);
    (&z + z.transpose()).scale(0.5)
}
