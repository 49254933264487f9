//! GKLS generators on `M_n(ℂ)` written with a Kossakowski matrix over a traceless basis.
//!
//! ```text
//! ℒ(x)   = i[H,x]  + Σ c_kj (F_j† x F_k − ½{F_j†F_k, x})
//! ℒ_*(ρ) = −i[H,ρ] + Σ c_kj (F_k ρ F_j† − ½{F_j†F_k, ρ})
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{Picture, Superoperator};
use crate::linalg::{
    expm, hermitian_eigen, hermitian_eigenvalues, hermiticity_error, inner, max_abs, random_complex_matrix,
    random_hermitian, random_unit_vector, re, vectorize, CMatrix, CVector, I, ONE, ZERO,
};
use crate::sparse::SparseMatrix;

/// Largest Hilbert dimension accepted by the superoperator routines.
pub const MAX_FD_DIM: usize = 6;
pub const BASIS_TOL: f64 = 1e-12;
pub const DERIVATIVE_STEP: f64 = 1e-4;
/// Probe values above this count as strictly positive.
pub const PROBE_POSITIVE: f64 = 1e-12;

/// Generalized Gell-Mann matrices normalized to `tr(F_j F_k†) = δ_jk`.
///
/// Order: symmetric `(E_jk + E_kj)/√2`, antisymmetric `(−iE_jk + iE_kj)/√2`
/// for `j < k`, then diagonal `diag(1,…,1,−l,0,…)/√(l(l+1))`.
pub fn gellmann_basis(n: usize) -> Result<Vec<CMatrix>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("Gell-Mann basis needs n ≥ 2, got {n}")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in j + 1..n {
            let mut m = CMatrix::zeros(n, n);
            m[(j, k)] = re(s);
            m[(k, j)] = re(s);
            out.push(m);
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            let mut m = CMatrix::zeros(n, n);
            m[(j, k)] = -I * s;
            m[(k, j)] = I * s;
            out.push(m);
        }
    }
    for l in 1..n {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..l {
            m[(i, i)] = re(1.0 / norm);
        }
        m[(l, l)] = re(-(l as f64) / norm);
        out.push(m);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGKLSModel {
    n: usize,
    h: CMatrix,
    basis: Vec<CMatrix>,
    c: CMatrix,
}

impl FiniteGKLSModel {
    /// Model over the Gell-Mann basis.
    pub fn new(h: CMatrix, c: CMatrix) -> Result<Self> {
        let basis = gellmann_basis(h.nrows())?;
        Self::with_basis(h, basis, c)
    }

    pub fn with_basis(h: CMatrix, basis: Vec<CMatrix>, c: CMatrix) -> Result<Self> {
        let n = h.nrows();
        if n < 2 || !h.is_square() {
            return Err(Error::ShapeMismatch(format!("H must be n×n with n ≥ 2, got {:?}", h.shape())));
        }
        let count = n * n - 1;
        if basis.len() != count || c.shape() != (count, count) {
            return Err(Error::ShapeMismatch(format!(
                "need {count} basis matrices and a {count}×{count} c, got {} and {:?}",
                basis.len(),
                c.shape()
            )));
        }
        let herm = hermiticity_error(&h);
        if herm > BASIS_TOL {
            return Err(Error::NotHermitian { what: "H", deviation: herm });
        }
        for (k, f) in basis.iter().enumerate() {
            if f.shape() != (n, n) {
                return Err(Error::ShapeMismatch(format!("basis matrix {k} is {:?}", f.shape())));
            }
            if f.trace().norm() > BASIS_TOL {
                return Err(Error::InvalidArgument(format!("basis matrix {k} is not traceless")));
            }
            for (j, g) in basis.iter().enumerate().take(k + 1) {
                let ip = (f * g.adjoint()).trace();
                let expected = if j == k { ONE } else { ZERO };
                if (ip - expected).norm() > BASIS_TOL {
                    return Err(Error::InvalidArgument(format!("basis matrices {k}, {j} are not orthonormal")));
                }
            }
        }
        let herm = hermiticity_error(&c);
        if herm > BASIS_TOL {
            return Err(Error::NotHermitian { what: "c", deviation: herm });
        }
        let min = hermitian_eigenvalues(&c).first().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(Error::NotPositive { what: "c", min_eig: min });
        }
        Ok(Self { n, h, basis, c })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &CMatrix {
        &self.h
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    /// Equivalent model with diagonal `c`: `c = W D W†`, `F'_a = Σ_k W_ka F_k`.
    pub fn diagonal_form(&self) -> Result<Self> {
        let (values, w) = hermitian_eigen(&self.c);
        let basis: Vec<CMatrix> = (0..self.basis.len())
            .map(|a| {
                self.basis
                    .iter()
                    .enumerate()
                    .fold(CMatrix::zeros(self.n, self.n), |acc, (k, f)| acc + f * w[(k, a)])
            })
            .collect();
        let d = CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&x| re(x))));
        Self::with_basis(self.h.clone(), basis, d)
    }
}

/// Seeded model with `c = A A†/‖A A†‖ + c_floor·1` and a random Hamiltonian.
pub fn random_fd_model(n: usize, c_floor: f64, h_scale: f64, seed: u64) -> Result<FiniteGKLSModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = n * n - 1;
    let a = random_complex_matrix(&mut rng, count, count);
    let mut c = &a * a.adjoint();
    let top = hermitian_eigenvalues(&c).last().copied().unwrap_or(1.0);
    c.unscale_mut(top);
    for k in 0..count {
        c[(k, k)] += re(c_floor);
    }
    let c = (&c + c.adjoint()).scale(0.5);
    let h = random_hermitian(&mut rng, n).scale(h_scale);
    FiniteGKLSModel::new(h, c)
}

/// `(Heisenberg, Schrödinger)` superoperators on column-stacked matrices.
pub fn build_fd_generators(model: &FiniteGKLSModel) -> Result<(Superoperator, Superoperator)> {
    let n = model.n;
    if n > MAX_FD_DIM {
        return Err(Error::DimensionCap { dim: n, cap: MAX_FD_DIM });
    }
    let id = CMatrix::identity(n, n);
    let comm = id.kronecker(&model.h) - model.h.transpose().kronecker(&id);
    let mut heis = comm.clone() * I;
    let mut schr = comm * (-I);
    for (k, fk) in model.basis.iter().enumerate() {
        for (j, fj) in model.basis.iter().enumerate() {
            let ckj = model.c[(k, j)];
            if ckj == ZERO {
                continue;
            }
            let prod = fj.adjoint() * fk;
            let anti = id.kronecker(&prod) + prod.transpose().kronecker(&id);
            heis += (fk.transpose().kronecker(&fj.adjoint()) - anti.scale(0.5)) * ckj;
            schr += (fj.conjugate().kronecker(fk) - anti.scale(0.5)) * ckj;
        }
    }
    Ok((
        Superoperator::new(SparseMatrix::from_dense(&heis), Picture::Heisenberg, n)?,
        Superoperator::new(SparseMatrix::from_dense(&schr), Picture::Schrodinger, n)?,
    ))
}

fn check_pair(n: usize, u: &CVector, v: &CVector) -> Result<()> {
    if u.len() != n || v.len() != n {
        return Err(Error::ShapeMismatch("vectors must have the model dimension".into()));
    }
    if (u.norm() - 1.0).abs() > 1e-10 || (v.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument("u and v must be unit vectors".into()));
    }
    Ok(())
}

/// `⟨v, 𝒯_t(|u⟩⟨u|) v⟩` for a precomputed `e^{tℒ}`.
fn transition(prop: &CMatrix, u: &CVector, v: &CVector) -> f64 {
    let n = u.len();
    let x = crate::linalg::unvectorize(&(prop * vectorize(&(u * u.adjoint()))), n);
    inner(v, &(x * v)).re
}

/// Analytic derivative `Σ c_kj ⟨F_j v,u⟩⟨u,F_k v⟩` at `t = 0` and its finite-difference estimate.
///
/// The numeric side is `(−3f(0) + 4f(h) − f(2h))/(2h)` with `h = 10⁻⁴`.
pub fn initial_derivative(model: &FiniteGKLSModel, u: &CVector, v: &CVector) -> Result<(f64, f64)> {
    check_pair(model.n, u, v)?;
    let overlap = inner(u, v).norm();
    if overlap > 1e-10 {
        return Err(Error::InvalidArgument(format!("u and v are not orthogonal (|⟨u,v⟩| = {overlap:e})")));
    }
    let x: Vec<_> = model.basis.iter().map(|f| inner(u, &(f * v))).collect();
    let mut analytic = ZERO;
    for (k, xk) in x.iter().enumerate() {
        for (j, xj) in x.iter().enumerate() {
            analytic += model.c[(k, j)] * xj.conj() * xk;
        }
    }
    let (heis, _) = build_fd_generators(model)?;
    let l = heis.to_dense();
    let h = DERIVATIVE_STEP;
    let f0 = transition(&CMatrix::identity(l.nrows(), l.nrows()), u, v);
    let f1 = transition(&expm(&l.scale(h)), u, v);
    let f2 = transition(&expm(&l.scale(2.0 * h)), u, v);
    Ok((analytic.re, (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdProbeReport {
    pub pairs: usize,
    pub min_value: f64,
    pub argmin_t: f64,
    pub positive: bool,
    /// Minimum for each `t` of the grid, in grid order.
    pub per_time: Vec<(f64, f64)>,
}

/// Minimum of `⟨v, 𝒯_t(|u⟩⟨u|) v⟩` over seeded unit pairs and the time grid.
pub fn fd_positivity_probe(model: &FiniteGKLSModel, t_grid: &[f64], n_pairs: usize, seed: u64) -> Result<FdProbeReport> {
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidArgument("probe times must be positive".into()));
    }
    if n_pairs == 0 {
        return Err(Error::InvalidArgument("at least one pair is required".into()));
    }
    let (heis, _) = build_fd_generators(model)?;
    let l = heis.to_dense();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(CVector, CVector)> = (0..n_pairs)
        .map(|_| (random_unit_vector(&mut rng, model.n), random_unit_vector(&mut rng, model.n)))
        .collect();
    let mut per_time = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let prop = expm(&l.scale(t));
        let min = pairs.iter().map(|(u, v)| transition(&prop, u, v)).fold(f64::INFINITY, f64::min);
        per_time.push((t, min));
    }
    let (argmin_t, min_value) =
        per_time.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1)).expect("grid is non-empty");
    Ok(FdProbeReport { pairs: n_pairs, min_value, argmin_t, positive: min_value > PROBE_POSITIVE, per_time })
}

/// JSON shape `{"n", "H", "c", "basis": "gellmann"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteModelSpec {
    pub n: usize,
    #[serde(rename = "H", with = "crate::io::cmat")]
    pub h: CMatrix,
    #[serde(with = "crate::io::cmat")]
    pub c: CMatrix,
    #[serde(default)]
    pub basis: BasisKind,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    #[default]
    Gellmann,
}

impl FiniteModelSpec {
    pub fn to_model(&self) -> Result<FiniteGKLSModel> {
        if self.h.nrows() != self.n {
            return Err(Error::ShapeMismatch(format!("n = {} but H has {} rows", self.n, self.h.nrows())));
        }
        FiniteGKLSModel::new(self.h.clone(), self.c.clone())
    }
}

/// Largest entry of `ℒ(1)`, `tr ℒ_*(ρ)` over matrix units, and the duality residual on seeded pairs.
pub fn fd_structure_residuals(model: &FiniteGKLSModel, seed: u64) -> Result<(f64, f64, f64)> {
    let (heis, schr) = build_fd_generators(model)?;
    let n = model.n;
    let unital = max_abs(&heis.apply(&CMatrix::identity(n, n)));
    let mut trace = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut e = CMatrix::zeros(n, n);
            e[(i, j)] = ONE;
            trace = trace.max(schr.apply(&e).trace().norm());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut duality = 0.0f64;
    for _ in 0..5 {
        let rho = random_complex_matrix(&mut rng, n, n);
        let x = random_complex_matrix(&mut rng, n, n);
        let lhs = (schr.apply(&rho) * &x).trace();
        let rhs = (&rho * heis.apply(&x)).trace();
        duality = duality.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
    }
    Ok((unital, trace, duality))
}
