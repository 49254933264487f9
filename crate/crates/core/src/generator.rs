//! Truncated matrices of `H`, `L_ℓ`, `G`, `G₀` and the Lindblad superoperators.
//!
//! `G₀ = −½ Σ_ℓ L_ℓ†L_ℓ` is formed from products of the *truncated* Kraus
//! matrices, so the truncated generator is itself an exact finite-dimensional
//! GKLS generator. The sum always runs over the `m` Kraus operators of the
//! model.
//!
//! Vectorization is column stacking throughout: `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{build_ladders, LadderOperators, TruncatedFockSpace};
use crate::linalg::{inner, re, unvectorize, vectorize, CMatrix, CVector, I, ONE};
use crate::model::{GaussianModel, KossakowskiMatrix};
use crate::sparse::{linear_combination, SparseMatrix};

#[derive(Debug, Clone)]
pub struct TruncatedOperators {
    pub space: TruncatedFockSpace,
    pub ladders: LadderOperators,
    pub h: SparseMatrix,
    pub kraus: Vec<SparseMatrix>,
    pub g0: SparseMatrix,
    pub g: SparseMatrix,
}

impl TruncatedOperators {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn number(&self) -> &SparseMatrix {
        &self.ladders.number
    }

    /// Interior compression `P_int X P_int` as a dense block.
    pub fn interior_block(&self, op: &SparseMatrix) -> CMatrix {
        let idx = self.space.interior_indices();
        op.compress(&idx, &idx)
    }
}

pub fn build_operators(model: &GaussianModel, space: &TruncatedFockSpace) -> Result<TruncatedOperators> {
    let d = model.modes();
    if space.modes() != d {
        return Err(Error::ShapeMismatch(format!("model has {d} modes, space has {}", space.modes())));
    }
    let dim = space.dim();
    let ladders = build_ladders(space);
    let (a, adag) = (&ladders.a, &ladders.adag);

    let mut terms: Vec<(Complex64, SparseMatrix)> = Vec::new();
    for j in 0..d {
        for k in 0..d {
            let om = model.omega()[(j, k)];
            if om != Complex64::new(0.0, 0.0) {
                terms.push((om, &adag[j] * &a[k]));
            }
            let ka = model.kappa()[(j, k)];
            if ka != Complex64::new(0.0, 0.0) {
                terms.push((ka * 0.5, &adag[j] * &adag[k]));
                terms.push((ka.conj() * 0.5, &a[j] * &a[k]));
            }
        }
        let z = model.zeta()[j];
        terms.push((z * 0.5, adag[j].clone()));
        terms.push((z.conj() * 0.5, a[j].clone()));
    }
    let h = linear_combination(dim, dim, terms.iter().map(|(s, m)| (*s, m)));

    let kraus: Vec<SparseMatrix> = (0..model.kraus_count())
        .map(|l| {
            let coeffs = (0..d)
                .map(|k| (model.v()[(l, k)].conj(), &a[k]))
                .chain((0..d).map(|k| (model.u()[(l, k)], &adag[k])));
            linear_combination(dim, dim, coeffs)
        })
        .collect();

    let products: Vec<SparseMatrix> = kraus.iter().map(|l| &l.adjoint() * l).collect();
    let g0 = linear_combination(dim, dim, products.iter().map(|p| (re(-0.5), p)));
    let g = &h.scale(-I) + &g0;

    Ok(TruncatedOperators { space: space.clone(), ladders, h, kraus, g0, g })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    Schrodinger,
    Heisenberg,
}

/// Generator acting on column-stacked `D×D` matrices.
#[derive(Debug, Clone)]
pub struct Superoperator {
    pub matrix: SparseMatrix,
    pub picture: Picture,
    dim: usize,
}

impl Superoperator {
    pub fn new(matrix: SparseMatrix, picture: Picture, dim: usize) -> Result<Self> {
        if matrix.shape() != (dim * dim, dim * dim) {
            return Err(Error::ShapeMismatch(format!(
                "superoperator {:?} for Hilbert dimension {dim}",
                matrix.shape()
            )));
        }
        Ok(Self { matrix, picture, dim })
    }

    /// Hilbert-space dimension `D` (the superoperator is `D²×D²`).
    pub fn hilbert_dim(&self) -> usize {
        self.dim
    }

    pub fn apply_vec(&self, v: &CVector) -> CVector {
        self.matrix.mul_vec(v)
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        unvectorize(&self.matrix.mul_vec(&vectorize(x)), self.dim)
    }

    pub fn to_dense(&self) -> CMatrix {
        self.matrix.to_dense()
    }
}

/// Schrödinger: `ρ ↦ Gρ + ρG† + Σ LρL†`. Heisenberg: `x ↦ G†x + xG + Σ L†xL`.
pub fn build_lindbladian(ops: &TruncatedOperators, picture: Picture) -> Superoperator {
    let dim = ops.dim();
    let id = SparseMatrix::identity(dim);
    let mut parts: Vec<SparseMatrix> = Vec::with_capacity(ops.kraus.len() + 2);
    match picture {
        Picture::Schrodinger => {
            parts.push(id.kron(&ops.g));
            parts.push(ops.g.conj().kron(&id));
            for l in &ops.kraus {
                parts.push(l.conj().kron(l));
            }
        }
        Picture::Heisenberg => {
            parts.push(id.kron(&ops.g.adjoint()));
            parts.push(ops.g.transpose().kron(&id));
            for l in &ops.kraus {
                parts.push(l.transpose().kron(&l.adjoint()));
            }
        }
    }
    let n = dim * dim;
    let matrix = linear_combination(n, n, parts.iter().map(|p| (ONE, p)));
    Superoperator { matrix, picture, dim }
}

/// The quadratic form `£(x)[v, u]` evaluated term by term.
///
/// `v` and `u` must be supported in the interior subspace.
pub fn quadratic_form_apply(
    ops: &TruncatedOperators,
    x: &CMatrix,
    v: &CVector,
    u: &CVector,
) -> Result<Complex64> {
    let dim = ops.dim();
    if x.shape() != (dim, dim) || v.len() != dim || u.len() != dim {
        return Err(Error::ShapeMismatch("operator and vectors must match the truncated space".into()));
    }
    ops.space.ensure_interior(v)?;
    ops.space.ensure_interior(u)?;
    let hv = ops.h.mul_vec(v);
    let hu = ops.h.mul_vec(u);
    let xu = x * u;
    let mut total = I * inner(&hv, &xu) - I * inner(v, &(x * &hu));
    for l in &ops.kraus {
        let lu = l.mul_vec(u);
        let lv = l.mul_vec(v);
        let ldl_u = l.adjoint().mul_vec(&lu);
        let ldl_v = l.adjoint().mul_vec(&lv);
        total -= (inner(v, &(x * &ldl_u)) - inner(&lv, &(x * &lu)) * 2.0 + inner(&ldl_v, &xu)) * 0.5;
    }
    Ok(total)
}

/// Both sides of `⟨ξ, −2G₀ξ⟩ = ⟨a♯ξ, K a♯ξ⟩` with `a♯ξ = (a₁ξ,…,a_dξ, a₁†ξ,…,a_d†ξ)`.
pub fn minus2g0_quadratic_identity(
    ops: &TruncatedOperators,
    k: &KossakowskiMatrix,
    xi: &CVector,
) -> Result<(f64, f64)> {
    let d = ops.space.modes();
    if k.dim() != 2 * d {
        return Err(Error::ShapeMismatch(format!("Kossakowski matrix is {}×{0}, expected {}", k.dim(), 2 * d)));
    }
    if xi.len() != ops.dim() {
        return Err(Error::ShapeMismatch("vector does not match the truncated space".into()));
    }
    ops.space.ensure_interior(xi)?;
    let lhs = -2.0 * inner(xi, &ops.g0.mul_vec(xi)).re;
    let sharp: Vec<CVector> = ops
        .ladders
        .a
        .iter()
        .chain(ops.ladders.adag.iter())
        .map(|op| op.mul_vec(xi))
        .collect();
    let mut rhs = Complex64::new(0.0, 0.0);
    for p in 0..2 * d {
        for q in 0..2 * d {
            let kpq = k.matrix[(p, q)];
            if kpq != Complex64::new(0.0, 0.0) {
                rhs += kpq * inner(&sharp[p], &sharp[q]);
            }
        }
    }
    Ok((lhs, rhs.re))
}
