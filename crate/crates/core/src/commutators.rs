//! Linear forms in `(1, a_j, a_j†)` and their commutators with a quadratic `G`.
//!
//! With `G = Σ P_jk a_j†a_k + Q_jk a_j†a_k† + R_jk a_j a_k + s_j a_j† + r_j a_j + const`
//! the CCR give
//!
//! ```text
//! [G, a_m]  = −s_m − Σ_k P_mk a_k − Σ_k (Q_mk + Q_km) a_k†
//! [G, a_m†] =  r_m + Σ_k (R_km + R_mk) a_k + Σ_j P_jm a_j†
//! ```
//!
//! so commutation with `G` is a linear map on coefficient vectors `(c0, α, β)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{evolve_vector, Integrator};
use crate::fock::{LadderOperators, TruncatedFockSpace};
use crate::generator::{build_operators, TruncatedOperators};
use crate::linalg::{max_abs, singular_values, CMatrix, CVector, OrthonormalSet, I, ONE, ZERO};
use crate::model::GaussianModel;
use crate::sparse::{linear_combination, SparseMatrix};

/// Drop tolerance of the span construction.
pub const SPAN_DROP_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ORDER: usize = 2;

/// `c0·1 + Σ α_j a_j + Σ β_j a_j†`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub c0: Complex64,
    pub alpha: CVector,
    pub beta: CVector,
}

impl LinearForm {
    pub fn new(c0: Complex64, alpha: CVector, beta: CVector) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::ShapeMismatch(format!(
                "alpha has {} entries, beta has {}",
                alpha.len(),
                beta.len()
            )));
        }
        let finite = c0.is_finite() && alpha.iter().chain(beta.iter()).all(|z| z.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("linear form has non-finite coefficients".into()));
        }
        Ok(Self { c0, alpha, beta })
    }

    pub fn zero(d: usize) -> Self {
        Self { c0: ZERO, alpha: CVector::zeros(d), beta: CVector::zeros(d) }
    }

    /// `L_ℓ = Σ v̄_ℓk a_k + u_ℓk a_k†` (0-based `ell`).
    pub fn from_kraus(model: &GaussianModel, ell: usize) -> Result<Self> {
        let m = model.kraus_count();
        if ell >= m {
            return Err(Error::IndexOutOfRange { index: ell, len: m });
        }
        let d = model.modes();
        Ok(Self {
            c0: ZERO,
            alpha: CVector::from_fn(d, |k, _| model.v()[(ell, k)].conj()),
            beta: CVector::from_fn(d, |k, _| model.u()[(ell, k)]),
        })
    }

    pub fn modes(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == ZERO && self.alpha.iter().chain(self.beta.iter()).all(|z| *z == ZERO)
    }

    pub fn max_abs(&self) -> f64 {
        self.coefficients().iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Stacked vector `(c0, α, β)` of length `2d+1`.
    pub fn coefficients(&self) -> CVector {
        let d = self.modes();
        CVector::from_fn(2 * d + 1, |k, _| match k {
            0 => self.c0,
            k if k <= d => self.alpha[k - 1],
            k => self.beta[k - d - 1],
        })
    }

    pub fn from_coefficients(x: &CVector) -> Result<Self> {
        if x.len() % 2 == 0 {
            return Err(Error::ShapeMismatch(format!("coefficient vector of even length {}", x.len())));
        }
        let d = x.len() / 2;
        Self::new(x[0], x.rows(1, d).into_owned(), x.rows(d + 1, d).into_owned())
    }

    /// Truncated matrix of the form on a space with matching mode count.
    pub fn to_matrix(&self, ladders: &LadderOperators) -> SparseMatrix {
        let dim = ladders.number.nrows();
        let id = SparseMatrix::identity(dim);
        let terms = std::iter::once((self.c0, &id))
            .chain(self.alpha.iter().zip(&ladders.a).map(|(c, a)| (*c, a)))
            .chain(self.beta.iter().zip(&ladders.adag).map(|(c, a)| (*c, a)));
        linear_combination(dim, dim, terms)
    }
}

/// Matrix of `X ↦ [G, X]` on coefficient vectors `(c0, α, β)`.
#[derive(Debug, Clone)]
pub struct AdjointActionMatrix {
    pub matrix: CMatrix,
    kraus: Vec<LinearForm>,
}

impl AdjointActionMatrix {
    pub fn modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn kraus_forms(&self) -> &[LinearForm] {
        &self.kraus
    }

    pub fn apply(&self, form: &LinearForm) -> LinearForm {
        LinearForm::from_coefficients(&(&self.matrix * form.coefficients()))
            .expect("action preserves the coefficient layout")
    }
}

pub fn adjoint_action(model: &GaussianModel) -> AdjointActionMatrix {
    let d = model.modes();
    let k = model.kossakowski().matrix;
    let k11 = k.view((0, 0), (d, d));
    let k12 = k.view((0, d), (d, d));
    let k21 = k.view((d, 0), (d, d));
    let k22 = k.view((d, d), (d, d));
    let p: CMatrix = model.omega().scale(-1.0) * I - (k11 + k22.transpose()).scale(0.5);
    let q: CMatrix = model.kappa() * (-I * 0.5) - k12.scale(0.5);
    let r: CMatrix = model.kappa().conjugate() * (-I * 0.5) - k21.scale(0.5);
    let s: CVector = model.zeta() * (-I * 0.5);
    let rl: CVector = model.zeta().conjugate() * (-I * 0.5);

    let mut mat = CMatrix::zeros(2 * d + 1, 2 * d + 1);
    for m in 0..d {
        let ca = 1 + m;
        let cb = 1 + d + m;
        mat[(0, ca)] = -s[m];
        mat[(0, cb)] = rl[m];
        for j in 0..d {
            mat[(1 + j, ca)] = -p[(m, j)];
            mat[(1 + d + j, ca)] = -(q[(m, j)] + q[(j, m)]);
            mat[(1 + j, cb)] = r[(j, m)] + r[(m, j)];
            mat[(1 + d + j, cb)] = p[(j, m)];
        }
    }
    let kraus = (0..model.kraus_count())
        .map(|l| LinearForm::from_kraus(model, l).expect("index within Kraus count"))
        .collect();
    AdjointActionMatrix { matrix: mat, kraus }
}

/// `δ_G^m(L_ℓ)`, with `ell` 0-based; `m = 0` returns `L_ℓ`.
pub fn iterated_commutator(action: &AdjointActionMatrix, ell: usize, m: usize) -> Result<LinearForm> {
    let base = action
        .kraus
        .get(ell)
        .ok_or(Error::IndexOutOfRange { index: ell, len: action.kraus.len() })?;
    let mut x = base.coefficients();
    for _ in 0..m {
        x = &action.matrix * x;
    }
    LinearForm::from_coefficients(&x)
}

/// Largest interior discrepancy between `[G, F]` from the action matrix and `GF − FG`.
pub fn validate_action_oracle(
    model: &GaussianModel,
    space: &TruncatedFockSpace,
    action: &AdjointActionMatrix,
) -> Result<f64> {
    space.require_interior()?;
    let ops = build_operators(model, space)?;
    let d = model.modes();
    if action.modes() != d {
        return Err(Error::ShapeMismatch("action matrix does not match the model".into()));
    }
    let idx = space.interior_indices();
    let mut worst = 0.0f64;
    for k in 0..=2 * d {
        let mut x = CVector::zeros(2 * d + 1);
        x[k] = ONE;
        let form = LinearForm::from_coefficients(&x)?;
        let f = form.to_matrix(&ops.ladders);
        let symbolic = action.apply(&form).to_matrix(&ops.ladders).compress(&idx, &idx);
        let direct = (&(&ops.g * &f) - &(&f * &ops.g)).compress(&idx, &idx);
        worst = worst.max(max_abs(&(symbolic - direct)));
    }
    Ok(worst)
}

/// Condition number of the `2d×2d` matrix whose rows are `(α, β)` of `L_1..L_2d`.
///
/// Infinite when the matrix is singular.
pub fn kraus_inversion_condition(model: &GaussianModel) -> Result<f64> {
    let d = model.modes();
    if model.kraus_count() != 2 * d {
        return Err(Error::ShapeMismatch(format!(
            "need 2d = {} Kraus operators, model has {}",
            2 * d,
            model.kraus_count()
        )));
    }
    let sv = singular_values(&model.kraus_coefficients());
    let (top, bottom) = (sv[0], sv[sv.len() - 1]);
    Ok(if bottom <= f64::EPSILON * top { f64::INFINITY } else { top / bottom })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpanBudgets {
    pub max_order: usize,
    pub max_word: usize,
}

impl SpanBudgets {
    /// `max_order = 2`, `max_word` twice the number of interior grades.
    pub fn default_for(space: &TruncatedFockSpace) -> Self {
        Self { max_order: DEFAULT_MAX_ORDER, max_word: 2 * space.interior_grade_count() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordLevel {
    /// Word length of the vectors added at this level.
    pub length: usize,
    pub candidates: usize,
    pub accepted: usize,
    pub span_dim: usize,
    /// Words this long can reach grades beyond the interior margin.
    pub exceeds_margin: bool,
    /// Largest exterior weight among the accepted vectors.
    pub exterior_weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportSpanReport {
    pub t: f64,
    pub budgets: SpanBudgets,
    pub form_count: usize,
    /// Dimension of the interior-restricted span.
    pub rank: usize,
    pub full_span_dim: usize,
    pub census: Vec<WordLevel>,
    pub boundary_contamination: bool,
    #[serde(skip)]
    pub basis: Vec<CVector>,
}

/// Orthonormal interior basis of `span{φ} ∪ {f_1⋯f_n φ}` with `φ = P_tψ`.
///
/// The factors `f` run over `δ_G^k(L_ℓ)` for `k ≤ max_order`. Words are
/// grown one letter per level up to `max_word` letters, stopping early once a
/// level adds nothing.
pub fn support_span(
    ops: &TruncatedOperators,
    action: &AdjointActionMatrix,
    psi: &CVector,
    t: f64,
    budgets: SpanBudgets,
) -> Result<SupportSpanReport> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time {t} must be positive")));
    }
    if action.modes() != ops.space.modes() {
        return Err(Error::ShapeMismatch("action matrix does not match the space".into()));
    }
    let space = &ops.space;
    let evolved = evolve_vector(ops, psi, &[t], Integrator::default_for(ops.dim()))?;
    let phi = evolved.last().expect("evolution records the final time").clone();

    let mut forms = Vec::new();
    for ell in 0..action.kraus.len() {
        for k in 0..=budgets.max_order {
            let f = iterated_commutator(action, ell, k)?;
            if !f.is_zero() {
                forms.push(f.to_matrix(&ops.ladders));
            }
        }
    }

    let mut span = OrthonormalSet::new(SPAN_DROP_TOL);
    span.push(&phi);
    let mut frontier: Vec<CVector> = span.vectors().to_vec();
    let mut census = Vec::new();
    for length in 1..=budgets.max_word {
        if frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        let mut candidates = 0;
        for v in &frontier {
            for f in &forms {
                candidates += 1;
                if span.push(&f.mul_vec(v)) {
                    next.push(span.vectors().last().unwrap().clone());
                }
            }
        }
        let exterior_weight = next.iter().map(|v| space.exterior_weight(v)).fold(0.0, f64::max);
        census.push(WordLevel {
            length,
            candidates,
            accepted: next.len(),
            span_dim: span.len(),
            exceeds_margin: length > space.interior_margin(),
            exterior_weight,
        });
        frontier = next;
    }

    let keep = space.interior_dim();
    let mut interior = OrthonormalSet::new(SPAN_DROP_TOL);
    for v in span.vectors() {
        interior.push(&v.rows(0, keep).into_owned());
    }
    let boundary_contamination = census.iter().any(|l| l.exceeds_margin && l.accepted > 0);
    Ok(SupportSpanReport {
        t,
        budgets,
        form_count: forms.len(),
        rank: interior.len(),
        full_span_dim: span.len(),
        census,
        boundary_contamination,
        basis: interior.into_vectors(),
    })
}
