//! Sampled inequalities, support and closure probes, and a numerical-range sector estimate.
//!
//! Everything here works on the interior block of the truncated space.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{eigen_rank, evolve_density, DensityMatrix, Integrator};
use crate::fock::TruncatedFockSpace;
use crate::generator::{Superoperator, TruncatedOperators};
use crate::linalg::{hermitian_eigenvalues, hermiticity_error, inner, CMatrix, CVector, OrthonormalSet};
use crate::model::KossakowskiMatrix;
use crate::sparse::SparseMatrix;

/// Relative eigenvalue threshold of the support rank.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;
/// Slack below `−BOUND_TOL·‖ξ‖²` counts as a violation.
pub const BOUND_TOL: f64 = 1e-10;
pub const CLOSURE_DROP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub samples: usize,
    pub min_slack: f64,
    pub violations: usize,
    #[serde(serialize_with = "serialize_opt_vec")]
    pub witness: Option<CVector>,
}

fn serialize_opt_vec<S: serde::Serializer>(v: &Option<CVector>, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::io::opt_cvecs::serialize(&v.as_ref().map(|v| vec![v.clone()]), s)
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn sample_interior(space: &TruncatedFockSpace, n_samples: usize, seed: u64) -> Result<Vec<CVector>> {
    space.require_interior()?;
    if n_samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n_samples).map(|_| space.random_interior_vector(&mut rng)).collect())
}

/// Samples `⟨ξ, −2G₀ξ⟩ − ε₀⟨ξ, (2N + d)ξ⟩` over random interior unit vectors.
pub fn check_lemma1(ops: &TruncatedOperators, k: &KossakowskiMatrix, n_samples: usize, seed: u64) -> Result<BoundReport> {
    let d = ops.space.modes();
    if k.dim() != 2 * d {
        return Err(Error::ShapeMismatch("Kossakowski matrix does not match the mode count".into()));
    }
    let samples = sample_interior(&ops.space, n_samples, seed)?;
    let mut report = BoundReport { samples: n_samples, min_slack: f64::INFINITY, violations: 0, witness: None };
    for xi in samples {
        let lhs = -2.0 * inner(&xi, &ops.g0.mul_vec(&xi)).re;
        let n = inner(&xi, &ops.number().mul_vec(&xi)).re;
        let norm2 = xi.norm_squared();
        let slack = lhs - k.eps0 * (2.0 * n + d as f64 * norm2);
        if slack < -BOUND_TOL * norm2 {
            report.violations += 1;
            if report.witness.is_none() {
                report.witness = Some(xi.clone());
            }
        }
        report.min_slack = report.min_slack.min(slack);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Report {
    pub samples: usize,
    pub eps0: f64,
    /// Largest sampled `(ε₀²‖Nξ‖² − 2‖G₀ξ‖²)/‖ξ‖²`, floored at 0.
    pub required_c0: f64,
    pub required_c: f64,
    /// Smallest grid constant that covers every sample, if any.
    pub c0: Option<f64>,
    pub c: Option<f64>,
}

impl Theorem2Report {
    pub fn passed(&self) -> bool {
        self.c0.is_some() && self.c.is_some()
    }
}

/// Empirical constants for `ε₀²‖Nξ‖² ≤ 2‖G₀ξ‖² + c₀‖ξ‖²` and the same with `G`.
pub fn check_theorem2(
    ops: &TruncatedOperators,
    k: &KossakowskiMatrix,
    n_samples: usize,
    seed: u64,
    c_grid: &[f64],
) -> Result<Theorem2Report> {
    if c_grid.is_empty() || c_grid.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("constant grid must be non-empty and finite".into()));
    }
    let samples = sample_interior(&ops.space, n_samples, seed)?;
    let eps2 = k.eps0 * k.eps0;
    let (mut need0, mut need) = (0.0f64, 0.0f64);
    for xi in &samples {
        let norm2 = xi.norm_squared();
        let lhs = eps2 * ops.number().mul_vec(xi).norm_squared();
        need0 = need0.max((lhs - 2.0 * ops.g0.mul_vec(xi).norm_squared()) / norm2);
        need = need.max((lhs - 2.0 * ops.g.mul_vec(xi).norm_squared()) / norm2);
    }
    let mut grid = c_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let pick = |req: f64| grid.iter().copied().find(|&c| c >= req - BOUND_TOL);
    Ok(Theorem2Report {
        samples: n_samples,
        eps0: k.eps0,
        required_c0: need0,
        required_c: need,
        c0: pick(need0),
        c: pick(need),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportReport {
    pub psi_index: usize,
    pub t: f64,
    pub rank: usize,
    pub interior_dim: usize,
    pub min_interior_eig: f64,
    pub full: bool,
}

/// Interior eigen-rank of `𝒯_{*t}(|ψ⟩⟨ψ|)` for each start vector and time.
pub fn positivity_improving_probe(
    superop: &Superoperator,
    psis: &[CVector],
    times: &[f64],
    space: &TruncatedFockSpace,
) -> Result<Vec<SupportReport>> {
    space.require_interior()?;
    if superop.hilbert_dim() != space.dim() {
        return Err(Error::ShapeMismatch("superoperator does not match the space".into()));
    }
    let idx = space.interior_indices();
    let dint = idx.len();
    let mut out = Vec::new();
    for (p, psi) in psis.iter().enumerate() {
        let rho0 = DensityMatrix::pure(psi)?;
        let run = evolve_density(superop, &rho0, times, Integrator::default_for(space.dim()))?;
        for (t, state) in run.times.iter().zip(&run.states) {
            if !times.contains(t) {
                continue;
            }
            let block = CMatrix::from_fn(dint, dint, |i, j| state.rho[(idx[i], idx[j])]);
            let values = hermitian_eigenvalues(&block);
            let rank = eigen_rank(&values, SUPPORT_THRESHOLD);
            let min = values.first().copied().unwrap_or(0.0);
            let top = values.last().copied().unwrap_or(0.0).max(0.0);
            out.push(SupportReport {
                psi_index: p,
                t: *t,
                rank,
                interior_dim: dint,
                min_interior_eig: min,
                full: rank == dint && min > SUPPORT_THRESHOLD * top,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantSubspaceReport {
    pub seed_count: usize,
    pub interior_dim: usize,
    pub closure_dims: Vec<usize>,
    pub min_closure_dim: usize,
    pub irreducible: bool,
    #[serde(serialize_with = "crate::io::opt_cvecs::serialize")]
    pub reducible_witness: Option<Vec<CVector>>,
}

/// Smallest subspace of the interior containing `start` and invariant under the
/// compressions of `G` and every `L_ℓ`.
pub fn invariant_closure(ops: &TruncatedOperators, start: &CVector) -> Result<Vec<CVector>> {
    ops.space.require_interior()?;
    let dint = ops.space.interior_dim();
    if start.len() != dint && start.len() != ops.dim() {
        return Err(Error::ShapeMismatch("start vector must live on the space or its interior".into()));
    }
    let start = start.rows(0, dint).into_owned();
    let maps: Vec<CMatrix> =
        std::iter::once(&ops.g).chain(ops.kraus.iter()).map(|op| ops.interior_block(op)).collect();

    let mut set = OrthonormalSet::new(CLOSURE_DROP_TOL);
    if !set.push(&start) {
        return Err(Error::InvalidArgument("start vector has no interior component".into()));
    }
    let mut frontier = set.vectors().to_vec();
    let (mut stable, mut last) = (0, set.len());
    for _ in 0..4 * ops.dim() {
        let mut next = Vec::new();
        for v in &frontier {
            for m in &maps {
                if set.push(&(m * v)) {
                    next.push(set.vectors().last().unwrap().clone());
                }
            }
        }
        if set.len() == last {
            stable += 1;
            if stable >= 2 {
                break;
            }
        } else {
            stable = 0;
            last = set.len();
        }
        if !next.is_empty() {
            frontier = next;
        }
    }
    Ok(set.into_vectors())
}

/// Closure dimensions from seeded random interior starts.
pub fn invariant_subspace_search(ops: &TruncatedOperators, n_seeds: usize, seed: u64) -> Result<InvariantSubspaceReport> {
    let starts = sample_interior(&ops.space, n_seeds, seed)?;
    invariant_subspace_report(ops, &starts)
}

/// Same report for caller-chosen start vectors.
pub fn invariant_subspace_report(ops: &TruncatedOperators, starts: &[CVector]) -> Result<InvariantSubspaceReport> {
    let dint = ops.space.interior_dim();
    let mut dims = Vec::with_capacity(starts.len());
    let mut witness: Option<Vec<CVector>> = None;
    for v in starts {
        let closure = invariant_closure(ops, v)?;
        dims.push(closure.len());
        if closure.len() < dint && witness.as_ref().is_none_or(|w| closure.len() < w.len()) {
            witness = Some(closure);
        }
    }
    let min = dims.iter().copied().min().unwrap_or(0);
    Ok(InvariantSubspaceReport {
        seed_count: starts.len(),
        interior_dim: dint,
        closure_dims: dims,
        min_closure_dim: min,
        irreducible: min == dint,
        reducible_witness: witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorEstimate {
    pub theta: f64,
    pub shift: f64,
    /// `(shift, θ̂)` for every grid point.
    pub per_shift: Vec<(f64, f64)>,
    #[serde(skip)]
    pub points: Vec<Complex64>,
}

/// Heuristic half-angle of a sector containing sampled numerical-range points of `G`.
///
/// For each shift `ω`, `θ̂(ω)` is the smallest angle with
/// `|Im z| ≤ tan θ̂ · (ω − Re z)` for all samples, and `π/2` if some point is
/// not strictly left of `ω`. The reported pair minimizes `θ̂`, the smaller
/// shift winning ties. Larger shifts can only shrink `θ̂`, so the grid bounds
/// the answer. This is a necessary-style check, not a proof of analyticity.
pub fn sector_estimate(ops: &TruncatedOperators, n_samples: usize, seed: u64, shift_grid: &[f64]) -> Result<SectorEstimate> {
    sector_estimate_operator(&ops.g, &ops.space, n_samples, seed, shift_grid)
}

pub fn sector_estimate_operator(
    op: &SparseMatrix,
    space: &TruncatedFockSpace,
    n_samples: usize,
    seed: u64,
    shift_grid: &[f64],
) -> Result<SectorEstimate> {
    if shift_grid.is_empty() {
        return Err(Error::InvalidArgument("shift grid must be non-empty".into()));
    }
    if op.shape() != (space.dim(), space.dim()) {
        return Err(Error::ShapeMismatch("operator does not match the space".into()));
    }
    let points: Vec<Complex64> = sample_interior(space, n_samples, seed)?
        .iter()
        .map(|xi| inner(xi, &op.mul_vec(xi)) / xi.norm_squared())
        .collect();
    let per_shift: Vec<(f64, f64)> = shift_grid
        .iter()
        .map(|&w| {
            let theta = points.iter().fold(0.0f64, |acc, z| {
                let den = w - z.re;
                let angle = if den > 0.0 {
                    (z.im.abs() / den).atan()
                } else if den == 0.0 && z.im == 0.0 {
                    0.0
                } else {
                    std::f64::consts::FRAC_PI_2
                };
                acc.max(angle)
            });
            (w, theta)
        })
        .collect();
    let (shift, theta) = per_shift
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)))
        .expect("grid is non-empty");
    Ok(SectorEstimate { theta, shift, per_shift, points })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn minimal_kossakowski_eig(k: &CMatrix) -> Result<f64> {
    let herm = hermiticity_error(k);
    if herm > 1e-10 {
        return Err(Error::NotHermitian { what: "Kossakowski matrix", deviation: herm });
    }
    Ok(hermitian_eigenvalues(k).first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_space, FockConfig};
    use crate::generator::{build_lindbladian, build_operators, Picture};
    use crate::linalg::{re, ZERO};
    use crate::model::{two_boson_model, GaussianModel, TwoBosonParams};

    fn col(entries: &[f64]) -> CMatrix {
        CMatrix::from_iterator(entries.len(), 1, entries.iter().map(|&x| re(x)))
    }

    fn unit_positive() -> GaussianModel {
        GaussianModel::dissipative(col(&[1.0, 0.0]), col(&[0.0, 1.0])).unwrap()
    }

    fn damping() -> GaussianModel {
        GaussianModel::dissipative(col(&[1.0]), col(&[0.0])).unwrap()
    }

    fn ops_for(model: &GaussianModel, n_max: usize) -> TruncatedOperators {
        build_operators(model, &build_space(model.modes(), n_max).unwrap()).unwrap()
    }

    #[test]
    fn lemma1_equality_case() {
        let model = unit_positive();
        let ops = ops_for(&model, 8);
        let report = check_lemma1(&ops, &model.kossakowski(), 200, 1).unwrap();
        assert!(report.passed());
        assert!(report.min_slack.abs() < 1e-12);
    }

    #[test]
    fn lemma1_on_two_boson_model() {
        let model = two_boson_model(&TwoBosonParams::isotropic(1.0, CMatrix::zeros(2, 2))).unwrap();
        let ops = ops_for(&model, 6);
        let report = check_lemma1(&ops, &model.kossakowski(), 300, 7).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.witness.is_none());
    }

    #[test]
    fn theorem2_constants() {
        let model = unit_positive();
        let ops = ops_for(&model, 8);
        let report = check_theorem2(&ops, &model.kossakowski(), 100, 3, &[0.0, 1.0, 10.0]).unwrap();
        assert_eq!(report.c0, Some(0.0));
        assert!(report.passed());
        assert!(check_theorem2(&ops, &model.kossakowski(), 10, 3, &[]).is_err());
    }

    #[test]
    fn probe_from_vacuum() {
        let model = two_boson_model(&TwoBosonParams::isotropic(1.0, CMatrix::zeros(2, 2))).unwrap();
        let ops = ops_for(&model, 6);
        let lstar = build_lindbladian(&ops, Picture::Schrodinger);
        let reports = positivity_improving_probe(&lstar, &[ops.space.vacuum()], &[0.0, 0.1], &ops.space).unwrap();
        assert_eq!(reports[0].rank, 1);
        assert!(reports[1].full && reports[1].min_interior_eig > 0.0);
    }

    #[test]
    fn probe_contrast_stays_rank_one() {
        let ops = ops_for(&damping(), 6);
        let lstar = build_lindbladian(&ops, Picture::Schrodinger);
        let reports =
            positivity_improving_probe(&lstar, &[ops.space.vacuum()], &[0.05, 0.1, 1.0], &ops.space).unwrap();
        assert!(reports.iter().all(|r| r.rank == 1 && !r.full));
    }

    #[test]
    fn closure_examples() {
        let ops = ops_for(&unit_positive(), 8);
        let report = invariant_subspace_search(&ops, 3, 11).unwrap();
        assert!(report.irreducible && report.reducible_witness.is_none());
        let vac = invariant_subspace_report(&ops, &[ops.space.vacuum()]).unwrap();
        assert!(vac.irreducible);

        let damp = ops_for(&damping(), 6);
        let contrast = invariant_subspace_report(&damp, &[damp.space.vacuum()]).unwrap();
        assert_eq!(contrast.min_closure_dim, 1);
        assert_eq!(contrast.reducible_witness.unwrap().len(), 1);

        let tiny_space =
            crate::fock::TruncatedFockSpace::with_config(1, 1, FockConfig { interior_margin: 0, ..Default::default() })
                .unwrap();
        let tiny = build_operators(&unit_positive(), &tiny_space).unwrap();
        let mut v = tiny.space.vacuum();
        v[1] = re(1.0);
        assert_eq!(invariant_closure(&tiny, &v.normalize()).unwrap().len(), 2);
    }

    #[test]
    fn sector_of_self_adjoint_and_rotated() {
        let ops = ops_for(&damping(), 8);
        let est = sector_estimate(&ops, 100, 5, &[0.0, 1.0]).unwrap();
        assert!(est.theta <= 1e-12);
        assert!(est.points.iter().all(|z| z.im.abs() < 1e-14));

        let w = 0.8;
        let model = damping()
            .with_hamiltonian(CMatrix::from_element(1, 1, re(w)), CMatrix::zeros(1, 1), CVector::zeros(1))
            .unwrap();
        let ops = ops_for(&model, 8);
        let est = sector_estimate(&ops, 100, 5, &[0.0]).unwrap();
        assert!((est.theta - (2.0 * w).atan()).abs() < 1e-12);
    }

    #[test]
    fn sector_grows_with_frequency() {
        let mut last = -1.0;
        for w in [0.0, 0.5, 1.0, 2.0] {
            let omega = CMatrix::from_diagonal(&CVector::from_vec(vec![re(w), re(0.5 * w)]));
            let model = two_boson_model(&TwoBosonParams::isotropic(1.0, omega)).unwrap();
            let ops = ops_for(&model, 5);
            let est = sector_estimate(&ops, 200, 2, &[0.0, 1.0, 2.0]).unwrap();
            assert!(est.theta > last);
            last = est.theta;
        }
    }

    #[test]
    fn kossakowski_eig_examples() {
        assert_eq!(minimal_kossakowski_eig(&CMatrix::identity(4, 4)).unwrap(), 1.0);
        let ones = CMatrix::from_element(2, 2, re(1.0));
        assert!(minimal_kossakowski_eig(&ones).unwrap().abs() < 1e-15);
        let mut bad = CMatrix::identity(2, 2);
        bad[(0, 1)] = re(1.0);
        bad[(1, 0)] = ZERO;
        assert!(minimal_kossakowski_eig(&bad).is_err());
    }
}
