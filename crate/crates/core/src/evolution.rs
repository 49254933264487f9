//! Time evolution of truncated density matrices and of the vector semigroup `P_t = e^{tG}`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fock::TruncatedFockSpace;
use crate::generator::{Picture, Superoperator, TruncatedOperators};
use crate::linalg::{
    expm_action, hermitian_eigenvalues, hermiticity_error, unvectorize, vectorize, CMatrix, CVector, ZERO,
};
use crate::sparse::SparseMatrix;

/// Largest superoperator dimension `D²` accepted by [`Integrator::Expm`].
pub const EXPM_SUPEROP_CAP: usize = 10_000;
pub const DEFAULT_RK4_STEP: f64 = 1e-3;
/// Trace (or norm growth) error that aborts an integration.
pub const INSTABILITY_LIMIT: f64 = 1e-4;
/// Relative eigenvalue threshold for the reported support rank.
pub const SUPPORT_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Integrator {
    /// Exponential of the generator applied to the state, accurate to machine precision.
    Expm,
    /// Classical fixed-step Runge–Kutta.
    Rk4 { step: f64 },
}

impl Integrator {
    /// Exponential for `D² ≤ 10⁴`, RK4 with `h = 10⁻³` beyond.
    pub fn default_for(hilbert_dim: usize) -> Self {
        if hilbert_dim * hilbert_dim <= EXPM_SUPEROP_CAP {
            Self::Expm
        } else {
            Self::Rk4 { step: DEFAULT_RK4_STEP }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub rho: CMatrix,
    pub t: f64,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-10), unit trace (1e-8) and positivity (−1e-8).
    pub fn new(rho: CMatrix, t: f64) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::ShapeMismatch("density matrix must be square".into()));
        }
        let herm = hermiticity_error(&rho);
        if herm > 1e-10 {
            return Err(Error::NotHermitian { what: "density matrix", deviation: herm });
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > 1e-8 || trace.im.abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!("density matrix trace {trace} is not 1")));
        }
        let min = hermitian_eigenvalues(&rho).first().copied().unwrap_or(0.0);
        if min < -1e-8 {
            return Err(Error::NotPositive { what: "density matrix", min_eig: min });
        }
        Ok(Self { rho, t })
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let n = psi.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("state vector has norm {n}, expected 1")));
        }
        Self::new(psi * psi.adjoint(), 0.0)
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// Number of eigenvalues above `rel_tol` times the largest one.
    pub fn support_rank(&self, rel_tol: f64) -> usize {
        eigen_rank(&hermitian_eigenvalues(&self.rho), rel_tol)
    }
}

pub(crate) fn eigen_rank(values: &[f64], rel_tol: f64) -> usize {
    let top = values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if top == 0.0 {
        return 0;
    }
    values.iter().filter(|&&x| x > rel_tol * top).count()
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DensityStats {
    pub t: f64,
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub support_rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct VectorStats {
    pub t: f64,
    pub norm: f64,
    /// Largest norm increase over any earlier recorded time.
    pub norm_increase: f64,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult<S, T> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub stats: Vec<T>,
}

impl<S, T> EvolutionResult<S, T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&S> {
        self.states.last()
    }
}

pub type DensityEvolution = EvolutionResult<DensityMatrix, DensityStats>;
pub type VectorEvolution = EvolutionResult<CVector, VectorStats>;

/// Validates the time grid and prepends `t = 0` when missing.
fn normalized_times(times: &[f64]) -> Result<Vec<f64>> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidArgument("times must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("times must be strictly increasing".into()));
    }
    let mut out = Vec::with_capacity(times.len() + 1);
    if times.first() != Some(&0.0) {
        out.push(0.0);
    }
    out.extend_from_slice(times);
    Ok(out)
}

fn rk4_step(apply: &impl Fn(&CVector) -> CVector, y: &CVector, h: f64) -> CVector {
    let k1 = apply(y);
    let k2 = apply(&(y + k1.scale(h / 2.0)));
    let k3 = apply(&(y + k2.scale(h / 2.0)));
    let k4 = apply(&(y + k3.scale(h)));
    y + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0)
}

/// Propagates `y` by `dt` under `dy/dt = A y`.
fn propagate(
    apply: &impl Fn(&CVector) -> CVector,
    norm1: f64,
    y: &CVector,
    dt: f64,
    method: Integrator,
) -> Result<CVector> {
    match method {
        Integrator::Expm => Ok(expm_action(apply, norm1, y, dt)),
        Integrator::Rk4 { step } => {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::InvalidArgument(format!("RK4 step {step} must be positive")));
            }
            let n = ((dt / step) - 1e-9).ceil().max(1.0) as usize;
            let h = dt / n as f64;
            let mut out = y.clone();
            for _ in 0..n {
                out = rk4_step(apply, &out, h);
            }
            Ok(out)
        }
    }
}

fn density_stats(rho: &CMatrix, t: f64) -> DensityStats {
    let values = hermitian_eigenvalues(rho);
    let trace = rho.trace();
    DensityStats {
        t,
        trace_error: (trace - crate::linalg::ONE).norm(),
        hermiticity_error: hermiticity_error(rho),
        min_eigenvalue: values.first().copied().unwrap_or(0.0),
        support_rank: eigen_rank(&values, SUPPORT_REL_TOL),
    }
}

/// Integrates `dρ/dt = ℒ_*(ρ)` and records the state at every requested time.
///
/// No renormalization or positivity projection is applied; the per-step
/// statistics report the drift instead.
pub fn evolve_density(
    superop: &Superoperator,
    rho0: &DensityMatrix,
    times: &[f64],
    method: Integrator,
) -> Result<DensityEvolution> {
    if superop.picture != Picture::Schrodinger {
        return Err(Error::InvalidArgument("density evolution needs the Schrödinger-picture generator".into()));
    }
    let dim = superop.hilbert_dim();
    if rho0.dim() != dim {
        return Err(Error::ShapeMismatch(format!("state is {}×{0}, generator acts on {dim}×{dim}", rho0.dim())));
    }
    if method == Integrator::Expm && dim * dim > EXPM_SUPEROP_CAP {
        return Err(Error::ExpmTooLarge { dim: dim * dim, cap: EXPM_SUPEROP_CAP });
    }
    let times = normalized_times(times)?;
    let apply = |v: &CVector| superop.matrix.mul_vec(v);
    let norm1 = superop.matrix.norm1();

    let mut y = vectorize(&rho0.rho);
    let mut prev = 0.0;
    let mut result = EvolutionResult { times: Vec::new(), states: Vec::new(), stats: Vec::new() };
    for &t in &times {
        if t > prev {
            y = propagate(&apply, norm1, &y, t - prev, method)?;
            prev = t;
        }
        let rho = unvectorize(&y, dim);
        let stats = density_stats(&rho, t);
        if stats.trace_error > INSTABILITY_LIMIT || !stats.trace_error.is_finite() {
            return Err(Error::Unstable { t, error: stats.trace_error });
        }
        result.times.push(t);
        result.states.push(DensityMatrix { rho, t });
        result.stats.push(stats);
    }
    Ok(result)
}

/// Integrates `dψ/dt = Gψ`.
pub fn evolve_vector(
    ops: &TruncatedOperators,
    psi0: &CVector,
    times: &[f64],
    method: Integrator,
) -> Result<VectorEvolution> {
    evolve_with_operator(&ops.g, psi0, times, method)
}

/// Same as [`evolve_vector`] for an arbitrary generator matrix.
pub fn evolve_with_operator(
    generator: &SparseMatrix,
    psi0: &CVector,
    times: &[f64],
    method: Integrator,
) -> Result<VectorEvolution> {
    if psi0.len() != generator.ncols() {
        return Err(Error::ShapeMismatch("initial vector does not match the generator".into()));
    }
    let n0 = psi0.norm();
    if (n0 - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("initial vector has norm {n0}, expected 1")));
    }
    let times = normalized_times(times)?;
    let apply = |v: &CVector| generator.mul_vec(v);
    let norm1 = generator.norm1();
    let mut y = psi0.clone();
    let mut prev = 0.0;
    let mut max_norm = 0.0f64;
    let mut result = EvolutionResult { times: Vec::new(), states: Vec::new(), stats: Vec::new() };
    for &t in &times {
        if t > prev {
            y = propagate(&apply, norm1, &y, t - prev, method)?;
            prev = t;
        }
        let norm = y.norm();
        let norm_increase = (norm - max_norm).max(0.0);
        if result.times.is_empty() {
            max_norm = norm;
        } else if norm_increase > INSTABILITY_LIMIT || !norm.is_finite() {
            return Err(Error::Unstable { t, error: norm_increase });
        }
        max_norm = max_norm.max(norm);
        result.times.push(t);
        result.stats.push(VectorStats {
            t,
            norm,
            norm_increase: if result.states.is_empty() { 0.0 } else { norm_increase },
        });
        result.states.push(y.clone());
    }
    Ok(result)
}

/// Limit of `e^{n₀t} e^{−tN} v` as `t → ∞`: the part of `v` in its lowest nonvanishing grade.
pub fn number_semigroup_limit(space: &TruncatedFockSpace, v: &CVector) -> Result<CVector> {
    if v.len() != space.dim() {
        return Err(Error::ShapeMismatch("vector does not match the truncated space".into()));
    }
    let scale = v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    if scale == 0.0 {
        return Err(Error::InvalidArgument("the zero vector has no lowest grade".into()));
    }
    let floor = 1e-15 * scale;
    let lowest = (0..space.dim())
        .find(|&k| v[k].norm() > floor)
        .map(|k| space.grade_of(k))
        .expect("non-zero vector has a nonvanishing entry");
    let range = space.grade_range(lowest);
    Ok(CVector::from_fn(v.len(), |k, _| if range.contains(&k) { v[k] } else { ZERO }))
}

/// CSV rows `t,trace_err,min_eig,support_rank[,pop_<n>…]` with LF endings.
///
/// `observables` are basis indices whose populations `⟨e_n|ρ_t|e_n⟩` are appended.
pub fn density_csv(result: &DensityEvolution, space: Option<&TruncatedFockSpace>, observables: &[usize]) -> String {
    let mut out = String::from("t,trace_err,min_eig,support_rank");
    for &k in observables {
        match space {
            Some(s) if k < s.dim() => {
                let label: Vec<String> = s.basis()[k].occupations().iter().map(|n| n.to_string()).collect();
                write!(out, ",pop_{}", label.join("_")).unwrap();
            }
            _ => write!(out, ",pop_{k}").unwrap(),
        }
    }
    out.push('\n');
    for (state, stats) in result.states.iter().zip(&result.stats) {
        write!(
            out,
            "{:e},{:e},{:e},{}",
            stats.t, stats.trace_error, stats.min_eigenvalue, stats.support_rank
        )
        .unwrap();
        for &k in observables {
            let pop = if k < state.dim() { state.rho[(k, k)].re } else { f64::NAN };
            write!(out, ",{pop:e}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_space;
    use crate::generator::{build_lindbladian, build_operators};
    use crate::linalg::{max_abs, max_abs_vec, re};
    use crate::model::{random_model, GaussianModel};

    fn col(entries: &[f64]) -> CMatrix {
        CMatrix::from_iterator(entries.len(), 1, entries.iter().map(|&x| re(x)))
    }

    fn damping_ops(n_max: usize) -> TruncatedOperators {
        let model = GaussianModel::dissipative(col(&[1.0]), col(&[0.0])).unwrap();
        build_operators(&model, &build_space(1, n_max).unwrap()).unwrap()
    }

    #[test]
    fn amplitude_damping_population_rk4() {
        let ops = damping_ops(4);
        let lstar = build_lindbladian(&ops, Picture::Schrodinger);
        let rho0 = DensityMatrix::pure(&ops.space.basis_vector(1)).unwrap();
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.1).collect();
        let run = evolve_density(&lstar, &rho0, &times, Integrator::Rk4 { step: 1e-3 }).unwrap();
        for (t, state) in run.times.iter().zip(&run.states) {
            assert!((state.rho[(1, 1)].re - (-t).exp()).abs() <= 1e-6);
        }
        assert_eq!(run.states[0].rho, rho0.rho);
    }

    #[test]
    fn vacuum_weight_grows_from_mixed_interior() {
        let ops = damping_ops(5);
        let lstar = build_lindbladian(&ops, Picture::Schrodinger);
        let dint = ops.space.interior_dim();
        let mut rho = CMatrix::zeros(6, 6);
        for k in 0..dint {
            rho[(k, k)] = re(1.0 / dint as f64);
        }
        let rho0 = DensityMatrix::new(rho, 0.0).unwrap();
        let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.5).collect();
        let run = evolve_density(&lstar, &rho0, &times, Integrator::Expm).unwrap();
        let vac: Vec<f64> = run.states.iter().map(|s| s.rho[(0, 0)].re).collect();
        assert!(vac.windows(2).all(|w| w[1] > w[0]));
        assert!(vac.last().unwrap() > &0.95);
    }

    #[test]
    fn vector_semigroup_damping() {
        let ops = damping_ops(4);
        let e1 = ops.space.basis_vector(1);
        let run = evolve_vector(&ops, &e1, &[0.5, 1.0, 2.0], Integrator::Expm).unwrap();
        for (t, psi) in run.times.iter().zip(&run.states) {
            assert!(max_abs_vec(&(psi - e1.scale((-t / 2.0).exp()))) <= 1e-12);
        }
        let vac = ops.space.vacuum();
        let still = evolve_vector(&ops, &vac, &[1.0], Integrator::Rk4 { step: 1e-3 }).unwrap();
        assert!(max_abs_vec(&(still.last().unwrap() - &vac)) <= 1e-14);
    }

    #[test]
    fn contraction_on_random_models() {
        for seed in 0..4 {
            let model = random_model(2, 3, 0.7, seed).unwrap();
            let ops = build_operators(&model, &build_space(2, 5).unwrap()).unwrap();
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let psi = ops.space.random_interior_vector(&mut rng);
            let run = evolve_vector(&ops, &psi, &[0.1, 0.2, 0.5, 1.0], Integrator::Expm).unwrap();
            assert!(run.stats.windows(2).all(|w| w[1].norm <= w[0].norm + 1e-8));
            assert!(run.stats.iter().all(|s| s.norm <= 1.0 + 1e-8));
        }
    }

    #[test]
    fn semigroup_property_and_positivity() {
        let model = random_model(2, 4, 0.5, 9).unwrap();
        let ops = build_operators(&model, &build_space(2, 4).unwrap()).unwrap();
        let lstar = build_lindbladian(&ops, Picture::Schrodinger);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(10);
        let psi = ops.space.random_interior_vector(&mut rng);
        let rho0 = DensityMatrix::pure(&psi).unwrap();
        let whole = evolve_density(&lstar, &rho0, &[0.7], Integrator::Expm).unwrap();
        let first = evolve_density(&lstar, &rho0, &[0.3], Integrator::Expm).unwrap();
        let mid = DensityMatrix { rho: first.last().unwrap().rho.clone(), t: 0.0 };
        let second = evolve_density(&lstar, &mid, &[0.4], Integrator::Expm).unwrap();
        assert!(max_abs(&(&whole.last().unwrap().rho - &second.last().unwrap().rho)) <= 1e-6);

        let times: Vec<f64> = (1..=5).map(|k| k as f64 * 0.1).collect();
        let rk = evolve_density(&lstar, &rho0, &times, Integrator::Rk4 { step: 1e-3 }).unwrap();
        assert!(rk.stats.iter().all(|s| s.min_eigenvalue >= -1e-8 && s.trace_error <= 1e-10));
    }

    #[test]
    fn rejects_bad_inputs() {
        let ops = damping_ops(3);
        let lstar = build_lindbladian(&ops, Picture::Schrodinger);
        let heis = build_lindbladian(&ops, Picture::Heisenberg);
        let rho0 = DensityMatrix::pure(&ops.space.vacuum()).unwrap();
        assert!(evolve_density(&heis, &rho0, &[1.0], Integrator::Expm).is_err());
        assert!(evolve_density(&lstar, &rho0, &[1.0, 0.5], Integrator::Expm).is_err());
        assert!(DensityMatrix::new(CMatrix::identity(2, 2), 0.0).is_err());
        assert!(evolve_vector(&ops, &ops.space.vacuum().scale(2.0), &[1.0], Integrator::Expm).is_err());

        let big = GaussianModel::dissipative(CMatrix::identity(2, 2), CMatrix::zeros(2, 2)).unwrap();
        let big_ops = build_operators(&big, &build_space(2, 13).unwrap()).unwrap();
        let big_l = build_lindbladian(&big_ops, Picture::Schrodinger);
        let rho = DensityMatrix::pure(&big_ops.space.vacuum()).unwrap();
        assert!(matches!(
            evolve_density(&big_l, &rho, &[0.1], Integrator::Expm),
            Err(Error::ExpmTooLarge { .. })
        ));
        assert_eq!(Integrator::default_for(big_ops.dim()), Integrator::Rk4 { step: 1e-3 });
    }

    #[test]
    fn number_limit_examples() {
        let space = build_space(2, 3).unwrap();
        let e00 = space.number_vector(&[0, 0]).unwrap();
        let e11 = space.number_vector(&[1, 1]).unwrap();
        let e20 = space.number_vector(&[2, 0]).unwrap();
        assert_eq!(number_semigroup_limit(&space, &(&e00 + &e11)).unwrap(), e00);
        assert_eq!(number_semigroup_limit(&space, &e11).unwrap(), e11);
        let mixed = &e20 + e11.scale(0.5);
        assert_eq!(number_semigroup_limit(&space, &mixed).unwrap(), mixed);
        assert!(number_semigroup_limit(&space, &CVector::zeros(space.dim())).is_err());
    }

    #[test]
    fn number_limit_matches_semigroup_at_large_time() {
        let space = build_space(2, 4).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(4);
        let mut v = space.random_interior_vector(&mut rng);
        for k in space.grade_range(0).chain(space.grade_range(1)) {
            v[k] = ZERO;
        }
        let limit = number_semigroup_limit(&space, &v).unwrap();
        let t = 40.0;
        let damped = CVector::from_fn(v.len(), |k, _| v[k] * (-((space.grade_of(k) as f64) - 2.0) * t).exp());
        assert!(max_abs_vec(&(damped - &limit)) < 1e-15);
    }

    #[test]
    fn csv_layout() {
        let ops = damping_ops(3);
        let lstar = build_lindbladian(&ops, Picture::Schrodinger);
        let rho0 = DensityMatrix::pure(&ops.space.basis_vector(1)).unwrap();
        let run = evolve_density(&lstar, &rho0, &[0.5, 1.0], Integrator::Expm).unwrap();
        let csv = density_csv(&run, Some(&ops.space), &[0, 1]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,trace_err,min_eig,support_rank,pop_0,pop_1");
        assert_eq!(lines.len(), 4);
        assert!(!csv.contains('\r'));
    }
}
