//! JSON-configured batch runs: parse a scenario, execute its tasks in order, write reports.
//!
//! Exit codes: 0 when every task matches its `expect`, 2 when some task does
//! not, 1 for input errors.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::commutators::{adjoint_action, support_span, validate_action_oracle, SpanBudgets};
use crate::diagnostics::{
    check_lemma1, check_theorem2, invariant_subspace_report, invariant_subspace_search, positivity_improving_probe,
    sector_estimate, SupportReport,
};
use crate::error::{Error, Result};
use crate::evolution::{density_csv, evolve_density, DensityMatrix, Integrator, DEFAULT_RK4_STEP};
use crate::finite_dim::{fd_positivity_probe, initial_derivative, FiniteGKLSModel, FiniteModelSpec};
use crate::fock::{coherent_vector, FockConfig, TruncatedFockSpace, DEFAULT_INTERIOR_MARGIN};
use crate::generator::{build_lindbladian, build_operators, minus2g0_quadratic_identity, Picture, TruncatedOperators};
use crate::io::{num, CsvTable, GaussianModelSpec};
use crate::linalg::{inner, max_abs, random_unit_vector, CMatrix, CVector};
use crate::model::{
    bogoliubov_transform, build_kossakowski, check_minimality, generate_bogoliubov, two_boson_model, GaussianModel,
    TwoBosonParams,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ASSERTION: i32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Gaussian(GaussianModelSpec),
    TwoBoson {
        #[serde(with = "crate::io::cmat")]
        gamma_minus: CMatrix,
        #[serde(with = "crate::io::cmat")]
        gamma_plus: CMatrix,
        #[serde(with = "crate::io::cmat")]
        omega: CMatrix,
    },
    Finite(FiniteModelSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub n_max: usize,
    #[serde(default = "default_margin")]
    pub interior_margin: usize,
}

fn default_margin() -> usize {
    DEFAULT_INTERIOR_MARGIN
}

/// Initial vector of an evolution or probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartSpec {
    Vacuum,
    Number(Vec<usize>),
    /// Normalized truncated coherent vector.
    Coherent(Vec<[f64; 2]>),
}

impl StartSpec {
    pub fn vector(&self, space: &TruncatedFockSpace) -> Result<CVector> {
        match self {
            Self::Vacuum => Ok(space.vacuum()),
            Self::Number(n) => space
                .number_vector(n)
                .map_err(|_| Error::InvalidArgument(format!("occupation {n:?} is outside the truncated space"))),
            Self::Coherent(g) => {
                let g: Vec<Complex64> = g.iter().map(|[r, i]| Complex64::new(*r, *i)).collect();
                Ok(coherent_vector(space, &g)?.normalize())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Expm,
    Rk4,
}

fn default_true() -> bool {
    true
}
fn default_samples() -> usize {
    1000
}
fn default_c_grid() -> Vec<f64> {
    vec![0.0, 0.1, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5]
}
fn default_probe_times() -> Vec<f64> {
    vec![0.05, 0.1]
}
fn default_starts() -> Vec<StartSpec> {
    vec![StartSpec::Vacuum]
}
fn default_span_t() -> f64 {
    0.1
}
fn default_seeds() -> usize {
    5
}
fn default_pairs() -> usize {
    200
}
fn default_derivative_pairs() -> usize {
    100
}
fn default_fd_times() -> Vec<f64> {
    vec![0.01, 0.1, 1.0]
}
fn default_shifts() -> Vec<f64> {
    vec![0.0]
}
fn default_count() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    Kossakowski {
        #[serde(default = "default_true")]
        expect: bool,
    },
    Minimality {
        #[serde(default = "default_true")]
        expect: bool,
    },
    Bogoliubov {
        #[serde(default = "default_count")]
        count: usize,
        #[serde(default = "default_true")]
        expect: bool,
    },
    Lemma1 {
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_true")]
        expect: bool,
    },
    Theorem2 {
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_c_grid")]
        c_grid: Vec<f64>,
        #[serde(default = "default_true")]
        expect: bool,
    },
    Evolve {
        times: Vec<f64>,
        #[serde(default)]
        method: Option<MethodName>,
        #[serde(default)]
        step: Option<f64>,
        #[serde(default = "default_vacuum")]
        start: StartSpec,
        #[serde(default)]
        observables: Vec<Vec<usize>>,
        #[serde(default = "default_true")]
        expect: bool,
    },
    Support {
        #[serde(default = "default_span_t")]
        t: f64,
        #[serde(default = "default_vacuum")]
        start: StartSpec,
        #[serde(default)]
        max_order: Option<usize>,
        #[serde(default)]
        max_word: Option<usize>,
        #[serde(default = "default_true")]
        expect: bool,
    },
    Improve {
        #[serde(default = "default_probe_times")]
        times: Vec<f64>,
        #[serde(default = "default_starts")]
        starts: Vec<StartSpec>,
        #[serde(default = "default_true")]
        expect: bool,
    },
    Invariant {
        #[serde(default = "default_seeds")]
        seeds: usize,
        #[serde(default)]
        starts: Vec<StartSpec>,
        #[serde(default = "default_true")]
        expect: bool,
    },
    Sector {
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_shifts")]
        shifts: Vec<f64>,
        #[serde(default = "default_true")]
        expect: bool,
    },
    FdProbe {
        #[serde(default = "default_fd_times")]
        times: Vec<f64>,
        #[serde(default = "default_pairs")]
        pairs: usize,
        #[serde(default = "default_true")]
        expect: bool,
    },
    FdDerivative {
        #[serde(default = "default_derivative_pairs")]
        pairs: usize,
        #[serde(default = "default_true")]
        expect: bool,
    },
}

fn default_vacuum() -> StartSpec {
    StartSpec::Vacuum
}

impl TaskSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Kossakowski { .. } => "kossakowski",
            Self::Minimality { .. } => "minimality",
            Self::Bogoliubov { .. } => "bogoliubov",
            Self::Lemma1 { .. } => "lemma1",
            Self::Theorem2 { .. } => "theorem2",
            Self::Evolve { .. } => "evolve",
            Self::Support { .. } => "support",
            Self::Improve { .. } => "improve",
            Self::Invariant { .. } => "invariant",
            Self::Sector { .. } => "sector",
            Self::FdProbe { .. } => "fd-probe",
            Self::FdDerivative { .. } => "fd-derivative",
        }
    }

    pub fn expect(&self) -> bool {
        match self {
            Self::Kossakowski { expect }
            | Self::Minimality { expect }
            | Self::Bogoliubov { expect, .. }
            | Self::Lemma1 { expect, .. }
            | Self::Theorem2 { expect, .. }
            | Self::Evolve { expect, .. }
            | Self::Support { expect, .. }
            | Self::Improve { expect, .. }
            | Self::Invariant { expect, .. }
            | Self::Sector { expect, .. }
            | Self::FdProbe { expect, .. }
            | Self::FdDerivative { expect, .. } => *expect,
        }
    }

    fn needs_finite(&self) -> bool {
        matches!(self, Self::FdProbe { .. } | Self::FdDerivative { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub model: ModelConfig,
    #[serde(default)]
    pub space: Option<SpaceConfig>,
    pub tasks: Vec<TaskSpec>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

/// Rewrites `{"<tag>": "name", ...rest}` as `{"name": {...rest}}`.
fn retag(value: &mut Value, tag: &str, pointer: &str) -> Result<()> {
    let Value::Object(map) = value else {
        return Err(Error::InvalidArgument(format!("schema error at '{pointer}': expected an object")));
    };
    let name = match map.remove(tag) {
        Some(Value::String(name)) => name,
        Some(_) => {
            return Err(Error::InvalidArgument(format!("schema error at '{pointer}/{tag}': expected a string")));
        }
        None => return Err(Error::InvalidArgument(format!("schema error at '{pointer}': missing field `{tag}`"))),
    };
    let rest = std::mem::take(map);
    map.insert(name, Value::Object(rest));
    Ok(())
}

/// Parses a scenario, reporting schema errors with a JSON-pointer path.
///
/// Tasks are tagged by `"task"` and models by `"type"`.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut value: Value = serde_json::from_str(text)
        .map_err(|e| Error::InvalidArgument(format!("schema error at '': {e}")))?;
    if let Some(model) = value.get_mut("model") {
        retag(model, "type", "/model")?;
    }
    if let Some(Value::Array(tasks)) = value.get_mut("tasks") {
        for (k, task) in tasks.iter_mut().enumerate() {
            retag(task, "task", &format!("/tasks/{k}"))?;
        }
    }
    let config: ScenarioConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer = json_pointer(e.path());
        Error::InvalidArgument(format!("schema error at '{pointer}': {}", e.inner()))
    })?;
    if config.tasks.is_empty() {
        return Err(Error::InvalidArgument("schema error at '/tasks': at least one task is required".into()));
    }
    Ok(config)
}

/// Pointer of a deserialization path, leaving out the variant names added by [`retag`].
fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    let segments: Vec<&Segment> = path.iter().collect();
    for (k, seg) in segments.iter().enumerate() {
        let after_tagged = k >= 1
            && match (segments[k - 1], k >= 2) {
                (Segment::Map { key }, _) if key == "model" => true,
                (Segment::Seq { .. }, true) => matches!(segments[k - 2], Segment::Map { key } if key == "tasks"),
                _ => false,
            };
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } | Segment::Enum { variant: key } if !after_tagged => {
                out.push('/');
                out.push_str(&key.replace('~', "~0").replace('/', "~1"));
            }
            _ => {}
        }
    }
    out
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Model and space built from a validated config.
#[derive(Debug, Clone)]
pub enum PreparedModel {
    Gaussian { model: GaussianModel, ops: Box<TruncatedOperators> },
    Finite(FiniteGKLSModel),
}

/// Builds the model and space and checks every task against the model type.
pub fn prepare(config: &ScenarioConfig) -> Result<PreparedModel> {
    let prepared = match &config.model {
        ModelConfig::Finite(spec) => PreparedModel::Finite(spec.to_model()?),
        other => {
            let model = match other {
                ModelConfig::Gaussian(spec) => spec.to_model()?,
                ModelConfig::TwoBoson { gamma_minus, gamma_plus, omega } => two_boson_model(&TwoBosonParams {
                    gamma_minus: gamma_minus.clone(),
                    gamma_plus: gamma_plus.clone(),
                    omega: omega.clone(),
                })?,
                ModelConfig::Finite(_) => unreachable!(),
            };
            let space_cfg = config
                .space
                .ok_or_else(|| Error::InvalidArgument("schema error at '/space': required for Fock models".into()))?;
            let space = TruncatedFockSpace::with_config(
                model.modes(),
                space_cfg.n_max,
                FockConfig { interior_margin: space_cfg.interior_margin, ..Default::default() },
            )?;
            let ops = build_operators(&model, &space)?;
            PreparedModel::Gaussian { model, ops: Box::new(ops) }
        }
    };
    let finite = matches!(prepared, PreparedModel::Finite(_));
    for (k, task) in config.tasks.iter().enumerate() {
        if task.needs_finite() != finite {
            return Err(Error::InvalidArgument(format!(
                "task '/tasks/{k}' ({}) does not apply to a {} model",
                task.name(),
                if finite { "finite-dimensional" } else { "Gaussian" }
            )));
        }
    }
    if let PreparedModel::Gaussian { ops, .. } = &prepared {
        let uses_interior = config.tasks.iter().any(|t| {
            !matches!(t, TaskSpec::Kossakowski { .. } | TaskSpec::Minimality { .. } | TaskSpec::Bogoliubov { .. })
        });
        if uses_interior {
            ops.space.require_interior()?;
        }
    }
    Ok(prepared)
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskOutcome {
    pub task: String,
    pub expect: bool,
    /// The task's own verdict, compared against `expect`.
    pub outcome: bool,
    pub passed: bool,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: Value,
    pub model: Value,
    pub tasks: Vec<TaskOutcome>,
    pub passed: bool,
    /// Wall-clock data; the only part of the report that varies between runs.
    pub timestamps: Value,
}

impl ScenarioReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_PASS
        } else {
            EXIT_ASSERTION
        }
    }
}

/// Plot-ready data produced by a task.
#[derive(Debug, Clone)]
pub enum PlotSource {
    Support(Vec<SupportReport>),
    NumericalRange(Vec<Complex64>),
}

/// CSV for `support-rank-vs-t`, `min-eig-vs-t` or `numerical-range-scatter`.
pub fn emit_plotdata(source: &PlotSource, kind: &str) -> Result<String> {
    match (kind, source) {
        ("support-rank-vs-t", PlotSource::Support(rows)) => {
            let mut t = CsvTable::new(["psi_index", "t", "rank"]);
            for r in rows {
                t.push(vec![r.psi_index.to_string(), num(r.t), r.rank.to_string()]);
            }
            Ok(t.render())
        }
        ("min-eig-vs-t", PlotSource::Support(rows)) => {
            let mut t = CsvTable::new(["psi_index", "t", "min_eig"]);
            for r in rows {
                t.push(vec![r.psi_index.to_string(), num(r.t), num(r.min_interior_eig)]);
            }
            Ok(t.render())
        }
        ("numerical-range-scatter", PlotSource::NumericalRange(points)) => {
            let mut t = CsvTable::new(["re", "im"]);
            for z in points {
                t.push(vec![num(z.re), num(z.im)]);
            }
            Ok(t.render())
        }
        ("support-rank-vs-t" | "min-eig-vs-t" | "numerical-range-scatter", _) => {
            Err(Error::InvalidArgument(format!("plot kind '{kind}' does not match the data")))
        }
        _ => Err(Error::InvalidArgument(format!("unknown plot kind '{kind}'"))),
    }
}

struct TaskRun {
    outcome: bool,
    result: Value,
    files: Vec<(String, String)>,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn run_gaussian_task(
    task: &TaskSpec,
    index: usize,
    model: &GaussianModel,
    ops: &TruncatedOperators,
    seed: u64,
) -> Result<TaskRun> {
    let task_seed = seed.wrapping_add(index as u64);
    let space = &ops.space;
    let mut files = Vec::new();
    let (outcome, result) = match task {
        TaskSpec::Kossakowski { .. } => {
            let k = build_kossakowski(model.v(), model.u())?;
            (k.strictly_positive, json!({
                "matrix": to_value(&CmatView(&k.matrix)),
                "eigenvalues": k.eigenvalues,
                "eps0": k.eps0,
                "rank": k.rank,
                "strictly_positive": k.strictly_positive,
            }))
        }
        TaskSpec::Minimality { .. } => {
            let minimal = check_minimality(model.v(), model.u())?;
            let rank = build_kossakowski(model.v(), model.u())?.rank;
            (minimal, json!({ "minimal": minimal, "kraus_count": model.kraus_count(), "kossakowski_rank": rank }))
        }
        TaskSpec::Bogoliubov { count, .. } => {
            let verdict = model.kossakowski().strictly_positive;
            let mut worst = 0.0f64;
            let mut preserved = true;
            for k in 0..*count {
                let pair = generate_bogoliubov(model.modes(), task_seed.wrapping_add(k as u64))?;
                worst = worst.max(pair.constraint_error()?);
                let moved = bogoliubov_transform(model, &pair)?;
                preserved &= moved.kossakowski().strictly_positive == verdict;
            }
            (worst <= 1e-10 && preserved, json!({
                "pairs": count,
                "max_constraint_error": worst,
                "positivity_verdict_preserved": preserved,
            }))
        }
        TaskSpec::Lemma1 { samples, .. } => {
            let k = model.kossakowski();
            let report = check_lemma1(ops, &k, *samples, task_seed)?;
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(task_seed);
            let mut identity = 0.0f64;
            for _ in 0..(*samples).min(100) {
                let xi = space.random_interior_vector(&mut rng);
                let (lhs, rhs) = minus2g0_quadratic_identity(ops, &k, &xi)?;
                identity = identity.max((lhs - rhs).abs());
            }
            (report.passed() && identity <= 1e-10, json!({
                "eps0": k.eps0,
                "bound": to_value(&report),
                "identity_residual": identity,
            }))
        }
        TaskSpec::Theorem2 { samples, c_grid, .. } => {
            let report = check_theorem2(ops, &model.kossakowski(), *samples, task_seed, c_grid)?;
            (report.passed(), to_value(&report))
        }
        TaskSpec::Evolve { times, method, step, start, observables, .. } => {
            let integrator = match method {
                None => Integrator::default_for(space.dim()),
                Some(MethodName::Expm) => Integrator::Expm,
                Some(MethodName::Rk4) => Integrator::Rk4 { step: step.unwrap_or(DEFAULT_RK4_STEP) },
            };
            let obs: Vec<usize> = observables
                .iter()
                .map(|n| {
                    space.index(n).ok_or_else(|| Error::InvalidArgument(format!("observable {n:?} outside the space")))
                })
                .collect::<Result<_>>()?;
            let lstar = build_lindbladian(ops, Picture::Schrodinger);
            let rho0 = DensityMatrix::pure(&start.vector(space)?)?;
            let run = evolve_density(&lstar, &rho0, times, integrator)?;
            files.push((format!("task{index:02}_evolve.csv"), density_csv(&run, Some(space), &obs)));
            let max_trace = run.stats.iter().map(|s| s.trace_error).fold(0.0, f64::max);
            let min_eig = run.stats.iter().map(|s| s.min_eigenvalue).fold(f64::INFINITY, f64::min);
            (max_trace <= 1e-6 && min_eig >= -1e-8, json!({
                "integrator": to_value(&integrator),
                "steps": run.len(),
                "max_trace_error": max_trace,
                "min_eigenvalue": min_eig,
                "final_support_rank": run.stats.last().map(|s| s.support_rank),
            }))
        }
        TaskSpec::Support { t, start, max_order, max_word, .. } => {
            let action = adjoint_action(model);
            let oracle = validate_action_oracle(model, space, &action)?;
            let defaults = SpanBudgets::default_for(space);
            let budgets = SpanBudgets {
                max_order: max_order.unwrap_or(defaults.max_order),
                max_word: max_word.unwrap_or(defaults.max_word),
            };
            let psi = start.vector(space)?;
            let span = support_span(ops, &action, &psi, *t, budgets)?;
            let lstar = build_lindbladian(ops, Picture::Schrodinger);
            let probe = positivity_improving_probe(&lstar, &[psi], &[*t], space)?;
            let eigen_rank = probe[0].rank;
            (span.rank == eigen_rank && oracle <= 1e-9, json!({
                "span": to_value(&span),
                "eigen_rank": eigen_rank,
                "action_oracle_error": oracle,
            }))
        }
        TaskSpec::Improve { times, starts, .. } => {
            let lstar = build_lindbladian(ops, Picture::Schrodinger);
            let psis: Vec<CVector> = starts.iter().map(|s| s.vector(space)).collect::<Result<_>>()?;
            let reports = positivity_improving_probe(&lstar, &psis, times, space)?;
            let source = PlotSource::Support(reports.clone());
            for kind in ["support-rank-vs-t", "min-eig-vs-t"] {
                files.push((format!("task{index:02}_{kind}.csv"), emit_plotdata(&source, kind)?));
            }
            let all_full = !reports.is_empty() && reports.iter().all(|r| r.full);
            (all_full, json!({ "reports": to_value(&reports), "full": all_full }))
        }
        TaskSpec::Invariant { seeds, starts, .. } => {
            let mut report = invariant_subspace_search(ops, *seeds, task_seed)?;
            let explicit = if starts.is_empty() {
                None
            } else {
                let vs: Vec<CVector> = starts.iter().map(|s| s.vector(space)).collect::<Result<_>>()?;
                Some(invariant_subspace_report(ops, &vs)?)
            };
            if let Some(e) = &explicit {
                report.irreducible &= e.irreducible;
            }
            let irreducible = report.irreducible;
            (irreducible, json!({
                "random": to_value(&report),
                "explicit": explicit.as_ref().map(to_value),
                "irreducible": irreducible,
            }))
        }
        TaskSpec::Sector { samples, shifts, .. } => {
            let est = sector_estimate(ops, *samples, task_seed, shifts)?;
            files.push((
                format!("task{index:02}_numerical-range-scatter.csv"),
                emit_plotdata(&PlotSource::NumericalRange(est.points.clone()), "numerical-range-scatter")?,
            ));
            (est.theta < std::f64::consts::FRAC_PI_2, to_value(&est))
        }
        TaskSpec::FdProbe { .. } | TaskSpec::FdDerivative { .. } => unreachable!("checked by prepare"),
    };
    Ok(TaskRun { outcome, result, files })
}

fn run_finite_task(task: &TaskSpec, index: usize, model: &FiniteGKLSModel, seed: u64) -> Result<TaskRun> {
    let task_seed = seed.wrapping_add(index as u64);
    match task {
        TaskSpec::FdProbe { times, pairs, .. } => {
            let report = fd_positivity_probe(model, times, *pairs, task_seed)?;
            Ok(TaskRun { outcome: report.positive, result: to_value(&report), files: Vec::new() })
        }
        TaskSpec::FdDerivative { pairs, .. } => {
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(task_seed);
            let n = model.dim();
            let mut worst = 0.0f64;
            let mut table = CsvTable::new(["pair", "analytic", "numeric"]);
            for k in 0..*pairs {
                let u = random_unit_vector(&mut rng, n);
                let w = random_unit_vector(&mut rng, n);
                let v = (&w - &u * inner(&u, &w)).normalize();
                let (a, x) = initial_derivative(model, &u, &v)?;
                worst = worst.max((a - x).abs() / (1.0 + a.abs()));
                table.push(vec![k.to_string(), num(a), num(x)]);
            }
            Ok(TaskRun {
                outcome: worst <= 1e-5,
                result: json!({ "pairs": pairs, "max_relative_error": worst }),
                files: vec![(format!("task{index:02}_fd-derivative.csv"), table.render())],
            })
        }
        _ => unreachable!("checked by prepare"),
    }
}

struct CmatView<'a>(&'a CMatrix);

impl Serialize for CmatView<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::io::cmat::serialize(self.0, s)
    }
}

fn model_summary(prepared: &PreparedModel) -> Value {
    match prepared {
        PreparedModel::Gaussian { model, ops } => {
            let k = model.kossakowski();
            json!({
                "kind": "gaussian",
                "modes": model.modes(),
                "kraus_count": model.kraus_count(),
                "eps0": k.eps0,
                "strictly_positive": k.strictly_positive,
                "n_max": ops.space.n_max(),
                "interior_margin": ops.space.interior_margin(),
                "dim": ops.space.dim(),
                "interior_dim": ops.space.interior_dim(),
                "max_abs_g": max_abs(&ops.g.to_dense()),
            })
        }
        PreparedModel::Finite(m) => json!({
            "kind": "finite",
            "n": m.dim(),
            "min_c_eig": crate::linalg::hermitian_eigenvalues(m.c()).first().copied(),
        }),
    }
}

/// The config in its on-disk shape, with `"task"` and `"type"` tags.
pub fn config_value(config: &ScenarioConfig) -> Value {
    let mut value = to_value(config);
    let untag = |v: &mut Value, tag: &str| {
        if let Value::Object(map) = v {
            if let Some((name, Value::Object(rest))) = map.iter().next().map(|(k, v)| (k.clone(), v.clone())) {
                map.clear();
                map.insert(tag.to_string(), Value::String(name));
                map.extend(rest);
            }
        }
    };
    if let Some(m) = value.get_mut("model") {
        untag(m, "type");
    }
    if let Some(Value::Array(tasks)) = value.get_mut("tasks") {
        for t in tasks {
            untag(t, "task");
        }
    }
    value
}

fn unix_seconds() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Runs every task in order. Per-task failures are recorded, not propagated.
pub fn execute(config: &ScenarioConfig, verbose: bool) -> Result<(ScenarioReport, Vec<(String, String)>)> {
    let prepared = prepare(config)?;
    let started = unix_seconds();
    let mut outcomes = Vec::new();
    let mut files = Vec::new();
    let mut durations = Vec::new();
    for (index, task) in config.tasks.iter().enumerate() {
        let clock = Instant::now();
        let run = match &prepared {
            PreparedModel::Gaussian { model, ops } => run_gaussian_task(task, index, model, ops, config.seed),
            PreparedModel::Finite(m) => run_finite_task(task, index, m, config.seed),
        };
        let outcome = match run {
            Ok(run) => {
                let names: Vec<String> = run.files.iter().map(|(n, _)| n.clone()).collect();
                files.extend(run.files);
                TaskOutcome {
                    task: task.name().into(),
                    expect: task.expect(),
                    outcome: run.outcome,
                    passed: run.outcome == task.expect(),
                    result: run.result,
                    error: None,
                    files: names,
                }
            }
            Err(e) => TaskOutcome {
                task: task.name().into(),
                expect: task.expect(),
                outcome: false,
                passed: false,
                result: Value::Null,
                error: Some(e.to_string()),
                files: Vec::new(),
            },
        };
        let secs = clock.elapsed().as_secs_f64();
        if verbose {
            eprintln!(
                "[{index}] {:<13} outcome={} expect={} {} ({secs:.2}s)",
                outcome.task,
                outcome.outcome,
                outcome.expect,
                if outcome.passed { "ok" } else { "FAILED" }
            );
            if let Some(e) = &outcome.error {
                eprintln!("    error: {e}");
            }
        }
        durations.push(json!({ "task": outcome.task, "seconds": secs }));
        outcomes.push(outcome);
    }
    let passed = outcomes.iter().all(|o| o.passed);
    let report = ScenarioReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
        config: config_value(config),
        model: model_summary(&prepared),
        tasks: outcomes,
        passed,
        timestamps: json!({ "started_unix": started, "finished_unix": unix_seconds(), "tasks": durations }),
    };
    Ok((report, files))
}

/// Executes a scenario and writes `report.json` plus per-task CSVs into the output directory.
///
/// `output_dir` overrides the directory named in the config; the default is `./output`.
pub fn run_scenario(config: &ScenarioConfig, output_dir: Option<&Path>, verbose: bool) -> Result<ScenarioReport> {
    let dir = output_dir
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("output"));
    let (report, files) = execute(config, verbose)?;
    std::fs::create_dir_all(&dir)?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    std::fs::write(dir.join("report.json"), text)?;
    for (name, body) in files {
        std::fs::write(dir.join(name), body)?;
    }
    if verbose {
        eprintln!("wrote {}", dir.join("report.json").display());
    }
    Ok(report)
}

/// Exit code of a whole run, mapping input errors to 1.
pub fn run_to_exit_code(path: &Path, output_dir: Option<&Path>, verbose: bool) -> i32 {
    let result = load_config(path).and_then(|config| run_scenario(&config, output_dir, verbose));
    match result {
        Ok(report) => report.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

/// Parses and prepares a config without running any task.
pub fn validate_to_exit_code(path: &Path) -> i32 {
    match load_config(path).and_then(|c| prepare(&c).map(|_| c)) {
        Ok(config) => {
            println!("ok: {} task(s), seed {}", config.tasks.len(), config.seed);
            EXIT_PASS
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_BOSON: &str = r#"{
        "seed": 3,
        "model": {"type": "two_boson",
                  "gamma_minus": [[[1,0],[0,0]],[[0,0],[1,0]]],
                  "gamma_plus":  [[[1,0],[0,0]],[[0,0],[1,0]]],
                  "omega": [[[0,0],[0,0]],[[0,0],[0,0]]]},
        "space": {"n_max": 5},
        "tasks": [{"task": "kossakowski"}, {"task": "lemma1", "samples": 50},
                  {"task": "improve", "times": [0.1]}]
    }"#;

    #[test]
    fn parses_and_runs() {
        let config = parse_config(TWO_BOSON).unwrap();
        let (report, files) = execute(&config, false).unwrap();
        assert!(report.passed, "{:#?}", report.tasks);
        assert_eq!(files.len(), 2);
        assert_eq!(report.exit_code(), EXIT_PASS);
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let bad = TWO_BOSON.replace(r#""samples": 50"#, r#""samples": "many""#);
        let err = parse_config(&bad).unwrap_err().to_string();
        assert!(err.contains("/tasks/1/samples"), "{err}");
        let none = r#"{"seed": 1, "model": {"type":"finite","n":2,"H":[[[0,0],[0,0]],[[0,0],[0,0]]],"c":[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]}, "tasks": []}"#;
        assert!(parse_config(none).unwrap_err().to_string().contains("/tasks"));
        let no_seed = TWO_BOSON.replace(r#""seed": 3,"#, "");
        assert!(parse_config(&no_seed).is_err());
    }

    #[test]
    fn task_model_mismatch_is_input_error() {
        let bad = TWO_BOSON.replace(r#"{"task": "kossakowski"}"#, r#"{"task": "fd-probe"}"#);
        let config = parse_config(&bad).unwrap();
        assert!(prepare(&config).is_err());
    }

    #[test]
    fn expect_false_inverts_the_verdict() {
        let contrast = r#"{
            "seed": 1,
            "model": {"type":"gaussian","d":1,"omega":[[[0,0]]],"kappa":[[[0,0]]],"zeta":[[0,0]],
                      "V":[[[1,0]]],"U":[[[0,0]]]},
            "space": {"n_max": 6},
            "tasks": [{"task":"improve","expect":false}, {"task":"invariant","seeds":2,"starts":["vacuum"],"expect":false}]
        }"#;
        let (report, _) = execute(&parse_config(contrast).unwrap(), false).unwrap();
        assert!(report.passed);
        assert!(report.tasks.iter().all(|t| !t.outcome));
    }

    #[test]
    fn plotdata_kinds() {
        let rows = vec![SupportReport { psi_index: 0, t: 0.5, rank: 1, interior_dim: 5, min_interior_eig: 0.0, full: false }];
        let csv = emit_plotdata(&PlotSource::Support(rows), "support-rank-vs-t").unwrap();
        assert_eq!(csv, "psi_index,t,rank\n0,5e-1,1\n");
        assert!(emit_plotdata(&PlotSource::NumericalRange(vec![]), "bogus").is_err());
        assert!(emit_plotdata(&PlotSource::NumericalRange(vec![]), "min-eig-vs-t").is_err());
    }

    #[test]
    fn nested_pointers_and_echo() {
        let bad = TWO_BOSON.replace(r#"[[[1,0],[0,0]],[[0,0],[1,0]]],
                  "gamma_plus""#, r#"[[[1,0],[0,0]],[[0,0],[1,"x"]]],
                  "gamma_plus""#);
        let err = parse_config(&bad).unwrap_err().to_string();
        assert!(err.contains("'/model/gamma_minus/1/1/1'"), "{err}");
        let unknown = TWO_BOSON.replace(r#"{"task": "kossakowski"}"#, r#"{"task": "kossakowsky"}"#);
        assert!(parse_config(&unknown).unwrap_err().to_string().contains("'/tasks/0'"));
        let config = parse_config(TWO_BOSON).unwrap();
        let echoed = config_value(&config);
        assert_eq!(echoed["tasks"][1]["task"], "lemma1");
        assert_eq!(echoed["model"]["type"], "two_boson");
        assert_eq!(parse_config(&echoed.to_string()).unwrap(), config);
    }
}
