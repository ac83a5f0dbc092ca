//! Run configuration: TOML schema, normalization and conversion into core types.
//!
//! Operators are either Pauli-sum strings (qubits only) or dense row-major
//! matrices of `[re, im]` pairs. Term operators act on the term's support;
//! observables act on the whole system.

use dissim_core::bounds::StepSpec;
use dissim_core::dilation::CensusInputs;
use dissim_core::model::{
    DensityMatrix, KLocalLiouvillian, LindbladTerm, LocalOperator, Schedule, ScheduledOperator, SupportSet, SystemShape,
};
use dissim_core::norms::SearchBudget;
use dissim_core::trotter::{StepMode, TermOrdering, TrotterPlan};
use dissim_core::{linalg, CMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::pauli;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub model: ModelConfig,
    pub plan: PlanConfig,
    #[serde(default)]
    pub initial_state: StateSpec,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default)]
    pub verification: VerificationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub census: Option<CensusConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nets: Option<NetsConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub sites: usize,
    #[serde(default = "default_local_dim")]
    pub local_dim: usize,
    /// Defaults to the largest term support.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locality: Option<usize>,
    #[serde(default)]
    pub terms: Vec<TermConfig>,
}

fn default_local_dim() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub support: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<ScheduledSpec>,
    #[serde(default)]
    pub jumps: Vec<ScheduledSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduledSpec {
    pub op: OperatorSpec,
    #[serde(default)]
    pub schedule: ScheduleSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Pauli(String),
    Dense(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Constant { value: f64 },
    PiecewiseConstant { points: Vec<[f64; 2]> },
    Linear { points: Vec<[f64; 2]> },
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        ScheduleSpec::Constant { value: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepModeSpec {
    ExactLocal,
    AverageLiouvillian,
}

impl From<StepModeSpec> for StepMode {
    fn from(s: StepModeSpec) -> Self {
        match s {
            StepModeSpec::ExactLocal => StepMode::ExactLocal,
            StepModeSpec::AverageLiouvillian => StepMode::AverageLiouvillian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedOrdering {
    InputOrder,
    Reversed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderingSpec {
    Named(NamedOrdering),
    Explicit(Vec<usize>),
}

impl Default for OrderingSpec {
    fn default() -> Self {
        OrderingSpec::Named(NamedOrdering::InputOrder)
    }
}

impl From<&OrderingSpec> for TermOrdering {
    fn from(s: &OrderingSpec) -> Self {
        match s {
            OrderingSpec::Named(NamedOrdering::InputOrder) => TermOrdering::InputOrder,
            OrderingSpec::Named(NamedOrdering::Reversed) => TermOrdering::Reversed,
            OrderingSpec::Explicit(p) => TermOrdering::Explicit(p.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default = "default_step_mode")]
    pub step_mode: StepModeSpec,
    #[serde(default)]
    pub ordering: OrderingSpec,
}

fn default_step_mode() -> StepModeSpec {
    StepModeSpec::ExactLocal
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    Basis { index: usize },
    MaximallyMixed,
    Pure { amplitudes: Vec<[f64; 2]> },
    Dense { matrix: Vec<Vec<[f64; 2]>> },
}

impl Default for StateSpec {
    fn default() -> Self {
        StateSpec::Basis { index: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub name: String,
    pub op: OperatorSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default)]
    pub observables: Vec<ObservableSpec>,
    /// Write every `stride`-th step; the final step is always written.
    #[serde(default = "default_stride")]
    pub stride: u64,
    #[serde(default = "default_trajectory")]
    pub trajectory: String,
}

fn default_stride() -> u64 {
    1
}

fn default_trajectory() -> String {
    "trajectory.csv".into()
}

impl Default for OutputsConfig {
    fn default() -> Self {
        OutputsConfig { observables: Vec::new(), stride: default_stride(), trajectory: default_trajectory() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationConfig {
    #[serde(default = "default_true")]
    pub oracle: bool,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    /// Step counts to check; the plan's `m` when empty.
    #[serde(default)]
    pub m_values: Vec<u64>,
    /// Orderings to check; the plan's ordering when empty.
    #[serde(default)]
    pub orderings: Vec<OrderingSpec>,
}

fn default_true() -> bool {
    true
}

fn default_samples() -> usize {
    SearchBudget::default().samples
}

fn default_restarts() -> usize {
    SearchBudget::default().restarts
}

fn default_iterations() -> usize {
    SearchBudget::default().iterations
}

impl Default for VerificationConfig {
    fn default() -> Self {
        VerificationConfig {
            oracle: true,
            samples: default_samples(),
            restarts: default_restarts(),
            iterations: default_iterations(),
            m_values: Vec::new(),
            orderings: Vec::new(),
        }
    }
}

impl VerificationConfig {
    pub fn budget(&self) -> SearchBudget {
        SearchBudget { samples: self.samples, restarts: self.restarts, iterations: self.iterations, ..SearchBudget::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusConfig {
    #[serde(rename = "N")]
    pub n: u64,
    pub k: u32,
    #[serde(default = "default_d")]
    pub d: u32,
    pub tau: f64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    /// Taken from the model's local constants on `[0, tau]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default = "default_c_sk")]
    pub c_sk: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_n_sk")]
    pub n_sk: f64,
}

fn default_d() -> u32 {
    2
}

fn default_c_sk() -> f64 {
    1.0
}

fn default_alpha() -> f64 {
    4.0
}

fn default_n_sk() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetsConfig {
    pub epsilon: f64,
    /// System sizes for the reachability rows; the model's site count when empty.
    #[serde(rename = "N", default)]
    pub n: Vec<u64>,
    /// Evolution time per row; the plan's `tau` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default = "default_c_sk")]
    pub c_sk: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_n_sk")]
    pub n_sk: f64,
}

/// Parses and fully validates a TOML run configuration.
pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    let de = toml::Deserializer::parse(text).map_err(|e| CliError::config("<document>", e.message().to_string()))?;
    let mut config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(path, e.into_inner().message().to_string())
    })?;
    config.normalize();
    config.validate()?;
    Ok(config)
}

/// Canonical TOML text of a configuration.
pub fn to_toml(config: &RunConfig) -> String {
    toml::to_string(config).expect("config serializes")
}

impl RunConfig {
    /// Fills derived defaults so that the serialized form is explicit.
    pub fn normalize(&mut self) {
        if self.model.locality.is_none() {
            self.model.locality = Some(self.model.terms.iter().map(|t| t.support.len()).max().unwrap_or(1).max(1));
        }
    }

    /// Applies command-line overrides. A flag for `m` or `epsilon` replaces both.
    pub fn apply_overrides(&mut self, seed: Option<u64>, m: Option<u64>, epsilon: Option<f64>) -> CliResult<()> {
        if let Some(seed) = seed {
            self.seed = seed;
        }
        match (m, epsilon) {
            (Some(_), Some(_)) => return Err(CliError::Usage("give at most one of --m and --epsilon".into())),
            (Some(m), None) => {
                self.plan.m = Some(m);
                self.plan.epsilon = None;
            }
            (None, Some(eps)) => {
                self.plan.epsilon = Some(eps);
                self.plan.m = None;
            }
            (None, None) => {}
        }
        self.validate()
    }

    pub fn validate(&self) -> CliResult<()> {
        let liou = self.liouvillian()?;
        let dim = liou.shape().dim();
        let plan = &self.plan;
        if !(plan.tau >= 0.0 && plan.tau.is_finite()) {
            return Err(CliError::config("plan.tau", format!("must be finite and >= 0, got {}", plan.tau)));
        }
        match (plan.m, plan.epsilon) {
            (Some(_), Some(_)) => return Err(CliError::config("plan", "give either m or epsilon, not both")),
            (None, None) => return Err(CliError::config("plan", "one of m or epsilon is required")),
            (Some(0), _) => return Err(CliError::config("plan.m", "must be at least 1")),
            (_, Some(e)) if !(e > 0.0 && e.is_finite()) => {
                return Err(CliError::config("plan.epsilon", format!("must be positive, got {e}")))
            }
            _ => {}
        }
        check_ordering(&plan.ordering, liou.terms().len(), "plan.ordering")?;
        self.initial_state(dim)?;
        self.observables(dim)?;
        if self.outputs.stride == 0 {
            return Err(CliError::config("outputs.stride", "must be at least 1"));
        }
        if self.outputs.trajectory.is_empty() || self.outputs.trajectory.contains(['/', '\\']) {
            return Err(CliError::config("outputs.trajectory", "must be a plain file name"));
        }
        for (i, o) in self.verification.orderings.iter().enumerate() {
            check_ordering(o, liou.terms().len(), &format!("verification.orderings[{i}]"))?;
        }
        if self.verification.m_values.contains(&0) {
            return Err(CliError::config("verification.m_values", "step counts must be at least 1"));
        }
        if self.verification.samples == 0 {
            return Err(CliError::config("verification.samples", "must be at least 1"));
        }
        if let Some(census) = &self.census {
            self.census_inputs(census)?;
        }
        if let Some(nets) = &self.nets {
            if !(nets.epsilon > 0.0 && nets.epsilon < 1.0) {
                return Err(CliError::config("nets.epsilon", format!("must lie in (0, 1), got {}", nets.epsilon)));
            }
            if nets.tau.is_some_and(|t| !(t >= 0.0 && t.is_finite())) {
                return Err(CliError::config("nets.tau", "must be finite and >= 0"));
            }
            if nets.n.contains(&0) {
                return Err(CliError::config("nets.N", "system sizes must be at least 1"));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> CliResult<SystemShape> {
        let m = &self.model;
        let locality = m.locality.unwrap_or(1);
        SystemShape::new(m.sites, m.local_dim, locality).map_err(|e| CliError::config("model", e.to_string()))
    }

    pub fn liouvillian(&self) -> CliResult<KLocalLiouvillian> {
        let shape = self.shape()?;
        let d = shape.local_dim();
        let mut terms = Vec::with_capacity(self.model.terms.len());
        for (i, t) in self.model.terms.iter().enumerate() {
            let path = format!("model.terms[{i}]");
            let support = SupportSet::new(t.support.clone())
                .and_then(|s| s.check_against(&shape).map(|_| s))
                .map_err(|e| CliError::config(format!("{path}.support"), e.to_string()))?;
            let hamiltonian = t
                .hamiltonian
                .as_ref()
                .map(|h| scheduled(h, &support, d, true, &format!("{path}.hamiltonian")))
                .transpose()?;
            let jumps = t
                .jumps
                .iter()
                .enumerate()
                .map(|(j, l)| scheduled(l, &support, d, false, &format!("{path}.jumps[{j}]")))
                .collect::<CliResult<Vec<_>>>()?;
            terms.push(LindbladTerm::new(support, hamiltonian, jumps, d).map_err(|e| CliError::config(&path, e.to_string()))?);
        }
        KLocalLiouvillian::new(shape, terms).map_err(|e| CliError::config("model.terms", e.to_string()))
    }

    pub fn step_spec(&self) -> StepSpec {
        match (self.plan.m, self.plan.epsilon) {
            (Some(m), _) => StepSpec::Steps(m),
            (None, Some(e)) => StepSpec::Epsilon(e),
            (None, None) => unreachable!("validated plan has m or epsilon"),
        }
    }

    /// Trotter plan from the configuration, resolving `epsilon` through the
    /// model's constants when `m` is not given.
    pub fn trotter_plan(&self, liou: &KLocalLiouvillian) -> CliResult<TrotterPlan> {
        let plan = match self.step_spec() {
            StepSpec::Steps(m) => TrotterPlan::new(self.plan.tau, m)?,
            StepSpec::Epsilon(eps) => {
                let consts = dissim_core::bounds::local_constants(liou, 0.0, self.plan.tau);
                TrotterPlan::from_epsilon(consts.c, consts.b_used, liou.nonzero_term_count(), self.plan.tau, eps)?
            }
        };
        Ok(plan.with_mode(self.plan.step_mode.into()).with_ordering((&self.plan.ordering).into()))
    }

    pub fn initial_state(&self, dim: usize) -> CliResult<DensityMatrix> {
        let path = "initial_state";
        let err = |e: dissim_core::Error| CliError::config(path, e.to_string());
        match &self.initial_state {
            StateSpec::Basis { index } => DensityMatrix::basis(*index, dim).map_err(err),
            StateSpec::MaximallyMixed => Ok(DensityMatrix::maximally_mixed(dim)),
            StateSpec::Pure { amplitudes } => {
                if amplitudes.len() != dim {
                    return Err(CliError::config(
                        format!("{path}.amplitudes"),
                        format!("expected {dim} amplitudes, got {}", amplitudes.len()),
                    ));
                }
                let psi = dissim_core::linalg::CVector::from_iterator(dim, amplitudes.iter().map(|[re, im]| C64::new(*re, *im)));
                let norm = psi.norm();
                if !(norm > 0.0) {
                    return Err(CliError::config(format!("{path}.amplitudes"), "state vector is zero"));
                }
                DensityMatrix::pure(&(psi / C64::new(norm, 0.0))).map_err(err)
            }
            StateSpec::Dense { matrix } => {
                let m = dense_matrix(matrix, &format!("{path}.matrix"))?;
                check_dim(&m, dim, &format!("{path}.matrix"))?;
                DensityMatrix::new(m).map_err(err)
            }
        }
    }

    /// Named full-system observables.
    pub fn observables(&self, dim: usize) -> CliResult<Vec<(String, CMatrix)>> {
        let n = self.model.sites;
        let mut out = Vec::with_capacity(self.outputs.observables.len());
        for (i, o) in self.outputs.observables.iter().enumerate() {
            let path = format!("outputs.observables[{i}]");
            if o.name.is_empty() || o.name.contains([',', '"', '\n']) {
                return Err(CliError::config(format!("{path}.name"), "names must be non-empty without commas or quotes"));
            }
            if out.iter().any(|(name, _)| name == &o.name) {
                return Err(CliError::config(format!("{path}.name"), format!("duplicate observable {:?}", o.name)));
            }
            let m = operator_matrix(&o.op, n, self.model.local_dim, &format!("{path}.op"))?;
            check_dim(&m, dim, &format!("{path}.op"))?;
            out.push((o.name.clone(), m));
        }
        Ok(out)
    }

    pub fn census_inputs(&self, census: &CensusConfig) -> CliResult<CensusInputs> {
        let positive = |v: f64, key: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::config(format!("census.{key}"), format!("must be positive, got {v}")))
            }
        };
        positive(census.epsilon1, "epsilon1")?;
        positive(census.epsilon2, "epsilon2")?;
        positive(census.c_sk, "c_sk")?;
        positive(census.alpha, "alpha")?;
        positive(census.n_sk, "n_sk")?;
        if !(census.tau >= 0.0 && census.tau.is_finite()) {
            return Err(CliError::config("census.tau", "must be finite and >= 0"));
        }
        if census.n == 0 || census.k == 0 || census.d < 2 {
            return Err(CliError::config("census", "need N >= 1, k >= 1 and d >= 2"));
        }
        let (c, b) = match census.c {
            Some(c) => (c, census.b),
            None => {
                let consts = dissim_core::bounds::local_constants(&self.liouvillian()?, 0.0, census.tau);
                (consts.c, census.b.or(Some(consts.b_used)))
            }
        };
        Ok(CensusInputs {
            c_sk: census.c_sk,
            alpha: census.alpha,
            n_sk: census.n_sk,
            b,
            ..CensusInputs::new(census.n, census.k, census.d, census.tau, census.epsilon1, census.epsilon2, c)
        })
    }
}

fn check_ordering(spec: &OrderingSpec, count: usize, path: &str) -> CliResult<()> {
    TermOrdering::from(spec).resolve(count).map(|_| ()).map_err(|e| CliError::config(path, e.to_string()))
}

fn check_dim(m: &CMatrix, dim: usize, path: &str) -> CliResult<()> {
    if m.nrows() != dim {
        return Err(CliError::config(path, format!("dimension mismatch: expected {dim}x{dim}, got {}x{}", m.nrows(), m.ncols())));
    }
    Ok(())
}

fn dense_matrix(rows: &[Vec<[f64; 2]>], path: &str) -> CliResult<CMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(CliError::config(path, "matrix is empty"));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(CliError::config(path, format!("matrix is not square: row {i} has {} entries for {n} rows", rows[i].len())));
    }
    let entries: Vec<C64> = rows.iter().flatten().map(|[re, im]| C64::new(*re, *im)).collect();
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CliError::config(path, "matrix entries must be finite"));
    }
    Ok(CMatrix::from_row_slice(n, n, &entries))
}

/// Matrix of an operator on `sites` sites of dimension `d`.
fn operator_matrix(spec: &OperatorSpec, sites: usize, d: usize, path: &str) -> CliResult<CMatrix> {
    match spec {
        OperatorSpec::Pauli(text) => {
            if d != 2 {
                return Err(CliError::config(path, format!("Pauli strings need local_dim = 2, model has {d}")));
            }
            let terms = pauli::parse_pauli_sum(text, sites).map_err(|e| CliError::config(path, e))?;
            Ok(pauli::pauli_sum_matrix(&terms, sites))
        }
        OperatorSpec::Dense(rows) => {
            let m = dense_matrix(rows, path)?;
            check_dim(&m, d.pow(sites as u32), path)?;
            Ok(m)
        }
    }
}

fn schedule(spec: &ScheduleSpec, path: &str) -> CliResult<Schedule> {
    let points = |p: &[[f64; 2]]| p.iter().map(|[t, v]| (*t, *v)).collect::<Vec<_>>();
    let result = match spec {
        ScheduleSpec::Constant { value } => {
            if !value.is_finite() {
                return Err(CliError::config(format!("{path}.value"), "must be finite"));
            }
            Ok(Schedule::Constant(*value))
        }
        ScheduleSpec::PiecewiseConstant { points: p } => Schedule::piecewise_constant(points(p)),
        ScheduleSpec::Linear { points: p } => Schedule::linear(points(p)),
    };
    result.map_err(|e| CliError::config(format!("{path}.points"), e.to_string()))
}

fn scheduled(spec: &ScheduledSpec, support: &SupportSet, d: usize, hermitian: bool, path: &str) -> CliResult<ScheduledOperator> {
    let op_path = format!("{path}.op");
    let matrix = operator_matrix(&spec.op, support.len(), d, &op_path)?;
    if hermitian && !linalg::is_hermitian(&matrix, dissim_core::model::HERMITIAN_TOL) {
        return Err(CliError::config(op_path, "Hamiltonian is not Hermitian"));
    }
    let op = LocalOperator::new(support.clone(), matrix, d).map_err(|e| CliError::config(&op_path, e.to_string()))?;
    let op = match &spec.op {
        OperatorSpec::Pauli(text) => op.with_label(text.clone()),
        OperatorSpec::Dense(_) => op,
    };
    Ok(ScheduledOperator::new(op, schedule(&spec.schedule, &format!("{path}.schedule"))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DAMPING: &str = r#"
[model]
sites = 1

[[model.terms]]
support = [0]
jumps = [{ op = "1.0 * -" }]

[plan]
tau = 0.5
m = 10
"#;

    #[test]
    fn minimal_damping_document() {
        let c = parse_config(DAMPING).unwrap();
        let liou = c.liouvillian().unwrap();
        assert_eq!(liou.terms().len(), 1);
        let l = liou.terms()[0].jumps()[0].operator.matrix().clone();
        assert_eq!(l[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(linalg::max_abs(&l), 1.0);
        assert_eq!(c.model.locality, Some(1));
    }

    #[test]
    fn zz_hamiltonian() {
        let text = r#"
[model]
sites = 2
[[model.terms]]
support = [0, 1]
hamiltonian = { op = "0.5*ZZ" }
[plan]
tau = 1.0
m = 3
"#;
        let liou = parse_config(text).unwrap().liouvillian().unwrap();
        let h = liou.terms()[0].hamiltonian().unwrap().operator.matrix().clone();
        let zz = linalg::kron(&linalg::pauli('Z').unwrap(), &linalg::pauli('Z').unwrap()) * C64::new(0.5, 0.0);
        assert_eq!(h, zz);
    }

    #[test]
    fn decreasing_breakpoints_name_the_key() {
        let text = DAMPING.replace(
            r#"jumps = [{ op = "1.0 * -" }]"#,
            r#"jumps = [{ op = "1.0 * -", schedule = { kind = "piecewise-constant", points = [[0.0, 1.0], [0.5, 2.0], [0.2, 1.0]] } }]"#,
        );
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("model.terms[0].jumps[0].schedule"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let err = parse_config(&DAMPING.replace("m = 10", "m = 10\nsteps = 4")).unwrap_err().to_string();
        assert!(err.contains("plan") && err.contains("steps"), "{err}");
    }

    #[test]
    fn non_hermitian_hamiltonian_is_rejected() {
        let text = DAMPING.replace(r#"jumps = [{ op = "1.0 * -" }]"#, r#"hamiltonian = { op = "1.0*+" }"#);
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("model.terms[0].hamiltonian.op") && err.contains("Hermitian"), "{err}");
    }

    #[test]
    fn dense_dimension_mismatch() {
        let text = DAMPING.replace(r#""1.0 * -""#, "[[[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]]");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("dimension mismatch"), "{err}");
    }

    #[test]
    fn overrides_replace_step_spec() {
        let mut c = parse_config(DAMPING).unwrap();
        c.apply_overrides(Some(9), None, Some(0.1)).unwrap();
        assert_eq!((c.seed, c.plan.m, c.plan.epsilon), (9, None, Some(0.1)));
        assert!(c.apply_overrides(None, Some(1), Some(0.1)).is_err());
    }
}
