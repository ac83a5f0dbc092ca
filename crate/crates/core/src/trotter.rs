//! First-order Trotter products of local channels.

use std::collections::HashMap;

use serde::Serialize;

use crate::linalg::{self, CMatrix, LocalLayout, LocalScratch, C64};
use crate::model::{check_permutation, DensityMatrix, KLocalLiouvillian, LindbladTerm, SupportSet};
use crate::norms::{self, NormEstimate, SearchBudget};
use crate::superop::{self, SuperOperatorMatrix, DEFAULT_ODE_TOL, DENSE_SUPEROP_LIMIT};
use crate::{Error, Result};

/// Largest Hilbert-space dimension handled by [`trotter_evolve`].
pub const STATE_DIM_LIMIT: usize = 1024;
pub const CHANNEL_CPT_TOL: f64 = 1e-9;
pub const TRACE_ABORT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepMode {
    ExactLocal,
    AverageLiouvillian,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermOrdering {
    #[default]
    InputOrder,
    Reversed,
    Explicit(Vec<usize>),
}

impl TermOrdering {
    pub fn resolve(&self, count: usize) -> Result<Vec<usize>> {
        match self {
            TermOrdering::InputOrder => Ok((0..count).collect()),
            TermOrdering::Reversed => Ok((0..count).rev().collect()),
            TermOrdering::Explicit(perm) => {
                check_permutation(perm, count)?;
                Ok(perm.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrotterPlan {
    pub tau: f64,
    pub m: u64,
    pub step_mode: StepMode,
    pub ordering: TermOrdering,
    pub epsilon_target: Option<f64>,
}

impl TrotterPlan {
    pub fn new(tau: f64, m: u64) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau must be finite and >= 0, got {tau}")));
        }
        if m < 1 {
            return Err(Error::InvalidArgument("step count m must be at least 1".into()));
        }
        Ok(TrotterPlan {
            tau,
            m,
            step_mode: StepMode::ExactLocal,
            ordering: TermOrdering::InputOrder,
            epsilon_target: None,
        })
    }

    /// Plan with `m` from [`step_count`]. When that gives `m = 0` (τ = 0 or no
    /// terms) a single step is used, which is exact in both cases.
    pub fn from_epsilon(c: f64, b: f64, k: usize, tau: f64, epsilon: f64) -> Result<Self> {
        let m = step_count(c, b, k, tau, epsilon)?;
        let mut plan = TrotterPlan::new(tau, m.max(1))?;
        plan.epsilon_target = Some(epsilon);
        Ok(plan)
    }

    pub fn with_mode(mut self, mode: StepMode) -> Self {
        self.step_mode = mode;
        self
    }

    pub fn with_ordering(mut self, ordering: TermOrdering) -> Self {
        self.ordering = ordering;
        self
    }

    /// `(τ(j−1)/m, τj/m)` for `j = 1..=m`.
    pub fn interval(&self, j: u64) -> (f64, f64) {
        let m = self.m as f64;
        (self.tau * (j - 1) as f64 / m, self.tau * j as f64 / m)
    }
}

/// `m = ⌈max(2cK²τ²/ε, τb/ln 2)⌉`, or 0 when τ = 0 or K = 0.
pub fn step_count(c: f64, b: f64, k: usize, tau: f64, epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(c >= 0.0 && b >= 0.0 && tau >= 0.0) {
        return Err(Error::InvalidArgument("c, b and tau must be non-negative".into()));
    }
    if tau == 0.0 || k == 0 {
        return Ok(0);
    }
    let k = k as f64;
    let m = (2.0 * c * k * k * tau * tau / epsilon).max(tau * b / std::f64::consts::LN_2).ceil();
    if !(m < u64::MAX as f64) {
        return Err(Error::InvalidArgument(format!("step count {m} does not fit in u64")));
    }
    Ok(m as u64)
}

#[derive(Debug, Clone)]
pub struct LocalChannel {
    pub support: SupportSet,
    pub superop: SuperOperatorMatrix,
    pub step_index: u64,
    pub interval: (f64, f64),
}

/// Channel of one term over `interval`, built on the term's own
/// `d^{|Λ|}`-dimensional space.
pub fn build_local_channel(
    term: &LindbladTerm,
    local_dim: usize,
    interval: (f64, f64),
    mode: StepMode,
    step_index: u64,
) -> Result<LocalChannel> {
    let (s, t) = interval;
    if !(s >= 0.0 && t >= s) {
        return Err(Error::InvalidArgument(format!("invalid step interval ({s}, {t})")));
    }
    let (shape, local_term) = term.localized(local_dim)?;
    let dl = shape.dim();
    let superop = if term.is_zero() || t == s {
        SuperOperatorMatrix::identity(dl)
    } else {
        let liou = KLocalLiouvillian::new(shape, vec![local_term])?;
        match mode {
            StepMode::ExactLocal => superop::exact_propagator(&liou, s, t, DEFAULT_ODE_TOL)?.superop,
            StepMode::AverageLiouvillian => {
                let avg = superop::average_liouvillian(&liou, s, t)?;
                let exp = linalg::expm(&(avg.matrix.matrix() * C64::new(t - s, 0.0)));
                SuperOperatorMatrix::new(exp)?
            }
        }
    };
    let diag = norms::is_cpt(&superop, CHANNEL_CPT_TOL);
    if !diag.is_cpt {
        return Err(Error::NotCpt {
            min_eigenvalue: diag.min_choi_eigenvalue,
            trace_residual: diag.trace_residual,
        });
    }
    Ok(LocalChannel { support: term.support().clone(), superop, step_index, interval })
}

#[derive(Hash, PartialEq, Eq)]
struct CacheKey {
    term: usize,
    mode: StepMode,
    width: u64,
    coefficients: Vec<u64>,
}

/// Builds the channels of each step in plan order, reusing channels for terms
/// whose schedules are constant on the step (they depend only on the step width
/// and the coefficient values).
struct ChannelSource<'a> {
    liou: &'a KLocalLiouvillian,
    plan: &'a TrotterPlan,
    order: Vec<usize>,
    layouts: Vec<LocalLayout>,
    cache: HashMap<CacheKey, SuperOperatorMatrix>,
}

impl<'a> ChannelSource<'a> {
    fn new(liou: &'a KLocalLiouvillian, plan: &'a TrotterPlan) -> Result<Self> {
        let order = plan
            .ordering
            .resolve(liou.terms().len())?
            .into_iter()
            .filter(|&i| !liou.terms()[i].is_zero())
            .collect();
        let layouts = liou.terms().iter().map(|t| t.support().layout(liou.shape())).collect();
        Ok(ChannelSource { liou, plan, order, layouts, cache: HashMap::new() })
    }

    fn channel(&mut self, index: usize, j: u64) -> Result<SuperOperatorMatrix> {
        let term = &self.liou.terms()[index];
        let (s, t) = self.plan.interval(j);
        let d = self.liou.shape().local_dim();
        if !term.constant_on(s, t) {
            return Ok(build_local_channel(term, d, (s, t), self.plan.step_mode, j)?.superop);
        }
        let key = CacheKey {
            term: index,
            mode: self.plan.step_mode,
            width: (t - s).to_bits(),
            coefficients: term.coefficients_at(s).iter().map(|c| c.to_bits()).collect(),
        };
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        let channel = build_local_channel(term, d, (s, t), self.plan.step_mode, j)?.superop;
        self.cache.insert(key, channel.clone());
        Ok(channel)
    }
}

/// `Π_{j=1..m} Π_Λ T_Λ^{(j)}` as a dense superoperator; step `j` acts after
/// step `j − 1` and terms within a step act in plan order.
pub fn trotter_propagator(liou: &KLocalLiouvillian, plan: &TrotterPlan) -> Result<SuperOperatorMatrix> {
    let dim = liou.shape().dim();
    let n = dim.saturating_mul(dim);
    if n > DENSE_SUPEROP_LIMIT {
        return Err(Error::GuardExceeded { what: "D²", value: n, limit: DENSE_SUPEROP_LIMIT });
    }
    let mut source = ChannelSource::new(liou, plan)?;
    let mut acc = linalg::identity(n);
    let mut scratch = LocalScratch::default();
    for j in 1..=plan.m {
        for pos in 0..source.order.len() {
            let index = source.order[pos];
            let channel = source.channel(index, j)?;
            let layout = &source.layouts[index];
            for column in acc.as_mut_slice().chunks_mut(n) {
                layout.apply_superop(channel.matrix(), column, &mut scratch);
            }
        }
    }
    SuperOperatorMatrix::new(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: u64,
    pub time: f64,
    pub trace_residual: f64,
    /// Present on spot-check steps only.
    pub min_eigenvalue: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StepLog {
    pub records: Vec<StepRecord>,
}

impl StepLog {
    pub fn max_trace_residual(&self) -> f64 {
        self.records.iter().map(|r| r.trace_residual).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.records.iter().filter_map(|r| r.min_eigenvalue).reduce(f64::min)
    }
}

pub fn trotter_evolve(
    liou: &KLocalLiouvillian,
    rho0: &DensityMatrix,
    plan: &TrotterPlan,
) -> Result<(DensityMatrix, StepLog)> {
    trotter_evolve_observed(liou, rho0, plan, |_, _| {})
}

/// As [`trotter_evolve`], calling `observer` with the state after every step
/// (and once with step 0 for the initial state).
pub fn trotter_evolve_observed(
    liou: &KLocalLiouvillian,
    rho0: &DensityMatrix,
    plan: &TrotterPlan,
    mut observer: impl FnMut(&StepRecord, &CMatrix),
) -> Result<(DensityMatrix, StepLog)> {
    let dim = liou.shape().dim();
    if dim > STATE_DIM_LIMIT {
        return Err(Error::GuardExceeded { what: "D", value: dim, limit: STATE_DIM_LIMIT });
    }
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: rho0.dim() });
    }
    let mut source = ChannelSource::new(liou, plan)?;
    let mut rho = rho0.matrix().clone();
    let mut scratch = LocalScratch::default();
    let spot = plan.m.div_ceil(10).max(1);
    let mut log = StepLog::default();
    observer(
        &StepRecord {
            step: 0,
            time: 0.0,
            trace_residual: (linalg::trace(&rho) - linalg::ONE).norm(),
            min_eigenvalue: None,
        },
        &rho,
    );
    for j in 1..=plan.m {
        for pos in 0..source.order.len() {
            let index = source.order[pos];
            let channel = source.channel(index, j)?;
            source.layouts[index].apply_superop(channel.matrix(), rho.as_mut_slice(), &mut scratch);
        }
        let residual = (linalg::trace(&rho) - linalg::ONE).norm();
        if residual > TRACE_ABORT_TOL {
            return Err(Error::TraceDrift { step: j, residual, limit: TRACE_ABORT_TOL });
        }
        let min_eigenvalue = (j % spot == 0 || j == plan.m)
            .then(|| linalg::min_eigenvalue_hermitian(&rho));
        let record = StepRecord { step: j, time: plan.interval(j).1, trace_residual: residual, min_eigenvalue };
        observer(&record, &rho);
        log.records.push(record);
    }
    Ok((DensityMatrix::from_trusted(rho), log))
}

/// Hermitian-restricted `‖T(τ, 0) − Trotter product‖_{1→1}` estimate.
pub fn measured_trotter_error(
    liou: &KLocalLiouvillian,
    plan: &TrotterPlan,
    budget: &SearchBudget,
    seed: u64,
) -> Result<NormEstimate> {
    let exact = superop::exact_propagator(liou, 0.0, plan.tau, DEFAULT_ODE_TOL)?.superop;
    let product = trotter_propagator(liou, plan)?;
    norms::one_to_one_norm_hermitian(&exact.sub(&product), budget, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::model::{LocalOperator, Schedule, ScheduledOperator, SystemShape};

    fn op(site: usize, label: &str) -> LocalOperator {
        LocalOperator::pauli(SupportSet::single(site), label, ONE).unwrap()
    }

    fn dephasing(site: usize, schedule: Schedule) -> LindbladTerm {
        LindbladTerm::new(
            SupportSet::single(site),
            None,
            vec![ScheduledOperator::new(op(site, "Z"), schedule)],
            2,
        )
        .unwrap()
    }

    fn damping_with_field() -> KLocalLiouvillian {
        let shape = SystemShape::new(1, 2, 1).unwrap();
        let damp = LindbladTerm::new(SupportSet::single(0), None, vec![ScheduledOperator::constant(op(0, "-"))], 2)
            .unwrap();
        let field = LindbladTerm::new(SupportSet::single(0), Some(ScheduledOperator::constant(op(0, "X"))), vec![], 2)
            .unwrap();
        KLocalLiouvillian::new(shape, vec![damp, field]).unwrap()
    }

    #[test]
    fn step_count_examples() {
        assert_eq!(step_count(82.0, 20.0, 3, 0.0, 0.1).unwrap(), 0);
        assert_eq!(step_count(82.0, 20.0, 3, 1.0, 0.1).unwrap(), 14760);
        assert_eq!(step_count(1.0, 20.0, 1, 10.0, 100.0).unwrap(), 289);
        assert!(step_count(1.0, 1.0, 1, 1.0, 0.0).is_err());
        assert!(step_count(1.0, 1.0, 1, 1.0, -1.0).is_err());
    }

    #[test]
    fn zero_term_gives_identity_channel() {
        let term = LindbladTerm::new(SupportSet::single(0), None, vec![], 2).unwrap();
        let ch = build_local_channel(&term, 2, (0.0, 0.1), StepMode::ExactLocal, 1).unwrap();
        assert_eq!(ch.superop, SuperOperatorMatrix::identity(2));
    }

    #[test]
    fn constant_term_modes_agree() {
        let term = dephasing(0, Schedule::Constant(0.7));
        let a = build_local_channel(&term, 2, (0.2, 0.3), StepMode::ExactLocal, 3).unwrap();
        let b = build_local_channel(&term, 2, (0.2, 0.3), StepMode::AverageLiouvillian, 3).unwrap();
        assert!(linalg::max_abs(&(a.superop.matrix() - b.superop.matrix())) <= 1e-12);
    }

    #[test]
    fn averaged_dephasing_channel() {
        // f = 1 on the first half of the step and 0 after, so mean f² = 0.5
        let schedule = Schedule::piecewise_constant(vec![(0.0, 1.0), (0.05, 0.0)]).unwrap();
        let term = dephasing(0, schedule);
        let ch = build_local_channel(&term, 2, (0.0, 0.1), StepMode::AverageLiouvillian, 1).unwrap();
        let rho = CMatrix::from_element(2, 2, C64::new(0.5, 0.0));
        let out = ch.superop.apply(&rho);
        assert!((out[(0, 1)].re - 0.5 * (-0.2f64).exp()).abs() < 1e-14);
        assert!(((-0.2f64).exp() - 0.81873).abs() < 1e-5);
    }

    #[test]
    fn single_term_product_is_exact() {
        let shape = SystemShape::new(1, 2, 1).unwrap();
        let liou = KLocalLiouvillian::new(shape, vec![dephasing(0, Schedule::Constant(1.0))]).unwrap();
        let plan = TrotterPlan::new(0.7, 5).unwrap();
        let err = measured_trotter_error(&liou, &plan, &SearchBudget::default(), 0).unwrap();
        assert!(err.value <= 1e-9);
    }

    #[test]
    fn disjoint_dephasing_commutes() {
        let shape = SystemShape::new(2, 2, 1).unwrap();
        let liou = KLocalLiouvillian::new(
            shape,
            vec![dephasing(0, Schedule::Constant(1.0)), dephasing(1, Schedule::Constant(0.5))],
        )
        .unwrap();
        for m in [1, 3] {
            let plan = TrotterPlan::new(1.0, m).unwrap();
            let budget = SearchBudget::default().with_samples(200).with_restarts(4);
            let err = measured_trotter_error(&liou, &plan, &budget, 0).unwrap();
            assert!(err.value <= 1e-9, "m = {m}: {err:?}");
        }
    }

    #[test]
    fn damping_with_field_error_scales_as_inverse_m() {
        let liou = damping_with_field();
        let budget = SearchBudget::default();
        let e10 = measured_trotter_error(&liou, &TrotterPlan::new(1.0, 10).unwrap(), &budget, 0).unwrap();
        let e100 = measured_trotter_error(&liou, &TrotterPlan::new(1.0, 100).unwrap(), &budget, 0).unwrap();
        let ratio = e10.value / e100.value;
        assert!((8.0..=12.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn empty_model_evolution_is_identity() {
        let shape = SystemShape::new(2, 2, 1).unwrap();
        let liou = KLocalLiouvillian::empty(shape);
        let rho0 = DensityMatrix::basis(2, 4).unwrap();
        let (rho, log) = trotter_evolve(&liou, &rho0, &TrotterPlan::new(1.0, 4).unwrap()).unwrap();
        assert_eq!(rho.matrix(), rho0.matrix());
        assert_eq!(log.records.len(), 4);
    }

    #[test]
    fn amplitude_damping_state_evolution() {
        let shape = SystemShape::new(1, 2, 1).unwrap();
        let damp = LindbladTerm::new(SupportSet::single(0), None, vec![ScheduledOperator::constant(op(0, "-"))], 2)
            .unwrap();
        let liou = KLocalLiouvillian::new(shape, vec![damp]).unwrap();
        let plan = TrotterPlan::new(std::f64::consts::LN_2 / 2.0, 1000).unwrap();
        let (rho, log) = trotter_evolve(&liou, &DensityMatrix::basis(1, 2).unwrap(), &plan).unwrap();
        assert!((rho.matrix()[(1, 1)].re - 0.5).abs() < 1e-3);
        assert!(log.max_trace_residual() < 1e-10);
        assert_eq!(log.records.iter().filter(|r| r.min_eigenvalue.is_some()).count(), 10);
    }

    #[test]
    fn dephasing_chain_coherences() {
        let shape = SystemShape::new(3, 2, 1).unwrap();
        let terms = (0..3).map(|s| dephasing(s, Schedule::Constant(1.0))).collect();
        let liou = KLocalLiouvillian::new(shape, terms).unwrap();
        let plus = crate::linalg::CVector::from_element(8, C64::new(8f64.sqrt().recip(), 0.0));
        let rho0 = DensityMatrix::pure(&plus).unwrap();
        let (rho, _) = trotter_evolve(&liou, &rho0, &TrotterPlan::new(0.25, 7).unwrap()).unwrap();
        // |000⟩⟨001| differs on one site, |000⟩⟨111| on three
        let e = (-1.0f64).exp();
        assert!((rho.matrix()[(0, 1)].re - e / 8.0).abs() < 1e-6);
        assert!((rho.matrix()[(0, 7)].re - e.powi(3) / 8.0).abs() < 1e-6);
        assert!((rho.matrix()[(5, 5)].re - 1.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn propagator_and_state_evolution_agree() {
        let liou = damping_with_field();
        let plan = TrotterPlan::new(0.8, 13).unwrap().with_ordering(TermOrdering::Reversed);
        let rho0 = DensityMatrix::basis(0, 2).unwrap();
        let dense = trotter_propagator(&liou, &plan).unwrap().apply(rho0.matrix());
        let (rho, _) = trotter_evolve(&liou, &rho0, &plan).unwrap();
        assert!(linalg::max_abs(&(dense - rho.matrix())) < 1e-11);
    }

    #[test]
    fn explicit_ordering_is_validated() {
        let liou = damping_with_field();
        let bad = TrotterPlan::new(1.0, 2).unwrap().with_ordering(TermOrdering::Explicit(vec![0, 0]));
        assert!(trotter_propagator(&liou, &bad).is_err());
        let good = TrotterPlan::new(1.0, 2).unwrap().with_ordering(TermOrdering::Explicit(vec![1, 0]));
        let reversed = TrotterPlan::new(1.0, 2).unwrap().with_ordering(TermOrdering::Reversed);
        assert_eq!(trotter_propagator(&liou, &good).unwrap(), trotter_propagator(&liou, &reversed).unwrap());
    }

    #[test]
    fn dense_guard() {
        let shape = SystemShape::new(7, 2, 1).unwrap();
        let liou = KLocalLiouvillian::new(shape, vec![dephasing(0, Schedule::Constant(1.0))]).unwrap();
        assert!(matches!(
            trotter_propagator(&liou, &TrotterPlan::new(1.0, 1).unwrap()),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
