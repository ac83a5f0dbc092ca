//! Systems, supports, schedules, local operators and k-local Liouvillians.
//!
//! Time dependence is a real scalar schedule multiplying a fixed matrix,
//! `X_t = f(t)·X`. A physical term whose operator changes shape over time is
//! expressed as several scheduled operators.

use crate::linalg::{self, CMatrix, CVector, LocalLayout, C64};
use crate::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemShape {
    num_sites: usize,
    local_dim: usize,
    locality: usize,
    dim: usize,
}

impl SystemShape {
    pub fn new(num_sites: usize, local_dim: usize, locality: usize) -> Result<Self> {
        if num_sites == 0 {
            return Err(Error::Validation("num_sites must be positive".into()));
        }
        if local_dim < 2 {
            return Err(Error::Validation(format!("local_dim must be >= 2, got {local_dim}")));
        }
        if locality == 0 || locality > num_sites {
            return Err(Error::Validation(format!(
                "locality must satisfy 1 <= k <= N, got k = {locality}, N = {num_sites}"
            )));
        }
        let dim = u32::try_from(num_sites)
            .ok()
            .and_then(|n| local_dim.checked_pow(n))
            .ok_or_else(|| {
                Error::Validation(format!("dimension {local_dim}^{num_sites} overflows usize"))
            })?;
        Ok(SystemShape { num_sites, local_dim, locality, dim })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn locality(&self) -> usize {
        self.locality
    }

    /// Total Hilbert space dimension `d^N`.
    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Strictly increasing list of site indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    pub fn new(sites: Vec<usize>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::Validation("support must contain at least one site".into()));
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(format!(
                "support sites must be strictly increasing, got {sites:?}"
            )));
        }
        Ok(SupportSet(sites))
    }

    pub fn single(site: usize) -> Self {
        SupportSet(vec![site])
    }

    pub fn sites(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check_against(&self, shape: &SystemShape) -> Result<()> {
        if let Some(&bad) = self.0.iter().find(|&&s| s >= shape.num_sites()) {
            return Err(Error::Validation(format!(
                "site {bad} out of range for N = {}",
                shape.num_sites()
            )));
        }
        Ok(())
    }

    pub fn layout(&self, shape: &SystemShape) -> LocalLayout {
        LocalLayout::new(shape.num_sites(), shape.local_dim(), &self.0)
    }
}

/// Real scalar time profile. Right-continuous; the first value extends back to
/// `t = 0` and the last value extends to `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Constant(f64),
    PiecewiseConstant(Vec<(f64, f64)>),
    /// Sampled smooth profile, linearly interpolated between samples.
    Linear(Vec<(f64, f64)>),
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Constant(1.0)
    }
}

impl Schedule {
    pub fn piecewise_constant(points: Vec<(f64, f64)>) -> Result<Self> {
        validate_breakpoints(&points)?;
        Ok(Schedule::PiecewiseConstant(points))
    }

    pub fn linear(points: Vec<(f64, f64)>) -> Result<Self> {
        validate_breakpoints(&points)?;
        Ok(Schedule::Linear(points))
    }

    pub fn is_piecewise_constant(&self) -> bool {
        !matches!(self, Schedule::Linear(_))
    }

    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            Schedule::Constant(v) => *v,
            Schedule::PiecewiseConstant(points) => {
                let idx = points.partition_point(|&(time, _)| time <= t);
                points[idx.saturating_sub(1)].1
            }
            Schedule::Linear(points) => {
                let idx = points.partition_point(|&(time, _)| time <= t);
                if idx == 0 {
                    return points[0].1;
                }
                if idx == points.len() {
                    return points[points.len() - 1].1;
                }
                let (t0, v0) = points[idx - 1];
                let (t1, v1) = points[idx];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    fn points(&self) -> &[(f64, f64)] {
        match self {
            Schedule::Constant(_) => &[],
            Schedule::PiecewiseConstant(p) | Schedule::Linear(p) => p,
        }
    }

    /// Breakpoint times strictly inside `(s, t)`.
    pub fn breakpoints_in(&self, s: f64, t: f64) -> Vec<f64> {
        self.points()
            .iter()
            .map(|&(time, _)| time)
            .filter(|&time| time > s && time < t)
            .collect()
    }

    /// The value if the schedule is constant on `[s, t)`.
    pub fn constant_on(&self, s: f64, t: f64) -> Option<f64> {
        match self {
            Schedule::Constant(v) => Some(*v),
            Schedule::PiecewiseConstant(_) => {
                self.breakpoints_in(s, t).is_empty().then(|| self.value_at(s))
            }
            Schedule::Linear(_) => {
                if !self.breakpoints_in(s, t).is_empty() {
                    return None;
                }
                let (a, b) = (self.value_at(s), self.value_at(t));
                (a == b).then_some(a)
            }
        }
    }

    /// Exact `sup |f|` over `[t0, t1]`: both profile kinds attain it at
    /// endpoints or breakpoints.
    pub fn sup_abs(&self, t0: f64, t1: f64) -> f64 {
        let mut sup = self.value_at(t0).abs().max(self.value_at(t1).abs());
        for time in self.breakpoints_in(t0, t1) {
            sup = sup.max(self.value_at(time).abs());
        }
        sup
    }

    fn segments(&self, s: f64, t: f64) -> Vec<(f64, f64)> {
        let mut cuts = vec![s];
        cuts.extend(self.breakpoints_in(s, t));
        cuts.push(t);
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// `∫ₛᵗ f` and `∫ₛᵗ f²`, closed form per segment.
    pub fn integrals(&self, s: f64, t: f64) -> (f64, f64) {
        let mut first = 0.0;
        let mut second = 0.0;
        for (x, y) in self.segments(s, t) {
            let len = y - x;
            match self {
                Schedule::Linear(_) => {
                    let (fx, fy) = (self.value_at(x), self.value_at(y));
                    first += 0.5 * (fx + fy) * len;
                    second += (fx * fx + fx * fy + fy * fy) / 3.0 * len;
                }
                _ => {
                    let v = self.value_at(x);
                    first += v * len;
                    second += v * v * len;
                }
            }
        }
        (first, second)
    }

    /// Time averages of `f` and `f²` over `[s, t]`. Exact (no division) when
    /// the schedule is constant on the interval.
    pub fn means(&self, s: f64, t: f64) -> (f64, f64) {
        if let Some(v) = self.constant_on(s, t) {
            return (v, v * v);
        }
        let (first, second) = self.integrals(s, t);
        (first / (t - s), second / (t - s))
    }
}

fn validate_breakpoints(points: &[(f64, f64)]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Validation("schedule needs at least one breakpoint".into()));
    }
    for &(time, value) in points {
        if !time.is_finite() || time < 0.0 || !value.is_finite() {
            return Err(Error::Validation(format!(
                "breakpoint ({time}, {value}) must have finite non-negative time and finite value"
            )));
        }
    }
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::Validation("breakpoint times must be strictly increasing".into()));
    }
    Ok(())
}

/// A dense matrix acting on the sites of its support.
#[derive(Debug, Clone)]
pub struct LocalOperator {
    support: SupportSet,
    matrix: CMatrix,
    hermitian: bool,
    label: Option<String>,
}

impl LocalOperator {
    pub fn new(support: SupportSet, matrix: CMatrix, local_dim: usize) -> Result<Self> {
        let expected = local_dim.pow(support.len() as u32);
        if matrix.nrows() != expected || matrix.ncols() != expected {
            return Err(Error::Validation(format!(
                "operator on {} site(s) must be {expected}x{expected}, got {}x{}",
                support.len(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(LocalOperator { support, matrix, hermitian: false, label: None })
    }

    /// As [`LocalOperator::new`], additionally requiring `‖M − M†‖ ≤ 1e−12`.
    pub fn hermitian(support: SupportSet, matrix: CMatrix, local_dim: usize) -> Result<Self> {
        if !linalg::is_hermitian(&matrix, HERMITIAN_TOL) {
            return Err(Error::Validation("Hamiltonian operator is not Hermitian".into()));
        }
        let mut op = Self::new(support, matrix, local_dim)?;
        op.hermitian = true;
        Ok(op)
    }

    /// Qubit operator from a Pauli-string label over `{I, X, Y, Z, +, -}`.
    pub fn pauli(support: SupportSet, label: &str, coeff: C64) -> Result<Self> {
        let letters: Vec<char> = label.chars().collect();
        if letters.len() != support.len() {
            return Err(Error::Validation(format!(
                "Pauli label {label:?} has {} letters for {} site(s)",
                letters.len(),
                support.len()
            )));
        }
        let mut matrix = CMatrix::identity(1, 1);
        for c in &letters {
            let factor = linalg::pauli(*c)
                .ok_or_else(|| Error::Validation(format!("unknown Pauli letter {c:?}")))?;
            matrix = linalg::kron(&matrix, &factor);
        }
        matrix *= coeff;
        let mut op = Self::new(support, matrix, 2)?;
        op.hermitian = coeff.im == 0.0 && letters.iter().all(|c| "IXYZ".contains(*c));
        op.label = Some(label.to_string());
        Ok(op)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn operator_norm(&self) -> f64 {
        linalg::spectral_norm(&self.matrix)
    }
}

#[derive(Debug, Clone)]
pub struct ScheduledOperator {
    pub operator: LocalOperator,
    pub schedule: Schedule,
}

impl ScheduledOperator {
    pub fn new(operator: LocalOperator, schedule: Schedule) -> Self {
        ScheduledOperator { operator, schedule }
    }

    pub fn constant(operator: LocalOperator) -> Self {
        Self::new(operator, Schedule::Constant(1.0))
    }
}

/// `L_Λ = −i[H_Λ, ·] + Σ_μ D[L_{Λ,μ}]` with `D[X](ρ) = 2XρX† − {X†X, ρ}`.
#[derive(Debug, Clone)]
pub struct LindbladTerm {
    support: SupportSet,
    hamiltonian: Option<ScheduledOperator>,
    jumps: Vec<ScheduledOperator>,
}

impl LindbladTerm {
    pub fn new(
        support: SupportSet,
        hamiltonian: Option<ScheduledOperator>,
        jumps: Vec<ScheduledOperator>,
        local_dim: usize,
    ) -> Result<Self> {
        for op in hamiltonian.iter().chain(&jumps) {
            if op.operator.support() != &support {
                return Err(Error::Validation(format!(
                    "operator support {:?} differs from term support {:?}",
                    op.operator.support().sites(),
                    support.sites()
                )));
            }
        }
        if let Some(h) = &hamiltonian {
            if !linalg::is_hermitian(h.operator.matrix(), HERMITIAN_TOL) {
                return Err(Error::Validation("Hamiltonian operator is not Hermitian".into()));
            }
        }
        let cap = local_dim.pow(2 * support.len() as u32);
        if jumps.len() > cap {
            return Err(Error::Validation(format!(
                "{} jump operators exceed the maximum d^(2|Λ|) = {cap}",
                jumps.len()
            )));
        }
        Ok(LindbladTerm { support, hamiltonian, jumps })
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn hamiltonian(&self) -> Option<&ScheduledOperator> {
        self.hamiltonian.as_ref()
    }

    pub fn jumps(&self) -> &[ScheduledOperator] {
        &self.jumps
    }

    pub fn operators(&self) -> impl Iterator<Item = &ScheduledOperator> {
        self.hamiltonian.iter().chain(&self.jumps)
    }

    pub fn is_zero(&self) -> bool {
        self.operators().all(|op| {
            op.operator.matrix().iter().all(|z| *z == linalg::ZERO)
                || matches!(op.schedule, Schedule::Constant(v) if v == 0.0)
        })
    }

    pub fn local_dim_of(&self, d: usize) -> usize {
        d.pow(self.support.len() as u32)
    }

    /// Largest `|f(t)|·‖X‖_∞` over the term's operators and `t ∈ [t0, t1]`.
    pub fn sup_norm(&self, t0: f64, t1: f64) -> f64 {
        self.operators()
            .map(|op| op.schedule.sup_abs(t0, t1) * op.operator.operator_norm())
            .fold(0.0, f64::max)
    }

    pub fn breakpoints_in(&self, s: f64, t: f64) -> Vec<f64> {
        self.operators().flat_map(|op| op.schedule.breakpoints_in(s, t)).collect()
    }

    pub fn constant_on(&self, s: f64, t: f64) -> bool {
        self.operators().all(|op| op.schedule.constant_on(s, t).is_some())
    }

    /// Unscaled local generator pieces: Hamiltonian part first (if any), then one
    /// dissipator per jump operator.
    pub fn generator_parts(&self) -> Vec<CMatrix> {
        let mut parts = Vec::with_capacity(self.jumps.len() + 1);
        if let Some(h) = &self.hamiltonian {
            parts.push(hamiltonian_generator(h.operator.matrix()));
        }
        parts.extend(self.jumps.iter().map(|j| dissipator_generator(j.operator.matrix())));
        parts
    }

    /// Coefficients of [`Self::generator_parts`] at time `t`: `f` for the
    /// Hamiltonian, `f²` for every jump operator.
    pub fn coefficients_at(&self, t: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.jumps.len() + 1);
        if let Some(h) = &self.hamiltonian {
            out.push(h.schedule.value_at(t));
        }
        out.extend(self.jumps.iter().map(|j| {
            let f = j.schedule.value_at(t);
            f * f
        }));
        out
    }

    /// Time-averaged coefficients over `[s, t]`: mean of `f` for the
    /// Hamiltonian, mean of `f²` for jump operators.
    pub fn mean_coefficients(&self, s: f64, t: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.jumps.len() + 1);
        if let Some(h) = &self.hamiltonian {
            out.push(h.schedule.means(s, t).0);
        }
        out.extend(self.jumps.iter().map(|j| j.schedule.means(s, t).1));
        out
    }

    /// The same term re-indexed onto sites `0..|Λ|` of its own support.
    pub fn localized(&self, local_dim: usize) -> Result<(SystemShape, LindbladTerm)> {
        let n = self.support.len();
        let shape = SystemShape::new(n, local_dim, n)?;
        let support = SupportSet((0..n).collect());
        let move_op = |op: &ScheduledOperator| ScheduledOperator {
            operator: LocalOperator {
                support: support.clone(),
                ..op.operator.clone()
            },
            schedule: op.schedule.clone(),
        };
        let term = LindbladTerm {
            support: support.clone(),
            hamiltonian: self.hamiltonian.as_ref().map(move_op),
            jumps: self.jumps.iter().map(move_op).collect(),
        };
        Ok((shape, term))
    }
}

/// `−i(1 ⊗ H − Hᵀ ⊗ 1)` in column-stacked form.
pub fn hamiltonian_generator(h: &CMatrix) -> CMatrix {
    let id = linalg::identity(h.nrows());
    (linalg::kron(&id, h) - linalg::kron(&h.transpose(), &id)) * (-linalg::I)
}

/// `2 L̄ ⊗ L − 1 ⊗ L†L − (L†L)ᵀ ⊗ 1` in column-stacked form.
pub fn dissipator_generator(l: &CMatrix) -> CMatrix {
    let id = linalg::identity(l.nrows());
    let ldl = l.adjoint() * l;
    linalg::kron(&l.conjugate(), l) * C64::new(2.0, 0.0)
        - linalg::kron(&id, &ldl)
        - linalg::kron(&ldl.transpose(), &id)
}

/// `L = Σ_Λ L_Λ` over strictly local terms, applied in `order` by default.
#[derive(Debug, Clone)]
pub struct KLocalLiouvillian {
    shape: SystemShape,
    terms: Vec<LindbladTerm>,
    order: Vec<usize>,
}

impl KLocalLiouvillian {
    pub fn new(shape: SystemShape, terms: Vec<LindbladTerm>) -> Result<Self> {
        for (i, term) in terms.iter().enumerate() {
            term.support().check_against(&shape)?;
            if term.support().len() > shape.locality() {
                return Err(Error::Validation(format!(
                    "term {i} acts on {} sites, locality is {}",
                    term.support().len(),
                    shape.locality()
                )));
            }
        }
        let order = (0..terms.len()).collect();
        Ok(KLocalLiouvillian { shape, terms, order })
    }

    pub fn empty(shape: SystemShape) -> Self {
        KLocalLiouvillian { shape, terms: Vec::new(), order: Vec::new() }
    }

    pub fn with_order(mut self, order: Vec<usize>) -> Result<Self> {
        check_permutation(&order, self.terms.len())?;
        self.order = order;
        Ok(self)
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn terms(&self) -> &[LindbladTerm] {
        &self.terms
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Number of terms that are not identically zero.
    pub fn nonzero_term_count(&self) -> usize {
        self.terms.iter().filter(|t| !t.is_zero()).count()
    }

    /// Non-fatal structural remarks (term count above `N^k`, jump count above `d^k`).
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.shape.num_sites() as f64;
        let cap = n.powi(self.shape.locality() as i32);
        if self.terms.len() as f64 > cap {
            out.push(format!("K = {} exceeds N^k = {cap}", self.terms.len()));
        }
        let dk = self.shape.local_dim().pow(self.shape.locality() as u32);
        for (i, term) in self.terms.iter().enumerate() {
            if term.jumps().len() > dk {
                out.push(format!(
                    "term {i} has {} jump operators, more than d^k = {dk}; the local constants assume at most d^k",
                    term.jumps().len()
                ));
            }
        }
        out
    }

    pub fn max_jump_count(&self) -> usize {
        self.terms.iter().map(|t| t.jumps().len()).max().unwrap_or(0)
    }

    /// Sorted, de-duplicated breakpoints of every schedule strictly inside `(s, t)`.
    pub fn breakpoints_in(&self, s: f64, t: f64) -> Vec<f64> {
        let mut all: Vec<f64> = self.terms.iter().flat_map(|term| term.breakpoints_in(s, t)).collect();
        all.sort_by(f64::total_cmp);
        all.dedup();
        all
    }

    pub fn constant_on(&self, s: f64, t: f64) -> bool {
        self.terms.iter().all(|term| term.constant_on(s, t))
    }

    pub fn is_piecewise_constant(&self) -> bool {
        self.terms
            .iter()
            .flat_map(|t| t.operators())
            .all(|op| op.schedule.is_piecewise_constant())
    }

    /// Sub-model containing only the listed terms (in the given order).
    pub fn subset(&self, indices: &[usize]) -> KLocalLiouvillian {
        KLocalLiouvillian {
            shape: self.shape,
            terms: indices.iter().map(|&i| self.terms[i].clone()).collect(),
            order: (0..indices.len()).collect(),
        }
    }
}

pub(crate) fn check_permutation(order: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    if order.len() != len {
        return Err(Error::Validation(format!(
            "ordering has {} entries for {len} terms",
            order.len()
        )));
    }
    for &i in order {
        if i >= len || seen[i] {
            return Err(Error::Validation(format!("ordering {order:?} is not a permutation")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Positive, unit-trace operator on the full Hilbert space.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Validation("density matrix must be square".into()));
        }
        let tr = linalg::trace(&matrix);
        if (tr - linalg::ONE).norm() > TRACE_TOL {
            return Err(Error::Validation(format!("trace {tr} differs from 1")));
        }
        if !linalg::is_hermitian(&matrix, HERMITIAN_TOL) {
            return Err(Error::Validation("density matrix is not Hermitian".into()));
        }
        let min = linalg::min_eigenvalue_hermitian(&matrix);
        if min < -PSD_TOL {
            return Err(Error::Validation(format!("minimum eigenvalue {min:.3e} is negative")));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::Validation("zero state vector".into()));
        }
        Self::new(linalg::projector(&(psi / C64::new(norm, 0.0))))
    }

    pub fn basis(index: usize, dim: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Validation(format!("basis index {index} out of range {dim}")));
        }
        let mut m = linalg::zeros(dim);
        m[(index, index)] = linalg::ONE;
        Ok(DensityMatrix { matrix: m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix { matrix: linalg::identity(dim) / C64::new(dim as f64, 0.0) }
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        DensityMatrix { matrix }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `P†(M ⊗ 1_rest)P`: the local matrix on its support, identity elsewhere.
pub fn embed_local(op: &LocalOperator, shape: &SystemShape) -> Result<CMatrix> {
    op.support().check_against(shape)?;
    let expected = shape.local_dim().pow(op.support().len() as u32);
    if op.matrix().nrows() != expected {
        return Err(Error::DimensionMismatch { expected, actual: op.matrix().nrows() });
    }
    Ok(op.support().layout(shape).embed_operator(op.matrix()))
}

/// Scheduled operators of a term at time `t`: `(H_t, [L_{μ,t}])`, local matrices.
pub fn evaluate_term(term: &LindbladTerm, t: f64, local_dim: usize) -> (CMatrix, Vec<CMatrix>) {
    let dl = term.local_dim_of(local_dim);
    let h = term
        .hamiltonian()
        .map(|h| h.operator.matrix() * C64::new(h.schedule.value_at(t), 0.0))
        .unwrap_or_else(|| linalg::zeros(dl));
    let jumps = term
        .jumps()
        .iter()
        .map(|j| j.operator.matrix() * C64::new(j.schedule.value_at(t), 0.0))
        .collect();
    (h, jumps)
}

/// `a = max_Λ max_{X ∈ L_Λ} sup_{t ∈ [t0, t1]} ‖X_t‖_∞`; zero for an empty model.
pub fn term_sup_norm_a(liou: &KLocalLiouvillian, t0: f64, t1: f64) -> f64 {
    liou.terms().iter().map(|t| t.sup_norm(t0, t1)).fold(0.0, f64::max)
}
