//! Kraus form, Stinespring unitaries, and the gate census for channel circuits.

use serde::Serialize;

use crate::linalg::{self, CMatrix, CVector, C64};
use crate::norms;
use crate::superop::SuperOperatorMatrix;
use crate::{Error, Result};

pub const DEFAULT_RANK_TOL: f64 = 1e-12;
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Standard basis vectors closer than this to the current span are skipped
/// during unitary completion.
const PIVOT_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct KrausSet {
    pub operators: Vec<CMatrix>,
    /// `‖Σ K†K − 1‖_∞`
    pub completeness_residual: f64,
}

impl KrausSet {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let dim = operators.first().map(|k| k.ncols()).ok_or_else(|| {
            Error::InvalidArgument("a Kraus set needs at least one operator".into())
        })?;
        if operators.iter().any(|k| k.nrows() != dim || k.ncols() != dim) {
            return Err(Error::InvalidArgument("Kraus operators must share one square shape".into()));
        }
        let mut sum = -linalg::identity(dim);
        for k in &operators {
            sum += k.adjoint() * k;
        }
        let completeness_residual = linalg::spectral_norm(&sum);
        if completeness_residual > COMPLETENESS_TOL {
            return Err(Error::Validation(format!(
                "Kraus completeness residual {completeness_residual:e} exceeds {COMPLETENESS_TOL:e}"
            )));
        }
        Ok(KrausSet { operators, completeness_residual })
    }

    pub fn dim(&self) -> usize {
        self.operators[0].ncols()
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = linalg::zeros(self.dim());
        for k in &self.operators {
            out += k * rho * k.adjoint();
        }
        out
    }

    /// `Σ_μ K̄_μ ⊗ K_μ`
    pub fn to_superop(&self) -> SuperOperatorMatrix {
        let n = self.dim() * self.dim();
        let mut out = CMatrix::zeros(n, n);
        for k in &self.operators {
            out += linalg::kron(&k.conjugate(), k);
        }
        SuperOperatorMatrix::new(out).expect("square by construction")
    }
}

/// Kraus operators from the Choi eigendecomposition, largest weight first.
/// Each operator is rescaled by a phase so that its largest-modulus entry is
/// real and positive.
pub fn kraus_from_superop(superop: &SuperOperatorMatrix, rank_tol: f64) -> Result<KrausSet> {
    let diag = norms::is_cpt(superop, COMPLETENESS_TOL);
    if !diag.is_cpt {
        return Err(Error::NotCpt {
            min_eigenvalue: diag.min_choi_eigenvalue,
            trace_residual: diag.trace_residual,
        });
    }
    let dim = superop.dim();
    let (values, vectors) = linalg::eigh(&norms::choi_matrix(superop));
    let mut operators = Vec::new();
    for idx in (0..values.len()).rev() {
        let lambda = values[idx];
        if lambda <= rank_tol {
            break;
        }
        let scale = lambda.sqrt();
        let v = vectors.column(idx);
        let mut k = CMatrix::from_fn(dim, dim, |a, i| v[i * dim + a] * scale);
        let pivot = k.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap();
        if pivot.norm() > 0.0 {
            k *= pivot.conj() / pivot.norm();
        }
        operators.push(k);
    }
    KrausSet::new(operators)
}

/// Unitary `U` on system ⊗ ancilla with `T(ρ) = tr_anc U (ρ ⊗ |0⟩⟨0|) U†`.
/// The system is the more significant tensor factor.
#[derive(Debug, Clone)]
pub struct StinespringDilation {
    pub unitary: CMatrix,
    pub system_dim: usize,
    pub ancilla_dim: usize,
}

impl StinespringDilation {
    /// `‖U†U − 1‖_∞`
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.unitary.nrows();
        linalg::spectral_norm(&(self.unitary.adjoint() * &self.unitary - linalg::identity(n)))
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.system_dim || rho.ncols() != self.system_dim {
            return Err(Error::DimensionMismatch { expected: self.system_dim, actual: rho.nrows() });
        }
        let mut ancilla = linalg::zeros(self.ancilla_dim);
        ancilla[(0, 0)] = linalg::ONE;
        let joint = &self.unitary * linalg::kron(rho, &ancilla) * self.unitary.adjoint();
        Ok(partial_trace_ancilla(&joint, self.system_dim, self.ancilla_dim))
    }

    /// `½‖tr_anc U(ρ⊗|0⟩⟨0|)U† − S(ρ)‖₁`
    pub fn roundtrip_distance(&self, superop: &SuperOperatorMatrix, rho: &CMatrix) -> Result<f64> {
        let via_dilation = self.apply(rho)?;
        let direct = crate::superop::apply_superop(superop, rho)?;
        Ok(0.5 * linalg::trace_norm(&(via_dilation - direct)))
    }
}

/// `out[a, b] = Σ_μ X[a·r + μ, b·r + μ]`
pub fn partial_trace_ancilla(joint: &CMatrix, system_dim: usize, ancilla_dim: usize) -> CMatrix {
    CMatrix::from_fn(system_dim, system_dim, |a, b| {
        (0..ancilla_dim).map(|mu| joint[(a * ancilla_dim + mu, b * ancilla_dim + mu)]).sum()
    })
}

/// Dilation with an ancilla of dimension `D²` (the largest possible Kraus rank).
/// The isometry `V = Σ_μ K_μ ⊗ |μ⟩` fills the columns `i·r` of `U`; the rest
/// are completed by Gram–Schmidt over the standard basis in index order.
pub fn stinespring(kraus: &KrausSet) -> Result<StinespringDilation> {
    let n = kraus.dim();
    let r = n * n;
    if kraus.operators.len() > r {
        return Err(Error::InvalidArgument(format!(
            "{} Kraus operators exceed the ancilla dimension {r}",
            kraus.operators.len()
        )));
    }
    if kraus.completeness_residual > COMPLETENESS_TOL {
        return Err(Error::Validation("Kraus set is not complete".into()));
    }
    let total = n * r;
    let mut unitary = CMatrix::zeros(total, total);
    for (mu, k) in kraus.operators.iter().enumerate() {
        for i in 0..n {
            for a in 0..n {
                unitary[(a * r + mu, i * r)] = k[(a, i)];
            }
        }
    }
    let mut basis: Vec<CVector> = (0..n).map(|i| unitary.column(i * r).into_owned()).collect();
    let mut extension = Vec::with_capacity(total - n);
    for e in 0..total {
        if basis.len() == total {
            break;
        }
        let mut v = CVector::zeros(total);
        v[e] = linalg::ONE;
        // two passes keep the completion orthogonal to working precision
        for _ in 0..2 {
            for q in &basis {
                let overlap = q.dotc(&v);
                v -= q * overlap;
            }
        }
        let norm = v.norm();
        if norm < PIVOT_TOL {
            continue;
        }
        v /= C64::new(norm, 0.0);
        basis.push(v.clone());
        extension.push(v);
    }
    if basis.len() != total {
        return Err(Error::Validation("unitary completion failed to span the space".into()));
    }
    let free_columns = (0..total).filter(|c| c % r != 0);
    for (col, v) in free_columns.zip(extension) {
        unitary.set_column(col, &v);
    }
    Ok(StinespringDilation { unitary, system_dim: n, ancilla_dim: r })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CensusInputs {
    #[serde(rename = "N")]
    pub n: u64,
    pub k: u32,
    pub d: u32,
    pub tau: f64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub c_sk: f64,
    pub alpha: f64,
    pub n_sk: f64,
    pub c: f64,
    /// When given, the step-count assumption `2 ln2 c N^{2k} τ / ε₁ ≥ b` is checked.
    pub b: Option<f64>,
}

impl CensusInputs {
    /// Defaults `c_SK = 1`, `α = 4`, `n_SK = 3`.
    pub fn new(n: u64, k: u32, d: u32, tau: f64, epsilon1: f64, epsilon2: f64, c: f64) -> Self {
        CensusInputs { n, k, d, tau, epsilon1, epsilon2, c_sk: 1.0, alpha: 4.0, n_sk: 3.0, c, b: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub inputs: CensusInputs,
    pub m: f64,
    pub epsilon_sk: Option<f64>,
    #[serde(rename = "N_SK")]
    pub n_sk_gates: f64,
    /// `N_SK` with the natural logarithm in place of log₂.
    #[serde(rename = "N_SK_natural_log")]
    pub n_sk_gates_ln: f64,
    #[serde(rename = "N_All_gates")]
    pub n_all_gates: f64,
    #[serde(rename = "log2_N_T_upper")]
    pub log2_n_t_upper: f64,
    pub epsilon_total: f64,
    /// `N^{3k+2} τ⁴ / ε⁵` with `ε = ε_total`.
    pub headline_o_form: f64,
    pub log2_headline_o_form: f64,
    pub assumption_holds: Option<bool>,
    pub notes: Vec<String>,
}

/// Evaluates the counting chain
/// `m = ⌈2cN^{2k}τ²/ε₁⌉`, `ε_SK = ε₂/(N^k m)`, `N_SK = ⌈c_SK log₂^α(1/ε_SK)⌉`,
/// `N_All = N_SK N^k m`, `log₂ N_T ≤ N_All log₂ n_SK`.
pub fn census(inputs: &CensusInputs) -> Result<CensusReport> {
    let CensusInputs { n, k, tau, epsilon1, epsilon2, c_sk, alpha, n_sk, c, b, .. } = *inputs;
    if !(epsilon1 > 0.0 && epsilon2 > 0.0) {
        return Err(Error::InvalidArgument("epsilon1 and epsilon2 must be positive".into()));
    }
    if n == 0 || k == 0 || !(tau >= 0.0) || !(c >= 0.0) || !(c_sk > 0.0) || !(alpha > 0.0) || !(n_sk >= 1.0) {
        return Err(Error::InvalidArgument(
            "census needs N, k >= 1, tau, c >= 0, c_SK, alpha > 0, n_SK >= 1".into(),
        ));
    }
    let nf = n as f64;
    let kf = k as f64;
    let n_k = nf.powf(kf);
    let epsilon_total = epsilon1 + 2.0 * epsilon2;
    let log2_headline = (3.0 * kf + 2.0) * nf.log2() + 4.0 * tau.log2() - 5.0 * epsilon_total.log2();
    let mut notes = Vec::new();
    let assumption = 2.0 * std::f64::consts::LN_2 * c * n_k * n_k * tau / epsilon1;
    let assumption_holds = b.map(|b| assumption >= b);
    if assumption_holds == Some(false) {
        notes.push("step-count assumption 2 ln2 c N^(2k) tau / epsilon1 >= b is violated".into());
    }
    let headline_o_form = log2_headline.exp2();
    if tau == 0.0 || c == 0.0 {
        notes.push("no steps: tau = 0 or c = 0".into());
        return Ok(CensusReport {
            inputs: *inputs,
            m: 0.0,
            epsilon_sk: None,
            n_sk_gates: 0.0,
            n_sk_gates_ln: 0.0,
            n_all_gates: 0.0,
            log2_n_t_upper: 0.0,
            epsilon_total,
            headline_o_form,
            log2_headline_o_form: log2_headline,
            assumption_holds,
            notes,
        });
    }
    let m = (2.0 * c * n_k * n_k * tau * tau / epsilon1).ceil();
    // ε_SK in the log domain so tiny values never underflow
    let log2_inv_eps_sk = n_k.log2() + m.log2() - epsilon2.log2();
    let epsilon_sk = (-log2_inv_eps_sk).exp2();
    let n_sk_gates = (c_sk * log2_inv_eps_sk.max(0.0).powf(alpha)).ceil().max(1.0);
    let ln_inv = log2_inv_eps_sk * std::f64::consts::LN_2;
    let n_sk_gates_ln = (c_sk * ln_inv.max(0.0).powf(alpha)).ceil().max(1.0);
    let n_all_gates = n_sk_gates * n_k * m;
    if !n_all_gates.is_finite() {
        notes.push("N_All overflows binary64".into());
    }
    Ok(CensusReport {
        inputs: *inputs,
        m,
        epsilon_sk: Some(epsilon_sk),
        n_sk_gates,
        n_sk_gates_ln,
        n_all_gates,
        log2_n_t_upper: n_all_gates * n_sk.log2(),
        epsilon_total,
        headline_o_form,
        log2_headline_o_form: log2_headline,
        assumption_holds,
        notes,
    })
}
