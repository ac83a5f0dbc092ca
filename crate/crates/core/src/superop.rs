//! Vectorized Liouvillians, exact propagators and average Liouvillians.
//!
//! Operators are vectorized by column stacking, `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
//! The exact propagator is the reference every Trotter product is measured
//! against: for piecewise-constant schedules it is an ordered product of
//! matrix exponentials over the constancy intervals, otherwise an adaptive
//! Runge–Kutta solution of `dT/dt = L_t T`.

use serde::Serialize;

use crate::linalg::{self, CMatrix, C64};
use crate::model::KLocalLiouvillian;
use crate::{ode, Error, Result};

pub const DEFAULT_ODE_TOL: f64 = 1e-10;
/// Largest `D²` for which dense superoperators are formed.
pub const DENSE_SUPEROP_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Vectorization {
    ColumnStacking,
}

/// Dense `D² × D²` matrix acting on column-stacked `D × D` operators.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperatorMatrix {
    matrix: CMatrix,
    dim: usize,
}

impl SuperOperatorMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        let dim = (n as f64).sqrt().round() as usize;
        if !matrix.is_square() || dim * dim != n {
            return Err(Error::Validation(format!(
                "superoperator must be D²×D², got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(SuperOperatorMatrix { matrix, dim })
    }

    pub fn identity(dim: usize) -> Self {
        SuperOperatorMatrix { matrix: linalg::identity(dim * dim), dim }
    }

    pub fn zeros(dim: usize) -> Self {
        SuperOperatorMatrix { matrix: linalg::zeros(dim * dim), dim }
    }

    /// Builds the matrix of `A ↦ f(A)` column by column from the basis `|i⟩⟨j|`.
    pub fn from_fn(dim: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let n = dim * dim;
        let mut matrix = linalg::zeros(n);
        for j in 0..dim {
            for i in 0..dim {
                let mut e = linalg::zeros(dim);
                e[(i, j)] = linalg::ONE;
                let image = f(&e);
                matrix.set_column(i + dim * j, &linalg::vectorize(&image));
            }
        }
        SuperOperatorMatrix { matrix, dim }
    }

    pub fn vectorization(&self) -> Vectorization {
        Vectorization::ColumnStacking
    }

    /// Hilbert space dimension `D` of the operators acted on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &SuperOperatorMatrix) -> SuperOperatorMatrix {
        SuperOperatorMatrix { matrix: &self.matrix * &other.matrix, dim: self.dim }
    }

    pub fn sub(&self, other: &SuperOperatorMatrix) -> SuperOperatorMatrix {
        SuperOperatorMatrix { matrix: &self.matrix - &other.matrix, dim: self.dim }
    }

    pub fn add(&self, other: &SuperOperatorMatrix) -> SuperOperatorMatrix {
        SuperOperatorMatrix { matrix: &self.matrix + &other.matrix, dim: self.dim }
    }

    pub fn scale(&self, c: f64) -> SuperOperatorMatrix {
        SuperOperatorMatrix { matrix: &self.matrix * C64::new(c, 0.0), dim: self.dim }
    }

    /// Hilbert–Schmidt adjoint (conjugate transpose of the matrix).
    pub fn adjoint(&self) -> SuperOperatorMatrix {
        SuperOperatorMatrix { matrix: self.matrix.adjoint(), dim: self.dim }
    }

    pub fn apply(&self, op: &CMatrix) -> CMatrix {
        let v = &self.matrix * linalg::vectorize(op);
        linalg::unvectorize(v.as_slice(), self.dim)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PropagatorMethod {
    Identity,
    ProductOfExponentials,
    RungeKutta,
    Mixed,
}

#[derive(Debug, Clone)]
pub struct Propagator {
    pub superop: SuperOperatorMatrix,
    pub method: PropagatorMethod,
}

/// Global generator split into fixed pieces: `L_t = Σᵢ cᵢ(t) Gᵢ`, with `cᵢ = f`
/// for Hamiltonian pieces and `cᵢ = f²` for dissipators.
pub struct GeneratorParts<'a> {
    liou: &'a KLocalLiouvillian,
    parts: Vec<CMatrix>,
}

impl<'a> GeneratorParts<'a> {
    pub fn new(liou: &'a KLocalLiouvillian) -> Result<Self> {
        let shape = liou.shape();
        guard_dense(shape.dim())?;
        let mut parts = Vec::new();
        for term in liou.terms() {
            let layout = term.support().layout(shape);
            for local in term.generator_parts() {
                parts.push(layout.embed_superop(&local));
            }
        }
        Ok(GeneratorParts { liou, parts })
    }

    fn combine(&self, coefficients: &[f64]) -> SuperOperatorMatrix {
        let dim = self.liou.shape().dim();
        let mut out = linalg::zeros(dim * dim);
        for (part, &c) in self.parts.iter().zip(coefficients) {
            if c != 0.0 {
                out += part * C64::new(c, 0.0);
            }
        }
        SuperOperatorMatrix { matrix: out, dim }
    }

    pub fn at(&self, t: f64) -> SuperOperatorMatrix {
        let coefficients: Vec<f64> =
            self.liou.terms().iter().flat_map(|term| term.coefficients_at(t)).collect();
        self.combine(&coefficients)
    }

    pub fn averaged(&self, s: f64, t: f64) -> SuperOperatorMatrix {
        let coefficients: Vec<f64> = self
            .liou
            .terms()
            .iter()
            .flat_map(|term| term.mean_coefficients(s, t))
            .collect();
        self.combine(&coefficients)
    }
}

fn guard_dense(dim: usize) -> Result<()> {
    let n = dim.saturating_mul(dim);
    if n > DENSE_SUPEROP_LIMIT {
        return Err(Error::GuardExceeded { what: "D²", value: n, limit: DENSE_SUPEROP_LIMIT });
    }
    Ok(())
}

/// Matrix of `L_t = Σ_Λ [ −i[H_Λ,·] + Σ_μ (2LρL† − {L†L, ρ}) ]`.
pub fn liouvillian_matrix(liou: &KLocalLiouvillian, t: f64) -> Result<SuperOperatorMatrix> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("time {t} is negative")));
    }
    Ok(GeneratorParts::new(liou)?.at(t))
}

fn segments(liou: &KLocalLiouvillian, s: f64, t: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![s];
    cuts.extend(liou.breakpoints_in(s, t));
    cuts.push(t);
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

fn check_interval(s: f64, t: f64) -> Result<()> {
    if !(s >= 0.0 && t >= s && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "propagation interval requires 0 <= s <= t, got s = {s}, t = {t}"
        )));
    }
    Ok(())
}

/// `T(t, s)` with `dT/dt = L_t T`, `T(s, s) = id`.
pub fn exact_propagator(liou: &KLocalLiouvillian, s: f64, t: f64, tol: f64) -> Result<Propagator> {
    check_interval(s, t)?;
    propagate(liou, s, t, tol, Direction::Forward)
}

/// `T⁻(t, s) = T(t, s)⁻¹` with `dT⁻/dt = −T⁻ L_t`, `T⁻(s, s) = id`.
pub fn inverse_propagator(liou: &KLocalLiouvillian, s: f64, t: f64, tol: f64) -> Result<Propagator> {
    check_interval(s, t)?;
    propagate(liou, s, t, tol, Direction::Backward)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Backward,
}

fn propagate(
    liou: &KLocalLiouvillian,
    s: f64,
    t: f64,
    tol: f64,
    direction: Direction,
) -> Result<Propagator> {
    let gen = GeneratorParts::new(liou)?;
    let dim = liou.shape().dim();
    let mut acc = linalg::identity(dim * dim);
    let (mut used_exp, mut used_rk) = (false, false);
    for (a, b) in segments(liou, s, t) {
        if b <= a {
            continue;
        }
        let factor = if liou.constant_on(a, b) {
            used_exp = true;
            let sign = if direction == Direction::Forward { 1.0 } else { -1.0 };
            linalg::expm(&(gen.at(a).matrix * C64::new(sign * (b - a), 0.0)))
        } else {
            used_rk = true;
            match direction {
                Direction::Forward => ode::integrate(
                    |time, y| &gen.at(time).matrix * y,
                    a,
                    b,
                    linalg::identity(dim * dim),
                    tol,
                )?,
                Direction::Backward => ode::integrate(
                    |time, y| -(y * &gen.at(time).matrix),
                    a,
                    b,
                    linalg::identity(dim * dim),
                    tol,
                )?,
            }
        };
        acc = match direction {
            Direction::Forward => factor * acc,
            Direction::Backward => acc * factor,
        };
    }
    let method = match (used_exp, used_rk) {
        (false, false) => PropagatorMethod::Identity,
        (true, false) => PropagatorMethod::ProductOfExponentials,
        (false, true) => PropagatorMethod::RungeKutta,
        (true, true) => PropagatorMethod::Mixed,
    };
    Ok(Propagator { superop: SuperOperatorMatrix { matrix: acc, dim }, method })
}

/// Averaged schedule coefficients of one term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermAverage {
    /// Mean of `f` for the Hamiltonian.
    pub hamiltonian_mean: Option<f64>,
    /// Mean of `f²` for each jump operator (`D[fX] = f² D[X]`).
    pub jump_mean_sq: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct AverageLiouvillian {
    pub interval: (f64, f64),
    pub matrix: SuperOperatorMatrix,
    pub coefficients: Vec<TermAverage>,
}

/// `(t − s)⁻¹ ∫ₛᵗ L_r dr`. A single term is handled by passing
/// [`KLocalLiouvillian::subset`].
pub fn average_liouvillian(liou: &KLocalLiouvillian, s: f64, t: f64) -> Result<AverageLiouvillian> {
    if !(t > s) || s < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "average needs 0 <= s < t, got s = {s}, t = {t}"
        )));
    }
    let gen = GeneratorParts::new(liou)?;
    let coefficients = liou
        .terms()
        .iter()
        .map(|term| {
            let means = term.mean_coefficients(s, t);
            let has_h = term.hamiltonian().is_some();
            TermAverage {
                hamiltonian_mean: has_h.then(|| means[0]),
                jump_mean_sq: means[usize::from(has_h)..].to_vec(),
            }
        })
        .collect();
    Ok(AverageLiouvillian { interval: (s, t), matrix: gen.averaged(s, t), coefficients })
}

/// `unvec(S · vec(ρ))`; no positivity is enforced on the result.
pub fn apply_superop(superop: &SuperOperatorMatrix, op: &CMatrix) -> Result<CMatrix> {
    if op.nrows() != superop.dim() || op.ncols() != superop.dim() {
        return Err(Error::DimensionMismatch { expected: superop.dim(), actual: op.nrows() });
    }
    Ok(superop.apply(op))
}
