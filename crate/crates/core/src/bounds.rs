//! A-priori Trotter error formulas.
//!
//! Every quantity here is a closed-form function of the operator-norm bound
//! `a`, the local dimension `d` and the locality `k`; no superoperator norm is
//! ever evaluated numerically, so all results remain certificates.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::{term_sup_norm_a, KLocalLiouvillian, Schedule};
use crate::quadrature::GaussLegendre;
use crate::trotter::step_count;
use crate::{Error, Result};

/// Gauss–Legendre nodes per axis on segments where some schedule varies.
pub const DEFAULT_QUADRATURE_NODES: usize = 32;
/// Above this many (step, split) pairs the report skips the general bound.
const GENERAL_BOUND_WORK_LIMIT: u64 = 20_000;
/// Above this many steps the per-step sum uses the whole-horizon constants.
const PER_STEP_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalConstants {
    pub a: f64,
    pub b_lemma: f64,
    pub b_thm2: f64,
    pub b_used: f64,
    pub c: f64,
    pub d: usize,
    pub k: usize,
    pub interval: (f64, f64),
    /// Some term carries more than `d^k` jump operators, which the counting
    /// behind `b` and `c` does not cover.
    pub jump_count_exceeds_dk: bool,
}

impl LocalConstants {
    /// Constants for a given `a`, independent of any model.
    pub fn from_a(a: f64, d: usize, k: usize) -> Self {
        let dk = (d as f64).powi(k as i32);
        let b_lemma = b_formula(a, dk);
        let b_thm2 = 2.0 * a * a * (2.0 + 4.0 * dk);
        LocalConstants {
            a,
            b_lemma,
            b_thm2,
            b_used: b_lemma.max(b_thm2),
            c: c_formula(a, a, dk),
            d,
            k,
            interval: (0.0, 0.0),
            jump_count_exceeds_dk: false,
        }
    }
}

/// `4a + 8 d^k a²`
fn b_formula(a: f64, dk: f64) -> f64 {
    4.0 * a + 8.0 * dk * a * a
}

/// `2 a_r a_u + 4(a_r a_u² + a_r² a_u) d^k + 16 a_r² a_u² d^{2k}`
fn c_formula(ar: f64, au: f64, dk: f64) -> f64 {
    2.0 * ar * au + 4.0 * (ar * au * au + ar * ar * au) * dk + 16.0 * ar * ar * au * au * dk * dk
}

pub fn local_constants(liou: &KLocalLiouvillian, t0: f64, t1: f64) -> LocalConstants {
    let shape = liou.shape();
    let a = term_sup_norm_a(liou, t0, t1);
    let dk = shape.local_dim().pow(shape.locality() as u32);
    LocalConstants {
        interval: (t0, t1),
        jump_count_exceeds_dk: liou.max_jump_count() > dk,
        ..LocalConstants::from_a(a, shape.local_dim(), shape.locality())
    }
}

/// `c K² τ² e^{bτ/m} / m`
pub fn theorem1_bound(consts: &LocalConstants, k: usize, tau: f64, m: u64) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if !(tau >= 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be >= 0, got {tau}")));
    }
    let (k, m) = (k as f64, m as f64);
    Ok(consts.c * k * k * tau * tau * (consts.b_used * tau / m).exp() / m)
}

/// `(t − s)² e^{b(t−s)} c K` for splitting one term off a `K`-term step.
pub fn product_step_bound(consts: &LocalConstants, k: usize, s: f64, t: f64) -> f64 {
    let dt = t - s;
    dt * dt * (consts.b_used * dt).exp() * consts.c * k as f64
}

/// `⅓ b (t − s)²`
pub fn avg_liouvillian_bound(consts: &LocalConstants, s: f64, t: f64) -> f64 {
    let dt = t - s;
    consts.b_used * dt * dt / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneralBound {
    pub tight: f64,
    pub coarse: f64,
}

struct NormProfile {
    ops: Vec<(Schedule, f64)>,
}

impl NormProfile {
    fn new(lious: &[&KLocalLiouvillian]) -> Self {
        let ops = lious
            .iter()
            .flat_map(|l| l.terms())
            .flat_map(|term| term.operators())
            .map(|op| (op.schedule.clone(), op.operator.operator_norm()))
            .collect();
        NormProfile { ops }
    }

    fn at(&self, t: f64) -> f64 {
        self.ops.iter().map(|(f, n)| f.value_at(t).abs() * n).fold(0.0, f64::max)
    }

    fn sup(&self, s: f64, t: f64) -> f64 {
        self.ops.iter().map(|(f, n)| f.sup_abs(s, t) * n).fold(0.0, f64::max)
    }
}

/// Bound on `‖T_{K+L}(t, s) − T_K(t, s) T_L(t, s)‖` for a single-term `K`.
///
/// `tight = 2K_L ∫ₛᵗ∫ₛʳ c(a_r, a_u) du dr · exp(∫ₛᵗ b_v dv)` with the commutator
/// and generator norms replaced by their formula bounds and `a_t` the pointwise
/// operator-norm bound over both models; `coarse` replaces every integrand by
/// its supremum, giving `(t − s)² c K_L e^{(t−s) b}`.
pub fn general_trotter_bound(
    liou_k: &KLocalLiouvillian,
    liou_l: &KLocalLiouvillian,
    s: f64,
    t: f64,
    quadrature_nodes: usize,
) -> Result<GeneralBound> {
    if !(t >= s) {
        return Err(Error::InvalidArgument(format!("need t >= s, got s = {s}, t = {t}")));
    }
    if liou_k.shape() != liou_l.shape() {
        return Err(Error::DimensionMismatch { expected: liou_l.shape().dim(), actual: liou_k.shape().dim() });
    }
    if liou_k.nonzero_term_count() > 1 {
        return Err(Error::InvalidArgument("the split-off Liouvillian must be a single term".into()));
    }
    let k_l = liou_l.nonzero_term_count();
    if liou_k.nonzero_term_count() == 0 || k_l == 0 || t == s {
        return Ok(GeneralBound { tight: 0.0, coarse: 0.0 });
    }
    let shape = liou_l.shape();
    let dk = (shape.local_dim() as f64).powi(shape.locality() as i32);
    let profile = NormProfile::new(&[liou_k, liou_l]);

    let mut cuts = vec![s];
    cuts.extend(liou_k.breakpoints_in(s, t));
    cuts.extend(liou_l.breakpoints_in(s, t));
    cuts.push(t);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let smooth = GaussLegendre::new(quadrature_nodes.max(1));
    let flat = GaussLegendre::new(2);
    let rule = |a: f64, b: f64| {
        if liou_k.constant_on(a, b) && liou_l.constant_on(a, b) {
            &flat
        } else {
            &smooth
        }
    };
    // (node, weight, a at node) per segment
    let nodes: Vec<Vec<(f64, f64, f64)>> = cuts
        .windows(2)
        .map(|w| rule(w[0], w[1]).on(w[0], w[1]).map(|(x, wt)| (x, wt, profile.at(x))).collect())
        .collect();

    let mut double = 0.0;
    let mut exponent = 0.0;
    for (i, seg) in nodes.iter().enumerate() {
        for &(r, wr, ar) in seg {
            exponent += wr * b_formula(ar, dk);
            let mut inner = 0.0;
            for below in &nodes[..i] {
                inner += below.iter().map(|&(_, wu, au)| wu * c_formula(ar, au, dk)).sum::<f64>();
            }
            let lo = cuts[i];
            inner += rule(cuts[i], cuts[i + 1])
                .on(lo, r)
                .map(|(u, wu)| wu * c_formula(ar, profile.at(u), dk))
                .sum::<f64>();
            double += wr * inner;
        }
    }
    let k_l = k_l as f64;
    let tight = 2.0 * k_l * double * exponent.exp();

    let a_sup = profile.sup(s, t);
    let dt = t - s;
    let coarse = dt * dt * c_formula(a_sup, a_sup, dk) * k_l * (dt * b_formula(a_sup, dk)).exp();
    Ok(GeneralBound { tight, coarse })
}

/// `exp(K · ½ ∫ₛᵗ b_v dv)`, bounding `‖T⁻(t, s)‖_{1→1}` through
/// `‖L_v‖ ≤ Σ_Λ ‖L_{Λ,v}‖ ≤ K b_v / 2`.
pub fn backward_norm_bound(liou: &KLocalLiouvillian, s: f64, t: f64, quadrature_nodes: usize) -> Result<f64> {
    if !(t >= s) {
        return Err(Error::InvalidArgument(format!("need t >= s, got s = {s}, t = {t}")));
    }
    let shape = liou.shape();
    let dk = (shape.local_dim() as f64).powi(shape.locality() as i32);
    let profile = NormProfile::new(&[liou]);
    let rule = GaussLegendre::new(quadrature_nodes.max(1));
    let mut cuts = vec![s];
    cuts.extend(liou.breakpoints_in(s, t));
    cuts.push(t);
    let integral: f64 = cuts
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], |v| b_formula(profile.at(v), dk)))
        .sum();
    Ok((liou.nonzero_term_count() as f64 * 0.5 * integral).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepSpec {
    Steps(u64),
    Epsilon(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub constants: LocalConstants,
    #[serde(rename = "K")]
    pub k: usize,
    pub tau: f64,
    pub m: u64,
    pub epsilon: Option<f64>,
    pub theorem1_value: f64,
    pub per_step_product_value: f64,
    pub general_bound_value: Option<f64>,
    pub avg_step_value: f64,
    pub avg_total_value: f64,
    pub formulas: BTreeMap<&'static str, &'static str>,
    pub notes: Vec<String>,
}

fn formulas() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("a", "max over terms and operators of sup_t |f(t)| * ||X||_inf on [0, tau]"),
        ("b_lemma", "4a + 8 d^k a^2"),
        ("b_thm2", "2 a^2 (2 + 4 d^k)"),
        ("b_used", "max(b_lemma, b_thm2)"),
        ("c", "2a^2 + 8 a^3 d^k + 16 a^4 d^(2k)"),
        ("m", "ceil(max(2 c K^2 tau^2 / epsilon, tau b / ln 2)), or as given"),
        ("theorem1_value", "c K^2 tau^2 exp(b tau / m) / m"),
        (
            "per_step_product_value",
            "sum_j K * (tau/m)^2 exp(b_j tau/m) c_j K with constants from the sup over step j",
        ),
        (
            "general_bound_value",
            "sum over steps and sequential single-term splits of the tight quadrature bound",
        ),
        ("avg_step_value", "b (tau/m)^2 / 3"),
        ("avg_total_value", "K m b (tau/m)^2 / 3"),
    ])
}

/// Constants, step count and every bound for simulating `liou` up to `tau`.
pub fn full_report(liou: &KLocalLiouvillian, tau: f64, steps: StepSpec) -> Result<BoundReport> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("tau must be finite and >= 0, got {tau}")));
    }
    let constants = local_constants(liou, 0.0, tau);
    let k = liou.nonzero_term_count();
    let mut notes = Vec::new();
    if constants.jump_count_exceeds_dk {
        notes.push("a term has more than d^k jump operators; b and c assume at most d^k".into());
    }
    let (m, epsilon) = match steps {
        StepSpec::Steps(m) => {
            if m < 1 {
                return Err(Error::InvalidArgument("m must be at least 1".into()));
            }
            (m, None)
        }
        StepSpec::Epsilon(eps) => (step_count(constants.c, constants.b_used, k, tau, eps)?, Some(eps)),
    };
    if m == 0 {
        notes.push("no steps needed: tau = 0 or no nonzero terms".into());
        return Ok(BoundReport {
            constants,
            k,
            tau,
            m,
            epsilon,
            theorem1_value: 0.0,
            per_step_product_value: 0.0,
            general_bound_value: Some(0.0),
            avg_step_value: 0.0,
            avg_total_value: 0.0,
            formulas: formulas(),
            notes,
        });
    }
    let theorem1_value = theorem1_bound(&constants, k, tau, m)?;
    let dt = tau / m as f64;
    let step = |j: u64| (tau * (j - 1) as f64 / m as f64, tau * j as f64 / m as f64);

    let per_step_product_value = if m <= PER_STEP_LIMIT {
        (1..=m)
            .map(|j| {
                let (s, t) = step(j);
                k as f64 * product_step_bound(&local_constants(liou, s, t), k, s, t)
            })
            .sum()
    } else {
        notes.push(format!("m > {PER_STEP_LIMIT}: per-step sum uses the whole-horizon constants"));
        m as f64 * k as f64 * product_step_bound(&constants, k, 0.0, dt)
    };

    let order: Vec<usize> = liou
        .order()
        .iter()
        .copied()
        .filter(|&i| !liou.terms()[i].is_zero())
        .collect();
    let splits = k.saturating_sub(1) as u64;
    let general_bound_value = if m.saturating_mul(splits) <= GENERAL_BOUND_WORK_LIMIT {
        let mut total = 0.0;
        for j in 1..=m {
            let (s, t) = step(j);
            for i in 0..order.len().saturating_sub(1) {
                let head = liou.subset(&order[i..=i]);
                let rest = liou.subset(&order[i + 1..]);
                total += general_trotter_bound(&head, &rest, s, t, DEFAULT_QUADRATURE_NODES)?.tight;
            }
        }
        Some(total)
    } else {
        notes.push("general bound skipped: too many (step, split) pairs".into());
        None
    };

    let avg_step_value = avg_liouvillian_bound(&constants, 0.0, dt);
    Ok(BoundReport {
        constants,
        k,
        tau,
        m,
        epsilon,
        theorem1_value,
        per_step_product_value,
        general_bound_value,
        avg_step_value,
        avg_total_value: k as f64 * m as f64 * avg_step_value,
        formulas: formulas(),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::model::{LindbladTerm, LocalOperator, ScheduledOperator, SupportSet, SystemShape};

    fn consts(a: f64) -> LocalConstants {
        LocalConstants::from_a(a, 2, 1)
    }

    fn field(site: usize, label: &str, schedule: Schedule) -> LindbladTerm {
        let op = LocalOperator::pauli(SupportSet::single(site), label, ONE).unwrap();
        LindbladTerm::new(SupportSet::single(site), Some(ScheduledOperator::new(op, schedule)), vec![], 2).unwrap()
    }

    #[test]
    fn constants_examples() {
        let c1 = consts(1.0);
        assert_eq!((c1.b_lemma, c1.b_thm2, c1.b_used, c1.c), (20.0, 20.0, 20.0, 82.0));
        let c2 = consts(2.0);
        assert_eq!((c2.b_lemma, c2.b_thm2, c2.b_used, c2.c), (72.0, 80.0, 80.0, 1160.0));
        let c0 = consts(0.0);
        assert_eq!((c0.b_used, c0.c), (0.0, 0.0));
    }

    #[test]
    fn theorem1_examples() {
        let c = consts(1.0);
        assert_eq!(theorem1_bound(&c, 2, 0.0, 5).unwrap(), 0.0);
        let v = theorem1_bound(&c, 2, 0.1, 100).unwrap();
        assert!((v - 82.0 * 4.0 * 0.01 * 0.02f64.exp() / 100.0).abs() < 1e-16);
        assert!((v - 0.033462).abs() < 1e-6);
        let ratio = theorem1_bound(&c, 2, 0.1, 200).unwrap() / v;
        assert!((ratio - 0.5 * (-0.01f64).exp()).abs() < 1e-14);
        assert!(theorem1_bound(&c, 2, 0.1, 0).is_err());
    }

    #[test]
    fn product_and_average_examples() {
        let c = consts(1.0);
        assert_eq!(product_step_bound(&c, 1, 0.3, 0.3), 0.0);
        let v = product_step_bound(&c, 1, 0.0, 0.01);
        assert!((v - 1e-4 * 0.2f64.exp() * 82.0).abs() < 1e-15);
        assert!((product_step_bound(&c, 3, 0.0, 0.01) - 3.0 * v).abs() < 1e-15);
        assert_eq!(avg_liouvillian_bound(&c, 1.0, 1.0), 0.0);
        assert!((avg_liouvillian_bound(&c, 0.0, 0.01) - 6.6667e-4).abs() < 1e-8);
        assert!((avg_liouvillian_bound(&c, 0.0, 0.1) - 0.066667).abs() < 1e-6);
    }

    #[test]
    fn general_bound_constant_inputs_coincide() {
        let shape = SystemShape::new(2, 2, 1).unwrap();
        let k = KLocalLiouvillian::new(shape, vec![field(0, "X", Schedule::Constant(0.8))]).unwrap();
        let l = KLocalLiouvillian::new(
            shape,
            vec![field(0, "Z", Schedule::Constant(0.5)), field(1, "Y", Schedule::Constant(0.3))],
        )
        .unwrap();
        let g = general_trotter_bound(&k, &l, 0.2, 0.45, 32).unwrap();
        assert!(((g.tight - g.coarse) / g.coarse).abs() < 1e-12, "{g:?}");
        let empty = KLocalLiouvillian::empty(shape);
        assert_eq!(general_trotter_bound(&empty, &l, 0.0, 1.0, 8).unwrap().coarse, 0.0);
    }

    #[test]
    fn general_bound_tight_below_coarse_for_steps() {
        let shape = SystemShape::new(1, 2, 1).unwrap();
        let step = Schedule::piecewise_constant(vec![(0.0, 1.0), (0.5, 0.2)]).unwrap();
        let ramp = Schedule::linear(vec![(0.0, 0.0), (1.0, 1.5)]).unwrap();
        let k = KLocalLiouvillian::new(shape, vec![field(0, "X", step)]).unwrap();
        let l = KLocalLiouvillian::new(shape, vec![field(0, "Z", ramp)]).unwrap();
        let g = general_trotter_bound(&k, &l, 0.0, 1.0, 32).unwrap();
        assert!(g.tight > 0.0 && g.tight < g.coarse, "{g:?}");
    }

    #[test]
    fn zero_model_report() {
        let shape = SystemShape::new(2, 2, 1).unwrap();
        let r = full_report(&KLocalLiouvillian::empty(shape), 1.0, StepSpec::Epsilon(0.1)).unwrap();
        assert_eq!(r.m, 0);
        assert_eq!(r.theorem1_value, 0.0);
    }

    #[test]
    fn report_is_deterministic_and_consistent() {
        let shape = SystemShape::new(2, 2, 1).unwrap();
        let liou = KLocalLiouvillian::new(
            shape,
            vec![field(0, "X", Schedule::Constant(1.0)), field(1, "Z", Schedule::Constant(1.0))],
        )
        .unwrap();
        let a = full_report(&liou, 0.5, StepSpec::Epsilon(0.5)).unwrap();
        let b = full_report(&liou, 0.5, StepSpec::Epsilon(0.5)).unwrap();
        assert_eq!(a, b);
        assert!(a.theorem1_value <= 2.0 * 0.5);
        assert!(a.per_step_product_value <= a.theorem1_value * (1.0 + 1e-12));
    }
}
