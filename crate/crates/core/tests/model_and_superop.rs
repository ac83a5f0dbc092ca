mod common;

use dissim_core::linalg::{self, CMatrix, C64};
use dissim_core::model::{embed_local, evaluate_term, KLocalLiouvillian, Schedule, SystemShape};
use dissim_core::norms::{one_to_one_norm_hermitian, SearchBudget};
use dissim_core::quadrature::GaussLegendre;
use dissim_core::superop::{exact_propagator, inverse_propagator, liouvillian_matrix, DEFAULT_ODE_TOL};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn schedule_strategy() -> impl Strategy<Value = (bool, Vec<(f64, f64)>)> {
    (any::<bool>(), prop::collection::vec((0.01f64..0.5, -2.0f64..2.0), 1..6)).prop_map(|(linear, raw)| {
        let mut t = 0.0;
        let points = raw
            .into_iter()
            .map(|(gap, v)| {
                let p = (t, v);
                t += gap;
                p
            })
            .collect();
        (linear, points)
    })
}

fn build(linear: bool, points: Vec<(f64, f64)>) -> Schedule {
    if linear {
        Schedule::linear(points).unwrap()
    } else {
        Schedule::piecewise_constant(points).unwrap()
    }
}

/// Oracle: composite Gauss–Legendre on a fine uniform grid.
fn fine_integral(f: impl Fn(f64) -> f64, s: f64, t: f64) -> f64 {
    let rule = GaussLegendre::new(4);
    let n = 4000;
    let h = (t - s) / n as f64;
    (0..n).map(|i| rule.integrate(s + i as f64 * h, s + (i + 1) as f64 * h, &f)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schedule_integrals_match_quadrature((linear, points) in schedule_strategy(), s in 0.0f64..1.0, len in 0.05f64..1.5) {
        let f = build(linear, points);
        let t = s + len;
        let (first, second) = f.integrals(s, t);
        // kinks and jumps between grid nodes limit the oracle's accuracy
        let tol = if linear { 1e-6 } else { 2e-3 * len };
        prop_assert!((first - fine_integral(|x| f.value_at(x), s, t)).abs() <= tol);
        prop_assert!((second - fine_integral(|x| f.value_at(x).powi(2), s, t)).abs() <= 4.0 * tol);
    }

    #[test]
    fn sup_abs_dominates_samples((linear, points) in schedule_strategy(), s in 0.0f64..1.0, len in 0.0f64..1.5) {
        let f = build(linear, points);
        let t = s + len;
        let sup = f.sup_abs(s, t);
        for i in 0..=200 {
            let x = s + len * i as f64 / 200.0;
            prop_assert!(f.value_at(x).abs() <= sup + 1e-15);
        }
    }

    #[test]
    fn embedding_matches_kronecker_products(n in 2usize..5, first in 0usize..4, labels in "[IXYZ]{2}") {
        prop_assume!(first + 1 < n);
        let shape = SystemShape::new(n, 2, 2).unwrap();
        let op = common::pauli(&[first, first + 1], &labels, 0.7);
        let embedded = embed_local(&op, &shape).unwrap();
        let chars: Vec<char> = labels.chars().collect();
        let mut oracle = CMatrix::identity(1, 1);
        for site in 0..n {
            let factor = if site == first {
                linalg::pauli(chars[0]).unwrap()
            } else if site == first + 1 {
                linalg::pauli(chars[1]).unwrap()
            } else {
                linalg::identity(2)
            };
            oracle = linalg::kron(&oracle, &factor);
        }
        prop_assert!(linalg::max_abs(&(embedded - oracle * C64::new(0.7, 0.0))) < 1e-14);
    }
}

/// Oracle: apply `−i[H, ρ] + Σ (2LρL† − {L†L, ρ})` directly to matrices.
fn direct_action(liou: &KLocalLiouvillian, t: f64, rho: &CMatrix) -> CMatrix {
    let shape = liou.shape();
    let mut out = linalg::zeros(shape.dim());
    for term in liou.terms() {
        let layout = term.support().layout(shape);
        let (h, jumps) = evaluate_term(term, t, shape.local_dim());
        let h = layout.embed_operator(&h);
        out += (&h * rho - rho * &h) * C64::new(0.0, -1.0);
        for l in jumps {
            let l = layout.embed_operator(&l);
            let ldl = l.adjoint() * &l;
            out += &l * rho * l.adjoint() * C64::new(2.0, 0.0) - &ldl * rho - rho * &ldl;
        }
    }
    out
}

#[test]
fn liouvillian_matrix_matches_direct_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for model in common::suite() {
        let dim = model.liou.shape().dim();
        for t in [0.0, 0.4, 0.8] {
            let matrix = liouvillian_matrix(&model.liou, t).unwrap();
            let rho = common::random_matrix(&mut rng, dim);
            let diff = matrix.apply(&rho) - direct_action(&model.liou, t, &rho);
            assert!(linalg::max_abs(&diff) < 1e-12, "{}", model.name);
        }
    }
}

#[test]
fn exact_propagator_matches_fine_midpoint_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let liou = common::random_model(&mut rng, 2, 2, 1.0, &[0.0, 0.3]);
    let exact = exact_propagator(&liou, 0.1, 0.7, DEFAULT_ODE_TOL).unwrap().superop;
    let n = 6000;
    let h = 0.6 / n as f64;
    let mut oracle = linalg::identity(16);
    for i in 0..n {
        let mid = 0.1 + (i as f64 + 0.5) * h;
        oracle = linalg::expm(&(liouvillian_matrix(&liou, mid).unwrap().matrix() * C64::new(h, 0.0))) * oracle;
    }
    assert!(linalg::max_abs(&(exact.matrix() - oracle)) < 1e-6);
}

#[test]
fn inverse_propagator_inverts_for_linear_schedules() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut liou = common::random_single_term(&mut rng, 1, 1.0, &[0.0, 0.5]);
    // swap in linear schedules so the ODE path is exercised
    let shape = *liou.shape();
    let term = liou.terms()[0].clone();
    let ramp = Schedule::linear(vec![(0.0, 0.2), (1.0, 1.1)]).unwrap();
    let h = term.hamiltonian().unwrap().operator.clone();
    let l = term.jumps()[0].operator.clone();
    liou = KLocalLiouvillian::new(
        shape,
        vec![dissim_core::model::LindbladTerm::new(
            term.support().clone(),
            Some(dissim_core::model::ScheduledOperator::new(h, ramp.clone())),
            vec![dissim_core::model::ScheduledOperator::new(l, ramp)],
            2,
        )
        .unwrap()],
    )
    .unwrap();
    let forward = exact_propagator(&liou, 0.2, 0.9, 1e-11).unwrap().superop;
    let backward = inverse_propagator(&liou, 0.2, 0.9, 1e-11).unwrap().superop;
    let product = backward.compose(&forward);
    assert!(linalg::max_abs(&(product.matrix() - linalg::identity(4))) < 1e-7);
}

#[test]
fn propagators_compose_over_split_intervals() {
    for model in common::suite().into_iter().take(8) {
        let whole = exact_propagator(&model.liou, 0.0, model.tau, DEFAULT_ODE_TOL).unwrap().superop;
        let mid = 0.43 * model.tau;
        let first = exact_propagator(&model.liou, 0.0, mid, DEFAULT_ODE_TOL).unwrap().superop;
        let second = exact_propagator(&model.liou, mid, model.tau, DEFAULT_ODE_TOL).unwrap().superop;
        assert!(linalg::max_abs(&(second.compose(&first).matrix() - whole.matrix())) < 1e-12, "{}", model.name);
    }
}

#[test]
fn propagators_are_contractions() {
    let budget = SearchBudget::default().with_samples(500).with_restarts(4);
    for model in common::suite().into_iter().filter(|m| m.liou.shape().dim() <= 4) {
        let t = exact_propagator(&model.liou, 0.0, model.tau, DEFAULT_ODE_TOL).unwrap().superop;
        let est = one_to_one_norm_hermitian(&t, &budget, 1).unwrap();
        assert!((est.value - 1.0).abs() < 1e-9, "{}: {}", model.name, est.value);
    }
}
