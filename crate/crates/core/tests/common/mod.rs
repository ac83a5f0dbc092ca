//! Model suite and random generators shared by the integration tests.
#![allow(dead_code)]

use dissim_core::linalg::{self, CMatrix, CVector, C64};
use dissim_core::model::{
    DensityMatrix, KLocalLiouvillian, LindbladTerm, LocalOperator, Schedule, ScheduledOperator,
    SupportSet, SystemShape,
};
use dissim_core::superop::SuperOperatorMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub struct SuiteModel {
    pub name: &'static str,
    pub liou: KLocalLiouvillian,
    pub tau: f64,
}

pub fn pauli(sites: &[usize], label: &str, coeff: f64) -> LocalOperator {
    LocalOperator::pauli(SupportSet::new(sites.to_vec()).unwrap(), label, C64::new(coeff, 0.0)).unwrap()
}

fn constant() -> Schedule {
    Schedule::Constant(1.0)
}

fn steps(points: &[(f64, f64)]) -> Schedule {
    Schedule::piecewise_constant(points.to_vec()).unwrap()
}

/// One term: optional Hamiltonian and jump operators, all Pauli labels.
pub fn term(
    sites: &[usize],
    hamiltonian: Option<(&str, f64, Schedule)>,
    jumps: Vec<(&str, f64, Schedule)>,
) -> LindbladTerm {
    let support = SupportSet::new(sites.to_vec()).unwrap();
    let h = hamiltonian.map(|(label, c, f)| ScheduledOperator::new(pauli(sites, label, c), f));
    let jumps = jumps
        .into_iter()
        .map(|(label, c, f)| ScheduledOperator::new(pauli(sites, label, c), f))
        .collect();
    LindbladTerm::new(support, h, jumps, 2).unwrap()
}

fn hamiltonian(sites: &[usize], label: &str, c: f64, f: Schedule) -> LindbladTerm {
    term(sites, Some((label, c, f)), vec![])
}

fn jump(sites: &[usize], label: &str, c: f64, f: Schedule) -> LindbladTerm {
    term(sites, None, vec![(label, c, f)])
}

fn model(name: &'static str, n: usize, k: usize, tau: f64, terms: Vec<LindbladTerm>) -> SuiteModel {
    let shape = SystemShape::new(n, 2, k).unwrap();
    SuiteModel { name, liou: KLocalLiouvillian::new(shape, terms).unwrap(), tau }
}

/// Fixed suite: 1–3 qubits, k ∈ {1, 2}, a ≤ 2, constant and piecewise-constant schedules.
pub fn suite() -> Vec<SuiteModel> {
    let pulse = || steps(&[(0.0, 1.0), (0.37, 0.4), (0.71, 1.3)]);
    let ramp = || steps(&[(0.0, 0.2), (0.25, 0.6), (0.5, 1.0), (0.75, 1.4)]);
    let gate = || steps(&[(0.0, 0.0), (0.3, 1.0)]);
    vec![
        model("damping+field", 1, 1, 1.0, vec![jump(&[0], "-", 1.0, constant()), hamiltonian(&[0], "X", 1.0, constant())]),
        model("dephasing+field", 1, 1, 1.0, vec![jump(&[0], "Z", 0.7, constant()), hamiltonian(&[0], "X", 1.0, constant())]),
        model("damping+pulsed-field", 1, 1, 1.0, vec![jump(&[0], "-", 1.0, constant()), hamiltonian(&[0], "X", 1.0, pulse())]),
        model("bitflip+z-field", 1, 1, 0.8, vec![hamiltonian(&[0], "Z", 1.5, constant()), jump(&[0], "X", 0.5, ramp())]),
        model("xyz-fields+damping", 1, 1, 1.0, vec![
            hamiltonian(&[0], "X", 1.0, constant()),
            hamiltonian(&[0], "Y", 0.6, pulse()),
            jump(&[0], "-", 0.8, constant()),
        ]),
        model("strong-field", 1, 1, 0.5, vec![hamiltonian(&[0], "X", 2.0, constant()), jump(&[0], "-", 1.0, constant())]),
        model("two-site-local", 2, 1, 1.0, vec![
            hamiltonian(&[0], "X", 1.0, constant()),
            jump(&[0], "-", 1.0, constant()),
            hamiltonian(&[1], "Y", 0.8, constant()),
        ]),
        model("ising-pair", 2, 2, 1.0, vec![
            hamiltonian(&[0, 1], "ZZ", 1.0, constant()),
            hamiltonian(&[0], "X", 1.0, constant()),
            hamiltonian(&[1], "X", 0.5, constant()),
        ]),
        model("hopping+damping", 2, 2, 1.0, vec![
            hamiltonian(&[0, 1], "XX", 1.0, constant()),
            hamiltonian(&[0, 1], "YY", 1.0, constant()),
            jump(&[0], "-", 0.7, constant()),
            jump(&[1], "-", 0.7, constant()),
        ]),
        model("pulsed-ising", 2, 2, 1.0, vec![
            hamiltonian(&[0, 1], "ZZ", 1.2, pulse()),
            hamiltonian(&[0], "X", 1.0, ramp()),
        ]),
        model("pair-jump", 2, 2, 0.7, vec![
            jump(&[0, 1], "-+", 1.0, constant()),
            hamiltonian(&[0, 1], "XZ", 0.9, constant()),
        ]),
        model("mixed-site", 2, 1, 1.0, vec![
            jump(&[0], "Z", 1.0, gate()),
            hamiltonian(&[0], "X", 1.0, constant()),
            hamiltonian(&[1], "X", 1.0, constant()),
            jump(&[1], "-", 0.5, pulse()),
        ]),
        model("ising-chain", 3, 2, 0.6, vec![
            hamiltonian(&[0, 1], "ZZ", 1.0, constant()),
            hamiltonian(&[1, 2], "ZZ", 1.0, constant()),
            hamiltonian(&[0], "X", 1.0, constant()),
            hamiltonian(&[1], "X", 1.0, constant()),
            hamiltonian(&[2], "X", 1.0, constant()),
        ]),
        model("xy-chain+loss", 3, 2, 0.6, vec![
            hamiltonian(&[0, 1], "XX", 1.0, constant()),
            hamiltonian(&[1, 2], "YY", 1.0, constant()),
            jump(&[2], "-", 1.0, constant()),
        ]),
        model("three-site-local", 3, 1, 0.5, vec![
            hamiltonian(&[0], "X", 1.0, constant()),
            hamiltonian(&[1], "Y", 1.0, constant()),
            jump(&[1], "-", 1.0, constant()),
            jump(&[2], "Z", 0.6, constant()),
            hamiltonian(&[2], "X", 0.8, constant()),
        ]),
        model("pulsed-chain", 3, 2, 0.6, vec![
            hamiltonian(&[0, 1], "ZZ", 1.0, pulse()),
            hamiltonian(&[1, 2], "ZZ", 0.8, ramp()),
            hamiltonian(&[1], "X", 1.0, gate()),
        ]),
        model("strong-coupling", 2, 2, 0.4, vec![
            hamiltonian(&[0, 1], "XZ", 2.0, constant()),
            jump(&[1], "-", 1.0, constant()),
        ]),
        model("multi-jump-term", 2, 2, 0.8, vec![
            term(&[0, 1], Some(("ZZ", 0.5, constant())), vec![("-I", 1.0, constant()), ("I-", 0.6, pulse())]),
            hamiltonian(&[0], "X", 1.0, constant()),
        ]),
        model("gapped-loss", 3, 2, 0.5, vec![
            hamiltonian(&[0, 2], "ZZ", 1.0, constant()),
            jump(&[0], "-", 1.0, constant()),
            hamiltonian(&[0], "Y", 1.0, constant()),
            jump(&[2], "-", 0.8, gate()),
        ]),
        model("switching-field", 1, 1, 1.2, vec![
            hamiltonian(&[0], "Z", 1.0, steps(&[(0.0, 1.0), (0.2, -1.0), (0.45, 0.5), (0.9, -0.3)])),
            hamiltonian(&[0], "X", 1.0, steps(&[(0.0, 0.3), (0.6, 1.1)])),
            jump(&[0], "+", 0.5, constant()),
        ]),
        model("heisenberg-pair", 2, 2, 0.8, vec![
            hamiltonian(&[0, 1], "XX", 0.5, constant()),
            hamiltonian(&[0, 1], "YY", 0.5, constant()),
            hamiltonian(&[0, 1], "ZZ", 0.5, constant()),
            hamiltonian(&[0], "Z", 1.0, constant()),
            jump(&[1], "Z", 0.4, constant()),
        ]),
    ]
}

/// Models whose terms all commute (dephasing and diagonal couplings).
pub fn commuting_suite() -> Vec<SuiteModel> {
    vec![
        model("disjoint-dephasing", 2, 1, 1.0, vec![jump(&[0], "Z", 1.0, constant()), jump(&[1], "Z", 0.5, constant())]),
        model("diagonal-ising", 3, 2, 1.0, vec![
            hamiltonian(&[0, 1], "ZZ", 1.0, constant()),
            hamiltonian(&[1, 2], "ZZ", 0.7, constant()),
            hamiltonian(&[1], "Z", 1.0, constant()),
            jump(&[2], "Z", 0.5, constant()),
        ]),
        model("disjoint-pulsed", 2, 1, 1.0, vec![
            jump(&[0], "-", 1.0, steps(&[(0.0, 1.0), (0.33, 0.5)])),
            hamiltonian(&[1], "X", 1.0, steps(&[(0.0, 0.2), (0.61, 1.0)])),
        ]),
    ]
}

/// Single-term models (`K = 1`).
pub fn single_term_suite() -> Vec<SuiteModel> {
    vec![
        model("single-damping-field", 1, 1, 1.0, vec![term(&[0], Some(("X", 1.0, constant())), vec![("-", 1.0, constant())])]),
        model("single-pair", 2, 2, 0.9, vec![term(
            &[0, 1],
            Some(("XZ", 0.8, steps(&[(0.0, 1.0), (0.4, -0.5)]))),
            vec![("-+", 1.0, constant())],
        )]),
    ]
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| gaussian(rng))
}

/// Random matrix rescaled to operator norm `norm`.
pub fn random_operator(rng: &mut ChaCha8Rng, dim: usize, norm: f64, hermitian: bool) -> CMatrix {
    let mut m = random_matrix(rng, dim);
    if hermitian {
        m = linalg::hermitian_part(&m);
    }
    let scale = norm / linalg::spectral_norm(&m);
    m * C64::new(scale, 0.0)
}

pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let g = random_matrix(rng, dim);
    let rho = &g * g.adjoint();
    let tr = linalg::trace(&rho);
    DensityMatrix::new(rho / tr).unwrap()
}

pub fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> CVector {
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Random channel from a Haar-like isometry `D → D·r`.
pub fn random_channel(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> SuperOperatorMatrix {
    let g = CMatrix::from_fn(dim * rank, dim, |_, _| gaussian(rng));
    let v = g.qr().q();
    let n = dim * dim;
    let mut out = CMatrix::zeros(n, n);
    for mu in 0..rank {
        let k = CMatrix::from_fn(dim, dim, |a, i| v[(mu * dim + a, i)]);
        out += linalg::kron(&k.conjugate(), &k);
    }
    SuperOperatorMatrix::new(out).unwrap()
}

pub fn random_steps(rng: &mut ChaCha8Rng, times: &[f64]) -> Schedule {
    let points = times.iter().map(|&t| (t, rng.random_range(-1.0..1.0))).collect();
    Schedule::piecewise_constant(points).unwrap()
}

/// Single term on `n` qubits with random Hamiltonian and one random jump,
/// both operator norm ≤ `a`, and piecewise-constant schedules jumping at `times`.
pub fn random_single_term(rng: &mut ChaCha8Rng, n: usize, a: f64, times: &[f64]) -> KLocalLiouvillian {
    let dim = 1 << n;
    let sites: Vec<usize> = (0..n).collect();
    let support = SupportSet::new(sites).unwrap();
    let h = LocalOperator::hermitian(support.clone(), random_operator(rng, dim, a, true), 2).unwrap();
    let l = LocalOperator::new(support.clone(), random_operator(rng, dim, a, false), 2).unwrap();
    let term = LindbladTerm::new(
        support,
        Some(ScheduledOperator::new(h, random_steps(rng, times))),
        vec![ScheduledOperator::new(l, random_steps(rng, times))],
        2,
    )
    .unwrap();
    KLocalLiouvillian::new(SystemShape::new(n, 2, n).unwrap(), vec![term]).unwrap()
}

/// Random k-local model on `n` qubits: one random term per nearest-neighbour
/// pair (or per site when `k = 1`).
pub fn random_model(rng: &mut ChaCha8Rng, n: usize, k: usize, a: f64, times: &[f64]) -> KLocalLiouvillian {
    let mut terms = Vec::new();
    for first in 0..=(n - k) {
        let sites: Vec<usize> = (first..first + k).collect();
        let dim = 1 << k;
        let support = SupportSet::new(sites).unwrap();
        let h = LocalOperator::hermitian(support.clone(), random_operator(rng, dim, a, true), 2).unwrap();
        let l = LocalOperator::new(support.clone(), random_operator(rng, dim, a, false), 2).unwrap();
        terms.push(
            LindbladTerm::new(
                support,
                Some(ScheduledOperator::new(h, random_steps(rng, times))),
                vec![ScheduledOperator::new(l, random_steps(rng, times))],
                2,
            )
            .unwrap(),
        );
    }
    KLocalLiouvillian::new(SystemShape::new(n, 2, k).unwrap(), terms).unwrap()
}

pub fn damping_model(rate_coeff: f64) -> KLocalLiouvillian {
    model("damping", 1, 1, 1.0, vec![jump(&[0], "-", rate_coeff, constant())]).liou
}
