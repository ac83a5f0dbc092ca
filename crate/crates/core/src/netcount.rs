//! ε-net cardinality bounds and the gap between the channel-circuit census and
//! the number of distinguishable states. Everything is kept in log₂ form; for
//! dimensions beyond binary64 range the doubly logarithmic fields stay finite.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::bounds::LocalConstants;
use crate::dilation::{census, CensusInputs, CensusReport};
use crate::{Error, Result};

/// Up to this dimension the Γ ratio is evaluated as an exact finite product.
const GAMMA_PRODUCT_LIMIT: u64 = 4096;

/// Hilbert-space dimension `D`, stored as `log₂ D` so that `D = d^N` with
/// very large `N` is representable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetDim {
    pub log2_dim: f64,
    /// `D` itself when it fits in a `u64`.
    pub dim: Option<u64>,
}

impl NetDim {
    pub fn exact(dim: u64) -> Self {
        NetDim { log2_dim: (dim as f64).log2(), dim: Some(dim) }
    }

    pub fn tensor(d: u32, n: u64) -> Self {
        let dim = u32::try_from(n).ok().and_then(|n| (d as u64).checked_pow(n));
        NetDim { log2_dim: n as f64 * (d as f64).log2(), dim }
    }

    fn value(&self) -> f64 {
        self.dim.map_or(self.log2_dim.exp2(), |d| d as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetBounds {
    pub dim: NetDim,
    pub epsilon: f64,
    /// `log₂ (5/(2ε))^{2D}`: HS-net of pure state vectors.
    pub log2_upper_hs: f64,
    /// `log₂ (5/ε)^{2D}`: trace-norm net of projectors.
    pub log2_upper_p_1norm: f64,
    /// `log₂ [2√π Γ(D+½)/Γ(D) (1/ε)^{2D−1}]`, valid for `D ≥ 3`.
    pub log2_lower_hs: Option<f64>,
    /// Lower HS bound at `4ε` minus `log₂⌈1/ε²⌉`, valid for `D ≥ 3`.
    pub log2_lower_s_1norm: Option<f64>,
    /// `(2D − 3) log₂(1/(4ε))`, the leading form of the previous field.
    pub log2_lower_s_omega: Option<f64>,
    pub log2_log2_upper_hs: f64,
    pub log2_log2_lower_s_1norm: Option<f64>,
    pub lower_valid: bool,
}

/// `ln Γ(x + ½) − ln Γ(x)` for integer `x ≥ 1`, given `log₂ x`.
fn ln_gamma_half_ratio(dim: NetDim) -> f64 {
    match dim.dim {
        Some(n) if n <= GAMMA_PRODUCT_LIMIT => {
            // Γ(n+½)/Γ(n) = √π (n − ½) Π_{j<n} (j − ½)/j
            let mut ratio = PI.sqrt() * (n as f64 - 0.5);
            for j in 1..n {
                let j = j as f64;
                ratio *= (j - 0.5) / j;
            }
            ratio.ln()
        }
        _ => {
            let ln_x = dim.log2_dim * LN_2;
            let x = dim.value();
            0.5 * ln_x - 1.0 / (8.0 * x) + 1.0 / (192.0 * x * x * x)
        }
    }
}

/// `log₂` of `2√π Γ(D+½)/Γ(D)`.
fn log2_sphere_prefactor(dim: NetDim) -> f64 {
    (2.0 * PI.sqrt()).log2() + ln_gamma_half_ratio(dim) / LN_2
}

/// `log₂ (p·D + q)` for possibly astronomically large `D`.
fn log2_affine_dim(dim: NetDim, p: f64, q: f64) -> f64 {
    let v = p * dim.value() + q;
    if v.is_finite() {
        v.log2()
    } else {
        p.log2() + dim.log2_dim
    }
}

/// `log₂ (u · x + w)` with `log₂ x` given and `u > 0`, where `x·u` may overflow.
fn log2_of_scaled(log2_x: f64, u: f64, w: f64) -> f64 {
    let v = log2_x.exp2() * u + w;
    if v.is_finite() {
        v.log2()
    } else {
        log2_x + u.log2()
    }
}

fn lower_hs(dim: NetDim, epsilon: f64) -> f64 {
    log2_sphere_prefactor(dim) + (2.0 * dim.value() - 1.0) * (1.0 / epsilon).log2()
}

pub fn net_bounds(dim: NetDim, epsilon: f64) -> Result<NetBounds> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(dim.log2_dim >= 1.0) {
        return Err(Error::InvalidArgument("net bounds need D >= 2".into()));
    }
    let d = dim.value();
    let lower_valid = dim.dim.is_none_or(|n| n >= 3);
    let per_dim_hs = (5.0 / (2.0 * epsilon)).log2();
    let log2_upper_hs = 2.0 * d * per_dim_hs;
    let log2_lower_s_1norm = lower_valid
        .then(|| lower_hs(dim, 4.0 * epsilon) - (1.0 / (epsilon * epsilon)).ceil().log2());
    let log2_log2_lower_s_1norm = lower_valid.then(|| {
        // dominant part (2D − 1) log₂(1/(4ε)) plus the O(log D) remainder
        let slope = (1.0 / (4.0 * epsilon)).log2();
        let rest = log2_sphere_prefactor(dim) - (1.0 / (epsilon * epsilon)).ceil().log2() - slope;
        log2_of_scaled(dim.log2_dim, 2.0 * slope, rest)
    });
    Ok(NetBounds {
        dim,
        epsilon,
        log2_upper_hs,
        log2_upper_p_1norm: 2.0 * d * (5.0 / epsilon).log2(),
        log2_lower_hs: lower_valid.then(|| lower_hs(dim, epsilon)),
        log2_lower_s_1norm,
        log2_lower_s_omega: lower_valid.then(|| (2.0 * d - 3.0) * (1.0 / (4.0 * epsilon)).log2()),
        log2_log2_upper_hs: log2_affine_dim(dim, 2.0, 0.0) + per_dim_hs.log2(),
        log2_log2_lower_s_1norm,
        lower_valid,
    })
}

/// Census of channel circuits against the lower bound on distinguishable
/// states for one system size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReachabilityRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub tau: f64,
    #[serde(rename = "log2_N_T")]
    pub log2_n_t: f64,
    pub log2_lower_s_1norm: Option<f64>,
    /// `log2_N_T − log2_lower_S`; negative means some states are unreachable.
    pub gap: Option<f64>,
    pub flagged: bool,
}

/// Census defaults not fixed by the system: Solovay–Kitaev constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CensusConstants {
    pub c_sk: f64,
    pub alpha: f64,
    pub n_sk: f64,
}

impl Default for CensusConstants {
    fn default() -> Self {
        CensusConstants { c_sk: 1.0, alpha: 4.0, n_sk: 3.0 }
    }
}

/// Census inputs for a total error `ε`, split as `ε₁ = ε/2`, `ε₂ = ε/4`, with
/// `c` evaluated at `a = 1`.
pub fn census_inputs_for(n: u64, k: u32, d: u32, tau: f64, epsilon: f64, sk: CensusConstants) -> CensusInputs {
    let c = LocalConstants::from_a(1.0, d as usize, k as usize).c;
    CensusInputs {
        c_sk: sk.c_sk,
        alpha: sk.alpha,
        n_sk: sk.n_sk,
        ..CensusInputs::new(n, k, d, tau, epsilon / 2.0, epsilon / 4.0, c)
    }
}

pub fn reachability_gap(
    n: u64,
    k: u32,
    d: u32,
    tau: f64,
    epsilon: f64,
    sk: CensusConstants,
) -> Result<(ReachabilityRow, CensusReport, NetBounds)> {
    let report = census(&census_inputs_for(n, k, d, tau, epsilon, sk))?;
    let nets = net_bounds(NetDim::tensor(d, n), epsilon)?;
    let gap = nets.log2_lower_s_1norm.map(|lower| report.log2_n_t_upper - lower);
    let row = ReachabilityRow {
        n,
        tau,
        log2_n_t: report.log2_n_t_upper,
        log2_lower_s_1norm: nets.log2_lower_s_1norm,
        gap,
        flagged: !nets.lower_valid,
    };
    Ok((row, report, nets))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverScan {
    pub rows: Vec<ReachabilityRow>,
    /// Smallest scanned `N` from which the gap stays negative.
    pub crossover: Option<u64>,
    /// The gap turned negative and later positive again.
    pub re_crossing: bool,
}

/// Scans `N` over `range` with `τ = tau_of(N)`.
pub fn crossover_scan(
    range: impl IntoIterator<Item = u64>,
    k: u32,
    d: u32,
    tau_of: impl Fn(u64) -> f64,
    epsilon: f64,
    sk: CensusConstants,
) -> Result<CrossoverScan> {
    let mut rows = Vec::new();
    for n in range {
        if (n as usize) < k as usize {
            continue;
        }
        rows.push(reachability_gap(n, k, d, tau_of(n), epsilon, sk)?.0);
    }
    let negative: Vec<bool> = rows.iter().map(|r| r.gap.is_some_and(|g| g < 0.0)).collect();
    let first = negative.iter().position(|&x| x);
    let re_crossing = first.is_some_and(|i| negative[i..].iter().any(|&x| !x));
    let crossover = first.filter(|_| !re_crossing).map(|i| rows[i].n);
    Ok(CrossoverScan { rows, crossover, re_crossing })
}
