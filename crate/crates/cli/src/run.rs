//! Subcommand execution and artifact writing.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dissim_core::bounds::{avg_liouvillian_bound, full_report, local_constants, theorem1_bound};
use dissim_core::model::DensityMatrix;
use dissim_core::netcount::{net_bounds, reachability_gap, CensusConstants, NetDim};
use dissim_core::norms::{trace_distance, NormEstimate};
use dissim_core::superop::{exact_propagator, DEFAULT_ODE_TOL};
use dissim_core::trotter::{measured_trotter_error, trotter_evolve_observed, StepMode, TermOrdering, TrotterPlan};
use dissim_core::{linalg, CMatrix};
use serde::Serialize;

use crate::config::{to_toml, RunConfig};
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Simulate,
    Bounds,
    Verify,
    Census,
    Nets,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Bounds => "bounds",
            Command::Verify => "verify",
            Command::Census => "census",
            Command::Nets => "nets",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    schema_version: u32,
    command: &'static str,
    generator: String,
    seed: u64,
    inputs: &'a RunConfig,
    /// The normalized configuration as TOML, re-parseable as-is.
    inputs_toml: String,
    outputs: T,
    notes: Vec<String>,
}

fn write_report<T: Serialize>(
    dir: &Path,
    command: Command,
    config: &RunConfig,
    outputs: T,
    notes: Vec<String>,
) -> CliResult<PathBuf> {
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: command.name(),
        generator: format!("dissim {}", env!("CARGO_PKG_VERSION")),
        seed: config.seed,
        inputs: config,
        inputs_toml: to_toml(config),
        outputs,
        notes,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    let path = dir.join(format!("{}_report.json", command.name()));
    fs::write(&path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    Ok(path)
}

/// Fixed 17-significant-digit float formatting for CSV output.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn run(command: Command, config: &RunConfig, out_dir: &Path) -> CliResult<RunOutcome> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(format!("creating {}", out_dir.display()), e))?;
    match command {
        Command::Simulate => simulate(config, out_dir),
        Command::Bounds => bounds(config, out_dir),
        Command::Verify => verify(config, out_dir),
        Command::Census => census(config, out_dir),
        Command::Nets => nets(config, out_dir),
    }
}

fn expectation(observable: &CMatrix, rho: &CMatrix) -> f64 {
    linalg::trace(&(observable * rho)).re
}

#[derive(Serialize)]
struct SimulateOutputs {
    plan: TrotterPlan,
    rows_written: usize,
    final_time: f64,
    final_observables: Vec<(String, f64)>,
    max_trace_residual: f64,
    min_eigenvalue_spotcheck: Option<f64>,
    /// Trace distance between the Trotter state and the exact propagator's
    /// state at the final time, when the oracle is enabled.
    oracle_trace_distance: Option<f64>,
}

fn simulate(config: &RunConfig, dir: &Path) -> CliResult<RunOutcome> {
    let liou = config.liouvillian()?;
    let dim = liou.shape().dim();
    let plan = config.trotter_plan(&liou)?;
    let rho0 = config.initial_state(dim)?;
    let observables = config.observables(dim)?;
    let stride = config.outputs.stride;

    let mut csv = String::from("time");
    for (name, _) in &observables {
        csv.push(',');
        csv.push_str(name);
    }
    csv.push_str(",trace_residual,min_eig_spotcheck\n");
    let mut rows = 0;
    let mut final_observables = Vec::new();
    let (rho, log) = trotter_evolve_observed(&liou, &rho0, &plan, |record, rho| {
        let last = record.step == plan.m;
        if record.step % stride != 0 && !last {
            return;
        }
        csv.push_str(&fmt(record.time));
        let values: Vec<f64> = observables.iter().map(|(_, o)| expectation(o, rho)).collect();
        for v in &values {
            csv.push(',');
            csv.push_str(&fmt(*v));
        }
        let _ = write!(csv, ",{},", fmt(record.trace_residual));
        if let Some(e) = record.min_eigenvalue {
            csv.push_str(&fmt(e));
        }
        csv.push('\n');
        rows += 1;
        if last {
            final_observables = observables.iter().map(|(n, _)| n.clone()).zip(values).collect();
        }
    })?;

    let oracle_trace_distance = if config.verification.oracle {
        let exact = exact_propagator(&liou, 0.0, plan.tau, DEFAULT_ODE_TOL)?.superop;
        let reference = DensityMatrix::new(linalg::hermitian_part(&exact.apply(rho0.matrix())))?;
        // `+ 0.0` turns a negative zero into zero
        Some(trace_distance(&rho, &reference)? + 0.0)
    } else {
        None
    };

    let csv_path = dir.join(&config.outputs.trajectory);
    fs::write(&csv_path, csv).map_err(|e| CliError::io(format!("writing {}", csv_path.display()), e))?;
    let mut notes = liou.warnings();
    notes.push("observables are Re tr(O rho); min_eig_spotcheck is sampled every ceil(m/10) steps and at the end".into());
    let summary = format!(
        "simulate: m = {}, {rows} rows, max trace residual {:.3e}{}",
        plan.m,
        log.max_trace_residual(),
        oracle_trace_distance.map_or(String::new(), |d| format!(", trace distance to exact {d:.3e}"))
    );
    let outputs = SimulateOutputs {
        final_time: plan.tau,
        plan,
        rows_written: rows,
        final_observables,
        max_trace_residual: log.max_trace_residual(),
        min_eigenvalue_spotcheck: log.min_eigenvalue(),
        oracle_trace_distance,
    };
    let report = write_report(dir, Command::Simulate, config, outputs, notes)?;
    Ok(RunOutcome { exit_code: 0, files: vec![csv_path, report], summary })
}

fn bounds(config: &RunConfig, dir: &Path) -> CliResult<RunOutcome> {
    let liou = config.liouvillian()?;
    let report = full_report(&liou, config.plan.tau, config.step_spec())?;
    let summary = format!("bounds: K = {}, m = {}, step-count bound {:.6e}", report.k, report.m, report.theorem1_value);
    let notes = liou.warnings();
    let path = write_report(dir, Command::Bounds, config, report, notes)?;
    Ok(RunOutcome { exit_code: 0, files: vec![path], summary })
}

#[derive(Serialize)]
struct VerifyRow {
    m: u64,
    ordering: TermOrdering,
    step_mode: StepMode,
    measured: NormEstimate,
    bound: f64,
    holds: bool,
}

#[derive(Serialize)]
struct VerifyOutputs {
    rows: Vec<VerifyRow>,
    all_hold: bool,
}

fn verify(config: &RunConfig, dir: &Path) -> CliResult<RunOutcome> {
    if !config.verification.oracle {
        return Err(CliError::Usage("verify needs verification.oracle = true".into()));
    }
    let liou = config.liouvillian()?;
    let base = config.trotter_plan(&liou)?;
    let tau = base.tau;
    let consts = local_constants(&liou, 0.0, tau);
    let k = liou.nonzero_term_count();
    let budget = config.verification.budget();
    let ms = if config.verification.m_values.is_empty() { vec![base.m] } else { config.verification.m_values.clone() };
    let orderings: Vec<TermOrdering> = if config.verification.orderings.is_empty() {
        vec![base.ordering.clone()]
    } else {
        config.verification.orderings.iter().map(TermOrdering::from).collect()
    };

    let mut rows = Vec::new();
    let mut table = String::from("m,ordering,step_mode,measured,bound,holds\n");
    for &m in &ms {
        let mut bound = theorem1_bound(&consts, k, tau, m)?;
        if base.step_mode == StepMode::AverageLiouvillian {
            // replacing each local step by its averaged exponential adds at
            // most this much per term and step
            let plan = TrotterPlan::new(tau, m)?;
            bound += (1..=m)
                .map(|j| {
                    let (s, t) = plan.interval(j);
                    k as f64 * avg_liouvillian_bound(&local_constants(&liou, s, t), s, t)
                })
                .sum::<f64>();
        }
        for ordering in &orderings {
            let plan = TrotterPlan::new(tau, m)?.with_mode(base.step_mode).with_ordering(ordering.clone());
            let measured = measured_trotter_error(&liou, &plan, &budget, config.seed)?;
            let holds = measured.value <= bound;
            let _ = writeln!(
                table,
                "{m},{},{},{},{},{holds}",
                ordering_label(ordering),
                mode_label(base.step_mode),
                fmt(measured.value),
                fmt(bound)
            );
            rows.push(VerifyRow { m, ordering: ordering.clone(), step_mode: base.step_mode, measured, bound, holds });
        }
    }
    let all_hold = rows.iter().all(|r| r.holds);
    let exit_code = verify_exit_code(all_hold);
    let table_path = dir.join("verify_table.csv");
    fs::write(&table_path, table).map_err(|e| CliError::io(format!("writing {}", table_path.display()), e))?;
    let mut notes = liou.warnings();
    notes.push("measured values are lower-bound estimates of the Hermitian (1->1) norm unless kind = exact".into());
    if base.step_mode == StepMode::AverageLiouvillian {
        notes.push("bound includes the averaged-step allowance K * sum_j b_j (tau/m)^2 / 3".into());
    }
    let worst = rows.iter().map(|r| r.measured.value / r.bound).fold(0.0, f64::max);
    let summary = format!(
        "verify: {} case(s), {}; max measured/bound = {worst:.3e}",
        rows.len(),
        if all_hold { "all within bound" } else { "BOUND VIOLATED" }
    );
    let report = write_report(dir, Command::Verify, config, VerifyOutputs { rows, all_hold }, notes)?;
    Ok(RunOutcome { exit_code, files: vec![table_path, report], summary })
}

/// 0 when every measured error is within its bound, 3 otherwise.
pub fn verify_exit_code(all_hold: bool) -> i32 {
    if all_hold {
        0
    } else {
        3
    }
}

fn ordering_label(o: &TermOrdering) -> String {
    match o {
        TermOrdering::InputOrder => "input-order".into(),
        TermOrdering::Reversed => "reversed".into(),
        TermOrdering::Explicit(p) => p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" "),
    }
}

fn mode_label(m: StepMode) -> &'static str {
    match m {
        StepMode::ExactLocal => "exact-local",
        StepMode::AverageLiouvillian => "average-liouvillian",
    }
}

fn census(config: &RunConfig, dir: &Path) -> CliResult<RunOutcome> {
    let block = config.census.as_ref().ok_or_else(|| CliError::Usage("census needs a [census] block".into()))?;
    let inputs = config.census_inputs(block)?;
    let report = dissim_core::dilation::census(&inputs)?;
    let summary = format!(
        "census: m = {:e}, N_SK = {:e}, log2 N_T <= {:.6e}",
        report.m, report.n_sk_gates, report.log2_n_t_upper
    );
    let notes = vec!["all counts are upper bounds; log2_N_T_upper = N_All_gates * log2(n_SK)".into()];
    let path = write_report(dir, Command::Census, config, report, notes)?;
    Ok(RunOutcome { exit_code: 0, files: vec![path], summary })
}

#[derive(Serialize)]
struct NetsOutputs {
    model_dimension: dissim_core::netcount::NetBounds,
    reachability: Vec<ReachabilityEntry>,
}

#[derive(Serialize)]
struct ReachabilityEntry {
    row: dissim_core::netcount::ReachabilityRow,
    census: dissim_core::dilation::CensusReport,
    nets: dissim_core::netcount::NetBounds,
}

fn nets(config: &RunConfig, dir: &Path) -> CliResult<RunOutcome> {
    let block = config.nets.as_ref().ok_or_else(|| CliError::Usage("nets needs a [nets] block".into()))?;
    let shape = config.shape()?;
    let d = shape.local_dim() as u32;
    let k = shape.locality() as u32;
    let model_dimension = net_bounds(NetDim::tensor(d, shape.num_sites() as u64), block.epsilon)?;
    let sizes = if block.n.is_empty() { vec![shape.num_sites() as u64] } else { block.n.clone() };
    let tau = block.tau.unwrap_or(config.plan.tau);
    let sk = CensusConstants { c_sk: block.c_sk, alpha: block.alpha, n_sk: block.n_sk };
    let mut reachability = Vec::with_capacity(sizes.len());
    for n in sizes {
        let (row, census, nets) = reachability_gap(n, k, d, tau, block.epsilon, sk)?;
        reachability.push(ReachabilityEntry { row, census, nets });
    }
    let mut notes = vec![
        "reachability uses epsilon1 = epsilon/2, epsilon2 = epsilon/4 and c evaluated at a = 1".into(),
        "gap = log2_N_T - log2_lower_s_1norm; negative means some states are out of reach".into(),
    ];
    if !model_dimension.lower_valid {
        notes.push("lower net bounds need D >= 3 and are omitted for this dimension".into());
    }
    let negative = reachability.iter().filter(|r| r.row.gap.is_some_and(|g| g < 0.0)).count();
    let summary = format!("nets: {} reachability row(s), {negative} with negative gap", reachability.len());
    let path = write_report(dir, Command::Nets, config, NetsOutputs { model_dimension, reachability }, notes)?;
    Ok(RunOutcome { exit_code: 0, files: vec![path], summary })
}
