//! Audit verb: randomized stress test of the exact identities and bound
//! validity, with deterministic per-trial streams and order-independent
//! aggregation so reports are byte-identical across worker counts.
//!
//! Certified properties (identities and proven inequalities) gate the exit
//! code; uncertified diagnostics are reported as `info` lines. On failure the
//! lowest failing trial is regenerated from its stream and serialized as a
//! counterexample.

use crate::cli::AuditArgs;
use crate::rows::with_pool;
use crate::textfmt::{matrix_lines, real, tool_line};
use crate::{parse, write_output, CliError};
use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use urlab::bounds::{
    conditional_reverse_report, covariance_ratio_bound, phase_family_bound,
    projection_identity_residual, purity_bound, purity_bound_branch, variance_product_bound,
    BoundMode, MMode, ObservablePair, PhaseChoice, PhaseVector, PurityMode, SignBranch,
};
use urlab::matcore::ComplexMatrix;
use urlab::qmeas::{conditional_stats, Observable};
use urlab::qstate::{
    random_hermitian_with, random_state_with, stream_rng, BipartiteSplit, DensityMatrix,
};
use urlab::Error;

/// Random fixed phase vectors exercised per trial.
const FIXED_THETA_PER_TRIAL: usize = 8;

/// How a property's contributions fold and pass.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// worst = max contribution; pass when worst ≤ tol.
    Residual,
    /// worst = min contribution; pass when worst ≥ tol (tol is negative).
    Slack,
    /// Reported, never gated.
    Info,
}

struct PropDef {
    name: &'static str,
    kind: Kind,
    tol: f64,
}

const PROPS: &[PropDef] = &[
    PropDef { name: "total_expectation_identity", kind: Kind::Residual, tol: 1e-9 },
    PropDef { name: "total_variance_identity", kind: Kind::Residual, tol: 1e-9 },
    PropDef { name: "projection_identity", kind: Kind::Residual, tol: 1e-9 },
    PropDef { name: "product_bound_validity", kind: Kind::Slack, tol: -1e-9 },
    PropDef { name: "ratio_bound_validity", kind: Kind::Slack, tol: -1e-9 },
    PropDef { name: "purity_sqrt_validity", kind: Kind::Slack, tol: -1e-9 },
    PropDef { name: "purity_linear_validity", kind: Kind::Slack, tol: -1e-9 },
    PropDef { name: "purity_mode_order", kind: Kind::Residual, tol: 1e-9 },
    PropDef { name: "purity_cross_check", kind: Kind::Residual, tol: 1e-9 },
    PropDef { name: "phase_optimized_validity", kind: Kind::Slack, tol: -1e-9 },
    PropDef { name: "phase_fixed_validity", kind: Kind::Slack, tol: -1e-9 },
    PropDef { name: "phase_mean_identity", kind: Kind::Residual, tol: 1e-9 },
    PropDef { name: "conditional_reverse_validity", kind: Kind::Slack, tol: -1e-9 },
    PropDef { name: "conditional_equivalence", kind: Kind::Residual, tol: 1e-9 },
    PropDef { name: "overlap_saturation_gap", kind: Kind::Info, tol: f64::NAN },
];

const N_PROPS: usize = PROPS.len();

const P_TOTAL_MEAN: usize = 0;
const P_TOTAL_VAR: usize = 1;
const P_PROJECTION: usize = 2;
const P_PRODUCT: usize = 3;
const P_RATIO: usize = 4;
const P_PURITY_SQRT: usize = 5;
const P_PURITY_LINEAR: usize = 6;
const P_PURITY_ORDER: usize = 7;
const P_PURITY_CROSS: usize = 8;
const P_PHASE_OPT: usize = 9;
const P_PHASE_FIXED: usize = 10;
const P_PHASE_IDENTITY: usize = 11;
const P_CONDITIONAL: usize = 12;
const P_EQUIVALENCE: usize = 13;
const P_SATURATION: usize = 14;

/// One property's contribution from one trial.
#[derive(Clone, Default)]
struct Cell {
    value: Option<f64>,
    checks: u32,
    skips: u32,
    error: Option<String>,
}

struct TrialReport {
    cells: Vec<Cell>,
}

fn fold(kind: Kind, into: &mut Option<f64>, v: f64) {
    *into = Some(match (*into, kind) {
        (None, _) => v,
        (Some(old), Kind::Residual | Kind::Info) => old.max(v),
        (Some(old), Kind::Slack) => old.min(v),
    });
}

fn add(cells: &mut [Cell], prop: usize, v: f64) {
    let cell = &mut cells[prop];
    cell.checks += 1;
    fold(PROPS[prop].kind, &mut cell.value, v);
}

fn skip(cells: &mut [Cell], prop: usize) {
    cells[prop].skips += 1;
}

fn record_error(cells: &mut [Cell], prop: usize, e: &dyn std::fmt::Display) {
    let cell = &mut cells[prop];
    if cell.error.is_none() {
        cell.error = Some(e.to_string());
    }
}

/// Everything drawn for one trial, regenerable from (seed, index).
struct TrialInputs {
    split: BipartiteSplit,
    rank_ac: usize,
    rho_ac: DensityMatrix,
    /// Two (system, control) channels on the bipartite state.
    pairs: Vec<ObservablePair>,
    rank_f: usize,
    /// Unstructured state for the single-system bound checks.
    rho_f: DensityMatrix,
    /// Two observables on the unstructured state.
    ab: Vec<Observable>,
    /// Random fixed phase vectors (length 2 each).
    thetas: Vec<Vec<f64>>,
}

fn draw_inputs(seed: u64, index: usize, dims: &[BipartiteSplit]) -> Result<TrialInputs, String> {
    let text = |e: Error| e.to_string();
    let mut rng = stream_rng(seed, index as u64);
    let split = dims[index % dims.len()];
    let dim_ac = split.total();
    let rank_ac = rng.gen_range(1..=dim_ac);
    let rho_ac = random_state_with(&mut rng, dim_ac, rank_ac, Some(split)).map_err(text)?;
    let q1 = Observable::new("q1", random_hermitian_with(&mut rng, split.dim_a)).map_err(text)?;
    let o1 = Observable::new("o1", random_hermitian_with(&mut rng, split.dim_c)).map_err(text)?;
    let q2 = Observable::new("q2", random_hermitian_with(&mut rng, split.dim_a)).map_err(text)?;
    let o2 = Observable::new("o2", random_hermitian_with(&mut rng, split.dim_c)).map_err(text)?;
    let pairs = vec![
        ObservablePair { system: q1, control: o1 },
        ObservablePair { system: q2, control: o2 },
    ];
    let dim_f = if index.is_multiple_of(2) { 2 } else { 4 };
    let rank_f = rng.gen_range(1..=dim_f);
    let rho_f = random_state_with(&mut rng, dim_f, rank_f, None).map_err(text)?;
    let a = Observable::new("a", random_hermitian_with(&mut rng, dim_f)).map_err(text)?;
    let b = Observable::new("b", random_hermitian_with(&mut rng, dim_f)).map_err(text)?;
    let thetas = (0..FIXED_THETA_PER_TRIAL)
        .map(|_| (0..2).map(|_| rng.gen::<f64>() * TAU).collect())
        .collect();
    Ok(TrialInputs {
        split,
        rank_ac,
        rho_ac,
        pairs,
        rank_f,
        rho_f,
        ab: vec![a, b],
        thetas,
    })
}

fn run_trial(seed: u64, index: usize, dims: &[BipartiteSplit], theta_grid: usize) -> TrialReport {
    let mut cells = vec![Cell::default(); N_PROPS];
    let inputs = match draw_inputs(seed, index, dims) {
        Ok(i) => i,
        Err(e) => {
            cells[P_TOTAL_MEAN].error = Some(format!("input generation failed: {e}"));
            return TrialReport { cells };
        }
    };

    // Laws of total expectation and total variance on both channels.
    for pair in &inputs.pairs {
        match conditional_stats(&inputs.rho_ac, &pair.system, &pair.control) {
            Ok(cs) => {
                add(&mut cells, P_TOTAL_MEAN, cs.mean_residual);
                add(&mut cells, P_TOTAL_VAR, cs.variance_residual);
            }
            Err(e) => {
                record_error(&mut cells, P_TOTAL_MEAN, &e);
                record_error(&mut cells, P_TOTAL_VAR, &e);
            }
        }
    }

    let a = &inputs.ab[0];
    let b = &inputs.ab[1];
    let rho = &inputs.rho_f;

    // Exact projection identity behind the product bound.
    match projection_identity_residual(rho, a, b) {
        Ok(r) => add(&mut cells, P_PROJECTION, r),
        Err(Error::DegenerateReference { .. }) => skip(&mut cells, P_PROJECTION),
        Err(e) => record_error(&mut cells, P_PROJECTION, &e),
    }

    // Product lower bound on the variance product.
    match variance_product_bound(rho, a, b) {
        Ok(rep) => add(&mut cells, P_PRODUCT, rep.slack),
        Err(e) => record_error(&mut cells, P_PRODUCT, &e),
    }

    // Covariance-ratio upper bound, defined only away from its gates.
    match covariance_ratio_bound(rho, a, b) {
        Ok(rep) => add(&mut cells, P_RATIO, rep.slack),
        Err(Error::ZeroVariance { .. }) | Err(Error::SingularDenominator { .. }) => {
            skip(&mut cells, P_RATIO)
        }
        Err(e) => record_error(&mut cells, P_RATIO, &e),
    }

    // Purity bounds: minimizing-branch validity and the expectation cross-check.
    for (mode, prop) in [
        (PurityMode::Sqrt, P_PURITY_SQRT),
        (PurityMode::Linear, P_PURITY_LINEAR),
    ] {
        match purity_bound(rho, a, b, mode) {
            Ok(rep) => {
                add(&mut cells, prop, rep.slack);
                if let Some(r) = rep.cross_check_residual {
                    add(&mut cells, P_PURITY_CROSS, r);
                }
            }
            Err(e) => record_error(&mut cells, prop, &e),
        }
    }
    // Per-branch ordering: the sqrt flavor never exceeds the linear flavor.
    for branch in [SignBranch::Plus, SignBranch::Minus] {
        let s = purity_bound_branch(rho, a, b, PurityMode::Sqrt, branch);
        let l = purity_bound_branch(rho, a, b, PurityMode::Linear, branch);
        match (s, l) {
            (Ok(s), Ok(l)) => add(&mut cells, P_PURITY_ORDER, (s.bound - l.bound).max(0.0)),
            (Err(e), _) | (_, Err(e)) => record_error(&mut cells, P_PURITY_ORDER, &e),
        }
    }

    // Phase-family bound: optimized, then fixed random phases.
    match phase_family_bound(
        rho,
        &inputs.ab,
        &PhaseChoice::Optimize { grid: theta_grid },
        MMode::Zero,
    ) {
        Ok(rep) => {
            add(&mut cells, P_PHASE_OPT, rep.slack);
            if let Some(r) = rep.cross_check_residual {
                add(&mut cells, P_PHASE_IDENTITY, r);
            }
        }
        Err(e) => record_error(&mut cells, P_PHASE_OPT, &e),
    }
    for theta in &inputs.thetas {
        let choice = PhaseChoice::Fixed(PhaseVector::new(theta.clone()));
        match phase_family_bound(rho, &inputs.ab, &choice, MMode::Zero) {
            Ok(rep) => {
                add(&mut cells, P_PHASE_FIXED, rep.slack);
                if let Some(r) = rep.cross_check_residual {
                    add(&mut cells, P_PHASE_IDENTITY, r);
                }
            }
            Err(e) => record_error(&mut cells, P_PHASE_FIXED, &e),
        }
    }

    // Conditional reverse relation in all four bound modes.
    for mode in [
        BoundMode::SqrtPurity,
        BoundMode::LinearPurity,
        BoundMode::PhaseFamily,
        BoundMode::CovarianceRatio,
    ] {
        match conditional_reverse_report(
            &inputs.rho_ac,
            &inputs.pairs,
            mode,
            &PhaseChoice::Optimize { grid: theta_grid },
            MMode::Zero,
        ) {
            Ok(rep) => {
                add(&mut cells, P_CONDITIONAL, rep.report.slack);
                add(&mut cells, P_EQUIVALENCE, rep.equivalence_residual);
            }
            Err(Error::ZeroVariance { .. }) | Err(Error::SingularDenominator { .. }) => {
                skip(&mut cells, P_CONDITIONAL)
            }
            Err(e) => record_error(&mut cells, P_CONDITIONAL, &e),
        }
    }

    // Uncertified diagnostic: the experimental overlap term saturates the
    // phase-family bound up to round-off.
    let choice = PhaseChoice::Fixed(PhaseVector::new(inputs.thetas[0].clone()));
    match phase_family_bound(rho, &inputs.ab, &choice, MMode::Experimental) {
        Ok(rep) => add(&mut cells, P_SATURATION, (rep.bound - rep.lhs).abs()),
        Err(Error::NegativeRadicand { .. }) => skip(&mut cells, P_SATURATION),
        Err(e) => record_error(&mut cells, P_SATURATION, &e),
    }

    TrialReport { cells }
}

struct Agg {
    checks: u64,
    skips: u64,
    worst: Option<f64>,
    /// Lowest failing trial and what went wrong there.
    fail: Option<(usize, String)>,
}

fn violates(kind: Kind, tol: f64, v: f64) -> bool {
    match kind {
        Kind::Residual => v > tol,
        Kind::Slack => v < tol,
        Kind::Info => false,
    }
}

pub fn run(args: &AuditArgs) -> Result<(), CliError> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be ≥ 1".into()));
    }
    if args.theta_grid == 0 {
        return Err(CliError::Usage("--theta-grid must be ≥ 1".into()));
    }
    let dims = parse::parse_dims(&args.dims)?;

    let reports: Vec<TrialReport> = with_pool(args.workers, || {
        (0..args.trials)
            .into_par_iter()
            .map(|i| run_trial(args.seed, i, &dims, args.theta_grid))
            .collect()
    })?;

    let mut aggs: Vec<Agg> = (0..N_PROPS)
        .map(|_| Agg {
            checks: 0,
            skips: 0,
            worst: None,
            fail: None,
        })
        .collect();
    for (i, rep) in reports.iter().enumerate() {
        for (p, cell) in rep.cells.iter().enumerate() {
            let agg = &mut aggs[p];
            agg.checks += cell.checks as u64;
            agg.skips += cell.skips as u64;
            if let Some(v) = cell.value {
                fold(PROPS[p].kind, &mut agg.worst, v);
                if agg.fail.is_none() && violates(PROPS[p].kind, PROPS[p].tol, v) {
                    agg.fail = Some((i, format!("worst contribution {}", real(v))));
                }
            }
            if let Some(e) = &cell.error {
                if agg.fail.is_none() {
                    agg.fail = Some((i, e.clone()));
                }
            }
        }
    }

    // Overall failure: lowest trial index across properties, then table order.
    let mut overall: Option<(usize, usize)> = None; // (trial, prop)
    for (p, agg) in aggs.iter().enumerate() {
        if let Some((trial, _)) = agg.fail.as_ref() {
            let better = match overall {
                None => true,
                Some((best_trial, _)) => *trial < best_trial,
            };
            if better {
                overall = Some((*trial, p));
            }
        }
    }

    let mut text = String::new();
    let _ = writeln!(text, "{}", tool_line("audit"));
    let _ = writeln!(
        text,
        "# seed={} trials={} dims={} theta_grid={} fixed_thetas_per_trial={}",
        args.seed, args.trials, args.dims, args.theta_grid, FIXED_THETA_PER_TRIAL
    );
    let _ = writeln!(text, "# columns: property,kind,checks,skips,worst,threshold,pass");
    for (p, agg) in aggs.iter().enumerate() {
        let def = &PROPS[p];
        let kind = match def.kind {
            Kind::Residual => "residual",
            Kind::Slack => "slack",
            Kind::Info => "info",
        };
        let worst = agg.worst.map(real).unwrap_or_else(|| "NA".into());
        let threshold = match def.kind {
            Kind::Residual => "1e-9",
            Kind::Slack => "-1e-9",
            Kind::Info => "none",
        };
        let pass = match def.kind {
            Kind::Info => "info",
            _ if agg.fail.is_none() => "true",
            _ => "false",
        };
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{}",
            def.name, kind, agg.checks, agg.skips, worst, threshold, pass
        );
    }

    match overall {
        None => {
            let _ = writeln!(text, "# overall: PASS");
        }
        Some((trial, prop)) => {
            let detail = aggs[prop]
                .fail
                .as_ref()
                .map(|(_, d)| d.as_str())
                .unwrap_or("");
            let _ = writeln!(
                text,
                "# overall: FAIL property={} trial={} detail={}",
                PROPS[prop].name, trial, detail
            );
            append_counterexample(&mut text, args.seed, trial, &dims);
        }
    }

    write_output(args.out.as_deref(), &text)?;
    match overall {
        None => {
            if args.out.is_some() {
                println!("audit: PASS ({} trials, {} properties)", args.trials, N_PROPS);
            }
            Ok(())
        }
        Some((trial, prop)) => Err(CliError::Violation(format!(
            "audit failed: property {} at trial {trial}; counterexample serialized in the report",
            PROPS[prop].name
        ))),
    }
}

/// Regenerate the failing trial's inputs from its stream and serialize them.
fn append_counterexample(text: &mut String, seed: u64, trial: usize, dims: &[BipartiteSplit]) {
    let _ = writeln!(text, "# counterexample: trial={trial} seed={seed} stream={trial}");
    match draw_inputs(seed, trial, dims) {
        Err(e) => {
            let _ = writeln!(text, "# counterexample unavailable: {e}");
        }
        Ok(inputs) => {
            let _ = writeln!(
                text,
                "# split={}x{} rank={}",
                inputs.split.dim_a, inputs.split.dim_c, inputs.rank_ac
            );
            dump_matrix(text, "state_ac", inputs.rho_ac.mat());
            dump_matrix(text, "q1", inputs.pairs[0].system.mat());
            dump_matrix(text, "o1", inputs.pairs[0].control.mat());
            dump_matrix(text, "q2", inputs.pairs[1].system.mat());
            dump_matrix(text, "o2", inputs.pairs[1].control.mat());
            let _ = writeln!(text, "# full_state_rank={}", inputs.rank_f);
            dump_matrix(text, "state_full", inputs.rho_f.mat());
            dump_matrix(text, "a", inputs.ab[0].mat());
            dump_matrix(text, "b", inputs.ab[1].mat());
            for (k, th) in inputs.thetas.iter().enumerate() {
                let vals: Vec<String> = th.iter().map(|&x| real(x)).collect();
                let _ = writeln!(text, "# theta_{k}={}", vals.join(","));
            }
        }
    }
}

fn dump_matrix(text: &mut String, name: &str, m: &ComplexMatrix) {
    let _ = writeln!(text, "# {name} dim={} (rows of re,im pairs)", m.dim());
    for line in matrix_lines(m) {
        let _ = writeln!(text, "{line}");
    }
}
