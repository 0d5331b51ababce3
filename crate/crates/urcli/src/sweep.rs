//! Sweep verb: tabulate the conditional reverse relation over a (J, D, T) grid.

use crate::cli::SweepArgs;
use crate::rows::{eval_grid, grid3, with_pool, Probe};
use crate::textfmt::{flag, opt_real, real, tool_line};
use crate::{parse, write_output, CliError};
use std::fmt::Write as _;

/// Column order of every sweep row.
pub const COLUMNS: &str =
    "j,d,t,concurrence,gamma,l_value,w_value,u_value,u_tra,purity_marginal,valid";

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    let js = parse::parse_range("j", &args.j)?;
    let ds = parse::parse_range("d", &args.d)?;
    let ts = parse::parse_range("t", &args.t)?;
    if ts.iter().any(|&t| t <= 0.0) {
        return Err(CliError::Usage("--t: temperatures must be > 0".into()));
    }
    let probe = Probe::from_flags(
        &args.q,
        args.o.as_deref(),
        &args.bound,
        &args.m_mode,
        args.theta_grid,
    )?;
    let grid = grid3(&js, &ds, &ts);
    let rows = with_pool(args.workers, || eval_grid(&grid, &probe))?;

    let mut text = String::new();
    let _ = writeln!(text, "{}", tool_line("sweep"));
    let _ = writeln!(text, "# j={} d={} t={}", args.j, args.d, args.t);
    let _ = writeln!(text, "{}", probe.header_line(args.seed));
    let _ = writeln!(text, "# columns: {COLUMNS}");

    let mut min_slack = f64::INFINITY;
    let mut max_slack = f64::NEG_INFINITY;
    for (i, row) in rows.iter().enumerate() {
        let (j, d, t) = grid[i];
        let v = match row {
            Err(msg) => {
                return Err(CliError::Violation(format!(
                    "sweep aborted at row {i} (j={j}, d={d}, t={t}): {msg}; \
                     replay with `urcli state --j {j} --d {d} --t {t}`"
                )));
            }
            Ok(v) => v,
        };
        if !v.valid {
            return Err(CliError::Violation(format!(
                "reverse-relation invariant violated at row {i}: j={j} d={d} t={t} \
                 l_value={} w_value={} slack={}; \
                 replay with `urcli state --j {j} --d {d} --t {t}`",
                real(v.l_value),
                real(v.w_value),
                real(v.slack()),
            )));
        }
        min_slack = min_slack.min(v.slack());
        max_slack = max_slack.max(v.slack());
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{},{},{},{}",
            real(v.j),
            real(v.d),
            real(v.t),
            real(v.concurrence),
            real(v.gamma),
            real(v.l_value),
            real(v.w_value),
            opt_real(v.u_value),
            real(v.u_tra),
            real(v.purity_marginal),
            flag(v.valid),
        );
    }

    write_output(args.out.as_deref(), &text)?;
    let summary = format!(
        "sweep: rows={} min_slack={} max_slack={}",
        grid.len(),
        real(min_slack),
        real(max_slack)
    );
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}
