//! Figure verb: emit figure-ready tables with embedded provenance headers and
//! per-panel diagnostics (data collapse, tightness).
//!
//! Default grids and probes are artifact choices; every one can be overridden
//! with `--j/--d/--t/--q/--o/--bound`.

use crate::cli::FigureArgs;
use crate::rows::{eval_grid, grid3, with_pool, Probe, RowValues};
use crate::textfmt::{opt_real, real, tool_line};
use crate::{parse, CliError};
use std::fmt::Write as _;
use std::path::PathBuf;
use urlab::dmmodel::{concurrence_closed, mixedness_closed, DmParams};

/// Bins used for the data-collapse diagnostic.
pub const COLLAPSE_BINS: usize = 40;
/// Value ranges at or below this floor count as fully collapsed.
pub const COLLAPSE_RANGE_FLOOR: f64 = 1e-9;

/// Default probe for the collapse panels: eight Pauli correlation channels
/// (system, control), ordered so consecutive system observables anticommute.
/// Their explained variances sum to the squared Frobenius norm of the state's
/// Pauli correlation block.
pub const COLLAPSE_Q: &str = "sz,sx,sy,sx,sy,sz,sx,sy";
pub const COLLAPSE_O: &str = "sz,sx,sy,sy,sx,sx,sz,sz";

/// Data-collapse statistics of `values` binned by `keys`.
#[derive(Debug, Clone, Copy)]
pub struct Collapse {
    /// Largest max−min of values inside one key bin.
    pub spread: f64,
    /// Global max−min of the values.
    pub range: f64,
    /// spread / range, or 0 when the range is at or below the floor.
    pub ratio: f64,
}

/// Bin `values` by `keys` into `bins` equal-width bins and measure how close
/// the point set is to a single-valued function of the key.
pub fn collapse_stats(keys: &[f64], values: &[f64], bins: usize) -> Collapse {
    assert_eq!(keys.len(), values.len());
    if keys.is_empty() || bins == 0 {
        return Collapse { spread: 0.0, range: 0.0, ratio: 0.0 };
    }
    let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for (&k, &v) in keys.iter().zip(values) {
        kmin = kmin.min(k);
        kmax = kmax.max(k);
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    let range = vmax - vmin;
    let width = kmax - kmin;
    let mut lo = vec![f64::INFINITY; bins];
    let mut hi = vec![f64::NEG_INFINITY; bins];
    for (&k, &v) in keys.iter().zip(values) {
        let idx = if width <= 0.0 {
            0
        } else {
            ((((k - kmin) / width) * bins as f64) as usize).min(bins - 1)
        };
        lo[idx] = lo[idx].min(v);
        hi[idx] = hi[idx].max(v);
    }
    let spread = lo
        .iter()
        .zip(&hi)
        .filter(|(l, _)| l.is_finite())
        .map(|(l, h)| h - l)
        .fold(0.0, f64::max);
    let ratio = if range <= COLLAPSE_RANGE_FLOOR {
        0.0
    } else {
        spread / range
    };
    Collapse { spread, range, ratio }
}

struct Ranges {
    js: Vec<f64>,
    ds: Vec<f64>,
    ts: Vec<f64>,
    j_text: String,
    d_text: String,
    t_text: String,
}

fn resolve_ranges(
    args: &FigureArgs,
    j_def: &str,
    d_def: &str,
    t_def: &str,
) -> Result<Ranges, CliError> {
    let j_text = args.j.clone().unwrap_or_else(|| j_def.to_string());
    let d_text = args.d.clone().unwrap_or_else(|| d_def.to_string());
    let t_text = args.t.clone().unwrap_or_else(|| t_def.to_string());
    let js = parse::parse_range("j", &j_text)?;
    let ds = parse::parse_range("d", &d_text)?;
    let ts = parse::parse_range("t", &t_text)?;
    if ts.iter().any(|&t| t <= 0.0) {
        return Err(CliError::Usage("--t: temperatures must be > 0".into()));
    }
    Ok(Ranges { js, ds, ts, j_text, d_text, t_text })
}

fn resolve_probe(
    args: &FigureArgs,
    q_def: &str,
    o_def: Option<&str>,
    bound_def: &str,
) -> Result<Probe, CliError> {
    let q = args.q.clone().unwrap_or_else(|| q_def.to_string());
    // A user-supplied --q without --o keeps the "control mirrors system"
    // default rather than the figure's stock control list.
    let o = match (&args.q, &args.o) {
        (_, Some(o)) => Some(o.clone()),
        (Some(_), None) => None,
        (None, None) => o_def.map(String::from),
    };
    let bound = args
        .bound
        .clone()
        .unwrap_or_else(|| bound_def.to_string());
    Probe::from_flags(&q, o.as_deref(), &bound, &args.m_mode, args.theta_grid)
}

#[allow(clippy::too_many_arguments)]
fn push_headers(
    text: &mut String,
    fig: u8,
    panel: &str,
    r: &Ranges,
    probe: Option<&Probe>,
    seed: u64,
    extra: &[String],
    columns: &str,
) {
    let _ = writeln!(text, "{}", tool_line("figure"));
    let _ = writeln!(text, "# fig={fig} panel={panel}");
    let _ = writeln!(text, "# j={} d={} t={}", r.j_text, r.d_text, r.t_text);
    if let Some(p) = probe {
        let _ = writeln!(text, "{}", p.header_line(seed));
    }
    for line in extra {
        let _ = writeln!(text, "# {line}");
    }
    let _ = writeln!(text, "# columns: {columns}");
}

fn write_file(out: &std::path::Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    let path = out.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Evaluate a grid and enforce the row invariant, turning any failure into a
/// counterexample report.
fn eval_rows(grid: &[(f64, f64, f64)], probe: &Probe) -> Result<Vec<RowValues>, CliError> {
    let results = eval_grid(grid, probe);
    let mut rows = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        let (j, d, t) = grid[i];
        match r {
            Err(msg) => {
                return Err(CliError::Violation(format!(
                    "figure aborted at (j={j}, d={d}, t={t}): {msg}; \
                     replay with `urcli state --j {j} --d {d} --t {t}`"
                )))
            }
            Ok(v) if !v.valid => {
                return Err(CliError::Violation(format!(
                    "reverse-relation invariant violated at (j={j}, d={d}, t={t}): \
                     l_value={} w_value={}; replay with `urcli state --j {j} --d {d} --t {t}`",
                    real(v.l_value),
                    real(v.w_value),
                )))
            }
            Ok(v) => rows.push(v),
        }
    }
    Ok(rows)
}

fn tightness_line(rows: &[RowValues]) -> String {
    let mut max_dev: Option<f64> = None;
    let mut undefined = 0usize;
    for v in rows {
        match v.u_value {
            Some(u) => {
                let dev = (u - 1.0).abs();
                max_dev = Some(max_dev.map_or(dev, |m| m.max(dev)));
            }
            None => undefined += 1,
        }
    }
    format!(
        "tightness: max_abs_u_minus_one={} undefined_u_rows={}",
        max_dev.map(real).unwrap_or_else(|| "NA".into()),
        undefined
    )
}

pub fn run(args: &FigureArgs) -> Result<(), CliError> {
    if !(2..=9).contains(&args.fig) {
        return Err(CliError::Usage(format!(
            "--fig: {} is not in 2..=9",
            args.fig
        )));
    }
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;
    let written = with_pool(args.workers, || emit(args))??;
    for (path, rows) in &written {
        println!("wrote {} ({} rows)", path.display(), rows);
    }
    Ok(())
}

fn emit(args: &FigureArgs) -> Result<Vec<(PathBuf, usize)>, CliError> {
    match args.fig {
        2 => fig_closed_maps(args),
        3 | 5 | 8 => fig_line(args),
        4 => fig_bound_map(args),
        6 | 9 => fig_collapse(args),
        7 => fig_tightness_map(args),
        _ => unreachable!("validated in run"),
    }
}

/// Closed-form concurrence and mixedness maps over (J, D) at each temperature.
fn fig_closed_maps(args: &FigureArgs) -> Result<Vec<(PathBuf, usize)>, CliError> {
    let r = resolve_ranges(args, "-2:2:41", "0:3:31", "0.5,1")?;
    type Closed = fn(&DmParams) -> f64;
    let panels: [(&str, Closed); 2] = [
        ("concurrence", concurrence_closed),
        ("gamma", mixedness_closed),
    ];
    let mut written = Vec::new();
    for &t in &r.ts {
        for (value_name, f) in panels {
            let mut text = String::new();
            push_headers(
                &mut text,
                2,
                &format!("{value_name}_t{t}"),
                &r,
                None,
                args.seed,
                &[],
                &format!("j,d,{value_name}"),
            );
            let mut rows = 0usize;
            for &j in &r.js {
                for &d in &r.ds {
                    let p = DmParams::new(j, d, t)
                        .map_err(|e| CliError::Usage(format!("model parameters: {e}")))?;
                    let _ = writeln!(text, "{},{},{}", real(j), real(d), real(f(&p)));
                    rows += 1;
                }
            }
            let path = write_file(&args.out, &format!("fig2_{value_name}_t{t}.csv"), &text)?;
            written.push((path, rows));
        }
    }
    Ok(written)
}

/// Temperature lines at a single (J, D) point: figs 3, 5, 8.
fn fig_line(args: &FigureArgs) -> Result<Vec<(PathBuf, usize)>, CliError> {
    let fig = args.fig;
    let r = resolve_ranges(args, "1", "1", "0.2:5:50")?;
    if r.js.len() != 1 || r.ds.len() != 1 {
        return Err(CliError::Usage(format!(
            "fig{fig} uses a single --j and --d value"
        )));
    }
    let probe = resolve_probe(args, "sx,sz", None, "eq10")?;
    let (j, d) = (r.js[0], r.ds[0]);
    let grid: Vec<(f64, f64, f64)> = r.ts.iter().map(|&t| (j, d, t)).collect();
    let rows = eval_rows(&grid, &probe)?;

    type RowFmt = fn(&RowValues) -> String;
    let (columns, fmt): (&str, RowFmt) = match fig {
        3 => ("t,l_value,w_value", |v| {
            format!("{},{},{}", real(v.t), real(v.l_value), real(v.w_value))
        }),
        5 => ("t,w_value,concurrence,gamma", |v| {
            format!(
                "{},{},{},{}",
                real(v.t),
                real(v.w_value),
                real(v.concurrence),
                real(v.gamma)
            )
        }),
        8 => ("t,u_value,concurrence,gamma", |v| {
            format!(
                "{},{},{},{}",
                real(v.t),
                opt_real(v.u_value),
                real(v.concurrence),
                real(v.gamma)
            )
        }),
        _ => unreachable!(),
    };
    let extra = if fig == 8 {
        vec![tightness_line(&rows)]
    } else {
        Vec::new()
    };
    let mut text = String::new();
    push_headers(&mut text, fig, "line", &r, Some(&probe), args.seed, &extra, columns);
    for v in &rows {
        let _ = writeln!(text, "{}", fmt(v));
    }
    let path = write_file(&args.out, &format!("fig{fig}.csv"), &text)?;
    Ok(vec![(path, rows.len())])
}

/// Reverse-bound map over (J, D) at each temperature: fig 4.
fn fig_bound_map(args: &FigureArgs) -> Result<Vec<(PathBuf, usize)>, CliError> {
    let r = resolve_ranges(args, "-2:2:41", "0:3:31", "0.5,1")?;
    let probe = resolve_probe(args, "sx,sz", None, "eq10")?;
    let mut written = Vec::new();
    for &t in &r.ts {
        let grid = grid3(&r.js, &r.ds, &[t]);
        let rows = eval_rows(&grid, &probe)?;
        let mut text = String::new();
        push_headers(
            &mut text,
            4,
            &format!("w_t{t}"),
            &r,
            Some(&probe),
            args.seed,
            &[],
            "j,d,w_value",
        );
        for v in &rows {
            let _ = writeln!(text, "{},{},{}", real(v.j), real(v.d), real(v.w_value));
        }
        let path = write_file(&args.out, &format!("fig4_t{t}.csv"), &text)?;
        written.push((path, rows.len()));
    }
    Ok(written)
}

/// Tightness map over (J, D) at one temperature: fig 7.
fn fig_tightness_map(args: &FigureArgs) -> Result<Vec<(PathBuf, usize)>, CliError> {
    let r = resolve_ranges(args, "-2:2:41", "0:3:31", "1")?;
    if r.ts.len() != 1 {
        return Err(CliError::Usage("fig7 uses a single --t value".into()));
    }
    let probe = resolve_probe(args, "sx,sz", None, "eq10")?;
    let grid = grid3(&r.js, &r.ds, &[r.ts[0]]);
    let rows = eval_rows(&grid, &probe)?;
    let extra = vec![tightness_line(&rows)];
    let mut text = String::new();
    push_headers(&mut text, 7, "u_map", &r, Some(&probe), args.seed, &extra, "j,d,u_value");
    for v in &rows {
        let _ = writeln!(text, "{},{},{}", real(v.j), real(v.d), opt_real(v.u_value));
    }
    let path = write_file(&args.out, "fig7.csv", &text)?;
    Ok(vec![(path, rows.len())])
}

/// Mixedness-keyed collapse panels over a (D, T) grid, one file per J sign:
/// fig 6 (bound W) and fig 9 (tightness U).
fn fig_collapse(args: &FigureArgs) -> Result<Vec<(PathBuf, usize)>, CliError> {
    let fig = args.fig;
    let r = resolve_ranges(args, "1,-1", "0:3:13", "0.2:5:50")?;
    let probe = resolve_probe(args, COLLAPSE_Q, Some(COLLAPSE_O), "eq9")?;
    let mut written = Vec::new();
    for &j in &r.js {
        let grid = grid3(&[j], &r.ds, &r.ts);
        let rows = eval_rows(&grid, &probe)?;

        // Collapse diagnostic: the emitted value as a function of mixedness.
        let mut keys = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len());
        let mut skipped = 0usize;
        for v in &rows {
            let value = if fig == 6 { Some(v.w_value) } else { v.u_value };
            match value {
                Some(x) => {
                    keys.push(v.gamma);
                    values.push(x);
                }
                None => skipped += 1,
            }
        }
        let c = collapse_stats(&keys, &values, COLLAPSE_BINS);
        let extra = vec![format!(
            "collapse: bins={} max_intra_bin_spread={} value_range={} ratio={} skipped={}",
            COLLAPSE_BINS,
            real(c.spread),
            real(c.range),
            real(c.ratio),
            skipped
        )];

        let (columns, value_of): (&str, fn(&RowValues) -> String) = if fig == 6 {
            ("d,t,gamma,w_value", |v| real(v.w_value))
        } else {
            ("d,t,gamma,u_value", |v| opt_real(v.u_value))
        };
        let mut text = String::new();
        push_headers(
            &mut text,
            fig,
            &format!("j{j}"),
            &r,
            Some(&probe),
            args.seed,
            &extra,
            columns,
        );
        for v in &rows {
            let _ = writeln!(
                text,
                "{},{},{},{}",
                real(v.d),
                real(v.t),
                real(v.gamma),
                value_of(v)
            );
        }
        let path = write_file(&args.out, &format!("fig{fig}_j{j}.csv"), &text)?;
        written.push((path, rows.len()));
    }
    Ok(written)
}
