//! Flag-value parsing: numeric grids, observable lists, mode tokens.

use crate::CliError;
use urlab::bounds::{BoundMode, MMode};
use urlab::matcore::{bloch_observable, sigma_x, sigma_y, sigma_z};
use urlab::qmeas::Observable;
use urlab::qstate::BipartiteSplit;

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

fn parse_f64(flag: &str, tok: &str) -> Result<f64, CliError> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| usage(format!("--{flag}: `{tok}` is not a number")))?;
    if !v.is_finite() {
        return Err(usage(format!("--{flag}: `{tok}` is not finite")));
    }
    Ok(v)
}

/// Parse a grid flag: a single value `v`, a comma list `v1,v2,...`, or a
/// uniform range `start:stop:count` (count ≥ 1; count = 1 yields `start`).
pub fn parse_range(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(usage(format!("--{flag}: empty value")));
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(usage(format!(
                "--{flag}: expected start:stop:count, got `{text}`"
            )));
        }
        let a = parse_f64(flag, parts[0])?;
        let b = parse_f64(flag, parts[1])?;
        let n: usize = parts[2].trim().parse().map_err(|_| {
            usage(format!(
                "--{flag}: count `{}` is not a positive integer",
                parts[2]
            ))
        })?;
        if n == 0 {
            return Err(usage(format!("--{flag}: count must be ≥ 1")));
        }
        if n == 1 {
            return Ok(vec![a]);
        }
        let nm1 = (n - 1) as f64;
        return Ok((0..n).map(|i| a + (b - a) * (i as f64 / nm1)).collect());
    }
    text.split(',').map(|tok| parse_f64(flag, tok)).collect()
}

/// Parse a comma-separated observable list: `sx`, `sy`, `sz`, or a Bloch-axis
/// token `polar:azimuth` in radians.
pub fn parse_observables(flag: &str, text: &str) -> Result<Vec<Observable>, CliError> {
    let toks: Vec<&str> = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    if toks.is_empty() {
        return Err(usage(format!("--{flag}: no observables given")));
    }
    toks.into_iter()
        .map(|tok| parse_observable(flag, tok))
        .collect()
}

fn parse_observable(flag: &str, tok: &str) -> Result<Observable, CliError> {
    let mat = match tok {
        "sx" => sigma_x(),
        "sy" => sigma_y(),
        "sz" => sigma_z(),
        other => {
            let parts: Vec<&str> = other.split(':').collect();
            if parts.len() != 2 {
                return Err(usage(format!(
                    "--{flag}: `{tok}` is not sx|sy|sz or polar:azimuth"
                )));
            }
            let polar = parse_f64(flag, parts[0])?;
            let azimuth = parse_f64(flag, parts[1])?;
            bloch_observable(polar, azimuth)
        }
    };
    Observable::new(tok, mat).map_err(|e| usage(format!("--{flag}: `{tok}`: {e}")))
}

/// Reverse-bound selector. The tags are opaque names kept stable for
/// scripting: eq8 = sqrt-purity, eq9 = linear-purity, eq10 = phase-family,
/// mondal = covariance-ratio.
pub fn parse_bound(text: &str) -> Result<BoundMode, CliError> {
    match text {
        "eq8" => Ok(BoundMode::SqrtPurity),
        "eq9" => Ok(BoundMode::LinearPurity),
        "eq10" => Ok(BoundMode::PhaseFamily),
        "mondal" => Ok(BoundMode::CovarianceRatio),
        _ => Err(usage(format!(
            "--bound: `{text}` is not eq8|eq9|eq10|mondal"
        ))),
    }
}

/// Overlap-term handling for the phase-family bound.
pub fn parse_m_mode(text: &str) -> Result<MMode, CliError> {
    match text {
        "zero" => Ok(MMode::Zero),
        "experimental" => Ok(MMode::Experimental),
        _ => Err(usage(format!(
            "--m-mode: `{text}` is not zero|experimental"
        ))),
    }
}

/// Parse bipartite shapes like `2x2,2x3,3x3`.
pub fn parse_dims(text: &str) -> Result<Vec<BipartiteSplit>, CliError> {
    let mut out = Vec::new();
    for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let bad = || usage(format!("--dims: `{tok}` is not AxC with positive factors"));
        let parts: Vec<&str> = tok.split('x').collect();
        if parts.len() != 2 {
            return Err(bad());
        }
        let a: usize = parts[0].trim().parse().map_err(|_| bad())?;
        let c: usize = parts[1].trim().parse().map_err(|_| bad())?;
        if a == 0 || c == 0 {
            return Err(bad());
        }
        out.push(BipartiteSplit::new(a, c));
    }
    if out.is_empty() {
        return Err(usage("--dims: no shapes given".into()));
    }
    Ok(out)
}
