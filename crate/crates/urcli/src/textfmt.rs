//! Deterministic text formatting for tables and headers.

use urlab::matcore::ComplexMatrix;

/// 17-significant-digit scientific form; round-trips every f64 exactly.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Optional value; `NA` when absent.
pub fn opt_real(x: Option<f64>) -> String {
    match x {
        Some(v) => real(v),
        None => "NA".to_string(),
    }
}

/// Boolean column token.
pub fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// First header line of every report: tool, verb, version.
pub fn tool_line(verb: &str) -> String {
    format!("# urcli {verb} v{}", env!("CARGO_PKG_VERSION"))
}

/// Matrix rows as comma-separated re,im pairs (row-major).
pub fn matrix_lines(m: &ComplexMatrix) -> Vec<String> {
    (0..m.dim())
        .map(|r| {
            (0..m.dim())
                .map(|c| {
                    let z = m.get(r, c);
                    format!("{},{}", real(z.re), real(z.im))
                })
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect()
}
