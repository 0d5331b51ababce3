//! State verb: full dump of one model point with closed-vs-numeric
//! cross-checks along independent computation paths.

use crate::cli::StateArgs;
use crate::textfmt::{flag, matrix_lines, real, tool_line};
use crate::{write_output, CliError};
use std::fmt::Write as _;
use urlab::dmmodel::{
    build_hamiltonian, closed_state_comparison, concurrence_closed, mixedness_closed,
    partition_function, spectrum, thermal_state, DmParams,
};
use urlab::matcore::{herm_expm, ComplexMatrix};
use urlab::qstate::concurrence_wootters;

pub fn run(args: &StateArgs) -> Result<(), CliError> {
    let p = DmParams::new(args.j, args.d, args.t)
        .map_err(|e| CliError::Usage(format!("model parameters: {e}")))?;
    let viol = |e: urlab::Error| CliError::Violation(e.to_string());

    let h = build_hamiltonian(&p);
    let eigs = spectrum(&p);
    let z_closed = partition_function(&p);
    let z_numeric = herm_expm(h.mat(), -p.beta()).map_err(viol)?.trace().re;
    let rho = thermal_state(&p).map_err(viol)?;
    let c_closed = concurrence_closed(&p);
    let c_numeric = concurrence_wootters(&rho).map_err(viol)?;
    let gamma_closed = mixedness_closed(&p);
    let gamma_numeric = rho.mixedness();
    let marginal = rho.marginal_a().map_err(viol)?;
    let diag = closed_state_comparison(&p).map_err(viol)?;

    let mut text = String::new();
    let _ = writeln!(text, "{}", tool_line("state"));
    let _ = writeln!(
        text,
        "# j={} d={} t={} beta={} delta={}",
        real(p.j()),
        real(p.d()),
        real(p.t()),
        real(p.beta()),
        real(p.delta())
    );
    push_matrix(&mut text, "hamiltonian", h.mat());
    let _ = writeln!(
        text,
        "# spectrum_ascending: {}",
        eigs.iter().map(|&e| real(e)).collect::<Vec<_>>().join(",")
    );
    let _ = writeln!(
        text,
        "# partition_function: closed={} numeric={} abs_dev={}",
        real(z_closed),
        real(z_numeric),
        real((z_closed - z_numeric).abs())
    );
    push_matrix(&mut text, "thermal_state", rho.mat());
    let _ = writeln!(
        text,
        "# mixedness: closed={} numeric={} abs_dev={} purity={}",
        real(gamma_closed),
        real(gamma_numeric),
        real((gamma_closed - gamma_numeric).abs()),
        real(rho.purity())
    );
    let _ = writeln!(
        text,
        "# concurrence: closed={} numeric={} abs_dev={}",
        real(c_closed),
        real(c_numeric),
        real((c_closed - c_numeric).abs())
    );
    let _ = writeln!(text, "# marginal_a_purity: {}", real(marginal.purity()));
    let _ = writeln!(
        text,
        "# closed_reading_check: dev_cosh_form={} dev_flipped_form={} cosh_form_matches={}",
        real(diag.dev_cosh_reading),
        real(diag.dev_flipped_reading),
        flag(diag.cosh_reading_matches())
    );

    write_output(args.out.as_deref(), &text)
}

fn push_matrix(text: &mut String, name: &str, m: &ComplexMatrix) {
    let _ = writeln!(text, "# {name} dim={} (rows of re,im pairs)", m.dim());
    for line in matrix_lines(m) {
        let _ = writeln!(text, "{line}");
    }
}
