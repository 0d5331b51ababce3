//! Model-level cross-checks on a parameter grid: closed forms against
//! independent numerical paths, plus fixed regression points.

// Frozen cross-implementation constants keep all 17 digits.
#![allow(clippy::excessive_precision)]

use urlab::bounds::{
    conditional_reverse_report, BoundMode, MMode, ObservablePair, PhaseChoice,
};
use urlab::dmmodel::{
    build_hamiltonian, closed_state_comparison, concurrence_closed, mixedness_closed,
    partition_function, spectrum, thermal_state, DmParams,
};
use urlab::matcore::{commutator, herm_expm, sigma_x, sigma_z, spectral_decompose};
use urlab::qmeas::Observable;
use urlab::qstate::concurrence_wootters;

fn param_grid() -> Vec<(f64, f64, f64)> {
    let js: Vec<f64> = (0..5).map(|i| -2.0 + i as f64).collect();
    let ds: Vec<f64> = (0..7).map(|i| 0.5 * i as f64).collect();
    let ts = [0.5, 1.0, 2.0];
    let mut out = Vec::new();
    for &j in &js {
        for &d in &ds {
            for &t in &ts {
                out.push((j, d, t));
            }
        }
    }
    out
}

#[test]
fn closed_forms_match_numerics_on_a_grid() {
    for (j, d, t) in param_grid() {
        let p = DmParams::new(j, d, t).unwrap();
        let rho = thermal_state(&p).unwrap();

        let c_dev = (concurrence_closed(&p) - concurrence_wootters(&rho).unwrap()).abs();
        assert!(c_dev <= 1e-8, "concurrence dev {c_dev} at ({j}, {d}, {t})");

        let g_dev = (mixedness_closed(&p) - rho.mixedness()).abs();
        assert!(g_dev <= 1e-8, "mixedness dev {g_dev} at ({j}, {d}, {t})");

        let h = build_hamiltonian(&p);
        let z_closed = partition_function(&p);
        let z_numeric = herm_expm(h.mat(), -p.beta()).unwrap().trace().re;
        let z_dev = (z_closed - z_numeric).abs();
        assert!(
            z_dev <= 1e-9 * z_closed.abs().max(1.0),
            "partition dev {z_dev} at ({j}, {d}, {t})"
        );

        // The state is stationary and shares the Hamiltonian's eigenbasis.
        let comm = commutator(rho.mat(), h.mat()).max_abs_entry();
        assert!(comm <= 1e-10, "[rho, H] = {comm} at ({j}, {d}, {t})");

        // The closed spectrum matches the eigensolver.
        let mut numeric: Vec<f64> = spectral_decompose(h.mat(), 1e-9)
            .unwrap()
            .groups()
            .iter()
            .flat_map(|g| std::iter::repeat_n(g.eigenvalue, g.multiplicity))
            .collect();
        numeric.sort_by(f64::total_cmp);
        for (a, b) in spectrum(&p).iter().zip(&numeric) {
            assert!((a - b).abs() <= 1e-10, "spectrum mismatch at ({j}, {d}, {t})");
        }

        // The consistent diagonal reading of the closed state always wins.
        let diag = closed_state_comparison(&p).unwrap();
        assert!(diag.dev_cosh_reading <= 1e-10);
        if j != 0.0 {
            assert!(diag.cosh_reading_matches());
        }
    }
}

/// Fixed regression points for the default probe (σx, σz with mirrored
/// controls) under the linear-purity bound at J = D = 1.
#[test]
fn conditional_relation_regression_points() {
    let pairs = vec![
        ObservablePair {
            system: Observable::new("sx", sigma_x()).unwrap(),
            control: Observable::new("sx", sigma_x()).unwrap(),
        },
        ObservablePair {
            system: Observable::new("sz", sigma_z()).unwrap(),
            control: Observable::new("sz", sigma_z()).unwrap(),
        },
    ];
    // (t, l, w, u_tra) computed along an independent implementation path and
    // frozen; agreement is expected to round-off.
    let expected = [
        (0.5, 0.58407582655694834, 1.4125029513031389, 2.8284271247461898),
        (1.0, 1.2056316225847181, 2.0340587473309091, 2.8284271247461898),
        (2.0, 1.7927964502990752, 2.6212235750452662, 2.8284271247461898),
    ];
    for (t, l, w, u_tra) in expected {
        let p = DmParams::new(1.0, 1.0, t).unwrap();
        let rho = thermal_state(&p).unwrap();
        let rep = conditional_reverse_report(
            &rho,
            &pairs,
            BoundMode::LinearPurity,
            &PhaseChoice::Optimize { grid: 64 },
            MMode::Zero,
        )
        .unwrap();
        assert!((rep.l_value() - l).abs() <= 1e-12, "L at t={t}: {}", rep.l_value());
        assert!((rep.w_value() - w).abs() <= 1e-12, "W at t={t}: {}", rep.w_value());
        assert!((rep.u_tra - u_tra).abs() <= 1e-12, "U_tra at t={t}: {}", rep.u_tra);
        assert!(rep.report.valid);
    }
}
