//! Cross-module identity audits on random states: measurement-law residuals
//! across bipartite shapes, and structural matrix-algebra invariants driven by
//! property-based inputs.

use proptest::prelude::*;
use rand::Rng;
use urlab::matcore::{c64, spectral_decompose, ComplexMatrix, Subsystem};
use urlab::qmeas::{conditional_stats, Observable};
use urlab::qstate::{random_hermitian_with, random_state_with, stream_rng, BipartiteSplit};

#[test]
fn measurement_laws_hold_across_splits() {
    let splits = [
        BipartiteSplit::new(2, 2),
        BipartiteSplit::new(2, 3),
        BipartiteSplit::new(3, 3),
    ];
    let mut worst_mean = 0.0f64;
    let mut worst_var = 0.0f64;
    for trial in 0..200u64 {
        let mut rng = stream_rng(11, trial);
        let split = splits[trial as usize % splits.len()];
        let dim = split.total();
        let rank = rng.gen_range(1..=dim);
        let rho = random_state_with(&mut rng, dim, rank, Some(split)).unwrap();
        let q = Observable::new("q", random_hermitian_with(&mut rng, split.dim_a)).unwrap();
        let o = Observable::new("o", random_hermitian_with(&mut rng, split.dim_c)).unwrap();
        let cs = conditional_stats(&rho, &q, &o).unwrap();
        worst_mean = worst_mean.max(cs.mean_residual);
        worst_var = worst_var.max(cs.variance_residual);
        // The split pieces are individually non-negative and sum to V(Q).
        assert!(cs.expected_conditional_variance >= -1e-12);
        assert!(cs.variance_of_conditional_expectation >= -1e-12);
        // Outcome probabilities form a distribution.
        let total_p: f64 = cs.per_outcome.iter().map(|s| s.probability).sum();
        assert!((total_p - 1.0).abs() <= 1e-9, "Σp = {total_p}");
    }
    assert!(worst_mean <= 1e-9, "total-expectation residual {worst_mean}");
    assert!(worst_var <= 1e-9, "total-variance residual {worst_var}");
}

#[test]
fn conditioning_on_a_degenerate_control_explains_nothing() {
    // A control observable proportional to the identity has one outcome, so
    // the conditional expectation is constant and explains zero variance.
    let mut rng = stream_rng(12, 0);
    let split = BipartiteSplit::new(2, 3);
    let rho = random_state_with(&mut rng, 6, 6, Some(split)).unwrap();
    let q = Observable::new("q", random_hermitian_with(&mut rng, 2)).unwrap();
    let o = Observable::new("1", ComplexMatrix::identity(3)).unwrap();
    let cs = conditional_stats(&rho, &q, &o).unwrap();
    assert!(cs.variance_of_conditional_expectation.abs() <= 1e-12);
    assert!((cs.expected_conditional_variance - cs.total_variance).abs() <= 1e-12);
}

fn herm_strategy(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |xs| {
        ComplexMatrix::from_fn(dim, |r, c| {
            let (re, im) = xs[r * dim + c];
            c64(re, im)
        })
        .hermitized()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_inverts_tensor_products(
        a in herm_strategy(2),
        c in herm_strategy(3),
    ) {
        let joint = a.tensor_product(&c);
        prop_assert_eq!(joint.dim(), 6);
        // tr_C(A ⊗ C) = tr(C) · A and tr_A(A ⊗ C) = tr(A) · C.
        let back_a = joint.partial_trace(2, 3, Subsystem::A).unwrap();
        let back_c = joint.partial_trace(2, 3, Subsystem::C).unwrap();
        let tr_a = a.trace();
        let tr_c = c.trace();
        prop_assert!(back_a.max_abs_diff(&(&a * tr_c)) <= 1e-12);
        prop_assert!(back_c.max_abs_diff(&(&c * tr_a)) <= 1e-12);
        // Trace is multiplicative across the tensor product.
        prop_assert!((joint.trace() - tr_a * tr_c).norm() <= 1e-12);
    }

    #[test]
    fn spectral_reconstruction_round_trips(h in herm_strategy(4)) {
        let d = spectral_decompose(&h, 1e-9).unwrap();
        let scale = 1.0 + h.max_abs_entry();
        prop_assert!(d.reconstruct().max_abs_diff(&h) <= 1e-10 * scale);
        prop_assert!(d.completeness_defect() <= 1e-10);
        prop_assert!(d.orthonormality_defect() <= 1e-10);
        // Eigenvalues ascend and their sum is the trace.
        let eigs = d.eigenvalues();
        for w in eigs.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        let sum: f64 = d
            .groups()
            .iter()
            .map(|g| g.eigenvalue * g.multiplicity as f64)
            .sum();
        prop_assert!((sum - h.trace().re).abs() <= 1e-10 * scale);
    }
}
