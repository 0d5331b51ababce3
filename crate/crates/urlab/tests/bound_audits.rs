//! Randomized validity and identity audits for every bound in the toolbox,
//! exercised through the public API the way the CLI consumes it.

use rand::Rng;
use std::f64::consts::TAU;
use urlab::bounds::{
    conditional_reverse_report, covariance_ratio_bound, phase_family_bound,
    projection_identity_residual, purity_bound, purity_bound_branch, variance_product_bound,
    BoundMode, MMode, ObservablePair, PhaseChoice, PhaseVector, PurityMode, SignBranch,
};
use urlab::qmeas::Observable;
use urlab::qstate::{random_hermitian_with, random_state_with, stream_rng, BipartiteSplit};
use urlab::Error;

fn random_instance(seed: u64, trial: u64, dim: usize) -> (urlab::qstate::DensityMatrix, Vec<Observable>) {
    let mut rng = stream_rng(seed, trial);
    let rank = rng.gen_range(1..=dim);
    let rho = random_state_with(&mut rng, dim, rank, None).unwrap();
    let a = Observable::new("a", random_hermitian_with(&mut rng, dim)).unwrap();
    let b = Observable::new("b", random_hermitian_with(&mut rng, dim)).unwrap();
    (rho, vec![a, b])
}

#[test]
fn every_bound_is_valid_on_random_states() {
    let mut ratio_defined = 0usize;
    for trial in 0..300u64 {
        let dim = [2, 3, 4][trial as usize % 3];
        let (rho, ab) = random_instance(21, trial, dim);
        let (a, b) = (&ab[0], &ab[1]);

        let rep = variance_product_bound(&rho, a, b).unwrap();
        assert!(rep.slack >= -1e-9, "product slack {} at trial {trial}", rep.slack);
        assert!(rep.valid);

        match covariance_ratio_bound(&rho, a, b) {
            Ok(rep) => {
                ratio_defined += 1;
                assert!(rep.slack >= -1e-9, "ratio slack {} at trial {trial}", rep.slack);
            }
            Err(Error::ZeroVariance { .. }) | Err(Error::SingularDenominator { .. }) => {}
            Err(e) => panic!("unexpected ratio error at trial {trial}: {e}"),
        }

        for mode in [PurityMode::Sqrt, PurityMode::Linear] {
            let rep = purity_bound(&rho, a, b, mode).unwrap();
            assert!(rep.slack >= -1e-9, "purity slack {} at trial {trial}", rep.slack);
            assert!(rep.cross_check_residual.unwrap() <= 1e-9);
        }

        let rep = phase_family_bound(&rho, &ab, &PhaseChoice::Optimize { grid: 16 }, MMode::Zero)
            .unwrap();
        assert!(rep.slack >= -1e-9, "phase slack {} at trial {trial}", rep.slack);
        assert!(rep.choices.certified);
    }
    // The ratio bound's preconditions are generic, so most random draws qualify.
    assert!(ratio_defined > 200, "only {ratio_defined} ratio instances defined");
}

#[test]
fn projection_identity_is_exact_on_random_states() {
    let mut worst = 0.0f64;
    for trial in 0..300u64 {
        let dim = [2, 3, 4][trial as usize % 3];
        let (rho, ab) = random_instance(22, trial, dim);
        match projection_identity_residual(&rho, &ab[0], &ab[1]) {
            Ok(r) => worst = worst.max(r),
            Err(Error::DegenerateReference { .. }) => {}
            Err(e) => panic!("unexpected error at trial {trial}: {e}"),
        }
    }
    assert!(worst <= 1e-9, "projection residual {worst}");
}

#[test]
fn phase_mean_identity_holds_for_many_random_phase_vectors() {
    let mut worst = 0.0f64;
    for trial in 0..50u64 {
        let dim = if trial % 2 == 0 { 2 } else { 4 };
        let (rho, ab) = random_instance(23, trial, dim);
        let mut rng = stream_rng(24, trial);
        for _ in 0..100 {
            let thetas: Vec<f64> = (0..2).map(|_| rng.gen::<f64>() * TAU).collect();
            let rep = phase_family_bound(
                &rho,
                &ab,
                &PhaseChoice::Fixed(PhaseVector::new(thetas)),
                MMode::Zero,
            )
            .unwrap();
            worst = worst.max(rep.cross_check_residual.unwrap());
            assert!(rep.slack >= -1e-9);
        }
    }
    assert!(worst <= 1e-9, "phase mean-identity residual {worst}");
}

#[test]
fn sqrt_flavor_never_exceeds_linear_flavor() {
    for trial in 0..200u64 {
        let dim = if trial % 2 == 0 { 2 } else { 4 };
        let (rho, ab) = random_instance(25, trial, dim);
        for branch in [SignBranch::Plus, SignBranch::Minus] {
            let s = purity_bound_branch(&rho, &ab[0], &ab[1], PurityMode::Sqrt, branch).unwrap();
            let l = purity_bound_branch(&rho, &ab[0], &ab[1], PurityMode::Linear, branch).unwrap();
            assert!(
                s.bound <= l.bound + 1e-12,
                "sqrt {} > linear {} at trial {trial}",
                s.bound,
                l.bound
            );
        }
    }
}

#[test]
fn experimental_overlap_saturates_and_is_uncertified() {
    for trial in 0..100u64 {
        let dim = if trial % 2 == 0 { 2 } else { 4 };
        let (rho, ab) = random_instance(26, trial, dim);
        let mut rng = stream_rng(27, trial);
        let thetas: Vec<f64> = (0..2).map(|_| rng.gen::<f64>() * TAU).collect();
        let rep = phase_family_bound(
            &rho,
            &ab,
            &PhaseChoice::Fixed(PhaseVector::new(thetas)),
            MMode::Experimental,
        )
        .unwrap();
        assert!(
            (rep.bound - rep.lhs).abs() <= 1e-9,
            "saturation gap {} at trial {trial}",
            (rep.bound - rep.lhs).abs()
        );
        assert!(!rep.choices.certified);
    }
}

#[test]
fn conditional_reverse_relation_holds_in_all_modes() {
    let splits = [
        BipartiteSplit::new(2, 2),
        BipartiteSplit::new(2, 3),
        BipartiteSplit::new(3, 3),
    ];
    for trial in 0..150u64 {
        let mut rng = stream_rng(28, trial);
        let split = splits[trial as usize % splits.len()];
        let dim = split.total();
        let rank = rng.gen_range(1..=dim);
        let rho = random_state_with(&mut rng, dim, rank, Some(split)).unwrap();
        let mut pairs = Vec::new();
        for k in 0..2 {
            let q = Observable::new(format!("q{k}"), random_hermitian_with(&mut rng, split.dim_a))
                .unwrap();
            let o = Observable::new(format!("o{k}"), random_hermitian_with(&mut rng, split.dim_c))
                .unwrap();
            pairs.push(ObservablePair { system: q, control: o });
        }
        for mode in [
            BoundMode::SqrtPurity,
            BoundMode::LinearPurity,
            BoundMode::PhaseFamily,
            BoundMode::CovarianceRatio,
        ] {
            match conditional_reverse_report(
                &rho,
                &pairs,
                mode,
                &PhaseChoice::Optimize { grid: 16 },
                MMode::Zero,
            ) {
                Ok(rep) => {
                    assert!(
                        rep.report.slack >= -1e-9,
                        "slack {} in mode {mode:?} at trial {trial}",
                        rep.report.slack
                    );
                    assert!(rep.equivalence_residual <= 1e-9);
                    // U is reported exactly when L is resolvable from zero.
                    assert_eq!(rep.u_value.is_some(), rep.l_value() > 1e-12);
                    if let Some(u) = rep.u_value {
                        assert!((u - rep.w_value() / rep.l_value()).abs() <= 1e-9);
                    }
                }
                Err(Error::ZeroVariance { .. }) | Err(Error::SingularDenominator { .. }) => {
                    assert_eq!(mode, BoundMode::CovarianceRatio);
                }
                Err(e) => panic!("unexpected error in mode {mode:?} at trial {trial}: {e}"),
            }
        }
    }
}
