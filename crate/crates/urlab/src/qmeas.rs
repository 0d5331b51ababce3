//! Observables, expectations, variances, projective control measurements, and
//! conditional statistics.
//!
//! Conditional statistics enforce two exact identities at runtime — the law of
//! total expectation and the law of total variance — so every downstream
//! consumer inherits a certified decomposition V(Q) = E[V(Q|O)] + V[E(Q|O)].

use crate::error::{Error, Result};
use crate::matcore::{
    anticommutator, spectral_decompose, trace_of_product, ComplexMatrix, SpectralDecomposition,
    Subsystem, DEFAULT_GROUP_TOL,
};
use crate::qstate::{validate_density, DensityMatrix};

/// Expectations of Hermitian observables must be real up to this residue.
pub const IMAGINARY_TOL: f64 = 1e-9;
/// Outcomes with probability at or below this floor are omitted (and recorded).
pub const PROBABILITY_FLOOR: f64 = 1e-12;
/// Variances this far below zero are round-off and clamped; lower is corruption.
pub const VARIANCE_FLOOR: f64 = -1e-10;
/// Tolerance for the total-expectation / total-variance consistency identities.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// A labelled Hermitian observable with its spectral decomposition cached.
#[derive(Clone, Debug)]
pub struct Observable {
    label: String,
    mat: ComplexMatrix,
    decomposition: SpectralDecomposition,
}

impl Observable {
    /// Build an observable, grouping near-degenerate eigenvalues with the
    /// default window.
    pub fn new(label: impl Into<String>, mat: ComplexMatrix) -> Result<Self> {
        Self::with_group_tol(label, mat, DEFAULT_GROUP_TOL)
    }

    /// Build an observable with an explicit eigenvalue grouping window.
    pub fn with_group_tol(label: impl Into<String>, mat: ComplexMatrix, tol: f64) -> Result<Self> {
        let decomposition = spectral_decompose(&mat, tol)?;
        Ok(Self {
            label: label.into(),
            mat: mat.hermitized(),
            decomposition,
        })
    }

    /// Display label.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// The (Hermitized) matrix.
    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Cached spectral decomposition.
    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    /// Hilbert-space dimension the observable acts on.
    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
}

/// ⟨A⟩ = Tr(ρA), with the imaginary residue checked against [`IMAGINARY_TOL`].
pub fn expectation(state: &DensityMatrix, obs: &Observable) -> Result<f64> {
    expectation_of(state, obs.mat())
}

/// ⟨M⟩ for a raw Hermitian matrix (same residue check).
pub fn expectation_of(state: &DensityMatrix, mat: &ComplexMatrix) -> Result<f64> {
    if mat.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            context: "expectation",
            expected: state.dim(),
            got: mat.dim(),
        });
    }
    let z = trace_of_product(state.mat(), mat);
    if z.im.abs() > IMAGINARY_TOL {
        return Err(Error::ImaginaryResidue {
            residue: z.im.abs(),
            tol: IMAGINARY_TOL,
        });
    }
    Ok(z.re)
}

/// Variances of two observables and their symmetrized covariance on one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceCovariance {
    /// V(A) = ⟨A²⟩ − ⟨A⟩².
    pub var_a: f64,
    /// V(B).
    pub var_b: f64,
    /// cov(A,B) = ½⟨{A,B}⟩ − ⟨A⟩⟨B⟩.
    pub covariance: f64,
}

/// Variance of a single observable, clamped at [`VARIANCE_FLOOR`].
pub fn variance(state: &DensityMatrix, obs: &Observable) -> Result<f64> {
    let mean = expectation(state, obs)?;
    let msq = expectation_of(state, &(obs.mat() * obs.mat()))?;
    clamp_variance(msq - mean * mean, "variance")
}

/// Variances and covariance of a pair of observables.
pub fn variance_covariance(
    state: &DensityMatrix,
    a: &Observable,
    b: &Observable,
) -> Result<VarianceCovariance> {
    let ma = expectation(state, a)?;
    let mb = expectation(state, b)?;
    let maa = expectation_of(state, &(a.mat() * a.mat()))?;
    let mbb = expectation_of(state, &(b.mat() * b.mat()))?;
    let mab = expectation_of(state, &anticommutator(a.mat(), b.mat()))?;
    Ok(VarianceCovariance {
        var_a: clamp_variance(maa - ma * ma, "var_a")?,
        var_b: clamp_variance(mbb - mb * mb, "var_b")?,
        covariance: 0.5 * mab - ma * mb,
    })
}

fn clamp_variance(v: f64, what: &'static str) -> Result<f64> {
    if v < VARIANCE_FLOOR {
        return Err(Error::Inconsistent {
            what,
            residual: -v,
            tol: -VARIANCE_FLOOR,
        });
    }
    Ok(v.max(0.0))
}

/// One retained projective outcome of a control measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    /// Eigenvalue of the control observable for this outcome.
    pub eigenvalue: f64,
    /// Outcome probability Tr[ρ (I ⊗ P)].
    pub probability: f64,
    /// Conditional reduced state of the system factor.
    pub state_a: DensityMatrix,
}

/// An outcome whose probability fell at or below [`PROBABILITY_FLOOR`].
#[derive(Debug, Clone, Copy)]
pub struct OmittedOutcome {
    /// Eigenvalue of the control observable.
    pub eigenvalue: f64,
    /// The (negligible or zero) probability it carried.
    pub probability: f64,
}

/// Full record of a projective measurement on the control factor.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    /// Retained outcomes, in ascending eigenvalue order.
    pub outcomes: Vec<MeasurementOutcome>,
    /// Outcomes dropped for having no statistical weight.
    pub omitted: Vec<OmittedOutcome>,
}

/// Measure the control factor of a bipartite state projectively.
///
/// For each eigenspace projector P of `control_obs`, computes the probability
/// p = Tr[ρ(I⊗P)] and, when p exceeds [`PROBABILITY_FLOOR`], the conditional
/// system state Tr_C[(I⊗P)ρ(I⊗P)]/p. Zero-weight outcomes are recorded in
/// `omitted` rather than silently dropped.
pub fn control_measure(
    state: &DensityMatrix,
    control_obs: &Observable,
) -> Result<MeasurementRecord> {
    let split = state.split().ok_or(Error::NoSplit)?;
    if control_obs.dim() != split.dim_c {
        return Err(Error::DimensionMismatch {
            context: "control_measure",
            expected: split.dim_c,
            got: control_obs.dim(),
        });
    }
    let id_a = ComplexMatrix::identity(split.dim_a);
    let mut outcomes = Vec::new();
    let mut omitted = Vec::new();
    for group in control_obs.decomposition().groups() {
        let proj = id_a.tensor_product(&group.projector);
        let p = trace_of_product(state.mat(), &proj).re;
        if p <= PROBABILITY_FLOOR {
            omitted.push(OmittedOutcome {
                eigenvalue: group.eigenvalue,
                probability: p,
            });
            continue;
        }
        let sandwich = &(&proj * state.mat()) * &proj;
        let reduced = sandwich.partial_trace(split.dim_a, split.dim_c, Subsystem::A)?;
        let state_a = validate_density(
            reduced.scale(crate::matcore::c64(1.0 / p, 0.0)),
            None,
        )?;
        outcomes.push(MeasurementOutcome {
            eigenvalue: group.eigenvalue,
            probability: p,
            state_a,
        });
    }
    Ok(MeasurementRecord { outcomes, omitted })
}

/// Per-outcome conditional moments of the system observable.
#[derive(Debug, Clone, Copy)]
pub struct OutcomeStats {
    /// Control eigenvalue of the outcome.
    pub eigenvalue: f64,
    /// Outcome probability.
    pub probability: f64,
    /// Conditional mean E(Q | outcome).
    pub mean: f64,
    /// Conditional variance V(Q | outcome).
    pub variance: f64,
}

/// The conditional-statistics decomposition of V(Q) under a control measurement.
#[derive(Debug, Clone)]
pub struct ConditionalStats {
    /// Per-outcome conditional moments, ascending control eigenvalue.
    pub per_outcome: Vec<OutcomeStats>,
    /// E[V(Q|O)] = Σ p_i V(Q|i).
    pub expected_conditional_variance: f64,
    /// V[E(Q|O)] = Σ p_i E(Q|i)² − (Σ p_i E(Q|i))².
    pub variance_of_conditional_expectation: f64,
    /// V(Q) on the system marginal.
    pub total_variance: f64,
    /// ⟨Q⟩ on the system marginal.
    pub total_mean: f64,
    /// |Σ p_i E(Q|i) − ⟨Q⟩| — the enforced total-expectation residual.
    pub mean_residual: f64,
    /// |V(Q) − E[V] − V[E]| — the enforced total-variance residual.
    pub variance_residual: f64,
    /// Zero-weight control outcomes that were skipped.
    pub omitted: Vec<OmittedOutcome>,
}

/// Measure the control factor with `control_obs` and decompose the variance of
/// the system observable `system_obs`.
///
/// Enforces the law of total expectation and the law of total variance within
/// [`CONSISTENCY_TOL`]; a violation is returned as an error rather than as
/// silently inconsistent numbers.
pub fn conditional_stats(
    state: &DensityMatrix,
    system_obs: &Observable,
    control_obs: &Observable,
) -> Result<ConditionalStats> {
    let split = state.split().ok_or(Error::NoSplit)?;
    if system_obs.dim() != split.dim_a {
        return Err(Error::DimensionMismatch {
            context: "conditional_stats",
            expected: split.dim_a,
            got: system_obs.dim(),
        });
    }
    let record = control_measure(state, control_obs)?;
    let marginal = state.marginal_a()?;
    let total_mean = expectation(&marginal, system_obs)?;
    let total_variance = variance(&marginal, system_obs)?;

    let mut per_outcome = Vec::with_capacity(record.outcomes.len());
    let mut expected_conditional_variance = 0.0;
    let mut mean_weighted = 0.0;
    let mut mean_sq_weighted = 0.0;
    for o in &record.outcomes {
        let mean = expectation(&o.state_a, system_obs)?;
        let var = variance(&o.state_a, system_obs)?;
        expected_conditional_variance += o.probability * var;
        mean_weighted += o.probability * mean;
        mean_sq_weighted += o.probability * mean * mean;
        per_outcome.push(OutcomeStats {
            eigenvalue: o.eigenvalue,
            probability: o.probability,
            mean,
            variance: var,
        });
    }
    let variance_of_conditional_expectation =
        (mean_sq_weighted - mean_weighted * mean_weighted).max(0.0);

    let mean_residual = (mean_weighted - total_mean).abs();
    if mean_residual > CONSISTENCY_TOL {
        return Err(Error::Inconsistent {
            what: "law of total expectation",
            residual: mean_residual,
            tol: CONSISTENCY_TOL,
        });
    }
    let variance_residual = (total_variance
        - expected_conditional_variance
        - variance_of_conditional_expectation)
        .abs();
    if variance_residual > CONSISTENCY_TOL {
        return Err(Error::Inconsistent {
            what: "law of total variance",
            residual: variance_residual,
            tol: CONSISTENCY_TOL,
        });
    }

    Ok(ConditionalStats {
        per_outcome,
        expected_conditional_variance,
        variance_of_conditional_expectation,
        total_variance,
        total_mean,
        mean_residual,
        variance_residual,
        omitted: record.omitted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{c64, sigma_x, sigma_y, sigma_z};
    use crate::qstate::{
        maximally_mixed, pure_state, random_state_with, stream_rng, BipartiteSplit,
    };
    use rand::Rng;

    #[test]
    fn pauli_expectations_on_basis_states() {
        let up = pure_state(&[c64(1., 0.), c64(0., 0.)]).unwrap();
        let z = Observable::new("sz", sigma_z()).unwrap();
        let x = Observable::new("sx", sigma_x()).unwrap();
        assert!((expectation(&up, &z).unwrap() - 1.0).abs() <= 1e-14);
        assert!(expectation(&up, &x).unwrap().abs() <= 1e-14);
        assert!((variance(&up, &x).unwrap() - 1.0).abs() <= 1e-14);
        assert!(variance(&up, &z).unwrap().abs() <= 1e-14);
    }

    #[test]
    fn covariance_is_symmetric_and_bounded() {
        let mut rng = stream_rng(3, 0);
        for _ in 0..50 {
            let s = random_state_with(&mut rng, 3, 3, None).unwrap();
            let a = Observable::new("a", crate::qstate::random_hermitian_with(&mut rng, 3))
                .unwrap();
            let b = Observable::new("b", crate::qstate::random_hermitian_with(&mut rng, 3))
                .unwrap();
            let vc = variance_covariance(&s, &a, &b).unwrap();
            let vc_swapped = variance_covariance(&s, &b, &a).unwrap();
            assert!((vc.covariance - vc_swapped.covariance).abs() <= 1e-12);
            assert!(vc.var_a >= 0.0 && vc.var_b >= 0.0);
            // Cauchy–Schwarz for the symmetrized covariance.
            assert!(vc.covariance * vc.covariance <= vc.var_a * vc.var_b + 1e-10);
        }
    }

    #[test]
    fn control_measure_on_product_state_leaves_system_alone() {
        // ρ = ρ_a ⊗ I/2: conditioning on any control outcome must return ρ_a.
        let rho_a = pure_state(&[c64(0.6, 0.0), c64(0.8, 0.0)]).unwrap();
        let joint = rho_a.mat().tensor_product(maximally_mixed(2).mat());
        let state = validate_density(joint, Some(BipartiteSplit::new(2, 2))).unwrap();
        let o = Observable::new("sz", sigma_z()).unwrap();
        let record = control_measure(&state, &o).unwrap();
        assert_eq!(record.outcomes.len(), 2);
        assert!(record.omitted.is_empty());
        for out in &record.outcomes {
            assert!((out.probability - 0.5).abs() <= 1e-12);
            assert!(out.state_a.mat().max_abs_diff(rho_a.mat()) <= 1e-12);
        }
    }

    #[test]
    fn zero_probability_outcomes_are_recorded() {
        // ρ = |0⟩⟨0| ⊗ |0⟩⟨0|: measuring σz on control gives p(−1) = 0.
        let joint = pure_state(&[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(0., 0.)])
            .unwrap()
            .with_split(BipartiteSplit::new(2, 2))
            .unwrap();
        let o = Observable::new("sz", sigma_z()).unwrap();
        let record = control_measure(&joint, &o).unwrap();
        assert_eq!(record.outcomes.len(), 1);
        assert_eq!(record.omitted.len(), 1);
        assert!(record.omitted[0].probability.abs() <= 1e-15);
    }

    #[test]
    fn conditional_stats_identities_hold_on_random_states() {
        let mut rng = stream_rng(9, 1);
        for (da, dc) in [(2usize, 2usize), (2, 3), (3, 3)] {
            for _ in 0..30 {
                let rank = rng.gen_range(1..=da * dc);
                let s = random_state_with(&mut rng, da * dc, rank, Some(BipartiteSplit::new(da, dc)))
                    .unwrap();
                let q = Observable::new("q", crate::qstate::random_hermitian_with(&mut rng, da))
                    .unwrap();
                let o = Observable::new("o", crate::qstate::random_hermitian_with(&mut rng, dc))
                    .unwrap();
                let stats = conditional_stats(&s, &q, &o).unwrap();
                assert!(stats.mean_residual <= CONSISTENCY_TOL);
                assert!(stats.variance_residual <= CONSISTENCY_TOL);
                // The decomposition parts are nonnegative.
                assert!(stats.expected_conditional_variance >= 0.0);
                assert!(stats.variance_of_conditional_expectation >= 0.0);
                // Conditioning never increases the expected residual variance.
                assert!(
                    stats.expected_conditional_variance <= stats.total_variance + 1e-10
                );
            }
        }
    }

    #[test]
    fn measuring_an_entangled_state_steers_the_system() {
        // Bell state: conditioning σz on control pins the system.
        let bell = pure_state(&[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(1., 0.)])
            .unwrap()
            .with_split(BipartiteSplit::new(2, 2))
            .unwrap();
        let q = Observable::new("sz", sigma_z()).unwrap();
        let o = Observable::new("sz", sigma_z()).unwrap();
        let stats = conditional_stats(&bell, &q, &o).unwrap();
        // Total variance of σz is 1; all of it is explained by the control.
        assert!((stats.total_variance - 1.0).abs() <= 1e-12);
        assert!(stats.expected_conditional_variance.abs() <= 1e-12);
        assert!((stats.variance_of_conditional_expectation - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let s = maximally_mixed(6).with_split(BipartiteSplit::new(2, 3)).unwrap();
        let bad_control = Observable::new("sz", sigma_z()).unwrap(); // dim 2, control is 3
        assert!(control_measure(&s, &bad_control).is_err());
        let q3 = Observable::new("q", ComplexMatrix::identity(3)).unwrap();
        let o3 = Observable::new("o", ComplexMatrix::identity(3)).unwrap();
        assert!(conditional_stats(&s, &q3, &o3).is_err()); // q must be dim 2
        let _ = (q3, o3);
        let y = Observable::new("sy", sigma_y()).unwrap();
        assert!(expectation(&s, &y).is_err());
    }
}
