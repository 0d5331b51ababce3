//! The uncertainty-relation toolbox.
//!
//! Lower side: the classic variance-product bound and the exact projection
//! identity that generates it. Upper ("reverse") side: a covariance-ratio bound,
//! two purity-scaled bounds on variance sums, and a phase-parameterized family
//! for arbitrarily many observables. On top of these sits the conditional
//! reverse relation, which bounds the control-conditioned variance sum
//! L = Σ E[V(Q|O)] by W = U_tra − Σ V[E(Q|O)].
//!
//! Every report carries a signed slack and a validity flag; optimizer choices
//! (sign branches, phase vectors, overlap-correction mode) are recorded so runs
//! can be replayed.

use crate::error::{Error, Result};
use crate::matcore::{c64, commutator, trace_of_product, ComplexMatrix, C64};
use crate::qmeas::{conditional_stats, expectation_of, variance_covariance, Observable};
use crate::qstate::DensityMatrix;
use std::f64::consts::TAU;

/// A bound is valid when its signed slack is at least −SLACK_TOL.
pub const SLACK_TOL: f64 = 1e-9;
/// ⟨B̌²⟩ at or below this makes the projection identity's auxiliary operator undefined.
pub const DEGENERATE_REFERENCE_TOL: f64 = 1e-12;
/// ΔA·ΔB at or below this makes the covariance-ratio bound undefined.
pub const ZERO_VARIANCE_TOL: f64 = 1e-12;
/// |1 − cov/(ΔA·ΔB)| at or below this is a singular ratio denominator.
pub const SINGULAR_DENOMINATOR_TOL: f64 = 1e-9;
/// L at or below this leaves the tightness ratio U = W/L undefined.
pub const UNDEFINED_RATIO_TOL: f64 = 1e-12;
/// Default number of grid points per free phase in the optimizer.
pub const DEFAULT_PHASE_GRID: usize = 64;
/// Hard ceiling on grid-search candidates (the search costs grid^(K−1)).
pub const PHASE_GRID_BUDGET: u128 = 4_194_304;
/// Tolerance for the internal cross-checks each bound performs.
const IDENTITY_TOL: f64 = 1e-9;

/// Which way a bound points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSense {
    /// bound ≤ lhs expected; slack = lhs − bound.
    Lower,
    /// lhs ≤ bound expected; slack = bound − lhs.
    Upper,
}

/// Sign branch of the purity bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignBranch {
    Plus,
    Minus,
}

impl SignBranch {
    /// +1.0 or −1.0.
    pub fn signum(self) -> f64 {
        match self {
            SignBranch::Plus => 1.0,
            SignBranch::Minus => -1.0,
        }
    }
}

/// How the overlap correction M of the phase-family bound is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MMode {
    /// M = 0: weaker but certified (M is subtracted inside the radicand).
    Zero,
    /// M from the state-overlap construction; tighter but carries no validity
    /// theorem, so reports in this mode are marked non-certified.
    Experimental,
}

/// A phase assignment, one angle per observable, each normalized into [0, 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(Vec<f64>);

impl PhaseVector {
    /// Normalize every angle into [0, 2π).
    pub fn new(thetas: Vec<f64>) -> Self {
        Self(thetas.into_iter().map(|t| t.rem_euclid(TAU)).collect())
    }

    /// The angles.
    pub fn thetas(&self) -> &[f64] {
        &self.0
    }

    /// Number of angles.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True when there are no angles.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Fixed phases or a grid search over them.
#[derive(Debug, Clone)]
pub enum PhaseChoice {
    /// Evaluate exactly this phase vector.
    Fixed(PhaseVector),
    /// Minimize over a grid with `grid` points per free phase; the first phase
    /// is pinned to 0 (only relative phases matter). `grid = 1` evaluates the
    /// all-zero phase vector.
    Optimize { grid: usize },
}

impl Default for PhaseChoice {
    fn default() -> Self {
        PhaseChoice::Optimize {
            grid: DEFAULT_PHASE_GRID,
        }
    }
}

/// Optimizer selections recorded for replay.
#[derive(Debug, Clone, Default)]
pub struct Choices {
    /// Chosen sign branch per purity-bound pair (empty for other bounds).
    pub signs: Vec<SignBranch>,
    /// Chosen (or given) phase vector of the phase-family bound.
    pub phases: Option<PhaseVector>,
    /// Overlap-correction mode of the phase-family bound.
    pub m_mode: Option<MMode>,
    /// True when the reported bound is backed by a validity theorem.
    pub certified: bool,
}

/// Outcome of evaluating one bound on one state.
#[derive(Debug, Clone)]
pub struct BoundReport {
    /// The bounded quantity (product or sum of variances, or L).
    pub lhs: f64,
    /// The bound's value.
    pub bound: f64,
    /// Which way the bound points.
    pub sense: BoundSense,
    /// Signed slack; nonnegative means the bound holds.
    pub slack: f64,
    /// slack ≥ −[`SLACK_TOL`].
    pub valid: bool,
    /// Residual of the bound's internal exact-identity cross-check, when the
    /// bound has one (purity bounds and the phase family do). Enforced to be
    /// ≤ 1e−9 before the report is returned; surfaced for external audits.
    pub cross_check_residual: Option<f64>,
    /// Optimizer selections.
    pub choices: Choices,
}

impl BoundReport {
    fn from_parts(lhs: f64, bound: f64, sense: BoundSense, choices: Choices) -> Self {
        let slack = match sense {
            BoundSense::Lower => lhs - bound,
            BoundSense::Upper => bound - lhs,
        };
        BoundReport {
            lhs,
            bound,
            sense,
            slack,
            valid: slack >= -SLACK_TOL,
            cross_check_residual: None,
            choices,
        }
    }
}

/// ⟨M⟩ as a complex number, no Hermiticity assumption.
fn complex_mean(state: &DensityMatrix, m: &ComplexMatrix) -> C64 {
    trace_of_product(state.mat(), m)
}

/// Mean-shifted matrix Ǎ = A − ⟨A⟩·I.
fn shifted(state: &DensityMatrix, obs: &Observable) -> Result<ComplexMatrix> {
    let mean = expectation_of(state, obs.mat())?;
    let id = ComplexMatrix::identity(obs.dim());
    Ok(obs.mat() - &id.scale(c64(mean, 0.0)))
}

fn check_dims(state: &DensityMatrix, obs: &Observable, context: &'static str) -> Result<()> {
    if obs.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            context,
            expected: state.dim(),
            got: obs.dim(),
        });
    }
    Ok(())
}

/// Lower bound on the variance product:
/// ΔA²·ΔB² ≥ ¼|⟨[A,B]⟩|² + ¼|⟨{Ǎ,B̌}⟩|².
pub fn variance_product_bound(
    state: &DensityMatrix,
    a: &Observable,
    b: &Observable,
) -> Result<BoundReport> {
    check_dims(state, a, "variance_product_bound")?;
    check_dims(state, b, "variance_product_bound")?;
    let vc = variance_covariance(state, a, b)?;
    let comm_mean = complex_mean(state, &commutator(a.mat(), b.mat()));
    let lhs = vc.var_a * vc.var_b;
    // ⟨{Ǎ,B̌}⟩ = 2·cov, so the second term is cov².
    let bound = 0.25 * comm_mean.norm_sqr() + vc.covariance * vc.covariance;
    Ok(BoundReport::from_parts(
        lhs,
        bound,
        BoundSense::Lower,
        Choices {
            certified: true,
            ..Choices::default()
        },
    ))
}

/// Residual |LHS − RHS| of the exact projection identity behind the product
/// bound: with 𝒜 = Ǎ, ℬ = B̌ and 𝒞 = 𝒜 − (⟨ℬ†𝒜⟩/⟨ℬ†ℬ⟩)ℬ,
/// ⟨𝒜†𝒜⟩⟨ℬ†ℬ⟩ = ¼|⟨[𝒜,ℬ]⟩|² + ¼|⟨{𝒜,ℬ}⟩|² + ⟨ℬ†ℬ⟩⟨𝒞†𝒞⟩.
pub fn projection_identity_residual(
    state: &DensityMatrix,
    a: &Observable,
    b: &Observable,
) -> Result<f64> {
    check_dims(state, a, "projection_identity_residual")?;
    check_dims(state, b, "projection_identity_residual")?;
    let sa = shifted(state, a)?;
    let sb = shifted(state, b)?;
    let nb = complex_mean(state, &(&sb * &sb)).re;
    if nb <= DEGENERATE_REFERENCE_TOL {
        return Err(Error::DegenerateReference {
            norm: nb,
            tol: DEGENERATE_REFERENCE_TOL,
        });
    }
    let na = complex_mean(state, &(&sa * &sa)).re;
    let overlap = complex_mean(state, &(&sb * &sa)); // ⟨ℬ†𝒜⟩ (ℬ is Hermitian)
    let aux = &sa - &sb.scale(overlap / c64(nb, 0.0));
    let aux_norm = complex_mean(state, &(&aux.adjoint() * &aux)).re;
    let comm = complex_mean(state, &(&(&sa * &sb) - &(&sb * &sa)));
    let anti = complex_mean(state, &(&(&sa * &sb) + &(&sb * &sa)));
    let rhs = 0.25 * comm.norm_sqr() + 0.25 * anti.norm_sqr() + nb * aux_norm;
    Ok((na * nb - rhs).abs())
}

/// Upper bound on the variance sum from the covariance ratio:
/// ΔA² + ΔB² ≤ 2Δ(A−B)²/(1 − cov/(ΔA·ΔB)) − 2ΔA·ΔB.
pub fn covariance_ratio_bound(
    state: &DensityMatrix,
    a: &Observable,
    b: &Observable,
) -> Result<BoundReport> {
    check_dims(state, a, "covariance_ratio_bound")?;
    check_dims(state, b, "covariance_ratio_bound")?;
    let vc = variance_covariance(state, a, b)?;
    let dev_product = vc.var_a.sqrt() * vc.var_b.sqrt();
    if dev_product <= ZERO_VARIANCE_TOL {
        return Err(Error::ZeroVariance {
            value: dev_product,
            tol: ZERO_VARIANCE_TOL,
        });
    }
    let denom = 1.0 - vc.covariance / dev_product;
    if denom.abs() <= SINGULAR_DENOMINATOR_TOL {
        return Err(Error::SingularDenominator {
            value: denom.abs(),
            tol: SINGULAR_DENOMINATOR_TOL,
        });
    }
    // Δ(A−B)² computed directly from the difference observable, not expanded
    // algebraically, so validity is an actual measurement of the theorem.
    let diff = Observable::new("a-b", a.mat() - b.mat())?;
    let vc_diff = variance_covariance(state, &diff, &diff)?;
    let bound = 2.0 * vc_diff.var_a / denom - 2.0 * dev_product;
    Ok(BoundReport::from_parts(
        vc.var_a + vc.var_b,
        bound,
        BoundSense::Upper,
        Choices {
            certified: true,
            ..Choices::default()
        },
    ))
}

/// Flavor of the purity-scaled reverse bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurityMode {
    /// bound_s = √(Tr ρ²)·√(Tr X_s²) + s·i⟨[A,B]⟩ — the tighter flavor.
    Sqrt,
    /// bound_s = √(Tr ρ²)·Tr X_s + s·i⟨[A,B]⟩ — looser but cheaper to saturate.
    Linear,
}

/// One sign branch of the purity bound. `X_s = (Ǎ + s·iB̌)(Ǎ − s·iB̌)` is
/// positive semidefinite by construction; the branch bound is valid for either
/// sign, and [`purity_bound`] takes the minimum.
pub fn purity_bound_branch(
    state: &DensityMatrix,
    a: &Observable,
    b: &Observable,
    mode: PurityMode,
    branch: SignBranch,
) -> Result<BoundReport> {
    check_dims(state, a, "purity_bound")?;
    check_dims(state, b, "purity_bound")?;
    let s = branch.signum();
    let sa = shifted(state, a)?;
    let sb = shifted(state, b)?;
    let comm_mean = complex_mean(state, &commutator(a.mat(), b.mat()));
    let i_comm = C64::i() * comm_mean; // real for Hermitian a, b
    if i_comm.im.abs() > IDENTITY_TOL {
        return Err(Error::ImaginaryResidue {
            residue: i_comm.im.abs(),
            tol: IDENTITY_TOL,
        });
    }
    let n = &sa + &sb.scale(c64(0.0, s));
    let x = (&n * &n.adjoint()).hermitized();
    let purity = state.purity();
    let core = match mode {
        // Tr X² = ‖X‖_F² for Hermitian X.
        PurityMode::Sqrt => purity.sqrt() * x.frobenius_norm(),
        PurityMode::Linear => purity.sqrt() * x.trace().re,
    };
    let bound = core + s * i_comm.re;

    let vc = variance_covariance(state, a, b)?;
    let lhs = vc.var_a + vc.var_b;
    // Cross-check along an independent path: ⟨X_s⟩ = ΔA² + ΔB² − s·i⟨[A,B]⟩.
    let x_mean = complex_mean(state, &x).re;
    let residual = (x_mean - (lhs - s * i_comm.re)).abs();
    if residual > IDENTITY_TOL {
        return Err(Error::Inconsistent {
            what: "shifted-pair expectation identity",
            residual,
            tol: IDENTITY_TOL,
        });
    }

    let mut report = BoundReport::from_parts(
        lhs,
        bound,
        BoundSense::Upper,
        Choices {
            signs: vec![branch],
            certified: true,
            ..Choices::default()
        },
    );
    report.cross_check_residual = Some(residual);
    Ok(report)
}

/// Purity-scaled reverse bound on ΔA² + ΔB²: both sign branches are valid
/// upper bounds; the minimizing branch is reported in the choices.
pub fn purity_bound(
    state: &DensityMatrix,
    a: &Observable,
    b: &Observable,
    mode: PurityMode,
) -> Result<BoundReport> {
    let plus = purity_bound_branch(state, a, b, mode, SignBranch::Plus)?;
    let minus = purity_bound_branch(state, a, b, mode, SignBranch::Minus)?;
    Ok(if plus.bound <= minus.bound { plus } else { minus })
}

/// Phase-family reverse bound on Σ_k ΔA_k² with Y(θ) = Σ_k e^{iθ_k}Ǎ_k:
///
/// Σ_k ΔA_k² ≤ −G(θ) + √(Tr ρ² · (Tr[(Y†Y)²] − M))
///
/// where G(θ) is the phase-weighted cross term (real) and the exact identity
/// Σ_k ΔA_k² = ⟨Y†Y⟩ − G(θ) is asserted at the reported θ. M = 0 in
/// [`MMode::Zero`] (certified); [`MMode::Experimental`] subtracts the
/// state-overlap correction and is reported non-certified.
pub fn phase_family_bound(
    state: &DensityMatrix,
    obs: &[Observable],
    phases: &PhaseChoice,
    m_mode: MMode,
) -> Result<BoundReport> {
    let k = obs.len();
    if k == 0 {
        return Err(Error::NoObservables);
    }
    for o in obs {
        check_dims(state, o, "phase_family_bound")?;
    }

    // Precompute shifted observables, their pair products, and pair means.
    let mut shifted_mats = Vec::with_capacity(k);
    for o in obs {
        shifted_mats.push(shifted(state, o)?);
    }
    let mut pair_products = Vec::with_capacity(k * k);
    let mut pair_means = vec![c64(0.0, 0.0); k * k];
    for i in 0..k {
        for j in 0..k {
            let p = &shifted_mats[i] * &shifted_mats[j];
            pair_means[i * k + j] = complex_mean(state, &p);
            pair_products.push(p);
        }
    }
    let lhs: f64 = (0..k).map(|i| pair_means[i * k + i].re.max(0.0)).sum();
    let purity = state.purity();

    // Evaluate −G(θ) + √(purity·(Tr[(Y†Y)²] − M)) for one phase vector.
    let dim = state.dim();
    let eval = |thetas: &[f64]| -> Result<(f64, f64, ComplexMatrix)> {
        let factors: Vec<C64> = thetas.iter().map(|t| C64::from_polar(1.0, *t)).collect();
        let mut g = 0.0;
        for i in 0..k {
            for j in (i + 1)..k {
                let weight = factors[i].conj() * factors[j];
                g += 2.0 * (weight * pair_means[i * k + j]).re;
            }
        }
        // Y†Y = Σ_ij conj(f_i)·f_j·Ǎ_iǍ_j.
        let mut yy = ComplexMatrix::zeros(dim);
        for i in 0..k {
            for j in 0..k {
                let weight = factors[i].conj() * factors[j];
                yy = &yy + &pair_products[i * k + j].scale(weight);
            }
        }
        let yy = yy.hermitized();
        let tr_yy_sq: f64 = yy.entries().iter().map(|z| z.norm_sqr()).sum();
        let m = match m_mode {
            MMode::Zero => 0.0,
            MMode::Experimental => {
                let proj = complex_mean(state, &yy).re;
                tr_yy_sq - proj * proj / purity
            }
        };
        let radicand = purity * (tr_yy_sq - m);
        let scale = (purity * tr_yy_sq).max(1.0);
        if radicand < -1e-12 * scale {
            return Err(Error::NegativeRadicand { value: radicand });
        }
        Ok((-g + radicand.max(0.0).sqrt(), g, yy))
    };

    let (thetas, bound, g, yy) = match phases {
        PhaseChoice::Fixed(v) => {
            if v.len() != k {
                return Err(Error::PhaseLength {
                    expected: k,
                    got: v.len(),
                });
            }
            let (bound, g, yy) = eval(v.thetas())?;
            (v.clone(), bound, g, yy)
        }
        PhaseChoice::Optimize { grid } => {
            let grid = (*grid).max(1);
            let evaluations = (grid as u128).pow(k.saturating_sub(1) as u32);
            if evaluations > PHASE_GRID_BUDGET {
                return Err(Error::GridBudget {
                    evaluations,
                    budget: PHASE_GRID_BUDGET,
                });
            }
            // Odometer over the K−1 free phases, first phase pinned to 0.
            // Iteration is lexicographic and improvement is strict, so ties
            // resolve to the lexicographically smallest phase vector.
            let mut indices = vec![0usize; k.saturating_sub(1)];
            let mut thetas = vec![0.0f64; k];
            let mut best: Option<(Vec<f64>, f64, f64, ComplexMatrix)> = None;
            loop {
                for (slot, &idx) in indices.iter().enumerate() {
                    thetas[slot + 1] = TAU * (idx as f64) / (grid as f64);
                }
                let (bound, g, yy) = eval(&thetas)?;
                let better = match &best {
                    None => true,
                    Some((_, b, _, _)) => bound < *b,
                };
                if better {
                    best = Some((thetas.clone(), bound, g, yy));
                }
                // Odometer with the last slot fastest: candidates arrive in
                // lexicographic order over theta vectors.
                let mut carry = true;
                for slot in (0..indices.len()).rev() {
                    if carry {
                        indices[slot] += 1;
                        if indices[slot] == grid {
                            indices[slot] = 0;
                        } else {
                            carry = false;
                        }
                    }
                }
                if carry {
                    break; // full wraparound: all candidates visited
                }
            }
            let (t, bound, g, yy) =
                best.expect("grid has at least one candidate (grid ≥ 1)");
            (PhaseVector::new(t), bound, g, yy)
        }
    };

    // Exact-identity audit at the reported θ, along an independent path:
    // ⟨Y†Y⟩ comes from the assembled matrix, G and lhs from scalar pair means.
    let yy_mean = complex_mean(state, &yy).re;
    let residual = (yy_mean - g - lhs).abs();
    if residual > IDENTITY_TOL {
        return Err(Error::Inconsistent {
            what: "phase-family mean identity",
            residual,
            tol: IDENTITY_TOL,
        });
    }

    let mut report = BoundReport::from_parts(
        lhs,
        bound,
        BoundSense::Upper,
        Choices {
            phases: Some(thetas),
            m_mode: Some(m_mode),
            certified: matches!(m_mode, MMode::Zero),
            ..Choices::default()
        },
    );
    report.cross_check_residual = Some(residual);
    Ok(report)
}

/// Which reverse bound supplies U_tra in the conditional relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// Purity bound, sqrt flavor, summed over consecutive observable pairs.
    SqrtPurity,
    /// Purity bound, linear flavor, summed over consecutive observable pairs.
    LinearPurity,
    /// Phase-family bound over the whole observable list.
    PhaseFamily,
    /// Covariance-ratio bound, summed over consecutive observable pairs.
    CovarianceRatio,
}

/// One (system observable, control observable) channel of the conditional
/// relation: Q_k is measured on the system factor, O_k on the control factor.
#[derive(Debug, Clone)]
pub struct ObservablePair {
    /// Observable on the system (A) factor.
    pub system: Observable,
    /// Observable on the control (C) factor.
    pub control: Observable,
}

/// Full evaluation of the conditional reverse relation on one state.
#[derive(Debug, Clone)]
pub struct ConditionalReverseReport {
    /// lhs = L, bound = W, upper sense, with optimizer choices from U_tra.
    pub report: BoundReport,
    /// The unconditional reverse bound evaluated on the system marginal.
    pub u_tra: f64,
    /// Σ_k V[E(Q_k|O_k)] — variance explained by the control.
    pub sum_explained_variance: f64,
    /// Σ_k V(Q_k) on the marginal — for the algebraic-equivalence audit.
    pub sum_total_variance: f64,
    /// Tightness U = W/L, or None when L ≤ [`UNDEFINED_RATIO_TOL`].
    pub u_value: Option<f64>,
    /// |(W − L) − (U_tra − Σ V(Q_k))| — enforced ≤ 1e−9.
    pub equivalence_residual: f64,
    /// Tr ρ_A² of the system marginal (enters U_tra).
    pub marginal_purity: f64,
}

impl ConditionalReverseReport {
    /// L = Σ_k E[V(Q_k|O_k)].
    pub fn l_value(&self) -> f64 {
        self.report.lhs
    }

    /// W = U_tra − Σ_k V[E(Q_k|O_k)].
    pub fn w_value(&self) -> f64 {
        self.report.bound
    }
}

/// Evaluate the conditional reverse relation L ≤ W on a bipartite state.
///
/// L sums the expected conditional variances of the system observables under
/// projective measurement of their control partners; W is the marginal reverse
/// bound U_tra minus the explained variances. Pairwise modes (sqrt/linear
/// purity, covariance ratio) consume the system observables two at a time and
/// need an even count ≥ 2; the phase-family mode takes the whole list.
pub fn conditional_reverse_report(
    state: &DensityMatrix,
    pairs: &[ObservablePair],
    mode: BoundMode,
    phases: &PhaseChoice,
    m_mode: MMode,
) -> Result<ConditionalReverseReport> {
    if pairs.is_empty() {
        return Err(Error::NoObservables);
    }
    let marginal = state.marginal_a()?;

    let mut l_value = 0.0;
    let mut sum_explained = 0.0;
    let mut sum_total = 0.0;
    for pair in pairs {
        let stats = conditional_stats(state, &pair.system, &pair.control)?;
        l_value += stats.expected_conditional_variance;
        sum_explained += stats.variance_of_conditional_expectation;
        sum_total += stats.total_variance;
    }

    let (u_tra, mut choices) = match mode {
        BoundMode::PhaseFamily => {
            let obs: Vec<Observable> = pairs.iter().map(|p| p.system.clone()).collect();
            let r = phase_family_bound(&marginal, &obs, phases, m_mode)?;
            (r.bound, r.choices)
        }
        BoundMode::SqrtPurity | BoundMode::LinearPurity | BoundMode::CovarianceRatio => {
            if !pairs.len().is_multiple_of(2) {
                return Err(Error::OddPairCount { got: pairs.len() });
            }
            let mut total = 0.0;
            let mut choices = Choices {
                certified: true,
                ..Choices::default()
            };
            for duo in pairs.chunks_exact(2) {
                let (qa, qb) = (&duo[0].system, &duo[1].system);
                let r = match mode {
                    BoundMode::SqrtPurity => {
                        purity_bound(&marginal, qa, qb, PurityMode::Sqrt)?
                    }
                    BoundMode::LinearPurity => {
                        purity_bound(&marginal, qa, qb, PurityMode::Linear)?
                    }
                    BoundMode::CovarianceRatio => covariance_ratio_bound(&marginal, qa, qb)?,
                    BoundMode::PhaseFamily => unreachable!(),
                };
                total += r.bound;
                choices.signs.extend(r.choices.signs);
            }
            (total, choices)
        }
    };
    choices.m_mode = match mode {
        BoundMode::PhaseFamily => choices.m_mode,
        _ => None,
    };

    let w_value = u_tra - sum_explained;
    let equivalence_residual = ((w_value - l_value) - (u_tra - sum_total)).abs();
    if equivalence_residual > IDENTITY_TOL {
        return Err(Error::Inconsistent {
            what: "conditional-relation equivalence",
            residual: equivalence_residual,
            tol: IDENTITY_TOL,
        });
    }
    let u_value = if l_value <= UNDEFINED_RATIO_TOL {
        None
    } else {
        Some(w_value / l_value)
    };

    Ok(ConditionalReverseReport {
        report: BoundReport::from_parts(l_value, w_value, BoundSense::Upper, choices),
        u_tra,
        sum_explained_variance: sum_explained,
        sum_total_variance: sum_total,
        u_value,
        equivalence_residual,
        marginal_purity: marginal.purity(),
    })
}
