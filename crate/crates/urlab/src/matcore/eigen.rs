//! Hermitian eigensolver (cyclic complex Jacobi) and degeneracy-grouped spectral
//! decompositions.
//!
//! Jacobi is chosen over faster factorizations because at dimension ≤ 9 it is
//! plenty fast, it is simple enough to audit line by line, and it is fully
//! deterministic: the same input bytes always produce the same eigenpairs.

use super::{c64, ComplexMatrix};
use crate::error::{Error, Result};

/// Hermiticity gate applied before any spectral work.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Default window for merging near-equal eigenvalues into one spectral group.
pub const DEFAULT_GROUP_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 64;

/// One eigenspace: a (possibly degenerate) eigenvalue with its orthogonal projector.
#[derive(Clone, Debug)]
pub struct SpectralGroup {
    /// Representative eigenvalue (mean of the merged raw eigenvalues).
    pub eigenvalue: f64,
    /// Number of raw eigenvalues merged into this group.
    pub multiplicity: usize,
    /// Orthogonal projector onto the eigenspace.
    pub projector: ComplexMatrix,
}

/// Spectral decomposition h = Σ_g λ_g P_g with degenerate eigenvalues grouped.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    dim: usize,
    groups: Vec<SpectralGroup>,
}

impl SpectralDecomposition {
    /// Dimension of the underlying space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenspaces in ascending eigenvalue order.
    pub fn groups(&self) -> &[SpectralGroup] {
        &self.groups
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        self.groups.first().map(|g| g.eigenvalue).unwrap_or(0.0)
    }

    /// Largest eigenvalue.
    pub fn max_eigenvalue(&self) -> f64 {
        self.groups.last().map(|g| g.eigenvalue).unwrap_or(0.0)
    }

    /// Raw eigenvalues expanded by multiplicity, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim);
        for g in &self.groups {
            out.extend(std::iter::repeat_n(g.eigenvalue, g.multiplicity));
        }
        out
    }

    /// Σ_g f(λ_g) · P_g — apply a scalar function through the decomposition.
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        for g in &self.groups {
            out = &out + &g.projector.scale(c64(f(g.eigenvalue), 0.0));
        }
        out
    }

    /// Σ_g λ_g · P_g.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|x| x)
    }

    /// max-entry deviation of Σ_g P_g from the identity.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim);
        for g in &self.groups {
            sum = &sum + &g.projector;
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// Worst deviation from projector orthonormality: max over g, h of
    /// ‖P_g P_h − δ_gh P_g‖_max.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (gi, g) in self.groups.iter().enumerate() {
            for (hi, h) in self.groups.iter().enumerate() {
                let prod = &g.projector * &h.projector;
                let dev = if gi == hi {
                    prod.max_abs_diff(&g.projector)
                } else {
                    prod.max_abs_entry()
                };
                worst = worst.max(dev);
            }
        }
        worst
    }
}

/// Diagonalize a Hermitian matrix and group near-degenerate eigenvalues.
///
/// Eigenvalues closer than `group_tol` to the running group anchor are merged;
/// each group's projector is the sum of the merged eigenvector dyads
/// (re-Hermitized to scrub round-off). Groups come back in ascending eigenvalue
/// order. Fails if the input deviates from Hermitian by more than
/// [`HERMITICITY_TOL`] or if the rotation sweep fails to converge.
pub fn spectral_decompose(h: &ComplexMatrix, group_tol: f64) -> Result<SpectralDecomposition> {
    let defect = h.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            defect,
            tol: HERMITICITY_TOL,
        });
    }
    let (mut eigs, vecs) = jacobi_eigh(&h.hermitized())?;

    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigs[a].total_cmp(&eigs[b]));
    eigs.sort_by(f64::total_cmp);

    // Group by anchor: a new group starts when the eigenvalue leaves the window
    // around the first member of the running group.
    let mut groups: Vec<SpectralGroup> = Vec::new();
    let mut start = 0usize;
    while start < n {
        let anchor = eigs[start];
        let mut stop = start + 1;
        while stop < n && (eigs[stop] - anchor).abs() <= group_tol {
            stop += 1;
        }
        let members = &order[start..stop];
        let mut projector = ComplexMatrix::zeros(n);
        for &col in members {
            for i in 0..n {
                let vi = vecs.get(i, col);
                for j in 0..n {
                    let add = vi * vecs.get(j, col).conj();
                    projector.set(i, j, projector.get(i, j) + add);
                }
            }
        }
        let mean = eigs[start..stop].iter().sum::<f64>() / (stop - start) as f64;
        groups.push(SpectralGroup {
            eigenvalue: mean,
            multiplicity: stop - start,
            projector: projector.hermitized(),
        });
        start = stop;
    }

    Ok(SpectralDecomposition { dim: n, groups })
}

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation zeroes one off-diagonal pair with the unitary
/// U = [[c, s], [−s·e^{−iφ}, c·e^{−iφ}]] on the pivot plane, where e^{iφ} is the
/// phase of the pivot entry and (c, s) the classical symmetric Jacobi pair for
/// the phase-stripped 2×2 block. Returns (eigenvalues, eigenvector columns),
/// unsorted.
fn jacobi_eigh(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = ComplexMatrix::identity(n);

    if n == 1 {
        return Ok((vec![m.get(0, 0).re], v));
    }

    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let stop = 1e-15 * scale;

    for sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m.get(p, q).norm());
            }
        }
        if off <= stop {
            let eigs = (0..n).map(|i| m.get(i, i).re).collect();
            return Ok((eigs, v));
        }
        if sweep == MAX_SWEEPS - 1 {
            return Err(Error::NoConvergence {
                sweeps: MAX_SWEEPS,
                off,
            });
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let beta = m.get(p, q);
                let mag = beta.norm();
                if mag <= stop * 1e-2 {
                    continue;
                }
                let phase = beta / mag; // e^{iφ}
                let alpha = m.get(p, p).re;
                let gamma = m.get(q, q).re;

                // Classical symmetric pair for [[α, m], [m, γ]].
                let theta = (gamma - alpha) / (2.0 * mag);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let u_pp = c64(c, 0.0);
                let u_pq = c64(s, 0.0);
                let u_qp = -phase.conj() * s;
                let u_qq = phase.conj() * c;

                // Columns p, q of M ← M·U.
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, mkp * u_pp + mkq * u_qp);
                    m.set(k, q, mkp * u_pq + mkq * u_qq);
                }
                // Rows p, q of M ← U†·M.
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, u_pp.conj() * mpk + u_qp.conj() * mqk);
                    m.set(q, k, u_pq.conj() * mpk + u_qq.conj() * mqk);
                }
                // Pin the analytically known entries to kill round-off drift.
                m.set(p, q, c64(0.0, 0.0));
                m.set(q, p, c64(0.0, 0.0));
                m.set(p, p, c64(alpha - t * mag, 0.0));
                m.set(q, q, c64(gamma + t * mag, 0.0));

                // Accumulate V ← V·U.
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * u_pp + vkq * u_qp);
                    v.set(k, q, vkp * u_pq + vkq * u_qq);
                }
            }
        }
    }
    unreachable!("loop either returns or errors out on the last sweep");
}
