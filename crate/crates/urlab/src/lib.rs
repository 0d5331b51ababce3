//! Numerical laboratory for variance-based uncertainty relations.
//!
//! The crate is organized bottom-up:
//!
//! * [`matcore`] — dense complex matrices, tensor products, partial traces, and a
//!   Jacobi eigensolver for Hermitian matrices with degeneracy-grouped spectral
//!   decompositions.
//! * [`qstate`] — validated density matrices (Hermiticity / trace / positivity gates
//!   with an audit trail), purity and mixedness, Wootters concurrence, and seeded
//!   random state generation.
//! * [`qmeas`] — observables with cached spectral decompositions, expectations,
//!   variances/covariances, projective measurement of a control subsystem, and
//!   conditional statistics with enforced consistency identities.
//! * [`bounds`] — the uncertainty-relation toolbox: the variance-product lower bound,
//!   the exact projection identity behind it, and three families of reverse (upper)
//!   bounds on variance sums, plus the conditional reverse relation that ties them to
//!   control measurements.
//! * [`dmmodel`] — a two-qubit Heisenberg model with Dzyaloshinskii–Moriya coupling:
//!   Hamiltonian construction, thermal states, and overflow-stable closed forms with
//!   diagnostics against the spectral ground truth.
//!
//! All numerical tolerances are exposed as named constants next to the operations that
//! use them.

pub mod bounds;
pub mod dmmodel;
pub mod error;
pub mod matcore;
pub mod qmeas;
pub mod qstate;

pub use error::{Error, Result};
