//! Dense square complex matrices sized for few-qubit Hilbert spaces.
//!
//! Everything downstream works with dimensions between 2 and ~9, so the
//! representation is a plain row-major `Vec<Complex64>` with no sparsity or
//! blocking. Operations allocate freely; clarity and determinism win over speed
//! at these sizes.

mod eigen;

pub use eigen::{spectral_decompose, SpectralDecomposition, SpectralGroup, DEFAULT_GROUP_TOL};

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Complex scalar used everywhere in the crate.
pub type C64 = Complex64;

/// Shorthand for a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A square complex matrix with row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// dim×dim zero matrix.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    /// dim×dim identity.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, c64(1.0, 0.0));
        }
        m
    }

    /// Build from a function of (row, col).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Build from a row-major slice of length dim².
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                context: "from_row_major",
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self {
            dim,
            data: entries.to_vec(),
        })
    }

    /// Diagonal matrix from real entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, c64(d, 0.0));
        }
        m
    }

    /// Matrix dimension (matrices are always square).
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at (row, col).
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        debug_assert!(row < self.dim && col < self.dim);
        self.data[row * self.dim + col]
    }

    /// Overwrite entry at (row, col).
    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        debug_assert!(row < self.dim && col < self.dim);
        self.data[row * self.dim + col] = value;
    }

    /// Row-major view of the raw entries.
    #[inline]
    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj_entries(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm √Σ|m_ij|².
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from another matrix of the same dimension.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from the conjugate transpose, max |m_ij - conj(m_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// True when the Hermiticity defect is within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Hermitian part (m + m†)/2. Used to scrub round-off before spectral work.
    pub fn hermitized(&self) -> Self {
        Self::from_fn(self.dim, |i, j| {
            0.5 * (self.get(i, j) + self.get(j, i).conj())
        })
    }

    /// Multiply every entry by a complex scalar.
    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Kronecker product, with `self` acting on the first factor.
    pub fn tensor_product(&self, other: &Self) -> Self {
        let da = self.dim;
        let db = other.dim;
        ComplexMatrix::from_fn(da * db, |i, j| {
            let (ia, ib) = (i / db, i % db);
            let (ja, jb) = (j / db, j % db);
            self.get(ia, ja) * other.get(ib, jb)
        })
    }

    /// Partial trace of a matrix on a `dim_a × dim_c` product space, keeping the
    /// requested factor. Indices are composed as `i = i_a * dim_c + i_c` (first
    /// factor is the slow index), matching [`ComplexMatrix::tensor_product`].
    pub fn partial_trace(&self, dim_a: usize, dim_c: usize, keep: Subsystem) -> Result<Self> {
        if dim_a * dim_c != self.dim || dim_a == 0 || dim_c == 0 {
            return Err(Error::BadSplit {
                dim_a,
                dim_c,
                dim: self.dim,
            });
        }
        let m = match keep {
            Subsystem::A => ComplexMatrix::from_fn(dim_a, |i, j| {
                (0..dim_c)
                    .map(|k| self.get(i * dim_c + k, j * dim_c + k))
                    .sum()
            }),
            Subsystem::C => ComplexMatrix::from_fn(dim_c, |i, j| {
                (0..dim_a)
                    .map(|k| self.get(k * dim_c + i, k * dim_c + j))
                    .sum()
            }),
        };
        Ok(m)
    }
}

/// Which tensor factor an operation acts on or keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    /// First (slow-index) factor; the "system" side downstream.
    A,
    /// Second (fast-index) factor; the "control" side downstream.
    C,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix(dim={})", self.dim)?;
        for i in 0..self.dim {
            write!(f, "  [")?;
            for j in 0..self.dim {
                let z = self.get(i, j);
                write!(f, " {:+.4e}{:+.4e}i", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix add: dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sub: dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(c64(-1.0, 0.0))
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix mul: dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == c64(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + aik * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

/// Commutator [a, b] = ab − ba.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) - &(b * a)
}

/// Anticommutator {a, b} = ab + ba.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) + &(b * a)
}

/// Tr(a·b) without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    assert_eq!(a.dim(), b.dim(), "trace_of_product: dimension mismatch");
    let n = a.dim();
    let mut acc = c64(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    acc
}

/// Pauli x.
pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
        .expect("static 2x2")
}

/// Pauli y.
pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, &[c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)])
        .expect("static 2x2")
}

/// Pauli z.
pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)])
        .expect("static 2x2")
}

/// Unit-Bloch-vector observable n̂·σ⃗ for polar angle `polar` and azimuth `azimuth`.
pub fn bloch_observable(polar: f64, azimuth: f64) -> ComplexMatrix {
    let (st, ct) = polar.sin_cos();
    let (sp, cp) = azimuth.sin_cos();
    let (nx, ny, nz) = (st * cp, st * sp, ct);
    let mut m = sigma_x().scale(c64(nx, 0.0));
    m = &m + &sigma_y().scale(c64(ny, 0.0));
    m = &m + &sigma_z().scale(c64(nz, 0.0));
    m
}

/// exp(scale · h) for Hermitian h, via the spectral decomposition.
pub fn herm_expm(h: &ComplexMatrix, scale: f64) -> Result<ComplexMatrix> {
    let decomp = spectral_decompose(h, DEFAULT_GROUP_TOL)?;
    Ok(decomp.apply(|lambda| (scale * lambda).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: C64, b: C64, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} vs {b}");
    }

    #[test]
    fn identity_is_neutral() {
        let id = ComplexMatrix::identity(3);
        let m = ComplexMatrix::from_fn(3, |i, j| c64(i as f64, j as f64));
        assert_eq!((&id * &m).entries(), m.entries());
        assert_eq!((&m * &id).entries(), m.entries());
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (sigma_x(), sigma_y(), sigma_z());
        // σxσy = iσz and cyclic permutations.
        assert_eq!((&x * &y).entries(), z.scale(c64(0., 1.)).entries());
        assert_eq!((&y * &z).entries(), x.scale(c64(0., 1.)).entries());
        assert_eq!((&z * &x).entries(), y.scale(c64(0., 1.)).entries());
        // Squares are the identity.
        for s in [&x, &y, &z] {
            assert_eq!((s * s).entries(), ComplexMatrix::identity(2).entries());
        }
        // [σx, σy] = 2iσz.
        let c = commutator(&x, &y);
        assert_eq!(c.entries(), z.scale(c64(0., 2.)).entries());
        // {σx, σy} = 0.
        assert_eq!(anticommutator(&x, &y).max_abs_entry(), 0.0);
    }

    #[test]
    fn adjoint_and_hermiticity() {
        let m = ComplexMatrix::from_row_major(
            2,
            &[c64(1., 0.), c64(2., 3.), c64(2., -3.), c64(-1., 0.)],
        )
        .unwrap();
        assert_eq!(m.hermiticity_defect(), 0.0);
        assert!(m.is_hermitian(0.0));
        let n = ComplexMatrix::from_row_major(
            2,
            &[c64(1., 0.), c64(2., 3.), c64(2., 3.), c64(-1., 0.)],
        )
        .unwrap();
        assert!(n.hermiticity_defect() > 5.0 && !n.is_hermitian(1e-10));
        assert_eq!(n.adjoint().get(0, 1), c64(2., -3.));
        assert!(n.hermitized().is_hermitian(0.0));
    }

    #[test]
    fn tensor_product_block_structure() {
        let a = ComplexMatrix::from_row_major(2, &[c64(1., 0.), c64(2., 0.), c64(3., 0.), c64(4., 0.)])
            .unwrap();
        let b = ComplexMatrix::identity(3);
        let t = a.tensor_product(&b);
        assert_eq!(t.dim(), 6);
        // Block (i_a, j_a) is a_ij · I₃.
        assert_close(t.get(0, 0), c64(1., 0.), 0.0);
        assert_close(t.get(0, 3), c64(2., 0.), 0.0);
        assert_close(t.get(4, 1), c64(3., 0.), 0.0);
        assert_close(t.get(5, 5), c64(4., 0.), 0.0);
        assert_close(t.get(0, 1), c64(0., 0.), 0.0);
        // Trace is multiplicative.
        assert_close(t.trace(), a.trace() * b.trace(), 1e-15);
    }

    #[test]
    fn partial_trace_recovers_factors() {
        // ρ = ρ_a ⊗ ρ_c with unit traces: tracing out either side recovers the other.
        let rho_a = ComplexMatrix::from_row_major(
            2,
            &[c64(0.7, 0.), c64(0.1, 0.2), c64(0.1, -0.2), c64(0.3, 0.)],
        )
        .unwrap();
        let rho_c = ComplexMatrix::from_row_major(
            3,
            &[
                c64(0.5, 0.),
                c64(0., 0.1),
                c64(0., 0.),
                c64(0., -0.1),
                c64(0.3, 0.),
                c64(0., 0.),
                c64(0., 0.),
                c64(0., 0.),
                c64(0.2, 0.),
            ],
        )
        .unwrap();
        let joint = rho_a.tensor_product(&rho_c);
        let back_a = joint.partial_trace(2, 3, Subsystem::A).unwrap();
        let back_c = joint.partial_trace(2, 3, Subsystem::C).unwrap();
        assert!(back_a.max_abs_diff(&rho_a) <= 1e-15);
        assert!(back_c.max_abs_diff(&rho_c) <= 1e-15);
        // Partial trace preserves the full trace.
        assert_close(back_a.trace(), joint.trace(), 1e-15);
        // Bad split is rejected.
        assert!(joint.partial_trace(4, 2, Subsystem::A).is_err());
    }

    #[test]
    fn trace_of_product_matches_full_product() {
        let a = ComplexMatrix::from_fn(4, |i, j| c64((i + 2 * j) as f64, (i * j) as f64 * 0.1));
        let b = ComplexMatrix::from_fn(4, |i, j| c64((3 * i) as f64 - j as f64, 0.2 * i as f64));
        assert_close(trace_of_product(&a, &b), (&a * &b).trace(), 1e-12);
    }

    #[test]
    fn bloch_observable_axes() {
        assert!(bloch_observable(std::f64::consts::FRAC_PI_2, 0.0).max_abs_diff(&sigma_x()) <= 1e-15);
        assert!(
            bloch_observable(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2)
                .max_abs_diff(&sigma_y())
                <= 1e-15
        );
        assert!(bloch_observable(0.0, 0.0).max_abs_diff(&sigma_z()) <= 1e-15);
        // Any unit direction squares to the identity.
        let n = bloch_observable(1.234, 2.345);
        assert!((&n * &n).max_abs_diff(&ComplexMatrix::identity(2)) <= 1e-15);
    }

    #[test]
    fn herm_expm_matches_diagonal_exponential() {
        let h = ComplexMatrix::from_diagonal(&[1.0, -2.0, 0.5]);
        let e = herm_expm(&h, -1.5).unwrap();
        for (i, lam) in [1.0f64, -2.0, 0.5].iter().enumerate() {
            assert_close(e.get(i, i), c64((-1.5 * lam).exp(), 0.0), 1e-14);
        }
        // Group law exp(aH)·exp(bH) = exp((a+b)H) on a non-diagonal Hermitian matrix.
        let h2 = ComplexMatrix::from_row_major(
            2,
            &[c64(0.3, 0.), c64(0.2, 0.4), c64(0.2, -0.4), c64(-0.7, 0.)],
        )
        .unwrap();
        let lhs = &herm_expm(&h2, 0.7).unwrap() * &herm_expm(&h2, 0.4).unwrap();
        let rhs = herm_expm(&h2, 1.1).unwrap();
        assert!(lhs.max_abs_diff(&rhs) <= 1e-13);
    }
}
