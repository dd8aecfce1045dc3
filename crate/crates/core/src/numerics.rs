//! Dense complex linear algebra, Gaussian sampling and scalar special
//! functions used by the rest of the crate.
//!
//! The matrix type is deliberately minimal: row-major storage, matvec,
//! matmul and a Hermitian eigendecomposition (cyclic Jacobi) backing
//! [`psd_sqrt`]. Correlation matrices here are rank-deficient in the
//! strong-correlation regime, so the square root clamps small negative
//! eigenvalues to zero instead of failing.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub use num_complex::Complex64;

/// Dense complex vector.
pub type CVector = Vec<Complex64>;

/// Deterministic counter-based random stream.
///
/// The same `(seed, stream)` pair yields the same sample sequence on every
/// platform and for every thread count, so per-trial streams can be handed
/// to workers in any order.
#[derive(Debug, Clone)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream(rng)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> core::result::Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

/// Samples `count` IID entries of a circularly-symmetric complex Gaussian
/// with zero mean and unit variance: real and imaginary parts are each
/// `Normal(0, 1/2)`.
pub fn sample_cn01<R: Rng + ?Sized>(rng: &mut R, count: usize) -> CVector {
    let scale = core::f64::consts::FRAC_1_SQRT_2;
    (0..count)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * scale, im * scale)
        })
        .collect()
}

/// Gaussian tail probability `Q(x) = P[N(0,1) > x]`.
pub fn gaussian_tail_q(x: f64) -> f64 {
    0.5 * libm::erfc(x * core::f64::consts::FRAC_1_SQRT_2)
}

/// Squared Euclidean norm.
pub fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Squared Euclidean distance between two equal-length vectors.
pub fn dist_sq(a: &[Complex64], b: &[Complex64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major data. `data.len()` must equal
    /// `rows * cols`.
    pub fn from_data(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: (rows, cols),
                got: (data.len(), 1),
            });
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Real-valued matrix from row-major `f64` data.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        let data = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        CMatrix::from_data(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// `self * x` for a column vector `x`.
    pub fn matvec(&self, x: &[Complex64]) -> Result<CVector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: (self.cols, 1),
                got: (x.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// `self * other`.
    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: (self.cols, self.cols),
                got: (other.rows, other.cols),
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn hermitian_transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Largest entrywise absolute difference to `other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, u)` with the columns of `u` the corresponding
/// orthonormal eigenvectors. Only the Hermitian part of the input is used.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.rows();
    debug_assert_eq!(n, a.cols());
    let mut m = a.clone();
    // Work on the exact Hermitian part so the diagonal stays real.
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut u = CMatrix::identity(n);
    let scale = m.max_abs().max(1.0);
    let tol = 1e-15 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = m[(p, q)];
                let gn = g.norm();
                if gn <= tol * 1e-2 {
                    continue;
                }
                // Phase that makes the pivot real, then a real Jacobi
                // rotation zeroing it.
                let phase = g / gn; // e^{i phi}
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * gn);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                // Column rotation V: block [[c, s], [-s*conj(phase), c*conj(phase)]]
                let vpq = Complex64::new(s, 0.0);
                let vpp = Complex64::new(c, 0.0);
                let vqp = -phase.conj() * s;
                let vqq = phase.conj() * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * vpp + akq * vqp;
                    m[(k, q)] = akp * vpq + akq * vqq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
                    m[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
                }
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let ukp = u[(k, p)];
                    let ukq = u[(k, q)];
                    u[(k, p)] = ukp * vpp + ukq * vqp;
                    u[(k, q)] = ukp * vpq + ukq * vqq;
                }
            }
        }
    }
    let eig = (0..n).map(|i| m[(i, i)].re).collect();
    (eig, u)
}

/// Hermitian square root `S` of a positive semidefinite matrix `R`, with
/// `S * S = R` within `tol` in max-entry norm.
///
/// Eigenvalues in `[-tol * lambda_max, 0)` are clamped to zero; anything
/// more negative is rejected as indefinite. Asymmetry beyond
/// `tol * max|entry|` is rejected as non-Hermitian.
pub fn psd_sqrt(r: &CMatrix, tol: f64) -> Result<CMatrix> {
    let n = r.rows();
    if n != r.cols() {
        return Err(Error::DimensionMismatch { expected: (n, n), got: (r.rows(), r.cols()) });
    }
    let scale = r.max_abs().max(f64::MIN_POSITIVE);
    for i in 0..n {
        if libm::fabs(r[(i, i)].im) > tol * scale {
            return Err(Error::NotHermitian);
        }
        for j in i + 1..n {
            if (r[(i, j)] - r[(j, i)].conj()).norm() > tol * scale {
                return Err(Error::NotHermitian);
            }
        }
    }
    let (eig, u) = hermitian_eigen(r);
    let lambda_max = eig.iter().cloned().fold(0.0, f64::max);
    let mut sqrt_eig = Vec::with_capacity(n);
    for &lambda in &eig {
        if lambda < -tol * lambda_max.max(1.0) {
            return Err(Error::IndefiniteMatrix);
        }
        sqrt_eig.push(libm::sqrt(lambda.max(0.0)));
    }
    // S = U sqrt(D) U^H, re-Hermitized entrywise.
    let mut s = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += u[(i, k)] * sqrt_eig[k] * u[(j, k)].conj();
            }
            s[(i, j)] = acc;
            s[(j, i)] = acc.conj();
        }
        s[(i, i)] = Complex64::new(s[(i, i)].re, 0.0);
    }
    Ok(s)
}

/// Default relative tolerance for [`psd_sqrt`].
pub const PSD_SQRT_TOL: f64 = 1e-12;
