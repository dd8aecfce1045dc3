//! Link-level building blocks for RIS channel signature modulation (RIS-CSM).
//!
//! An RIS with `N` binary (0/pi) phase-shift elements is partitioned into
//! `N_Q` groups of `n = N/N_Q` elements. Each group selects one of `K`
//! Hadamard-derived reflection patterns, embedding `N_Q log2(K)` bits per
//! channel use into the effective channel signature seen by the receiver.
//!
//! The crate is `no_std` (with `alloc`) and side-effect free: every
//! stochastic operation is a pure function of an explicit [`RngStream`],
//! so Monte-Carlo loops parallelize deterministically in a host harness.
//!
//! Module map:
//! - [`numerics`]: complex vectors/matrices, Gaussian sampling, PSD square
//!   root, Gaussian tail function
//! - [`hadamard`]: Sylvester construction and reflection pattern sets
//! - [`channel`]: IID Rayleigh draws and sinc spatial correlation
//! - [`modem`]: bit mapping, effective channel tables, ML detection,
//!   error-rate trials
//! - [`estimation`]: pilot collection and MMSE effective-channel estimation
//! - [`analysis`]: union bound, asymptotic SER, coding gain, partition
//!   penalty
//! - [`capacity`]: Monte-Carlo mutual information and ergodic capacity
//! - [`baselines`]: RIS-MIMO, RIS-GSM and RIS-CIM reference schemes

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod baselines;
pub mod capacity;
pub mod channel;
pub mod constellation;
pub mod estimation;
pub mod hadamard;
pub mod modem;
pub mod numerics;

use core::fmt;

pub use numerics::{CMatrix, Complex64, CVector, RngStream};

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A dimension that must be a power of two is not.
    NotPowerOfTwo { name: &'static str, value: usize },
    /// Dimensions are inconsistent with each other.
    InvalidDimensions { reason: &'static str },
    /// Matrix/vector shapes do not line up.
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },
    /// Input matrix is not Hermitian within tolerance.
    NotHermitian,
    /// Input matrix has an eigenvalue below the negative tolerance.
    IndefiniteMatrix,
    /// A pattern or group index is out of range.
    IndexOutOfRange { index: usize, len: usize },
    /// Fewer than two signatures were supplied.
    TooFewSignatures,
    /// No pilot observations were supplied.
    EmptyPilots,
    /// Bit-block length does not match the spectral efficiency.
    LengthMismatch { expected: usize, got: usize },
    /// Argument outside the support of a distribution.
    OutOfSupport { value: usize, min: usize, max: usize },
    /// The exhaustive candidate set exceeds the supported size.
    CandidateSetTooLarge { size: usize, max: usize },
    /// A scheme parameter combination is invalid.
    InvalidParameters { reason: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPowerOfTwo { name, value } => {
                write!(f, "{name} must be a power of two, got {value}")
            }
            Error::InvalidDimensions { reason } => write!(f, "invalid dimensions: {reason}"),
            Error::DimensionMismatch { expected, got } => write!(
                f,
                "dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::NotHermitian => write!(f, "matrix is not Hermitian within tolerance"),
            Error::IndefiniteMatrix => write!(f, "matrix has a significantly negative eigenvalue"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::TooFewSignatures => write!(f, "need at least two signatures"),
            Error::EmptyPilots => write!(f, "pilot list is empty"),
            Error::LengthMismatch { expected, got } => {
                write!(f, "bit block length {got}, expected {expected}")
            }
            Error::OutOfSupport { value, min, max } => {
                write!(f, "value {value} outside support [{min}, {max}]")
            }
            Error::CandidateSetTooLarge { size, max } => {
                write!(f, "candidate set of size {size} exceeds limit {max}")
            }
            Error::InvalidParameters { reason } => write!(f, "invalid parameters: {reason}"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn is_power_of_two(x: usize) -> bool {
    x > 0 && x & (x - 1) == 0
}
