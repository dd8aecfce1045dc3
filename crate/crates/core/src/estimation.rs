//! MMSE estimation of per-group effective channels from pilot
//! observations.
//!
//! During training the transmitter sends a constant unit symbol with
//! energy `E_t` while one group applies pattern `s_k` and all other
//! groups are deactivated, yielding `tau` observations
//! `z_i = sqrt(E_t) d + w_i` with unit-variance noise. The prior variance
//! of each component of `d` is `n = N/N_Q`, so the MMSE estimate is the
//! scalar shrinkage `d^ = sqrt(E_t) N / (E_t N tau + N_Q) * sum(z_i)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::channel::ChannelRealization;
use crate::hadamard::PatternSet;
use crate::modem::{group_signature, EffectiveChannelTable, SystemConfig};
use crate::numerics::{sample_cn01, CVector, Complex64};
use crate::{Error, Result};

/// Pilot-phase parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingConfig {
    /// Training symbol energy `E_t`.
    pub symbol_energy: f64,
    /// Pilot repetitions `tau` per (group, pattern) slot.
    pub repetitions: usize,
}

impl TrainingConfig {
    /// Training SNR in dB; training noise variance is fixed at 1, so this
    /// is `10 log10(E_t)`.
    pub fn training_snr_db(&self) -> f64 {
        10.0 * libm::log10(self.symbol_energy)
    }

    pub fn from_training_snr_db(snr_db: f64, repetitions: usize) -> Self {
        TrainingConfig { symbol_energy: libm::pow(10.0, snr_db / 10.0), repetitions }
    }
}

/// `tau` pilot observations for group `q`, pattern `k` (both zero-based):
/// `z_i = sqrt(E_t) d + w_i`, `w_i ~ CN(0, I)`.
pub fn collect_pilots<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    patterns: &PatternSet,
    config: &SystemConfig,
    q: usize,
    pattern: usize,
    tconfig: &TrainingConfig,
    rng: &mut R,
) -> Result<Vec<CVector>> {
    if q >= config.groups {
        return Err(Error::IndexOutOfRange { index: q, len: config.groups });
    }
    if pattern >= patterns.count() {
        return Err(Error::IndexOutOfRange { index: pattern, len: patterns.count() });
    }
    let d = group_signature(ch, config, q, patterns.pattern(pattern));
    let amp = libm::sqrt(tconfig.symbol_energy);
    Ok((0..tconfig.repetitions)
        .map(|_| {
            let w = sample_cn01(rng, d.len());
            d.iter().zip(w).map(|(di, wi)| amp * di + wi).collect()
        })
        .collect())
}

/// MMSE estimate of the observed group signature from its pilots.
pub fn mmse_estimate(
    pilots: &[CVector],
    tconfig: &TrainingConfig,
    elements: usize,
    groups: usize,
) -> Result<CVector> {
    if pilots.is_empty() {
        return Err(Error::EmptyPilots);
    }
    let tau = pilots.len() as f64;
    let et = tconfig.symbol_energy;
    let n = elements as f64;
    let coeff = libm::sqrt(et) * n / (et * n * tau + groups as f64);
    let rx = pilots[0].len();
    let mut sum = vec![Complex64::new(0.0, 0.0); rx];
    for z in pilots {
        for (si, zi) in sum.iter_mut().zip(z) {
            *si += zi;
        }
    }
    Ok(sum.into_iter().map(|s| coeff * s).collect())
}

/// Closed-form per-component MSE of the estimator:
/// `N / (E_t N tau + N_Q)`.
pub fn theoretical_mse(elements: usize, groups: usize, symbol_energy: f64, repetitions: usize) -> f64 {
    elements as f64 / (symbol_energy * elements as f64 * repetitions as f64 + groups as f64)
}

/// Estimates all `N_Q * K` group signatures (the full pilot budget of
/// `N_Q K tau` slots) and composes the detection table from them.
pub fn estimate_table<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    patterns: &PatternSet,
    config: &SystemConfig,
    tconfig: &TrainingConfig,
    rng: &mut R,
) -> Result<EffectiveChannelTable> {
    let k = config.patterns_per_group;
    let mut estimates = Vec::with_capacity(config.groups * k);
    for q in 0..config.groups {
        for pattern in 0..k {
            let pilots = collect_pilots(ch, patterns, config, q, pattern, tconfig, rng)?;
            estimates.push(mmse_estimate(&pilots, tconfig, config.elements, config.groups)?);
        }
    }
    EffectiveChannelTable::from_group_signatures(estimates, k, config.groups)
}
