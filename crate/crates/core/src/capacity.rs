//! Monte-Carlo mutual information and ergodic capacity of the RIS-CSM
//! input set under uniform `(k, x)` inputs.
//!
//! For a fixed channel, `I = log2(M K^{N_Q}) - E[log2 S]` with
//! `S = sum_{k', x'} exp((||n||^2 - ||y - sqrt(E_s) d_{k'} x'||^2) / sigma^2)`
//! sampled over uniform inputs and fresh noise. The exponent of the
//! transmitted candidate is exactly zero, which anchors the max-shifted
//! log-sum-exp and avoids recomputing `exp(-||n||^2/sigma^2)`.

use alloc::vec::Vec;

use rand::Rng;

use crate::channel::{apply_correlation, draw_iid};
use crate::hadamard::PatternSet;
use crate::modem::{build_effective_table, EffectiveChannelTable, SystemConfig, MAX_CANDIDATES};
use crate::numerics::{norm_sq, sample_cn01, CMatrix, Complex64, RngStream};
use crate::{Error, Result};

/// One capacity point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityEstimate {
    /// Linear SNR of the evaluated configuration.
    pub snr: f64,
    /// Estimated mutual information in bits per channel use.
    pub bits_per_use: f64,
    /// Standard error over the outer (channel) samples.
    pub std_err: f64,
    pub outer_samples: usize,
    pub inner_samples: usize,
}

/// Mutual information in bpcu for one channel realization, estimated
/// from `inner_samples` uniform `(k, x)` inputs with fresh noise each.
/// The result is clamped to `[0, log2(M K^{N_Q})]`.
pub fn mutual_information_fixed_channel<R: Rng + ?Sized>(
    table: &EffectiveChannelTable,
    constellation: &[Complex64],
    config: &SystemConfig,
    inner_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let candidates = table.signatures().len() * constellation.len();
    if candidates > MAX_CANDIDATES {
        return Err(Error::CandidateSetTooLarge { size: candidates, max: MAX_CANDIDATES });
    }
    let max_bits = libm::log2(candidates as f64);
    let amp = libm::sqrt(config.symbol_energy);
    let sigma2 = config.noise_var;
    let sigma = libm::sqrt(sigma2);
    let ln2 = core::f64::consts::LN_2;
    let mut exponents = Vec::with_capacity(candidates);
    let mut acc = 0.0f64;
    for _ in 0..inner_samples {
        let flat = rng.gen_range(0..table.signatures().len());
        let sym = rng.gen_range(0..constellation.len());
        let noise = sample_cn01(rng, config.rx_antennas);
        let d = table.signature(flat);
        let x = constellation[sym];
        let y: Vec<Complex64> = d
            .iter()
            .zip(&noise)
            .map(|(di, ni)| amp * di * x + sigma * ni)
            .collect();
        let log2_sum = if sigma2 == 0.0 {
            // noiseless: the marginal collapses onto exact signature matches
            let mut matches = 0usize;
            for dp in table.signatures() {
                for &xp in constellation {
                    let dist: f64 = y
                        .iter()
                        .zip(dp)
                        .map(|(yi, di)| (yi - amp * di * xp).norm_sqr())
                        .sum();
                    if dist == 0.0 {
                        matches += 1;
                    }
                }
            }
            libm::log2(matches as f64)
        } else {
            let noise_energy = norm_sq(&noise) * sigma2;
            exponents.clear();
            for dp in table.signatures() {
                for &xp in constellation {
                    let dist: f64 = y
                        .iter()
                        .zip(dp)
                        .map(|(yi, di)| (yi - amp * di * xp).norm_sqr())
                        .sum();
                    exponents.push((noise_energy - dist) / sigma2);
                }
            }
            let shift = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = exponents.iter().map(|&e| libm::exp(e - shift)).sum();
            (shift + libm::log(sum)) / ln2
        };
        acc += max_bits - log2_sum;
    }
    Ok((acc / inner_samples as f64).clamp(0.0, max_bits))
}

/// Ergodic capacity: mean of the fixed-channel mutual information over
/// `outer_samples` fresh channel draws. Outer draw `t` uses stream
/// `stream_base + t`, so the estimate is independent of evaluation order.
pub fn ergodic_capacity(
    config: &SystemConfig,
    patterns: &PatternSet,
    r_sqrt: Option<&CMatrix>,
    outer_samples: usize,
    inner_samples: usize,
    seed: u64,
    stream_base: u64,
) -> Result<CapacityEstimate> {
    config.validate()?;
    let constellation = crate::constellation::qam(config.mod_order)?;
    let mut values = Vec::with_capacity(outer_samples);
    for t in 0..outer_samples {
        let mut rng = RngStream::new(seed, stream_base + t as u64);
        let mut ch = draw_iid(config.elements, config.rx_antennas, &mut rng);
        if let Some(r) = r_sqrt {
            ch = apply_correlation(&ch, r)?;
        }
        let table = build_effective_table(&ch, patterns, config)?;
        values.push(mutual_information_fixed_channel(
            &table,
            &constellation,
            config,
            inner_samples,
            &mut rng,
        )?);
    }
    let mean = values.iter().sum::<f64>() / outer_samples as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (outer_samples as f64 - 1.0).max(1.0);
    Ok(CapacityEstimate {
        snr: config.snr(),
        bits_per_use: mean,
        std_err: libm::sqrt(var / outer_samples as f64),
        outer_samples,
        inner_samples,
    })
}
