//! Closed-form error-rate expressions: the per-group SER union bound,
//! its building blocks, the BER approximation, the high-SNR asymptote
//! with diversity and coding gain, and the equal-rate partition penalty.

use crate::{Error, Result};

/// Parameters of one bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    /// Total RIS elements `N`.
    pub elements: usize,
    /// Groups `N_Q`.
    pub groups: usize,
    /// Patterns per group `K`.
    pub patterns_per_group: usize,
    /// Receive antennas `n_R`.
    pub rx_antennas: usize,
    /// Linear SNR `E_s / sigma^2`.
    pub snr: f64,
}

/// Exact binomial coefficient in 64-bit integer arithmetic. Panics on
/// overflow; every value needed here is at most `C(16, 8)`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc.checked_mul(n - i).expect("binomial overflow") / (i + 1);
    }
    acc
}

/// PMF of the number of differing groups in an error event: a binomial
/// with success probability `(K-1)/K` conditioned on at least one
/// success, `Pr[zeta = z] = C(N_Q, z) (K-1)^z / (K^{N_Q} - 1)`.
pub fn truncated_binomial_pmf(groups: usize, patterns_per_group: usize, zeta: usize) -> Result<f64> {
    if zeta < 1 || zeta > groups {
        return Err(Error::OutOfSupport { value: zeta, min: 1, max: groups });
    }
    let k = patterns_per_group as f64;
    let num = binomial(groups as u64, zeta as u64) as f64 * libm::pow(k - 1.0, zeta as f64);
    let den = libm::pow(k, groups as f64) - 1.0;
    Ok(num / den)
}

/// Per-error-event effective SNR, `gamma_bar(zeta) = N snr zeta / (2 N_Q)`.
fn gamma_bar(zeta: usize, inputs: &BoundInputs) -> f64 {
    inputs.elements as f64 * inputs.snr * zeta as f64 / (2.0 * inputs.groups as f64)
}

fn mu(zeta: usize, inputs: &BoundInputs) -> f64 {
    let g = gamma_bar(zeta, inputs);
    libm::sqrt(g / (1.0 + g))
}

/// Average pairwise error probability for `zeta` differing groups:
/// `F(zeta) = ((1-mu)/2)^{n_R} sum_k C(n_R-1+k, k) ((1+mu)/2)^k`.
pub fn f_zeta(zeta: usize, inputs: &BoundInputs) -> f64 {
    let nr = inputs.rx_antennas as u64;
    let g = gamma_bar(zeta, inputs);
    let m = mu(zeta, inputs);
    // (1 - mu)/2 computed without cancellation: 1 - mu = 1/((1+g)(1+mu))
    let lo = 0.5 / ((1.0 + g) * (1.0 + m));
    let hi = 0.5 * (1.0 + m);
    let mut sum = 0.0;
    for k in 0..nr {
        sum += binomial(nr - 1 + k, k) as f64 * libm::pow(hi, k as f64);
    }
    libm::pow(lo, nr as f64) * sum
}

/// Approximate union bound on the per-group average SER:
/// `P_e <~ K^{N_Q-1}/(K^{N_Q}-1) sum_zeta C(N_Q, zeta) (K-1)^{zeta+1} F(zeta)`.
pub fn ser_union_bound(inputs: &BoundInputs) -> f64 {
    let k = inputs.patterns_per_group as f64;
    let nq = inputs.groups;
    let prefactor = libm::pow(k, nq as f64 - 1.0) / (libm::pow(k, nq as f64) - 1.0);
    let mut sum = 0.0;
    for zeta in 1..=nq {
        sum += binomial(nq as u64, zeta as u64) as f64
            * libm::pow(k - 1.0, zeta as f64 + 1.0)
            * f_zeta(zeta, inputs);
    }
    prefactor * sum
}

/// Rough BER estimate, `P_b ~= P_e / 2`.
pub fn ber_approx(inputs: &BoundInputs) -> f64 {
    0.5 * ser_union_bound(inputs)
}

/// High-SNR behavior of the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptote {
    /// `P_e ~= G_c^{-n_R} SNR^{-n_R}` evaluated at the given SNR.
    pub ser: f64,
    /// Diversity order, always `n_R`.
    pub diversity_order: usize,
    /// Coding gain `G_c = (2N/N_Q) c^{-1/n_R}`.
    pub coding_gain: f64,
}

fn asymptote_constant(inputs: &BoundInputs) -> f64 {
    let k = inputs.patterns_per_group as f64;
    let nq = inputs.groups;
    let nr = inputs.rx_antennas;
    let mut sum = 0.0;
    for zeta in 1..=nq {
        sum += binomial(nq as u64, zeta as u64) as f64
            * libm::pow(k - 1.0, zeta as f64)
            * libm::pow(zeta as f64, -(nr as f64));
    }
    (k - 1.0) * libm::pow(k, nq as f64 - 1.0) / (2.0 * (libm::pow(k, nq as f64) - 1.0))
        * binomial(2 * nr as u64, nr as u64) as f64
        * sum
}

/// Evaluates the asymptotic SER, the diversity order and the coding gain.
/// The caller is responsible for only trusting the SER value at high
/// effective SNR.
pub fn asymptotic_ser(inputs: &BoundInputs) -> Asymptote {
    let nr = inputs.rx_antennas;
    let c = asymptote_constant(inputs);
    let effective = 2.0 * inputs.elements as f64 / inputs.groups as f64 * inputs.snr;
    let ser = c * libm::pow(effective, -(nr as f64));
    let coding_gain = 2.0 * inputs.elements as f64 / inputs.groups as f64
        * libm::pow(c, -1.0 / nr as f64);
    Asymptote { ser, diversity_order: nr, coding_gain }
}

/// Asymptotic SER ratio between a partitioned system (`N_Q` groups of
/// `K_1` patterns) and the equal-rate unpartitioned system
/// (`K_2 = K_1^{N_Q}`); always at least 1.
pub fn partition_penalty_ratio(rx_antennas: usize, groups: usize, k1: usize) -> f64 {
    let k = k1 as f64;
    let nq = groups;
    let nr = rx_antennas as f64;
    let mut sum = 0.0;
    for zeta in 1..=nq {
        sum += binomial(nq as u64, zeta as u64) as f64
            * libm::pow(k - 1.0, zeta as f64)
            * libm::pow(zeta as f64, -nr);
    }
    let knq = libm::pow(k, nq as f64);
    libm::pow(nq as f64, nr) * (k - 1.0) * libm::pow(k, nq as f64 - 1.0)
        / ((knq - 1.0) * (knq - 1.0))
        * sum
}
