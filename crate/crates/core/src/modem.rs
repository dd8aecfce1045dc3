//! The RIS-CSM transceiver: bit mapping, effective channel tables,
//! received-signal synthesis, exhaustive ML detection and error counting.
//!
//! Group `q` (zero-based) owns the contiguous elements
//! `q*n .. (q+1)*n` of the RIS. Its effective channel for pattern `k` is
//! `d = G_q diag(h_q) s_k`; the supersymbol signature is the sum of the
//! per-group signatures.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::channel::{apply_correlation, draw_iid, ChannelRealization};
use crate::estimation::{estimate_table, TrainingConfig};
use crate::hadamard::{entry, PatternSet};
use crate::numerics::{dist_sq, sample_cn01, CMatrix, CVector, Complex64, RngStream};
use crate::{is_power_of_two, Error, Result};

/// Largest exhaustive candidate set the table builder will materialize.
pub const MAX_CANDIDATES: usize = 1 << 16;

/// All scalar parameters of one RIS-CSM experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Total RIS elements `N`.
    pub elements: usize,
    /// Number of groups `N_Q`.
    pub groups: usize,
    /// Patterns per group `K`.
    pub patterns_per_group: usize,
    /// Receive antennas `n_R`.
    pub rx_antennas: usize,
    /// Transmitter constellation order `M`; 1 means unmodulated carrier.
    pub mod_order: usize,
    /// Symbol energy `E_s`.
    pub symbol_energy: f64,
    /// Noise variance `sigma^2`.
    pub noise_var: f64,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if !is_power_of_two(self.elements) {
            return Err(Error::NotPowerOfTwo { name: "N", value: self.elements });
        }
        if !is_power_of_two(self.patterns_per_group) {
            return Err(Error::NotPowerOfTwo { name: "K", value: self.patterns_per_group });
        }
        if !is_power_of_two(self.mod_order) {
            return Err(Error::NotPowerOfTwo { name: "M", value: self.mod_order });
        }
        if self.groups == 0 || self.elements % self.groups != 0 {
            return Err(Error::InvalidDimensions { reason: "N_Q must divide N" });
        }
        let n = self.elements / self.groups;
        if !is_power_of_two(n) {
            return Err(Error::NotPowerOfTwo { name: "n = N/N_Q", value: n });
        }
        if self.patterns_per_group > n {
            return Err(Error::InvalidDimensions { reason: "K must not exceed n = N/N_Q" });
        }
        if self.rx_antennas == 0 {
            return Err(Error::InvalidDimensions { reason: "n_R must be positive" });
        }
        if !(self.symbol_energy >= 0.0) || !(self.noise_var >= 0.0) {
            return Err(Error::InvalidParameters { reason: "E_s and sigma^2 must be nonnegative" });
        }
        Ok(())
    }

    /// Elements per group, `n = N / N_Q`.
    pub fn group_size(&self) -> usize {
        self.elements / self.groups
    }

    /// Index bits per channel use, `N_Q log2(K)`.
    pub fn index_bits(&self) -> usize {
        self.groups * self.patterns_per_group.trailing_zeros() as usize
    }

    /// Modulation bits per channel use, `log2(M)`.
    pub fn mod_bits(&self) -> usize {
        self.mod_order.trailing_zeros() as usize
    }

    /// Spectral efficiency `R = log2(M) + N_Q log2(K)` in bpcu.
    pub fn spectral_efficiency(&self) -> usize {
        self.mod_bits() + self.index_bits()
    }

    /// Linear SNR, `E_s / sigma^2`.
    pub fn snr(&self) -> f64 {
        self.symbol_energy / self.noise_var
    }

    /// Number of distinct supersymbols, `K^{N_Q}`.
    pub fn supersymbols(&self) -> usize {
        self.patterns_per_group.pow(self.groups as u32)
    }
}

/// One transmitted (or detected) message: a pattern index per group plus
/// the transmit-symbol index. Pattern and symbol indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexVector {
    pub group_patterns: Vec<usize>,
    pub symbol: usize,
}

impl IndexVector {
    /// Flat supersymbol index with group 0 most significant.
    pub fn flat_index(&self, k: usize) -> usize {
        self.group_patterns.iter().fold(0, |acc, &p| acc * k + p)
    }

    pub fn from_flat(flat: usize, k: usize, groups: usize) -> Self {
        let mut rem = flat;
        let mut group_patterns = vec![0usize; groups];
        for q in (0..groups).rev() {
            group_patterns[q] = rem % k;
            rem /= k;
        }
        IndexVector { group_patterns, symbol: 0 }
    }
}

/// Maps a block of `R` bits to an index vector: `N_Q` sub-blocks of
/// `log2(K)` index bits (MSB first), then `log2(M)` modulation bits.
pub fn map_bits(bits: &[u8], config: &SystemConfig) -> Result<IndexVector> {
    let r = config.spectral_efficiency();
    if bits.len() != r {
        return Err(Error::LengthMismatch { expected: r, got: bits.len() });
    }
    let kb = config.patterns_per_group.trailing_zeros() as usize;
    let mut group_patterns = Vec::with_capacity(config.groups);
    let mut pos = 0;
    for _ in 0..config.groups {
        let mut v = 0usize;
        for _ in 0..kb {
            v = (v << 1) | bits[pos] as usize;
            pos += 1;
        }
        group_patterns.push(v);
    }
    let mut symbol = 0usize;
    for _ in 0..config.mod_bits() {
        symbol = (symbol << 1) | bits[pos] as usize;
        pos += 1;
    }
    Ok(IndexVector { group_patterns, symbol })
}

/// Inverse of [`map_bits`].
pub fn demap_bits(iv: &IndexVector, config: &SystemConfig) -> Vec<u8> {
    let kb = config.patterns_per_group.trailing_zeros() as usize;
    let mut bits = Vec::with_capacity(config.spectral_efficiency());
    for &p in &iv.group_patterns {
        for b in (0..kb).rev() {
            bits.push(((p >> b) & 1) as u8);
        }
    }
    for b in (0..config.mod_bits()).rev() {
        bits.push(((iv.symbol >> b) & 1) as u8);
    }
    bits
}

/// Per-group and composed effective channel signatures for one channel
/// realization.
#[derive(Debug, Clone)]
pub struct EffectiveChannelTable {
    k: usize,
    groups: usize,
    rx: usize,
    /// `groups * k` signatures of length `n_R`, indexed `q * k + pattern`.
    group_signatures: Vec<CVector>,
    /// `k^groups` composed signatures.
    composed: Vec<CVector>,
}

impl EffectiveChannelTable {
    pub fn pattern_count(&self) -> usize {
        self.k
    }

    pub fn group_count(&self) -> usize {
        self.groups
    }

    pub fn rx_antennas(&self) -> usize {
        self.rx
    }

    pub fn group_signature(&self, q: usize, pattern: usize) -> &CVector {
        &self.group_signatures[q * self.k + pattern]
    }

    /// Composed signature for a flat supersymbol index.
    pub fn signature(&self, flat: usize) -> &CVector {
        &self.composed[flat]
    }

    pub fn signatures(&self) -> &[CVector] {
        &self.composed
    }

    /// Builds a table directly from per-group signatures (used with
    /// estimated channels).
    pub fn from_group_signatures(
        group_signatures: Vec<CVector>,
        k: usize,
        groups: usize,
    ) -> Result<Self> {
        if group_signatures.len() != k * groups || group_signatures.is_empty() {
            return Err(Error::InvalidDimensions { reason: "need K signatures per group" });
        }
        let rx = group_signatures[0].len();
        let composed = compose_all(&group_signatures, k, groups, rx)?;
        Ok(EffectiveChannelTable { k, groups, rx, group_signatures, composed })
    }
}

/// Effective channel of one group for one pattern:
/// `d = G_q diag(h_q) s`, where `s` is a `{+1, -1}` vector.
pub fn group_signature(
    ch: &ChannelRealization,
    config: &SystemConfig,
    q: usize,
    pattern: &[i8],
) -> CVector {
    let n = config.group_size();
    let base = q * n;
    (0..config.rx_antennas)
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let e = ch.g[(i, base + j)] * ch.h[base + j];
                if pattern[j] > 0 {
                    acc += e;
                } else {
                    acc -= e;
                }
            }
            acc
        })
        .collect()
}

/// Builds all `N_Q * K` group signatures and the `K^{N_Q}` composed
/// signatures for one channel realization.
///
/// Exploits the tiled structure of the patterns: element products are
/// first folded into `K` per-residue partial sums per group and antenna,
/// then combined with the `K x K` Hadamard signs, instead of touching all
/// `n` elements once per pattern.
pub fn build_effective_table(
    ch: &ChannelRealization,
    patterns: &PatternSet,
    config: &SystemConfig,
) -> Result<EffectiveChannelTable> {
    config.validate()?;
    let n = config.group_size();
    if patterns.group_size() != n || patterns.count() != config.patterns_per_group {
        return Err(Error::InvalidDimensions { reason: "pattern set does not match config" });
    }
    if ch.elements() != config.elements || ch.rx_antennas() != config.rx_antennas {
        return Err(Error::DimensionMismatch {
            expected: (config.rx_antennas, config.elements),
            got: (ch.rx_antennas(), ch.elements()),
        });
    }
    let k = config.patterns_per_group;
    let rx = config.rx_antennas;
    let mut group_signatures = Vec::with_capacity(config.groups * k);
    let mut residue = vec![Complex64::new(0.0, 0.0); k];
    for q in 0..config.groups {
        let base = q * n;
        let start = group_signatures.len();
        for _ in 0..k {
            group_signatures.push(CVector::with_capacity(rx));
        }
        for i in 0..rx {
            // fold e_j = G[i][base+j] * h[base+j] by residue class j mod K
            residue.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            let grow = ch.g.row(i);
            for j in 0..n {
                residue[j % k] += grow[base + j] * ch.h[base + j];
            }
            for m in 0..k {
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, r) in residue.iter().enumerate() {
                    if entry(m, c) > 0 {
                        acc += r;
                    } else {
                        acc -= r;
                    }
                }
                group_signatures[start + m].push(acc);
            }
        }
    }
    let composed = compose_all(&group_signatures, k, config.groups, rx)?;
    Ok(EffectiveChannelTable { k, groups: config.groups, rx, group_signatures, composed })
}

fn compose_all(
    group_signatures: &[CVector],
    k: usize,
    groups: usize,
    rx: usize,
) -> Result<Vec<CVector>> {
    let total = k.checked_pow(groups as u32).filter(|&t| t <= MAX_CANDIDATES).ok_or(
        Error::CandidateSetTooLarge {
            size: k.saturating_pow(groups as u32),
            max: MAX_CANDIDATES,
        },
    )?;
    let mut composed = Vec::with_capacity(total);
    for flat in 0..total {
        let mut d = vec![Complex64::new(0.0, 0.0); rx];
        let mut rem = flat;
        for q in (0..groups).rev() {
            let p = rem % k;
            rem /= k;
            for (di, si) in d.iter_mut().zip(&group_signatures[q * k + p]) {
                *di += si;
            }
        }
        composed.push(d);
    }
    Ok(composed)
}

/// Received signal `y = sqrt(E_s) d x + n` with `n ~ CN(0, sigma^2 I)`.
pub fn transmit<R: Rng + ?Sized>(
    d: &[Complex64],
    x: Complex64,
    config: &SystemConfig,
    rng: &mut R,
) -> CVector {
    let amp = libm::sqrt(config.symbol_energy);
    let sigma = libm::sqrt(config.noise_var);
    let noise = sample_cn01(rng, d.len());
    d.iter().zip(noise).map(|(di, ni)| amp * di * x + sigma * ni).collect()
}

/// Exhaustive ML detection: argmin over all `(k, x)` of
/// `|| y - sqrt(E_s) d_k x ||^2`. Ties resolve to the smallest
/// lexicographic `(k, x)`.
pub fn ml_detect(
    y: &[Complex64],
    table: &EffectiveChannelTable,
    constellation: &[Complex64],
    config: &SystemConfig,
) -> IndexVector {
    let amp = libm::sqrt(config.symbol_energy);
    let mut best = f64::INFINITY;
    let mut best_flat = 0usize;
    let mut best_sym = 0usize;
    for (flat, d) in table.signatures().iter().enumerate() {
        for (sym, &x) in constellation.iter().enumerate() {
            let ax = amp * x;
            let metric: f64 =
                y.iter().zip(d).map(|(yi, di)| (yi - ax * di).norm_sqr()).sum();
            if metric < best {
                best = metric;
                best_flat = flat;
                best_sym = sym;
            }
        }
    }
    let mut iv = IndexVector::from_flat(best_flat, table.pattern_count(), table.group_count());
    iv.symbol = best_sym;
    iv
}

/// Receiver-side channel knowledge used by [`run_trial`].
#[derive(Debug, Clone, PartialEq)]
pub enum CsiMode {
    /// Detection table built from the true channel.
    Perfect,
    /// Detection table built from MMSE pilot estimates.
    Estimated(TrainingConfig),
}

/// Everything fixed across the trials of one Monte-Carlo point.
#[derive(Debug, Clone)]
pub struct TrialSetup<'a> {
    pub config: &'a SystemConfig,
    pub patterns: &'a PatternSet,
    pub csi: CsiMode,
    /// Correlation square root applied to each fresh channel draw.
    pub r_sqrt: Option<&'a CMatrix>,
}

/// Error statistics accumulated over trials. Merging two counters by
/// field-wise addition is exact, so trial batches may be aggregated in
/// any order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ErrorCounters {
    pub trials: u64,
    pub supersymbol_errors: u64,
    pub group_errors: u64,
    pub bit_errors: u64,
}

impl ErrorCounters {
    pub fn merge(&mut self, other: &ErrorCounters) {
        self.trials += other.trials;
        self.supersymbol_errors += other.supersymbol_errors;
        self.group_errors += other.group_errors;
        self.bit_errors += other.bit_errors;
    }

    /// Per-group index symbol error rate.
    pub fn per_group_ser(&self, config: &SystemConfig) -> f64 {
        self.group_errors as f64 / (self.trials as f64 * config.groups as f64)
    }

    pub fn supersymbol_ser(&self) -> f64 {
        self.supersymbol_errors as f64 / self.trials as f64
    }

    pub fn ber(&self, config: &SystemConfig) -> f64 {
        self.bit_errors as f64 / (self.trials as f64 * config.spectral_efficiency() as f64)
    }
}

/// Runs one trial: fresh channel, uniform message, ML detection.
pub fn run_trial(setup: &TrialSetup<'_>, rng: &mut RngStream) -> Result<ErrorCounters> {
    let config = setup.config;
    let mut ch = draw_iid(config.elements, config.rx_antennas, rng);
    if let Some(r_sqrt) = setup.r_sqrt {
        ch = apply_correlation(&ch, r_sqrt)?;
    }
    let table = build_effective_table(&ch, setup.patterns, config)?;
    let detect_table = match &setup.csi {
        CsiMode::Perfect => None,
        CsiMode::Estimated(tc) => Some(estimate_table(&ch, setup.patterns, config, tc, rng)?),
    };
    let constellation = crate::constellation::qam(config.mod_order)?;

    let k = config.patterns_per_group;
    let group_patterns: Vec<usize> = (0..config.groups).map(|_| rng.gen_range(0..k)).collect();
    let symbol = rng.gen_range(0..config.mod_order);
    let tx = IndexVector { group_patterns, symbol };

    let y = transmit(
        table.signature(tx.flat_index(k)),
        constellation[tx.symbol],
        config,
        rng,
    );
    let rx = ml_detect(&y, detect_table.as_ref().unwrap_or(&table), &constellation, config);

    let mut group_errors = 0u64;
    let mut bit_errors = 0u64;
    for (a, b) in tx.group_patterns.iter().zip(&rx.group_patterns) {
        if a != b {
            group_errors += 1;
        }
        bit_errors += (a ^ b).count_ones() as u64;
    }
    bit_errors += (tx.symbol ^ rx.symbol).count_ones() as u64;
    Ok(ErrorCounters {
        trials: 1,
        supersymbol_errors: (tx.group_patterns != rx.group_patterns) as u64,
        group_errors,
        bit_errors,
    })
}

/// Sequential trial loop; trial `t` uses stream `stream_base + t` so
/// results match any parallel execution with the same stream layout.
pub fn run_error_trials(
    setup: &TrialSetup<'_>,
    trials: u64,
    seed: u64,
    stream_base: u64,
) -> Result<ErrorCounters> {
    let mut total = ErrorCounters::default();
    for t in 0..trials {
        let mut rng = RngStream::new(seed, stream_base + t);
        total.merge(&run_trial(setup, &mut rng)?);
    }
    Ok(total)
}

/// Minimum Euclidean distance over all unordered pairs of composed
/// signatures (at `E_s = 1` scaling).
pub fn min_pairwise_distance(table: &EffectiveChannelTable) -> Result<f64> {
    let sigs = table.signatures();
    if sigs.len() < 2 {
        return Err(Error::TooFewSignatures);
    }
    let mut best = f64::INFINITY;
    for i in 0..sigs.len() {
        for j in i + 1..sigs.len() {
            best = best.min(dist_sq(&sigs[i], &sigs[j]));
        }
    }
    Ok(libm::sqrt(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::pattern_set;
    use crate::numerics::norm_sq;

    fn config(n: usize, nq: usize, k: usize, nr: usize, m: usize) -> SystemConfig {
        SystemConfig {
            elements: n,
            groups: nq,
            patterns_per_group: k,
            rx_antennas: nr,
            mod_order: m,
            symbol_energy: 1.0,
            noise_var: 1.0,
        }
    }

    #[test]
    fn spectral_efficiency_formula() {
        assert_eq!(config(16, 1, 4, 1, 1).spectral_efficiency(), 2);
        assert_eq!(config(128, 2, 16, 2, 4).spectral_efficiency(), 10);
    }

    #[test]
    fn map_bits_table_example() {
        // N=16, N_Q=1, K=4, bits "01" selects the alternating pattern.
        let cfg = config(16, 1, 4, 1, 1);
        let iv = map_bits(&[0, 1], &cfg).unwrap();
        assert_eq!(iv.group_patterns, vec![1]);
        let patterns = pattern_set(16, 4).unwrap();
        let alt: Vec<i8> = (0..16).map(|j| if j % 2 == 0 { 1 } else { -1 }).collect();
        assert_eq!(patterns.pattern(iv.group_patterns[0]), &alt[..]);
    }

    #[test]
    fn map_bits_zero_and_length_check() {
        let cfg = config(64, 2, 4, 1, 4);
        let iv = map_bits(&[0; 6], &cfg).unwrap();
        assert_eq!(iv.group_patterns, vec![0, 0]);
        assert_eq!(iv.symbol, 0);
        assert!(matches!(map_bits(&[0; 5], &cfg), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn map_demap_roundtrip_exhaustive() {
        let cfg = config(32, 2, 4, 1, 1);
        let r = cfg.spectral_efficiency();
        for msg in 0..(1usize << r) {
            let bits: Vec<u8> = (0..r).rev().map(|b| ((msg >> b) & 1) as u8).collect();
            let iv = map_bits(&bits, &cfg).unwrap();
            assert_eq!(demap_bits(&iv, &cfg), bits);
        }
    }

    #[test]
    fn all_ones_pattern_collapses_to_channel_sum() {
        let cfg = config(8, 1, 1, 2, 1);
        let mut rng = RngStream::new(1, 0);
        let ch = draw_iid(8, 2, &mut rng);
        let patterns = pattern_set(8, 1).unwrap();
        let table = build_effective_table(&ch, &patterns, &cfg).unwrap();
        for i in 0..2 {
            let direct: Complex64 = (0..8).map(|j| ch.g[(i, j)] * ch.h[j]).sum();
            assert!((table.signature(0)[i] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn composed_signatures_match_direct_evaluation() {
        // brute force per element, N = 8, N_Q = 2, K = 4
        let cfg = config(8, 2, 4, 2, 1);
        let patterns = pattern_set(4, 4).unwrap();
        let mut rng = RngStream::new(2, 0);
        let ch = draw_iid(8, 2, &mut rng);
        let table = build_effective_table(&ch, &patterns, &cfg).unwrap();
        for flat in 0..16 {
            let iv = IndexVector::from_flat(flat, 4, 2);
            for i in 0..2 {
                let mut direct = Complex64::new(0.0, 0.0);
                for q in 0..2 {
                    let s = patterns.pattern(iv.group_patterns[q]);
                    for j in 0..4 {
                        let idx = q * 4 + j;
                        direct += ch.g[(i, idx)] * ch.h[idx] * s[j] as f64;
                    }
                }
                assert!(
                    (table.signature(flat)[i] - direct).norm() < 1e-10,
                    "flat {flat} antenna {i}"
                );
            }
        }
        // additivity against group signatures
        for flat in 0..16 {
            let iv = IndexVector::from_flat(flat, 4, 2);
            for i in 0..2 {
                let sum: Complex64 = (0..2)
                    .map(|q| table.group_signature(q, iv.group_patterns[q])[i])
                    .sum();
                assert!((table.signature(flat)[i] - sum).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn signature_variance_scales_with_elements() {
        let cfg = config(16, 1, 2, 1, 1);
        let patterns = pattern_set(16, 2).unwrap();
        let mut rng = RngStream::new(7, 0);
        let draws = 100_000usize;
        let mut var = 0.0;
        for _ in 0..draws {
            let ch = draw_iid(16, 1, &mut rng);
            let table = build_effective_table(&ch, &patterns, &cfg).unwrap();
            var += table.signature(1)[0].norm_sqr();
        }
        var /= draws as f64;
        assert!((var - 16.0).abs() / 16.0 < 0.03, "variance {var}");
    }

    #[test]
    fn signature_difference_variance() {
        // For k, k' differing in |D| groups, per-entry variance of
        // d_k - d_k' is 2 n |D|.
        let cfg = config(32, 2, 4, 1, 1);
        let patterns = pattern_set(16, 4).unwrap();
        let mut rng = RngStream::new(8, 0);
        let draws = 100_000usize;
        let mut var1 = 0.0; // differ in one group
        let mut var2 = 0.0; // differ in both groups
        for _ in 0..draws {
            let ch = draw_iid(32, 1, &mut rng);
            let table = build_effective_table(&ch, &patterns, &cfg).unwrap();
            let d00 = table.signature(0);
            let d01 = table.signature(1);
            let d12 = table.signature(4 + 2);
            var1 += (d00[0] - d01[0]).norm_sqr();
            var2 += (d00[0] - d12[0]).norm_sqr();
        }
        var1 /= draws as f64;
        var2 /= draws as f64;
        let n = 16.0;
        assert!((var1 - 2.0 * n).abs() / (2.0 * n) < 0.03, "var1 {var1}");
        assert!((var2 - 4.0 * n).abs() / (4.0 * n) < 0.03, "var2 {var2}");
    }

    #[test]
    fn transmit_limits() {
        let mut cfg = config(8, 1, 2, 2, 1);
        let patterns = pattern_set(8, 2).unwrap();
        let mut rng = RngStream::new(3, 0);
        let ch = draw_iid(8, 2, &mut rng);
        let table = build_effective_table(&ch, &patterns, &cfg).unwrap();
        let x = Complex64::new(1.0, 0.0);

        cfg.noise_var = 0.0;
        let y = transmit(table.signature(1), x, &cfg, &mut rng);
        for (yi, di) in y.iter().zip(table.signature(1)) {
            assert!((yi - di).norm() < 1e-12);
        }

        cfg.noise_var = 1.0;
        cfg.symbol_energy = 0.0;
        let draws = 100_000usize;
        let mut p = 0.0;
        for _ in 0..draws {
            let y = transmit(table.signature(1), x, &cfg, &mut rng);
            p += y[0].norm_sqr();
        }
        p /= draws as f64;
        assert!((p - 1.0).abs() < 0.02, "noise power {p}");
    }

    #[test]
    fn transmit_received_power() {
        let cfg = SystemConfig { symbol_energy: 2.0, noise_var: 0.5, ..config(8, 1, 2, 2, 1) };
        let patterns = pattern_set(8, 2).unwrap();
        let mut rng = RngStream::new(4, 0);
        let ch = draw_iid(8, 2, &mut rng);
        let table = build_effective_table(&ch, &patterns, &cfg).unwrap();
        let d = table.signature(1).clone();
        let expect = cfg.symbol_energy * norm_sq(&d) + 2.0 * cfg.noise_var;
        let draws = 100_000usize;
        let mut p = 0.0;
        for _ in 0..draws {
            let y = transmit(&d, Complex64::new(1.0, 0.0), &cfg, &mut rng);
            p += norm_sq(&y);
        }
        p /= draws as f64;
        assert!((p - expect).abs() / expect < 0.02, "power {p} expect {expect}");
    }

    #[test]
    fn ml_detect_zero_noise_and_degenerate() {
        let mut cfg = config(16, 2, 4, 2, 1);
        cfg.noise_var = 0.0;
        let patterns = pattern_set(8, 4).unwrap();
        let constellation = crate::constellation::qam(1).unwrap();
        let mut rng = RngStream::new(5, 0);
        let ch = draw_iid(16, 2, &mut rng);
        let table = build_effective_table(&ch, &patterns, &cfg).unwrap();
        for flat in 0..16 {
            let y = transmit(table.signature(flat), constellation[0], &cfg, &mut rng);
            let det = ml_detect(&y, &table, &constellation, &cfg);
            assert_eq!(det.flat_index(4), flat);
        }
        // single candidate always returned
        let cfg1 = config(8, 1, 1, 2, 1);
        let p1 = pattern_set(8, 1).unwrap();
        let t1 = build_effective_table(&ch_sub(&ch, 8), &p1, &cfg1).unwrap();
        let det = ml_detect(&[Complex64::new(0.3, -0.7), Complex64::new(0.1, 0.2)], &t1, &constellation, &cfg1);
        assert_eq!(det.group_patterns, vec![0]);
    }

    fn ch_sub(ch: &ChannelRealization, n: usize) -> ChannelRealization {
        let h = ch.h[..n].to_vec();
        let mut data = Vec::new();
        for i in 0..ch.rx_antennas() {
            data.extend_from_slice(&ch.g.row(i)[..n]);
        }
        ChannelRealization { h, g: CMatrix::from_data(ch.rx_antennas(), n, data).unwrap() }
    }

    #[test]
    fn ml_matches_brute_force_oracle() {
        let cfg = config(16, 2, 4, 2, 1);
        let patterns = pattern_set(8, 4).unwrap();
        let constellation = crate::constellation::qam(1).unwrap();
        let mut rng = RngStream::new(6, 0);
        for _ in 0..50 {
            let ch = draw_iid(16, 2, &mut rng);
            let table = build_effective_table(&ch, &patterns, &cfg).unwrap();
            let flat = rng.gen_range(0..16);
            let y = transmit(table.signature(flat), constellation[0], &cfg, &mut rng);
            let det = ml_detect(&y, &table, &constellation, &cfg);
            // independent distance list
            let amp = cfg.symbol_energy.sqrt();
            let mut best = (f64::INFINITY, 0usize);
            for cand in 0..16 {
                let d: f64 = y
                    .iter()
                    .zip(table.signature(cand))
                    .map(|(yi, di)| (yi - amp * di).norm_sqr())
                    .sum();
                if d < best.0 {
                    best = (d, cand);
                }
            }
            assert_eq!(det.flat_index(4), best.1);
        }
    }

    #[test]
    fn ml_invariant_to_common_scaling() {
        let cfg = config(16, 1, 8, 2, 1);
        let patterns = pattern_set(16, 8).unwrap();
        let constellation = crate::constellation::qam(1).unwrap();
        let mut rng = RngStream::new(16, 0);
        let ch = draw_iid(16, 2, &mut rng);
        let table = build_effective_table(&ch, &patterns, &cfg).unwrap();
        let y = transmit(table.signature(3), constellation[0], &cfg, &mut rng);
        let det1 = ml_detect(&y, &table, &constellation, &cfg);
        let scaled_cfg = SystemConfig { symbol_energy: 4.0 * cfg.symbol_energy, ..cfg.clone() };
        let y2: CVector = y.iter().map(|z| 2.0 * z).collect();
        let det2 = ml_detect(&y2, &table, &constellation, &scaled_cfg);
        assert_eq!(det1, det2);
    }

    #[test]
    fn zero_noise_trials_are_error_free() {
        let mut cfg = config(32, 2, 4, 2, 1);
        cfg.noise_var = 0.0;
        let patterns = pattern_set(16, 4).unwrap();
        let setup =
            TrialSetup { config: &cfg, patterns: &patterns, csi: CsiMode::Perfect, r_sqrt: None };
        let c = run_error_trials(&setup, 200, 11, 0).unwrap();
        assert_eq!(c.trials, 200);
        assert_eq!(c.supersymbol_errors, 0);
        assert_eq!(c.group_errors, 0);
        assert_eq!(c.bit_errors, 0);
    }

    #[test]
    fn zero_signal_trials_guess_uniformly() {
        let mut cfg = config(32, 1, 8, 1, 1);
        cfg.symbol_energy = 0.0;
        let patterns = pattern_set(32, 8).unwrap();
        let setup =
            TrialSetup { config: &cfg, patterns: &patterns, csi: CsiMode::Perfect, r_sqrt: None };
        let c = run_error_trials(&setup, 20_000, 12, 0).unwrap();
        let ser = c.per_group_ser(&cfg);
        let want = 7.0 / 8.0;
        assert!((ser - want).abs() < 0.01, "ser {ser}");
    }

    #[test]
    fn counting_bounds_hold() {
        let cfg = config(32, 2, 4, 1, 1);
        let patterns = pattern_set(16, 4).unwrap();
        let setup =
            TrialSetup { config: &cfg, patterns: &patterns, csi: CsiMode::Perfect, r_sqrt: None };
        let c = run_error_trials(&setup, 5_000, 13, 0).unwrap();
        let pg = c.per_group_ser(&cfg);
        let ss = c.supersymbol_ser();
        assert!(pg <= ss + 1e-12);
        assert!(ss <= cfg.groups as f64 * pg + 1e-12);
        assert!(c.group_errors <= c.trials * cfg.groups as u64);
        assert!(c.bit_errors <= c.trials * cfg.spectral_efficiency() as u64);
    }

    #[test]
    fn trial_streams_are_order_independent() {
        let cfg = config(32, 1, 4, 1, 1);
        let patterns = pattern_set(32, 4).unwrap();
        let setup =
            TrialSetup { config: &cfg, patterns: &patterns, csi: CsiMode::Perfect, r_sqrt: None };
        let seq = run_error_trials(&setup, 100, 17, 0).unwrap();
        // same trials accumulated in reverse order
        let mut rev = ErrorCounters::default();
        for t in (0..100u64).rev() {
            let mut rng = RngStream::new(17, t);
            rev.merge(&run_trial(&setup, &mut rng).unwrap());
        }
        assert_eq!(seq, rev);
    }

    #[test]
    fn min_distance_basics() {
        let cfg = config(8, 1, 2, 1, 1);
        let patterns = pattern_set(8, 2).unwrap();
        let mut rng = RngStream::new(19, 0);
        let ch = draw_iid(8, 1, &mut rng);
        let table = build_effective_table(&ch, &patterns, &cfg).unwrap();
        let d = min_pairwise_distance(&table).unwrap();
        let direct = libm::sqrt(dist_sq(table.signature(0), table.signature(1)));
        assert!((d - direct).abs() < 1e-12);

        let cfg1 = config(8, 1, 1, 1, 1);
        let p1 = pattern_set(8, 1).unwrap();
        let t1 = build_effective_table(&ch, &p1, &cfg1).unwrap();
        assert_eq!(min_pairwise_distance(&t1), Err(Error::TooFewSignatures));
    }

    #[test]
    fn min_distance_cdf_fig11_point() {
        // IID, N=64, N_Q=1, K=8, n_R=1: P[min < 3] around 0.85.
        let cfg = config(64, 1, 8, 1, 1);
        let patterns = pattern_set(64, 8).unwrap();
        let draws = 10_000usize;
        let mut below = 0usize;
        for t in 0..draws {
            let mut rng = RngStream::new(23, t as u64);
            let ch = draw_iid(64, 1, &mut rng);
            let table = build_effective_table(&ch, &patterns, &cfg).unwrap();
            if min_pairwise_distance(&table).unwrap() < 3.0 {
                below += 1;
            }
        }
        let p = below as f64 / draws as f64;
        assert!((p - 0.85).abs() < 0.04, "P[min<3] = {p}");
    }

    #[test]
    fn validate_rejects_bad_configs() {
        assert!(config(48, 1, 4, 1, 1).validate().is_err());
        assert!(config(32, 3, 4, 1, 1).validate().is_err());
        assert!(config(32, 1, 64, 1, 1).validate().is_err());
        assert!(config(32, 1, 4, 0, 1).validate().is_err());
        assert!(config(32, 1, 4, 1, 1).validate().is_ok());
    }
}
