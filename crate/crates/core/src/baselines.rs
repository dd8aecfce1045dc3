//! Comparison schemes under the same constraints as the CSM modem: no
//! RIS-side beamforming, ML detection, perfect receiver CSI.
//!
//! All three reuse `SystemConfig` for the physical layer (elements,
//! antennas, energies); the scheme-specific signalling lives in
//! `BaselineConfig`. RIS-GSM inactive groups absorb (zero amplitude).
//! RIS-CIM spends `E_s` per chip, so a symbol spread over `Len` chips
//! carries `Len * E_s` total energy.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::channel::{apply_correlation, draw_iid, ChannelRealization};
use crate::constellation::{psk, qam};
use crate::hadamard::sylvester;
use crate::modem::SystemConfig;
use crate::numerics::{sample_cn01, CMatrix, CVector, Complex64, RngStream};
use crate::{is_power_of_two, Error, Result};

/// Scheme selector and signalling parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineConfig {
    /// One common phase from an `M_ris`-PSK set on the whole surface,
    /// transmitter sends `M_tx`-QAM (`M_tx = 1` is the unmodulated carrier).
    RisMimo { m_ris: usize, m_tx: usize },
    /// `N_A` of `N_Q` groups reflect with the all-ones pattern, the rest
    /// absorb; activation combinations are enumerated lexicographically.
    RisGsm { n_groups: usize, n_active: usize, m_tx: usize },
    /// `M_tx`-QAM symbol spread over `Len` chips by one of `W` orthogonal
    /// Hadamard codes; the channel is constant over the chips.
    RisCim { m_tx: usize, codes: usize, code_len: usize },
}

impl BaselineConfig {
    pub fn validate(&self, config: &SystemConfig) -> Result<()> {
        config.validate()?;
        match *self {
            BaselineConfig::RisMimo { m_ris, m_tx } => {
                if !is_power_of_two(m_ris) || m_ris < 2 {
                    return Err(Error::InvalidParameters {
                        reason: "M_ris must be a power of two >= 2",
                    });
                }
                if !is_power_of_two(m_tx) {
                    return Err(Error::NotPowerOfTwo { name: "M_tx", value: m_tx });
                }
            }
            BaselineConfig::RisGsm { n_groups, n_active, m_tx } => {
                if n_active == 0 || n_active > n_groups {
                    return Err(Error::InvalidParameters {
                        reason: "need 1 <= N_A <= N_Q",
                    });
                }
                if config.elements % n_groups != 0 {
                    return Err(Error::InvalidDimensions {
                        reason: "N_Q must divide N",
                    });
                }
                if !is_power_of_two(m_tx) {
                    return Err(Error::NotPowerOfTwo { name: "M_tx", value: m_tx });
                }
            }
            BaselineConfig::RisCim { m_tx, codes, code_len } => {
                if codes == 0 || codes > code_len {
                    return Err(Error::InvalidParameters { reason: "need 1 <= W <= Len" });
                }
                if !is_power_of_two(code_len) {
                    return Err(Error::NotPowerOfTwo { name: "Len", value: code_len });
                }
                if !is_power_of_two(codes) {
                    return Err(Error::NotPowerOfTwo { name: "W", value: codes });
                }
                if !is_power_of_two(m_tx) {
                    return Err(Error::NotPowerOfTwo { name: "M_tx", value: m_tx });
                }
            }
        }
        Ok(())
    }

    /// Index bits carried by the scheme (on top of the QAM bits).
    pub fn index_bits(&self) -> usize {
        match *self {
            BaselineConfig::RisMimo { m_ris, .. } => m_ris.trailing_zeros() as usize,
            BaselineConfig::RisGsm { n_groups, n_active, .. } => {
                floor_log2(binomial_usize(n_groups, n_active))
            }
            BaselineConfig::RisCim { codes, .. } => codes.trailing_zeros() as usize,
        }
    }

    /// Spectral efficiency in bpcu.
    pub fn spectral_efficiency(&self, config: &SystemConfig) -> Result<f64> {
        self.validate(config)?;
        let bits = (self.index_bits() + self.mod_bits()) as f64;
        Ok(match *self {
            BaselineConfig::RisCim { code_len, .. } => bits / code_len as f64,
            _ => bits,
        })
    }

    fn mod_bits(&self) -> usize {
        let m_tx = match *self {
            BaselineConfig::RisMimo { m_tx, .. } => m_tx,
            BaselineConfig::RisGsm { m_tx, .. } => m_tx,
            BaselineConfig::RisCim { m_tx, .. } => m_tx,
        };
        m_tx.trailing_zeros() as usize
    }

    fn chips(&self) -> usize {
        match *self {
            BaselineConfig::RisCim { code_len, .. } => code_len,
            _ => 1,
        }
    }
}

fn floor_log2(x: usize) -> usize {
    debug_assert!(x > 0);
    (usize::BITS - 1 - x.leading_zeros()) as usize
}

fn binomial_usize(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Lexicographic `k`-combinations of `{0, .., n-1}`.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance the rightmost index that can still move
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// `d = G diag(h) 1` restricted to one element range.
fn partial_signature(ch: &ChannelRealization, lo: usize, hi: usize) -> CVector {
    (0..ch.rx_antennas())
        .map(|i| {
            let row = ch.g.row(i);
            (lo..hi).map(|j| row[j] * ch.h[j]).sum()
        })
        .collect()
}

/// Error counts for a baseline Monte-Carlo run. A trial is one message,
/// which may span several channel uses (RIS-CIM chips).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BaselineCounters {
    pub trials: u64,
    pub channel_uses: u64,
    pub message_errors: u64,
    pub bit_errors: u64,
    pub bits_per_message: u64,
}

impl BaselineCounters {
    pub fn merge(&mut self, other: &BaselineCounters) {
        self.trials += other.trials;
        self.channel_uses += other.channel_uses;
        self.message_errors += other.message_errors;
        self.bit_errors += other.bit_errors;
        self.bits_per_message = other.bits_per_message;
    }

    pub fn message_error_rate(&self) -> f64 {
        self.message_errors as f64 / self.trials as f64
    }

    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / (self.trials * self.bits_per_message) as f64
    }
}

/// One baseline trial: fresh channel, uniform message, ML detection.
pub fn run_baseline_trial(
    config: &SystemConfig,
    bconfig: &BaselineConfig,
    r_sqrt: Option<&CMatrix>,
    rng: &mut RngStream,
) -> Result<BaselineCounters> {
    bconfig.validate(config)?;
    let mut ch = draw_iid(config.elements, config.rx_antennas, rng);
    if let Some(r) = r_sqrt {
        ch = apply_correlation(&ch, r)?;
    }
    let amp = libm::sqrt(config.symbol_energy);
    let sigma = libm::sqrt(config.noise_var);
    let index_bits = bconfig.index_bits();
    let index_count = 1usize << index_bits;
    let (idx, sym, idx_hat, sym_hat, m_tx);
    match *bconfig {
        BaselineConfig::RisMimo { m_ris, m_tx: mt } => {
            m_tx = mt;
            let phases = psk(m_ris)?;
            let constellation = qam(m_tx)?;
            let d = partial_signature(&ch, 0, config.elements);
            idx = rng.gen_range(0..index_count);
            sym = rng.gen_range(0..m_tx);
            let tx = amp * phases[idx] * constellation[sym];
            let noise = sample_cn01(rng, d.len());
            let y: CVector =
                d.iter().zip(&noise).map(|(di, ni)| tx * di + sigma * ni).collect();
            (idx_hat, sym_hat) = argmin_joint(&y, &d, &phases, &constellation, amp);
        }
        BaselineConfig::RisGsm { n_groups, n_active, m_tx: mt } => {
            m_tx = mt;
            let constellation = qam(m_tx)?;
            let n = config.elements / n_groups;
            let group_sums: Vec<CVector> =
                (0..n_groups).map(|q| partial_signature(&ch, q * n, (q + 1) * n)).collect();
            let combos = combinations(n_groups, n_active);
            let sigs: Vec<CVector> = combos[..index_count]
                .iter()
                .map(|combo| {
                    let mut d = vec![Complex64::new(0.0, 0.0); config.rx_antennas];
                    for &q in combo {
                        for (di, si) in d.iter_mut().zip(&group_sums[q]) {
                            *di += si;
                        }
                    }
                    d
                })
                .collect();
            idx = rng.gen_range(0..index_count);
            sym = rng.gen_range(0..m_tx);
            let tx = amp * constellation[sym];
            let noise = sample_cn01(rng, config.rx_antennas);
            let y: CVector = sigs[idx]
                .iter()
                .zip(&noise)
                .map(|(di, ni)| tx * di + sigma * ni)
                .collect();
            let mut best = f64::INFINITY;
            let mut best_pair = (0usize, 0usize);
            for (c, d) in sigs.iter().enumerate() {
                for (s, &x) in constellation.iter().enumerate() {
                    let ax = amp * x;
                    let metric: f64 =
                        y.iter().zip(d).map(|(yi, di)| (yi - ax * di).norm_sqr()).sum();
                    if metric < best {
                        best = metric;
                        best_pair = (c, s);
                    }
                }
            }
            (idx_hat, sym_hat) = best_pair;
        }
        BaselineConfig::RisCim { m_tx: mt, codes, code_len } => {
            m_tx = mt;
            let constellation = qam(m_tx)?;
            let hm = sylvester(code_len)?;
            let d = partial_signature(&ch, 0, config.elements);
            idx = rng.gen_range(0..codes);
            sym = rng.gen_range(0..m_tx);
            let code = hm.row(idx);
            let tx = amp * constellation[sym];
            let y: Vec<CVector> = (0..code_len)
                .map(|t| {
                    let chip = tx * code[t] as f64;
                    let noise = sample_cn01(rng, d.len());
                    d.iter().zip(&noise).map(|(di, ni)| chip * di + sigma * ni).collect()
                })
                .collect();
            let mut best = f64::INFINITY;
            let mut best_pair = (0usize, 0usize);
            for w in 0..codes {
                let cw = hm.row(w);
                for (s, &x) in constellation.iter().enumerate() {
                    let mut metric = 0.0;
                    for t in 0..code_len {
                        let chip = amp * x * cw[t] as f64;
                        metric += y[t]
                            .iter()
                            .zip(&d)
                            .map(|(yi, di)| (yi - chip * di).norm_sqr())
                            .sum::<f64>();
                    }
                    if metric < best {
                        best = metric;
                        best_pair = (w, s);
                    }
                }
            }
            (idx_hat, sym_hat) = best_pair;
        }
    }
    let mod_bits = m_tx.trailing_zeros() as u64;
    let bit_errors =
        ((idx ^ idx_hat).count_ones() + (sym ^ sym_hat).count_ones()) as u64;
    Ok(BaselineCounters {
        trials: 1,
        channel_uses: bconfig.chips() as u64,
        message_errors: u64::from(idx != idx_hat || sym != sym_hat),
        bit_errors,
        bits_per_message: index_bits as u64 + mod_bits,
    })
}

fn argmin_joint(
    y: &[Complex64],
    d: &[Complex64],
    phases: &[Complex64],
    constellation: &[Complex64],
    amp: f64,
) -> (usize, usize) {
    let mut best = f64::INFINITY;
    let mut best_pair = (0usize, 0usize);
    for (p, &phi) in phases.iter().enumerate() {
        for (s, &x) in constellation.iter().enumerate() {
            let tx = amp * phi * x;
            let metric: f64 =
                y.iter().zip(d).map(|(yi, di)| (yi - tx * di).norm_sqr()).sum();
            if metric < best {
                best = metric;
                best_pair = (p, s);
            }
        }
    }
    best_pair
}

/// Sequential driver with the same per-trial stream contract as the CSM
/// modem: trial `t` uses stream `stream_base + t`.
pub fn run_baseline_trials(
    config: &SystemConfig,
    bconfig: &BaselineConfig,
    r_sqrt: Option<&CMatrix>,
    trials: u64,
    seed: u64,
    stream_base: u64,
) -> Result<BaselineCounters> {
    let mut total = BaselineCounters::default();
    for t in 0..trials {
        let mut rng = RngStream::new(seed, stream_base + t);
        let c = run_baseline_trial(config, bconfig, r_sqrt, &mut rng)?;
        total.merge(&c);
    }
    Ok(total)
}
