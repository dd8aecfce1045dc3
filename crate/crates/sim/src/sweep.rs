//! SNR sweeps with adaptive stopping and deterministic trial-parallel
//! execution.
//!
//! Every SNR point `i` owns the stream range `[i << 40, (i << 40) + 2^40)`
//! and trial `t` uses stream `(i << 40) + t`, so results are independent
//! of thread count and of how many trials other points consumed. Rate
//! metrics stop at whole-batch boundaries once the error target is met;
//! batch boundaries are fixed, so adaptive stopping is deterministic too.

use rayon::prelude::*;

use ris_csm_core::analysis::{asymptotic_ser, ser_union_bound, BoundInputs};
use ris_csm_core::baselines::{run_baseline_trial, BaselineConfig, BaselineCounters};
use ris_csm_core::capacity::mutual_information_fixed_channel;
use ris_csm_core::channel::{
    apply_correlation, correlation_matrix, draw_iid, CorrelationSpec,
};
use ris_csm_core::constellation::qam;
use ris_csm_core::estimation::{collect_pilots, mmse_estimate, TrainingConfig};
use ris_csm_core::hadamard::{pattern_set, PatternSet};
use ris_csm_core::modem::{
    build_effective_table, group_signature, min_pairwise_distance, run_trial, CsiMode,
    ErrorCounters, SystemConfig, TrialSetup,
};
use ris_csm_core::numerics::{psd_sqrt, CMatrix, RngStream, PSD_SQRT_TOL};
use serde::{Deserialize, Serialize};

use crate::SimError;

/// Trials per deterministic stopping batch.
const BATCH: u64 = 8192;
/// Each point owns 2^40 RNG streams.
const POINT_STREAM_BITS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Csm,
    RisMimo,
    RisGsm,
    RisCim,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Csm => "ris-csm",
            Scheme::RisMimo => "ris-mimo",
            Scheme::RisGsm => "ris-gsm",
            Scheme::RisCim => "ris-cim",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Snr,
    EbNo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    PerGroupSer,
    SupersymbolSer,
    Ber,
    Capacity,
    Mse,
    MindistCdf,
    AnalyticBound,
    Asymptote,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::PerGroupSer => "per-group-ser",
            Metric::SupersymbolSer => "supersymbol-ser",
            Metric::Ber => "ber",
            Metric::Capacity => "capacity",
            Metric::Mse => "mse",
            Metric::MindistCdf => "mindist-cdf",
            Metric::AnalyticBound => "analytic-bound",
            Metric::Asymptote => "asymptote",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Fully resolved sweep description.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub scheme: Scheme,
    /// Physical-layer parameters; per-point energy overrides
    /// `symbol_energy` (noise variance stays 1).
    pub system: SystemConfig,
    pub baseline: Option<BaselineConfig>,
    pub correlation: Option<CorrelationSpec>,
    /// Pilot-based CSI for CSM rate metrics; `None` is perfect CSI.
    pub estimation: Option<TrainingConfig>,
    pub snr_start: f64,
    pub snr_stop: f64,
    pub snr_step: f64,
    pub axis: Axis,
    pub metric: Metric,
    pub trials: u64,
    pub min_errors: u64,
    pub seed: u64,
    /// 0 means available parallelism.
    pub threads: usize,
    pub mindist_threshold: f64,
    /// Inner (noise/input) samples per channel draw for the capacity metric.
    pub capacity_inner: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.snr_step <= 0.0 {
            return Err(SimError::config("sweep.snr", "step must be > 0"));
        }
        if self.trials == 0 {
            return Err(SimError::config("sweep.trials", "trial budget must be >= 1"));
        }
        if self.trials >= 1 << POINT_STREAM_BITS {
            return Err(SimError::config("sweep.trials", "trial budget exceeds 2^40"));
        }
        if self.min_errors == 0 {
            return Err(SimError::config("sweep.min_errors", "min-error target must be >= 1"));
        }
        if self.scheme == Scheme::Csm {
            self.system
                .validate()
                .map_err(|e| SimError::config("system", e.to_string()))?;
        } else {
            let b = self
                .baseline
                .ok_or_else(|| SimError::config("baseline", "missing baseline parameters"))?;
            b.validate(&self.system)
                .map_err(|e| SimError::config("baseline", e.to_string()))?;
            if !matches!(self.metric, Metric::SupersymbolSer | Metric::Ber) {
                return Err(SimError::config(
                    "sweep.metric",
                    format!("metric `{}` is only defined for ris-csm", self.metric.name()),
                ));
            }
        }
        if self.axis == Axis::EbNo && self.bits_per_use()? <= 0.0 {
            return Err(SimError::config(
                "sweep.axis",
                "ebno axis needs positive spectral efficiency",
            ));
        }
        if let Some(c) = &self.correlation {
            if c.grid_h * c.grid_v != self.system.elements {
                return Err(SimError::config(
                    "channel.grid_h",
                    "correlation grid does not cover the elements",
                ));
            }
        }
        Ok(())
    }

    /// Spectral efficiency in bpcu of the selected scheme.
    pub fn bits_per_use(&self) -> Result<f64, SimError> {
        match (self.scheme, &self.baseline) {
            (Scheme::Csm, _) => Ok(self.system.spectral_efficiency() as f64),
            (_, Some(b)) => Ok(b
                .spectral_efficiency(&self.system)
                .map_err(|e| SimError::config("baseline", e.to_string()))?),
            (_, None) => Err(SimError::config("baseline", "missing baseline parameters")),
        }
    }

    /// Axis values in dB, inclusive of the endpoint up to rounding.
    pub fn axis_points(&self) -> Vec<f64> {
        let mut points = Vec::new();
        let mut i = 0u64;
        loop {
            let v = self.snr_start + i as f64 * self.snr_step;
            if v > self.snr_stop + 1e-9 {
                return points;
            }
            points.push(v);
            i += 1;
        }
    }

    /// Converts an axis value to an SNR in dB.
    pub fn to_snr_db(&self, axis_db: f64) -> Result<f64, SimError> {
        match self.axis {
            Axis::Snr => Ok(axis_db),
            Axis::EbNo => Ok(axis_db + 10.0 * self.bits_per_use()?.log10()),
        }
    }
}

/// One emitted result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub scheme: String,
    pub n: usize,
    pub n_q: usize,
    pub k: usize,
    pub n_r: usize,
    pub m: usize,
    pub snr_db: f64,
    pub metric: String,
    pub value: f64,
    pub trials: u64,
    pub errors: u64,
    pub std_err: f64,
    pub seed: u64,
}

/// Runs the sweep, one record per SNR point in axis order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<Record>, SimError> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads)
        .build()
        .map_err(|e| SimError::Runtime(e.to_string()))?;
    let r_sqrt = match &spec.correlation {
        Some(c) => {
            let r = correlation_matrix(c)?;
            Some(psd_sqrt(&r, PSD_SQRT_TOL)?)
        }
        None => None,
    };
    let patterns = if spec.scheme == Scheme::Csm {
        Some(pattern_set(spec.system.group_size(), spec.system.patterns_per_group)?)
    } else {
        None
    };
    let mut records = Vec::new();
    for (i, axis_db) in spec.axis_points().into_iter().enumerate() {
        let snr_db = spec.to_snr_db(axis_db)?;
        records.push(run_point(
            spec,
            &pool,
            r_sqrt.as_ref(),
            patterns.as_ref(),
            i,
            snr_db,
        )?);
    }
    Ok(records)
}

fn run_point(
    spec: &SweepSpec,
    pool: &rayon::ThreadPool,
    r_sqrt: Option<&CMatrix>,
    patterns: Option<&PatternSet>,
    point_idx: usize,
    snr_db: f64,
) -> Result<Record, SimError> {
    let snr = 10f64.powf(snr_db / 10.0);
    let mut config = spec.system.clone();
    config.symbol_energy = snr;
    config.noise_var = 1.0;
    let base = (point_idx as u64) << POINT_STREAM_BITS;
    let (value, trials, errors, std_err) = match spec.metric {
        Metric::AnalyticBound | Metric::Asymptote => {
            let inputs = BoundInputs {
                elements: config.elements,
                groups: config.groups,
                patterns_per_group: config.patterns_per_group,
                rx_antennas: config.rx_antennas,
                snr,
            };
            let value = if spec.metric == Metric::AnalyticBound {
                ser_union_bound(&inputs)
            } else {
                asymptotic_ser(&inputs).ser
            };
            (value, 0, 0, 0.0)
        }
        Metric::PerGroupSer | Metric::SupersymbolSer | Metric::Ber => {
            if spec.scheme == Scheme::Csm {
                run_csm_rate_point(spec, pool, r_sqrt, patterns.unwrap(), &config, base)?
            } else {
                run_baseline_rate_point(spec, pool, r_sqrt, &config, base)?
            }
        }
        Metric::Capacity => run_capacity_point(spec, pool, r_sqrt, patterns.unwrap(), &config, base)?,
        Metric::Mse => run_mse_point(spec, pool, r_sqrt, patterns.unwrap(), &config, snr, base)?,
        Metric::MindistCdf => {
            run_mindist_point(spec, pool, r_sqrt, patterns.unwrap(), &config, base)?
        }
    };
    let (n_q, k, m) = match (spec.scheme, &spec.baseline) {
        (Scheme::Csm, _) => (config.groups, config.patterns_per_group, config.mod_order),
        (_, Some(BaselineConfig::RisMimo { m_ris, m_tx })) => (1, *m_ris, *m_tx),
        (_, Some(b @ BaselineConfig::RisGsm { n_groups, m_tx, .. })) => {
            (*n_groups, 1usize << b.index_bits(), *m_tx)
        }
        (_, Some(BaselineConfig::RisCim { m_tx, codes, .. })) => (1, *codes, *m_tx),
        (_, None) => unreachable!("validated"),
    };
    Ok(Record {
        scheme: spec.scheme.name().to_owned(),
        n: config.elements,
        n_q,
        k,
        n_r: config.rx_antennas,
        m,
        snr_db,
        metric: spec.metric.name().to_owned(),
        value,
        trials,
        errors,
        std_err,
        seed: spec.seed,
    })
}

fn rate_std_err(p: f64, units: f64) -> f64 {
    (p * (1.0 - p) / units).sqrt()
}

fn run_csm_rate_point(
    spec: &SweepSpec,
    pool: &rayon::ThreadPool,
    r_sqrt: Option<&CMatrix>,
    patterns: &PatternSet,
    config: &SystemConfig,
    base: u64,
) -> Result<(f64, u64, u64, f64), SimError> {
    let csi = match &spec.estimation {
        Some(t) => CsiMode::Estimated(*t),
        None => CsiMode::Perfect,
    };
    let setup = TrialSetup { config, patterns, csi, r_sqrt };
    let mut total = ErrorCounters::default();
    let mut done = 0u64;
    while done < spec.trials {
        let size = BATCH.min(spec.trials - done);
        let batch = pool.install(|| {
            (done..done + size)
                .into_par_iter()
                .map(|t| {
                    let mut rng = RngStream::new(spec.seed, base + t);
                    run_trial(&setup, &mut rng).map_err(SimError::from)
                })
                .try_reduce(ErrorCounters::default, |mut a, b| {
                    a.merge(&b);
                    Ok(a)
                })
        })?;
        total.merge(&batch);
        done += size;
        let errors = match spec.metric {
            Metric::PerGroupSer => total.group_errors,
            Metric::SupersymbolSer => total.supersymbol_errors,
            _ => total.bit_errors,
        };
        if errors >= spec.min_errors {
            break;
        }
    }
    let (value, units, errors) = match spec.metric {
        Metric::PerGroupSer => (
            total.per_group_ser(config),
            (total.trials * config.groups as u64) as f64,
            total.group_errors,
        ),
        Metric::SupersymbolSer => {
            (total.supersymbol_ser(), total.trials as f64, total.supersymbol_errors)
        }
        _ => (
            total.ber(config),
            (total.trials * config.spectral_efficiency() as u64) as f64,
            total.bit_errors,
        ),
    };
    Ok((value, total.trials, errors, rate_std_err(value, units)))
}

fn run_baseline_rate_point(
    spec: &SweepSpec,
    pool: &rayon::ThreadPool,
    r_sqrt: Option<&CMatrix>,
    config: &SystemConfig,
    base: u64,
) -> Result<(f64, u64, u64, f64), SimError> {
    let bconfig = spec.baseline.expect("validated");
    let mut total = BaselineCounters::default();
    let mut done = 0u64;
    while done < spec.trials {
        let size = BATCH.min(spec.trials - done);
        let batch = pool.install(|| {
            (done..done + size)
                .into_par_iter()
                .map(|t| {
                    let mut rng = RngStream::new(spec.seed, base + t);
                    run_baseline_trial(config, &bconfig, r_sqrt, &mut rng)
                        .map_err(SimError::from)
                })
                .try_reduce(BaselineCounters::default, |mut a, b| {
                    a.merge(&b);
                    Ok(a)
                })
        })?;
        total.merge(&batch);
        done += size;
        let errors = match spec.metric {
            Metric::SupersymbolSer => total.message_errors,
            _ => total.bit_errors,
        };
        if errors >= spec.min_errors {
            break;
        }
    }
    let (value, units, errors) = match spec.metric {
        Metric::SupersymbolSer => {
            (total.message_error_rate(), total.trials as f64, total.message_errors)
        }
        _ => (
            total.ber(),
            (total.trials * total.bits_per_message) as f64,
            total.bit_errors,
        ),
    };
    Ok((value, total.trials, errors, rate_std_err(value, units)))
}

fn run_capacity_point(
    spec: &SweepSpec,
    pool: &rayon::ThreadPool,
    r_sqrt: Option<&CMatrix>,
    patterns: &PatternSet,
    config: &SystemConfig,
    base: u64,
) -> Result<(f64, u64, u64, f64), SimError> {
    let constellation = qam(config.mod_order)?;
    let outer = spec.trials as usize;
    let inner = spec.capacity_inner;
    let values: Vec<f64> = pool.install(|| {
        (0..outer as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = RngStream::new(spec.seed, base + t);
                let mut ch = draw_iid(config.elements, config.rx_antennas, &mut rng);
                if let Some(r) = r_sqrt {
                    ch = apply_correlation(&ch, r)?;
                }
                let table = build_effective_table(&ch, patterns, config)?;
                mutual_information_fixed_channel(&table, &constellation, config, inner, &mut rng)
            })
            .collect::<Result<Vec<f64>, _>>()
    })?;
    let mean = values.iter().sum::<f64>() / outer as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (outer as f64 - 1.0).max(1.0);
    Ok((mean, outer as u64, 0, (var / outer as f64).sqrt()))
}

fn run_mse_point(
    spec: &SweepSpec,
    pool: &rayon::ThreadPool,
    r_sqrt: Option<&CMatrix>,
    patterns: &PatternSet,
    config: &SystemConfig,
    training_snr: f64,
    base: u64,
) -> Result<(f64, u64, u64, f64), SimError> {
    // the sweep axis is the training SNR; tau comes from [estimation]
    let tconfig = TrainingConfig {
        symbol_energy: training_snr,
        repetitions: spec.estimation.map(|t| t.repetitions).unwrap_or(1),
    };
    let draws = spec.trials as usize;
    let values: Vec<f64> = pool.install(|| {
        (0..draws as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = RngStream::new(spec.seed, base + t);
                let mut ch = draw_iid(config.elements, config.rx_antennas, &mut rng);
                if let Some(r) = r_sqrt {
                    ch = apply_correlation(&ch, r)?;
                }
                let d = group_signature(&ch, config, 0, patterns.pattern(0));
                let pilots = collect_pilots(&ch, patterns, config, 0, 0, &tconfig, &mut rng)?;
                let est = mmse_estimate(&pilots, &tconfig, config.elements, config.groups)?;
                let err: f64 =
                    est.iter().zip(&d).map(|(e, t)| (e - t).norm_sqr()).sum::<f64>();
                Ok(err / config.rx_antennas as f64)
            })
            .collect::<Result<Vec<f64>, ris_csm_core::Error>>()
    })?;
    let mean = values.iter().sum::<f64>() / draws as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (draws as f64 - 1.0).max(1.0);
    Ok((mean, draws as u64, 0, (var / draws as f64).sqrt()))
}

fn run_mindist_point(
    spec: &SweepSpec,
    pool: &rayon::ThreadPool,
    r_sqrt: Option<&CMatrix>,
    patterns: &PatternSet,
    config: &SystemConfig,
    base: u64,
) -> Result<(f64, u64, u64, f64), SimError> {
    let draws = spec.trials;
    let threshold = spec.mindist_threshold;
    let below: u64 = pool.install(|| {
        (0..draws)
            .into_par_iter()
            .map(|t| {
                let mut rng = RngStream::new(spec.seed, base + t);
                let mut ch = draw_iid(config.elements, config.rx_antennas, &mut rng);
                if let Some(r) = r_sqrt {
                    ch = apply_correlation(&ch, r)?;
                }
                let table = build_effective_table(&ch, patterns, config)?;
                Ok(u64::from(min_pairwise_distance(&table)? < threshold))
            })
            .try_reduce(|| 0u64, |a, b| Ok(a + b))
    })
    .map_err(|e: ris_csm_core::Error| SimError::from(e))?;
    let p = below as f64 / draws as f64;
    Ok((p, draws, below, rate_std_err(p, draws as f64)))
}

/// Least-squares slope of `log10(value)` against `log10(snr)` over the
/// records with `value` in `[1e-5, 1e-2]`, sign-flipped so a diversity-`n`
/// curve reports `n`. Needs at least 3 qualifying points.
pub fn diversity_slope(records: &[Record]) -> Result<f64, SimError> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.value >= 1e-5 && r.value <= 1e-2)
        .map(|r| (r.snr_db / 10.0, r.value.log10()))
        .collect();
    if pts.len() < 3 {
        return Err(SimError::InsufficientPoints { needed: 3, got: pts.len() });
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Ok(-(n * sxy - sx * sy) / (n * sxx - sx * sx))
}
