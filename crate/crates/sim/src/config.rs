//! TOML experiment configuration and CLI override merging.
//!
//! Sections: `[system]` (mandatory for CSM runs), `[channel]` (spatial
//! correlation; absent means IID), `[estimation]` (pilot-based CSI;
//! absent means perfect CSI), `[baseline]` (comparison scheme
//! parameters), `[sweep]` (axis, metric, budgets, output). CLI flags
//! override file values.

use std::path::Path;

use ris_csm_core::baselines::BaselineConfig;
use ris_csm_core::channel::CorrelationSpec;
use ris_csm_core::estimation::TrainingConfig;
use ris_csm_core::modem::SystemConfig;
use serde::Deserialize;

use crate::sweep::{Axis, Metric, OutputFormat, Scheme, SweepSpec};
use crate::SimError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub system: Option<SystemSection>,
    pub channel: Option<ChannelSection>,
    pub estimation: Option<EstimationSection>,
    pub baseline: Option<BaselineSection>,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub elements: usize,
    #[serde(default = "one")]
    pub groups: usize,
    pub patterns_per_group: usize,
    #[serde(default = "one")]
    pub rx_antennas: usize,
    #[serde(default = "one")]
    pub mod_order: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub grid_h: usize,
    pub grid_v: usize,
    pub spacing_over_lambda: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimationSection {
    pub training_snr_db: f64,
    pub repetitions: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineSection {
    pub m_ris: Option<usize>,
    pub m_tx: Option<usize>,
    pub n_groups: Option<usize>,
    pub n_active: Option<usize>,
    pub codes: Option<usize>,
    pub code_len: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub scheme: Option<String>,
    pub metric: Option<String>,
    /// "START:STOP:STEP" in dB on the selected axis.
    pub snr: Option<String>,
    pub axis: Option<String>,
    pub trials: Option<u64>,
    pub min_errors: Option<u64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<String>,
    pub format: Option<String>,
    pub mindist_threshold: Option<f64>,
    pub capacity_inner: Option<usize>,
}

fn one() -> usize {
    1
}

/// CLI override set; every field beats the corresponding file value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scheme: Option<String>,
    pub metric: Option<String>,
    pub snr: Option<String>,
    pub axis: Option<String>,
    pub trials: Option<u64>,
    pub min_errors: Option<u64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<String>,
    pub format: Option<String>,
}

pub fn load_file(path: &Path) -> Result<FileConfig, SimError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SimError::config("config", format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| SimError::config("config", e.to_string()))
}

/// Resolves file + overrides into a validated sweep specification and the
/// output destination.
pub fn resolve(file: &FileConfig, cli: &Overrides) -> Result<(SweepSpec, Output), SimError> {
    let sweep = &file.sweep;
    let scheme_name = cli
        .scheme
        .clone()
        .or_else(|| sweep.scheme.clone())
        .unwrap_or_else(|| "ris-csm".to_owned());
    let scheme = parse_scheme(&scheme_name)?;
    let metric_name = cli
        .metric
        .clone()
        .or_else(|| sweep.metric.clone())
        .ok_or_else(|| SimError::config("sweep.metric", "missing metric"))?;
    let metric = parse_metric(&metric_name)?;
    let snr_text = cli
        .snr
        .clone()
        .or_else(|| sweep.snr.clone())
        .ok_or_else(|| SimError::config("sweep.snr", "missing SNR range"))?;
    let (snr_start, snr_stop, snr_step) = parse_snr_range(&snr_text)?;
    let axis_name =
        cli.axis.clone().or_else(|| sweep.axis.clone()).unwrap_or_else(|| "snr".to_owned());
    let axis = match axis_name.as_str() {
        "snr" => Axis::Snr,
        "ebno" => Axis::EbNo,
        other => {
            return Err(SimError::config("sweep.axis", format!("unknown axis `{other}`")))
        }
    };
    let trials = cli.trials.or(sweep.trials).unwrap_or(100_000);
    if trials == 0 {
        return Err(SimError::config("sweep.trials", "trial budget must be >= 1"));
    }
    let min_errors = cli.min_errors.or(sweep.min_errors).unwrap_or(100);
    if min_errors == 0 {
        return Err(SimError::config("sweep.min_errors", "min-error target must be >= 1"));
    }
    let seed = cli.seed.or(sweep.seed).unwrap_or(0);
    let threads = cli.threads.or(sweep.threads).unwrap_or(0);

    let system = resolve_system(file, scheme)?;
    let baseline = resolve_baseline(file, scheme)?;
    let correlation = file.channel.as_ref().map(|c| {
        let spec = CorrelationSpec {
            grid_h: c.grid_h,
            grid_v: c.grid_v,
            spacing_over_lambda: c.spacing_over_lambda,
        };
        spec
    });
    if let Some(c) = &file.channel {
        if c.grid_h * c.grid_v != system.elements {
            return Err(SimError::config(
                "channel.grid_h",
                format!(
                    "grid {}x{} does not cover {} elements",
                    c.grid_h, c.grid_v, system.elements
                ),
            ));
        }
    }
    let estimation = file.estimation.as_ref().map(|e| {
        TrainingConfig::from_training_snr_db(e.training_snr_db, e.repetitions)
    });
    if let Some(e) = &file.estimation {
        if e.repetitions == 0 {
            return Err(SimError::config("estimation.repetitions", "need tau >= 1"));
        }
    }

    let spec = SweepSpec {
        scheme,
        system,
        baseline,
        correlation,
        estimation,
        snr_start,
        snr_stop,
        snr_step,
        axis,
        metric,
        trials,
        min_errors,
        seed,
        threads,
        mindist_threshold: sweep.mindist_threshold.unwrap_or(3.0),
        capacity_inner: sweep.capacity_inner.unwrap_or(1_000),
    };
    spec.validate()?;

    let format_name =
        cli.format.clone().or_else(|| sweep.format.clone()).unwrap_or_else(|| "csv".to_owned());
    let format = match format_name.as_str() {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => {
            return Err(SimError::config("sweep.format", format!("unknown format `{other}`")))
        }
    };
    let out = Output { path: cli.out.clone().or_else(|| sweep.out.clone()), format };
    Ok((spec, out))
}

/// Where and how results are written. `path = None` means stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub path: Option<String>,
    pub format: OutputFormat,
}

fn parse_scheme(name: &str) -> Result<Scheme, SimError> {
    match name {
        "ris-csm" | "csm" => Ok(Scheme::Csm),
        "ris-mimo" => Ok(Scheme::RisMimo),
        "ris-gsm" => Ok(Scheme::RisGsm),
        "ris-cim" => Ok(Scheme::RisCim),
        other => Err(SimError::config("sweep.scheme", format!("unknown scheme `{other}`"))),
    }
}

fn parse_metric(name: &str) -> Result<Metric, SimError> {
    match name {
        "per-group-ser" => Ok(Metric::PerGroupSer),
        "supersymbol-ser" => Ok(Metric::SupersymbolSer),
        "ber" => Ok(Metric::Ber),
        "capacity" => Ok(Metric::Capacity),
        "mse" => Ok(Metric::Mse),
        "mindist-cdf" => Ok(Metric::MindistCdf),
        "analytic-bound" => Ok(Metric::AnalyticBound),
        "asymptote" => Ok(Metric::Asymptote),
        other => Err(SimError::config("sweep.metric", format!("unknown metric `{other}`"))),
    }
}

/// Parses "START:STOP:STEP" (dB).
pub fn parse_snr_range(text: &str) -> Result<(f64, f64, f64), SimError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(SimError::config("sweep.snr", "expected START:STOP:STEP"));
    }
    let mut vals = [0.0f64; 3];
    for (i, p) in parts.iter().enumerate() {
        vals[i] = p
            .trim()
            .parse()
            .map_err(|_| SimError::config("sweep.snr", format!("`{p}` is not a number")))?;
    }
    let [start, stop, step] = vals;
    if step <= 0.0 {
        return Err(SimError::config("sweep.snr", "step must be > 0"));
    }
    if stop < start {
        return Err(SimError::config("sweep.snr", "stop must be >= start"));
    }
    Ok((start, stop, step))
}

fn resolve_system(file: &FileConfig, scheme: Scheme) -> Result<SystemConfig, SimError> {
    let s = file
        .system
        .as_ref()
        .ok_or_else(|| SimError::config("system", "missing [system] section"))?;
    if s.elements == 0 {
        return Err(SimError::config("system.elements", "need N >= 1"));
    }
    let config = SystemConfig {
        elements: s.elements,
        groups: s.groups,
        patterns_per_group: s.patterns_per_group,
        rx_antennas: s.rx_antennas,
        mod_order: s.mod_order,
        symbol_energy: 1.0,
        noise_var: 1.0,
    };
    if scheme == Scheme::Csm {
        config
            .validate()
            .map_err(|e| SimError::config("system", e.to_string()))?;
    }
    Ok(config)
}

fn resolve_baseline(file: &FileConfig, scheme: Scheme) -> Result<Option<BaselineConfig>, SimError> {
    if scheme == Scheme::Csm {
        return Ok(None);
    }
    let b = file
        .baseline
        .as_ref()
        .ok_or_else(|| SimError::config("baseline", "missing [baseline] section"))?;
    let need = |field: &str, v: Option<usize>| {
        v.ok_or_else(|| {
            SimError::config(&format!("baseline.{field}"), "missing required field")
        })
    };
    let bc = match scheme {
        Scheme::RisMimo => BaselineConfig::RisMimo {
            m_ris: need("m_ris", b.m_ris)?,
            m_tx: b.m_tx.unwrap_or(1),
        },
        Scheme::RisGsm => BaselineConfig::RisGsm {
            n_groups: need("n_groups", b.n_groups)?,
            n_active: need("n_active", b.n_active)?,
            m_tx: need("m_tx", b.m_tx)?,
        },
        Scheme::RisCim => BaselineConfig::RisCim {
            m_tx: need("m_tx", b.m_tx)?,
            codes: need("codes", b.codes)?,
            code_len: need("code_len", b.code_len)?,
        },
        Scheme::Csm => unreachable!(),
    };
    Ok(Some(bc))
}
