//! Acceptance suite. Each test checks one numbered criterion end to end
//! and prints a `[ n] name: pass|fail` line (visible with --nocapture).
//!
//! Budgets are sized for a single commodity core; the Monte-Carlo
//! criteria use fixed seeds, so reruns are reproducible.

use ris_csm_core::analysis::{
    binomial, f_zeta, ser_union_bound, truncated_binomial_pmf, BoundInputs,
};
use ris_csm_core::baselines::BaselineConfig;
use ris_csm_core::channel::{draw_iid, CorrelationSpec};
use ris_csm_core::estimation::{
    collect_pilots, mmse_estimate, theoretical_mse, TrainingConfig,
};
use ris_csm_core::hadamard::{difference_profile, pattern_set, sylvester};
use ris_csm_core::modem::{group_signature, SystemConfig};
use ris_csm_core::numerics::RngStream;
use ris_csm_sim::sweep::{
    diversity_slope, run_sweep, Axis, Metric, Record, Scheme, SweepSpec,
};

fn report(id: usize, name: &str, pass: bool) {
    println!("[{id:2}] {name}: {}", if pass { "pass" } else { "fail" });
}

fn system(n: usize, nq: usize, k: usize, nr: usize) -> SystemConfig {
    SystemConfig {
        elements: n,
        groups: nq,
        patterns_per_group: k,
        rx_antennas: nr,
        mod_order: 1,
        symbol_energy: 1.0,
        noise_var: 1.0,
    }
}

fn spec(config: SystemConfig, metric: Metric, start: f64, stop: f64, step: f64) -> SweepSpec {
    SweepSpec {
        scheme: Scheme::Csm,
        system: config,
        baseline: None,
        correlation: None,
        estimation: None,
        snr_start: start,
        snr_stop: stop,
        snr_step: step,
        axis: Axis::Snr,
        metric,
        trials: 1_000_000,
        min_errors: 100,
        seed: 0xACCE,
        threads: 0,
        mindist_threshold: 3.0,
        capacity_inner: 256,
    }
}

/// SNR (dB) where the curve crosses `level`, log-linear interpolation.
fn level_crossing(records: &[Record], level: f64) -> Option<f64> {
    for w in records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.value >= level && b.value <= level && a.value > 0.0 && b.value > 0.0 {
            let (la, lb) = (a.value.log10(), b.value.log10());
            return Some(a.snr_db + (b.snr_db - a.snr_db) * (level.log10() - la) / (lb - la));
        }
    }
    None
}

#[test]
fn criterion_01_exact_pattern_algebra() {
    let mut pass = true;
    for log_n in 2..=10usize {
        let n = 1usize << log_n;
        let h = sylvester(n).unwrap();
        for i in 0..n {
            for j in i..n {
                let dot: i64 = h
                    .row(i)
                    .iter()
                    .zip(h.row(j))
                    .map(|(&a, &b)| a as i64 * b as i64)
                    .sum();
                let want = if i == j { n as i64 } else { 0 };
                pass &= dot == want;
            }
        }
        for log_k in 1..=log_n {
            let k = 1usize << log_k;
            let set = pattern_set(n, k).unwrap();
            for m in 0..k {
                for l in m + 1..k {
                    let (nonzero, zero) = difference_profile(&set, m, l).unwrap();
                    pass &= nonzero == n / 2 && zero == n / 2;
                }
            }
        }
    }
    for nq in 1..=8usize {
        for k in [2usize, 4, 8, 16, 32, 64] {
            let total: f64 =
                (1..=nq).map(|z| truncated_binomial_pmf(nq, k, z).unwrap()).sum();
            pass &= (total - 1.0).abs() < 1e-12;
        }
    }
    report(1, "exact pattern algebra and difference-count distribution", pass);
    assert!(pass);
}

#[test]
fn criterion_02_bound_internal_consistency() {
    let mut pass = true;
    // closed-form pairwise term against direct quadrature of
    // (1/pi) int_0^{pi/2} (1 + gbar/sin^2 t)^{-nR} dt
    for nr in 1..=4usize {
        for nq in [1usize, 2, 4] {
            for zeta in 1..=nq {
                for snr_db in [-10.0f64, 0.0, 10.0, 20.0] {
                    let snr = 10f64.powf(snr_db / 10.0);
                    let inputs = BoundInputs {
                        elements: 64,
                        groups: nq,
                        patterns_per_group: 8,
                        rx_antennas: nr,
                        snr,
                    };
                    let gbar = 64.0 * snr * zeta as f64 / (2.0 * nq as f64);
                    let steps = 1usize << 14;
                    let hstep = std::f64::consts::FRAC_PI_2 / steps as f64;
                    let f = |t: f64| {
                        let s = t.sin();
                        (1.0 + gbar / (s * s)).powi(-(nr as i32))
                    };
                    let mut acc = 0.0;
                    for i in 0..steps {
                        let a = i as f64 * hstep;
                        acc += hstep / 6.0 * (f(a) + 4.0 * f(a + hstep / 2.0) + f(a + hstep));
                    }
                    let quad = acc / std::f64::consts::PI;
                    pass &= (f_zeta(zeta, &inputs) - quad).abs() < 1e-8;
                }
            }
        }
    }
    // two algebraic routes to the union bound
    for (nq, k) in [(1usize, 16usize), (2, 4), (3, 4), (4, 2)] {
        for snr_db in [-10.0f64, 0.0, 10.0, 20.0, 30.0] {
            let snr = 10f64.powf(snr_db / 10.0);
            let inputs = BoundInputs {
                elements: 128,
                groups: nq,
                patterns_per_group: k,
                rx_antennas: 2,
                snr,
            };
            let direct = ser_union_bound(&inputs);
            let via_pmf: f64 = (1..=nq)
                .map(|z| truncated_binomial_pmf(nq, k, z).unwrap() * f_zeta(z, &inputs))
                .sum::<f64>()
                * (k as f64 - 1.0)
                * (k as f64).powi(nq as i32 - 1);
            pass &= (direct - via_pmf).abs() <= 1e-12 * direct.max(1e-300);
        }
    }
    report(2, "pairwise bound quadrature and dual-route agreement", pass);
    assert!(pass);
}

#[test]
fn criterion_03_ser_curves_vs_bound_and_slope() {
    let mut pass = true;
    for (n, start) in [(32usize, 12.0f64), (64, 9.0), (128, 6.0)] {
        let mut s = spec(system(n, 1, 8, 1), Metric::PerGroupSer, start, start + 28.0, 4.0);
        s.trials = 20_000_000;
        s.min_errors = 100;
        let records = run_sweep(&s).unwrap();
        for r in &records {
            if r.errors < 100 {
                pass = false;
            }
            let inputs = BoundInputs {
                elements: n,
                groups: 1,
                patterns_per_group: 8,
                rx_antennas: 1,
                snr: 10f64.powf(r.snr_db / 10.0),
            };
            let bound = ser_union_bound(&inputs);
            if bound < 0.5 && r.value > bound + 3.0 * r.std_err {
                pass = false;
            }
        }
        let slope = diversity_slope(&records).unwrap();
        if !(0.85..=1.15).contains(&slope) {
            pass = false;
        }
        println!("    N={n}: slope {slope:.3}");
    }
    report(3, "SER curves sit under the bound with unit diversity slope", pass);
    assert!(pass);
}

#[test]
fn criterion_04_second_antenna_power_gain() {
    let mut crossings = Vec::new();
    for (nr, lo) in [(1usize, 12.0f64), (2, -2.0)] {
        let mut s = spec(system(64, 1, 16, nr), Metric::Ber, lo, lo + 10.0, 2.0);
        s.trials = 2_000_000;
        s.min_errors = 200;
        let records = run_sweep(&s).unwrap();
        crossings.push(level_crossing(&records, 1e-3));
    }
    // same spectral efficiency, so the SNR gap equals the Eb/N0 gap
    let gap = match (crossings[0], crossings[1]) {
        (Some(a), Some(b)) => Some(a - b),
        _ => None,
    };
    let pass = gap.map_or(false, |g| (14.0..=18.0).contains(&g));
    println!("    BER 1e-3 gap: {gap:?} dB");
    report(4, "16 dB power gain from the second receive antenna", pass);
    assert!(pass);
}

#[test]
fn criterion_05_partition_penalty_at_high_snr() {
    let mut sers = Vec::new();
    for (nq, k) in [(2usize, 4usize), (1, 16)] {
        let mut s = spec(system(128, nq, k, 1), Metric::PerGroupSer, 40.0, 40.0, 1.0);
        s.trials = 150_000_000;
        s.min_errors = 600;
        let records = run_sweep(&s).unwrap();
        println!(
            "    N_Q={nq} K={k}: SER {:.3e} ({} errors / {} trials)",
            records[0].value, records[0].errors, records[0].trials
        );
        sers.push(records[0].value);
    }
    let ratio = sers[0] / sers[1];
    let target = ris_csm_core::analysis::partition_penalty_ratio(1, 2, 4);
    let pass = (ratio - target).abs() <= 0.2 * target;
    println!("    ratio {ratio:.3}, target {target:.3}");
    report(5, "partition penalty ratio at 40 dB", pass);
    assert!(pass);
}

#[test]
fn criterion_06_mmse_mse_grid() {
    let config = system(128, 1, 2, 1);
    let patterns = pattern_set(128, 2).unwrap();
    let mut pass = true;
    for (i, &(et, tau)) in
        [(0.25f64, 1usize), (0.5, 1), (1.0, 1), (1.0, 2), (2.0, 2), (4.0, 4)]
            .iter()
            .enumerate()
    {
        let tconfig = TrainingConfig { symbol_energy: et, repetitions: tau };
        let draws = 100_000usize;
        let mut err = 0.0;
        let mut rng = RngStream::new(0xACCE, (i as u64) << 40);
        for _ in 0..draws {
            let ch = draw_iid(128, 1, &mut rng);
            let d = group_signature(&ch, &config, 0, patterns.pattern(0));
            let pilots =
                collect_pilots(&ch, &patterns, &config, 0, 0, &tconfig, &mut rng).unwrap();
            let est = mmse_estimate(&pilots, &tconfig, 128, 1).unwrap();
            err += (est[0] - d[0]).norm_sqr();
        }
        let empirical = err / draws as f64;
        let theory = theoretical_mse(128, 1, et, tau);
        let rel = (empirical - theory).abs() / theory;
        if rel >= 0.02 {
            pass = false;
        }
        println!("    E_t={et} tau={tau}: empirical {empirical:.3} theory {theory:.3}");
    }
    report(6, "MMSE estimator matches its closed-form MSE within 2%", pass);
    assert!(pass);
}

#[test]
fn criterion_07_capacity_targets() {
    let mut pass = true;
    // Known discrepancy: the unpartitioned n_R=1 configuration measures
    // ~2.86 bpcu at -10 dB (confirmed against a complex-plane quadrature
    // oracle to < 0.003 bpcu), while the 2.63 target is reproduced
    // exactly by the equal-rate partitioned configuration (N_Q=2, K=4,
    // printed below). The n_R=1 sub-check is therefore expected to fail;
    // it is kept as stated rather than re-pointed at the matching curve.
    {
        let mut s = spec(system(128, 2, 4, 1), Metric::Capacity, -10.0, -10.0, 1.0);
        s.trials = 400;
        let r = &run_sweep(&s).unwrap()[0];
        println!("    reference: N_Q=2 K=4 n_R=1 at -10 dB: {:.3} bpcu", r.value);
    }
    for (nr, target) in [(1usize, 2.63f64), (2, 3.82)] {
        let mut s = spec(system(128, 1, 16, nr), Metric::Capacity, -10.0, -10.0, 1.0);
        s.trials = 400;
        s.capacity_inner = 256;
        let r = &run_sweep(&s).unwrap()[0];
        println!("    n_R={nr} at -10 dB: {:.3} bpcu (se {:.3})", r.value, r.std_err);
        if (r.value - target).abs() > 0.15 {
            pass = false;
        }

        let mut s = spec(system(128, 1, 16, nr), Metric::Capacity, 40.0, 40.0, 1.0);
        s.trials = 200;
        s.capacity_inner = 64;
        let r = &run_sweep(&s).unwrap()[0];
        println!("    n_R={nr} at 40 dB: {:.4} bpcu", r.value);
        if (r.value - 4.0).abs() > 0.02 {
            pass = false;
        }
    }
    report(7, "capacity hits the low-SNR targets and saturates at 4 bpcu", pass);
    assert!(pass);
}

#[test]
fn criterion_08_mindist_cdf() {
    let mut s = spec(system(64, 1, 8, 1), Metric::MindistCdf, 0.0, 0.0, 1.0);
    s.trials = 10_000;
    let iid = run_sweep(&s).unwrap()[0].value;
    s.correlation =
        Some(CorrelationSpec { grid_h: 8, grid_v: 8, spacing_over_lambda: 0.25 });
    let corr = run_sweep(&s).unwrap()[0].value;
    println!("    P[min distance < 3]: iid {iid:.3}, lambda/4 {corr:.3}");
    let pass = (iid - 0.85).abs() <= 0.04 && (corr - 0.72).abs() <= 0.05;
    report(8, "minimum-distance CDF at threshold 3", pass);
    assert!(pass);
}

#[test]
fn criterion_09_baseline_ordering() {
    let run = |scheme: Scheme, baseline: Option<BaselineConfig>| {
        let mut s = spec(system(64, 1, 16, 2), Metric::Ber, -4.0, 6.0, 2.0);
        s.scheme = scheme;
        s.baseline = baseline;
        s.trials = 4_000_000;
        s.min_errors = 300;
        run_sweep(&s).unwrap()
    };
    let csm = run(Scheme::Csm, None);
    let others = [
        run(Scheme::RisMimo, Some(BaselineConfig::RisMimo { m_ris: 16, m_tx: 1 })),
        run(Scheme::RisGsm, Some(BaselineConfig::RisGsm { n_groups: 4, n_active: 3, m_tx: 4 })),
        run(Scheme::RisCim, Some(BaselineConfig::RisCim { m_tx: 128, codes: 2, code_len: 2 })),
    ];
    let mut pass = true;
    let mut qualifying = 0usize;
    for (i, c) in csm.iter().enumerate() {
        if !(1e-4..=1e-2).contains(&c.value) {
            continue;
        }
        qualifying += 1;
        for b in &others {
            let margin = b[i].value - c.value;
            let sigma = (c.std_err * c.std_err + b[i].std_err * b[i].std_err).sqrt();
            if margin <= 3.0 * sigma {
                pass = false;
            }
            println!(
                "    {} dB: csm {:.2e} vs {} {:.2e}",
                c.snr_db, c.value, b[i].scheme, b[i].value
            );
        }
    }
    pass &= qualifying >= 1;
    report(9, "lower BER than every equal-rate baseline", pass);
    assert!(pass);
}

#[test]
fn criterion_10_imperfect_csi_shift() {
    let run = |estimated: bool| {
        let mut s = spec(system(128, 1, 16, 2), Metric::Ber, -10.0, 4.0, 1.0);
        s.trials = 4_000_000;
        s.min_errors = 300;
        if estimated {
            s.estimation = Some(TrainingConfig::from_training_snr_db(15.0, 2));
        }
        run_sweep(&s).unwrap()
    };
    let perfect = run(false);
    let estimated = run(true);
    let mut pass = true;
    let mut checked = 0usize;
    for level in [3e-2f64, 1e-2, 3e-3, 1e-3, 3e-4] {
        let (Some(p), Some(e)) =
            (level_crossing(&perfect, level), level_crossing(&estimated, level))
        else {
            continue;
        };
        checked += 1;
        let shift = (e - p).abs();
        println!("    BER {level:.0e}: shift {shift:.3} dB");
        if shift > 0.5 {
            pass = false;
        }
    }
    pass &= checked >= 3;
    report(10, "pilot-based CSI tracks perfect CSI within 0.5 dB", pass);
    assert!(pass);
}

#[test]
fn criterion_11_correlation_trend() {
    let snr_db = 20.0;
    let mut pass = true;
    for k in [4usize, 8, 16] {
        let mut s = spec(system(64, 1, k, 1), Metric::PerGroupSer, snr_db, snr_db, 1.0);
        s.trials = 10_000_000;
        s.min_errors = 300;
        let iid = run_sweep(&s).unwrap()[0].clone();
        s.correlation =
            Some(CorrelationSpec { grid_h: 8, grid_v: 8, spacing_over_lambda: 0.25 });
        let corr = run_sweep(&s).unwrap()[0].clone();
        let sigma = (iid.std_err * iid.std_err + corr.std_err * corr.std_err).sqrt();
        let diff = corr.value - iid.value;
        println!(
            "    K={k}: iid {:.3e} corr {:.3e} (diff/sigma {:.1})",
            iid.value,
            corr.value,
            diff / sigma
        );
        let ok = if k == 16 { diff > 3.0 * sigma } else { -diff > 3.0 * sigma };
        pass &= ok;
    }
    report(11, "lambda/4 correlation helps small K and hurts K=16", pass);
    assert!(pass);
}

#[test]
fn binomial_helper_sanity() {
    // keeps the acceptance binary honest about the combinatorics it uses
    assert_eq!(binomial(8, 4), 70);
    assert_eq!(binomial(16, 8), 12870);
}
