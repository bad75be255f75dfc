//! End-to-end behavior of the coding scheme against the bounds it is
//! supposed to validate: achievability trends, the converse regime, the
//! cooperation gain over the no-feedback baseline, and rate sweeps.

use switched_mac::sim::{self, DecoderKind, SchemeConfig, SweepAxis};
use switched_mac::MacChannel;

const LOG2_3: f64 = 1.584962500721156;

fn dsbs(q: f64) -> Vec<f64> {
    vec![(1.0 - q) / 2.0, q / 2.0, q / 2.0, (1.0 - q) / 2.0]
}

fn adder_cfg(p: f64, n: usize, b: usize, r1: f64, seed: u64) -> SchemeConfig {
    let mut cfg = SchemeConfig::new(MacChannel::binary_adder(), p, n, b, r1).unwrap();
    cfg.epsilon = 0.6;
    cfg.seed = seed;
    cfg.decoder = DecoderKind::Ensemble;
    cfg
}

/// The cooperation gain: a rate above what the no-feedback baseline can
/// carry with the whole budget on encoder 1 (p·I(X1;Y|X2) = 0.5 bits at
/// p = 0.5), yet below the block-Markov bound (0.5·log2 3 ≈ 0.792). The
/// baseline stays pinned at high error while the scheme's error falls.
#[test]
fn block_markov_beats_baseline_at_the_same_rate() {
    let rate = 0.65;
    assert!(rate < 0.5 * LOG2_3);

    let mut scheme_errors = Vec::new();
    for n in [60usize, 120, 240] {
        let mut cfg = adder_cfg(0.5, n, 4, rate, 7);
        cfg = cfg.with_input_dist(dsbs(1.0 / 3.0)).unwrap();
        cfg.epsilon = 0.5;
        let r = sim::run_block_markov(&cfg, 200).unwrap();
        scheme_errors.push(r.error_rate);
    }
    assert!(
        scheme_errors[0] > scheme_errors[1] && scheme_errors[1] > scheme_errors[2],
        "scheme errors not decreasing: {scheme_errors:?}"
    );

    let mut cfg = adder_cfg(0.5, 120, 1, rate, 7);
    cfg.epsilon = 0.5;
    cfg.r2 = 0.0;
    let baseline = sim::run_no_feedback_baseline(&cfg, 200).unwrap();
    assert!(
        baseline.error_rate >= 0.3,
        "baseline unexpectedly decodes above its rate limit: {baseline:?}"
    );
    assert!(
        baseline.error_rate > scheme_errors[2] + 0.3,
        "no separation: baseline {} vs scheme {}",
        baseline.error_rate,
        scheme_errors[2]
    );
}

/// Baseline achievability: well inside the scaled pentagon the baseline
/// error falls with blocklength.
#[test]
fn baseline_error_falls_inside_its_region() {
    let mut errors = Vec::new();
    for n in [120usize, 240, 480] {
        let mut cfg = adder_cfg(0.5, n, 1, 0.20, 11);
        cfg.epsilon = 0.5;
        let r = sim::run_no_feedback_baseline(&cfg, 200).unwrap();
        errors.push(r.error_rate);
    }
    assert!(
        errors[0] >= errors[1] && errors[1] >= errors[2] && errors[2] < 0.2,
        "baseline errors not improving: {errors:?}"
    );
}

/// Rate sweep across the sum-capacity boundary: the error curve crosses
/// one half between the last in-region grid point and the boundary rate.
#[test]
fn rate_sweep_crosses_half_near_the_boundary() {
    let boundary = 0.5 * LOG2_3;
    let cfg = adder_cfg(0.5, 240, 4, 0.45, 5);
    let rows = sim::sweep(&cfg, SweepAxis::R1, &[0.45, boundary, 1.15], 200).unwrap();
    let errs: Vec<f64> = rows.iter().map(|r| r.report.error_rate).collect();
    assert!(
        errs[0] < 0.5,
        "error {} at r1 = 0.45 should be below one half",
        errs[0]
    );
    assert!(
        errs[1] >= 0.5 && errs[2] >= 0.5,
        "errors at and above the boundary should exceed one half: {errs:?}"
    );
}

/// More feedforward helps at a fixed in-region rate.
#[test]
fn feedforward_sweep_is_nonincreasing() {
    let cfg = adder_cfg(0.2, 300, 4, 0.3, 5);
    let rows = sim::sweep(&cfg, SweepAxis::P, &[0.2, 0.35, 0.5], 200).unwrap();
    let errs: Vec<f64> = rows.iter().map(|r| r.report.error_rate).collect();
    assert!(
        errs[0] >= errs[1] && errs[1] >= errs[2],
        "error not nonincreasing in p: {errs:?}"
    );
}

/// Lossless sanity: a noiseless in-class channel revealing both inputs,
/// full feedforward, rate below one bit — no errors across 1000 trials.
#[test]
fn noiseless_identity_channel_decodes_cleanly() {
    let pair = MacChannel::deterministic(2, 2, 4, |a, b| 2 * a + b).unwrap();
    let mut cfg = SchemeConfig::new(pair, 1.0, 200, 4, 0.9).unwrap();
    cfg.epsilon = 0.6;
    cfg.seed = 5;
    cfg.decoder = DecoderKind::Ensemble;
    let r = sim::run_block_markov(&cfg, 1000).unwrap();
    assert_eq!(r.trial_errors, 0, "{r:?}");
}
