//! Monte Carlo simulation of the block-Markov scheme with shared
//! information, plus a no-feedback baseline MAC code.
//!
//! The scheme follows the achievability construction exactly: encoder 2
//! sends a bin index describing the previous block's shared-information
//! sequence `z^n` (erasure under feedforward, the input pair under
//! feedback, both encoders can reconstruct it for class channels), encoder
//! 1 superimposes its message on that codeword, and the decoder first
//! recovers the bin index by joint typicality and then tests message
//! hypotheses against both the typicality condition and the hash
//! consistency condition.
//!
//! Two decoder paths produce statistically matching reports:
//!
//! * `Exact` enumerates codebook hypotheses literally. Cost grows as
//!   `2^{nR}`, so it is only admissible for small codebooks.
//! * `Ensemble` samples the channel, the true codewords and the hash chain
//!   exactly as above, but replaces the scan over the *other* (i.i.d.,
//!   never-transmitted) codewords by the exact conditional probability
//!   that at least one of them passes the decoder's test, and draws the
//!   outcome. Per class of positions sharing `(x2, y_d)` the candidate
//!   symbol counts are multinomial, and robust typicality is a per-cell
//!   count box, so that probability is an exact product of box
//!   probabilities. This simulates the random-coding ensemble (fresh
//!   codebooks per block) at any rate without enumerated codebooks.
//!
//! Reports carry exact Clopper–Pearson 95% intervals; trials draw from
//! counter-derived substreams so any thread count gives identical counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, Binomial, ContinuousCDF, DiscreteCDF};

use crate::channel::MacChannel;
use crate::error::{Error, Result};
use crate::info::{self, Axis, JointDist};
use crate::opt;
use crate::profile::FeedforwardProfile;
use crate::rng::{self, domain, stable_hash_seq};
use crate::switched::SwitchedChannelInstance;

/// Codebook storage cap (symbols): configurations whose materialised books
/// would exceed this are rejected by the exact decoder.
pub const CODEBOOK_SYMBOL_CAP: f64 = (1u64 << 26) as f64;

/// Hypothesis-test budget for the exact decoder across a whole run.
pub const EXACT_OPS_CAP: f64 = (1u64 << 32) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    /// Literal codebook enumeration.
    Exact,
    /// Rao-Blackwellised random-coding ensemble (no enumeration).
    Ensemble,
    /// Exact when the caps allow it, ensemble otherwise.
    #[default]
    Auto,
}

/// Configuration of one simulated scheme.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub channel: MacChannel,
    /// Constant feedforward probability.
    pub p: f64,
    /// Sub-block length.
    pub n: usize,
    /// Number of sub-blocks.
    pub b_blocks: usize,
    /// Message rate in bits per channel use (codebooks of size `2^{nR1}`).
    pub r1: f64,
    /// Bin-index rate; `None` selects `0.8 · I(X2; Y_d)`.
    pub r0: Option<f64>,
    /// Second message rate, used by the no-feedback baseline only.
    pub r2: f64,
    /// Codebook-generating joint input `P(x1,x2)`, flat `[x1][x2]`.
    pub input_dist: Vec<f64>,
    /// Robust-typicality parameter shared by decoder and analysis.
    pub epsilon: f64,
    pub seed: u64,
    pub decoder: DecoderKind,
}

impl SchemeConfig {
    /// Default typicality parameter. Desk-scale blocklengths need wide
    /// boxes for the true sequence to be typical at all; 0.4 keeps the
    /// packing side meaningful while letting n in the hundreds decode.
    pub const DEFAULT_EPSILON: f64 = 0.4;

    pub fn new(channel: MacChannel, p: f64, n: usize, b_blocks: usize, r1: f64) -> Result<Self> {
        let m = channel.x1_size() * channel.x2_size();
        let uniform = vec![1.0 / m as f64; m];
        let cfg = SchemeConfig {
            channel,
            p,
            n,
            b_blocks,
            r1,
            r0: None,
            r2: 0.0,
            input_dist: uniform,
            epsilon: Self::DEFAULT_EPSILON,
            seed: 0,
            decoder: DecoderKind::Auto,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_input_dist(mut self, dist: Vec<f64>) -> Result<Self> {
        self.input_dist = dist;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::validation("p must lie in [0,1]"));
        }
        if self.n == 0 {
            return Err(Error::validation("n must be >= 1"));
        }
        if self.r1 < 0.0 || self.r2 < 0.0 || self.r0.map_or(false, |r| r < 0.0) {
            return Err(Error::validation("rates must be nonnegative"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::validation("epsilon must be positive"));
        }
        let m = self.channel.x1_size() * self.channel.x2_size();
        if self.input_dist.len() != m {
            return Err(Error::validation("input_dist does not match the channel"));
        }
        if self.input_dist.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::validation("input_dist has a negative entry"));
        }
        let s: f64 = self.input_dist.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::validation(format!("input_dist sums to {s}")));
        }
        Ok(())
    }

    /// Resolved bin rate: explicit `r0`, else `0.8 · I(X2;Y_d)`.
    pub fn resolved_r0(&self) -> f64 {
        self.r0.unwrap_or_else(|| 0.8 * self.i_x2_yd())
    }

    /// `I(X2; Y_d) = p · I(X2; Y)` under the codebook input distribution.
    pub fn i_x2_yd(&self) -> f64 {
        let (x1s, x2s, ys) = (
            self.channel.x1_size(),
            self.channel.x2_size(),
            self.channel.y_size(),
        );
        let mut p2 = vec![0.0; x2s];
        let mut q_yx2 = vec![0.0; x2s * ys];
        let mut q_y = vec![0.0; ys];
        for x1 in 0..x1s {
            for x2 in 0..x2s {
                let pj = self.input_dist[x1 * x2s + x2];
                p2[x2] += pj;
                for y in 0..ys {
                    let w = self.channel.w(x1, x2, y);
                    q_yx2[x2 * ys + y] += pj * w;
                    q_y[y] += pj * w;
                }
            }
        }
        let mut i = 0.0;
        for x2 in 0..x2s {
            for y in 0..ys {
                let pxy = q_yx2[x2 * ys + y];
                if pxy > 0.0 {
                    i += pxy * (pxy / (p2[x2] * q_y[y])).log2();
                }
            }
        }
        self.p * i.max(0.0)
    }
}

/// Monte Carlo outcome of one configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SimReport {
    pub trials: u64,
    /// Trials in which at least one message block was decoded wrongly.
    pub trial_errors: u64,
    /// Total wrongly decoded message blocks across trials.
    pub block_errors: u64,
    /// Trials with a bin-decoding (stage 1) failure.
    pub stage1_errors: u64,
    /// Trials where stage 1 succeeded but the joint stage failed.
    pub stage2_errors: u64,
    pub error_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `(B-1)·n·R1 / (n·B)`.
    pub effective_rate: f64,
    /// Wall-clock per trial. Excluded from serialised payloads so reruns
    /// stay byte-identical; the run manifest carries the total duration.
    #[serde(skip)]
    pub mean_decode_seconds: f64,
    pub seed: u64,
}

/// Exact binomial (Clopper–Pearson) interval at the given confidence.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let alpha = 1.0 - confidence;
    let k = successes as f64;
    let n = trials as f64;
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0)
            .expect("valid beta")
            .inverse_cdf(alpha / 2.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k)
            .expect("valid beta")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

// ---------------------------------------------------------------------------
// Codebook sizes and lazy codewords
// ---------------------------------------------------------------------------

/// `⌈2^bits⌉` kept in both float and (when small enough) integer form.
#[derive(Debug, Clone, Copy)]
struct BookSize {
    count: f64,
    small: Option<u64>,
}

impl BookSize {
    fn from_rate(n: usize, rate: f64) -> Self {
        let bits = n as f64 * rate;
        let count = bits.exp2().ceil();
        let small = if bits < 31.0 { Some(count as u64) } else { None };
        BookSize { count, small }
    }
}

/// Cumulative row for inverse-CDF sampling.
fn cdf_row(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|&p| {
            acc += p;
            acc
        })
        .collect()
}

fn sample_cdf(cdf: &[f64], u: f64) -> usize {
    for (i, &c) in cdf.iter().enumerate() {
        if u < c {
            return i;
        }
    }
    cdf.len() - 1
}

struct Codebooks<'a> {
    cfg: &'a SchemeConfig,
    p2_cdf: Vec<f64>,
    /// `cond_cdf[x2]` is the cdf of `P(x1 | x2)`.
    cond_cdf: Vec<Vec<f64>>,
}

impl<'a> Codebooks<'a> {
    fn new(cfg: &'a SchemeConfig) -> Self {
        let (x1s, x2s) = (cfg.channel.x1_size(), cfg.channel.x2_size());
        let mut p2 = vec![0.0; x2s];
        for x1 in 0..x1s {
            for x2 in 0..x2s {
                p2[x2] += cfg.input_dist[x1 * x2s + x2];
            }
        }
        let cond = (0..x2s)
            .map(|x2| {
                let row: Vec<f64> = (0..x1s)
                    .map(|x1| {
                        if p2[x2] > 0.0 {
                            cfg.input_dist[x1 * x2s + x2] / p2[x2]
                        } else {
                            1.0 / x1s as f64
                        }
                    })
                    .collect();
                cdf_row(&row)
            })
            .collect();
        Codebooks {
            cfg,
            p2_cdf: cdf_row(&p2),
            cond_cdf: cond,
        }
    }

    /// `x2^n(m0)`, regenerated on demand from the seed.
    fn x2_codeword(&self, m0_key: u64) -> Vec<usize> {
        let mut rng = rng::substream(self.cfg.seed, domain::CODEBOOK_X2, m0_key);
        (0..self.cfg.n)
            .map(|_| sample_cdf(&self.p2_cdf, rand::Rng::gen::<f64>(&mut rng)))
            .collect()
    }

    /// `x1^n(m1 | m0)`, drawn symbol-wise from `P(x1 | x2_i(m0))`.
    fn x1_codeword(&self, m0_key: u64, m1_key: u64, x2cw: &[usize]) -> Vec<usize> {
        let mut rng = rng::substream2(self.cfg.seed, domain::CODEBOOK_X1, m0_key, m1_key);
        x2cw.iter()
            .map(|&x2| sample_cdf(&self.cond_cdf[x2], rand::Rng::gen::<f64>(&mut rng)))
            .collect()
    }
}

/// Pseudorandom uniform bin for a shared-information sequence (lazy hash);
/// unbiased multiply-shift map from the 64-bit hash into `0..m0_count`.
fn hash_bin(seed: u64, z_seq: &[usize], m0: BookSize) -> f64 {
    let h = stable_hash_seq(seed ^ 0x5eed_b1b1, z_seq);
    match m0.small {
        Some(c) => (((h as u128) * (c as u128)) >> 64) as f64,
        None => (h as f64 / 2.0f64.powi(64)) * m0.count,
    }
}

// ---------------------------------------------------------------------------
// Reference joints and typicality boxes
// ---------------------------------------------------------------------------

fn erasure_idx(channel: &MacChannel) -> usize {
    channel.erasure_symbol()
}

fn z_erasure(channel: &MacChannel) -> usize {
    channel.x1_size() * channel.x2_size()
}

fn z_pair(channel: &MacChannel, x1: usize, x2: usize) -> usize {
    x1 * channel.x2_size() + x2
}

/// Joint of `(X2, Y_d)` under the codebook input and switch probability.
fn stage1_joint(cfg: &SchemeConfig) -> Result<JointDist> {
    let ch = &cfg.channel;
    let (x1s, x2s, ys) = (ch.x1_size(), ch.x2_size(), ch.y_size());
    JointDist::from_fn(
        vec![Axis::new("x2", x2s), Axis::new("yd", ys + 1)],
        |idx| {
            let (x2, yd) = (idx[0], idx[1]);
            if yd == ys {
                (1.0 - cfg.p)
                    * (0..x1s)
                        .map(|x1| cfg.input_dist[x1 * x2s + x2])
                        .sum::<f64>()
            } else {
                cfg.p
                    * (0..x1s)
                        .map(|x1| cfg.input_dist[x1 * x2s + x2] * ch.w(x1, x2, yd))
                        .sum::<f64>()
            }
        },
    )
}

/// Joint of `(X1, X2, Z, Y_d)` for the stage-2 test.
fn stage2_joint(cfg: &SchemeConfig) -> Result<JointDist> {
    let ch = &cfg.channel;
    let (x2s, ys) = (ch.x2_size(), ch.y_size());
    let ze = z_erasure(ch);
    JointDist::from_fn(
        vec![
            Axis::new("x1", ch.x1_size()),
            Axis::new("x2", x2s),
            Axis::new("z", ze + 1),
            Axis::new("yd", ys + 1),
        ],
        |idx| {
            let (x1, x2, z, yd) = (idx[0], idx[1], idx[2], idx[3]);
            let pj = cfg.input_dist[x1 * x2s + x2];
            if yd == ys {
                // feedback use: decoder sees the erasure, z carries the pair
                if z == z_pair(ch, x1, x2) {
                    (1.0 - cfg.p) * pj
                } else {
                    0.0
                }
            } else if z == ze {
                cfg.p * pj * ch.w(x1, x2, yd)
            } else {
                0.0
            }
        },
    )
}

/// Joint of `(X1, X2, Y_d)` for the baseline with independent codebooks.
fn baseline_joint(cfg: &SchemeConfig, p1: &[f64], p2: &[f64]) -> Result<JointDist> {
    let ch = &cfg.channel;
    let ys = ch.y_size();
    JointDist::from_fn(
        vec![
            Axis::new("x1", ch.x1_size()),
            Axis::new("x2", ch.x2_size()),
            Axis::new("yd", ys + 1),
        ],
        |idx| {
            let (x1, x2, yd) = (idx[0], idx[1], idx[2]);
            let m = p1[x1] * p2[x2];
            if yd == ys {
                (1.0 - cfg.p) * m
            } else {
                cfg.p * m * ch.w(x1, x2, yd)
            }
        },
    )
}

/// Integer count box `[lo, hi]` of robust typicality for a cell of mass
/// `p_cell` at blocklength `n`: `|k/n - p| <= eps·p`.
fn cell_box(n: usize, p_cell: f64, eps: f64) -> (u64, u64) {
    if p_cell <= 0.0 {
        return (0, 0);
    }
    let lo = (n as f64 * p_cell * (1.0 - eps)).ceil().max(0.0) as u64;
    let hi = (n as f64 * p_cell * (1.0 + eps)).floor() as u64;
    (lo, hi)
}

/// Probability that a multinomial draw (`total` trials over `probs`) lands
/// inside the per-symbol count boxes. Binary alphabets use the binomial
/// CDF directly; larger alphabets run a windowed DP over symbols.
fn multinomial_box_prob(total: u64, probs: &[f64], boxes: &[(u64, u64)]) -> f64 {
    debug_assert_eq!(probs.len(), boxes.len());
    // quick infeasibility checks
    let lo_sum: u64 = boxes.iter().map(|b| b.0).sum();
    if lo_sum > total {
        return 0.0;
    }
    if boxes.iter().map(|b| b.1).sum::<u64>() < total {
        return 0.0;
    }
    if probs.len() == 1 {
        return if boxes[0].0 <= total && total <= boxes[0].1 {
            1.0
        } else {
            0.0
        };
    }
    if probs.len() == 2 {
        let (lo0, hi0) = boxes[0];
        let lo = lo0.max(total.saturating_sub(boxes[1].1));
        let hi = hi0.min(total.saturating_sub(boxes[1].0)).min(total);
        if lo > hi {
            return 0.0;
        }
        return binomial_range(total, probs[0], lo, hi);
    }
    // DP over symbols: state = number of positions consumed so far.
    let mut dp = vec![0.0f64; total as usize + 1];
    dp[0] = 1.0;
    let mut rest: f64 = probs.iter().sum();
    for (j, (&q, &(lo, hi))) in probs.iter().zip(boxes).enumerate() {
        let last = j + 1 == probs.len();
        let cond = if rest > 0.0 { (q / rest).min(1.0) } else { 0.0 };
        rest -= q;
        let mut next = vec![0.0f64; total as usize + 1];
        for (s, &mass) in dp.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let remaining = total - s as u64;
            if last {
                if remaining >= lo && remaining <= hi {
                    next[total as usize] += mass;
                }
                continue;
            }
            let k_hi = hi.min(remaining);
            let mut k = lo;
            while k <= k_hi {
                let p_k = binomial_pmf(remaining, cond, k);
                if p_k > 0.0 {
                    next[s + k as usize] += mass * p_k;
                }
                k += 1;
            }
        }
        dp = next;
    }
    dp[total as usize].clamp(0.0, 1.0)
}

fn binomial_range(n: u64, p: f64, lo: u64, hi: u64) -> f64 {
    if lo > hi {
        return 0.0;
    }
    if p <= 0.0 {
        return if lo == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if hi >= n && lo <= n { 1.0 } else { 0.0 };
    }
    let d = Binomial::new(p, n).expect("valid binomial");
    let upper = d.cdf(hi.min(n));
    let lower = if lo == 0 { 0.0 } else { d.cdf(lo - 1) };
    (upper - lower).clamp(0.0, 1.0)
}

fn binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    // ln-domain for stability at large n
    let ln = ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln();
    ln.exp()
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_factorial(n: u64) -> f64 {
    statrs::function::gamma::ln_gamma(n as f64 + 1.0)
}

// ---------------------------------------------------------------------------
// Ensemble machinery: per-class pass probabilities
// ---------------------------------------------------------------------------

/// `ln P(candidate passes all boxes)` for a candidate whose symbols are
/// i.i.d. within classes of positions; `class_counts[c]` positions in
/// class `c`, `class_probs[c]` the symbol law, `class_boxes[c]` the count
/// boxes (absolute counts over the whole block).
fn ln_pass_prob(
    class_counts: &[u64],
    class_probs: &[Vec<f64>],
    class_boxes: &[Vec<(u64, u64)>],
) -> f64 {
    let mut ln = 0.0;
    for c in 0..class_counts.len() {
        let p = multinomial_box_prob(class_counts[c], &class_probs[c], &class_boxes[c]);
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        ln += p.ln();
    }
    ln
}

/// `P(at least one of `count` independent candidates passes)`, with the
/// per-candidate pass probability given in log-domain.
fn prob_any_passes(ln_pass: f64, count: f64) -> f64 {
    if count <= 0.0 {
        return 0.0;
    }
    if ln_pass == f64::NEG_INFINITY {
        return 0.0;
    }
    let pass = ln_pass.exp().min(1.0);
    if pass >= 1.0 {
        return 1.0;
    }
    // 1 - (1-p)^count, stable for tiny p and astronomical counts
    (-(count * (-pass).ln_1p()).exp_m1()).clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// Block-Markov runner
// ---------------------------------------------------------------------------

struct SchemeContext<'a> {
    cfg: &'a SchemeConfig,
    books: Codebooks<'a>,
    instance: SwitchedChannelInstance,
    m0: BookSize,
    m1: BookSize,
    joint1: JointDist,
    joint2: JointDist,
    recover_x1: Vec<Vec<Option<usize>>>,
    recover_x2: Vec<Vec<Option<usize>>>,
    use_exact: bool,
}

#[derive(Default)]
struct TrialOutcome {
    message_block_errors: u64,
    stage1_failed: bool,
    stage2_failed: bool,
}

/// Run the block-Markov scheme for `trials` independent trials.
pub fn run_block_markov(cfg: &SchemeConfig, trials: u64) -> Result<SimReport> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::validation("trials must be >= 1"));
    }
    if cfg.b_blocks < 2 {
        return Err(Error::validation(
            "block-Markov needs at least 2 sub-blocks",
        ));
    }
    let class = opt::theorem1_class_check(&cfg.channel);
    if !class.holds {
        return Err(Error::validation(
            "channel outside the shared-information class; encoders cannot reconstruct z",
        ));
    }
    let (recover_x1, recover_x2) = opt::recovery_maps(&cfg.channel)?;
    let m0 = BookSize::from_rate(cfg.n, cfg.resolved_r0());
    let m1 = BookSize::from_rate(cfg.n, cfg.r1);
    let use_exact = select_decoder(cfg, trials, m0, m1)?;
    let ctx = SchemeContext {
        cfg,
        books: Codebooks::new(cfg),
        instance: SwitchedChannelInstance::new(
            cfg.channel.clone(),
            FeedforwardProfile::constant(cfg.p)?,
            cfg.n,
            cfg.seed,
        )?,
        m0,
        m1,
        joint1: stage1_joint(cfg)?,
        joint2: stage2_joint(cfg)?,
        recover_x1,
        recover_x2,
        use_exact,
    };

    let started = std::time::Instant::now();
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(&ctx, t))
        .collect();
    let elapsed = started.elapsed().as_secs_f64();

    let mut report = SimReport {
        trials,
        trial_errors: 0,
        block_errors: 0,
        stage1_errors: 0,
        stage2_errors: 0,
        error_rate: 0.0,
        ci_low: 0.0,
        ci_high: 0.0,
        effective_rate: cfg.r1 * (cfg.b_blocks as f64 - 1.0) / cfg.b_blocks as f64,
        mean_decode_seconds: elapsed / trials as f64,
        seed: cfg.seed,
    };
    for o in outcomes {
        report.block_errors += o.message_block_errors;
        if o.message_block_errors > 0 {
            report.trial_errors += 1;
        }
        if o.stage1_failed {
            report.stage1_errors += 1;
        }
        if o.stage2_failed {
            report.stage2_errors += 1;
        }
    }
    report.error_rate = report.trial_errors as f64 / trials as f64;
    let (lo, hi) = clopper_pearson(report.trial_errors, trials, 0.95);
    report.ci_low = lo;
    report.ci_high = hi;
    Ok(report)
}

fn select_decoder(cfg: &SchemeConfig, trials: u64, m0: BookSize, m1: BookSize) -> Result<bool> {
    let n = cfg.n as f64;
    let storage = (m0.count + m0.count * m1.count) * n;
    let ops = trials as f64 * cfg.b_blocks as f64 * n * (m0.count + m1.count);
    let fits = storage <= CODEBOOK_SYMBOL_CAP && ops <= EXACT_OPS_CAP;
    match cfg.decoder {
        DecoderKind::Exact if !fits => Err(Error::ResourceCap(format!(
            "exact decoding needs {storage:.3e} codebook symbols and {ops:.3e} hypothesis operations; \
             lower n or the rates, or use the ensemble decoder"
        ))),
        DecoderKind::Exact => Ok(true),
        DecoderKind::Ensemble => Ok(false),
        DecoderKind::Auto => Ok(fits),
    }
}

fn run_trial(ctx: &SchemeContext, t: u64) -> TrialOutcome {
    let cfg = ctx.cfg;
    let b_total = cfg.b_blocks;
    let n = cfg.n;
    let ch = &cfg.channel;
    let ze = z_erasure(ch);
    let mut rng = rng::substream(cfg.seed, domain::TRIAL, t);

    // True message indices; the last block carries the fixed convention
    // message 0 and is never counted.
    let m1_true: Vec<f64> = (0..b_total)
        .map(|b| {
            if b + 1 == b_total {
                0.0
            } else {
                match ctx.m1.small {
                    Some(c) => rand::Rng::gen_range(&mut rng, 0..c) as f64,
                    None => (rand::Rng::gen::<f64>(&mut rng) * ctx.m1.count).floor(),
                }
            }
        })
        .collect();

    // Transmission pass: channel, switch, shared-information chain.
    let mut m0_true = vec![0.0f64; b_total + 1];
    let mut x1cw = Vec::with_capacity(b_total);
    let mut x2cw = Vec::with_capacity(b_total);
    let mut yd = Vec::with_capacity(b_total);
    let mut z_true: Vec<Vec<usize>> = Vec::with_capacity(b_total);
    for b in 0..b_total {
        let m0_key = key_of(m0_true[b], t, b, ctx.use_exact, 0);
        let m1_key = key_of(m1_true[b], t, b, ctx.use_exact, 1);
        let x2 = ctx.books.x2_codeword(m0_key);
        let x1 = ctx.books.x1_codeword(m0_key, m1_key, &x2);
        let sample = ctx
            .instance
            .sample_block((t * b_total as u64) + b as u64, &x1, &x2)
            .expect("validated inputs");
        // Both encoders reconstruct z; the class property makes this exact.
        let mut z = Vec::with_capacity(n);
        for i in 0..n {
            if sample.v[i] == 1 {
                z.push(ze);
            } else {
                let y = sample.y_e[i];
                let enc2_x1 = ctx.recover_x1[y][x2[i]].expect("class property");
                let enc1_x2 = ctx.recover_x2[y][x1[i]].expect("class property");
                assert_eq!(enc2_x1, x1[i], "encoder 2 reconstruction diverged");
                assert_eq!(enc1_x2, x2[i], "encoder 1 reconstruction diverged");
                z.push(z_pair(ch, x1[i], x2[i]));
            }
        }
        m0_true[b + 1] = hash_bin(cfg.seed, &z, ctx.m0);
        x1cw.push(x1);
        x2cw.push(x2);
        yd.push(sample.y_d);
        z_true.push(z);
    }

    // Decoding pass.
    let mut out = TrialOutcome::default();
    // stage-1 results for blocks 1..B-1 (block 0 has the fixed bin 0)
    let mut stage1_ok = vec![true; b_total];
    for b in 1..b_total {
        let ok = if ctx.use_exact {
            exact_stage1(ctx, b, &yd[b], m0_true[b]) == Some(m0_true[b])
        } else {
            ensemble_stage1(ctx, &mut rng, &x2cw[b], &yd[b], m0_true[b])
        };
        stage1_ok[b] = ok;
        if !ok {
            out.stage1_failed = true;
        }
    }
    // message of block b-1 is decoded after block b
    for b in 1..b_total {
        let msg = b - 1;
        if msg >= b_total - 1 {
            break;
        }
        if !stage1_ok[b] || !stage1_ok[msg] {
            // wrong codebook slice or failed hash reference: the message is lost
            out.message_block_errors += 1;
            continue;
        }
        let correct = if ctx.use_exact {
            exact_stage2(ctx, t, msg, &yd[msg], m0_true[msg], m0_true[b], m1_true[msg])
        } else {
            ensemble_stage2(
                ctx,
                &mut rng,
                &x1cw[msg],
                &x2cw[msg],
                &z_true[msg],
                &yd[msg],
                m1_true[msg],
            )
        };
        if !correct {
            out.message_block_errors += 1;
            out.stage2_failed = true;
        }
    }
    out
}

/// Codeword substream key. The exact decoder keys by codebook index so the
/// same codeword is reused wherever the index recurs; the ensemble path
/// keys by position in the trial, which realises the fresh-codebook
/// ensemble the error analysis averages over.
fn key_of(index: f64, t: u64, b: usize, exact: bool, salt: u64) -> u64 {
    if exact {
        index as u64
    } else {
        rng::splitmix64((t << 20) ^ ((b as u64) << 2) ^ salt)
    }
}

// --- exact decoder ---------------------------------------------------------

fn exact_stage1(ctx: &SchemeContext, _b: usize, yd: &[usize], _m0_true: f64) -> Option<f64> {
    let m0_count = ctx.m0.small.expect("exact path requires small books");
    for m0 in 0..m0_count {
        let cw = ctx.books.x2_codeword(m0);
        if info::is_robustly_typical(&[&cw, yd], &ctx.joint1, ctx.cfg.epsilon).unwrap_or(false) {
            return Some(m0 as f64);
        }
    }
    // no candidate satisfied the test: fall back to the smallest index
    Some(0.0)
}

fn exact_stage2(
    ctx: &SchemeContext,
    _t: u64,
    _msg: usize,
    yd: &[usize],
    m0_prev: f64,
    m0_next: f64,
    m1_true: f64,
) -> bool {
    let ch = &ctx.cfg.channel;
    let e = erasure_idx(ch);
    let ze = z_erasure(ch);
    let m1_count = ctx.m1.small.expect("exact path requires small books");
    let x2 = ctx.books.x2_codeword(m0_prev as u64);
    let mut zhat = vec![0usize; ctx.cfg.n];
    for m1 in 0..m1_count {
        let x1 = ctx.books.x1_codeword(m0_prev as u64, m1, &x2);
        // conditions force z to the erasure wherever the decoder saw the
        // output, and to the hypothesised pair elsewhere
        for i in 0..ctx.cfg.n {
            zhat[i] = if yd[i] != e {
                ze
            } else {
                z_pair(ch, x1[i], x2[i])
            };
        }
        if hash_bin(ctx.cfg.seed, &zhat, ctx.m0) != m0_next {
            continue;
        }
        if info::is_robustly_typical(&[&x1, &x2, &zhat, yd], &ctx.joint2, ctx.cfg.epsilon)
            .unwrap_or(false)
        {
            return m1 as f64 == m1_true;
        }
    }
    // fall back to the smallest index
    m1_true == 0.0
}

// --- ensemble decoder ------------------------------------------------------

/// Stage 1 without enumeration: check the true codeword directly, then
/// sample whether any smaller-indexed i.i.d. codeword passes.
fn ensemble_stage1(
    ctx: &SchemeContext,
    rng: &mut impl rand::Rng,
    x2_true: &[usize],
    yd: &[usize],
    m0_true: f64,
) -> bool {
    let cfg = ctx.cfg;
    let ch = &cfg.channel;
    let (x2s, ys) = (ch.x2_size(), ch.y_size());
    let true_typical =
        info::is_robustly_typical(&[x2_true, yd], &ctx.joint1, cfg.epsilon).unwrap_or(false);

    // classes by decoder observation, symbols are the candidate's x2 values
    let n_classes = ys + 1;
    let mut counts = vec![0u64; n_classes];
    for &y in yd {
        counts[y] += 1;
    }
    let mut p2 = vec![0.0; x2s];
    for x1 in 0..ch.x1_size() {
        for x2 in 0..x2s {
            p2[x2] += cfg.input_dist[x1 * x2s + x2];
        }
    }
    let probs: Vec<Vec<f64>> = (0..n_classes).map(|_| p2.clone()).collect();
    let boxes: Vec<Vec<(u64, u64)>> = (0..n_classes)
        .map(|c| {
            (0..x2s)
                .map(|x2| cell_box(cfg.n, ctx.joint1.mass()[x2 * n_classes + c], cfg.epsilon))
                .collect()
        })
        .collect();
    let ln_pass = ln_pass_prob(&counts, &probs, &boxes);

    if true_typical {
        // error iff some wrong candidate with a smaller index passes
        let p_err = prob_any_passes(ln_pass, m0_true);
        !(rng.gen::<f64>() < p_err)
    } else {
        // decoder outputs the smallest passer, or index 0 when none passes;
        // that can only be right if the true bin is 0 and nothing passes
        if m0_true != 0.0 {
            return false;
        }
        let p_any = prob_any_passes(ln_pass, ctx.m0.count - 1.0);
        !(rng.gen::<f64>() < p_any)
    }
}

/// Stage 2 without enumeration. For a hypothesised message the candidate
/// shared sequence is fully determined, so a wrong codeword passes only if
/// (a) it matches the true inputs on every feedback position — then the
/// hash condition holds automatically — or (b) its count profile lands in
/// the typicality boxes and its (distinct) shared sequence hashes into the
/// decoded bin, an independent `1/M0` event.
fn ensemble_stage2(
    ctx: &SchemeContext,
    rng: &mut impl rand::Rng,
    x1_true: &[usize],
    x2_true: &[usize],
    z_true: &[usize],
    yd: &[usize],
    m1_true: f64,
) -> bool {
    let cfg = ctx.cfg;
    let ch = &cfg.channel;
    let (x1s, x2s, ys) = (ch.x1_size(), ch.x2_size(), ch.y_size());
    let e = erasure_idx(ch);
    let true_typical =
        info::is_robustly_typical(&[x1_true, x2_true, z_true, yd], &ctx.joint2, cfg.epsilon)
            .unwrap_or(false);

    if !true_typical && m1_true != 0.0 {
        return false;
    }

    // classes by (x2_true, yd); candidate x1 symbols are i.i.d. P(x1|x2)
    let n_classes = x2s * (ys + 1);
    let mut counts = vec![0u64; n_classes];
    for i in 0..cfg.n {
        counts[x2_true[i] * (ys + 1) + yd[i]] += 1;
    }
    let mut p2 = vec![0.0; x2s];
    for x1 in 0..x1s {
        for x2 in 0..x2s {
            p2[x2] += cfg.input_dist[x1 * x2s + x2];
        }
    }
    let cond = |x1: usize, x2: usize| -> f64 {
        if p2[x2] > 0.0 {
            cfg.input_dist[x1 * x2s + x2] / p2[x2]
        } else {
            1.0 / x1s as f64
        }
    };
    let ze = z_erasure(ch);
    let mass_of = |x1: usize, x2: usize, ydv: usize| -> f64 {
        let z = if ydv == ys { z_pair(ch, x1, x2) } else { ze };
        let zdim = ze + 1;
        let yddim = ys + 1;
        ctx.joint2.mass()[((x1 * x2s + x2) * zdim + z) * yddim + ydv]
    };
    let mut probs = Vec::with_capacity(n_classes);
    let mut boxes = Vec::with_capacity(n_classes);
    for x2 in 0..x2s {
        for ydv in 0..=ys {
            probs.push((0..x1s).map(|x1| cond(x1, x2)).collect::<Vec<f64>>());
            boxes.push(
                (0..x1s)
                    .map(|x1| cell_box(cfg.n, mass_of(x1, x2, ydv), cfg.epsilon))
                    .collect::<Vec<(u64, u64)>>(),
            );
        }
    }
    let ln_boxes = ln_pass_prob(&counts, &probs, &boxes);

    // exact feedback-position match: the candidate equals the true x1 on
    // every position the decoder saw as an erasure
    let mut ln_exact_match = 0.0;
    for i in 0..cfg.n {
        if yd[i] == e {
            let q = cond(x1_true[i], x2_true[i]);
            if q <= 0.0 {
                ln_exact_match = f64::NEG_INFINITY;
                break;
            }
            ln_exact_match += q.ln();
        }
    }
    // ... and stays typical on the feedforward positions
    for x2 in 0..x2s {
        for ydv in 0..ys {
            let c = x2 * (ys + 1) + ydv;
            let p = multinomial_box_prob(counts[c], &probs[c], &boxes[c]);
            if p <= 0.0 {
                ln_exact_match = f64::NEG_INFINITY;
            } else {
                ln_exact_match += p.ln();
            }
        }
    }
    // feedback-position counts of the true sequence must lie in the boxes
    if true_typical {
        // implied: the true tuple passed every box
    } else {
        ln_exact_match = f64::NEG_INFINITY;
    }

    let p_exact = ln_exact_match.exp().min(1.0);
    let p_boxes = ln_boxes.exp().min(1.0);
    let inv_m0 = 1.0 / ctx.m0.count;
    let p_pass = (p_exact + (p_boxes - p_exact).max(0.0) * inv_m0).min(1.0);

    if true_typical {
        let p_err = if p_pass >= 1.0 {
            if m1_true > 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            prob_any_passes(p_pass.ln(), m1_true)
        };
        !(rng.gen::<f64>() < p_err)
    } else {
        // m1_true == 0 here; correct only if no other candidate passes
        let p_any = if p_pass >= 1.0 && ctx.m1.count > 1.0 {
            1.0
        } else {
            prob_any_passes(p_pass.max(1e-320).ln(), ctx.m1.count - 1.0)
        };
        !(rng.gen::<f64>() < p_any)
    }
}

// ---------------------------------------------------------------------------
// No-feedback baseline
// ---------------------------------------------------------------------------

/// Single-block random MAC code over the erased output: independent
/// codebooks from the marginals of the configured input, joint-typicality
/// decoding, total blocklength `n·B`, rates `(r1, r2)`.
pub fn run_no_feedback_baseline(cfg: &SchemeConfig, trials: u64) -> Result<SimReport> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::validation("trials must be >= 1"));
    }
    let ch = &cfg.channel;
    let (x1s, x2s) = (ch.x1_size(), ch.x2_size());
    let n_total = cfg.n * cfg.b_blocks;
    let m1 = BookSize::from_rate(n_total, cfg.r1);
    let m2 = BookSize::from_rate(n_total, cfg.r2);
    let use_exact = {
        let storage = (m1.count + m2.count) * n_total as f64;
        let ops = trials as f64 * m1.count * m2.count * n_total as f64;
        let fits = storage <= CODEBOOK_SYMBOL_CAP && ops <= EXACT_OPS_CAP;
        match cfg.decoder {
            DecoderKind::Exact if !fits => {
                return Err(Error::ResourceCap(
                    "baseline codebooks exceed the exact-decoding caps".into(),
                ))
            }
            DecoderKind::Exact => true,
            DecoderKind::Ensemble => false,
            DecoderKind::Auto => fits,
        }
    };
    let mut p1 = vec![0.0; x1s];
    let mut p2 = vec![0.0; x2s];
    for x1 in 0..x1s {
        for x2 in 0..x2s {
            p1[x1] += cfg.input_dist[x1 * x2s + x2];
            p2[x2] += cfg.input_dist[x1 * x2s + x2];
        }
    }
    let joint = baseline_joint(cfg, &p1, &p2)?;
    let p1_cdf = cdf_row(&p1);
    let p2_cdf = cdf_row(&p2);
    let instance = SwitchedChannelInstance::new(
        ch.clone(),
        FeedforwardProfile::constant(cfg.p)?,
        n_total,
        cfg.seed ^ 0xba5e,
    )?;

    let codeword = |dom: u64, key: u64, cdf: &[f64]| -> Vec<usize> {
        let mut r = rng::substream(cfg.seed ^ 0xba5e, dom, key);
        (0..n_total)
            .map(|_| sample_cdf(cdf, rand::Rng::gen::<f64>(&mut r)))
            .collect()
    };

    let started = std::time::Instant::now();
    let outcomes: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::substream(cfg.seed ^ 0xba5e, domain::TRIAL, t);
            let draw = |rng: &mut rand_chacha::ChaCha12Rng, m: BookSize| -> f64 {
                match m.small {
                    Some(c) => rand::Rng::gen_range(&mut *rng, 0..c) as f64,
                    None => (rand::Rng::gen::<f64>(&mut *rng) * m.count).floor(),
                }
            };
            let m1_true = draw(&mut rng, m1);
            let m2_true = draw(&mut rng, m2);
            let k1 = if use_exact {
                m1_true as u64
            } else {
                rng::splitmix64(t ^ 0x11)
            };
            let k2 = if use_exact {
                m2_true as u64
            } else {
                rng::splitmix64(t ^ 0x22)
            };
            let x1 = codeword(domain::CODEBOOK_X1, k1, &p1_cdf);
            let x2 = codeword(domain::CODEBOOK_X2, k2, &p2_cdf);
            let sample = instance.sample_block(t, &x1, &x2).expect("valid inputs");
            let yd = &sample.y_d;
            if use_exact {
                let m1c = m1.small.unwrap();
                let m2c = m2.small.unwrap();
                for a in 0..m1c {
                    let c1 = codeword(domain::CODEBOOK_X1, a, &p1_cdf);
                    for b in 0..m2c {
                        let c2 = codeword(domain::CODEBOOK_X2, b, &p2_cdf);
                        if info::is_robustly_typical(&[&c1, &c2, yd], &joint, cfg.epsilon)
                            .unwrap_or(false)
                        {
                            return !(a as f64 == m1_true && b as f64 == m2_true);
                        }
                    }
                }
                // nothing satisfied the test: smallest-pair fallback
                !(m1_true == 0.0 && m2_true == 0.0)
            } else {
                baseline_ensemble_trial(
                    cfg, &joint, &p1, &p2, &x1, &x2, yd, m1, m2, m1_true, m2_true, &mut rng,
                )
            }
        })
        .collect();
    let elapsed = started.elapsed().as_secs_f64();

    let trial_errors = outcomes.iter().filter(|&&e| e).count() as u64;
    let (lo, hi) = clopper_pearson(trial_errors, trials, 0.95);
    Ok(SimReport {
        trials,
        trial_errors,
        block_errors: trial_errors,
        stage1_errors: 0,
        stage2_errors: trial_errors,
        error_rate: trial_errors as f64 / trials as f64,
        ci_low: lo,
        ci_high: hi,
        effective_rate: cfg.r1 + cfg.r2,
        mean_decode_seconds: elapsed / trials as f64,
        seed: cfg.seed,
    })
}

#[allow(clippy::too_many_arguments)]
fn baseline_ensemble_trial(
    cfg: &SchemeConfig,
    joint: &JointDist,
    p1: &[f64],
    p2: &[f64],
    x1_true: &[usize],
    x2_true: &[usize],
    yd: &[usize],
    m1: BookSize,
    m2: BookSize,
    m1_true: f64,
    m2_true: f64,
    rng: &mut impl rand::Rng,
) -> bool {
    let ch = &cfg.channel;
    let (x1s, x2s, ys) = (ch.x1_size(), ch.x2_size(), ch.y_size());
    let n_total = yd.len();
    let true_typical =
        info::is_robustly_typical(&[x1_true, x2_true, yd], joint, cfg.epsilon).unwrap_or(false);

    let yddim = ys + 1;
    let mass_of = |x1: usize, x2: usize, ydv: usize| joint.mass()[(x1 * x2s + x2) * yddim + ydv];

    // wrong m1, true m2: classes (x2_true, yd), symbols x1 ~ p1
    let ln_a = {
        let n_classes = x2s * yddim;
        let mut counts = vec![0u64; n_classes];
        for i in 0..n_total {
            counts[x2_true[i] * yddim + yd[i]] += 1;
        }
        let probs: Vec<Vec<f64>> = (0..n_classes).map(|_| p1.to_vec()).collect();
        let boxes: Vec<Vec<(u64, u64)>> = (0..n_classes)
            .map(|c| {
                let (x2, ydv) = (c / yddim, c % yddim);
                (0..x1s)
                    .map(|x1| cell_box(n_total, mass_of(x1, x2, ydv), cfg.epsilon))
                    .collect()
            })
            .collect();
        ln_pass_prob(&counts, &probs, &boxes)
    };
    // true m1, wrong m2
    let ln_b = {
        let n_classes = x1s * yddim;
        let mut counts = vec![0u64; n_classes];
        for i in 0..n_total {
            counts[x1_true[i] * yddim + yd[i]] += 1;
        }
        let probs: Vec<Vec<f64>> = (0..n_classes).map(|_| p2.to_vec()).collect();
        let boxes: Vec<Vec<(u64, u64)>> = (0..n_classes)
            .map(|c| {
                let (x1, ydv) = (c / yddim, c % yddim);
                (0..x2s)
                    .map(|x2| cell_box(n_total, mass_of(x1, x2, ydv), cfg.epsilon))
                    .collect()
            })
            .collect();
        ln_pass_prob(&counts, &probs, &boxes)
    };
    // both wrong: classes yd, symbols (x1, x2) ~ p1 ⊗ p2
    let ln_ab = {
        let mut counts = vec![0u64; yddim];
        for &y in yd {
            counts[y] += 1;
        }
        let pair_probs: Vec<f64> = (0..x1s * x2s)
            .map(|i| p1[i / x2s] * p2[i % x2s])
            .collect();
        let probs: Vec<Vec<f64>> = (0..yddim).map(|_| pair_probs.clone()).collect();
        let boxes: Vec<Vec<(u64, u64)>> = (0..yddim)
            .map(|ydv| {
                (0..x1s * x2s)
                    .map(|i| cell_box(n_total, mass_of(i / x2s, i % x2s, ydv), cfg.epsilon))
                    .collect()
            })
            .collect();
        ln_pass_prob(&counts, &probs, &boxes)
    };

    // Smallest-pair decoding in lexicographic order: with the true pair
    // typical, an error needs a passing pair ordered before the true one.
    // Returns true when the trial is an error.
    if true_typical {
        // pairs (a < m1_true, any b): per wrong a, one candidate with the
        // true m2 codeword and (M2-1) fully fresh pairs; plus (m1_true, b < m2_true)
        let ln_no_before = m1_true * ln1me(ln_a)
            + (m1_true * (m2.count - 1.0)) * ln1me(ln_ab)
            + m2_true * ln1me(ln_b);
        let p_err = (-ln_no_before.exp_m1()).clamp(0.0, 1.0);
        rng.gen::<f64>() < p_err
    } else {
        if m1_true != 0.0 || m2_true != 0.0 {
            return true;
        }
        let ln_none = (m1.count - 1.0) * ln1me(ln_a)
            + ((m1.count - 1.0) * (m2.count - 1.0)) * ln1me(ln_ab)
            + (m2.count - 1.0) * ln1me(ln_b);
        let p_any = (-ln_none.exp_m1()).clamp(0.0, 1.0);
        rng.gen::<f64>() < p_any
    }
}

/// `ln(1 - e^{ln_p})`, safe for `ln_p = -inf`.
fn ln1me(ln_p: f64) -> f64 {
    if ln_p == f64::NEG_INFINITY {
        0.0
    } else {
        let p = ln_p.exp().min(1.0);
        if p >= 1.0 {
            f64::NEG_INFINITY
        } else {
            (-p).ln_1p()
        }
    }
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    N,
    P,
    R1,
}

/// One row of a sweep: the axis value and that configuration's report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub report: SimReport,
}

/// Run the block-Markov scheme across a swept axis with a shared master
/// seed. Values must be strictly monotone.
pub fn sweep(
    template: &SchemeConfig,
    axis: SweepAxis,
    values: &[f64],
    trials: u64,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::validation("sweep needs at least one value"));
    }
    let monotone_up = values.windows(2).all(|w| w[0] < w[1]);
    let monotone_down = values.windows(2).all(|w| w[0] > w[1]);
    if !(monotone_up || monotone_down) {
        return Err(Error::validation("sweep values must be strictly monotone"));
    }
    let mut rows = Vec::with_capacity(values.len());
    for &v in values {
        let mut cfg = template.clone();
        match axis {
            SweepAxis::N => {
                if v <= 0.0 || v.fract() != 0.0 {
                    return Err(Error::validation("n values must be positive integers"));
                }
                cfg.n = v as usize;
            }
            SweepAxis::P => cfg.p = v,
            SweepAxis::R1 => cfg.r1 = v,
        }
        cfg.validate()?;
        let report = run_block_markov(&cfg, trials)?;
        rows.push(SweepRow {
            axis_value: v,
            report,
        });
    }
    Ok(rows)
}

/// CSV header matching [`sweep_row_csv`].
pub const SWEEP_CSV_HEADER: &str =
    "axis_value,trials,errors,error_rate,ci_low,ci_high,stage1_errors,stage2_errors,seed";

pub fn sweep_row_csv(row: &SweepRow) -> String {
    format!(
        "{:.6},{},{},{:.6},{:.6},{:.6},{},{},{}",
        row.axis_value,
        row.report.trials,
        row.report.trial_errors,
        row.report.error_rate,
        row.report.ci_low,
        row.report.ci_high,
        row.report.stage1_errors,
        row.report.stage2_errors,
        row.report.seed
    )
}
