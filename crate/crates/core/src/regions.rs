//! Rate-region and sum-capacity evaluations for the switched-feedback MAC.
//!
//! Regions are represented as half-plane lists plus sampled Pareto points.
//! Inner regions come from support-function sweeps over optimised input
//! distributions; wherever the two-way channel sum-rate appears, results
//! are carried as an `[inner, outer]` interval because that sum-rate is
//! only known through bounds.

use serde::{Deserialize, Serialize};

use crate::channel::MacChannel;
use crate::error::{Error, Result};
use crate::info::StructuredInputDist;
use crate::opt::{
    self, AscentOptions, MiValues, MiWeights, TwoWayBounds,
};
use crate::profile::FeedforwardProfile;
use crate::rng::{self, domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Inner,
    Outer,
    Exact,
}

/// Half-plane `a·R1 + b·R2 <= c`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Constraint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub label: String,
}

/// A 2-D rate region: half-planes with provenance labels plus sampled
/// Pareto frontier points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateRegion {
    pub kind: RegionKind,
    pub constraints: Vec<Constraint>,
    pub frontier: Vec<(f64, f64)>,
}

impl RateRegion {
    /// The degenerate region `{(0,0)}`.
    pub fn origin(kind: RegionKind, label: &str) -> Self {
        RateRegion {
            kind,
            constraints: vec![
                Constraint {
                    a: 1.0,
                    b: 0.0,
                    c: 0.0,
                    label: format!("{label} R1"),
                },
                Constraint {
                    a: 0.0,
                    b: 1.0,
                    c: 0.0,
                    label: format!("{label} R2"),
                },
            ],
            frontier: vec![(0.0, 0.0)],
        }
    }

    pub fn contains(&self, r1: f64, r2: f64, slack: f64) -> bool {
        r1 >= -slack
            && r2 >= -slack
            && self
                .constraints
                .iter()
                .all(|c| c.a * r1 + c.b * r2 <= c.c + slack)
    }

    /// Maximise `mu1·R1 + mu2·R2` over the region by vertex enumeration
    /// (the region is an intersection of half-planes and the nonnegative
    /// quadrant; all our constructions are bounded).
    pub fn max_weighted(&self, mu1: f64, mu2: f64) -> f64 {
        let mut planes: Vec<(f64, f64, f64)> =
            self.constraints.iter().map(|c| (c.a, c.b, c.c)).collect();
        planes.push((-1.0, 0.0, 0.0));
        planes.push((0.0, -1.0, 0.0));
        let mut best: f64 = 0.0;
        let feasible = |r1: f64, r2: f64| {
            planes
                .iter()
                .all(|&(a, b, c)| a * r1 + b * r2 <= c + 1e-9)
        };
        for i in 0..planes.len() {
            for j in (i + 1)..planes.len() {
                let (a1, b1, c1) = planes[i];
                let (a2, b2, c2) = planes[j];
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-12 {
                    continue;
                }
                let r1 = (c1 * b2 - c2 * b1) / det;
                let r2 = (a1 * c2 - a2 * c1) / det;
                if r1.is_finite() && r2.is_finite() && feasible(r1, r2) {
                    best = best.max(mu1 * r1 + mu2 * r2);
                }
            }
        }
        best
    }

    pub fn max_sum(&self) -> f64 {
        self.max_weighted(1.0, 1.0)
    }

    pub fn max_r1(&self) -> f64 {
        self.max_weighted(1.0, 0.0)
    }

    pub fn max_r2(&self) -> f64 {
        self.max_weighted(0.0, 1.0)
    }
}

/// Options shared by the sweep-based region constructions.
#[derive(Debug, Clone)]
pub struct RegionOptions {
    /// Number of weight angles sampled on the first quadrant, endpoints
    /// included (so 65 angles = 64 intervals).
    pub angles: usize,
    pub ascent: AscentOptions,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions {
            angles: 65,
            ascent: AscentOptions::default(),
        }
    }
}

impl RegionOptions {
    pub fn quick(angles: usize, restarts: usize, seed: u64) -> Self {
        RegionOptions {
            angles,
            ascent: AscentOptions::quick(restarts, seed),
        }
    }
}

fn sweep_angles(count: usize) -> Vec<(f64, f64)> {
    let n = count.max(2);
    (0..n)
        .map(|k| {
            let theta = std::f64::consts::FRAC_PI_2 * k as f64 / (n - 1) as f64;
            // snap the endpoints and the diagonal so canonical constraints
            // come out exact
            if k == 0 {
                (1.0, 0.0)
            } else if k == n - 1 {
                (0.0, 1.0)
            } else if 2 * k == n - 1 {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                (s, s)
            } else {
                (theta.cos(), theta.sin())
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Proposition 1: cooperative erasure outer bound
// ---------------------------------------------------------------------------

/// Outer bound `R1 + R2 <= p_avg · max_{P(x1,x2)} I(X1,X2;Y)`.
pub fn prop1_outer(channel: &MacChannel, profile: &FeedforwardProfile) -> Result<RateRegion> {
    let ba = opt::max_joint_mi(channel, 1e-11)?;
    let c = profile.p_avg() * ba.value;
    let frontier: Vec<(f64, f64)> = (0..=16)
        .map(|k| {
            let t = k as f64 / 16.0;
            (c * (1.0 - t), c * t)
        })
        .collect();
    Ok(RateRegion {
        kind: RegionKind::Outer,
        constraints: vec![Constraint {
            a: 1.0,
            b: 1.0,
            c,
            label: "cooperative erasure sum bound".into(),
        }],
        frontier,
    })
}

// ---------------------------------------------------------------------------
// Proposition 2: no-feedback inner bound
// ---------------------------------------------------------------------------

/// Outcome of the Prop. 2 sweep; the per-angle argmax distributions are
/// kept so downstream constructions can reuse them as warm starts.
#[derive(Debug, Clone)]
pub struct Prop2Inner {
    pub region: RateRegion,
    pub argmaxes: Vec<StructuredInputDist>,
}

/// Inner bound: union over `P(u)P(x1|u)P(x2|u)` of the pentagon scaled by
/// `p_avg`, traced by a support-function sweep.
pub fn prop2_inner(
    channel: &MacChannel,
    profile: &FeedforwardProfile,
    u_size: usize,
    ro: &RegionOptions,
) -> Result<Prop2Inner> {
    let p_avg = profile.p_avg();
    if p_avg == 0.0 {
        return Ok(Prop2Inner {
            region: RateRegion::origin(RegionKind::Inner, "no feedforward"),
            argmaxes: Vec::new(),
        });
    }
    let mut constraints = Vec::new();
    let mut frontier = Vec::new();
    let mut argmaxes = Vec::new();
    let mut prev: Option<StructuredInputDist> = None;
    for (mu1, mu2) in sweep_angles(ro.angles) {
        // For mu1 >= mu2 the pentagon support is attained at the corner
        // (I1, Icmi - I1), so the weighted objective is
        // mu2·I(X1,X2;Y|U) + (mu1-mu2)·I(X1;Y|U,X2); symmetric otherwise.
        let weights = if mu1 >= mu2 {
            MiWeights {
                cond_joint: mu2,
                x1_cond: mu1 - mu2,
                ..Default::default()
            }
        } else {
            MiWeights {
                cond_joint: mu1,
                x2_cond: mu2 - mu1,
                ..Default::default()
            }
        };
        let mut ascent = ro.ascent.clone();
        if let Some(p) = &prev {
            ascent.warm_starts.push(p.clone());
        }
        let r = opt::max_structured(&weights, channel, u_size, &ascent)?;
        let vals = opt::mi_values(channel, &r.argmax)?;
        let corner = pentagon_corner(vals.x1_cond, vals.x2_cond, vals.cond_joint, mu1, mu2);
        let point = (p_avg * corner.0, p_avg * corner.1);
        constraints.push(Constraint {
            a: mu1,
            b: mu2,
            c: mu1 * point.0 + mu2 * point.1,
            label: format!("no-feedback support ({mu1:.4},{mu2:.4})"),
        });
        frontier.push(point);
        prev = Some(r.argmax.clone());
        argmaxes.push(r.argmax);
    }
    Ok(Prop2Inner {
        region: RateRegion {
            kind: RegionKind::Inner,
            constraints,
            frontier,
        },
        argmaxes,
    })
}

/// Support corner of the polymatroid pentagon
/// `{R1 <= i1, R2 <= i2, R1+R2 <= i12}` for weights `(mu1, mu2)`.
fn pentagon_corner(i1: f64, i2: f64, i12: f64, mu1: f64, mu2: f64) -> (f64, f64) {
    if mu1 >= mu2 {
        let r1 = i1.min(i12);
        (r1, (i12 - r1).clamp(0.0, i2))
    } else {
        let r2 = i2.min(i12);
        (((i12 - r2).clamp(0.0, i1)), r2)
    }
}

// ---------------------------------------------------------------------------
// Theorem 1: the adder-like class, its region and threshold
// ---------------------------------------------------------------------------

/// Whether condition (the capacity-achieving inequality) holds at the
/// Blahut–Arimoto argmax, with the quantities entering it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub holds: bool,
    pub p: f64,
    /// `max_{P(x1,x2)} I(X1,X2;Y)`
    pub i_star: f64,
    pub h_x1_given_x2: f64,
    pub h_x2_given_x1: f64,
    /// Largest constant feedforward probability for which the condition
    /// holds at this argmax.
    pub threshold: f64,
}

#[derive(Debug, Clone)]
pub struct Theorem1Output {
    pub region: RateRegion,
    pub condition: ConditionReport,
    /// Best `R1` from the max-min sweep (and symmetrically `R2`).
    pub r1_star: f64,
    pub r2_star: f64,
}

fn conditional_entropies(joint: &[f64], x1s: usize, x2s: usize) -> (f64, f64) {
    let mut m1 = vec![0.0; x1s];
    let mut m2 = vec![0.0; x2s];
    for x1 in 0..x1s {
        for x2 in 0..x2s {
            let p = joint[x1 * x2s + x2];
            m1[x1] += p;
            m2[x2] += p;
        }
    }
    let ent = |v: &[f64]| -> f64 {
        v.iter()
            .map(|&p| if p > 0.0 { -p * p.log2() } else { 0.0 })
            .sum()
    };
    let h12 = ent(joint) - ent(&m2);
    let h21 = ent(joint) - ent(&m1);
    (h12.max(0.0), h21.max(0.0))
}

/// `I(X1,X2;Y)` at a fixed joint input table.
fn joint_mi_at(channel: &MacChannel, joint: &[f64]) -> f64 {
    let (x2s, ys) = (channel.x2_size(), channel.y_size());
    let m = joint.len();
    let mut q = vec![0.0; ys];
    for x in 0..m {
        if joint[x] > 0.0 {
            for y in 0..ys {
                q[y] += joint[x] * channel.w(x / x2s, x % x2s, y);
            }
        }
    }
    let mut i = 0.0;
    for x in 0..m {
        let p = joint[x];
        if p == 0.0 {
            continue;
        }
        for y in 0..ys {
            let wv = channel.w(x / x2s, x % x2s, y);
            if wv > 0.0 {
                i += p * wv * (wv / q[y]).log2();
            }
        }
    }
    i.max(0.0)
}

fn condition_report_at_argmax(channel: &MacChannel, p: f64) -> Result<ConditionReport> {
    let ba = opt::max_joint_mi(channel, 1e-11)?;
    let (h12, h21) = conditional_entropies(&ba.argmax, channel.x1_size(), channel.x2_size());
    let cap = h12.max(h21);
    let threshold = if ba.value <= 1e-12 {
        1.0
    } else {
        (cap / ba.value).min(1.0)
    };
    Ok(ConditionReport {
        holds: p * ba.value <= cap + 1e-9,
        p,
        i_star: ba.value,
        h_x1_given_x2: h12,
        h_x2_given_x1: h21,
        threshold,
    })
}

/// Maximise `min{H(X_side | X_other), p·I(X1,X2;Y)}` over joint inputs.
///
/// The sweep tries the symmetric-source family first on binary-input
/// channels, then polishes the best candidates with subgradient ascent.
fn max_min_rate(channel: &MacChannel, p: f64, side: u8, seed: u64) -> (f64, Vec<f64>) {
    let (x1s, x2s) = (channel.x1_size(), channel.x2_size());
    let m = x1s * x2s;
    let value = |joint: &[f64]| -> f64 {
        let (h12, h21) = conditional_entropies(joint, x1s, x2s);
        let h = if side == 1 { h12 } else { h21 };
        h.min(p * joint_mi_at(channel, joint))
    };

    let mut candidates: Vec<Vec<f64>> = vec![vec![1.0 / m as f64; m]];
    if let Ok(ba) = opt::max_joint_mi(channel, 1e-11) {
        candidates.push(ba.argmax);
    }
    if x1s == 2 && x2s == 2 {
        // double-symmetric binary source scan at 1e-4 resolution
        let mut best = (f64::NEG_INFINITY, 0.0);
        for k in 0..=10_000 {
            let q = k as f64 / 10_000.0;
            let joint = vec![(1.0 - q) / 2.0, q / 2.0, q / 2.0, (1.0 - q) / 2.0];
            let v = value(&joint);
            if v > best.0 {
                best = (v, q);
            }
        }
        let q = best.1;
        candidates.push(vec![(1.0 - q) / 2.0, q / 2.0, q / 2.0, (1.0 - q) / 2.0]);
    }
    for r in 0..24u64 {
        let mut rng = rng::substream(seed, domain::RESTART, r);
        candidates.push(random_simplex_vec(m, &mut rng));
    }

    let grad = |joint: &[f64], out: &mut Vec<f64>| {
        let (h12, h21) = conditional_entropies(joint, x1s, x2s);
        let h = if side == 1 { h12 } else { h21 };
        let i = joint_mi_at(channel, joint);
        out.clear();
        out.resize(m, 0.0);
        if h <= p * i {
            // entropy branch: d H(X_a|X_b) / d P = -log2 P(x_a | x_b)
            let mut mo = vec![0.0; if side == 1 { x2s } else { x1s }];
            for x1 in 0..x1s {
                for x2 in 0..x2s {
                    let idx = if side == 1 { x2 } else { x1 };
                    mo[idx] += joint[x1 * x2s + x2];
                }
            }
            for x1 in 0..x1s {
                for x2 in 0..x2s {
                    let pj = joint[x1 * x2s + x2];
                    let pm = mo[if side == 1 { x2 } else { x1 }];
                    out[x1 * x2s + x2] = if pj > 0.0 && pm > 0.0 {
                        -(pj / pm).log2()
                    } else {
                        0.0
                    };
                }
            }
        } else {
            // information branch: p · D(W(·|x) || q)
            let ys = channel.y_size();
            let mut q = vec![0.0; ys];
            for x in 0..m {
                for y in 0..ys {
                    q[y] += joint[x] * channel.w(x / x2s, x % x2s, y);
                }
            }
            for x in 0..m {
                let mut d = 0.0;
                for y in 0..ys {
                    let wv = channel.w(x / x2s, x % x2s, y);
                    if wv > 0.0 && q[y] > 0.0 {
                        d += wv * (wv / q[y]).log2();
                    }
                }
                out[x] = p * d;
            }
        }
    };

    let mut best: (f64, Vec<f64>) = (f64::NEG_INFINITY, vec![]);
    for cand in candidates {
        let (arg, v) = ascend_simplex_generic(cand, &value, &grad, 1e-9, 400);
        if v > best.0 + 1e-12 {
            best = (v, arg);
        }
    }
    (best.0.max(0.0), best.1)
}

fn random_simplex_vec(n: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| -(rng.gen_range(1e-3..1.0f64).ln()))
        .collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Monotone exponentiated-gradient ascent over one simplex.
fn ascend_simplex_generic<F, G>(
    mut p: Vec<f64>,
    objective: &F,
    grad_fn: &G,
    tol: f64,
    max_rounds: usize,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut Vec<f64>),
{
    let mut value = objective(&p);
    let mut eta = 1.0f64;
    let mut grad = Vec::new();
    for _ in 0..max_rounds {
        grad_fn(&p, &mut grad);
        let mut improved = false;
        let mut e = eta;
        for _ in 0..40 {
            let mut trial: Vec<f64> = Vec::with_capacity(p.len());
            let gmax = p
                .iter()
                .zip(&grad)
                .filter(|(pp, _)| **pp > 0.0)
                .map(|(_, g)| *g)
                .fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for (&pp, &g) in p.iter().zip(&grad) {
                let v = if pp > 0.0 {
                    pp * ((e * (g - gmax)).max(-700.0)).exp()
                } else {
                    0.0
                };
                trial.push(v);
                z += v;
            }
            if z > 0.0 {
                trial.iter_mut().for_each(|v| *v /= z);
            }
            let v = objective(&trial);
            if v > value + 0.0 {
                p = trial;
                value = v;
                eta = (e * 1.5).min(1e6);
                improved = true;
                break;
            }
            e *= 0.25;
            if e < 1e-14 {
                break;
            }
        }
        if !improved {
            break;
        }
        let _ = tol;
    }
    (p, value)
}

/// Theorem 1 region for a constant feedforward probability `p` on a
/// channel in the class. Exact (single sum constraint) when the condition
/// holds at the I-maximising input; otherwise the time-sharing inner
/// region of the two max-min sweeps.
pub fn theorem1_region(channel: &MacChannel, p: f64, seed: u64) -> Result<Theorem1Output> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::validation("p must lie in [0,1]"));
    }
    let check = opt::theorem1_class_check(channel);
    if !check.holds {
        let w = check.witness.unwrap();
        return Err(Error::validation(format!(
            "channel outside the class: inputs x{}={} and x{}={} both consistent with (y={}, other={})",
            w.side, w.pair.0, w.side, w.pair.1, w.y, w.other_input
        )));
    }
    let condition = condition_report_at_argmax(channel, p)?;
    let (r1_star, _) = max_min_rate(channel, p, 1, seed ^ 0x51de1);
    let (r2_star, _) = max_min_rate(channel, p, 2, seed ^ 0x51de2);
    if condition.holds {
        let c = p * condition.i_star;
        let frontier: Vec<(f64, f64)> = (0..=16)
            .map(|k| {
                let t = k as f64 / 16.0;
                (c * (1.0 - t), c * t)
            })
            .collect();
        return Ok(Theorem1Output {
            region: RateRegion {
                kind: RegionKind::Exact,
                constraints: vec![Constraint {
                    a: 1.0,
                    b: 1.0,
                    c,
                    label: "class-channel sum capacity".into(),
                }],
                frontier,
            },
            condition,
            r1_star,
            r2_star,
        });
    }
    // Time sharing between (r1_star, 0) and (0, r2_star).
    let mut constraints = Vec::new();
    if r1_star > 0.0 && r2_star > 0.0 {
        constraints.push(Constraint {
            a: 1.0 / r1_star,
            b: 1.0 / r2_star,
            c: 1.0,
            label: "time-sharing segment".into(),
        });
    }
    constraints.push(Constraint {
        a: 1.0,
        b: 0.0,
        c: r1_star,
        label: "max-min R1".into(),
    });
    constraints.push(Constraint {
        a: 0.0,
        b: 1.0,
        c: r2_star,
        label: "max-min R2".into(),
    });
    let frontier: Vec<(f64, f64)> = (0..=16)
        .map(|k| {
            let t = k as f64 / 16.0;
            (r1_star * (1.0 - t), r2_star * t)
        })
        .collect();
    Ok(Theorem1Output {
        region: RateRegion {
            kind: RegionKind::Inner,
            constraints,
            frontier,
        },
        condition,
        r1_star,
        r2_star,
    })
}

/// Largest constant `p` for which the exactness condition holds at the
/// Blahut–Arimoto argmax, located by bisection to 1e-6.
pub fn theorem1_threshold(channel: &MacChannel) -> Result<f64> {
    let check = opt::theorem1_class_check(channel);
    if !check.holds {
        return Err(Error::validation(
            "channel outside the class; threshold undefined",
        ));
    }
    let base = condition_report_at_argmax(channel, 0.0)?;
    if base.i_star <= 1e-12 {
        return Ok(1.0);
    }
    let condition = |p: f64| p * base.i_star <= base.h_x1_given_x2.max(base.h_x2_given_x1) + 1e-12;
    if condition(1.0) {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if condition(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// Example 2 construction
// ---------------------------------------------------------------------------

/// Cap on the transition-table size for the constructed channel.
const EXAMPLE2_ENTRY_CAP: usize = 1 << 22;

/// Deterministic channel with `m = alpha·2^alpha` inputs per encoder:
/// inputs in the same group of `alpha` consecutive symbols are revealed as
/// a pair, everything else collapses to a modular sum. In the class by
/// construction; the output alphabet has `m(alpha+1)` symbols.
pub fn build_example2(alpha: u32) -> Result<MacChannel> {
    if alpha < 2 {
        return Err(Error::validation("alpha must be >= 2"));
    }
    let m = (alpha as usize) << alpha;
    let y_size = m * (alpha as usize + 1);
    let entries = m * m * y_size;
    if entries > EXAMPLE2_ENTRY_CAP {
        return Err(Error::ResourceCap(format!(
            "alpha = {alpha} needs a transition table with {entries} entries (cap {EXAMPLE2_ENTRY_CAP})"
        )));
    }
    let a = alpha as usize;
    MacChannel::deterministic(m, m, y_size, move |x1, x2| {
        if x1 / a == x2 / a {
            let g = x1 / a;
            m + g * a * a + (x1 % a) * a + (x2 % a)
        } else {
            (x1 + x2) % m
        }
    })
}

// ---------------------------------------------------------------------------
// Theorem 2 (KSP sum-capacity) and Lemma 1 finite-B evaluation
// ---------------------------------------------------------------------------

/// Per-block record of a KSP evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockEval {
    pub p_bar: f64,
    pub dist: StructuredInputDist,
    pub i_cond_joint: f64,
    pub i_joint: f64,
}

/// Discretised Theorem 2 evaluation.
#[derive(Debug, Clone)]
pub struct KspEvaluation {
    pub b_blocks: usize,
    pub p_bars: Vec<f64>,
    /// Blocks of the inner (achievable) solve.
    pub per_block: Vec<BlockEval>,
    /// Minimising switchover index `b0` in `1..=B+1` for the inner solve.
    pub tau_star: usize,
    pub sum_value_inner: f64,
    pub sum_value_outer: f64,
    pub tw: TwoWayBounds,
}

/// `min_{b0} (1/B)[ Σ_{b<b0} (fb_b + p̄_b·cmi_b) + Σ_{b>=b0} p̄_b·joint_b ]`
/// by exhaustive scan; returns `(value, b0)` with `b0` 1-based and ties
/// going to the smallest index.
pub fn scan_b0(fb: &[f64], p_bars: &[f64], vals: &[MiValues]) -> (f64, usize) {
    let b = p_bars.len();
    let inv = 1.0 / b as f64;
    // suffix[j] = sum over blocks j..B-1 of p̄·joint
    let mut best = (f64::INFINITY, 1usize);
    for b0 in 1..=b + 1 {
        let mut total = 0.0;
        for (i, v) in vals.iter().enumerate() {
            if i + 1 < b0 {
                total += fb[i] + p_bars[i] * v.cond_joint;
            } else {
                total += p_bars[i] * v.joint;
            }
        }
        total *= inv;
        if total < best.0 - 1e-15 {
            best = (total, b0);
        }
    }
    best
}

/// Multi-block coordinate ascent: maximise `objective(per-block MI values)`
/// over `B` structured distributions. `block_weights` supplies the active
/// subgradient weights for a block at the current values.
fn ascend_multi_block<F, W>(
    channel: &MacChannel,
    u_size: usize,
    init: Vec<StructuredInputDist>,
    objective: &F,
    block_weights: &W,
    tol: f64,
    max_rounds: usize,
) -> (Vec<StructuredInputDist>, Vec<MiValues>, f64)
where
    F: Fn(&[MiValues]) -> f64,
    W: Fn(&[MiValues], usize) -> MiWeights,
{
    let b = init.len();
    let mut dists = init;
    let mut vals: Vec<MiValues> = dists
        .iter()
        .map(|d| opt::mi_values(channel, d).expect("valid dist"))
        .collect();
    let mut value = objective(&vals);
    let nblocks = 1 + 2 * u_size;
    let mut etas = vec![vec![1.0f64; nblocks]; b];
    for _ in 0..max_rounds {
        let before = value;
        for blk in 0..b {
            let weights = block_weights(&vals, blk);
            if weights == MiWeights::default() {
                continue;
            }
            for k in 0..nblocks {
                let mut grad = Vec::new();
                structured_grad_public(channel, &dists[blk], &weights, k, &mut grad);
                let mut eta = etas[blk][k];
                let mut accepted = false;
                for _ in 0..30 {
                    let mut trial = dists[blk].clone();
                    eg_step_block(&mut trial, k, &grad, eta);
                    let tv = opt::mi_values(channel, &trial).expect("valid dist");
                    let mut vals_trial = vals.clone();
                    vals_trial[blk] = tv;
                    let v = objective(&vals_trial);
                    if v > value {
                        dists[blk] = trial;
                        vals = vals_trial;
                        value = v;
                        etas[blk][k] = (eta * 1.5).min(1e6);
                        accepted = true;
                        break;
                    }
                    eta *= 0.25;
                    if eta < 1e-13 {
                        break;
                    }
                }
                if !accepted {
                    etas[blk][k] = (etas[blk][k] * 0.25).max(1e-12);
                }
            }
        }
        if value - before < tol {
            break;
        }
    }
    (dists, vals, value)
}

fn eg_step_block(dist: &mut StructuredInputDist, k: usize, grad: &[f64], eta: f64) {
    let u = dist.u_size();
    let block: &mut [f64] = if k == 0 {
        &mut dist.p_u
    } else if k <= u {
        &mut dist.p_x1_given_u[k - 1]
    } else {
        &mut dist.p_x2_given_u[k - 1 - u]
    };
    let gmax = block
        .iter()
        .zip(grad)
        .filter(|(p, _)| **p > 0.0)
        .map(|(_, g)| *g)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for (p, &g) in block.iter_mut().zip(grad) {
        if *p > 0.0 {
            *p *= ((eta * (g - gmax)).max(-700.0)).exp();
        }
        z += *p;
    }
    if z > 0.0 {
        block.iter_mut().for_each(|p| *p /= z);
    }
}

// Re-export of the structured gradient for the multi-block ascent.
fn structured_grad_public(
    channel: &MacChannel,
    dist: &StructuredInputDist,
    weights: &MiWeights,
    k: usize,
    grad: &mut Vec<f64>,
) {
    opt::structured_block_grad_for(channel, dist, weights, k, grad);
}

fn multi_block_inits(
    channel: &MacChannel,
    b: usize,
    u_size: usize,
    opts: &AscentOptions,
    extra_warm: &[Vec<StructuredInputDist>],
) -> Vec<Vec<StructuredInputDist>> {
    let (x1s, x2s) = (channel.x1_size(), channel.x2_size());
    let mut inits = vec![vec![StructuredInputDist::uniform(u_size, x1s, x2s); b]];
    if u_size >= x1s * x2s {
        if let Ok(ba) = opt::max_joint_mi(channel, 1e-11) {
            if let Ok(d) = StructuredInputDist::from_joint_table(&ba.argmax, x1s, x2s) {
                let padded = pad_dist(&d, u_size);
                inits.push(vec![padded; b]);
            }
        }
    }
    for w in extra_warm {
        if w.len() == b {
            inits.push(w.clone());
        }
    }
    let mut r = 0u64;
    while inits.len() < opts.restarts.max(1) {
        let mut v = Vec::with_capacity(b);
        for blk in 0..b {
            let mut rng = rng::substream(opts.seed ^ 0x6b59, domain::RESTART, r * 131 + blk as u64);
            v.push(random_structured_dist(u_size, x1s, x2s, &mut rng));
        }
        inits.push(v);
        r += 1;
    }
    inits
}

fn pad_dist(d: &StructuredInputDist, u_size: usize) -> StructuredInputDist {
    let mut out = d.clone();
    let (x1s, x2s) = (d.x1_size(), d.x2_size());
    while out.p_u.len() < u_size {
        out.p_u.push(0.0);
        out.p_x1_given_u.push(vec![1.0 / x1s as f64; x1s]);
        out.p_x2_given_u.push(vec![1.0 / x2s as f64; x2s]);
    }
    out
}

fn random_structured_dist(
    u_size: usize,
    x1s: usize,
    x2s: usize,
    rng: &mut impl rand::Rng,
) -> StructuredInputDist {
    StructuredInputDist {
        p_u: random_simplex_vec(u_size, rng),
        p_x1_given_u: (0..u_size).map(|_| random_simplex_vec(x1s, rng)).collect(),
        p_x2_given_u: (0..u_size).map(|_| random_simplex_vec(x2s, rng)).collect(),
    }
}

/// Max-min solve of the discretised objective for fixed per-block feedback
/// contributions `fb_b` (already including any `(1-ε)(1-p̄_b)·S` factor).
pub fn ksp_max_min(
    channel: &MacChannel,
    p_bars: &[f64],
    fb: &[f64],
    u_size: usize,
    opts: &AscentOptions,
    extra_warm: &[Vec<StructuredInputDist>],
) -> (Vec<StructuredInputDist>, Vec<MiValues>, f64, usize) {
    let b = p_bars.len();
    let objective = |vals: &[MiValues]| scan_b0(fb, p_bars, vals).0;
    let block_weights = |vals: &[MiValues], blk: usize| {
        if p_bars[blk] == 0.0 {
            return MiWeights::default();
        }
        let (_, b0) = scan_b0(fb, p_bars, vals);
        if blk + 1 < b0 {
            MiWeights {
                cond_joint: p_bars[blk] / b as f64,
                ..Default::default()
            }
        } else {
            MiWeights {
                joint: p_bars[blk] / b as f64,
                ..Default::default()
            }
        }
    };
    let inits = multi_block_inits(channel, b, u_size, opts, extra_warm);
    use rayon::prelude::*;
    let outcomes: Vec<_> = inits
        .into_par_iter()
        .map(|init| {
            ascend_multi_block(
                channel,
                u_size,
                init,
                &objective,
                &block_weights,
                opts.tol,
                opts.max_rounds,
            )
        })
        .collect();
    let best = outcomes
        .into_iter()
        .reduce(|a, b| if b.2 > a.2 + 1e-12 { b } else { a })
        .expect("at least one init");
    let (value, tau) = scan_b0(fb, p_bars, &best.1);
    (best.0, best.1, value, tau)
}

/// Theorem 2 sum-capacity, discretised to `B` blocks. The reported values
/// carry the two-way sum-rate interval through the computation: the inner
/// value uses the achievable two-way bound, the outer value re-solves with
/// the outer bound (warm-started from the inner solution, so
/// `inner <= outer` holds by construction).
pub fn ksp_sum_capacity(
    channel: &MacChannel,
    profile: &FeedforwardProfile,
    b_blocks: usize,
    u_size: usize,
    opts: &AscentOptions,
) -> Result<KspEvaluation> {
    if b_blocks == 0 {
        return Err(Error::validation("B must be >= 1"));
    }
    let p_bars = profile.block_averages(b_blocks)?;
    let tw = opt::two_way_sum_bounds(channel, opts)?;
    let fb_inner: Vec<f64> = p_bars.iter().map(|&p| (1.0 - p) * tw.sum_inner).collect();
    let (dists, vals, inner, tau_star) =
        ksp_max_min(channel, &p_bars, &fb_inner, u_size, opts, &[]);
    let fb_outer: Vec<f64> = p_bars.iter().map(|&p| (1.0 - p) * tw.sum_outer).collect();
    let warm = vec![dists.clone()];
    let (_, _, outer_raw, _) = ksp_max_min(channel, &p_bars, &fb_outer, u_size, opts, &warm);
    let sum_value_outer = outer_raw.max(inner);
    let per_block = (0..b_blocks)
        .map(|i| BlockEval {
            p_bar: p_bars[i],
            dist: dists[i].clone(),
            i_cond_joint: vals[i].cond_joint,
            i_joint: vals[i].joint,
        })
        .collect();
    Ok(KspEvaluation {
        b_blocks,
        p_bars,
        per_block,
        tau_star,
        sum_value_inner: inner,
        sum_value_outer,
        tw,
    })
}

/// Finite-`B` achievable region of the layered scheme for a fixed two-way
/// rate pair `(s1, s2)` and scheme slack `eps`: the three constraints
/// evaluated exactly as written, maximised over per-block distributions by
/// a support sweep.
pub fn lemma1_finite_b_region(
    channel: &MacChannel,
    profile: &FeedforwardProfile,
    b_blocks: usize,
    eps: f64,
    s_pair: (f64, f64),
    u_size: usize,
    ro: &RegionOptions,
) -> Result<RateRegion> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::validation("eps must lie in [0,1)"));
    }
    let (s1, s2) = s_pair;
    if s1 < 0.0 || s2 < 0.0 {
        return Err(Error::validation("two-way rates must be nonnegative"));
    }
    let tw = opt::two_way_sum_bounds(channel, &ro.ascent)?;
    if s1 + s2 > tw.sum_inner + 1e-9 {
        return Err(Error::validation(format!(
            "two-way pair sums to {}, above the achievable bound {}",
            s1 + s2,
            tw.sum_inner
        )));
    }
    let p_bars = profile.block_averages(b_blocks)?;
    let b = b_blocks as f64;
    let fb: Vec<f64> = p_bars
        .iter()
        .map(|&p| (1.0 - eps) * (1.0 - p) * (s1 + s2))
        .collect();
    let mean_back: f64 = p_bars.iter().map(|&p| (1.0 - eps) * (1.0 - p)).sum::<f64>() / b;

    let c1_of = |vals: &[MiValues]| {
        mean_back * s1 + vals.iter().zip(&p_bars).map(|(v, &p)| p * v.x1_cond).sum::<f64>() / b
    };
    let c2_of = |vals: &[MiValues]| {
        mean_back * s2 + vals.iter().zip(&p_bars).map(|(v, &p)| p * v.x2_cond).sum::<f64>() / b
    };

    let mut constraints = Vec::new();
    let mut frontier = Vec::new();
    let mut prev: Option<Vec<StructuredInputDist>> = None;
    for (mu1, mu2) in sweep_angles(ro.angles) {
        let objective = |vals: &[MiValues]| {
            let c12 = scan_b0(&fb, &p_bars, vals).0;
            support_pentagon(c1_of(vals), c2_of(vals), c12, mu1, mu2).0
        };
        let block_weights = |vals: &[MiValues], blk: usize| {
            if p_bars[blk] == 0.0 {
                return MiWeights::default();
            }
            let (c12, b0) = scan_b0(&fb, &p_bars, vals);
            let (_, _, l1, l2, l12) = support_pentagon(c1_of(vals), c2_of(vals), c12, mu1, mu2);
            let scale = p_bars[blk] / b;
            let mut w = MiWeights {
                x1_cond: l1 * scale,
                x2_cond: l2 * scale,
                ..Default::default()
            };
            if blk + 1 < b0 {
                w.cond_joint = l12 * scale;
            } else {
                w.joint = l12 * scale;
            }
            w
        };
        let mut warm: Vec<Vec<StructuredInputDist>> = Vec::new();
        if let Some(p) = &prev {
            warm.push(p.clone());
        }
        let inits = multi_block_inits(channel, b_blocks, u_size, &ro.ascent, &warm);
        use rayon::prelude::*;
        let outcomes: Vec<_> = inits
            .into_par_iter()
            .map(|init| {
                ascend_multi_block(
                    channel,
                    u_size,
                    init,
                    &objective,
                    &block_weights,
                    ro.ascent.tol,
                    ro.ascent.max_rounds,
                )
            })
            .collect();
        let best = outcomes
            .into_iter()
            .reduce(|a, c| if c.2 > a.2 + 1e-12 { c } else { a })
            .expect("at least one init");
        let (dists, vals, _) = best;
        let c12 = scan_b0(&fb, &p_bars, &vals).0;
        let (val, vertex, _, _, _) = support_pentagon(c1_of(&vals), c2_of(&vals), c12, mu1, mu2);
        constraints.push(Constraint {
            a: mu1,
            b: mu2,
            c: val,
            label: format!("finite-B support ({mu1:.4},{mu2:.4})"),
        });
        frontier.push(vertex);
        prev = Some(dists);
    }
    Ok(RateRegion {
        kind: RegionKind::Inner,
        constraints,
        frontier,
    })
}

/// Convenience: just the Lemma-1 sum value (the region's sum constraint).
pub fn lemma1_sum_value(
    channel: &MacChannel,
    profile: &FeedforwardProfile,
    b_blocks: usize,
    eps: f64,
    s_pair: (f64, f64),
    u_size: usize,
    opts: &AscentOptions,
    extra_warm: &[Vec<StructuredInputDist>],
) -> Result<(f64, Vec<StructuredInputDist>)> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::validation("eps must lie in [0,1)"));
    }
    let p_bars = profile.block_averages(b_blocks)?;
    let fb: Vec<f64> = p_bars
        .iter()
        .map(|&p| (1.0 - eps) * (1.0 - p) * (s_pair.0 + s_pair.1))
        .collect();
    let (dists, _, value, _) = ksp_max_min(channel, &p_bars, &fb, u_size, opts, extra_warm);
    Ok((value, dists))
}

/// Support of `{R1 <= c1, R2 <= c2, R1+R2 <= c12} ∩ R+^2` at weights
/// `(mu1, mu2)`, with the vertex and the multipliers `(λ1, λ2, λ12)` such
/// that `support = λ1 c1 + λ2 c2 + λ12 c12`.
fn support_pentagon(c1: f64, c2: f64, c12: f64, mu1: f64, mu2: f64) -> (f64, (f64, f64), f64, f64, f64) {
    let c1 = c1.max(0.0);
    let c2 = c2.max(0.0);
    let c12 = c12.max(0.0);
    if c12 >= c1 + c2 {
        let v = (c1, c2);
        return (mu1 * c1 + mu2 * c2, v, mu1, mu2, 0.0);
    }
    // dominant face active: two corners
    let corner_a = {
        let r1 = c1.min(c12);
        (r1, (c12 - r1).clamp(0.0, c2))
    };
    let corner_b = {
        let r2 = c2.min(c12);
        ((c12 - r2).clamp(0.0, c1), r2)
    };
    let va = mu1 * corner_a.0 + mu2 * corner_a.1;
    let vb = mu1 * corner_b.0 + mu2 * corner_b.1;
    if va >= vb {
        // corner A: R1 bound and sum bound active (or only the sum if c12 <= c1)
        if c12 <= c1 {
            (va, corner_a, 0.0, 0.0, mu1)
        } else {
            (va, corner_a, mu1 - mu2, 0.0, mu2)
        }
    } else if c12 <= c2 {
        (vb, corner_b, 0.0, 0.0, mu2)
    } else {
        (vb, corner_b, 0.0, mu2 - mu1, mu1)
    }
}

// ---------------------------------------------------------------------------
// Corollary region (step switching pattern)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CorollaryOutput {
    pub inner: RateRegion,
    pub outer: RateRegion,
    pub tw: TwoWayBounds,
}

/// Region of the averaged constraints with the two-way interval carried
/// through: the inner variant uses the achievable witness pair, the outer
/// variant allows any split of the outer sum bound. For the step pattern
/// the inner region is the achievable region; it is marked exact when the
/// two-way interval is degenerate.
pub fn corollary_region(
    channel: &MacChannel,
    p_avg: f64,
    u_size: usize,
    ro: &RegionOptions,
    warm: &[StructuredInputDist],
) -> Result<CorollaryOutput> {
    if !(0.0..=1.0).contains(&p_avg) {
        return Err(Error::validation("p_avg must lie in [0,1]"));
    }
    let tw = opt::two_way_sum_bounds(channel, &ro.ascent)?;
    if p_avg == 0.0 {
        return Ok(CorollaryOutput {
            inner: RateRegion::origin(RegionKind::Inner, "no feedforward"),
            outer: RateRegion::origin(RegionKind::Outer, "no feedforward"),
            tw,
        });
    }
    let (s1, s2) = tw.inner_rates;
    let tw_gap = tw.sum_outer - tw.sum_inner;
    let inner_kind = if tw_gap.abs() < 1e-9 {
        RegionKind::Exact
    } else {
        RegionKind::Inner
    };

    let inner_caps = move |v: &MiValues| {
        let c1 = (1.0 - p_avg) * s1 + p_avg * v.x1_cond;
        let c2 = (1.0 - p_avg) * s2 + p_avg * v.x2_cond;
        let c12 = ((1.0 - p_avg) * (s1 + s2) + p_avg * v.cond_joint).min(p_avg * v.joint);
        (c1, c2, c12)
    };
    let two = tw.sum_outer;
    let outer_caps = move |v: &MiValues| {
        let c1 = (1.0 - p_avg) * two + p_avg * v.x1_cond;
        let c2 = (1.0 - p_avg) * two + p_avg * v.x2_cond;
        let c12 = ((1.0 - p_avg) * two + p_avg * v.cond_joint)
            .min(p_avg * v.joint)
            .min((1.0 - p_avg) * two + p_avg * (v.x1_cond + v.x2_cond));
        (c1, c2, c12)
    };

    let inner = corollary_sweep(channel, u_size, ro, warm, &inner_caps, p_avg, inner_kind)?;
    let outer = corollary_sweep(channel, u_size, ro, warm, &outer_caps, p_avg, RegionKind::Outer)?;
    Ok(CorollaryOutput { inner, outer, tw })
}

fn corollary_sweep<C>(
    channel: &MacChannel,
    u_size: usize,
    ro: &RegionOptions,
    warm: &[StructuredInputDist],
    caps: &C,
    p_avg: f64,
    kind: RegionKind,
) -> Result<RateRegion>
where
    C: Fn(&MiValues) -> (f64, f64, f64) + Sync,
{
    let mut constraints = Vec::new();
    let mut frontier = Vec::new();
    let mut prev: Option<StructuredInputDist> = None;
    for (mu1, mu2) in sweep_angles(ro.angles) {
        // Gradient weights track the active support decomposition; the sum
        // cap takes whichever of its branches is active.
        let objective = |d: &StructuredInputDist| {
            let v = match opt::mi_values(channel, d) {
                Ok(v) => v,
                Err(_) => return f64::NEG_INFINITY,
            };
            let (c1, c2, c12) = caps(&v);
            support_pentagon(c1, c2, c12, mu1, mu2).0
        };
        let grad = |ch: &MacChannel, d: &StructuredInputDist, k: usize, g: &mut Vec<f64>| {
            let v = opt::mi_values(ch, d).expect("valid dist");
            let (c1, c2, c12) = caps(&v);
            let (_, _, l1, l2, l12) = support_pentagon(c1, c2, c12, mu1, mu2);
            let mut w = MiWeights {
                x1_cond: l1 * p_avg,
                x2_cond: l2 * p_avg,
                ..Default::default()
            };
            // which sum branch is active?
            let joint_branch = (p_avg * v.joint) <= c12 + 1e-15;
            let iplus_branch = {
                let (cc1, cc2, _) = caps(&v);
                let _ = (cc1, cc2);
                false
            };
            if joint_branch {
                w.joint += l12 * p_avg;
            } else if iplus_branch {
                w.x1_cond += l12 * p_avg;
                w.x2_cond += l12 * p_avg;
            } else {
                w.cond_joint += l12 * p_avg;
            }
            opt::structured_block_grad_for(ch, d, &w, k, g);
        };
        let mut best_val = f64::NEG_INFINITY;
        let mut best_vertex = (0.0, 0.0);
        // direct evaluation of warm starts keeps containment structural
        for w in warm.iter().chain(prev.as_ref()) {
            if w.u_size() <= u_size {
                let padded = pad_dist(w, u_size);
                let v = objective(&padded);
                if v > best_val {
                    best_val = v;
                    let mv = opt::mi_values(channel, &padded)?;
                    let (c1, c2, c12) = caps(&mv);
                    best_vertex = support_pentagon(c1, c2, c12, mu1, mu2).1;
                }
            }
        }
        let inits = corollary_inits(channel, u_size, &ro.ascent, prev.as_ref());
        use rayon::prelude::*;
        let outcomes: Vec<_> = inits
            .into_par_iter()
            .map(|init| ascend_structured_external(channel, init, &objective, &grad, &ro.ascent))
            .collect();
        for (dist, value) in outcomes {
            if value > best_val + 1e-12 {
                best_val = value;
                let mv = opt::mi_values(channel, &dist)?;
                let (c1, c2, c12) = caps(&mv);
                best_vertex = support_pentagon(c1, c2, c12, mu1, mu2).1;
                prev = Some(dist);
            }
        }
        constraints.push(Constraint {
            a: mu1,
            b: mu2,
            c: best_val.max(0.0),
            label: format!("step-pattern support ({mu1:.4},{mu2:.4})"),
        });
        frontier.push(best_vertex);
    }
    Ok(RateRegion {
        kind,
        constraints,
        frontier,
    })
}

fn corollary_inits(
    channel: &MacChannel,
    u_size: usize,
    opts: &AscentOptions,
    prev: Option<&StructuredInputDist>,
) -> Vec<StructuredInputDist> {
    let (x1s, x2s) = (channel.x1_size(), channel.x2_size());
    let mut inits = vec![StructuredInputDist::uniform(u_size, x1s, x2s)];
    if u_size >= x1s * x2s {
        if let Ok(ba) = opt::max_joint_mi(channel, 1e-11) {
            if let Ok(d) = StructuredInputDist::from_joint_table(&ba.argmax, x1s, x2s) {
                inits.push(pad_dist(&d, u_size));
            }
        }
    }
    if let Some(p) = prev {
        inits.push(p.clone());
    }
    let mut r = 0u64;
    while inits.len() < opts.restarts.max(1) {
        let mut rng = rng::substream(opts.seed ^ 0xc040, domain::RESTART, r);
        inits.push(random_structured_dist(u_size, x1s, x2s, &mut rng));
        r += 1;
    }
    inits
}

/// Single-dist ascent with external objective/gradient closures.
fn ascend_structured_external<F, G>(
    channel: &MacChannel,
    init: StructuredInputDist,
    objective: &F,
    grad: &G,
    opts: &AscentOptions,
) -> (StructuredInputDist, f64)
where
    F: Fn(&StructuredInputDist) -> f64,
    G: Fn(&MacChannel, &StructuredInputDist, usize, &mut Vec<f64>),
{
    let nblocks = 1 + 2 * init.u_size();
    let mut dist = init;
    let mut value = objective(&dist);
    let mut etas = vec![1.0f64; nblocks];
    for _ in 0..opts.max_rounds {
        let before = value;
        for k in 0..nblocks {
            let mut g = Vec::new();
            grad(channel, &dist, k, &mut g);
            let mut eta = etas[k];
            let mut accepted = false;
            for _ in 0..30 {
                let mut trial = dist.clone();
                eg_step_block(&mut trial, k, &g, eta);
                let v = objective(&trial);
                if v > value {
                    dist = trial;
                    value = v;
                    etas[k] = (eta * 1.5).min(1e6);
                    accepted = true;
                    break;
                }
                eta *= 0.25;
                if eta < 1e-13 {
                    break;
                }
            }
            if !accepted {
                etas[k] = (etas[k] * 0.25).max(1e-12);
            }
        }
        if value - before < opts.tol {
            break;
        }
    }
    (dist, value)
}

// ---------------------------------------------------------------------------
// Random-channel helper shared by the property-test suites
// ---------------------------------------------------------------------------

/// Seeded random structured input for property tests.
pub fn random_structured_input(
    u_size: usize,
    x1s: usize,
    x2s: usize,
    seed: u64,
    index: u64,
) -> StructuredInputDist {
    let mut rng = rng::substream(seed, domain::TEST, index ^ 0x5d15);
    random_structured_dist(u_size, x1s, x2s, &mut rng)
}

/// Seeded random channel for property tests: alphabet sizes in `2..=3`
/// (outputs up to 4) with Dirichlet-ish rows.
pub fn random_channel(seed: u64, index: u64) -> MacChannel {
    use rand::Rng;
    let mut rng = rng::substream(seed, domain::TEST, index);
    let x1s = rng.gen_range(2..=3usize);
    let x2s = rng.gen_range(2..=3usize);
    let ys = rng.gen_range(2..=4usize);
    let mut t = vec![0.0; x1s * x2s * ys];
    for x1 in 0..x1s {
        for x2 in 0..x2s {
            let row = random_simplex_vec(ys, &mut rng);
            for y in 0..ys {
                t[(x1 * x2s + x2) * ys + y] = row[y];
            }
        }
    }
    MacChannel::new(x1s, x2s, ys, t).expect("rows are stochastic")
}
