//! Mutual-information maximisation over input distributions.
//!
//! Three solvers live here:
//!
//! * [`max_joint_mi`] — Blahut–Arimoto over the compound input `(x1, x2)`,
//!   with the standard per-iteration capacity sandwich as a stopping bound.
//!   The objective is concave, so the returned value is certified to lie
//!   within `tol` of the true maximum.
//! * [`max_structured`] — alternating exponentiated-gradient ascent over
//!   `P(u) P(x1|u) P(x2|u)` for a weighted combination of the four MI
//!   functionals appearing in the bounds. Nonconvex: the result is a
//!   certified lower bound only, improved by restarts.
//! * [`two_way_sum_bounds`] — Shannon-type inner bound (independent inputs,
//!   no adaptation) and a cut-set style outer bound (arbitrary joint input)
//!   on the sum-rate of the two-way channel with common output.

use rand::Rng;
use rayon::prelude::*;

use crate::channel::MacChannel;
use crate::error::{Error, Result};
use crate::info::StructuredInputDist;
use crate::rng::{self, domain};

pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Outcome of an input-distribution optimisation.
#[derive(Debug, Clone)]
pub struct OptResult<D> {
    /// Objective value in bits at `argmax`.
    pub value: f64,
    /// The optimising distribution.
    pub argmax: D,
    /// Iterations (BA iterations, or ascent rounds of the winning restart).
    pub iterations: usize,
    /// For Blahut–Arimoto: the capacity sandwich width at the stop, a true
    /// suboptimality bound. For the nonconvex solvers: the final round
    /// improvement, a stopping diagnostic rather than a global certificate.
    pub gap_bound: f64,
}

/// Inner/outer bounds on the two-way channel sum-rate.
#[derive(Debug, Clone)]
pub struct TwoWayBounds {
    pub sum_inner: f64,
    pub sum_outer: f64,
    /// Independent input pair achieving `sum_inner`.
    pub witness_inner: (Vec<f64>, Vec<f64>),
    /// Rate split `(S1, S2)` achieved by the witness:
    /// `S1 = I(X1;Y|X2)`, `S2 = I(X2;Y|X1)`.
    pub inner_rates: (f64, f64),
}

// ---------------------------------------------------------------------------
// Blahut–Arimoto over the compound input
// ---------------------------------------------------------------------------

const BA_ITERATION_CAP: usize = 200_000;

/// Maximise `I(X1,X2;Y)` over all joint inputs `P(x1,x2)`.
///
/// Returns the certified lower value of the final sandwich; the argmax is
/// the flat `[x1][x2]` input table.
pub fn max_joint_mi(channel: &MacChannel, tol: f64) -> Result<OptResult<Vec<f64>>> {
    if !(tol > 0.0) {
        return Err(Error::validation("tolerance must be positive"));
    }
    let m = channel.x1_size() * channel.x2_size();
    let ys = channel.y_size();
    let w = |x: usize, y: usize| {
        channel.w(x / channel.x2_size(), x % channel.x2_size(), y)
    };

    let mut p = vec![1.0 / m as f64; m];
    let mut d = vec![0.0; m];
    let mut q = vec![0.0; ys];
    for iter in 0..BA_ITERATION_CAP {
        for y in 0..ys {
            q[y] = (0..m).map(|x| p[x] * w(x, y)).sum();
        }
        let mut i_lower = 0.0;
        let mut i_upper = f64::NEG_INFINITY;
        for x in 0..m {
            let mut dx = 0.0;
            for y in 0..ys {
                let wxy = w(x, y);
                if wxy > 0.0 {
                    dx += wxy * (wxy / q[y]).log2();
                }
            }
            d[x] = dx;
            i_lower += p[x] * dx;
            i_upper = i_upper.max(dx);
        }
        if i_upper - i_lower < tol {
            return Ok(OptResult {
                value: i_lower.max(0.0),
                argmax: p,
                iterations: iter + 1,
                gap_bound: i_upper - i_lower,
            });
        }
        // p(x) <- p(x) 2^{D(x)} / Z, shifted by the max exponent for stability
        let mut z = 0.0;
        for x in 0..m {
            p[x] *= (d[x] - i_upper).exp2();
            z += p[x];
        }
        p.iter_mut().for_each(|v| *v /= z);
    }
    let i_lower: f64 = p.iter().zip(&d).map(|(pi, di)| pi * di).sum();
    let i_upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Err(Error::NonConvergence {
        iterations: BA_ITERATION_CAP,
        best_value: i_lower,
        gap: i_upper - i_lower,
    })
}

// ---------------------------------------------------------------------------
// Weighted structured objective and its gradients
// ---------------------------------------------------------------------------

/// Nonnegative weights on the four MI functionals of a structured input.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MiWeights {
    /// weight on `I(X1,X2;Y|U)`
    pub cond_joint: f64,
    /// weight on `I(X1;Y|U,X2)`
    pub x1_cond: f64,
    /// weight on `I(X2;Y|U,X1)`
    pub x2_cond: f64,
    /// weight on `I(X1,X2;Y)`
    pub joint: f64,
}

impl MiWeights {
    pub fn cond_joint_only() -> Self {
        MiWeights {
            cond_joint: 1.0,
            ..Default::default()
        }
    }

    pub fn joint_only() -> Self {
        MiWeights {
            joint: 1.0,
            ..Default::default()
        }
    }
}

/// The four MI functionals of a structured input through a channel, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiValues {
    /// `I(X1,X2;Y|U)`
    pub cond_joint: f64,
    /// `I(X1;Y|U,X2)`
    pub x1_cond: f64,
    /// `I(X2;Y|U,X1)`
    pub x2_cond: f64,
    /// `I(X1,X2;Y)`
    pub joint: f64,
}

impl MiValues {
    pub fn weighted(&self, w: &MiWeights) -> f64 {
        w.cond_joint * self.cond_joint
            + w.x1_cond * self.x1_cond
            + w.x2_cond * self.x2_cond
            + w.joint * self.joint
    }
}

/// Evaluate all four MI functionals in one pass.
pub fn mi_values(channel: &MacChannel, dist: &StructuredInputDist) -> Result<MiValues> {
    if dist.x1_size() != channel.x1_size() || dist.x2_size() != channel.x2_size() {
        return Err(Error::validation("distribution does not match channel alphabets"));
    }
    let (us, x1s, x2s, ys) = (
        dist.u_size(),
        channel.x1_size(),
        channel.x2_size(),
        channel.y_size(),
    );
    // conditionals q(y|u), q(y|u,x2), q(y|u,x1), and the output law q(y)
    let mut q_u = vec![0.0; us * ys];
    let mut q_ux2 = vec![0.0; us * x2s * ys];
    let mut q_ux1 = vec![0.0; us * x1s * ys];
    let mut q_y = vec![0.0; ys];
    for u in 0..us {
        let pu = dist.p_u[u];
        for x1 in 0..x1s {
            let pa = dist.p_x1_given_u[u][x1];
            for x2 in 0..x2s {
                let pb = dist.p_x2_given_u[u][x2];
                for y in 0..ys {
                    let wv = channel.w(x1, x2, y);
                    if wv == 0.0 {
                        continue;
                    }
                    q_u[u * ys + y] += pa * pb * wv;
                    q_ux2[(u * x2s + x2) * ys + y] += pa * wv;
                    q_ux1[(u * x1s + x1) * ys + y] += pb * wv;
                    q_y[y] += pu * pa * pb * wv;
                }
            }
        }
    }
    let mut v = MiValues {
        cond_joint: 0.0,
        x1_cond: 0.0,
        x2_cond: 0.0,
        joint: 0.0,
    };
    for u in 0..us {
        let pu = dist.p_u[u];
        if pu == 0.0 {
            continue;
        }
        for x1 in 0..x1s {
            let pa = dist.p_x1_given_u[u][x1];
            if pa == 0.0 {
                continue;
            }
            for x2 in 0..x2s {
                let pb = dist.p_x2_given_u[u][x2];
                if pb == 0.0 {
                    continue;
                }
                let mass = pu * pa * pb;
                for y in 0..ys {
                    let wv = channel.w(x1, x2, y);
                    if wv == 0.0 {
                        continue;
                    }
                    let lw = wv.log2();
                    v.cond_joint += mass * wv * (lw - q_u[u * ys + y].log2());
                    v.x1_cond += mass * wv * (lw - q_ux2[(u * x2s + x2) * ys + y].log2());
                    v.x2_cond += mass * wv * (lw - q_ux1[(u * x1s + x1) * ys + y].log2());
                    v.joint += mass * wv * (lw - q_y[y].log2());
                }
            }
        }
    }
    v.cond_joint = v.cond_joint.max(0.0);
    v.x1_cond = v.x1_cond.max(0.0);
    v.x2_cond = v.x2_cond.max(0.0);
    v.joint = v.joint.max(0.0);
    Ok(v)
}

/// Parameter blocks of a structured distribution, for the ascent.
/// Block 0 is `p_u`, blocks `1..=u` the `p(x1|u)` rows, the rest `p(x2|u)`.
fn block_count(u_size: usize) -> usize {
    1 + 2 * u_size
}

/// Public hook for other modules' ascents: gradient of the weighted
/// objective with respect to parameter block `k` (see [`MiWeights`]).
pub fn structured_block_grad_for(
    channel: &MacChannel,
    dist: &StructuredInputDist,
    weights: &MiWeights,
    k: usize,
    grad: &mut Vec<f64>,
) {
    structured_block_grad(channel, dist, weights, k, grad)
}

fn get_block<'a>(dist: &'a StructuredInputDist, k: usize) -> &'a [f64] {
    let u = dist.u_size();
    if k == 0 {
        &dist.p_u
    } else if k <= u {
        &dist.p_x1_given_u[k - 1]
    } else {
        &dist.p_x2_given_u[k - 1 - u]
    }
}

fn get_block_mut<'a>(dist: &'a mut StructuredInputDist, k: usize) -> &'a mut [f64] {
    let u = dist.u_size();
    if k == 0 {
        &mut dist.p_u
    } else if k <= u {
        &mut dist.p_x1_given_u[k - 1]
    } else {
        &mut dist.p_x2_given_u[k - 1 - u]
    }
}

/// Gradient of the weighted objective with respect to block `k`, up to an
/// additive constant (which exponentiated-gradient normalisation cancels).
///
/// Every term is an expected log-ratio: with the joint
/// `p(u,x1,x2,y) = π a b W`, the derivative of each functional w.r.t. one
/// factor is the sum over the remaining coordinates of the integrand with
/// that factor removed, the implicit conditional-normalisation terms being
/// constant within a block.
fn structured_block_grad(
    channel: &MacChannel,
    dist: &StructuredInputDist,
    weights: &MiWeights,
    k: usize,
    grad: &mut Vec<f64>,
) {
    let (us, x1s, x2s, ys) = (
        dist.u_size(),
        channel.x1_size(),
        channel.x2_size(),
        channel.y_size(),
    );
    // Recompute the conditionals (cheap at desk scale, keeps this function
    // usable standalone).
    let mut q_u = vec![0.0; us * ys];
    let mut q_ux2 = vec![0.0; us * x2s * ys];
    let mut q_ux1 = vec![0.0; us * x1s * ys];
    let mut q_y = vec![0.0; ys];
    for u in 0..us {
        for x1 in 0..x1s {
            let pa = dist.p_x1_given_u[u][x1];
            for x2 in 0..x2s {
                let pb = dist.p_x2_given_u[u][x2];
                for y in 0..ys {
                    let wv = channel.w(x1, x2, y);
                    if wv == 0.0 {
                        continue;
                    }
                    q_u[u * ys + y] += pa * pb * wv;
                    q_ux2[(u * x2s + x2) * ys + y] += pa * wv;
                    q_ux1[(u * x1s + x1) * ys + y] += pb * wv;
                    q_y[y] += dist.p_u[u] * pa * pb * wv;
                }
            }
        }
    }
    let bracket = |u: usize, x1: usize, x2: usize, y: usize, wv: f64| -> f64 {
        let lw = wv.log2();
        let mut g = 0.0;
        if weights.cond_joint != 0.0 {
            g += weights.cond_joint * (lw - q_u[u * ys + y].log2());
        }
        if weights.x1_cond != 0.0 {
            g += weights.x1_cond * (lw - q_ux2[(u * x2s + x2) * ys + y].log2());
        }
        if weights.x2_cond != 0.0 {
            g += weights.x2_cond * (lw - q_ux1[(u * x1s + x1) * ys + y].log2());
        }
        if weights.joint != 0.0 {
            g += weights.joint * (lw - q_y[y].log2());
        }
        g
    };
    if k == 0 {
        grad.clear();
        grad.resize(us, 0.0);
        for u in 0..us {
            let mut acc = 0.0;
            for x1 in 0..x1s {
                let pa = dist.p_x1_given_u[u][x1];
                if pa == 0.0 {
                    continue;
                }
                for x2 in 0..x2s {
                    let pb = dist.p_x2_given_u[u][x2];
                    if pb == 0.0 {
                        continue;
                    }
                    for y in 0..ys {
                        let wv = channel.w(x1, x2, y);
                        if wv > 0.0 {
                            acc += pa * pb * wv * bracket(u, x1, x2, y, wv);
                        }
                    }
                }
            }
            grad[u] = acc;
        }
    } else if k <= us {
        let u = k - 1;
        grad.clear();
        grad.resize(x1s, 0.0);
        let pu = dist.p_u[u];
        for x1 in 0..x1s {
            let mut acc = 0.0;
            for x2 in 0..x2s {
                let pb = dist.p_x2_given_u[u][x2];
                if pb == 0.0 {
                    continue;
                }
                for y in 0..ys {
                    let wv = channel.w(x1, x2, y);
                    if wv > 0.0 {
                        acc += pb * wv * bracket(u, x1, x2, y, wv);
                    }
                }
            }
            grad[x1] = pu * acc;
        }
    } else {
        let u = k - 1 - us;
        grad.clear();
        grad.resize(x2s, 0.0);
        let pu = dist.p_u[u];
        for x2 in 0..x2s {
            let mut acc = 0.0;
            for x1 in 0..x1s {
                let pa = dist.p_x1_given_u[u][x1];
                if pa == 0.0 {
                    continue;
                }
                for y in 0..ys {
                    let wv = channel.w(x1, x2, y);
                    if wv > 0.0 {
                        acc += pa * wv * bracket(u, x1, x2, y, wv);
                    }
                }
            }
            grad[x2] = pu * acc;
        }
    }
}

// ---------------------------------------------------------------------------
// Exponentiated-gradient block ascent
// ---------------------------------------------------------------------------

/// One exponentiated-gradient trial step on a simplex: `p_i ∝ p_i e^{η g_i}`.
/// Zero entries stay zero (support-restricted ascent).
fn eg_step(block: &[f64], grad: &[f64], eta: f64, out: &mut Vec<f64>) {
    out.clear();
    let gmax = block
        .iter()
        .zip(grad)
        .filter(|(p, _)| **p > 0.0)
        .map(|(_, g)| *g)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for (&p, &g) in block.iter().zip(grad) {
        let v = if p > 0.0 {
            p * ((eta * (g - gmax)).max(-700.0)).exp()
        } else {
            0.0
        };
        out.push(v);
        z += v;
    }
    if z > 0.0 {
        out.iter_mut().for_each(|v| *v /= z);
    } else {
        out.clear();
        out.extend_from_slice(block);
    }
}

/// Options for the nonconvex ascent solvers.
#[derive(Debug, Clone)]
pub struct AscentOptions {
    pub restarts: usize,
    pub tol: f64,
    pub max_rounds: usize,
    pub seed: u64,
    /// Extra starting points evaluated alongside the built-in ones.
    pub warm_starts: Vec<StructuredInputDist>,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            restarts: 32,
            tol: 1e-7,
            max_rounds: 2_000,
            seed: 0,
            warm_starts: Vec::new(),
        }
    }
}

impl AscentOptions {
    pub fn quick(restarts: usize, seed: u64) -> Self {
        AscentOptions {
            restarts,
            seed,
            ..Default::default()
        }
    }
}

/// Block-coordinate ascent on a structured distribution for an arbitrary
/// objective with per-block (sub)gradients. Monotone by construction: a
/// step is only accepted if it improves the objective.
///
/// Returns `(dist, value, rounds, last_improvement)`.
fn ascend_structured<F, G>(
    channel: &MacChannel,
    mut dist: StructuredInputDist,
    objective: &F,
    block_grad: &G,
    tol: f64,
    max_rounds: usize,
) -> (StructuredInputDist, f64, usize, f64)
where
    F: Fn(&StructuredInputDist) -> f64,
    G: Fn(&MacChannel, &StructuredInputDist, usize, &mut Vec<f64>),
{
    let nblocks = block_count(dist.u_size());
    let mut value = objective(&dist);
    let mut etas = vec![1.0f64; nblocks];
    let mut grad = Vec::new();
    let mut trial = Vec::new();
    let mut last_improvement = f64::INFINITY;
    let mut rounds = 0;
    for round in 0..max_rounds {
        rounds = round + 1;
        let before = value;
        for k in 0..nblocks {
            block_grad(channel, &dist, k, &mut grad);
            let mut eta = etas[k];
            let mut accepted = false;
            for _ in 0..40 {
                eg_step(get_block(&dist, k), &grad, eta, &mut trial);
                let saved: Vec<f64> = get_block(&dist, k).to_vec();
                get_block_mut(&mut dist, k).copy_from_slice(&trial);
                let v = objective(&dist);
                if v > value {
                    value = v;
                    etas[k] = (eta * 1.5).min(1e6);
                    accepted = true;
                    break;
                }
                get_block_mut(&mut dist, k).copy_from_slice(&saved);
                eta *= 0.25;
                if eta < 1e-14 {
                    break;
                }
            }
            if !accepted {
                etas[k] = (etas[k] * 0.25).max(1e-12);
            }
        }
        last_improvement = value - before;
        if last_improvement < tol {
            break;
        }
    }
    (dist, value, rounds, last_improvement.max(0.0))
}

fn random_structured(
    u_size: usize,
    x1s: usize,
    x2s: usize,
    rng: &mut impl Rng,
) -> StructuredInputDist {
    let draw = |rng: &mut dyn rand::RngCore, n: usize| -> Vec<f64> {
        let mut v: Vec<f64> = (0..n)
            .map(|_| {
                let u: f64 = rand::Rng::gen_range(&mut *rng, 1e-3..1.0f64);
                -(u.ln())
            })
            .collect();
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    };
    StructuredInputDist {
        p_u: draw(rng, u_size),
        p_x1_given_u: (0..u_size).map(|_| draw(rng, x1s)).collect(),
        p_x2_given_u: (0..u_size).map(|_| draw(rng, x2s)).collect(),
    }
}

fn pad_to_u_size(dist: &StructuredInputDist, u_size: usize) -> StructuredInputDist {
    let mut d = dist.clone();
    let (x1s, x2s) = (d.x1_size(), d.x2_size());
    while d.p_u.len() < u_size {
        d.p_u.push(0.0);
        d.p_x1_given_u.push(vec![1.0 / x1s as f64; x1s]);
        d.p_x2_given_u.push(vec![1.0 / x2s as f64; x2s]);
    }
    d
}

fn flatten_tables(d: &StructuredInputDist) -> Vec<f64> {
    let mut v = d.p_u.clone();
    for row in &d.p_x1_given_u {
        v.extend_from_slice(row);
    }
    for row in &d.p_x2_given_u {
        v.extend_from_slice(row);
    }
    v
}

/// Deterministic merge of restart outcomes: larger value wins; values tied
/// within 1e-12 go to the lexicographically smallest flattened table.
fn better(a: &(StructuredInputDist, f64, usize, f64), b: &(StructuredInputDist, f64, usize, f64)) -> bool {
    if (a.1 - b.1).abs() > 1e-12 {
        return a.1 > b.1;
    }
    let fa = flatten_tables(&a.0);
    let fb = flatten_tables(&b.0);
    for (x, y) in fa.iter().zip(&fb) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Standard starting points for a structured ascent: uniform, an informed
/// start built from the Blahut–Arimoto argmax whenever `u` can index the
/// input pairs, any caller-provided warm starts, then seeded random fills.
fn standard_inits(
    channel: &MacChannel,
    u_size: usize,
    opts: &AscentOptions,
    informed_joint: bool,
) -> Vec<StructuredInputDist> {
    let (x1s, x2s) = (channel.x1_size(), channel.x2_size());
    let mut inits = vec![StructuredInputDist::uniform(u_size, x1s, x2s)];
    if informed_joint && u_size >= x1s * x2s {
        if let Ok(ba) = max_joint_mi(channel, 1e-11) {
            if let Ok(d) = StructuredInputDist::from_joint_table(&ba.argmax, x1s, x2s) {
                inits.push(pad_to_u_size(&d, u_size));
            }
        }
    }
    for w in &opts.warm_starts {
        if w.u_size() == u_size && w.x1_size() == x1s && w.x2_size() == x2s {
            inits.push(w.clone());
        } else if w.u_size() <= u_size && w.x1_size() == x1s && w.x2_size() == x2s {
            inits.push(pad_to_u_size(w, u_size));
        }
    }
    let mut r = 0u64;
    while inits.len() < opts.restarts.max(1) {
        let mut rng = rng::substream(opts.seed, domain::RESTART, r);
        inits.push(random_structured(u_size, x1s, x2s, &mut rng));
        r += 1;
    }
    inits
}

/// Maximise a weighted combination of the four MI functionals over
/// structured inputs with auxiliary cardinality `u_size`.
pub fn max_structured(
    weights: &MiWeights,
    channel: &MacChannel,
    u_size: usize,
    opts: &AscentOptions,
) -> Result<OptResult<StructuredInputDist>> {
    if u_size == 0 {
        return Err(Error::validation("u_size must be >= 1"));
    }
    if [weights.cond_joint, weights.x1_cond, weights.x2_cond, weights.joint]
        .iter()
        .any(|&w| w < 0.0)
    {
        return Err(Error::validation("objective weights must be nonnegative"));
    }
    let objective =
        |d: &StructuredInputDist| mi_values(channel, d).map(|v| v.weighted(weights)).unwrap_or(f64::NEG_INFINITY);
    let grad = |ch: &MacChannel, d: &StructuredInputDist, k: usize, g: &mut Vec<f64>| {
        structured_block_grad(ch, d, weights, k, g)
    };
    let inits = standard_inits(channel, u_size, opts, weights.joint > 0.0);
    let outcomes: Vec<_> = inits
        .into_par_iter()
        .map(|init| ascend_structured(channel, init, &objective, &grad, opts.tol, opts.max_rounds))
        .collect();
    let best = outcomes
        .into_iter()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
        .expect("at least one init");
    Ok(OptResult {
        value: best.1,
        argmax: best.0,
        iterations: best.2,
        gap_bound: best.3,
    })
}

/// Default auxiliary cardinality: `|X1| |X2| + 1`, a conservative
/// convex-cover style bound for the weighted functionals.
pub fn default_u_size(channel: &MacChannel) -> usize {
    channel.x1_size() * channel.x2_size() + 1
}

// ---------------------------------------------------------------------------
// Two-way channel sum-rate bounds
// ---------------------------------------------------------------------------

/// `I(X1;Y|X2) + I(X2;Y|X1)` and its per-block gradients for a product
/// input `p1 ⊗ p2`.
fn two_way_product_value(channel: &MacChannel, p1: &[f64], p2: &[f64]) -> (f64, f64) {
    let (x1s, x2s, ys) = (channel.x1_size(), channel.x2_size(), channel.y_size());
    let mut q_x2 = vec![0.0; x2s * ys]; // q(y|x2)
    let mut q_x1 = vec![0.0; x1s * ys]; // q(y|x1)
    for x1 in 0..x1s {
        for x2 in 0..x2s {
            for y in 0..ys {
                let wv = channel.w(x1, x2, y);
                if wv == 0.0 {
                    continue;
                }
                q_x2[x2 * ys + y] += p1[x1] * wv;
                q_x1[x1 * ys + y] += p2[x2] * wv;
            }
        }
    }
    let mut i1 = 0.0;
    let mut i2 = 0.0;
    for x1 in 0..x1s {
        for x2 in 0..x2s {
            let mass = p1[x1] * p2[x2];
            if mass == 0.0 {
                continue;
            }
            for y in 0..ys {
                let wv = channel.w(x1, x2, y);
                if wv > 0.0 {
                    let lw = wv.log2();
                    i1 += mass * wv * (lw - q_x2[x2 * ys + y].log2());
                    i2 += mass * wv * (lw - q_x1[x1 * ys + y].log2());
                }
            }
        }
    }
    (i1.max(0.0), i2.max(0.0))
}

/// Same objective over an arbitrary joint input table (`[x1][x2]` flat).
fn two_way_joint_value(channel: &MacChannel, joint: &[f64]) -> f64 {
    let (x1s, x2s, ys) = (channel.x1_size(), channel.x2_size(), channel.y_size());
    let mut n_x2 = vec![0.0; x2s * ys]; // Σ_{x1} P(x1,x2) W
    let mut n_x1 = vec![0.0; x1s * ys];
    let mut m1 = vec![0.0; x1s];
    let mut m2 = vec![0.0; x2s];
    for x1 in 0..x1s {
        for x2 in 0..x2s {
            let p = joint[x1 * x2s + x2];
            m1[x1] += p;
            m2[x2] += p;
            if p == 0.0 {
                continue;
            }
            for y in 0..ys {
                let wv = channel.w(x1, x2, y);
                if wv > 0.0 {
                    n_x2[x2 * ys + y] += p * wv;
                    n_x1[x1 * ys + y] += p * wv;
                }
            }
        }
    }
    let mut total = 0.0;
    for x1 in 0..x1s {
        for x2 in 0..x2s {
            let p = joint[x1 * x2s + x2];
            if p == 0.0 {
                continue;
            }
            for y in 0..ys {
                let wv = channel.w(x1, x2, y);
                if wv > 0.0 {
                    let lw = wv.log2();
                    // q(y|x2) = n_x2 / m2, q(y|x1) = n_x1 / m1
                    total += p
                        * wv
                        * (2.0 * lw - (n_x2[x2 * ys + y] / m2[x2]).log2()
                            - (n_x1[x1 * ys + y] / m1[x1]).log2());
                }
            }
        }
    }
    total.max(0.0)
}

fn two_way_joint_grad(channel: &MacChannel, joint: &[f64], grad: &mut Vec<f64>) {
    let (x1s, x2s, ys) = (channel.x1_size(), channel.x2_size(), channel.y_size());
    let mut n_x2 = vec![0.0; x2s * ys];
    let mut n_x1 = vec![0.0; x1s * ys];
    let mut m1 = vec![0.0; x1s];
    let mut m2 = vec![0.0; x2s];
    for x1 in 0..x1s {
        for x2 in 0..x2s {
            let p = joint[x1 * x2s + x2];
            m1[x1] += p;
            m2[x2] += p;
            if p == 0.0 {
                continue;
            }
            for y in 0..ys {
                let wv = channel.w(x1, x2, y);
                if wv > 0.0 {
                    n_x2[x2 * ys + y] += p * wv;
                    n_x1[x1 * ys + y] += p * wv;
                }
            }
        }
    }
    grad.clear();
    grad.resize(x1s * x2s, 0.0);
    for x1 in 0..x1s {
        for x2 in 0..x2s {
            let mut acc = 0.0;
            for y in 0..ys {
                let wv = channel.w(x1, x2, y);
                if wv > 0.0 {
                    let lw = wv.log2();
                    let t2 = if m2[x2] > 0.0 && n_x2[x2 * ys + y] > 0.0 {
                        (n_x2[x2 * ys + y] / m2[x2]).log2()
                    } else {
                        lw
                    };
                    let t1 = if m1[x1] > 0.0 && n_x1[x1 * ys + y] > 0.0 {
                        (n_x1[x1 * ys + y] / m1[x1]).log2()
                    } else {
                        lw
                    };
                    acc += wv * (2.0 * lw - t1 - t2);
                }
            }
            grad[x1 * x2s + x2] = acc;
        }
    }
}

/// Ascent over a single probability simplex.
fn ascend_simplex<F, G>(
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
    let mut trial = Vec::new();
    for _ in 0..max_rounds {
        grad_fn(&p, &mut grad);
        let mut improved = false;
        let mut e = eta;
        for _ in 0..40 {
            eg_step(&p, &grad, e, &mut trial);
            let v = objective(&trial);
            if v > value {
                p.copy_from_slice(&trial);
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
            if value - objective(&p) < tol {
                break;
            }
            eta = (eta * 0.25).max(1e-12);
        }
        if !improved && eta <= 1e-12 {
            break;
        }
    }
    (p, value)
}

/// Shannon-type inner and cut-set style outer bounds on the two-way
/// sum-rate of the channel used as a common-output two-way channel.
pub fn two_way_sum_bounds(channel: &MacChannel, opts: &AscentOptions) -> Result<TwoWayBounds> {
    let (x1s, x2s) = (channel.x1_size(), channel.x2_size());

    // Inner: alternating ascent over p1, p2.
    let inner_once = |init1: Vec<f64>, init2: Vec<f64>| -> (Vec<f64>, Vec<f64>, f64) {
        let mut p1 = init1;
        let mut p2 = init2;
        let mut value = {
            let (a, b) = two_way_product_value(channel, &p1, &p2);
            a + b
        };
        for _ in 0..opts.max_rounds {
            let before = value;
            // block p1 with p2 fixed
            let obj1 = |q: &[f64]| {
                let (a, b) = two_way_product_value(channel, q, &p2);
                a + b
            };
            let g1 = |q: &[f64], g: &mut Vec<f64>| {
                product_grad_p1(channel, q, &p2, g);
            };
            let (np1, v1) = ascend_simplex(p1.clone(), &obj1, &g1, opts.tol, 50);
            if v1 > value {
                p1 = np1;
                value = v1;
            }
            let obj2 = |q: &[f64]| {
                let (a, b) = two_way_product_value(channel, &p1, q);
                a + b
            };
            let g2 = |q: &[f64], g: &mut Vec<f64>| {
                product_grad_p2(channel, &p1, q, g);
            };
            let (np2, v2) = ascend_simplex(p2.clone(), &obj2, &g2, opts.tol, 50);
            if v2 > value {
                p2 = np2;
                value = v2;
            }
            if value - before < opts.tol {
                break;
            }
        }
        (p1, p2, value)
    };

    let uniform1 = vec![1.0 / x1s as f64; x1s];
    let uniform2 = vec![1.0 / x2s as f64; x2s];
    let mut inner_starts = vec![(uniform1.clone(), uniform2.clone())];
    for r in 0..opts.restarts.saturating_sub(1) as u64 {
        let mut rng = rng::substream(opts.seed ^ 0x7757, domain::RESTART, r);
        let d1 = random_simplex(x1s, &mut rng);
        let d2 = random_simplex(x2s, &mut rng);
        inner_starts.push((d1, d2));
    }
    let inner_outcomes: Vec<_> = inner_starts
        .into_par_iter()
        .map(|(a, b)| inner_once(a, b))
        .collect();
    let inner_best = inner_outcomes
        .into_iter()
        .reduce(|a, b| if b.2 > a.2 + 1e-12 { b } else { a })
        .expect("nonempty starts");
    let (w1, w2, sum_inner) = inner_best;
    let inner_rates = two_way_product_value(channel, &w1, &w2);

    // Outer: ascent over the joint table; the inner witness seeds the search
    // so the outer value can never fall below the inner one.
    let witness_joint: Vec<f64> = (0..x1s * x2s)
        .map(|i| w1[i / x2s] * w2[i % x2s])
        .collect();
    let mut outer_starts = vec![
        vec![1.0 / (x1s * x2s) as f64; x1s * x2s],
        witness_joint,
    ];
    for r in 0..opts.restarts.saturating_sub(2) as u64 {
        let mut rng = rng::substream(opts.seed ^ 0xa11ce, domain::RESTART, r);
        outer_starts.push(random_simplex(x1s * x2s, &mut rng));
    }
    let obj = |q: &[f64]| two_way_joint_value(channel, q);
    let gr = |q: &[f64], g: &mut Vec<f64>| two_way_joint_grad(channel, q, g);
    let outer_outcomes: Vec<_> = outer_starts
        .into_par_iter()
        .map(|init| ascend_simplex(init, &obj, &gr, opts.tol, opts.max_rounds))
        .collect();
    let outer_best = outer_outcomes
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 + 1e-12 { b } else { a })
        .expect("nonempty starts");
    let sum_outer = outer_best.1.max(sum_inner);

    Ok(TwoWayBounds {
        sum_inner,
        sum_outer,
        witness_inner: (w1, w2),
        inner_rates,
    })
}

fn product_grad_p1(channel: &MacChannel, p1: &[f64], p2: &[f64], grad: &mut Vec<f64>) {
    let (x1s, x2s, ys) = (channel.x1_size(), channel.x2_size(), channel.y_size());
    let mut q_x2 = vec![0.0; x2s * ys];
    let mut q_x1 = vec![0.0; x1s * ys];
    for x1 in 0..x1s {
        for x2 in 0..x2s {
            for y in 0..ys {
                let wv = channel.w(x1, x2, y);
                if wv > 0.0 {
                    q_x2[x2 * ys + y] += p1[x1] * wv;
                    q_x1[x1 * ys + y] += p2[x2] * wv;
                }
            }
        }
    }
    grad.clear();
    grad.resize(x1s, 0.0);
    for x1 in 0..x1s {
        let mut acc = 0.0;
        for x2 in 0..x2s {
            if p2[x2] == 0.0 {
                continue;
            }
            for y in 0..ys {
                let wv = channel.w(x1, x2, y);
                if wv > 0.0 {
                    let lw = wv.log2();
                    acc += p2[x2]
                        * wv
                        * (2.0 * lw
                            - q_x2[x2 * ys + y].log2()
                            - q_x1[x1 * ys + y].log2());
                }
            }
        }
        grad[x1] = acc;
    }
}

fn product_grad_p2(channel: &MacChannel, p1: &[f64], p2: &[f64], grad: &mut Vec<f64>) {
    let (x1s, x2s, ys) = (channel.x1_size(), channel.x2_size(), channel.y_size());
    let mut q_x2 = vec![0.0; x2s * ys];
    let mut q_x1 = vec![0.0; x1s * ys];
    for x1 in 0..x1s {
        for x2 in 0..x2s {
            for y in 0..ys {
                let wv = channel.w(x1, x2, y);
                if wv > 0.0 {
                    q_x2[x2 * ys + y] += p1[x1] * wv;
                    q_x1[x1 * ys + y] += p2[x2] * wv;
                }
            }
        }
    }
    grad.clear();
    grad.resize(x2s, 0.0);
    for x2 in 0..x2s {
        let mut acc = 0.0;
        for x1 in 0..x1s {
            if p1[x1] == 0.0 {
                continue;
            }
            for y in 0..ys {
                let wv = channel.w(x1, x2, y);
                if wv > 0.0 {
                    let lw = wv.log2();
                    acc += p1[x1]
                        * wv
                        * (2.0 * lw
                            - q_x2[x2 * ys + y].log2()
                            - q_x1[x1 * ys + y].log2());
                }
            }
        }
        grad[x2] = acc;
    }
}

fn random_simplex(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| -(rng.gen_range(1e-3..1.0f64).ln())).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

// ---------------------------------------------------------------------------
// Channel class check (support condition)
// ---------------------------------------------------------------------------

/// A failed uniqueness instance: two distinct values of one input are
/// consistent with the same `(y, other input)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguityWitness {
    /// 1 if two `x1` values collide, 2 if two `x2` values collide.
    pub side: u8,
    pub y: usize,
    pub other_input: usize,
    pub pair: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct ClassCheck {
    pub holds: bool,
    pub witness: Option<AmbiguityWitness>,
}

/// Check the support condition equivalent to
/// `H(X1|Y,X2) = H(X2|Y,X1) = 0` holding for every input distribution:
/// each input must be uniquely determined by the output together with the
/// other input, wherever the transition probability is positive.
pub fn theorem1_class_check(channel: &MacChannel) -> ClassCheck {
    for x2 in 0..channel.x2_size() {
        for y in 0..channel.y_size() {
            let consistent: Vec<usize> = (0..channel.x1_size())
                .filter(|&x1| channel.w(x1, x2, y) > 0.0)
                .collect();
            if consistent.len() > 1 {
                return ClassCheck {
                    holds: false,
                    witness: Some(AmbiguityWitness {
                        side: 1,
                        y,
                        other_input: x2,
                        pair: (consistent[0], consistent[1]),
                    }),
                };
            }
        }
    }
    for x1 in 0..channel.x1_size() {
        for y in 0..channel.y_size() {
            let consistent: Vec<usize> = (0..channel.x2_size())
                .filter(|&x2| channel.w(x1, x2, y) > 0.0)
                .collect();
            if consistent.len() > 1 {
                return ClassCheck {
                    holds: false,
                    witness: Some(AmbiguityWitness {
                        side: 2,
                        y,
                        other_input: x1,
                        pair: (consistent[0], consistent[1]),
                    }),
                };
            }
        }
    }
    ClassCheck {
        holds: true,
        witness: None,
    }
}

/// For class channels: lookup tables recovering one input from the output
/// and the other input. `recover_x1[y][x2]` and `recover_x2[y][x1]`.
pub fn recovery_maps(channel: &MacChannel) -> Result<(Vec<Vec<Option<usize>>>, Vec<Vec<Option<usize>>>)> {
    if !theorem1_class_check(channel).holds {
        return Err(Error::validation(
            "channel is outside the class: inputs are not recoverable from (y, other input)",
        ));
    }
    let mut r1 = vec![vec![None; channel.x2_size()]; channel.y_size()];
    let mut r2 = vec![vec![None; channel.x1_size()]; channel.y_size()];
    for x1 in 0..channel.x1_size() {
        for x2 in 0..channel.x2_size() {
            for y in 0..channel.y_size() {
                if channel.w(x1, x2, y) > 0.0 {
                    r1[y][x2] = Some(x1);
                    r2[y][x1] = Some(x2);
                }
            }
        }
    }
    Ok((r1, r2))
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{self, var};
    use approx::assert_abs_diff_eq;

    const LOG2_3: f64 = 1.584962500721156;

    #[test]
    fn ba_adder_reaches_log2_3() {
        let r = max_joint_mi(&MacChannel::binary_adder(), 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, LOG2_3, epsilon = 1e-9);
        assert!(r.gap_bound < 1e-10);
        // At the argmax the output law is uniform over {0,1,2}.
        let ch = MacChannel::binary_adder();
        for y in 0..3 {
            let q: f64 = (0..4)
                .map(|x| r.argmax[x] * ch.w(x / 2, x % 2, y))
                .sum();
            assert_abs_diff_eq!(q, 1.0 / 3.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn ba_point_to_point_bit() {
        let r = max_joint_mi(&MacChannel::y_equals_x1(), 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn ba_useless_channel_is_zero() {
        let r = max_joint_mi(&MacChannel::useless(), 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ba_is_invariant_under_relabeling() {
        // Swap the two output symbols 0 and 2 of the adder.
        let base = MacChannel::binary_adder();
        let relabeled = MacChannel::deterministic(2, 2, 3, |a, b| match a + b {
            0 => 2,
            2 => 0,
            y => y,
        })
        .unwrap();
        let v1 = max_joint_mi(&base, 1e-10).unwrap().value;
        let v2 = max_joint_mi(&relabeled, 1e-10).unwrap().value;
        assert_abs_diff_eq!(v1, v2, epsilon = 1e-9);
    }

    #[test]
    fn structured_gradients_match_finite_differences() {
        let ch = MacChannel::binary_adder();
        let weights = MiWeights {
            cond_joint: 0.7,
            x1_cond: 0.4,
            x2_cond: 0.2,
            joint: 1.1,
        };
        let mut rng = rng::substream(5, domain::TEST, 1);
        let dist = random_structured(3, 2, 2, &mut rng);
        let f = |d: &StructuredInputDist| mi_values(&ch, d).unwrap().weighted(&weights);
        let h = 1e-6;
        let mut grad = Vec::new();
        for k in 0..block_count(3) {
            structured_block_grad(&ch, &dist, &weights, k, &mut grad);
            let n = get_block(&dist, k).len();
            // Compare gradient differences along simplex directions
            // (e_i - e_j), which cancels the unknown additive constant.
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut dp = dist.clone();
                    {
                        let b = get_block_mut(&mut dp, k);
                        b[i] += h;
                        b[j] -= h;
                    }
                    let mut dm = dist.clone();
                    {
                        let b = get_block_mut(&mut dm, k);
                        b[i] -= h;
                        b[j] += h;
                    }
                    let fd = (f(&dp) - f(&dm)) / (2.0 * h);
                    let an = grad[i] - grad[j];
                    assert_abs_diff_eq!(fd, an, epsilon = 1e-4);
                }
            }
        }
    }

    #[test]
    fn structured_cond_joint_adder_u1() {
        // max over independent (X1, X2) of I(X1,X2;Y) on the adder is 1.5
        // bits at uniform inputs (grid-oracle value).
        let r = max_structured(
            &MiWeights::cond_joint_only(),
            &MacChannel::binary_adder(),
            1,
            &AscentOptions::quick(8, 3),
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, 1.5, epsilon = 1e-6);
    }

    #[test]
    fn structured_x1_cond_adder_is_one_bit() {
        let r = max_structured(
            &MiWeights {
                x1_cond: 1.0,
                ..Default::default()
            },
            &MacChannel::binary_adder(),
            1,
            &AscentOptions::quick(8, 4),
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn structured_joint_with_full_u_matches_ba() {
        let ch = MacChannel::binary_adder();
        let tol = 1e-8;
        let ba = max_joint_mi(&ch, tol).unwrap();
        let r = max_structured(
            &MiWeights::joint_only(),
            &ch,
            4,
            &AscentOptions::quick(8, 5),
        )
        .unwrap();
        assert!(
            (r.value - ba.value).abs() <= 2.0 * tol + 1e-9,
            "structured {} vs BA {}",
            r.value,
            ba.value
        );
    }

    #[test]
    fn structured_value_reproduces_through_info_measures() {
        let ch = MacChannel::binary_adder();
        let r = max_structured(
            &MiWeights::cond_joint_only(),
            &ch,
            3,
            &AscentOptions::quick(6, 9),
        )
        .unwrap();
        let joint = info::induced_joint(&ch, &r.argmax, 1.0).unwrap();
        let check = joint
            .conditional_mutual_information(&[var::X1, var::X2], &[var::Y], &[var::U])
            .unwrap();
        assert_abs_diff_eq!(check, r.value, epsilon = 1e-9);
    }

    #[test]
    fn larger_u_never_hurts() {
        let ch = MacChannel::binary_adder();
        let w = MiWeights {
            cond_joint: 1.0,
            joint: 0.3,
            ..Default::default()
        };
        let mut prev = None;
        for u in 1..=3 {
            let mut opts = AscentOptions::quick(6, 11);
            if let Some((_, argmax)) = &prev {
                opts.warm_starts.push(StructuredInputDist::clone(argmax));
            }
            let r = max_structured(&w, &ch, u, &opts).unwrap();
            if let Some((v, _)) = prev {
                assert!(r.value >= v - 1e-7, "u={u}: {} < {v}", r.value);
            }
            prev = Some((r.value, r.argmax));
        }
    }

    #[test]
    fn two_way_adder_bounds_are_two_bits() {
        let b = two_way_sum_bounds(&MacChannel::binary_adder(), &AscentOptions::quick(6, 1)).unwrap();
        assert_abs_diff_eq!(b.sum_inner, 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(b.sum_outer, 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(b.inner_rates.0, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(b.inner_rates.1, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn two_way_useless_channel_is_zero() {
        let b = two_way_sum_bounds(&MacChannel::useless(), &AscentOptions::quick(4, 2)).unwrap();
        assert_abs_diff_eq!(b.sum_inner, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.sum_outer, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn two_way_one_directional_channel() {
        // Y = X1: I(X1;Y|X2) = H(X1) <= 1, I(X2;Y|X1) = 0.
        let b = two_way_sum_bounds(&MacChannel::y_equals_x1(), &AscentOptions::quick(6, 3)).unwrap();
        assert_abs_diff_eq!(b.sum_inner, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(b.sum_outer, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn class_check_adder_and_xor_hold() {
        assert!(theorem1_class_check(&MacChannel::binary_adder()).holds);
        assert!(theorem1_class_check(&MacChannel::binary_xor()).holds);
    }

    #[test]
    fn class_check_fails_when_x2_is_invisible() {
        let c = theorem1_class_check(&MacChannel::y_equals_x1());
        assert!(!c.holds);
        let w = c.witness.unwrap();
        assert_eq!(w.side, 2);
        assert_eq!(w.pair, (0, 1));
    }

    #[test]
    fn class_property_implies_zero_conditional_entropy() {
        let ch = MacChannel::binary_adder();
        for s in 0..20u64 {
            let mut rng = rng::substream(99, domain::TEST, s);
            let joint = random_simplex(4, &mut rng);
            let d = StructuredInputDist::from_joint_table(&joint, 2, 2).unwrap();
            let full = info::induced_joint(&ch, &d, 0.5).unwrap();
            let h1 = full.entropy(&[var::X1, var::Y, var::X2]).unwrap()
                - full.entropy(&[var::Y, var::X2]).unwrap();
            let h2 = full.entropy(&[var::X2, var::Y, var::X1]).unwrap()
                - full.entropy(&[var::Y, var::X1]).unwrap();
            assert!(h1.abs() < 1e-10 && h2.abs() < 1e-10, "h1={h1} h2={h2}");
        }
    }

    #[test]
    fn recovery_maps_invert_the_adder() {
        let ch = MacChannel::binary_adder();
        let (r1, r2) = recovery_maps(&ch).unwrap();
        for x1 in 0..2 {
            for x2 in 0..2 {
                let y = x1 + x2;
                assert_eq!(r1[y][x2], Some(x1));
                assert_eq!(r2[y][x1], Some(x2));
            }
        }
    }
}
