//! Exact entropy and mutual-information computation on finite joint
//! distributions, plus the robust-typicality test used by the simulator.
//!
//! Everything here works in bits (base-2 logarithms) and treats
//! `0·log 0 = 0`. [`JointDist`] is the reference implementation the faster
//! special-purpose loops in the optimiser are checked against.

use serde::{Deserialize, Serialize};

use crate::channel::MacChannel;
use crate::error::{Error, Result};

/// Mass-sum slack accepted by [`JointDist::new`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Dense tables are capped at this many cells.
pub const CELL_CAP: usize = 100_000_000;

/// Axis names used by [`induced_joint`].
pub mod var {
    pub const U: &str = "u";
    pub const X1: &str = "x1";
    pub const X2: &str = "x2";
    pub const Y: &str = "y";
    pub const V: &str = "v";
    pub const YD: &str = "yd";
    pub const YE: &str = "ye";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub size: usize,
}

impl Axis {
    pub fn new(name: &str, size: usize) -> Self {
        Axis {
            name: name.to_string(),
            size,
        }
    }
}

/// A dense joint distribution over named finite variables.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    axes: Vec<Axis>,
    mass: Vec<f64>,
}

impl JointDist {
    pub fn new(axes: Vec<Axis>, mass: Vec<f64>) -> Result<Self> {
        let cells: usize = axes.iter().map(|a| a.size).product();
        if cells > CELL_CAP {
            return Err(Error::ResourceCap(format!(
                "joint alphabet has {cells} cells, cap is {CELL_CAP}"
            )));
        }
        if axes.iter().any(|a| a.size == 0) {
            return Err(Error::validation("axis sizes must be >= 1"));
        }
        if mass.len() != cells {
            return Err(Error::validation(format!(
                "mass table has {} entries, expected {cells}",
                mass.len()
            )));
        }
        let mut names: Vec<&str> = axes.iter().map(|a| a.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != axes.len() {
            return Err(Error::validation("duplicate axis names"));
        }
        if mass.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::validation("mass entries must be nonnegative"));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::validation(format!(
                "total mass {total} differs from 1 by more than {MASS_TOLERANCE}"
            )));
        }
        Ok(JointDist { axes, mass })
    }

    /// Build from a cell-index function; `idx[k]` runs over axis `k`.
    pub fn from_fn(axes: Vec<Axis>, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let cells: usize = axes.iter().map(|a| a.size).product();
        if cells > CELL_CAP {
            return Err(Error::ResourceCap(format!(
                "joint alphabet has {cells} cells, cap is {CELL_CAP}"
            )));
        }
        let mut idx = vec![0usize; axes.len()];
        let mut mass = Vec::with_capacity(cells);
        for _ in 0..cells {
            mass.push(f(&idx));
            // odometer increment, last axis fastest
            for k in (0..axes.len()).rev() {
                idx[k] += 1;
                if idx[k] < axes[k].size {
                    break;
                }
                idx[k] = 0;
            }
        }
        Self::new(axes, mass)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::validation(format!("unknown variable '{name}'")))
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1usize; self.axes.len()];
        for k in (0..self.axes.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.axes[k + 1].size;
        }
        s
    }

    /// Marginalise onto `vars` (order as listed). `vars` must be nonempty.
    pub fn marginal(&self, vars: &[&str]) -> Result<JointDist> {
        if vars.is_empty() {
            return Err(Error::validation("marginal needs at least one variable"));
        }
        let keep: Vec<usize> = vars
            .iter()
            .map(|v| self.axis_index(v))
            .collect::<Result<_>>()?;
        {
            let mut sorted = keep.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != keep.len() {
                return Err(Error::validation("repeated variable in marginal"));
            }
        }
        let out_axes: Vec<Axis> = keep.iter().map(|&k| self.axes[k].clone()).collect();
        let out_strides = {
            let mut s = vec![1usize; out_axes.len()];
            for k in (0..out_axes.len().saturating_sub(1)).rev() {
                s[k] = s[k + 1] * out_axes[k + 1].size;
            }
            s
        };
        let in_strides = self.strides();
        let cells: usize = out_axes.iter().map(|a| a.size).product();
        let mut out = vec![0.0; cells];
        let mut idx = vec![0usize; self.axes.len()];
        for (cell, &p) in self.mass.iter().enumerate() {
            if p != 0.0 {
                let mut o = 0;
                for (j, &k) in keep.iter().enumerate() {
                    o += (cell / in_strides[k] % self.axes[k].size) * out_strides[j];
                }
                out[o] += p;
            }
            let _ = cell;
        }
        let _ = idx.len();
        idx.clear();
        // Renormalisation is deliberately not applied: a valid joint's
        // marginal sums to the same total.
        JointDist::new(out_axes, out)
    }

    /// Shannon entropy (bits) of the marginal on `vars`.
    pub fn entropy(&self, vars: &[&str]) -> Result<f64> {
        let m = self.marginal(vars)?;
        Ok(m.mass
            .iter()
            .map(|&p| if p > 0.0 { -p * p.log2() } else { 0.0 })
            .sum())
    }

    /// `I(A; B) = H(A) + H(B) - H(A,B)`.
    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        self.conditional_mutual_information(a, b, &[])
    }

    /// `I(A; B | C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)`, clamped at 0.
    pub fn conditional_mutual_information(
        &self,
        a: &[&str],
        b: &[&str],
        c: &[&str],
    ) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::validation("a and b must be nonempty"));
        }
        let mut all: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
        all.sort_unstable();
        let before = all.len();
        all.dedup();
        if all.len() != before {
            return Err(Error::validation("a, b, c must be pairwise disjoint"));
        }
        let ac: Vec<&str> = a.iter().chain(c).copied().collect();
        let bc: Vec<&str> = b.iter().chain(c).copied().collect();
        let abc: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
        let h_c = if c.is_empty() { 0.0 } else { self.entropy(c)? };
        let value = self.entropy(&ac)? + self.entropy(&bc)? - self.entropy(&abc)? - h_c;
        Ok(value.max(0.0))
    }
}

// ---------------------------------------------------------------------------
// Structured input distributions P(u) P(x1|u) P(x2|u)
// ---------------------------------------------------------------------------

/// An input distribution of the form `P(u) P(x1|u) P(x2|u)`.
///
/// The unstructured joint `P(x1, x2)` is the `u_size = 1` special case (or
/// any table via `u` indexing the pairs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredInputDist {
    pub p_u: Vec<f64>,
    /// `p_x1_given_u[u][x1]`
    pub p_x1_given_u: Vec<Vec<f64>>,
    /// `p_x2_given_u[u][x2]`
    pub p_x2_given_u: Vec<Vec<f64>>,
}

impl StructuredInputDist {
    pub fn new(
        p_u: Vec<f64>,
        p_x1_given_u: Vec<Vec<f64>>,
        p_x2_given_u: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let u = p_u.len();
        if u == 0 {
            return Err(Error::validation("u alphabet must be nonempty"));
        }
        if p_x1_given_u.len() != u || p_x2_given_u.len() != u {
            return Err(Error::validation("conditional tables must have one row per u"));
        }
        check_simplex("p_u", &p_u)?;
        let x1 = p_x1_given_u[0].len();
        let x2 = p_x2_given_u[0].len();
        for row in &p_x1_given_u {
            if row.len() != x1 {
                return Err(Error::validation("ragged p_x1_given_u"));
            }
            check_simplex("p_x1_given_u row", row)?;
        }
        for row in &p_x2_given_u {
            if row.len() != x2 {
                return Err(Error::validation("ragged p_x2_given_u"));
            }
            check_simplex("p_x2_given_u row", row)?;
        }
        Ok(StructuredInputDist {
            p_u,
            p_x1_given_u,
            p_x2_given_u,
        })
    }

    /// Uniform product input with trivial auxiliary.
    pub fn uniform(u_size: usize, x1_size: usize, x2_size: usize) -> Self {
        StructuredInputDist {
            p_u: vec![1.0 / u_size as f64; u_size],
            p_x1_given_u: vec![vec![1.0 / x1_size as f64; x1_size]; u_size],
            p_x2_given_u: vec![vec![1.0 / x2_size as f64; x2_size]; u_size],
        }
    }

    /// Represent an arbitrary joint `P(x1,x2)` exactly by letting `u` index
    /// the input pairs.
    pub fn from_joint_table(joint: &[f64], x1_size: usize, x2_size: usize) -> Result<Self> {
        if joint.len() != x1_size * x2_size {
            return Err(Error::validation("joint table size mismatch"));
        }
        let u_size = x1_size * x2_size;
        let mut p_u = Vec::with_capacity(u_size);
        let mut a = Vec::with_capacity(u_size);
        let mut b = Vec::with_capacity(u_size);
        for x1 in 0..x1_size {
            for x2 in 0..x2_size {
                p_u.push(joint[x1 * x2_size + x2]);
                let mut ra = vec![0.0; x1_size];
                ra[x1] = 1.0;
                a.push(ra);
                let mut rb = vec![0.0; x2_size];
                rb[x2] = 1.0;
                b.push(rb);
            }
        }
        StructuredInputDist::new(p_u, a, b)
    }

    pub fn u_size(&self) -> usize {
        self.p_u.len()
    }

    pub fn x1_size(&self) -> usize {
        self.p_x1_given_u[0].len()
    }

    pub fn x2_size(&self) -> usize {
        self.p_x2_given_u[0].len()
    }

    /// Induced joint `P(x1, x2) = Σ_u P(u) P(x1|u) P(x2|u)`, flat `[x1][x2]`.
    pub fn joint_x1_x2(&self) -> Vec<f64> {
        let (x1s, x2s) = (self.x1_size(), self.x2_size());
        let mut out = vec![0.0; x1s * x2s];
        for (u, &pu) in self.p_u.iter().enumerate() {
            if pu == 0.0 {
                continue;
            }
            for x1 in 0..x1s {
                let pa = pu * self.p_x1_given_u[u][x1];
                if pa == 0.0 {
                    continue;
                }
                for x2 in 0..x2s {
                    out[x1 * x2s + x2] += pa * self.p_x2_given_u[u][x2];
                }
            }
        }
        out
    }
}

fn check_simplex(what: &str, row: &[f64]) -> Result<()> {
    if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::validation(format!("{what} has a negative entry")));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::validation(format!("{what} sums to {sum}, not 1")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Induced joint over (U, X1, X2, Y, V, Yd, Ye)
// ---------------------------------------------------------------------------

/// Full joint of one switched channel use under a structured input and a
/// constant switch probability.
///
/// Factorises as `P(u) P(x1|u) P(x2|u) P(y|x1,x2) P(v)` followed by the
/// deterministic switch map; `yd`/`ye` live in the extended alphabet with
/// erasure index `y_size`.
pub fn induced_joint(
    channel: &MacChannel,
    input: &StructuredInputDist,
    switch_p: f64,
) -> Result<JointDist> {
    if input.x1_size() != channel.x1_size() || input.x2_size() != channel.x2_size() {
        return Err(Error::validation(
            "input distribution alphabets do not match the channel",
        ));
    }
    if !(0.0..=1.0).contains(&switch_p) {
        return Err(Error::validation("switch probability must lie in [0,1]"));
    }
    let ys = channel.y_size();
    let e = channel.erasure_symbol();
    let axes = vec![
        Axis::new(var::U, input.u_size()),
        Axis::new(var::X1, channel.x1_size()),
        Axis::new(var::X2, channel.x2_size()),
        Axis::new(var::Y, ys),
        Axis::new(var::V, 2),
        Axis::new(var::YD, ys + 1),
        Axis::new(var::YE, ys + 1),
    ];
    JointDist::from_fn(axes, |idx| {
        let (u, x1, x2, y, v, yd, ye) = (idx[0], idx[1], idx[2], idx[3], idx[4], idx[5], idx[6]);
        let switch_ok = match v {
            1 => yd == y && ye == e,
            _ => yd == e && ye == y,
        };
        if !switch_ok {
            return 0.0;
        }
        let pv = if v == 1 { switch_p } else { 1.0 - switch_p };
        input.p_u[u]
            * input.p_x1_given_u[u][x1]
            * input.p_x2_given_u[u][x2]
            * channel.w(x1, x2, y)
            * pv
    })
}

// ---------------------------------------------------------------------------
// Robust typicality
// ---------------------------------------------------------------------------

/// Test whether parallel sequences (one per axis of `dist`) are jointly
/// robustly typical: every cell `a` must satisfy
/// `|freq(a) - p(a)| <= epsilon * p(a)`, which in particular forbids any
/// occurrence of a zero-probability cell.
pub fn is_robustly_typical(seqs: &[&[usize]], dist: &JointDist, epsilon: f64) -> Result<bool> {
    if seqs.len() != dist.axes().len() {
        return Err(Error::validation(format!(
            "expected {} sequences, got {}",
            dist.axes().len(),
            seqs.len()
        )));
    }
    if epsilon <= 0.0 {
        return Err(Error::validation("epsilon must be positive"));
    }
    let n = seqs[0].len();
    if seqs.iter().any(|s| s.len() != n) {
        return Err(Error::validation("sequences must have equal length"));
    }
    if n == 0 {
        return Err(Error::validation("sequences must be nonempty"));
    }
    let strides = dist.strides();
    for (k, s) in seqs.iter().enumerate() {
        if s.iter().any(|&sym| sym >= dist.axes()[k].size) {
            return Err(Error::validation(format!(
                "symbol out of range on axis '{}'",
                dist.axes()[k].name
            )));
        }
    }
    let mut counts = vec![0usize; dist.mass().len()];
    for i in 0..n {
        let mut cell = 0;
        for (k, s) in seqs.iter().enumerate() {
            cell += s[i] * strides[k];
        }
        counts[cell] += 1;
    }
    let nf = n as f64;
    Ok(dist
        .mass()
        .iter()
        .zip(&counts)
        .all(|(&p, &c)| (c as f64 / nf - p).abs() <= epsilon * p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{self, domain};
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn single(name: &str, probs: &[f64]) -> JointDist {
        JointDist::new(vec![Axis::new(name, probs.len())], probs.to_vec()).unwrap()
    }

    /// Double-symmetric binary source with parameter q, via u indexing pairs.
    pub(crate) fn dsbs(q: f64) -> StructuredInputDist {
        let joint = vec![(1.0 - q) / 2.0, q / 2.0, q / 2.0, (1.0 - q) / 2.0];
        StructuredInputDist::from_joint_table(&joint, 2, 2).unwrap()
    }

    #[test]
    fn entropy_basics() {
        assert_abs_diff_eq!(
            single("b", &[0.5, 0.5]).entropy(&["b"]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_eq!(single("b", &[1.0, 0.0]).entropy(&["b"]).unwrap(), 0.0);
        // H(1/3) = (1/3) log2 3 + (2/3) log2(3/2)
        let expected = (1.0f64 / 3.0) * 3.0f64.log2() + (2.0 / 3.0) * 1.5f64.log2();
        assert_abs_diff_eq!(expected, 0.918296, epsilon = 5e-7);
        assert_abs_diff_eq!(
            single("b", &[1.0 / 3.0, 2.0 / 3.0]).entropy(&["b"]).unwrap(),
            expected,
            epsilon = 1e-12
        );
    }

    #[test]
    fn unknown_variable_is_an_error() {
        let d = single("b", &[0.5, 0.5]);
        assert!(d.entropy(&["zz"]).is_err());
    }

    #[test]
    fn adder_mutual_information_uniform_inputs() {
        let d = induced_joint(
            &MacChannel::binary_adder(),
            &StructuredInputDist::uniform(1, 2, 2),
            1.0,
        )
        .unwrap();
        // H(Y) = H(1/4, 1/2, 1/4) = 1.5, inputs independent of nothing else
        assert_abs_diff_eq!(
            d.mutual_information(&[var::X1, var::X2], &[var::Y]).unwrap(),
            1.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn adder_mutual_information_dsbs_third() {
        let d = induced_joint(&MacChannel::binary_adder(), &dsbs(1.0 / 3.0), 1.0).unwrap();
        // H(Y) = H(q) + 1 - q at q = 1/3 equals log2 3
        assert_abs_diff_eq!(
            d.mutual_information(&[var::X1, var::X2], &[var::Y]).unwrap(),
            3.0f64.log2(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn independent_variables_have_zero_mi() {
        let axes = vec![Axis::new("a", 2), Axis::new("b", 2)];
        let d = JointDist::new(axes, vec![0.25; 4]).unwrap();
        assert_abs_diff_eq!(d.mutual_information(&["a"], &["b"]).unwrap(), 0.0);
    }

    #[test]
    fn overlapping_subsets_are_rejected() {
        let d = induced_joint(
            &MacChannel::binary_adder(),
            &StructuredInputDist::uniform(1, 2, 2),
            0.5,
        )
        .unwrap();
        assert!(d
            .conditional_mutual_information(&[var::X1], &[var::X1], &[])
            .is_err());
    }

    #[test]
    fn induced_joint_switch_marginals() {
        let ch = MacChannel::binary_adder();
        let input = StructuredInputDist::uniform(1, 2, 2);
        // switch_p = 1: Yd marginal equals Y marginal, Ye is a point mass on e.
        let d = induced_joint(&ch, &input, 1.0).unwrap();
        let yd = d.marginal(&[var::YD]).unwrap();
        assert_abs_diff_eq!(yd.mass()[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(yd.mass()[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(yd.mass()[2], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(yd.mass()[3], 0.0, epsilon = 1e-15);
        let ye = d.marginal(&[var::YE]).unwrap();
        assert_abs_diff_eq!(ye.mass()[3], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn erasure_decomposition_of_decoder_information() {
        let ch = MacChannel::binary_adder();
        let input = super::tests::dsbs(0.25);
        let i_y = induced_joint(&ch, &input, 1.0)
            .unwrap()
            .mutual_information(&[var::X1, var::X2], &[var::Y])
            .unwrap();
        for p in [0.0, 0.3, 0.7] {
            let d = induced_joint(&ch, &input, p).unwrap();
            let i_yd = d.mutual_information(&[var::X1, var::X2], &[var::YD]).unwrap();
            assert_abs_diff_eq!(i_yd, p * i_y, epsilon = 1e-12);
        }
    }

    #[test]
    fn trivial_u_makes_inputs_independent() {
        let d = induced_joint(
            &MacChannel::binary_adder(),
            &StructuredInputDist::uniform(1, 2, 2),
            0.5,
        )
        .unwrap();
        assert_abs_diff_eq!(
            d.mutual_information(&[var::X1], &[var::X2]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn chain_rule_on_random_joints() {
        let mut rng = rng::substream(123, domain::TEST, 0);
        for _ in 0..50 {
            let na = rng.gen_range(2..4);
            let nb = rng.gen_range(2..4);
            let mut mass: Vec<f64> = (0..na * nb).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let total: f64 = mass.iter().sum();
            mass.iter_mut().for_each(|p| *p /= total);
            let d = JointDist::new(vec![Axis::new("a", na), Axis::new("b", nb)], mass).unwrap();
            let h_ab = d.entropy(&["a", "b"]).unwrap();
            let h_a = d.entropy(&["a"]).unwrap();
            let h_b_given_a = d.entropy(&["a", "b"]).unwrap() - d.entropy(&["a"]).unwrap();
            assert_abs_diff_eq!(h_ab, h_a + h_b_given_a, epsilon = 1e-10);
            // and via CMI: I(A;B) = H(B) - H(B|A)
            let i = d.mutual_information(&["a"], &["b"]).unwrap();
            assert_abs_diff_eq!(
                i,
                d.entropy(&["b"]).unwrap() - h_b_given_a,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn typicality_exact_match_and_null_cells() {
        let d = JointDist::new(
            vec![Axis::new("a", 2), Axis::new("b", 2)],
            vec![0.5, 0.25, 0.25, 0.0],
        )
        .unwrap();
        // 4 symbols matching the distribution exactly
        let a = [0, 0, 0, 1];
        let b = [0, 0, 1, 0];
        assert!(is_robustly_typical(&[&a, &b], &d, 1e-9).unwrap());
        // hitting the zero-probability cell (1,1) is never typical
        let a2 = [0, 0, 0, 1];
        let b2 = [0, 0, 1, 1];
        assert!(!is_robustly_typical(&[&a2, &b2], &d, 0.5).unwrap());
        // length mismatch
        assert!(is_robustly_typical(&[&a[..2], &b[..3]], &d, 0.1).is_err());
    }

    #[test]
    fn typicality_holds_whp_for_iid_samples() {
        let d = single("a", &[0.5, 0.5]);
        let mut hits = 0usize;
        for rep in 0..1000u64 {
            let mut rng = rng::substream(2024, domain::TEST, rep);
            let seq: Vec<usize> = (0..10_000).map(|_| rng.gen_range(0..2usize)).collect();
            if is_robustly_typical(&[&seq], &d, 0.1).unwrap() {
                hits += 1;
            }
        }
        // Chernoff: deviation 0.05 at n = 10^4 has probability ~ e^{-50}
        assert!(hits >= 990, "typical in only {hits}/1000 resamples");
    }

    #[test]
    fn cell_cap_is_enforced() {
        let axes = vec![
            Axis::new("a", 100_000),
            Axis::new("b", 100_000),
            Axis::new("c", 100),
        ];
        match JointDist::from_fn(axes, |_| 0.0) {
            Err(Error::ResourceCap(_)) => {}
            other => panic!("expected resource-cap error, got {other:?}"),
        }
    }
}
