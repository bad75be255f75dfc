//! Feedforward probability profiles `p(t)` and per-use switch probabilities.
//!
//! Profiles are piecewise-constant on `[0,1]`, so the per-use integrals are
//! computed by exact segment-overlap arithmetic with no quadrature error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One constant piece of a feedforward profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub p: f64,
}

/// A piecewise-constant feedforward probability function on `[0,1]`.
///
/// Segments must partition `[0,1]` exactly: the first starts at 0, the last
/// ends at 1, and consecutive boundaries coincide. Gaps and overlaps are
/// validation errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeedforwardProfile {
    segments: Vec<Segment>,
}

impl FeedforwardProfile {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::validation("profile needs at least one segment"));
        }
        if segments[0].t_start != 0.0 {
            return Err(Error::validation("first segment must start at t=0"));
        }
        if segments[segments.len() - 1].t_end != 1.0 {
            return Err(Error::validation("last segment must end at t=1"));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.t_start < s.t_end) {
                return Err(Error::validation(format!(
                    "segment {i} has non-positive length [{}, {}]",
                    s.t_start, s.t_end
                )));
            }
            if !(0.0..=1.0).contains(&s.p) {
                return Err(Error::validation(format!(
                    "segment {i} probability {} outside [0,1]",
                    s.p
                )));
            }
            if i > 0 && segments[i - 1].t_end != s.t_start {
                return Err(Error::validation(format!(
                    "gap or overlap between segments {} and {i}: {} vs {}",
                    i - 1,
                    segments[i - 1].t_end,
                    s.t_start
                )));
            }
        }
        Ok(FeedforwardProfile { segments })
    }

    /// Constant profile `p(t) = p`.
    pub fn constant(p: f64) -> Result<Self> {
        Self::new(vec![Segment {
            t_start: 0.0,
            t_end: 1.0,
            p,
        }])
    }

    /// The step pattern: feedback first, then feedforward — `p(t) = 0` for
    /// `t < 1 - p_avg` and `1` afterwards.
    pub fn step(p_avg: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_avg) {
            return Err(Error::validation("p_avg must lie in [0,1]"));
        }
        if p_avg == 0.0 {
            return Self::constant(0.0);
        }
        if p_avg == 1.0 {
            return Self::constant(1.0);
        }
        Self::new(vec![
            Segment {
                t_start: 0.0,
                t_end: 1.0 - p_avg,
                p: 0.0,
            },
            Segment {
                t_start: 1.0 - p_avg,
                t_end: 1.0,
                p: 1.0,
            },
        ])
    }

    /// Block profile: `B` equal-length segments with the given probabilities.
    pub fn blocks(probs: &[f64]) -> Result<Self> {
        let b = probs.len();
        if b == 0 {
            return Err(Error::validation("need at least one block"));
        }
        let segs = probs
            .iter()
            .enumerate()
            .map(|(i, &p)| Segment {
                t_start: i as f64 / b as f64,
                t_end: if i + 1 == b {
                    1.0
                } else {
                    (i + 1) as f64 / b as f64
                },
                p,
            })
            .collect();
        Self::new(segs)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let segments: Vec<Segment> = serde_json::from_str(text)?;
        Self::new(segments)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Length-weighted mean of the segment probabilities,
    /// `p_avg = ∫ p(t) dt`.
    pub fn p_avg(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.p * (s.t_end - s.t_start))
            .sum()
    }

    /// Per-use switch probabilities `p_i = n ∫_{(i-1)/n}^{i/n} p(t) dt`.
    ///
    /// The overlap of each segment with interval `i` is computed in units of
    /// the interval length, so a segment covering the whole interval
    /// contributes exactly its own `p` (no `1/n` round trip).
    pub fn switch_probs(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::validation("blocklength must be >= 1"));
        }
        let nf = n as f64;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let lo = i as f64; // interval is [lo, lo+1) in units of 1/n
            let mut p_i = 0.0;
            for s in &self.segments {
                let a = (s.t_start * nf - lo).max(0.0);
                let b = (s.t_end * nf - lo).min(1.0);
                if b > a {
                    p_i += s.p * (b - a);
                }
            }
            out.push(p_i.clamp(0.0, 1.0));
        }
        Ok(out)
    }

    /// Per-block averages `p̄_b = B ∫ over block b of p(t) dt` — the same
    /// integral as [`switch_probs`](Self::switch_probs) at resolution `B`.
    pub fn block_averages(&self, b: usize) -> Result<Vec<f64>> {
        self.switch_probs(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn step_half() -> FeedforwardProfile {
        FeedforwardProfile::new(vec![
            Segment {
                t_start: 0.0,
                t_end: 0.5,
                p: 0.0,
            },
            Segment {
                t_start: 0.5,
                t_end: 1.0,
                p: 1.0,
            },
        ])
        .unwrap()
    }

    #[test]
    fn constant_profile_gives_constant_probs() {
        let pr = FeedforwardProfile::constant(0.5).unwrap();
        assert_eq!(pr.switch_probs(4).unwrap(), vec![0.5, 0.5, 0.5, 0.5]);
        assert_eq!(pr.p_avg(), 0.5);
    }

    #[test]
    fn step_profile_aligned_to_block_boundary() {
        assert_eq!(step_half().switch_probs(2).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn step_profile_with_straddling_interval() {
        // Middle interval (1/3, 2/3) is half-covered by the p=1 segment.
        let probs = step_half().switch_probs(3).unwrap();
        assert_eq!(probs[0], 0.0);
        assert_abs_diff_eq!(probs[1], 0.5, epsilon = 1e-15);
        assert_eq!(probs[2], 1.0);
    }

    #[test]
    fn gap_and_overlap_are_rejected() {
        let gap = FeedforwardProfile::new(vec![
            Segment {
                t_start: 0.0,
                t_end: 0.4,
                p: 0.0,
            },
            Segment {
                t_start: 0.5,
                t_end: 1.0,
                p: 1.0,
            },
        ]);
        assert!(gap.is_err());
        let overlap = FeedforwardProfile::new(vec![
            Segment {
                t_start: 0.0,
                t_end: 0.6,
                p: 0.0,
            },
            Segment {
                t_start: 0.5,
                t_end: 1.0,
                p: 1.0,
            },
        ]);
        assert!(overlap.is_err());
    }

    #[test]
    fn switch_probs_mean_matches_p_avg_on_aligned_grid() {
        // n a multiple of every breakpoint denominator (here 4).
        let pr = FeedforwardProfile::new(vec![
            Segment {
                t_start: 0.0,
                t_end: 0.25,
                p: 0.2,
            },
            Segment {
                t_start: 0.25,
                t_end: 0.75,
                p: 0.9,
            },
            Segment {
                t_start: 0.75,
                t_end: 1.0,
                p: 0.4,
            },
        ])
        .unwrap();
        for n in [4, 8, 16, 64] {
            let probs = pr.switch_probs(n).unwrap();
            let mean = probs.iter().sum::<f64>() / n as f64;
            assert_abs_diff_eq!(mean, pr.p_avg(), epsilon = 1e-12);
        }
    }

    #[test]
    fn json_round_trip() {
        let pr = step_half();
        let text = serde_json::to_string(&pr).unwrap();
        let back = FeedforwardProfile::from_json(&text).unwrap();
        assert_eq!(pr, back);
    }
}
