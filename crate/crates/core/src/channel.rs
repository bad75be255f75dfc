//! The raw two-transmitter multiple-access channel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-sum slack accepted when ingesting a channel document; rows within
/// this distance of stochastic are renormalised, anything worse is rejected.
pub const INGEST_TOLERANCE: f64 = 1e-9;

/// Row-sum slack required of an already-constructed channel.
pub const STRICT_TOLERANCE: f64 = 1e-12;

/// A finite-alphabet MAC `P(y | x1, x2)`.
///
/// The transition table is stored flat, indexed `[x1][x2][y]`. Inputs and
/// outputs are symbol indices `0..size`.
#[derive(Debug, Clone, PartialEq)]
pub struct MacChannel {
    x1_size: usize,
    x2_size: usize,
    y_size: usize,
    transition: Vec<f64>,
}

/// On-disk form of a channel (JSON document, round-trips losslessly).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelDoc {
    pub x1_size: usize,
    pub x2_size: usize,
    pub y_size: usize,
    /// Nested `[x1][x2][y]` probability table.
    pub transition: Vec<Vec<Vec<f64>>>,
}

impl serde::Serialize for MacChannel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for MacChannel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = ChannelDoc::deserialize(d)?;
        MacChannel::from_doc(&doc).map_err(serde::de::Error::custom)
    }
}

impl MacChannel {
    /// Build a channel from a flat `[x1][x2][y]` table, validating strictly.
    pub fn new(x1_size: usize, x2_size: usize, y_size: usize, transition: Vec<f64>) -> Result<Self> {
        let ch = MacChannel {
            x1_size,
            x2_size,
            y_size,
            transition,
        };
        ch.validate(STRICT_TOLERANCE)?;
        Ok(ch)
    }

    fn validate(&self, row_tol: f64) -> Result<()> {
        if self.x1_size < 1 || self.x2_size < 1 || self.y_size < 1 {
            return Err(Error::validation("all alphabet sizes must be >= 1"));
        }
        if self.transition.len() != self.x1_size * self.x2_size * self.y_size {
            return Err(Error::validation(format!(
                "transition table has {} entries, expected {}",
                self.transition.len(),
                self.x1_size * self.x2_size * self.y_size
            )));
        }
        for x1 in 0..self.x1_size {
            for x2 in 0..self.x2_size {
                let mut sum = 0.0;
                for y in 0..self.y_size {
                    let p = self.w(x1, x2, y);
                    if !(p >= 0.0) || !p.is_finite() {
                        return Err(Error::validation(format!(
                            "transition({x1},{x2},{y}) = {p} is not a probability"
                        )));
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > row_tol {
                    return Err(Error::validation(format!(
                        "row (x1={x1}, x2={x2}) sums to {sum}, not 1"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Ingest a parsed document: rows within [`INGEST_TOLERANCE`] of
    /// stochastic are renormalised, anything worse is rejected.
    pub fn from_doc(doc: &ChannelDoc) -> Result<Self> {
        if doc.transition.len() != doc.x1_size
            || doc.transition.iter().any(|a| a.len() != doc.x2_size)
            || doc
                .transition
                .iter()
                .flatten()
                .any(|row| row.len() != doc.y_size)
        {
            return Err(Error::validation(
                "transition nesting does not match declared alphabet sizes",
            ));
        }
        let mut flat = Vec::with_capacity(doc.x1_size * doc.x2_size * doc.y_size);
        for a in &doc.transition {
            for row in a {
                flat.extend_from_slice(row);
            }
        }
        let mut ch = MacChannel {
            x1_size: doc.x1_size,
            x2_size: doc.x2_size,
            y_size: doc.y_size,
            transition: flat,
        };
        ch.validate(INGEST_TOLERANCE)?;
        // Renormalise rows so downstream code sees exactly stochastic rows.
        for x1 in 0..ch.x1_size {
            for x2 in 0..ch.x2_size {
                let base = (x1 * ch.x2_size + x2) * ch.y_size;
                let sum: f64 = ch.transition[base..base + ch.y_size].iter().sum();
                for p in &mut ch.transition[base..base + ch.y_size] {
                    *p /= sum;
                }
            }
        }
        Ok(ch)
    }

    pub fn to_doc(&self) -> ChannelDoc {
        let mut transition = Vec::with_capacity(self.x1_size);
        for x1 in 0..self.x1_size {
            let mut a = Vec::with_capacity(self.x2_size);
            for x2 in 0..self.x2_size {
                let base = (x1 * self.x2_size + x2) * self.y_size;
                a.push(self.transition[base..base + self.y_size].to_vec());
            }
            transition.push(a);
        }
        ChannelDoc {
            x1_size: self.x1_size,
            x2_size: self.x2_size,
            y_size: self.y_size,
            transition,
        }
    }

    /// Parse a channel from a JSON document string.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ChannelDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }

    /// Deterministic channel from a map `(x1, x2) -> y`.
    pub fn deterministic(
        x1_size: usize,
        x2_size: usize,
        y_size: usize,
        map: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let mut t = vec![0.0; x1_size * x2_size * y_size];
        for x1 in 0..x1_size {
            for x2 in 0..x2_size {
                let y = map(x1, x2);
                if y >= y_size {
                    return Err(Error::validation(format!(
                        "deterministic map sends ({x1},{x2}) to {y} >= y_size {y_size}"
                    )));
                }
                t[(x1 * x2_size + x2) * y_size + y] = 1.0;
            }
        }
        MacChannel::new(x1_size, x2_size, y_size, t)
    }

    /// The binary additive MAC: `Y = X1 + X2` over {0,1,2}.
    pub fn binary_adder() -> Self {
        Self::deterministic(2, 2, 3, |a, b| a + b).expect("static table")
    }

    /// The binary XOR MAC: `Y = X1 ^ X2`.
    pub fn binary_xor() -> Self {
        Self::deterministic(2, 2, 2, |a, b| a ^ b).expect("static table")
    }

    /// `Y = X1`, second input ignored. Useful as a channel outside the
    /// adder class (X2 is never recoverable from (Y, X1)).
    pub fn y_equals_x1() -> Self {
        Self::deterministic(2, 2, 2, |a, _| a).expect("static table")
    }

    /// `Y` constant, carries nothing.
    pub fn useless() -> Self {
        Self::deterministic(2, 2, 1, |_, _| 0).expect("static table")
    }

    #[inline]
    pub fn x1_size(&self) -> usize {
        self.x1_size
    }

    #[inline]
    pub fn x2_size(&self) -> usize {
        self.x2_size
    }

    #[inline]
    pub fn y_size(&self) -> usize {
        self.y_size
    }

    /// Transition probability `P(y | x1, x2)`.
    #[inline]
    pub fn w(&self, x1: usize, x2: usize, y: usize) -> f64 {
        self.transition[(x1 * self.x2_size + x2) * self.y_size + y]
    }

    /// Index of the erasure symbol in the extended output alphabet.
    #[inline]
    pub fn erasure_symbol(&self) -> usize {
        self.y_size
    }

    /// Size of the extended output alphabet `Y ∪ {e}`.
    #[inline]
    pub fn extended_y_size(&self) -> usize {
        self.y_size + 1
    }

    /// Draw one output symbol for inputs `(x1, x2)` from the channel law.
    pub fn sample_output(&self, x1: usize, x2: usize, rng: &mut impl rand::Rng) -> usize {
        let base = (x1 * self.x2_size + x2) * self.y_size;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for y in 0..self.y_size {
            acc += self.transition[base + y];
            if u < acc {
                return y;
            }
        }
        self.y_size - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adder_rows_are_deterministic() {
        let ch = MacChannel::binary_adder();
        assert_eq!(ch.w(0, 0, 0), 1.0);
        assert_eq!(ch.w(0, 1, 1), 1.0);
        assert_eq!(ch.w(1, 0, 1), 1.0);
        assert_eq!(ch.w(1, 1, 2), 1.0);
        assert_eq!(ch.w(1, 1, 0), 0.0);
    }

    #[test]
    fn bad_row_sum_is_rejected() {
        let doc = ChannelDoc {
            x1_size: 1,
            x2_size: 1,
            y_size: 2,
            transition: vec![vec![vec![0.6, 0.3]]],
        };
        let err = MacChannel::from_doc(&doc).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "got {err:?}");
    }

    #[test]
    fn near_stochastic_row_is_renormalised() {
        let doc = ChannelDoc {
            x1_size: 1,
            x2_size: 1,
            y_size: 2,
            transition: vec![vec![vec![0.5 + 2e-10, 0.5]]],
        };
        let ch = MacChannel::from_doc(&doc).unwrap();
        let sum = ch.w(0, 0, 0) + ch.w(0, 0, 1);
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn doc_round_trip_is_lossless() {
        let ch = MacChannel::binary_adder();
        let text = serde_json::to_string(&ch.to_doc()).unwrap();
        let back = MacChannel::from_json(&text).unwrap();
        assert_eq!(ch, back);
    }

    #[test]
    fn nesting_mismatch_is_rejected() {
        let doc = ChannelDoc {
            x1_size: 2,
            x2_size: 1,
            y_size: 2,
            transition: vec![vec![vec![1.0, 0.0]]],
        };
        assert!(MacChannel::from_doc(&doc).is_err());
    }
}
