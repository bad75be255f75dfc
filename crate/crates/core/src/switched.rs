//! The extended-output switched channel: raw MAC plus per-use switch.
//!
//! At each use the raw output goes to exactly one side. `V_i = 1` sends it
//! forward (`Y_d = Y`, encoders see the erasure symbol), `V_i = 0` sends it
//! back (`Y_e = Y`, decoder sees the erasure symbol).

use crate::channel::MacChannel;
use crate::error::{Error, Result};
use crate::profile::FeedforwardProfile;
use crate::rng::{self, domain};

/// A seeded, fixed-blocklength instance of the switched channel.
#[derive(Debug, Clone)]
pub struct SwitchedChannelInstance {
    channel: MacChannel,
    profile: FeedforwardProfile,
    n: usize,
    switch_probs: Vec<f64>,
    seed: u64,
}

/// One sampled block of channel uses.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSample {
    /// Raw outputs, in the unextended alphabet.
    pub y_raw: Vec<usize>,
    /// Decoder observations, in the extended alphabet (erasure = `y_size`).
    pub y_d: Vec<usize>,
    /// Encoder observations, in the extended alphabet.
    pub y_e: Vec<usize>,
    /// Switch outcomes, `v[i] = 1` means feedforward.
    pub v: Vec<u8>,
}

impl SwitchedChannelInstance {
    pub fn new(
        channel: MacChannel,
        profile: FeedforwardProfile,
        n: usize,
        seed: u64,
    ) -> Result<Self> {
        let switch_probs = profile.switch_probs(n)?;
        Ok(SwitchedChannelInstance {
            channel,
            profile,
            n,
            switch_probs,
            seed,
        })
    }

    pub fn channel(&self) -> &MacChannel {
        &self.channel
    }

    pub fn profile(&self) -> &FeedforwardProfile {
        &self.profile
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn switch_probs(&self) -> &[f64] {
        &self.switch_probs
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Sample one block of `n` uses on substream `block_index`.
    ///
    /// Deterministic in `(seed, block_index)` regardless of the caller's
    /// threading, so disjoint substreams may be sampled concurrently.
    pub fn sample_block(
        &self,
        block_index: u64,
        x1_seq: &[usize],
        x2_seq: &[usize],
    ) -> Result<BlockSample> {
        if x1_seq.len() != self.n || x2_seq.len() != self.n {
            return Err(Error::validation(format!(
                "input sequences must have length n = {}",
                self.n
            )));
        }
        for (&a, &b) in x1_seq.iter().zip(x2_seq) {
            if a >= self.channel.x1_size() || b >= self.channel.x2_size() {
                return Err(Error::validation(format!(
                    "input symbol ({a},{b}) outside alphabets"
                )));
            }
        }
        let mut rng = rng::substream(self.seed, domain::BLOCK_SAMPLE, block_index);
        let e = self.channel.erasure_symbol();
        let mut y_raw = Vec::with_capacity(self.n);
        let mut y_d = Vec::with_capacity(self.n);
        let mut y_e = Vec::with_capacity(self.n);
        let mut v = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let y = self.channel.sample_output(x1_seq[i], x2_seq[i], &mut rng);
            let forward = rand::Rng::gen_bool(&mut rng, self.switch_probs[i]);
            y_raw.push(y);
            v.push(forward as u8);
            if forward {
                y_d.push(y);
                y_e.push(e);
            } else {
                y_d.push(e);
                y_e.push(y);
            }
        }
        Ok(BlockSample { y_raw, y_d, y_e, v })
    }
}
