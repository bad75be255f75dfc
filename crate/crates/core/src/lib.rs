//! Capacity bounds, rate regions and block-Markov coding simulation for
//! two-transmitter multiple-access channels with switched feedback.
//!
//! Every channel output is routed either to the decoder (feedforward) or
//! back to both encoders (feedback), never both; the routing is an
//! independent per-use coin whose bias follows a piecewise-constant profile
//! `p(t)`. The crate computes the classical inner/outer bounds for this
//! model, the exact characterisations available for special channel
//! classes and switching patterns, and validates achievability empirically
//! with a seeded Monte Carlo implementation of the block-Markov scheme.

pub mod channel;
pub mod cli;
pub mod error;
pub mod info;
pub mod opt;
pub mod profile;
pub mod regions;
pub mod rng;
pub mod sim;
pub mod switched;

pub use channel::MacChannel;
pub use error::{Error, Result};
pub use info::{JointDist, StructuredInputDist};
pub use profile::FeedforwardProfile;
pub use switched::SwitchedChannelInstance;
