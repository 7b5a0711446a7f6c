//! Production decoders and brute-force reference oracles.
//!
//! * [`ml_decode`] / [`map_decode`]: exhaustive Gray-code walks over the
//!   codebook (codeword-wise ML by correlation, bit-wise MAP by streaming
//!   log-sum-exp).
//! * [`Trellis`]: the same two decision rules evaluated exactly on the
//!   generator trellis, used where `2^k` per frame is too slow.
//! * [`oracle_ml`] / [`oracle_map`]: direct Gaussian likelihoods, test scale.
//! * [`BddDecoder`]: hard-decision bounded distance decoding.

mod bdd;
mod kind;
mod map;
mod ml;
mod oracle;
mod trellis;

pub use bdd::{BddDecoder, BddStrategy};
pub use kind::{AlphaSpec, DecoderKind, Engine, PreparedDecoder};
pub use map::{map_decode, map_decode_with_alpha};
pub use ml::{ml_decode, ml_decode_scored, GrayCorrelator};
pub use oracle::{oracle_map, oracle_ml, ORACLE_MAX_K};
pub use trellis::Trellis;

use crate::gf2::index_to_message;

/// Per-decoder figure of merit attached to an outcome.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric<S> {
    /// Winning correlation `r · c`.
    Score(S),
    /// Winning log-likelihood.
    LogLikelihood(S),
    /// `P(b_i = 1 | r)` per message bit.
    Posteriors(Vec<S>),
    /// Hamming distance between the hard decisions and the decoded codeword.
    Distance(u32),
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome<S> {
    /// Decoded message as a canonical index.
    pub index: u64,
    /// Decoded codeword; `None` when bounded distance decoding fails.
    pub codeword: Option<u64>,
    pub bdd_failure: bool,
    pub metric: Metric<S>,
}

impl<S> DecodeOutcome<S> {
    pub fn message_bits(&self, k: usize) -> Vec<u8> {
        index_to_message(self.index, k)
    }
}
