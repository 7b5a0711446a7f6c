//! Binary linear block codes over GF(2) with codewords packed into `u64`.
//!
//! Bit conventions used throughout the crate:
//!
//! * codeword position `i` (0-based) is bit `i` of the packed word;
//! * a message is identified by its canonical index `j - 1 ∈ [0, 2^k)`; message
//!   bit `b_{i+1}` is bit `k - 1 - i` of the index (MSB-first), and it selects
//!   generator row `i`.

mod codes;
mod gf32;
mod stats;
mod stream;

pub use codes::{bch_31_21, hamming_7_4, polar_16_8, CodeId, BCH_PRIMITIVE_POLY, DEFAULT_POLAR_DESIGN_EBN0_DB};
pub use gf32::{poly_mul, poly_rem, Gf32};
pub use stats::{code_stats, CodeStats, MAX_ENUMERATION_K};
pub use stream::{CodewordStream, GrayStep, GrayWalk};

use serde::Serialize;

use crate::error::{Error, Result};

/// Mask with the low `bits` bits set.
#[inline]
pub fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Unpacks the low `len` bits of `word`, position 0 first.
pub fn unpack_bits(word: u64, len: usize) -> Vec<u8> {
    (0..len).map(|i| ((word >> i) & 1) as u8).collect()
}

/// Packs a 0/1 slice, position 0 into bit 0.
pub fn pack_bits(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (u64::from(b & 1) << i))
}

/// Message bits `b_1..b_k` of a canonical message index (MSB-first).
pub fn index_to_message(index: u64, k: usize) -> Vec<u8> {
    (0..k).map(|i| ((index >> (k - 1 - i)) & 1) as u8).collect()
}

/// Inverse of [`index_to_message`].
pub fn message_to_index(bits: &[u8]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b & 1))
}

/// Renders the low `len` bits of `word` as a `0`/`1` string, position 0 first.
pub fn bit_string(word: u64, len: usize) -> String {
    (0..len)
        .map(|i| if (word >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Rank over GF(2) of a set of packed row vectors.
pub fn rank(rows: &[u64]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for col in 0..64 {
        let bit = 1u64 << col;
        let Some(p) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for r in rows.iter_mut().skip(rank + 1) {
            if *r & bit != 0 {
                *r ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

/// Linear left-inverse of the generator matrix: an `n × k` binary matrix
/// `R` with `G·R = I_k`, stored as one packed message mask per codeword
/// position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageRecovery {
    rows: Vec<u64>,
    pivots: Vec<usize>,
    pivot_mask: u64,
}

impl MessageRecovery {
    fn new(gen_rows: &[u64], n: usize) -> Result<Self> {
        let k = gen_rows.len();
        let mut reduced = gen_rows.to_vec();
        // transform[l] records which original rows were summed into reduced[l],
        // already laid out as message-index bits.
        let mut transform: Vec<u64> = (0..k).map(|i| 1u64 << (k - 1 - i)).collect();
        let mut pivots = Vec::with_capacity(k);
        let mut r = 0;
        for col in 0..n {
            if r == k {
                break;
            }
            let bit = 1u64 << col;
            let Some(p) = (r..k).find(|&i| reduced[i] & bit != 0) else {
                continue;
            };
            reduced.swap(r, p);
            transform.swap(r, p);
            for i in 0..k {
                if i != r && reduced[i] & bit != 0 {
                    reduced[i] ^= reduced[r];
                    transform[i] ^= transform[r];
                }
            }
            pivots.push(col);
            r += 1;
        }
        if pivots.len() < k {
            return Err(Error::RankDeficient { rank: pivots.len(), k });
        }
        let mut rows = vec![0u64; n];
        let mut pivot_mask = 0;
        for (l, &p) in pivots.iter().enumerate() {
            rows[p] = transform[l];
            pivot_mask |= 1u64 << p;
        }
        Ok(Self { rows, pivots, pivot_mask })
    }

    /// `c · R` over GF(2), as a canonical message index.
    #[inline]
    pub fn apply(&self, word: u64) -> u64 {
        let mut bits = word & self.pivot_mask;
        let mut acc = 0;
        while bits != 0 {
            let p = bits.trailing_zeros() as usize;
            acc ^= self.rows[p];
            bits &= bits - 1;
        }
        acc
    }

    /// Row `i` of `R` as a message-index mask.
    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Information set: codeword positions the recovery reads.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
}

/// Descriptive metadata echoed into manifests and CLI output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeMeta {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frozen_set: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub design_ebn0_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator_polynomial: Option<String>,
}

/// `k × n` generator matrix of a binary linear block code.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    meta: CodeMeta,
    rows: Vec<u64>,
    recovery: MessageRecovery,
}

impl GeneratorMatrix {
    /// Builds a code from packed rows. Fails unless `1 <= k < n <= 64`, every
    /// row fits in `n` bits, and the rows are linearly independent.
    pub fn new(name: impl Into<String>, n: usize, rows: Vec<u64>) -> Result<Self> {
        let k = rows.len();
        if k == 0 || k >= n || n > 64 || rows.iter().any(|&r| r & !low_mask(n) != 0) {
            return Err(Error::InvalidDimensions { n, k });
        }
        let recovery = MessageRecovery::new(&rows, n)?;
        Ok(Self {
            meta: CodeMeta {
                name: name.into(),
                n,
                k,
                rate: k as f64 / n as f64,
                frozen_set: None,
                design_ebn0_db: None,
                generator_polynomial: None,
            },
            rows,
            recovery,
        })
    }

    /// Parses one row per non-empty line, written as `0`/`1` characters
    /// (whitespace between digits is ignored). Lines starting with `#` are
    /// comments.
    pub fn from_text(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut n = None;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bits: Vec<u8> = line
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    other => Err(Error::Parse(format!("line {}: unexpected {other:?}", lineno + 1))),
                })
                .collect::<Result<_>>()?;
            match n {
                None => n = Some(bits.len()),
                Some(len) if len != bits.len() => {
                    return Err(Error::LengthMismatch { expected: len, got: bits.len() })
                }
                _ => {}
            }
            if bits.len() > 64 {
                return Err(Error::InvalidDimensions { n: bits.len(), k: rows.len() + 1 });
            }
            rows.push(pack_bits(&bits));
        }
        let n = n.ok_or_else(|| Error::Parse("no generator rows".into()))?;
        Self::new(name, n, rows)
    }

    pub(crate) fn with_meta(mut self, f: impl FnOnce(&mut CodeMeta)) -> Self {
        f(&mut self.meta);
        self
    }

    pub fn name(&self) -> &str {
        &self.meta.name
    }

    pub fn n(&self) -> usize {
        self.meta.n
    }

    pub fn k(&self) -> usize {
        self.meta.k
    }

    pub fn rate(&self) -> f64 {
        self.meta.rate
    }

    pub fn meta(&self) -> &CodeMeta {
        &self.meta
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Row for message bit `b_{i+1}`.
    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    /// Generator row selected by bit `p` (LSB = 0) of a message index.
    #[inline]
    pub fn row_for_index_bit(&self, p: usize) -> u64 {
        self.rows[self.meta.k - 1 - p]
    }

    /// Number of codewords, `2^k`.
    pub fn size(&self) -> u64 {
        1u64 << self.meta.k
    }

    /// Packed codeword for a canonical message index.
    #[inline]
    pub fn encode_index(&self, index: u64) -> u64 {
        let k = self.meta.k;
        let mut bits = index & low_mask(k);
        let mut cw = 0;
        while bits != 0 {
            let p = bits.trailing_zeros() as usize;
            cw ^= self.rows[k - 1 - p];
            bits &= bits - 1;
        }
        cw
    }

    /// `m · G` over GF(2) for a 0/1 message of length `k`.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.meta.k {
            return Err(Error::LengthMismatch { expected: self.meta.k, got: message.len() });
        }
        Ok(unpack_bits(self.encode_index(message_to_index(message)), self.meta.n))
    }

    /// Message index recovered linearly from a packed word (exact for codewords).
    #[inline]
    pub fn recover_index(&self, word: u64) -> u64 {
        self.recovery.apply(word)
    }

    pub fn recover_message(&self, word: &[u8]) -> Result<Vec<u8>> {
        if word.len() != self.meta.n {
            return Err(Error::LengthMismatch { expected: self.meta.n, got: word.len() });
        }
        Ok(index_to_message(self.recover_index(pack_bits(word)), self.meta.k))
    }

    pub fn recovery(&self) -> &MessageRecovery {
        &self.recovery
    }

    /// Coset representative map `y ↦ y ⊕ encode(recover(y))`: linear, with
    /// kernel exactly the code, so it serves as an `n`-bit syndrome.
    #[inline]
    pub fn syndrome(&self, word: u64) -> u64 {
        word ^ self.encode_index(self.recover_index(word))
    }

    #[inline]
    pub fn is_codeword(&self, word: u64) -> bool {
        word & !low_mask(self.meta.n) == 0 && self.syndrome(word) == 0
    }

    /// OR of all generator rows; a zero bit marks a coordinate that is zero in
    /// every codeword.
    pub fn support(&self) -> u64 {
        self.rows.iter().fold(0, |acc, r| acc | r)
    }

    pub fn stream(&self) -> CodewordStream<'_> {
        CodewordStream::new(self)
    }
}
