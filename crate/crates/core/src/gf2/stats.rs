use serde::Serialize;

use super::{CodewordStream, GeneratorMatrix};
use crate::error::{Error, Result};

/// Largest `k` for which [`code_stats`] enumerates the codebook.
pub const MAX_ENUMERATION_K: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeStats {
    pub min_distance: u32,
    /// Total Hamming weight of the codebook (the single-label network's edge count).
    pub weight_sum: u64,
    /// `A_w` for `w = 0..=n`; only reported for `k <= 16`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_enumerator: Option<Vec<u64>>,
}

/// Streams the whole codebook once.
pub fn code_stats(code: &GeneratorMatrix) -> Result<CodeStats> {
    if code.k() > MAX_ENUMERATION_K {
        return Err(Error::TooLarge { k: code.k(), limit: MAX_ENUMERATION_K });
    }
    let mut spectrum = vec![0u64; code.n() + 1];
    for (_, cw) in CodewordStream::new(code) {
        spectrum[cw.count_ones() as usize] += 1;
    }
    let min_distance = (1..spectrum.len()).find(|&w| spectrum[w] > 0).unwrap_or(0) as u32;
    let weight_sum = spectrum.iter().enumerate().map(|(w, &a)| w as u64 * a).sum();
    Ok(CodeStats {
        min_distance,
        weight_sum,
        weight_enumerator: (code.k() <= 16).then_some(spectrum),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::hamming_7_4;

    #[test]
    fn hamming_enumerator() {
        let s = code_stats(&hamming_7_4()).unwrap();
        assert_eq!(s.weight_enumerator.unwrap(), vec![1, 0, 0, 7, 7, 0, 0, 1]);
        assert_eq!(s.min_distance, 3);
        assert_eq!(s.weight_sum, 56);
    }
}
