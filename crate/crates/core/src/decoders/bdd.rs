use std::collections::HashMap;

use super::{DecodeOutcome, Metric};
use crate::error::Result;
use crate::gf2::{code_stats, GeneratorMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BddStrategy {
    /// Syndrome → coset leader of weight at most `t`.
    Syndrome(HashMap<u64, u64>),
    /// Scan the codebook for a codeword within distance `t`.
    CodebookSearch,
}

/// Hard-decision bounded distance decoder with radius `t`.
///
/// On failure the message is the linear projection of the hard decisions and
/// no codeword is reported.
#[derive(Debug, Clone)]
pub struct BddDecoder {
    code: GeneratorMatrix,
    radius: u32,
    strategy: BddStrategy,
}

fn for_each_pattern(n: usize, max_weight: u32, f: &mut impl FnMut(u64)) {
    fn rec(n: usize, start: usize, left: u32, acc: u64, f: &mut impl FnMut(u64)) {
        f(acc);
        if left == 0 {
            return;
        }
        for i in start..n {
            rec(n, i + 1, left - 1, acc | 1 << i, f);
        }
    }
    rec(n, 0, max_weight, 0, f);
}

impl BddDecoder {
    /// Radius `⌊(d_min - 1) / 2⌋` from the scanned minimum distance. Codes
    /// carrying a polar frozen set use the codebook search, all others the
    /// syndrome table.
    pub fn new(code: &GeneratorMatrix) -> Result<Self> {
        let d = code_stats(code)?.min_distance;
        let t = d.saturating_sub(1) / 2;
        if code.meta().frozen_set.is_some() {
            Ok(Self::codebook_search(code, t))
        } else {
            Ok(Self::syndrome(code, t))
        }
    }

    pub fn syndrome(code: &GeneratorMatrix, radius: u32) -> Self {
        let mut table = HashMap::new();
        for_each_pattern(code.n(), radius, &mut |e| {
            let s = code.syndrome(e);
            let slot = table.entry(s).or_insert(e);
            if e.count_ones() < slot.count_ones() {
                *slot = e;
            }
        });
        Self { code: code.clone(), radius, strategy: BddStrategy::Syndrome(table) }
    }

    pub fn codebook_search(code: &GeneratorMatrix, radius: u32) -> Self {
        Self { code: code.clone(), radius, strategy: BddStrategy::CodebookSearch }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn strategy(&self) -> &BddStrategy {
        &self.strategy
    }

    pub fn code(&self) -> &GeneratorMatrix {
        &self.code
    }

    fn locate(&self, hard: u64) -> Option<u64> {
        match &self.strategy {
            BddStrategy::Syndrome(table) => {
                let e = *table.get(&self.code.syndrome(hard))?;
                (e.count_ones() <= self.radius).then_some(hard ^ e)
            }
            BddStrategy::CodebookSearch => {
                self.code.stream().map(|(_, cw)| cw).find(|&cw| (cw ^ hard).count_ones() <= self.radius)
            }
        }
    }

    pub fn decode_hard<S: Real>(&self, hard: u64) -> DecodeOutcome<S> {
        match self.locate(hard) {
            Some(cw) => DecodeOutcome {
                index: self.code.recover_index(cw),
                codeword: Some(cw),
                bdd_failure: false,
                metric: Metric::Distance((cw ^ hard).count_ones()),
            },
            None => DecodeOutcome {
                index: self.code.recover_index(hard),
                codeword: None,
                bdd_failure: true,
                metric: Metric::None,
            },
        }
    }

    pub fn decode<S: Real>(&self, r: &[S]) -> Result<DecodeOutcome<S>> {
        if r.len() != self.code.n() {
            return Err(crate::error::Error::LengthMismatch { expected: self.code.n(), got: r.len() });
        }
        Ok(self.decode_hard(crate::channel::hard_decision(r)))
    }
}
