use super::{DecodeOutcome, Metric};
use crate::error::{Error, Result};
use crate::gf2::GeneratorMatrix;
use crate::scalar::Real;

/// Steps between from-scratch recomputations of the running correlation.
const RESYNC_INTERVAL: u64 = 1 << 10;

/// Walks the codebook in Gray-code order keeping `r · c` up to date: toggling
/// row `g` changes the correlation by `+r_i` on positions of `g` where `c`
/// was 0 and `-r_i` where it was 1.
#[derive(Debug)]
pub struct GrayCorrelator<'a, S> {
    code: &'a GeneratorMatrix,
    r: &'a [S],
    row_positions: Vec<Vec<usize>>,
}

impl<'a, S: Real> GrayCorrelator<'a, S> {
    pub fn new(code: &'a GeneratorMatrix, r: &'a [S]) -> Result<Self> {
        if r.len() != code.n() {
            return Err(Error::LengthMismatch { expected: code.n(), got: r.len() });
        }
        let row_positions = code
            .rows()
            .iter()
            .map(|&row| (0..code.n()).filter(|&i| (row >> i) & 1 == 1).collect())
            .collect();
        Ok(Self { code, r, row_positions })
    }

    fn recompute(&self, cw: u64) -> S {
        let mut acc = S::zero();
        let mut bits = cw;
        while bits != 0 {
            acc += self.r[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        acc
    }

    fn drift_tolerance(&self) -> S {
        let scale: S = self.r.iter().map(|x| x.abs()).sum();
        S::lit(1e-9).max(S::epsilon() * S::lit(4096.0)) * (S::one() + scale)
    }

    /// Calls `f(index, codeword, score)` for all `2^k` codewords in Gray order.
    #[inline]
    pub fn for_each<F: FnMut(u64, u64, S)>(&self, mut f: F) {
        let k = self.code.k();
        let mut cw = 0u64;
        let mut score = S::zero();
        f(0, 0, score);
        for s in 1..self.code.size() {
            let row = k - 1 - s.trailing_zeros() as usize;
            let mut delta = S::zero();
            for &i in &self.row_positions[row] {
                if (cw >> i) & 1 == 1 {
                    delta -= self.r[i];
                } else {
                    delta += self.r[i];
                }
            }
            cw ^= self.code.row(row);
            score += delta;
            if s % RESYNC_INTERVAL == 0 {
                let exact = self.recompute(cw);
                debug_assert!(
                    (exact - score).abs() <= self.drift_tolerance(),
                    "incremental correlation drifted: {score} vs {exact}"
                );
                score = exact;
            }
            f(s ^ (s >> 1), cw, score);
        }
    }
}

/// Codeword-wise ML: `argmax_j r · c_j`, ties to the lowest message index.
pub fn ml_decode<S: Real>(code: &GeneratorMatrix, r: &[S]) -> Result<DecodeOutcome<S>> {
    let (index, codeword, score) = ml_decode_scored(code, r)?;
    Ok(DecodeOutcome { index, codeword: Some(codeword), bdd_failure: false, metric: Metric::Score(score) })
}

/// `(index, codeword, score)` of the ML codeword.
pub fn ml_decode_scored<S: Real>(code: &GeneratorMatrix, r: &[S]) -> Result<(u64, u64, S)> {
    let walk = GrayCorrelator::new(code, r)?;
    let mut best = (0u64, 0u64, S::neg_infinity());
    walk.for_each(|index, cw, score| {
        if score > best.2 || (score == best.2 && index < best.0) {
            best = (index, cw, score);
        }
    });
    Ok(best)
}
