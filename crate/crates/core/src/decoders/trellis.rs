//! Generator trellis of a binary linear block code.
//!
//! A row `g_j` is *active* at every position between its first and last
//! nonzero coordinate. The node set at position `i` is the set of assignments
//! to the rows active there, and `c_i` is the parity of the active rows that
//! have bit `i` set. Two consecutive node sets share the rows active at both
//! positions; rows that end at `i - 1` are summed out by the transition.

use super::{DecodeOutcome, Metric};
use crate::error::{Error, Result};
use crate::gf2::GeneratorMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone)]
struct Section {
    /// Local bit `t` of a node label is the value of row `rows[t]`.
    rows: Vec<usize>,
    /// Local bits whose rows have coordinate `i` set.
    parity: u64,
    /// Predecessor label with every leaving row set to 0.
    pred_base: Vec<u32>,
    /// All assignments to the rows leaving after the previous position,
    /// expressed in the previous section's local bits.
    leaving: Vec<u32>,
    /// Message-index bits of the rows that enter here, per node label.
    enter_bits: Vec<u64>,
}

impl Section {
    fn width(&self) -> usize {
        1 << self.rows.len()
    }

    #[inline]
    fn bit(&self, label: usize) -> bool {
        (label as u64 & self.parity).count_ones() & 1 == 1
    }
}

/// Exact ML (Viterbi) and bit-wise MAP (BCJR) on the generator trellis.
#[derive(Debug, Clone)]
pub struct Trellis {
    n: usize,
    k: usize,
    sections: Vec<Section>,
    /// `(section, local bit)` where each row is first active.
    row_home: Vec<(usize, usize)>,
}

/// Largest node set the constructor accepts.
const MAX_STATE_BITS: usize = 20;

impl Trellis {
    pub fn new(code: &GeneratorMatrix) -> Result<Self> {
        let (n, k) = (code.n(), code.k());
        let span: Vec<(usize, usize)> = code
            .rows()
            .iter()
            .map(|&r| (r.trailing_zeros() as usize, 63 - r.leading_zeros() as usize))
            .collect();
        let mut sections: Vec<Section> = Vec::with_capacity(n);
        let mut row_home = vec![(0, 0); k];
        let mut prev_rows: Vec<usize> = Vec::new();
        for i in 0..n {
            let rows: Vec<usize> = (0..k).filter(|&j| span[j].0 <= i && i <= span[j].1).collect();
            if rows.len() > MAX_STATE_BITS {
                return Err(Error::TooLarge { k: rows.len(), limit: MAX_STATE_BITS });
            }
            let parity = rows
                .iter()
                .enumerate()
                .filter(|&(_, &j)| (code.row(j) >> i) & 1 == 1)
                .fold(0u64, |m, (t, _)| m | 1 << t);
            let prev_pos = |j: usize| prev_rows.iter().position(|&x| x == j);
            let leaving_bits: Vec<usize> =
                prev_rows.iter().enumerate().filter(|&(_, j)| !rows.contains(j)).map(|(t, _)| t).collect();
            let leaving = (0..1u32 << leaving_bits.len())
                .map(|combo| {
                    leaving_bits
                        .iter()
                        .enumerate()
                        .filter(|&(b, _)| (combo >> b) & 1 == 1)
                        .fold(0u32, |m, (_, &t)| m | 1 << t)
                })
                .collect();
            let mut pred_base = Vec::with_capacity(1 << rows.len());
            let mut enter_bits = Vec::with_capacity(1 << rows.len());
            for label in 0..1usize << rows.len() {
                let mut base = 0u32;
                let mut enter = 0u64;
                for (t, &j) in rows.iter().enumerate() {
                    if (label >> t) & 1 == 0 {
                        continue;
                    }
                    match prev_pos(j) {
                        Some(p) => base |= 1 << p,
                        None => enter |= 1 << (k - 1 - j),
                    }
                }
                pred_base.push(base);
                enter_bits.push(enter);
            }
            for (t, &j) in rows.iter().enumerate() {
                if span[j].0 == i {
                    row_home[j] = (i, t);
                }
            }
            prev_rows = rows.clone();
            sections.push(Section { rows, parity, pred_base, leaving, enter_bits });
        }
        Ok(Self { n, k, sections, row_home })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Largest number of nodes at any position.
    pub fn max_nodes(&self) -> usize {
        self.sections.iter().map(Section::width).max().unwrap_or(1)
    }

    fn check<S>(&self, r: &[S]) -> Result<()> {
        if r.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: r.len() });
        }
        Ok(())
    }

    /// `argmax r · c` over the code. Among equal scores the survivor with the
    /// smaller partial message index is kept, which yields the lowest index
    /// overall because the bits still to be decided are shared by both paths.
    pub fn viterbi<S: Real>(&self, r: &[S]) -> Result<(u64, S)> {
        self.check(r)?;
        let mut metric = vec![S::zero()];
        let mut index = vec![0u64];
        for (i, sec) in self.sections.iter().enumerate() {
            let w = sec.width();
            let mut next_metric = Vec::with_capacity(w);
            let mut next_index = Vec::with_capacity(w);
            for label in 0..w {
                let base = sec.pred_base[label] as usize;
                let mut best = (S::neg_infinity(), u64::MAX);
                for &l in &sec.leaving {
                    let p = base | l as usize;
                    let cand = (metric[p], index[p]);
                    if cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                        best = cand;
                    }
                }
                let gain = if sec.bit(label) { r[i] } else { S::zero() };
                next_metric.push(best.0 + gain);
                next_index.push(best.1 | sec.enter_bits[label]);
            }
            metric = next_metric;
            index = next_index;
        }
        let mut best = (S::neg_infinity(), u64::MAX);
        for (&m, &j) in metric.iter().zip(&index) {
            if m > best.0 || (m == best.0 && j < best.1) {
                best = (m, j);
            }
        }
        Ok((best.1, best.0))
    }

    /// `P(b_i = 1 | r)` under branch weights `exp(α r · c)`, for `b_1..b_k`.
    /// `α` must be finite.
    pub fn posteriors<S: Real>(&self, r: &[S], alpha: S) -> Result<Vec<S>> {
        self.check(r)?;
        if !alpha.is_finite() || alpha < S::zero() {
            return Err(Error::InvalidConfig(format!("softmax scale must be finite and nonnegative, got {alpha}")));
        }
        match self.posteriors_linear(r, alpha) {
            Some(p) => Ok(p),
            None => Ok(self.posteriors_log(r, alpha)),
        }
    }

    /// Per-section normalized sum-product. `None` if a section loses all mass.
    fn posteriors_linear<S: Real>(&self, r: &[S], alpha: S) -> Option<Vec<S>> {
        let gains: Vec<(S, S)> = r
            .iter()
            .map(|&x| {
                let a = alpha * x;
                let m = a.max(S::zero());
                ((-m).exp(), (a - m).exp())
            })
            .collect();
        let g = |i: usize, sec: &Section, label: usize| if sec.bit(label) { gains[i].1 } else { gains[i].0 };
        let normalize = |v: &mut [S]| -> bool {
            let total: S = v.iter().copied().sum();
            if !(total > S::zero()) || !total.is_finite() {
                return false;
            }
            let inv = total.recip();
            v.iter_mut().for_each(|x| *x *= inv);
            true
        };

        let origin = [S::one()];
        let mut forward: Vec<Vec<S>> = Vec::with_capacity(self.n);
        for (i, sec) in self.sections.iter().enumerate() {
            let prev: &[S] = forward.last().map_or(&origin[..], |v| v.as_slice());
            let mut cur: Vec<S> = (0..sec.width())
                .map(|label| {
                    let base = sec.pred_base[label] as usize;
                    let s: S = sec.leaving.iter().map(|&l| prev[base | l as usize]).sum();
                    s * g(i, sec, label)
                })
                .collect();
            if !normalize(&mut cur) {
                return None;
            }
            forward.push(cur);
        }

        let mut backward: Vec<Vec<S>> = vec![Vec::new(); self.n];
        backward[self.n - 1] = vec![S::one(); self.sections[self.n - 1].width()];
        for i in (1..self.n).rev() {
            let sec = &self.sections[i];
            let mut prev = vec![S::zero(); self.sections[i - 1].width()];
            for label in 0..sec.width() {
                let v = g(i, sec, label) * backward[i][label];
                let base = sec.pred_base[label] as usize;
                for &l in &sec.leaving {
                    prev[base | l as usize] += v;
                }
            }
            if !normalize(&mut prev) {
                return None;
            }
            backward[i - 1] = prev;
        }

        let mut out = Vec::with_capacity(self.k);
        for &(s, t) in &self.row_home {
            let (mut p1, mut p0) = (S::zero(), S::zero());
            for (label, (&f, &b)) in forward[s].iter().zip(&backward[s]).enumerate() {
                if (label >> t) & 1 == 1 {
                    p1 += f * b;
                } else {
                    p0 += f * b;
                }
            }
            let total = p1 + p0;
            if !(total > S::zero()) || !total.is_finite() {
                return None;
            }
            out.push(p1 / total);
        }
        Some(out)
    }

    fn posteriors_log<S: Real>(&self, r: &[S], alpha: S) -> Vec<S> {
        let lse = |a: S, b: S| {
            if a == S::neg_infinity() {
                return b;
            }
            if b == S::neg_infinity() {
                return a;
            }
            let m = a.max(b);
            m + (-(a - b).abs()).exp().ln_1p()
        };
        let g = |i: usize, sec: &Section, label: usize| if sec.bit(label) { alpha * r[i] } else { S::zero() };

        let origin = [S::zero()];
        let mut forward: Vec<Vec<S>> = Vec::with_capacity(self.n);
        for (i, sec) in self.sections.iter().enumerate() {
            let prev: &[S] = forward.last().map_or(&origin[..], |v| v.as_slice());
            let cur = (0..sec.width())
                .map(|label| {
                    let base = sec.pred_base[label] as usize;
                    let s = sec.leaving.iter().fold(S::neg_infinity(), |acc, &l| lse(acc, prev[base | l as usize]));
                    s + g(i, sec, label)
                })
                .collect();
            forward.push(cur);
        }
        let mut backward: Vec<Vec<S>> = vec![Vec::new(); self.n];
        backward[self.n - 1] = vec![S::zero(); self.sections[self.n - 1].width()];
        for i in (1..self.n).rev() {
            let sec = &self.sections[i];
            let mut prev = vec![S::neg_infinity(); self.sections[i - 1].width()];
            for label in 0..sec.width() {
                let v = g(i, sec, label) + backward[i][label];
                let base = sec.pred_base[label] as usize;
                for &l in &sec.leaving {
                    let p = base | l as usize;
                    prev[p] = lse(prev[p], v);
                }
            }
            backward[i - 1] = prev;
        }
        self.row_home
            .iter()
            .map(|&(s, t)| {
                let (mut l1, mut l0) = (S::neg_infinity(), S::neg_infinity());
                for (label, (&f, &b)) in forward[s].iter().zip(&backward[s]).enumerate() {
                    if (label >> t) & 1 == 1 {
                        l1 = lse(l1, f + b);
                    } else {
                        l0 = lse(l0, f + b);
                    }
                }
                // P1 = 1 / (1 + exp(l0 - l1))
                (S::one() + (l0 - l1).exp()).recip()
            })
            .collect()
    }

    pub fn ml_decode<S: Real>(&self, code: &GeneratorMatrix, r: &[S]) -> Result<DecodeOutcome<S>> {
        let (index, score) = self.viterbi(r)?;
        Ok(DecodeOutcome { index, codeword: Some(code.encode_index(index)), bdd_failure: false, metric: Metric::Score(score) })
    }

    /// Bit `b_i` decides 1 iff its posterior exceeds one half. `α = ∞`
    /// degenerates to Viterbi.
    pub fn map_decode<S: Real>(&self, code: &GeneratorMatrix, r: &[S], alpha: S) -> Result<DecodeOutcome<S>> {
        if alpha.is_infinite() && alpha > S::zero() {
            let (index, _) = self.viterbi(r)?;
            let posteriors = (0..self.k)
                .map(|i| if (index >> (self.k - 1 - i)) & 1 == 1 { S::one() } else { S::zero() })
                .collect();
            return Ok(DecodeOutcome {
                index,
                codeword: Some(code.encode_index(index)),
                bdd_failure: false,
                metric: Metric::Posteriors(posteriors),
            });
        }
        let posteriors = self.posteriors(r, alpha)?;
        let half = S::lit(0.5);
        let index = posteriors
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p > half)
            .fold(0u64, |m, (i, _)| m | 1 << (self.k - 1 - i));
        Ok(DecodeOutcome {
            index,
            codeword: Some(code.encode_index(index)),
            bdd_failure: false,
            metric: Metric::Posteriors(posteriors),
        })
    }
}
