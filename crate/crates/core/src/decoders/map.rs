use super::ml::{ml_decode_scored, GrayCorrelator};
use super::{DecodeOutcome, Metric};
use crate::error::{Error, Result};
use crate::gf2::GeneratorMatrix;
use crate::network::LabelBins;
use crate::scalar::Real;

/// Terms below `exp(-CUTOFF)` times the running maximum are skipped; the
/// aggregate relative error is below `2^k · exp(-CUTOFF)`.
const CUTOFF: f64 = 60.0;

/// Bit-wise MAP with the matched scale `α = 2/σ²`.
pub fn map_decode<S: Real>(code: &GeneratorMatrix, r: &[S], sigma: S) -> Result<DecodeOutcome<S>> {
    if sigma.is_nan() || sigma < S::zero() {
        return Err(Error::InvalidSigma(sigma.as_f64()));
    }
    map_decode_with_alpha(code, r, S::lit(2.0) / (sigma * sigma))
}

/// Bit `i` compares `Σ_{c: b_i=1} exp(α r·c)` with the `b_i = 0` sum. The
/// sums are accumulated in one Gray-code pass with online max rescaling and
/// compared in the log domain; ties decide 0. `α = ∞` degenerates to ML.
pub fn map_decode_with_alpha<S: Real>(code: &GeneratorMatrix, r: &[S], alpha: S) -> Result<DecodeOutcome<S>> {
    if alpha.is_nan() || alpha < S::zero() {
        return Err(Error::InvalidConfig(format!("softmax scale must be nonnegative, got {alpha}")));
    }
    let k = code.k();
    if alpha.is_infinite() {
        let (index, codeword, _) = ml_decode_scored(code, r)?;
        let posteriors = (0..k).map(|i| if (index >> (k - 1 - i)) & 1 == 1 { S::one() } else { S::zero() }).collect();
        return Ok(DecodeOutcome { index, codeword: Some(codeword), bdd_failure: false, metric: Metric::Posteriors(posteriors) });
    }
    let walk = GrayCorrelator::new(code, r)?;
    let cutoff = S::lit(-CUTOFF);
    let mut bins = LabelBins::new(k);
    let mut running_max = S::neg_infinity();
    walk.for_each(|index, _, score| {
        let mut x = alpha * (score - running_max);
        if x > S::zero() {
            if running_max.is_finite() {
                bins.scale((-x).exp());
            }
            running_max = score;
            x = S::zero();
        }
        if x >= cutoff {
            bins.add(index, x.exp());
        }
    });
    let mut index = 0u64;
    let mut posteriors = Vec::with_capacity(k);
    for (i, (ones, zeros)) in bins.per_message_bit().into_iter().enumerate() {
        let llr = ones.ln() - zeros.ln();
        if llr > S::zero() {
            index |= 1 << (k - 1 - i);
        }
        posteriors.push(ones / (ones + zeros));
    }
    Ok(DecodeOutcome {
        index,
        codeword: Some(code.encode_index(index)),
        bdd_failure: false,
        metric: Metric::Posteriors(posteriors),
    })
}
