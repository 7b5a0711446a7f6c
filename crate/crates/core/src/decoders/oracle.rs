//! Reference decoders that evaluate the Gaussian likelihood literally.
//! Test scale only.

use super::{DecodeOutcome, Metric};
use crate::error::{Error, Result};
use crate::gf2::GeneratorMatrix;
use crate::scalar::Real;

pub const ORACLE_MAX_K: usize = 12;

/// `log p(r | s) = Σ_i [ -½ log(2πσ²) - (r_i - s_i)² / (2σ²) ]` with
/// `s_i = 2c_i - 1`.
fn log_likelihood<S: Real>(r: &[S], codeword: u64, sigma: S) -> S {
    let var = sigma * sigma;
    let norm = S::lit(-0.5) * (S::lit(2.0 * std::f64::consts::PI) * var).ln();
    r.iter()
        .enumerate()
        .map(|(i, &ri)| {
            let s = if (codeword >> i) & 1 == 1 { S::one() } else { -S::one() };
            let d = ri - s;
            norm - d * d / (S::lit(2.0) * var)
        })
        .sum()
}

fn check<S: Real>(code: &GeneratorMatrix, r: &[S], sigma: S) -> Result<()> {
    if code.k() > ORACLE_MAX_K {
        return Err(Error::TooLarge { k: code.k(), limit: ORACLE_MAX_K });
    }
    if r.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), got: r.len() });
    }
    if !(sigma > S::zero()) || !sigma.is_finite() {
        return Err(Error::InvalidSigma(sigma.as_f64()));
    }
    Ok(())
}

fn all_log_likelihoods<S: Real>(code: &GeneratorMatrix, r: &[S], sigma: S) -> Vec<S> {
    code.stream().map(|(_, cw)| log_likelihood(r, cw, sigma)).collect()
}

/// `argmax_s p(r | s)` over the full codebook; ties to the lowest index.
pub fn oracle_ml<S: Real>(code: &GeneratorMatrix, r: &[S], sigma: S) -> Result<DecodeOutcome<S>> {
    check(code, r, sigma)?;
    let ll = all_log_likelihoods(code, r, sigma);
    let mut best = 0usize;
    for (j, &v) in ll.iter().enumerate() {
        if v > ll[best] {
            best = j;
        }
    }
    let index = best as u64;
    Ok(DecodeOutcome {
        index,
        codeword: Some(code.encode_index(index)),
        bdd_failure: false,
        metric: Metric::LogLikelihood(ll[best]),
    })
}

/// Bit `i` is 1 iff `Σ_{c: b_i=1} p(r|c) > Σ_{c: b_i=0} p(r|c)`. Every
/// likelihood is divided by the largest one before summing, which leaves
/// each comparison unchanged.
pub fn oracle_map<S: Real>(code: &GeneratorMatrix, r: &[S], sigma: S) -> Result<DecodeOutcome<S>> {
    check(code, r, sigma)?;
    let k = code.k();
    let ll = all_log_likelihoods(code, r, sigma);
    let peak = ll.iter().copied().fold(S::neg_infinity(), S::max);
    let lik: Vec<S> = ll.iter().map(|&v| (v - peak).exp()).collect();
    let mut index = 0u64;
    let mut posteriors = Vec::with_capacity(k);
    for i in 0..k {
        let bit = k - 1 - i;
        let (mut p1, mut p0) = (S::zero(), S::zero());
        for (j, &l) in lik.iter().enumerate() {
            if (j >> bit) & 1 == 1 {
                p1 += l;
            } else {
                p0 += l;
            }
        }
        if p1 > p0 {
            index |= 1 << bit;
        }
        posteriors.push(p1 / (p1 + p0));
    }
    Ok(DecodeOutcome {
        index,
        codeword: Some(code.encode_index(index)),
        bdd_failure: false,
        metric: Metric::Posteriors(posteriors),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{bch_31_21, hamming_7_4};

    #[test]
    fn symmetric_input_ties_to_zero() {
        let out = oracle_map(&hamming_7_4(), &[0.0f64; 7], 1.0).unwrap();
        assert_eq!(out.index, 0);
        assert_eq!(out.metric, Metric::Posteriors(vec![0.5; 4]));
        assert_eq!(oracle_ml(&hamming_7_4(), &[0.0f64; 7], 1.0).unwrap().index, 0);
    }

    #[test]
    fn refuses_large_codes() {
        let r = vec![0.0f64; 31];
        assert_eq!(oracle_ml(&bch_31_21(), &r, 1.0).unwrap_err(), Error::TooLarge { k: 21, limit: 12 });
        assert!(oracle_map(&hamming_7_4(), &[0.0f64; 7], 0.0).is_err());
    }
}
