//! BPSK over AWGN: `s_i = 2c_i - 1`, `r = s + w`, `w_i ~ N(0, σ²)` with
//! `σ² = 1 / (2 R · 10^(Eb/N0 / 10))`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Noise level at a given Eb/N0 and code rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams<S> {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma: S,
}

impl<S: Real> ChannelParams<S> {
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        Ok(Self { ebn0_db, rate, sigma: ebn0_to_sigma(ebn0_db, rate)? })
    }

    pub fn variance(&self) -> S {
        self.sigma * self.sigma
    }

    /// Matched softmax scale `2 / σ²`.
    pub fn matched_alpha(&self) -> S {
        S::lit(2.0) / self.variance()
    }
}

/// A received frame together with the noise level it was generated at.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedVector<S> {
    pub samples: Vec<S>,
    pub sigma: S,
}

impl<S: Real> ReceivedVector<S> {
    pub fn new(samples: Vec<S>, sigma: S) -> Self {
        debug_assert!(samples.iter().all(|x| x.is_finite()));
        Self { samples, sigma }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn hard_decision(&self) -> u64 {
        hard_decision(&self.samples)
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidRate(rate))
    }
}

/// `σ = sqrt(1 / (2 R 10^(Eb/N0/10)))`; `+∞` dB gives `σ = 0`.
pub fn ebn0_to_sigma<S: Real>(ebn0_db: f64, rate: f64) -> Result<S> {
    check_rate(rate)?;
    if ebn0_db == f64::INFINITY {
        return Ok(S::zero());
    }
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    Ok(S::lit((1.0 / (2.0 * rate * ebn0)).sqrt()))
}

/// Inverse of [`ebn0_to_sigma`].
pub fn sigma_to_ebn0<S: Real>(sigma: S, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    let s = sigma.as_f64();
    if s.is_nan() || s < 0.0 {
        return Err(Error::InvalidSigma(s));
    }
    Ok(10.0 * (1.0 / (2.0 * rate * s * s)).log10())
}

/// Bit 0 ↦ −1, bit 1 ↦ +1.
pub fn bpsk_map<S: Real>(bits: &[u8]) -> Vec<S> {
    bits.iter().map(|&b| if b & 1 == 1 { S::one() } else { -S::one() }).collect()
}

/// [`bpsk_map`] on the low `n` bits of a packed word.
pub fn bpsk_word<S: Real>(word: u64, n: usize) -> Vec<S> {
    (0..n)
        .map(|i| if (word >> i) & 1 == 1 { S::one() } else { -S::one() })
        .collect()
}

/// `r_i = s_i + σ·z_i` with `z_i` standard normal draws from `rng`
/// (ziggurat sampler of `rand_distr`, consumed in position order).
pub fn transmit<S: Real, R: Rng + ?Sized>(symbols: &[S], sigma: S, rng: &mut R) -> ReceivedVector<S> {
    let samples = symbols
        .iter()
        .map(|&s| {
            let z: f64 = rng.sample(StandardNormal);
            s + sigma * S::lit(z)
        })
        .collect();
    ReceivedVector { samples, sigma }
}

/// Bit `i` is set iff `r_i > 0`; an exact zero decides 0.
pub fn hard_decision<S: Real>(r: &[S]) -> u64 {
    debug_assert!(r.len() <= 64);
    r.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &x)| if x > S::zero() { acc | (1u64 << i) } else { acc })
}

/// Gaussian tail probability `Q(x) = erfc(x / √2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrefecRates {
    pub ber: f64,
    pub fer: f64,
}

/// Uncoded hard-decision error rates: `p = Q(1/σ)`, `FER = 1 - (1 - p)^n`.
pub fn prefec_rates(sigma: f64, n: usize) -> Result<PrefecRates> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidSigma(sigma));
    }
    let ber = q_function(1.0 / sigma);
    let fer = -((n as f64) * (-ber).ln_1p()).exp_m1();
    Ok(PrefecRates { ber, fer })
}
