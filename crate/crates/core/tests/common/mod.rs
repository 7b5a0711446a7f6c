//! Brute-force reference computations, independent of the library's
//! encoders, walkers and decoders. Everything here works from the raw
//! generator rows and textbook formulas.

#![allow(dead_code)]

use mldec::GeneratorMatrix;

/// `m · G` with message bit `b_1` = MSB of `index`, computed row by row.
pub fn encode(rows: &[u64], index: u64) -> u64 {
    let k = rows.len();
    (0..k).filter(|&i| (index >> (k - 1 - i)) & 1 == 1).fold(0, |acc, i| acc ^ rows[i])
}

pub fn codebook(code: &GeneratorMatrix) -> Vec<u64> {
    (0..1u64 << code.k()).map(|j| encode(code.rows(), j)).collect()
}

pub fn weight_sum(words: &[u64]) -> u64 {
    words.iter().map(|w| u64::from(w.count_ones())).sum()
}

pub fn min_distance(words: &[u64]) -> u32 {
    words.iter().filter(|&&w| w != 0).map(|w| w.count_ones()).min().unwrap()
}

/// Minimum nonzero weight over all `2^k` codewords without materializing them.
pub fn min_distance_streamed(rows: &[u64]) -> u32 {
    let k = rows.len();
    let mut best = u32::MAX;
    let mut cw = 0u64;
    for s in 1u64..1 << k {
        cw ^= rows[s.trailing_zeros() as usize];
        best = best.min(cw.count_ones());
    }
    best
}

/// `Σ_i log N(r_i; 2c_i - 1, σ²)`.
pub fn log_likelihood(r: &[f64], cw: u64, sigma: f64) -> f64 {
    r.iter()
        .enumerate()
        .map(|(i, &x)| {
            let s = if (cw >> i) & 1 == 1 { 1.0 } else { -1.0 };
            -0.5 * (2.0 * std::f64::consts::PI * sigma * sigma).ln() - (x - s).powi(2) / (2.0 * sigma * sigma)
        })
        .sum()
}

/// Codeword-wise ML by likelihood, lowest index on ties, plus the gap
/// between the best and second-best log-likelihoods.
pub fn ml(words: &[u64], r: &[f64], sigma: f64) -> (u64, f64) {
    let ll: Vec<f64> = words.iter().map(|&c| log_likelihood(r, c, sigma)).collect();
    let mut best = 0;
    for j in 1..ll.len() {
        if ll[j] > ll[best] {
            best = j;
        }
    }
    let second = ll.iter().enumerate().filter(|&(j, _)| j != best).map(|(_, &v)| v).fold(f64::NEG_INFINITY, f64::max);
    (best as u64, ll[best] - second)
}

/// Bit-wise MAP posteriors `P(b_i = 1 | r)` for `i = 1..k` with uniform priors.
pub fn map_posteriors(words: &[u64], k: usize, r: &[f64], sigma: f64) -> Vec<f64> {
    let ll: Vec<f64> = words.iter().map(|&c| log_likelihood(r, c, sigma)).collect();
    let peak = ll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let p: Vec<f64> = ll.iter().map(|v| (v - peak).exp()).collect();
    let total: f64 = p.iter().sum();
    (0..k)
        .map(|i| p.iter().enumerate().filter(|&(j, _)| (j >> (k - 1 - i)) & 1 == 1).map(|(_, v)| v).sum::<f64>() / total)
        .collect()
}

pub fn map_index(posteriors: &[f64]) -> u64 {
    let k = posteriors.len();
    posteriors.iter().enumerate().filter(|&(_, &p)| p > 0.5).fold(0, |m, (i, _)| m | 1 << (k - 1 - i))
}

/// Wilson score interval, two-sided, with the normal quantile supplied.
pub fn wilson(errors: f64, trials: f64, z: f64) -> (f64, f64) {
    let p = errors / trials;
    let denom = 1.0 + z * z / trials;
    let center = (p + z * z / (2.0 * trials)) / denom;
    let half = z / denom * (p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)).sqrt();
    ((center - half).max(0.0), center + half)
}

/// 97.5% standard normal quantile.
pub const Z_975: f64 = 1.959_963_984_540_054;

/// `Q(x)` by composite Simpson integration of the normal density over
/// `[x, x + 40]`.
pub fn q_quadrature(x: f64) -> f64 {
    let steps = 200_000;
    let h = 40.0 / steps as f64;
    let pdf = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = pdf(x) + pdf(x + 40.0);
    for i in 1..steps {
        acc += pdf(x + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// `σ = sqrt(1 / (2 R 10^(dB/10)))`.
pub fn sigma(ebn0_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt()
}

/// GF(2) polynomial remainder, bit `i` = coefficient of `x^i`.
pub fn poly_mod(mut a: u64, m: u64) -> u64 {
    let dm = 63 - m.leading_zeros();
    while a != 0 && 63 - a.leading_zeros() >= dm {
        a ^= m << (63 - a.leading_zeros() - dm);
    }
    a
}

/// Generator polynomial of the narrow-sense double-error-correcting BCH code
/// of length 31 over `x^5 + x^2 + 1`, found as the product of the minimal
/// polynomials of `α` and `α^3`. Every element outside GF(2) has a degree-5
/// minimal polynomial, so it is the only degree-5 polynomial with that root.
pub fn bch_31_21_generator() -> u64 {
    let prim = 0b100101u64;
    let mul = |a: u64, b: u64| -> u64 {
        let mut acc = 0u64;
        for i in 0..5 {
            if (b >> i) & 1 == 1 {
                acc ^= a << i;
            }
        }
        poly_mod(acc, prim)
    };
    let pow = |e: u64| -> u64 { (0..e).fold(1u64, |acc, _| mul(acc, 0b10)) };
    let eval = |poly: u64, x: u64| -> u64 {
        (0..=5).rev().fold(0u64, |acc, i| mul(acc, x) ^ ((poly >> i) & 1))
    };
    let minimal = |e: u64| -> u64 {
        (0b100000u64..0b1000000).find(|&p| eval(p, pow(e)) == 0).unwrap()
    };
    let (m1, m3) = (minimal(1), minimal(3));
    assert_ne!(m1, m3);
    let mut g = 0u64;
    for i in 0..6 {
        if (m3 >> i) & 1 == 1 {
            g ^= m1 << i;
        }
    }
    g
}

/// Bhattacharyya parameters of the `2^m` synthetic channels, by repeatedly
/// splitting every channel `z` into `(2z - z², z²)`.
pub fn bhattacharyya(m: usize, z0: f64) -> Vec<f64> {
    let mut z = vec![z0];
    for _ in 0..m {
        z = z.iter().flat_map(|&x| [2.0 * x - x * x, x * x]).collect();
    }
    z
}
