//! Agreement checks between the network forward passes, the fast decoders
//! and the brute-force oracles, plus catalog expectations for the built-in
//! codes.

use serde::Serialize;

use crate::channel::ReceivedVector;
use crate::decoders::{map_decode, ml_decode, oracle_map, oracle_ml, Metric, Trellis};
use crate::error::Result;
use crate::gf2::{code_stats, CodeId, GeneratorMatrix};
use crate::montecarlo::draw_frame;
use crate::network::{build_mlnn, build_slnn, AlphaMode};
use crate::rng::point_key;

/// Score gaps and posterior distances from one half below this are ties.
pub const NEAR_TIE: f64 = 1e-9;

/// Largest `k` at which the oracles take part in agreement checks.
pub const ORACLE_CHECK_MAX_K: usize = 8;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AgreementReport {
    pub trials: u64,
    /// Vectors on which at least two decision rules differ.
    pub disagreements: u64,
    /// Disagreements not explained by a near-tie.
    pub unexcused: u64,
    pub oracle_checked: bool,
}

impl AgreementReport {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.disagreements as f64 / self.trials as f64
        }
    }

    /// No unexcused disagreement and a disagreement rate below `max_rate`.
    pub fn passes(&self, max_rate: f64) -> bool {
        self.unexcused == 0 && self.rate() < max_rate
    }
}

fn top_two_gap(scores: &[f64]) -> f64 {
    let (mut a, mut b) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &s in scores {
        if s > a {
            b = a;
            a = s;
        } else if s > b {
            b = s;
        }
    }
    a - b
}

fn received_vectors(code: &GeneratorMatrix, sigma: f64, trials: u64, seed: u64, stream: u64) -> impl Iterator<Item = ReceivedVector<f64>> + '_ {
    let key = point_key(seed, stream);
    (0..trials).map(move |f| draw_frame(code, &key, f, sigma).1)
}

/// Network argmax vs Gray-walk ML vs trellis Viterbi (and the likelihood
/// oracle for small `k`) on noisy codewords at `sigma`.
pub fn ml_agreement(code: &GeneratorMatrix, sigma: f64, trials: u64, seed: u64) -> Result<AgreementReport> {
    let net = build_slnn::<f64>(code);
    let trellis = Trellis::new(code)?;
    let oracle = code.k() <= ORACLE_CHECK_MAX_K;
    let mut report = AgreementReport { oracle_checked: oracle, ..Default::default() };
    for rx in received_vectors(code, sigma, trials, seed, 0x4d4c) {
        let r = &rx.samples;
        let slnn = net.forward_slnn(r)?;
        let mut decisions = vec![slnn.argmax_index, ml_decode(code, r)?.index, trellis.viterbi(r)?.0];
        if oracle {
            decisions.push(oracle_ml(code, r, sigma)?.index);
        }
        report.trials += 1;
        if decisions.iter().any(|&d| d != decisions[0]) {
            report.disagreements += 1;
            if top_two_gap(&slnn.scores) >= NEAR_TIE {
                report.unexcused += 1;
            }
        }
    }
    Ok(report)
}

/// Multi-label network vs streaming MAP vs trellis BCJR (and the likelihood
/// oracle for small `k`), bit by bit.
pub fn map_agreement(code: &GeneratorMatrix, sigma: f64, trials: u64, seed: u64) -> Result<AgreementReport> {
    let net = build_mlnn::<f64>(code, AlphaMode::Matched);
    let trellis = Trellis::new(code)?;
    let alpha = 2.0 / (sigma * sigma);
    let k = code.k();
    let oracle = k <= ORACLE_CHECK_MAX_K;
    let mut report = AgreementReport { oracle_checked: oracle, ..Default::default() };
    for rx in received_vectors(code, sigma, trials, seed, 0x4d4150) {
        let r = &rx.samples;
        let mlnn = net.forward_mlnn(r, sigma)?;
        let map = map_decode(code, r, sigma)?;
        let mut posteriors = vec![mlnn.posteriors.clone()];
        let mut decisions = vec![mlnn.index, map.index, trellis.map_decode(code, r, alpha)?.index];
        if let Metric::Posteriors(p) = map.metric {
            posteriors.push(p);
        }
        if oracle {
            let o = oracle_map(code, r, sigma)?;
            decisions.push(o.index);
            if let Metric::Posteriors(p) = o.metric {
                posteriors.push(p);
            }
        }
        report.trials += 1;
        let differing = decisions.iter().fold(0u64, |m, &d| m | (d ^ decisions[0]));
        if differing != 0 {
            report.disagreements += 1;
            let excused = (0..k).filter(|&i| (differing >> (k - 1 - i)) & 1 == 1).all(|i| {
                posteriors.iter().any(|p| (p[i] - 0.5).abs() < NEAR_TIE)
            });
            if !excused {
                report.unexcused += 1;
            }
        }
    }
    Ok(report)
}

/// Published properties of a built-in code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub n: usize,
    pub k: usize,
    pub min_distance: u32,
    /// Single-label network edges (codebook weight sum).
    pub slnn_edges: u64,
    /// Multi-label network edges.
    pub mlnn_edges: u64,
}

pub fn catalog(code: CodeId) -> CatalogEntry {
    match code {
        CodeId::Hamming74 => CatalogEntry { n: 7, k: 4, min_distance: 3, slnn_edges: 56, mlnn_edges: 88 },
        CodeId::Polar168 => CatalogEntry { n: 16, k: 8, min_distance: 4, slnn_edges: 2048, mlnn_edges: 3072 },
        CodeId::Bch3121 => {
            CatalogEntry { n: 31, k: 21, min_distance: 5, slnn_edges: 32_505_856, mlnn_edges: 54_525_952 }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogCheck {
    pub property: &'static str,
    pub expected: u64,
    pub actual: u64,
}

impl CatalogCheck {
    pub fn ok(&self) -> bool {
        self.expected == self.actual
    }
}

/// Compares a generator matrix against the catalog entry of `id`.
pub fn check_catalog(code: &GeneratorMatrix, id: CodeId) -> Result<Vec<CatalogCheck>> {
    let want = catalog(id);
    let stats = code_stats(code)?;
    let k = code.k() as u64;
    let mlnn_edges = stats.weight_sum + k * (1u64 << (k - 1));
    Ok(vec![
        CatalogCheck { property: "n", expected: want.n as u64, actual: code.n() as u64 },
        CatalogCheck { property: "k", expected: want.k as u64, actual: k },
        CatalogCheck { property: "min_distance", expected: u64::from(want.min_distance), actual: u64::from(stats.min_distance) },
        CatalogCheck { property: "slnn_edges", expected: want.slnn_edges, actual: stats.weight_sum },
        CatalogCheck { property: "mlnn_edges", expected: want.mlnn_edges, actual: mlnn_edges },
    ])
}
