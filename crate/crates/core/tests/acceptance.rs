//! Acceptance suite. Prints one PASS/FAIL line per criterion, with per-point
//! details indented below it, and exits nonzero if any criterion fails.
//! `ACCEPTANCE_ONLY=2,5` runs a subset.

mod common;

use std::fs;
use std::time::Instant;

use mldec::decoders::{map_decode, ml_decode, oracle_map, oracle_ml, DecoderKind, Metric, Trellis};
use mldec::montecarlo::{
    prefec_point, run_sweep, wilson_half_width, EbN0Grid, SimConfig, SimRecord, Simulator, StopRule,
};
use mldec::rng::point_key;
use mldec::{build_mlnn, build_slnn, prefec_rates, AlphaMode, CodeId, GeneratorMatrix};

/// Confidence level for every Wilson interval below.
const CONFIDENCE: f64 = 0.95;
/// Near-tie threshold for score gaps and posterior distances from one half.
const NEAR_TIE: f64 = 1e-9;
/// Largest tolerated disagreement rate in the equivalence checks.
const MAX_DISAGREEMENT_RATE: f64 = 1e-4;
const SIGMAS: [f64; 3] = [0.5, 1.0, 2.0];
/// Oracles take part for codes up to this dimension.
const ORACLE_MAX_K: usize = 8;

const EQUIVALENCE_VECTORS_SMALL: u64 = 100_000;
const EQUIVALENCE_VECTORS_BCH: u64 = 1_000;

/// Bit-wise optimal BER of the Hamming (7,4) code, 0 to 7 dB in 0.5 dB steps.
const REF_BER: [(f64, f64); 15] = [
    (0.0, 0.080629),
    (0.5, 0.065229),
    (1.0, 0.05129),
    (1.5, 0.039081),
    (2.0, 0.028698),
    (2.5, 0.020006),
    (3.0, 0.013556),
    (3.5, 0.0086633),
    (4.0, 0.0052084),
    (4.5, 0.0030452),
    (5.0, 0.0015545),
    (5.5, 0.00076104),
    (6.0, 0.00034738),
    (6.5, 0.00013746),
    (7.0, 5.1604e-05),
];
const REF_BER_FRAMES: u64 = 1_000_000;
const REF_BER_REL_TOL: f64 = 0.10;
const REF_BER_WILSON_MULT: f64 = 3.0;
const REF_BER_MIN_BER: f64 = 1e-5;

/// Uncoded frame error rate over 7 hard-decided bits.
const REF_PREFEC: [(f64, f64); 2] = [(4.0, 0.27523), (10.0, 0.00253)];
const REF_PREFEC_REL_TOL: f64 = 0.02;
const PREFEC_FRAMES: u64 = 1_000_000;
const PREFEC_SIGMA_MULT: f64 = 3.0;

const FIXED_ALPHA_DB: f64 = 4.0;
const FIXED_ALPHA_FRAMES: u64 = 1_000_000;
const FIXED_ALPHA_MAX_REL_GAP: f64 = 0.05;

const BCH_POINTS_DB: [f64; 3] = [3.0, 4.0, 5.0];
const BCH_FRAMES: u64 = 100_000;
const BCH_MIN_FER: f64 = 1e-4;
const BCH_MARGIN_WILSON_MULT: f64 = 3.0;
/// Frames per point re-decoded with the exhaustive decoders.
const BCH_CROSS_CHECK_FRAMES: u64 = 20;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

fn tie_gap(scores: &[f64]) -> f64 {
    let mut s = scores.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s[0] - s[1]
}

fn posteriors(m: Metric<f64>) -> Vec<f64> {
    match m {
        Metric::Posteriors(p) => p,
        other => panic!("expected posteriors, got {other:?}"),
    }
}

fn codes() -> Vec<(CodeId, GeneratorMatrix)> {
    CodeId::ALL.iter().map(|&id| (id, id.build(0.0))).collect()
}

fn vectors_for(code: &GeneratorMatrix) -> u64 {
    if code.k() > 16 {
        EQUIVALENCE_VECTORS_BCH
    } else {
        EQUIVALENCE_VECTORS_SMALL
    }
}

fn criterion_1() -> Outcome {
    let expected = [
        (CodeId::Hamming74, 56u64, 88u64),
        (CodeId::Polar168, 2048, 3072),
        (CodeId::Bch3121, 32_505_856, 54_525_952),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (id, slnn, mlnn) in expected {
        let code = id.build(0.0);
        let s = build_slnn::<f32>(&code).edge_count().total;
        let m = build_mlnn::<f32>(&code, AlphaMode::Matched).edge_count().total;
        let words_sum = if code.k() <= 16 { common::weight_sum(&common::codebook(&code)) } else { s };
        let ok = s == slnn && m == mlnn && words_sum == slnn;
        pass &= ok;
        details.push(format!("{id}: slnn {s} (expected {slnn}), mlnn {m} (expected {mlnn})"));
    }
    Outcome { pass, summary: "edge counts of both networks for all three codes".into(), details }
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for (id, code) in codes() {
        let net = build_slnn::<f64>(&code);
        let trellis = Trellis::new(&code).unwrap();
        let words = (code.k() <= ORACLE_MAX_K).then(|| common::codebook(&code));
        let trials = vectors_for(&code);
        for (s_idx, sigma) in SIGMAS.into_iter().enumerate() {
            let key = point_key(SEED, 200 + s_idx as u64);
            let (mut disagree, mut unexcused) = (0u64, 0u64);
            for f in 0..trials {
                let (_, rx) = mldec::montecarlo::draw_frame(&code, &key, f, sigma);
                let r = &rx.samples;
                let out = net.forward_slnn(r).unwrap();
                let mut picks = vec![out.argmax_index, ml_decode(&code, r).unwrap().index, trellis.viterbi(r).unwrap().0];
                if let Some(words) = &words {
                    picks.push(common::ml(words, r, sigma).0);
                    picks.push(oracle_ml(&code, r, sigma).unwrap().index);
                }
                if picks.iter().any(|&p| p != picks[0]) {
                    disagree += 1;
                    if tie_gap(&out.scores) >= NEAR_TIE {
                        unexcused += 1;
                    }
                }
            }
            let rate = disagree as f64 / trials as f64;
            let ok = unexcused == 0 && rate < MAX_DISAGREEMENT_RATE;
            pass &= ok;
            details.push(format!(
                "{id} sigma={sigma}: {trials} vectors, {disagree} disagreements ({unexcused} unexcused){}",
                if words.is_some() { ", oracles included" } else { "" }
            ));
        }
    }
    Outcome { pass, summary: "single-label network argmax = ML decoder = likelihood oracle".into(), details }
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for (id, code) in codes() {
        let net = build_mlnn::<f64>(&code, AlphaMode::Matched);
        let trellis = Trellis::new(&code).unwrap();
        let words = (code.k() <= ORACLE_MAX_K).then(|| common::codebook(&code));
        let trials = vectors_for(&code);
        let k = code.k();
        for (s_idx, sigma) in SIGMAS.into_iter().enumerate() {
            let key = point_key(SEED, 300 + s_idx as u64);
            let (mut disagree, mut unexcused) = (0u64, 0u64);
            for f in 0..trials {
                let (_, rx) = mldec::montecarlo::draw_frame(&code, &key, f, sigma);
                let r = &rx.samples;
                let out = net.forward_mlnn(r, sigma).unwrap();
                let map = map_decode(&code, r, sigma).unwrap();
                let mut picks = vec![out.index, map.index, trellis.map_decode(&code, r, 2.0 / (sigma * sigma)).unwrap().index];
                let mut probs = vec![out.posteriors.clone(), posteriors(map.metric)];
                if let Some(words) = &words {
                    let p = common::map_posteriors(words, k, r, sigma);
                    picks.push(common::map_index(&p));
                    picks.push(oracle_map(&code, r, sigma).unwrap().index);
                    probs.push(p);
                }
                let differing = picks.iter().fold(0u64, |m, &p| m | (p ^ picks[0]));
                if differing != 0 {
                    disagree += 1;
                    let excused = (0..k)
                        .filter(|&i| (differing >> (k - 1 - i)) & 1 == 1)
                        .all(|i| probs.iter().any(|p| (p[i] - 0.5).abs() < NEAR_TIE));
                    if !excused {
                        unexcused += 1;
                    }
                }
            }
            let rate = disagree as f64 / trials as f64;
            let ok = unexcused == 0 && rate < MAX_DISAGREEMENT_RATE;
            pass &= ok;
            details.push(format!(
                "{id} sigma={sigma}: {trials} vectors, {disagree} disagreements ({unexcused} unexcused){}",
                if words.is_some() { ", oracles included" } else { "" }
            ));
        }
    }
    Outcome { pass, summary: "multi-label network bits = MAP decoder = likelihood oracle".into(), details }
}

fn sim(code: CodeId, decoders: &str, stop: StopRule) -> Simulator<f64> {
    let mut cfg = SimConfig::new(code, DecoderKind::parse_list(decoders).unwrap(), EbN0Grid::new(0.0, 1.0, 0.0).unwrap());
    cfg.stop = stop;
    cfg.seed = SEED;
    Simulator::new(&cfg).unwrap()
}

fn criterion_4() -> Outcome {
    let s = sim(CodeId::Hamming74, "mlnn", StopRule::fixed(REF_BER_FRAMES).unwrap());
    let mut pass = true;
    let mut details = Vec::new();
    for (i, &(db, reference)) in REF_BER.iter().enumerate() {
        if reference < REF_BER_MIN_BER {
            continue;
        }
        let rec = &s.run_point(400 + i as u64, db).unwrap()[0];
        let hw = wilson_half_width(rec.bit_errors, rec.frames * 4, CONFIDENCE).unwrap();
        let tol = (REF_BER_REL_TOL * reference).max(REF_BER_WILSON_MULT * hw);
        let ok = (rec.ber - reference).abs() <= tol;
        pass &= ok;
        details.push(format!(
            "{db:>4} dB: ber {:.6e} vs {reference:.6e}, |diff| {:.2e} <= {tol:.2e} {} ({} frames)",
            rec.ber,
            (rec.ber - reference).abs(),
            if ok { "ok" } else { "VIOLATED" },
            rec.frames
        ));
    }
    Outcome { pass, summary: "Hamming (7,4) multi-label network BER against the reference curve".into(), details }
}

fn criterion_5() -> Outcome {
    let rate = 4.0 / 7.0;
    let mut pass = true;
    let mut details = Vec::new();
    for (i, &(db, reference)) in REF_PREFEC.iter().enumerate() {
        let sigma = common::sigma(db, rate);
        let analytic = prefec_rates(sigma, 7).unwrap().fer;
        let oracle = 1.0 - (1.0 - common::q_quadrature(1.0 / sigma)).powi(7);
        let rel = (analytic - reference).abs() / reference;
        let counts = prefec_point(7, rate, db, PREFEC_FRAMES, SEED, 500 + i as u64).unwrap();
        let mc = counts.frame_errors as f64 / counts.frames as f64;
        let sd = (analytic * (1.0 - analytic) / counts.frames as f64).sqrt();
        let ok = rel <= REF_PREFEC_REL_TOL && (mc - analytic).abs() <= PREFEC_SIGMA_MULT * sd && (oracle / analytic - 1.0).abs() < 1e-9;
        pass &= ok;
        details.push(format!(
            "{db} dB: analytic {analytic:.5} vs reference {reference} (rel {rel:.4}), Monte Carlo {mc:.5} ({:.2} sd)",
            (mc - analytic) / sd
        ));
    }
    Outcome { pass, summary: "uncoded 7-bit frame error rate: closed form, reference values, Monte Carlo".into(), details }
}

fn criterion_6() -> Outcome {
    let token = format!("mlnn,mlnn@{FIXED_ALPHA_DB}");
    let s = sim(CodeId::Hamming74, &token, StopRule::fixed(FIXED_ALPHA_FRAMES).unwrap());
    let mut pass = true;
    let mut details = Vec::new();
    let mut worst = 0.0f64;
    for (i, db) in EbN0Grid::new(0.0, 0.5, 9.0).unwrap().points().into_iter().enumerate() {
        let recs = s.run_point(600 + i as u64, db).unwrap();
        let (matched, fixed) = (&recs[0], &recs[1]);
        let gap = if matched.bit_errors == 0 && fixed.bit_errors == 0 {
            0.0
        } else {
            (fixed.ber - matched.ber).abs() / matched.ber.max(fixed.ber)
        };
        worst = worst.max(gap);
        let ok = gap <= FIXED_ALPHA_MAX_REL_GAP;
        pass &= ok;
        details.push(format!(
            "{db:>4} dB: matched {} vs fixed {} bit errors, relative gap {gap:.4} {}",
            matched.bit_errors,
            fixed.bit_errors,
            if ok { "ok" } else { "VIOLATED" }
        ));
    }
    Outcome {
        pass,
        summary: format!("softmax scale frozen at {FIXED_ALPHA_DB} dB vs matched, worst relative BER gap {worst:.4}"),
        details,
    }
}

fn criterion_7() -> Outcome {
    let s = sim(CodeId::Bch3121, "ml,map,bdd", StopRule::fixed(BCH_FRAMES).unwrap());
    let code = s.code().clone();
    let mut pass = true;
    let mut details = Vec::new();
    for (i, &db) in BCH_POINTS_DB.iter().enumerate() {
        let snr_index = 700 + i as u64;
        let recs = s.run_point(snr_index, db).unwrap();
        let (ml, map, bdd) = (&recs[0], &recs[1], &recs[2]);
        let frames = ml.frames;
        let k_bits = frames * code.k() as u64;
        let fer_margin = bdd.fer - ml.fer;
        let ber_margin = bdd.ber - map.ber;
        let fer_need = BCH_MARGIN_WILSON_MULT
            * (wilson_half_width(ml.frame_errors, frames, CONFIDENCE).unwrap()
                + wilson_half_width(bdd.frame_errors, frames, CONFIDENCE).unwrap());
        let ber_need = BCH_MARGIN_WILSON_MULT
            * (wilson_half_width(map.bit_errors, k_bits, CONFIDENCE).unwrap()
                + wilson_half_width(bdd.bit_errors, k_bits, CONFIDENCE).unwrap());
        let in_scope = ml.fer >= BCH_MIN_FER;
        let strict = db >= 4.0;
        let ok = !in_scope
            || (fer_margin >= 0.0 && ber_margin >= 0.0 && (!strict || (fer_margin > fer_need && ber_margin > ber_need)));
        pass &= ok;
        details.push(format!(
            "{db} dB ({frames} frames): FER ml {:.4e} bdd {:.4e} margin {fer_margin:.3e}{}; BER map {:.4e} bdd {:.4e} margin {ber_margin:.3e}{}{}",
            ml.fer,
            bdd.fer,
            if strict { format!(" (need > {fer_need:.3e})") } else { String::new() },
            map.ber,
            bdd.ber,
            if strict { format!(" (need > {ber_need:.3e})") } else { String::new() },
            if in_scope { "" } else { " [ML FER below scope, not judged]" }
        ));

        // the trellis decisions used above agree with the exhaustive decoders
        let key = point_key(SEED, snr_index);
        let sigma: f64 = mldec::ebn0_to_sigma(db, code.rate()).unwrap();
        let trellis = Trellis::new(&code).unwrap();
        let mut mismatches = 0;
        for f in 0..BCH_CROSS_CHECK_FRAMES {
            let (_, rx) = mldec::montecarlo::draw_frame(&code, &key, f, sigma);
            let r = &rx.samples;
            let ex_ml = ml_decode(&code, r).unwrap().index;
            let ex_map = map_decode(&code, r, sigma).unwrap();
            let tr_map = trellis.map_decode(&code, r, 2.0 / (sigma * sigma)).unwrap();
            if trellis.viterbi(r).unwrap().0 != ex_ml {
                mismatches += 1;
            }
            let diff = tr_map.index ^ ex_map.index;
            let p = posteriors(ex_map.metric);
            let k = code.k();
            if (0..k).any(|b| (diff >> (k - 1 - b)) & 1 == 1 && (p[b] - 0.5).abs() >= NEAR_TIE) {
                mismatches += 1;
            }
        }
        pass &= mismatches == 0;
        details.push(format!("    exhaustive cross-check on {BCH_CROSS_CHECK_FRAMES} frames: {mismatches} mismatches"));
    }
    Outcome { pass, summary: "BCH (31,21): ML and MAP dominate bounded distance decoding on paired noise".into(), details }
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SimConfig::new(
        CodeId::Polar168,
        DecoderKind::parse_list("ml,map,slnn,mlnn@4,bdd").unwrap(),
        EbN0Grid::new(0.0, 1.0, 4.0).unwrap(),
    );
    cfg.stop = StopRule::new(50, 50_000).unwrap();
    cfg.seed = SEED;
    let strip = |v: &[SimRecord]| -> Vec<(String, u64, u64, u64)> {
        v.iter().map(|r| (r.decoder.clone(), r.frames, r.frame_errors, r.bit_errors)).collect()
    };
    cfg.workers = 1;
    let a = run_sweep(&cfg, Some(&dir.path().join("a"))).unwrap();
    cfg.workers = 4;
    let b = run_sweep(&cfg, Some(&dir.path().join("b"))).unwrap();
    let mut same_files = true;
    for entry in fs::read_dir(dir.path().join("a")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "dat") {
            let other = dir.path().join("b").join(path.file_name().unwrap());
            same_files &= fs::read(&path).unwrap() == fs::read(other).unwrap();
        }
    }
    let same_counts = strip(&a.records) == strip(&b.records);
    Outcome {
        pass: same_counts && same_files && a.io_errors.is_empty() && b.io_errors.is_empty(),
        summary: "rerun with the same seed (1 and 4 workers) reproduces counts and .dat files".into(),
        details: vec![format!("{} records, counts identical: {same_counts}, .dat byte-identical: {same_files}", a.records.len())],
    }
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let criteria: [(usize, fn() -> Outcome); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut failed = Vec::new();
    for (n, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let started = Instant::now();
        let outcome = run();
        println!(
            "criterion {n} {} {} [{:.1} s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.summary,
            started.elapsed().as_secs_f64()
        );
        for d in &outcome.details {
            println!("    {d}");
        }
        if !outcome.pass {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
