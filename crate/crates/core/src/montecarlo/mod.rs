//! Monte Carlo FER/BER sweeps with paired noise across decoders.

mod stats;

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use stats::{binomial_sigma, format_g, wilson_half_width, wilson_interval};

use crate::channel::{bpsk_word, ebn0_to_sigma, transmit, ReceivedVector};
use crate::decoders::{AlphaSpec, DecoderKind, PreparedDecoder};
use crate::error::{Error, Result};
use crate::gf2::{low_mask, CodeId, CodeMeta, GeneratorMatrix, DEFAULT_POLAR_DESIGN_EBN0_DB};
use crate::rng::{frame_rng, point_key};
use crate::scalar::Real;

/// Inclusive grid `start, start + step, ..., stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EbN0Grid {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

impl EbN0Grid {
    pub fn new(start: f64, step: f64, stop: f64) -> Result<Self> {
        if !(start.is_finite() && step.is_finite() && stop.is_finite()) || step <= 0.0 || stop < start {
            return Err(Error::InvalidConfig(format!("bad Eb/N0 grid {start}:{step}:{stop}")));
        }
        Ok(Self { start, step, stop })
    }

    /// Parses `start:step:stop`, or a single value.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad Eb/N0 grid `{s}`"))))
            .collect::<Result<_>>()?;
        match parts[..] {
            [x] => Self::new(x, 1.0, x),
            [a, b, c] => Self::new(a, b, c),
            _ => Err(Error::Parse(format!("Eb/N0 grid must be start:step:stop, got `{s}`"))),
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Stop once every decoder has `min_frame_errors` frame errors, or after
/// `max_frames` frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StopRule {
    pub min_frame_errors: u64,
    pub max_frames: u64,
}

impl StopRule {
    pub fn new(min_frame_errors: u64, max_frames: u64) -> Result<Self> {
        if min_frame_errors == 0 || max_frames < min_frame_errors {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= min_frame_errors <= max_frames, got {min_frame_errors} and {max_frames}"
            )));
        }
        Ok(Self { min_frame_errors, max_frames })
    }

    /// Exactly `frames` frames.
    pub fn fixed(frames: u64) -> Result<Self> {
        Self::new(frames, frames)
    }
}

impl Default for StopRule {
    fn default() -> Self {
        Self { min_frame_errors: 100, max_frames: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub code: CodeId,
    pub polar_design_ebn0_db: f64,
    pub decoders: Vec<DecoderKind>,
    pub grid: EbN0Grid,
    pub stop: StopRule,
    pub seed: u64,
    /// Scale used by `mlnn` tokens that carry no `@<dB>` suffix.
    pub alpha: AlphaSpec,
    /// Threads; 0 lets the pool decide. Results do not depend on it.
    pub workers: usize,
}

impl SimConfig {
    pub fn new(code: CodeId, decoders: Vec<DecoderKind>, grid: EbN0Grid) -> Self {
        Self {
            code,
            polar_design_ebn0_db: DEFAULT_POLAR_DESIGN_EBN0_DB,
            decoders,
            grid,
            stop: StopRule::default(),
            seed: 1,
            alpha: AlphaSpec::Matched,
            workers: 0,
        }
    }

    /// Decoder set with the configured scale applied to plain `mlnn`.
    pub fn effective_decoders(&self) -> Vec<DecoderKind> {
        self.decoders
            .iter()
            .map(|&d| match d {
                DecoderKind::Mlnn(AlphaSpec::Matched) => DecoderKind::Mlnn(self.alpha),
                other => other,
            })
            .collect()
    }

    pub fn build_code(&self) -> GeneratorMatrix {
        self.code.build(self.polar_design_ebn0_db)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRecord {
    pub code: String,
    pub decoder: String,
    pub ebn0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub fer: f64,
    pub ber: f64,
    pub seed: u64,
    pub elapsed_seconds: f64,
}

impl SimRecord {
    /// One `.dat` line: `ebn0_db fer ber frames frame_errors bit_errors`.
    pub fn dat_line(&self) -> String {
        format!(
            "{} {} {} {} {} {}",
            format_g(self.ebn0_db),
            format_g(self.fer),
            format_g(self.ber),
            self.frames,
            self.frame_errors,
            self.bit_errors
        )
    }
}

/// One transmitted frame: message index and received vector.
pub fn draw_frame<S: Real>(code: &GeneratorMatrix, key: &[u8; 32], frame_index: u64, sigma: S) -> (u64, ReceivedVector<S>) {
    let mut rng = frame_rng(key, frame_index);
    let message = rng.random_range(0..code.size());
    let symbols = bpsk_word::<S>(code.encode_index(message), code.n());
    (message, transmit(&symbols, sigma, &mut rng))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    frame_errors: u64,
    bit_errors: u64,
}

const FIRST_ROUND: u64 = 1 << 10;
const MAX_ROUND: u64 = 1 << 18;
const CHUNK: u64 = 1 << 8;

/// Round sizes depend only on the stop rule, so the stopping point is the
/// same for any number of workers.
fn next_round(done: u64, max_frames: u64) -> u64 {
    let size = if done == 0 { FIRST_ROUND } else { done.min(MAX_ROUND) };
    size.min(max_frames - done)
}

/// A code with its decoders prepared once, reused across SNR points.
pub struct Simulator<S> {
    code: GeneratorMatrix,
    decoders: Vec<PreparedDecoder<S>>,
    stop: StopRule,
    seed: u64,
    pool: rayon::ThreadPool,
}

impl<S: Real> Simulator<S> {
    pub fn new(config: &SimConfig) -> Result<Self> {
        let code = config.build_code();
        let decoders =
            config.effective_decoders().iter().map(|d| d.prepare(&code)).collect::<Result<Vec<_>>>()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(Self { code, decoders, stop: config.stop, seed: config.seed, pool })
    }

    pub fn code(&self) -> &GeneratorMatrix {
        &self.code
    }

    pub fn decoders(&self) -> &[PreparedDecoder<S>] {
        &self.decoders
    }

    fn run_frames(&self, key: &[u8; 32], sigma: S, range: std::ops::Range<u64>) -> Result<Vec<Counts>> {
        let chunks: Vec<u64> = (range.start..range.end).step_by(CHUNK as usize).collect();
        let parts: Vec<Result<Vec<Counts>>> = self.pool.install(|| {
            chunks
                .par_iter()
                .map(|&start| {
                    let mut counts = vec![Counts::default(); self.decoders.len()];
                    for f in start..(start + CHUNK).min(range.end) {
                        let (message, rx) = draw_frame(&self.code, key, f, sigma);
                        for (dec, c) in self.decoders.iter().zip(counts.iter_mut()) {
                            let out = dec.decode(&rx)?;
                            let wrong = out.index ^ message;
                            if wrong != 0 || out.bdd_failure {
                                c.frame_errors += 1;
                            }
                            c.bit_errors += u64::from((wrong & low_mask(self.code.k())).count_ones());
                        }
                    }
                    Ok(counts)
                })
                .collect()
        });
        let mut total = vec![Counts::default(); self.decoders.len()];
        for part in parts {
            for (t, c) in total.iter_mut().zip(part?) {
                t.frame_errors += c.frame_errors;
                t.bit_errors += c.bit_errors;
            }
        }
        Ok(total)
    }

    /// All decoders on the same noise realizations at one SNR point.
    pub fn run_point(&self, snr_index: u64, ebn0_db: f64) -> Result<Vec<SimRecord>> {
        let started = Instant::now();
        let sigma: S = ebn0_to_sigma(ebn0_db, self.code.rate())?;
        let key = point_key(self.seed, snr_index);
        let mut totals = vec![Counts::default(); self.decoders.len()];
        let mut frames = 0u64;
        while frames < self.stop.max_frames
            && totals.iter().any(|c| c.frame_errors < self.stop.min_frame_errors)
        {
            let size = next_round(frames, self.stop.max_frames);
            let round = self.run_frames(&key, sigma, frames..frames + size)?;
            for (t, c) in totals.iter_mut().zip(round) {
                t.frame_errors += c.frame_errors;
                t.bit_errors += c.bit_errors;
            }
            frames += size;
        }
        let elapsed_seconds = started.elapsed().as_secs_f64();
        let k = self.code.k() as f64;
        Ok(self
            .decoders
            .iter()
            .zip(totals)
            .map(|(dec, c)| SimRecord {
                code: self.code.name().to_string(),
                decoder: dec.kind().to_string(),
                ebn0_db,
                frames,
                frame_errors: c.frame_errors,
                bit_errors: c.bit_errors,
                fer: c.frame_errors as f64 / frames as f64,
                ber: c.bit_errors as f64 / (frames as f64 * k),
                seed: self.seed,
                elapsed_seconds,
            })
            .collect())
    }
}

/// [`Simulator::run_point`] for a one-off configuration.
pub fn run_point(config: &SimConfig, snr_index: u64, ebn0_db: f64) -> Result<Vec<SimRecord>> {
    Simulator::<f64>::new(config)?.run_point(snr_index, ebn0_db)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepReport {
    /// Sorted by decoder, then Eb/N0.
    pub records: Vec<SimRecord>,
    pub io_errors: Vec<String>,
}

#[derive(Serialize)]
struct ManifestConfig {
    code: String,
    decoders: Vec<String>,
    grid: EbN0Grid,
    stop: StopRule,
    seed: u64,
    alpha: String,
}

#[derive(Serialize)]
struct PointSeed {
    snr_index: u64,
    ebn0_db: f64,
    key: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: ManifestConfig,
    code: &'a CodeMeta,
    seeds: Vec<PointSeed>,
    versions: serde_json::Value,
    records: &'a [SimRecord],
}

/// `.dat` file for one decoder.
pub fn dat_path(dir: &Path, code: CodeId, decoder: &str) -> PathBuf {
    dir.join(format!("{}_{}.dat", code.as_str(), decoder.replace('@', "_at_")))
}

const DAT_HEADER: &str = "# ebn0_db fer ber frames frame_errors bit_errors";

fn append_line(path: &Path, line: &str) -> std::io::Result<()> {
    let mut f = OpenOptions::new().append(true).create(true).open(path)?;
    writeln!(f, "{line}")
}

/// Runs every grid point in order. With an output directory, each record is
/// appended to its decoder's `.dat` file as soon as the point finishes and a
/// `manifest.json` is written at the end. I/O failures are collected and the
/// sweep continues; decoding errors abort it.
pub fn run_sweep(config: &SimConfig, out_dir: Option<&Path>) -> Result<SweepReport> {
    let mut report = SweepReport::default();
    if config.decoders.is_empty() {
        return Ok(report);
    }
    let sim = Simulator::<f64>::new(config)?;
    let names: Vec<String> = sim.decoders().iter().map(|d| d.kind().to_string()).collect();
    if let Some(dir) = out_dir {
        if let Err(e) = fs::create_dir_all(dir) {
            report.io_errors.push(format!("{}: {e}", dir.display()));
        }
        for name in &names {
            let path = dat_path(dir, config.code, name);
            if let Err(e) = File::create(&path).and_then(|mut f| writeln!(f, "{DAT_HEADER}")) {
                report.io_errors.push(format!("{}: {e}", path.display()));
            }
        }
    }
    let points = config.grid.points();
    for (i, &db) in points.iter().enumerate() {
        let records = sim.run_point(i as u64, db)?;
        if let Some(dir) = out_dir {
            for rec in &records {
                let path = dat_path(dir, config.code, &rec.decoder);
                if let Err(e) = append_line(&path, &rec.dat_line()) {
                    report.io_errors.push(format!("{}: {e}", path.display()));
                }
            }
        }
        report.records.extend(records);
    }
    let order = |name: &str| names.iter().position(|n| n == name).unwrap_or(usize::MAX);
    report
        .records
        .sort_by(|a, b| order(&a.decoder).cmp(&order(&b.decoder)).then(a.ebn0_db.total_cmp(&b.ebn0_db)));
    if let Some(dir) = out_dir {
        let manifest = Manifest {
            config: ManifestConfig {
                code: config.code.to_string(),
                decoders: names.clone(),
                grid: config.grid,
                stop: config.stop,
                seed: config.seed,
                alpha: match config.alpha {
                    AlphaSpec::Matched => "matched".into(),
                    AlphaSpec::FixedAt(db) => format!("fixed@{db}"),
                },
            },
            code: sim.code().meta(),
            seeds: points
                .iter()
                .enumerate()
                .map(|(i, &db)| PointSeed {
                    snr_index: i as u64,
                    ebn0_db: db,
                    key: point_key(config.seed, i as u64).iter().map(|b| format!("{b:02x}")).collect(),
                })
                .collect(),
            versions: serde_json::json!({ "mldec": env!("CARGO_PKG_VERSION") }),
            records: &report.records,
        };
        let path = dir.join("manifest.json");
        let written = serde_json::to_string_pretty(&manifest)
            .map_err(std::io::Error::other)
            .and_then(|s| fs::write(&path, s + "\n"));
        if let Err(e) = written {
            report.io_errors.push(format!("{}: {e}", path.display()));
        }
    }
    Ok(report)
}

/// Raw channel errors over `n` hard-decided bits per frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrefecCounts {
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
}

/// Sends uniformly random `n`-bit words and counts hard-decision errors
/// before any decoding.
pub fn prefec_point(n: usize, rate: f64, ebn0_db: f64, frames: u64, seed: u64, snr_index: u64) -> Result<PrefecCounts> {
    if n == 0 || n > 64 {
        return Err(Error::InvalidDimensions { n, k: 0 });
    }
    let sigma: f64 = ebn0_to_sigma(ebn0_db, rate)?;
    let key = point_key(seed, snr_index);
    let (frame_errors, bit_errors) = (0..frames)
        .into_par_iter()
        .map(|f| {
            let mut rng = frame_rng(&key, f);
            let word = rng.random::<u64>() & low_mask(n);
            let rx = transmit(&bpsk_word::<f64>(word, n), sigma, &mut rng);
            let errs = u64::from((rx.hard_decision() ^ word).count_ones());
            (u64::from(errs > 0), errs)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(PrefecCounts { frames, frame_errors, bit_errors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        assert_eq!(EbN0Grid::parse("0:0.5:2").unwrap().points(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(EbN0Grid::parse("3").unwrap().points(), vec![3.0]);
        assert_eq!(EbN0Grid::parse("0:0.1:0.3").unwrap().points().len(), 4);
        assert!(EbN0Grid::parse("0:0:1").is_err());
        assert!(EbN0Grid::parse("2:1:1").is_err());
        assert!(EbN0Grid::parse("a:b").is_err());
    }

    #[test]
    fn stop_rule_validation() {
        assert!(StopRule::new(0, 10).is_err());
        assert!(StopRule::new(11, 10).is_err());
        assert!(StopRule::new(10, 10).is_ok());
    }

    #[test]
    fn rounds_cover_exactly_max_frames() {
        let max = 1_000_003;
        let mut done = 0;
        while done < max {
            done += next_round(done, max);
        }
        assert_eq!(done, max);
    }

    #[test]
    fn noise_free_point_is_error_free() {
        let mut cfg = SimConfig::new(CodeId::Hamming74, DecoderKind::parse_list("ml,map,mlnn,slnn,bdd,hd").unwrap(), EbN0Grid::new(0.0, 1.0, 0.0).unwrap());
        cfg.stop = StopRule::fixed(2000).unwrap();
        for rec in run_point(&cfg, 0, f64::INFINITY).unwrap() {
            assert_eq!((rec.frames, rec.frame_errors, rec.bit_errors), (2000, 0, 0), "{}", rec.decoder);
        }
    }
}
