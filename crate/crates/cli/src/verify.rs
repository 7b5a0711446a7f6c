use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mldec::gf2::{CodeId, GeneratorMatrix, DEFAULT_POLAR_DESIGN_EBN0_DB};
use mldec::verify::{check_catalog, map_agreement, ml_agreement};

use crate::{emit, CliError, CliResult};

/// Largest tolerated share of vectors on which decision rules disagree.
const MAX_DISAGREEMENT_RATE: f64 = 1e-4;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Restrict to one code; required with --generator.
    #[arg(long, value_parser = crate::parse_code)]
    code: Option<CodeId>,
    /// Check this generator matrix (0/1 rows) instead of the built-in one.
    #[arg(long, requires = "code")]
    generator: Option<PathBuf>,
    /// Random vectors per σ for the agreement checks [default: 2000, or 10
    /// for bch3121].
    #[arg(long)]
    trials: Option<u64>,
    /// Comma-separated noise levels.
    #[arg(long, default_value = "0.5,1,2")]
    sigmas: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

struct Tally<'a> {
    out: &'a mut dyn Write,
    failures: usize,
}

impl Tally<'_> {
    fn check(&mut self, ok: bool, what: String) -> CliResult {
        if !ok {
            self.failures += 1;
        }
        emit(self.out, &format!("{} {what}\n", if ok { "PASS" } else { "FAIL" }))
    }
}

fn invariants(code: &GeneratorMatrix, seed: u64, tally: &mut Tally<'_>) -> CliResult {
    let name = code.name().to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<u64> = if code.k() <= 16 {
        (0..code.size()).collect()
    } else {
        (0..100_000).map(|_| rng.random_range(0..code.size())).collect()
    };
    let round_trip = samples.iter().all(|&m| code.recover_index(code.encode_index(m)) == m);
    tally.check(round_trip, format!("{name} round trip over {} messages", samples.len()))?;
    let linear = (0..10_000).all(|_| {
        let (a, b) = (rng.random_range(0..code.size()), rng.random_range(0..code.size()));
        code.encode_index(a ^ b) == code.encode_index(a) ^ code.encode_index(b)
    });
    tally.check(linear, format!("{name} linearity over 10000 pairs"))?;
    let canonical = code.stream().take(1 << 12).enumerate().all(|(j, (idx, cw))| idx == j as u64 && cw == code.encode_index(idx));
    tally.check(canonical, format!("{name} canonical stream order"))
}

pub fn run(args: &VerifyArgs, out: &mut dyn Write) -> CliResult {
    let sigmas: Vec<f64> = args
        .sigmas
        .split(',')
        .map(|s| s.trim().parse::<f64>().ok().filter(|v| *v > 0.0 && v.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(|| CliError::Usage(format!("bad --sigmas `{}`", args.sigmas)))?;
    let ids: Vec<CodeId> = args.code.map_or(CodeId::ALL.to_vec(), |c| vec![c]);
    let mut tally = Tally { out, failures: 0 };
    for id in ids {
        let code = match &args.generator {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                match GeneratorMatrix::from_text(path.display().to_string(), &text) {
                    Ok(code) => code,
                    Err(e) => {
                        tally.check(false, format!("{} is a valid generator matrix: {e}", path.display()))?;
                        continue;
                    }
                }
            }
            None => id.build(DEFAULT_POLAR_DESIGN_EBN0_DB),
        };
        for c in check_catalog(&code, id)? {
            tally.check(c.ok(), format!("{id} {} expected {} got {}", c.property, c.expected, c.actual))?;
        }
        invariants(&code, args.seed, &mut tally)?;
        let trials = args.trials.unwrap_or(if code.k() > 16 { 10 } else { 2000 });
        for &sigma in &sigmas {
            let ml = ml_agreement(&code, sigma, trials, args.seed)?;
            tally.check(
                ml.passes(MAX_DISAGREEMENT_RATE),
                format!(
                    "{id} sigma={sigma} codeword-wise agreement: {} vectors, {} disagreements ({} unexcused){}",
                    ml.trials,
                    ml.disagreements,
                    ml.unexcused,
                    if ml.oracle_checked { ", oracle included" } else { "" }
                ),
            )?;
            let map = map_agreement(&code, sigma, trials, args.seed)?;
            tally.check(
                map.passes(MAX_DISAGREEMENT_RATE),
                format!(
                    "{id} sigma={sigma} bit-wise agreement: {} vectors, {} disagreements ({} unexcused){}",
                    map.trials,
                    map.disagreements,
                    map.unexcused,
                    if map.oracle_checked { ", oracle included" } else { "" }
                ),
            )?;
        }
    }
    if tally.failures == 0 {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} check(s) failed", tally.failures)))
    }
}
