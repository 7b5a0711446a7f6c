use std::fmt;
use std::str::FromStr;

use super::bdd::BddDecoder;
use super::trellis::Trellis;
use super::{map_decode_with_alpha, ml_decode, oracle_map, oracle_ml, DecodeOutcome, Metric};
use crate::channel::{ebn0_to_sigma, hard_decision, ReceivedVector};
use crate::error::{Error, Result};
use crate::gf2::GeneratorMatrix;
use crate::network::{build_mlnn, build_slnn, AlphaMode, LayeredNet};
use crate::scalar::Real;

/// How ML and MAP are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    /// Gray-code walk over all `2^k` codewords.
    Exhaustive,
    /// Generator trellis.
    Trellis,
    /// Exhaustive up to [`Engine::AUTO_EXHAUSTIVE_MAX_K`], trellis above.
    Auto,
}

impl Engine {
    pub const AUTO_EXHAUSTIVE_MAX_K: usize = 16;

    fn resolve(self, k: usize) -> Engine {
        match self {
            Engine::Auto if k <= Self::AUTO_EXHAUSTIVE_MAX_K => Engine::Exhaustive,
            Engine::Auto => Engine::Trellis,
            e => e,
        }
    }
}

/// Softmax scale selection for MAP-type decoders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSpec {
    /// `α = 2/σ²` at the operating point.
    Matched,
    /// `α = 2/σ²` frozen at this Eb/N0 in dB.
    FixedAt(f64),
}

impl AlphaSpec {
    fn suffix(&self) -> String {
        match self {
            AlphaSpec::Matched => String::new(),
            AlphaSpec::FixedAt(db) => format!("@{db}"),
        }
    }

    fn mode<S: Real>(&self, rate: f64) -> Result<AlphaMode<S>> {
        match *self {
            AlphaSpec::Matched => Ok(AlphaMode::Matched),
            AlphaSpec::FixedAt(db) => AlphaMode::fixed_at(db, rate),
        }
    }
}

/// A decoder selectable by name.
///
/// Grammar: `ml`, `ml-exhaustive`, `ml-trellis`, `map`, `map-exhaustive`,
/// `map-trellis`, `slnn`, `mlnn`, `bdd`, `hd`, `oracle-ml`, `oracle-map`.
/// `map*` and `mlnn` accept `@<dB>` to freeze the softmax scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecoderKind {
    Ml(Engine),
    Map(Engine, AlphaSpec),
    Slnn,
    Mlnn(AlphaSpec),
    Bdd,
    /// Per-position hard decisions followed by linear message recovery.
    Hd,
    OracleMl,
    OracleMap,
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let engine = |e: &Engine| match e {
            Engine::Auto => "",
            Engine::Exhaustive => "-exhaustive",
            Engine::Trellis => "-trellis",
        };
        match self {
            DecoderKind::Ml(e) => write!(f, "ml{}", engine(e)),
            DecoderKind::Map(e, a) => write!(f, "map{}{}", engine(e), a.suffix()),
            DecoderKind::Slnn => f.write_str("slnn"),
            DecoderKind::Mlnn(a) => write!(f, "mlnn{}", a.suffix()),
            DecoderKind::Bdd => f.write_str("bdd"),
            DecoderKind::Hd => f.write_str("hd"),
            DecoderKind::OracleMl => f.write_str("oracle-ml"),
            DecoderKind::OracleMap => f.write_str("oracle-map"),
        }
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let token = s.trim().to_ascii_lowercase();
        let (name, alpha) = match token.split_once('@') {
            Some((name, db)) => {
                let db: f64 = db
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| Error::Parse(format!("bad Eb/N0 in decoder token `{s}`")))?;
                (name, Some(AlphaSpec::FixedAt(db)))
            }
            None => (token.as_str(), None),
        };
        let matched = alpha.unwrap_or(AlphaSpec::Matched);
        let kind = match name {
            "ml" => DecoderKind::Ml(Engine::Auto),
            "ml-exhaustive" => DecoderKind::Ml(Engine::Exhaustive),
            "ml-trellis" => DecoderKind::Ml(Engine::Trellis),
            "map" => DecoderKind::Map(Engine::Auto, matched),
            "map-exhaustive" => DecoderKind::Map(Engine::Exhaustive, matched),
            "map-trellis" => DecoderKind::Map(Engine::Trellis, matched),
            "slnn" => DecoderKind::Slnn,
            "mlnn" => DecoderKind::Mlnn(matched),
            "bdd" => DecoderKind::Bdd,
            "hd" => DecoderKind::Hd,
            "oracle-ml" => DecoderKind::OracleMl,
            "oracle-map" => DecoderKind::OracleMap,
            _ => return Err(Error::Parse(format!("unknown decoder `{s}`"))),
        };
        let takes_alpha = matches!(kind, DecoderKind::Map(..) | DecoderKind::Mlnn(_));
        if alpha.is_some() && !takes_alpha {
            return Err(Error::Parse(format!("decoder `{name}` takes no `@<dB>` suffix")));
        }
        Ok(kind)
    }
}

impl DecoderKind {
    /// Comma-separated list of tokens.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
    }

    pub fn prepare<S: Real>(&self, code: &GeneratorMatrix) -> Result<PreparedDecoder<S>> {
        PreparedDecoder::new(code, *self)
    }
}

#[derive(Debug, Clone)]
enum Backend<S> {
    Exhaustive,
    Trellis(Trellis),
    Net(LayeredNet<S>),
    Bdd(BddDecoder),
    Plain,
}

/// A decoder with its per-code precomputation done once.
#[derive(Debug, Clone)]
pub struct PreparedDecoder<S> {
    code: GeneratorMatrix,
    kind: DecoderKind,
    backend: Backend<S>,
    fixed_alpha: Option<S>,
}

impl<S: Real> PreparedDecoder<S> {
    pub fn new(code: &GeneratorMatrix, kind: DecoderKind) -> Result<Self> {
        let engine_backend = |e: Engine| -> Result<Backend<S>> {
            Ok(match e.resolve(code.k()) {
                Engine::Trellis => Backend::Trellis(Trellis::new(code)?),
                _ => Backend::Exhaustive,
            })
        };
        let (backend, fixed_alpha) = match kind {
            DecoderKind::Ml(e) => (engine_backend(e)?, None),
            DecoderKind::Map(e, a) => {
                let alpha = match a.mode::<S>(code.rate())? {
                    AlphaMode::Fixed { alpha } => Some(alpha),
                    AlphaMode::Matched => None,
                };
                (engine_backend(e)?, alpha)
            }
            DecoderKind::Slnn => (Backend::Net(build_slnn(code)), None),
            DecoderKind::Mlnn(a) => (Backend::Net(build_mlnn(code, a.mode(code.rate())?)), None),
            DecoderKind::Bdd => (Backend::Bdd(BddDecoder::new(code)?), None),
            DecoderKind::Hd | DecoderKind::OracleMl | DecoderKind::OracleMap => (Backend::Plain, None),
        };
        Ok(Self { code: code.clone(), kind, backend, fixed_alpha })
    }

    pub fn kind(&self) -> DecoderKind {
        self.kind
    }

    pub fn code(&self) -> &GeneratorMatrix {
        &self.code
    }

    pub fn decode(&self, rx: &ReceivedVector<S>) -> Result<DecodeOutcome<S>> {
        let r = &rx.samples[..];
        if r.len() != self.code.n() {
            return Err(Error::LengthMismatch { expected: self.code.n(), got: r.len() });
        }
        let code = &self.code;
        match (&self.kind, &self.backend) {
            (DecoderKind::Ml(_), Backend::Trellis(t)) => t.ml_decode(code, r),
            (DecoderKind::Ml(_), _) => ml_decode(code, r),
            (DecoderKind::Map(..), backend) => {
                let alpha = match self.fixed_alpha {
                    Some(a) => a,
                    None => AlphaMode::Matched.resolve(rx.sigma)?,
                };
                match backend {
                    Backend::Trellis(t) => t.map_decode(code, r, alpha),
                    _ => map_decode_with_alpha(code, r, alpha),
                }
            }
            (DecoderKind::Slnn, Backend::Net(net)) => {
                let (index, score) = net.slnn_decide(r)?;
                Ok(DecodeOutcome { index, codeword: Some(code.encode_index(index)), bdd_failure: false, metric: Metric::Score(score) })
            }
            (DecoderKind::Mlnn(_), Backend::Net(net)) => {
                let out = net.forward_mlnn(r, rx.sigma)?;
                Ok(DecodeOutcome {
                    index: out.index,
                    codeword: Some(code.encode_index(out.index)),
                    bdd_failure: false,
                    metric: Metric::Posteriors(out.posteriors),
                })
            }
            (DecoderKind::Bdd, Backend::Bdd(bdd)) => bdd.decode(r),
            (DecoderKind::Hd, _) => {
                let hard = hard_decision(r);
                let index = code.recover_index(hard);
                let codeword = code.is_codeword(hard).then_some(hard);
                Ok(DecodeOutcome { index, codeword, bdd_failure: false, metric: Metric::None })
            }
            (DecoderKind::OracleMl, _) => oracle_ml(code, r, rx.sigma),
            (DecoderKind::OracleMap, _) => oracle_map(code, r, rx.sigma),
            _ => unreachable!("backend always matches its decoder kind"),
        }
    }

    /// Convenience for callers that know the operating point in dB.
    pub fn decode_at(&self, samples: Vec<S>, ebn0_db: f64) -> Result<DecodeOutcome<S>> {
        let sigma = ebn0_to_sigma(ebn0_db, self.code.rate())?;
        self.decode(&ReceivedVector::new(samples, sigma))
    }
}
