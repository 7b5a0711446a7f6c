//! Command-line front end. [`run`] returns the process exit code:
//! 0 on success, 1 when a check fails or the run itself fails, 2 on usage
//! errors.

mod config;
mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use mldec::channel::{ebn0_to_sigma, ReceivedVector};
use mldec::decoders::{DecoderKind, PreparedDecoder};
use mldec::gf2::{bit_string, code_stats, GeneratorMatrix, DEFAULT_POLAR_DESIGN_EBN0_DB};
use mldec::montecarlo::run_sweep;
use mldec::network::{build_mlnn, build_slnn, AlphaMode};
use mldec::verify::catalog;
use mldec::CodeId;

pub use config::{parse as parse_config, to_sim_config, ConfigMap};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failed(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<mldec::Error> for CliError {
    fn from(e: mldec::Error) -> Self {
        use mldec::Error as E;
        match e {
            E::Parse(_) | E::InvalidConfig(_) | E::InvalidRate(_) | E::InvalidSigma(_) | E::LengthMismatch { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Failed(e.to_string()),
        }
    }
}

fn io_failed(path: &Path, e: io::Error) -> CliError {
    CliError::Failed(format!("{}: {e}", path.display()))
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "mldec", version, about = "Codebook network decoders, exact ML/MAP decoding and Monte Carlo sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inspect a code's codebook.
    Codebook {
        #[command(subcommand)]
        action: CodebookAction,
    },
    /// Inspect a decoding network.
    Net {
        #[command(subcommand)]
        action: NetAction,
    },
    /// Edge counts and weight properties of both networks for every built-in code.
    Table1(Table1Args),
    /// Decode received vectors read from stdin, one frame per line.
    Decode(DecodeArgs),
    /// Monte Carlo FER/BER sweep.
    Simulate(SimulateArgs),
    /// Catalog, invariant and decoder-agreement checks.
    Verify(verify::VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct CodeArgs {
    /// hamming74, polar168 or bch3121.
    #[arg(long, value_parser = parse_code)]
    code: CodeId,
    /// Design Eb/N0 (dB) for the polar frozen set.
    #[arg(long, default_value_t = DEFAULT_POLAR_DESIGN_EBN0_DB, allow_negative_numbers = true)]
    polar_design_db: f64,
}

impl CodeArgs {
    fn build(&self) -> GeneratorMatrix {
        self.code.build(self.polar_design_db)
    }
}

fn parse_code(s: &str) -> Result<CodeId, String> {
    s.parse().map_err(|e: mldec::Error| e.to_string())
}

#[derive(Subcommand, Debug)]
enum CodebookAction {
    /// One codeword per line as a 0/1 string (position 1 first), canonical order.
    Dump(CodeArgs),
    /// JSON summary: dimensions, minimum distance, weight sum, metadata.
    Stats(CodeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NetKind {
    Slnn,
    Mlnn,
}

#[derive(Subcommand, Debug)]
enum NetAction {
    /// JSON description: layer sizes, edges per layer, softmax scale mode.
    Describe {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_enum, default_value = "mlnn")]
        net: NetKind,
        /// `matched` or `fixed@<dB>`.
        #[arg(long, default_value = "matched")]
        alpha: String,
    },
}

#[derive(Args, Debug)]
struct Table1Args {
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Comma-separated decoder tokens.
    #[arg(long, default_value = "ml")]
    decoders: String,
    /// Operating point used to derive σ.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "sigma")]
    ebn0: Option<f64>,
    /// Noise standard deviation.
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct SimulateArgs {
    /// key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    decoders: Option<String>,
    /// start:step:stop in dB.
    #[arg(long, allow_hyphen_values = true)]
    ebn0: Option<String>,
    #[arg(long)]
    min_errors: Option<u64>,
    #[arg(long)]
    max_frames: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// `matched` or `fixed@<dB>`, for `mlnn` tokens without a suffix.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    polar_design_db: Option<f64>,
    /// Output directory for `.dat` files and manifests.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command, writing
/// to `out`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let command_line = args.iter().map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" ");
    match dispatch(cli.command, &command_line, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, command_line: &str, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Codebook { action } => codebook(action, out),
        Command::Net { action } => net(action, out),
        Command::Table1(args) => table1(&args, out),
        Command::Decode(args) => decode(&args, &mut io::stdin().lock(), out),
        Command::Simulate(args) => simulate(args, command_line, out),
        Command::Verify(args) => verify::run(&args, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult {
    out.write_all(text.as_bytes()).map_err(|e| CliError::Failed(format!("writing output: {e}")))
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult {
    let s = serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(e.to_string()))?;
    emit(out, &(s + "\n"))
}

#[derive(Serialize)]
struct CodebookStats<'a> {
    name: &'a str,
    n: usize,
    k: usize,
    dmin: u32,
    weight_sum: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    frozen_set: Option<&'a [usize]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    design_ebn0_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generator_polynomial: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight_enumerator: Option<Vec<u64>>,
}

fn codebook(action: CodebookAction, out: &mut dyn Write) -> CliResult {
    match action {
        CodebookAction::Dump(args) => {
            let code = args.build();
            let mut text = String::new();
            for (_, cw) in code.stream() {
                text.push_str(&bit_string(cw, code.n()));
                text.push('\n');
            }
            emit(out, &text)
        }
        CodebookAction::Stats(args) => {
            let code = args.build();
            let stats = code_stats(&code)?;
            let meta = code.meta();
            emit_json(
                out,
                &CodebookStats {
                    name: &meta.name,
                    n: meta.n,
                    k: meta.k,
                    dmin: stats.min_distance,
                    weight_sum: stats.weight_sum,
                    frozen_set: meta.frozen_set.as_deref(),
                    design_ebn0_db: meta.design_ebn0_db,
                    generator_polynomial: meta.generator_polynomial.as_deref(),
                    weight_enumerator: stats.weight_enumerator,
                },
            )
        }
    }
}

fn alpha_mode(s: &str, rate: f64) -> CliResult<AlphaMode<f64>> {
    match config::parse_alpha(s).map_err(CliError::Usage)? {
        mldec::decoders::AlphaSpec::Matched => Ok(AlphaMode::Matched),
        mldec::decoders::AlphaSpec::FixedAt(db) => Ok(AlphaMode::fixed_at(db, rate)?),
    }
}

fn net(action: NetAction, out: &mut dyn Write) -> CliResult {
    let NetAction::Describe { code, net, alpha } = action;
    let code = code.build();
    let description = match net {
        NetKind::Slnn => build_slnn::<f64>(&code).describe(),
        NetKind::Mlnn => build_mlnn::<f64>(&code, alpha_mode(&alpha, code.rate())?).describe(),
    };
    emit_json(out, &description)
}

#[derive(Serialize)]
struct Table1Row {
    code: String,
    network: &'static str,
    layer_sizes: Vec<usize>,
    edges: u64,
    expected_edges: u64,
    weights: &'static str,
    training: &'static str,
    ok: bool,
}

fn table1(args: &Table1Args, out: &mut dyn Write) -> CliResult {
    let mut rows = Vec::new();
    for id in CodeId::ALL {
        let code = id.build(DEFAULT_POLAR_DESIGN_EBN0_DB);
        let want = catalog(id);
        let nets = [
            ("slnn", build_slnn::<f64>(&code), want.slnn_edges),
            ("mlnn", build_mlnn::<f64>(&code, AlphaMode::Matched), want.mlnn_edges),
        ];
        for (network, net, expected_edges) in nets {
            let edges = net.edge_count().total;
            rows.push(Table1Row {
                code: id.to_string(),
                network,
                layer_sizes: net.layer_sizes().to_vec(),
                edges,
                expected_edges,
                weights: "binary",
                training: "none",
                ok: edges == expected_edges,
            });
        }
    }
    if args.json {
        emit_json(out, &rows)?;
    } else {
        let mut text = format!("{:<10} {:<8} {:<22} {:>12} {:>12} {:<8} {:<8} {}\n", "code", "network", "layers", "edges", "expected", "weights", "training", "check");
        for r in &rows {
            let layers = r.layer_sizes.iter().map(usize::to_string).collect::<Vec<_>>().join("-");
            text.push_str(&format!(
                "{:<10} {:<8} {:<22} {:>12} {:>12} {:<8} {:<8} {}\n",
                r.code,
                r.network,
                layers,
                r.edges,
                r.expected_edges,
                r.weights,
                r.training,
                if r.ok { "ok" } else { "MISMATCH" }
            ));
        }
        emit(out, &text)?;
    }
    if rows.iter().all(|r| r.ok) {
        Ok(())
    } else {
        Err(CliError::Failed("edge counts differ from the expected table".into()))
    }
}

#[derive(Serialize)]
struct DecodeFlags {
    bdd_failure: bool,
}

#[derive(Serialize)]
struct DecodeLine {
    frame: usize,
    decoder: String,
    message_bits: String,
    codeword_bits: Option<String>,
    flags: DecodeFlags,
}

fn decode(args: &DecodeArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> CliResult {
    let code = args.code.build();
    let kinds = DecoderKind::parse_list(&args.decoders)?;
    let decoders: Vec<PreparedDecoder<f64>> = kinds.iter().map(|k| k.prepare(&code)).collect::<Result<_, _>>()?;
    let sigma = match (args.sigma, args.ebn0) {
        (Some(s), _) if s >= 0.0 && s.is_finite() => s,
        (Some(s), _) => return Err(CliError::Usage(format!("--sigma must be finite and nonnegative, got {s}"))),
        (None, Some(db)) => ebn0_to_sigma(db, code.rate())?,
        (None, None) => {
            let needs_sigma = kinds.iter().any(|k| {
                matches!(
                    k,
                    DecoderKind::Map(_, mldec::decoders::AlphaSpec::Matched)
                        | DecoderKind::Mlnn(mldec::decoders::AlphaSpec::Matched)
                        | DecoderKind::OracleMl
                        | DecoderKind::OracleMap
                )
            });
            if needs_sigma {
                return Err(CliError::Usage("these decoders need --ebn0 or --sigma".into()));
            }
            1.0
        }
    };
    let mut frame = 0;
    for (no, line) in input.lines().enumerate() {
        let line = line.map_err(|e| CliError::Failed(format!("reading stdin: {e}")))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let samples: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| CliError::Usage(format!("line {}: `{t}` is not a number", no + 1))))
            .collect::<CliResult<_>>()?;
        if samples.len() != code.n() {
            return Err(CliError::Usage(format!("line {}: expected {} values, got {}", no + 1, code.n(), samples.len())));
        }
        let rx = ReceivedVector::new(samples, sigma);
        for d in &decoders {
            let outcome = d.decode(&rx)?;
            let record = DecodeLine {
                frame,
                decoder: d.kind().to_string(),
                message_bits: outcome.message_bits(code.k()).iter().map(|b| char::from(b'0' + b)).collect(),
                codeword_bits: outcome.codeword.map(|c| bit_string(c, code.n())),
                flags: DecodeFlags { bdd_failure: outcome.bdd_failure },
            };
            let s = serde_json::to_string(&record).map_err(|e| CliError::Failed(e.to_string()))?;
            emit(out, &(s + "\n"))?;
        }
        frame += 1;
    }
    Ok(())
}

fn simulate(args: SimulateArgs, command_line: &str, out: &mut dyn Write) -> CliResult {
    let mut map = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            parse_config(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => ConfigMap::new(),
    };
    let overrides: [(&str, Option<String>); 10] = [
        ("code", args.code.clone()),
        ("decoders", args.decoders.clone()),
        ("ebn0", args.ebn0.clone()),
        ("min_errors", args.min_errors.map(|v| v.to_string())),
        ("max_frames", args.max_frames.map(|v| v.to_string())),
        ("seed", args.seed.map(|v| v.to_string())),
        ("alpha", args.alpha.clone()),
        ("workers", args.workers.map(|v| v.to_string())),
        ("polar_design_db", args.polar_design_db.map(|v| v.to_string())),
        ("out", args.out.as_ref().map(|p| p.display().to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            map.insert(key.to_string(), v);
        }
    }
    let config = to_sim_config(&map).map_err(CliError::Usage)?;
    let out_dir = map.get("out").map(PathBuf::from);
    let report = run_sweep(&config, out_dir.as_deref())?;

    let mut text = String::from("# decoder ebn0_db fer ber frames frame_errors bit_errors\n");
    for r in &report.records {
        text.push_str(&format!("{} {}\n", r.decoder, r.dat_line()));
    }
    emit(out, &text)?;

    if let Some(dir) = &out_dir {
        let mut replay = map.clone();
        replay.remove("out");
        let conf_path = dir.join("run.conf");
        fs::write(&conf_path, config::render(&replay)).map_err(|e| io_failed(&conf_path, e))?;
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let manifest = json!({
            "command": command_line,
            "config": replay,
            "code": config.build_code().meta(),
            "version": env!("CARGO_PKG_VERSION"),
            "seed": config.seed,
            "timestamp_unix": timestamp,
            "replay": "mldec simulate --config run.conf --out <dir>",
        });
        let path = dir.join("run.json");
        let s = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Failed(e.to_string()))?;
        fs::write(&path, s + "\n").map_err(|e| io_failed(&path, e))?;
    }
    if report.io_errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(report.io_errors.join("; ")))
    }
}
