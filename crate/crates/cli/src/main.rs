//! `momentfuse` command-line tool.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error
//! (unreadable or mismatched images), 3 a batch with no usable pairs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use momentfuse::harness::config::KeyValues;
use momentfuse::harness::synth::{synthetic_set, synthetic_set_from_base, write_synthetic_set};
use momentfuse::harness::{emit_report, run_batch, Method, ReportFormat};
use momentfuse::metrics::evaluate;
use momentfuse::pgm::{read_pgm_file, write_pgm_file};
use momentfuse::{Activity, Error, FusionConfig, OutputSource, QabfConstants};

#[derive(Parser, Debug)]
#[command(
    name = "momentfuse",
    version,
    about = "Moment-based fusion of registered grayscale image pairs"
)]
struct Cli {
    /// File of `key = value` lines supplying defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fuse one pair of PGM images.
    Fuse(FuseArgs),
    /// Score a fused image against its two sources.
    Eval(EvalArgs),
    /// Fuse and score every pair in a directory or manifest.
    Batch(BatchArgs),
    /// Write synthetic complementary-blur pairs with ground truth.
    Synth(SynthArgs),
}

/// Moment-fusion parameters shared by `fuse` and `batch`.
#[derive(Args, Debug)]
struct FusionFlags {
    /// Moment order on the local row index.
    #[arg(long)]
    p: Option<u32>,
    /// Moment order on the local column index.
    #[arg(long)]
    q: Option<u32>,
    /// Odd window side length.
    #[arg(long)]
    window: Option<usize>,
    /// Rasters copied into the output: filtered or original.
    #[arg(long)]
    source: Option<String>,
    /// Signal whose moments are compared: detail or response.
    #[arg(long)]
    activity: Option<String>,
    /// Center weight of the sharpening mask.
    #[arg(long = "mask-center")]
    mask_center: Option<f64>,
}

#[derive(Args, Debug)]
struct FuseArgs {
    #[arg(long = "in-a")]
    in_a: PathBuf,
    #[arg(long = "in-b")]
    in_b: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// moment, average or pca.
    #[arg(long)]
    method: Option<String>,
    /// Also write the decision map (255 = first source) as a PGM.
    #[arg(long = "dump-decision", value_name = "PGM")]
    dump_decision: Option<PathBuf>,
    #[command(flatten)]
    fusion: FusionFlags,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long = "in-a")]
    in_a: PathBuf,
    #[arg(long = "in-b")]
    in_b: PathBuf,
    #[arg(long)]
    fused: PathBuf,
    /// Print a JSON object instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct BatchArgs {
    /// Directory of `<id>_a.pgm` / `<id>_b.pgm` files.
    #[arg(
        long,
        conflicts_with = "manifest",
        required_unless_present = "manifest"
    )]
    dir: Option<PathBuf>,
    /// File of `<id> <path_a> <path_b>` lines.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Comma-separated methods, e.g. `moment,average`.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    report: PathBuf,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Accepted for reproducible invocations; fusion itself is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    fusion: FusionFlags,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Base image; a procedural scene is generated per pair when omitted.
    #[arg(long)]
    base: Option<PathBuf>,
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
    #[arg(long)]
    pairs: Option<usize>,
    /// Gaussian blur width in pixels.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Procedural scene width.
    #[arg(long)]
    width: Option<usize>,
    /// Procedural scene height.
    #[arg(long)]
    height: Option<usize>,
}

const KNOWN_KEYS: &[&str] = &[
    "p",
    "q",
    "window",
    "source",
    "activity",
    "mask-center",
    "method",
    "methods",
    "format",
    "seed",
    "pairs",
    "sigma",
    "width",
    "height",
];

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    EmptyBatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::EmptyBatch(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::EmptyBatch(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidConfig(_) | Error::UnknownMethod(_) | Error::DegenerateSeam { .. } => {
                Failure::Usage(msg)
            }
            Error::EmptyBatch => Failure::EmptyBatch(msg),
            _ => Failure::Data(msg),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

/// Flag value if given, else the config file value, else `default`.
fn pick<T: FromStr>(flag: Option<T>, kv: &KeyValues, key: &str, default: T) -> CliResult<T> {
    match flag {
        Some(v) => Ok(v),
        None => Ok(kv.get(key)?.unwrap_or(default)),
    }
}

fn parse_as<T: FromStr<Err = Error>>(text: String) -> CliResult<T> {
    Ok(text.parse()?)
}

fn fusion_config(flags: FusionFlags, kv: &KeyValues) -> CliResult<FusionConfig> {
    let d = FusionConfig::default();
    let cfg = FusionConfig {
        moment_order_p: pick(flags.p, kv, "p", d.moment_order_p)?,
        moment_order_q: pick(flags.q, kv, "q", d.moment_order_q)?,
        window: pick(flags.window, kv, "window", d.window)?,
        output_source: parse_as::<OutputSource>(pick(
            flags.source,
            kv,
            "source",
            "original".into(),
        )?)?,
        activity: parse_as::<Activity>(pick(flags.activity, kv, "activity", "detail".into())?)?,
        mask_center: pick(flags.mask_center, kv, "mask-center", d.mask_center)?,
        ..d
    };
    cfg.validate()?;
    Ok(cfg)
}

fn fuse(args: FuseArgs, kv: &KeyValues) -> CliResult {
    let method: Method = parse_as(pick(args.method, kv, "method", "moment".into())?)?;
    if args.dump_decision.is_some() && method != Method::Moment {
        return Err(Failure::Usage(
            "--dump-decision needs --method moment".into(),
        ));
    }
    let cfg = fusion_config(args.fusion, kv)?;
    let a = read_pgm_file(&args.in_a)?;
    let b = read_pgm_file(&args.in_b)?;
    let result = method.fuse(&a, &b, &cfg)?;
    write_pgm_file(&args.out, &result.fused_u8)?;
    if let (Some(path), Some(decision)) = (&args.dump_decision, &result.decision) {
        write_pgm_file(path, &decision.to_image())?;
    }
    if let Some(pca) = result.pca.filter(|w| w.degenerate) {
        eprintln!(
            "note: PCA axis undefined, used weights {} / {}",
            pca.w_x, pca.w_y
        );
    }
    Ok(())
}

fn eval(args: EvalArgs) -> CliResult {
    let a = read_pgm_file(&args.in_a)?;
    let b = read_pgm_file(&args.in_b)?;
    let f = read_pgm_file(&args.fused)?;
    let rec = evaluate(&a, &b, &f, &QabfConstants::default())?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&rec).expect("metrics serialize")
        );
    } else {
        println!("entropy  {:.6}", rec.entropy_bits);
        println!("sd       {:.6}", rec.sd);
        println!("mim      {:.6}", rec.mim_bits);
        let note = if rec.degenerate_qabf {
            "  (degenerate: no edges in either source)"
        } else {
            ""
        };
        println!("qabf     {:.6}{note}", rec.qabf);
    }
    Ok(())
}

fn batch(args: BatchArgs, kv: &KeyValues) -> CliResult {
    let methods = Method::parse_list(&pick(
        args.methods,
        kv,
        "methods",
        "moment,average,pca".into(),
    )?)?;
    let format: ReportFormat = parse_as(pick(args.format, kv, "format", "csv".into())?)?;
    // Validated for type errors only.
    pick(args.seed, kv, "seed", 0u64)?;
    let cfg = fusion_config(args.fusion, kv)?;
    let source = args
        .dir
        .or(args.manifest)
        .expect("clap enforces one of --dir/--manifest");
    let report = run_batch(&source, &cfg, &QabfConstants::default(), &methods)?;
    for s in &report.skipped {
        eprintln!("skipped {}: {}", s.id, s.reason);
    }
    write_file(&args.report, &emit_report(&report, format))?;
    eprintln!(
        "{} rows, {} skipped",
        report.rows.len(),
        report.skipped.len()
    );
    Ok(())
}

fn synth(args: SynthArgs, kv: &KeyValues) -> CliResult {
    let pairs = pick(args.pairs, kv, "pairs", 10usize)?;
    let sigma = pick(args.sigma, kv, "sigma", 2.0f64)?;
    let seed = pick(args.seed, kv, "seed", 0u64)?;
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Failure::Usage(format!(
            "--sigma must be a non-negative number, got {sigma}"
        )));
    }
    let set = match &args.base {
        Some(path) => synthetic_set_from_base(&read_pgm_file(path)?, pairs, sigma, seed)?,
        None => {
            let width = pick(args.width, kv, "width", 256usize)?;
            let height = pick(args.height, kv, "height", 256usize)?;
            synthetic_set(pairs, width, height, sigma, seed)?
        }
    };
    write_synthetic_set(&args.out_dir, &set)?;
    eprintln!("wrote {} pairs to {}", set.len(), args.out_dir.display());
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult {
    std::fs::write(path, bytes).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load_config(path: Option<&Path>) -> CliResult<KeyValues> {
    let Some(path) = path else {
        return Ok(KeyValues::default());
    };
    let kv = KeyValues::load(path).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(key) = kv.keys().find(|k| !KNOWN_KEYS.contains(k)) {
        return Err(Failure::Usage(format!(
            "{}: unknown key `{key}`",
            path.display()
        )));
    }
    Ok(kv)
}

fn run(cli: Cli) -> CliResult {
    let kv = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Fuse(args) => fuse(args, &kv),
        Command::Eval(args) => eval(args),
        Command::Batch(args) => batch(args, &kv),
        Command::Synth(args) => synth(args, &kv),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
