//! `glas`: evaluate segmentations, rank leaderboards, run the baseline
//! segmenter, generate synthetic data and run brute-force cross-checks.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use glas_core::baseline::{segment_region_growing, synth_glands, SegmenterConfig, SynthSpec};
use glas_core::io::{
    load_gray_image, load_manifest, load_scores, write_gray_png, write_label_png,
    write_leaderboard, write_report, write_text_grid, OutputFormat, ReportDocument,
};
use glas_core::oracle::{run_suite, Suite};
use glas_core::ranking::rank_sum;
use glas_core::{AriPolicy, Connectivity, EvalConfig, GlasError, HausdorffMode, LabelMap};

#[derive(Parser)]
#[command(
    name = "glas",
    version,
    about = "Object-level gland segmentation evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every image pair of a manifest and write a report.
    Evaluate(EvaluateArgs),
    /// Rank a score table by rank sum.
    Rank(RankArgs),
    /// Segment one grayscale image with the region-growing baseline.
    Segment(SegmentArgs),
    /// Render synthetic gland images and their ground truth.
    Synth(SynthArgs),
    /// Cross-check fast metrics against brute-force references.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Output format; inferred from the `--out` extension when omitted.
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long, default_value = "boundary")]
    hausdorff: HausdorffMode,
    #[arg(long, default_value = "include")]
    ari: AriPolicy,
    #[arg(long, default_value_t = 0.5)]
    tp_threshold: f64,
    /// Treat every connected component as its own object.
    #[arg(long)]
    split_components: bool,
    /// Connectivity for `--split-components` (4 or 8).
    #[arg(long, default_value = "8")]
    connectivity: Connectivity,
    /// Neighbourhood deciding boundary pixels for Hausdorff (4 or 8).
    #[arg(long, default_value = "4")]
    boundary_connectivity: Connectivity,
    /// Worker threads for per-image evaluation; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    format: Option<OutputFormat>,
}

#[derive(Args)]
struct SegmentArgs {
    #[arg(long)]
    image: PathBuf,
    /// JSON segmenter configuration; defaults apply to omitted fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Label image to write: `.txt` gives a text grid, anything else a 16-bit PNG.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// JSON synthesis spec; defaults apply to omitted fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
    /// Number of images; image k uses seed `spec.seed + k`.
    #[arg(long, default_value_t = 1)]
    count: u64,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    suite: Suite,
    #[arg(long, default_value_t = 100)]
    cases: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
    exit_code: u8,
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    error: ErrorBody<'a>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, GlasError> {
    let text = std::fs::read_to_string(path).map_err(|e| GlasError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_str(&text)
        .map_err(|e| GlasError::Validation(format!("{}: {e}", path.display())))
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn evaluate(args: EvaluateArgs) -> Result<(), GlasError> {
    let config = EvalConfig {
        connectivity: args.connectivity,
        boundary_connectivity: args.boundary_connectivity,
        hausdorff: args.hausdorff,
        ari: args.ari,
        tp_threshold: args.tp_threshold,
        split_components: args.split_components,
    };
    config.validate()?;
    let manifest = load_manifest(&args.manifest)?;
    let pairs = manifest.load_pairs()?;
    let report = glas_core::metrics::evaluate(&pairs, &config, args.jobs)?;
    let doc = ReportDocument::new(report, manifest.dataset.clone(), timestamp());
    let format = args
        .format
        .unwrap_or_else(|| OutputFormat::from_path(&args.out));
    write_report(&doc, format, &args.out)
}

fn rank(args: RankArgs) -> Result<(), GlasError> {
    let table = load_scores(&args.scores)?;
    let board = rank_sum(&table)?;
    let format = args
        .format
        .unwrap_or_else(|| OutputFormat::from_path(&args.out));
    write_leaderboard(&board, format, &args.out)
}

fn write_labels(map: &LabelMap, path: &Path) -> Result<(), GlasError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("txt") => write_text_grid(map, path),
        _ => write_label_png(map, path),
    }
}

fn segment(args: SegmentArgs) -> Result<(), GlasError> {
    let config: SegmenterConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => SegmenterConfig::default(),
    };
    let image = load_gray_image(&args.image)?;
    let map = segment_region_growing(&image, &config)?;
    write_labels(&map, &args.out)
}

fn synth(args: SynthArgs) -> Result<(), GlasError> {
    let spec: SynthSpec = match &args.spec {
        Some(p) => read_json(p)?,
        None => SynthSpec::default(),
    };
    std::fs::create_dir_all(&args.out_dir).map_err(|e| GlasError::Io {
        path: args.out_dir.clone(),
        source: e,
    })?;
    for k in 0..args.count {
        let seed = spec.seed.wrapping_add(k);
        let s = synth_glands(&SynthSpec {
            seed,
            ..spec.clone()
        })?;
        let stem = format!("synth_{seed:06}");
        write_gray_png(&s.image, args.out_dir.join(format!("{stem}_image.png")))?;
        write_label_png(&s.truth, args.out_dir.join(format!("{stem}_truth.png")))?;
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<(), GlasError> {
    let report = run_suite(args.suite, args.cases, args.seed)?;
    println!("{}", serde_json::to_string(&report)?);
    if report.passed() {
        Ok(())
    } else {
        Err(GlasError::UndefinedInput(format!(
            "{} of {} comparisons exceeded tolerance {}",
            report.failures, report.comparisons, report.tolerance
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evaluate(a) => evaluate(a),
        Command::Rank(a) => rank(a),
        Command::Segment(a) => segment(a),
        Command::Synth(a) => synth(a),
        Command::Oracle(a) => oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = if e.is_validation() { 2 } else { 3 };
            let doc = ErrorDoc {
                error: ErrorBody {
                    kind: e.kind(),
                    message: e.to_string(),
                    exit_code: code,
                },
            };
            eprintln!(
                "{}",
                serde_json::to_string(&doc).unwrap_or_else(|_| format!("{{\"error\":\"{e}\"}}"))
            );
            ExitCode::from(code)
        }
    }
}
