use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GlasError, Result};
use crate::metrics::{EvalConfig, ImageMetrics, MetricReport, PooledMetrics, Scores};
use crate::ranking::Leaderboard;

use super::manifest::DatasetInfo;

pub const TOOL_NAME: &str = "glas";

/// Serialization format of reports and leaderboards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl OutputFormat {
    /// `csv` for paths ending in `.csv`, JSON otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown output format `{other}`")),
        }
    }
}

/// Everything needed to rerun an evaluation and get the same numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(flatten)]
    pub eval: EvalConfig,
    #[serde(default, skip_serializing_if = "DatasetInfo::is_empty")]
    pub dataset: DatasetInfo,
}

impl DatasetInfo {
    fn is_empty(&self) -> bool {
        self.test_part.is_none() && self.pixel_size_um.is_none()
    }
}

/// A serialized evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    /// The only field allowed to differ between reruns.
    pub generated_at: String,
    pub config: ConfigEcho,
    pub per_image: Vec<ImageMetrics>,
    pub pooled: PooledMetrics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaderboard: Option<Leaderboard>,
}

impl ReportDocument {
    pub fn new(
        report: MetricReport,
        dataset: DatasetInfo,
        generated_at: impl Into<String>,
    ) -> Self {
        ReportDocument {
            tool: TOOL_NAME.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            generated_at: generated_at.into(),
            config: ConfigEcho {
                eval: report.config,
                dataset,
            },
            per_image: report.per_image,
            pooled: report.pooled,
            leaderboard: None,
        }
    }
}

fn d3(v: f64) -> String {
    format!("{v:.3}")
}

/// Three-decimal renderings of the headline metrics.
#[derive(Serialize)]
struct Display {
    f1: String,
    dice_obj: String,
    hausdorff_obj: String,
    ari: Option<String>,
    dice_pixel: String,
}

impl Display {
    fn of(s: &Scores) -> Self {
        Display {
            f1: d3(s.f1),
            dice_obj: d3(s.dice_obj),
            hausdorff_obj: d3(s.hausdorff_obj),
            ari: s.ari.map(d3),
            dice_pixel: d3(s.dice_pixel),
        }
    }
}

#[derive(Serialize)]
struct Row<'a, T> {
    #[serde(flatten)]
    row: &'a T,
    display: Display,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    tool: &'a str,
    version: &'a str,
    generated_at: &'a str,
    config: &'a ConfigEcho,
    per_image: Vec<Row<'a, ImageMetrics>>,
    pooled: Row<'a, PooledMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    leaderboard: Option<LeaderboardJson<'a>>,
}

/// Pretty JSON with fixed field order and shortest round-trip float output.
pub fn report_to_json(doc: &ReportDocument) -> Result<String> {
    let out = JsonReport {
        tool: &doc.tool,
        version: &doc.version,
        generated_at: &doc.generated_at,
        config: &doc.config,
        per_image: doc
            .per_image
            .iter()
            .map(|m| Row {
                row: m,
                display: Display::of(&m.scores),
            })
            .collect(),
        pooled: Row {
            row: &doc.pooled,
            display: Display::of(&doc.pooled.scores),
        },
        leaderboard: doc.leaderboard.as_ref().map(LeaderboardJson::of),
    };
    let mut s = serde_json::to_string_pretty(&out)?;
    s.push('\n');
    Ok(s)
}

const REPORT_HEADER: [&str; 19] = [
    "scope",
    "id",
    "n_gt",
    "n_seg",
    "tp",
    "fp",
    "fn",
    "precision",
    "recall",
    "f1",
    "dice_pixel",
    "dice_obj",
    "hausdorff_obj",
    "ari",
    "f1_3dp",
    "dice_obj_3dp",
    "hausdorff_obj_3dp",
    "ari_3dp",
    "dice_pixel_3dp",
];

fn score_cells(scope: &str, id: &str, n_gt: usize, n_seg: usize, s: &Scores) -> Vec<String> {
    let disp = Display::of(s);
    vec![
        scope.into(),
        id.into(),
        n_gt.to_string(),
        n_seg.to_string(),
        s.counts.tp.to_string(),
        s.counts.fp.to_string(),
        s.counts.fn_.to_string(),
        s.precision.to_string(),
        s.recall.to_string(),
        s.f1.to_string(),
        s.dice_pixel.to_string(),
        s.dice_obj.to_string(),
        s.hausdorff_obj.to_string(),
        s.ari.map(|v| v.to_string()).unwrap_or_default(),
        disp.f1,
        disp.dice_obj,
        disp.hausdorff_obj,
        disp.ari.unwrap_or_default(),
        disp.dice_pixel,
    ]
}

fn csv_string(rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| GlasError::Format(format!("csv buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| GlasError::Format(format!("csv buffer: {e}")))
}

/// CSV with `#` metadata lines, one row per image and a final pooled row.
pub fn report_to_csv(doc: &ReportDocument) -> Result<String> {
    let mut out = format!(
        "# tool={} version={} generated_at={}\n# config={}\n",
        doc.tool,
        doc.version,
        doc.generated_at,
        serde_json::to_string(&doc.config)?
    );
    let header = REPORT_HEADER.iter().map(|s| s.to_string()).collect();
    let rows = std::iter::once(header)
        .chain(
            doc.per_image
                .iter()
                .map(|m| score_cells("image", &m.id, m.n_gt, m.n_seg, &m.scores)),
        )
        .chain(std::iter::once(score_cells(
            "pooled",
            "",
            doc.pooled.n_gt,
            doc.pooled.n_seg,
            &doc.pooled.scores,
        )));
    out.push_str(&csv_string(rows)?);
    Ok(out)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| GlasError::io(path, e))
}

/// Writes a report in the requested format.
pub fn write_report(
    doc: &ReportDocument,
    format: OutputFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let text = match format {
        OutputFormat::Json => report_to_json(doc)?,
        OutputFormat::Csv => report_to_csv(doc)?,
    };
    write_text(path.as_ref(), &text)
}

#[derive(Serialize)]
struct Standing<'a> {
    position: usize,
    entry: &'a str,
    rank_sum: u32,
    tied: bool,
    ranks: Vec<(String, u32)>,
}

#[derive(Serialize)]
struct LeaderboardJson<'a> {
    columns: Vec<String>,
    final_order: Vec<&'a str>,
    standings: Vec<Standing<'a>>,
}

impl<'a> LeaderboardJson<'a> {
    fn of(b: &'a Leaderboard) -> Self {
        let columns: Vec<String> = b.columns.iter().map(|c| c.name()).collect();
        let standings = b
            .final_order
            .iter()
            .enumerate()
            .map(|(pos, &i)| Standing {
                position: pos + 1,
                entry: &b.entries[i],
                rank_sum: b.rank_sums[i],
                tied: b.tied[i],
                ranks: columns
                    .iter()
                    .cloned()
                    .zip(b.per_column_ranks[i].iter().copied())
                    .collect(),
            })
            .collect();
        LeaderboardJson {
            columns,
            final_order: b.ordered_names(),
            standings,
        }
    }
}

/// Leaderboard as pretty JSON, entries in final order.
pub fn leaderboard_to_json(board: &Leaderboard) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&LeaderboardJson::of(board))?;
    s.push('\n');
    Ok(s)
}

/// Leaderboard as CSV: position, entry, one rank column per score column,
/// rank sum and tie flag, in final order.
pub fn leaderboard_to_csv(board: &Leaderboard) -> Result<String> {
    let mut header = vec!["position".to_string(), "entry".to_string()];
    header.extend(board.columns.iter().map(|c| format!("rank:{}", c.name())));
    header.extend(["rank_sum".to_string(), "tied".to_string()]);
    let rows = board.final_order.iter().enumerate().map(|(pos, &i)| {
        let mut r = vec![(pos + 1).to_string(), board.entries[i].clone()];
        r.extend(board.per_column_ranks[i].iter().map(u32::to_string));
        r.push(board.rank_sums[i].to_string());
        r.push(board.tied[i].to_string());
        r
    });
    csv_string(std::iter::once(header).chain(rows))
}

/// Writes a leaderboard in the requested format.
pub fn write_leaderboard(
    board: &Leaderboard,
    format: OutputFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let text = match format {
        OutputFormat::Json => leaderboard_to_json(board)?,
        OutputFormat::Csv => leaderboard_to_csv(board)?,
    };
    write_text(path.as_ref(), &text)
}
