//! File formats: label images, grayscale images, score tables, manifests and reports.
//!
//! Label images are 8/16-bit single-channel PNGs, palette PNGs (palette index is
//! the label) or plain-text grids of whitespace-separated integers. Pixel
//! value 0 is background; any other value is the object id.

mod label_image;
mod manifest;
mod report;
mod scores;

pub use label_image::{
    load_gray_image, load_label_image, parse_text_grid, read_label_png, write_gray_png,
    write_label_png, write_text_grid,
};
pub use manifest::{load_manifest, DatasetInfo, EvalManifest, ManifestRecord};
pub use report::{
    leaderboard_to_csv, leaderboard_to_json, report_to_csv, report_to_json, write_leaderboard,
    write_report, ConfigEcho, OutputFormat, ReportDocument, TOOL_NAME,
};
pub use scores::{load_scores, parse_scores};
