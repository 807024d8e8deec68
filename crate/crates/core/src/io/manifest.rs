use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{GlasError, Result};
use crate::metrics::ImagePair;

use super::label_image::load_label_image;

/// Optional dataset metadata, echoed into reports.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetInfo {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_part: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pixel_size_um: Option<f64>,
}

/// One image of a manifest. Paths are relative to the manifest file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRecord {
    pub id: String,
    pub ground_truth: PathBuf,
    pub prediction: PathBuf,
}

/// List of image pairs to evaluate.
///
/// ```json
/// {"dataset": {"test_part": "A"},
///  "images": [{"id": "a1", "ground_truth": "gt/a1.png", "prediction": "seg/a1.png"}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalManifest {
    #[serde(default)]
    pub dataset: DatasetInfo,
    pub images: Vec<ManifestRecord>,
    /// Directory the record paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl EvalManifest {
    /// Checks id uniqueness and that every referenced file exists.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for r in &self.images {
            if r.id.is_empty() {
                return Err(GlasError::Validation(
                    "manifest record with empty id".into(),
                ));
            }
            if !seen.insert(r.id.as_str()) {
                return Err(GlasError::Validation(format!(
                    "duplicate image id `{}`",
                    r.id
                )));
            }
            for p in [&r.ground_truth, &r.prediction] {
                let full = self.resolve(p);
                if !full.is_file() {
                    return Err(GlasError::Validation(format!(
                        "image `{}`: file {} not found",
                        r.id,
                        full.display()
                    )));
                }
            }
        }
        if let Some(px) = self.dataset.pixel_size_um {
            if !(px > 0.0 && px.is_finite()) {
                return Err(GlasError::Validation(format!(
                    "pixel_size_um must be positive, got {px}"
                )));
            }
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }

    /// Loads every label image pair, in manifest order.
    pub fn load_pairs(&self) -> Result<Vec<ImagePair>> {
        self.images
            .iter()
            .map(|r| {
                let wrap = |e| GlasError::Image {
                    id: r.id.clone(),
                    source: Box::new(e),
                };
                Ok(ImagePair {
                    id: r.id.clone(),
                    gt: load_label_image(self.resolve(&r.ground_truth)).map_err(wrap)?,
                    seg: load_label_image(self.resolve(&r.prediction)).map_err(wrap)?,
                })
            })
            .collect()
    }
}

/// Reads and validates a JSON manifest.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<EvalManifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| GlasError::io(path, e))?;
    let mut m: EvalManifest = serde_json::from_str(&text)
        .map_err(|e| GlasError::Validation(format!("{}: {e}", path.display())))?;
    m.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    m.validate()?;
    Ok(m)
}
