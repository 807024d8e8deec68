//! Evaluation toolkit for object-level segmentation of glandular structures.
//!
//! The crate is organised around [`LabelMap`], a validated grid of object
//! labels. On top of it sit:
//!
//! * [`matching`]: pixel-overlap contingency tables and the maximal-overlap
//!   correspondence between ground-truth and segmented objects;
//! * [`metrics`]: detection F1, pixel and object-level Dice, adjusted Rand
//!   index, pairwise and object-level Hausdorff distance, and dataset pooling;
//! * [`ranking`]: standard competition ranking and rank-sum leaderboards;
//! * [`baseline`]: a lumen-seeded region-growing segmenter, morphological
//!   post-processing, a synthetic gland generator and metamorphic perturbations;
//! * [`io`]: label images (PNG and text grids), manifests, score tables and reports;
//! * [`oracle`]: brute-force reference implementations used for cross-checks.

pub mod baseline;
pub mod error;
pub mod grid;
pub mod io;
pub mod labelmap;
pub mod matching;
pub mod metrics;
pub mod oracle;
pub mod ranking;

pub use error::{GlasError, Result};
pub use grid::{GrayImage, Grid};
pub use labelmap::{BoundingBox, Connectivity, LabelMap, ObjectRecord, Pixel, Region};
pub use matching::{Correspondence, OverlapTable};
pub use metrics::{
    AriPolicy, DetectionCounts, EvalConfig, HausdorffMode, ImageMetrics, MetricReport,
    PooledMetrics,
};
pub use ranking::{Direction, Leaderboard, ScoreColumn, ScoreTable};
