//! Evaluation measures: detection F1, pixel and object-level Dice, adjusted
//! Rand index, pairwise and object-level Hausdorff, and dataset pooling.

mod ari;
mod detection;
mod dice;
pub mod distance;
mod evaluate;
mod hausdorff;
mod terms;

pub use ari::{adjusted_rand, AriPolicy, PairCounts};
pub use detection::{detection_counts, f1, DetectionCounts, F1Score};
pub use dice::{dice, dice_from_counts, object_dice, object_dice_pooled, object_dice_terms};
pub use evaluate::{
    evaluate, evaluate_image, EvalConfig, ImageEvaluation, ImageMetrics, ImagePair, MetricReport,
    PooledMetrics, Scores,
};
pub use hausdorff::{
    hausdorff, hausdorff_with, object_hausdorff, object_hausdorff_pooled, object_hausdorff_terms,
    HausdorffMode,
};
pub use terms::{ObjectTerm, ObjectTerms};
