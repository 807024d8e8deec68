//! Per-image evaluation and dataset pooling.

use serde::{Deserialize, Serialize};

use crate::error::{GlasError, Result};
use crate::labelmap::{Connectivity, LabelMap};
use crate::matching::{maximal_overlap, OverlapTable};

use super::ari::{AriPolicy, PairCounts};
use super::detection::{detection_counts, f1, DetectionCounts};
use super::dice::{dice_from_counts, object_dice_terms};
use super::hausdorff::{object_hausdorff_terms, HausdorffMode};
use super::terms::ObjectTerms;

/// Evaluation switches. Echoed verbatim into reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    /// Connectivity used when `split_components` re-labels objects.
    pub connectivity: Connectivity,
    /// Neighbourhood used to decide whether a pixel lies on an object boundary.
    pub boundary_connectivity: Connectivity,
    pub hausdorff: HausdorffMode,
    pub ari: AriPolicy,
    /// Fraction of the ground-truth object a segmented object must cover to count as TP.
    pub tp_threshold: f64,
    /// Re-componentize both maps so each connected region is its own object.
    pub split_components: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            connectivity: Connectivity::Eight,
            boundary_connectivity: Connectivity::Four,
            hausdorff: HausdorffMode::Boundary,
            ari: AriPolicy::Include,
            tp_threshold: 0.5,
            split_components: false,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tp_threshold > 0.0 && self.tp_threshold <= 1.0) {
            return Err(GlasError::Validation(format!(
                "tp_threshold must lie in (0, 1], got {}",
                self.tp_threshold
            )));
        }
        Ok(())
    }
}

/// One ground-truth / prediction pair.
#[derive(Debug, Clone)]
pub struct ImagePair {
    pub id: String,
    pub gt: LabelMap,
    pub seg: LabelMap,
}

/// Metric values shared by per-image rows and the pooled row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub counts: DetectionCounts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub dice_pixel: f64,
    pub dice_obj: f64,
    pub hausdorff_obj: f64,
    /// `None` when the index is undefined (fewer than two covered pixels).
    pub ari: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageMetrics {
    pub id: String,
    pub n_gt: usize,
    pub n_seg: usize,
    #[serde(flatten)]
    pub scores: Scores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledMetrics {
    pub n_images: usize,
    pub n_gt: usize,
    pub n_seg: usize,
    #[serde(flatten)]
    pub scores: Scores,
}

/// Per-image and pooled metrics of one evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub config: EvalConfig,
    pub per_image: Vec<ImageMetrics>,
    pub pooled: PooledMetrics,
}

/// Additive sufficient statistics of one image.
#[derive(Debug, Clone, Default)]
pub struct ImageEvaluation {
    pub n_gt: usize,
    pub n_seg: usize,
    pub counts: DetectionCounts,
    pub intersection: u64,
    pub gt_foreground: u64,
    pub seg_foreground: u64,
    pub pairs: PairCounts,
    pub dice_terms: ObjectTerms,
    pub hausdorff_terms: ObjectTerms,
}

impl ImageEvaluation {
    fn merge(&mut self, other: &ImageEvaluation) {
        self.n_gt += other.n_gt;
        self.n_seg += other.n_seg;
        self.counts += other.counts;
        self.intersection += other.intersection;
        self.gt_foreground += other.gt_foreground;
        self.seg_foreground += other.seg_foreground;
        self.pairs += other.pairs;
        self.dice_terms.extend(&other.dice_terms);
        self.hausdorff_terms.extend(&other.hausdorff_terms);
    }

    pub fn scores(&self) -> Scores {
        let f = f1(self.counts);
        Scores {
            counts: self.counts,
            precision: f.precision,
            recall: f.recall,
            f1: f.f1,
            dice_pixel: dice_from_counts(
                self.intersection,
                self.gt_foreground,
                self.seg_foreground,
            ),
            dice_obj: self.dice_terms.combine(1.0),
            hausdorff_obj: self.hausdorff_terms.combine(0.0),
            ari: self.pairs.ari().ok(),
        }
    }
}

/// Computes the additive statistics of one image pair.
pub fn evaluate_image(
    gt: &LabelMap,
    seg: &LabelMap,
    config: &EvalConfig,
) -> Result<ImageEvaluation> {
    let prepare = |m: &LabelMap| {
        if config.split_components {
            m.split_components(config.connectivity)
        } else {
            m.relabel_sequential()
        }
    };
    let (gt, seg) = (prepare(gt), prepare(seg));
    let table = OverlapTable::new(&gt, &seg)?;
    let corr = maximal_overlap(&table);
    Ok(ImageEvaluation {
        n_gt: table.n_gt(),
        n_seg: table.n_seg(),
        counts: detection_counts(&table, &corr, config.tp_threshold),
        intersection: table.intersection_area(),
        gt_foreground: table.gt_foreground(),
        seg_foreground: table.seg_foreground(),
        pairs: PairCounts::from_table(&table, config.ari),
        dice_terms: object_dice_terms(&table, &corr),
        hausdorff_terms: object_hausdorff_terms(
            &gt,
            &seg,
            &corr,
            config.hausdorff,
            config.boundary_connectivity,
        )?,
    })
}

/// Evaluates a dataset: per-image rows in input order plus pooled metrics.
///
/// `jobs` bounds the number of worker threads (`0` lets the pool decide).
/// Results are identical for every `jobs` value.
pub fn evaluate(pairs: &[ImagePair], config: &EvalConfig, jobs: usize) -> Result<MetricReport> {
    use rayon::prelude::*;

    config.validate()?;
    let mut seen = std::collections::BTreeSet::new();
    for p in pairs {
        if !seen.insert(p.id.as_str()) {
            return Err(GlasError::Validation(format!(
                "duplicate image id `{}`",
                p.id
            )));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| GlasError::Validation(format!("cannot start {jobs} workers: {e}")))?;
    let results: Vec<Result<ImageEvaluation>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|p| evaluate_image(&p.gt, &p.seg, config))
            .collect()
    });

    let mut evaluations = Vec::with_capacity(pairs.len());
    for (pair, result) in pairs.iter().zip(results) {
        evaluations.push(result.map_err(|e| GlasError::Image {
            id: pair.id.clone(),
            source: Box::new(e),
        })?);
    }

    // pooled fold in id order so the result never depends on input order
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| pairs[a].id.cmp(&pairs[b].id));
    let mut pooled = ImageEvaluation::default();
    for &i in &order {
        pooled.merge(&evaluations[i]);
    }

    let per_image = pairs
        .iter()
        .zip(&evaluations)
        .map(|(p, e)| ImageMetrics {
            id: p.id.clone(),
            n_gt: e.n_gt,
            n_seg: e.n_seg,
            scores: e.scores(),
        })
        .collect();
    Ok(MetricReport {
        config: *config,
        per_image,
        pooled: PooledMetrics {
            n_images: pairs.len(),
            n_gt: pooled.n_gt,
            n_seg: pooled.n_seg,
            scores: pooled.scores(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(id: &str, gt: &[Vec<i64>], seg: &[Vec<i64>]) -> ImagePair {
        ImagePair {
            id: id.into(),
            gt: LabelMap::from_grid(gt).unwrap(),
            seg: LabelMap::from_grid(seg).unwrap(),
        }
    }

    #[test]
    fn identity_dataset_is_perfect() {
        let m = vec![vec![1, 1, 0, 2], vec![0, 0, 0, 2], vec![3, 0, 0, 0]];
        let pairs = vec![pair("a", &m, &m), pair("b", &m, &m)];
        let r = evaluate(&pairs, &EvalConfig::default(), 1).unwrap();
        let s = &r.pooled.scores;
        assert_eq!(
            (s.f1, s.dice_obj, s.hausdorff_obj, s.ari),
            (1.0, 1.0, 0.0, Some(1.0))
        );
        assert_eq!(s.dice_pixel, 1.0);
    }

    #[test]
    fn pooled_counts_are_sums() {
        let a = pair("a", &[vec![1, 1, 0, 2]], &[vec![1, 0, 0, 0]]);
        let b = pair("b", &[vec![1, 1, 1, 0]], &[vec![0, 0, 5, 5]]);
        let cfg = EvalConfig::default();
        let r = evaluate(&[a.clone(), b.clone()], &cfg, 2).unwrap();
        let ca = evaluate(&[a], &cfg, 1).unwrap().pooled.scores.counts;
        let cb = evaluate(&[b], &cfg, 1).unwrap().pooled.scores.counts;
        assert_eq!(r.pooled.scores.counts, ca + cb);
        assert_eq!(r.per_image[0].scores.counts, ca);
    }

    #[test]
    fn errors_name_the_image() {
        let ok = pair("ok", &[vec![1]], &[vec![1]]);
        let bad = pair("bad", &[vec![1, 0]], &[vec![1]]);
        let err = evaluate(&[ok, bad], &EvalConfig::default(), 1).unwrap_err();
        assert!(err.to_string().contains("bad"), "{err}");
        assert_eq!(err.kind(), "shape");
    }

    #[test]
    fn rejects_duplicate_ids_and_bad_threshold() {
        let p = pair("x", &[vec![1]], &[vec![1]]);
        assert!(evaluate(&[p.clone(), p.clone()], &EvalConfig::default(), 1).is_err());
        let cfg = EvalConfig {
            tp_threshold: 1.5,
            ..EvalConfig::default()
        };
        assert!(evaluate(&[p], &cfg, 1).is_err());
    }

    #[test]
    fn split_components_changes_object_count() {
        let gt = vec![vec![1, 0, 1]];
        let r = evaluate(
            &[pair("a", &gt, &gt)],
            &EvalConfig {
                split_components: true,
                ..EvalConfig::default()
            },
            1,
        )
        .unwrap();
        assert_eq!(r.pooled.n_gt, 2);
    }
}
