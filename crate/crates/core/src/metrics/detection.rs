//! Detection counts under the overlap-fraction true-positive rule, and F1.

use std::collections::BTreeSet;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::matching::{Correspondence, OverlapTable};

/// True positives, false positives and false negatives.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Add for DetectionCounts {
    type Output = DetectionCounts;

    fn add(self, rhs: Self) -> Self {
        DetectionCounts {
            tp: self.tp + rhs.tp,
            fp: self.fp + rhs.fp,
            fn_: self.fn_ + rhs.fn_,
        }
    }
}

impl AddAssign for DetectionCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// F1 together with the precision and recall it was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1Score {
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Counts TP/FP/FN for one image.
///
/// A segmented object is a true positive when it covers at least `threshold`
/// of the area of its maximal-overlap ground-truth object and that object has
/// not already been claimed. Candidates are processed by descending overlap,
/// then ascending segmented label, so every ground-truth object backs at most
/// one true positive.
pub fn detection_counts(
    table: &OverlapTable,
    corr: &Correspondence,
    threshold: f64,
) -> DetectionCounts {
    let mut candidates: Vec<(u64, u32, u32)> = corr
        .g_star
        .iter()
        .filter_map(|(&s, &g)| {
            let g = g?;
            let n = table.overlap(g, s);
            (n as f64 >= threshold * table.gt_area(g) as f64).then_some((n, s, g))
        })
        .collect();
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut claimed = BTreeSet::new();
    let tp = candidates
        .iter()
        .filter(|&&(_, _, g)| claimed.insert(g))
        .count() as u64;
    DetectionCounts {
        tp,
        fp: table.n_seg() as u64 - tp,
        fn_: table.n_gt() as u64 - tp,
    }
}

/// F1 from detection counts. With no true positives the score is 0, except
/// when there is nothing at all to detect or report, which scores 1.
pub fn f1(counts: DetectionCounts) -> F1Score {
    let DetectionCounts { tp, fp, fn_ } = counts;
    if tp == 0 {
        let v = if fp == 0 && fn_ == 0 { 1.0 } else { 0.0 };
        return F1Score {
            f1: v,
            precision: v,
            recall: v,
        };
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    F1Score {
        f1: 2.0 * precision * recall / (precision + recall),
        precision,
        recall,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labelmap::LabelMap;
    use crate::matching::maximal_overlap;

    fn counts(gt: &[&[i64]], seg: &[&[i64]]) -> DetectionCounts {
        let g = LabelMap::from_grid(&gt.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        let s = LabelMap::from_grid(&seg.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        let t = OverlapTable::new(&g, &s).unwrap();
        detection_counts(&t, &maximal_overlap(&t), 0.5)
    }

    #[test]
    fn identity_is_all_tp() {
        let m: &[&[i64]] = &[&[1, 1, 0, 2], &[0, 3, 0, 2]];
        assert_eq!(
            counts(m, m),
            DetectionCounts {
                tp: 3,
                fp: 0,
                fn_: 0
            }
        );
    }

    #[test]
    fn below_half_is_fp_and_fn() {
        // seg covers 2 of 5 pixels (40%)
        let g: &[&[i64]] = &[&[1, 1, 1, 1, 1]];
        let s: &[&[i64]] = &[&[4, 4, 0, 0, 0]];
        assert_eq!(
            counts(g, s),
            DetectionCounts {
                tp: 0,
                fp: 1,
                fn_: 1
            }
        );
    }

    #[test]
    fn one_ground_truth_backs_one_tp() {
        // two halves of the same G, each exactly 50%
        let g: &[&[i64]] = &[&[1, 1, 1, 1, 1, 1, 1, 1]];
        let s: &[&[i64]] = &[&[2, 2, 2, 2, 3, 3, 3, 3]];
        assert_eq!(
            counts(g, s),
            DetectionCounts {
                tp: 1,
                fp: 1,
                fn_: 0
            }
        );
    }

    #[test]
    fn f1_examples() {
        let s = f1(DetectionCounts {
            tp: 2,
            fp: 1,
            fn_: 0,
        });
        assert!((s.precision - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.recall, 1.0);
        assert!((s.f1 - 0.8).abs() < 1e-15);
        assert_eq!(f1(DetectionCounts::default()).f1, 1.0);
        assert_eq!(
            f1(DetectionCounts {
                tp: 0,
                fp: 5,
                fn_: 3
            })
            .f1,
            0.0
        );
    }
}
