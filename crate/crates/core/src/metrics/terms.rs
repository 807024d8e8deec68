//! Area-weighted object terms shared by object-level Dice and Hausdorff.

use serde::{Deserialize, Serialize};

/// One object's contribution: its area (the weight) and its per-object score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectTerm {
    pub area: u64,
    pub value: f64,
}

/// Per-object scores for the ground-truth side and the segmented side.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectTerms {
    pub gt: Vec<ObjectTerm>,
    pub seg: Vec<ObjectTerm>,
}

impl ObjectTerms {
    /// Pools the objects of another image into this set.
    pub fn extend(&mut self, other: &ObjectTerms) {
        self.gt.extend_from_slice(&other.gt);
        self.seg.extend_from_slice(&other.seg);
    }

    /// `0.5 * (sum_i gamma_i v_i + sum_j sigma_j v_j)` with area-normalised weights.
    ///
    /// When both sides are empty the result is `empty_value`. When only one
    /// side is empty, its missing half mirrors the present side.
    pub fn combine(&self, empty_value: f64) -> f64 {
        match (weighted_mean(&self.gt), weighted_mean(&self.seg)) {
            (Some(g), Some(s)) => 0.5 * (g + s),
            (Some(v), None) | (None, Some(v)) => v,
            (None, None) => empty_value,
        }
    }
}

/// Area-weighted mean; terms are summed in sorted order so the result does
/// not depend on object or image order.
fn weighted_mean(terms: &[ObjectTerm]) -> Option<f64> {
    let total: u64 = terms.iter().map(|t| t.area).sum();
    if total == 0 {
        return None;
    }
    let mut products: Vec<f64> = terms.iter().map(|t| t.area as f64 * t.value).collect();
    products.sort_by(f64::total_cmp);
    Some(products.iter().sum::<f64>() / total as f64)
}
