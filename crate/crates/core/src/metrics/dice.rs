//! Pixel-level and object-level Dice.

use crate::error::Result;
use crate::labelmap::{LabelMap, Region};
use crate::matching::{maximal_overlap, Correspondence, OverlapTable};

use super::terms::{ObjectTerm, ObjectTerms};

/// `2|A ∩ B| / (|A| + |B|)` from counts; two empty sets score 1.
pub fn dice_from_counts(intersection: u64, a: u64, b: u64) -> f64 {
    if a + b == 0 {
        1.0
    } else {
        2.0 * intersection as f64 / (a + b) as f64
    }
}

/// Dice between two pixel sets.
pub fn dice(a: &Region, b: &Region) -> f64 {
    let (pa, pb) = (a.pixels(), b.pixels());
    let (mut i, mut j, mut inter) = (0, 0, 0u64);
    while i < pa.len() && j < pb.len() {
        match pa[i].cmp(&pb[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    dice_from_counts(inter, pa.len() as u64, pb.len() as u64)
}

/// Per-object Dice against the maximal-overlap partner (0 against the empty object).
pub fn object_dice_terms(table: &OverlapTable, corr: &Correspondence) -> ObjectTerms {
    let gt = table
        .gt_areas()
        .iter()
        .map(|(&g, &area)| {
            let value = corr.gt_partner(g).map_or(0.0, |s| {
                dice_from_counts(table.overlap(g, s), area, table.seg_area(s))
            });
            ObjectTerm { area, value }
        })
        .collect();
    let seg = table
        .seg_areas()
        .iter()
        .map(|(&s, &area)| {
            let value = corr.seg_partner(s).map_or(0.0, |g| {
                dice_from_counts(table.overlap(g, s), table.gt_area(g), area)
            });
            ObjectTerm { area, value }
        })
        .collect();
    ObjectTerms { gt, seg }
}

/// Object-level Dice of a single image pair.
pub fn object_dice(gt: &LabelMap, seg: &LabelMap) -> Result<f64> {
    object_dice_pooled(&[(gt, seg)])
}

/// Object-level Dice over several images, with weights normalised over the
/// objects of all images. Objects are only ever matched within their image.
pub fn object_dice_pooled(pairs: &[(&LabelMap, &LabelMap)]) -> Result<f64> {
    let mut terms = ObjectTerms::default();
    for (gt, seg) in pairs {
        let (gt, seg) = (gt.relabel_sequential(), seg.relabel_sequential());
        let table = OverlapTable::new(&gt, &seg)?;
        terms.extend(&object_dice_terms(&table, &maximal_overlap(&table)));
    }
    Ok(terms.combine(1.0))
}
