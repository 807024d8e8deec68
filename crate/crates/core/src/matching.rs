//! Object correspondence between a ground-truth and a segmented label map.
//!
//! [`OverlapTable`] is the sparse pixel contingency `n_ij` between objects,
//! with object areas as marginals. [`Correspondence`] holds the two
//! maximal-overlap maps: for every segmented object the ground-truth object
//! it overlaps most (or none), and vice versa. The maps are independent
//! argmaxes, not a one-to-one assignment.

use std::collections::BTreeMap;

use crate::error::{GlasError, Result};
use crate::labelmap::LabelMap;

/// Sparse pixel-overlap contingency between two label maps of one image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapTable {
    /// `(gt label, seg label) -> overlapping pixel count`, zero entries absent.
    entries: BTreeMap<(u32, u32), u64>,
    gt_areas: BTreeMap<u32, u64>,
    seg_areas: BTreeMap<u32, u64>,
    total_pixels: u64,
}

impl OverlapTable {
    /// Exact pixelwise contingency; the maps must share dimensions.
    pub fn new(gt: &LabelMap, seg: &LabelMap) -> Result<Self> {
        if gt.width() != seg.width() || gt.height() != seg.height() {
            return Err(GlasError::Shape(format!(
                "ground truth is {}x{} but segmentation is {}x{}",
                gt.width(),
                gt.height(),
                seg.width(),
                seg.height()
            )));
        }
        let mut entries = BTreeMap::new();
        for (&g, &s) in gt.labels().iter().zip(seg.labels()) {
            if g != 0 && s != 0 {
                *entries.entry((g, s)).or_insert(0u64) += 1;
            }
        }
        Ok(OverlapTable {
            entries,
            gt_areas: gt.objects().iter().map(|o| (o.label, o.area)).collect(),
            seg_areas: seg.objects().iter().map(|o| (o.label, o.area)).collect(),
            total_pixels: (gt.width() * gt.height()) as u64,
        })
    }

    pub fn n_gt(&self) -> usize {
        self.gt_areas.len()
    }

    pub fn n_seg(&self) -> usize {
        self.seg_areas.len()
    }

    pub fn total_pixels(&self) -> u64 {
        self.total_pixels
    }

    pub fn overlap(&self, gt: u32, seg: u32) -> u64 {
        self.entries.get(&(gt, seg)).copied().unwrap_or(0)
    }

    /// Non-zero cells in `(gt, seg)` order.
    pub fn entries(&self) -> impl Iterator<Item = ((u32, u32), u64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn gt_areas(&self) -> &BTreeMap<u32, u64> {
        &self.gt_areas
    }

    pub fn seg_areas(&self) -> &BTreeMap<u32, u64> {
        &self.seg_areas
    }

    pub fn gt_area(&self, label: u32) -> u64 {
        self.gt_areas.get(&label).copied().unwrap_or(0)
    }

    pub fn seg_area(&self, label: u32) -> u64 {
        self.seg_areas.get(&label).copied().unwrap_or(0)
    }

    /// Pixels that are foreground in both maps.
    pub fn intersection_area(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn gt_foreground(&self) -> u64 {
        self.gt_areas.values().sum()
    }

    pub fn seg_foreground(&self) -> u64 {
        self.seg_areas.values().sum()
    }

    /// Ground-truth pixels not covered by any segmented object, per object.
    pub fn gt_uncovered(&self, gt: u32) -> u64 {
        let covered: u64 = self
            .entries
            .range((gt, 0)..=(gt, u32::MAX))
            .map(|(_, &v)| v)
            .sum();
        self.gt_area(gt) - covered
    }

    /// Segmented pixels lying on ground-truth background, per object.
    pub fn seg_uncovered(&self, seg: u32) -> u64 {
        let covered: u64 = self
            .entries
            .iter()
            .filter(|(&(_, s), _)| s == seg)
            .map(|(_, &v)| v)
            .sum();
        self.seg_area(seg) - covered
    }
}

/// Maximal-overlap partner maps; `None` stands for the empty object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    /// Segmented label -> best-overlapping ground-truth label.
    pub g_star: BTreeMap<u32, Option<u32>>,
    /// Ground-truth label -> best-overlapping segmented label.
    pub s_star: BTreeMap<u32, Option<u32>>,
}

impl Correspondence {
    pub fn gt_partner(&self, gt: u32) -> Option<u32> {
        self.s_star.get(&gt).copied().flatten()
    }

    pub fn seg_partner(&self, seg: u32) -> Option<u32> {
        self.g_star.get(&seg).copied().flatten()
    }
}

/// Picks, for every object, the opposite-set object with the largest overlap.
/// Ties go to the lowest partner label; objects with no overlap map to `None`.
pub fn maximal_overlap(table: &OverlapTable) -> Correspondence {
    let mut best_for_gt: BTreeMap<u32, (u64, u32)> = BTreeMap::new();
    let mut best_for_seg: BTreeMap<u32, (u64, u32)> = BTreeMap::new();
    // entries iterate in ascending (gt, seg), so strict `>` keeps the lowest label on ties
    for ((g, s), n) in table.entries() {
        let slot = best_for_gt.entry(g).or_insert((n, s));
        if n > slot.0 {
            *slot = (n, s);
        }
        let slot = best_for_seg.entry(s).or_insert((n, g));
        if n > slot.0 || (n == slot.0 && g < slot.1) {
            *slot = (n, g);
        }
    }
    Correspondence {
        s_star: table
            .gt_areas()
            .keys()
            .map(|&g| (g, best_for_gt.get(&g).map(|&(_, s)| s)))
            .collect(),
        g_star: table
            .seg_areas()
            .keys()
            .map(|&s| (s, best_for_seg.get(&s).map(|&(_, g)| g)))
            .collect(),
    }
}

/// Nearest opposite-set object for an object without an overlap partner.
///
/// `distance` is evaluated for every candidate label; the minimum wins and
/// ties go to the lowest label. Returns `Ok(None)` when there are no
/// candidates, i.e. the image has no counterpart objects at all.
pub fn hausdorff_fallback<F>(candidates: &[u32], mut distance: F) -> Result<Option<(u32, f64)>>
where
    F: FnMut(u32) -> Result<f64>,
{
    let mut best: Option<(u32, f64)> = None;
    for &c in candidates {
        let d = distance(c)?;
        best = match best {
            Some((bl, bd)) if bd < d || (bd == d && bl < c) => Some((bl, bd)),
            _ => Some((c, d)),
        };
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lm(rows: &[&[u32]]) -> LabelMap {
        let rows: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| v as i64).collect())
            .collect();
        LabelMap::from_grid(&rows).unwrap()
    }

    #[test]
    fn identity_table_is_diagonal() {
        let m = lm(&[&[1, 1, 1, 0], &[1, 1, 0, 2], &[0, 0, 2, 2]]);
        let t = OverlapTable::new(&m, &m).unwrap();
        let cells: Vec<_> = t.entries().collect();
        assert_eq!(cells, vec![((1, 1), 5), ((2, 2), 3)]);
        assert_eq!(t.total_pixels(), 12);
    }

    #[test]
    fn disjoint_objects_have_no_entries() {
        let g = lm(&[&[1, 1, 0, 0]]);
        let s = lm(&[&[0, 0, 3, 3]]);
        let t = OverlapTable::new(&g, &s).unwrap();
        assert_eq!(t.entries().count(), 0);
        let c = maximal_overlap(&t);
        assert_eq!(c.g_star[&3], None);
        assert_eq!(c.s_star[&1], None);
    }

    #[test]
    fn dimension_mismatch_is_shape_error() {
        let g = lm(&[&[1, 1]]);
        let s = lm(&[&[1], &[1]]);
        assert!(matches!(
            OverlapTable::new(&g, &s),
            Err(GlasError::Shape(_))
        ));
    }

    #[test]
    fn strict_argmax_and_tie_rule() {
        // S=9 overlaps G1 by 10 px and G2 by 4 px
        let mut row = vec![1u32; 10];
        row.extend([2; 4]);
        let g = lm(&[&row]);
        let s = lm(&[&[9; 14]]);
        let c = maximal_overlap(&OverlapTable::new(&g, &s).unwrap());
        assert_eq!(c.g_star[&9], Some(1));

        // 6 vs 6, lower label wins regardless of scan order
        let mut row = vec![5u32; 6];
        row.extend([2; 6]);
        let g = lm(&[&row]);
        let s = lm(&[&[7; 12]]);
        let c = maximal_overlap(&OverlapTable::new(&g, &s).unwrap());
        assert_eq!(c.g_star[&7], Some(2));
        assert_eq!(c.s_star[&5], Some(7));
    }

    #[test]
    fn uncovered_counts() {
        let g = lm(&[&[1, 1, 1, 0]]);
        let s = lm(&[&[0, 2, 2, 2]]);
        let t = OverlapTable::new(&g, &s).unwrap();
        assert_eq!(t.gt_uncovered(1), 1);
        assert_eq!(t.seg_uncovered(2), 1);
        assert_eq!(t.intersection_area(), 2);
    }

    #[test]
    fn fallback_picks_minimum_with_label_ties() {
        let dist = |l: u32| {
            Ok(match l {
                3 => 12.0,
                5 => 5.0,
                8 => 5.0,
                _ => 99.0,
            })
        };
        assert_eq!(hausdorff_fallback(&[3], dist).unwrap(), Some((3, 12.0)));
        assert_eq!(hausdorff_fallback(&[3, 8], dist).unwrap(), Some((8, 5.0)));
        assert_eq!(
            hausdorff_fallback(&[8, 3, 5], dist).unwrap(),
            Some((5, 5.0))
        );
        assert_eq!(hausdorff_fallback(&[], dist).unwrap(), None);
    }
}
