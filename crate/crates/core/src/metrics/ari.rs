//! Adjusted Rand index from the overlap contingency.

use std::collections::BTreeMap;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::error::{GlasError, Result};
use crate::matching::OverlapTable;

/// Which pixels take part in the two partitions being compared.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AriPolicy {
    /// Background is one extra cluster in each partition; every pixel counts.
    #[default]
    Include,
    /// Only pixels that are foreground in both maps are compared.
    Exclude,
}

impl std::str::FromStr for AriPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "include" => Ok(AriPolicy::Include),
            "exclude" => Ok(AriPolicy::Exclude),
            other => Err(format!(
                "ARI policy must be include or exclude, got `{other}`"
            )),
        }
    }
}

/// Pair statistics sufficient for the adjusted Rand index.
///
/// Counts are additive over disjoint pixel domains, so images are pooled by
/// summing them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    /// `sum_ij C(n_ij, 2)`
    pub same_both: u128,
    /// `sum_i C(n_i., 2)`
    pub same_gt: u128,
    /// `sum_j C(n_.j, 2)`
    pub same_seg: u128,
    /// Number of pixels covered by the partitions.
    pub pixels: u64,
}

#[inline]
fn comb2(n: u64) -> u128 {
    let n = n as u128;
    n * n.saturating_sub(1) / 2
}

impl PairCounts {
    pub fn from_table(table: &OverlapTable, policy: AriPolicy) -> PairCounts {
        let mut rows: BTreeMap<u32, u64> = BTreeMap::new();
        let mut cols: BTreeMap<u32, u64> = BTreeMap::new();
        let mut same_both = 0u128;
        let mut inter = 0u64;
        for ((g, s), n) in table.entries() {
            same_both += comb2(n);
            *rows.entry(g).or_default() += n;
            *cols.entry(s).or_default() += n;
            inter += n;
        }
        match policy {
            AriPolicy::Exclude => PairCounts {
                same_both,
                same_gt: rows.values().map(|&n| comb2(n)).sum(),
                same_seg: cols.values().map(|&n| comb2(n)).sum(),
                pixels: inter,
            },
            AriPolicy::Include => {
                let n = table.total_pixels();
                let (gt_fg, seg_fg) = (table.gt_foreground(), table.seg_foreground());
                // object cells against the other map's background cluster
                for (g, &area) in table.gt_areas() {
                    same_both += comb2(area - rows.get(g).copied().unwrap_or(0));
                }
                for (s, &area) in table.seg_areas() {
                    same_both += comb2(area - cols.get(s).copied().unwrap_or(0));
                }
                same_both += comb2(n + inter - gt_fg - seg_fg);
                PairCounts {
                    same_both,
                    same_gt: table.gt_areas().values().map(|&a| comb2(a)).sum::<u128>()
                        + comb2(n - gt_fg),
                    same_seg: table.seg_areas().values().map(|&a| comb2(a)).sum::<u128>()
                        + comb2(n - seg_fg),
                    pixels: n,
                }
            }
        }
    }

    /// Hubert–Arabie adjusted Rand index; 1 when the partitions coincide.
    pub fn ari(&self) -> Result<f64> {
        if self.pixels < 2 {
            return Err(GlasError::UndefinedInput(format!(
                "adjusted Rand index needs at least 2 covered pixels, got {}",
                self.pixels
            )));
        }
        let total = comb2(self.pixels) as f64;
        let (a, b, c) = (
            self.same_both as f64,
            self.same_gt as f64,
            self.same_seg as f64,
        );
        let expected = b * c / total;
        let denom = 0.5 * (b + c) - expected;
        if denom == 0.0 {
            // only reachable when both partitions are all-one-cluster or all-singletons
            return Ok(1.0);
        }
        Ok((a - expected) / denom)
    }
}

impl AddAssign for PairCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.same_both += rhs.same_both;
        self.same_gt += rhs.same_gt;
        self.same_seg += rhs.same_seg;
        self.pixels += rhs.pixels;
    }
}

/// Adjusted Rand index of one image pair.
pub fn adjusted_rand(table: &OverlapTable, policy: AriPolicy) -> Result<f64> {
    PairCounts::from_table(table, policy).ari()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labelmap::LabelMap;

    fn table(g: &[Vec<i64>], s: &[Vec<i64>]) -> OverlapTable {
        OverlapTable::new(
            &LabelMap::from_grid(g).unwrap(),
            &LabelMap::from_grid(s).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identical_partitions_score_one() {
        let m = vec![vec![1, 1, 0], vec![2, 0, 3]];
        for policy in [AriPolicy::Include, AriPolicy::Exclude] {
            assert_eq!(adjusted_rand(&table(&m, &m), policy).unwrap(), 1.0);
        }
    }

    #[test]
    fn rows_versus_columns_on_two_by_two() {
        // gt: top row object; seg: left column object. Pairs enumerated by hand:
        // same-gt pairs {tl,tr},{bl,br}; same-seg pairs {tl,bl},{tr,br}; none shared.
        let t = table(&[vec![1, 1], vec![0, 0]], &[vec![1, 0], vec![1, 0]]);
        let pc = PairCounts::from_table(&t, AriPolicy::Include);
        assert_eq!(
            (pc.same_both, pc.same_gt, pc.same_seg, pc.pixels),
            (0, 2, 2, 4)
        );
        // (0 - 2*2/6) / (2 - 4/6) = -0.5
        assert!((adjusted_rand(&t, AriPolicy::Include).unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn too_few_pixels_is_undefined() {
        let t = table(&[vec![1, 0]], &[vec![0, 1]]);
        assert!(matches!(
            adjusted_rand(&t, AriPolicy::Exclude),
            Err(GlasError::UndefinedInput(_))
        ));
    }
}
