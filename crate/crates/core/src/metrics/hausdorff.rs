//! Pairwise and object-level Hausdorff distance.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{GlasError, Result};
use crate::labelmap::{Connectivity, LabelMap, Pixel, Region};
use crate::matching::{hausdorff_fallback, maximal_overlap, Correspondence, OverlapTable};

use super::distance::hausdorff_sq;
use super::terms::{ObjectTerm, ObjectTerms};

/// Which pixels of each object the Hausdorff distance is taken over.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HausdorffMode {
    /// Inner boundary pixels of each object.
    #[default]
    Boundary,
    /// Every pixel of each object.
    Full,
}

impl std::str::FromStr for HausdorffMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "boundary" => Ok(HausdorffMode::Boundary),
            "full" => Ok(HausdorffMode::Full),
            other => Err(format!(
                "Hausdorff mode must be boundary or full, got `{other}`"
            )),
        }
    }
}

fn point_set(region: &Region, mode: HausdorffMode, connectivity: Connectivity) -> Region {
    match mode {
        HausdorffMode::Boundary => region.boundary(connectivity),
        HausdorffMode::Full => region.clone(),
    }
}

/// Symmetric Hausdorff distance between two pixel sets, with 4-connected
/// boundaries in [`HausdorffMode::Boundary`].
pub fn hausdorff(a: &Region, b: &Region, mode: HausdorffMode) -> Result<f64> {
    hausdorff_with(a, b, mode, Connectivity::Four)
}

/// [`hausdorff`] with an explicit boundary connectivity.
pub fn hausdorff_with(
    a: &Region,
    b: &Region,
    mode: HausdorffMode,
    boundary_connectivity: Connectivity,
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(GlasError::UndefinedInput(
            "Hausdorff distance of an empty pixel set".into(),
        ));
    }
    let pa = point_set(a, mode, boundary_connectivity);
    let pb = point_set(b, mode, boundary_connectivity);
    Ok((hausdorff_sq(pa.pixels(), pb.pixels()) as f64).sqrt())
}

/// Memoised pairwise distances between the objects of one image pair.
struct PairDistances {
    gt_points: BTreeMap<u32, Vec<Pixel>>,
    seg_points: BTreeMap<u32, Vec<Pixel>>,
    cache: HashMap<(u32, u32), f64>,
}

impl PairDistances {
    fn new(
        gt: &LabelMap,
        seg: &LabelMap,
        mode: HausdorffMode,
        connectivity: Connectivity,
    ) -> Result<Self> {
        let points = |m: &LabelMap| -> Result<BTreeMap<u32, Vec<Pixel>>> {
            m.objects()
                .iter()
                .map(|o| {
                    let r = point_set(&m.region(o.label)?, mode, connectivity);
                    Ok((o.label, r.pixels().to_vec()))
                })
                .collect()
        };
        Ok(PairDistances {
            gt_points: points(gt)?,
            seg_points: points(seg)?,
            cache: HashMap::new(),
        })
    }

    fn get(&mut self, g: u32, s: u32) -> f64 {
        if let Some(&d) = self.cache.get(&(g, s)) {
            return d;
        }
        let d = (hausdorff_sq(&self.gt_points[&g], &self.seg_points[&s]) as f64).sqrt();
        self.cache.insert((g, s), d);
        d
    }
}

/// Per-object Hausdorff terms for one image.
///
/// Each object is measured against its maximal-overlap partner. An object
/// without a partner is measured against the nearest opposite object in the
/// image; if the image has no opposite objects at all, the term is the image
/// diagonal.
pub fn object_hausdorff_terms(
    gt: &LabelMap,
    seg: &LabelMap,
    corr: &Correspondence,
    mode: HausdorffMode,
    boundary_connectivity: Connectivity,
) -> Result<ObjectTerms> {
    let mut dist = PairDistances::new(gt, seg, mode, boundary_connectivity)?;
    let diagonal = gt.diagonal();
    let gt_labels: Vec<u32> = gt.objects().iter().map(|o| o.label).collect();
    let seg_labels: Vec<u32> = seg.objects().iter().map(|o| o.label).collect();

    let mut terms = ObjectTerms::default();
    for o in gt.objects() {
        let value = match corr.gt_partner(o.label) {
            Some(s) => dist.get(o.label, s),
            None => hausdorff_fallback(&seg_labels, |s| Ok(dist.get(o.label, s)))?
                .map_or(diagonal, |(_, d)| d),
        };
        terms.gt.push(ObjectTerm {
            area: o.area,
            value,
        });
    }
    for o in seg.objects() {
        let value = match corr.seg_partner(o.label) {
            Some(g) => dist.get(g, o.label),
            None => hausdorff_fallback(&gt_labels, |g| Ok(dist.get(g, o.label)))?
                .map_or(diagonal, |(_, d)| d),
        };
        terms.seg.push(ObjectTerm {
            area: o.area,
            value,
        });
    }
    Ok(terms)
}

/// Object-level Hausdorff distance of a single image pair.
pub fn object_hausdorff(gt: &LabelMap, seg: &LabelMap, mode: HausdorffMode) -> Result<f64> {
    object_hausdorff_pooled(&[(gt, seg)], mode)
}

/// Object-level Hausdorff distance over several images with globally
/// normalised area weights.
pub fn object_hausdorff_pooled(
    pairs: &[(&LabelMap, &LabelMap)],
    mode: HausdorffMode,
) -> Result<f64> {
    let mut terms = ObjectTerms::default();
    for (gt, seg) in pairs {
        let (gt, seg) = (gt.relabel_sequential(), seg.relabel_sequential());
        let table = OverlapTable::new(&gt, &seg)?;
        let corr = maximal_overlap(&table);
        terms.extend(&object_hausdorff_terms(
            &gt,
            &seg,
            &corr,
            mode,
            Connectivity::Four,
        )?);
    }
    Ok(terms.combine(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(w: usize, h: usize, pixels: &[(usize, usize)]) -> Region {
        Region::new(
            w,
            h,
            pixels.iter().map(|&(r, c)| Pixel::new(r, c)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_sets_are_at_zero() {
        let a = region(5, 5, &[(1, 1), (1, 2), (2, 1), (2, 2)]);
        for mode in [HausdorffMode::Boundary, HausdorffMode::Full] {
            assert_eq!(hausdorff(&a, &a, mode).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_pixels() {
        let a = region(10, 10, &[(0, 0)]);
        let b = region(10, 10, &[(3, 4)]);
        assert_eq!(hausdorff(&a, &b, HausdorffMode::Full).unwrap(), 5.0);
    }

    #[test]
    fn empty_set_is_undefined() {
        let a = region(4, 4, &[(0, 0)]);
        let e = region(4, 4, &[]);
        assert!(matches!(
            hausdorff(&a, &e, HausdorffMode::Full),
            Err(GlasError::UndefinedInput(_))
        ));
    }

    #[test]
    fn boundary_mode_ignores_interior() {
        // 5x5 filled square vs its 3x3 core: full mode sees the corner gap,
        // boundary mode compares outer ring to the core's ring
        let big: Vec<(usize, usize)> = (2..7).flat_map(|r| (2..7).map(move |c| (r, c))).collect();
        let small: Vec<(usize, usize)> = (3..6).flat_map(|r| (3..6).map(move |c| (r, c))).collect();
        let (a, b) = (region(9, 9, &big), region(9, 9, &small));
        assert_eq!(hausdorff(&a, &b, HausdorffMode::Full).unwrap(), 2f64.sqrt());
        assert_eq!(
            hausdorff(&a, &b, HausdorffMode::Boundary).unwrap(),
            2f64.sqrt()
        );
        let dot = region(9, 9, &[(4, 4)]);
        assert_eq!(
            hausdorff(&a, &dot, HausdorffMode::Full).unwrap(),
            8f64.sqrt()
        );
        assert_eq!(
            hausdorff(&a, &dot, HausdorffMode::Boundary).unwrap(),
            8f64.sqrt()
        );
        // a hollow-centre probe: b's boundary is everything but its centre pixel
        assert_eq!(
            hausdorff(&b, &dot, HausdorffMode::Boundary).unwrap(),
            2f64.sqrt()
        );
    }

    #[test]
    fn object_level_single_pair_collapses() {
        let g = LabelMap::from_grid(&[vec![1, 1, 0, 0, 0, 0, 0, 0]]).unwrap();
        let s = LabelMap::from_grid(&[vec![0, 1, 1, 1, 1, 1, 1, 1]]).unwrap();
        let h = hausdorff(
            &g.region(1).unwrap(),
            &s.region(1).unwrap(),
            HausdorffMode::Boundary,
        )
        .unwrap();
        assert_eq!(h, 6.0);
        assert_eq!(
            object_hausdorff(&g, &s, HausdorffMode::Boundary).unwrap(),
            h
        );
        assert_eq!(
            object_hausdorff(&g, &g, HausdorffMode::Boundary).unwrap(),
            0.0
        );
    }

    #[test]
    fn missing_segmentation_costs_the_diagonal() {
        let g = LabelMap::from_grid(&[vec![0, 1, 1], vec![0, 0, 0], vec![0, 0, 0], vec![0; 3]])
            .unwrap();
        let s = LabelMap::empty(3, 4);
        assert_eq!(
            object_hausdorff(&g, &s, HausdorffMode::Boundary).unwrap(),
            5.0
        );
        assert_eq!(object_hausdorff(&s, &g, HausdorffMode::Full).unwrap(), 5.0);
        assert_eq!(object_hausdorff(&s, &s, HausdorffMode::Full).unwrap(), 0.0);
    }

    #[test]
    fn unmatched_object_falls_back_to_nearest() {
        // G1 overlaps S1; S2 overlaps nothing and is nearest (in Hausdorff) to G1
        let g = LabelMap::from_grid(&[vec![1, 1, 0, 0, 0, 0]]).unwrap();
        let s = LabelMap::from_grid(&[vec![1, 1, 0, 0, 2, 0]]).unwrap();
        // gt side: H(G1,S1)=0; seg side: S1->0, S2->H(G1,S2)=max(4,3)=4
        // weights: gt 1.0*0; seg (2*0 + 1*4)/3
        let v = object_hausdorff(&g, &s, HausdorffMode::Full).unwrap();
        assert!((v - 0.5 * (4.0 / 3.0)).abs() < 1e-15);
    }
}
