//! Brute-force reference implementations and randomized cross-checks.
//!
//! Nothing here reuses the fast paths: distances are all-pairs, Rand
//! statistics come from enumerating pixel pairs, and object scores are
//! expanded term by term from raw label arrays.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{GlasError, Result};
use crate::labelmap::{Connectivity, LabelMap};
use crate::matching::OverlapTable;
use crate::metrics::{
    adjusted_rand, hausdorff_with, object_dice_pooled, object_hausdorff_pooled, AriPolicy,
    HausdorffMode,
};

/// Pixels carrying `label`, as `(row, col)`.
pub fn object_pixels(map: &LabelMap, label: u32) -> Vec<(usize, usize)> {
    let w = map.width();
    map.labels()
        .iter()
        .enumerate()
        .filter(|&(_, &l)| l == label)
        .map(|(i, _)| (i / w, i % w))
        .collect()
}

/// Pixels of the set with a neighbour outside the set or outside the image.
pub fn brute_boundary(
    points: &[(usize, usize)],
    width: usize,
    height: usize,
    eight: bool,
) -> Vec<(usize, usize)> {
    let inside = |r: isize, c: isize| {
        r >= 0
            && c >= 0
            && (r as usize) < height
            && (c as usize) < width
            && points.contains(&(r as usize, c as usize))
    };
    points
        .iter()
        .copied()
        .filter(|&(r, c)| {
            let (r, c) = (r as isize, c as isize);
            (-1..=1).any(|dr: isize| {
                (-1..=1).any(|dc: isize| {
                    let step = dr.abs() + dc.abs();
                    let considered = if eight { step >= 1 } else { step == 1 };
                    considered && !inside(r + dr, c + dc)
                })
            })
        })
        .collect()
}

/// All-pairs symmetric Hausdorff distance.
pub fn brute_hausdorff(a: &[(usize, usize)], b: &[(usize, usize)]) -> f64 {
    let d2 = |p: (usize, usize), q: (usize, usize)| {
        let dr = p.0 as f64 - q.0 as f64;
        let dc = p.1 as f64 - q.1 as f64;
        dr * dr + dc * dc
    };
    let directed = |x: &[(usize, usize)], y: &[(usize, usize)]| {
        x.iter()
            .map(|&p| y.iter().map(|&q| d2(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a)).sqrt()
}

/// Adjusted Rand index from an explicit enumeration of pixel pairs.
pub fn brute_ari(gt: &LabelMap, seg: &LabelMap, policy: AriPolicy) -> Option<f64> {
    let pixels: Vec<(u32, u32)> = gt
        .labels()
        .iter()
        .zip(seg.labels())
        .map(|(&g, &s)| (g, s))
        .filter(|&(g, s)| policy == AriPolicy::Include || (g != 0 && s != 0))
        .collect();
    let n = pixels.len();
    if n < 2 {
        return None;
    }
    let (mut both, mut same_g, mut same_s) = (0f64, 0f64, 0f64);
    for i in 0..n {
        for j in i + 1..n {
            let g = pixels[i].0 == pixels[j].0;
            let s = pixels[i].1 == pixels[j].1;
            both += (g && s) as u8 as f64;
            same_g += g as u8 as f64;
            same_s += s as u8 as f64;
        }
    }
    let total = (n * (n - 1) / 2) as f64;
    let expected = same_g * same_s / total;
    let max = 0.5 * (same_g + same_s);
    if max == expected {
        return Some(1.0);
    }
    Some((both - expected) / (max - expected))
}

/// Labels renumbered by first raster occurrence, as plain vectors.
fn raster_relabel(map: &LabelMap) -> Vec<u32> {
    let mut seen: Vec<u32> = Vec::new();
    map.labels()
        .iter()
        .map(|&l| {
            if l == 0 {
                return 0;
            }
            match seen.iter().position(|&x| x == l) {
                Some(i) => i as u32 + 1,
                None => {
                    seen.push(l);
                    seen.len() as u32
                }
            }
        })
        .collect()
}

/// Pooled object Dice and object Hausdorff by direct expansion of every term.
pub fn brute_object_scores(
    pairs: &[(&LabelMap, &LabelMap)],
    mode: HausdorffMode,
) -> Result<(f64, f64)> {
    // (area, dice, hausdorff) per object, per side
    let mut gt_terms: Vec<(f64, f64, f64)> = Vec::new();
    let mut seg_terms: Vec<(f64, f64, f64)> = Vec::new();
    for (gt_map, seg_map) in pairs {
        if (gt_map.width(), gt_map.height()) != (seg_map.width(), seg_map.height()) {
            return Err(GlasError::Shape("image pair dimensions differ".into()));
        }
        let (w, h) = (gt_map.width(), gt_map.height());
        let gt = raster_relabel(gt_map);
        let seg = raster_relabel(seg_map);
        let n_gt = gt.iter().copied().max().unwrap_or(0);
        let n_seg = seg.iter().copied().max().unwrap_or(0);
        let diag = ((w * w + h * h) as f64).sqrt();
        let pts = |labels: &[u32], l: u32| -> Vec<(usize, usize)> {
            let all: Vec<(usize, usize)> = (0..labels.len())
                .filter(|&i| labels[i] == l)
                .map(|i| (i / w, i % w))
                .collect();
            match mode {
                HausdorffMode::Full => all,
                HausdorffMode::Boundary => brute_boundary(&all, w, h, false),
            }
        };
        let overlap = |g: u32, s: u32| (0..w * h).filter(|&i| gt[i] == g && seg[i] == s).count();
        let area = |labels: &[u32], l: u32| labels.iter().filter(|&&x| x == l).count();
        let partner = |l: u32, other_n: u32, gt_side: bool| -> Option<u32> {
            let mut best: Option<(usize, u32)> = None;
            for o in 1..=other_n {
                let ov = if gt_side {
                    overlap(l, o)
                } else {
                    overlap(o, l)
                };
                if ov > 0 && best.is_none_or(|(b, _)| ov > b) {
                    best = Some((ov, o));
                }
            }
            best.map(|(_, o)| o)
        };
        for (side_gt, own, other, n_own, n_other, terms) in [
            (true, &gt, &seg, n_gt, n_seg, &mut gt_terms),
            (false, &seg, &gt, n_seg, n_gt, &mut seg_terms),
        ] {
            for l in 1..=n_own {
                let a = area(own, l);
                let p_own = pts(own, l);
                let (dice, haus) = match partner(l, n_other, side_gt) {
                    Some(o) => {
                        let ov = if side_gt {
                            overlap(l, o)
                        } else {
                            overlap(o, l)
                        };
                        let d = 2.0 * ov as f64 / (a + area(other, o)) as f64;
                        (d, brute_hausdorff(&p_own, &pts(other, o)))
                    }
                    None => {
                        let nearest = (1..=n_other)
                            .map(|o| brute_hausdorff(&p_own, &pts(other, o)))
                            .fold(f64::INFINITY, f64::min);
                        (0.0, if n_other == 0 { diag } else { nearest })
                    }
                };
                terms.push((a as f64, dice, haus));
            }
        }
    }
    let side = |terms: &[(f64, f64, f64)], pick: fn(&(f64, f64, f64)) -> f64| -> Option<f64> {
        let total: f64 = terms.iter().map(|t| t.0).sum();
        (total > 0.0).then(|| terms.iter().map(|t| t.0 / total * pick(t)).sum())
    };
    let combine = |pick: fn(&(f64, f64, f64)) -> f64, empty: f64| match (
        side(&gt_terms, pick),
        side(&seg_terms, pick),
    ) {
        (Some(g), Some(s)) => 0.5 * g + 0.5 * s,
        (Some(v), None) | (None, Some(v)) => v,
        (None, None) => empty,
    };
    Ok((combine(|t| t.1, 1.0), combine(|t| t.2, 0.0)))
}

/// Random label map made of overlapping discs and rectangles; later shapes
/// overwrite earlier ones, so objects may be fragmented.
pub fn random_label_map(
    width: usize,
    height: usize,
    objects: usize,
    rng: &mut impl Rng,
) -> LabelMap {
    let mut labels = vec![0u32; width * height];
    for k in 0..objects {
        let label = k as u32 + 1;
        let cy = rng.random_range(0..height) as isize;
        let cx = rng.random_range(0..width) as isize;
        let ry = rng.random_range(1..=(height / 3).max(1)) as isize;
        let rx = rng.random_range(1..=(width / 3).max(1)) as isize;
        let disc = rng.random_bool(0.5);
        for r in (cy - ry).max(0)..=(cy + ry).min(height as isize - 1) {
            for c in (cx - rx).max(0)..=(cx + rx).min(width as isize - 1) {
                let (dy, dx) = ((r - cy) as f64 / ry as f64, (c - cx) as f64 / rx as f64);
                if !disc || dy * dy + dx * dx <= 1.0 {
                    labels[r as usize * width + c as usize] = label;
                }
            }
        }
    }
    LabelMap::from_raw(width, height, labels).expect("dimensions match")
}

/// Which cross-check to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Hausdorff,
    Ari,
    Objdice,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hausdorff" => Ok(Suite::Hausdorff),
            "ari" => Ok(Suite::Ari),
            "objdice" => Ok(Suite::Objdice),
            other => Err(format!("unknown oracle suite `{other}`")),
        }
    }
}

/// Outcome of a cross-check run.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub comparisons: usize,
    pub max_abs_diff: f64,
    pub tolerance: f64,
    pub failures: usize,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Runs `cases` random comparisons between the fast metrics and the brute-force references.
pub fn run_suite(suite: Suite, cases: usize, seed: u64) -> Result<SuiteReport> {
    const TOL: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport {
        suite,
        cases,
        comparisons: 0,
        max_abs_diff: 0.0,
        tolerance: TOL,
        failures: 0,
    };
    let mut check = |fast: f64, slow: f64| {
        let d = (fast - slow).abs();
        report.comparisons += 1;
        report.max_abs_diff = report.max_abs_diff.max(d);
        if d.is_nan() || d > TOL {
            report.failures += 1;
        }
    };
    for _ in 0..cases {
        match suite {
            Suite::Hausdorff => {
                let (w, h) = (rng.random_range(2..=48), rng.random_range(2..=48));
                let a = random_label_map(w, h, 1, &mut rng);
                let b = random_label_map(w, h, 1, &mut rng);
                let (pa, pb) = (object_pixels(&a, 1), object_pixels(&b, 1));
                let (ra, rb) = (a.region(1)?, b.region(1)?);
                check(
                    hausdorff_with(&ra, &rb, HausdorffMode::Full, Connectivity::Four)?,
                    brute_hausdorff(&pa, &pb),
                );
                check(
                    hausdorff_with(&ra, &rb, HausdorffMode::Boundary, Connectivity::Four)?,
                    brute_hausdorff(
                        &brute_boundary(&pa, w, h, false),
                        &brute_boundary(&pb, w, h, false),
                    ),
                );
            }
            Suite::Ari => {
                let (w, h) = (rng.random_range(2..=24), rng.random_range(2..=24));
                let n = rng.random_range(0..=5);
                let gt = random_label_map(w, h, n, &mut rng);
                let seg = random_label_map(w, h, rng.random_range(0..=5), &mut rng);
                let table = OverlapTable::new(&gt, &seg)?;
                for policy in [AriPolicy::Include, AriPolicy::Exclude] {
                    match (
                        adjusted_rand(&table, policy).ok(),
                        brute_ari(&gt, &seg, policy),
                    ) {
                        (Some(f), Some(s)) => check(f, s),
                        (None, None) => {}
                        _ => check(0.0, f64::INFINITY),
                    }
                }
            }
            Suite::Objdice => {
                let images = rng.random_range(1..=3);
                let mut maps = Vec::with_capacity(images);
                for _ in 0..images {
                    let (w, h) = (rng.random_range(4..=24), rng.random_range(4..=24));
                    let gt = random_label_map(w, h, rng.random_range(0..=4), &mut rng);
                    let seg = random_label_map(w, h, rng.random_range(0..=4), &mut rng);
                    maps.push((gt, seg));
                }
                let refs: Vec<(&LabelMap, &LabelMap)> = maps.iter().map(|(g, s)| (g, s)).collect();
                for mode in [HausdorffMode::Boundary, HausdorffMode::Full] {
                    let (dice, haus) = brute_object_scores(&refs, mode)?;
                    check(object_dice_pooled(&refs)?, dice);
                    check(object_hausdorff_pooled(&refs, mode)?, haus);
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass() {
        for suite in [Suite::Hausdorff, Suite::Ari, Suite::Objdice] {
            let r = run_suite(suite, 15, 1).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn brute_ari_example() {
        let gt = LabelMap::from_grid(&[vec![1, 1], vec![2, 2]]).unwrap();
        let seg = LabelMap::from_grid(&[vec![1, 2], vec![1, 2]]).unwrap();
        let v = brute_ari(&gt, &seg, AriPolicy::Include).unwrap();
        assert!((v + 0.5).abs() < 1e-12, "{v}");
    }
}
