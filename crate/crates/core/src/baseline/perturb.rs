//! Controlled edits of label maps, used to drive metamorphic tests.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GlasError, Result};
use crate::labelmap::LabelMap;
use crate::metrics::distance::squared_edt;

use super::morphology::erode_labels;

/// Kinds of perturbation and their magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Perturbation {
    /// Every object grows into background within `radius`; contested pixels
    /// go to the nearest object, then the lowest label.
    Dilate { radius: usize },
    /// Every object loses the pixels within `radius` of a pixel not carrying
    /// its label. The image edge does not erode.
    Erode { radius: usize },
    /// Translate the whole map; pixels moved off the image are lost.
    Shift { dy: isize, dx: isize },
    /// Merge `count` randomly chosen pairs of objects into one label.
    MergePair { count: usize },
    /// Cut `count` randomly chosen objects in two at the middle column of
    /// their bounding box (middle row for one-column objects).
    Split { count: usize },
    /// Remove `count` randomly chosen objects.
    DropObject { count: usize },
}

/// Perturbed map plus bookkeeping for the caller's expectations.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbOutcome {
    pub map: LabelMap,
    /// Labels (of the input map) that the perturbation targeted.
    pub affected: Vec<u32>,
    /// Input labels no longer present in the output.
    pub extinct: Vec<u32>,
}

fn pick(map: &LabelMap, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<u32>> {
    let n = map.num_objects();
    if count > n {
        return Err(GlasError::Validation(format!(
            "cannot pick {count} objects from a map with {n}"
        )));
    }
    let mut idx = sample(rng, n, count).into_vec();
    idx.sort_unstable();
    Ok(idx.into_iter().map(|i| map.objects()[i].label).collect())
}

fn dilate_labels(map: &LabelMap, radius: usize) -> Vec<u32> {
    let (w, h) = (map.width(), map.height());
    let mut out = map.labels().to_vec();
    if radius == 0 {
        return out;
    }
    let r2 = (radius * radius) as u64;
    let mut best = vec![u64::MAX; w * h];
    for o in map.objects() {
        let r0 = o.bbox.min_row.saturating_sub(radius);
        let c0 = o.bbox.min_col.saturating_sub(radius);
        let r1 = (o.bbox.max_row + radius).min(h - 1);
        let c1 = (o.bbox.max_col + radius).min(w - 1);
        let (bw, bh) = (c1 - c0 + 1, r1 - r0 + 1);
        let features: Vec<bool> = (0..bw * bh)
            .map(|i| map.get(r0 + i / bw, c0 + i % bw) == o.label)
            .collect();
        let dt = squared_edt(bw, bh, &features);
        for (i, &d) in dt.iter().enumerate() {
            let g = (r0 + i / bw) * w + c0 + i % bw;
            // objects are visited in ascending label order, so strict `<` keeps the lowest
            if map.labels()[g] == 0 && d <= r2 && d < best[g] {
                best[g] = d;
                out[g] = o.label;
            }
        }
    }
    out
}

/// Applies `kind` to `map`. Random choices are drawn from `seed`.
pub fn perturb(map: &LabelMap, kind: Perturbation, seed: u64) -> Result<PerturbOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (map.width(), map.height());
    let all: Vec<u32> = map.objects().iter().map(|o| o.label).collect();
    let (labels, affected) = match kind {
        Perturbation::Dilate { radius } => (dilate_labels(map, radius), all.clone()),
        Perturbation::Erode { radius } => (erode_labels(map, radius), all.clone()),
        Perturbation::Shift { dy, dx } => {
            let mut out = vec![0u32; w * h];
            for row in 0..h {
                for col in 0..w {
                    let (nr, nc) = (row as isize + dy, col as isize + dx);
                    if nr >= 0 && nc >= 0 && (nr as usize) < h && (nc as usize) < w {
                        out[nr as usize * w + nc as usize] = map.get(row, col);
                    }
                }
            }
            (out, all.clone())
        }
        Perturbation::MergePair { count } => {
            let chosen = pick(map, 2 * count, &mut rng)?;
            let mut out = map.labels().to_vec();
            for pair in chosen.chunks(2) {
                let (keep, gone) = (pair[0], pair[1]);
                out.iter_mut()
                    .filter(|l| **l == gone)
                    .for_each(|l| *l = keep);
            }
            (out, chosen)
        }
        Perturbation::Split { count } => {
            let candidates: Vec<u32> = map
                .objects()
                .iter()
                .filter(|o| o.area >= 2)
                .map(|o| o.label)
                .collect();
            if count > candidates.len() {
                return Err(GlasError::Validation(format!(
                    "cannot split {count} objects; only {} have two or more pixels",
                    candidates.len()
                )));
            }
            let mut idx = sample(&mut rng, candidates.len(), count).into_vec();
            idx.sort_unstable();
            let chosen: Vec<u32> = idx.into_iter().map(|i| candidates[i]).collect();
            let mut out = map.labels().to_vec();
            let mut next = all.last().copied().unwrap_or(0);
            for &label in &chosen {
                next = next.checked_add(1).ok_or_else(|| {
                    GlasError::Value("label space exhausted while splitting".into())
                })?;
                let o = map.object(label)?;
                let region = map.region(label)?;
                let by_col = o.bbox.width() >= 2;
                let pixels = region.pixels();
                // cut at the middle of the occupied range so both halves are non-empty
                let mut keys: Vec<usize> = pixels
                    .iter()
                    .map(|p| if by_col { p.col } else { p.row })
                    .collect();
                keys.sort_unstable();
                keys.dedup();
                let cut = keys[keys.len() / 2];
                for p in pixels {
                    let key = if by_col { p.col } else { p.row };
                    if key >= cut {
                        out[p.row * w + p.col] = next;
                    }
                }
            }
            (out, chosen)
        }
        Perturbation::DropObject { count } => {
            let chosen = pick(map, count, &mut rng)?;
            let set: BTreeSet<u32> = chosen.iter().copied().collect();
            let out = map
                .labels()
                .iter()
                .map(|&l| if set.contains(&l) { 0 } else { l })
                .collect();
            (out, chosen)
        }
    };
    let out = LabelMap::from_raw(w, h, labels)?;
    let extinct = all
        .iter()
        .copied()
        .filter(|&l| !out.contains_label(l))
        .collect();
    Ok(PerturbOutcome {
        map: out,
        affected,
        extinct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_objects() -> LabelMap {
        LabelMap::from_grid(&[
            vec![1, 1, 0, 0, 0, 0, 0],
            vec![1, 1, 0, 2, 2, 0, 0],
            vec![0, 0, 0, 2, 2, 0, 3],
            vec![0, 0, 0, 0, 0, 0, 3],
        ])
        .unwrap()
    }

    #[test]
    fn drop_object_removes_exactly_count() {
        let m = three_objects();
        let out = perturb(&m, Perturbation::DropObject { count: 1 }, 3).unwrap();
        assert_eq!(out.map.num_objects(), 2);
        assert_eq!(out.extinct, out.affected);
        assert!(perturb(&m, Perturbation::DropObject { count: 4 }, 3).is_err());
    }

    #[test]
    fn zero_shift_is_identity() {
        let m = three_objects();
        assert_eq!(
            perturb(&m, Perturbation::Shift { dy: 0, dx: 0 }, 0)
                .unwrap()
                .map,
            m
        );
        let moved = perturb(&m, Perturbation::Shift { dy: 0, dx: 1 }, 0).unwrap();
        assert_eq!(moved.map.get(0, 1), 1);
        // object 3 sits on the last column and is pushed off the image
        assert_eq!(moved.extinct, vec![3]);
    }

    #[test]
    fn dilate_then_erode_bookkeeping() {
        let m = three_objects();
        let d = perturb(&m, Perturbation::Dilate { radius: 1 }, 0)
            .unwrap()
            .map;
        assert!(d.foreground_area() > m.foreground_area());
        for o in m.objects() {
            assert!(d.object(o.label).unwrap().area >= o.area);
        }
        let e = perturb(&m, Perturbation::Erode { radius: 1 }, 0).unwrap();
        // object 1 is held by the image corner, the others vanish
        assert_eq!(e.extinct, vec![2, 3]);
    }

    #[test]
    fn split_and_merge_change_counts() {
        let m = three_objects();
        let s = perturb(&m, Perturbation::Split { count: 2 }, 9).unwrap();
        assert_eq!(s.map.num_objects(), 5);
        let mg = perturb(&m, Perturbation::MergePair { count: 1 }, 9).unwrap();
        assert_eq!(mg.map.num_objects(), 2);
        assert_eq!(mg.extinct.len(), 1);
    }

    #[test]
    fn serde_shape() {
        let p: Perturbation = serde_json::from_str(r#"{"kind":"drop-object","count":2}"#).unwrap();
        assert_eq!(p, Perturbation::DropObject { count: 2 });
    }
}
