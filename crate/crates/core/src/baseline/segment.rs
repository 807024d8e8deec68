//! Lumen-seeded region growing.
//!
//! Dark pixels are nuclei; bright enclosed regions are lumen seeds. Each seed
//! grows over non-barrier pixels, where the barrier is the nuclei mask
//! dilated by a disk. Growth therefore stops at the chain of epithelial
//! nuclei around a gland. The chain itself is then absorbed and the halo
//! added by the dilation is eroded away again.
//!
//! None of the numeric defaults here come from a published protocol; they are
//! tuned for the synthetic generator in [`super::synth`].

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{GlasError, Result};
use crate::grid::{GrayImage, Grid};
use crate::labelmap::{connected_components, Connectivity, LabelMap};

use super::morphology::{dilate, erode_labels};
use super::postprocess::postprocess;

/// Intensity threshold: a fixed value or Otsu's method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Threshold {
    Fixed(u8),
    #[serde(with = "otsu_tag")]
    Otsu,
}

mod otsu_tag {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("otsu")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s.eq_ignore_ascii_case("otsu") {
            Ok(())
        } else {
            Err(serde::de::Error::custom(format!(
                "expected \"otsu\", got \"{s}\""
            )))
        }
    }
}

/// Region-growing parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmenterConfig {
    /// Pixels at or below this intensity are nuclei.
    pub nuclei_threshold: Threshold,
    /// Pixels above this intensity are lumen candidates. Otsu is computed on
    /// the non-nuclei pixels only.
    pub lumen_threshold: Threshold,
    /// Lumen components smaller than this are not used as seeds.
    pub min_seed_area: u64,
    /// Radius of the disk used to thicken the nuclei barrier.
    pub barrier_dilation_radius: usize,
    /// Regions that grow beyond this multiple of their seed area leaked
    /// through the barrier and are discarded.
    pub max_growth_ratio: f64,
    pub min_object_area: u64,
    pub fill_holes: bool,
    pub connectivity: Connectivity,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            nuclei_threshold: Threshold::Fixed(100),
            lumen_threshold: Threshold::Fixed(195),
            min_seed_area: 50,
            barrier_dilation_radius: 2,
            max_growth_ratio: 4.0,
            min_object_area: 1000,
            fill_holes: true,
            connectivity: Connectivity::Eight,
        }
    }
}

impl SegmenterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_growth_ratio.is_nan() || self.max_growth_ratio < 1.0 {
            return Err(GlasError::Validation(format!(
                "max_growth_ratio must be at least 1, got {}",
                self.max_growth_ratio
            )));
        }
        if let (Threshold::Fixed(n), Threshold::Fixed(l)) =
            (self.nuclei_threshold, self.lumen_threshold)
        {
            if l <= n {
                return Err(GlasError::Validation(format!(
                    "lumen threshold {l} must exceed nuclei threshold {n}"
                )));
            }
        }
        Ok(())
    }
}

/// Otsu's threshold over the selected pixels; `None` if nothing is selected.
/// Pixels `<= t` form the lower class.
pub fn otsu_threshold(values: impl Iterator<Item = u8>) -> Option<u8> {
    let mut hist = [0u64; 256];
    let mut total = 0u64;
    for v in values {
        hist[v as usize] += 1;
        total += 1;
    }
    if total == 0 {
        return None;
    }
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum();
    let (mut w0, mut sum0) = (0u64, 0.0f64);
    let (mut best_t, mut best_var) = (0u8, -1.0f64);
    for (t, &count) in hist.iter().enumerate() {
        w0 += count;
        sum0 += t as f64 * count as f64;
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let m0 = sum0 / w0 as f64;
        let m1 = (sum_all - sum0) / w1 as f64;
        let var = w0 as f64 * w1 as f64 * (m0 - m1) * (m0 - m1);
        if var > best_var {
            best_var = var;
            best_t = t as u8;
        }
    }
    Some(best_t)
}

fn resolve(threshold: Threshold, pixels: impl Iterator<Item = u8>) -> Option<u8> {
    match threshold {
        Threshold::Fixed(t) => Some(t),
        Threshold::Otsu => otsu_threshold(pixels),
    }
}

/// Multi-source breadth-first growth: every pixel with `allowed` set and no
/// label yet receives the label of the first region that reaches it.
fn grow(labels: &mut [u32], allowed: &[bool], width: usize, height: usize, conn: Connectivity) {
    let mut queue: VecDeque<usize> = (0..labels.len()).filter(|&i| labels[i] != 0).collect();
    while let Some(i) = queue.pop_front() {
        let (r, c) = ((i / width) as isize, (i % width) as isize);
        for &(dr, dc) in conn.offsets() {
            let (nr, nc) = (r + dr, c + dc);
            if nr < 0 || nc < 0 || nr >= height as isize || nc >= width as isize {
                continue;
            }
            let j = nr as usize * width + nc as usize;
            if labels[j] == 0 && allowed[j] {
                labels[j] = labels[i];
                queue.push_back(j);
            }
        }
    }
}

fn keep_largest_components(map: &LabelMap, conn: Connectivity) -> LabelMap {
    let parts = map.split_components(conn);
    // largest part per original label; ties go to the earliest part
    let mut best: std::collections::BTreeMap<u32, (u64, u32)> = Default::default();
    for o in parts.objects() {
        let b = parts.region(o.label).expect("label exists").pixels()[0];
        let orig = map.get(b.row, b.col);
        let e = best.entry(orig).or_insert((o.area, o.label));
        if o.area > e.0 {
            *e = (o.area, o.label);
        }
    }
    let keep: std::collections::BTreeSet<u32> = best.values().map(|&(_, p)| p).collect();
    let labels = map
        .labels()
        .iter()
        .zip(parts.labels())
        .map(|(&l, p)| if keep.contains(p) { l } else { 0 })
        .collect();
    LabelMap::from_raw(map.width(), map.height(), labels).expect("same dimensions")
}

/// Segments glands in a single-channel image.
pub fn segment_region_growing(image: &GrayImage, config: &SegmenterConfig) -> Result<LabelMap> {
    config.validate()?;
    let (w, h) = (image.width(), image.height());
    if w == 0 || h == 0 {
        return Ok(LabelMap::empty(w, h));
    }
    let px = image.as_slice();
    let conn = config.connectivity;

    let Some(t_nuclei) = resolve(config.nuclei_threshold, px.iter().copied()) else {
        return Ok(LabelMap::empty(w, h));
    };
    let nuclei = image.map(|v| v <= t_nuclei);
    let Some(t_lumen) = resolve(
        config.lumen_threshold,
        px.iter().copied().filter(|&v| v > t_nuclei),
    ) else {
        return Ok(LabelMap::empty(w, h));
    };
    let barrier = dilate(&nuclei, config.barrier_dilation_radius);
    let open: Vec<bool> = barrier.as_slice().iter().map(|&b| !b).collect();

    // seeds: bright, outside the barrier, large, and enclosed (not on the border)
    let lumen = Grid::from_vec(
        w,
        h,
        px.iter()
            .zip(&open)
            .map(|(&v, &o)| o && v > t_lumen)
            .collect(),
    )?;
    let candidates = connected_components(&lumen, conn);
    let mut seed_area = vec![0u64; candidates.num_objects() + 1];
    let mut labels = vec![0u32; w * h];
    for o in candidates.objects() {
        let on_border = o.bbox.min_row == 0
            || o.bbox.min_col == 0
            || o.bbox.max_row + 1 == h
            || o.bbox.max_col + 1 == w;
        if o.area < config.min_seed_area || on_border {
            continue;
        }
        seed_area[o.label as usize] = o.area;
        for p in candidates.region(o.label)?.pixels() {
            labels[p.row * w + p.col] = o.label;
        }
    }

    grow(&mut labels, &open, w, h, conn);

    // false regions: leaked past the barrier or reached the border
    let grown = LabelMap::from_raw(w, h, labels)?;
    let rejected: std::collections::BTreeSet<u32> = grown
        .objects()
        .iter()
        .filter(|o| {
            let leaked =
                o.area as f64 > config.max_growth_ratio * seed_area[o.label as usize] as f64;
            let on_border = o.bbox.min_row == 0
                || o.bbox.min_col == 0
                || o.bbox.max_row + 1 == h
                || o.bbox.max_col + 1 == w;
            leaked || on_border
        })
        .map(|o| o.label)
        .collect();
    let mut labels: Vec<u32> = grown
        .labels()
        .iter()
        .map(|&l| if rejected.contains(&l) { 0 } else { l })
        .collect();

    // absorb the nuclei chain (and its halo), then take the halo back off
    grow(&mut labels, barrier.as_slice(), w, h, conn);
    let absorbed = LabelMap::from_raw(w, h, labels)?;
    let eroded = LabelMap::from_raw(
        w,
        h,
        erode_labels(&absorbed, config.barrier_dilation_radius),
    )?;

    let cleaned = keep_largest_components(&eroded, conn);
    Ok(postprocess(&cleaned, config))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn otsu_splits_bimodal() {
        let vals = [10u8; 50].into_iter().chain([200u8; 50]);
        let t = otsu_threshold(vals).unwrap();
        assert!((10..200).contains(&t));
        assert_eq!(otsu_threshold(std::iter::empty()), None);
    }

    #[test]
    fn blank_images_have_no_objects() {
        let cfg = SegmenterConfig::default();
        for v in [0u8, 150, 255] {
            let img = Grid::new(64, 64, v);
            assert_eq!(segment_region_growing(&img, &cfg).unwrap().num_objects(), 0);
        }
    }

    #[test]
    fn threshold_serde() {
        let t: Threshold = serde_json::from_str("\"otsu\"").unwrap();
        assert_eq!(t, Threshold::Otsu);
        let t: Threshold = serde_json::from_str("120").unwrap();
        assert_eq!(t, Threshold::Fixed(120));
        assert_eq!(serde_json::to_string(&Threshold::Otsu).unwrap(), "\"otsu\"");
    }

    #[test]
    fn rejects_inverted_thresholds() {
        let cfg = SegmenterConfig {
            nuclei_threshold: Threshold::Fixed(200),
            lumen_threshold: Threshold::Fixed(100),
            ..SegmenterConfig::default()
        };
        assert!(segment_region_growing(&Grid::new(4, 4, 0), &cfg).is_err());
    }
}
