//! Shared post-processing: small-object removal and hole filling.

use std::collections::BTreeSet;

use crate::labelmap::{connected_components, Connectivity, LabelMap};

use super::segment::SegmenterConfig;

/// Sets every object smaller than `min_area` pixels to background.
pub fn remove_small_objects(map: &LabelMap, min_area: u64) -> LabelMap {
    let small: BTreeSet<u32> = map
        .objects()
        .iter()
        .filter(|o| o.area < min_area)
        .map(|o| o.label)
        .collect();
    if small.is_empty() {
        return map.clone();
    }
    let labels = map
        .labels()
        .iter()
        .map(|&l| if small.contains(&l) { 0 } else { l })
        .collect();
    LabelMap::from_raw(map.width(), map.height(), labels).expect("same dimensions")
}

/// Fills holes: background regions that do not touch the image border and
/// are enclosed by a single object take that object's label.
///
/// Background regions use the complementary connectivity of the objects
/// (4 for 8-connected objects and vice versa).
pub fn fill_holes(map: &LabelMap, object_connectivity: Connectivity) -> LabelMap {
    let bg_conn = match object_connectivity {
        Connectivity::Eight => Connectivity::Four,
        Connectivity::Four => Connectivity::Eight,
    };
    let (w, h) = (map.width(), map.height());
    let bg = map.foreground().map(|f| !f);
    let regions = connected_components(&bg, bg_conn);
    let n = regions.num_objects();
    if n == 0 {
        return map.clone();
    }
    // per background region: touches border? which object labels surround it?
    let mut touches_border = vec![false; n + 1];
    let mut neighbours: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n + 1];
    for row in 0..h {
        for col in 0..w {
            let region = regions.get(row, col);
            if region == 0 {
                continue;
            }
            let r = region as usize;
            if row == 0 || col == 0 || row + 1 == h || col + 1 == w {
                touches_border[r] = true;
            }
            for &(dr, dc) in bg_conn.offsets() {
                let (nr, nc) = (row as isize + dr, col as isize + dc);
                if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                    continue;
                }
                let l = map.get(nr as usize, nc as usize);
                if l != 0 {
                    neighbours[r].insert(l);
                }
            }
        }
    }
    let fill: Vec<u32> = (0..=n)
        .map(|r| {
            if r == 0 || touches_border[r] || neighbours[r].len() != 1 {
                0
            } else {
                *neighbours[r].iter().next().unwrap()
            }
        })
        .collect();
    let labels = map
        .labels()
        .iter()
        .zip(regions.labels())
        .map(|(&l, &r)| if l == 0 { fill[r as usize] } else { l })
        .collect();
    LabelMap::from_raw(w, h, labels).expect("same dimensions")
}

/// Removes objects below `min_object_area`, fills holes when enabled and
/// relabels sequentially. Idempotent.
pub fn postprocess(map: &LabelMap, config: &SegmenterConfig) -> LabelMap {
    let mut out = remove_small_objects(map, config.min_object_area);
    if config.fill_holes {
        out = fill_holes(&out, config.connectivity);
    }
    out.relabel_sequential()
}
