//! Euclidean-disk morphology built on the exact distance transform.

use crate::grid::Grid;
use crate::labelmap::LabelMap;
use crate::metrics::distance::squared_edt;

/// Binary dilation by a Euclidean disk of `radius`.
pub fn dilate(mask: &Grid<bool>, radius: usize) -> Grid<bool> {
    if radius == 0 {
        return mask.clone();
    }
    let r2 = (radius * radius) as u64;
    let dt = squared_edt(mask.width(), mask.height(), mask.as_slice());
    Grid::from_vec(
        mask.width(),
        mask.height(),
        dt.iter().map(|&d| d <= r2).collect(),
    )
    .expect("same dimensions")
}

/// Binary erosion by a Euclidean disk of `radius`. Pixels beyond the image
/// edge count as foreground, so objects are not eaten from the border.
pub fn erode(mask: &Grid<bool>, radius: usize) -> Grid<bool> {
    if radius == 0 {
        return mask.clone();
    }
    let r2 = (radius * radius) as u64;
    let background: Vec<bool> = mask.as_slice().iter().map(|&m| !m).collect();
    let dt = squared_edt(mask.width(), mask.height(), &background);
    Grid::from_vec(
        mask.width(),
        mask.height(),
        dt.iter()
            .zip(mask.as_slice())
            .map(|(&d, &m)| m && d > r2)
            .collect(),
    )
    .expect("same dimensions")
}

/// Erodes every object of a label map independently; returns the new label
/// buffer. Objects may vanish entirely.
pub fn erode_labels(map: &LabelMap, radius: usize) -> Vec<u32> {
    let mut out = map.labels().to_vec();
    if radius == 0 {
        return out;
    }
    let r2 = (radius * radius) as u64;
    let (w, h) = (map.width(), map.height());
    for o in map.objects() {
        // box grown by radius so every relevant non-object pixel is a feature
        let r0 = o.bbox.min_row.saturating_sub(radius);
        let c0 = o.bbox.min_col.saturating_sub(radius);
        let r1 = (o.bbox.max_row + radius).min(h - 1);
        let c1 = (o.bbox.max_col + radius).min(w - 1);
        let (bw, bh) = (c1 - c0 + 1, r1 - r0 + 1);
        let mut features = vec![false; bw * bh];
        for r in 0..bh {
            for c in 0..bw {
                features[r * bw + c] = map.get(r0 + r, c0 + c) != o.label;
            }
        }
        let dt = squared_edt(bw, bh, &features);
        for r in 0..bh {
            for c in 0..bw {
                if !features[r * bw + c] && dt[r * bw + c] <= r2 {
                    out[(r0 + r) * w + c0 + c] = 0;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_mask(w: usize, h: usize, r: usize, c: usize) -> Grid<bool> {
        let mut m = Grid::new(w, h, false);
        m.set(r, c, true);
        m
    }

    #[test]
    fn dilate_point_is_disk() {
        let d = dilate(&point_mask(9, 9, 4, 4), 2);
        // radius-2 digital disk has 13 pixels
        assert_eq!(d.as_slice().iter().filter(|&&v| v).count(), 13);
        assert_eq!(erode(&d, 2).as_slice().iter().filter(|&&v| v).count(), 1);
    }

    #[test]
    fn erode_keeps_border_objects() {
        let full = Grid::new(5, 5, true);
        assert_eq!(erode(&full, 2), full);
    }

    #[test]
    fn erode_labels_separates_objects() {
        let m = LabelMap::from_grid(&vec![vec![1, 1, 1, 2, 2, 2]; 3]).unwrap();
        let e = erode_labels(&m, 1);
        // the seam columns disappear, outer columns survive
        assert_eq!(&e[0..6], &[1, 1, 0, 0, 2, 2]);
    }
}
