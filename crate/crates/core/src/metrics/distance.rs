//! Exact squared Euclidean distance transform and Hausdorff kernels.
//!
//! The transform is Meijster's two-phase separable algorithm in integer
//! arithmetic, so every distance it returns is the exact squared distance
//! between pixel centres. Hausdorff distances are evaluated on the union
//! bounding box of the two point sets only, which keeps per-object work
//! proportional to the object size rather than the image size.

use crate::labelmap::{BoundingBox, Pixel};

/// Squared distance from every cell of a `width x height` grid to the nearest
/// `true` cell of `features`. Cells of a grid without features get `u64::MAX`.
pub fn squared_edt(width: usize, height: usize, features: &[bool]) -> Vec<u64> {
    assert_eq!(features.len(), width * height, "feature mask size mismatch");
    if width == 0 || height == 0 {
        return Vec::new();
    }
    if !features.iter().any(|&f| f) {
        return vec![u64::MAX; width * height];
    }
    let inf = (width + height) as i64;

    // phase 1: vertical distance to the nearest feature in each column
    let mut g = vec![0i64; width * height];
    for x in 0..width {
        g[x] = if features[x] { 0 } else { inf };
        for y in 1..height {
            let idx = y * width + x;
            g[idx] = if features[idx] {
                0
            } else {
                (g[idx - width] + 1).min(inf)
            };
        }
        for y in (0..height - 1).rev() {
            let idx = y * width + x;
            if g[idx + width] < g[idx] {
                g[idx] = g[idx + width] + 1;
            }
        }
    }

    // phase 2: lower envelope of parabolas along each row
    let mut out = vec![0u64; width * height];
    let mut s = vec![0usize; width];
    let mut t = vec![0i64; width];
    for y in 0..height {
        let row = &g[y * width..(y + 1) * width];
        let f = |x: i64, i: usize| -> i64 {
            let d = x - i as i64;
            d * d + row[i] * row[i]
        };
        let sep = |i: usize, u: usize| -> i64 {
            let (ii, uu) = (i as i64, u as i64);
            (uu * uu - ii * ii + row[u] * row[u] - row[i] * row[i]).div_euclid(2 * (uu - ii))
        };
        let mut q: isize = 0;
        s[0] = 0;
        t[0] = 0;
        for u in 1..width {
            while q >= 0 && f(t[q as usize], s[q as usize]) > f(t[q as usize], u) {
                q -= 1;
            }
            if q < 0 {
                q = 0;
                s[0] = u;
            } else {
                let w = 1 + sep(s[q as usize], u);
                if w < width as i64 {
                    q += 1;
                    s[q as usize] = u;
                    t[q as usize] = w;
                }
            }
        }
        for u in (0..width).rev() {
            out[y * width + u] = f(u as i64, s[q as usize]) as u64;
            if u as i64 == t[q as usize] {
                q -= 1;
            }
        }
    }
    out
}

fn bbox_of(points: &[Pixel]) -> Option<BoundingBox> {
    let first = points.first()?;
    let mut bb = BoundingBox {
        min_row: first.row,
        min_col: first.col,
        max_row: first.row,
        max_col: first.col,
    };
    for p in &points[1..] {
        bb = bb.union(BoundingBox {
            min_row: p.row,
            min_col: p.col,
            max_row: p.row,
            max_col: p.col,
        });
    }
    Some(bb)
}

/// `max_{a in from} min_{b in to} |a - b|^2`, exact. Both sets must be non-empty.
pub fn directed_hausdorff_sq(from: &[Pixel], to: &[Pixel]) -> u64 {
    let bb = bbox_of(from)
        .zip(bbox_of(to))
        .map(|(a, b)| a.union(b))
        .expect("non-empty point sets");
    directed_in_box(from, to, bb)
}

fn directed_in_box(from: &[Pixel], to: &[Pixel], bb: BoundingBox) -> u64 {
    let (w, h) = (bb.width(), bb.height());
    let mut features = vec![false; w * h];
    for p in to {
        features[(p.row - bb.min_row) * w + (p.col - bb.min_col)] = true;
    }
    let dt = squared_edt(w, h, &features);
    from.iter()
        .map(|p| dt[(p.row - bb.min_row) * w + (p.col - bb.min_col)])
        .max()
        .unwrap_or(0)
}

/// Squared symmetric Hausdorff distance between two non-empty point sets.
pub fn hausdorff_sq(a: &[Pixel], b: &[Pixel]) -> u64 {
    let bb = bbox_of(a)
        .zip(bbox_of(b))
        .map(|(x, y)| x.union(y))
        .expect("non-empty point sets");
    directed_in_box(a, b, bb).max(directed_in_box(b, a, bb))
}
