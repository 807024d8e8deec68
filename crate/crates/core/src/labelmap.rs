//! Validated label maps, object inventories, connected components and boundaries.
//!
//! A [`LabelMap`] is a row-major grid of `u32` labels where `0` is background
//! and every positive value names one object. Labels are authoritative: a
//! label that occupies two disconnected regions is still one object unless
//! the caller explicitly asks for [`LabelMap::split_components`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{GlasError, Result};
use crate::grid::Grid;

/// Pixel adjacency used for component labelling and boundary tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    /// Neighbour offsets (row, col) for this connectivity.
    pub fn offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
        const EIGHT: [(isize, isize); 8] = [
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }

    /// Offsets of already-visited neighbours in a raster scan.
    fn causal_offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 2] = [(-1, 0), (0, -1)];
        const EIGHT: [(isize, isize); 4] = [(-1, -1), (-1, 0), (-1, 1), (0, -1)];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

impl TryFrom<u8> for Connectivity {
    type Error = String;

    fn try_from(value: u8) -> std::result::Result<Self, Self::Error> {
        match value {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(format!("connectivity must be 4 or 8, got {other}")),
        }
    }
}

impl From<Connectivity> for u8 {
    fn from(c: Connectivity) -> u8 {
        match c {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

impl std::str::FromStr for Connectivity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let n: u8 = s
            .trim()
            .parse()
            .map_err(|_| format!("connectivity must be 4 or 8, got `{s}`"))?;
        Connectivity::try_from(n)
    }
}

/// Pixel coordinate; ordering is raster order (row-major).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pixel {
    pub row: usize,
    pub col: usize,
}

impl Pixel {
    pub const fn new(row: usize, col: usize) -> Self {
        Pixel { row, col }
    }

    /// Squared Euclidean distance between pixel centres.
    #[inline]
    pub fn dist_sq(self, other: Pixel) -> u64 {
        let dr = self.row.abs_diff(other.row) as u64;
        let dc = self.col.abs_diff(other.col) as u64;
        dr * dr + dc * dc
    }
}

/// Inclusive bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_row: usize,
    pub min_col: usize,
    pub max_row: usize,
    pub max_col: usize,
}

impl BoundingBox {
    fn point(p: Pixel) -> Self {
        BoundingBox {
            min_row: p.row,
            min_col: p.col,
            max_row: p.row,
            max_col: p.col,
        }
    }

    fn include(&mut self, p: Pixel) {
        self.min_row = self.min_row.min(p.row);
        self.min_col = self.min_col.min(p.col);
        self.max_row = self.max_row.max(p.row);
        self.max_col = self.max_col.max(p.col);
    }

    pub fn union(self, other: BoundingBox) -> BoundingBox {
        BoundingBox {
            min_row: self.min_row.min(other.min_row),
            min_col: self.min_col.min(other.min_col),
            max_row: self.max_row.max(other.max_row),
            max_col: self.max_col.max(other.max_col),
        }
    }

    pub fn height(&self) -> usize {
        self.max_row - self.min_row + 1
    }

    pub fn width(&self) -> usize {
        self.max_col - self.min_col + 1
    }
}

/// One entry of the object inventory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectRecord {
    pub label: u32,
    /// Pixel count, always at least 1.
    pub area: u64,
    pub bbox: BoundingBox,
}

/// A set of pixels inside a `width x height` frame, kept in raster order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    width: usize,
    height: usize,
    pixels: Vec<Pixel>,
}

impl Region {
    /// Builds a region; duplicates are removed and out-of-frame pixels rejected.
    pub fn new(width: usize, height: usize, mut pixels: Vec<Pixel>) -> Result<Self> {
        if let Some(p) = pixels.iter().find(|p| p.row >= height || p.col >= width) {
            return Err(GlasError::Shape(format!(
                "pixel ({}, {}) outside {}x{} frame",
                p.row, p.col, width, height
            )));
        }
        pixels.sort_unstable();
        pixels.dedup();
        Ok(Region {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Pixel] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn contains(&self, p: Pixel) -> bool {
        self.pixels.binary_search(&p).is_ok()
    }

    pub fn bbox(&self) -> Option<BoundingBox> {
        let mut it = self.pixels.iter();
        let mut bb = BoundingBox::point(*it.next()?);
        for &p in it {
            bb.include(p);
        }
        Some(bb)
    }

    /// Inner boundary: pixels with a neighbour (under `connectivity`) outside
    /// the region or beyond the image edge.
    pub fn boundary(&self, connectivity: Connectivity) -> Region {
        let Some(bb) = self.bbox() else {
            return self.clone();
        };
        // local membership mask with a one-pixel apron
        let w = bb.width() + 2;
        let h = bb.height() + 2;
        let mut mask = vec![false; w * h];
        for p in &self.pixels {
            mask[(p.row - bb.min_row + 1) * w + (p.col - bb.min_col + 1)] = true;
        }
        let pixels = self
            .pixels
            .iter()
            .copied()
            .filter(|p| {
                if p.row == 0 || p.col == 0 || p.row + 1 == self.height || p.col + 1 == self.width {
                    return true;
                }
                let lr = (p.row - bb.min_row + 1) as isize;
                let lc = (p.col - bb.min_col + 1) as isize;
                connectivity
                    .offsets()
                    .iter()
                    .any(|&(dr, dc)| !mask[((lr + dr) as usize) * w + (lc + dc) as usize])
            })
            .collect();
        Region {
            width: self.width,
            height: self.height,
            pixels,
        }
    }
}

/// Validated grid of object labels with its object inventory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    objects: Vec<ObjectRecord>,
}

impl LabelMap {
    /// Builds a map from signed rows; rejects ragged rows and negative or
    /// out-of-range values.
    pub fn from_grid(rows: &[Vec<i64>]) -> Result<Self> {
        let grid = Grid::from_rows(rows)?;
        let mut labels = Vec::with_capacity(grid.as_slice().len());
        for (idx, &v) in grid.as_slice().iter().enumerate() {
            let label = u32::try_from(v).map_err(|_| {
                GlasError::Value(format!(
                    "label {v} at ({}, {}) is not a non-negative 32-bit integer",
                    idx / grid.width().max(1),
                    idx % grid.width().max(1)
                ))
            })?;
            labels.push(label);
        }
        Self::from_raw(grid.width(), grid.height(), labels)
    }

    /// Builds a map from a row-major label buffer.
    pub fn from_raw(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(GlasError::Shape(format!(
                "{} labels do not fill a {}x{} grid",
                labels.len(),
                width,
                height
            )));
        }
        let objects = build_inventory(width, &labels);
        Ok(LabelMap {
            width,
            height,
            labels,
            objects,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        LabelMap {
            width,
            height,
            labels: vec![0; width * height],
            objects: Vec::new(),
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<u32> {
        self.labels
    }

    /// Object inventory sorted by label.
    pub fn objects(&self) -> &[ObjectRecord] {
        &self.objects
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn object(&self, label: u32) -> Result<&ObjectRecord> {
        self.objects
            .binary_search_by_key(&label, |o| o.label)
            .map(|i| &self.objects[i])
            .map_err(|_| GlasError::NotFound { label })
    }

    pub fn contains_label(&self, label: u32) -> bool {
        label != 0 && self.object(label).is_ok()
    }

    pub fn background_area(&self) -> u64 {
        self.labels.iter().filter(|&&l| l == 0).count() as u64
    }

    pub fn foreground_area(&self) -> u64 {
        self.objects.iter().map(|o| o.area).sum()
    }

    /// Euclidean length of the image diagonal.
    pub fn diagonal(&self) -> f64 {
        ((self.width * self.width + self.height * self.height) as f64).sqrt()
    }

    /// All pixels of one object, in raster order.
    pub fn region(&self, label: u32) -> Result<Region> {
        let rec = self.object(label)?;
        let bb = rec.bbox;
        let mut pixels = Vec::with_capacity(rec.area as usize);
        for row in bb.min_row..=bb.max_row {
            let base = row * self.width;
            for col in bb.min_col..=bb.max_col {
                if self.labels[base + col] == label {
                    pixels.push(Pixel::new(row, col));
                }
            }
        }
        Ok(Region {
            width: self.width,
            height: self.height,
            pixels,
        })
    }

    /// Inner boundary of an object: its pixels that have a neighbour with a
    /// different label (or background) or that lie on the image edge.
    pub fn boundary_pixels(&self, label: u32, connectivity: Connectivity) -> Result<Vec<Pixel>> {
        Ok(self.region(label)?.boundary(connectivity).pixels)
    }

    /// Binary foreground mask (`label > 0`).
    pub fn foreground(&self) -> Grid<bool> {
        Grid::from_vec(
            self.width,
            self.height,
            self.labels.iter().map(|&l| l > 0).collect(),
        )
        .expect("dimensions are consistent")
    }

    /// Compacts positive labels to `1..=n` in order of first raster occurrence.
    pub fn relabel_sequential(&self) -> LabelMap {
        let mut mapping: BTreeMap<u32, u32> = BTreeMap::new();
        let mut next = 1u32;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if l == 0 {
                    return 0;
                }
                *mapping.entry(l).or_insert_with(|| {
                    let v = next;
                    next += 1;
                    v
                })
            })
            .collect();
        LabelMap::from_raw(self.width, self.height, labels).expect("same dimensions")
    }

    /// True when positive labels are exactly `1..=n` in first-occurrence order.
    pub fn is_sequential(&self) -> bool {
        let mut next = 1u32;
        for &l in &self.labels {
            if l == 0 {
                continue;
            }
            if l == next {
                next += 1;
            } else if l > next {
                return false;
            }
        }
        true
    }

    /// Re-componentizes: every connected region of equal label becomes its own
    /// object, numbered sequentially in raster order.
    pub fn split_components(&self, connectivity: Connectivity) -> LabelMap {
        label_equal_regions(self.width, self.height, &self.labels, connectivity)
    }

    /// Applies `f` to every positive label. `f` must not map a positive label to 0.
    pub fn map_labels(&self, f: impl Fn(u32) -> u32) -> Result<LabelMap> {
        let mut labels = Vec::with_capacity(self.labels.len());
        for &l in &self.labels {
            if l == 0 {
                labels.push(0);
            } else {
                let m = f(l);
                if m == 0 {
                    return Err(GlasError::Value(format!("label {l} mapped to background")));
                }
                labels.push(m);
            }
        }
        LabelMap::from_raw(self.width, self.height, labels)
    }

    pub fn flip_horizontal(&self) -> LabelMap {
        let mut labels = self.labels.clone();
        for row in labels.chunks_mut(self.width.max(1)) {
            row.reverse();
        }
        LabelMap::from_raw(self.width, self.height, labels).expect("same dimensions")
    }

    pub fn flip_vertical(&self) -> LabelMap {
        let mut labels = Vec::with_capacity(self.labels.len());
        for row in self.labels.chunks(self.width.max(1)).rev() {
            labels.extend_from_slice(row);
        }
        LabelMap::from_raw(self.width, self.height, labels).expect("same dimensions")
    }

    /// Rows as vectors, mostly for tests and text output.
    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.labels
            .chunks(self.width.max(1))
            .map(<[u32]>::to_vec)
            .collect()
    }
}

fn build_inventory(width: usize, labels: &[u32]) -> Vec<ObjectRecord> {
    let mut inv: BTreeMap<u32, ObjectRecord> = BTreeMap::new();
    for (idx, &label) in labels.iter().enumerate() {
        if label == 0 {
            continue;
        }
        let p = Pixel::new(idx / width, idx % width);
        inv.entry(label)
            .and_modify(|o| {
                o.area += 1;
                o.bbox.include(p);
            })
            .or_insert(ObjectRecord {
                label,
                area: 1,
                bbox: BoundingBox::point(p),
            });
    }
    inv.into_values().collect()
}

/// Labels each maximal connected foreground region of `mask` with a distinct
/// sequential label, numbered in order of the region's first raster pixel.
pub fn connected_components(mask: &Grid<bool>, connectivity: Connectivity) -> LabelMap {
    let values: Vec<u32> = mask.as_slice().iter().map(|&b| u32::from(b)).collect();
    label_equal_regions(mask.width(), mask.height(), &values, connectivity)
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        UnionFind { parent: Vec::new() }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller id wins so roots track the earliest provisional label
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Two-pass union-find labelling of regions of equal non-zero value.
fn label_equal_regions(
    width: usize,
    height: usize,
    values: &[u32],
    connectivity: Connectivity,
) -> LabelMap {
    let mut provisional = vec![u32::MAX; values.len()];
    let mut uf = UnionFind::new();
    for row in 0..height {
        for col in 0..width {
            let idx = row * width + col;
            let v = values[idx];
            if v == 0 {
                continue;
            }
            let mut assigned = u32::MAX;
            for &(dr, dc) in connectivity.causal_offsets() {
                let (nr, nc) = (row as isize + dr, col as isize + dc);
                if nr < 0 || nc < 0 || nc as usize >= width {
                    continue;
                }
                let nidx = nr as usize * width + nc as usize;
                if values[nidx] != v {
                    continue;
                }
                let nl = provisional[nidx];
                if assigned == u32::MAX {
                    assigned = nl;
                } else {
                    uf.union(assigned, nl);
                }
            }
            provisional[idx] = if assigned == u32::MAX {
                uf.make()
            } else {
                assigned
            };
        }
    }

    let mut final_of_root = vec![0u32; uf.parent.len()];
    let mut next = 1u32;
    let labels = provisional
        .iter()
        .map(|&p| {
            if p == u32::MAX {
                return 0;
            }
            let root = uf.find(p) as usize;
            if final_of_root[root] == 0 {
                final_of_root[root] = next;
                next += 1;
            }
            final_of_root[root]
        })
        .collect();
    LabelMap::from_raw(width, height, labels).expect("same dimensions")
}
