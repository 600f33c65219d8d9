use std::cmp::Ordering;

use super::Point;
use crate::error::{Error, Result};

/// Uniform bucket grid over a fixed set of points.
///
/// Buckets are stored CSR style: `entries[starts[c]..starts[c + 1]]` holds the
/// indices of the points in cell `c`. The grid covers the bounding box of the
/// stored points; queries anywhere in space are answered exactly.
#[derive(Clone, Debug)]
pub struct SpatialIndex {
    dim: usize,
    cell: f64,
    origin: [f64; 3],
    shape: [i64; 3],
    starts: Vec<u32>,
    entries: Vec<u32>,
    points: Vec<Point>,
}

impl SpatialIndex {
    /// Buckets `points` with cells of side `cell_size`. The cell size grows if
    /// the grid would otherwise hold far more cells than points.
    pub fn new(points: &[Point], dim: usize, cell_size: f64) -> Self {
        assert!(cell_size > 0.0 && cell_size.is_finite(), "cell size must be positive");
        assert!((2..=3).contains(&dim));
        let mut lo = [0.0f64; 3];
        let mut hi = [0.0f64; 3];
        if let Some(first) = points.first() {
            lo = first.coords;
            hi = first.coords;
            for p in points {
                for a in 0..dim {
                    lo[a] = lo[a].min(p[a]);
                    hi[a] = hi[a].max(p[a]);
                }
            }
        }
        let max_cells = 8 * points.len() + 64;
        let mut cell = cell_size;
        let shape = loop {
            let mut shape = [1i64; 3];
            for a in 0..dim {
                shape[a] = ((hi[a] - lo[a]) / cell).floor() as i64 + 1;
            }
            let total: i64 = shape.iter().product();
            if total as usize <= max_cells {
                break shape;
            }
            cell *= 1.26;
        };

        let mut index =
            Self { dim, cell, origin: lo, shape, starts: Vec::new(), entries: Vec::new(), points: points.to_vec() };
        let ncells = (shape[0] * shape[1] * shape[2]) as usize;
        let keys: Vec<usize> = points.iter().map(|p| index.flat(index.cell_of(p))).collect();
        let mut counts = vec![0u32; ncells + 1];
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for c in 0..ncells {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        let mut entries = vec![0u32; points.len()];
        for (i, &k) in keys.iter().enumerate() {
            entries[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        index.starts = counts;
        index.entries = entries;
        index
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn raw_cell(&self, p: &Point) -> [i64; 3] {
        let mut c = [0i64; 3];
        for a in 0..self.dim {
            c[a] = ((p[a] - self.origin[a]) / self.cell).floor() as i64;
        }
        c
    }

    fn cell_of(&self, p: &Point) -> [i64; 3] {
        let mut c = self.raw_cell(p);
        for a in 0..3 {
            c[a] = c[a].clamp(0, self.shape[a] - 1);
        }
        c
    }

    fn flat(&self, c: [i64; 3]) -> usize {
        ((c[0] * self.shape[1] + c[1]) * self.shape[2] + c[2]) as usize
    }

    fn bucket(&self, c: [i64; 3]) -> &[u32] {
        let f = self.flat(c);
        &self.entries[self.starts[f] as usize..self.starts[f + 1] as usize]
    }

    /// Indices of all stored points within the closed ball of `radius` around
    /// `center`, in no particular order.
    pub fn range_query(&self, center: &Point, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_in_ball(center, radius, |i, _| out.push(i));
        out
    }

    /// Calls `f(index, squared distance)` for every stored point within the
    /// closed ball.
    pub fn for_each_in_ball(&self, center: &Point, radius: f64, mut f: impl FnMut(usize, f64)) {
        if self.points.is_empty() || !(radius >= 0.0) {
            return;
        }
        let r2 = radius * radius;
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for a in 0..3 {
            if a < self.dim {
                lo[a] = ((center[a] - radius - self.origin[a]) / self.cell).floor() as i64;
                hi[a] = ((center[a] + radius - self.origin[a]) / self.cell).floor() as i64;
                lo[a] = lo[a].max(0);
                hi[a] = hi[a].min(self.shape[a] - 1);
                if lo[a] > hi[a] {
                    return;
                }
            }
        }
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                for k in lo[2]..=hi[2] {
                    for &e in self.bucket([i, j, k]) {
                        let d2 = self.points[e as usize].dist2(center);
                        if d2 <= r2 {
                            f(e as usize, d2);
                        }
                    }
                }
            }
        }
    }

    /// The `k` stored points nearest to `query`, ascending by distance with
    /// ties going to the lower index.
    pub fn knn(&self, query: &Point, k: usize) -> Result<Vec<(usize, f64)>> {
        self.knn_filtered(query, k, None)
    }

    /// Like [`knn`](Self::knn) but never returns the stored point `skip`;
    /// used when the query is itself a member of the set.
    pub fn knn_excluding(&self, query: &Point, k: usize, skip: usize) -> Result<Vec<(usize, f64)>> {
        self.knn_filtered(query, k, Some(skip))
    }

    /// Nearest stored point and its distance.
    pub fn nearest(&self, query: &Point) -> Option<(usize, f64)> {
        self.knn(query, 1).ok().and_then(|v| v.first().copied())
    }

    /// Nearest stored point among those within the closed ball of `bound`.
    /// Exact whenever some point is known to lie within `bound`; cheaper than
    /// [`nearest`](Self::nearest) when the bound is tight.
    pub fn nearest_within(&self, query: &Point, bound: f64) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        self.for_each_in_ball(query, bound, |i, d2| {
            if best.is_none_or(|(j, b)| d2 < b || (d2 == b && i < j)) {
                best = Some((i, d2));
            }
        });
        best.map(|(i, d2)| (i, d2.sqrt()))
    }

    fn knn_filtered(&self, query: &Point, k: usize, skip: Option<usize>) -> Result<Vec<(usize, f64)>> {
        let available = self.points.len() - usize::from(skip.is_some_and(|s| s < self.points.len()));
        if k > available {
            return Err(Error::InsufficientData { needed: k, available });
        }
        if k == 0 {
            return Ok(Vec::new());
        }
        let qc = self.raw_cell(query);
        let (mut s_min, mut s_max) = (0i64, 0i64);
        for a in 0..self.dim {
            let below = -qc[a];
            let above = qc[a] - (self.shape[a] - 1);
            s_min = s_min.max(below).max(above);
            s_max = s_max.max(qc[a].abs()).max((qc[a] - (self.shape[a] - 1)).abs());
        }

        let by_dist = |a: &(f64, usize), b: &(f64, usize)| -> Ordering { a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) };
        let mut found: Vec<(f64, usize)> = Vec::new();
        for s in s_min..=s_max {
            self.visit_ring(qc, s, |e| {
                if Some(e) != skip {
                    found.push((self.points[e].dist2(query), e));
                }
            });
            if found.len() >= k {
                found.select_nth_unstable_by(k - 1, by_dist);
                found.truncate(k);
                let covered = s as f64 * self.cell;
                if found[k - 1].0 <= covered * covered {
                    break;
                }
            }
        }
        found.sort_by(by_dist);
        found.truncate(k);
        Ok(found.into_iter().map(|(d2, i)| (i, d2.sqrt())).collect())
    }

    /// Visits the points in cells at Chebyshev distance exactly `s` from `qc`.
    fn visit_ring(&self, qc: [i64; 3], s: i64, mut f: impl FnMut(usize)) {
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for a in 0..self.dim {
            lo[a] = (qc[a] - s).max(0);
            hi[a] = (qc[a] + s).min(self.shape[a] - 1);
            if lo[a] > hi[a] {
                return;
            }
        }
        for i in lo[0]..=hi[0] {
            let di = (i - qc[0]).abs();
            for j in lo[1]..=hi[1] {
                let dij = di.max((j - qc[1]).abs());
                for k in lo[2]..=hi[2] {
                    if dij.max((k - qc[2]).abs()) != s {
                        continue;
                    }
                    for &e in self.bucket([i, j, k]) {
                        f(e as usize);
                    }
                }
            }
        }
    }
}
