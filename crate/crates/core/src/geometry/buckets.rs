use super::{BoundingBox, Point};

/// Append-only bucket grid over a box, for neighbor queries against a set
/// that grows while it is searched. Points outside the box land in the edge
/// buckets.
#[derive(Clone, Debug)]
pub(crate) struct PointBuckets {
    dim: usize,
    lo: [f64; 3],
    cell: f64,
    n: [i64; 3],
    buckets: Vec<Vec<u32>>,
}

impl PointBuckets {
    /// At most `max_per_axis` buckets along each axis; `cell` is grown to
    /// respect that.
    pub(crate) fn new(region: &BoundingBox, cell: f64, max_per_axis: usize) -> Self {
        let dim = region.dim();
        let widest = (0..dim).map(|a| region.extent(a)).fold(0.0, f64::max);
        let cell = cell.max(widest / max_per_axis as f64);
        let mut n = [1i64; 3];
        let mut lo = [0.0; 3];
        for a in 0..dim {
            lo[a] = region.lo[a];
            n[a] = (region.extent(a) / cell).ceil().max(1.0) as i64;
        }
        Self { dim, lo, cell, n, buckets: vec![Vec::new(); (n[0] * n[1] * n[2]) as usize] }
    }

    fn key(&self, axis: usize, x: f64) -> i64 {
        (((x - self.lo[axis]) / self.cell).floor() as i64).clamp(0, self.n[axis] - 1)
    }

    fn flat(&self, i: i64, j: i64, k: i64) -> usize {
        ((i * self.n[1] + j) * self.n[2] + k) as usize
    }

    pub(crate) fn insert(&mut self, p: &Point, idx: u32) {
        let key = |a: usize| if a < self.dim { self.key(a, p[a]) } else { 0 };
        let f = self.flat(key(0), key(1), key(2));
        self.buckets[f].push(idx);
    }

    /// Calls `f` with every stored index whose bucket meets the cube of
    /// half-width `r` around `p`. Callers filter by exact distance.
    pub(crate) fn for_each_near(&self, p: &Point, r: f64, mut f: impl FnMut(u32)) {
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for a in 0..self.dim {
            lo[a] = self.key(a, p[a] - r);
            hi[a] = self.key(a, p[a] + r);
        }
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                for k in lo[2]..=hi[2] {
                    for &e in &self.buckets[self.flat(i, j, k)] {
                        f(e);
                    }
                }
            }
        }
    }
}
