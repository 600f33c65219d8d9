//! Reference node sets: Cartesian and hexagonal lattices, Halton sequences.

use crate::error::{invalid, Result};
use crate::geometry::{BoundingBox, Point, PointSet};

#[derive(Clone, Copy, Debug)]
pub struct LatticeSpec {
    pub bbox: BoundingBox,
    pub h: f64,
}

fn axis_count(extent: f64, h: f64) -> usize {
    (extent / h * (1.0 + 1e-12)).floor() as usize + 1
}

/// Every point `lo + h * (i, j[, k])` inside the box, with the first axis
/// varying slowest.
pub fn cartesian(spec: &LatticeSpec) -> Result<PointSet> {
    let b = &spec.bbox;
    let dim = b.dim();
    if !(spec.h > 0.0) || (0..dim).any(|a| spec.h > b.extent(a) * (1.0 + 1e-12)) {
        return Err(invalid("lattice spacing must be positive and fit the box"));
    }
    let n: Vec<usize> = (0..dim).map(|a| axis_count(b.extent(a), spec.h)).collect();
    let at = |a: usize, i: usize| (b.lo[a] + i as f64 * spec.h).min(b.hi[a]);
    let mut set = PointSet::new(dim);
    if dim == 2 {
        for i in 0..n[0] {
            for j in 0..n[1] {
                set.push(Point::xy(at(0, i), at(1, j)));
            }
        }
    } else {
        for i in 0..n[0] {
            for j in 0..n[1] {
                for k in 0..n[2] {
                    set.push(Point::xyz(at(0, i), at(1, j), at(2, k)));
                }
            }
        }
    }
    set.meta.field = format!("cartesian:{}", spec.h);
    Ok(set)
}

/// 2-D hexagonal lattice with nearest-neighbor distance `h`: rows `h√3/2`
/// apart, odd rows shifted by `h/2`.
pub fn hexagonal(bbox: &BoundingBox, h: f64) -> Result<PointSet> {
    if bbox.dim() != 2 || !(h > 0.0) {
        return Err(invalid("hexagonal lattice needs a 2-D box and h > 0"));
    }
    let dy = h * 3f64.sqrt() / 2.0;
    let rows = axis_count(bbox.extent(1), dy);
    let mut set = PointSet::new(2);
    for row in 0..rows {
        let y = bbox.lo[1] + row as f64 * dy;
        let mut x = bbox.lo[0] + if row % 2 == 1 { 0.5 * h } else { 0.0 };
        while x <= bbox.hi[0] {
            set.push(Point::xy(x, y));
            x += h;
        }
    }
    set.meta.field = format!("hexagonal:{h}");
    Ok(set)
}

/// Van der Corput radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut x = 0.0;
    while i > 0 {
        x += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    x
}

/// The first `n` primes.
pub fn first_primes(n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct HaltonSpec {
    pub bbox: BoundingBox,
    pub count: usize,
    /// First sequence index; 1 skips the origin.
    pub start: u64,
}

impl HaltonSpec {
    pub fn new(bbox: BoundingBox, count: usize) -> Self {
        Self { bbox, count, start: 1 }
    }
}

/// Halton points with the first `dim` primes as bases, scaled to the box.
pub fn halton(spec: &HaltonSpec) -> Result<PointSet> {
    if spec.count == 0 {
        return Err(invalid("halton needs at least one point"));
    }
    let b = &spec.bbox;
    let dim = b.dim();
    let bases = first_primes(dim);
    let mut set = PointSet::new(dim);
    for i in spec.start..spec.start + spec.count as u64 {
        let mut c = [0.0; 3];
        for a in 0..dim {
            c[a] = b.lo[a] + radical_inverse(i, bases[a]) * b.extent(a);
        }
        set.push(Point { coords: c });
    }
    set.meta.field = format!("halton:{}", spec.count);
    Ok(set)
}
