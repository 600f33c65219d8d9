//! Points, boxes, point sets and the seeded random stream shared by every
//! generator and metric in the crate.
//!
//! Points are stored with three coordinate slots. A 2-D point keeps its third
//! slot at zero, so Euclidean distances need no dimension branch.

mod buckets;
mod index;
mod io;

pub(crate) use buckets::PointBuckets;
pub use index::SpatialIndex;
pub use io::{parse_points, read_points, write_points};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

/// Random stream used for every randomized step (front perturbation, Halton
/// shuffles, stencil centers, evaluation points). ChaCha8 produces the same
/// stream on every platform for a given seed.
pub type NodeRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> NodeRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub coords: [f64; 3],
}

impl Point {
    pub const ORIGIN: Point = Point { coords: [0.0; 3] };

    pub fn xy(x: f64, y: f64) -> Self {
        Self { coords: [x, y, 0.0] }
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Self { coords: [x, y, z] }
    }

    /// Builds a point from 2 or 3 finite coordinates.
    pub fn from_slice(c: &[f64]) -> Result<Self> {
        if !(2..=3).contains(&c.len()) {
            return Err(invalid(format!("points need 2 or 3 coordinates, got {}", c.len())));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite coordinate"));
        }
        let mut coords = [0.0; 3];
        coords[..c.len()].copy_from_slice(c);
        Ok(Self { coords })
    }

    #[inline]
    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.coords[0] - other.coords[0];
        let dy = self.coords[1] - other.coords[1];
        let dz = self.coords[2] - other.coords[2];
        dx * dx + dy * dy + dz * dz
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.dist(&Point::ORIGIN)
    }

    pub fn translated(&self, offset: [f64; 3]) -> Point {
        Point::xyz(self.coords[0] + offset[0], self.coords[1] + offset[1], self.coords[2] + offset[2])
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, axis: usize) -> &f64 {
        &self.coords[axis]
    }
}

/// Axis-aligned box with `lo < hi` on every used axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    dim: usize,
    pub lo: Point,
    pub hi: Point,
}

impl BoundingBox {
    pub fn new(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(invalid("box corners differ in dimension"));
        }
        let (lo_p, hi_p) = (Point::from_slice(lo)?, Point::from_slice(hi)?);
        if lo.iter().zip(hi).any(|(a, b)| a >= b) {
            return Err(invalid("box needs lo < hi on every axis"));
        }
        Ok(Self { dim: lo.len(), lo: lo_p, hi: hi_p })
    }

    pub fn unit(dim: usize) -> Self {
        let hi = vec![1.0; dim];
        Self::new(&vec![0.0; dim], &hi).expect("unit box is valid")
    }

    /// Cube `[-half, half]^dim`.
    pub fn centered(dim: usize, half: f64) -> Result<Self> {
        Self::new(&vec![-half; dim], &vec![half; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|a| self.extent(a)).product()
    }

    pub fn center(&self) -> Point {
        let mut c = [0.0; 3];
        for a in 0..self.dim {
            c[a] = 0.5 * (self.lo[a] + self.hi[a]);
        }
        Point { coords: c }
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..self.dim).all(|a| p[a] >= self.lo[a] && p[a] <= self.hi[a])
    }

    /// Shrinks the box by `margin` on every face.
    pub fn inset(&self, margin: f64) -> Result<Self> {
        let lo: Vec<f64> = (0..self.dim).map(|a| self.lo[a] + margin).collect();
        let hi: Vec<f64> = (0..self.dim).map(|a| self.hi[a] - margin).collect();
        Self::new(&lo, &hi).map_err(|_| invalid(format!("inset {margin} leaves an empty box")))
    }

    pub fn translated(&self, offset: [f64; 3]) -> Self {
        Self { dim: self.dim, lo: self.lo.translated(offset), hi: self.hi.translated(offset) }
    }
}

/// Where a point set came from. Carried along for reports and file headers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointSetMeta {
    pub seed: Option<u64>,
    pub field: String,
    pub grid_factor: Option<usize>,
}

/// Points in emission order. Order matters for the prior/current spacing
/// checks, which ask whether a node respects the disks of earlier nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
    pub meta: PointSetMeta,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        assert!((2..=3).contains(&dim), "dimension must be 2 or 3");
        Self { dim, points: Vec::new(), meta: PointSetMeta::default() }
    }

    pub fn from_points(dim: usize, points: Vec<Point>) -> Self {
        let mut set = Self::new(dim);
        set.points = points;
        set
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn push(&mut self, p: Point) {
        self.points.push(p);
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// Keeps only the points accepted by `inside`, preserving order. This is
    /// how node sets for non-box domains are cut out of a filled box.
    pub fn retain(&mut self, inside: impl FnMut(&Point) -> bool) {
        self.points.retain(inside);
    }

    pub fn translated(&self, offset: [f64; 3]) -> Self {
        Self {
            dim: self.dim,
            points: self.points.iter().map(|p| p.translated(offset)).collect(),
            meta: self.meta.clone(),
        }
    }

    /// Indices of the points lying in `region`.
    pub fn indices_in(&self, region: &BoundingBox) -> Vec<usize> {
        (0..self.len()).filter(|&i| region.contains(&self.points[i])).collect()
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Upper bound on the number of nodes with pairwise spacing at least `r_min`
/// that fit in `bbox`: its volume over the volume of a ball of radius
/// `r_min / 2`.
pub fn max_node_bound(bbox: &BoundingBox, r_min: f64) -> Result<f64> {
    if !(r_min > 0.0) {
        return Err(invalid("r_min must be positive"));
    }
    Ok(bbox.volume() / ball_volume(bbox.dim(), 0.5 * r_min))
}

pub fn ball_volume(dim: usize, radius: f64) -> f64 {
    match dim {
        2 => std::f64::consts::PI * radius * radius,
        3 => 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3),
        _ => panic!("unsupported dimension {dim}"),
    }
}
