//! Node-set quality measures: minimal-spacing checks, covering radius, mesh
//! ratio, L-gap, packing density and k-nearest-neighbor regularity.
//!
//! Covering radius, L-gap and packing density are measured on a dense sample
//! lattice over an interior region. The sampled covering radius approaches
//! the true Voronoi circumradius from below as the lattice is refined.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::field::RadiusField;
use crate::geometry::{ball_volume, BoundingBox, Point, PointSet, SpatialIndex};

/// Which radius a pair of nodes must respect, given the earlier node `i` and
/// the later node `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpacingVariation {
    /// `r(p_i)`
    Prior,
    /// `r(p_j)`
    Current,
    /// `max(r(p_i), r(p_j))`
    Bigger,
    /// `min(r(p_i), r(p_j))`
    Smaller,
}

impl SpacingVariation {
    pub fn required(self, r_earlier: f64, r_later: f64) -> f64 {
        match self {
            Self::Prior => r_earlier,
            Self::Current => r_later,
            Self::Bigger => r_earlier.max(r_later),
            Self::Smaller => r_earlier.min(r_later),
        }
    }
}

impl std::str::FromStr for SpacingVariation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prior" => Ok(Self::Prior),
            "current" => Ok(Self::Current),
            "bigger" => Ok(Self::Bigger),
            "smaller" => Ok(Self::Smaller),
            _ => Err(invalid(format!("unknown spacing variation {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation {
    pub earlier: usize,
    pub later: usize,
    pub distance: f64,
    pub required: f64,
}

/// Relative slack so that lattice neighbors exactly `h` apart are not flagged
/// because of round-off in their coordinates.
const ROUNDOFF: f64 = 1e-12;

/// Every pair `i < j` (emission order) closer than `f(p_i, p_j) - tolerance`.
/// Sorted by `(later, earlier)`.
pub fn check_spacing(
    points: &PointSet,
    field: &dyn RadiusField,
    variation: SpacingVariation,
    tolerance: f64,
) -> Vec<Violation> {
    if points.len() < 2 {
        return Vec::new();
    }
    let pts = points.points();
    let radii: Vec<f64> = pts.iter().map(|p| field.radius(p)).collect();
    let reach = radii.iter().copied().fold(0.0, f64::max);
    let index = SpatialIndex::new(pts, points.dim(), reach.max(f64::MIN_POSITIVE));
    let mut out: Vec<Violation> = (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|j| {
            let mut found = Vec::new();
            index.for_each_in_ball(&pts[j], reach, |i, d2| {
                if i < j {
                    let required = variation.required(radii[i], radii[j]);
                    let distance = d2.sqrt();
                    if distance < required * (1.0 - ROUNDOFF) - tolerance {
                        found.push(Violation { earlier: i, later: j, distance, required });
                    }
                }
            });
            found
        })
        .collect();
    out.sort_by_key(|v| (v.later, v.earlier));
    out
}

/// Regular lattice of sample locations over a (possibly degenerate) box.
#[derive(Clone, Debug)]
pub struct SampleGrid {
    dim: usize,
    lo: Point,
    hi: Point,
    counts: [usize; 3],
    spacing: f64,
}

impl SampleGrid {
    /// Samples `lo + k * spacing` along each axis, closed off by a final
    /// sample at `hi` when the spacing does not divide the extent.
    pub fn new(lo: Point, hi: Point, dim: usize, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(invalid("sample spacing must be positive"));
        }
        let mut counts = [1usize; 3];
        for a in 0..dim {
            let ext = hi[a] - lo[a];
            if !(ext >= 0.0) {
                return Err(invalid("empty sample region"));
            }
            let steps = (ext / spacing * (1.0 + 1e-12)).floor();
            let short = lo[a] + steps * spacing < hi[a] - 1e-12 * spacing;
            counts[a] = steps as usize + 1 + short as usize;
        }
        Ok(Self { dim, lo, hi, counts, spacing })
    }

    pub fn over(region: &BoundingBox, spacing: f64) -> Result<Self> {
        Self::new(region.lo, region.hi, region.dim(), spacing)
    }

    /// Lattice spacing `field.r_min() / factor`.
    pub fn for_field(region: &BoundingBox, field: &dyn RadiusField, factor: f64) -> Result<Self> {
        Self::over(region, field.r_min() / factor)
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn sample(&self, i: usize, j: usize, k: usize) -> Point {
        let mut c = self.lo.coords;
        for (a, step) in [i, j, k].into_iter().enumerate().take(self.dim) {
            c[a] = (c[a] + step as f64 * self.spacing).min(self.hi[a]);
        }
        Point { coords: c }
    }

    /// Folds `f(acc, sample, nearest distance)` over every sample, one rayon
    /// task per first-axis slab. Neighboring samples are `spacing` apart, so
    /// the previous distance plus `spacing` bounds the next nearest-node search.
    fn fold_nearest<T, F, R>(&self, index: &SpatialIndex, init: impl Fn() -> T + Sync + Send, f: F, reduce: R) -> T
    where
        T: Send,
        F: Fn(&mut T, &Point, f64) + Sync + Send,
        R: Fn(T, T) -> T + Sync + Send,
    {
        let step = self.spacing * (1.0 + 1e-9);
        let nearest = |q: &Point, bound: Option<f64>| -> f64 {
            bound
                .and_then(|b| index.nearest_within(q, b + step))
                .or_else(|| index.nearest(q))
                .expect("index is non-empty")
                .1
        };
        let parts: Vec<T> = (0..self.counts[0])
            .into_par_iter()
            .map(|i| {
                let mut acc = init();
                let mut row_start: Option<f64> = None;
                for j in 0..self.counts[1] {
                    let mut prev = row_start;
                    for k in 0..self.counts[2] {
                        let q = self.sample(i, j, k);
                        let d = nearest(&q, prev);
                        if k == 0 {
                            row_start = Some(d);
                        }
                        prev = Some(d);
                        f(&mut acc, &q, d);
                    }
                }
                acc
            })
            .collect();
        parts.into_iter().reduce(reduce).unwrap_or_else(init)
    }
}

fn index_for(points: &PointSet, cell: f64) -> Result<SpatialIndex> {
    if points.is_empty() {
        return Err(Error::InsufficientData { needed: 1, available: 0 });
    }
    Ok(SpatialIndex::new(points.points(), points.dim(), cell))
}

fn typical_spacing(points: &PointSet) -> f64 {
    // cell size for neighbor queries: the mean spacing of the cloud
    let pts = points.points();
    let mut lo = pts[0].coords;
    let mut hi = pts[0].coords;
    for p in pts {
        for a in 0..points.dim() {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let vol: f64 = (0..points.dim()).map(|a| (hi[a] - lo[a]).max(1e-300)).product();
    let s = (vol / pts.len() as f64).powf(1.0 / points.dim() as f64);
    if s.is_finite() && s > 0.0 {
        s
    } else {
        1.0
    }
}

/// Largest distance from a sample location to its nearest node.
pub fn covering_radius(points: &PointSet, grid: &SampleGrid) -> Result<f64> {
    let index = index_for(points, typical_spacing(points))?;
    Ok(grid.fold_nearest(&index, || 0.0f64, |m, _, d| *m = m.max(d), f64::max))
}

/// Largest ratio of nearest-node distance to local radius over the samples.
pub fn l_gap(points: &PointSet, field: &dyn RadiusField, grid: &SampleGrid) -> Result<f64> {
    let index = index_for(points, typical_spacing(points))?;
    Ok(grid.fold_nearest(&index, || 0.0f64, |m, q, d| *m = m.max(d / field.radius(q)), f64::max))
}

/// Fraction of the sampled region covered by balls of radius `r / 2` around
/// the nodes. Only defined for a uniform radius.
pub fn packing_density(points: &PointSet, field: &dyn RadiusField, grid: &SampleGrid) -> Result<f64> {
    if !field.is_uniform() {
        return Err(invalid("packing density needs a uniform radius field"));
    }
    let half = 0.5 * field.r_min();
    let index = index_for(points, typical_spacing(points))?;
    let covered = grid.fold_nearest(
        &index,
        || 0usize,
        |c, _, d| {
            if d < half {
                *c += 1;
            }
        },
        |a, b| a + b,
    );
    Ok(covered as f64 / grid.len() as f64)
}

/// Largest nearest-neighbor distance over the whole set. Boundary nodes are
/// included on purpose: for a front-generated set every interior node sits
/// exactly `r` from an earlier one, and only the first layer can exceed that.
fn max_nn_distance(points: &PointSet, index: &SpatialIndex) -> Result<f64> {
    let nn: Vec<f64> = (0..points.len())
        .into_par_iter()
        .map(|i| Ok(index.knn_excluding(&points.points()[i], 1, i)?[0].1))
        .collect::<Result<_>>()?;
    Ok(nn.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshRatio {
    /// Covering radius.
    pub rho: f64,
    /// Largest nearest-neighbor distance over all nodes.
    pub delta: f64,
    pub gamma: f64,
}

pub fn mesh_ratio(points: &PointSet, region: &BoundingBox, grid: &SampleGrid) -> Result<MeshRatio> {
    let interior = points.indices_in(region).len();
    if interior < 2 || points.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, available: interior });
    }
    let index = index_for(points, typical_spacing(points))?;
    let delta = max_nn_distance(points, &index)?;
    let rho = covering_radius(points, grid)?;
    Ok(MeshRatio { rho, delta, gamma: rho / delta })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KnnStats {
    /// Mean over interior nodes of the mean distance to their k neighbors.
    pub mean: f64,
    /// Population standard deviation of the per-node means.
    pub std: f64,
    /// Mean over interior nodes of (farthest - nearest) neighbor distance.
    pub mean_range: f64,
    pub nodes: usize,
}

pub fn knn_stats(points: &PointSet, k: usize, region: &BoundingBox) -> Result<KnnStats> {
    if points.len() < k + 1 {
        return Err(Error::InsufficientData { needed: k + 1, available: points.len() });
    }
    let index = index_for(points, typical_spacing(points))?;
    let per_node: Vec<(f64, f64)> = points
        .indices_in(region)
        .into_par_iter()
        .map(|i| {
            let nn = index.knn_excluding(&points.points()[i], k, i)?;
            let mean = nn.iter().map(|x| x.1).sum::<f64>() / k as f64;
            Ok((mean, nn[k - 1].1 - nn[0].1))
        })
        .collect::<Result<_>>()?;
    if per_node.is_empty() {
        return Err(Error::InsufficientData { needed: 1, available: 0 });
    }
    let n = per_node.len() as f64;
    let mean = per_node.iter().map(|x| x.0).sum::<f64>() / n;
    let var = per_node.iter().map(|x| (x.0 - mean).powi(2)).sum::<f64>() / n;
    let mean_range = per_node.iter().map(|x| x.1).sum::<f64>() / n;
    Ok(KnnStats { mean, std: var.sqrt(), mean_range, nodes: per_node.len() })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistogramBins {
    pub count: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Default for HistogramBins {
    fn default() -> Self {
        Self { count: 30, lo: 0.5, hi: 2.0 }
    }
}

impl HistogramBins {
    pub fn edges(&self, b: usize) -> (f64, f64) {
        let w = (self.hi - self.lo) / self.count as f64;
        (self.lo + b as f64 * w, self.lo + (b + 1) as f64 * w)
    }

    /// Bin of `x`; out-of-range values land in the end bins.
    pub fn bin_of(&self, x: f64) -> usize {
        let t = (x - self.lo) / (self.hi - self.lo) * self.count as f64;
        (t.floor().max(0.0) as usize).min(self.count - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub fraction: f64,
}

/// Distribution of `|p_j - p_{i,j}| / r(p_j)` over the `k` nearest neighbors
/// of every node in `region`, normalized to sum to one.
pub fn nn_histogram(
    points: &PointSet,
    field: &dyn RadiusField,
    k: usize,
    region: &BoundingBox,
    bins: HistogramBins,
) -> Result<Vec<HistogramBin>> {
    if bins.count == 0 || !(bins.hi > bins.lo) {
        return Err(invalid("histogram needs at least one bin over a non-empty range"));
    }
    if points.len() < k + 1 {
        return Err(Error::InsufficientData { needed: k + 1, available: points.len() });
    }
    let index = index_for(points, typical_spacing(points))?;
    let mut counts = vec![0usize; bins.count];
    let mut total = 0usize;
    for i in points.indices_in(region) {
        let p = &points.points()[i];
        let r = field.radius(p);
        for (_, d) in index.knn_excluding(p, k, i)? {
            counts[bins.bin_of(d / r)] += 1;
            total += 1;
        }
    }
    Ok(counts
        .iter()
        .enumerate()
        .map(|(b, &c)| {
            let (lo, hi) = bins.edges(b);
            HistogramBin { lo, hi, fraction: if total > 0 { c as f64 / total as f64 } else { 0.0 } }
        })
        .collect())
}

pub fn histogram_csv(bins: &[HistogramBin]) -> String {
    let mut s = String::from("bin_lo,bin_hi,fraction\n");
    for b in bins {
        let _ = writeln!(s, "{},{},{}", b.lo, b.hi, b.fraction);
    }
    s
}

/// Slope of the least-squares line through the points `(x[i], y[i])`; zero
/// when `x` has no spread.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

/// Interior region used when none is given: the bounding box of the points
/// shrunk by `2 * r_max` on every face.
pub fn default_interior(points: &PointSet, field: &dyn RadiusField) -> Result<BoundingBox> {
    if points.is_empty() {
        return Err(Error::InsufficientData { needed: 1, available: 0 });
    }
    let dim = points.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in points {
        for a in 0..dim {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    BoundingBox::new(&lo, &hi)?.inset(2.0 * field.r_max())
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub k: usize,
    pub interior: Option<BoundingBox>,
    pub sample_factor: f64,
    pub variation: SpacingVariation,
    pub spacing_tolerance: f64,
}

impl ReportOptions {
    pub fn for_dim(dim: usize) -> Self {
        Self {
            k: if dim == 2 { 6 } else { 12 },
            interior: None,
            sample_factor: 20.0,
            variation: SpacingVariation::Prior,
            spacing_tolerance: 0.0,
        }
    }
}

/// All quality measures for one node set.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityReport {
    pub n: usize,
    pub interior_nodes: usize,
    /// `None` for a non-uniform radius field.
    pub packing_density: Option<f64>,
    pub covering_radius: f64,
    pub max_nn_distance: f64,
    pub mesh_ratio: f64,
    pub l_gap: f64,
    pub k: usize,
    pub knn_mean: f64,
    pub knn_std: f64,
    pub knn_mean_range: f64,
    pub spacing_violations: usize,
}

impl QualityReport {
    pub fn compute(points: &PointSet, field: &dyn RadiusField, opts: &ReportOptions) -> Result<Self> {
        let region = match opts.interior {
            Some(b) => b,
            None => default_interior(points, field)?,
        };
        let grid = SampleGrid::for_field(&region, field, opts.sample_factor)?;
        let index = index_for(points, typical_spacing(points))?;
        let interior_nodes = points.indices_in(&region).len();
        if interior_nodes < 2 {
            return Err(Error::InsufficientData { needed: 2, available: interior_nodes });
        }
        let delta = max_nn_distance(points, &index)?;
        let half = 0.5 * field.r_min();
        // one pass over the samples: (max distance, max distance / r, covered)
        let (rho, l, covered) = grid.fold_nearest(
            &index,
            || (0.0f64, 0.0f64, 0usize),
            |acc, q, d| {
                acc.0 = acc.0.max(d);
                acc.1 = acc.1.max(d / field.radius(q));
                if d < half {
                    acc.2 += 1;
                }
            },
            |a, b| (a.0.max(b.0), a.1.max(b.1), a.2 + b.2),
        );
        let knn = knn_stats(points, opts.k, &region)?;
        let violations = check_spacing(points, field, opts.variation, opts.spacing_tolerance).len();
        Ok(Self {
            n: points.len(),
            interior_nodes,
            packing_density: field.is_uniform().then(|| covered as f64 / grid.len() as f64),
            covering_radius: rho,
            max_nn_distance: delta,
            mesh_ratio: rho / delta,
            l_gap: l,
            k: opts.k,
            knn_mean: knn.mean,
            knn_std: knn.std,
            knn_mean_range: knn.mean_range,
            spacing_violations: violations,
        })
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        let pd = self.packing_density.map_or_else(|| "nan".to_string(), |v| format!("{v:.10}"));
        vec![
            ("N", self.n.to_string()),
            ("interior_nodes", self.interior_nodes.to_string()),
            ("packing_density", pd),
            ("covering_radius", format!("{:.10}", self.covering_radius)),
            ("max_nn_distance", format!("{:.10}", self.max_nn_distance)),
            ("mesh_ratio", format!("{:.10}", self.mesh_ratio)),
            ("l_gap", format!("{:.10}", self.l_gap)),
            ("k", self.k.to_string()),
            ("knn_mean", format!("{:.10}", self.knn_mean)),
            ("knn_std", format!("{:.10e}", self.knn_std)),
            ("knn_mean_range", format!("{:.10}", self.knn_mean_range)),
            ("spacing_violations", self.spacing_violations.to_string()),
        ]
    }

    pub fn to_key_value(&self) -> String {
        self.fields().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn csv_header() -> String {
        let dummy = Self {
            n: 0,
            interior_nodes: 0,
            packing_density: None,
            covering_radius: 0.0,
            max_nn_distance: 0.0,
            mesh_ratio: 0.0,
            l_gap: 0.0,
            k: 0,
            knn_mean: 0.0,
            knn_std: 0.0,
            knn_mean_range: 0.0,
            spacing_violations: 0,
        };
        dummy.fields().into_iter().map(|(k, _)| k).collect::<Vec<_>>().join(",")
    }

    pub fn to_csv_row(&self) -> String {
        self.fields().into_iter().map(|(_, v)| v).collect::<Vec<_>>().join(",")
    }
}

/// Packing density of an ideal lattice, for reference: the ball volume of
/// radius `r / 2` times the number density.
pub fn lattice_packing(dim: usize, r: f64, nodes_per_volume: f64) -> f64 {
    ball_volume(dim, 0.5 * r) * nodes_per_volume
}
