//! Radially advancing front: the lattice lives on the sphere of directions
//! and each cell's height is a distance from the origin.
//!
//! Directions are laid out in rows of constant polar angle with a uniform
//! azimuthal step. The two polar caps, where rows would degenerate, are single
//! cells. Placing a node at `p` with radius `r` lifts every direction whose ray
//! meets the ball around `p` to the ray's exit point from that ball.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::field::{evaluate, RadiusField};
use crate::front::{lane_min, GenerationStats, LIFT_ROUNDS};
use crate::geometry::{seeded_rng, BoundingBox, Point, PointBuckets, PointSet, PointSetMeta, SpatialIndex};
use crate::quality::{least_squares_slope, HistogramBins};

/// Which radius the spacing between a new node and earlier ones follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Variation {
    /// The radius of the earlier node only.
    #[default]
    Prior,
    /// The larger of the two radii: candidates are pushed outward until
    /// their own radius is also clear.
    Bigger,
}

#[derive(Clone, Copy)]
pub struct SphericalConfig<'f> {
    pub field: &'f dyn RadiusField,
    pub outer_radius: f64,
    pub seed: u64,
    pub grid_factor: usize,
    pub variation: Variation,
    /// Initial heights are drawn from `[0, scale * r(origin)]`.
    pub perturbation_scale: f64,
    /// Overrides the polar step `r_min / (grid_factor * outer_radius)`.
    pub angular_spacing: Option<f64>,
}

impl<'f> SphericalConfig<'f> {
    pub fn new(field: &'f dyn RadiusField, outer_radius: f64) -> Self {
        Self {
            field,
            outer_radius,
            seed: 0,
            grid_factor: 10,
            variation: Variation::Prior,
            perturbation_scale: 0.25,
            angular_spacing: None,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn grid_factor(mut self, gf: usize) -> Self {
        self.grid_factor = gf;
        self
    }

    pub fn variation(mut self, v: Variation) -> Self {
        self.variation = v;
        self
    }

    pub fn perturbation_scale(mut self, s: f64) -> Self {
        self.perturbation_scale = s;
        self
    }

    pub fn angular_spacing(mut self, dtheta: f64) -> Self {
        self.angular_spacing = Some(dtheta);
        self
    }

    fn dtheta(&self) -> Result<f64> {
        if !(self.outer_radius > 0.0 && self.outer_radius.is_finite()) {
            return Err(invalid("outer radius must be positive"));
        }
        if self.grid_factor == 0 {
            return Err(invalid("grid factor must be at least 1"));
        }
        if !(self.perturbation_scale >= 0.0 && self.perturbation_scale.is_finite()) {
            return Err(invalid("perturbation scale must be finite and >= 0"));
        }
        let r_min = self.field.r_min();
        if !(r_min > 0.0) {
            return Err(invalid("radius field needs r_min > 0"));
        }
        let resolving = r_min / self.outer_radius;
        match self.angular_spacing {
            None => Ok(resolving / self.grid_factor as f64),
            Some(d) if d > 0.0 && d <= resolving => Ok(d),
            Some(d) if d > resolving => Err(Error::AngularResolution { required: resolving, actual: d }),
            Some(_) => Err(invalid("angular spacing must be positive")),
        }
    }
}

/// Front heights over the direction lattice.
#[derive(Clone, Debug)]
pub struct SphericalFront {
    /// Polar angle of each row.
    theta: Vec<f64>,
    sin_theta: Vec<f64>,
    cos_theta: Vec<f64>,
    n_phi: usize,
    dphi: f64,
    cos_phi: Vec<f64>,
    sin_phi: Vec<f64>,
    /// Polar angle below which directions belong to a cap cell.
    cap: f64,
    dtheta: f64,
    /// Cell 0 is the north cap, the last cell the south cap, rows between.
    heights: Vec<f64>,
}

pub fn init_spherical_front(config: &SphericalConfig<'_>) -> Result<SphericalFront> {
    let dtheta = config.dtheta()?;
    let cap = (config.field.r_min() / config.outer_radius).min(1.0).asin().max(0.5 * dtheta);
    let n_rows = (((PI - 2.0 * cap) / dtheta).round() as usize) + 1;
    let step = if n_rows > 1 { (PI - 2.0 * cap) / (n_rows - 1) as f64 } else { 0.0 };
    let theta: Vec<f64> = (0..n_rows).map(|i| if n_rows > 1 { cap + i as f64 * step } else { 0.5 * PI }).collect();
    let n_phi = ((TAU / dtheta).ceil() as usize).max(3);
    let dphi = TAU / n_phi as f64;
    let mut front = SphericalFront {
        sin_theta: theta.iter().map(|t| t.sin()).collect(),
        cos_theta: theta.iter().map(|t| t.cos()).collect(),
        theta,
        n_phi,
        dphi,
        cos_phi: (0..n_phi).map(|j| (j as f64 * dphi).cos()).collect(),
        sin_phi: (0..n_phi).map(|j| (j as f64 * dphi).sin()).collect(),
        cap,
        dtheta,
        heights: Vec::new(),
    };
    let amp = config.perturbation_scale * evaluate(config.field, &Point::ORIGIN)?;
    let mut rng = seeded_rng(config.seed);
    front.heights = (0..front.cell_count()).map(|_| amp * rng.random::<f64>()).collect();
    Ok(front)
}

impl SphericalFront {
    pub fn cell_count(&self) -> usize {
        self.theta.len() * self.n_phi + 2
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// Polar step of the lattice in radians.
    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }

    fn south(&self) -> usize {
        self.cell_count() - 1
    }

    fn row_col(&self, cell: usize) -> Option<(usize, usize)> {
        (cell != 0 && cell != self.south()).then(|| ((cell - 1) / self.n_phi, (cell - 1) % self.n_phi))
    }

    /// Unit direction of a cell.
    pub fn direction(&self, cell: usize) -> [f64; 3] {
        match self.row_col(cell) {
            None if cell == 0 => [0.0, 0.0, 1.0],
            None => [0.0, 0.0, -1.0],
            Some((i, j)) => {
                let s = self.sin_theta[i];
                [s * self.cos_phi[j], s * self.sin_phi[j], self.cos_theta[i]]
            }
        }
    }

    pub fn cell_point(&self, cell: usize, height: f64) -> Point {
        let u = self.direction(cell);
        Point::xyz(u[0] * height, u[1] * height, u[2] * height)
    }

    fn angle(&self, a: usize, b: usize) -> f64 {
        let (u, v) = (self.direction(a), self.direction(b));
        (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]).clamp(-1.0, 1.0).acos()
    }

    /// Visits, as contiguous flat-index ranges, every lattice cell whose
    /// direction is within angle `radius` of the unit vector `v` (the row
    /// ranges are padded by half a cell; callers needing exactness check the
    /// angle themselves).
    fn for_each_span(&self, v: [f64; 3], radius: f64, mut f: impl FnMut(usize, usize)) {
        let theta_v = v[2].clamp(-1.0, 1.0).acos();
        let sin_v = (v[0] * v[0] + v[1] * v[1]).sqrt();
        let phi_v = v[1].atan2(v[0]).rem_euclid(TAU);
        if theta_v <= radius + self.cap {
            f(0, 0);
        }
        if PI - theta_v <= radius + self.cap {
            f(self.south(), self.south());
        }
        let pad = 0.5 * self.dtheta;
        let cos_r = (radius + pad).min(PI).cos();
        for (i, &t) in self.theta.iter().enumerate() {
            if (t - theta_v).abs() > radius + pad {
                continue;
            }
            let row = 1 + i * self.n_phi;
            let denom = self.sin_theta[i] * sin_v;
            let q = if denom > 1e-300 { (cos_r - self.cos_theta[i] * v[2]) / denom } else { -2.0 };
            if q <= -1.0 {
                f(row, row + self.n_phi - 1);
                continue;
            }
            if q > 1.0 {
                continue;
            }
            let half = q.acos();
            let lo = ((phi_v - half) / self.dphi).ceil() as i64;
            let hi = ((phi_v + half) / self.dphi).floor() as i64;
            if hi < lo {
                continue;
            }
            let n = self.n_phi as i64;
            if hi - lo + 1 >= n {
                f(row, row + self.n_phi - 1);
                continue;
            }
            let (a, b) = (lo.rem_euclid(n) as usize, hi.rem_euclid(n) as usize);
            if a <= b {
                f(row + a, row + b);
            } else {
                f(row + a, row + self.n_phi - 1);
                f(row, row + b);
            }
        }
    }

    /// Lifts every direction whose ray meets the ball of radius `r` around
    /// `p` to the ray's exit point. Returns the lowest changed cell.
    pub fn update_front(&mut self, p: &Point, r: f64) -> Option<usize> {
        let pn = p.norm();
        let (v, reach) = if pn <= r || pn == 0.0 {
            ([0.0, 0.0, 1.0], PI)
        } else {
            ([p[0] / pn, p[1] / pn, p[2] / pn], (r / pn).asin())
        };
        let c = pn * pn - r * r;
        let mut lowest: Option<(f64, usize)> = None;
        let mut lift = |cell: usize, heights: &mut [f64], u: [f64; 3]| {
            let b = u[0] * p[0] + u[1] * p[1] + u[2] * p[2];
            let disc = b * b - c;
            if disc < 0.0 {
                return;
            }
            let t = b + disc.sqrt();
            if t > heights[cell] {
                heights[cell] = t;
                if lowest.is_none_or(|(h, l)| (t, cell) < (h, l)) {
                    lowest = Some((t, cell));
                }
            }
        };
        let mut spans = Vec::new();
        self.for_each_span(v, reach, |lo, hi| spans.push((lo, hi)));
        for (lo, hi) in spans {
            for cell in lo..=hi {
                let u = self.direction(cell);
                lift(cell, &mut self.heights, u);
            }
        }
        lowest.map(|(_, c)| c)
    }

    /// Lowest cell within angle `radius` of `center`; ties go to the smaller
    /// index.
    pub fn window_argmin(&self, center: usize, radius: f64) -> usize {
        let mut best = (self.heights[center], center);
        self.for_each_span(self.direction(center), radius, |lo, hi| {
            let seg = &self.heights[lo..=hi];
            let m = lane_min(seg);
            if m > best.0 {
                return;
            }
            if let Some(k) = seg.iter().position(|&h| h == m) {
                if m < best.0 || lo + k < best.1 {
                    best = (m, lo + k);
                }
            }
        });
        best.1
    }

    /// Moving-window descent with window angle `2r / R` at the current
    /// height `R`, stopping once the jump's arc length is at most `r`.
    pub fn find_next_minimum(&self, start: usize, r: f64, iterations: &mut u64) -> usize {
        let mut cur = start;
        loop {
            let height = self.heights[cur];
            let window = if height > 0.0 { (2.0 * r / height).min(PI) } else { PI };
            let next = self.window_argmin(cur, window);
            *iterations += 1;
            if next == cur || self.angle(cur, next) * height <= r {
                return next;
            }
            cur = next;
        }
    }

    pub fn global_argmin(&self) -> usize {
        let mut best = 0;
        for (c, &h) in self.heights.iter().enumerate() {
            if h < self.heights[best] {
                best = c;
            }
        }
        best
    }
}

/// Pushes `p` outward along its ray until no node lies within its own
/// radius, or until it passes `ceiling`.
fn lift_outward(
    p: Point,
    nodes: &[Point],
    buckets: &PointBuckets,
    field: &dyn RadiusField,
    ceiling: f64,
) -> Result<Point> {
    let t0 = p.norm();
    if t0 == 0.0 {
        return Ok(p);
    }
    let u = [p[0] / t0, p[1] / t0, p[2] / t0];
    let mut t = t0;
    let mut p = p;
    for _ in 0..LIFT_ROUNDS {
        if t > ceiling {
            break;
        }
        let r = evaluate(field, &p)?;
        let mut t_new = t;
        buckets.for_each_near(&p, r, |k| {
            let q = &nodes[k as usize];
            if q.dist2(&p) < r * r {
                let b = u[0] * q[0] + u[1] * q[1] + u[2] * q[2];
                let disc = b * b - q.dist2(&Point::ORIGIN) + r * r;
                if disc >= 0.0 {
                    t_new = t_new.max(b + disc.sqrt());
                }
            }
        });
        if t_new <= t {
            break;
        }
        t = t_new;
        p = Point::xyz(u[0] * t, u[1] * t, u[2] * t);
    }
    Ok(p)
}

/// Grows a node set outward from the origin until the whole front lies
/// beyond `outer_radius`.
pub fn generate_spherical(config: &SphericalConfig<'_>) -> Result<(PointSet, GenerationStats)> {
    let started = Instant::now();
    let mut front = init_spherical_front(config)?;
    let outer = config.outer_radius;
    let field = config.field;
    let cell = field.r_max().max(field.r_min());
    let mut buckets = PointBuckets::new(&BoundingBox::centered(3, outer + cell)?, cell, 96);

    let mut stats = GenerationStats { seed: config.seed, ..Default::default() };
    let mut nodes: Vec<Point> = Vec::new();
    let mut next = front.global_argmin();
    loop {
        let mut cell = next;
        if front.heights[cell] > outer {
            cell = front.global_argmin();
            stats.global_searches += 1;
            if front.heights[cell] > outer {
                break;
            }
        }
        let mut p = front.cell_point(cell, front.heights[cell]);
        if config.variation == Variation::Bigger {
            p = lift_outward(p, &nodes, &buckets, field, outer)?;
        }
        if p.norm() > outer {
            front.heights[cell] = p.norm();
            let r = evaluate(field, &p)?;
            next = front.find_next_minimum(cell, r, &mut stats.iterations);
            continue;
        }
        buckets.insert(&p, nodes.len() as u32);
        nodes.push(p);
        let r = evaluate(field, &p)?;
        let x0 = front.update_front(&p, r).unwrap_or(cell);
        next = front.find_next_minimum(x0, r, &mut stats.iterations);
    }

    stats.finish(nodes.len(), started);
    let mut set = PointSet::from_points(3, nodes);
    set.meta = PointSetMeta { seed: Some(config.seed), field: field.describe(), grid_factor: Some(config.grid_factor) };
    Ok((set, stats))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZBiasRow {
    pub z: f64,
    /// Nearest-neighbor distance divided by the node's own radius.
    pub nn_normalized: f64,
}

/// Normalized nearest-neighbor distance of every node against its height.
pub fn z_bias_diagnostic(points: &PointSet, field: &dyn RadiusField) -> Result<Vec<ZBiasRow>> {
    if points.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, available: points.len() });
    }
    let axis = points.dim() - 1;
    let index = SpatialIndex::new(points.points(), points.dim(), field.r_min());
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let d = index.knn_excluding(p, 1, i)?[0].1;
            Ok(ZBiasRow { z: p[axis], nn_normalized: d / evaluate(field, p)? })
        })
        .collect()
}

/// Least-squares slope of normalized distance against height.
pub fn z_bias_slope(rows: &[ZBiasRow]) -> f64 {
    let z: Vec<f64> = rows.iter().map(|r| r.z).collect();
    let d: Vec<f64> = rows.iter().map(|r| r.nn_normalized).collect();
    least_squares_slope(&z, &d)
}

pub fn z_bias_csv(rows: &[ZBiasRow]) -> String {
    let mut s = String::from("z,nn_normalized\n");
    for r in rows {
        let _ = writeln!(s, "{},{}", r.z, r.nn_normalized);
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZHistogramBin {
    pub z_lo: f64,
    pub z_hi: f64,
    pub d_lo: f64,
    pub d_hi: f64,
    pub fraction: f64,
}

/// Joint histogram of node height and `|p_j - p_{i,j}| / r(p_j)` over the
/// `k` nearest neighbors, normalized by the total count. Heights are binned
/// over the range of the set.
pub fn z_histogram(
    points: &PointSet,
    field: &dyn RadiusField,
    k: usize,
    z_bins: usize,
    d_bins: HistogramBins,
) -> Result<Vec<ZHistogramBin>> {
    if z_bins == 0 || d_bins.count == 0 || !(d_bins.hi > d_bins.lo) {
        return Err(invalid("histogram needs at least one bin per axis"));
    }
    if points.len() < k + 1 {
        return Err(Error::InsufficientData { needed: k + 1, available: points.len() });
    }
    let axis = points.dim() - 1;
    let (z_min, z_max) =
        points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[axis]), b.max(p[axis])));
    let z_span = if z_max > z_min { z_max - z_min } else { 1.0 };
    let zb = HistogramBins { count: z_bins, lo: z_min, hi: z_min + z_span };
    let index = SpatialIndex::new(points.points(), points.dim(), field.r_min());
    let mut counts = vec![0usize; z_bins * d_bins.count];
    let mut total = 0usize;
    for (i, p) in points.iter().enumerate() {
        let r = evaluate(field, p)?;
        let zi = zb.bin_of(p[axis]);
        for (_, d) in index.knn_excluding(p, k, i)? {
            counts[zi * d_bins.count + d_bins.bin_of(d / r)] += 1;
            total += 1;
        }
    }
    let mut out = Vec::with_capacity(counts.len());
    for zi in 0..z_bins {
        let (z_lo, z_hi) = zb.edges(zi);
        for di in 0..d_bins.count {
            let (d_lo, d_hi) = d_bins.edges(di);
            let fraction = counts[zi * d_bins.count + di] as f64 / total as f64;
            out.push(ZHistogramBin { z_lo, z_hi, d_lo, d_hi, fraction });
        }
    }
    Ok(out)
}

pub fn z_histogram_csv(bins: &[ZHistogramBin]) -> String {
    let mut s = String::from("z_bin_lo,z_bin_hi,d_bin_lo,d_bin_hi,fraction\n");
    for b in bins {
        let _ = writeln!(s, "{},{},{},{},{}", b.z_lo, b.z_hi, b.d_lo, b.d_hi, b.fraction);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{cartesian, LatticeSpec};
    use crate::field::{ConstantField, RadialExpField};
    use crate::geometry::BoundingBox;
    use crate::quality::{check_spacing, SpacingVariation};

    fn test_field() -> RadialExpField {
        RadialExpField::new(4.0 / 21.0, 1.0 / 15.0, 1.2).unwrap()
    }

    #[test]
    fn tiny_ball_gets_one_node() {
        let f = ConstantField::new(0.2).unwrap();
        let (set, _) = generate_spherical(&SphericalConfig::new(&f, 0.1)).unwrap();
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn coarse_angular_lattice_is_rejected() {
        let f = ConstantField::new(0.1).unwrap();
        let err = init_spherical_front(&SphericalConfig::new(&f, 1.0).angular_spacing(0.2)).unwrap_err();
        match err {
            Error::AngularResolution { required, actual } => {
                assert!((required - 0.1).abs() < 1e-15);
                assert_eq!(actual, 0.2);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn lattice_directions_are_unit_and_spans_cover_the_cap() {
        let f = ConstantField::new(0.1).unwrap();
        let front = init_spherical_front(&SphericalConfig::new(&f, 1.0).grid_factor(4)).unwrap();
        for c in [0, 1, 17, front.cell_count() - 1] {
            let u = front.direction(c);
            assert!(((u[0] * u[0] + u[1] * u[1] + u[2] * u[2]) - 1.0).abs() < 1e-14);
        }
        // spans around a direction agree with brute-force angle filtering
        let v = front.direction(1 + 40 * front.n_phi + 7);
        let radius = 0.3;
        let mut seen = vec![false; front.cell_count()];
        front.for_each_span(v, radius, |lo, hi| (lo..=hi).for_each(|c| seen[c] = true));
        for c in 0..front.cell_count() {
            let u = front.direction(c);
            let ang = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]).clamp(-1.0, 1.0).acos();
            if ang <= radius {
                assert!(seen[c], "cell {c} at angle {ang} missed");
            }
        }
    }

    #[test]
    fn update_lifts_rays_to_the_exit_point() {
        let f = ConstantField::new(0.1).unwrap();
        let mut front = init_spherical_front(&SphericalConfig::new(&f, 1.0).perturbation_scale(0.0)).unwrap();
        // ball around the origin: every ray exits at distance r
        front.update_front(&Point::ORIGIN, 0.3);
        assert!(front.heights().iter().all(|&h| (h - 0.3).abs() < 1e-12));
        // ball on the north axis: the north cap exits at |p| + r
        let p = Point::xyz(0.0, 0.0, 0.5);
        front.update_front(&p, 0.3);
        assert!((front.heights()[0] - 0.8).abs() < 1e-12);
        assert_eq!(front.heights()[front.cell_count() - 1], 0.3);
    }

    #[test]
    fn prior_variation_keeps_prior_spacing() {
        let f = test_field();
        let cfg = SphericalConfig::new(&f, 1.2).seed(3);
        let (set, stats) = generate_spherical(&cfg).unwrap();
        assert!(set.len() > 50);
        assert!(set.iter().all(|p| p.norm() <= 1.2));
        assert!(stats.mean_iterations < 5.0);
        assert!(check_spacing(&set, &f, SpacingVariation::Prior, 1e-9).is_empty());
    }

    #[test]
    fn bigger_variation_keeps_bigger_spacing() {
        let f = test_field();
        let cfg = SphericalConfig::new(&f, 1.2).seed(3).variation(Variation::Bigger);
        let (set, _) = generate_spherical(&cfg).unwrap();
        assert!(check_spacing(&set, &f, SpacingVariation::Bigger, 1e-9).is_empty());
    }

    #[test]
    fn same_seed_same_nodes() {
        let f = test_field();
        let a = generate_spherical(&SphericalConfig::new(&f, 1.0).seed(9)).unwrap().0;
        let b = generate_spherical(&SphericalConfig::new(&f, 1.0).seed(9)).unwrap().0;
        assert_eq!(a.points(), b.points());
    }

    #[test]
    fn lattice_has_unit_normalized_distances() {
        let h = 0.1;
        let set = cartesian(&LatticeSpec { bbox: BoundingBox::unit(3), h }).unwrap();
        let f = ConstantField::new(h).unwrap();
        let rows = z_bias_diagnostic(&set, &f).unwrap();
        assert!(rows.iter().all(|r| (r.nn_normalized - 1.0).abs() < 1e-12));
        assert!(z_bias_slope(&rows).abs() < 1e-12);
        assert!(z_bias_csv(&rows).starts_with("z,nn_normalized\n"));
    }

    #[test]
    fn z_histogram_is_normalized() {
        let h = 0.1;
        let set = cartesian(&LatticeSpec { bbox: BoundingBox::unit(3), h }).unwrap();
        let f = ConstantField::new(h).unwrap();
        let bins = z_histogram(&set, &f, 6, 5, HistogramBins { count: 10, lo: 0.5, hi: 2.0 }).unwrap();
        assert_eq!(bins.len(), 50);
        let total: f64 = bins.iter().map(|b| b.fraction).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(z_histogram_csv(&bins).starts_with("z_bin_lo,z_bin_hi,d_bin_lo,d_bin_hi,fraction\n"));
    }
}
