//! Advancing-front node placement in a box, in 2-D and 3-D.
//!
//! A dense lattice of "potential dot placements" covers the base face of the
//! box (the `x` axis in 2-D, the `x, y` plane in 3-D). Each lattice cell holds
//! the current height of the front along the last axis. Placing a node at
//! height `z` lifts every cell under its exclusion ball onto the upper half of
//! that ball; the next node goes to a nearby local minimum of the front, found
//! with a moving-window search that wraps around the base face.
//!
//! Nodes land exactly on lattice columns above every earlier exclusion ball, so
//! the emitted set satisfies the prior-disks spacing rule. With
//! [`Correction::BiggerDisks`] a candidate is also lifted until its own radius
//! is clear of nearby nodes.

use std::time::Instant;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::field::{evaluate, RadiusField};
use crate::geometry::{seeded_rng, BoundingBox, Point, PointSet, PointSetMeta};

const NO_NODE: u32 = u32::MAX;

/// Cap on lift rounds. Each round clears the conflicts at the current radius,
/// but the radius grows with the lift, so steep fields can need hundreds.
pub(crate) const LIFT_ROUNDS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Correction {
    /// Plain front: spacing follows the radius of previously placed nodes.
    #[default]
    Off,
    /// Lift each candidate until no earlier node lies inside its own radius.
    BiggerDisks,
}

#[derive(Clone, Copy)]
pub struct GeneratorConfig<'f> {
    pub bbox: BoundingBox,
    pub field: &'f dyn RadiusField,
    pub seed: u64,
    /// Ratio of the field's `r_min` to the lattice spacing.
    pub grid_factor: usize,
    pub correction: Correction,
    /// Initial front heights are drawn from `[0, scale * r]` above the bottom.
    pub perturbation_scale: f64,
}

impl<'f> GeneratorConfig<'f> {
    pub fn new(bbox: BoundingBox, field: &'f dyn RadiusField) -> Self {
        Self { bbox, field, seed: 0, grid_factor: 10, correction: Correction::Off, perturbation_scale: 0.25 }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn grid_factor(mut self, gf: usize) -> Self {
        self.grid_factor = gf;
        self
    }

    pub fn correction(mut self, c: Correction) -> Self {
        self.correction = c;
        self
    }

    pub fn perturbation_scale(mut self, s: f64) -> Self {
        self.perturbation_scale = s;
        self
    }

    pub fn spacing(&self) -> f64 {
        self.field.r_min() / self.grid_factor as f64
    }

    fn validate(&self) -> Result<()> {
        if self.grid_factor == 0 {
            return Err(invalid("grid factor must be at least 1"));
        }
        if !(self.perturbation_scale >= 0.0 && self.perturbation_scale.is_finite()) {
            return Err(invalid("perturbation scale must be finite and >= 0"));
        }
        if !(self.field.r_min() > 0.0) {
            return Err(invalid("radius field needs r_min > 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GenerationStats {
    pub n: usize,
    pub iterations: u64,
    pub mean_iterations: f64,
    pub wall_seconds: f64,
    pub seed: u64,
    /// Times the local search ended above the box and a full lattice scan
    /// was needed to find the next low region.
    pub global_searches: u64,
}

impl GenerationStats {
    pub(crate) fn finish(&mut self, n: usize, started: Instant) {
        self.n = n;
        self.mean_iterations = if n > 0 { self.iterations as f64 / n as f64 } else { 0.0 };
        self.wall_seconds = started.elapsed().as_secs_f64();
    }

    /// `key=value` lines.
    pub fn to_key_value(&self) -> String {
        format!(
            "N={}\nmean_iterations={:.6}\nwall_seconds={:.6}\nseed={}\n",
            self.n, self.mean_iterations, self.wall_seconds, self.seed
        )
    }
}

/// Heights of the advancing front over the base-face lattice, plus the index
/// of the last node placed in each lattice column.
#[derive(Clone, Debug)]
pub struct FrontGrid {
    dim: usize,
    origin: [f64; 2],
    spacing: f64,
    /// Cells per base axis; the second entry is 1 in 2-D.
    shape: [usize; 2],
    heights: Vec<f64>,
    last_node: Vec<u32>,
}

/// Builds the lattice and draws the perturbed initial heights.
pub fn init_front(config: &GeneratorConfig<'_>) -> Result<FrontGrid> {
    config.validate()?;
    let bbox = &config.bbox;
    let dim = bbox.dim();
    let dx = config.spacing();
    let mut shape = [1usize; 2];
    for a in 0..dim - 1 {
        let ext = bbox.extent(a);
        if ext < dx {
            return Err(invalid(format!("box extent {ext} along axis {a} is thinner than the lattice spacing {dx}")));
        }
        shape[a] = (ext / dx * (1.0 + 1e-12)).floor() as usize + 1;
    }
    let mut grid = FrontGrid {
        dim,
        origin: [bbox.lo[0], bbox.lo[1]],
        spacing: dx,
        shape,
        heights: Vec::new(),
        last_node: vec![NO_NODE; shape[0] * shape[1]],
    };
    let bottom = bbox.lo[dim - 1];
    let mut rng = seeded_rng(config.seed);
    grid.heights = (0..shape[0] * shape[1])
        .map(|c| {
            let p = grid.cell_point(c, bottom);
            let amp = config.perturbation_scale * config.field.radius(&p);
            bottom + amp * rng.random::<f64>()
        })
        .collect();
    Ok(grid)
}

impl FrontGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    pub fn cell_count(&self) -> usize {
        self.heights.len()
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn last_node(&self, cell: usize) -> Option<usize> {
        (self.last_node[cell] != NO_NODE).then_some(self.last_node[cell] as usize)
    }

    /// Flat index of lattice cell `(i, j)`; `j` is 0 in 2-D.
    pub fn cell(&self, i: usize, j: usize) -> usize {
        i * self.shape[1] + j
    }

    fn ij(&self, cell: usize) -> (usize, usize) {
        (cell / self.shape[1], cell % self.shape[1])
    }

    /// Base-face location of a cell.
    pub fn cell_base(&self, cell: usize) -> [f64; 2] {
        let (i, j) = self.ij(cell);
        let y = if self.dim == 3 { self.origin[1] + j as f64 * self.spacing } else { 0.0 };
        [self.origin[0] + i as f64 * self.spacing, y]
    }

    /// Point above `cell` at `height` along the advance axis.
    pub fn cell_point(&self, cell: usize, height: f64) -> Point {
        let b = self.cell_base(cell);
        if self.dim == 2 {
            Point::xy(b[0], height)
        } else {
            Point::xyz(b[0], b[1], height)
        }
    }

    /// Test hook: overwrite the height array.
    pub fn set_heights(&mut self, heights: Vec<f64>) {
        assert_eq!(heights.len(), self.heights.len());
        self.heights = heights;
    }

    fn base_of(&self, p: &Point) -> [f64; 2] {
        if self.dim == 2 {
            [p[0], 0.0]
        } else {
            [p[0], p[1]]
        }
    }

    /// Index range of cells whose base coordinate along `axis` lies within
    /// `radius` of `x`, clipped to the lattice.
    fn clipped_range(&self, axis: usize, x: f64, radius: f64) -> Option<(usize, usize)> {
        if axis == 1 && self.dim == 2 {
            return Some((0, 0));
        }
        let lo = ((x - radius - self.origin[axis]) / self.spacing).ceil().max(0.0);
        let hi = ((x + radius - self.origin[axis]) / self.spacing).floor();
        let hi = hi.min((self.shape[axis] - 1) as f64);
        (lo <= hi).then_some((lo as usize, hi as usize))
    }

    /// Raises every cell whose base location is within `r` of `p`'s base
    /// projection onto the upper half of the ball of radius `r` at `p`.
    /// Returns the lowest cell among those whose height changed.
    pub fn update_front(&mut self, p: &Point, r: f64) -> Option<usize> {
        let base = self.base_of(p);
        let top = p[self.dim - 1];
        let r2 = r * r;
        let (i0, i1) = self.clipped_range(0, base[0], r)?;
        let (j0, j1) = self.clipped_range(1, base[1], r)?;
        let mut lowest: Option<(f64, usize)> = None;
        for i in i0..=i1 {
            let dx = self.origin[0] + i as f64 * self.spacing - base[0];
            let rem = r2 - dx * dx;
            if rem <= 0.0 {
                continue;
            }
            // columns of this row that can lie inside the disk
            let (j0, j1) = if self.dim == 3 {
                match self.clipped_range(1, base[1], rem.sqrt()) {
                    Some(range) => range,
                    None => continue,
                }
            } else {
                (j0, j1)
            };
            for j in j0..=j1 {
                let dy = if self.dim == 3 { self.origin[1] + j as f64 * self.spacing - base[1] } else { 0.0 };
                let d2 = dx * dx + dy * dy;
                if d2 >= r2 {
                    continue;
                }
                let c = self.cell(i, j);
                let cap = top + (r2 - d2).sqrt();
                if cap > self.heights[c] {
                    self.heights[c] = cap;
                    if lowest.is_none_or(|(h, l)| (cap, c) < (h, l)) {
                        lowest = Some((cap, c));
                    }
                }
            }
        }
        lowest.map(|(_, c)| c)
    }

    fn wrapped_dist2(&self, a: usize, b: usize) -> f64 {
        let (ai, aj) = self.ij(a);
        let (bi, bj) = self.ij(b);
        let wrap = |x: usize, y: usize, n: usize| {
            let d = x.abs_diff(y);
            d.min(n - d) as f64
        };
        let di = wrap(ai, bi, self.shape[0]);
        let dj = wrap(aj, bj, self.shape[1]);
        (di * di + dj * dj) * self.spacing * self.spacing
    }

    /// Lowest cell within base distance `radius` of `center`, wrapping
    /// around the lattice edges. Ties go to the smaller cell index.
    pub fn window_argmin(&self, center: usize, radius: f64) -> usize {
        let (ci, cj) = self.ij(center);
        let lim = (radius / self.spacing).powi(2) * (1.0 + 1e-12);
        let mut best = (self.heights[center], center);
        if self.dim == 2 {
            let w = half_width(lim);
            for (lo, hi) in wrapped_segments(ci, w, self.shape[0]) {
                self.scan(lo, hi, &mut best);
            }
            return best.1;
        }
        let n0 = self.shape[0] as i64;
        let w = half_width(lim);
        let mut visit_row = |i: usize, di: i64| {
            let rem = lim - (di * di) as f64;
            if rem < 0.0 {
                return;
            }
            let row = i * self.shape[1];
            for (lo, hi) in wrapped_segments(cj, half_width(rem), self.shape[1]) {
                self.scan(row + lo, row + hi, &mut best);
            }
        };
        if 2 * w + 1 >= n0 {
            for i in 0..n0 {
                let mut off = i - ci as i64;
                if off > n0 / 2 {
                    off -= n0;
                } else if off < -(n0 / 2) {
                    off += n0;
                }
                visit_row(i as usize, off);
            }
        } else {
            for off in -w..=w {
                visit_row((ci as i64 + off).rem_euclid(n0) as usize, off);
            }
        }
        best.1
    }

    fn scan(&self, lo: usize, hi: usize, best: &mut (f64, usize)) {
        let seg = &self.heights[lo..=hi];
        let m = lane_min(seg);
        if m > best.0 {
            return;
        }
        if let Some(k) = seg.iter().position(|&h| h == m) {
            if m < best.0 || lo + k < best.1 {
                *best = (m, lo + k);
            }
        }
    }

    /// Moving-window descent: repeatedly jump to the lowest cell within `2r`
    /// until the jump is no longer than `r`. Adds the number of window
    /// searches to `iterations`.
    pub fn find_next_minimum(&self, start: usize, r: f64, iterations: &mut u64) -> usize {
        let mut cur = start;
        loop {
            let next = self.window_argmin(cur, 2.0 * r);
            *iterations += 1;
            if next == cur || self.wrapped_dist2(next, cur) <= r * r {
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

    /// Lifts a candidate along the advance axis until no node recorded in the
    /// last-node array lies within the candidate's own radius. Only columns
    /// within `r` of the candidate are inspected. Gives up once the candidate
    /// rises past `ceiling`.
    fn lift_clear_of_neighbors(
        &self,
        candidate: Point,
        nodes: &[Point],
        field: &dyn RadiusField,
        ceiling: f64,
    ) -> Result<Point> {
        let axis = self.dim - 1;
        let mut p = candidate;
        for _ in 0..LIFT_ROUNDS {
            if p[axis] > ceiling {
                return Ok(p);
            }
            let r = evaluate(field, &p)?;
            let base = self.base_of(&p);
            let mut z = p[axis];
            let (Some((i0, i1)), Some((j0, j1))) =
                (self.clipped_range(0, base[0], r), self.clipped_range(1, base[1], r))
            else {
                return Ok(p);
            };
            for i in i0..=i1 {
                for j in j0..=j1 {
                    let Some(k) = self.last_node(self.cell(i, j)) else { continue };
                    let q = &nodes[k];
                    if q.dist2(&p) < r * r {
                        if let Some(lifted) = correct_height(&p, q, r, self.dim) {
                            z = z.max(lifted);
                        }
                    }
                }
            }
            if z == p[axis] {
                return Ok(p);
            }
            p.coords[axis] = z;
        }
        Ok(p)
    }
}

/// Minimum of a slice, written so the compiler can vectorize it.
pub(crate) fn lane_min(xs: &[f64]) -> f64 {
    let mut lanes = [f64::INFINITY; 8];
    let chunks = xs.chunks_exact(8);
    let rest = chunks.remainder();
    for c in chunks {
        for l in 0..8 {
            lanes[l] = if c[l] < lanes[l] { c[l] } else { lanes[l] };
        }
    }
    let mut m = f64::INFINITY;
    for &x in lanes.iter().chain(rest) {
        if x < m {
            m = x;
        }
    }
    m
}

/// Largest integer `w` with `w * w <= lim`.
fn half_width(lim: f64) -> i64 {
    let mut w = lim.max(0.0).sqrt().floor() as i64;
    while (w * w) as f64 > lim {
        w -= 1;
    }
    while ((w + 1) * (w + 1)) as f64 <= lim {
        w += 1;
    }
    w
}

/// Inclusive index ranges covering `center - w ..= center + w` on a periodic
/// axis of `n` cells.
fn wrapped_segments(center: usize, w: i64, n: usize) -> impl Iterator<Item = (usize, usize)> {
    let (c, n) = (center as i64, n as i64);
    let segs: [Option<(usize, usize)>; 2] = if 2 * w + 1 >= n {
        [Some((0, (n - 1) as usize)), None]
    } else if c - w < 0 {
        [Some((0, (c + w) as usize)), Some(((c - w + n) as usize, (n - 1) as usize))]
    } else if c + w >= n {
        [Some(((c - w) as usize, (n - 1) as usize)), Some((0, (c + w - n) as usize))]
    } else {
        [Some(((c - w) as usize, (c + w) as usize)), None]
    };
    segs.into_iter().flatten()
}

/// Height at which a candidate above `neighbor` clears a ball of radius `r`
/// around it: `z_nbr + sqrt(r^2 - |base offset|^2)`. `None` when the base
/// offset is at least `r`, where no lift can help or is needed.
pub fn correct_height(candidate: &Point, neighbor: &Point, r: f64, dim: usize) -> Option<f64> {
    let axis = dim - 1;
    let base2: f64 = (0..axis).map(|a| (candidate[a] - neighbor[a]).powi(2)).sum();
    (base2 < r * r).then(|| neighbor[axis] + (r * r - base2).sqrt())
}

/// Runs the advancing front until its lowest point leaves the box.
pub fn generate(config: &GeneratorConfig<'_>) -> Result<(PointSet, GenerationStats)> {
    let started = Instant::now();
    let mut front = init_front(config)?;
    let dim = config.bbox.dim();
    let axis = dim - 1;
    let top = config.bbox.hi[axis];
    let field = config.field;

    let mut stats = GenerationStats { seed: config.seed, ..Default::default() };
    let mut nodes: Vec<Point> = Vec::new();
    let mut next = front.global_argmin();

    loop {
        let mut cell = next;
        if front.heights[cell] > top {
            // the local search topped out; look for any remaining low region
            cell = front.global_argmin();
            stats.global_searches += 1;
            if front.heights[cell] > top {
                break;
            }
        }
        let mut p = front.cell_point(cell, front.heights[cell]);
        if config.correction == Correction::BiggerDisks {
            p = front.lift_clear_of_neighbors(p, &nodes, field, top)?;
        }
        if p[axis] > top {
            // lifted out of the box: retire this column and search again
            front.heights[cell] = p[axis];
            let r = evaluate(field, &p)?;
            next = front.find_next_minimum(cell, r, &mut stats.iterations);
            continue;
        }

        let idx = nodes.len() as u32;
        nodes.push(p);
        front.last_node[cell] = idx;

        let r = evaluate(field, &p)?;
        let x0 = front.update_front(&p, r).unwrap_or(cell);
        next = front.find_next_minimum(x0, r, &mut stats.iterations);
    }

    stats.finish(nodes.len(), started);
    let mut set = PointSet::from_points(dim, nodes);
    set.meta = PointSetMeta { seed: Some(config.seed), field: field.describe(), grid_factor: Some(config.grid_factor) };
    Ok((set, stats))
}
