//! Gaussian RBF collocation on local stencils: condition numbers and local
//! interpolation error, used to compare node sets.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::baselines::{cartesian, halton, HaltonSpec, LatticeSpec};
use crate::error::{invalid, Error, Result};
use crate::field::ConstantField;
use crate::front::{generate, GeneratorConfig};
use crate::geometry::{ball_volume, seeded_rng, BoundingBox, Point, PointSet, SpatialIndex};

/// `exp(-(eps r)^2)`
pub fn gaussian(epsilon: f64, r: f64) -> f64 {
    (-(epsilon * r).powi(2)).exp()
}

/// Gaussian collocation matrix on a stencil of nodes.
#[derive(Clone, Debug)]
pub struct StencilSystem {
    pub center: Point,
    /// Positions of the stencil nodes in the source set, nearest first.
    pub indices: Vec<usize>,
    pub nodes: Vec<Point>,
    pub epsilon: f64,
    pub matrix: DMatrix<f64>,
}

impl StencilSystem {
    pub fn from_nodes(center: Point, nodes: Vec<Point>, indices: Vec<usize>, epsilon: f64) -> Self {
        let n = nodes.len();
        let matrix =
            DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { gaussian(epsilon, nodes[i].dist(&nodes[j])) });
        Self { center, indices, nodes, epsilon, matrix }
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    /// Spectral condition number `sigma_max / sigma_min`; infinite when the
    /// smallest singular value underflows.
    pub fn condition_number(&self) -> f64 {
        let s = self.matrix.clone().singular_values();
        let (lo, hi) = s.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        if lo < f64::MIN_POSITIVE {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// Interpolation weights for data `values` at the stencil nodes, or
    /// `None` when the matrix is numerically singular.
    pub fn solve(&self, values: &[f64]) -> Option<Vec<f64>> {
        let rhs = DVector::from_column_slice(values);
        let w = self.matrix.clone().lu().solve(&rhs)?;
        w.iter().all(|x| x.is_finite()).then(|| w.iter().copied().collect())
    }

    /// The interpolant `sum_j w_j phi(|x - p_j|)`.
    pub fn interpolate(&self, weights: &[f64], x: &Point) -> f64 {
        self.nodes.iter().zip(weights).map(|(p, w)| w * gaussian(self.epsilon, x.dist(p))).sum()
    }
}

/// The `n` nodes of `index` nearest to `center` and their Gaussian matrix.
pub fn build_stencil(index: &SpatialIndex, center: &Point, n: usize, epsilon: f64) -> Result<StencilSystem> {
    if !(epsilon > 0.0) {
        return Err(invalid("shape parameter must be positive"));
    }
    if n == 0 || n > index.len() {
        return Err(Error::InsufficientData { needed: n.max(1), available: index.len() });
    }
    let nn = index.knn(center, n)?;
    let indices: Vec<usize> = nn.iter().map(|x| x.0).collect();
    let nodes = indices.iter().map(|&i| *index.point(i)).collect();
    Ok(StencilSystem::from_nodes(*center, nodes, indices, epsilon))
}

/// A named node set taking part in a comparison.
#[derive(Clone, Debug)]
pub struct NodeSource {
    pub name: String,
    pub points: PointSet,
}

impl NodeSource {
    pub fn new(name: impl Into<String>, points: PointSet) -> Self {
        Self { name: name.into(), points }
    }

    fn index(&self) -> SpatialIndex {
        let s = typical_spacing(&self.points);
        SpatialIndex::new(self.points.points(), self.points.dim(), s)
    }
}

fn typical_spacing(points: &PointSet) -> f64 {
    let d = points.dim() as f64;
    (1.0 / points.len().max(1) as f64).powf(1.0 / d)
}

/// Stencil centers drawn from a normal distribution at the middle of
/// `domain` with standard deviation one sixth of each side, clipped to the
/// domain.
pub fn trial_centers(domain: &BoundingBox, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = seeded_rng(seed);
    let c = domain.center();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (0..count)
        .map(|_| {
            let mut coords = [0.0; 3];
            for (a, x) in coords.iter_mut().enumerate().take(domain.dim()) {
                let v = c[a] + domain.extent(a) / 6.0 * normal.sample(&mut rng);
                *x = v.clamp(domain.lo[a], domain.hi[a]);
            }
            Point { coords }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct CondExperiment {
    pub domain: BoundingBox,
    /// `(epsilon, n)` pairs to evaluate.
    pub cases: Vec<(f64, usize)>,
    pub trials: usize,
    pub seed: u64,
}

impl CondExperiment {
    /// Every `epsilon` at `n = 80`, then every `n` at `epsilon = 5`.
    pub fn sweep(domain: BoundingBox, epsilons: &[f64], sizes: &[usize]) -> Self {
        let mut cases: Vec<(f64, usize)> = epsilons.iter().map(|&e| (e, 80)).collect();
        cases.extend(sizes.iter().map(|&n| (5.0, n)));
        Self { domain, cases, trials: 300, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CondRow {
    pub epsilon: f64,
    pub n: usize,
    pub source: String,
    pub mean_log10_cond: f64,
    /// Trials whose matrix was singular to machine precision; they enter the
    /// mean as infinity.
    pub infinite: usize,
}

/// Mean `log10` condition number over the same random stencil centers for
/// every source and case.
pub fn cond_experiment(exp: &CondExperiment, sources: &[NodeSource]) -> Result<Vec<CondRow>> {
    let centers = trial_centers(&exp.domain, exp.trials, exp.seed);
    let mut rows = Vec::new();
    for src in sources {
        let index = src.index();
        for &(epsilon, n) in &exp.cases {
            let conds: Vec<f64> = centers
                .par_iter()
                .map(|c| Ok(build_stencil(&index, c, n, epsilon)?.condition_number()))
                .collect::<Result<_>>()?;
            let infinite = conds.iter().filter(|c| c.is_infinite()).count();
            let mean = conds.iter().map(|c| c.log10()).sum::<f64>() / conds.len().max(1) as f64;
            rows.push(CondRow { epsilon, n, source: src.name.clone(), mean_log10_cond: mean, infinite });
        }
    }
    Ok(rows)
}

pub fn cond_csv(rows: &[CondRow]) -> String {
    let mut s = String::from("epsilon,n,source,mean_log10_cond,infinite\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.epsilon, r.n, r.source, r.mean_log10_cond, r.infinite);
    }
    s
}

/// `1 / (1 + R^3)` with `R` the distance to the origin.
pub fn radial_target(p: &Point) -> f64 {
    1.0 / (1.0 + p.norm().powi(3))
}

#[derive(Clone, Copy, Debug)]
pub struct InterpSettings {
    pub domain: BoundingBox,
    pub n: usize,
    pub epsilon: f64,
    pub eval_count: usize,
    pub seed: u64,
}

impl InterpSettings {
    pub fn new(domain: BoundingBox, epsilon: f64) -> Self {
        Self { domain, n: 80, epsilon, eval_count: 10_000, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpResult {
    pub max_err: f64,
    pub rms_err: f64,
    /// Evaluation points skipped because their stencil matrix was singular.
    pub singular: usize,
    pub evaluated: usize,
}

/// Uniform random evaluation points in the domain.
pub fn eval_points(domain: &BoundingBox, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let mut coords = [0.0; 3];
            for (a, x) in coords.iter_mut().enumerate().take(domain.dim()) {
                *x = domain.lo[a] + domain.extent(a) * rng.random::<f64>();
            }
            Point { coords }
        })
        .collect()
}

/// Local interpolation of `target` at random points: for each point, fit
/// the `n` nearest nodes and compare the interpolant with the target.
pub fn interp_experiment(
    points: &PointSet,
    settings: &InterpSettings,
    target: &(dyn Fn(&Point) -> f64 + Sync),
) -> Result<InterpResult> {
    let src = NodeSource::new("", points.clone());
    let index = src.index();
    let xs = eval_points(&settings.domain, settings.eval_count, settings.seed);
    let errs: Vec<Option<f64>> = xs
        .par_iter()
        .map(|x| {
            let sys = build_stencil(&index, x, settings.n, settings.epsilon)?;
            let values: Vec<f64> = sys.nodes.iter().map(target).collect();
            Ok(sys.solve(&values).map(|w| (sys.interpolate(&w, x) - target(x)).abs()))
        })
        .collect::<Result<_>>()?;
    let ok: Vec<f64> = errs.iter().flatten().copied().collect();
    let singular = errs.len() - ok.len();
    let max_err = ok.iter().copied().fold(0.0, f64::max);
    let rms_err =
        if ok.is_empty() { f64::NAN } else { (ok.iter().map(|e| e * e).sum::<f64>() / ok.len() as f64).sqrt() };
    Ok(InterpResult { max_err, rms_err, singular, evaluated: ok.len() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterpRow {
    pub epsilon: f64,
    pub n: usize,
    pub source: String,
    pub result: InterpResult,
}

/// Runs [`interp_experiment`] for every source and shape parameter.
pub fn interp_sweep(
    sources: &[NodeSource],
    base: &InterpSettings,
    epsilons: &[f64],
    target: &(dyn Fn(&Point) -> f64 + Sync),
) -> Result<Vec<InterpRow>> {
    let mut rows = Vec::new();
    for src in sources {
        for &epsilon in epsilons {
            let settings = InterpSettings { epsilon, ..*base };
            let result = interp_experiment(&src.points, &settings, target)?;
            rows.push(InterpRow { epsilon, n: base.n, source: src.name.clone(), result });
        }
    }
    Ok(rows)
}

pub fn interp_csv(rows: &[InterpRow]) -> String {
    let mut s = String::from("epsilon,n,source,max_err,rms_err\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{:e},{:e}", r.epsilon, r.n, r.source, r.result.max_err, r.result.rms_err);
    }
    s
}

/// A uniform front-generated set in `domain` with close to `target` nodes.
/// The radius is guessed from a packing estimate and corrected twice by the
/// observed count. Returns the set and the radius used.
pub fn present_with_count(domain: &BoundingBox, target: usize, seed: u64) -> Result<(PointSet, f64)> {
    if target == 0 {
        return Err(invalid("target count must be positive"));
    }
    let d = domain.dim() as f64;
    let mut r = (0.6 * domain.volume() / (target as f64 * ball_volume(domain.dim(), 0.5))).powf(1.0 / d);
    let mut best: Option<(PointSet, f64)> = None;
    for _ in 0..3 {
        let field = ConstantField::new(r)?;
        let (set, _) = generate(&GeneratorConfig::new(*domain, &field).seed(seed))?;
        let got = set.len();
        if best.as_ref().is_none_or(|(b, _)| got.abs_diff(target) < b.len().abs_diff(target)) {
            best = Some((set, r));
        }
        r *= (got.max(1) as f64 / target as f64).powf(1.0 / d);
    }
    Ok(best.expect("at least one run"))
}

/// A Cartesian lattice in `domain` with about `target` nodes (an integer
/// number of nodes per axis).
pub fn cartesian_with_count(domain: &BoundingBox, target: usize) -> Result<PointSet> {
    let per_axis = (target as f64).powf(1.0 / domain.dim() as f64).round().max(2.0);
    let h = (0..domain.dim()).map(|a| domain.extent(a)).fold(f64::INFINITY, f64::min) / (per_axis - 1.0);
    cartesian(&LatticeSpec { bbox: *domain, h })
}

/// The standard comparison: present method, Cartesian and Halton, each
/// with about `target` nodes.
pub fn standard_sources(domain: &BoundingBox, target: usize, seed: u64) -> Result<Vec<NodeSource>> {
    Ok(vec![
        NodeSource::new("present", present_with_count(domain, target, seed)?.0),
        NodeSource::new("cartesian", cartesian_with_count(domain, target)?),
        NodeSource::new("halton", halton(&HaltonSpec::new(*domain, target))?),
    ])
}
