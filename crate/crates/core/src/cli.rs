//! Command-line front end. `run` parses argv and returns the process exit
//! code: 0 on success, 2 for usage errors, 1 for runtime failures.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::baselines::{cartesian, halton, hexagonal, HaltonSpec, LatticeSpec};
use crate::error::{invalid, Result};
use crate::field::{read_pgm, ImageField, RadiusSpec};
use crate::front::{generate, Correction, GeneratorConfig};
use crate::geometry::{ball_volume, read_points, write_points, BoundingBox, Point, PointSet};
use crate::quality::{
    histogram_csv, least_squares_slope, nn_histogram, HistogramBins, QualityReport, ReportOptions, SpacingVariation,
};
use crate::rbf::{
    cond_csv, cond_experiment, interp_csv, interp_sweep, radial_target, standard_sources, CondExperiment,
    InterpSettings, NodeSource,
};
use crate::spherical::{
    generate_spherical, z_bias_csv, z_bias_diagnostic, z_bias_slope, z_histogram, z_histogram_csv, SphericalConfig,
    Variation,
};

/// Environment variable capping the worker threads used by metrics and RBF trials.
pub const THREADS_ENV: &str = "FRONTNODES_THREADS";

#[derive(Parser, Debug)]
#[command(name = "frontnodes", version, about = "Advancing-front node generation and node-set quality tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fill a box with nodes spaced by a radius field.
    Generate(GenerateArgs),
    /// Grow nodes outward from the origin on a spherical front.
    Spherical(SphericalArgs),
    /// Stipple a grayscale PGM image: dark pixels get dense nodes.
    Dither(DitherArgs),
    /// Quality report for a point file.
    Metrics(MetricsArgs),
    /// Cartesian, hexagonal or Halton reference sets.
    Baseline(BaselineArgs),
    /// Time uniform generation across node counts.
    Bench(BenchArgs),
    /// Mean log10 condition number of Gaussian RBF stencils.
    RbfCond(RbfCondArgs),
    /// Local Gaussian RBF interpolation error against epsilon.
    RbfInterp(RbfInterpArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub dim: u8,
    /// Box corners: lo coordinates then hi coordinates, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub r#box: Vec<f64>,
    /// const:R, radialexp:C,EPS or image:FILE,RMIN,RMAX
    #[arg(long)]
    pub radius: RadiusSpec,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub grid_factor: usize,
    #[arg(long, value_enum, default_value_t = CorrectionArg::Off)]
    pub correction: CorrectionArg,
    /// Initial height perturbation, as a multiple of r_min.
    #[arg(long)]
    pub perturbation: Option<f64>,
    /// Keep only nodes within this distance of the box center.
    #[arg(long)]
    pub clip_sphere: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CorrectionArg {
    Off,
    Bigger,
}

#[derive(Args, Debug)]
pub struct SphericalArgs {
    #[arg(long)]
    pub radius: RadiusSpec,
    /// Radius of the ball to fill.
    #[arg(long)]
    pub outer: f64,
    #[arg(long, value_enum, default_value_t = VariationArg::Prior)]
    pub variation: VariationArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub grid_factor: usize,
    #[arg(long)]
    pub perturbation: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-node z against normalized nearest-neighbor distance, as CSV.
    #[arg(long)]
    pub zbias: Option<PathBuf>,
    /// Joint histogram of z and normalized k-NN distance, as CSV.
    #[arg(long)]
    pub zhist: Option<PathBuf>,
    #[arg(long, default_value_t = 12)]
    pub k: usize,
    #[arg(long, default_value_t = 10)]
    pub z_bins: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariationArg {
    Prior,
    Bigger,
}

#[derive(Args, Debug)]
pub struct DitherArgs {
    /// Binary (P5) or ASCII (P2) PGM.
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub rmin: f64,
    #[arg(long)]
    pub rmax: f64,
    /// Region the image covers; defaults to width 1 with the image's aspect ratio.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub extent: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub grid_factor: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub radius: RadiusSpec,
    /// Neighbors per node for the k-NN statistics; 6 in 2-D, 12 in 3-D by default.
    #[arg(long)]
    pub k: Option<usize>,
    /// Region for interior statistics, as lo then hi coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub interior: Option<Vec<f64>>,
    /// Region the radius field is built over; defaults to the points' bounding box.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub r#box: Option<Vec<f64>>,
    /// Sample lattice spacing is r_min divided by this.
    #[arg(long, default_value_t = 20.0)]
    pub sample_factor: f64,
    #[arg(long, default_value = "prior")]
    pub variation: SpacingVariation,
    #[arg(long, default_value_t = 0.0)]
    pub tolerance: f64,
    /// Print one CSV header and row instead of key=value lines.
    #[arg(long)]
    pub csv: bool,
    /// Write the normalized k-NN distance histogram here.
    #[arg(long)]
    pub hist: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    pub bins: usize,
}

#[derive(Args, Debug)]
pub struct BaselineArgs {
    #[arg(value_enum)]
    pub kind: BaselineKind,
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub dim: u8,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub r#box: Vec<f64>,
    /// Lattice spacing (cartesian, hexagonal).
    #[arg(long)]
    pub h: Option<f64>,
    /// Point count (halton).
    #[arg(long)]
    pub n: Option<usize>,
    /// First Halton index.
    #[arg(long, default_value_t = 1)]
    pub start: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BaselineKind {
    Cartesian,
    Hexagonal,
    Halton,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub dim: u8,
    /// Target node counts, ascending; 1e4 style is accepted.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, default_value_t = 10)]
    pub grid_factor: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RbfCommon {
    /// Nodes per source in the unit cube.
    #[arg(long, default_value_t = 8000)]
    pub target_n: usize,
    #[arg(long, value_delimiter = ',', default_value = "present,cartesian,halton")]
    pub sources: Vec<SourceKind>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SourceKind {
    Present,
    Cartesian,
    Halton,
}

impl SourceKind {
    fn name(self) -> &'static str {
        match self {
            Self::Present => "present",
            Self::Cartesian => "cartesian",
            Self::Halton => "halton",
        }
    }
}

#[derive(Args, Debug)]
pub struct RbfCondArgs {
    #[command(flatten)]
    pub common: RbfCommon,
    /// Shape parameters swept at the fixed stencil size.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,8,10,12")]
    pub eps: Vec<f64>,
    /// Stencil sizes swept at epsilon 5.
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60,80,100")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 300)]
    pub trials: usize,
}

#[derive(Args, Debug)]
pub struct RbfInterpArgs {
    #[command(flatten)]
    pub common: RbfCommon,
    #[arg(long, value_delimiter = ',', default_value = "12,10,8,6,4,3,2,1.5,1,0.5")]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 80)]
    pub stencil: usize,
    #[arg(long, default_value_t = 10000)]
    pub evals: usize,
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    configure_threads();
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Spherical(a) => cmd_spherical(a),
        Command::Dither(a) => cmd_dither(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::Bench(a) => cmd_bench(a),
        Command::RbfCond(a) => cmd_rbf_cond(a),
        Command::RbfInterp(a) => cmd_rbf_interp(a),
    }
}

fn parse_box(dim: usize, coords: &[f64]) -> Result<BoundingBox> {
    if coords.len() != 2 * dim {
        return Err(invalid(format!("a {dim}-D box takes {} numbers, got {}", 2 * dim, coords.len())));
    }
    BoundingBox::new(&coords[..dim], &coords[dim..])
}

fn points_bbox(points: &PointSet) -> Result<BoundingBox> {
    let dim = points.dim();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for a in 0..dim {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    // A degenerate axis still needs positive extent.
    for a in 0..dim {
        if !(hi[a] > lo[a]) {
            hi[a] = lo[a] + 1.0;
        }
    }
    BoundingBox::new(&lo[..dim], &hi[..dim])
}

fn save_points(path: &Path, set: &PointSet) -> Result<()> {
    write_points(BufWriter::new(File::create(path)?), set)
}

fn save_text(path: &Path, text: &str) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Writes to `path` or, without one, to stdout.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => save_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let bbox = parse_box(a.dim as usize, &a.r#box)?;
    let field = a.radius.build(&bbox)?;
    let mut cfg = GeneratorConfig::new(bbox, field.as_ref()).seed(a.seed).grid_factor(a.grid_factor);
    cfg = cfg.correction(match a.correction {
        CorrectionArg::Off => Correction::Off,
        CorrectionArg::Bigger => Correction::BiggerDisks,
    });
    if let Some(s) = a.perturbation {
        cfg = cfg.perturbation_scale(s);
    }
    let (mut set, stats) = generate(&cfg)?;
    if let Some(radius) = a.clip_sphere {
        let c = bbox.center();
        set.retain(|p| p.dist(&c) <= radius);
    }
    if let Some(path) = &a.out {
        save_points(path, &set)?;
    }
    print!("{}", stats.to_key_value());
    if a.clip_sphere.is_some() {
        println!("clipped_n={}", set.len());
    }
    Ok(())
}

fn cmd_spherical(a: SphericalArgs) -> Result<()> {
    let region = BoundingBox::centered(3, a.outer)?;
    let field = a.radius.build(&region)?;
    let variation = match a.variation {
        VariationArg::Prior => Variation::Prior,
        VariationArg::Bigger => Variation::Bigger,
    };
    let mut cfg =
        SphericalConfig::new(field.as_ref(), a.outer).seed(a.seed).grid_factor(a.grid_factor).variation(variation);
    if let Some(s) = a.perturbation {
        cfg = cfg.perturbation_scale(s);
    }
    let (set, stats) = generate_spherical(&cfg)?;
    if let Some(path) = &a.out {
        save_points(path, &set)?;
    }
    print!("{}", stats.to_key_value());
    if a.zbias.is_some() || a.zhist.is_some() {
        let rows = z_bias_diagnostic(&set, field.as_ref())?;
        println!("zbias_slope={}", z_bias_slope(&rows));
        if let Some(path) = &a.zbias {
            save_text(path, &z_bias_csv(&rows))?;
        }
        if let Some(path) = &a.zhist {
            let bins = z_histogram(&set, field.as_ref(), a.k, a.z_bins, HistogramBins::default())?;
            save_text(path, &z_histogram_csv(&bins))?;
        }
    }
    Ok(())
}

fn cmd_dither(a: DitherArgs) -> Result<()> {
    let image = read_pgm(&a.image)?;
    let extent = match &a.extent {
        Some(c) => parse_box(2, c)?,
        None => BoundingBox::new(&[0.0, 0.0], &[1.0, image.height() as f64 / image.width() as f64])?,
    };
    let field = ImageField::new(image, extent, a.rmin, a.rmax)?;
    let cfg = GeneratorConfig::new(extent, &field).seed(a.seed).grid_factor(a.grid_factor);
    let (set, stats) = generate(&cfg)?;
    if let Some(path) = &a.out {
        save_points(path, &set)?;
    }
    print!("{}", stats.to_key_value());
    Ok(())
}

fn cmd_metrics(a: MetricsArgs) -> Result<()> {
    let points = read_points(&a.input)?;
    let dim = points.dim();
    let region = match &a.r#box {
        Some(c) => parse_box(dim, c)?,
        None => points_bbox(&points)?,
    };
    let field = a.radius.build(&region)?;
    let mut opts = ReportOptions::for_dim(dim);
    if let Some(k) = a.k {
        opts.k = k;
    }
    if let Some(c) = &a.interior {
        opts.interior = Some(parse_box(dim, c)?);
    }
    opts.sample_factor = a.sample_factor;
    opts.variation = a.variation;
    opts.spacing_tolerance = a.tolerance;
    let report = QualityReport::compute(&points, field.as_ref(), &opts)?;
    if a.csv {
        println!("{}", QualityReport::csv_header());
        println!("{}", report.to_csv_row());
    } else {
        print!("{}", report.to_key_value());
    }
    if let Some(path) = &a.hist {
        let interior = match opts.interior {
            Some(b) => b,
            None => crate::quality::default_interior(&points, field.as_ref())?,
        };
        let bins = HistogramBins { count: a.bins, ..HistogramBins::default() };
        let hist = nn_histogram(&points, field.as_ref(), opts.k, &interior, bins)?;
        save_text(path, &histogram_csv(&hist))?;
    }
    Ok(())
}

fn cmd_baseline(a: BaselineArgs) -> Result<()> {
    let bbox = parse_box(a.dim as usize, &a.r#box)?;
    let need_h = || a.h.ok_or_else(|| invalid("this baseline needs --h"));
    let set = match a.kind {
        BaselineKind::Cartesian => cartesian(&LatticeSpec { bbox, h: need_h()? })?,
        BaselineKind::Hexagonal => hexagonal(&bbox, need_h()?)?,
        BaselineKind::Halton => {
            let count = a.n.ok_or_else(|| invalid("halton needs --n"))?;
            halton(&HaltonSpec { bbox, count, start: a.start })?
        }
    };
    match &a.out {
        Some(path) => {
            save_points(path, &set)?;
            println!("N={}", set.len());
        }
        None => write_points(BufWriter::new(std::io::stdout().lock()), &set)?,
    }
    Ok(())
}

/// One row of the generation-cost table.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub target_n: usize,
    pub n: f64,
    pub radius: f64,
    pub mean_seconds: f64,
    pub std_seconds: f64,
    pub reps: usize,
}

/// Uniform radius expected to give about `target` nodes in `bbox`, from a
/// packing density of 0.8 in 2-D and 0.6 in 3-D.
pub fn radius_for_count(bbox: &BoundingBox, target: usize) -> f64 {
    let dim = bbox.dim();
    let eta = if dim == 2 { 0.8 } else { 0.6 };
    2.0 * (eta * bbox.volume() / (target as f64 * ball_volume(dim, 1.0))).powf(1.0 / dim as f64)
}

/// Times `reps` generations per size in the unit box, seeds `seed`,
/// `seed + 1`, ... Sizes must be ascending.
pub fn bench(dim: usize, sizes: &[usize], reps: usize, grid_factor: usize, seed: u64) -> Result<Vec<BenchRow>> {
    if reps == 0 || sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(invalid("bench needs reps >= 1 and positive ascending sizes"));
    }
    let bbox = BoundingBox::unit(dim);
    let mut rows = Vec::with_capacity(sizes.len());
    for &target in sizes {
        let radius = radius_for_count(&bbox, target);
        let field = crate::field::ConstantField::new(radius)?;
        let mut times = Vec::with_capacity(reps);
        let mut counts = 0usize;
        for rep in 0..reps {
            let cfg = GeneratorConfig::new(bbox, &field).seed(seed + rep as u64).grid_factor(grid_factor);
            let (set, stats) = generate(&cfg)?;
            counts += set.len();
            times.push(stats.wall_seconds);
        }
        let mean = times.iter().sum::<f64>() / reps as f64;
        let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / reps as f64;
        rows.push(BenchRow {
            target_n: target,
            n: counts as f64 / reps as f64,
            radius,
            mean_seconds: mean,
            std_seconds: var.sqrt(),
            reps,
        });
    }
    Ok(rows)
}

/// Log-log slope of mean time against mean node count.
pub fn bench_slope(rows: &[BenchRow]) -> f64 {
    let x: Vec<f64> = rows.iter().map(|r| r.n.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.mean_seconds.max(1e-9).ln()).collect();
    least_squares_slope(&x, &y)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("target_n,n,radius,mean_seconds,std_seconds,reps\n");
    for r in rows {
        let _ =
            writeln!(s, "{},{},{:e},{:e},{:e},{}", r.target_n, r.n, r.radius, r.mean_seconds, r.std_seconds, r.reps);
    }
    s
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let sizes: Vec<usize> = a
        .sizes
        .iter()
        .map(|&s| if s >= 1.0 && s.fract() == 0.0 { Ok(s as usize) } else { Err(invalid(format!("bad size {s}"))) })
        .collect::<Result<_>>()?;
    let rows = bench(a.dim as usize, &sizes, a.reps, a.grid_factor, a.seed)?;
    emit(a.out.as_deref(), &bench_csv(&rows))?;
    println!("slope={}", bench_slope(&rows));
    Ok(())
}

fn rbf_sources(common: &RbfCommon) -> Result<Vec<NodeSource>> {
    let domain = BoundingBox::unit(3);
    let all = standard_sources(&domain, common.target_n, common.seed)?;
    Ok(all.into_iter().filter(|s| common.sources.iter().any(|k| k.name() == s.name)).collect())
}

fn cmd_rbf_cond(a: RbfCondArgs) -> Result<()> {
    let sources = rbf_sources(&a.common)?;
    let mut exp = CondExperiment::sweep(BoundingBox::unit(3), &a.eps, &a.sizes);
    exp.trials = a.trials;
    exp.seed = a.common.seed;
    let rows = cond_experiment(&exp, &sources)?;
    emit(a.common.out.as_deref(), &cond_csv(&rows))
}

fn cmd_rbf_interp(a: RbfInterpArgs) -> Result<()> {
    let sources = rbf_sources(&a.common)?;
    let mut base = InterpSettings::new(BoundingBox::unit(3), a.eps.first().copied().unwrap_or(5.0));
    base.n = a.stencil;
    base.eval_count = a.evals;
    base.seed = a.common.seed;
    let target = |p: &Point| radial_target(p);
    let rows = interp_sweep(&sources, &base, &a.eps, &target)?;
    emit(a.common.out.as_deref(), &interp_csv(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_parsing() {
        let b = parse_box(2, &[0.0, 0.0, 1.0, 2.0]).unwrap();
        assert_eq!(b.extent(1), 2.0);
        assert!(parse_box(3, &[0.0, 0.0, 1.0, 1.0]).is_err());
        assert!(parse_box(2, &[1.0, 0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["frontnodes", "generate", "--bogus"]), 2);
        assert_eq!(run(["frontnodes"]), 2);
        assert_eq!(run(["frontnodes", "generate", "--dim", "4", "--box", "0,0,1,1", "--radius", "const:0.1"]), 2);
        assert_eq!(run(["frontnodes", "generate", "--dim", "2", "--box", "0,0,1,1", "--radius", "cone:1"]), 2);
    }

    #[test]
    fn runtime_errors_exit_one() {
        assert_eq!(run(["frontnodes", "metrics", "--in", "/nonexistent/file", "--radius", "const:0.1"]), 1);
        assert_eq!(run(["frontnodes", "baseline", "cartesian", "--dim", "2", "--box", "0,0,1,1"]), 1);
    }

    #[test]
    fn bench_reports_zero_spread_for_one_rep() {
        let rows = bench(2, &[200, 400], 1, 10, 3).unwrap();
        assert!(rows.iter().all(|r| r.std_seconds == 0.0 && r.reps == 1));
        assert!(rows[1].n > rows[0].n);
        assert!(bench(2, &[400, 200], 1, 10, 3).is_err());
        assert!(bench_csv(&rows).starts_with("target_n,n,radius,mean_seconds,std_seconds,reps\n"));
    }

    #[test]
    fn count_radius_is_close() {
        let r = radius_for_count(&BoundingBox::unit(2), 1700);
        assert!((r - 0.0245).abs() < 0.001, "{r}");
    }
}
