//! Uniform nodes in the unit cube. A finer background grid buys a few
//! percent more nodes at a higher cost.

use frontnodes::field::ConstantField;
use frontnodes::front::{generate, GeneratorConfig};
use frontnodes::geometry::BoundingBox;
use frontnodes::quality::{QualityReport, ReportOptions};

fn main() -> frontnodes::Result<()> {
    let field = ConstantField::new(0.05)?;
    for gf in [10, 40] {
        let cfg = GeneratorConfig::new(BoundingBox::unit(3), &field).seed(3).grid_factor(gf);
        let (nodes, stats) = generate(&cfg)?;
        let report = QualityReport::compute(&nodes, &field, &ReportOptions::for_dim(3))?;
        println!(
            "grid_factor={gf} N={} seconds={:.3} packing={:.3} gamma={:.3} knn_mean={:.4}",
            nodes.len(),
            stats.wall_seconds,
            report.packing_density.unwrap_or(f64::NAN),
            report.mesh_ratio,
            report.knn_mean
        );
    }
    Ok(())
}
