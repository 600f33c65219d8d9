//! Uniform nodes in the unit square, with the usual quality numbers.

use frontnodes::field::ConstantField;
use frontnodes::front::{generate, GeneratorConfig};
use frontnodes::geometry::BoundingBox;
use frontnodes::quality::{QualityReport, ReportOptions};

fn main() -> frontnodes::Result<()> {
    let field = ConstantField::new(0.025)?;
    let (nodes, stats) = generate(&GeneratorConfig::new(BoundingBox::unit(2), &field).seed(1))?;
    print!("{}", stats.to_key_value());
    let report = QualityReport::compute(&nodes, &field, &ReportOptions::for_dim(2))?;
    print!("{}", report.to_key_value());
    Ok(())
}
