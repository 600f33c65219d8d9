//! Side-by-side quality reports for the generated set and the reference
//! lattices of similar size, as CSV.

use frontnodes::baselines::{cartesian, halton, hexagonal, HaltonSpec, LatticeSpec};
use frontnodes::field::ConstantField;
use frontnodes::front::{generate, GeneratorConfig};
use frontnodes::geometry::BoundingBox;
use frontnodes::quality::{QualityReport, ReportOptions};

fn main() -> frontnodes::Result<()> {
    let unit = BoundingBox::unit(2);
    let r = 0.025;
    let field = ConstantField::new(r)?;
    let sets = [
        ("front", generate(&GeneratorConfig::new(unit, &field).seed(1))?.0),
        ("cartesian", cartesian(&LatticeSpec { bbox: unit, h: r })?),
        ("hexagonal", hexagonal(&unit, r)?),
        ("halton", halton(&HaltonSpec::new(unit, 1700))?),
    ];
    let mut opts = ReportOptions::for_dim(2);
    opts.interior = Some(unit.inset(2.0 * r)?);
    println!("set,{}", QualityReport::csv_header());
    for (name, set) in &sets {
        println!("{name},{}", QualityReport::compute(set, &field, &opts)?.to_csv_row());
    }
    Ok(())
}
