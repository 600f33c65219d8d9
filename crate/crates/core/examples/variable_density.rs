//! A radius growing with distance from the origin, with and without the
//! bigger-disks correction, checked against both spacing rules.

use frontnodes::field::RadialExpField;
use frontnodes::front::{generate, Correction, GeneratorConfig};
use frontnodes::geometry::BoundingBox;
use frontnodes::quality::{check_spacing, SpacingVariation};

fn main() -> frontnodes::Result<()> {
    let bbox = BoundingBox::centered(2, 1.0)?;
    let field = RadialExpField::over_box(0.02, 1.5, &bbox)?;
    for correction in [Correction::Off, Correction::BiggerDisks] {
        let cfg = GeneratorConfig::new(bbox, &field).seed(5).correction(correction);
        let (nodes, _) = generate(&cfg)?;
        let prior = check_spacing(&nodes, &field, SpacingVariation::Prior, 0.0).len();
        let bigger = check_spacing(&nodes, &field, SpacingVariation::Bigger, 0.0).len();
        println!("{correction:?}: N={} prior_violations={prior} bigger_violations={bigger}", nodes.len());
    }
    Ok(())
}
