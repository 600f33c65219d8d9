//! A radially growing field filled two ways: a box generator clipped to the
//! ball, and the spherical front. The box front leaves a spacing trend along
//! z that the spherical front does not.

use frontnodes::field::RadialExpField;
use frontnodes::front::{generate, GeneratorConfig};
use frontnodes::geometry::BoundingBox;
use frontnodes::spherical::{generate_spherical, z_bias_diagnostic, z_bias_slope, SphericalConfig, Variation};

fn main() -> frontnodes::Result<()> {
    let outer = 3.0;
    let bbox = BoundingBox::centered(3, outer)?;
    let field = RadialExpField::over_box(4.0 / 21.0, 1.0 / 15.0, &bbox)?;

    let (mut boxed, _) = generate(&GeneratorConfig::new(bbox, &field).seed(4))?;
    boxed.retain(|p| p.norm() <= outer);
    let slope = z_bias_slope(&z_bias_diagnostic(&boxed, &field)?);
    println!("box      N={} z-slope={slope:+.5}", boxed.len());

    for variation in [Variation::Prior, Variation::Bigger] {
        let cfg = SphericalConfig::new(&field, outer).seed(4).variation(variation);
        let (nodes, _) = generate_spherical(&cfg)?;
        let rows = z_bias_diagnostic(&nodes, &field)?;
        let worst = rows.iter().map(|r| r.nn_normalized).fold(f64::INFINITY, f64::min);
        println!("{variation:?}    N={} z-slope={:+.5} min_nn/r={worst:.4}", nodes.len(), z_bias_slope(&rows));
    }
    Ok(())
}
