//! Stippling a synthetic grayscale image: dark regions get small radii.
//! Writes the image and the nodes so they can be plotted together.

use frontnodes::field::{write_pgm, GrayImage, ImageField};
use frontnodes::front::{generate, GeneratorConfig};
use frontnodes::geometry::{write_points, BoundingBox};

fn main() -> frontnodes::Result<()> {
    // A dark disk on a light background with a horizontal ramp.
    let image = GrayImage::from_fn(128, 128, |x, y| {
        let d = ((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt();
        if d < 0.25 {
            20
        } else {
            (120.0 + 130.0 * x) as u8
        }
    });
    let dir = std::env::temp_dir();
    write_pgm(std::fs::File::create(dir.join("dither.pgm"))?, &image)?;

    let extent = BoundingBox::unit(2);
    let field = ImageField::new(image, extent, 0.004, 0.03)?;
    let (nodes, stats) = generate(&GeneratorConfig::new(extent, &field).seed(2))?;
    write_points(std::fs::File::create(dir.join("dither_nodes.txt"))?, &nodes)?;
    println!("N={} seconds={:.3} written to {}", nodes.len(), stats.wall_seconds, dir.display());
    Ok(())
}
