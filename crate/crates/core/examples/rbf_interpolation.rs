//! Local RBF interpolation of 1/(1+R^3) on front-generated nodes: the error
//! falls as epsilon shrinks until ill-conditioning takes over.

use frontnodes::geometry::BoundingBox;
use frontnodes::rbf::{interp_csv, interp_sweep, present_with_count, radial_target, InterpSettings, NodeSource};

fn main() -> frontnodes::Result<()> {
    let domain = BoundingBox::unit(3);
    let (nodes, r) = present_with_count(&domain, 8000, 0)?;
    eprintln!("N={} r={r:.4}", nodes.len());
    let mut base = InterpSettings::new(domain, 8.0);
    base.eval_count = 2000;
    let eps = [8.0, 4.0, 2.0, 1.0, 0.5];
    let rows = interp_sweep(&[NodeSource::new("present", nodes)], &base, &eps, &radial_target)?;
    print!("{}", interp_csv(&rows));
    Ok(())
}
