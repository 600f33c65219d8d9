//! Condition numbers of Gaussian RBF stencils on three node sets of about
//! 8000 nodes in the unit cube. A reduced trial count keeps it quick.

use frontnodes::geometry::BoundingBox;
use frontnodes::rbf::{cond_csv, cond_experiment, standard_sources, CondExperiment};

fn main() -> frontnodes::Result<()> {
    let domain = BoundingBox::unit(3);
    let sources = standard_sources(&domain, 8000, 0)?;
    let mut exp = CondExperiment::sweep(domain, &[3.0, 5.0, 8.0], &[20, 50, 80]);
    exp.trials = 50;
    print!("{}", cond_csv(&cond_experiment(&exp, &sources)?));
    Ok(())
}
