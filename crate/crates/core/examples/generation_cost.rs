//! Generation time against node count; the log-log slope should sit near 1.

use frontnodes::cli::{bench, bench_csv, bench_slope};

fn main() -> frontnodes::Result<()> {
    let rows = bench(2, &[10_000, 40_000, 160_000], 3, 10, 0)?;
    print!("{}", bench_csv(&rows));
    println!("slope={:.3}", bench_slope(&rows));
    Ok(())
}
