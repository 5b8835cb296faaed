//! θ-sweep for k = 2 written as CSV, then read back.
//!
//! ```bash
//! cargo run --example phase_sweep -- sweep.csv
//! ```

use std::fs::File;
use std::io::BufWriter;

use hcsos::extremality::DEFAULT_BOUNDARY_TOL;
use hcsos::phase::{mu0_flips, read_csv, sweep, write_csv};

fn main() -> hcsos::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "phase_k2.csv".into());
    let records = sweep(2, 0.1, 2.5, 200, DEFAULT_BOUNDARY_TOL)?;
    write_csv(&records, BufWriter::new(File::create(&path)?))?;

    let back = read_csv(File::open(&path)?)?;
    assert_eq!(back, records);
    println!("wrote {} grid points ({} rows) to {path}", records.len(), records.iter().map(|r| r.rows.len()).sum::<usize>());
    for (a, b) in mu0_flips(&records) {
        println!("mu0 verdict changes between theta = {a:.6} and {b:.6}");
    }
    Ok(())
}
