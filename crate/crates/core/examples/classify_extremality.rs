//! Kesten–Stigum and MSW witnesses for every measure at a few points of the
//! k = 2 phase diagram.
//!
//! ```bash
//! cargo run --example classify_extremality
//! ```

use hcsos::extremality::{classify_all, DEFAULT_BOUNDARY_TOL};

fn main() -> hcsos::Result<()> {
    println!("{:>3} {:>6} {:>5} {:>12} {:>12}  verdict", "k", "theta", "mu", "k*s2^2", "k*kappa*g");
    for (k, theta) in [(2, 0.3), (2, 0.8), (2, 0.97), (2, 2.5), (3, 1.0), (4, 1.0)] {
        for v in classify_all(k, theta, DEFAULT_BOUNDARY_TOL)? {
            println!(
                "{k:>3} {theta:>6} {:>5} {:>12.8} {:>12.8}  {}",
                v.measure,
                v.ks_value,
                v.msw_value,
                v.verdict
            );
        }
    }
    Ok(())
}
