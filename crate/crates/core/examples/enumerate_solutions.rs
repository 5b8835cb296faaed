//! Lists the translation-invariant solutions on either side of `θ_cr`.
//!
//! ```bash
//! cargo run --example enumerate_solutions
//! ```

use hcsos::tisgm::{enumerate, theta_cr};

fn main() -> hcsos::Result<()> {
    for k in [2, 3, 5] {
        let tcr = theta_cr(k)?;
        println!("k = {k}, theta_cr = {tcr:.12}");
        for theta in [0.5 * tcr, tcr, 1.5 * tcr] {
            let set = enumerate(k, theta)?;
            println!("  theta = {theta:.6}: {} solution(s){}", set.len(), if set.critical { " (critical)" } else { "" });
            for s in &set.solutions {
                println!("    {:<10} x = {:<22.15e} y = {:<22.15e} residual = {:.1e}", s.branch, s.x, s.y, s.residual(k, theta));
            }
        }
    }
    Ok(())
}
