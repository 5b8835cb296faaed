//! Closed-form spectra against the numeric 3x3 eigensolver, with the
//! stationary law and the κ, γ coefficients of each kernel.
//!
//! ```bash
//! cargo run --example spectrum_check
//! ```

use hcsos::chain::{
    gamma_of, kappa_of, kernel_of, spectrum_asymmetric_k2, spectrum_numeric, spectrum_symmetric, stationary,
};
use hcsos::model::Branch;
use hcsos::tisgm::enumerate;

fn main() -> hcsos::Result<()> {
    for (k, theta) in [(2, 0.4), (3, 1.2), (6, 3.0)] {
        for sol in enumerate(k, theta)?.solutions {
            let kern = kernel_of(&sol, k, theta)?;
            let closed = match (sol.branch, k) {
                (Branch::Symmetric, _) => Some(spectrum_symmetric(sol.y, theta, k)),
                (_, 2) => Some(spectrum_asymmetric_k2(sol.x)?),
                _ => None,
            };
            let numeric = spectrum_numeric(&kern);
            println!("k = {k}, theta = {theta}, {}", sol.branch);
            println!("  P = {:.6?}", kern.p());
            println!("  numeric eigenvalues {:.12?}, s2 = {:.12}", numeric.eigenvalues, numeric.s2);
            if let Some(c) = closed {
                println!("  closed  eigenvalues {:.12?}, s2 = {:.12}", c.eigenvalues, c.s2);
            }
            println!("  pi = {:.6?}, kappa = {:.10}, gamma = {:.10}", stationary(&kern)?, kappa_of(&kern), gamma_of(&kern));
        }
    }
    Ok(())
}
