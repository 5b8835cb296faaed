//! Forward iteration of the boundary-law map, for the three-state model and
//! for m = 4.
//!
//! ```bash
//! cargo run --example boundary_law_iteration
//! ```

use hcsos::model::ModelParams;
use hcsos::tisgm::{iterate_boundary_law, BoundaryLaw, IterationOutcome};

fn show(params: &ModelParams, init: &BoundaryLaw) -> hcsos::Result<()> {
    print!("m = {}, k = {}, theta = {}: ", params.m(), params.k(), params.theta());
    match iterate_boundary_law(params, init, 5_000, 1e-12)? {
        IterationOutcome::Converged { law, iterations, residual } => {
            println!("converged in {iterations} steps, residual {residual:.1e}, z = {:?}", law.z());
        }
        IterationOutcome::Diverged(r) => {
            println!("no convergence after {} steps (last step {:.3e})", r.iterations, r.last_step);
            if let Some(last) = r.tail.last() {
                println!("    last iterate {last:?}");
            }
        }
    }
    Ok(())
}

fn main() -> hcsos::Result<()> {
    for (k, theta) in [(2, 0.5), (2, 1.0), (2, 1.5), (3, 0.5)] {
        show(&ModelParams::three_state(k, theta)?, &BoundaryLaw::ones(2))?;
    }
    // near the upper asymmetric solution at k = 2, θ = 0.5
    show(&ModelParams::three_state(2, 0.5)?, &BoundaryLaw::new(vec![80.0, 12.0, 1.0])?)?;
    show(&ModelParams::new(2, 0.8, 4)?, &BoundaryLaw::ones(4))?;
    Ok(())
}
