//! Extremality thresholds, closed form next to the root of the defining
//! function.
//!
//! ```bash
//! cargo run --example thresholds
//! ```

use hcsos::extremality::{h_func, q_func, thresholds, NO_THRESHOLDS_NOTE};

fn main() -> hcsos::Result<()> {
    for k in [2, 3] {
        let table = thresholds(k)?;
        println!("k = {k}");
        for t in &table.entries {
            println!(
                "  {:<7} ({})  closed form {:.16}  root found {:.16}  |diff| {:.1e}  quoted {}",
                t.name,
                t.measure,
                t.closed_form,
                t.root_found,
                t.difference(),
                t.quoted
            );
        }
    }
    println!("k >= 4: {NO_THRESHOLDS_NOTE}");

    // the defining functions change sign at the thresholds
    for theta in [0.2, 0.5, 0.6, 1.0] {
        println!("h2({theta}) = {:+.6}", h_func(2, theta)?);
    }
    for theta in [1.0, 1.9, 2.0, 4.0] {
        println!("q2({theta}) = {:+.6}", q_func(2, theta)?);
    }
    Ok(())
}
