//! The bracketed root finder on its own: a certified bracket, bisection with
//! a secant polish, and bracket expansion for a decreasing function.
//!
//! ```bash
//! cargo run --example root_finding
//! ```

use hcsos::rootfind::{expand_bracket_decreasing, solve, Bracket, RootConfig};

fn main() -> Result<(), hcsos::rootfind::RootError> {
    let f = |x: f64| x.powi(3) - 2.0;
    let report = solve(f, &Bracket::new(f, 0.0, 2.0)?, &RootConfig::default())?;
    println!("cube root of 2: {report:?}");

    // no sign change: the bracket is refused
    println!("{:?}", Bracket::new(f, 2.0, 3.0).err());

    let g = |x: f64| 1e6 / (1.0 + x * x);
    let b = expand_bracket_decreasing(g, 0.0, 1.0)?;
    let report = solve(|x| g(x) - 1.0, &b, &RootConfig::default())?;
    println!("g(x) = 1 at x = {} (bracket [{}, {}])", report.root, b.lo(), b.hi());
    Ok(())
}
