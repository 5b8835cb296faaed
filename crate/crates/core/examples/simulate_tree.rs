//! Samples the tree-indexed chain of μ1 at k = 2, θ = 0.9 and compares level
//! marginals with the stationary law.
//!
//! ```bash
//! cargo run --release --example simulate_tree
//! ```

use hcsos::chain::kernel_of;
use hcsos::model::Branch;
use hcsos::sampler::{estimate_marginals, sample, TreeConfig};
use hcsos::tisgm::enumerate;
use hcsos::WandAdmissibility;

fn main() -> hcsos::Result<()> {
    let (k, theta) = (2, 0.9);
    let set = enumerate(k, theta)?;
    let sol = set.get(Branch::Upper).expect("mu1 exists below theta_cr");
    let kern = kernel_of(sol, k, theta)?;

    let cfg = TreeConfig::new(k, 5, 2024)?;
    let one = sample(&kern, &cfg)?;
    println!("one sample: {} vertices, level 2 = {:?}", one.spins.len(), one.level(2));
    println!("violations: {}", one.violations(&WandAdmissibility::new(2)?));

    let stats = estimate_marginals(&kern, &cfg, 20_000)?;
    println!("stationary      {:.4?}", stats.stationary);
    for (level, f) in stats.level_freqs.iter().enumerate() {
        println!("level {level:<2}        {f:.4?}");
    }
    println!("max deviation {:.2} sigma, {} inadmissible edges", stats.max_sigma_deviation(), stats.violations);
    Ok(())
}
