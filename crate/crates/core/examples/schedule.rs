//! Gap schedule: block endpoints and the tail sums that pick them.
//!
//! ```bash
//! cargo run --example schedule
//! ```

use irregular_entire::schedule::{compute_schedule, prefix_density};
use num_traits::ToPrimitive;

fn main() -> irregular_entire::Result<()> {
    let s = compute_schedule(3)?;
    for n in 0..s.levels() {
        let (lo, hi) = s.tails()[n].to_f64_pair();
        println!(
            "level {}: alpha = {}, beta = {}, tail in [{lo:.3e}, {hi:.3e}]",
            n + 1,
            s.alphas()[n],
            s.betas()[n]
        );
    }
    let (a, b) = s.index_sets();
    for (name, set) in [("A", &a), ("B", &b)] {
        for end in set.default_checkpoints().iter().take(2) {
            let d = prefix_density(set, end)?;
            println!("density of {name} up to {end}: {:.6}", d.to_f64().unwrap_or(f64::NAN));
        }
    }
    Ok(())
}
