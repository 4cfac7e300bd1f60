//! Derivatives of the gap function shrink on the first `A` block and blow
//! up on the first `B` block.

use irregular_entire::entire::{build_irregular, irregularity_probe, OmegaSpec};
use irregular_entire::schedule::compute_schedule;

fn main() -> irregular_entire::Result<()> {
    let s = compute_schedule(2)?;
    let f = build_irregular(OmegaSpec::Power(0.1), &s)?;
    let report = irregularity_probe(&f, &s, 1, 1, 6)?;

    println!("sup |D^j f| on the unit disk:");
    for r in report.decay_records() {
        println!("  j = {:>6}: <= {:.3e}", r.index, r.value_upper);
    }
    println!("|f^(n)(0)|:");
    for r in report.growth_records() {
        println!("  n = {:>6}: {:.4}", r.index, r.value_upper);
    }
    Ok(())
}
