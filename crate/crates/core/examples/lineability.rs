//! A combination `2 F_1 - 3 F_2` of the logarithmic family keeps the
//! irregular behaviour of its dominant member.

use irregular_entire::entire::{combination_growth_check, irregularity_probe, log_family_combination};
use irregular_entire::schedule::compute_schedule;

fn main() -> irregular_entire::Result<()> {
    let (weights, ts) = ([2.0, -3.0], [1.0, 2.0]);
    let s1 = compute_schedule(1)?;
    let s2 = compute_schedule(2)?;

    let g = combination_growth_check(&weights, &ts, &s1, 1, 64, 1_000_000)?;
    println!(
        "dominant t = {}, weight {}, threshold {}, {} samples, {} failures",
        g.dominant_t,
        g.dominant_weight,
        g.threshold,
        g.samples,
        g.failures.len()
    );

    let f = log_family_combination(&weights, &ts, &s2)?;
    let probe = irregularity_probe(&f, &s1, 1, 1, 8)?;
    let worst = probe.decay_records().map(|r| r.value_upper).fold(0.0, f64::max);
    println!("largest sup |D^j f| on the unit disk over A: {worst:.3e}");
    Ok(())
}
