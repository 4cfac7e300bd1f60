//! Weighted norms for `v(r) = r^b e^(-r)` and the resulting membership calls.

use irregular_entire::entire::{build_irregular, EntireFunction, Evaluator, OmegaSpec};
use irregular_entire::means::{geometric_grid, MeanParams};
use irregular_entire::schedule::compute_schedule;
use irregular_entire::weighted::{membership_probe, weighted_norm, WeightSpec};

fn main() -> irregular_entire::Result<()> {
    let ev = Evaluator::default();
    let params = MeanParams::new(2.0)?;
    let grid = geometric_grid(0.0625, 4096.0, 128)?;
    let s = compute_schedule(2)?;
    let fns = [
        ("z^3", EntireFunction::monomial(3)),
        ("exp", EntireFunction::exponential()),
        ("gap", build_irregular(OmegaSpec::Power(0.1), &s)?),
    ];
    for b in [0.1, 0.25, 0.5] {
        let v = WeightSpec::PowerExp(b);
        for (name, f) in &fns {
            let m = membership_probe(&ev, f, &v, &params, &grid)?;
            let n = weighted_norm(&ev, f, &v, &params, &grid)?;
            println!(
                "b = {b:<4} {name:<4} sup {:>10.4e} at r = {:>8.2}, {:<10} -> {}",
                n.sup,
                n.sup_at,
                n.verdict.as_str(),
                m.verdict.as_str()
            );
        }
    }
    Ok(())
}
