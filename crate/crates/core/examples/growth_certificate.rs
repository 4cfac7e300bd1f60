//! Whether `r^(a - eps) e^(-r) M_p(f, r)` peaks inside the radius window.
//!
//! The gap function has no coefficients below index 201, so a short window
//! only sees the certificand climbing.

use irregular_entire::entire::{build_irregular, Evaluator, OmegaSpec};
use irregular_entire::means::{default_grid, geometric_grid, growth_certificate, MeanParams};
use irregular_entire::schedule::compute_schedule;

fn main() -> irregular_entire::Result<()> {
    let s = compute_schedule(2)?;
    let f = build_irregular(OmegaSpec::Power(0.1), &s)?;
    let params = MeanParams::new(2.0)?;
    let ev = Evaluator::default();

    for (name, grid) in [
        ("[1/16, 128]", geometric_grid(0.0625, 128.0, 256)?),
        ("[1/16, 2^17]", default_grid()),
    ] {
        let c = growth_certificate(&ev, &f, &params, 0.1, &grid)?;
        println!(
            "{name}: sup {:.4e} at r = {:.1}, terminal log-slope {:.2}, {}",
            c.sup,
            c.argmax,
            c.terminal_slope,
            c.verdict.as_str()
        );
    }
    Ok(())
}
