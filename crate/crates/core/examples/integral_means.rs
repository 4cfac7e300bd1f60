//! `M_p(exp, r)` for a few `p`, with the Hausdorff-Young upper bound.

use irregular_entire::entire::{EntireFunction, Evaluator};
use irregular_entire::means::{hy_bound, mean_p, MeanParams};

fn main() -> irregular_entire::Result<()> {
    let ev = Evaluator::default().with_tol(1e-8);
    let f = EntireFunction::exponential();
    for p in [1.0, 2.0, 4.0, f64::INFINITY] {
        let params = MeanParams::new(p)?;
        for r in [1.0, 10.0, 50.0] {
            let m = mean_p(&ev, &f, r, &params)?;
            let (lo, hi) = m.to_f64_pair();
            let hy = match hy_bound(&ev, &f, r, &params) {
                Ok(b) => format!("{:.6e}", b.upper.to_f64()),
                Err(_) => "-".into(),
            };
            println!("p = {p:>3}, r = {r:>4}: M_p in [{lo:.6e}, {hi:.6e}], HY bound {hy}");
        }
    }
    Ok(())
}
