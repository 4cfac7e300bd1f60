use irregular_entire::entire::{build_irregular, Evaluator, OmegaSpec};
use irregular_entire::means::{
    boundedness_certificate, default_grid, geometric_grid, growth_certificate, GrowthVerdict, MeanParams,
};
use irregular_entire::schedule::compute_schedule;

// The first block starts at n = 201, so r^{a-eps} e^{-r} M_2 keeps rising
// until r is of that order; a window ending at 128 only sees the climb.
#[test]
fn certificate_needs_the_long_window() {
    let s = compute_schedule(2).unwrap();
    let f = build_irregular(OmegaSpec::Power(0.1), &s).unwrap();
    let p = MeanParams::new(2.0).unwrap();
    let ev = Evaluator::default();

    let short = growth_certificate(&ev, &f, &p, 0.1, &geometric_grid(0.0625, 128.0, 512).unwrap()).unwrap();
    assert_eq!(short.verdict, GrowthVerdict::RightEdgeMax);
    assert!(short.terminal_slope > 0.0);

    let long = growth_certificate(&ev, &f, &p, 0.1, &default_grid()).unwrap();
    assert_eq!(long.verdict, GrowthVerdict::InteriorMax);
    assert!(long.sup.is_finite() && long.sup > 0.0);
    assert!(long.argmax > 128.0 && long.argmax < 131072.0, "argmax {}", long.argmax);
    assert!(long.terminal_slope < 0.0);
}

#[test]
fn boundedness_scales_with_the_constant() {
    let one = boundedness_certificate(1.0, 3, 20_000).unwrap();
    let five = boundedness_certificate(5.0, 3, 20_000).unwrap();
    assert!(one.bounded && five.bounded);
    assert_eq!(one.argmax, five.argmax);
    assert!((five.sup - 5.0 * one.sup).abs() <= 1e-12 * five.sup);
    assert!((five.limit - 5.0 * one.limit).abs() <= 1e-12 * five.limit.abs().max(1e-300));
}
