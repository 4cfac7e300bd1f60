use irregular_entire::entire::{combine, derivative, EntireFunction, Evaluator};
use irregular_entire::means::{default_grid, geometric_grid, hy_bound, mean_p, MeanParams};
use irregular_entire::numerics::{bounded_sum, log_factorial, LogScalar, RatioCertificate};
use irregular_entire::schedule::{prefix_density, IndexSet};
use irregular_entire::weighted::{check_weight_axioms, weighted_norm, WeightSpec};
use num_bigint::BigUint;
use num_complex::Complex64;
use proptest::prelude::*;

fn neumaier(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

fn poly() -> impl Strategy<Value = EntireFunction> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12).prop_map(|v| {
        let a: Vec<Complex64> = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        EntireFunction::from_power_coeffs(&a)
    })
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn bounded_sum_brackets_finite_sums(xs in prop::collection::vec(-1e3f64..1e3, 0..40)) {
        let b = bounded_sum(xs.iter().map(|&x| LogScalar::from_f64(x)), &RatioCertificate::default()).unwrap();
        let exact = neumaier(xs.iter().copied());
        let scale = xs.iter().map(|x| x.abs()).sum::<f64>();
        let (lo, hi) = b.to_f64_pair();
        prop_assert!(lo <= exact + 1e-12 * scale && exact - 1e-12 * scale <= hi, "{lo} {exact} {hi}");
    }

    #[test]
    fn log_scalar_round_trip_and_product(x in -1e100f64..1e100, y in -1e100f64..1e100) {
        let (a, b) = (LogScalar::from_f64(x), LogScalar::from_f64(y));
        // exp(ln|x|) loses about |ln x| ulps
        prop_assert!((a.to_f64() - x).abs() <= 4.0 * f64::EPSILON * (1.0 + x.abs().ln().abs()) * x.abs());
        let p = a.mul(b).to_f64();
        prop_assert!((p - x * y).abs() <= 1e-12 * (x * y).abs());
    }

    #[test]
    fn combine_is_linear(f in poly(), g in poly(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let (wa, wb) = (Complex64::new(a, 0.5), Complex64::new(b, -1.0));
        let h = combine(&[wa, wb], &[f.clone(), g.clone()]).unwrap();
        for n in 0..14 {
            prop_assert!(close(h.coeff(n), wa * f.coeff(n) + wb * g.coeff(n)));
        }
    }

    #[test]
    fn derivative_shifts_coefficients(f in poly(), j in 0u64..15) {
        let d = derivative(&f, j);
        for n in 0..14 {
            prop_assert_eq!(d.coeff(n), f.coeff(n + j));
        }
    }

    #[test]
    fn means_increase_with_radius(f in poly(), r in 0.1f64..10.0, k in 1.01f64..3.0) {
        let ev = Evaluator::default();
        for p in [2.0, f64::INFINITY] {
            let params = MeanParams::new(p).unwrap();
            let small = mean_p(&ev, &f, r, &params).unwrap();
            let large = mean_p(&ev, &f, r * k, &params).unwrap();
            prop_assert!(small.lower.to_f64() <= large.upper.to_f64() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn hausdorff_young_dominates(f in poly(), r in 0.1f64..5.0, p in 2.0f64..8.0) {
        let ev = Evaluator::default().with_tol(1e-8);
        let params = MeanParams::new(p).unwrap();
        let m = mean_p(&ev, &f, r, &params).unwrap();
        let h = hy_bound(&ev, &f, r, &params).unwrap();
        prop_assert!(m.lower.to_f64() <= h.upper.to_f64() * (1.0 + 1e-9));
    }

    #[test]
    fn weighted_norm_is_a_seminorm(f in poly(), g in poly(), lam in 0.1f64..5.0, b in 0.0f64..2.0) {
        let ev = Evaluator::default();
        let params = MeanParams::new(2.0).unwrap();
        let v = WeightSpec::PowerExp(b);
        let grid = geometric_grid(0.25, 64.0, 24).unwrap();
        let nf = weighted_norm(&ev, &f, &v, &params, &grid).unwrap().sup;
        let ng = weighted_norm(&ev, &g, &v, &params, &grid).unwrap().sup;
        let scaled = weighted_norm(&ev, &f.scaled(Complex64::new(lam, 0.0)), &v, &params, &grid).unwrap().sup;
        prop_assert!((scaled - lam * nf).abs() <= 1e-9 * lam * nf.max(1e-300));
        let sum = combine(&[Complex64::new(1.0, 0.0); 2], &[f, g]).unwrap();
        let ns = weighted_norm(&ev, &sum, &v, &params, &grid).unwrap().sup;
        prop_assert!(ns <= (nf + ng) * (1.0 + 1e-9));
    }

    #[test]
    fn power_exp_weights_are_admissible(b in 0.0f64..3.0) {
        prop_assert!(check_weight_axioms(&WeightSpec::PowerExp(b), &default_grid()).is_ok());
    }

    #[test]
    fn prefix_density_stays_in_unit_interval(
        starts in prop::collection::vec(1u64..50, 1..5),
        n in 1u64..5000,
    ) {
        let mut runs = Vec::new();
        let mut lo = 1;
        for s in starts {
            lo += s;
            runs.push((lo, lo * 2));
            lo = lo * 2 + 1;
        }
        let set = IndexSet::from_u64(&runs).unwrap();
        let d = prefix_density(&set, &BigUint::from(n)).unwrap();
        prop_assert!(d >= num_rational::BigRational::from_integer(0.into()));
        prop_assert!(d <= num_rational::BigRational::from_integer(1.into()));
        prop_assert!(set.count_upto(&BigUint::from(n)) <= set.count_upto(&BigUint::from(n + 1)));
    }
}

#[test]
fn log_factorial_of_a_million() {
    let oracle = neumaier((2..=1_000_000u64).map(|k| (k as f64).ln()));
    let got = log_factorial(1_000_000).log_mag();
    assert!((got - oracle).abs() <= 1e-9 * oracle, "{got} vs {oracle}");
}
