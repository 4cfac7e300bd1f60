//! Integral means `M_p(f, r)` and the bounds built on them.

use std::f64::consts::PI;

use serde::Serialize;

use crate::entire::{EntireFunction, Evaluator};
use crate::error::{Error, Result};
use crate::output::fmt_num;
use crate::numerics::{bounded_sum, ln_factorial, BoundedValue, LogScalar, RatioCertificate};

/// First and last node counts of the trapezoid rule.
pub const QUADRATURE_START: usize = 64;
pub const QUADRATURE_MAX: usize = 16384;

/// `p`, its conjugate `q`, and the growth exponent `a = 1/(2 max{2, p})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanParams {
    pub p: f64,
    pub q: f64,
    pub a: f64,
}

impl MeanParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!("p must lie in [1, inf], got {p}")));
        }
        let q = if p == 1.0 {
            f64::INFINITY
        } else if p.is_infinite() {
            1.0
        } else {
            p / (p - 1.0)
        };
        Ok(MeanParams {
            p,
            q,
            a: 1.0 / (2.0 * p.max(2.0)),
        })
    }
}

/// `M_p(f, r)`: the coefficient formula at `p = 2`, the circle maximum at
/// `p = ∞`, trapezoid quadrature otherwise.
pub fn mean_p(ev: &Evaluator, f: &EntireFunction, r: f64, params: &MeanParams) -> Result<BoundedValue> {
    check_radius(r)?;
    if f.is_zero() {
        return Ok(BoundedValue::zero());
    }
    if params.p == 2.0 {
        Ok(ev.abs_power_sum(f, r, 2.0)?.powf(0.5))
    } else if params.p.is_infinite() {
        ev.circle_max(f, r)
    } else {
        mean_p_quadrature(ev, f, r, params.p)
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius must be positive, got {r}")))
    }
}

/// Trapezoid rule for `(1/2π ∫ |f(re^{it})|^p dt)^{1/p}`, doubling the
/// nodes until the relative change is within `ev.tol.rel`.
///
/// Each node value carries its own error bound; the bracket is that
/// interval rule widened by the last change between node counts.
pub fn mean_p_quadrature(ev: &Evaluator, f: &EntireFunction, r: f64, p: f64) -> Result<BoundedValue> {
    check_radius(r)?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("quadrature needs finite p >= 1, got {p}")));
    }
    if f.is_zero() {
        return Ok(BoundedValue::zero());
    }
    let circle = ev.circle(f, r)?;
    let node = |k: usize, n: usize| -> (f64, f64, f64) {
        let (v, err) = circle.value_at(2.0 * PI * k as f64 / n as f64);
        let m = v.norm();
        (m.powf(p), (m - err).max(0.0).powf(p), (m + err).powf(p))
    };
    let mut n = QUADRATURE_START;
    let (mut mid, mut lo, mut hi) = (0.0, 0.0, 0.0);
    for k in 0..n {
        let (a, b, c) = node(k, n);
        mid += a;
        lo += b;
        hi += c;
    }
    let mut prev = mid / n as f64;
    loop {
        let n2 = 2 * n;
        for k in (1..n2).step_by(2) {
            let (a, b, c) = node(k, n2);
            mid += a;
            lo += b;
            hi += c;
        }
        n = n2;
        let cur = mid / n as f64;
        let delta = (cur - prev).abs();
        if delta <= ev.tol.rel * cur || cur == 0.0 {
            let rounding = 4.0 * n as f64 * f64::EPSILON;
            let lower = ((lo / n as f64 - delta) * (1.0 - rounding)).max(0.0);
            let upper = (hi / n as f64 + delta) * (1.0 + rounding);
            let scale = LogScalar::from_ln(circle.ln_scale());
            let inv = 1.0 / p;
            return Ok(BoundedValue::new(
                LogScalar::from_f64(lower).powf(inv).mul(scale),
                LogScalar::from_f64(upper).powf(inv).mul(scale),
            ));
        }
        if n >= QUADRATURE_MAX {
            return Err(Error::ToleranceUnreachable {
                what: "mean quadrature",
                terms: n,
            });
        }
        prev = cur;
    }
}

/// `(Σ |c_n|^q r^{qn} / (n!)^q)^{1/q}`, which dominates `M_p` for `p ≥ 2`.
pub fn hy_bound(ev: &Evaluator, f: &EntireFunction, r: f64, params: &MeanParams) -> Result<BoundedValue> {
    if params.p < 2.0 {
        return Err(Error::InvalidP(params.p));
    }
    check_radius(r)?;
    Ok(ev.abs_power_sum(f, r, params.q)?.powf(1.0 / params.q))
}

/// `Σ_{n≥0} r^{αn} / ((n+1)^β (n!)^α)`.
pub fn lemma_sum(alpha: f64, beta: f64, r: f64, tol: f64) -> Result<BoundedValue> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    check_radius(r)?;
    let ln_r = r.ln();
    let terms = (0u64..).map(move |n| {
        LogScalar::from_ln(
            alpha * (n as f64 * ln_r - ln_factorial(n)) - beta * (n as f64 + 1.0).ln(),
        )
    });
    bounded_sum(terms, &RatioCertificate::default().with_tol(tol))
}

/// `lemma_sum / (r^{(1−α−2β)/2} e^{αr})`.
pub fn lemma_ratio(alpha: f64, beta: f64, r: f64, tol: f64) -> Result<BoundedValue> {
    let s = lemma_sum(alpha, beta, r, tol)?;
    let ln_cmp = 0.5 * (1.0 - alpha - 2.0 * beta) * r.ln() + alpha * r;
    Ok(s.scale_pos(LogScalar::from_ln(-ln_cmp)))
}

/// `n! R M1 / (R − m)^{n+1}`.
pub fn cauchy_derivative_bound(n: u64, m: u64, radius: f64, m1: f64) -> f64 {
    assert!(radius > m as f64 && m1 >= 0.0);
    if m1 == 0.0 {
        return 0.0;
    }
    let ln = ln_factorial(n) + radius.ln() + m1.ln() - (n as f64 + 1.0) * (radius - m as f64).ln();
    ln.exp()
}

/// `ln n! − ((n + 1/2) ln n − n + ln √(2π))`, computed without cancellation.
fn ln_stirling_excess(n: u64) -> f64 {
    let x = n as f64;
    if n < 64 {
        return ln_factorial(n) - ((x + 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln());
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))))
}

/// The sequence `b_n = C n! eⁿ / (n^{n+1/2} (1 − m/n)^{n+1})` over `m < n ≤ n_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundednessCertificate {
    pub c: f64,
    pub m: u64,
    pub n_max: u64,
    pub sup: f64,
    pub argmax: u64,
    pub tail: f64,
    pub limit: f64,
    pub last_decade_monotone: bool,
    pub bounded: bool,
}

/// `b_n` with `C = 1`.
pub fn boundedness_term(m: u64, n: u64) -> f64 {
    assert!(n > m);
    let x = n as f64;
    let ln = 0.5 * (2.0 * PI).ln() + ln_stirling_excess(n) - (x + 1.0) * (-(m as f64) / x).ln_1p();
    ln.exp()
}

/// Evaluates `b_n` for `m < n ≤ n_max`; bounded when the last decade is
/// monotone and the final value is within 1% of `C √(2π) e^m`.
pub fn boundedness_certificate(c: f64, m: u64, n_max: u64) -> Result<BoundednessCertificate> {
    if !(c > 0.0 && c.is_finite()) || n_max <= m {
        return Err(Error::InvalidArgument(format!(
            "need C > 0 and n_max > m, got C = {c}, m = {m}, n_max = {n_max}"
        )));
    }
    let decade = (n_max / 10).max(m + 1);
    let (mut sup, mut argmax) = (0.0f64, m + 1);
    let (mut up, mut down) = (true, true);
    let mut prev = f64::NAN;
    let mut tail = 0.0;
    for n in m + 1..=n_max {
        let b = boundedness_term(m, n);
        if b > sup {
            sup = b;
            argmax = n;
        }
        if n > decade {
            up &= b >= prev;
            down &= b <= prev;
        }
        prev = b;
        tail = b;
    }
    let limit = c * (2.0 * PI).sqrt() * (m as f64).exp();
    let monotone = up || down;
    Ok(BoundednessCertificate {
        c,
        m,
        n_max,
        sup: c * sup,
        argmax,
        tail: c * tail,
        limit,
        last_decade_monotone: monotone,
        bounded: monotone && (c * tail - limit).abs() <= 0.01 * limit,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthVerdict {
    InteriorMax,
    RightEdgeMax,
}

impl GrowthVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            GrowthVerdict::InteriorMax => "interior-max",
            GrowthVerdict::RightEdgeMax => "right-edge-max",
        }
    }
}

/// `r^{a−ε} e^{−r} M_p(f, r)` over a grid, with an empirical boundedness verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthCertificate {
    pub p: f64,
    pub eps: f64,
    pub a: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub ln_values: Vec<f64>,
    pub sup: f64,
    pub argmax: f64,
    pub terminal_slope: f64,
    pub verdict: GrowthVerdict,
}

impl GrowthCertificate {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (r, v) in self.radii.iter().zip(&self.values) {
            out.push_str(&format!("{},{}\n", fmt_num(*r), fmt_num(*v)));
        }
        out
    }
}

/// `n` radii spaced geometrically from `lo` to `hi`, both included.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid needs 0 < lo < hi and at least 2 points, got [{lo}, {hi}] x {n}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    g[0] = lo;
    g[n - 1] = hi;
    Ok(g)
}

pub const DEFAULT_GRID_LO: f64 = 0.0625;
pub const DEFAULT_GRID_HI: f64 = 131072.0;
pub const DEFAULT_GRID_POINTS: usize = 512;

/// `2^{-4} … 2^{17}`, 512 points. The upper end clears the first coefficient
/// block of the gap functions, where their growth actually turns over.
pub fn default_grid() -> Vec<f64> {
    geometric_grid(DEFAULT_GRID_LO, DEFAULT_GRID_HI, DEFAULT_GRID_POINTS).expect("valid constants")
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) || !(grid[0] >= 0.0) {
        return Err(Error::InvalidArgument("grid must be increasing and nonnegative".into()));
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `ln r` over `r ≥ r_last / 10`,
/// skipping points where `y` is zero.
pub(crate) fn terminal_log_slope(radii: &[f64], ln_values: &[f64]) -> f64 {
    let Some(&last) = radii.last() else {
        return 0.0;
    };
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(ln_values)
        .filter(|(r, v)| **r > 0.0 && **r >= last / 10.0 && v.is_finite())
        .map(|(r, v)| (r.ln(), *v))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// `M_p` upper ends over a grid, as logs.
pub fn ln_mean_upper(ev: &Evaluator, f: &EntireFunction, params: &MeanParams, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter()
        .map(|&r| Ok(mean_p(ev, f, r, params)?.upper.log_mag()))
        .collect()
}

/// Tabulates `r^{a−ε} e^{−r} M_p(f, r)` (upper bracket) over `grid`.
pub fn growth_certificate(
    ev: &Evaluator,
    f: &EntireFunction,
    params: &MeanParams,
    eps: f64,
    grid: &[f64],
) -> Result<GrowthCertificate> {
    check_grid(grid)?;
    let ln_m = ln_mean_upper(ev, f, params, grid)?;
    growth_certificate_from_means(params, eps, grid, &ln_m)
}

/// As [`growth_certificate`], reusing precomputed `ln M_p` values.
pub fn growth_certificate_from_means(
    params: &MeanParams,
    eps: f64,
    grid: &[f64],
    ln_means: &[f64],
) -> Result<GrowthCertificate> {
    if !(eps > 0.0 && eps < params.a) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < eps < a = {}, got {eps}",
            params.a
        )));
    }
    check_grid(grid)?;
    if grid[0] <= 0.0 || ln_means.len() != grid.len() {
        return Err(Error::InvalidArgument("grid must be positive and match the means".into()));
    }
    let ln_values: Vec<f64> = grid
        .iter()
        .zip(ln_means)
        .map(|(&r, &m)| (params.a - eps) * r.ln() - r + m)
        .collect();
    let mut best = 0;
    for (i, v) in ln_values.iter().enumerate() {
        if *v > ln_values[best] {
            best = i;
        }
    }
    let terminal_slope = terminal_log_slope(grid, &ln_values);
    let verdict = if best + 1 < grid.len() && terminal_slope <= 0.0 {
        GrowthVerdict::InteriorMax
    } else {
        GrowthVerdict::RightEdgeMax
    };
    let values: Vec<f64> = ln_values.iter().map(|v| v.exp()).collect();
    Ok(GrowthCertificate {
        p: params.p,
        eps,
        a: params.a,
        radii: grid.to_vec(),
        sup: values[best],
        argmax: grid[best],
        values,
        ln_values,
        terminal_slope,
        verdict,
    })
}

/// One row of the growth-exponent figure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionRow {
    pub p: f64,
    pub yes_level: f64,
    pub no_level: f64,
}

/// Growth exponents that are attainable (`1/(2 max{2,p})`) and excluded (`1/2`).
pub fn region_data(ps: &[f64]) -> Result<Vec<RegionRow>> {
    ps.iter()
        .map(|&p| {
            if !(p >= 1.0) || p.is_infinite() {
                return Err(Error::InvalidArgument(format!("region needs finite p >= 1, got {p}")));
            }
            Ok(RegionRow {
                p,
                yes_level: 1.0 / (2.0 * p.max(2.0)),
                no_level: 0.5,
            })
        })
        .collect()
}

/// `steps` evenly spaced values from `pmin` to `pmax` inclusive.
pub fn linear_grid(pmin: f64, pmax: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(pmin <= pmax) {
        return Err(Error::InvalidArgument("need steps >= 1 and pmin <= pmax".into()));
    }
    if steps == 1 {
        return Ok(vec![pmin]);
    }
    Ok((0..steps)
        .map(|i| pmin + (pmax - pmin) * i as f64 / (steps - 1) as f64)
        .collect())
}

pub fn region_csv(rows: &[RegionRow]) -> String {
    let mut out = String::from("p,yes_level,no_level\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", fmt_num(r.p), fmt_num(r.yes_level), fmt_num(r.no_level)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ev() -> Evaluator {
        Evaluator::default()
    }

    #[test]
    fn params() {
        let p = MeanParams::new(2.0).unwrap();
        assert_eq!((p.q, p.a), (2.0, 0.25));
        let p = MeanParams::new(f64::INFINITY).unwrap();
        assert_eq!((p.q, p.a), (1.0, 0.0));
        let p = MeanParams::new(1.0).unwrap();
        assert!(p.q.is_infinite() && p.a == 0.25);
        assert_eq!(MeanParams::new(3.0).unwrap().a, 1.0 / 6.0);
        assert!(MeanParams::new(0.5).is_err());
    }

    #[test]
    fn monomial_means_are_constant_modulus() {
        let z3 = EntireFunction::monomial(3);
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let m = mean_p(&ev(), &z3, 2.0, &MeanParams::new(p).unwrap()).unwrap();
            assert!(m.contains_f64(8.0), "p = {p}: {m:?}");
            assert!(m.relative_width() < 1e-8);
        }
        let zero = EntireFunction::zero();
        assert_eq!(mean_p(&ev(), &zero, 1.0, &MeanParams::new(3.0).unwrap()).unwrap(), BoundedValue::zero());
    }

    #[test]
    fn exponential_m2_matches_quadrature() {
        let e = EntireFunction::exponential();
        for r in [0.5, 3.0, 10.0] {
            let coef = mean_p(&ev(), &e, r, &MeanParams::new(2.0).unwrap()).unwrap();
            let quad = mean_p_quadrature(&ev(), &e, r, 2.0).unwrap();
            assert!(coef.upper >= quad.lower && quad.upper >= coef.lower, "r = {r}");
        }
    }

    #[test]
    fn hy_examples() {
        let f = EntireFunction::polynomial(vec![Complex64::new(1.0, 0.0), Complex64::new(-2.0, 1.0)]);
        let p2 = MeanParams::new(2.0).unwrap();
        assert_eq!(hy_bound(&ev(), &f, 1.5, &p2).unwrap(), mean_p(&ev(), &f, 1.5, &p2).unwrap());
        let pinf = MeanParams::new(f64::INFINITY).unwrap();
        let hy = hy_bound(&ev(), &f, 1.5, &pinf).unwrap();
        assert!(hy.contains_f64(1.0 + 1.5 * 5f64.sqrt()));
        assert_eq!(
            hy_bound(&ev(), &f, 1.0, &MeanParams::new(1.5).unwrap()),
            Err(Error::InvalidP(1.5))
        );
    }

    #[test]
    fn lemma_closed_forms() {
        for r in [0.1, 1.0, 7.5, 100.0] {
            let one = lemma_ratio(1.0, 0.0, r, 1e-13).unwrap();
            assert!((one.midpoint().to_f64() - 1.0).abs() < 1e-10);
            let b = lemma_ratio(1.0, 1.0, r, 1e-13).unwrap();
            assert!((b.midpoint().to_f64() - (1.0 - (-r).exp())).abs() < 1e-8);
        }
    }

    #[test]
    fn cauchy_examples() {
        assert!((cauchy_derivative_bound(1, 1, 2.0, 1.0) - 2.0).abs() < 1e-14);
        assert!((cauchy_derivative_bound(0, 0, 3.0, 5.0) - 5.0).abs() < 1e-14);
        // R = n and M1 = C eⁿ/√n reproduce b_n
        let (n, m, c) = (40u64, 2u64, 1.5);
        let m1 = c * (n as f64).exp() / (n as f64).sqrt();
        let direct = cauchy_derivative_bound(n, m, n as f64, m1);
        let b = c * boundedness_term(m, n);
        assert!((direct / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundedness_small() {
        let cert = boundedness_certificate(1.0, 0, 1000).unwrap();
        assert!(cert.last_decade_monotone && cert.bounded);
        let twice = boundedness_certificate(2.0, 0, 1000).unwrap();
        assert_eq!(twice.sup, 2.0 * cert.sup);
        assert!(boundedness_certificate(1.0, 5, 5).is_err());
    }

    #[test]
    fn monomial_growth_peak() {
        let k = 5;
        let f = EntireFunction::monomial(k);
        let p = MeanParams::new(2.0).unwrap();
        let eps = 0.05;
        let grid = geometric_grid(0.5, 64.0, 4000).unwrap();
        let cert = growth_certificate(&ev(), &f, &p, eps, &grid).unwrap();
        let peak = k as f64 + p.a - eps;
        assert!((cert.argmax - peak).abs() / peak < 2e-3);
        assert_eq!(cert.verdict, GrowthVerdict::InteriorMax);
        let zero = growth_certificate(&ev(), &EntireFunction::zero(), &p, eps, &grid).unwrap();
        assert_eq!(zero.sup, 0.0);
    }

    #[test]
    fn region_rows() {
        let rows = region_data(&linear_grid(1.0, 6.0, 6).unwrap()).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].yes_level, 0.25);
        assert_eq!(rows[1].yes_level, 0.25);
        assert_eq!(rows[2].yes_level, 1.0 / 6.0);
        assert!(rows.iter().all(|r| r.no_level == 0.5));
        assert!(region_data(&[0.5]).is_err());
    }
}
