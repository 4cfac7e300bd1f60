//! Truncated evaluation of coefficient streams with rigorous remainders.
//!
//! Every sum walks the support of the stream in index order and stops once
//! a majorant tail, built from the stream's coefficient bound, is within
//! tolerance of the partial sum. The majorant ratio
//! `((s+o+2)/(s+o+1))^p · r/(s+1)` decreases in `s`, so one geometric bound
//! taken where the ratio is at most 1/2 covers the whole remainder.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{derivative, CoeffBound, EntireFunction};
use crate::error::{Error, Result};
use crate::numerics::{geometric_tail, ln_factorial, BoundedValue, LogScalar, LogSum, DEFAULT_TOL};

/// Series indices summed before a remainder must take over.
pub const DEFAULT_INDEX_CAP: u64 = 1_000_000;

/// Circle samples for the lower bound on a maximum modulus.
pub const CIRCLE_SAMPLES: usize = 256;

/// Terms whose share of the scaled sum falls below this are folded into the
/// error budget instead of being evaluated on the circle.
const NEGLIGIBLE: f64 = 1e-22;

/// Stopping rule: remainder `≤ max(rel · partial, abs)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tol {
    pub rel: f64,
    pub abs: f64,
}

impl Tol {
    pub fn rel(rel: f64) -> Self {
        Tol { rel, abs: 0.0 }
    }

    fn allows(&self, tail: LogScalar, partial: LogScalar) -> bool {
        tail <= partial.scale(self.rel).max(LogScalar::from_f64(self.abs))
    }
}

impl Default for Tol {
    fn default() -> Self {
        Tol::rel(DEFAULT_TOL)
    }
}

/// Evaluation settings shared by every series-based routine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluator {
    pub index_cap: u64,
    pub tol: Tol,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator {
            index_cap: DEFAULT_INDEX_CAP,
            tol: Tol::default(),
        }
    }
}

struct WalkTerm {
    n: u64,
    ln_mag: f64,
    phase: f64,
}

struct Walk {
    sum: LogSum,
    tail: LogScalar,
    rel_err: f64,
    terms: Vec<WalkTerm>,
}

impl Walk {
    fn bracket(&self) -> BoundedValue {
        let s = self.sum.value();
        let e = self.rel_err + self.sum.rounding_bound();
        let lower = s.scale(1.0 - e).max(LogScalar::ZERO);
        BoundedValue::new(lower, s.scale(1.0 + e).add(self.tail))
    }
}

/// `ln` of the majorant term at `s` and of its ratio to the next one.
fn majorant(bound: &CoeffBound, s: u64, ln_r: f64, q: f64) -> (f64, f64) {
    let base = (s + bound.offset) as f64 + 1.0;
    let ln_term = bound.scale.ln() + bound.power * base.ln() + s as f64 * ln_r - ln_factorial(s);
    let ln_ratio = bound.power * (1.0 / base).ln_1p() + ln_r - (s as f64 + 1.0).ln();
    (q * ln_term, q * ln_ratio)
}

/// Bound on `Σ_{n≥s} (|c_n| r^n/n!)^q`, once the majorant ratio is ≤ 1/2.
fn majorant_tail(bound: &CoeffBound, s: u64, ln_r: f64, q: f64) -> Option<LogScalar> {
    if bound.scale == 0.0 || bound.degree.is_some_and(|d| s > d) {
        return Some(LogScalar::ZERO);
    }
    let (ln_term, ln_ratio) = majorant(bound, s, ln_r, q);
    if ln_ratio > -std::f64::consts::LN_2 {
        return None;
    }
    // pad the log for its own rounding
    let pad = 8.0 * f64::EPSILON * ln_term.abs();
    Some(geometric_tail(LogScalar::from_ln(ln_term + pad), ln_ratio.exp()))
}

impl Evaluator {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = Tol::rel(tol);
        self
    }

    fn walk(&self, f: &EntireFunction, r: f64, q: f64, keep: bool) -> Result<Walk> {
        assert!(r >= 0.0 && q > 0.0);
        let mut walk = Walk {
            sum: LogSum::new(),
            tail: LogScalar::ZERO,
            rel_err: 0.0,
            terms: Vec::new(),
        };
        if r == 0.0 {
            let c = f.coeff(0);
            if c.norm() > 0.0 {
                walk.sum.push_ln(q * c.norm().ln());
                if keep {
                    walk.terms.push(WalkTerm {
                        n: 0,
                        ln_mag: c.norm().ln(),
                        phase: c.arg(),
                    });
                }
            }
            return Ok(walk);
        }
        let bound = f.coeff_bound();
        let ln_r = r.ln();
        let mut cursor = f.next_support(0);
        while let Some(n) = cursor {
            if n > self.index_cap {
                let tail = majorant_tail(&bound, n, ln_r, q);
                match tail {
                    Some(t) if self.tol.allows(t, walk.sum.value()) => {
                        walk.tail = t;
                        return Ok(walk);
                    }
                    _ => {
                        return Err(Error::ToleranceUnreachable {
                            what: "series evaluation",
                            terms: self.index_cap as usize,
                        })
                    }
                }
            }
            let c = f.coeff(n);
            let mag = c.norm();
            if mag > 0.0 {
                let lf = ln_factorial(n);
                let ln_c = mag.ln();
                let ln_mag = ln_c + n as f64 * ln_r - lf;
                walk.sum.push_ln(q * ln_mag);
                let err = 8.0 * f64::EPSILON * q * (ln_c.abs() + (n as f64 * ln_r).abs() + lf + 1.0);
                walk.rel_err = walk.rel_err.max(err);
                if keep {
                    walk.terms.push(WalkTerm {
                        n,
                        ln_mag,
                        phase: c.arg(),
                    });
                }
            }
            let next = f.next_support(n + 1);
            if let Some(s) = next {
                if let Some(t) = majorant_tail(&bound, s, ln_r, q) {
                    if self.tol.allows(t, walk.sum.value()) {
                        walk.tail = t;
                        return Ok(walk);
                    }
                }
            }
            cursor = next;
        }
        Ok(walk)
    }

    /// Bracket on `Σ |c_n|^q (r^n / n!)^q`.
    pub fn abs_power_sum(&self, f: &EntireFunction, r: f64, q: f64) -> Result<BoundedValue> {
        Ok(self.walk(f, r, q, false)?.bracket())
    }

    /// Precomputes the series on the circle `|z| = r` for repeated evaluation.
    pub fn circle(&self, f: &EntireFunction, r: f64) -> Result<CircleSeries> {
        let walk = self.walk(f, r, 1.0, true)?;
        let ln_scale = walk.sum.ln();
        if walk.terms.is_empty() {
            return Ok(CircleSeries {
                radius: r,
                ln_scale: walk.tail.log_mag(),
                terms: Vec::new(),
                base_err: if walk.tail.is_zero() { 0.0 } else { 1.0 },
                weighted_n: 0.0,
            });
        }
        let mut terms: Vec<(u64, Complex64)> = Vec::with_capacity(walk.terms.len());
        let mut dropped = 0.0;
        let mut weighted_n = 0.0;
        for t in &walk.terms {
            let a = (t.ln_mag - ln_scale).exp();
            if a < NEGLIGIBLE {
                dropped += a;
                continue;
            }
            weighted_n += a * t.n as f64;
            terms.push((t.n, Complex64::from_polar(a, t.phase)));
        }
        // multiplications in one Horner pass, counting the squarings of w^d
        let mut steps = 2.0 * bit_len(terms.first().map_or(0, |t| t.0)) + 4.0;
        for w in terms.windows(2) {
            steps += 1.0 + 2.0 * bit_len(w[1].0 - w[0].0);
        }
        let tail_scaled = if walk.tail.is_zero() {
            0.0
        } else {
            (walk.tail.log_mag() - ln_scale).exp()
        };
        let base_err = walk.rel_err
            + walk.sum.rounding_bound()
            + dropped
            + tail_scaled
            + 4.0 * (terms.len() as f64 + steps) * f64::EPSILON;
        Ok(CircleSeries {
            radius: r,
            ln_scale,
            terms,
            base_err: base_err * (1.0 + 1e-12),
            weighted_n,
        })
    }

    /// Real and imaginary brackets of `f(z)`.
    pub fn eval(&self, f: &EntireFunction, z: Complex64) -> Result<(BoundedValue, BoundedValue)> {
        let circle = self.circle(f, z.norm())?;
        let (v, err) = circle.value_at(z.arg());
        let scale = LogScalar::from_ln(circle.ln_scale);
        let rad = LogScalar::from_f64(err).mul(scale);
        Ok((
            BoundedValue::around(LogScalar::from_f64(v.re).mul(scale), rad),
            BoundedValue::around(LogScalar::from_f64(v.im).mul(scale), rad),
        ))
    }

    /// Bracket on `max_{|z| = r} |f(z)|`, which is also the disk supremum.
    ///
    /// Nonnegative streams peak at `z = r`, where the value is the absolute
    /// series. Otherwise the lower end is the best of [`CIRCLE_SAMPLES`]
    /// equispaced samples and the upper end the smaller of the absolute
    /// series and the sample maximum plus a Lipschitz allowance from `f'`.
    pub fn circle_max(&self, f: &EntireFunction, r: f64) -> Result<BoundedValue> {
        let abs = self.abs_power_sum(f, r, 1.0)?;
        if f.has_nonnegative_coeffs() || r == 0.0 {
            return Ok(abs);
        }
        let circle = self.circle(f, r)?;
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        for k in 0..CIRCLE_SAMPLES {
            let theta = 2.0 * PI * k as f64 / CIRCLE_SAMPLES as f64;
            let (v, err) = circle.value_at(theta);
            lo = lo.max(v.norm() - err);
            hi = hi.max(v.norm() + err);
        }
        let scale = LogScalar::from_ln(circle.ln_scale);
        let lower = LogScalar::from_f64(lo.max(0.0)).mul(scale);
        let d1 = self.abs_power_sum(&derivative(f, 1), r, 1.0)?;
        let lipschitz = d1.upper.scale(r * PI / CIRCLE_SAMPLES as f64);
        let sampled = LogScalar::from_f64(hi).mul(scale).add(lipschitz);
        let upper = sampled.min(abs.upper).max(lower);
        Ok(BoundedValue::new(lower.min(abs.upper), upper))
    }

    /// `sup_{|z| ≤ m} |f(z)|`.
    pub fn sup_norm(&self, f: &EntireFunction, m: f64) -> Result<BoundedValue> {
        self.circle_max(f, m)
    }
}

/// A series prepared on one circle, scaled by `exp(ln_scale)`.
pub struct CircleSeries {
    radius: f64,
    ln_scale: f64,
    /// `(n, a_n e^{iφ_n})` with `Σ a_n ≤ 1`, increasing in `n`.
    terms: Vec<(u64, Complex64)>,
    base_err: f64,
    weighted_n: f64,
}

fn bit_len(d: u64) -> f64 {
    (64 - d.leading_zeros()) as f64
}

fn pow_u64(w: Complex64, mut d: u64) -> Complex64 {
    let mut base = w;
    let mut acc = Complex64::new(1.0, 0.0);
    while d > 0 {
        if d & 1 == 1 {
            acc *= base;
        }
        base *= base;
        d >>= 1;
    }
    acc
}

impl CircleSeries {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Values are reported divided by `exp(ln_scale)`.
    pub fn ln_scale(&self) -> f64 {
        self.ln_scale
    }

    /// Scaled `f(r e^{iθ})` and an absolute error bound on it.
    ///
    /// Sparse Horner in `w = e^{iθ}`; the error of `w` itself grows
    /// linearly in the power it is raised to.
    pub fn value_at(&self, theta: f64) -> (Complex64, f64) {
        let Some(&(last_n, last_b)) = self.terms.last() else {
            return (Complex64::new(0.0, 0.0), self.base_err);
        };
        let w = Complex64::cis(theta);
        let mut acc = last_b;
        let mut above = last_n;
        for &(n, b) in self.terms.iter().rev().skip(1) {
            let d = above - n;
            acc = if d == 1 { acc * w } else { acc * pow_u64(w, d) } + b;
            above = n;
        }
        if above > 0 {
            acc *= pow_u64(w, above);
        }
        let phase_err = 4.0 * f64::EPSILON * self.weighted_n * (theta.abs() + 2.0);
        (acc, self.base_err + phase_err)
    }
}

/// Real and imaginary brackets of `f(z)`, relative tolerance `tol`.
pub fn eval(f: &EntireFunction, z: Complex64, tol: f64) -> Result<(BoundedValue, BoundedValue)> {
    Evaluator::default().with_tol(tol).eval(f, z)
}

/// `sup_{|z| ≤ m} |f(z)|`, relative tolerance `tol` on the series part.
pub fn sup_norm(f: &EntireFunction, m: u64, tol: f64) -> Result<BoundedValue> {
    Evaluator::default().with_tol(tol).sup_norm(f, m as f64)
}
