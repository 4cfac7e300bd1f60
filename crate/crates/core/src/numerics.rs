//! Extended-range arithmetic and tail-bounded summation.
//!
//! Magnitudes such as `n^(1+n/2) N^n / n!` leave the `f64` range long before
//! the indices this crate works with, so everything that can grow is carried
//! as a [`LogScalar`]: a sign plus the natural log of the absolute value.
//! Truncated series are reported as a [`BoundedValue`] bracket.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative bracket tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

const LN_2PI_HALF: f64 = 0.918_938_533_204_672_8; // ln(2π)/2

/// Sign of a [`LogScalar`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn as_f64(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Zero => 0.0,
            Sign::Positive => 1.0,
        }
    }

    fn mul(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }

    fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// A signed real stored as `sign · exp(log_mag)`.
///
/// `log_mag` is meaningless when the sign is [`Sign::Zero`] and is normalised
/// to `-inf` in that case so derived `PartialEq` behaves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogScalar {
    sign: Sign,
    log_mag: f64,
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar {
        sign: Sign::Zero,
        log_mag: f64::NEG_INFINITY,
    };
    pub const ONE: LogScalar = LogScalar {
        sign: Sign::Positive,
        log_mag: 0.0,
    };

    /// Builds `sign · exp(log_mag)`. A `-inf` magnitude collapses to zero.
    pub fn new(sign: Sign, log_mag: f64) -> Self {
        if sign == Sign::Zero || log_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            debug_assert!(!log_mag.is_nan(), "NaN log magnitude");
            LogScalar { sign, log_mag }
        }
    }

    /// Positive value `exp(log_mag)`.
    pub fn from_ln(log_mag: f64) -> Self {
        Self::new(Sign::Positive, log_mag)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            Self::from_ln(x.ln())
        } else {
            Self::new(Sign::Negative, (-x).ln())
        }
    }

    /// Nearest `f64`; saturates to `±inf` and underflows to `±0`.
    pub fn to_f64(self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            s => s.as_f64() * self.log_mag.exp(),
        }
    }

    /// `f64` rounded away from zero: a nonzero value never becomes zero.
    pub fn to_f64_outward(self) -> f64 {
        let x = self.to_f64();
        if self.sign != Sign::Zero && x == 0.0 {
            self.sign.as_f64() * f64::from_bits(1)
        } else if self.sign == Sign::Zero {
            0.0
        } else {
            let bumped = x.abs() * (1.0 + 4.0 * f64::EPSILON);
            self.sign.as_f64() * bumped.max(x.abs())
        }
    }

    /// `f64` rounded toward zero.
    pub fn to_f64_inward(self) -> f64 {
        let x = self.to_f64();
        if !x.is_finite() {
            return self.sign.as_f64() * f64::MAX;
        }
        self.sign.as_f64() * x.abs() * (1.0 - 4.0 * f64::EPSILON)
    }

    pub fn sign(self) -> Sign {
        self.sign
    }

    pub fn log_mag(self) -> f64 {
        self.log_mag
    }

    pub fn is_zero(self) -> bool {
        self.sign == Sign::Zero
    }

    pub fn abs(self) -> Self {
        match self.sign {
            Sign::Zero => Self::ZERO,
            _ => Self::from_ln(self.log_mag),
        }
    }

    pub fn neg(self) -> Self {
        Self::new(self.sign.flip(), self.log_mag)
    }

    pub fn mul(self, other: Self) -> Self {
        Self::new(self.sign.mul(other.sign), self.log_mag + other.log_mag)
    }

    /// Panics on division by zero.
    pub fn div(self, other: Self) -> Self {
        assert!(!other.is_zero(), "LogScalar division by zero");
        Self::new(self.sign.mul(other.sign), self.log_mag - other.log_mag)
    }

    /// Multiplies by a plain real.
    pub fn scale(self, k: f64) -> Self {
        self.mul(Self::from_f64(k))
    }

    /// `|x|^e` for a nonnegative value.
    pub fn powf(self, e: f64) -> Self {
        assert!(self.sign != Sign::Negative, "powf of a negative LogScalar");
        if self.is_zero() {
            if e == 0.0 {
                Self::ONE
            } else {
                Self::ZERO
            }
        } else {
            Self::from_ln(self.log_mag * e)
        }
    }

    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.log_mag >= other.log_mag {
            (self, other)
        } else {
            (other, self)
        };
        let d = (small.log_mag - big.log_mag).exp();
        if big.sign == small.sign {
            Self::new(big.sign, big.log_mag + d.ln_1p())
        } else if d >= 1.0 {
            Self::ZERO
        } else {
            Self::new(big.sign, big.log_mag + (-d).ln_1p())
        }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use Sign::*;
        match (self.sign, other.sign) {
            (a, b) if a != b => Some(a.cmp(&b)),
            (Zero, Zero) => Some(Ordering::Equal),
            (Positive, Positive) => self.log_mag.partial_cmp(&other.log_mag),
            _ => other.log_mag.partial_cmp(&self.log_mag),
        }
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "0"),
            s => {
                let x = self.to_f64();
                if x.is_finite() && x != 0.0 {
                    write!(f, "{x:e}")
                } else {
                    let sign = if s == Sign::Negative { "-" } else { "" };
                    write!(f, "{sign}exp({})", self.log_mag)
                }
            }
        }
    }
}

/// A bracket `[lower, upper]` known to contain some real quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedValue {
    pub lower: LogScalar,
    pub upper: LogScalar,
}

impl BoundedValue {
    /// Panics if `lower > upper`.
    pub fn new(lower: LogScalar, upper: LogScalar) -> Self {
        assert!(lower <= upper, "bracket inverted: {lower} > {upper}");
        BoundedValue { lower, upper }
    }

    pub fn exact(x: LogScalar) -> Self {
        BoundedValue { lower: x, upper: x }
    }

    pub fn zero() -> Self {
        Self::exact(LogScalar::ZERO)
    }

    /// `[center - radius, center + radius]`.
    pub fn around(center: LogScalar, radius: LogScalar) -> Self {
        let r = radius.abs();
        Self::new(center.sub(r), center.add(r))
    }

    pub fn contains(&self, x: LogScalar) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.contains(LogScalar::from_f64(x))
    }

    pub fn width(&self) -> LogScalar {
        self.upper.sub(self.lower)
    }

    /// Width over `|lower|`; `0` for an exact zero, `inf` when only the lower end is zero.
    pub fn relative_width(&self) -> f64 {
        let w = self.width();
        if w.is_zero() {
            0.0
        } else if self.lower.is_zero() {
            f64::INFINITY
        } else {
            w.div(self.lower.abs()).to_f64()
        }
    }

    pub fn midpoint(&self) -> LogScalar {
        self.lower.add(self.upper).scale(0.5)
    }

    /// Bracket of `x^e` for a nonnegative bracket and `e > 0`.
    pub fn powf(&self, e: f64) -> Self {
        assert!(e > 0.0);
        Self::new(
            self.lower.max(LogScalar::ZERO).powf(e),
            self.upper.max(LogScalar::ZERO).powf(e),
        )
    }

    /// Multiplies both ends by a positive factor.
    pub fn scale_pos(&self, k: LogScalar) -> Self {
        assert!(k.sign() != Sign::Negative);
        Self::new(self.lower.mul(k), self.upper.mul(k))
    }

    /// `lower` and `upper` as outward-rounded `f64`.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.lower.to_f64_inward().min(self.lower.to_f64()), self.upper.to_f64_outward())
    }
}

/// `ln(n!)`.
///
/// Exact accumulation of `ln k` below 64, Stirling series with four
/// correction terms above (truncation error below `1/(1188 n^9)`).
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n < 64 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    ln_factorial_real(n as f64)
}

/// Stirling series for `ln Γ(x + 1)`; accurate for `x ≥ 64`.
pub fn ln_factorial_real(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    x * x.ln() - x + 0.5 * x.ln() + LN_2PI_HALF + series
}

/// `n!` as a [`LogScalar`].
pub fn log_factorial(n: u64) -> LogScalar {
    LogScalar::from_ln(ln_factorial(n))
}

/// Streaming log-sum-exp accumulator with compensated summation under a
/// running maximum.
#[derive(Clone, Debug)]
pub struct LogSum {
    max: f64,
    sum: f64,
    comp: f64,
    count: usize,
}

impl Default for LogSum {
    fn default() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            sum: 0.0,
            comp: 0.0,
            count: 0,
        }
    }
}

impl LogSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `exp(log_term)`.
    pub fn push_ln(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        self.count += 1;
        if log_term > self.max {
            let rescale = (self.max - log_term).exp();
            self.sum *= rescale;
            self.comp *= rescale;
            self.max = log_term;
        }
        let x = (log_term - self.max).exp();
        // Neumaier
        let t = self.sum + x;
        if self.sum.abs() >= x {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn push(&mut self, term: LogScalar) {
        assert!(term.sign() != Sign::Negative, "LogSum accepts nonnegative terms");
        self.push_ln(term.log_mag());
    }

    pub fn ln(&self) -> f64 {
        if self.count == 0 {
            f64::NEG_INFINITY
        } else {
            self.max + (self.sum + self.comp).ln()
        }
    }

    pub fn value(&self) -> LogScalar {
        LogScalar::from_ln(self.ln())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Relative rounding bound for the accumulated value.
    pub fn rounding_bound(&self) -> f64 {
        if self.count <= 1 {
            return 0.0;
        }
        4.0 * (self.count as f64 + 2.0) * f64::EPSILON
    }
}

/// Geometric remainder `first / (1 - rho)` for a nonnegative stream whose
/// consecutive ratios stay at or below `rho < 1`.
pub fn geometric_tail(first: LogScalar, rho: f64) -> LogScalar {
    assert!((0.0..1.0).contains(&rho), "geometric ratio {rho} not in [0, 1)");
    if first.is_zero() {
        return LogScalar::ZERO;
    }
    first.abs().mul(LogScalar::from_ln(-(-rho).ln_1p()))
}

/// Parameters of the ratio-certificate protocol used by [`bounded_sum`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioCertificate {
    /// Stream offset from which ratios count toward the window.
    pub start: usize,
    /// Ratio bound `ρ < 1`.
    pub rho: f64,
    /// Consecutive ratios `≤ ρ`, non-increasing, required before the
    /// geometric remainder is trusted.
    pub window: usize,
    /// Terms scanned looking for the window before giving up with `NoDecay`.
    pub scan_budget: usize,
    /// Terms summed before giving up with `ToleranceUnreachable`.
    pub term_budget: usize,
    /// Requested relative width of the bracket.
    pub tol: f64,
}

impl Default for RatioCertificate {
    fn default() -> Self {
        RatioCertificate {
            start: 0,
            rho: 0.5,
            window: 16,
            scan_budget: 1 << 22,
            term_budget: 1 << 24,
            tol: DEFAULT_TOL,
        }
    }
}

impl RatioCertificate {
    pub fn with_start(mut self, start: usize) -> Self {
        self.start = start;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

fn ratio(prev: LogScalar, next: LogScalar) -> f64 {
    match (prev.is_zero(), next.is_zero()) {
        (_, true) => 0.0,
        (true, false) => f64::INFINITY,
        _ => (next.log_mag() - prev.log_mag()).exp(),
    }
}

/// Sums a stream of terms and brackets the infinite remainder.
///
/// The stream is scanned until `window` consecutive ratios `|t_{n+1}/t_n|`
/// are at most `ρ` and non-increasing. From then on the remainder after the
/// last summed term `t_{n₁}` is bounded by `|t_{n₁+1}| / (1 - ρ)`, and
/// summation continues until that bound is within `tol` of the partial sum.
/// Terms are accumulated in index order. Negative terms are allowed; the
/// remainder then widens both ends of the bracket.
pub fn bounded_sum<I>(terms: I, cert: &RatioCertificate) -> Result<BoundedValue>
where
    I: IntoIterator<Item = LogScalar>,
{
    assert!(cert.rho > 0.0 && cert.rho < 1.0);
    let mut it = terms.into_iter().enumerate();
    let mut pos = LogSum::new();
    let mut neg = LogSum::new();
    let mut prev_ratio = f64::INFINITY;
    let mut streak = 0usize;

    let Some((_, first)) = it.next() else {
        return Ok(BoundedValue::zero());
    };
    let mut current = first;
    loop {
        match current.sign() {
            Sign::Positive => pos.push(current),
            Sign::Negative => neg.push(current.abs()),
            Sign::Zero => {}
        }
        let Some((idx, next)) = it.next() else {
            // finite stream: exact up to rounding
            return Ok(finish(&pos, &neg, LogScalar::ZERO));
        };
        let r = ratio(current, next);
        if idx > cert.start {
            if r <= cert.rho && r <= prev_ratio {
                streak += 1;
            } else {
                streak = 0;
            }
            prev_ratio = r;
        }
        if streak >= cert.window {
            let remainder = geometric_tail(next, cert.rho);
            let partial = pos.value().sub(neg.value()).abs();
            if remainder.is_zero()
                || (!partial.is_zero() && remainder.div(partial).to_f64() <= cert.tol)
            {
                return Ok(finish(&pos, &neg, remainder));
            }
            if idx >= cert.term_budget {
                return Err(Error::ToleranceUnreachable {
                    what: "bounded_sum",
                    terms: idx,
                });
            }
        } else if idx >= cert.scan_budget {
            return Err(Error::NoDecay { scanned: idx });
        }
        current = next;
    }
}

fn finish(pos: &LogSum, neg: &LogSum, remainder: LogScalar) -> BoundedValue {
    let p = pos.value();
    let n = neg.value();
    let round = p
        .scale(pos.rounding_bound())
        .add(n.scale(neg.rounding_bound()));
    let value = p.sub(n);
    let lower_slack = if neg.count() == 0 { round } else { round.add(remainder) };
    let mut lower = value.sub(lower_slack);
    if neg.count() == 0 {
        lower = lower.max(LogScalar::ZERO);
    }
    BoundedValue::new(lower, value.add(round).add(remainder))
}
