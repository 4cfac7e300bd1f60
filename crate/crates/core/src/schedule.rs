//! The gap schedule `α_N`, `β_N`, the index sets built from it, and exact
//! prefix densities.
//!
//! `α_N` is the least integer above `β_{N-1}²` whose tail
//! `Σ_{n ≥ α_N} n^{1+n/2} N^n / n!` is certified below `1/N`, and
//! `β_N = 2α_N² + 1`. Indices outgrow `u64` at the third level, so they are
//! kept as [`BigUint`].

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::numerics::{bounded_sum, BoundedValue, LogScalar, RatioCertificate};
use crate::numerics::{ln_factorial, ln_factorial_real};

/// Above this, rounding in `ln t_n` swamps the change between consecutive
/// ratios and the term-by-term scan is replaced by the closed-form tail.
const STREAM_LIMIT: u64 = 1 << 20;

/// Candidates tried past `β_{N-1}² + 1` before giving up.
pub const DEFAULT_SCAN_BUDGET: u64 = 1_000_000;

/// `ln t_n` for `t_n = n^{1+n/2} N^n / n!`, `n` real.
fn ln_tail_term(level: u64, n: f64) -> f64 {
    let lf = if n < 64.0 {
        ln_factorial(n as u64)
    } else {
        ln_factorial_real(n)
    };
    (1.0 + 0.5 * n) * n.ln() + n * (level as f64).ln() - lf
}

/// `ln(t_{n+1}/t_n)`, written to stay accurate for huge `n`.
fn ln_tail_ratio(level: u64, n: f64) -> f64 {
    0.5 * n * (1.0 / n).ln_1p() + 0.5 * (n + 1.0).ln() - n.ln() + (level as f64).ln()
}

/// First index from which the tail terms provably decrease with ratio ≤ 1/2.
fn decreasing_from(level: u64) -> u64 {
    let n = level as f64;
    (4.0 * n * n * std::f64::consts::E * std::f64::consts::E).ceil() as u64
}

/// Rigorous bracket on `Σ_{n ≥ k} n^{1+n/2} N^n / n!` with `N = level`.
pub fn tail_sum(level: u64, k: &BigUint) -> Result<BoundedValue> {
    if level == 0 || k.is_zero() {
        return Err(Error::InvalidArgument(format!(
            "tail_sum needs level >= 1 and k >= 1 (got {level}, {k})"
        )));
    }
    match k.to_u64() {
        Some(k) if k < STREAM_LIMIT => tail_sum_stream(level, k),
        _ => tail_sum_far(level, k),
    }
}

fn tail_sum_stream(level: u64, k: u64) -> Result<BoundedValue> {
    let start = decreasing_from(level).saturating_sub(k) as usize;
    let cert = RatioCertificate::default().with_start(start);
    let terms = (k..).map(|n| LogScalar::from_ln(ln_tail_term(level, n as f64)));
    bounded_sum(terms, &cert)
}

/// Far indices: one term and the ratio at `k` bound the whole tail, since the
/// ratio decreases in `n`. `k` is rounded outward to neighbouring floats.
fn tail_sum_far(level: u64, k: &BigUint) -> Result<BoundedValue> {
    let out_of_range = || Error::IndexOutOfRange {
        index: k.to_string(),
    };
    let near = k.to_f64().filter(|x| x.is_finite()).ok_or_else(out_of_range)?;
    let exact = BigUint::from_f64(near).ok_or_else(out_of_range)?;
    let (down, up) = match exact.cmp(k) {
        std::cmp::Ordering::Greater => (near.next_down(), near),
        std::cmp::Ordering::Less => (near, near.next_up()),
        std::cmp::Ordering::Equal => (near, near),
    };
    let rho = ln_tail_ratio(level, down).exp();
    if !(rho < 1.0) || (down as u64) < decreasing_from(level) {
        return Err(Error::NoDecay { scanned: 0 });
    }
    let hi = ln_tail_term(level, down);
    let lo = ln_tail_term(level, up);
    // log values here are ~1e20; pad for their rounding
    let pad = |x: f64| x.abs() * 1e-13;
    let upper = LogScalar::from_ln(hi + pad(hi) - (-rho).ln_1p());
    let lower = LogScalar::from_ln(lo - pad(lo));
    Ok(BoundedValue::new(lower, upper))
}

fn below_reciprocal(level: u64, v: &BoundedValue) -> bool {
    let bound = LogScalar::from_f64((1.0 / level as f64).next_down());
    v.upper < bound
}

/// The recursively chosen sequences `α_N`, `β_N` with their certified tails.
#[derive(Clone, Debug, PartialEq)]
pub struct GapSchedule {
    alphas: Vec<BigUint>,
    betas: Vec<BigUint>,
    tails: Vec<BoundedValue>,
}

impl GapSchedule {
    pub fn empty() -> Self {
        GapSchedule {
            alphas: Vec::new(),
            betas: Vec::new(),
            tails: Vec::new(),
        }
    }

    /// Assembles a schedule from explicit values, checking the chain
    /// `α_N < 2α_N² < β_N < β_N² < α_{N+1}` and the tail condition.
    pub fn from_parts(alphas: Vec<BigUint>, betas: Vec<BigUint>) -> Result<Self> {
        if alphas.len() != betas.len() {
            return Err(Error::InvalidArgument(format!(
                "{} alphas but {} betas",
                alphas.len(),
                betas.len()
            )));
        }
        let mut tails = Vec::with_capacity(alphas.len());
        for (i, a) in alphas.iter().enumerate() {
            let level = i as u64 + 1;
            let t = tail_sum(level, a)?;
            if !below_reciprocal(level, &t) {
                return Err(Error::InvalidArgument(format!(
                    "tail at alpha_{level} = {a} is not below 1/{level}"
                )));
            }
            tails.push(t);
        }
        let s = GapSchedule {
            alphas,
            betas,
            tails,
        };
        s.check_chain()?;
        Ok(s)
    }

    pub fn levels(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[BigUint] {
        &self.alphas
    }

    pub fn betas(&self) -> &[BigUint] {
        &self.betas
    }

    /// Certified tail brackets, one per level.
    pub fn tails(&self) -> &[BoundedValue] {
        &self.tails
    }

    /// `α_N` (1-based) as `u64`, if it fits.
    pub fn alpha_u64(&self, level: usize) -> Option<u64> {
        self.alphas.get(level.checked_sub(1)?)?.to_u64()
    }

    pub fn beta_u64(&self, level: usize) -> Option<u64> {
        self.betas.get(level.checked_sub(1)?)?.to_u64()
    }

    /// Checks `α_N < 2α_N² < β_N < β_N² < α_{N+1}` for all levels.
    pub fn check_chain(&self) -> Result<()> {
        let two = BigUint::from(2u32);
        let mut prev: Option<BigUint> = None;
        for (i, (a, b)) in self.alphas.iter().zip(&self.betas).enumerate() {
            let a2 = a * a;
            let chain = [prev.clone().unwrap_or_default(), a.clone(), &two * &a2, b.clone(), b * b];
            let ok = chain.windows(2).enumerate().all(|(j, w)| {
                // the leading link is vacuous on the first level
                (j == 0 && prev.is_none()) || w[0] < w[1]
            });
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "gap chain broken at level {}",
                    i + 1
                )));
            }
            prev = Some(b * b);
        }
        Ok(())
    }

    /// `(A, B)` with `A = ⋃ [α_N, α_N²]` and `B = ⋃ [β_N, β_N²]`.
    pub fn index_sets(&self) -> (IndexSet, IndexSet) {
        let a = self.alphas.iter().map(|x| (x.clone(), x * x)).collect();
        let b = self.betas.iter().map(|x| (x.clone(), x * x)).collect();
        (
            IndexSet::new(a).expect("chain keeps A ordered"),
            IndexSet::new(b).expect("chain keeps B ordered"),
        )
    }

    /// JSON form: `{"levels", "alphas", "betas", "tails": [{"lower","upper"}]}`.
    pub fn to_json(&self) -> Value {
        let big = |x: &BigUint| Value::Number(x.to_string().parse().expect("integer literal"));
        let tails: Vec<Value> = self
            .tails
            .iter()
            .map(|t| {
                let (lo, hi) = t.to_f64_pair();
                json!({"lower": lo, "upper": hi})
            })
            .collect();
        let mut m = Map::new();
        m.insert("levels".into(), json!(self.levels()));
        m.insert("alphas".into(), Value::Array(self.alphas.iter().map(big).collect()));
        m.insert("betas".into(), Value::Array(self.betas.iter().map(big).collect()));
        m.insert("tails".into(), Value::Array(tails));
        Value::Object(m)
    }

    /// Reads the JSON form back, recomputing and re-checking the tails.
    pub fn from_json(v: &Value) -> Result<Self> {
        let list = |key: &str| -> Result<Vec<BigUint>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidArgument(format!("schedule JSON lacks `{key}`")))?
                .iter()
                .map(|x| {
                    x.to_string()
                        .parse::<BigUint>()
                        .map_err(|e| Error::InvalidArgument(format!("bad index {x}: {e}")))
                })
                .collect()
        };
        Self::from_parts(list("alphas")?, list("betas")?)
    }
}

/// Tuning for [`compute_schedule_with`].
#[derive(Clone, Copy, Debug)]
pub struct ScheduleConfig {
    pub scan_budget: u64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            scan_budget: DEFAULT_SCAN_BUDGET,
        }
    }
}

/// Minimal schedule with `levels` levels.
pub fn compute_schedule(levels: usize) -> Result<GapSchedule> {
    compute_schedule_with(levels, &ScheduleConfig::default())
}

pub fn compute_schedule_with(levels: usize, cfg: &ScheduleConfig) -> Result<GapSchedule> {
    let mut s = GapSchedule::empty();
    let mut floor = BigUint::zero(); // β_{N-1}²
    for i in 0..levels {
        let level = i as u64 + 1;
        let start = &floor + 1u32;
        let mut k = start.clone();
        let mut tried = 0u64;
        let tail = loop {
            let t = tail_sum(level, &k)?;
            if below_reciprocal(level, &t) {
                break t;
            }
            tried += 1;
            if tried > cfg.scan_budget {
                return Err(Error::ScanBudgetExceeded {
                    level,
                    budget: cfg.scan_budget,
                });
            }
            k += 1u32;
        };
        let beta = BigUint::from(2u32) * &k * &k + 1u32;
        floor = &beta * &beta;
        s.alphas.push(k);
        s.betas.push(beta);
        s.tails.push(tail);
    }
    debug_assert!(s.check_chain().is_ok());
    Ok(s)
}

/// A finite union of disjoint, increasing closed integer intervals.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IndexSet {
    intervals: Vec<(BigUint, BigUint)>,
}

impl IndexSet {
    pub fn new(intervals: Vec<(BigUint, BigUint)>) -> Result<Self> {
        for (lo, hi) in &intervals {
            if lo > hi {
                return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
            }
        }
        for w in intervals.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(Error::InvalidArgument(
                    "intervals must be disjoint and increasing".into(),
                ));
            }
        }
        Ok(IndexSet { intervals })
    }

    pub fn from_u64(intervals: &[(u64, u64)]) -> Result<Self> {
        Self::new(
            intervals
                .iter()
                .map(|&(a, b)| (BigUint::from(a), BigUint::from(b)))
                .collect(),
        )
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn intervals(&self) -> &[(BigUint, BigUint)] {
        &self.intervals
    }

    pub fn contains(&self, n: &BigUint) -> bool {
        let i = self.intervals.partition_point(|(_, hi)| hi < n);
        self.intervals.get(i).is_some_and(|(lo, _)| lo <= n)
    }

    /// `card(S ∩ [1, n])`.
    pub fn count_upto(&self, n: &BigUint) -> BigUint {
        let one = BigUint::one();
        let mut total = BigUint::zero();
        for (lo, hi) in &self.intervals {
            let lo = lo.max(&one);
            let hi = hi.min(n);
            if lo > hi {
                if lo > n {
                    break;
                }
                continue;
            }
            total += hi - lo + 1u32;
        }
        total
    }

    pub fn intersects(&self, other: &IndexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a0, a1) = &self.intervals[i];
            let (b0, b1) = &other.intervals[j];
            if a1 < b0 {
                i += 1;
            } else if b1 < a0 {
                j += 1;
            } else {
                return true;
            }
        }
        false
    }

    /// The runs as `u64`, clipped to `u64::MAX`; runs starting beyond are dropped.
    pub fn runs_u64(&self) -> Vec<(u64, u64)> {
        self.intervals
            .iter()
            .filter_map(|(lo, hi)| {
                let lo = lo.to_u64()?;
                Some((lo, hi.to_u64().unwrap_or(u64::MAX)))
            })
            .collect()
    }

    /// Right endpoints of the intervals, the natural density checkpoints.
    pub fn default_checkpoints(&self) -> Vec<BigUint> {
        self.intervals.iter().map(|(_, hi)| hi.clone()).collect()
    }
}

/// `card(S ∩ [1, n]) / n`, exact.
pub fn prefix_density(s: &IndexSet, n: &BigUint) -> Result<BigRational> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("prefix_density needs n >= 1".into()));
    }
    Ok(BigRational::new(
        BigInt::from(s.count_upto(n)),
        BigInt::from(n.clone()),
    ))
}

/// Largest prefix density over the checkpoints.
pub fn upper_density_estimate(s: &IndexSet, checkpoints: &[BigUint]) -> Result<f64> {
    if checkpoints.is_empty() {
        return Err(Error::InvalidArgument("no density checkpoints".into()));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("checkpoints must increase".into()));
    }
    let mut best = BigRational::zero();
    for c in checkpoints {
        let d = prefix_density(s, c)?;
        if d > best {
            best = d;
        }
    }
    Ok(best.to_f64().unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn first_terms_bound_tail_from_below() {
        let t = tail_sum(1, &big(1)).unwrap();
        assert!(t.lower >= LogScalar::ONE);
        let t = tail_sum(1, &big(3)).unwrap();
        let n3 = 3f64.powf(2.5) / 6.0;
        assert!(t.lower.to_f64() >= n3 && n3 > 2.0);
    }

    #[test]
    fn tail_rejects_zero_arguments() {
        assert!(tail_sum(0, &big(3)).is_err());
        assert!(tail_sum(1, &big(0)).is_err());
    }

    #[test]
    fn far_tail_is_consistent_with_stream_near_the_switch() {
        // both paths at the same index must overlap
        let k = big(STREAM_LIMIT - 1);
        let s = tail_sum(2, &k).unwrap();
        let f = tail_sum_far(2, &k).unwrap();
        assert!(s.lower <= f.upper && f.lower <= s.upper);
    }

    #[test]
    fn empty_schedule() {
        let s = compute_schedule(0).unwrap();
        assert_eq!(s.levels(), 0);
        let (a, b) = s.index_sets();
        assert!(a.is_empty() && b.is_empty());
        assert_eq!(
            s.to_json().to_string(),
            r#"{"levels":0,"alphas":[],"betas":[],"tails":[]}"#
        );
    }

    #[test]
    fn first_level_values() {
        let s = compute_schedule(1).unwrap();
        assert_eq!(s.alpha_u64(1), Some(10));
        assert_eq!(s.beta_u64(1), Some(201));
    }

    #[test]
    fn index_sets_shape() {
        let s = GapSchedule::from_parts(vec![big(10)], vec![big(201)]).unwrap();
        let (a, b) = s.index_sets();
        assert_eq!(a.intervals(), &[(big(10), big(100))]);
        assert_eq!(b.intervals(), &[(big(201), big(40401))]);
        assert!(!a.intersects(&b));
    }

    #[test]
    fn from_parts_rejects_broken_chain() {
        // β not above 2α²
        assert!(GapSchedule::from_parts(vec![big(10)], vec![big(200)]).is_err());
        // tail condition fails at α = 9
        assert!(GapSchedule::from_parts(vec![big(9)], vec![big(200)]).is_err());
    }

    #[test]
    fn density_examples() {
        let all = IndexSet::from_u64(&[(1, 1_000_000)]).unwrap();
        assert_eq!(prefix_density(&all, &big(100)).unwrap(), BigRational::one());
        let evens: Vec<(u64, u64)> = (1..=5).map(|k| (2 * k, 2 * k)).collect();
        let evens = IndexSet::from_u64(&evens).unwrap();
        assert_eq!(
            prefix_density(&evens, &big(10)).unwrap(),
            BigRational::new(1.into(), 2.into())
        );
        let five = IndexSet::from_u64(&[(5, 5)]).unwrap();
        assert_eq!(upper_density_estimate(&five, &[big(5)]).unwrap(), 0.2);
        assert!(prefix_density(&five, &big(0)).is_err());
    }

    #[test]
    fn index_set_validation() {
        assert!(IndexSet::from_u64(&[(3, 2)]).is_err());
        assert!(IndexSet::from_u64(&[(1, 5), (5, 7)]).is_err());
        let s = IndexSet::from_u64(&[(1, 5), (7, 9)]).unwrap();
        assert!(s.contains(&big(7)) && !s.contains(&big(6)) && !s.contains(&big(10)));
        assert_eq!(s.count_upto(&big(8)), big(7));
    }

    #[test]
    fn json_round_trip_keeps_big_indices() {
        let s = compute_schedule(3).unwrap();
        let text = s.to_json().to_string();
        assert!(text.contains(&s.betas()[2].to_string()));
        let back = GapSchedule::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.alphas(), s.alphas());
        assert_eq!(back.betas(), s.betas());
    }
}
