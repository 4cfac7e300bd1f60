//! Orbit probes along the index sets, and the metric of `H(ℂ)`.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{combine, derivative, EntireFunction, Evaluator, Tol};
use crate::error::{Error, Result};
use crate::numerics::BoundedValue;
use crate::output::fmt_num;
use crate::schedule::GapSchedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetTag {
    A,
    B,
}

impl SetTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SetTag::A => "A",
            SetTag::B => "B",
        }
    }
}

/// One probe row. `A` rows hold a bracket on `sup_{|z|≤m} |D^j f|`;
/// `B` rows hold `|f^{(n)}(0)|` (lower = upper).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub index: u64,
    pub set: SetTag,
    pub value_lower: f64,
    pub value_upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub m: u64,
    pub level: usize,
    pub records: Vec<ProbeRecord>,
}

impl ProbeReport {
    pub fn decay_records(&self) -> impl Iterator<Item = &ProbeRecord> {
        self.records.iter().filter(|r| r.set == SetTag::A)
    }

    pub fn growth_records(&self) -> impl Iterator<Item = &ProbeRecord> {
        self.records.iter().filter(|r| r.set == SetTag::B)
    }

    /// `index,set,value_lower,value_upper`, one row per record.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,set,value_lower,value_upper\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.index,
                r.set.as_str(),
                fmt_num(r.value_lower),
                fmt_num(r.value_upper)
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}

/// Evenly spread sample of `[lo, hi]` with both ends, at most `budget` points.
pub(crate) fn sample_block(lo: u64, hi: u64, budget: usize) -> Vec<u64> {
    let len = hi - lo + 1;
    if budget == 0 {
        return Vec::new();
    }
    if len <= budget as u64 {
        return (lo..=hi).collect();
    }
    if budget == 1 {
        return vec![lo];
    }
    let mut out: Vec<u64> = (0..budget as u64)
        .map(|i| lo + ((hi - lo) as u128 * i as u128 / (budget as u128 - 1)) as u64)
        .collect();
    out.dedup();
    out
}

/// Blocks `[α_N, α_N²]` and `[β_N, β_N²]` for `N ≤ level`, checked against the cap.
pub(crate) fn probe_blocks(
    s: &GapSchedule,
    level: usize,
    index_cap: u64,
) -> Result<Vec<((u64, u64), (u64, u64))>> {
    if level == 0 || level > s.levels() {
        return Err(Error::InvalidArgument(format!(
            "probe level {level} not in 1..={}",
            s.levels()
        )));
    }
    let mut out = Vec::with_capacity(level);
    for n in 1..=level {
        let a = &s.alphas()[n - 1];
        let b = &s.betas()[n - 1];
        let b_hi = b * b;
        let infeasible = || Error::InfeasibleLevel {
            needed: b_hi.to_string(),
            cap: index_cap,
        };
        let b_hi = b_hi.to_u64().filter(|&x| x <= index_cap).ok_or_else(infeasible)?;
        let a_lo = a.to_u64().ok_or_else(infeasible)?;
        let a_hi = (a * a).to_u64().ok_or_else(infeasible)?;
        let b_lo = b.to_u64().ok_or_else(infeasible)?;
        out.push(((a_lo, a_hi), (b_lo, b_hi)));
    }
    Ok(out)
}

/// Decay of `D^j f` on the closed disk of radius `m` for `j ∈ A`, and the
/// size of `f^{(n)}(0)` for `n ∈ B`, over the blocks of levels `1..=level`.
///
/// Each block contributes at most `budget` evenly spread indices. `m` must
/// not exceed `level`, and every probed block must lie below the index cap.
pub fn irregularity_probe(
    f: &EntireFunction,
    s: &GapSchedule,
    m: u64,
    level: usize,
    budget: usize,
) -> Result<ProbeReport> {
    irregularity_probe_with(&Evaluator::default(), f, s, m, level, budget)
}

pub fn irregularity_probe_with(
    ev: &Evaluator,
    f: &EntireFunction,
    s: &GapSchedule,
    m: u64,
    level: usize,
    budget: usize,
) -> Result<ProbeReport> {
    if m == 0 || m as usize > level {
        return Err(Error::InvalidArgument(format!(
            "probe radius m = {m} must satisfy 1 <= m <= level = {level}"
        )));
    }
    let blocks = probe_blocks(s, level, ev.index_cap)?;
    let mut records = Vec::new();
    for ((a_lo, a_hi), (b_lo, b_hi)) in blocks {
        for j in sample_block(a_lo, a_hi, budget) {
            let v = ev.sup_norm(&derivative(f, j), m as f64)?;
            let (lo, hi) = v.to_f64_pair();
            records.push(ProbeRecord {
                index: j,
                set: SetTag::A,
                value_lower: lo.max(0.0),
                value_upper: hi,
            });
        }
        for n in sample_block(b_lo, b_hi, budget) {
            let c = f.coeff(n).norm();
            records.push(ProbeRecord {
                index: n,
                set: SetTag::B,
                value_lower: c,
                value_upper: c,
            });
        }
    }
    Ok(ProbeReport {
        m,
        level,
        records,
    })
}

/// `Σ_{k=1}^{K} 2^{-k} min{1, ‖f - g‖ on the closed disk of radius k}`.
///
/// The omitted tail is at most `2^{-K}`; each summand uses the midpoint of
/// its sup-norm bracket.
pub fn frechet_distance(f: &EntireFunction, g: &EntireFunction, k_max: u32, tol: f64) -> Result<f64> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("metric truncation K must be >= 1".into()));
    }
    let diff = combine(
        &[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        &[f.clone(), g.clone()],
    )?;
    if diff.is_zero() {
        return Ok(0.0);
    }
    let ev = Evaluator {
        tol: Tol {
            rel: tol,
            abs: tol / 2.0,
        },
        ..Evaluator::default()
    };
    let mut total = 0.0;
    let mut weight = 1.0;
    for k in 1..=k_max {
        weight *= 0.5;
        let b: BoundedValue = ev.sup_norm(&diff, k as f64)?;
        let norm = if b.lower.to_f64() >= 1.0 {
            1.0
        } else {
            b.midpoint().to_f64().min(1.0)
        };
        total += weight * norm;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entire::{build_irregular, OmegaSpec};
    use crate::schedule::compute_schedule;

    #[test]
    fn sampling_keeps_ends() {
        assert_eq!(sample_block(10, 14, 10), vec![10, 11, 12, 13, 14]);
        let s = sample_block(201, 40401, 5);
        assert_eq!(s.first(), Some(&201));
        assert_eq!(s.last(), Some(&40401));
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn level_one_probe() {
        let s = compute_schedule(1).unwrap();
        let f = build_irregular(OmegaSpec::Power(0.1), &s).unwrap();
        let r = irregularity_probe(&f, &s, 1, 1, 16).unwrap();
        assert!(r.decay_records().all(|x| x.value_upper < 1.0));
        let first_b = r.growth_records().next().unwrap();
        assert_eq!(first_b.index, 201);
        assert_eq!(first_b.value_upper, 201f64.powf(0.1));
    }

    #[test]
    fn polynomial_probe_decays_to_zero() {
        let s = compute_schedule(1).unwrap();
        let p = EntireFunction::polynomial(vec![Complex64::new(1.0, 0.0); 20]);
        let r = irregularity_probe(&p, &s, 1, 1, 200).unwrap();
        assert!(r
            .decay_records()
            .filter(|x| x.index >= 20)
            .all(|x| x.value_upper == 0.0));
        assert!(r.growth_records().all(|x| x.value_upper == 0.0));
    }

    #[test]
    fn probe_rejects_bad_levels() {
        let s = compute_schedule(2).unwrap();
        let f = build_irregular(OmegaSpec::Power(0.1), &s).unwrap();
        assert!(matches!(
            irregularity_probe(&f, &s, 1, 2, 4),
            Err(Error::InfeasibleLevel { .. })
        ));
        assert!(irregularity_probe(&f, &s, 2, 1, 4).is_err());
        assert!(irregularity_probe(&f, &s, 1, 3, 4).is_err());
    }

    #[test]
    fn metric_examples() {
        let z = EntireFunction::monomial(1);
        let zero = EntireFunction::zero();
        assert_eq!(frechet_distance(&z, &z, 20, 1e-10).unwrap(), 0.0);
        let d = frechet_distance(&z, &zero, 20, 1e-10).unwrap();
        assert!((d - 1.0).abs() <= 2f64.powi(-20) + 1e-12);
    }
}
