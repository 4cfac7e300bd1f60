//! Linear combinations of the log family `f_t` and their coefficient growth.

use num_complex::Complex64;
use serde::Serialize;

use super::probe::{probe_blocks, sample_block};
use super::{build_log_family, combine, EntireFunction};
use crate::error::{Error, Result};
use crate::schedule::GapSchedule;

/// `Σ w_k f_{t_k}` over a schedule.
pub fn log_family_combination(weights: &[f64], ts: &[f64], s: &GapSchedule) -> Result<EntireFunction> {
    if weights.len() != ts.len() {
        return Err(Error::LengthMismatch {
            weights: weights.len(),
            parts: ts.len(),
        });
    }
    let parts = ts
        .iter()
        .map(|&t| build_log_family(t, s))
        .collect::<Result<Vec<_>>>()?;
    let w: Vec<Complex64> = weights.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    combine(&w, &parts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthCheck {
    /// Index of the dominant part: largest `t` among nonzero weights.
    pub dominant_t: f64,
    pub dominant_weight: f64,
    /// From here on the other parts cannot cancel more than half the dominant one.
    pub threshold: u64,
    pub samples: usize,
    pub failures: Vec<u64>,
}

impl GrowthCheck {
    pub fn passed(&self) -> bool {
        self.samples > 0 && self.failures.is_empty()
    }
}

/// Smallest `L ≥ 1` with `Σ_{k≠*} |w_k| L^{t_k − t*} ≤ |w*| / 2`.
fn dominance_log(others: &[(f64, f64)], w_star: f64, t_star: f64) -> f64 {
    let excess = |l: f64| -> f64 {
        others.iter().map(|(w, t)| w.abs() * l.powf(t - t_star)).sum::<f64>() - 0.5 * w_star.abs()
    };
    if excess(1.0) <= 0.0 {
        return 1.0;
    }
    let mut hi = 2.0;
    while excess(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Checks `|F^{(n)}(0)| ≥ ½ |w*| (ln(n+1))^{t*}` for `F = Σ w_k f_{t_k}` on
/// sampled `B` indices of levels `1..=level` above the dominance threshold.
pub fn combination_growth_check(
    weights: &[f64],
    ts: &[f64],
    s: &GapSchedule,
    level: usize,
    budget: usize,
    index_cap: u64,
) -> Result<GrowthCheck> {
    let f = log_family_combination(weights, ts, s)?;
    let mut pairs: Vec<(f64, f64)> = weights.iter().copied().zip(ts.iter().copied()).filter(|(w, _)| *w != 0.0).collect();
    // equal t values merge into one part
    pairs.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (w, t) in pairs {
        match merged.last_mut() {
            Some(last) if last.1 == t => last.0 += w,
            _ => merged.push((w, t)),
        }
    }
    merged.retain(|(w, _)| *w != 0.0);
    let Some(&(w_star, t_star)) = merged.last() else {
        return Err(Error::InvalidArgument("combination has no nonzero part".into()));
    };
    let others = &merged[..merged.len() - 1];
    let l = dominance_log(others, w_star, t_star);
    // L^{t} ≤ n keeps every part on its logarithmic branch; n ≥ 3 suffices for t ≤ 2
    let threshold = ((l.exp() - 1.0).ceil() as u64).max(3);
    let mut samples = 0;
    let mut failures = Vec::new();
    for (_, (b_lo, b_hi)) in probe_blocks(s, level, index_cap)? {
        for n in sample_block(b_lo, b_hi, budget) {
            if n < threshold {
                continue;
            }
            samples += 1;
            let bound = 0.5 * w_star.abs() * (n as f64).ln_1p().powf(t_star);
            if f.coeff(n).norm() < bound {
                failures.push(n);
            }
        }
    }
    Ok(GrowthCheck {
        dominant_t: t_star,
        dominant_weight: w_star,
        threshold,
        samples,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::compute_schedule;

    #[test]
    fn two_part_threshold() {
        let s = compute_schedule(1).unwrap();
        let g = combination_growth_check(&[2.0, -3.0], &[1.0, 2.0], &s, 1, 64, 1_000_000).unwrap();
        assert_eq!((g.dominant_t, g.dominant_weight), (2.0, -3.0));
        // 2L ≤ 1.5 L² from L = 4/3
        assert_eq!(g.threshold, ((4.0f64 / 3.0).exp() - 1.0).ceil() as u64);
        assert!(g.passed());
    }

    #[test]
    fn merged_parts_and_errors() {
        let s = compute_schedule(1).unwrap();
        assert!(combination_growth_check(&[1.0, -1.0], &[2.0, 2.0], &s, 1, 8, 1_000_000).is_err());
        assert!(matches!(
            log_family_combination(&[1.0], &[1.0, 2.0], &s),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
