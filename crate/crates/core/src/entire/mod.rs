//! Entire functions as lazy coefficient streams.
//!
//! A function is stored through its derivatives at the origin:
//! `f(z) = Σ c_n z^n / n!` with `c_n = f^{(n)}(0)`. In this form the
//! differentiation operator is an index shift, and the gap construction has
//! coefficients `min{ω_n, n}` on `B` and zero elsewhere.

mod family;
mod probe;
mod series;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::schedule::GapSchedule;

pub use probe::{
    frechet_distance, irregularity_probe, irregularity_probe_with, ProbeRecord, ProbeReport, SetTag,
};
pub use family::{combination_growth_check, log_family_combination, GrowthCheck};
pub(crate) use probe::{probe_blocks, sample_block};
pub use series::{eval, sup_norm, CircleSeries, Evaluator, Tol, CIRCLE_SAMPLES, DEFAULT_INDEX_CAP};

/// The sequence `ω_n` that caps the Taylor coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum OmegaSpec {
    /// `ω_n = n^ε`
    Power(f64),
    /// `ω_n = (ln(n+1))^t`
    LogPower(f64),
    /// Explicit `ω_1, ω_2, …`; indices past the table are uncapped.
    Table(Vec<f64>),
}

impl OmegaSpec {
    pub fn value(&self, n: u64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match self {
            OmegaSpec::Power(e) => (n as f64).powf(*e),
            OmegaSpec::LogPower(t) => ((n as f64).ln_1p()).powf(*t),
            OmegaSpec::Table(v) => v.get(n as usize - 1).copied().unwrap_or(f64::INFINITY),
        }
    }

    /// `ω_n ≥ 0`, and for tables a non-decreasing trend at the checkpoints
    /// `n = 2^k`, ending above where it started.
    pub fn validate(&self) -> Result<()> {
        match self {
            OmegaSpec::Power(e) | OmegaSpec::LogPower(e) if !(*e > 0.0 && e.is_finite()) => Err(
                Error::InvalidArgument(format!("omega exponent must be positive, got {e}")),
            ),
            OmegaSpec::Table(v) => {
                if v.is_empty() || v.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "omega table needs nonnegative finite values".into(),
                    ));
                }
                let checkpoints: Vec<f64> = (0..)
                    .map(|k| 1usize << k)
                    .take_while(|&n| n <= v.len())
                    .map(|n| v[n - 1])
                    .collect();
                let rising = checkpoints.windows(2).all(|w| w[0] <= w[1]);
                if !rising || v.len() > 1 && v[v.len() - 1] <= v[0] {
                    return Err(Error::InvalidArgument(
                        "omega table does not grow at its checkpoints".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Parses `power:<ε>` or `log:<t>`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, val) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("omega `{s}`: expected kind:value")))?;
        let x: f64 = val
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("omega `{s}`: bad number")))?;
        let w = match kind {
            "power" => OmegaSpec::Power(x),
            "log" => OmegaSpec::LogPower(x),
            _ => return Err(Error::InvalidArgument(format!("omega kind `{kind}`"))),
        };
        w.validate()?;
        Ok(w)
    }
}

/// A bound `|c_n| ≤ scale · (n + offset + 1)^power`, zero past `degree`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct CoeffBound {
    pub scale: f64,
    pub offset: u64,
    pub power: f64,
    pub degree: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Zero,
    Exponential,
    /// `c_0, c_1, …`, trailing zeros trimmed, never empty.
    Polynomial(Vec<Complex64>),
    /// Coefficient at `n` is `min{ω_{n+shift}, n+shift}` when `n+shift ∈ B`.
    Gap {
        omega: OmegaSpec,
        runs: Arc<Vec<(u64, u64)>>,
        /// `B` continues past `u64::MAX`.
        unbounded: bool,
        shift: u64,
    },
    Combination {
        weights: Vec<Complex64>,
        parts: Vec<EntireFunction>,
    },
}

/// An entire function `Σ c_n z^n / n!` given by its coefficient stream.
#[derive(Clone, Debug, PartialEq)]
pub struct EntireFunction {
    kind: Kind,
}

impl EntireFunction {
    pub fn zero() -> Self {
        EntireFunction { kind: Kind::Zero }
    }

    /// `e^z`: every coefficient is 1.
    pub fn exponential() -> Self {
        EntireFunction {
            kind: Kind::Exponential,
        }
    }

    /// Polynomial from derivatives at the origin, `c_n = P^{(n)}(0)`.
    pub fn polynomial(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            Self::zero()
        } else {
            EntireFunction {
                kind: Kind::Polynomial(coeffs),
            }
        }
    }

    /// Polynomial from ordinary power-series coefficients `Σ a_n z^n`.
    pub fn from_power_coeffs(a: &[Complex64]) -> Self {
        let mut fact = 1.0;
        let c = a
            .iter()
            .enumerate()
            .map(|(n, x)| {
                if n > 0 {
                    fact *= n as f64;
                }
                x * fact
            })
            .collect();
        Self::polynomial(c)
    }

    /// `z^k`.
    pub fn monomial(k: u64) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); k as usize + 1];
        c[k as usize] = Complex64::new(crate::numerics::ln_factorial(k).exp(), 0.0);
        Self::polynomial(c)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::polynomial(vec![c])
    }

    /// Kind label used in reports.
    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            Kind::Zero => "zero",
            Kind::Exponential => "exponential",
            Kind::Polynomial(_) => "polynomial",
            Kind::Gap {
                omega: OmegaSpec::LogPower(_),
                ..
            } => "log_family",
            Kind::Gap { .. } => "gap",
            Kind::Combination { .. } => "combination",
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, Kind::Zero)
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.kind, Kind::Zero | Kind::Polynomial(_))
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self.kind, Kind::Exponential)
    }

    /// Polynomial coefficients `c_n`, if this is a polynomial.
    pub fn polynomial_coeffs(&self) -> Option<&[Complex64]> {
        match &self.kind {
            Kind::Polynomial(c) => Some(c),
            Kind::Zero => Some(&[]),
            _ => None,
        }
    }

    /// `c_n = f^{(n)}(0)`.
    pub fn coeff(&self, n: u64) -> Complex64 {
        match &self.kind {
            Kind::Zero => Complex64::new(0.0, 0.0),
            Kind::Exponential => Complex64::new(1.0, 0.0),
            Kind::Polynomial(c) => c.get(n as usize).copied().unwrap_or_default(),
            Kind::Gap {
                omega, runs, shift, ..
            } => {
                let Some(m) = n.checked_add(*shift) else {
                    return Complex64::new(0.0, 0.0);
                };
                if in_runs(runs, m) {
                    Complex64::new(omega.value(m).min(m as f64), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Kind::Combination { weights, parts } => weights
                .iter()
                .zip(parts)
                .map(|(w, p)| w * p.coeff(n))
                .sum(),
        }
    }

    /// Smallest index `≥ n` whose coefficient may be nonzero.
    pub fn next_support(&self, n: u64) -> Option<u64> {
        match &self.kind {
            Kind::Zero => None,
            Kind::Exponential => Some(n),
            Kind::Polynomial(c) => (n as usize..c.len())
                .find(|&i| c[i] != Complex64::new(0.0, 0.0))
                .map(|i| i as u64),
            Kind::Gap {
                runs,
                shift,
                unbounded,
                ..
            } => {
                let m = n.saturating_add(*shift);
                let i = runs.partition_point(|&(_, hi)| hi < m);
                match runs.get(i) {
                    Some(&(lo, _)) => Some(lo.max(m) - shift),
                    None if *unbounded => Some(u64::MAX - shift),
                    None => None,
                }
            }
            Kind::Combination { parts, .. } => {
                parts.iter().filter_map(|p| p.next_support(n)).min()
            }
        }
    }

    pub(crate) fn coeff_bound(&self) -> CoeffBound {
        match &self.kind {
            Kind::Zero => CoeffBound {
                scale: 0.0,
                offset: 0,
                power: 0.0,
                degree: Some(0),
            },
            Kind::Exponential => CoeffBound {
                scale: 1.0,
                offset: 0,
                power: 0.0,
                degree: None,
            },
            Kind::Polynomial(c) => CoeffBound {
                scale: c.iter().map(|x| x.norm()).fold(0.0, f64::max),
                offset: 0,
                power: 0.0,
                degree: Some(c.len() as u64 - 1),
            },
            Kind::Gap { omega, shift, .. } => CoeffBound {
                scale: 1.0,
                offset: *shift,
                power: match omega {
                    OmegaSpec::Power(e) => e.min(1.0),
                    _ => 1.0,
                },
                degree: None,
            },
            Kind::Combination { weights, parts } => {
                let bounds: Vec<CoeffBound> = parts.iter().map(|p| p.coeff_bound()).collect();
                CoeffBound {
                    scale: weights
                        .iter()
                        .zip(&bounds)
                        .map(|(w, b)| w.norm() * b.scale)
                        .sum(),
                    offset: bounds.iter().map(|b| b.offset).max().unwrap_or(0),
                    power: bounds.iter().map(|b| b.power).fold(0.0, f64::max),
                    degree: bounds
                        .iter()
                        .map(|b| b.degree)
                        .try_fold(0u64, |acc, d| d.map(|d| acc.max(d))),
                }
            }
        }
    }

    /// All coefficients are real and nonnegative, so `sup_{|z|≤r}|f| = f(r)`.
    pub fn has_nonnegative_coeffs(&self) -> bool {
        let nonneg = |c: &Complex64| c.im == 0.0 && c.re >= 0.0;
        match &self.kind {
            Kind::Zero | Kind::Exponential | Kind::Gap { .. } => true,
            Kind::Polynomial(c) => c.iter().all(nonneg),
            Kind::Combination { weights, parts } => {
                weights.iter().all(nonneg) && parts.iter().all(|p| p.has_nonnegative_coeffs())
            }
        }
    }

    /// `λ f`.
    pub fn scaled(&self, lambda: Complex64) -> Self {
        match &self.kind {
            Kind::Polynomial(c) => Self::polynomial(c.iter().map(|x| x * lambda).collect()),
            _ => combine(&[lambda], std::slice::from_ref(self)).expect("equal lengths"),
        }
    }
}

fn in_runs(runs: &[(u64, u64)], m: u64) -> bool {
    let i = runs.partition_point(|&(_, hi)| hi < m);
    runs.get(i).is_some_and(|&(lo, _)| lo <= m)
}

fn gap_runs(s: &GapSchedule) -> (Arc<Vec<(u64, u64)>>, bool) {
    let (_, b) = s.index_sets();
    let runs = b.runs_u64();
    let unbounded = b.intervals().len() > runs.len()
        || runs.last().is_some_and(|&(_, hi)| hi == u64::MAX);
    (Arc::new(runs), unbounded)
}

/// The gap function `Σ_{n∈B} min{ω_n, n} z^n / n!` over the schedule's `B`.
pub fn build_irregular(omega: OmegaSpec, s: &GapSchedule) -> Result<EntireFunction> {
    omega.validate()?;
    let (runs, unbounded) = gap_runs(s);
    Ok(EntireFunction {
        kind: Kind::Gap {
            omega,
            runs,
            unbounded,
            shift: 0,
        },
    })
}

/// `f_t = Σ_{n∈B} min{n, (ln(n+1))^t} z^n / n!`.
pub fn build_log_family(t: f64, s: &GapSchedule) -> Result<EntireFunction> {
    build_irregular(OmegaSpec::LogPower(t), s)
}

/// `Σ w_k f_k`. Equal parts are merged, zero terms dropped.
pub fn combine(weights: &[Complex64], parts: &[EntireFunction]) -> Result<EntireFunction> {
    if weights.len() != parts.len() {
        return Err(Error::LengthMismatch {
            weights: weights.len(),
            parts: parts.len(),
        });
    }
    let mut ws: Vec<Complex64> = Vec::new();
    let mut ps: Vec<EntireFunction> = Vec::new();
    for (w, p) in weights.iter().zip(parts) {
        if p.is_zero() {
            continue;
        }
        match ps.iter().position(|q| q == p) {
            Some(i) => ws[i] += w,
            None => {
                ws.push(*w);
                ps.push(p.clone());
            }
        }
    }
    let keep: Vec<bool> = ws.iter().map(|w| *w != Complex64::new(0.0, 0.0)).collect();
    let mut ws: Vec<Complex64> = ws.into_iter().zip(&keep).filter(|(_, k)| **k).map(|(w, _)| w).collect();
    let mut ps: Vec<EntireFunction> = ps.into_iter().zip(&keep).filter(|(_, k)| **k).map(|(p, _)| p).collect();
    Ok(match ps.len() {
        0 => EntireFunction::zero(),
        1 if ws[0] == Complex64::new(1.0, 0.0) => ps.pop().expect("one part"),
        _ => {
            if ps.iter().all(EntireFunction::is_polynomial) {
                let deg = ps
                    .iter()
                    .map(|p| p.polynomial_coeffs().map_or(0, |c| c.len()))
                    .max()
                    .unwrap_or(0);
                let c = (0..deg as u64)
                    .map(|n| ws.iter().zip(&ps).map(|(w, p)| w * p.coeff(n)).sum())
                    .collect();
                return Ok(EntireFunction::polynomial(c));
            }
            ws.shrink_to_fit();
            EntireFunction {
                kind: Kind::Combination {
                    weights: ws,
                    parts: ps,
                },
            }
        }
    })
}

/// `f^{(n)}(0)`.
pub fn taylor_at_zero(f: &EntireFunction, n: u64) -> Complex64 {
    f.coeff(n)
}

/// `D^j f`, the coefficient stream shifted by `j`.
pub fn derivative(f: &EntireFunction, j: u64) -> EntireFunction {
    if j == 0 {
        return f.clone();
    }
    match &f.kind {
        Kind::Zero | Kind::Exponential => f.clone(),
        Kind::Polynomial(c) => {
            EntireFunction::polynomial(c.iter().skip(j as usize).copied().collect())
        }
        Kind::Gap {
            omega,
            runs,
            unbounded,
            shift,
        } => EntireFunction {
            kind: Kind::Gap {
                omega: omega.clone(),
                runs: Arc::clone(runs),
                unbounded: *unbounded,
                shift: shift.saturating_add(j),
            },
        },
        Kind::Combination { weights, parts } => {
            let parts: Vec<EntireFunction> = parts.iter().map(|p| derivative(p, j)).collect();
            combine(weights, &parts).expect("equal lengths")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::compute_schedule;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn sched() -> GapSchedule {
        compute_schedule(1).unwrap()
    }

    #[test]
    fn gap_coefficients() {
        let s = sched();
        let f = build_irregular(OmegaSpec::Power(0.1), &s).unwrap();
        assert_eq!(f.coeff(200), c(0.0));
        assert_eq!(f.coeff(40402), c(0.0));
        assert_eq!(f.coeff(201), c(201f64.powf(0.1)));
        let g = build_irregular(OmegaSpec::Power(0.5), &s).unwrap();
        assert_eq!(g.coeff(1000), c(1000f64.sqrt()));
        let table: Vec<f64> = (1..=50_000).map(|n| 2.0 * n as f64).collect();
        let h = build_irregular(OmegaSpec::Table(table), &s).unwrap();
        assert_eq!(h.coeff(300), c(300.0));
        // past the table, only the `n` cap applies
        assert_eq!(h.coeff(40_401), c(40_401.0));
    }

    #[test]
    fn log_family_coefficients() {
        let s = sched();
        let f1 = build_log_family(1.0, &s).unwrap();
        assert_eq!(f1.coeff(500), c(501f64.ln()));
        assert_eq!(f1.coeff(5), c(0.0));
        assert_eq!(f1.kind_name(), "log_family");
    }

    #[test]
    fn combine_edge_cases() {
        let s = sched();
        assert!(combine(&[], &[]).unwrap().is_zero());
        let f = build_log_family(1.0, &s).unwrap();
        assert_eq!(combine(&[c(1.0)], std::slice::from_ref(&f)).unwrap(), f);
        assert!(combine(&[c(1.0), c(-1.0)], &[f.clone(), f.clone()]).unwrap().is_zero());
        assert_eq!(
            combine(&[c(1.0)], &[]),
            Err(Error::LengthMismatch {
                weights: 1,
                parts: 0
            })
        );
        let g = build_log_family(2.0, &s).unwrap();
        let h = combine(&[c(2.0), c(-3.0)], &[f, g]).unwrap();
        let l = 1001f64.ln();
        let expect = 2.0 * l - 3.0 * l * l;
        assert!((h.coeff(1000).re - expect).abs() < 1e-12 * expect.abs());
    }

    #[test]
    fn derivative_shifts() {
        let s = sched();
        assert!(derivative(&EntireFunction::exponential(), 7).is_exponential());
        let p = EntireFunction::polynomial(vec![c(1.0), c(2.0), c(3.0)]);
        assert!(derivative(&p, 3).is_zero());
        assert_eq!(derivative(&p, 1).coeff(0), c(2.0));
        let f = build_irregular(OmegaSpec::Power(0.1), &s).unwrap();
        let d = derivative(&f, 150);
        assert_eq!(d.coeff(51), f.coeff(201));
        assert_eq!(d.next_support(0), Some(51));
        assert_eq!(derivative(&d, 10).coeff(41), f.coeff(201));
    }

    #[test]
    fn next_support_walks_runs() {
        let s = compute_schedule(2).unwrap();
        let f = build_irregular(OmegaSpec::Power(0.1), &s).unwrap();
        assert_eq!(f.next_support(0), Some(201));
        assert_eq!(f.next_support(40_402), s.beta_u64(2));
        assert_eq!(EntireFunction::polynomial(vec![c(0.0), c(0.0), c(1.0)]).next_support(0), Some(2));
    }

    #[test]
    fn monomial_and_power_coeffs() {
        let m = EntireFunction::monomial(3);
        assert_eq!(m.coeff(3), c(6.0));
        let p = EntireFunction::from_power_coeffs(&[c(1.0), c(1.0), c(1.0)]);
        assert_eq!(p.coeff(2), c(2.0));
    }

    #[test]
    fn omega_validation() {
        assert!(OmegaSpec::Power(0.0).validate().is_err());
        assert!(OmegaSpec::Table(vec![3.0, 2.0, 1.0]).validate().is_err());
        assert!(OmegaSpec::Table(vec![1.0, 2.0, 3.0, 4.0]).validate().is_ok());
        assert_eq!(OmegaSpec::parse("power:0.1").unwrap(), OmegaSpec::Power(0.1));
        assert!(OmegaSpec::parse("nope:1").is_err());
    }
}
