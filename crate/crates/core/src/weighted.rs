//! Radial weights and the weighted sup-norms `sup_r v(r) M_p(f, r)`.

use serde::Serialize;

use crate::entire::{derivative, probe_blocks, sample_block, EntireFunction, Evaluator, ProbeRecord, SetTag};
use crate::error::{Error, Result};
use crate::means::{check_grid, mean_p, MeanParams};
use crate::numerics::BoundedValue;
use crate::output::fmt_num;
use crate::schedule::GapSchedule;

/// A radial weight `v` on `[0, ∞)`.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    /// `v(r) = r^b e^{−r}` for `r ≥ max(b, 0)`, constant below.
    PowerExp(f64),
    /// Log-linear interpolation through `(radius, value)` points, constant
    /// before the first and extrapolated along the last segment after.
    Table { radii: Vec<f64>, values: Vec<f64> },
}

impl WeightSpec {
    pub fn table(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() < 2 || radii.len() != values.len() {
            return Err(Error::InvalidArgument(
                "weight table needs at least two (radius, value) pairs".into(),
            ));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) || !(radii[0] >= 0.0) {
            return Err(Error::InvalidArgument("weight radii must increase from >= 0".into()));
        }
        if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument("weight values must be positive".into()));
        }
        if values.windows(2).any(|w| w[1] > w[0]) || values[values.len() - 1] >= values[values.len() - 2] {
            return Err(Error::InvalidArgument(
                "weight values must be non-increasing and strictly decreasing at the end".into(),
            ));
        }
        Ok(WeightSpec::Table { radii, values })
    }

    /// `ln v(r)`.
    pub fn ln_eval(&self, r: f64) -> f64 {
        assert!(r >= 0.0);
        match self {
            WeightSpec::PowerExp(b) => {
                let r = r.max(b.max(0.0));
                if r == 0.0 {
                    0.0
                } else {
                    b * r.ln() - r
                }
            }
            WeightSpec::Table { radii, values } => {
                let k = radii.partition_point(|&x| x <= r);
                if k == 0 {
                    return values[0].ln();
                }
                let i = (k - 1).min(radii.len() - 2);
                let (r0, r1) = (radii[i], radii[i + 1]);
                let (l0, l1) = (values[i].ln(), values[i + 1].ln());
                l0 + (l1 - l0) * (r - r0) / (r1 - r0)
            }
        }
    }
}

pub fn weight_eval(v: &WeightSpec, r: f64) -> f64 {
    v.ln_eval(r).exp()
}

/// Positivity, monotonicity, and decay of `r^m v(r)` for `m = 1, 2, 3`
/// over the last decade of `grid`.
pub fn check_weight_axioms(v: &WeightSpec, grid: &[f64]) -> Result<()> {
    check_grid(grid)?;
    let ln: Vec<f64> = grid.iter().map(|&r| v.ln_eval(r)).collect();
    if ln.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("weight is not positive on the grid".into()));
    }
    if ln.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidArgument("weight increases on the grid".into()));
    }
    let last = grid[grid.len() - 1];
    let tail: Vec<usize> = (0..grid.len()).filter(|&i| grid[i] >= last / 10.0 && grid[i] > 0.0).collect();
    for m in 1..=3 {
        let vals: Vec<f64> = tail.iter().map(|&i| m as f64 * grid[i].ln() + ln[i]).collect();
        let decaying = vals.windows(2).all(|w| w[1] <= w[0]) && vals.len() >= 2 && vals[vals.len() - 1] < vals[0];
        if !decaying {
            return Err(Error::InvalidArgument(format!(
                "r^{m} v(r) does not decay on the grid tail"
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailVerdict {
    Vanishing,
    Bounded,
    Diverging,
}

impl TailVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            TailVerdict::Vanishing => "vanishing",
            TailVerdict::Bounded => "bounded",
            TailVerdict::Diverging => "diverging",
        }
    }
}

/// Growth of the final value over the profile minimum that counts as
/// divergence, given a non-decreasing last decade.
pub const DIVERGENCE_FACTOR: f64 = 10.0;
/// Final value, relative to the supremum, below which a decreasing tail vanishes.
pub const VANISHING_RATIO: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedNormReport {
    pub p: f64,
    pub radii: Vec<f64>,
    /// `ln` of the lower and upper ends of `v(r) M_p(f, r)`.
    pub ln_lower: Vec<f64>,
    pub ln_upper: Vec<f64>,
    pub sup: f64,
    pub sup_at: f64,
    pub verdict: TailVerdict,
}

impl WeightedNormReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value_lower,value_upper\n");
        for i in 0..self.radii.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_num(self.radii[i]),
                fmt_num(self.ln_lower[i].exp()),
                fmt_num(self.ln_upper[i].exp())
            ));
        }
        out
    }
}

/// Classifies the last decade of a grid profile given as logs.
pub(crate) fn tail_verdict(radii: &[f64], ln_values: &[f64]) -> TailVerdict {
    let sup = ln_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if sup == f64::NEG_INFINITY {
        return TailVerdict::Vanishing;
    }
    let last = radii[radii.len() - 1];
    let tail: Vec<f64> = radii
        .iter()
        .zip(ln_values)
        .filter(|(r, _)| **r >= last / 10.0)
        .map(|(_, v)| *v)
        .collect();
    let fin = tail[tail.len() - 1];
    let min = ln_values.iter().copied().fold(f64::INFINITY, f64::min);
    if tail.windows(2).all(|w| w[1] <= w[0]) && fin < sup + VANISHING_RATIO.ln() {
        TailVerdict::Vanishing
    } else if tail.windows(2).all(|w| w[1] >= w[0]) && fin - min >= DIVERGENCE_FACTOR.ln() {
        TailVerdict::Diverging
    } else {
        TailVerdict::Bounded
    }
}

/// `v(r) M_p(f, r)` over the grid. The origin, where `M_p = |f(0)|`, is
/// added in front when the grid starts above it.
pub fn weighted_norm(
    ev: &Evaluator,
    f: &EntireFunction,
    v: &WeightSpec,
    params: &MeanParams,
    grid: &[f64],
) -> Result<WeightedNormReport> {
    check_grid(grid)?;
    let mut radii = Vec::with_capacity(grid.len() + 1);
    if grid[0] > 0.0 {
        radii.push(0.0);
    }
    radii.extend_from_slice(grid);
    let mut ln_lower = Vec::with_capacity(radii.len());
    let mut ln_upper = Vec::with_capacity(radii.len());
    for &r in &radii {
        let m = if r == 0.0 {
            BoundedValue::exact(crate::numerics::LogScalar::from_f64(f.coeff(0).norm()))
        } else {
            mean_p(ev, f, r, params)?
        };
        let lv = v.ln_eval(r);
        ln_lower.push(m.lower.log_mag() + lv);
        ln_upper.push(m.upper.log_mag() + lv);
    }
    let mut best = 0;
    for i in 0..radii.len() {
        if ln_upper[i] > ln_upper[best] {
            best = i;
        }
    }
    let verdict = tail_verdict(&radii, &ln_upper);
    Ok(WeightedNormReport {
        p: params.p,
        sup: ln_upper[best].exp(),
        sup_at: radii[best],
        radii,
        ln_lower,
        ln_upper,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    InBp0,
    InBpinfOnly,
    Outside,
    Inconclusive,
}

impl Membership {
    pub fn as_str(self) -> &'static str {
        match self {
            Membership::InBp0 => "in_Bp0",
            Membership::InBpinfOnly => "in_Bpinf_only",
            Membership::Outside => "outside",
            Membership::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub verdict: Membership,
    /// `polynomial`, `exponential`, or `grid`.
    pub basis: &'static str,
    pub norm: Option<WeightedNormReport>,
}

/// Membership in `B_{p,0}` / `B_{p,∞}`: closed forms for polynomials and
/// the exponential under power-exponential weights, the grid verdict
/// otherwise (bounded grid data is reported as inconclusive).
pub fn membership_probe(
    ev: &Evaluator,
    f: &EntireFunction,
    v: &WeightSpec,
    params: &MeanParams,
    grid: &[f64],
) -> Result<MembershipReport> {
    if let WeightSpec::PowerExp(b) = v {
        if f.is_zero() || f.is_polynomial() {
            return Ok(MembershipReport {
                verdict: Membership::InBp0,
                basis: "polynomial",
                norm: None,
            });
        }
        if f.is_exponential() {
            // v M_p ~ r^{b − 1/(2p)}, and r^b at p = ∞
            let rate = if params.p.is_infinite() {
                *b
            } else {
                b - 1.0 / (2.0 * params.p)
            };
            let verdict = if rate < 0.0 {
                Membership::InBp0
            } else if rate == 0.0 {
                Membership::InBpinfOnly
            } else {
                Membership::Outside
            };
            return Ok(MembershipReport {
                verdict,
                basis: "exponential",
                norm: None,
            });
        }
    }
    let report = weighted_norm(ev, f, v, params, grid)?;
    let verdict = match report.verdict {
        TailVerdict::Vanishing => Membership::InBp0,
        TailVerdict::Diverging => Membership::Outside,
        TailVerdict::Bounded => Membership::Inconclusive,
    };
    Ok(MembershipReport {
        verdict,
        basis: "grid",
        norm: Some(report),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedProbeReport {
    pub p: f64,
    pub level: usize,
    pub records: Vec<ProbeRecord>,
}

impl WeightedProbeReport {
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
}

/// Grid suprema of `v · M_p(D^j f)` for sampled `j` in the `A` and `B`
/// blocks of levels `1..=level`.
#[allow(clippy::too_many_arguments)]
pub fn weighted_orbit_probe(
    ev: &Evaluator,
    f: &EntireFunction,
    v: &WeightSpec,
    params: &MeanParams,
    s: &GapSchedule,
    level: usize,
    grid: &[f64],
    budget: usize,
) -> Result<WeightedProbeReport> {
    let blocks = probe_blocks(s, level, ev.index_cap)?;
    let mut records = Vec::new();
    let mut push = |j: u64, set: SetTag| -> Result<()> {
        let rep = weighted_norm(ev, &derivative(f, j), v, params, grid)?;
        let lo = rep.ln_lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        records.push(ProbeRecord {
            index: j,
            set,
            value_lower: lo.exp(),
            value_upper: rep.sup,
        });
        Ok(())
    };
    for ((a_lo, a_hi), (b_lo, b_hi)) in blocks {
        for j in sample_block(a_lo, a_hi, budget) {
            push(j, SetTag::A)?;
        }
        for j in sample_block(b_lo, b_hi, budget) {
            push(j, SetTag::B)?;
        }
    }
    Ok(WeightedProbeReport {
        p: params.p,
        level,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::means::geometric_grid;
    use num_complex::Complex64;

    fn grid() -> Vec<f64> {
        geometric_grid(0.0625, 128.0, 96).unwrap()
    }

    #[test]
    fn weight_values() {
        let e = std::f64::consts::E;
        assert!((weight_eval(&WeightSpec::PowerExp(0.0), 3.0) - (-3f64).exp()).abs() < 1e-15);
        assert!((weight_eval(&WeightSpec::PowerExp(1.0), 2.0) - 2.0 / (e * e)).abs() < 1e-15);
        assert!((weight_eval(&WeightSpec::PowerExp(1.0), 0.5) - 1.0 / e).abs() < 1e-15);
        assert_eq!(weight_eval(&WeightSpec::PowerExp(0.0), 0.0), 1.0);
        let t = WeightSpec::table(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.25]).unwrap();
        assert!((weight_eval(&t, 3.0) - 0.125).abs() < 1e-15);
        assert!(WeightSpec::table(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn axioms_on_grid() {
        for b in [0.0, 0.1, 0.5, 1.0, 2.0] {
            check_weight_axioms(&WeightSpec::PowerExp(b), &grid()).unwrap();
        }
        let flat = WeightSpec::table(vec![0.0, 200.0], vec![1.0, 0.9]).unwrap();
        assert!(check_weight_axioms(&flat, &grid()).is_err());
    }

    #[test]
    fn norm_examples() {
        let ev = Evaluator::default();
        let p2 = MeanParams::new(2.0).unwrap();
        let v0 = WeightSpec::PowerExp(0.0);
        let z = weighted_norm(&ev, &EntireFunction::zero(), &v0, &p2, &grid()).unwrap();
        assert_eq!((z.sup, z.verdict), (0.0, TailVerdict::Vanishing));
        let one = EntireFunction::constant(Complex64::new(1.0, 0.0));
        let r = weighted_norm(&ev, &one, &v0, &p2, &grid()).unwrap();
        assert_eq!((r.sup, r.sup_at, r.verdict), (1.0, 0.0, TailVerdict::Vanishing));
        let pinf = MeanParams::new(f64::INFINITY).unwrap();
        let e = weighted_norm(&ev, &EntireFunction::exponential(), &WeightSpec::PowerExp(1.0), &pinf, &grid())
            .unwrap();
        assert_eq!(e.verdict, TailVerdict::Diverging);
    }

    #[test]
    fn membership_shortcuts() {
        let ev = Evaluator::default();
        let p2 = MeanParams::new(2.0).unwrap();
        let pinf = MeanParams::new(f64::INFINITY).unwrap();
        let poly = EntireFunction::polynomial(vec![Complex64::new(1.0, 0.0); 7]);
        for b in [0.1, 1.0] {
            let m = membership_probe(&ev, &poly, &WeightSpec::PowerExp(b), &p2, &grid()).unwrap();
            assert_eq!(m.verdict, Membership::InBp0);
        }
        let e = EntireFunction::exponential();
        let m = membership_probe(&ev, &e, &WeightSpec::PowerExp(0.5), &pinf, &grid()).unwrap();
        assert_eq!(m.verdict, Membership::Outside);
        let m = membership_probe(&ev, &e, &WeightSpec::PowerExp(0.25), &p2, &grid()).unwrap();
        assert_eq!(m.verdict, Membership::InBpinfOnly);
    }

    #[test]
    fn homogeneity() {
        let ev = Evaluator::default();
        let p = MeanParams::new(3.0).unwrap();
        let f = EntireFunction::polynomial(vec![Complex64::new(1.0, -1.0), Complex64::new(0.5, 2.0)]);
        let v = WeightSpec::PowerExp(0.5);
        let g = geometric_grid(0.1, 20.0, 24).unwrap();
        let a = weighted_norm(&ev, &f, &v, &p, &g).unwrap();
        let b = weighted_norm(&ev, &f.scaled(Complex64::new(0.0, -3.0)), &v, &p, &g).unwrap();
        assert!((b.sup / a.sup - 3.0).abs() < 1e-8);
    }
}
