//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::entire::{
    build_irregular, combination_growth_check, irregularity_probe_with, log_family_combination,
    EntireFunction, Evaluator, OmegaSpec, Tol,
};
use crate::error::{Error, Result};
use crate::means::{
    geometric_grid, growth_certificate_from_means, linear_grid, ln_mean_upper, mean_p, region_csv,
    region_data, MeanParams, DEFAULT_GRID_HI, DEFAULT_GRID_LO, DEFAULT_GRID_POINTS,
};
use crate::output::{fmt_num, svg_polylines};
use crate::schedule::compute_schedule;
use crate::weighted::{membership_probe, weighted_norm, weighted_orbit_probe, WeightSpec};

#[derive(Parser, Debug)]
#[command(name = "irregular-entire", version, about = "Gap-series entire functions, their derivative orbits, and integral means")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Output format (each subcommand has its own default)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative tolerance for series remainders and quadrature
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Largest series index summed term by term
    #[arg(long, default_value_t = crate::entire::DEFAULT_INDEX_CAP)]
    index_cap: u64,
}

#[derive(Args, Debug, Clone)]
struct Grid {
    /// Smallest radius of the geometric grid
    #[arg(long, default_value_t = DEFAULT_GRID_LO)]
    rmin: f64,
    /// Largest radius of the geometric grid
    #[arg(long, default_value_t = DEFAULT_GRID_HI)]
    rmax: f64,
    /// Number of grid radii
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    points: usize,
}

impl Grid {
    fn radii(&self) -> Result<Vec<f64>> {
        geometric_grid(self.rmin, self.rmax, self.points)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the gap schedule (alpha_N, beta_N and tail brackets)
    Schedule {
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Emit the nonzero derivatives at the origin of a function
    Build {
        /// zero | exp | monomial:K | poly:c0,c1,... | power:EPS | log:T
        #[arg(long, visible_alias = "omega", default_value = "power:0.1")]
        function: String,
        /// Schedule levels used by gap functions
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// Last index listed (defaults to the index cap)
        #[arg(long)]
        max_index: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Decay of D^j f on a disk for j in A, size of f^(n)(0) for n in B
    Probe {
        #[arg(long, visible_alias = "omega", default_value = "power:0.1")]
        function: String,
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// Disk radius
        #[arg(long, default_value_t = 1)]
        m: u64,
        /// Sampled indices per block
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Table of M_p(f, r) over a radius grid
    Means {
        #[arg(long, visible_alias = "omega", default_value = "power:0.1")]
        function: String,
        /// Exponent p in [1, inf]
        #[arg(long, default_value = "2", value_parser = parse_p)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        common: Common,
    },
    /// r^(a-eps) e^(-r) M_p(f, r) over a grid, with a boundedness verdict
    Growth {
        #[arg(long, visible_alias = "omega", default_value = "power:0.1")]
        function: String,
        #[arg(long, default_value = "2", value_parser = parse_p)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        common: Common,
    },
    /// Attainable and excluded growth exponents as functions of p
    Region {
        #[arg(long, default_value_t = 1.0)]
        pmin: f64,
        #[arg(long, default_value_t = 6.0)]
        pmax: f64,
        #[arg(long, default_value_t = 6)]
        steps: usize,
        /// Explicit p values, overriding pmin/pmax/steps
        #[arg(long, value_delimiter = ',')]
        ps: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
    /// Combine log-family functions f_t and check growth, decay and means
    Lineability {
        #[arg(long, value_delimiter = ',', default_value = "1,2", allow_hyphen_values = true)]
        ts: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "2,-3", allow_hyphen_values = true)]
        weights: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1")]
        eps: Vec<f64>,
        #[arg(long, default_value = "2", value_parser = parse_p)]
        p: f64,
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        common: Common,
    },
    /// Weighted norms sup_r v(r) M_p(f, r) with v(r) = r^b e^(-r)
    Weighted {
        #[arg(long, visible_alias = "omega", default_value = "power:0.1")]
        function: String,
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value = "2", value_parser = parse_p)]
        p: f64,
        #[arg(long, value_enum, default_value_t = Mode::Norm)]
        mode: Mode,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// Orbit mode: probe level
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// Orbit mode: sampled indices per block
        #[arg(long, default_value_t = 8)]
        budget: usize,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Norm,
    Membership,
    Orbit,
}

fn parse_p(s: &str) -> std::result::Result<f64, String> {
    let p = match s {
        "inf" | "infinity" => f64::INFINITY,
        _ => s.parse::<f64>().map_err(|e| e.to_string())?,
    };
    if p >= 1.0 {
        Ok(p)
    } else {
        Err(format!("p must lie in [1, inf], got {s}"))
    }
}

/// Parses a function description; gap functions use a schedule of `levels` levels.
pub fn parse_function(spec: &str, levels: usize) -> Result<EntireFunction> {
    let bad = || Error::InvalidArgument(format!("function `{spec}`"));
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "zero" => Ok(EntireFunction::zero()),
        "exp" => Ok(EntireFunction::exponential()),
        "monomial" => Ok(EntireFunction::monomial(arg.parse().map_err(|_| bad())?)),
        "poly" => {
            let c = arg
                .split(',')
                .map(|x| x.trim().parse::<f64>().map(|v| Complex64::new(v, 0.0)))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad())?;
            Ok(EntireFunction::polynomial(c))
        }
        "power" | "log" => {
            let omega = OmegaSpec::parse(spec)?;
            build_irregular(omega, &compute_schedule(levels)?)
        }
        _ => Err(bad()),
    }
}

fn evaluator(c: &Common) -> Result<Evaluator> {
    if !(c.tol > 0.0 && c.tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance must lie in (0, 1), got {}", c.tol)));
    }
    Ok(Evaluator {
        index_cap: c.index_cap,
        tol: Tol::rel(c.tol),
    })
}

struct Rendered {
    csv: String,
    json: Value,
    svg: Option<String>,
    default: Format,
}

fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn emit(common: &Common, r: Rendered, out: &mut dyn Write) -> Result<()> {
    let text = match common.format.unwrap_or(r.default) {
        Format::Csv => r.csv,
        Format::Json => to_json_text(&r.json),
        Format::Svg => r
            .svg
            .ok_or_else(|| Error::InvalidArgument("svg output is not available here".into()))?,
    };
    let io = |e: std::io::Error| Error::InvalidArgument(format!("cannot write output: {e}"));
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(io),
        None => out.write_all(text.as_bytes()).map_err(io),
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Schedule { levels, common } => {
            let s = compute_schedule(levels)?;
            let mut csv = String::from("level,alpha,beta,tail_lower,tail_upper\n");
            for n in 0..s.levels() {
                let (lo, hi) = s.tails()[n].to_f64_pair();
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    n + 1,
                    s.alphas()[n],
                    s.betas()[n],
                    fmt_num(lo),
                    fmt_num(hi)
                ));
            }
            emit(
                &common,
                Rendered {
                    csv,
                    json: s.to_json(),
                    svg: None,
                    default: Format::Json,
                },
                out,
            )
        }
        Command::Build {
            function,
            levels,
            max_index,
            common,
        } => {
            let f = parse_function(&function, levels)?;
            let last = max_index.unwrap_or(common.index_cap).min(common.index_cap);
            let mut csv = String::from("n,re,im\n");
            let mut rows = Vec::new();
            let mut cursor = f.next_support(0);
            while let Some(n) = cursor.filter(|&n| n <= last) {
                let c = f.coeff(n);
                if c != Complex64::new(0.0, 0.0) {
                    csv.push_str(&format!("{n},{},{}\n", fmt_num(c.re), fmt_num(c.im)));
                    rows.push(json!({"n": n, "re": c.re, "im": c.im}));
                }
                cursor = f.next_support(n + 1);
            }
            let json = json!({"function": function, "kind": f.kind_name(), "coefficients": rows});
            emit(
                &common,
                Rendered {
                    csv,
                    json,
                    svg: None,
                    default: Format::Csv,
                },
                out,
            )
        }
        Command::Probe {
            function,
            level,
            m,
            budget,
            common,
        } => {
            let ev = evaluator(&common)?;
            let f = parse_function(&function, level + 1)?;
            let s = compute_schedule(level)?;
            let report = irregularity_probe_with(&ev, &f, &s, m, level, budget)?;
            emit(
                &common,
                Rendered {
                    csv: report.to_csv(),
                    json: report.to_json(),
                    svg: None,
                    default: Format::Csv,
                },
                out,
            )
        }
        Command::Means {
            function,
            p,
            levels,
            grid,
            common,
        } => {
            let ev = evaluator(&common)?;
            let f = parse_function(&function, levels)?;
            let params = MeanParams::new(p)?;
            let mut csv = String::from("r,value_lower,value_upper\n");
            let mut rows = Vec::new();
            let mut pts = Vec::new();
            for r in grid.radii()? {
                let m = mean_p(&ev, &f, r, &params)?;
                let (lo, hi) = m.to_f64_pair();
                csv.push_str(&format!("{},{},{}\n", fmt_num(r), fmt_num(lo), fmt_num(hi)));
                rows.push(json!({"r": r, "value_lower": lo, "value_upper": hi}));
                pts.push((r, m.upper.log_mag()));
            }
            let svg = svg_polylines("ln M_p(f, r) against ln r", &[("upper", pts)], true);
            emit(
                &common,
                Rendered {
                    csv,
                    json: json!({"function": function, "p": p_json(p), "rows": rows}),
                    svg: Some(svg),
                    default: Format::Csv,
                },
                out,
            )
        }
        Command::Growth {
            function,
            p,
            eps,
            levels,
            grid,
            common,
        } => {
            let ev = evaluator(&common)?;
            let f = parse_function(&function, levels)?;
            let params = MeanParams::new(p)?;
            let radii = grid.radii()?;
            let ln_m = ln_mean_upper(&ev, &f, &params, &radii)?;
            let cert = growth_certificate_from_means(&params, eps, &radii, &ln_m)?;
            let pts: Vec<(f64, f64)> = cert.radii.iter().copied().zip(cert.ln_values.iter().copied()).collect();
            let svg = svg_polylines("ln r^(a-eps) e^(-r) M_p(f, r) against ln r", &[("certificand", pts)], true);
            emit(
                &common,
                Rendered {
                    csv: cert.to_csv(),
                    json: certificate_json(&cert),
                    svg: Some(svg),
                    default: Format::Csv,
                },
                out,
            )
        }
        Command::Region {
            pmin,
            pmax,
            steps,
            ps,
            common,
        } => {
            let ps = match ps {
                Some(v) => v,
                None => linear_grid(pmin, pmax, steps)?,
            };
            let rows = region_data(&ps)?;
            let yes: Vec<(f64, f64)> = rows.iter().map(|r| (r.p, r.yes_level)).collect();
            let no: Vec<(f64, f64)> = rows.iter().map(|r| (r.p, r.no_level)).collect();
            let svg = svg_polylines("growth exponent a against p", &[("attained", yes), ("excluded", no)], false);
            emit(
                &common,
                Rendered {
                    csv: region_csv(&rows),
                    json: json!({ "rows": rows }),
                    svg: Some(svg),
                    default: Format::Csv,
                },
                out,
            )
        }
        Command::Lineability {
            ts,
            weights,
            level,
            m,
            eps,
            p,
            budget,
            grid,
            common,
        } => {
            let ev = evaluator(&common)?;
            let s_probe = compute_schedule(level)?;
            let s_full = compute_schedule(level + 1)?;
            let f = log_family_combination(&weights, &ts, &s_full)?;
            let growth = combination_growth_check(&weights, &ts, &s_probe, level, budget, ev.index_cap)?;
            let probe = irregularity_probe_with(&ev, &f, &s_probe, m, level, budget)?;
            let decay_bound = weights.iter().map(|w| w.abs()).sum::<f64>() / level as f64;
            let decay_max = probe.decay_records().map(|r| r.value_upper).fold(0.0, f64::max);
            let params = MeanParams::new(p)?;
            let radii = grid.radii()?;
            let ln_m = ln_mean_upper(&ev, &f, &params, &radii)?;
            let certs = eps
                .iter()
                .map(|&e| growth_certificate_from_means(&params, e, &radii, &ln_m).map(|c| certificate_summary(&c)))
                .collect::<Result<Vec<_>>>()?;
            let json = json!({
                "weights": weights,
                "ts": ts,
                "growth": {
                    "dominant_t": growth.dominant_t,
                    "dominant_weight": growth.dominant_weight,
                    "threshold": growth.threshold,
                    "samples": growth.samples,
                    "failures": growth.failures,
                    "passed": growth.passed(),
                },
                "decay": {
                    "m": m,
                    "bound": decay_bound,
                    "max_value_upper": decay_max,
                    "passed": decay_max < decay_bound,
                },
                "certificates": certs,
            });
            emit(
                &common,
                Rendered {
                    csv: probe.to_csv(),
                    json,
                    svg: None,
                    default: Format::Json,
                },
                out,
            )
        }
        Command::Weighted {
            function,
            b,
            p,
            mode,
            levels,
            level,
            budget,
            grid,
            common,
        } => {
            let ev = evaluator(&common)?;
            let params = MeanParams::new(p)?;
            let v = WeightSpec::PowerExp(b);
            let radii = grid.radii()?;
            let rendered = match mode {
                Mode::Norm => {
                    let f = parse_function(&function, levels)?;
                    let rep = weighted_norm(&ev, &f, &v, &params, &radii)?;
                    let pts: Vec<(f64, f64)> = rep.radii.iter().copied().zip(rep.ln_upper.iter().copied()).collect();
                    Rendered {
                        csv: rep.to_csv(),
                        json: json!({
                            "p": p_json(p),
                            "b": b,
                            "sup": rep.sup,
                            "sup_at": rep.sup_at,
                            "verdict": rep.verdict.as_str(),
                            "rows": rep.radii.iter().zip(rep.ln_lower.iter().zip(&rep.ln_upper)).map(|(r, (lo, hi))| {
                                json!({"r": r, "value_lower": lo.exp(), "value_upper": hi.exp()})
                            }).collect::<Vec<_>>(),
                        }),
                        svg: Some(svg_polylines("ln v(r) M_p(f, r) against ln r", &[("upper", pts)], true)),
                        default: Format::Csv,
                    }
                }
                Mode::Membership => {
                    let f = parse_function(&function, levels)?;
                    let m = membership_probe(&ev, &f, &v, &params, &radii)?;
                    let sup = m.norm.as_ref().map(|n| n.sup);
                    Rendered {
                        csv: format!("verdict,basis\n{},{}\n", m.verdict.as_str(), m.basis),
                        json: json!({
                            "p": p_json(p),
                            "b": b,
                            "verdict": m.verdict.as_str(),
                            "basis": m.basis,
                            "sup": sup,
                        }),
                        svg: None,
                        default: Format::Json,
                    }
                }
                Mode::Orbit => {
                    let f = parse_function(&function, level + 1)?;
                    let s = compute_schedule(level)?;
                    let rep = weighted_orbit_probe(&ev, &f, &v, &params, &s, level, &radii, budget)?;
                    Rendered {
                        csv: rep.to_csv(),
                        json: json!({"p": p_json(p), "b": b, "level": level, "records": rep.records}),
                        svg: None,
                        default: Format::Csv,
                    }
                }
            };
            emit(&common, rendered, out)
        }
    }
}

fn p_json(p: f64) -> Value {
    if p.is_infinite() {
        json!("inf")
    } else {
        json!(p)
    }
}

fn certificate_summary(c: &crate::means::GrowthCertificate) -> Value {
    json!({
        "p": p_json(c.p),
        "eps": c.eps,
        "a": c.a,
        "sup": c.sup,
        "argmax": c.argmax,
        "terminal_slope": c.terminal_slope,
        "verdict": c.verdict.as_str(),
    })
}

fn certificate_json(c: &crate::means::GrowthCertificate) -> Value {
    let mut v = certificate_summary(c);
    v["rows"] = c
        .radii
        .iter()
        .zip(&c.values)
        .map(|(r, x)| json!({"r": r, "value": x}))
        .collect();
    v
}

fn error_json(kind: &str, message: &str) -> String {
    let mut s = serde_json::to_string(&json!({"error": kind, "message": message})).expect("serializable");
    s.push('\n');
    s
}

/// Runs the front end with explicit streams; returns the exit status.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = err.write_all(error_json("InvalidArgument", e.to_string().trim()).as_bytes());
            return 2;
        }
    };
    match execute(cli.cmd, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = err.write_all(error_json(e.kind(), &e.to_string()).as_bytes());
            e.exit_code()
        }
    }
}

/// Runs the front end on the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_with(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}
