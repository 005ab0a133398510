//! Integrality ratios, the sandwich bounds they must respect, convergence
//! tables, and the exponential runtime model `a * b^N`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::geometry::Metric;
use crate::instances::{build_modified, Family, Instance};
use crate::oracle::{held_karp_opt, HELD_KARP_LIMIT};
use crate::subtour::{
    build_explicit_fractional, lp_value_bounds, solve_subtour_lp_with, SubtourOptions,
};
use crate::tour::{closed_form_opt_length, opt_length_bounds};
use crate::GEOM_TOL;

pub const FOUR_THIRDS: f64 = 4.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptSource {
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpSource {
    /// Optimum of the cutting-plane loop.
    CutPlane,
    /// Value of the explicit half-integral point, an upper bound on the
    /// optimum; the resulting ratio is then a lower bound.
    ExplicitUpper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub family: Family,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub big_n: usize,
    pub opt_length: f64,
    pub opt_source: OptSource,
    pub lp_value: f64,
    pub lp_source: LpSource,
    pub ratio: f64,
    /// Tour-length sandwich, `None` where it is not stated.
    pub thm11_ok: Option<bool>,
    /// LP-value sandwich, `None` where it is not stated.
    pub thm12_ok: Option<bool>,
}

impl BoundReport {
    pub fn gap(&self) -> f64 {
        FOUR_THIRDS - self.ratio
    }
}

/// `T*` is optimal on every `T'(n,m)` built with the size assumption.
fn closed_form_applies(inst: &Instance) -> Option<(usize, usize)> {
    match (inst.family(), inst.tetra_params()) {
        (Family::TetraModified, Some(nm)) if !inst.is_forced() => Some(nm),
        _ => None,
    }
}

/// The length and LP sandwiches for `T'(n,m)` are stated for `n <= 3m/2`.
pub fn sandwich_applies(inst: &Instance) -> Option<(usize, usize)> {
    closed_form_applies(inst).filter(|&(n, m)| 2 * n <= 3 * m)
}

/// `lo - tol <= v <= hi + tol`.
pub fn within(v: f64, (lo, hi): (f64, f64), tol: f64) -> bool {
    lo - tol <= v && v <= hi + tol
}

/// Optimum over subtour optimum, Euclidean. Uses the closed-form optimum on
/// `T'(n,m)` and Held-Karp for tiny instances.
pub fn integrality_ratio(inst: &Instance) -> Result<BoundReport> {
    integrality_ratio_with(inst, LpSource::CutPlane)
}

pub fn integrality_ratio_with(inst: &Instance, lp_source: LpSource) -> Result<BoundReport> {
    integrality_ratio_opts(
        inst,
        &RatioOptions {
            lp_source,
            ..RatioOptions::default()
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioOptions {
    pub lp_source: LpSource,
    /// Slack allowed when checking the sandwich bounds.
    pub bound_tol: f64,
    pub subtour: SubtourOptions,
}

impl Default for RatioOptions {
    fn default() -> Self {
        Self {
            lp_source: LpSource::CutPlane,
            bound_tol: GEOM_TOL,
            subtour: SubtourOptions::default(),
        }
    }
}

pub fn integrality_ratio_opts(inst: &Instance, opts: &RatioOptions) -> Result<BoundReport> {
    let lp_source = opts.lp_source;
    let metric = Metric::ExactEuclid;
    let thm = sandwich_applies(inst);
    let (opt_length, opt_source) = match closed_form_applies(inst) {
        Some((n, m)) => (closed_form_opt_length(n, m)?, OptSource::ClosedForm),
        None if inst.len() <= HELD_KARP_LIMIT => {
            (held_karp_opt(inst, metric)?.length, OptSource::Oracle)
        }
        None => {
            return Err(Error::Precondition(format!(
                "no exact optimum available for {} ({} vertices): the closed form needs \
                 T'(n,m), Held-Karp at most {HELD_KARP_LIMIT} vertices",
                inst.name(),
                inst.len()
            )))
        }
    };
    let lp_value = match lp_source {
        LpSource::CutPlane => solve_subtour_lp_with(inst, metric, opts.subtour)?.objective,
        LpSource::ExplicitUpper => build_explicit_fractional(inst)?.objective(inst, metric),
    };
    let (n, m) = inst.tetra_params().unzip();
    Ok(BoundReport {
        family: inst.family(),
        n,
        m,
        big_n: inst.len(),
        opt_length,
        opt_source,
        lp_value,
        lp_source,
        ratio: opt_length / lp_value,
        thm11_ok: thm.map(|(n, _)| within(opt_length, opt_length_bounds(n), opts.bound_tol)),
        thm12_ok: thm.map(|(n, _)| within(lp_value, lp_value_bounds(n), opts.bound_tol)),
    })
}

/// `m = ceil(2n/3) + 1`, the grid's companion to `n`.
pub fn grid_m(n: usize) -> usize {
    (2 * n).div_ceil(3) + 1
}

/// Ratio window implied by the two sandwiches:
/// `[4/3 - 69/X, (4X/3 - 17)/(X - 33)]` with `X = 3n(1 + 1/sqrt 3)`.
pub fn ratio_window(n: usize) -> (f64, f64) {
    let (olo, ohi) = opt_length_bounds(n);
    let (llo, lhi) = lp_value_bounds(n);
    (olo / lhi, ohi / llo)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub m: usize,
    pub big_n: usize,
    pub ratio: f64,
    pub gap: f64,
    pub scaled_gap: f64,
    pub lp_source: LpSource,
}

impl ConvergenceRow {
    pub fn from_report(r: &BoundReport) -> Self {
        Self {
            n: r.n.unwrap_or(0),
            m: r.m.unwrap_or(0),
            big_n: r.big_n,
            ratio: r.ratio,
            gap: r.gap(),
            scaled_gap: r.big_n as f64 * r.gap(),
            lp_source: r.lp_source,
        }
    }
}

/// One row per grid point `(n, m)` of `T'(n,m)`, all with the given LP source.
pub fn convergence_table(
    grid: &[(usize, usize)],
    lp_source: LpSource,
) -> Result<Vec<ConvergenceRow>> {
    grid.iter()
        .map(|&(n, m)| {
            let inst = build_modified(n, m)?;
            Ok(ConvergenceRow::from_report(&integrality_ratio_with(
                &inst, lp_source,
            )?))
        })
        .collect()
}

/// `(min, max)` of `N * gap` if every value is positive.
pub fn scaled_gap_band(rows: &[ConvergenceRow]) -> Option<(f64, f64)> {
    if rows.is_empty()
        || rows
            .iter()
            .any(|r| r.scaled_gap.is_nan() || r.scaled_gap <= 0.0)
    {
        return None;
    }
    let lo = rows
        .iter()
        .map(|r| r.scaled_gap)
        .fold(f64::INFINITY, f64::min);
    let hi = rows
        .iter()
        .map(|r| r.scaled_gap)
        .fold(f64::NEG_INFINITY, f64::max);
    Some((lo, hi))
}

/// Whether `|4/3 - ratio|` strictly decreases along the rows.
pub fn gaps_strictly_decreasing(rows: &[ConvergenceRow]) -> bool {
    rows.windows(2).all(|w| w[1].gap.abs() < w[0].gap.abs())
}

pub const CSV_HEADER: &str = "family,n,m,N,opt,lp,ratio,gap,thm11_ok,thm12_ok";

fn flag(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "na",
    }
}

impl BoundReport {
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<usize>| v.map(|x| format!("{x}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.family.tag(),
            opt(self.n),
            opt(self.m),
            self.big_n,
            sig(self.opt_length, 10),
            sig(self.lp_value, 10),
            sig(self.ratio, 10),
            sig(self.gap(), 10),
            flag(self.thm11_ok),
            flag(self.thm12_ok),
        )
    }
}

/// Header plus one line per report, newline-terminated.
pub fn reports_to_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

/// `seconds = a * b^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuntimeModel {
    pub a: f64,
    pub b: f64,
    /// Root mean square residual of `ln(seconds)`.
    pub residual: f64,
}

impl RuntimeModel {
    /// Reference constants `a = 0.480`, `b = 1.0724` for Concorde on `T(n,m)`.
    pub const REFERENCE: RuntimeModel = RuntimeModel {
        a: 0.480,
        b: 1.0724,
        residual: 0.0,
    };
}

pub const SECONDS_PER_DAY: f64 = 86_400.0;
pub const SECONDS_PER_YEAR: f64 = 365.25 * SECONDS_PER_DAY;

/// Least squares on `ln(seconds) = ln a + N ln b`.
pub fn fit_runtime_model(points: &[(f64, f64)]) -> Result<RuntimeModel> {
    if points.len() < 3 {
        return Err(Error::Precondition(format!(
            "a runtime fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(n, s)) = points.iter().find(|p| !(p.1 > 0.0 && p.1.is_finite())) {
        return Err(Error::Precondition(format!(
            "runtime at N={n} is {s}; all runtimes must be positive"
        )));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| libm::log(p.1)).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition(String::from(
            "a runtime fit needs at least two distinct sizes",
        )));
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mx) * (libm::log(p.1) - my))
        .sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residual = libm::sqrt(
        points
            .iter()
            .map(|p| {
                let r = libm::log(p.1) - (icpt + slope * p.0);
                r * r
            })
            .sum::<f64>()
            / k,
    );
    Ok(RuntimeModel {
        a: libm::exp(icpt),
        b: libm::exp(slope),
        residual,
    })
}

/// `a * b^N` seconds.
pub fn predict_runtime(model: &RuntimeModel, big_n: f64) -> f64 {
    model.a * libm::pow(model.b, big_n)
}
