//! Box-counting dimension of sampled graphs and planar paths.
//!
//! Graphs are counted column by column: at scale `r = 2^-j` the unit
//! interval is cut into `2^j` columns, and a column whose values span a range
//! `R` contributes `⌈R/r⌉ + 1` cells. The range of a column includes the first
//! sample of the next column, i.e. it covers the piecewise-linear interpolant
//! of the samples, which makes counts nondecreasing as `r` shrinks.
//!
//! Paths are counted as occupied cells of a square grid anchored at the
//! lower-left corner of their bounding box.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{arg_err, Error, Result};
use crate::estimators::{fit_loglog, Component, ExponentReport, FitPolicy, LogLogFit};
use crate::series::SampleGrid;

/// Tolerance applied before rounding `R/r` up, so exact multiples of `r`
/// perturbed by rounding are not pushed into an extra cell.
const CEIL_TOLERANCE: f64 = 1e-9;

const MAX_LEVEL: u32 = 52;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountTarget {
    Graph(Component),
    Path,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxCountCurve {
    /// `r = 2^-j`, descending.
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
    /// Recount with the grid shifted by half a cell, for anchor sensitivity.
    pub shifted_counts: Vec<u64>,
    pub target: CountTarget,
    /// Set when the samples are too sparse for the counts to be trusted as
    /// more than a lower bound.
    pub lower_bound: bool,
}

impl BoxCountCurve {
    /// A curve from given scales and counts, e.g. for synthetic checks.
    pub fn from_counts(scales: Vec<f64>, counts: Vec<u64>, target: CountTarget) -> Result<Self> {
        if scales.len() != counts.len() {
            return Err(arg_err!("{} counts for {} scales", counts.len(), scales.len()));
        }
        if scales.windows(2).any(|w| w[0] <= w[1]) || scales.iter().any(|&r| r.is_nan() || r <= 0.0) {
            return Err(arg_err!("scales must be positive and strictly descending"));
        }
        Ok(Self {
            shifted_counts: counts.clone(),
            scales,
            counts,
            target,
            lower_bound: false,
        })
    }
}

fn check_levels(levels: &[u32]) -> Result<()> {
    if levels.is_empty() {
        return Err(arg_err!("no scales requested"));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) || levels[levels.len() - 1] > MAX_LEVEL {
        return Err(arg_err!("scale levels must be strictly increasing and at most {MAX_LEVEL}"));
    }
    Ok(())
}

fn scale(j: u32) -> f64 {
    libm::exp2(-(j as f64))
}

fn check_monotone(counts: &[u64]) -> Result<()> {
    if counts.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Contract(String::from("box counts decreased under refinement")));
    }
    Ok(())
}

/// Column counts of the graph `{(t, g(t))}` at `r = 2^-j` for each `j` in `levels`.
pub fn boxcount_graph(samples: &SampleGrid, component: Component, levels: &[u32]) -> Result<BoxCountCurve> {
    check_levels(levels)?;
    if component == Component::Complex {
        return Err(arg_err!("graph counting needs a real component"));
    }
    let step = samples
        .spacing()
        .ok_or_else(|| arg_err!("graph counting needs a uniform grid with at least 2 samples"))?;
    let r_min = scale(levels[levels.len() - 1]);
    if step > r_min / 4.0 * (1.0 + 1e-12) {
        return Err(Error::Resolution(alloc::format!(
            "spacing {step} exceeds a quarter of the finest scale {r_min}"
        )));
    }
    let t = samples.t_values();
    let y: Vec<f64> = samples.values().iter().map(|&z| component.project(z)).collect();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(String::from("non-finite sample value")));
    }
    let global_min = y.iter().copied().fold(f64::INFINITY, f64::min);
    // on a periodic grid the value at t = 1 is the value at t = 0
    let closing = samples.periodic().then(|| y[0]);

    let mut scales = Vec::with_capacity(levels.len());
    let mut counts = Vec::with_capacity(levels.len());
    let mut shifted_counts = Vec::with_capacity(levels.len());
    for &j in levels {
        let r = scale(j);
        let columns = 1u64 << j;
        let anchor = global_min - r / 2.0;
        let mut total = 0u64;
        let mut total_shifted = 0u64;
        let mut i = 0;
        while i < t.len() {
            let col = column_of(t[i], columns);
            let (mut lo, mut hi) = (y[i], y[i]);
            let mut e = i + 1;
            while e < t.len() && column_of(t[e], columns) == col {
                lo = lo.min(y[e]);
                hi = hi.max(y[e]);
                e += 1;
            }
            let next = if e < t.len() { Some(y[e]) } else { closing };
            if let Some(v) = next {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            total += cells_spanned(hi - lo, r);
            total_shifted += (libm::floor((hi - anchor) / r) - libm::floor((lo - anchor) / r)) as u64 + 1;
            i = e;
        }
        scales.push(r);
        counts.push(total);
        shifted_counts.push(total_shifted);
    }
    check_monotone(&counts)?;
    Ok(BoxCountCurve {
        scales,
        counts,
        shifted_counts,
        target: CountTarget::Graph(component),
        lower_bound: false,
    })
}

#[inline]
fn column_of(t: f64, columns: u64) -> u64 {
    ((t * columns as f64) as u64).min(columns - 1)
}

#[inline]
fn cells_spanned(range: f64, r: f64) -> u64 {
    libm::ceil(range / r - CEIL_TOLERANCE).max(0.0) as u64 + 1
}

/// Occupied-cell counts of the path `{(Re F(t), Im F(t))}` on grids of mesh
/// `2^-j` anchored at the lower-left corner of the bounding box.
pub fn boxcount_path(samples: &SampleGrid, levels: &[u32]) -> Result<BoxCountCurve> {
    let points: Vec<(f64, f64)> = samples.values().iter().map(|z| (z.re, z.im)).collect();
    path_curve(&points, None, levels)
}

/// [`boxcount_path`] on explicit points with a fixed grid anchor, so that
/// counts of different point sets are comparable cell by cell.
pub fn boxcount_path_anchored(
    points: &[Complex64],
    anchor: Complex64,
    levels: &[u32],
) -> Result<BoxCountCurve> {
    let pts: Vec<(f64, f64)> = points.iter().map(|z| (z.re, z.im)).collect();
    path_curve(&pts, Some((anchor.re, anchor.im)), levels)
}

fn path_curve(points: &[(f64, f64)], anchor: Option<(f64, f64)>, levels: &[u32]) -> Result<BoxCountCurve> {
    check_levels(levels)?;
    if points.is_empty() {
        return Err(arg_err!("empty path"));
    }
    if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return Err(Error::Numeric(String::from("non-finite path point")));
    }
    let (x0, y0) = anchor.unwrap_or_else(|| {
        points.iter().fold((f64::INFINITY, f64::INFINITY), |(a, b), p| (a.min(p.0), b.min(p.1)))
    });
    let r_min = scale(levels[levels.len() - 1]);
    let lower_bound = points.windows(2).any(|w| {
        let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
        libm::sqrt(dx * dx + dy * dy) >= r_min / 2.0
    });

    let mut cells: Vec<(i64, i64)> = Vec::with_capacity(points.len());
    let mut count = |origin: (f64, f64), r: f64| -> u64 {
        cells.clear();
        cells.extend(points.iter().map(|p| {
            (
                libm::floor((p.0 - origin.0) / r) as i64,
                libm::floor((p.1 - origin.1) / r) as i64,
            )
        }));
        cells.sort_unstable();
        cells.dedup();
        cells.len() as u64
    };
    let mut scales = Vec::with_capacity(levels.len());
    let mut counts = Vec::with_capacity(levels.len());
    let mut shifted_counts = Vec::with_capacity(levels.len());
    for &j in levels {
        let r = scale(j);
        scales.push(r);
        counts.push(count((x0, y0), r));
        shifted_counts.push(count((x0 - r / 2.0, y0 - r / 2.0), r));
    }
    check_monotone(&counts)?;
    Ok(BoxCountCurve {
        scales,
        counts,
        shifted_counts,
        target: CountTarget::Path,
        lower_bound,
    })
}

/// Slope of `ln N(r)` against `ln(1/r)`.
pub fn estimate_dimension(curve: &BoxCountCurve, policy: FitPolicy) -> Result<LogLogFit> {
    let start = policy.dropped(curve.scales.len());
    if curve.scales.len() - start < 4 {
        return Err(Error::Degenerate(alloc::format!(
            "{} usable scales, at least 4 required",
            curve.scales.len() - start
        )));
    }
    if curve.counts.contains(&0) {
        return Err(Error::Degenerate(String::from("zero box count")));
    }
    let pts: Vec<(f64, f64)> = curve.scales[start..]
        .iter()
        .zip(&curve.counts[start..])
        .map(|(&r, &n)| (1.0 / r, n as f64))
        .collect();
    fit_loglog(&pts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub slope: f64,
    pub bound: f64,
    /// `bound - slope`; negative when the estimate exceeds the bound.
    pub margin: f64,
    pub pass: bool,
}

impl BoundCheck {
    fn new(slope: f64, bound: f64, slack: f64) -> Self {
        Self {
            slope,
            bound,
            margin: bound - slope,
            pass: slope <= bound + slack,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    pub graph: Option<BoundCheck>,
    pub path: Option<BoundCheck>,
    pub slack: f64,
}

impl InequalityCheck {
    /// True when every performed check passed and at least one was performed.
    pub fn passed(&self) -> bool {
        let checks = [self.graph, self.path];
        checks.iter().any(Option::is_some) && checks.iter().flatten().all(|c| c.pass)
    }
}

/// Compares fitted dimensions against `2 - η` (graph) and `1/η` (path).
/// Failures are recorded, not raised.
pub fn check_theorem_inequalities(
    report: &ExponentReport,
    graph_fit: Option<&LogLogFit>,
    path_fit: Option<&LogLogFit>,
    slack: f64,
) -> InequalityCheck {
    InequalityCheck {
        graph: graph_fit.map(|f| BoundCheck::new(f.slope, report.dim_graph_bound, slack)),
        path: path_fit.map(|f| BoundCheck::new(f.slope, report.dim_path_bound, slack)),
        slack,
    }
}
