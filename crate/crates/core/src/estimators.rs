//! Log-log scaling fits and closed-form exponent bounds.
//!
//! Empirical exponents are slopes of least-squares lines through
//! `(ln x, ln y)` pairs:
//!
//! - `α̂` from the growth of `M(x) = max_t |S_k(x, t)|` over a finite `t` grid;
//! - `η̂` from the decay of `D(h) = max_t |g(t + h) - g(t)|` on sampled data.
//!
//! The grid maximum only sees the `t` values it is given, so `α̂` is a lower
//! estimate of the true uniform exponent. Low-denominator rationals are
//! added to the default grid because that is where the large sums live.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::arith::CoefficientSource;
use crate::error::{arg_err, Error, Result};
use crate::series::{self, AlphaHypothesis, SampleGrid, SeriesEvaluator, SeriesSpec, WeierstrassSpec};

pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub n_points: usize,
    pub x_range: (f64, f64),
}

/// Ordinary least squares on `(ln x, ln y)`.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 2 {
        return Err(arg_err!("need at least 2 points, got {}", points.len()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(arg_err!("log-log fit needs strictly positive finite coordinates"));
    }
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(arg_err!("x coordinates must be strictly increasing"));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| libm::log(p.0)).collect();
    let ly: Vec<f64> = points.iter().map(|p| libm::log(p.1)).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Ok(LogLogFit {
        slope,
        intercept,
        rms_residual: libm::sqrt(ss / n),
        n_points: points.len(),
        x_range: (points[0].0, points[points.len() - 1].0),
    })
}

/// Which rungs of a ladder enter a fit.
///
/// Rungs are trimmed at the pre-asymptotic end of the ladder: the smallest
/// `x` for `α̂`, the largest `h` for `η̂`, the coarsest `r` for dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPolicy {
    /// Fraction of rungs to drop, rounded up to whole rungs.
    pub trim_fraction: f64,
}

impl Default for FitPolicy {
    fn default() -> Self {
        Self { trim_fraction: 0.25 }
    }
}

impl FitPolicy {
    pub const fn keep_all() -> Self {
        Self { trim_fraction: 0.0 }
    }

    /// Number of rungs dropped from a ladder of `len` rungs.
    pub fn dropped(&self, len: usize) -> usize {
        let n = libm::ceil(len as f64 * self.trim_fraction.clamp(0.0, 1.0) - 1e-9).max(0.0) as usize;
        n.min(len)
    }
}

/// Checks an `α̂` ladder: at least 4 rungs, each at least twice the previous.
pub fn check_geometric_ladder(x_points: &[f64]) -> Result<()> {
    if x_points.len() < 4 {
        return Err(arg_err!("ladder needs at least 4 rungs, got {}", x_points.len()));
    }
    if x_points.windows(2).any(|w| w[1] < 2.0 * w[0] * (1.0 - 1e-12)) {
        return Err(arg_err!("ladder must be geometric with ratio ≥ 2"));
    }
    Ok(())
}

/// 512 uniform points plus the Farey fractions of denominator at most 16,
/// sorted, inside `[0, 1)`.
pub fn default_t_grid() -> Vec<f64> {
    enriched_t_grid(512)
}

/// `uniform` equispaced points plus the Farey fractions of denominator at
/// most 16, sorted and deduplicated.
pub fn enriched_t_grid(uniform: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = series::uniform_times(uniform);
    for q in 1..=16u32 {
        for p in 0..q {
            if gcd(p, q) == 1 {
                grid.push(p as f64 / q as f64);
            }
        }
    }
    grid.sort_by(|a, b| a.total_cmp(b));
    grid.dedup();
    grid
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Fits `ln M(x)` against `ln x`, dropping rungs with `M(x) = 0`.
pub fn alpha_from_maxima(x_points: &[f64], maxima: &[f64], policy: FitPolicy) -> Result<LogLogFit> {
    let start = policy.dropped(x_points.len());
    let pts: Vec<(f64, f64)> = x_points[start..]
        .iter()
        .zip(&maxima[start..])
        .filter(|(_, &m)| m > 0.0)
        .map(|(&x, &m)| (x, m))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Degenerate(String::from(
            "fewer than 2 rungs with a nonzero exponential-sum maximum",
        )));
    }
    fit_loglog(&pts)
}

/// Growth exponent `α̂` of `max_{t ∈ grid} |S_k(x, t)|` along a geometric ladder.
pub fn estimate_alpha(
    source: &CoefficientSource,
    k: u32,
    x_points: &[f64],
    t_grid: &[f64],
    policy: FitPolicy,
) -> Result<LogLogFit> {
    check_geometric_ladder(x_points)?;
    check_alpha_grid(t_grid)?;
    let profile = series::exp_sum_prefix_profile(source, k, x_points, t_grid)?;
    let maxima: Vec<f64> = profile.iter().map(|row| row.iter().copied().fold(0.0, f64::max)).collect();
    alpha_from_maxima(x_points, &maxima, policy)
}

/// Checks an `α̂` time grid: non-empty, inside `[0, 1)`.
pub fn check_alpha_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() || t_grid.iter().any(|t| !(0.0..1.0).contains(t)) {
        return Err(arg_err!("t grid must be a non-empty subset of [0, 1)"));
    }
    Ok(())
}

/// `α̂` for a Weierstrass series through its lacunary exponential sum
/// `Σ_{j ≤ K} f(j) (ab)^j e^{2πi b^j t}`, sampled at `x = b^K` for each `K` in `rungs`.
pub fn estimate_alpha_weierstrass(
    spec: &WeierstrassSpec,
    rungs: &[u32],
    t_grid: &[f64],
    policy: FitPolicy,
) -> Result<LogLogFit> {
    let (x_points, maxima) = weierstrass_alpha_maxima(spec, rungs, t_grid, |ev, cut, ts| {
        ts.iter()
            .map(|&t| ev.prefix_sums(t, cut))
            .collect::<Result<Vec<_>>>()
    })?;
    alpha_from_maxima(&x_points, &maxima, policy)
}

/// Shared driver for [`estimate_alpha_weierstrass`]; `sweep` evaluates the
/// prefix sums for every `t` (sequentially or in parallel).
pub fn weierstrass_alpha_maxima<F>(
    spec: &WeierstrassSpec,
    rungs: &[u32],
    t_grid: &[f64],
    sweep: F,
) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: FnOnce(&SeriesEvaluator, &[u64], &[f64]) -> Result<Vec<Vec<Complex64>>>,
{
    if rungs.len() < 4 || rungs.windows(2).any(|w| w[0] >= w[1]) || rungs[0] == 0 {
        return Err(arg_err!("need at least 4 strictly increasing positive rungs"));
    }
    check_alpha_grid(t_grid)?;
    let max_rung = rungs[rungs.len() - 1];
    let ev = SeriesEvaluator::weierstrass_exp_sum(spec, max_rung)?.with_table_for(t_grid)?;
    let cutoffs: Vec<u64> = rungs.iter().map(|&r| r as u64).collect();
    let sums = sweep(&ev, &cutoffs, t_grid)?;
    let mut maxima = alloc::vec![0.0f64; rungs.len()];
    for row in &sums {
        for (m, s) in maxima.iter_mut().zip(row) {
            *m = m.max(s.norm());
        }
    }
    let x_points = rungs
        .iter()
        .map(|&r| libm::pow(spec.b as f64, r as f64))
        .collect();
    Ok((x_points, maxima))
}

/// Real projection (or the complex value itself) used for increments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Abs,
    Re,
    Im,
    Complex,
}

impl Component {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Abs => "abs",
            Self::Re => "re",
            Self::Im => "im",
            Self::Complex => "complex",
        }
    }

    /// Real value for `Abs`, `Re`, `Im`; `Complex` maps to the modulus.
    pub fn project(&self, z: Complex64) -> f64 {
        match self {
            Self::Abs | Self::Complex => z.norm(),
            Self::Re => z.re,
            Self::Im => z.im,
        }
    }

    /// `|g(b) - g(a)|` for this component.
    pub fn increment(&self, a: Complex64, b: Complex64) -> f64 {
        match self {
            Self::Complex => (b - a).norm(),
            _ => libm::fabs(self.project(b) - self.project(a)),
        }
    }
}

/// `D(h) = max_t |g(t + h) - g(t)|` for each `h`, wrapping mod 1 on
/// periodic grids and using only in-range pairs otherwise.
pub fn holder_increments(
    grid: &SampleGrid,
    h_ladder: &[f64],
    component: Component,
) -> Result<Vec<f64>> {
    let step = grid
        .spacing()
        .ok_or_else(|| arg_err!("Hölder estimation needs a uniform grid"))?;
    let values = grid.values();
    let len = values.len();
    let mut out = Vec::with_capacity(h_ladder.len());
    for &h in h_ladder {
        let shift_f = h / step;
        let shift = libm::round(shift_f) as usize;
        if h.is_nan() || h <= 0.0 || libm::fabs(shift_f - shift as f64) > 1e-6 || shift < 2 {
            return Err(arg_err!(
                "h = {h} must be a multiple of the grid spacing {step} spanning at least 2 spacings"
            ));
        }
        if shift >= len {
            return Err(arg_err!("h = {h} exceeds the sampled range"));
        }
        let pairs = if grid.periodic() { len } else { len - shift };
        let d = (0..pairs)
            .map(|i| component.increment(values[i], values[(i + shift) % len]))
            .fold(0.0, f64::max);
        out.push(d);
    }
    Ok(out)
}

/// Hölder exponent `η̂` as the slope of `ln D(h)` against `ln h`.
pub fn estimate_holder(
    grid: &SampleGrid,
    h_ladder: &[f64],
    component: Component,
    policy: FitPolicy,
) -> Result<LogLogFit> {
    if h_ladder.len() < 4 {
        return Err(arg_err!("h ladder needs at least 4 rungs, got {}", h_ladder.len()));
    }
    let mut hs = h_ladder.to_vec();
    hs.sort_by(|a, b| a.total_cmp(b));
    let d = holder_increments(grid, &hs, component)?;
    if d.contains(&0.0) {
        return Err(Error::Degenerate(String::from("zero increment at some h: no scaling to fit")));
    }
    let keep = hs.len() - policy.dropped(hs.len());
    if keep < 2 {
        return Err(Error::Degenerate(String::from("fewer than 2 rungs left after trimming")));
    }
    let pts: Vec<(f64, f64)> = hs[..keep].iter().copied().zip(d[..keep].iter().copied()).collect();
    fit_loglog(&pts)
}

/// Dyadic ladder `2^-j1, …, 2^-j0` in ascending order.
pub fn dyadic_ladder(j0: u32, j1: u32) -> Vec<f64> {
    (j0..=j1).rev().map(|j| libm::exp2(-(j as f64))).collect()
}

/// Hypothesis behind an exponent bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Assumption {
    Unconditional,
    Grh,
    SquareRootConjecture,
    UserSupplied,
}

impl Assumption {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Unconditional => "unconditional",
            Self::Grh => "grh",
            Self::SquareRootConjecture => "conjecture",
            Self::UserSupplied => "user",
        }
    }
}

/// One cell of the exponent table for `F_{k,k}(μ; t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryRow {
    pub k: u32,
    pub assumption: Assumption,
    pub alpha: Rational,
    pub eta: Rational,
    pub dim_graph_bound: Rational,
    pub dim_path_bound: Rational,
    /// The exponent is the limit of admissible values `η - ε`.
    pub epsilon_limit: bool,
}

/// Exponential-sum exponent for `Σ μ(n) e^{2πi n^k t}` under an assumption.
pub fn moebius_alpha(k: u32, assumption: Assumption) -> Result<Rational> {
    if k == 0 || k > 60 {
        return Err(arg_err!("k must lie in 1..=60, got {k}"));
    }
    Ok(match assumption {
        Assumption::Unconditional => Rational::from_integer(1),
        Assumption::Grh if k == 1 => Rational::new(3, 4),
        Assumption::Grh => Rational::from_integer(1) - Rational::new(1, 1i128 << (2 * k - 1)),
        Assumption::SquareRootConjecture => Rational::new(1, 2),
        Assumption::UserSupplied => {
            return Err(arg_err!("user-supplied exponents have no table value"));
        }
    })
}

/// Hölder exponent and dimension bound for `F_{k,k}(μ; t)`.
pub fn theoretical_exponents(k: u32, assumption: Assumption) -> Result<TheoryRow> {
    let alpha = moebius_alpha(k, assumption)?;
    let kk = Rational::from_integer(k as i128);
    if !(alpha > Rational::from_integer(0) && alpha < kk) {
        return Err(Error::NotAvailable(alloc::format!(
            "no {} exponent for k = {k}",
            assumption.name()
        )));
    }
    let eta = (kk - alpha) / kk;
    Ok(TheoryRow {
        k,
        assumption,
        alpha,
        eta,
        dim_graph_bound: Rational::from_integer(2) - eta,
        dim_path_bound: eta.recip(),
        epsilon_limit: matches!(assumption, Assumption::Grh | Assumption::SquareRootConjecture),
    })
}

/// Exact bounds, present when `α` and `p` are rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactBounds {
    pub eta: Rational,
    pub dim_graph: Rational,
    pub dim_path: Rational,
}

/// Empirical fits next to the bounds implied by an exponential-sum hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentReport {
    pub alpha_hat: Option<LogLogFit>,
    pub eta_hat: Option<LogLogFit>,
    pub alpha: f64,
    /// `(p - α) / k`.
    pub eta_theory: f64,
    /// `2 - η`.
    pub dim_graph_bound: f64,
    /// `1 / η`.
    pub dim_path_bound: f64,
    pub assumption_label: Assumption,
    pub epsilon_limit: bool,
    pub exact: Option<ExactBounds>,
}

/// Bounds from a hypothesis `|S_k(x,t)| ≤ C x^α` for the series `F_{k,p}`.
pub fn theorem_bounds(spec: &SeriesSpec) -> Result<ExponentReport> {
    let hyp = spec
        .alpha_hypothesis
        .as_ref()
        .ok_or_else(|| Error::Contract(String::from("no exponential-sum hypothesis on series")))?;
    bounds_for(spec.k, spec.p, hyp)
}

/// Same as [`theorem_bounds`] for explicit `(k, p)`.
pub fn bounds_for(k: u32, p: f64, hyp: &AlphaHypothesis) -> Result<ExponentReport> {
    if k == 0 {
        return Err(arg_err!("k must be at least 1"));
    }
    series::admissible(k, p, hyp.alpha)?;
    let eta = (p - hyp.alpha) / k as f64;
    let exact = match (hyp.exact, exact_integer(p)) {
        (Some(a), Some(p)) => {
            let eta = (Rational::from_integer(p) - a) / Rational::from_integer(k as i128);
            Some(ExactBounds {
                eta,
                dim_graph: Rational::from_integer(2) - eta,
                dim_path: eta.recip(),
            })
        }
        _ => None,
    };
    Ok(ExponentReport {
        alpha_hat: None,
        eta_hat: None,
        alpha: hyp.alpha,
        eta_theory: eta,
        dim_graph_bound: 2.0 - eta,
        dim_path_bound: 1.0 / eta,
        assumption_label: hyp.assumption,
        epsilon_limit: hyp.epsilon_limit,
        exact,
    })
}

fn exact_integer(p: f64) -> Option<i128> {
    (p == libm::floor(p) && libm::fabs(p) < 1e15).then_some(p as i128)
}
