//! Exponential sums, truncated series, and the named series families.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::arith::CoefficientSource;
use crate::error::{arg_err, Error, Result};
use crate::estimators::{Assumption, Rational};
use crate::phase::{self, Multiplier, PhaseTable, ReducedTime, MAX_TABLE_SHIFT};
use crate::sum::ComplexSum;

/// Assumed bound `|S_k(x,t)| ≤ C x^α` for all `x ≥ 1` and real `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaHypothesis {
    pub alpha: f64,
    pub constant: f64,
    /// Exact value of `alpha` when it is rational and known as such.
    pub exact: Option<Rational>,
    pub assumption: Assumption,
    /// Only `alpha + ε` is assumed, for every `ε > 0`.
    pub epsilon_limit: bool,
}

impl AlphaHypothesis {
    pub fn new(alpha: f64, constant: f64) -> Self {
        Self {
            alpha,
            constant,
            exact: None,
            assumption: Assumption::UserSupplied,
            epsilon_limit: false,
        }
    }

    pub fn labelled(mut self, assumption: Assumption, epsilon_limit: bool) -> Self {
        self.assumption = assumption;
        self.epsilon_limit = epsilon_limit;
        self
    }

    pub fn rational(alpha: Rational, constant: f64) -> Self {
        Self {
            alpha: *alpha.numer() as f64 / *alpha.denom() as f64,
            constant,
            exact: Some(alpha),
            assumption: Assumption::UserSupplied,
            epsilon_limit: false,
        }
    }
}

/// The series `F_{k,p}(f;t) = Σ f(n) e^{2πi n^k t} / n^p`.
#[derive(Debug, Clone)]
pub struct SeriesSpec {
    pub source: CoefficientSource,
    pub k: u32,
    pub p: f64,
    pub alpha_hypothesis: Option<AlphaHypothesis>,
}

impl SeriesSpec {
    pub fn new(source: CoefficientSource, k: u32, p: f64) -> Result<Self> {
        if k == 0 {
            return Err(arg_err!("frequency exponent k must be at least 1"));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(arg_err!("weight exponent p must be positive, got {p}"));
        }
        Ok(Self {
            source,
            k,
            p,
            alpha_hypothesis: None,
        })
    }

    /// Attaches an exponential-sum hypothesis, checking
    /// `max(0, p - k) < α < p` and `C > 0`.
    pub fn with_hypothesis(mut self, hyp: AlphaHypothesis) -> Result<Self> {
        admissible(self.k, self.p, hyp.alpha)?;
        if !(hyp.constant.is_finite() && hyp.constant > 0.0) {
            return Err(Error::Contract(alloc::format!(
                "hypothesis constant must be positive, got {}",
                hyp.constant
            )));
        }
        self.alpha_hypothesis = Some(hyp);
        Ok(self)
    }

    /// Constants `(C̃, α̃)` of the equivalent `k = p = 1` series obtained by
    /// spreading `m^{k-p} f(m)` onto the indices `n = m^k`.
    pub fn transformed(&self) -> Result<(f64, f64)> {
        let hyp = self.hypothesis()?;
        let k = self.k as f64;
        let shifted = hyp.alpha + k - self.p;
        let c_tilde = hyp.constant * (1.0 + libm::fabs(k - self.p) / shifted);
        Ok((c_tilde, shifted / k))
    }

    fn hypothesis(&self) -> Result<&AlphaHypothesis> {
        self.alpha_hypothesis
            .as_ref()
            .ok_or_else(|| Error::Contract(String::from("no exponential-sum hypothesis on series")))
    }
}

pub fn admissible(k: u32, p: f64, alpha: f64) -> Result<()> {
    let lo = libm::fmax(0.0, p - k as f64);
    if alpha.is_finite() && lo < alpha && alpha < p {
        Ok(())
    } else {
        Err(Error::Contract(alloc::format!(
            "alpha = {alpha} outside admissible window ({lo}, {p}) for k = {k}"
        )))
    }
}

/// Evaluated samples of a series on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    t_values: Vec<f64>,
    values: Vec<Complex64>,
    n_used: u64,
    tail_bound: Option<f64>,
    periodic: bool,
}

impl SampleGrid {
    /// Builds a grid from sample times and values.
    ///
    /// The grid is marked periodic when it is uniform, starts at 0 and its
    /// next point would be 1, so increments may wrap around.
    pub fn new(
        t_values: Vec<f64>,
        values: Vec<Complex64>,
        n_used: u64,
        tail_bound: Option<f64>,
    ) -> Result<Self> {
        check_times(&t_values)?;
        if values.len() != t_values.len() {
            return Err(arg_err!(
                "{} values for {} sample times",
                values.len(),
                t_values.len()
            ));
        }
        let periodic = match uniform_spacing(&t_values) {
            Some(step) => t_values[0] == 0.0 && libm::fabs(t_values[t_values.len() - 1] + step - 1.0) < 1e-12,
            None => false,
        };
        Ok(Self {
            t_values,
            values,
            n_used,
            tail_bound,
            periodic,
        })
    }

    /// Samples of a plain function, with no truncation metadata.
    pub fn from_fn(t_values: Vec<f64>, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = t_values.iter().map(|&t| f(t)).collect();
        Self::new(t_values, values, 0, None)
    }

    pub fn t_values(&self) -> &[f64] {
        &self.t_values
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn n_used(&self) -> u64 {
        self.n_used
    }

    pub fn tail_bound(&self) -> Option<f64> {
        self.tail_bound
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    pub fn len(&self) -> usize {
        self.t_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_values.is_empty()
    }

    /// Grid spacing when the times are uniformly spaced.
    pub fn spacing(&self) -> Option<f64> {
        uniform_spacing(&self.t_values)
    }

    /// Restricts the grid to the index range `range`.
    pub fn slice(&self, range: core::ops::Range<usize>) -> Result<Self> {
        Self::new(
            self.t_values[range.clone()].to_vec(),
            self.values[range].to_vec(),
            self.n_used,
            self.tail_bound,
        )
    }
}

/// `j / m` for `0 ≤ j < m`: one period, suitable for wrapped increments.
pub fn uniform_times(m: usize) -> Vec<f64> {
    (0..m).map(|j| j as f64 / m as f64).collect()
}

/// `j / m` for `0 ≤ j ≤ m`: the closed interval.
pub fn closed_times(m: usize) -> Vec<f64> {
    (0..=m).map(|j| j as f64 / m as f64).collect()
}

fn check_times(t: &[f64]) -> Result<()> {
    if t.is_empty() {
        return Err(arg_err!("empty sample grid"));
    }
    if t.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(arg_err!("sample times must lie in [0, 1]"));
    }
    if t.windows(2).any(|w| w[0] >= w[1]) {
        return Err(arg_err!("sample times must be strictly increasing"));
    }
    Ok(())
}

fn uniform_spacing(t: &[f64]) -> Option<f64> {
    if t.len() < 2 {
        return None;
    }
    let step = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    let tol = step * 1e-9;
    t.windows(2)
        .all(|w| libm::fabs(w[1] - w[0] - step) <= tol)
        .then_some(step)
}

/// Terms per block in multi-time sweeps, sized so a block of hot term data
/// stays in cache while every time is advanced through it.
const SWEEP_BLOCK: usize = 2048;

/// Precomputed weights and phase multipliers for a fixed list of terms.
///
/// Evaluation at a time `t` sums the terms in their fixed order with
/// compensated accumulation, so values are reproducible bit-for-bit. Terms
/// with a zero coefficient are dropped once, at construction.
#[derive(Debug, Clone)]
pub struct SeriesEvaluator {
    /// Position used for prefix cut-offs (`n` for ordinary series).
    index: Vec<u64>,
    power: Vec<Multiplier>,
    /// `power mod 2^64`, enough for table lookups.
    low: Vec<u64>,
    weight: Vec<Complex64>,
    table: Option<PhaseTable>,
}

impl SeriesEvaluator {
    fn with_capacity(len: usize, n_max: u64) -> Result<Self> {
        let mut ev = Self {
            index: Vec::new(),
            power: Vec::new(),
            low: Vec::new(),
            weight: Vec::new(),
            table: None,
        };
        let fail = |_| Error::Resource {
            what: String::from("term buffer allocation failed"),
            required: n_max,
        };
        ev.index.try_reserve_exact(len).map_err(fail)?;
        ev.power.try_reserve_exact(len).map_err(fail)?;
        ev.low.try_reserve_exact(len).map_err(fail)?;
        ev.weight.try_reserve_exact(len).map_err(fail)?;
        Ok(ev)
    }

    fn push(&mut self, index: u64, power: Multiplier, weight: Complex64) {
        self.index.push(index);
        self.low.push(power.low as u64);
        self.power.push(power);
        self.weight.push(weight);
    }

    /// Terms `f(n) e^{2πi n^k t} / n^p` for `1 ≤ n ≤ n_max`; `p = 0` gives
    /// the plain exponential sum.
    pub fn series(source: &CoefficientSource, k: u32, p: f64, n_max: u64) -> Result<Self> {
        if k == 0 {
            return Err(arg_err!("frequency exponent k must be at least 1"));
        }
        let coeffs = source.coefficients(n_max)?;
        let nonzero = coeffs.iter().filter(|c| **c != Complex64::new(0.0, 0.0)).count();
        let mut ev = Self::with_capacity(nonzero, n_max)?;
        for (i, c) in coeffs.into_iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let n = i as u64 + 1;
            let weight = if p == 0.0 {
                c
            } else {
                c / libm::pow(n as f64, p)
            };
            ev.push(n, Multiplier::power(n, k), weight);
        }
        Ok(ev)
    }

    /// Terms `f(j) a^j e^{2πi b^j t}` for `1 ≤ j ≤ count`.
    pub fn weierstrass(spec: &WeierstrassSpec, count: u32) -> Result<Self> {
        Self::lacunary(spec, count, spec.a)
    }

    /// Terms `f(j) (ab)^j e^{2πi b^j t}`: the exponential sum of the
    /// Weierstrass series viewed as a `k = p = 1` series supported on powers of `b`.
    pub fn weierstrass_exp_sum(spec: &WeierstrassSpec, count: u32) -> Result<Self> {
        Self::lacunary(spec, count, spec.a * spec.b as f64)
    }

    fn lacunary(spec: &WeierstrassSpec, count: u32, ratio: f64) -> Result<Self> {
        if count == 0 {
            return Err(arg_err!("at least one term required"));
        }
        let coeffs = spec.source.coefficients(count as u64)?;
        let mut ev = Self::with_capacity(coeffs.len(), count as u64)?;
        for (i, c) in coeffs.into_iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let j = i as u32 + 1;
            ev.push(j as u64, Multiplier::power(spec.b, j), c * libm::pow(ratio, j as f64));
        }
        Ok(ev)
    }

    /// Attaches a phase lookup table covering every dyadic time in `times`
    /// whose denominator is at most `2^MAX_TABLE_SHIFT`. Values are unchanged.
    pub fn with_table_for(mut self, times: &[f64]) -> Result<Self> {
        let mut shift = 0;
        for &t in times {
            let s = ReducedTime::new(t)?.shift();
            if s <= MAX_TABLE_SHIFT {
                shift = shift.max(s);
            }
        }
        self.table = Some(PhaseTable::new(shift)?);
        Ok(self)
    }

    pub fn term_count(&self) -> usize {
        self.index.len()
    }

    /// Sum of all terms at `t`.
    pub fn eval(&self, t: f64) -> Result<Complex64> {
        let rt = ReducedTime::new(t)?;
        let mut acc = ComplexSum::new();
        self.accumulate(&rt, 0..self.term_count(), &mut acc);
        Ok(acc.value())
    }

    /// Partial sums at every cut-off in `cutoffs` (ascending): entry `i`
    /// sums the terms with `index ≤ cutoffs[i]`. One pass over the terms.
    pub fn prefix_sums(&self, t: f64, cutoffs: &[u64]) -> Result<Vec<Complex64>> {
        let mut out = self.prefix_sums_many(&[t], cutoffs)?;
        Ok(out.pop().unwrap_or_default())
    }

    /// [`SeriesEvaluator::prefix_sums`] for several times at once, one row
    /// per time. Terms are swept in cache-sized blocks across all times;
    /// each time still sees the terms in ascending order, so every row is
    /// bit-identical to a separate `prefix_sums` call.
    pub fn prefix_sums_many(&self, times: &[f64], cutoffs: &[u64]) -> Result<Vec<Vec<Complex64>>> {
        if cutoffs.windows(2).any(|w| w[0] > w[1]) {
            return Err(arg_err!("cut-offs must be ascending"));
        }
        let reduced = times
            .iter()
            .map(|&t| ReducedTime::new(t))
            .collect::<Result<Vec<_>>>()?;
        let bounds: Vec<usize> = cutoffs
            .iter()
            .map(|&cut| self.index.partition_point(|&i| i <= cut))
            .collect();
        let mut accs = alloc::vec![ComplexSum::new(); times.len()];
        let mut out: Vec<Vec<Complex64>> = times.iter().map(|_| Vec::with_capacity(cutoffs.len())).collect();
        let mut start = 0;
        for &end in &bounds {
            let mut lo = start;
            while lo < end {
                let hi = (lo + SWEEP_BLOCK).min(end);
                for (rt, acc) in reduced.iter().zip(accs.iter_mut()) {
                    self.accumulate(rt, lo..hi, acc);
                }
                lo = hi;
            }
            for (row, acc) in out.iter_mut().zip(&accs) {
                row.push(acc.value());
            }
            start = end;
        }
        Ok(out)
    }

    #[inline]
    fn accumulate(&self, t: &ReducedTime, range: core::ops::Range<usize>, acc: &mut ComplexSum) {
        let weights = &self.weight[range.clone()];
        if let Some(table) = &self.table {
            if let Some(prepared) = table.prepare(t) {
                for (&low, &w) in self.low[range].iter().zip(weights) {
                    acc.add(w * table.get(prepared.index_low(low)));
                }
                return;
            }
        }
        for (m, &w) in self.power[range].iter().zip(weights) {
            acc.add(w * phase::phase(m, t));
        }
    }
}

fn floor_index(x: f64) -> Result<u64> {
    if !(x.is_finite() && x >= 1.0) {
        return Err(arg_err!("summation bound must be a finite real ≥ 1, got {x}"));
    }
    Ok(libm::floor(x) as u64)
}

/// `S_k(f; x, t) = Σ_{1 ≤ n ≤ x} f(n) e^{2πi n^k t}`.
pub fn exp_sum(source: &CoefficientSource, k: u32, x: f64, t: f64) -> Result<Complex64> {
    let n = floor_index(x)?;
    SeriesEvaluator::series(source, k, 0.0, n)?.eval(t)
}

/// Matrix of `|S_k(x_i, t_j)|`, rows indexed by `x_i`, columns by `t_j`.
///
/// Entries equal fresh [`exp_sum`] calls exactly: both accumulate the same
/// terms in the same order.
pub fn exp_sum_prefix_profile(
    source: &CoefficientSource,
    k: u32,
    x_points: &[f64],
    t_grid: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let (evaluator, cutoffs) = profile_evaluator(source, k, x_points, t_grid)?;
    let sums = evaluator.prefix_sums_many(t_grid, &cutoffs)?;
    let mut out = alloc::vec![alloc::vec![0.0; t_grid.len()]; x_points.len()];
    for (j, row) in sums.iter().enumerate() {
        for (i, s) in row.iter().enumerate() {
            out[i][j] = s.norm();
        }
    }
    Ok(out)
}

/// Evaluator and integer cut-offs shared by the sequential and parallel
/// profile sweeps.
pub fn profile_evaluator(
    source: &CoefficientSource,
    k: u32,
    x_points: &[f64],
    t_grid: &[f64],
) -> Result<(SeriesEvaluator, Vec<u64>)> {
    if x_points.is_empty() || t_grid.is_empty() {
        return Err(arg_err!("x points and t grid must be non-empty"));
    }
    if x_points.windows(2).any(|w| w[0] > w[1]) {
        return Err(arg_err!("x points must be ascending"));
    }
    let cutoffs = x_points
        .iter()
        .map(|&x| floor_index(x))
        .collect::<Result<Vec<_>>>()?;
    let n_max = cutoffs[cutoffs.len() - 1];
    let evaluator = SeriesEvaluator::series(source, k, 0.0, n_max)?.with_table_for(t_grid)?;
    Ok((evaluator, cutoffs))
}

/// `F_{k,p,N}(t) = Σ_{n ≤ N} f(n) e^{2πi n^k t} / n^p`.
pub fn partial_sum(spec: &SeriesSpec, n: u64, t: f64) -> Result<Complex64> {
    if n == 0 {
        return Err(arg_err!("truncation N must be at least 1"));
    }
    SeriesEvaluator::series(&spec.source, spec.k, spec.p, n)?.eval(t)
}

/// Integer `k`-th root: the largest `r` with `r^k ≤ v`.
fn integer_root(v: u64, k: u32) -> u64 {
    if k == 1 || v <= 1 {
        return v;
    }
    let mut r = libm::floor(libm::pow(v as f64, 1.0 / k as f64)) as u64;
    let fits = |r: u64| (r as u128).checked_pow(k).is_some_and(|p| p <= v as u128);
    while r > 0 && !fits(r) {
        r -= 1;
    }
    while fits(r + 1) {
        r += 1;
    }
    r
}

/// Truncation matched to an increment `h`: `⌊1/h⌋` terms for `k = 1`, and
/// in general the largest `N ≥ 1` with `N^k ≤ 1/h`.
pub fn choose_truncation(spec: &SeriesSpec, target_h: f64) -> Result<u64> {
    if !(target_h > 0.0 && target_h <= 1.0) {
        return Err(arg_err!("h must lie in (0, 1], got {target_h}"));
    }
    let inv = libm::floor(1.0 / target_h);
    let inv = if inv >= u64::MAX as f64 { u64::MAX } else { inv as u64 };
    Ok(integer_root(inv, spec.k).max(1))
}

/// Majorant of `sup_t |F_{k,p}(t) - F_{k,p,N}(t)|`:
/// `C̃ (2 + 1/(1 - α̃)) N^{k(α̃ - 1)}`.
pub fn tail_bound(spec: &SeriesSpec, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(arg_err!("truncation N must be at least 1"));
    }
    let (c_tilde, a_tilde) = spec.transformed()?;
    Ok(tail_prefactor(c_tilde, a_tilde) * libm::pow(n as f64, spec.k as f64 * (a_tilde - 1.0)))
}

fn tail_prefactor(c_tilde: f64, a_tilde: f64) -> f64 {
    c_tilde * (2.0 + 1.0 / (1.0 - a_tilde))
}

/// Number of terms for a target accuracy and the certified tail, if any.
///
/// With a hypothesis: the smallest `N` whose [`tail_bound`] is at most
/// `accuracy`. Without one: `N = ⌈1/accuracy⌉` and no certificate.
pub fn plan_truncation(spec: &SeriesSpec, accuracy: f64) -> Result<(u64, Option<f64>)> {
    if !(accuracy.is_finite() && accuracy > 0.0) {
        return Err(arg_err!("accuracy must be positive, got {accuracy}"));
    }
    let (n, tail) = match spec.alpha_hypothesis {
        None => {
            let n = libm::ceil(1.0 / accuracy);
            (to_count(n)?, None)
        }
        Some(_) => {
            let (c_tilde, a_tilde) = spec.transformed()?;
            let rate = spec.k as f64 * (1.0 - a_tilde);
            let guess = libm::ceil(libm::pow(tail_prefactor(c_tilde, a_tilde) / accuracy, 1.0 / rate));
            let mut n = to_count(guess.max(1.0))?;
            while n > 1 && tail_bound(spec, n - 1)? <= accuracy {
                n -= 1;
            }
            while tail_bound(spec, n)? > accuracy {
                n += 1;
            }
            (n, Some(tail_bound(spec, n)?))
        }
    };
    if let Some(avail) = spec.source.available() {
        if n > avail {
            return Err(Error::Resource {
                what: alloc::format!(
                    "accuracy {accuracy} needs more coefficients than the {avail} available"
                ),
                required: n,
            });
        }
    }
    Ok((n, tail))
}

fn to_count(n: f64) -> Result<u64> {
    if n.is_finite() && n < 1e18 {
        Ok(n as u64)
    } else {
        Err(Error::Resource {
            what: String::from("truncation beyond representable range"),
            required: u64::MAX,
        })
    }
}

/// Evaluates the series on `t_values` to the requested accuracy.
pub fn evaluate_grid(spec: &SeriesSpec, t_values: &[f64], accuracy: f64) -> Result<SampleGrid> {
    check_times(t_values)?;
    let (n, tail) = plan_truncation(spec, accuracy)?;
    let evaluator =
        SeriesEvaluator::series(&spec.source, spec.k, spec.p, n)?.with_table_for(t_values)?;
    let values = t_values
        .iter()
        .map(|&t| evaluator.eval(t))
        .collect::<Result<Vec<_>>>()?;
    SampleGrid::new(t_values.to_vec(), values, n, tail)
}

/// Generalised Weierstrass series `W_{a,b}(f;t) = Σ_{j ≥ 1} f(j) a^j e^{2πi b^j t}`.
#[derive(Debug, Clone)]
pub struct WeierstrassSpec {
    pub a: f64,
    pub b: u64,
    pub source: CoefficientSource,
}

impl WeierstrassSpec {
    pub fn new(a: f64, b: u64, source: CoefficientSource) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(arg_err!("Weierstrass a must lie in (0, 1), got {a}"));
        }
        if b < 2 || a * b as f64 <= 1.0 {
            return Err(arg_err!("Weierstrass b must be an integer ≥ 2 with a·b > 1"));
        }
        if source.declared_bound().is_none() {
            return Err(Error::Contract(String::from(
                "Weierstrass coefficients must be bounded",
            )));
        }
        Ok(Self { a, b, source })
    }

    /// Exponential-sum exponent of the lacunary representation, `1 + log_b a`.
    pub fn alpha(&self) -> f64 {
        1.0 + libm::log2(self.a) / libm::log2(self.b as f64)
    }

    /// Hölder exponent `-log_b a`.
    pub fn holder_exponent(&self) -> f64 {
        -libm::log2(self.a) / libm::log2(self.b as f64)
    }

    /// Bound on the remainder after `terms` terms: `B a^{terms+1} / (1 - a)`.
    pub fn remainder_bound(&self, terms: u32) -> f64 {
        let bound = self.source.declared_bound().unwrap_or(f64::INFINITY);
        bound * libm::pow(self.a, terms as f64 + 1.0) / (1.0 - self.a)
    }

    /// Fewest terms whose remainder bound is at most `accuracy`, capped at 64.
    pub fn terms_for_accuracy(&self, accuracy: f64) -> Result<u32> {
        if !(accuracy.is_finite() && accuracy > 0.0) {
            return Err(arg_err!("accuracy must be positive, got {accuracy}"));
        }
        (1..=64)
            .find(|&m| self.remainder_bound(m) <= accuracy)
            .ok_or_else(|| Error::Resource {
                what: alloc::format!("Weierstrass accuracy {accuracy} needs more than 64 terms"),
                required: 65,
            })
    }
}

/// `Σ_{j=1}^{terms} f(j) a^j e^{2πi b^j t}`. Phases `b^j t mod 1` are reduced
/// exactly, so any `terms` is accepted.
pub fn weierstrass_eval(spec: &WeierstrassSpec, t: f64, terms: u32) -> Result<Complex64> {
    SeriesEvaluator::weierstrass(spec, terms)?.eval(t)
}

/// Generalised Riemann series `Σ f(n) e^{2πi n^2 t} / n^2` to the given
/// accuracy, certified through the trivial bound `|S_2(x,t)| ≤ B x`.
pub fn riemann_eval(source: &CoefficientSource, t: f64, accuracy: f64) -> Result<Complex64> {
    let spec = riemann_spec(source.clone())?;
    let grid = evaluate_grid(&spec, &[t], accuracy)?;
    Ok(grid.values()[0])
}

/// `k = p = 2` with the hypothesis `α = 1`, `C = B`.
pub fn riemann_spec(source: CoefficientSource) -> Result<SeriesSpec> {
    let bound = source.declared_bound().ok_or_else(|| {
        Error::Contract(String::from("Riemann series requires bounded coefficients"))
    })?;
    SeriesSpec::new(source, 2, 2.0)?
        .with_hypothesis(AlphaHypothesis::rational(Rational::from_integer(1), bound.max(f64::MIN_POSITIVE)))
}

/// A real weight `φ` with derivative, for summation by parts.
pub trait SmoothWeight {
    fn value(&self, u: f64) -> f64;
    fn derivative(&self, u: f64) -> f64;
}

/// `φ(u) = u^exponent`.
#[derive(Debug, Clone, Copy)]
pub struct PowerWeight(pub f64);

impl SmoothWeight for PowerWeight {
    fn value(&self, u: f64) -> f64 {
        libm::pow(u, self.0)
    }

    fn derivative(&self, u: f64) -> f64 {
        self.0 * libm::pow(u, self.0 - 1.0)
    }
}

/// Residual `|LHS - RHS|` of Abel's summation identity
///
/// ```text
/// Σ_{n ≤ x} a(n) φ(n) = A(x) φ(x) - ∫_1^x A(u) φ'(u) du
/// ```
///
/// where `a_values[n-1] = a(n)`. `A` is constant on `[n, n+1)`, so the
/// integral is the exact sum of `A(n) (φ(n+1) - φ(n))` over whole segments
/// plus the final partial segment.
pub fn abel_identity_check(
    a_values: &[Complex64],
    phi: &dyn SmoothWeight,
    x: f64,
) -> Result<f64> {
    let n_max = a_values.len();
    if n_max == 0 {
        return Err(arg_err!("empty coefficient array"));
    }
    if !(x >= 1.0 && x <= n_max as f64) {
        return Err(arg_err!("x = {x} outside [1, {n_max}]"));
    }
    let m = libm::floor(x) as usize;
    let mut phis = Vec::with_capacity(m + 1);
    for n in 1..=m {
        let (v, d) = (phi.value(n as f64), phi.derivative(n as f64));
        if !(v.is_finite() && d.is_finite()) {
            return Err(Error::Numeric(alloc::format!("weight not finite at u = {n}")));
        }
        phis.push(v);
    }
    let phi_x = phi.value(x);
    if !(phi_x.is_finite() && phi.derivative(x).is_finite()) {
        return Err(Error::Numeric(alloc::format!("weight not finite at u = {x}")));
    }

    let mut lhs = ComplexSum::new();
    let mut running = ComplexSum::new();
    let mut integral = ComplexSum::new();
    for n in 1..=m {
        let a = a_values[n - 1];
        lhs.add(a * phis[n - 1]);
        running.add(a);
        let upper = if n < m { phis[n] } else { phi_x };
        integral.add(running.value() * (upper - phis[n - 1]));
    }
    let rhs = running.value() * phi_x - integral.value();
    Ok((lhs.value() - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::sync::Arc;
    use alloc::vec;
    use core::f64::consts::PI;

    use crate::arith::build_sieve;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ones() -> CoefficientSource {
        CoefficientSource::ones()
    }

    #[test]
    fn exp_sum_examples() {
        assert_eq!(exp_sum(&ones(), 1, 5.0, 0.0).unwrap(), c(5.0, 0.0));
        let s = exp_sum(&ones(), 1, 4.0, 0.5).unwrap();
        assert!(s.norm() < 1e-15);
        let mu = CoefficientSource::moebius(Arc::new(build_sieve(10).unwrap()));
        assert_eq!(exp_sum(&mu, 1, 10.0, 0.0).unwrap(), c(-1.0, 0.0));
        assert_eq!(exp_sum(&mu, 1, 10.9, 0.0).unwrap(), c(-1.0, 0.0));
        assert!(matches!(exp_sum(&mu, 1, 11.0, 0.0), Err(Error::Range { .. })));
        assert!(exp_sum(&mu, 1, 0.5, 0.0).is_err());
    }

    #[test]
    fn profile_examples() {
        assert_eq!(
            exp_sum_prefix_profile(&ones(), 1, &[1.0], &[0.0]).unwrap(),
            vec![vec![1.0]]
        );
        let mu = CoefficientSource::moebius(Arc::new(build_sieve(100).unwrap()));
        let prof = exp_sum_prefix_profile(&mu, 1, &[10.0, 100.0], &[0.0]).unwrap();
        assert_eq!(prof, vec![vec![1.0], vec![1.0]]);
        assert!(exp_sum_prefix_profile(&mu, 1, &[], &[0.0]).is_err());
        assert!(exp_sum_prefix_profile(&mu, 1, &[1.0], &[]).is_err());
        assert!(exp_sum_prefix_profile(&mu, 1, &[20.0, 10.0], &[0.0]).is_err());
    }

    #[test]
    fn profile_matches_fresh_sums_exactly() {
        let mu = CoefficientSource::moebius(Arc::new(build_sieve(3000).unwrap()));
        let xs = [3.0, 17.5, 100.0, 999.0, 3000.0];
        let ts = [0.0, 0.125, 1.0 / 3.0, 0.7, 0.99951171875];
        for k in 1..=3 {
            let prof = exp_sum_prefix_profile(&mu, k, &xs, &ts).unwrap();
            for (i, &x) in xs.iter().enumerate() {
                for (j, &t) in ts.iter().enumerate() {
                    assert_eq!(prof[i][j], exp_sum(&mu, k, x, t).unwrap().norm());
                }
            }
        }
    }

    #[test]
    fn partial_sum_examples() {
        let h4 = partial_sum(&SeriesSpec::new(ones(), 1, 1.0).unwrap(), 4, 0.0).unwrap();
        assert!((h4.re - 25.0 / 12.0).abs() < 1e-15 && h4.im == 0.0);
        let z = partial_sum(&SeriesSpec::new(ones(), 2, 2.0).unwrap(), 1, 0.25).unwrap();
        assert!((z - c(0.0, 1.0)).norm() < 1e-15);
    }

    /// Double-double accumulator used as an independent high-precision oracle.
    fn dd_sum(values: impl Iterator<Item = f64>) -> f64 {
        let (mut hi, mut lo) = (0.0f64, 0.0f64);
        for v in values {
            let s = hi + v;
            let bp = s - hi;
            let err = (hi - (s - bp)) + (v - bp);
            hi = s;
            lo += err;
            let t = hi + lo;
            lo -= t - hi;
            hi = t;
        }
        hi + lo
    }

    #[test]
    fn moebius_partial_sum_matches_high_precision() {
        let sieve = build_sieve(1000).unwrap();
        let oracle = dd_sum((1..=1000).map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sieve.mu()[n] as f64 * sign / n as f64
        }));
        let spec = SeriesSpec::new(CoefficientSource::moebius(Arc::new(sieve)), 1, 1.0).unwrap();
        let v = partial_sum(&spec, 1000, 0.5).unwrap();
        assert!((v.re - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn truncation_examples() {
        let k1 = SeriesSpec::new(ones(), 1, 1.0).unwrap();
        let k2 = SeriesSpec::new(ones(), 2, 2.0).unwrap();
        assert_eq!(choose_truncation(&k1, 0.3).unwrap(), 3);
        assert_eq!(choose_truncation(&k1, 1.0).unwrap(), 1);
        let n = choose_truncation(&k2, 0.01).unwrap();
        assert_eq!(n, 10);
        assert!((n.pow(2) as f64) <= 1.0 / 0.01);
        assert!(((n + 1).pow(2) as f64) > 1.0 / 0.01);
        assert_eq!(choose_truncation(&SeriesSpec::new(ones(), 3, 1.0).unwrap(), 0.9).unwrap(), 1);
        assert!(choose_truncation(&k1, 0.0).is_err());
        assert!(choose_truncation(&k1, 1.5).is_err());
    }

    #[test]
    fn integer_roots() {
        for v in 0..2000u64 {
            for k in 1..5 {
                let r = integer_root(v, k);
                assert!(r.pow(k) <= v);
                assert!((r + 1).pow(k) > v);
            }
        }
    }

    #[test]
    fn tail_bound_examples() {
        let spec = SeriesSpec::new(ones(), 1, 1.0)
            .unwrap()
            .with_hypothesis(AlphaHypothesis::new(0.5, 1.0))
            .unwrap();
        assert!((tail_bound(&spec, 100).unwrap() - 0.4).abs() < 1e-15);
        let ratio = tail_bound(&spec, 400).unwrap() / tail_bound(&spec, 100).unwrap();
        assert!((ratio - 0.5).abs() < 1e-15);

        let riemann = SeriesSpec::new(ones(), 2, 2.0)
            .unwrap()
            .with_hypothesis(AlphaHypothesis::new(1.0, 1.0))
            .unwrap();
        assert_eq!(riemann.transformed().unwrap(), (1.0, 0.5));
        for n in [1u64, 7, 100, 10_000] {
            let b = tail_bound(&riemann, n).unwrap();
            assert!((b - 4.0 / n as f64).abs() <= 1e-15 * b);
        }
        let bare = SeriesSpec::new(ones(), 1, 1.0).unwrap();
        assert!(matches!(tail_bound(&bare, 10), Err(Error::Contract(_))));
    }

    #[test]
    fn tail_bound_majorizes_random_tails() {
        let src = CoefficientSource::random_signs(3);
        let spec = SeriesSpec::new(src, 1, 1.0)
            .unwrap()
            .with_hypothesis(AlphaHypothesis::new(0.5, 1.0))
            .unwrap();
        let n = 100;
        let bound = tail_bound(&spec, n).unwrap();
        let fine = SeriesEvaluator::series(&spec.source, 1, 1.0, 2 * n).unwrap();
        let coarse = SeriesEvaluator::series(&spec.source, 1, 1.0, n).unwrap();
        let golden = 0.618_033_988_749_894_9;
        for j in 0..1000 {
            let t = (j as f64 * golden).fract();
            let d = (fine.eval(t).unwrap() - coarse.eval(t).unwrap()).norm();
            assert!(d <= bound, "t = {t}: {d} > {bound}");
        }
    }

    #[test]
    fn hypothesis_window() {
        let spec = SeriesSpec::new(ones(), 1, 1.0).unwrap();
        assert!(spec.clone().with_hypothesis(AlphaHypothesis::new(1.0, 1.0)).is_err());
        assert!(spec.clone().with_hypothesis(AlphaHypothesis::new(0.0, 1.0)).is_err());
        assert!(spec.clone().with_hypothesis(AlphaHypothesis::new(0.5, 0.0)).is_err());
        let k2p3 = SeriesSpec::new(ones(), 2, 3.0).unwrap();
        assert!(k2p3.clone().with_hypothesis(AlphaHypothesis::new(1.0, 1.0)).is_err());
        assert!(k2p3.with_hypothesis(AlphaHypothesis::new(1.5, 1.0)).is_ok());
        assert!(SeriesSpec::new(ones(), 0, 1.0).is_err());
        assert!(SeriesSpec::new(ones(), 1, 0.0).is_err());
    }

    #[test]
    fn zero_series_is_zero() {
        let spec = SeriesSpec::new(CoefficientSource::constant(c(0.0, 0.0)), 1, 1.0).unwrap();
        let grid = evaluate_grid(&spec, &uniform_times(64), 0.01).unwrap();
        assert_eq!(grid.n_used(), 100);
        assert!(grid.tail_bound().is_none());
        assert!(grid.values().iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn zeta_two_from_forced_truncation() {
        let spec = SeriesSpec::new(ones(), 1, 2.0).unwrap();
        let grid = evaluate_grid(&spec, &[0.0], 1e-6).unwrap();
        assert_eq!(grid.n_used(), 1_000_000);
        assert!((grid.values()[0].re - PI * PI / 6.0).abs() < 1e-6);
    }

    #[test]
    fn moebius_certified_grid_is_stable_under_doubling() {
        // square-root hypothesis α = 1/2 keeps N within a small sieve
        let sieve = Arc::new(build_sieve(400_000).unwrap());
        let spec = SeriesSpec::new(CoefficientSource::moebius(sieve), 1, 1.0)
            .unwrap()
            .with_hypothesis(AlphaHypothesis::new(0.5, 1.0))
            .unwrap();
        let times = uniform_times(128);
        let grid = evaluate_grid(&spec, &times, 1e-2).unwrap();
        assert!(grid.tail_bound().unwrap() <= 1e-2);
        assert_eq!(grid.n_used(), 160_000);
        let doubled = SeriesEvaluator::series(&spec.source, 1, 1.0, 2 * grid.n_used()).unwrap();
        for (t, v) in times.iter().zip(grid.values()) {
            assert!((doubled.eval(*t).unwrap() - v).norm() < 1e-2);
        }
    }

    #[test]
    fn grh_accuracy_is_out_of_reach_for_a_default_sieve() {
        let sieve = Arc::new(build_sieve(1000).unwrap());
        let spec = SeriesSpec::new(CoefficientSource::moebius(sieve), 1, 1.0)
            .unwrap()
            .with_hypothesis(AlphaHypothesis::new(0.75, 1.0))
            .unwrap();
        match evaluate_grid(&spec, &[0.0], 1e-2) {
            Err(Error::Resource { required, .. }) => {
                // 6 N^{-1/4} ≤ 10^-2  <=>  N ≥ 600^4
                assert_eq!(required, 129_600_000_000);
            }
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn evaluate_grid_rejects_bad_times() {
        let spec = SeriesSpec::new(ones(), 1, 2.0).unwrap();
        assert!(evaluate_grid(&spec, &[], 0.1).is_err());
        assert!(evaluate_grid(&spec, &[0.5, 0.25], 0.1).is_err());
        assert!(evaluate_grid(&spec, &[1.5], 0.1).is_err());
        assert!(evaluate_grid(&spec, &[0.5], 0.0).is_err());
    }

    #[test]
    fn weierstrass_examples() {
        let spec = WeierstrassSpec::new(0.5, 4, ones()).unwrap();
        let tol = libm::exp2(-30.0) / 0.5;
        assert!((weierstrass_eval(&spec, 0.0, 30).unwrap() - c(1.0, 0.0)).norm() <= tol);
        assert!((weierstrass_eval(&spec, 0.5, 30).unwrap() - c(1.0, 0.0)).norm() <= tol);
        assert!(weierstrass_eval(&spec, 0.3, 64).unwrap().norm().is_finite());
        assert!((spec.holder_exponent() - 0.5).abs() < 1e-15);
        assert!((spec.alpha() - 0.5).abs() < 1e-15);
        assert!(WeierstrassSpec::new(0.5, 2, ones()).is_err());
        assert!(WeierstrassSpec::new(1.0, 4, ones()).is_err());
        assert!(WeierstrassSpec::new(0.5, 4, ones().with_bound(None)).is_err());
    }

    #[test]
    fn weierstrass_third_matches_binary_iteration() {
        // for b = 4 the map x -> frac(4x) is exact in binary floating point
        let spec = WeierstrassSpec::new(0.5, 4, ones()).unwrap();
        let t: f64 = 1.0 / 3.0;
        let mut x = t;
        let mut oracle = 0.0;
        let mut amp = 1.0;
        for _ in 0..30 {
            x *= 4.0;
            x -= x.floor();
            amp *= 0.5;
            oracle += amp * (2.0 * PI * x).cos();
        }
        let v = weierstrass_eval(&spec, t, 30).unwrap();
        assert!((v.re - oracle).abs() < 1e-12);
    }

    #[test]
    fn weierstrass_terms_for_accuracy() {
        let spec = WeierstrassSpec::new(0.5, 4, ones()).unwrap();
        let m = spec.terms_for_accuracy(1e-6).unwrap();
        assert!(spec.remainder_bound(m) <= 1e-6);
        assert!(spec.remainder_bound(m - 1) > 1e-6);
        assert!(spec.terms_for_accuracy(1e-300).is_err());
    }

    #[test]
    fn riemann_examples() {
        let z2 = PI * PI / 6.0;
        let v0 = riemann_eval(&ones(), 0.0, 1e-4).unwrap();
        assert!((v0.re - z2).abs() <= 1e-4 && v0.im == 0.0);
        let v1 = riemann_eval(&ones(), 1.0, 1e-4).unwrap();
        assert_eq!(v1.im, v0.im);
        // the classical function Σ sin(π n² t)/n² is Im R(t/2)
        let half = riemann_eval(&ones(), 0.5, 1e-4).unwrap();
        assert!(half.im.abs() < 1e-15);
        assert!(riemann_eval(&ones().with_bound(None), 0.0, 1e-3).is_err());
    }

    #[test]
    fn abel_examples() {
        let ones = vec![c(1.0, 0.0); 10];
        assert!(abel_identity_check(&ones, &PowerWeight(-1.0), 10.0).unwrap() <= 1e-12);
        let alt: Vec<_> = (1..=50).map(|n| c(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        assert!(abel_identity_check(&alt, &PowerWeight(-2.0), 50.0).unwrap() <= 1e-12);
        assert_eq!(abel_identity_check(&alt, &PowerWeight(-2.0), 1.0).unwrap(), 0.0);
        assert!(abel_identity_check(&alt, &PowerWeight(-2.0), 0.5).is_err());
        assert!(abel_identity_check(&alt, &PowerWeight(-2.0), 51.0).is_err());
        struct Bad;
        impl SmoothWeight for Bad {
            fn value(&self, u: f64) -> f64 {
                if u > 3.0 { f64::NAN } else { u }
            }
            fn derivative(&self, _: f64) -> f64 {
                1.0
            }
        }
        assert!(matches!(abel_identity_check(&alt, &Bad, 5.0), Err(Error::Numeric(_))));
    }

    #[test]
    fn sample_grid_periodicity_detection() {
        let g = SampleGrid::from_fn(uniform_times(16), |t| c(t, 0.0)).unwrap();
        assert!(g.periodic());
        let g = SampleGrid::from_fn(closed_times(16), |t| c(t, 0.0)).unwrap();
        assert!(!g.periodic());
        assert_eq!(g.spacing(), Some(1.0 / 16.0));
        assert!(SampleGrid::new(vec![0.0], vec![], 0, None).is_err());
    }
}
