//! Numerics for fractal Fourier series
//!
//! ```text
//! F_{k,p}(f; t) = Σ_{n ≥ 1} f(n) e^{2πi n^k t} / n^p
//! ```
//!
//! with arbitrary arithmetic coefficients `f`. The crate covers
//!
//! - coefficient sources: Möbius and Liouville via a linear sieve, constants,
//!   reproducible random signs, and custom tables ([`arith`]);
//! - exponential sums, truncated series, Weierstrass and Riemann families,
//!   tail-bound driven truncation, and an Abel summation oracle ([`series`]);
//! - log-log exponent estimators and closed-form exponent bounds ([`estimators`]);
//! - box-counting dimension of sampled graphs and planar paths ([`boxdim`]).
//!
//! The crate is `no_std` and only needs `alloc`. Phases `n^k t mod 1` are
//! reduced exactly in integer arithmetic before any trigonometric call, so
//! results do not degrade for large `n^k`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod boxdim;
pub mod error;
pub mod estimators;
pub mod phase;
pub mod series;
pub mod sum;

pub use num_complex::Complex64;

pub use arith::{build_sieve, CoefficientKind, CoefficientSource, SieveTable};
pub use boxdim::{
    boxcount_graph, boxcount_path, boxcount_path_anchored, check_theorem_inequalities,
    estimate_dimension, BoxCountCurve, CountTarget, InequalityCheck,
};
pub use error::{Error, Result};
pub use estimators::{
    bounds_for, default_t_grid, dyadic_ladder, estimate_alpha, estimate_alpha_weierstrass,
    estimate_holder, fit_loglog, holder_increments, moebius_alpha, theorem_bounds,
    theoretical_exponents, Assumption, Component, ExactBounds, ExponentReport, FitPolicy,
    LogLogFit, Rational, TheoryRow,
};
pub use series::{
    abel_identity_check, choose_truncation, evaluate_grid, exp_sum, exp_sum_prefix_profile,
    partial_sum, plan_truncation, riemann_eval, riemann_spec, tail_bound, weierstrass_eval, AlphaHypothesis, SampleGrid,
    SeriesEvaluator, SeriesSpec, WeierstrassSpec,
};
