//! Thread-pool drivers for grid evaluation and exponential-sum sweeps.
//!
//! Work is split over sample times only. Every value is computed by the same
//! sequential routine whatever the split, so results do not depend on the
//! number of threads.

use fractal_fourier_core::{
    estimators::{self, alpha_from_maxima},
    series::{plan_truncation, profile_evaluator},
    Complex64, FitPolicy, LogLogFit, SampleGrid, SeriesEvaluator,
};
use rayon::prelude::*;

use crate::config::SeriesChoice;
use crate::error::{CliError, Result};

const EVAL_CHUNK: usize = 256;
const SWEEP_CHUNK: usize = 16;

pub struct Workers {
    pool: rayon::ThreadPool,
}

impl Workers {
    pub fn new(threads: Option<usize>) -> Result<Self> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| CliError::Argument(format!("thread pool: {e}")))?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn eval(&self, ev: &SeriesEvaluator, times: &[f64]) -> Result<Vec<Complex64>> {
        let chunks: Vec<Vec<Complex64>> = self.pool.install(|| {
            times
                .par_chunks(EVAL_CHUNK)
                .map(|c| c.iter().map(|&t| ev.eval(t)).collect::<fractal_fourier_core::Result<Vec<_>>>())
                .collect::<fractal_fourier_core::Result<Vec<_>>>()
        })?;
        Ok(chunks.concat())
    }

    /// Rows of prefix sums, one per time.
    pub fn prefix_sums(
        &self,
        ev: &SeriesEvaluator,
        times: &[f64],
        cutoffs: &[u64],
    ) -> fractal_fourier_core::Result<Vec<Vec<Complex64>>> {
        let chunks: Vec<Vec<Vec<Complex64>>> = self.pool.install(|| {
            times
                .par_chunks(SWEEP_CHUNK)
                .map(|c| ev.prefix_sums_many(c, cutoffs))
                .collect::<fractal_fourier_core::Result<Vec<_>>>()
        })?;
        Ok(chunks.concat())
    }

    /// Samples the series at `times` to `accuracy`, recording the truncation
    /// and its certified tail (remainder bound for Weierstrass series).
    pub fn evaluate(&self, series: &SeriesChoice, times: &[f64], accuracy: f64) -> Result<SampleGrid> {
        let (ev, n_used, tail) = match series {
            SeriesChoice::Power(spec) => {
                let (n, tail) = plan_truncation(spec, accuracy)?;
                (SeriesEvaluator::series(&spec.source, spec.k, spec.p, n)?, n, tail)
            }
            SeriesChoice::Weierstrass(w) => {
                let terms = w.terms_for_accuracy(accuracy)?;
                (SeriesEvaluator::weierstrass(w, terms)?, terms as u64, Some(w.remainder_bound(terms)))
            }
        };
        let ev = ev.with_table_for(times)?;
        let values = self.eval(&ev, times)?;
        Ok(SampleGrid::new(times.to_vec(), values, n_used, tail)?)
    }

    /// Ladder, grid maxima `M(x)`, and the `α̂` fit.
    pub fn alpha(&self, series: &SeriesChoice, rungs: (u32, u32), t_grid: &[f64]) -> Result<AlphaSweep> {
        let levels: Vec<u32> = (rungs.0..=rungs.1).collect();
        let (x_points, maxima) = match series {
            SeriesChoice::Power(spec) => {
                let xs: Vec<f64> = levels.iter().map(|&j| (j as f64).exp2()).collect();
                estimators::check_geometric_ladder(&xs)?;
                estimators::check_alpha_grid(t_grid)?;
                let (ev, cutoffs) = profile_evaluator(&spec.source, spec.k, &xs, t_grid)?;
                let sums = self.prefix_sums(&ev, t_grid, &cutoffs)?;
                (xs, column_maxima(&sums, cutoffs.len()))
            }
            SeriesChoice::Weierstrass(w) => {
                estimators::weierstrass_alpha_maxima(w, &levels, t_grid, |ev, cut, ts| self.prefix_sums(ev, ts, cut))?
            }
        };
        let fit = alpha_from_maxima(&x_points, &maxima, FitPolicy::default());
        Ok(AlphaSweep {
            x_points,
            maxima,
            fit: fit.map_err(CliError::from),
        })
    }
}

pub struct AlphaSweep {
    pub x_points: Vec<f64>,
    pub maxima: Vec<f64>,
    pub fit: Result<LogLogFit>,
}

fn column_maxima(rows: &[Vec<Complex64>], width: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; width];
    for row in rows {
        for (m, s) in out.iter_mut().zip(row) {
            *m = m.max(s.norm());
        }
    }
    out
}
