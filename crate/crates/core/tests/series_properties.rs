use std::sync::Arc;

use fractal_fourier_core::series::{closed_times, uniform_times};
use fractal_fourier_core::*;
use proptest::prelude::*;

fn source_strategy() -> impl Strategy<Value = CoefficientSource> {
    let sieve = Arc::new(build_sieve(2000).unwrap());
    prop_oneof![
        (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| CoefficientSource::constant(Complex64::new(re, im))),
        Just(CoefficientSource::moebius(sieve.clone())),
        Just(CoefficientSource::liouville(sieve)),
        any::<u64>().prop_map(CoefficientSource::random_signs),
    ]
}

fn real_source_strategy() -> impl Strategy<Value = CoefficientSource> {
    let sieve = Arc::new(build_sieve(2000).unwrap());
    prop_oneof![
        (-2.0f64..2.0).prop_map(|re| CoefficientSource::constant(Complex64::new(re, 0.0))),
        Just(CoefficientSource::moebius(sieve.clone())),
        Just(CoefficientSource::liouville(sieve)),
        any::<u64>().prop_map(CoefficientSource::random_signs),
    ]
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partial_sums_are_periodic(
        src in source_strategy(),
        k in 1u32..5,
        p in 0.5f64..3.0,
        n in 1u64..2000,
        ticks in -(1i64 << 42)..(1i64 << 42),
    ) {
        // t + 1 must be representable exactly for the comparison to be about the series
        let t = ticks as f64 / (1u64 << 40) as f64;
        let spec = SeriesSpec::new(src, k, p).unwrap();
        let a = partial_sum(&spec, n, t).unwrap();
        let b = partial_sum(&spec, n, t + 1.0).unwrap();
        prop_assert!(close(a, b), "{a} vs {b}");
    }

    #[test]
    fn real_coefficients_give_conjugate_symmetry(
        src in real_source_strategy(),
        k in 1u32..5,
        p in 0.5f64..3.0,
        n in 1u64..2000,
        t in 0.0f64..1.0,
    ) {
        let spec = SeriesSpec::new(src, k, p).unwrap();
        let a = partial_sum(&spec, n, -t).unwrap();
        let b = partial_sum(&spec, n, t).unwrap().conj();
        prop_assert!(close(a, b), "{a} vs {b}");
    }

    #[test]
    fn abel_identity_holds(
        seed in any::<u64>(),
        n in 1usize..10_000,
        frac in 0.0f64..1.0,
        which in 0usize..3,
    ) {
        let a = CoefficientSource::random_signs(seed).coefficients(n as u64).unwrap();
        let x = 1.0 + frac * (n as f64 - 1.0);
        let phi = [series::PowerWeight(-1.0), series::PowerWeight(-2.0), series::PowerWeight(0.3)][which];
        prop_assert!(abel_identity_check(&a, &phi, x).unwrap() <= 1e-10);
    }
}

#[test]
fn riemann_family_is_cauchy() {
    let spec = riemann_spec(CoefficientSource::ones()).unwrap();
    let times: Vec<f64> = (0..1000).map(|j| j as f64 / 1000.0).collect();
    for n in [100u64, 1000, 10_000] {
        let fine = SeriesEvaluator::series(&spec.source, 2, 2.0, 2 * n).unwrap();
        let coarse = SeriesEvaluator::series(&spec.source, 2, 2.0, n).unwrap();
        let worst = times
            .iter()
            .map(|&t| (fine.eval(t).unwrap() - coarse.eval(t).unwrap()).norm())
            .fold(0.0, f64::max);
        let limit = 8.0 / (n as f64).sqrt() * 1.5;
        assert!(worst <= limit, "N = {n}: {worst} > {limit}");
        assert!(worst <= tail_bound(&spec, n).unwrap());
    }
}

#[test]
fn weierstrass_increments_scale_like_h_sqrt_n() {
    // a = 1/2, b = 4: the lacunary form has exponent 1/2 at N = 4^terms
    let w = WeierstrassSpec::new(0.5, 4, CoefficientSource::ones()).unwrap();
    let times = uniform_times(1 << 20);
    let mut constant = None;
    for terms in 2..=6u32 {
        let ev = SeriesEvaluator::weierstrass(&w, terms).unwrap().with_table_for(&times).unwrap();
        let vals: Vec<Complex64> = times.iter().map(|&t| ev.eval(t).unwrap()).collect();
        let grid = SampleGrid::new(times.clone(), vals, 0, None).unwrap();
        let hs: Vec<f64> = (2..=2 * terms + 6).map(|i| (0.5f64).powi(i as i32)).collect();
        let d = estimators::holder_increments(&grid, &hs, Component::Complex).unwrap();
        let n = (w.b as f64).powi(terms as i32);
        // below h = 1/N increments shrink with h (h = 1/N itself is resonant)
        let fine: Vec<f64> = hs.iter().zip(&d).filter(|(h, _)| **h < 1.0 / n).map(|(_, v)| *v).collect();
        assert!(fine.len() >= 5);
        assert!(fine.windows(2).all(|p| p[1] <= p[0]));
        let ratio = hs.iter().zip(&d).map(|(h, v)| v / (h * n.sqrt())).fold(0.0, f64::max);
        let c = *constant.get_or_insert(ratio);
        assert!(ratio <= 1.5 * c, "terms = {terms}: {ratio} vs {c}");
    }
}

#[test]
fn weierstrass_holder_and_dimension() {
    let w = WeierstrassSpec::new(0.5, 4, CoefficientSource::ones()).unwrap();
    let terms = w.terms_for_accuracy(1e-9).unwrap();
    let ev = SeriesEvaluator::weierstrass(&w, terms).unwrap();
    let times = uniform_times(1 << 16);
    let ev = ev.with_table_for(&times).unwrap();
    let vals: Vec<Complex64> = times.iter().map(|&t| ev.eval(t).unwrap()).collect();
    let grid = SampleGrid::new(times, vals, 0, None).unwrap();

    let hs = estimators::dyadic_ladder(4, 12);
    let eta = estimate_holder(&grid, &hs, Component::Re, FitPolicy::default()).unwrap();
    assert!((eta.slope - 0.5).abs() < 0.05, "{}", eta.slope);

    let levels: Vec<u32> = (4..=10).collect();
    let curve = boxcount_graph(&grid, Component::Re, &levels).unwrap();
    let dim = estimate_dimension(&curve, FitPolicy::keep_all()).unwrap();
    assert!((dim.slope - 1.5).abs() < 0.1, "{}", dim.slope);

    let report = estimators::bounds_for(1, 1.0, &AlphaHypothesis::new(w.alpha(), 1.0)).unwrap();
    assert!(check_theorem_inequalities(&report, Some(&dim), None, 0.1).passed());
}

#[test]
fn translation_moves_graph_dimension_little() {
    let w = WeierstrassSpec::new(0.5, 4, CoefficientSource::ones()).unwrap();
    let ev = SeriesEvaluator::weierstrass(&w, 20).unwrap();
    let times = closed_times(1 << 13);
    let vals: Vec<Complex64> = times.iter().map(|&t| ev.eval(t).unwrap()).collect();
    let levels: Vec<u32> = (3..=8).collect();
    let base = SampleGrid::new(times.clone(), vals.clone(), 0, None).unwrap();
    let d0 = estimate_dimension(&boxcount_graph(&base, Component::Re, &levels).unwrap(), FitPolicy::keep_all())
        .unwrap()
        .slope;
    for shift in [0.1, 0.37, -2.5] {
        let moved: Vec<Complex64> = vals.iter().map(|v| v + shift).collect();
        let g = SampleGrid::new(times.clone(), moved, 0, None).unwrap();
        let d = estimate_dimension(&boxcount_graph(&g, Component::Re, &levels).unwrap(), FitPolicy::keep_all())
            .unwrap()
            .slope;
        assert!((d - d0).abs() <= 0.02);
    }
}
