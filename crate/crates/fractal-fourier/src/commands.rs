//! Subcommand implementations. Each returns the rendered output; writing it
//! out is left to the caller.

use fractal_fourier_core::{
    boxcount_graph, boxcount_path, check_theorem_inequalities,
    estimators::{bounds_for, dyadic_ladder, enriched_t_grid, holder_increments},
    estimate_dimension, estimate_holder, series::uniform_times, theoretical_exponents, Assumption,
    Component, ExponentReport, FitPolicy, LogLogFit, Rational, SampleGrid,
};

use crate::config::{Command, ComponentArg, Format, RunConfig};
use crate::csv::{field, float, CsvDoc};
use crate::error::{CliError, Result};
use crate::parallel::Workers;
use crate::svg;

/// Slack allowed above a theoretical dimension bound before a check fails.
pub const CHECK_SLACK: f64 = 0.1;

pub fn run(cfg: &RunConfig) -> Result<String> {
    if cfg.format == Format::Svg && matches!(cfg.command, Command::Table | Command::Report) {
        return Err(CliError::Argument("table and report are only available as CSV".into()));
    }
    let workers = Workers::new(cfg.threads)?;
    match cfg.command {
        Command::Eval => eval(cfg, &workers),
        Command::Alpha => alpha(cfg, &workers),
        Command::Holder => holder(cfg, &workers),
        Command::Boxdim => boxdim(cfg, &workers),
        Command::Table => Ok(table().render()),
        Command::Report => Ok(report(cfg, &workers)?.render()),
    }
}

fn header_meta(doc: &mut CsvDoc, cfg: &RunConfig, command: &str) {
    doc.meta("command", command);
    doc.meta("series", field(&cfg.series.label()));
}

fn grid_meta(doc: &mut CsvDoc, grid: &SampleGrid) {
    doc.meta("samples", grid.len().to_string());
    doc.meta("N_used", grid.n_used().to_string());
    doc.meta("tail_bound", grid.tail_bound().map_or_else(|| "none".to_owned(), float));
}

fn sample(cfg: &RunConfig, workers: &Workers) -> Result<SampleGrid> {
    workers.evaluate(&cfg.series, &uniform_times(cfg.samples), cfg.accuracy)
}

fn real_component(arg: Option<ComponentArg>) -> Component {
    match arg.unwrap_or(ComponentArg::Re) {
        ComponentArg::Re => Component::Re,
        ComponentArg::Im => Component::Im,
        ComponentArg::Abs => Component::Abs,
        ComponentArg::Complex | ComponentArg::Path => Component::Complex,
    }
}

fn eval(cfg: &RunConfig, workers: &Workers) -> Result<String> {
    let grid = sample(cfg, workers)?;
    if cfg.format == Format::Svg {
        let points: Vec<(f64, f64)> = match cfg.component.unwrap_or(ComponentArg::Path) {
            ComponentArg::Path | ComponentArg::Complex => grid.values().iter().map(|z| (z.re, z.im)).collect(),
            other => {
                let c = real_component(Some(other));
                grid.t_values().iter().zip(grid.values()).map(|(&t, &z)| (t, c.project(z))).collect()
            }
        };
        return Ok(svg::polyline(&points, &cfg.series.label()));
    }
    let mut doc = CsvDoc::new(&["t", "re", "im", "abs"]);
    header_meta(&mut doc, cfg, "eval");
    grid_meta(&mut doc, &grid);
    for (&t, z) in grid.t_values().iter().zip(grid.values()) {
        doc.push(vec![float(t), float(z.re), float(z.im), float(z.norm())]);
    }
    Ok(doc.render())
}

fn fit_meta(doc: &mut CsvDoc, name: &str, fit: &LogLogFit) {
    doc.meta(name, float(fit.slope));
    doc.meta(&format!("{name}_rms"), float(fit.rms_residual));
    doc.meta(&format!("{name}_points"), fit.n_points.to_string());
}

fn loglog_svg(xs: &[f64], ys: &[f64], title: &str) -> String {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    svg::polyline(&pts, title)
}

fn alpha(cfg: &RunConfig, workers: &Workers) -> Result<String> {
    let t_grid = enriched_t_grid(cfg.t_grid);
    let sweep = workers.alpha(&cfg.series, cfg.x_ladder, &t_grid)?;
    let fit = sweep.fit?;
    if cfg.format == Format::Svg {
        return Ok(loglog_svg(&sweep.x_points, &sweep.maxima, "ln M(x) against ln x"));
    }
    let mut doc = CsvDoc::new(&["x", "max_abs_sum"]);
    header_meta(&mut doc, cfg, "alpha");
    doc.meta("t_grid_points", t_grid.len().to_string());
    fit_meta(&mut doc, "alpha_hat", &fit);
    for (x, m) in sweep.x_points.iter().zip(&sweep.maxima) {
        doc.push(vec![float(*x), float(*m)]);
    }
    Ok(doc.render())
}

fn holder(cfg: &RunConfig, workers: &Workers) -> Result<String> {
    let grid = sample(cfg, workers)?;
    let component = real_component(cfg.component);
    let hs = dyadic_ladder(cfg.h_ladder.0, cfg.h_ladder.1);
    let d = holder_increments(&grid, &hs, component)?;
    let fit = estimate_holder(&grid, &hs, component, FitPolicy::default())?;
    if cfg.format == Format::Svg {
        return Ok(loglog_svg(&hs, &d, "ln D(h) against ln h"));
    }
    let mut doc = CsvDoc::new(&["h", "max_increment"]);
    header_meta(&mut doc, cfg, "holder");
    grid_meta(&mut doc, &grid);
    doc.meta("component", component.name());
    fit_meta(&mut doc, "eta_hat", &fit);
    for (h, v) in hs.iter().zip(&d) {
        doc.push(vec![float(*h), float(*v)]);
    }
    Ok(doc.render())
}

fn boxdim(cfg: &RunConfig, workers: &Workers) -> Result<String> {
    let grid = sample(cfg, workers)?;
    let levels: Vec<u32> = (cfg.scales.0..=cfg.scales.1).collect();
    let (curve, label) = match cfg.component {
        Some(ComponentArg::Path) => (boxcount_path(&grid, &levels)?, "path"),
        other => {
            let c = real_component(other);
            if c == Component::Complex {
                return Err(CliError::Argument("boxdim takes re, im, abs, or path".into()));
            }
            (boxcount_graph(&grid, c, &levels)?, c.name())
        }
    };
    let fit = estimate_dimension(&curve, FitPolicy::keep_all())?;
    if cfg.format == Format::Svg {
        let inv: Vec<f64> = curve.scales.iter().map(|r| 1.0 / r).collect();
        let counts: Vec<f64> = curve.counts.iter().map(|&n| n as f64).collect();
        return Ok(loglog_svg(&inv, &counts, "ln N(r) against ln 1/r"));
    }
    let mut doc = CsvDoc::new(&["r", "count", "shifted_count"]);
    header_meta(&mut doc, cfg, "boxdim");
    grid_meta(&mut doc, &grid);
    doc.meta("target", label);
    doc.meta("lower_bound", curve.lower_bound.to_string());
    fit_meta(&mut doc, "dimension", &fit);
    for i in 0..curve.scales.len() {
        doc.push(vec![
            float(curve.scales[i]),
            curve.counts[i].to_string(),
            curve.shifted_counts[i].to_string(),
        ]);
    }
    Ok(doc.render())
}

fn fraction(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn decimal(r: Rational) -> String {
    float(*r.numer() as f64 / *r.denom() as f64)
}

/// Hölder exponents and graph-dimension bounds of `F_{k,k}(μ; t)` for
/// `k = 1..4` under each assumption, `—` where no exponent is available.
pub fn table() -> CsvDoc {
    let mut doc = CsvDoc::new(&[
        "assumption",
        "k",
        "eta",
        "eta_decimal",
        "dim_graph_bound",
        "dim_graph_decimal",
        "epsilon_limit",
    ]);
    doc.meta("command", "table");
    doc.meta("series", "moebius k=p");
    for assumption in [Assumption::Unconditional, Assumption::Grh, Assumption::SquareRootConjecture] {
        for k in 1..=4 {
            let row = match theoretical_exponents(k, assumption) {
                Ok(r) => vec![
                    fraction(r.eta),
                    decimal(r.eta),
                    fraction(r.dim_graph_bound),
                    decimal(r.dim_graph_bound),
                    r.epsilon_limit.to_string(),
                ],
                Err(_) => vec!["—".into(), "—".into(), "—".into(), "—".into(), String::new()],
            };
            let mut full = vec![assumption.name().to_owned(), k.to_string()];
            full.extend(row);
            doc.push(full);
        }
    }
    doc
}

pub const REPORT_HEADER: [&str; 23] = [
    "series",
    "component",
    "alpha_hat",
    "alpha_rms",
    "eta_hat",
    "eta_rms",
    "graph_dim",
    "graph_rms",
    "path_dim",
    "path_rms",
    "path_lower_bound",
    "alpha_assumed",
    "eta_theory",
    "dim_graph_bound",
    "dim_path_bound",
    "eta_theory_exact",
    "dim_graph_bound_exact",
    "dim_path_bound_exact",
    "assumption",
    "graph_check",
    "graph_margin",
    "path_check",
    "path_margin",
];

/// One row per component (`re`, `im`, `abs` graphs, and the planar path)
/// with fitted exponents, bounds, and check outcomes. Failures of
/// individual fits are reported in a trailing `status` column.
pub fn report(cfg: &RunConfig, workers: &Workers) -> Result<CsvDoc> {
    let mut header: Vec<&str> = REPORT_HEADER.to_vec();
    header.push("status");
    let mut doc = CsvDoc::new(&header);
    header_meta(&mut doc, cfg, "report");

    let grid = sample(cfg, workers)?;
    grid_meta(&mut doc, &grid);
    let t_grid = enriched_t_grid(cfg.t_grid);
    let alpha_fit = workers.alpha(&cfg.series, cfg.x_ladder, &t_grid).and_then(|s| s.fit);
    let bounds: Option<ExponentReport> = match cfg.series.hypothesis() {
        Some(h) => {
            let (k, p) = cfg.series.kp();
            Some(bounds_for(k, p, &h)?)
        }
        None => None,
    };
    let hs = dyadic_ladder(cfg.h_ladder.0, cfg.h_ladder.1);
    let levels: Vec<u32> = (cfg.scales.0..=cfg.scales.1).collect();
    let label = field(&cfg.series.label());

    for target in [Some(Component::Re), Some(Component::Im), Some(Component::Abs), None] {
        let mut status: Vec<String> = Vec::new();
        let mut note = |what: &str, e: &CliError| status.push(field(&format!("{what}: {e}")));
        let alpha = match &alpha_fit {
            Ok(f) => Some(*f),
            Err(e) => {
                note("alpha", e);
                None
            }
        };
        let component = target.unwrap_or(Component::Complex);
        let eta = estimate_holder(&grid, &hs, component, FitPolicy::default())
            .map_err(CliError::from)
            .map_err(|e| note("eta", &e))
            .ok();
        let (graph, path, lower) = match target {
            Some(c) => {
                let fit = boxcount_graph(&grid, c, &levels)
                    .and_then(|curve| estimate_dimension(&curve, FitPolicy::keep_all()))
                    .map_err(CliError::from)
                    .map_err(|e| note("graph", &e))
                    .ok();
                (fit, None, None)
            }
            None => match boxcount_path(&grid, &levels) {
                Ok(curve) => {
                    let fit = estimate_dimension(&curve, FitPolicy::keep_all())
                        .map_err(CliError::from)
                        .map_err(|e| note("path", &e))
                        .ok();
                    (None, fit, Some(curve.lower_bound))
                }
                Err(e) => {
                    note("path", &CliError::from(e));
                    (None, None, None)
                }
            },
        };
        let check = bounds
            .as_ref()
            .map(|b| check_theorem_inequalities(b, graph.as_ref(), path.as_ref(), CHECK_SLACK));
        let opt = |v: Option<f64>| v.map_or_else(String::new, float);
        let exact = bounds.as_ref().and_then(|b| b.exact);
        let verdict = |c: Option<fractal_fourier_core::boxdim::BoundCheck>| match c {
            Some(c) if c.pass => ("pass".to_owned(), float(c.margin)),
            Some(c) => ("fail".to_owned(), float(c.margin)),
            None => ("n/a".to_owned(), String::new()),
        };
        let (graph_check, graph_margin) = verdict(check.and_then(|c| c.graph));
        let (path_check, path_margin) = verdict(check.and_then(|c| c.path));
        let status = if status.is_empty() { "ok".to_owned() } else { status.join("; ") };
        doc.push(vec![
            label.clone(),
            target.map_or("path", |c| c.name()).to_owned(),
            opt(alpha.map(|f| f.slope)),
            opt(alpha.map(|f| f.rms_residual)),
            opt(eta.map(|f| f.slope)),
            opt(eta.map(|f| f.rms_residual)),
            opt(graph.map(|f| f.slope)),
            opt(graph.map(|f| f.rms_residual)),
            opt(path.map(|f| f.slope)),
            opt(path.map(|f| f.rms_residual)),
            lower.map_or_else(String::new, |b| b.to_string()),
            opt(bounds.as_ref().map(|b| b.alpha)),
            opt(bounds.as_ref().map(|b| b.eta_theory)),
            opt(bounds.as_ref().map(|b| b.dim_graph_bound)),
            opt(bounds.as_ref().map(|b| b.dim_path_bound)),
            exact.map_or_else(String::new, |e| fraction(e.eta)),
            exact.map_or_else(String::new, |e| fraction(e.dim_graph)),
            exact.map_or_else(String::new, |e| fraction(e.dim_path)),
            bounds.as_ref().map_or("none", |b| b.assumption_label.name()).to_owned(),
            graph_check,
            graph_margin,
            path_check,
            path_margin,
            status,
        ]);
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_matches_known_fractions() {
        let doc = table();
        let eta = doc.column("eta").unwrap();
        let col: Vec<&str> = doc.rows.iter().map(|r| r[eta].as_str()).collect();
        assert_eq!(
            col,
            ["—", "1/2", "2/3", "3/4", "1/4", "9/16", "65/96", "385/512", "1/2", "3/4", "5/6", "7/8"]
        );
        let dim = doc.column("dim_graph_bound").unwrap();
        assert_eq!(doc.rows[5][dim], "23/16");
    }

    #[test]
    fn fractions_print_integers_bare() {
        assert_eq!(fraction(Rational::from_integer(2)), "2");
        assert_eq!(fraction(Rational::new(6, 8)), "3/4");
    }
}
