//! Command-line flags, `key=value` config files, and the resolved [`RunConfig`].

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fractal_fourier_core::{
    estimators::moebius_alpha, AlphaHypothesis, Assumption, CoefficientSource, Complex64,
    Rational, SeriesSpec, WeierstrassSpec,
};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "fractal-fourier", version, about = "Fractal Fourier series with arithmetic coefficients")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Sample the series on a uniform grid
    Eval,
    /// Growth exponent of exponential sums
    Alpha,
    /// Hölder exponent from sampled increments
    Holder,
    /// Box-counting dimension of graph or path
    Boxdim,
    /// Hölder exponents of the Möbius series under each assumption
    Table,
    /// All fits next to the theoretical bounds
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComponentArg {
    Re,
    Im,
    Abs,
    Complex,
    Path,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// const[:re[,im]], moebius, liouville, random, or custom:<path>
    #[arg(long, global = true, default_value = "const")]
    pub source: String,

    #[arg(long, global = true, default_value_t = 1)]
    pub k: u32,

    #[arg(long, global = true, default_value_t = 1.0)]
    pub p: f64,

    /// Weierstrass amplitude ratio; with --b selects the Weierstrass family
    #[arg(long, global = true)]
    pub a: Option<f64>,

    /// Weierstrass frequency ratio
    #[arg(long, global = true)]
    pub b: Option<u64>,

    /// Exponential-sum exponent: a number, grh, conj, or trivial
    #[arg(long, global = true)]
    pub alpha: Option<String>,

    /// Constant C in |S(x,t)| ≤ C x^α [default: coefficient bound]
    #[arg(long, global = true)]
    pub alpha_const: Option<f64>,

    /// Grid size, a power of two ≥ 256
    #[arg(long, global = true, default_value_t = 1 << 14)]
    pub samples: usize,

    /// Box-count levels j0:j1 (r = 2^-j)
    #[arg(long, global = true, default_value = "4:10")]
    pub scales: String,

    /// Increment levels j0:j1 (h = 2^-j)
    #[arg(long, global = true, default_value = "4:12")]
    pub h_ladder: String,

    /// Exponential-sum cut-offs j0:j1 (x = 2^j, or b^j for Weierstrass)
    #[arg(long, global = true)]
    pub x_ladder: Option<String>,

    /// Uniform points in the α̂ grid, before adding low-denominator rationals
    #[arg(long, global = true, default_value_t = 512)]
    pub t_grid: usize,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub sieve_limit: usize,

    #[arg(long, global = true, default_value_t = 1e-3)]
    pub accuracy: f64,

    /// Component for increments, graphs, and plots
    #[arg(long, global = true, value_enum)]
    pub component: Option<ComponentArg>,

    /// Output file [default: stdout]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    /// Worker threads [default: all cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// key=value file; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Inserts the contents of any `--config` file ahead of the command-line
/// flags, so that later (command-line) occurrences win.
pub fn expand_config_args(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    let mut iter = args.iter().skip(1);
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = iter.next().map(PathBuf::from);
        } else if let Some(rest) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(rest));
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let file_args = parse_config_text(&text)?;
    let mut out = Vec::with_capacity(args.len() + file_args.len());
    let mut rest = args.into_iter();
    out.extend(rest.next());
    // flags are global, so they may precede the subcommand
    out.extend(file_args.into_iter().map(OsString::from));
    out.extend(rest);
    Ok(out)
}

/// `key = value` lines to `--key value` pairs; `#` starts a comment line.
pub fn parse_config_text(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Argument(format!("config line {}: expected key=value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Argument(format!("config line {}: bad key {k:?}", i + 1)));
        }
        out.push(format!("--{key}"));
        out.push(v.trim().to_owned());
    }
    Ok(out)
}

/// Series selected on the command line.
#[derive(Debug, Clone)]
pub enum SeriesChoice {
    Power(SeriesSpec),
    Weierstrass(WeierstrassSpec),
}

impl SeriesChoice {
    pub fn source(&self) -> &CoefficientSource {
        match self {
            Self::Power(s) => &s.source,
            Self::Weierstrass(w) => &w.source,
        }
    }

    pub fn hypothesis(&self) -> Option<AlphaHypothesis> {
        match self {
            Self::Power(s) => s.alpha_hypothesis,
            Self::Weierstrass(w) => {
                let bound = w.source.declared_bound().unwrap_or(1.0);
                Some(AlphaHypothesis::new(w.alpha(), bound.max(f64::MIN_POSITIVE)))
            }
        }
    }

    /// `(k, p)` of the series as seen by the exponent bounds.
    pub fn kp(&self) -> (u32, f64) {
        match self {
            Self::Power(s) => (s.k, s.p),
            Self::Weierstrass(_) => (1, 1.0),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Power(s) => format!("{} k={} p={}", s.source.label(), s.k, s.p),
            Self::Weierstrass(w) => format!("weierstrass a={} b={} {}", w.a, w.b, w.source.label()),
        }
    }
}

/// Fully validated run parameters.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub series: SeriesChoice,
    pub samples: usize,
    pub scales: (u32, u32),
    pub h_ladder: (u32, u32),
    pub x_ladder: (u32, u32),
    pub t_grid: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub component: Option<ComponentArg>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

fn arg(msg: impl Into<String>) -> CliError {
    CliError::Argument(msg.into())
}

pub fn parse_range(text: &str, what: &str) -> Result<(u32, u32)> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| arg(format!("{what} must be j0:j1, got {text:?}")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| arg(format!("{what}: {s:?} is not a non-negative integer")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if a >= b || b > 52 {
        return Err(arg(format!("{what} needs j0 < j1 ≤ 52, got {a}:{b}")));
    }
    Ok((a, b))
}

fn parse_source(text: &str, seed: u64, sieve_limit: usize) -> Result<CoefficientSource> {
    let (name, rest) = match text.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (text, None),
    };
    match (name, rest) {
        ("const", None) => Ok(CoefficientSource::ones()),
        ("const", Some(v)) => {
            let (re, im) = match v.split_once(',') {
                Some((re, im)) => (re, im),
                None => (v, "0"),
            };
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| arg(format!("bad constant {s:?}")))
            };
            Ok(CoefficientSource::constant(Complex64::new(num(re)?, num(im)?)))
        }
        ("moebius", None) => Ok(CoefficientSource::moebius(sieve(sieve_limit)?)),
        ("liouville", None) => Ok(CoefficientSource::liouville(sieve(sieve_limit)?)),
        ("random", None) => Ok(CoefficientSource::random_signs(seed)),
        ("custom", Some(path)) => read_custom(Path::new(path)),
        _ => Err(arg(format!(
            "unknown source {text:?}; expected const[:re[,im]], moebius, liouville, random, or custom:<path>"
        ))),
    }
}

fn sieve(limit: usize) -> Result<Arc<fractal_fourier_core::SieveTable>> {
    Ok(Arc::new(fractal_fourier_core::build_sieve(limit)?))
}

/// One `re,im` (or bare `re`) value per line; blank and `#` lines skipped.
pub fn read_custom(path: &Path) -> Result<CoefficientSource> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (re, im) = line.split_once(',').unwrap_or((line, "0"));
        let parse = |s: &str| {
            s.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                arg(format!("{}:{}: expected re,im but found {line:?}", path.display(), i + 1))
            })
        };
        values.push(Complex64::new(parse(re)?, parse(im)?));
    }
    if values.is_empty() {
        return Err(arg(format!("{}: no coefficients", path.display())));
    }
    Ok(CoefficientSource::custom(values))
}

fn hypothesis(
    text: &str,
    k: u32,
    constant: f64,
) -> Result<AlphaHypothesis> {
    Ok(match text {
        "grh" => AlphaHypothesis::rational(moebius_alpha(k, Assumption::Grh)?, constant)
            .labelled(Assumption::Grh, true),
        "conj" => AlphaHypothesis::rational(Rational::new(1, 2), constant)
            .labelled(Assumption::SquareRootConjecture, true),
        "trivial" => AlphaHypothesis::rational(Rational::from_integer(1), constant)
            .labelled(Assumption::Unconditional, false),
        v => {
            let a = v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| arg(format!("--alpha expects a number, grh, conj, or trivial; got {v:?}")))?;
            AlphaHypothesis::new(a, constant)
        }
    })
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let o = cli.opts;
        if o.samples < 256 || !o.samples.is_power_of_two() {
            return Err(arg(format!("--samples must be a power of two ≥ 256, got {}", o.samples)));
        }
        if o.t_grid == 0 {
            return Err(arg("--t-grid must be positive"));
        }
        if o.threads == Some(0) {
            return Err(arg("--threads must be positive"));
        }
        if !(o.accuracy.is_finite() && o.accuracy > 0.0) {
            return Err(arg("--accuracy must be positive"));
        }
        let needs_source = cli.command != Command::Table;
        let source = if needs_source {
            parse_source(&o.source, o.seed, o.sieve_limit)?
        } else {
            CoefficientSource::ones()
        };
        let constant = match o.alpha_const {
            Some(c) => c,
            None => source.declared_bound().unwrap_or(1.0).max(f64::MIN_POSITIVE),
        };
        let series = match (o.a, o.b) {
            (Some(a), Some(b)) => {
                if o.alpha.is_some() {
                    return Err(arg("--alpha is implied by --a and --b for the Weierstrass family"));
                }
                SeriesChoice::Weierstrass(WeierstrassSpec::new(a, b, source)?)
            }
            (None, None) => {
                let mut spec = SeriesSpec::new(source, o.k, o.p)?;
                if let Some(text) = &o.alpha {
                    spec = spec.with_hypothesis(hypothesis(text, o.k, constant)?)?;
                }
                SeriesChoice::Power(spec)
            }
            _ => return Err(arg("--a and --b must be given together")),
        };
        let default_x = match series {
            SeriesChoice::Power(_) => "8:16",
            SeriesChoice::Weierstrass(_) => "2:12",
        };
        Ok(Self {
            command: cli.command,
            series,
            samples: o.samples,
            scales: parse_range(&o.scales, "--scales")?,
            h_ladder: parse_range(&o.h_ladder, "--h-ladder")?,
            x_ladder: parse_range(o.x_ladder.as_deref().unwrap_or(default_x), "--x-ladder")?,
            t_grid: o.t_grid,
            seed: o.seed,
            accuracy: o.accuracy,
            component: o.component,
            out: o.out,
            format: o.format,
            threads: o.threads,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("fractal-fourier").chain(args.iter().copied()))
    }

    #[test]
    fn flags_may_precede_or_follow_the_subcommand() {
        let a = parse(&["--k", "3", "eval"]).unwrap();
        let b = parse(&["eval", "--k", "3"]).unwrap();
        assert_eq!(a.opts.k, 3);
        assert_eq!(b.opts.k, 3);
    }

    #[test]
    fn later_flags_override_earlier_ones() {
        let cli = parse(&["--k", "3", "eval", "--k", "2"]).unwrap();
        assert_eq!(cli.opts.k, 2);
    }

    #[test]
    fn config_text_becomes_flags() {
        let args = parse_config_text("# comment\nk = 2\n\nsieve_limit=1000\n").unwrap();
        assert_eq!(args, ["--k", "2", "--sieve-limit", "1000"]);
        assert!(parse_config_text("k 2").is_err());
        assert!(parse_config_text("config=x").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4:10", "x").unwrap(), (4, 10));
        assert!(parse_range("10:4", "x").is_err());
        assert!(parse_range("4", "x").is_err());
        assert!(parse_range("a:5", "x").is_err());
    }

    #[test]
    fn run_config_validation() {
        let ok = |args: &[&str]| RunConfig::from_cli(parse(args).unwrap());
        assert!(ok(&["eval"]).is_ok());
        assert!(ok(&["eval", "--samples", "100"]).is_err());
        assert!(ok(&["eval", "--samples", "128"]).is_err());
        assert!(ok(&["eval", "--a", "0.5"]).is_err());
        assert!(ok(&["eval", "--a", "0.5", "--b", "4", "--alpha", "grh"]).is_err());
        assert!(ok(&["eval", "--source", "nope"]).is_err());
        assert!(ok(&["eval", "--alpha", "0.5"]).is_ok());
        assert!(ok(&["eval", "--alpha", "1.5"]).is_err());
        assert!(ok(&["eval", "--alpha", "x"]).is_err());
        let c = ok(&["eval", "--source", "const:2,1"]).unwrap();
        assert_eq!(c.series.source().coeff(5).unwrap(), Complex64::new(2.0, 1.0));
        let c = ok(&["eval", "--source", "moebius", "--sieve-limit", "100", "--alpha", "conj"]).unwrap();
        let h = c.series.hypothesis().unwrap();
        assert_eq!(h.assumption, Assumption::SquareRootConjecture);
        assert!(h.epsilon_limit);
        let w = ok(&["eval", "--a", "0.5", "--b", "4"]).unwrap();
        assert_eq!(w.x_ladder, (2, 12));
        assert!((w.series.hypothesis().unwrap().alpha - 0.5).abs() < 1e-15);
    }
}
