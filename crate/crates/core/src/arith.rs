//! Arithmetic coefficient sequences `f: ℕ → ℂ`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{arg_err, Error, Result};

/// Möbius and Liouville values for `0 ≤ n ≤ limit` (index 0 unused).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveTable {
    limit: usize,
    mu: Vec<i8>,
    lambda: Vec<i8>,
}

impl SieveTable {
    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn mu(&self) -> &[i8] {
        &self.mu
    }

    pub fn lambda(&self) -> &[i8] {
        &self.lambda
    }
}

fn alloc_vec<T: Clone>(len: usize, fill: T) -> Result<Vec<T>> {
    let mut v = Vec::new();
    v.try_reserve_exact(len).map_err(|_| Error::Resource {
        what: String::from("sieve allocation failed"),
        required: len as u64,
    })?;
    v.resize(len, fill);
    Ok(v)
}

/// Linear (Euler) sieve computing `μ` and `λ` in one pass.
///
/// Every composite is crossed out exactly once, by its smallest prime factor.
pub fn build_sieve(limit: usize) -> Result<SieveTable> {
    if limit == 0 {
        return Err(arg_err!("sieve limit must be at least 1"));
    }
    let size = limit.checked_add(1).ok_or_else(|| Error::Resource {
        what: String::from("sieve limit overflows usize"),
        required: limit as u64,
    })?;
    let mut mu = alloc_vec(size, 0i8)?;
    let mut lambda = alloc_vec(size, 0i8)?;
    let mut composite = alloc_vec(size, false)?;
    let mut primes: Vec<usize> = Vec::new();
    mu[1] = 1;
    lambda[1] = 1;
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
            lambda[i] = -1;
        }
        for &p in &primes {
            let Some(ip) = i.checked_mul(p).filter(|&v| v <= limit) else {
                break;
            };
            composite[ip] = true;
            lambda[ip] = -lambda[i];
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    Ok(SieveTable { limit, mu, lambda })
}

#[derive(Debug, Clone)]
pub enum CoefficientKind {
    Constant(Complex64),
    Moebius(Arc<SieveTable>),
    Liouville(Arc<SieveTable>),
    /// Independent ±1 signs keyed by `(seed, n)`.
    RandomSigns(u64),
    /// `table[n - 1] = f(n)`.
    Custom(Arc<[Complex64]>),
}

/// An arithmetic function together with a bound `B ≥ |f(n)|`.
#[derive(Debug, Clone)]
pub struct CoefficientSource {
    kind: CoefficientKind,
    declared_bound: Option<f64>,
}

impl CoefficientSource {
    pub fn new(kind: CoefficientKind) -> Self {
        let declared_bound = Some(match &kind {
            CoefficientKind::Constant(c) => c.norm(),
            CoefficientKind::Moebius(_)
            | CoefficientKind::Liouville(_)
            | CoefficientKind::RandomSigns(_) => 1.0,
            CoefficientKind::Custom(table) => table.iter().map(|z| z.norm()).fold(0.0, f64::max),
        });
        Self {
            kind,
            declared_bound,
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(CoefficientKind::Constant(c))
    }

    pub fn ones() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn moebius(sieve: Arc<SieveTable>) -> Self {
        Self::new(CoefficientKind::Moebius(sieve))
    }

    pub fn liouville(sieve: Arc<SieveTable>) -> Self {
        Self::new(CoefficientKind::Liouville(sieve))
    }

    pub fn random_signs(seed: u64) -> Self {
        Self::new(CoefficientKind::RandomSigns(seed))
    }

    pub fn custom(table: Vec<Complex64>) -> Self {
        Self::new(CoefficientKind::Custom(table.into()))
    }

    /// Overrides the default bound; `None` marks the source as unbounded.
    pub fn with_bound(mut self, bound: Option<f64>) -> Self {
        self.declared_bound = bound;
        self
    }

    pub fn kind(&self) -> &CoefficientKind {
        &self.kind
    }

    pub fn declared_bound(&self) -> Option<f64> {
        self.declared_bound
    }

    /// Largest `n` for which `f(n)` is available, `None` if unlimited.
    pub fn available(&self) -> Option<u64> {
        match &self.kind {
            CoefficientKind::Constant(_) | CoefficientKind::RandomSigns(_) => None,
            CoefficientKind::Moebius(s) | CoefficientKind::Liouville(s) => Some(s.limit() as u64),
            CoefficientKind::Custom(t) => Some(t.len() as u64),
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            CoefficientKind::Constant(c) => alloc::format!("const({},{})", c.re, c.im),
            CoefficientKind::Moebius(_) => String::from("moebius"),
            CoefficientKind::Liouville(_) => String::from("liouville"),
            CoefficientKind::RandomSigns(seed) => alloc::format!("random({seed})"),
            CoefficientKind::Custom(t) => alloc::format!("custom(len={})", t.len()),
        }
    }

    fn check_range(&self, n: u64) -> Result<()> {
        if n == 0 {
            return Err(arg_err!("coefficients are indexed from n = 1"));
        }
        match self.available() {
            Some(avail) if n > avail => Err(Error::Range {
                index: n,
                available: avail,
            }),
            _ => Ok(()),
        }
    }

    /// `f(n)`.
    pub fn coeff(&self, n: u64) -> Result<Complex64> {
        self.check_range(n)?;
        let i = n as usize;
        Ok(match &self.kind {
            CoefficientKind::Constant(c) => *c,
            CoefficientKind::Moebius(s) => Complex64::new(s.mu[i] as f64, 0.0),
            CoefficientKind::Liouville(s) => Complex64::new(s.lambda[i] as f64, 0.0),
            CoefficientKind::RandomSigns(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_word_pos((n - 1) as u128);
                sign_of(rng.next_u32())
            }
            CoefficientKind::Custom(t) => t[i - 1],
        })
    }

    /// `f(1), …, f(n_max)` in one pass; element `i` holds `f(i + 1)`.
    pub fn coefficients(&self, n_max: u64) -> Result<Vec<Complex64>> {
        if n_max > 0 {
            self.check_range(n_max)?;
        }
        let len = usize::try_from(n_max).map_err(|_| Error::Resource {
            what: String::from("coefficient count exceeds address space"),
            required: n_max,
        })?;
        let mut out = Vec::new();
        out.try_reserve_exact(len).map_err(|_| Error::Resource {
            what: String::from("coefficient buffer allocation failed"),
            required: n_max,
        })?;
        match &self.kind {
            CoefficientKind::Constant(c) => out.resize(len, *c),
            CoefficientKind::Moebius(s) => out.extend(
                s.mu[1..=len]
                    .iter()
                    .map(|&v| Complex64::new(v as f64, 0.0)),
            ),
            CoefficientKind::Liouville(s) => out.extend(
                s.lambda[1..=len]
                    .iter()
                    .map(|&v| Complex64::new(v as f64, 0.0)),
            ),
            CoefficientKind::RandomSigns(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                out.extend((0..len).map(|_| sign_of(rng.next_u32())));
            }
            CoefficientKind::Custom(t) => out.extend_from_slice(&t[..len]),
        }
        Ok(out)
    }
}

#[inline]
fn sign_of(word: u32) -> Complex64 {
    Complex64::new(if word & 1 == 1 { 1.0 } else { -1.0 }, 0.0)
}
