//! Exact phase reduction.
//!
//! Every finite `f64` is a dyadic rational `mant / 2^shift`. For an integer
//! multiplier `m` the fractional part of `m·t` therefore only depends on
//! `m mod 2^shift`, and for `shift ≤ 128` it can be computed exactly with
//! wrapping 128-bit arithmetic. This keeps `e^{2πi n^k t}` accurate even when
//! `n^k` is far beyond the 53-bit range where `n^k as f64 * t` stops carrying
//! any information about the fractional part.

use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest table shift accepted by [`PhaseTable::new`] (2^20 entries).
pub const MAX_TABLE_SHIFT: u32 = 20;

/// An integer multiplier known modulo 2^128.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multiplier {
    /// `m mod 2^128`.
    pub low: u128,
    /// True when `low == m`.
    pub exact: bool,
    /// `m` rounded to `f64`, used only when `shift > 128` and `m` overflowed.
    pub approx: f64,
}

impl Multiplier {
    pub fn power(base: u64, exp: u32) -> Self {
        let b = base as u128;
        let (low, exact) = match b.checked_pow(exp) {
            Some(v) => (v, true),
            None => (b.wrapping_pow(exp), false),
        };
        let approx = if exact {
            low as f64
        } else {
            libm::pow(base as f64, exp as f64)
        };
        Self { low, exact, approx }
    }
}

/// A finite real decomposed as `±mant / 2^shift` with `mant` odd, or an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedTime {
    Integer,
    Dyadic { mant: u64, shift: u32, negative: bool },
}

impl ReducedTime {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::Numeric(alloc::format!("time value {t}")));
        }
        if t == 0.0 {
            return Ok(Self::Integer);
        }
        let bits = t.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i32;
        let fraction = bits & ((1u64 << 52) - 1);
        let (mut mant, mut exp) = if biased == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1u64 << 52), biased - 1075)
        };
        let tz = mant.trailing_zeros();
        mant >>= tz;
        exp += tz as i32;
        if exp >= 0 {
            return Ok(Self::Integer);
        }
        Ok(Self::Dyadic {
            mant,
            shift: (-exp) as u32,
            negative,
        })
    }

    /// Denominator exponent, zero for integers.
    pub fn shift(&self) -> u32 {
        match *self {
            Self::Integer => 0,
            Self::Dyadic { shift, .. } => shift,
        }
    }
}

/// `2^-shift` for `shift ≤ 1022`.
#[inline]
fn pow2_neg(shift: u32) -> f64 {
    f64::from_bits(((1023 - shift) as u64) << 52)
}

#[inline]
fn mask128(shift: u32) -> u128 {
    if shift >= 128 {
        u128::MAX
    } else {
        (1u128 << shift) - 1
    }
}

/// Fractional part of `m · t` in `[0, 1)`.
///
/// Exact up to the final rounding to `f64` whenever `t`'s denominator is at
/// most `2^128`, or `m` fits in 128 bits.
pub fn frac_of_product(m: &Multiplier, t: &ReducedTime) -> f64 {
    let (mant, shift, negative) = match *t {
        ReducedTime::Integer => return 0.0,
        ReducedTime::Dyadic {
            mant,
            shift,
            negative,
        } => (mant, shift, negative),
    };
    let frac = if shift <= 128 {
        let mask = mask128(shift);
        let prod = m.low.wrapping_mul(mant as u128);
        let r = if negative {
            prod.wrapping_neg() & mask
        } else {
            prod & mask
        };
        (r as f64) * pow2_neg(shift)
    } else if m.exact {
        let f = frac_wide(m.low, mant, shift);
        if negative && f != 0.0 {
            1.0 - f
        } else {
            f
        }
    } else {
        let x = m.approx * (mant as f64) * libm::exp2(-(shift as f64));
        let f = x - libm::floor(x);
        if negative && f != 0.0 {
            1.0 - f
        } else {
            f
        }
    };
    if frac >= 1.0 {
        0.0
    } else {
        frac
    }
}

/// `(m · mant mod 2^shift) / 2^shift` for `shift > 128` via a 192-bit product.
fn frac_wide(m: u128, mant: u64, shift: u32) -> f64 {
    let ml = m as u64 as u128;
    let mh = (m >> 64) as u64 as u128;
    let a = ml * mant as u128;
    let b = mh * mant as u128;
    let lo = a as u64;
    let (mid, carry) = ((a >> 64) as u64).overflowing_add(b as u64);
    let hi = ((b >> 64) as u64).wrapping_add(carry as u64);
    let mut limbs = [lo, mid, hi];
    // reduce mod 2^shift (only matters below 192 bits)
    if shift < 192 {
        let word = (shift / 64) as usize;
        let bit = shift % 64;
        limbs[word] &= (1u64 << bit).wrapping_sub(1);
        for l in limbs.iter_mut().skip(word + 1) {
            *l = 0;
        }
    }
    // top 128 bits below 2^shift
    let drop = shift - 128;
    let q = shr192(limbs, drop);
    (q as f64) * libm::exp2(-128.0)
}

fn shr192(limbs: [u64; 3], by: u32) -> u128 {
    if by >= 192 {
        return 0;
    }
    let word = (by / 64) as usize;
    let bit = by % 64;
    let mut out = [0u64; 3];
    for i in 0..3 - word {
        let lo = limbs[i + word] >> bit;
        let hi = if bit > 0 && i + word + 1 < 3 {
            limbs[i + word + 1] << (64 - bit)
        } else {
            0
        };
        out[i] = lo | hi;
    }
    (out[0] as u128) | ((out[1] as u128) << 64)
}

/// `e^{2πi x}` for `x ∈ [-1/2, 1)`, with the argument folded into
/// `[-1/2, 1/2)`. Half-integers map to exactly `-1`.
#[inline]
pub fn unit(x: f64) -> Complex64 {
    let g = if x >= 0.5 { x - 1.0 } else { x };
    if g == -0.5 {
        return Complex64::new(-1.0, 0.0);
    }
    let (s, c) = libm::sincos(TAU * g);
    Complex64::new(c, s)
}

/// `m·t` reduced into `[-1/2, 1/2]`, odd in `t`: the reduction is done for
/// `|t|` and the sign applied afterwards, so `phase(m, -t)` is the exact
/// conjugate of `phase(m, t)`.
#[inline]
pub fn centered(m: &Multiplier, t: &ReducedTime) -> f64 {
    let (abs, negative) = match *t {
        ReducedTime::Integer => return 0.0,
        ReducedTime::Dyadic { mant, shift, negative } => (
            ReducedTime::Dyadic {
                mant,
                shift,
                negative: false,
            },
            negative,
        ),
    };
    let f = frac_of_product(m, &abs);
    let g = if f >= 0.5 { f - 1.0 } else { f };
    if negative {
        -g
    } else {
        g
    }
}

/// `e^{2πi m t}` for an integer multiplier and a real `t`.
#[inline]
pub fn phase(m: &Multiplier, t: &ReducedTime) -> Complex64 {
    unit(centered(m, t))
}

/// Lookup table of `e^{2πi r / 2^shift}`, `0 ≤ r < 2^shift`.
///
/// Produces bit-identical values to [`phase`] for times whose denominator
/// divides `2^shift`.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    shift: u32,
    entries: Vec<Complex64>,
}

impl PhaseTable {
    pub fn new(shift: u32) -> Result<Self> {
        if shift > MAX_TABLE_SHIFT {
            return Err(crate::error::arg_err!(
                "phase table shift {shift} exceeds {MAX_TABLE_SHIFT}"
            ));
        }
        let len = 1usize << shift;
        let mut entries = Vec::new();
        entries.try_reserve_exact(len).map_err(|_| Error::Resource {
            what: alloc::string::String::from("phase table allocation"),
            required: len as u64,
        })?;
        let scale = pow2_neg(shift);
        entries.extend((0..len).map(|r| unit((r as f64) * scale)));
        Ok(Self { shift, entries })
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    /// Returns the table index for `m·t`, or `None` when `t` is not a
    /// multiple of `2^-shift`.
    #[inline]
    pub fn index(&self, m: &Multiplier, t: &ReducedTime) -> Option<usize> {
        self.prepare(t).map(|p| p.index(m))
    }

    /// Per-time part of [`PhaseTable::index`], hoisted out of loops over `m`.
    #[inline]
    pub fn prepare(&self, t: &ReducedTime) -> Option<TableTime> {
        let mask = (1u64 << self.shift) - 1;
        match *t {
            ReducedTime::Integer => Some(TableTime {
                scaled: 0,
                negative: false,
                mask,
            }),
            ReducedTime::Dyadic {
                mant,
                shift,
                negative,
            } if shift <= self.shift => Some(TableTime {
                scaled: (mant & ((1u64 << shift) - 1)) << (self.shift - shift),
                negative,
                mask,
            }),
            _ => None,
        }
    }

    #[inline]
    pub fn get(&self, index: usize) -> Complex64 {
        self.entries[index]
    }
}

/// A time reduced against a [`PhaseTable`]'s denominator.
#[derive(Debug, Clone, Copy)]
pub struct TableTime {
    scaled: u64,
    negative: bool,
    mask: u64,
}

impl TableTime {
    #[inline]
    pub fn index(&self, m: &Multiplier) -> usize {
        self.index_low(m.low as u64)
    }

    /// Index from `m mod 2^64`.
    #[inline]
    pub fn index_low(&self, low: u64) -> usize {
        let prod = low.wrapping_mul(self.scaled);
        let r = if self.negative { prod.wrapping_neg() } else { prod };
        (r & self.mask) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(n: u64, k: u32, t: f64) -> f64 {
        frac_of_product(&Multiplier::power(n, k), &ReducedTime::new(t).unwrap())
    }

    #[test]
    fn simple_fractions() {
        assert_eq!(frac(3, 1, 0.25), 0.75);
        assert_eq!(frac(5, 2, 0.5), 0.5);
        assert_eq!(frac(7, 1, 0.0), 0.0);
        assert_eq!(frac(7, 3, 2.0), 0.0);
        assert_eq!(frac(1, 1, -0.25), 0.75);
        assert_eq!(frac(1, 1, 1.75), 0.75);
    }

    #[test]
    fn matches_naive_up_to_its_rounding() {
        // the naive product is off by at most half an ulp of n^2 t
        for n in 1..200u64 {
            for &t in &[0.1, 1.0 / 3.0, core::f64::consts::FRAC_1_SQRT_2, 0.999] {
                let x = (n * n) as f64 * t;
                let naive = x - x.floor();
                let d = (frac(n, 2, t) - naive).abs();
                assert!(d.min(1.0 - d) <= x * f64::EPSILON + 1e-16, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn huge_powers_keep_phase() {
        // 3^80 * (1/4) mod 1 with 3^80 ≡ 1 mod 4
        assert_eq!(frac(3, 80, 0.25), 0.25);
        // 2^100 * 2^-101 = 1/2
        assert_eq!(frac(2, 100, libm::exp2(-101.0)), 0.5);
        // 2^100 * 2^-150 is tiny, m fits exactly
        let f = frac(2, 100, libm::exp2(-150.0));
        assert_eq!(f, libm::exp2(-50.0));
    }

    #[test]
    fn wide_path_reduces_correctly() {
        // m = 2^127 + 5, t = 3 * 2^-130 -> m t = 3/8 + 15 * 2^-130
        let m = Multiplier {
            low: (1u128 << 127) + 5,
            exact: true,
            approx: 0.0,
        };
        let t = ReducedTime::Dyadic {
            mant: 3,
            shift: 130,
            negative: false,
        };
        let f = frac_of_product(&m, &t);
        assert!((f - 0.375).abs() < 1e-30);
    }

    #[test]
    fn conjugate_symmetry_is_exact() {
        for n in 1..50u64 {
            let m = Multiplier::power(n, 2);
            for t in [0.3141, 0.5, 0.25, 1e-30, 3.75] {
                let a = phase(&m, &ReducedTime::new(t).unwrap());
                let b = phase(&m, &ReducedTime::new(-t).unwrap());
                assert_eq!(a, b.conj());
            }
        }
        assert_eq!(phase(&Multiplier::power(3, 1), &ReducedTime::new(0.5).unwrap()).im, 0.0);
    }

    #[test]
    fn table_agrees_bitwise_with_direct_phase() {
        let table = PhaseTable::new(10).unwrap();
        for n in 1..300u64 {
            let m = Multiplier::power(n, 3);
            for j in 0..1024u64 {
                let t = ReducedTime::new(j as f64 / 1024.0).unwrap();
                let idx = table.index(&m, &t).unwrap();
                assert_eq!(table.get(idx), phase(&m, &t));
            }
            let t = ReducedTime::new(-3.0 / 64.0).unwrap();
            assert_eq!(table.get(table.index(&m, &t).unwrap()), phase(&m, &t));
        }
        assert!(table
            .index(&Multiplier::power(2, 1), &ReducedTime::new(1.0 / 3.0).unwrap())
            .is_none());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(ReducedTime::new(f64::NAN).is_err());
        assert!(ReducedTime::new(f64::INFINITY).is_err());
    }
}
