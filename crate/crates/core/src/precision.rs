//! Arbitrary-precision reals tagged with their working precision.
//!
//! A [`PrecisionReal`] carries a decimal digit count. Every operation rounds
//! to nearest (ties to even) at the binary precision derived from that count.
//! Mixing precisions in arithmetic is a logic error and panics; comparisons
//! across precisions return [`Error::PrecisionMismatch`].

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigUint;

use crate::error::{Error, Result};

pub const MIN_DIGITS: u32 = 2;

const RM: RoundingMode = RoundingMode::ToEven;
const WORD_BITS: usize = 64;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Binary precision for `digits` decimal digits, rounded up to whole words.
pub fn bits_for_digits(digits: u32) -> usize {
    let raw = (digits as f64 * LOG2_10).ceil() as usize;
    raw.div_ceil(WORD_BITS) * WORD_BITS
}

#[derive(Clone)]
pub struct PrecisionReal {
    value: BigFloat,
    digits: u32,
}

impl PrecisionReal {
    fn wrap(value: BigFloat, digits: u32) -> Self {
        debug_assert!(!value.is_nan(), "NaN produced at {digits} digits");
        Self { value, digits }
    }

    fn check_digits(digits: u32) -> Result<()> {
        if digits < MIN_DIGITS {
            return Err(Error::PrecisionTooLow { got: digits, min: MIN_DIGITS });
        }
        Ok(())
    }

    pub fn bits(&self) -> usize {
        bits_for_digits(self.digits)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn zero(digits: u32) -> Result<Self> {
        Self::check_digits(digits)?;
        Ok(Self::wrap(BigFloat::new(bits_for_digits(digits)), digits))
    }

    pub fn from_u64(v: u64, digits: u32) -> Result<Self> {
        Self::check_digits(digits)?;
        Ok(Self::wrap(BigFloat::from_u64(v, bits_for_digits(digits)), digits))
    }

    /// Rounds an exact integer to the working precision.
    pub fn from_biguint(v: &BigUint, digits: u32) -> Result<Self> {
        Self::check_digits(digits)?;
        let words = v.to_u64_digits();
        if words.is_empty() {
            return Self::zero(digits);
        }
        let exact = BigFloat::from_words(&words, Sign::Pos, (words.len() * WORD_BITS) as i32);
        let mut value = exact;
        value
            .set_precision(bits_for_digits(digits), RM)
            .expect("valid precision");
        Ok(Self::wrap(value, digits))
    }

    /// Parses a decimal literal such as `2.3523414972` or `7.34169e-455`.
    pub fn parse(s: &str, digits: u32) -> Result<Self> {
        Self::check_digits(digits)?;
        let v = with_consts(|cc| BigFloat::parse(s.trim(), Radix::Dec, bits_for_digits(digits), RM, cc));
        if v.is_nan() || v.is_inf() {
            return Err(Error::Parse(s.to_string()));
        }
        Ok(Self::wrap(v, digits))
    }

    /// Re-rounds to another precision.
    pub fn with_digits(&self, digits: u32) -> Result<Self> {
        Self::check_digits(digits)?;
        let mut v = self.value.clone();
        v.set_precision(bits_for_digits(digits), RM).expect("valid precision");
        Ok(Self::wrap(v, digits))
    }

    fn same(&self, o: &Self) -> usize {
        assert_eq!(
            self.digits, o.digits,
            "arithmetic across precisions ({} vs {} digits)",
            self.digits, o.digits
        );
        self.bits()
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.value.sqrt(self.bits(), RM), self.digits)
    }

    pub fn exp(&self) -> Self {
        let v = with_consts(|cc| self.value.exp(self.bits(), RM, cc));
        Self::wrap(v, self.digits)
    }

    pub fn ln(&self) -> Self {
        let v = with_consts(|cc| self.value.ln(self.bits(), RM, cc));
        Self::wrap(v, self.digits)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.value.reciprocal(self.bits(), RM), self.digits)
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.value.abs(), self.digits)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.value.is_zero() && self.value.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        !self.value.is_zero() && self.value.is_negative()
    }

    /// Unit in the last place of `self` at its precision; zero maps to zero.
    pub fn ulp(&self) -> Self {
        if self.value.is_zero() {
            return self.clone();
        }
        let e = self.value.exponent().expect("finite value");
        let mut one = BigFloat::from_word(1, WORD_BITS);
        one.set_exponent(e - self.bits() as i32 + 1);
        let mut v = one;
        v.set_precision(self.bits(), RM).expect("valid precision");
        Self::wrap(v, self.digits)
    }

    /// Total order at matching precision.
    pub fn try_cmp(&self, o: &Self) -> Result<Ordering> {
        if self.digits != o.digits {
            return Err(Error::PrecisionMismatch(self.digits, o.digits));
        }
        Ok(match self.value.cmp(&o.value).expect("finite values") {
            c if c < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    /// Nearest `f64`; underflows to zero for tiny values.
    pub fn to_f64(&self) -> f64 {
        let Some((m, _, sign, e, _)) = self.value.as_raw_parts() else {
            return f64::NAN;
        };
        if self.value.is_zero() {
            return 0.0;
        }
        let top = *m.last().expect("nonempty mantissa") as f64;
        let v = top * 2f64.powi(e - WORD_BITS as i32);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }

    /// `log₁₀ |self|` as an `f64`, valid far outside the `f64` exponent range.
    pub fn log10_abs(&self) -> f64 {
        let Some((m, _, _, e, _)) = self.value.as_raw_parts() else {
            return f64::NAN;
        };
        if self.value.is_zero() {
            return f64::NEG_INFINITY;
        }
        // |x| = 0.m × 2^e, and the top word carries 53+ significant bits.
        let top = *m.last().expect("nonempty mantissa") as f64 / 2f64.powi(WORD_BITS as i32);
        top.log10() + e as f64 * std::f64::consts::LOG10_2
    }

    /// Decimal scientific notation with `sig` significant digits, rounded to
    /// nearest, e.g. `7.3417e-455`.
    pub fn to_sci(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.value.is_zero() {
            return format!("{}e0", if sig > 1 { format!("0.{}", "0".repeat(sig - 1)) } else { "0".into() });
        }
        let wide = self.bits() + 2 * WORD_BITS + (sig as f64 * LOG2_10) as usize;
        let abs = self.value.abs();
        let mut e10 = self.log10_abs().floor() as i64;
        let lo = BigUint::from(10u32).pow(sig as u32 - 1);
        let hi = &lo * 10u32;
        loop {
            let shift = sig as i64 - 1 - e10;
            let ten = BigFloat::from_word(10, WORD_BITS);
            let pow = ten.powi(shift.unsigned_abs() as usize, wide, RM);
            let scaled = if shift >= 0 {
                abs.mul(&pow, wide, RM)
            } else {
                abs.div(&pow, wide, RM)
            };
            let n = float_to_biguint(&scaled.round(0, RM));
            if n >= hi {
                e10 += 1;
            } else if n < lo {
                e10 -= 1;
            } else {
                let s = n.to_string();
                let sign = if self.value.is_negative() { "-" } else { "" };
                let (head, tail) = s.split_at(1);
                return if tail.is_empty() {
                    format!("{sign}{head}e{e10}")
                } else {
                    format!("{sign}{head}.{tail}e{e10}")
                };
            }
        }
    }
}

/// Integer-valued nonnegative float to an exact integer.
fn float_to_biguint(v: &BigFloat) -> BigUint {
    if v.is_zero() {
        return BigUint::default();
    }
    let (m, _, _, e, _) = v.as_raw_parts().expect("finite value");
    let mut n = BigUint::from_slice(
        &m.iter()
            .flat_map(|w| [*w as u32, (*w >> 32) as u32])
            .collect::<Vec<_>>(),
    );
    let width = (m.len() * WORD_BITS) as i64;
    let shift = width - e as i64;
    if shift >= 0 {
        n >>= shift as usize;
    } else {
        n <<= (-shift) as usize;
    }
    n
}

impl fmt::Debug for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} digits)", self.to_sci(self.digits.min(40) as usize), self.digits)
    }
}

impl fmt::Display for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(self.digits.min(17) as usize);
        f.write_str(&self.to_sci(sig))
    }
}

impl PartialEq for PrecisionReal {
    fn eq(&self, o: &Self) -> bool {
        matches!(self.try_cmp(o), Ok(Ordering::Equal))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&PrecisionReal> for &PrecisionReal {
            type Output = PrecisionReal;

            fn $method(self, o: &PrecisionReal) -> PrecisionReal {
                let p = self.same(o);
                PrecisionReal::wrap(self.value.$inner(&o.value, p, RM), self.digits)
            }
        }

        impl $trait<PrecisionReal> for PrecisionReal {
            type Output = PrecisionReal;

            fn $method(self, o: PrecisionReal) -> PrecisionReal {
                (&self).$method(&o)
            }
        }

        impl $trait<PrecisionReal> for &PrecisionReal {
            type Output = PrecisionReal;

            fn $method(self, o: PrecisionReal) -> PrecisionReal {
                self.$method(&o)
            }
        }

        impl $trait<&PrecisionReal> for PrecisionReal {
            type Output = PrecisionReal;

            fn $method(self, o: &PrecisionReal) -> PrecisionReal {
                (&self).$method(o)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for &PrecisionReal {
    type Output = PrecisionReal;

    fn neg(self) -> PrecisionReal {
        let mut v = self.value.clone();
        v.inv_sign();
        PrecisionReal::wrap(v, self.digits)
    }
}

impl Neg for PrecisionReal {
    type Output = PrecisionReal;

    fn neg(self) -> PrecisionReal {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(v: u64, d: u32) -> PrecisionReal {
        PrecisionReal::from_u64(v, d).unwrap()
    }

    #[test]
    fn sqrt_five() {
        let s = r(5, 50).sqrt();
        assert_eq!(s.to_sci(30), "2.23606797749978969640917366873e0");
    }

    #[test]
    fn rejects_tiny_precision() {
        assert!(matches!(
            PrecisionReal::from_u64(1, 1),
            Err(Error::PrecisionTooLow { got: 1, min: 2 })
        ));
    }

    #[test]
    fn cross_precision_compare_is_an_error() {
        let a = r(1, 20);
        let b = r(1, 30);
        assert_eq!(a.try_cmp(&b), Err(Error::PrecisionMismatch(20, 30)));
        assert_eq!(a.try_cmp(&r(2, 20)), Ok(Ordering::Less));
    }

    #[test]
    #[should_panic(expected = "arithmetic across precisions")]
    fn cross_precision_arithmetic_panics() {
        let _ = r(1, 20) + r(1, 30);
    }

    #[test]
    fn big_integers_convert_exactly() {
        let n: BigUint = "123456789012345678901234567890123456789".parse().unwrap();
        let v = PrecisionReal::from_biguint(&n, 60).unwrap();
        assert_eq!(v.to_sci(39), "1.23456789012345678901234567890123456789e38");
        assert_eq!(float_to_biguint(&v.value), n);
    }

    #[test]
    fn sci_formatting() {
        let third = r(1, 30) / r(3, 30);
        assert_eq!(third.to_sci(5), "3.3333e-1");
        assert_eq!(r(2, 20).to_sci(1), "2e0");
        assert_eq!((r(2, 20) / r(3, 20)).to_sci(3), "6.67e-1");
        assert_eq!(r(999_999, 20).to_sci(3), "1.00e6");
        assert_eq!((-r(5, 20)).to_sci(2), "-5.0e0");
        let tiny = PrecisionReal::parse("7.34169236447e-455", 30).unwrap();
        assert_eq!(tiny.to_sci(6), "7.34169e-455");
        assert!((tiny.log10_abs() - (-454.134)).abs() < 1e-3);
        assert_eq!(tiny.to_f64(), 0.0);
    }

    #[test]
    fn ulp_scale() {
        let one = r(1, 20);
        let u = one.ulp();
        // one ulp of 1 at 128 bits is 2⁻¹²⁷
        assert_eq!(one.bits(), 128);
        assert!((u.log10_abs() - (-127.0 * std::f64::consts::LOG10_2)).abs() < 1e-9);
        assert!((&one + &u) != one);
    }

    #[test]
    fn exp_ln_roundtrip() {
        let x = PrecisionReal::parse("2.5", 40).unwrap();
        let back = x.exp().ln();
        assert!((&back - &x).abs().log10_abs() < -38.0);
    }

    proptest! {
        #[test]
        fn sci_roundtrip(mantissa in 1u64..u64::MAX, exp in -400i32..400, sig in 1usize..30) {
            let lit = format!("{mantissa}e{exp}");
            let x = PrecisionReal::parse(&lit, 50).unwrap();
            let shown = x.to_sci(sig);
            let again = PrecisionReal::parse(&shown, 50).unwrap().to_sci(sig);
            prop_assert_eq!(shown, again);
        }
    }
}
