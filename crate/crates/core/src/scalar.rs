//! Scalar modes shared by every lattice-indexed container.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational; the only scalar used for certification.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarMode {
    ExactRational,
    Float64,
}

pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + Send + Sync + 'static {
    const MODE: ScalarMode;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    fn is_exact() -> bool {
        Self::MODE == ScalarMode::ExactRational
    }
}

impl Scalar for Rational {
    const MODE: ScalarMode = ScalarMode::ExactRational;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float64;

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `2^k` as a rational, for either sign of `k`.
pub fn pow2(k: i64) -> Rational {
    let p = Rational::from_integer(BigInt::one() << k.unsigned_abs());
    if k >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Parses `"p/q"` or `"p"`, with an optional sign on `p` and `q > 0`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidParameter(format!("not a rational: {s:?}"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p, Some(q)),
        None => (s, None),
    };
    let numer = BigInt::from_str(num).map_err(|_| bad())?;
    let denom = match den {
        Some(q) => {
            if q.starts_with('+') || q.starts_with('-') {
                return Err(bad());
            }
            BigInt::from_str(q).map_err(|_| bad())?
        }
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(numer, denom))
}

/// Canonical text form: reduced `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn abs<T: Scalar>(x: &T) -> T {
    x.clone().abs()
}
