//! Extended-precision real scalar backed by MPFR.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Rational};

/// Working precision in bits for `digits` significant decimal digits,
/// including 32 guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 32
}

#[derive(Clone, PartialEq, PartialOrd)]
pub struct Real(Float);

impl Real {
    pub fn from_float(f: Float) -> Self {
        Real(f)
    }

    pub fn from_f64(prec: u32, v: f64) -> Self {
        Real(Float::with_val(prec, v))
    }

    pub fn from_i64(prec: u32, v: i64) -> Self {
        Real(Float::with_val(prec, v))
    }

    pub fn from_rational(prec: u32, q: &Rational) -> Self {
        Real(Float::with_val(prec, q))
    }

    /// Parse a decimal literal such as `"0.1102133467"`.
    pub fn parse(prec: u32, s: &str) -> Option<Self> {
        Float::parse(s).ok().map(|p| Real(Float::with_val(prec, p)))
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_i64(prec, 0)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(prec, 1)
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    /// A value at the same precision as `self`.
    pub fn like_i64(&self, v: i64) -> Self {
        Self::from_i64(self.prec(), v)
    }

    pub fn like_rational(&self, q: &Rational) -> Self {
        Self::from_rational(self.prec(), q)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Real(Float::with_val(prec, &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.cmp0() == Some(Ordering::Greater)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        Real(self.0.clone().abs())
    }

    pub fn exp(&self) -> Self {
        Real(self.0.clone().exp())
    }

    pub fn ln(&self) -> Self {
        Real(self.0.clone().ln())
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.clone().sqrt())
    }

    pub fn recip(&self) -> Self {
        Real(self.0.clone().recip())
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// `10^-k` at the precision of `self`.
    pub fn ten_pow_neg(prec: u32, k: u32) -> Self {
        Real(Float::with_val(prec, 10).pow(-(k as i32)))
    }

    /// `2^e` at precision `prec`.
    pub fn two_pow(prec: u32, e: i32) -> Self {
        Real(Float::with_val(prec, 1) << e)
    }

    /// Positional decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        if !self.0.is_finite() {
            return self.0.to_string();
        }
        let (negative, mantissa, exp) = self.0.to_sign_string_exp_round(10, Some(digits), Round::Nearest);
        // value = 0.mantissa * 10^exp
        let exp = exp.unwrap_or(0);
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        if exp <= 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-exp) as usize));
            out.push_str(&mantissa);
        } else if exp as usize >= mantissa.len() {
            out.push_str(&mantissa);
            out.extend(std::iter::repeat_n('0', exp as usize - mantissa.len()));
        } else {
            out.push_str(&mantissa[..exp as usize]);
            out.push('.');
            out.push_str(&mantissa[exp as usize..]);
        }
        out
    }
}

impl Real {
    /// Scientific rendering `d.ddde-N` with `digits` significant digits.
    pub fn to_scientific(&self, digits: usize) -> String {
        if self.0.is_zero() || !self.0.is_finite() {
            return self.to_decimal(digits);
        }
        let (negative, mantissa, exp) = self.0.to_sign_string_exp_round(10, Some(digits), Round::Nearest);
        let exp = exp.unwrap_or(0) - 1;
        let sign = if negative { "-" } else { "" };
        let (head, tail) = mantissa.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(f.precision().unwrap_or(20)))
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let prec = self.prec().max(rhs.prec());
                Real(Float::with_val(prec, (&self.0).$method(&rhs.0)))
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);
real_binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(Float::with_val(self.prec(), -&self.0))
    }
}
