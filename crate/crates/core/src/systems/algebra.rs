//! The arithmetic shared by exact series, jets and plain reals, so that every
//! right-hand side is written once and evaluated in either mode.

use std::ops::{Add, Mul, Neg, Sub};

use rug::Rational;
use thiserror::Error;

use super::jet::Jet;
use super::real::Real;
use crate::series::{Coefficient, PowerSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("numeric domain error: {0}")]
    Domain(&'static str),
    #[error("{0}")]
    Nested(String),
}

pub trait Algebra:
    Clone
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    /// A constant shaped like `self` (same order, seeds, precision).
    fn lift(&self, q: &Rational) -> Self;
    fn scale(&self, q: &Rational) -> Self;
    fn exp(&self) -> Result<Self, EvalError>;
    /// `log(1/(1 - self))`.
    fn log_inv(&self) -> Result<Self, EvalError>;
    fn recip(&self) -> Result<Self, EvalError>;

    /// `exp(self) - sum_{r<k} self^r/r!`.
    fn exp_ge(&self, k: usize) -> Result<Self, EvalError> {
        let mut out = self.exp()?;
        let mut term = self.int(1);
        for r in 0..k {
            if r > 0 {
                term = (term * self).scale(&Rational::from((1, r as i64)));
            }
            out = out - &term;
        }
        Ok(out)
    }

    fn int(&self, n: i64) -> Self {
        self.lift(&Rational::from(n))
    }

    fn half(&self) -> Self {
        self.scale(&Rational::from((1, 2)))
    }

    fn sq(&self) -> Self {
        self.clone() * self
    }

    fn div(&self, d: &Self) -> Result<Self, EvalError> {
        Ok(self.clone() * &d.recip()?)
    }
}

impl<C: Coefficient> Algebra for PowerSeries<C> {
    fn lift(&self, q: &Rational) -> Self {
        PowerSeries::constant(self.order(), C::from_rational(q.clone()))
    }
    fn scale(&self, q: &Rational) -> Self {
        PowerSeries::scale(self, q)
    }
    fn exp(&self) -> Result<Self, EvalError> {
        Ok(PowerSeries::exp(self)?)
    }
    fn exp_ge(&self, k: usize) -> Result<Self, EvalError> {
        Ok(PowerSeries::exp_ge(self, k)?)
    }
    fn log_inv(&self) -> Result<Self, EvalError> {
        Ok(PowerSeries::log_inv(self)?)
    }
    fn recip(&self) -> Result<Self, EvalError> {
        Ok(PowerSeries::recip(self)?)
    }
}

impl Algebra for Real {
    fn lift(&self, q: &Rational) -> Self {
        self.like_rational(q)
    }
    fn scale(&self, q: &Rational) -> Self {
        self * self.like_rational(q)
    }
    fn exp(&self) -> Result<Self, EvalError> {
        Ok(Real::exp(self))
    }
    fn log_inv(&self) -> Result<Self, EvalError> {
        let one_minus = self.like_i64(1) - self;
        if !one_minus.is_positive() {
            return Err(EvalError::Domain("logarithm of a non-positive number"));
        }
        Ok(-one_minus.ln())
    }
    fn recip(&self) -> Result<Self, EvalError> {
        if self.is_zero() {
            return Err(EvalError::Domain("division by zero"));
        }
        Ok(Real::recip(self))
    }
}

impl Algebra for Jet {
    fn lift(&self, q: &Rational) -> Self {
        Jet::lift(self, self.value().like_rational(q))
    }
    fn scale(&self, q: &Rational) -> Self {
        self.scale_rational(q)
    }
    fn exp(&self) -> Result<Self, EvalError> {
        if !self.value().is_finite() {
            return Err(EvalError::Domain("non-finite argument to exp"));
        }
        Ok(Jet::exp(self))
    }
    fn log_inv(&self) -> Result<Self, EvalError> {
        let one_minus = self.int(1) - self;
        if !one_minus.value().is_positive() {
            return Err(EvalError::Domain("logarithm of a non-positive number"));
        }
        Ok(-one_minus.ln())
    }
    fn recip(&self) -> Result<Self, EvalError> {
        if self.value().is_zero() {
            return Err(EvalError::Domain("division by zero"));
        }
        Ok(Jet::recip(self))
    }
}

/// Scalars with a real value, used for pivoting.
pub trait NumericScalar: Algebra {
    fn real(&self) -> &Real;
}

impl NumericScalar for Real {
    fn real(&self) -> &Real {
        self
    }
}

impl NumericScalar for Jet {
    fn real(&self) -> &Real {
        self.value()
    }
}
