//! Exact truncated power series in `x`, optionally carrying a marker `u`.
//!
//! A [`PowerSeries`] stores the coefficients of `x^0..=x^N`. With rational
//! coefficients it is a [`Series`]; with [`MarkerPoly`] coefficients (a
//! polynomial in `u`) it is a [`BiSeries`]. Bivariate series keep the
//! marker degree of every `x^n` coefficient at most `n`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Integer, Rational};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("{op} needs a series with zero constant term")]
    NonZeroConstant { op: &'static str },
    #[error("division by a series with zero constant term")]
    ZeroDivisor,
    #[error("coefficient of x^{n} has marker degree {degree}")]
    MarkerOverflow { n: usize, degree: usize },
    #[error("a series needs at least one coefficient")]
    Empty,
}

/// Coefficient ring of a power series: commutative, with an action of the
/// rationals.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn from_rational(q: Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, q: &Rational) -> Self;
    /// Rational part free of the marker, if the coefficient has no marker at all.
    fn as_constant(&self) -> Option<Rational>;
    /// Largest marker degree present (0 for plain rationals).
    fn marker_degree(&self) -> usize;

    fn one() -> Self {
        Self::from_rational(Rational::from(1))
    }
}

impl Coefficient for Rational {
    fn zero() -> Self {
        Rational::new()
    }
    fn from_rational(q: Rational) -> Self {
        q
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn add(&self, other: &Self) -> Self {
        Rational::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Rational::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn scale(&self, q: &Rational) -> Self {
        Rational::from(self * q)
    }
    fn as_constant(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn marker_degree(&self) -> usize {
        0
    }
}

/// Polynomial in the marker `u` with rational coefficients; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MarkerPoly(Vec<Rational>);

impl MarkerPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.cmp0().is_eq()) {
            coeffs.pop();
        }
        MarkerPoly(coeffs)
    }

    /// `c·u^k`.
    pub fn monomial(k: usize, c: Rational) -> Self {
        let mut v = vec![Rational::new(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn eval(&self, u: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.0.iter().rev() {
            acc *= u;
            acc += c;
        }
        acc
    }
}

impl fmt::Debug for MarkerPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| c.cmp0().is_ne())
            .map(|(k, c)| format!("{c}*u^{k}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Coefficient for MarkerPoly {
    fn zero() -> Self {
        MarkerPoly(Vec::new())
    }
    fn from_rational(q: Rational) -> Self {
        Self::new(vec![q])
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let len = self.0.len().max(other.0.len());
        Self::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }
    fn sub(&self, other: &Self) -> Self {
        let len = self.0.len().max(other.0.len());
        Self::new((0..len).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }
    fn mul(&self, other: &Self) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return Self::zero();
        }
        let mut out = vec![Rational::new(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.cmp0().is_eq() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Self::new(out)
    }
    fn neg(&self) -> Self {
        MarkerPoly(self.0.iter().map(|c| Rational::from(-c)).collect())
    }
    fn scale(&self, q: &Rational) -> Self {
        Self::new(self.0.iter().map(|c| Rational::from(c * q)).collect())
    }
    fn as_constant(&self) -> Option<Rational> {
        match self.0.len() {
            0 => Some(Rational::new()),
            1 => Some(self.0[0].clone()),
            _ => None,
        }
    }
    fn marker_degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
}

/// Power series in `x` truncated after `x^N`.
#[derive(Clone, PartialEq)]
pub struct PowerSeries<C> {
    coeffs: Vec<C>,
}

pub type Series = PowerSeries<Rational>;
pub type BiSeries = PowerSeries<MarkerPoly>;

impl<C: fmt::Debug> fmt::Debug for PowerSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PowerSeries")
            .field("order", &(self.coeffs.len() - 1))
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

fn check_orders(a: usize, b: usize) -> Result<(), SeriesError> {
    if a == b {
        Ok(())
    } else {
        Err(SeriesError::OrderMismatch { left: a, right: b })
    }
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

impl<C: Coefficient> PowerSeries<C> {
    /// Series with the given coefficients; the order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<C>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        let s = PowerSeries { coeffs };
        s.check_markers()?;
        Ok(s)
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries { coeffs: vec![C::zero(); order + 1] }
    }

    pub fn constant(order: usize, c: C) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, C::one())
    }

    /// The series `x`.
    pub fn x(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = C::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coefficient::is_zero)
    }

    fn check_markers(&self) -> Result<(), SeriesError> {
        for (n, c) in self.coeffs.iter().enumerate() {
            let degree = c.marker_degree();
            if degree > n {
                return Err(SeriesError::MarkerOverflow { n, degree });
            }
        }
        Ok(())
    }

    fn require_zero_constant(&self, op: &'static str) -> Result<(), SeriesError> {
        if self.coeffs[0].is_zero() {
            Ok(())
        } else {
            Err(SeriesError::NonZeroConstant { op })
        }
    }

    /// Drop every coefficient above `x^order` (or pad with zeros).
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs: Vec<C> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, C::zero());
        PowerSeries { coeffs }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SeriesError> {
        check_orders(self.order(), other.order())?;
        Ok(PowerSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        check_orders(self.order(), other.order())?;
        Ok(PowerSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        check_orders(self.order(), other.order())?;
        let n = self.order();
        let mut coeffs = vec![C::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        Ok(PowerSeries { coeffs })
    }

    pub fn scale(&self, q: &Rational) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|c| c.scale(q)).collect() }
    }

    /// Multiply by a constant coefficient (e.g. a marker monomial).
    pub fn scale_coeff(&self, c: &C) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect() }
    }

    pub fn exp(&self) -> Result<Self, SeriesError> {
        self.require_zero_constant("exp")?;
        let n = self.order();
        // n g_n = sum_{k=1}^{n} k f_k g_{n-k}
        let mut g = vec![C::zero(); n + 1];
        g[0] = C::one();
        for m in 1..=n {
            let mut acc = C::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc = acc.add(&self.coeffs[k].scale(&Rational::from(k)).mul(&g[m - k]));
                }
            }
            g[m] = acc.scale(&rat(1, m as i64));
        }
        Ok(PowerSeries { coeffs: g })
    }

    /// `exp(f) - sum_{r<k} f^r/r!`.
    pub fn exp_ge(&self, k: usize) -> Result<Self, SeriesError> {
        let mut out = self.exp()?;
        let mut power = Self::one(self.order());
        let mut factorial = Integer::from(1);
        for r in 0..k {
            if r > 0 {
                power = power.checked_mul(self)?;
                factorial *= r as u32;
            }
            let term = power.scale(&Rational::from((Integer::from(1), factorial.clone())));
            out = out.checked_sub(&term)?;
        }
        Ok(out)
    }

    /// `log(1/(1-f))`.
    pub fn log_inv(&self) -> Result<Self, SeriesError> {
        self.require_zero_constant("log_inv")?;
        if self.order() == 0 {
            return Ok(Self::zero(0));
        }
        let one_minus = Self::one(self.order() - 1).checked_sub(&self.with_order(self.order() - 1))?;
        let q = self.derive().checked_div(&one_minus)?;
        Ok(q.integrate())
    }

    /// `log(1/(1-f)) - sum_{r<k} f^r/r`.
    pub fn log_inv_ge(&self, k: usize) -> Result<Self, SeriesError> {
        let mut out = self.log_inv()?;
        let mut power = Self::one(self.order());
        for r in 1..k {
            power = power.checked_mul(self)?;
            out = out.checked_sub(&power.scale(&rat(1, r as i64)))?;
        }
        Ok(out)
    }

    /// `f(g(x))`; the inner series must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        check_orders(self.order(), inner.order())?;
        inner.require_zero_constant("compose")?;
        let mut acc = Self::zero(self.order());
        for c in self.coeffs.iter().rev() {
            acc = acc.checked_mul(inner)?;
            acc.coeffs[0] = acc.coeffs[0].add(c);
        }
        acc.check_markers()?;
        Ok(acc)
    }

    /// Formal derivative; the order drops by one (a constant stays a constant).
    pub fn derive(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return Self::zero(0);
        }
        PowerSeries {
            coeffs: (1..=n).map(|k| self.coeffs[k].scale(&Rational::from(k))).collect(),
        }
    }

    /// Antiderivative with zero constant term; the order grows by one.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(C::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.scale(&rat(1, k as i64 + 1)));
        }
        PowerSeries { coeffs }
    }

    /// The solution `g` of `x g' = f` with `g(0) = 0`.
    pub fn inverse_pointing(&self) -> Result<Self, SeriesError> {
        self.require_zero_constant("inverse_pointing")?;
        Ok(PowerSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k == 0 { C::zero() } else { c.scale(&rat(1, k as i64)) })
                .collect(),
        })
    }

    pub fn checked_div(&self, divisor: &Self) -> Result<Self, SeriesError> {
        check_orders(self.order(), divisor.order())?;
        let g0 = match divisor.coeffs[0].as_constant() {
            Some(c) if c.cmp0().is_ne() => c,
            _ => return Err(SeriesError::ZeroDivisor),
        };
        let inv = Rational::from(g0.recip_ref());
        let n = self.order();
        let mut q: Vec<C> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut acc = self.coeffs[m].clone();
            for k in 1..=m {
                if !divisor.coeffs[k].is_zero() {
                    acc = acc.sub(&divisor.coeffs[k].mul(&q[m - k]));
                }
            }
            q.push(acc.scale(&inv));
        }
        Ok(PowerSeries { coeffs: q })
    }

    pub fn recip(&self) -> Result<Self, SeriesError> {
        Self::one(self.order()).checked_div(self)
    }
}

impl Series {
    pub fn from_rationals<I: IntoIterator<Item = Rational>>(coeffs: I) -> Result<Self, SeriesError> {
        Self::from_coeffs(coeffs.into_iter().collect())
    }

    /// Convenience constructor from small integer pairs `(num, den)`.
    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Result<Self, SeriesError> {
        Self::from_coeffs(coeffs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    /// Lift to a bivariate series with no marker.
    pub fn to_bi(&self) -> BiSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| MarkerPoly::from_rational(c.clone())).collect(),
        }
    }

    /// `n! [x^n]` for every `n`; `None` if some value is not an integer.
    pub fn egf_counts(&self) -> Option<Vec<Integer>> {
        let mut factorial = Integer::from(1);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (n, c) in self.coeffs.iter().enumerate() {
            if n > 0 {
                factorial *= n as u32;
            }
            let v = Rational::from(c * &factorial);
            if *v.denom() != 1 {
                return None;
            }
            out.push(v.numer().clone());
        }
        Some(out)
    }
}

impl BiSeries {
    /// The series `x·u`.
    pub fn xu(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = MarkerPoly::monomial(1, Rational::from(1));
        }
        s
    }

    /// Build from a lower-triangular table; row `n` holds the coefficients of `x^n u^k`.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, SeriesError> {
        Self::from_coeffs(rows.into_iter().map(MarkerPoly::new).collect())
    }

    pub fn marker_coeff(&self, n: usize, k: usize) -> Rational {
        self.coeffs[n].coeff(k)
    }

    /// Substitute a value for the marker.
    pub fn at_marker(&self, u: &Rational) -> Series {
        PowerSeries { coeffs: self.coeffs.iter().map(|c| c.eval(u)).collect() }
    }

    /// Coefficient of `u^k` as a series in `x`.
    pub fn marker_part(&self, k: usize) -> Series {
        PowerSeries { coeffs: self.coeffs.iter().map(|c| c.coeff(k)).collect() }
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<C: Coefficient> $trait<&PowerSeries<C>> for &PowerSeries<C> {
            type Output = PowerSeries<C>;
            fn $method(self, rhs: &PowerSeries<C>) -> PowerSeries<C> {
                self.$checked(rhs).expect("series operands must share a truncation order")
            }
        }
        impl<C: Coefficient> $trait<&PowerSeries<C>> for PowerSeries<C> {
            type Output = PowerSeries<C>;
            fn $method(self, rhs: &PowerSeries<C>) -> PowerSeries<C> {
                (&self).$method(rhs)
            }
        }
        impl<C: Coefficient> $trait<PowerSeries<C>> for PowerSeries<C> {
            type Output = PowerSeries<C>;
            fn $method(self, rhs: PowerSeries<C>) -> PowerSeries<C> {
                (&self).$method(&rhs)
            }
        }
        impl<C: Coefficient> $trait<PowerSeries<C>> for &PowerSeries<C> {
            type Output = PowerSeries<C>;
            fn $method(self, rhs: PowerSeries<C>) -> PowerSeries<C> {
                self.$method(&rhs)
            }
        }
    };
}

impl_binop!(Add, add, checked_add);
impl_binop!(Sub, sub, checked_sub);
impl_binop!(Mul, mul, checked_mul);

impl<C: Coefficient> Neg for PowerSeries<C> {
    type Output = PowerSeries<C>;
    fn neg(self) -> PowerSeries<C> {
        -&self
    }
}

impl<C: Coefficient> Neg for &PowerSeries<C> {
    type Output = PowerSeries<C>;
    fn neg(self) -> PowerSeries<C> {
        PowerSeries { coeffs: self.coeffs.iter().map(Coefficient::neg).collect() }
    }
}
