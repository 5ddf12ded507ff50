//! Forward-mode jets: a value with its gradient and (optionally) Hessian
//! with respect to `m` seed variables.

use std::ops::{Add, Mul, Neg, Sub};

use rug::Rational;

use super::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    value: Real,
    grad: Vec<Real>,
    /// Upper triangle of the Hessian, row-major; empty for first-order jets.
    hess: Vec<Real>,
    order: u8,
}

fn packed_len(m: usize) -> usize {
    m * (m + 1) / 2
}

/// Index of `(i, j)` in the packed upper triangle.
pub fn packed_index(m: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * m - i + 1) / 2 + (j - i)
}

impl Jet {
    /// Constant jet with `m` seeds of the given order (1 or 2).
    pub fn constant(value: Real, m: usize, order: u8) -> Self {
        assert!(order == 1 || order == 2, "jet order must be 1 or 2");
        let prec = value.prec();
        Jet {
            grad: vec![Real::zero(prec); m],
            hess: if order == 2 { vec![Real::zero(prec); packed_len(m)] } else { Vec::new() },
            value,
            order,
        }
    }

    /// The seed variable with index `index`.
    pub fn seed(value: Real, m: usize, order: u8, index: usize) -> Self {
        let mut j = Self::constant(value, m, order);
        j.grad[index] = j.value.like_i64(1);
        j
    }

    pub fn from_parts(value: Real, grad: Vec<Real>, hess: Vec<Real>) -> Self {
        let m = grad.len();
        let order = if hess.is_empty() { 1 } else { 2 };
        assert!(order == 1 || hess.len() == packed_len(m));
        Jet { value, grad, hess, order }
    }

    pub fn value(&self) -> &Real {
        &self.value
    }

    pub fn grad(&self) -> &[Real] {
        &self.grad
    }

    pub fn d(&self, i: usize) -> &Real {
        &self.grad[i]
    }

    pub fn d2(&self, i: usize, j: usize) -> &Real {
        &self.hess[packed_index(self.grad.len(), i, j)]
    }

    pub fn seeds(&self) -> usize {
        self.grad.len()
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn prec(&self) -> u32 {
        self.value.prec()
    }

    /// Constant with the same shape as `self`.
    pub fn lift(&self, v: Real) -> Self {
        Self::constant(v, self.seeds(), self.order)
    }

    /// First-order jet of the partial derivative with respect to seed `i`.
    pub fn partial(&self, i: usize) -> Jet {
        assert_eq!(self.order, 2, "partial jets need second-order input");
        let m = self.seeds();
        Jet {
            value: self.grad[i].clone(),
            grad: (0..m).map(|k| self.d2(i, k).clone()).collect(),
            hess: Vec::new(),
            order: 1,
        }
    }

    /// All components as one flat vector (value, gradient, Hessian).
    pub fn components(&self) -> Vec<Real> {
        let mut v = Vec::with_capacity(1 + self.grad.len() + self.hess.len());
        v.push(self.value.clone());
        v.extend(self.grad.iter().cloned());
        v.extend(self.hess.iter().cloned());
        v
    }

    /// Inverse of [`Jet::components`] for a jet shaped like `self`.
    pub fn with_components(&self, comps: &[Real]) -> Jet {
        let m = self.seeds();
        Jet {
            value: comps[0].clone(),
            grad: comps[1..=m].to_vec(),
            hess: comps[m + 1..].to_vec(),
            order: self.order,
        }
    }

    /// Apply a scalar function given its value and first two derivatives at
    /// `self.value`.
    fn chain(&self, f: Real, df: Real, d2f: Real) -> Jet {
        let m = self.seeds();
        let grad: Vec<Real> = self.grad.iter().map(|g| &df * g).collect();
        let mut hess = Vec::with_capacity(self.hess.len());
        if self.order == 2 {
            for i in 0..m {
                for j in i..m {
                    let h = &df * self.d2(i, j) + &d2f * &self.grad[i] * &self.grad[j];
                    hess.push(h);
                }
            }
        }
        Jet { value: f, grad, hess, order: self.order }
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.chain(e.clone(), e.clone(), e)
    }

    pub fn ln(&self) -> Jet {
        let r = self.value.recip();
        let r2 = &r * &r;
        self.chain(self.value.ln(), r, -r2)
    }

    pub fn recip(&self) -> Jet {
        let r = self.value.recip();
        let r2 = &r * &r;
        let r3 = &r2 * &r;
        self.chain(r, -r2, r3.clone() + r3)
    }

    pub fn scale(&self, c: &Real) -> Jet {
        Jet {
            value: &self.value * c,
            grad: self.grad.iter().map(|g| g * c).collect(),
            hess: self.hess.iter().map(|h| h * c).collect(),
            order: self.order,
        }
    }

    pub fn scale_rational(&self, q: &Rational) -> Jet {
        self.scale(&self.value.like_rational(q))
    }

    fn zip(&self, other: &Jet, f: impl Fn(&Real, &Real) -> Real) -> Jet {
        assert_eq!(self.seeds(), other.seeds(), "jets over different seed spaces");
        assert_eq!(self.order, other.order, "jets of different orders");
        Jet {
            value: f(&self.value, &other.value),
            grad: self.grad.iter().zip(&other.grad).map(|(a, b)| f(a, b)).collect(),
            hess: self.hess.iter().zip(&other.hess).map(|(a, b)| f(a, b)).collect(),
            order: self.order,
        }
    }

    fn product(&self, other: &Jet) -> Jet {
        assert_eq!(self.seeds(), other.seeds(), "jets over different seed spaces");
        assert_eq!(self.order, other.order, "jets of different orders");
        let m = self.seeds();
        let (a, b) = (&self.value, &other.value);
        let grad: Vec<Real> =
            (0..m).map(|i| a * &other.grad[i] + b * &self.grad[i]).collect();
        let mut hess = Vec::with_capacity(self.hess.len());
        if self.order == 2 {
            for i in 0..m {
                for j in i..m {
                    let h = a * other.d2(i, j)
                        + b * self.d2(i, j)
                        + &self.grad[i] * &other.grad[j]
                        + &self.grad[j] * &other.grad[i];
                    hess.push(h);
                }
            }
        }
        Jet { value: a * b, grad, hess, order: self.order }
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, |a, b| a.zip(b, |x, y| x + y));
jet_binop!(Sub, sub, |a, b| a.zip(b, |x, y| x - y));
jet_binop!(Mul, mul, |a, b| a.product(b));

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            value: -&self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
            hess: self.hess.iter().map(|h| -h).collect(),
            order: self.order,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::real::bits_for_digits;

    #[test]
    fn product_rule_second_order() {
        let p = bits_for_digits(30);
        let x = Jet::seed(Real::from_f64(p, 2.0), 2, 2, 0);
        let y = Jet::seed(Real::from_f64(p, 3.0), 2, 2, 1);
        let f = &(&x * &x) * &y; // x^2 y
        assert_eq!(f.value().to_f64(), 12.0);
        assert_eq!(f.d(0).to_f64(), 12.0);
        assert_eq!(f.d(1).to_f64(), 4.0);
        assert_eq!(f.d2(0, 0).to_f64(), 6.0);
        assert_eq!(f.d2(0, 1).to_f64(), 4.0);
        assert_eq!(f.d2(1, 1).to_f64(), 0.0);
        let g = f.partial(0);
        assert_eq!(g.value().to_f64(), 12.0);
        assert_eq!(g.d(1).to_f64(), 4.0);
    }

    #[test]
    fn recip_and_exp() {
        let p = bits_for_digits(30);
        let x = Jet::seed(Real::from_f64(p, 0.5), 1, 2, 0);
        let r = x.recip();
        assert_eq!(r.d(0).to_f64(), -4.0);
        assert_eq!(r.d2(0, 0).to_f64(), 16.0);
        let e = x.exp();
        assert!((e.d2(0, 0).to_f64() - 0.5f64.exp()).abs() < 1e-15);
    }
}
