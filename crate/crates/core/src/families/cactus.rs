//! Block functions of cacti: blocks are single edges and cycles.
//!
//! Everything is written in vertex weights `w_t = x a_t`. A cycle through the
//! root is read as a path of the other vertices closed up at the root, so each
//! block function is a rational function whose denominator `D` is the
//! transfer-matrix determinant of those paths.

use rug::Rational;

use super::{Structure, Weights};
use crate::systems::{Algebra, EvalError};

/// The denominator `D` whose zero set is the singular curve.
pub fn denominator<A: Algebra>(structure: Structure, w: &Weights<A>) -> A {
    let [w0, w1, w2] = w;
    let one = w0.int(1);
    match structure {
        // 1 - w2 - w0 w1 - w0 w1 (w1 - w2)
        Structure::Mis => {
            let w01 = w0.clone() * w1;
            one - w2 - &w01 - &(w01.clone() * &(w1.clone() - w2))
        }
        // 1 - w2 - w0 w2 - w1^2 - w0 w1^2
        Structure::Matching => {
            let w11 = w1.sq();
            one - w2 - &(w0.clone() * w2) - &w11 - &(w0.clone() * &w11)
        }
    }
}

pub fn blocks<A: Algebra>(structure: Structure, w: &Weights<A>) -> Result<[A; 3], EvalError> {
    let [w0, w1, w2] = w;
    let one = w0.int(1);
    let inv2d = denominator(structure, w).recip()?.half();
    Ok(match structure {
        Structure::Mis => {
            let b0 = w1.clone() * &(one.clone() + w1 - w2) * &inv2d + &w1.half();
            let b1 = w0.clone() * &(one.clone() + &w1.scale(&Rational::from(2)) - w2) * &inv2d
                + &w0.half();
            let b2 = (one.clone() - &(w0.clone() * w1)) * &inv2d - &one.half() + &w2.half();
            [b0, b1, b2]
        }
        Structure::Matching => {
            let b0 = (w2.clone() + &w1.sq()) * &inv2d + &w2.half();
            let b1 = w1.scale(&Rational::from(2)) * &(one.clone() + w0) * &inv2d;
            let b2 = (one.clone() + w0) * &inv2d - &one.half() + &w2.half() + &w0.half();
            [b0, b1, b2]
        }
    })
}

/// Closed-form block EGF; its partial derivatives in `w_i` are the [`blocks`].
pub fn block_egf<A: Algebra>(structure: Structure, w: &Weights<A>) -> Result<A, EvalError> {
    let [w0, w1, w2] = w;
    let d = denominator(structure, w);
    let log = (w0.int(1) - &d).log_inv()?.half();
    let quarter = Rational::from((1, 4));
    Ok(match structure {
        Structure::Mis => log - &w2.half() + &w2.sq().scale(&quarter) + &(w0.clone() * w1).half(),
        Structure::Matching => log - &w2.half() + &w2.sq().scale(&quarter) + &(w0.clone() * w2).half(),
    })
}

/// Uncoloured block EGF `x^2/2 + log(1/(1-x))/2 - x/2 - x^2/4`.
pub fn univariate<A: Algebra>(x: &A) -> Result<A, EvalError> {
    let quarter = Rational::from((1, 4));
    Ok(x.sq().scale(&quarter) + &x.log_inv()?.half() - &x.half())
}

/// Alternating paths `A = w0 w1^2 / (1 - w0 w1)`: paths that start and end at
/// a type-1 vertex and alternate between types 1 and 0.
pub fn alternating_paths<A: Algebra>(w0: &A, w1: &A) -> Result<A, EvalError> {
    let w01 = w0.clone() * w1;
    Ok(w01.clone() * w1 * &(w0.int(1) - &w01).recip()?)
}
