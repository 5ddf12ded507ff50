//! Block functions of forests: the only block is a single edge.

use super::{Structure, Weights};
use crate::systems::{Algebra, EvalError};

/// `[B_0, B_1, B_2]` in vertex weights `w_t = x a_t`.
pub fn blocks<A: Algebra>(structure: Structure, w: &Weights<A>) -> Result<[A; 3], EvalError> {
    let [w0, w1, w2] = w;
    Ok(match structure {
        Structure::Mis => [w1.clone(), w0.clone(), w2.clone()],
        Structure::Matching => [w2.clone(), w1.clone(), w0.clone() + w2],
    })
}

/// Block EGF `B` in vertex weights.
pub fn block_egf<A: Algebra>(structure: Structure, w: &Weights<A>) -> Result<A, EvalError> {
    let [w0, w1, w2] = w;
    Ok(match structure {
        Structure::Mis => w0.clone() * w1 + &w2.sq().half(),
        Structure::Matching => w0.clone() * w2 + &w1.sq().half() + &w2.sq().half(),
    })
}

/// Uncoloured block EGF `x^2/2`.
pub fn univariate<A: Algebra>(x: &A) -> Result<A, EvalError> {
    Ok(x.sq().half())
}
