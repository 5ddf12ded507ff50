//! Implicit fixed-point systems `C = F(params, C)`, solved either as exact
//! truncated series or numerically at extended precision with derivative
//! propagation.

pub mod algebra;
pub mod jet;
pub mod linalg;
pub mod real;

use rug::Rational;
use thiserror::Error;

use crate::series::{Coefficient, PowerSeries};
pub use algebra::{Algebra, EvalError, NumericScalar};
pub use jet::Jet;
pub use linalg::{spectral_radius, Lu, Matrix};
pub use real::{bits_for_digits, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("pass {pass} changed coefficient x^{coeff} of unknown {index}: system is not well founded")]
    IllFounded { pass: usize, index: usize, coeff: usize },
    #[error("series iteration did not reach a fixed point after {passes} passes")]
    SeriesNonConvergence { passes: usize },
    #[error("Newton iteration diverged")]
    Divergence,
    #[error("Newton iteration failed to converge (residual {residual})")]
    NewtonFailure { residual: String },
    #[error("singular linear system")]
    Singular,
    #[error("matrix has a negative entry")]
    NegativeMatrix,
    #[error("power iteration did not converge")]
    SpectralNonConvergence,
    #[error("solution has a negative component")]
    NegativeSolution,
}

/// An implicit system `C = F(params, C)`.
///
/// The exact mode may carry more unknowns than the numeric mode (auxiliary
/// unknowns that the numeric mode eliminates internally); the first
/// [`SystemSpec::dim`] unknowns are shared.
pub trait SystemSpec: Sync {
    /// Number of unknowns in numeric mode.
    fn dim(&self) -> usize;

    /// Number of unknowns in exact mode.
    fn series_dim(&self) -> usize {
        self.dim()
    }

    fn eval_series<C: Coefficient>(
        &self,
        params: &[PowerSeries<C>],
        unknowns: &[PowerSeries<C>],
    ) -> Result<Vec<PowerSeries<C>>, EvalError>;

    fn eval_numeric(&self, params: &[Jet], unknowns: &[Jet]) -> Result<Vec<Jet>, EvalError>;
}

/// Solve the system exactly through `x^order` by iteration from zero.
///
/// Pass `m` works at truncation order `m - 1`; each pass must leave the
/// coefficients fixed by the previous pass unchanged.
pub fn solve_series<S: SystemSpec, C: Coefficient>(
    sys: &S,
    params: &[PowerSeries<C>],
    order: usize,
) -> Result<Vec<PowerSeries<C>>, SystemError> {
    let k = sys.series_dim();
    let mut current: Vec<PowerSeries<C>> = vec![PowerSeries::zero(order); k];
    for pass in 1..=order + 1 {
        let t = pass - 1;
        let p: Vec<_> = params.iter().map(|s| s.with_order(t)).collect();
        let c: Vec<_> = current.iter().map(|s| s.with_order(t)).collect();
        let next = sys.eval_series(&p, &c)?;
        for (index, (old, new)) in current.iter().zip(&next).enumerate() {
            for coeff in 0..t {
                if old.coeff(coeff) != new.coeff(coeff) {
                    return Err(SystemError::IllFounded { pass, index, coeff });
                }
            }
        }
        current = next.iter().map(|s| s.with_order(order)).collect();
    }
    let check = sys.eval_series(params, &current)?;
    if check != current {
        return Err(SystemError::SeriesNonConvergence { passes: order + 1 });
    }
    Ok(current)
}

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    /// Stop once the residual infinity-norm falls below `2^-tol_bits`.
    pub tol_bits: u32,
}

impl NewtonOptions {
    /// Tolerance scaled to the working precision: about `10^-25` at 40 digits.
    pub fn for_prec(prec: u32) -> Self {
        NewtonOptions { max_iterations: 200, tol_bits: (prec.saturating_sub(32)) * 5 / 8 }
    }

    pub fn tol(&self, prec: u32) -> Real {
        Real::two_pow(prec, -(self.tol_bits as i32))
    }
}

fn max_abs(v: &[Real]) -> Real {
    v.iter().map(Real::abs).fold(Real::zero(v[0].prec()), Real::max)
}

fn constant_params(params: &[Jet], m: usize) -> Vec<Jet> {
    params.iter().map(|p| Jet::constant(p.value().clone(), m, 1)).collect()
}

/// Residual `C - F(C)` and Jacobian `I - dF/dC` at real parameter values.
fn residual_and_jacobian<S: SystemSpec>(
    sys: &S,
    params: &[Jet],
    c: &[Real],
) -> Result<(Vec<Real>, Matrix), EvalError> {
    let k = c.len();
    let seeded: Vec<Jet> = c.iter().enumerate().map(|(i, v)| Jet::seed(v.clone(), k, 1, i)).collect();
    let f = sys.eval_numeric(&constant_params(params, k), &seeded)?;
    let r: Vec<Real> = c.iter().zip(&f).map(|(ci, fi)| ci - fi.value()).collect();
    let j: Matrix = f.iter().map(|fi| fi.grad().to_vec()).collect();
    Ok((r, linalg::identity_minus(&j)))
}

/// Newton iteration on `C - F(C) = 0` at the real parts of `params`, with
/// step halving whenever the residual does not decrease.
pub fn newton_real<S: SystemSpec>(
    sys: &S,
    params: &[Jet],
    init: &[Real],
    opts: &NewtonOptions,
) -> Result<(Vec<Real>, Lu), SystemError> {
    let prec = init[0].prec();
    let tol = opts.tol(prec);
    let floor = Real::two_pow(prec, 48 - prec as i32);
    let mut c = init.to_vec();
    let (mut r, mut jac) = residual_and_jacobian(sys, params, &c)?;
    let mut norm = max_abs(&r);
    let mut polished = false;
    let mut checkpoint = norm.clone();
    for iteration in 1..=opts.max_iterations {
        if norm <= floor {
            break;
        }
        // without a real root Newton creeps; give up unless the residual
        // halves every 8 iterations
        if iteration % 8 == 0 {
            if norm >= &checkpoint * Real::from_f64(prec, 0.5) && norm >= tol {
                return Err(SystemError::NewtonFailure { residual: norm.to_scientific(6) });
            }
            checkpoint = norm.clone();
        }
        // one polishing step after reaching the tolerance
        if norm < tol {
            if polished {
                break;
            }
            polished = true;
        }
        let lu = Lu::factor(jac.clone())?;
        let delta = lu.solve(&r);
        let mut t = Real::one(prec);
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<Real> = c.iter().zip(&delta).map(|(ci, di)| ci - &t * di).collect();
            if trial.iter().any(|v| !v.is_finite()) {
                return Err(SystemError::Divergence);
            }
            if let Ok((r2, j2)) = residual_and_jacobian(sys, params, &trial) {
                let n2 = max_abs(&r2);
                if n2 < norm || (n2 <= tol && norm <= tol) {
                    c = trial;
                    r = r2;
                    jac = j2;
                    norm = n2;
                    accepted = true;
                    break;
                }
            }
            t = t * Real::from_f64(prec, 0.5);
        }
        if !accepted {
            if norm < tol {
                break;
            }
            return Err(SystemError::NewtonFailure { residual: norm.to_scientific(6) });
        }
    }
    if !(norm < tol) {
        return Err(SystemError::NewtonFailure { residual: norm.to_scientific(6) });
    }
    let lu = Lu::factor(jac)?;
    Ok((c, lu))
}

/// Numeric solution of the system at `params` (jets over the caller's seed
/// space); derivatives of the solution follow by implicit differentiation.
pub fn solve_numeric<S: SystemSpec>(
    sys: &S,
    params: &[Jet],
    init: &[Real],
    opts: &NewtonOptions,
) -> Result<Vec<Jet>, SystemError> {
    let (c, lu) = newton_real(sys, params, init, opts)?;
    let shape = &params[0];
    let z: Vec<Jet> = c.iter().map(|v| shape.lift(v.clone())).collect();
    let seeded = params.iter().any(|p| p.grad().iter().any(|g| !g.is_zero()));
    if !seeded {
        return Ok(z);
    }
    let mut z = z;
    // Newton steps with the Jacobian frozen at the solution: each step fixes
    // one more derivative order.
    for _ in 0..shape.order() {
        let f = sys.eval_numeric(params, &z)?;
        let r: Vec<Jet> = z.iter().zip(&f).map(|(a, b)| a - b).collect();
        let delta = lu.solve_jets(&r);
        z = z.iter().zip(&delta).map(|(a, d)| a - d).collect();
    }
    Ok(z)
}

/// Minimal non-negative solution by plain iteration from zero; slow near the
/// branch point but needs no starting guess.
pub fn iterate_from_zero<S: SystemSpec>(
    sys: &S,
    params: &[Jet],
    prec: u32,
    max_passes: usize,
) -> Result<Vec<Real>, SystemError> {
    let k = sys.dim();
    let mut c = vec![Real::zero(prec); k];
    let consts = constant_params(params, 1);
    for _ in 0..max_passes {
        let z: Vec<Jet> = c.iter().map(|v| Jet::constant(v.clone(), 1, 1)).collect();
        let f = sys.eval_numeric(&consts, &z)?;
        let next: Vec<Real> = f.iter().map(|j| j.value().clone()).collect();
        let diff: Vec<Real> = next.iter().zip(&c).map(|(a, b)| a - b).collect();
        c = next;
        if c.iter().any(|v| !v.is_finite()) {
            return Err(SystemError::Divergence);
        }
        if max_abs(&diff) < Real::two_pow(prec, -60) {
            return Ok(c);
        }
    }
    Err(SystemError::Divergence)
}

/// `dF_i/dC_j` at a real point.
pub fn jacobian<S: SystemSpec>(sys: &S, params: &[Real], point: &[Real]) -> Result<Matrix, SystemError> {
    let k = point.len();
    let p: Vec<Jet> = params.iter().map(|v| Jet::constant(v.clone(), k, 1)).collect();
    let seeded: Vec<Jet> = point.iter().enumerate().map(|(i, v)| Jet::seed(v.clone(), k, 1, i)).collect();
    let f = sys.eval_numeric(&p, &seeded)?;
    Ok(f.iter().map(|fi| fi.grad().to_vec()).collect())
}

/// Rational constant helper for system definitions.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}
