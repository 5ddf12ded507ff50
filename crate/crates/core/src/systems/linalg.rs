//! Dense linear algebra at extended precision: LU with partial pivoting,
//! determinants over any numeric scalar, and the spectral radius of a
//! non-negative matrix.

use super::algebra::NumericScalar;
use super::jet::Jet;
use super::real::Real;
use super::SystemError;

pub type Matrix = Vec<Vec<Real>>;

pub fn identity_minus(m: &[Vec<Real>]) -> Matrix {
    m.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, v)| if i == j { v.like_i64(1) - v } else { -v })
                .collect()
        })
        .collect()
}

/// LU factorisation `PA = LU` of a real square matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: i64,
}

impl Lu {
    pub fn factor(mut a: Matrix) -> Result<Lu, SystemError> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
                .unwrap();
            if a[p][k].is_zero() {
                return Err(SystemError::Singular);
            }
            if p != k {
                a.swap(p, k);
                perm.swap(p, k);
                sign = -sign;
            }
            let pivot = a[k][k].clone();
            for i in k + 1..n {
                let f = &a[i][k] / &pivot;
                for j in k + 1..n {
                    let t = &f * &a[k][j];
                    a[i][j] = &a[i][j] - t;
                }
                a[i][k] = f;
            }
        }
        Ok(Lu { lu: a, perm, sign })
    }

    pub fn det(&self) -> Real {
        let mut d = self.lu[0][0].like_i64(self.sign);
        for (k, row) in self.lu.iter().enumerate() {
            d = d * &row[k];
        }
        d
    }

    pub fn solve(&self, b: &[Real]) -> Vec<Real> {
        let n = self.lu.len();
        let mut x: Vec<Real> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let t = &self.lu[i][j] * &x[j];
                x[i] = &x[i] - t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = &self.lu[i][j] * &x[j];
                x[i] = &x[i] - t;
            }
            x[i] = &x[i] / &self.lu[i][i];
        }
        x
    }

    /// Solve with a right-hand side of jets, component by component.
    pub fn solve_jets(&self, b: &[Jet]) -> Vec<Jet> {
        let comps: Vec<Vec<Real>> = b.iter().map(Jet::components).collect();
        let width = comps[0].len();
        let mut out: Vec<Vec<Real>> = vec![Vec::with_capacity(width); b.len()];
        for c in 0..width {
            let column: Vec<Real> = comps.iter().map(|v| v[c].clone()).collect();
            for (i, v) in self.solve(&column).into_iter().enumerate() {
                out[i].push(v);
            }
        }
        b.iter().zip(out).map(|(shape, v)| shape.with_components(&v)).collect()
    }
}

/// Determinant by Gaussian elimination with partial pivoting on the real
/// parts; works for jets, so the result carries derivatives.
pub fn det<T: NumericScalar>(mut a: Vec<Vec<T>>) -> Result<T, SystemError> {
    let n = a.len();
    let mut d = a[0][0].int(1);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].real().abs().partial_cmp(&a[j][k].real().abs()).unwrap())
            .unwrap();
        if p != k {
            a.swap(p, k);
            d = -d;
        }
        if k + 1 == n {
            return Ok(d * &a[k][k]);
        }
        if a[k][k].real().is_zero() {
            // the column vanishes in value but not necessarily in derivatives
            let rest: Vec<Vec<T>> = a[k..].iter().map(|row| row[k..].to_vec()).collect();
            return Ok(d * &expand(rest));
        }
        let inv = a[k][k].recip().map_err(|_| SystemError::Singular)?;
        d = d * &a[k][k];
        for i in k + 1..n {
            let f = a[i][k].clone() * &inv;
            for j in k + 1..n {
                let t = f.clone() * &a[k][j];
                a[i][j] = a[i][j].clone() - t;
            }
        }
    }
    Ok(d)
}

/// Cofactor expansion along the first column.
fn expand<T: NumericScalar>(a: Vec<Vec<T>>) -> T {
    let n = a.len();
    if n == 1 {
        return a[0][0].clone();
    }
    let mut total = a[0][0].int(0);
    for i in 0..n {
        let minor: Vec<Vec<T>> =
            a.iter().enumerate().filter(|&(r, _)| r != i).map(|(_, row)| row[1..].to_vec()).collect();
        let term = a[i][0].clone() * &expand(minor);
        total = if i % 2 == 0 { total + term } else { total - term };
    }
    total
}

/// Spectral radius of a non-negative square matrix by power iteration on
/// `A + I`, stopping when the Collatz–Wielandt bounds meet.
pub fn spectral_radius(m: &[Vec<Real>]) -> Result<Real, SystemError> {
    let n = m.len();
    if n == 0 {
        return Err(SystemError::Singular);
    }
    let prec = m[0][0].prec();
    if m.iter().flatten().any(Real::is_sign_negative) {
        return Err(SystemError::NegativeMatrix);
    }
    let tol = Real::two_pow(prec, 40 - prec as i32);
    let b: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, v)| if i == j { v + v.like_i64(1) } else { v.clone() })
                .collect()
        })
        .collect();
    let mut x = vec![Real::one(prec); n];
    for _ in 0..200_000 {
        let y: Vec<Real> = (0..n)
            .map(|i| b[i].iter().zip(&x).fold(Real::zero(prec), |acc, (a, v)| acc + a * v))
            .collect();
        let ratios: Vec<Real> = y.iter().zip(&x).map(|(a, v)| a / v).collect();
        let lo = ratios.iter().cloned().fold(ratios[0].clone(), |a, r| if r < a { r } else { a });
        let hi = ratios.iter().cloned().fold(ratios[0].clone(), |a, r| a.max(r));
        let scale = y.iter().cloned().fold(Real::zero(prec), Real::max);
        x = y.iter().map(|v| v / &scale).collect();
        if &hi - &lo <= &tol * &hi {
            let r = (&hi + &lo) * Real::from_f64(prec, 0.5);
            return Ok(r - Real::one(prec));
        }
    }
    Err(SystemError::SpectralNonConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::real::bits_for_digits;

    fn mat(rows: &[&[f64]]) -> Matrix {
        let p = bits_for_digits(30);
        rows.iter().map(|r| r.iter().map(|&v| Real::from_f64(p, v)).collect()).collect()
    }

    #[test]
    fn lu_solves_and_determinant() {
        let a = mat(&[&[0.0, 2.0, 1.0], &[1.0, 1.0, 0.0], &[3.0, 0.0, 1.0]]);
        let lu = Lu::factor(a.clone()).unwrap();
        assert!((lu.det().to_f64() - (-5.0)).abs() < 1e-25);
        assert!((det(a.clone()).unwrap().to_f64() + 5.0).abs() < 1e-25);
        let z = mat(&[&[0.0, 1.0, 2.0], &[0.0, 3.0, 4.0], &[0.0, 5.0, 7.0]]);
        assert!(det(z).unwrap().is_zero());
        let b = mat(&[&[1.0, 2.0, 3.0]]).remove(0);
        let x = lu.solve(&b);
        for (i, row) in a.iter().enumerate() {
            let s = row.iter().zip(&x).fold(b[i].like_i64(0), |acc, (a, v)| acc + a * v);
            assert!((s - &b[i]).abs().to_f64() < 1e-25);
        }
    }

    #[test]
    fn spectral_radius_examples() {
        let r = |m: Matrix| spectral_radius(&m).unwrap().to_f64();
        assert!((r(mat(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]])) - 1.0).abs() < 1e-25);
        assert!(r(mat(&[&[0.0, 0.0], &[0.0, 0.0]])).abs() < 1e-25);
        assert!((r(mat(&[&[0.0, 2.0], &[2.0, 0.0]])) - 2.0).abs() < 1e-25);
    }
}
