//! Series-parallel blocks via networks.
//!
//! A network has two poles of types `i, j`; it is a single edge, a series
//! composition (`S`) or a parallel composition (`Par`). With `D = e + S + Par`
//! eliminated, the twelve unknowns `S_ij, Par_ij` satisfy a positive system
//! whose parameters are the vertex weights `w_t = x a_t`. Vertex-rooted blocks
//! then follow from the restricted RM-tree dissymmetry
//! `T = T^M + T^R - T^{R-M}`.

use rug::Rational;

use super::{Structure, Weights};
use crate::series::{Coefficient, PowerSeries};
use crate::systems::{solve_numeric, Algebra, EvalError, Jet, NewtonOptions, Real, SystemSpec};

/// Unordered type pairs in storage order.
pub const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

pub fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    PAIRS.iter().position(|&p| p == (a, b)).expect("types are 0, 1 or 2")
}

/// Which pole-type pairs admit a bare edge network.
pub fn edge_table(structure: Structure) -> [bool; 6] {
    let mut t = [false; 6];
    let present: &[(usize, usize)] = match structure {
        Structure::Mis => &[(0, 1), (2, 2)],
        Structure::Matching => &[(0, 2), (1, 1), (2, 2)],
    };
    for &(i, j) in present {
        t[pair_index(i, j)] = true;
    }
    t
}

/// Network values at the current iterate, with accessors for `S`, `Par`,
/// `D = e + S + Par` and the non-series part `N = e + Par`.
struct Net<'a, A> {
    s: &'a [A],
    p: &'a [A],
    e: [bool; 6],
    one: A,
}

impl<'a, A: Algebra> Net<'a, A> {
    fn new(structure: Structure, s: &'a [A], p: &'a [A]) -> Self {
        Net { s, p, e: edge_table(structure), one: s[0].int(1) }
    }
    fn s(&self, i: usize, j: usize) -> A {
        self.s[pair_index(i, j)].clone()
    }
    fn p(&self, i: usize, j: usize) -> A {
        self.p[pair_index(i, j)].clone()
    }
    fn n(&self, i: usize, j: usize) -> A {
        let k = pair_index(i, j);
        if self.e[k] {
            self.p[k].clone() + &self.one
        } else {
            self.p[k].clone()
        }
    }
    fn d(&self, i: usize, j: usize) -> A {
        self.n(i, j) + &self.s[pair_index(i, j)]
    }
}

fn e1<A: Algebra>(a: &A) -> Result<A, EvalError> {
    a.exp_ge(1)
}
fn e2<A: Algebra>(a: &A) -> Result<A, EvalError> {
    a.exp_ge(2)
}
fn e3<A: Algebra>(a: &A) -> Result<A, EvalError> {
    a.exp_ge(3)
}

/// Series composition with the middle vertex of each type (MIS): the left
/// factor is any network, the right one is not itself series.
fn series_mis<A: Algebra>(w: &Weights<A>, left: impl Fn(usize) -> A, right: impl Fn(usize) -> A) -> A {
    let [w0, w1, w2] = w;
    left(0) * w0 * &right(0)
        + &((left(1) + &left(2)) * w1 * &right(1))
        + &((left(1) * w1 + &(left(2) * w2)) * &right(2))
}

/// Series composition for matchings: a middle vertex matched on the left is
/// unmatched (type 2) on the right, and vice versa.
fn series_matching<A: Algebra>(w: &Weights<A>, left: impl Fn(usize) -> A, right: impl Fn(usize) -> A) -> A {
    let [w0, w1, w2] = w;
    left(0) * w0 * &right(0)
        + &(left(1) * w1 * &right(2))
        + &(left(2) * &(w1.clone() * &right(1) + &(w2.clone() * &right(2))))
}

/// Right-hand side of the network system: new `(S, Par)` from the current ones.
/// `Par` is evaluated at the new `S`.
pub fn network_rhs<A: Algebra>(
    structure: Structure,
    w: &Weights<A>,
    s: &[A],
    p: &[A],
) -> Result<(Vec<A>, Vec<A>), EvalError> {
    let net = Net::new(structure, s, p);
    let s_new: Vec<A> = PAIRS
        .iter()
        .map(|&(i, j)| match structure {
            Structure::Mis => series_mis(w, |t| net.d(i, t), |t| net.n(t, j)),
            Structure::Matching => series_matching(w, |t| net.n(i, t), |t| net.d(t, j)),
        })
        .collect();
    // parallel networks are built from the updated series networks, so each
    // pass of the series solver fixes one more order of both
    let sv = |i, j| s_new[pair_index(i, j)].clone();
    let one = &net.one;
    let two = Rational::from(2);
    let p_new = match structure {
        Structure::Mis => {
            let o = sv(1, 2).scale(&two) + &sv(2, 2);
            vec![
                e2(&sv(0, 0))?,
                e1(&(sv(0, 1) + &sv(0, 2)))? + &e2(&sv(0, 1))? + &(e1(&sv(0, 1))? * &e1(&sv(0, 2))?),
                e2(&sv(0, 2))?,
                e2(&sv(1, 1))?
                    + &(e1(&sv(1, 1))? * &(o.exp()? + &e1(&o)?))
                    + &(e1(&sv(1, 2))?.sq() * &sv(2, 2).exp()?).scale(&two),
                e1(&sv(1, 2))? * &sv(2, 2).exp()? + &e2(&sv(1, 2))? + &(e1(&sv(1, 2))? * &e1(&sv(2, 2))?),
                e1(&sv(2, 2))? + &e2(&sv(2, 2))?,
            ]
        }
        Structure::Matching => {
            let ex22 = sv(2, 2).exp()?;
            vec![
                e2(&sv(0, 0))?,
                sv(0, 1) * &(sv(0, 2).exp()? + &e1(&sv(0, 2))?),
                e1(&sv(0, 2))? + &e2(&sv(0, 2))?,
                (sv(1, 1) + &sv(1, 2).sq().scale(&two)) * &ex22 + &((one.clone() + &sv(1, 1)) * &e1(&sv(2, 2))?),
                sv(1, 2) * &(ex22.clone() + &e1(&sv(2, 2))?),
                e1(&sv(2, 2))? + &e2(&sv(2, 2))?,
            ]
        }
    };
    Ok((s_new, p_new))
}

/// Parallel compositions with at least three strands, at least two of them
/// series networks and at most one a bare edge.
fn multi_edge<A: Algebra>(structure: Structure, s: &[A]) -> Result<Vec<A>, EvalError> {
    let sv = |i, j| s[pair_index(i, j)].clone();
    let two = Rational::from(2);
    let one = s[0].int(1);
    Ok(match structure {
        Structure::Mis => {
            let o = sv(1, 2).scale(&two) + &sv(2, 2);
            let s11 = sv(1, 1);
            let m11 = o.exp()? * &(e2(&s11)? + &e3(&s11)?)
                + &(e1(&o)? * &(s11.clone() + &s11.sq().half()))
                + &(e2(&o)? * &s11)
                + &(e1(&sv(1, 2))?.sq() * &sv(2, 2).exp()?).scale(&two)
                - &sv(1, 2).sq();
            vec![
                e3(&sv(0, 0))?,
                e2(&(sv(0, 1) + &sv(0, 2)))?
                    + &(e2(&sv(0, 2))? * &sv(0, 1))
                    + &(e1(&sv(0, 2))? * &sv(0, 1).sq().half())
                    + &(e3(&sv(0, 1))? * &sv(0, 2).exp()?),
                e3(&sv(0, 2))?,
                m11,
                e3(&sv(1, 2))? * &sv(2, 2).exp()?
                    + &(sv(1, 2) * &e2(&sv(2, 2))?)
                    + &(e1(&sv(2, 2))? * &sv(1, 2).sq().half())
                    + &(e1(&sv(1, 2))? * &e1(&sv(2, 2))?)
                    + &e2(&sv(1, 2))?,
                e2(&sv(2, 2))? + &e3(&sv(2, 2))?,
            ]
        }
        Structure::Matching => {
            let s22 = sv(2, 2);
            vec![
                e3(&sv(0, 0))?,
                sv(0, 1) * &(e1(&sv(0, 2))? + &e2(&sv(0, 2))?),
                e2(&sv(0, 2))? + &e3(&sv(0, 2))?,
                e2(&s22)? * &(one.clone() + &sv(1, 1))
                    + &(e1(&s22)? * &(sv(1, 1) + &sv(1, 2).sq()))
                    + &(s22.exp()? * &sv(1, 2).sq()),
                sv(1, 2) * &(e1(&s22)? + &e2(&s22)?),
                e2(&s22)? + &e3(&s22)?,
            ]
        }
    })
}

/// Vertex-rooted blocks `[B_0, B_1, B_2]` from solved networks.
pub fn rooted_blocks<A: Algebra>(
    structure: Structure,
    w: &Weights<A>,
    s: &[A],
    p: &[A],
) -> Result<[A; 3], EvalError> {
    let net = Net::new(structure, s, p);
    let [w0, w1, w2] = w;
    let m = multi_edge(structure, s)?;
    let mv = |i, j| m[pair_index(i, j)].clone();
    let (sv, pv, nv) = (|i, j| net.s(i, j), |i, j| net.p(i, j), |i, j| net.n(i, j));
    let two = Rational::from(2);

    // x A_ji: a network from pole j through a series vertex to pole i
    let xa = |j: usize, i: usize| match structure {
        Structure::Mis => series_mis(w, |t| net.d(j, t), |t| net.n(t, i)),
        Structure::Matching => series_matching(w, |t| net.n(j, t), |t| net.d(t, i)),
    };

    let mut out = Vec::with_capacity(3);
    for i in 0..3 {
        let t_m = w0.clone() * &mv(i, 0) + &(w1.clone() * &mv(i, 1)) + &(w2.clone() * &mv(i, 2));
        let (t_r, t_rm, edge) = match structure {
            Structure::Mis => {
                let t_r = if i == 1 {
                    nv(1, 0) * w0 * &(xa(0, 1) + &xa(0, 2))
                        + &(nv(2, 0) * w0 * &xa(0, 1))
                        + &(nv(2, 2) * &(w2.clone() * &xa(2, 1) + &(w1.clone() * &xa(1, 1))))
                        + &(nv(1, 2)
                            * &(((xa(1, 1) + &xa(1, 2)) * w1).scale(&two)
                                + &(w2.clone() * &(xa(2, 1) + &xa(2, 2)))))
                        + &(nv(1, 1) * w1 * &(xa(1, 1) + &xa(2, 1) + &xa(1, 2) + &xa(2, 2)))
                } else {
                    nv(i, 0) * w0 * &xa(0, i)
                        + &(nv(i, 1) * w1 * &(xa(1, i) + &xa(2, i)))
                        + &(nv(i, 2) * &(w1.clone() * &xa(1, i) + &(w2.clone() * &xa(2, i))))
                };
                let t_rm = if i == 1 {
                    w0.clone() * &(sv(1, 0) * &(pv(1, 0) + &pv(2, 0)) + &(sv(2, 0) * &pv(1, 0)))
                        + &(w2.clone() * &(sv(1, 2) * &(pv(1, 2) + &pv(2, 2)) + &(sv(2, 2) * &pv(1, 2))))
                        + &(w1.clone()
                            * &(sv(1, 1) * &(pv(1, 1) + &pv(1, 2) + &pv(2, 1) + &pv(2, 2))
                                + &(sv(1, 2) * &(pv(1, 1) + &pv(2, 1))).scale(&two)
                                + &(sv(2, 2) * &pv(1, 1))))
                } else {
                    w0.clone() * &sv(i, 0) * &pv(i, 0)
                        + &(w1.clone() * &(sv(i, 1) * &(pv(i, 1) + &pv(i, 2)) + &(sv(i, 2) * &pv(i, 1))))
                        + &(w2.clone() * &sv(i, 2) * &pv(i, 2))
                };
                let edge = [w1, w0, w2][i].clone();
                (t_r.half(), t_rm, edge)
            }
            Structure::Matching => {
                let t_r = if i == 1 {
                    nv(1, 0) * w0 * &xa(0, 2)
                        + &(nv(2, 0) * w0 * &xa(0, 1))
                        + &(nv(1, 1) * w1 * &xa(2, 2))
                        + &(nv(1, 2) * &(w1.clone() * &xa(1, 2).scale(&two) + &(w2.clone() * &xa(2, 2))))
                        + &(nv(2, 2) * &(w1.clone() * &xa(1, 1) + &(w2.clone() * &xa(2, 1))))
                } else {
                    nv(i, 0) * w0 * &xa(0, i)
                        + &(nv(i, 1) * w1 * &xa(2, i))
                        + &(nv(i, 2) * &(w1.clone() * &xa(1, i) + &(w2.clone() * &xa(2, i))))
                };
                let t_rm = if i == 1 {
                    w0.clone() * &(sv(1, 0) * &pv(2, 0) + &(sv(2, 0) * &pv(1, 0)))
                        + &(w2.clone() * &(sv(1, 2) * &pv(2, 2) + &(sv(2, 2) * &pv(1, 2))))
                        + &(w1.clone()
                            * &(sv(1, 1) * &pv(2, 2)
                                + &(sv(1, 2) * &pv(2, 1)).scale(&two)
                                + &(sv(2, 2) * &pv(1, 1))))
                } else {
                    w0.clone() * &sv(i, 0) * &pv(i, 0)
                        + &(w1.clone() * &(sv(i, 1) * &pv(i, 2) + &(sv(i, 2) * &pv(i, 1))))
                        + &(w2.clone() * &sv(i, 2) * &pv(i, 2))
                };
                let edge = [w2.clone(), w1.clone(), w0.clone() + w2][i].clone();
                (t_r.half(), t_rm, edge)
            }
        };
        out.push(edge + &t_m + &t_r - &t_rm);
    }
    Ok([out.remove(0), out.remove(0), out.remove(0)])
}

/// The twelve-unknown network system; parameters are the three vertex weights.
#[derive(Clone, Copy, Debug)]
pub struct NetworkSystem {
    pub structure: Structure,
}

impl SystemSpec for NetworkSystem {
    fn dim(&self) -> usize {
        12
    }

    fn eval_series<C: Coefficient>(
        &self,
        params: &[PowerSeries<C>],
        unknowns: &[PowerSeries<C>],
    ) -> Result<Vec<PowerSeries<C>>, EvalError> {
        let w = [params[0].clone(), params[1].clone(), params[2].clone()];
        let (s, p) = network_rhs(self.structure, &w, &unknowns[..6], &unknowns[6..])?;
        Ok(s.into_iter().chain(p).collect())
    }

    fn eval_numeric(&self, params: &[Jet], unknowns: &[Jet]) -> Result<Vec<Jet>, EvalError> {
        let w = [params[0].clone(), params[1].clone(), params[2].clone()];
        let (s, p) = network_rhs(self.structure, &w, &unknowns[..6], &unknowns[6..])?;
        Ok(s.into_iter().chain(p).collect())
    }
}

/// Numeric blocks: solve the networks (Newton from zero), then apply the
/// dissymmetry formulas; derivatives flow through implicit differentiation.
pub fn blocks_numeric(structure: Structure, w: &Weights<Jet>) -> Result<[Jet; 3], EvalError> {
    let prec = w[0].prec();
    let sys = NetworkSystem { structure };
    let init = vec![Real::zero(prec); 12];
    let sol = solve_numeric(&sys, w, &init, &NewtonOptions::for_prec(prec))
        .map_err(|e| EvalError::Nested(format!("network system: {e}")))?;
    if sol.iter().any(|v| v.value().is_sign_negative()) {
        return Err(EvalError::Nested("network system: negative solution".into()));
    }
    rooted_blocks(structure, w, &sol[..6], &sol[6..])
}
