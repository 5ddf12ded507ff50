//! Block kernels of forests, cacti and series-parallel graphs, the C-systems
//! built from them, and the exact counting series they generate.
//!
//! Every kernel is homogeneous: each vertex carries one factor `x` and one
//! type weight, so `B_i(x, a_0, a_1, a_2)` depends only on the vertex weights
//! `w_t = x a_t`. Kernels are written in those weights throughout; this keeps
//! a size marker `u` attached to `x`, as bivariate series require.

pub mod cactus;
pub mod sp;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::series::{BiSeries, Coefficient, PowerSeries, Series};
use crate::systems::{solve_series, Algebra, EvalError, Jet, Real, SystemError, SystemSpec};

pub type Weights<A> = [A; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Forest,
    Cactus,
    #[serde(rename = "sp")]
    SeriesParallel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Mis,
    Matching,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Forest, Family::Cactus, Family::SeriesParallel];

    pub fn name(self) -> &'static str {
        match self {
            Family::Forest => "forest",
            Family::Cactus => "cactus",
            Family::SeriesParallel => "sp",
        }
    }
}

impl Structure {
    pub const ALL: [Structure; 2] = [Structure::Mis, Structure::Matching];

    pub fn name(self) -> &'static str {
        match self {
            Structure::Mis => "mis",
            Structure::Matching => "matching",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "forest" | "forests" | "tree" | "trees" => Ok(Family::Forest),
            "cactus" | "cacti" => Ok(Family::Cactus),
            "sp" | "series-parallel" => Ok(Family::SeriesParallel),
            _ => Err(format!("unknown family '{s}' (expected forest, cactus or sp)")),
        }
    }
}

impl FromStr for Structure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mis" => Ok(Structure::Mis),
            "matching" | "matchings" => Ok(Structure::Matching),
            _ => Err(format!("unknown structure '{s}' (expected mis or matching)")),
        }
    }
}

/// Where the singularity of a block function sits for fixed type weights.
#[derive(Clone, Debug, PartialEq)]
pub enum SingularCurve {
    /// The block functions are entire in `x`.
    Infinite,
    At(Real),
    /// No closed form available.
    Unknown,
}

/// The three rooted block functions of one family and structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockKernel {
    pub family: Family,
    pub structure: Structure,
}

pub fn tree_kernel(structure: Structure) -> BlockKernel {
    BlockKernel { family: Family::Forest, structure }
}

pub fn cactus_kernel(structure: Structure) -> BlockKernel {
    BlockKernel { family: Family::Cactus, structure }
}

pub fn sp_kernel(structure: Structure) -> BlockKernel {
    BlockKernel { family: Family::SeriesParallel, structure }
}

impl BlockKernel {
    /// Auxiliary unknowns carried by the exact-mode C-system.
    pub fn aux_dim(&self) -> usize {
        match self.family {
            Family::SeriesParallel => 12,
            _ => 0,
        }
    }

    /// Exact blocks; for SP the current network iterate is passed in `aux`
    /// and its update is returned alongside.
    pub fn blocks_series<C: Coefficient>(
        &self,
        w: &Weights<PowerSeries<C>>,
        aux: &[PowerSeries<C>],
    ) -> Result<([PowerSeries<C>; 3], Vec<PowerSeries<C>>), EvalError> {
        match self.family {
            Family::Forest => Ok((tree::blocks(self.structure, w)?, Vec::new())),
            Family::Cactus => Ok((cactus::blocks(self.structure, w)?, Vec::new())),
            Family::SeriesParallel => {
                let b = sp::rooted_blocks(self.structure, w, &aux[..6], &aux[6..])?;
                let (s, p) = sp::network_rhs(self.structure, w, &aux[..6], &aux[6..])?;
                Ok((b, s.into_iter().chain(p).collect()))
            }
        }
    }

    /// Exact blocks with the SP networks solved first.
    pub fn blocks_series_solved(&self, w: &Weights<Series>) -> Result<[Series; 3], SystemError> {
        match self.family {
            Family::SeriesParallel => {
                let order = w[0].order();
                let net = solve_series(&sp::NetworkSystem { structure: self.structure }, w, order)?;
                Ok(sp::rooted_blocks(self.structure, w, &net[..6], &net[6..])?)
            }
            _ => Ok(self.blocks_series(w, &[])?.0),
        }
    }

    pub fn blocks_numeric(&self, w: &Weights<Jet>) -> Result<[Jet; 3], EvalError> {
        match self.family {
            Family::Forest => tree::blocks(self.structure, w),
            Family::Cactus => cactus::blocks(self.structure, w),
            Family::SeriesParallel => sp::blocks_numeric(self.structure, w),
        }
    }

    /// `B_i(x, a_0, a_1, a_2)` in the original arguments.
    pub fn eval(&self, x: &Jet, a: &Weights<Jet>) -> Result<[Jet; 3], EvalError> {
        let w = [x.clone() * &a[0], x.clone() * &a[1], x.clone() * &a[2]];
        self.blocks_numeric(&w)
    }

    /// Closed-form block EGF `B` in vertex weights (forests and cacti only).
    pub fn block_egf<A: Algebra>(&self, w: &Weights<A>) -> Option<Result<A, EvalError>> {
        match self.family {
            Family::Forest => Some(tree::block_egf(self.structure, w)),
            Family::Cactus => Some(cactus::block_egf(self.structure, w)),
            Family::SeriesParallel => None,
        }
    }

    /// Smallest `x > 0` where the block functions blow up at type weights `y`.
    pub fn singular_curve(&self, y: &Weights<Real>) -> SingularCurve {
        match self.family {
            Family::Forest => SingularCurve::Infinite,
            Family::SeriesParallel => SingularCurve::Unknown,
            Family::Cactus => {
                let d = |x: &Real| {
                    let w = [x * &y[0], x * &y[1], x * &y[2]];
                    cactus::denominator(self.structure, &w)
                };
                let prec = y[0].prec();
                // scan for the first sign change of D, then bisect
                let mut lo = Real::zero(prec);
                let step = Real::from_f64(prec, 1.0 / 64.0);
                let mut hi = step.clone();
                let mut steps = 0;
                while d(&hi).is_positive() {
                    lo = hi.clone();
                    hi = &hi + &step;
                    steps += 1;
                    if steps > 64 * 64 {
                        return SingularCurve::Infinite;
                    }
                }
                for _ in 0..prec {
                    let mid = (&lo + &hi) * Real::from_f64(prec, 0.5);
                    if d(&mid).is_positive() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                SingularCurve::At(lo)
            }
        }
    }
}

/// Vertex weights of the C-system: which unknown hangs off a block vertex of
/// each type, with the marker `xu` on marked vertices.
pub fn vertex_weights<A: Algebra>(structure: Structure, x: &A, xu: &A, c: &[A]) -> Weights<A> {
    match structure {
        Structure::Mis => [xu.clone() * &c[0], x.clone() * &(c[1].clone() + &c[2]), x.clone() * &c[1]],
        Structure::Matching => [x.clone() * &c[0], xu.clone() * &c[2], xu.clone() * &c[1]],
    }
}

fn system_rhs<A: Algebra>(structure: Structure, b: [A; 3], c: &[A]) -> Result<Vec<A>, EvalError> {
    let [b0, b1, b2] = b;
    Ok(match structure {
        Structure::Mis => vec![b0.exp()?, b1.exp_ge(1)? * &c[2], b2.exp()?],
        Structure::Matching => vec![b0.exp()?, c[2].clone() * &b1, b2.exp()?],
    })
}

/// The three-equation C-system of a kernel.
///
/// Exact mode takes parameters `[x, x u]` and, for SP, carries the network
/// unknowns after `C_0, C_1, C_2`. Numeric mode takes `[x, u]`.
#[derive(Clone, Copy, Debug)]
pub struct CSystem {
    pub kernel: BlockKernel,
}

impl SystemSpec for CSystem {
    fn dim(&self) -> usize {
        3
    }

    fn series_dim(&self) -> usize {
        3 + self.kernel.aux_dim()
    }

    fn eval_series<C: Coefficient>(
        &self,
        params: &[PowerSeries<C>],
        unknowns: &[PowerSeries<C>],
    ) -> Result<Vec<PowerSeries<C>>, EvalError> {
        let s = self.kernel.structure;
        let w = vertex_weights(s, &params[0], &params[1], &unknowns[..3]);
        let (b, aux) = self.kernel.blocks_series(&w, &unknowns[3..])?;
        let mut out = system_rhs(s, b, &unknowns[..3])?;
        out.extend(aux);
        Ok(out)
    }

    fn eval_numeric(&self, params: &[Jet], unknowns: &[Jet]) -> Result<Vec<Jet>, EvalError> {
        let s = self.kernel.structure;
        let xu = params[0].clone() * &params[1];
        let w = vertex_weights(s, &params[0], &xu, unknowns);
        let b = self.kernel.blocks_numeric(&w)?;
        system_rhs(s, b, unknowns)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Recomputed from the uncoloured block function.
    Computed,
    /// Published reference value, not recomputed.
    Reference,
}

#[derive(Clone, Debug)]
pub struct ClassRadius {
    pub value: Real,
    pub provenance: Provenance,
}

/// Reference radius of connected series-parallel graphs.
pub const SP_CLASS_RADIUS: &str = "0.1102133467";

/// Radius of the class: solve `c B''(c) = 1`, then `rho = c exp(-B'(c))`.
pub fn class_radius(family: Family, prec: u32) -> ClassRadius {
    let b = |x: &Jet| -> Result<Jet, EvalError> {
        match family {
            Family::Forest => tree::univariate(x),
            Family::Cactus => cactus::univariate(x),
            Family::SeriesParallel => unreachable!(),
        }
    };
    if family == Family::SeriesParallel {
        return ClassRadius {
            value: Real::parse(prec, SP_CLASS_RADIUS).expect("valid literal"),
            provenance: Provenance::Reference,
        };
    }
    let jet = |c: &Real| b(&Jet::seed(c.clone(), 1, 2, 0));
    // c B''(c) - 1 increases from -1; the cactus block function is singular at 1
    let g = |c: &Real| jet(c).map(|j| c * j.d2(0, 0) - Real::one(prec));
    let mut lo = Real::zero(prec);
    let mut hi = Real::from_f64(prec, 0.5);
    while matches!(g(&hi), Ok(v) if v.is_sign_negative()) {
        lo = hi.clone();
        hi = match family {
            Family::Cactus => (&hi + Real::one(prec)) * Real::from_f64(prec, 0.5),
            _ => &hi + &hi,
        };
    }
    for _ in 0..prec + 8 {
        let mid = (&lo + &hi) * Real::from_f64(prec, 0.5);
        match g(&mid) {
            Ok(v) if v.is_sign_negative() => lo = mid,
            _ => hi = mid,
        }
    }
    let c0 = lo;
    let db = jet(&c0).expect("inside the domain").d(0).clone();
    ClassRadius { value: &c0 * (-db).exp(), provenance: Provenance::Computed }
}

/// A kernel with its C-system and the radius of its graph class.
#[derive(Clone, Debug)]
pub struct FamilyStructureModel {
    pub kernel: BlockKernel,
    pub c_system: CSystem,
    pub class_radius: ClassRadius,
}

impl FamilyStructureModel {
    pub fn family(&self) -> Family {
        self.kernel.family
    }
    pub fn structure(&self) -> Structure {
        self.kernel.structure
    }
}

pub fn build_model(family: Family, structure: Structure, prec: u32) -> FamilyStructureModel {
    let kernel = BlockKernel { family, structure };
    FamilyStructureModel { kernel, c_system: CSystem { kernel }, class_radius: class_radius(family, prec) }
}

/// Exact counts `n! [x^n] G` and the joint table `n! [x^n u^k] G`.
#[derive(Clone, Debug, PartialEq)]
pub struct CountSeries {
    pub totals: Vec<Integer>,
    /// `joint[n][k]`: structures of size `k` (vertices for MIS, edges for
    /// matchings) summed over graphs on `n` vertices.
    pub joint: Vec<Vec<Integer>>,
}

fn factorial(n: usize) -> Integer {
    (1..=n as u32).fold(Integer::from(1), |acc, k| acc * k)
}

fn to_integer(q: Rational) -> Result<Integer, SystemError> {
    if *q.denom() == 1 {
        Ok(q.numer().clone())
    } else {
        Err(SystemError::Eval(EvalError::Nested(format!("non-integral count {q}"))))
    }
}

/// The bivariate solution `C_0, C_1, C_2` (plus SP network unknowns).
pub fn solve_bivariate(model: &FamilyStructureModel, order: usize) -> Result<Vec<BiSeries>, SystemError> {
    solve_series(&model.c_system, &[BiSeries::x(order), BiSeries::xu(order)], order)
}

/// Connected (`C`) and all-graph (`G`) bivariate EGFs.
pub fn connected_and_all(model: &FamilyStructureModel, order: usize) -> Result<(BiSeries, BiSeries), SystemError> {
    let c = solve_bivariate(model, order)?;
    let (x, xu) = (BiSeries::x(order), BiSeries::xu(order));
    let pointed = match model.structure() {
        Structure::Mis => &xu * &c[0] + &x * &c[1],
        Structure::Matching => &x * &c[0] + &xu * &c[1],
    };
    let connected = pointed.inverse_pointing().map_err(EvalError::from)?;
    let all = connected.exp().map_err(EvalError::from)?;
    Ok((connected, all))
}

pub fn counting_series(model: &FamilyStructureModel, order: usize) -> Result<CountSeries, SystemError> {
    let (_, g) = connected_and_all(model, order)?;
    let mut totals = Vec::with_capacity(order + 1);
    let mut joint = Vec::with_capacity(order + 1);
    let one = Rational::from(1);
    for n in 0..=order {
        let f = factorial(n);
        let row = g.coeff(n);
        totals.push(to_integer(row.eval(&one) * &f)?);
        let mut sizes = Vec::new();
        for k in 0..=n {
            let v = to_integer(row.coeff(k) * Rational::from(&f))?;
            match model.structure() {
                Structure::Mis => sizes.push(v),
                Structure::Matching => {
                    if k % 2 == 1 {
                        if v != 0 {
                            return Err(SystemError::Eval(EvalError::Nested(format!(
                                "odd marker degree {k} at n = {n}"
                            ))));
                        }
                    } else {
                        sizes.push(v);
                    }
                }
            }
        }
        joint.push(sizes);
    }
    Ok(CountSeries { totals, joint })
}

/// Totals only, solved at `u = 1` (cheaper than [`counting_series`]).
pub fn counting_totals(model: &FamilyStructureModel, order: usize) -> Result<Vec<Integer>, SystemError> {
    let x = Series::x(order);
    let c = solve_series(&model.c_system, &[x.clone(), x.clone()], order)?;
    let pointed = match model.structure() {
        Structure::Mis => &x * &c[0] + &x * &c[1],
        Structure::Matching => &x * &c[0] + &x * &c[1],
    };
    let g = pointed.inverse_pointing().and_then(|c| c.exp()).map_err(EvalError::from)?;
    g.egf_counts().ok_or_else(|| SystemError::Eval(EvalError::Nested("non-integral count".into())))
}

/// Pointed series at `u = 1`: `C_i` and the block functions `B_i` at
/// `a = (1, 1, 1)`.
#[derive(Clone, Debug)]
pub struct PointedSeries {
    pub c: [Series; 3],
    pub b: [Series; 3],
}

impl PointedSeries {
    /// `n! [x^{n-1}] C_i` for `n = 1..=order+1`, indexed by `n`.
    pub fn c_triples(&self, i: usize) -> Vec<Integer> {
        triples(&self.c[i])
    }

    pub fn b_triples(&self, i: usize) -> Vec<Integer> {
        triples(&self.b[i])
    }
}

/// `n! [x^{n-1}] f`, with index 0 reported as 0.
fn triples(f: &Series) -> Vec<Integer> {
    let mut out = vec![Integer::new()];
    for n in 1..=f.order() + 1 {
        let v = Rational::from(f.coeff(n - 1) * factorial(n));
        out.push(to_integer(v).expect("pointed counts are integral"));
    }
    out
}

pub fn pointed_series(model: &FamilyStructureModel, order: usize) -> Result<PointedSeries, SystemError> {
    let x = Series::x(order);
    let c = solve_series(&model.c_system, &[x.clone(), x.clone()], order)?;
    let b = model.kernel.blocks_series_solved(&[x.clone(), x.clone(), x])?;
    Ok(PointedSeries { c: [c[0].clone(), c[1].clone(), c[2].clone()], b })
}
