//! Bregman strongly nonexpansive mappings.
//!
//! The fixed-point iterations accept any mapping T that is quasi
//! nonexpansive in the Bregman sense, D_f(p, Tx) ≤ D_f(p, x) for every
//! fixed point p, and whose asymptotic fixed points coincide with its
//! fixed points. Projections onto closed convex sets and resolvents of
//! monotone bifunctions both qualify, and finite compositions of them
//! stay in the class whenever a common fixed point exists. Projection
//! and resolvent factors also satisfy the sharper form with the
//! D_f(Tx, x) term added on the left; compositions are only guaranteed
//! the plain quasi inequality.

use crate::equilibrium::ResolventProblem;
use crate::error::{Error, Result};
use crate::geometry::LegendreFunction;
use crate::points::PrimalPoint;
use crate::scalar::{as_f64, Real};
use crate::sets::{bregman_project, ConvexSet};

/// A mapping from the operator classes the iterations support.
#[derive(Debug, Clone)]
pub enum BsneMapping<T: Real> {
    /// x ↦ proj_C(x), fixed points are exactly C.
    SetProjection { target: ConvexSet<T> },
    /// x ↦ Res(x), fixed points are the mixed equilibrium solutions.
    ResolventMap { problem: ResolventProblem<T> },
    /// Left-to-right composition: maps[0] applies first.
    Composition { maps: Vec<BsneMapping<T>> },
}

/// One application of a mapping.
#[derive(Debug, Clone)]
pub struct MapApplication<T: Real> {
    pub point: PrimalPoint<T>,
    pub inner_iterations: usize,
}

impl<T: Real> BsneMapping<T> {
    pub fn projection(target: ConvexSet<T>) -> Self {
        BsneMapping::SetProjection { target }
    }

    pub fn resolvent(problem: ResolventProblem<T>) -> Self {
        BsneMapping::ResolventMap { problem }
    }

    pub fn composition(maps: Vec<BsneMapping<T>>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Invalid("composition needs at least one mapping".into()));
        }
        Ok(BsneMapping::Composition { maps })
    }

    pub fn check_compatible(&self, f: &LegendreFunction<T>) -> Result<()> {
        match self {
            BsneMapping::SetProjection { target } => target.check_dim(f.dim()),
            BsneMapping::ResolventMap { problem } => {
                let g = problem.geometry();
                if g.dim() != f.dim() || g.kind() != f.kind() {
                    return Err(Error::Invalid(
                        "resolvent mapping was built over a different geometry".into(),
                    ));
                }
                Ok(())
            }
            BsneMapping::Composition { maps } => {
                maps.iter().try_for_each(|m| m.check_compatible(f))
            }
        }
    }

    pub fn apply(
        &self,
        f: &LegendreFunction<T>,
        x: &PrimalPoint<T>,
        tol: T,
    ) -> Result<MapApplication<T>> {
        self.apply_warm(f, x, tol, None)
    }

    /// `warm` seeds internal resolvent solves; it never changes what the
    /// result converges to, only how fast.
    pub fn apply_warm(
        &self,
        f: &LegendreFunction<T>,
        x: &PrimalPoint<T>,
        tol: T,
        warm: Option<&PrimalPoint<T>>,
    ) -> Result<MapApplication<T>> {
        match self {
            BsneMapping::SetProjection { target } => {
                let r = bregman_project(f, target, x, tol)?;
                Ok(MapApplication { point: r.point, inner_iterations: r.inner_iterations })
            }
            BsneMapping::ResolventMap { problem } => {
                self.check_compatible(f)?;
                let r = problem.solve(x, tol, warm)?;
                Ok(MapApplication { point: r.point, inner_iterations: r.iterations })
            }
            BsneMapping::Composition { maps } => {
                let mut point = x.clone();
                let mut inner = 0usize;
                for (i, m) in maps.iter().enumerate() {
                    let w = if i + 1 == maps.len() { warm } else { None };
                    let r = m.apply_warm(f, &point, tol, w)?;
                    inner += r.inner_iterations;
                    point = r.point;
                }
                Ok(MapApplication { point, inner_iterations: inner })
            }
        }
    }
}

/// How far x is from being fixed, in both metrics of interest. The
/// Bregman component is D_f(x, Tx), which needs Tx in the domain
/// interior; every mapping here lands there.
#[derive(Debug, Clone)]
pub struct FixedPointResidual<T: Real> {
    pub image: PrimalPoint<T>,
    pub bregman: T,
    pub inf_norm: T,
}

pub fn fixed_point_residual<T: Real>(
    f: &LegendreFunction<T>,
    map: &BsneMapping<T>,
    x: &PrimalPoint<T>,
    tol: T,
) -> Result<FixedPointResidual<T>> {
    let image = map.apply(f, x, tol)?.point;
    let bregman = f.bregman_distance(x, &image)?;
    let inf_norm = image.dist_inf(x);
    Ok(FixedPointResidual { image, bregman, inf_norm })
}

/// Slack of the two-sided firm nonexpansiveness inequality for one pair,
/// D(Tx,Ty) + D(Ty,Tx) + D(Tx,x) + D(Ty,y) ≤ D(Tx,y) + D(Ty,x), as
/// lhs − rhs; nonpositive (up to roundoff) for projections and
/// resolvents.
pub fn bfne_gap<T: Real>(
    f: &LegendreFunction<T>,
    map: &BsneMapping<T>,
    x: &PrimalPoint<T>,
    y: &PrimalPoint<T>,
    tol: T,
) -> Result<T> {
    let tx = map.apply(f, x, tol)?.point;
    let ty = map.apply(f, y, tol)?.point;
    let check = crate::equilibrium::bfne_check(f, x, y, &tx, &ty)?;
    Ok(check.distance_lhs - check.distance_rhs)
}

/// Both sides of D_f(p, Tx) ≤ D_f(p, x); holds whenever p is a fixed
/// point of the mapping.
pub fn quasi_bregman_check<T: Real>(
    f: &LegendreFunction<T>,
    map: &BsneMapping<T>,
    x: &PrimalPoint<T>,
    p: &PrimalPoint<T>,
    tol: T,
) -> Result<(T, T)> {
    let tx = map.apply(f, x, tol)?.point;
    Ok((f.bregman_distance(p, &tx)?, f.bregman_distance(p, x)?))
}

/// Both sides of D_f(p, Tx) + D_f(Tx, x) ≤ D_f(p, x), the sharper
/// inequality satisfied by projection and resolvent factors.
pub fn firm_quasi_check<T: Real>(
    f: &LegendreFunction<T>,
    map: &BsneMapping<T>,
    x: &PrimalPoint<T>,
    p: &PrimalPoint<T>,
    tol: T,
) -> Result<(T, T)> {
    let tx = map.apply(f, x, tol)?.point;
    Ok((
        f.bregman_distance(p, &tx)? + f.bregman_distance(&tx, x)?,
        f.bregman_distance(p, x)?,
    ))
}

/// Largest inf-norm fixed-point residual of the candidate across all
/// mappings; small means the candidate is a common fixed point.
pub fn certify_common_fixed_point<T: Real>(
    f: &LegendreFunction<T>,
    maps: &[&BsneMapping<T>],
    candidate: &PrimalPoint<T>,
    tol: T,
) -> Result<T> {
    if !f.domain_contains(candidate) {
        return Err(Error::Domain(format!(
            "fixed-point candidate {:?} lies outside int dom f",
            candidate
                .coords()
                .iter()
                .map(|&v| as_f64(v))
                .collect::<Vec<f64>>()
        )));
    }
    let mut worst = T::zero();
    for map in maps {
        let r = fixed_point_residual(f, map, candidate, tol)?;
        worst = worst.max(r.inf_norm);
    }
    Ok(worst)
}
