//! Closed convex constraint sets and Bregman projections onto them.
//!
//! The projection of x onto C under f minimizes D_f(z, x) over z ∈ C and is
//! characterized by ⟨∇f(x) − ∇f(z), y − z⟩ ≤ 0 for every y ∈ C. For a single
//! linear constraint ⟨a, z⟩ {≤,=} b the KKT system collapses to one scalar
//! equation in the multiplier λ,
//!
//!   h(λ) = ⟨a, ∇f*(∇f(x) − λ a)⟩ = b,
//!
//! with h strictly decreasing, so a bracketing bisection plus a guarded
//! Newton polish solves it to machine precision. Boxes clamp coordinatewise
//! (f is separable), the simplex under the entropic geometry rescales
//! multiplicatively, and intersections run cyclic projections with Dykstra
//! dual corrections.

use crate::error::{Error, Result};
use crate::geometry::LegendreFunction;
use crate::linalg::dot;
use crate::points::PrimalPoint;
use crate::scalar::{as_f64, real, Real};

/// Default residual target for projections embedded in larger iterations.
pub const DEFAULT_PROJECTION_TOL: f64 = 1e-10;

const BISECTION_STEPS: usize = 80;
const NEWTON_POLISH_STEPS: usize = 4;
const BRACKET_DOUBLINGS: usize = 140;
const DYKSTRA_MAX_CYCLES: usize = 20_000;

/// A closed convex subset of ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet<T: Real> {
    /// The whole space; projections are the identity.
    WholeSpace,
    /// { x : ⟨a, x⟩ ≤ b }.
    Halfspace { normal: Vec<T>, offset: T },
    /// { x : ⟨a, x⟩ = b }.
    Hyperplane { normal: Vec<T>, offset: T },
    /// { x : l ≤ x ≤ u } componentwise; ±∞ bounds are open sides.
    Box { lower: Vec<T>, upper: Vec<T> },
    /// { x ≥ 0 : Σ xᵢ = radius }, the scaled simplex.
    Simplex { radius: T },
    /// Finite intersection with a stored feasible witness point.
    Intersection { members: Vec<ConvexSet<T>>, witness: PrimalPoint<T> },
}

impl<T: Real> ConvexSet<T> {
    pub fn whole_space() -> Self {
        ConvexSet::WholeSpace
    }

    pub fn halfspace(normal: Vec<T>, offset: T) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(ConvexSet::Halfspace { normal, offset })
    }

    pub fn hyperplane(normal: Vec<T>, offset: T) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(ConvexSet::Hyperplane { normal, offset })
    }

    pub fn boxed(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Invalid("box bounds must be nonempty and equal length".into()));
        }
        for (i, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() || l == T::infinity() || u == T::neg_infinity() {
                return Err(Error::Invalid(format!("box bound {i} is not a valid interval side")));
            }
            if l > u {
                return Err(Error::Invalid(format!(
                    "box is empty in coordinate {i}: {} > {}",
                    as_f64(l),
                    as_f64(u)
                )));
            }
        }
        Ok(ConvexSet::Box { lower, upper })
    }

    pub fn simplex(radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::Invalid(format!(
                "simplex radius must be positive and finite, got {}",
                as_f64(radius)
            )));
        }
        Ok(ConvexSet::Simplex { radius })
    }

    pub fn intersection(members: Vec<ConvexSet<T>>, witness: PrimalPoint<T>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Invalid("intersection needs at least one member".into()));
        }
        let tol = real::<T>(1e-9);
        for (i, m) in members.iter().enumerate() {
            if !m.contains(&witness, tol) {
                return Err(Error::Infeasible(format!(
                    "witness violates intersection member {i} by {}",
                    as_f64(m.violation(&witness))
                )));
            }
        }
        Ok(ConvexSet::Intersection { members, witness })
    }

    /// How far x is from satisfying the constraints; 0 inside.
    pub fn violation(&self, x: &PrimalPoint<T>) -> T {
        match self {
            ConvexSet::WholeSpace => T::zero(),
            ConvexSet::Halfspace { normal, offset } => {
                (dot(normal, x.coords()) - *offset).max(T::zero())
            }
            ConvexSet::Hyperplane { normal, offset } => (dot(normal, x.coords()) - *offset).abs(),
            ConvexSet::Box { lower, upper } => {
                let mut worst = T::zero();
                for ((&l, &u), &v) in lower.iter().zip(upper).zip(x.coords()) {
                    worst = worst.max(l - v).max(v - u);
                }
                worst.max(T::zero())
            }
            ConvexSet::Simplex { radius } => {
                let sum: T = x.coords().iter().copied().sum();
                let neg = x.coords().iter().fold(T::zero(), |m, &v| m.max(-v));
                (sum - *radius).abs().max(neg)
            }
            ConvexSet::Intersection { members, .. } => members
                .iter()
                .fold(T::zero(), |worst, m| worst.max(m.violation(x))),
        }
    }

    pub fn contains(&self, x: &PrimalPoint<T>, tol: T) -> bool {
        self.violation(x) <= tol
    }

    /// Dimension the set constrains, when it pins one down.
    pub fn dim_hint(&self) -> Option<usize> {
        match self {
            ConvexSet::WholeSpace | ConvexSet::Simplex { .. } => None,
            ConvexSet::Halfspace { normal, .. } | ConvexSet::Hyperplane { normal, .. } => {
                Some(normal.len())
            }
            ConvexSet::Box { lower, .. } => Some(lower.len()),
            ConvexSet::Intersection { members, witness } => members
                .iter()
                .find_map(|m| m.dim_hint())
                .or(Some(witness.dim())),
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            ConvexSet::WholeSpace | ConvexSet::Simplex { .. } => Ok(()),
            ConvexSet::Halfspace { normal, .. } | ConvexSet::Hyperplane { normal, .. } => {
                if normal.len() == dim {
                    Ok(())
                } else {
                    Err(Error::Invalid(format!(
                        "constraint normal has dimension {}, expected {dim}",
                        normal.len()
                    )))
                }
            }
            ConvexSet::Box { lower, .. } => {
                if lower.len() == dim {
                    Ok(())
                } else {
                    Err(Error::Invalid(format!(
                        "box has dimension {}, expected {dim}",
                        lower.len()
                    )))
                }
            }
            ConvexSet::Intersection { members, witness } => {
                if witness.dim() != dim {
                    return Err(Error::Invalid(format!(
                        "intersection witness has dimension {}, expected {dim}",
                        witness.dim()
                    )));
                }
                members.iter().try_for_each(|m| m.check_dim(dim))
            }
        }
    }
}

fn check_normal<T: Real>(normal: &[T], offset: T) -> Result<()> {
    if normal.is_empty() || normal.iter().any(|v| !v.is_finite()) || !offset.is_finite() {
        return Err(Error::Invalid("constraint needs finite coefficients".into()));
    }
    if normal.iter().all(|&v| v == T::zero()) {
        return Err(Error::Invalid("constraint normal must be nonzero".into()));
    }
    Ok(())
}

/// Outcome of a Bregman projection.
#[derive(Debug, Clone)]
pub struct ProjectionResult<T: Real> {
    pub point: PrimalPoint<T>,
    /// KKT multipliers where the solve produces them (one scalar for a
    /// halfspace or hyperplane); empty for closed-form branches.
    pub multipliers: Vec<T>,
    pub inner_iterations: usize,
    pub residual: T,
}

/// Bregman projection of x onto the set, argmin_{z ∈ C} D_f(z, x).
pub fn bregman_project<T: Real>(
    f: &LegendreFunction<T>,
    set: &ConvexSet<T>,
    x: &PrimalPoint<T>,
    tol: T,
) -> Result<ProjectionResult<T>> {
    if !f.domain_contains(x) {
        return Err(Error::Domain("projection input must lie in int dom f".into()));
    }
    set.check_dim(f.dim())?;
    match set {
        ConvexSet::WholeSpace => Ok(ProjectionResult {
            point: x.clone(),
            multipliers: vec![],
            inner_iterations: 0,
            residual: T::zero(),
        }),
        ConvexSet::Halfspace { normal, offset } => {
            let slack = dot(normal, x.coords()) - *offset;
            if slack <= T::zero() {
                return Ok(ProjectionResult {
                    point: x.clone(),
                    multipliers: vec![T::zero()],
                    inner_iterations: 0,
                    residual: T::zero(),
                });
            }
            let solve = dual_line_solve(f, normal, *offset, x, false)?;
            Ok(ProjectionResult {
                point: solve.point,
                multipliers: vec![solve.lambda],
                inner_iterations: solve.iterations,
                residual: solve.residual,
            })
        }
        ConvexSet::Hyperplane { normal, offset } => {
            let solve = dual_line_solve(f, normal, *offset, x, true)?;
            Ok(ProjectionResult {
                point: solve.point,
                multipliers: vec![solve.lambda],
                inner_iterations: solve.iterations,
                residual: solve.residual,
            })
        }
        ConvexSet::Box { lower, upper } => project_box(f, lower, upper, x),
        ConvexSet::Simplex { radius } => project_simplex(f, *radius, x),
        ConvexSet::Intersection { members, witness } => {
            project_intersection(f, members, witness, x, tol)
        }
    }
}

struct LineSolve<T: Real> {
    lambda: T,
    point: PrimalPoint<T>,
    iterations: usize,
    residual: T,
}

/// Solves ⟨a, ∇f*(∇f(x) − λ a)⟩ = b for λ. With `two_sided` false only
/// λ ≥ 0 is admissible (halfspace KKT); otherwise λ ranges over ℝ.
fn dual_line_solve<T: Real>(
    f: &LegendreFunction<T>,
    a: &[T],
    b: T,
    x: &PrimalPoint<T>,
    two_sided: bool,
) -> Result<LineSolve<T>> {
    let g = f.grad(x)?;
    let gc = g.coords().to_vec();

    // squared-norm geometry has the classic affine solution
    if matches!(f.kind(), crate::geometry::LegendreKind::SquaredNorm) {
        let lambda = (dot(a, x.coords()) - b) / dot(a, a);
        let point = x.add_scaled(-lambda, a);
        let residual = (dot(a, point.coords()) - b).abs();
        return Ok(LineSolve { lambda, point, iterations: 0, residual });
    }

    let point_at = |lambda: T| -> PrimalPoint<T> {
        PrimalPoint::new(
            gc.iter()
                .zip(a)
                .map(|(&gi, &ai)| f.grad_conj_1d(gi - lambda * ai))
                .collect::<Vec<T>>(),
        )
    };
    let h = |lambda: T| -> T { dot(a, point_at(lambda).coords()) - b };

    let h0 = h(T::zero());
    let scale = T::one() + b.abs() + dot(a, x.coords()).abs();
    if h0.abs() <= T::epsilon() * scale {
        return Ok(LineSolve {
            lambda: T::zero(),
            point: x.clone(),
            iterations: 0,
            residual: h0.abs(),
        });
    }

    // h is strictly decreasing; bracket the root by doubling outward
    let mut iterations = 0usize;
    let (mut lo, mut hi);
    if h0 > T::zero() {
        lo = T::zero();
        hi = T::one();
        let mut ok = false;
        for _ in 0..BRACKET_DOUBLINGS {
            iterations += 1;
            if h(hi) <= T::zero() {
                ok = true;
                break;
            }
            lo = hi;
            hi = hi * real(2.0);
        }
        if !ok {
            return Err(Error::Infeasible(
                "constraint level is unreachable along the dual line (set misses dom f)".into(),
            ));
        }
    } else {
        if !two_sided {
            // interior for the halfspace case is handled by the caller
            return Ok(LineSolve {
                lambda: T::zero(),
                point: x.clone(),
                iterations: 0,
                residual: h0.abs(),
            });
        }
        hi = T::zero();
        lo = -T::one();
        let mut ok = false;
        for _ in 0..BRACKET_DOUBLINGS {
            iterations += 1;
            if h(lo) >= T::zero() {
                ok = true;
                break;
            }
            hi = lo;
            lo = lo * real(2.0);
        }
        if !ok {
            return Err(Error::Infeasible(
                "constraint level is unreachable along the dual line (set misses dom f)".into(),
            ));
        }
    }

    for _ in 0..BISECTION_STEPS {
        iterations += 1;
        let mid = (lo + hi) * real(0.5);
        if h(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut lambda = (lo + hi) * real(0.5);

    // guarded Newton polish: h'(λ) = -Σ aᵢ² (∇f*)'(gᵢ - λ aᵢ)
    for _ in 0..NEWTON_POLISH_STEPS {
        let hv = h(lambda);
        let slope: T = gc
            .iter()
            .zip(a)
            .map(|(&gi, &ai)| ai * ai * f.grad_conj_slope_1d(gi - lambda * ai))
            .sum();
        if slope <= T::epsilon() {
            break;
        }
        let next = lambda + hv / slope;
        if next <= lo || next >= hi || !next.is_finite() {
            break;
        }
        lambda = next;
        iterations += 1;
    }

    let point = point_at(lambda);
    let residual = (dot(a, point.coords()) - b).abs();
    Ok(LineSolve { lambda, point, iterations, residual })
}

fn project_box<T: Real>(
    f: &LegendreFunction<T>,
    lower: &[T],
    upper: &[T],
    x: &PrimalPoint<T>,
) -> Result<ProjectionResult<T>> {
    let entropic = matches!(f.kind(), crate::geometry::LegendreKind::NegEntropy);
    if entropic {
        for (i, &u) in upper.iter().enumerate() {
            if u <= T::zero() {
                return Err(Error::Infeasible(format!(
                    "box upper bound {} in coordinate {i} excludes the positive orthant",
                    as_f64(u)
                )));
            }
        }
    }
    // separable f: the one-dimensional Bregman projection onto an interval
    // is the clamp, because t ↦ ∇f(t) − ∇f(xᵢ) changes sign exactly at xᵢ
    let coords: Vec<T> = x
        .coords()
        .iter()
        .zip(lower.iter().zip(upper))
        .map(|(&v, (&l, &u))| v.max(l).min(u))
        .collect();
    Ok(ProjectionResult {
        point: PrimalPoint::new(coords),
        multipliers: vec![],
        inner_iterations: 0,
        residual: T::zero(),
    })
}

fn project_simplex<T: Real>(
    f: &LegendreFunction<T>,
    radius: T,
    x: &PrimalPoint<T>,
) -> Result<ProjectionResult<T>> {
    if !matches!(f.kind(), crate::geometry::LegendreKind::NegEntropy) {
        return Err(Error::Invalid(
            "simplex projection is defined for the entropic geometry only".into(),
        ));
    }
    let sum: T = x.coords().iter().copied().sum();
    let scale = radius / sum;
    let point = PrimalPoint::new(x.coords().iter().map(|&v| v * scale).collect::<Vec<T>>());
    let residual = (point.coords().iter().copied().sum::<T>() - radius).abs();
    Ok(ProjectionResult { point, multipliers: vec![], inner_iterations: 0, residual })
}

fn project_intersection<T: Real>(
    f: &LegendreFunction<T>,
    members: &[ConvexSet<T>],
    witness: &PrimalPoint<T>,
    x: &PrimalPoint<T>,
    tol: T,
) -> Result<ProjectionResult<T>> {
    if !f.domain_contains(witness) {
        return Err(Error::Infeasible("intersection witness lies outside dom f".into()));
    }
    let gap_tol = real::<T>(1e-22).max(T::epsilon() * T::epsilon() * real(256.0));
    let feas_tol = tol.max(T::epsilon() * real(64.0));

    let mut z = x.clone();
    let mut duals: Vec<Vec<T>> = vec![vec![T::zero(); f.dim()]; members.len()];

    for cycle in 1..=DYKSTRA_MAX_CYCLES {
        let z_start = z.clone();
        for (member, q) in members.iter().zip(duals.iter_mut()) {
            let g = f.grad(&z)?;
            let shifted: Vec<T> = g.coords().iter().zip(q.iter()).map(|(&a, &b)| a + b).collect();
            let pulled = f.grad_conj(&crate::points::DualPoint::new(shifted.clone()))?;
            let proj = bregman_project(f, member, &pulled, tol)?;
            let g_new = f.grad(&proj.point)?;
            for ((qi, &si), &gi) in q.iter_mut().zip(&shifted).zip(g_new.coords()) {
                *qi = si - gi;
            }
            z = proj.point;
        }
        let gap = f.bregman_distance(&z, &z_start)?;
        let feas = members
            .iter()
            .fold(T::zero(), |worst, m| worst.max(m.violation(&z)));
        if gap <= gap_tol && feas <= feas_tol {
            return Ok(ProjectionResult {
                point: z,
                multipliers: vec![],
                inner_iterations: cycle,
                residual: feas.max(gap),
            });
        }
    }

    let feas = members
        .iter()
        .fold(T::zero(), |worst, m| worst.max(m.violation(&z)));
    Err(Error::Convergence { iterations: DYKSTRA_MAX_CYCLES, residual: as_f64(feas) })
}

/// Worst sampled violation of the projection optimality condition,
/// max over sampled y ∈ C of ⟨∇f(x) − ∇f(z), y − z⟩. Nonpositive (up to
/// solver residual) exactly when z is the Bregman projection of x.
pub fn verify_projection_optimality<T: Real, R: rand::Rng>(
    f: &LegendreFunction<T>,
    set: &ConvexSet<T>,
    z: &PrimalPoint<T>,
    x: &PrimalPoint<T>,
    samples: usize,
    rng: &mut R,
) -> Result<T> {
    let gx = f.grad(x)?;
    let gz = f.grad(z)?;
    let gdiff: Vec<T> = gx.coords().iter().zip(gz.coords()).map(|(&a, &b)| a - b).collect();
    let ys = crate::sampling::sample_in_set(f, set, samples, rng)?;
    let mut worst = T::neg_infinity();
    for y in &ys {
        let v = dot(&gdiff, &y.minus(z).into_coords());
        worst = worst.max(v);
    }
    Ok(worst)
}
