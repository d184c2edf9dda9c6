//! Equilibrium bifunctions and the mixed resolvent.
//!
//! A bifunction Θ : C × C → ℝ together with a convex regularizer φ defines
//! the mixed problem: find z ∈ C with Θ(z, y) + φ(y) − φ(z) ≥ 0 for all
//! y ∈ C. Its resolvent anchored at x adds the Bregman coupling term,
//!
//!   Θ(z, y) + φ(y) − φ(z) + ⟨∇f(z) − ∇f(x), y − z⟩ ≥ 0  ∀ y ∈ C,
//!
//! and is single-valued on int dom f when Θ is monotone. Both bifunction
//! families here reduce the condition to an affine operator A z + s plus a
//! separable nonsmooth term, so the solver splits the optimality field:
//! the affine part is stepped explicitly, while ∇f, the weighted-ℓ¹ term,
//! and the constraint set go into an exact Euclidean proximal step that is
//! solved coordinatewise, with a scalar multiplier search when the set is
//! a single linear cut. A correcting second explicit step keeps the
//! iteration convergent for merely monotone affine parts such as skew
//! operators. Intersection sets are not separable and take an older
//! dual-space sweep instead. Solutions are certified a posteriori by
//! sampling the inequality over C; nothing is trusted from the iteration
//! count alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{LegendreFunction, LegendreKind};
use crate::linalg::{dot, spectral_norm, sym_min_eigenvalue, DenseMatrix};
use crate::points::PrimalPoint;
use crate::sampling::sample_in_set;
use crate::scalar::{as_f64, real, Real};
use crate::sets::{bregman_project, ConvexSet};

/// Size of the cached feasible sample each resolvent certificate uses.
pub const VI_SAMPLE_COUNT: usize = 64;
const VI_SAMPLE_SEED: u64 = 0xB1F0;
const SOLVER_MAX_ITERS: usize = 100_000;
const TAU_MIN: f64 = 1e-14;

/// Proper convex functional on ℝⁿ from a small closed family.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexFunctional<T: Real> {
    Zero,
    /// ½⟨Qx, x⟩ + ⟨r, x⟩ + s with Q symmetric positive semidefinite.
    Quadratic { matrix: DenseMatrix<T>, linear: Vec<T>, constant: T },
    /// Σ wᵢ |xᵢ| with wᵢ ≥ 0.
    WeightedL1 { weights: Vec<T> },
}

impl<T: Real> ConvexFunctional<T> {
    pub fn zero() -> Self {
        ConvexFunctional::Zero
    }

    pub fn quadratic(matrix: DenseMatrix<T>, linear: Vec<T>, constant: T) -> Result<Self> {
        if matrix.n_rows() != matrix.n_cols() || matrix.n_rows() != linear.len() {
            return Err(Error::Invalid("quadratic term needs a square matrix matching r".into()));
        }
        if !constant.is_finite() {
            return Err(Error::Invalid("quadratic constant must be finite".into()));
        }
        let scale = T::one() + spectral_norm(&matrix);
        let n = matrix.n_rows();
        for i in 0..n {
            for j in (i + 1)..n {
                if (matrix.at(i, j) - matrix.at(j, i)).abs() > real::<T>(1e-9) * scale {
                    return Err(Error::Invalid("quadratic matrix must be symmetric".into()));
                }
            }
        }
        let min_eig = sym_min_eigenvalue(&matrix.symmetric_part())?;
        if min_eig < -real::<T>(1e-9) * scale {
            return Err(Error::Invalid(format!(
                "quadratic matrix must be positive semidefinite, min eigenvalue {}",
                as_f64(min_eig)
            )));
        }
        Ok(ConvexFunctional::Quadratic { matrix, linear, constant })
    }

    pub fn weighted_l1(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|&w| !(w >= T::zero()) || !w.is_finite()) {
            return Err(Error::Invalid("ℓ¹ weights must be finite and nonnegative".into()));
        }
        Ok(ConvexFunctional::WeightedL1 { weights })
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            ConvexFunctional::Zero => None,
            ConvexFunctional::Quadratic { linear, .. } => Some(linear.len()),
            ConvexFunctional::WeightedL1 { weights } => Some(weights.len()),
        }
    }

    pub fn eval(&self, x: &PrimalPoint<T>) -> T {
        match self {
            ConvexFunctional::Zero => T::zero(),
            ConvexFunctional::Quadratic { matrix, linear, constant } => {
                let qx = matrix.matvec(x.coords());
                dot(&qx, x.coords()) * real(0.5) + dot(linear, x.coords()) + *constant
            }
            ConvexFunctional::WeightedL1 { weights } => x
                .coords()
                .iter()
                .zip(weights)
                .map(|(&v, &w)| w * v.abs())
                .sum(),
        }
    }
}

/// Equilibrium bifunction Θ on C × C. Both families satisfy Θ(x, x) = 0,
/// are continuous in the first argument, and convex in the second; the
/// operator family is monotone exactly when the symmetric part of M is
/// positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub enum Bifunction<T: Real> {
    /// Θ(x, y) = g(y) − g(x) for a convex g; equilibria minimize g.
    OptimizationInduced { objective: ConvexFunctional<T> },
    /// Θ(x, y) = ⟨Mx + b, y − x⟩; equilibria solve the variational
    /// inequality for the affine operator.
    OperatorInduced { matrix: DenseMatrix<T>, shift: Vec<T>, monotone: bool },
}

impl<T: Real> Bifunction<T> {
    pub fn from_objective(objective: ConvexFunctional<T>) -> Self {
        Bifunction::OptimizationInduced { objective }
    }

    /// Rejects operators whose symmetric part has a negative eigenvalue.
    pub fn from_operator(matrix: DenseMatrix<T>, shift: Vec<T>) -> Result<Self> {
        let b = Self::from_operator_unchecked(matrix, shift)?;
        match &b {
            Bifunction::OperatorInduced { monotone: false, .. } => Err(Error::Invalid(
                "operator bifunction is not monotone; build it unchecked to probe it anyway"
                    .into(),
            )),
            _ => Ok(b),
        }
    }

    /// Builds without requiring monotonicity so validation suites can
    /// exercise operators that are expected to fail.
    pub fn from_operator_unchecked(matrix: DenseMatrix<T>, shift: Vec<T>) -> Result<Self> {
        if matrix.n_rows() != matrix.n_cols() || matrix.n_rows() != shift.len() {
            return Err(Error::Invalid("operator needs a square matrix matching its shift".into()));
        }
        let scale = T::one() + spectral_norm(&matrix);
        let min_eig = sym_min_eigenvalue(&matrix.symmetric_part())?;
        let monotone = min_eig >= -real::<T>(1e-9) * scale;
        Ok(Bifunction::OperatorInduced { matrix, shift, monotone })
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Bifunction::OptimizationInduced { objective } => objective.dim(),
            Bifunction::OperatorInduced { shift, .. } => Some(shift.len()),
        }
    }

    pub fn is_monotone(&self) -> bool {
        match self {
            Bifunction::OptimizationInduced { .. } => true,
            Bifunction::OperatorInduced { monotone, .. } => *monotone,
        }
    }

    pub fn eval(&self, x: &PrimalPoint<T>, y: &PrimalPoint<T>) -> T {
        match self {
            Bifunction::OptimizationInduced { objective } => objective.eval(y) - objective.eval(x),
            Bifunction::OperatorInduced { matrix, shift, .. } => {
                let mut op = matrix.matvec(x.coords());
                for (o, &s) in op.iter_mut().zip(shift) {
                    *o = *o + s;
                }
                dot(&op, &y.minus(x).into_coords())
            }
        }
    }
}

/// Sampled check of the structural conditions a bifunction needs for its
/// resolvent to be well defined: zero diagonal, monotonicity, continuity
/// along segments in the first slot, convexity in the second.
#[derive(Debug, Clone)]
pub struct BifunctionReport<T: Real> {
    pub diagonal_max: T,
    pub monotonicity_max: T,
    /// Continuity defect along segment probes: how much the drift over
    /// a short step exceeds the linear prediction of a longer secant.
    /// Stays near roundoff for hemicontinuous Θ at any data scale; a
    /// jump discontinuity surfaces at its full height.
    pub segment_drift: T,
    pub midpoint_convexity_max: T,
    pub samples: usize,
}

impl<T: Real> BifunctionReport<T> {
    pub fn is_satisfied(&self) -> bool {
        self.diagonal_max <= real(1e-9)
            && self.monotonicity_max <= real(1e-9)
            && self.segment_drift <= real(1e-4)
            && self.midpoint_convexity_max <= real(1e-9)
    }
}

pub fn validate_bifunction<T: Real, R: rand::Rng>(
    f: &LegendreFunction<T>,
    theta: &Bifunction<T>,
    set: &ConvexSet<T>,
    samples: usize,
    rng: &mut R,
) -> Result<BifunctionReport<T>> {
    let pts = sample_in_set(f, set, samples.max(4), rng)?;
    let mut diagonal_max = T::zero();
    let mut monotonicity_max = T::neg_infinity();
    let mut segment_drift = T::zero();
    let mut midpoint_convexity_max = T::neg_infinity();
    let half = real::<T>(0.5);
    let t_small = real::<T>(1e-7);
    let t_large = real::<T>(1e-3);
    for (i, x) in pts.iter().enumerate() {
        diagonal_max = diagonal_max.max(theta.eval(x, x).abs());
        let y = &pts[(i + 1) % pts.len()];
        let z = &pts[(i + 2) % pts.len()];
        monotonicity_max = monotonicity_max.max(theta.eval(x, y) + theta.eval(y, x));
        // continuity probe along the segment toward z: the drift over a
        // short step must shrink to the linear prediction of a longer
        // secant, so a jump shows up whatever the data scale
        let dir = z.minus(x).into_coords();
        let here = theta.eval(x, y);
        let small = (theta.eval(&x.add_scaled(t_small, &dir), y) - here).abs();
        let large = (theta.eval(&x.add_scaled(t_large, &dir), y) - here).abs();
        segment_drift = segment_drift.max(small - large * (t_small / t_large));
        let mid = PrimalPoint::new(
            y.coords()
                .iter()
                .zip(z.coords())
                .map(|(&a, &b)| (a + b) * half)
                .collect::<Vec<T>>(),
        );
        midpoint_convexity_max = midpoint_convexity_max
            .max(theta.eval(x, &mid) - (theta.eval(x, y) + theta.eval(x, z)) * half);
    }
    Ok(BifunctionReport {
        diagonal_max,
        monotonicity_max,
        segment_drift,
        midpoint_convexity_max,
        samples: pts.len(),
    })
}

/// Result of one resolvent evaluation.
#[derive(Debug, Clone)]
pub struct ResolventSolve<T: Real> {
    pub point: PrimalPoint<T>,
    pub iterations: usize,
    /// Worst sampled violation of the resolvent inequality at the result.
    pub residual: T,
}

/// The resolvent of (Θ, φ) over C under f, reduced to its affine operator
/// A z + s plus the separable weighted-ℓ¹ remainder. Holds cached sample
/// points of C used to certify each solve.
#[derive(Debug, Clone)]
pub struct ResolventProblem<T: Real> {
    f: LegendreFunction<T>,
    set: ConvexSet<T>,
    theta: Bifunction<T>,
    phi: ConvexFunctional<T>,
    affine: DenseMatrix<T>,
    affine_shift: Vec<T>,
    l1_weights: Option<Vec<T>>,
    lipschitz: T,
    vi_points: Vec<PrimalPoint<T>>,
}

impl<T: Real> ResolventProblem<T> {
    pub fn new(
        f: LegendreFunction<T>,
        theta: Bifunction<T>,
        phi: ConvexFunctional<T>,
        set: ConvexSet<T>,
    ) -> Result<Self> {
        let dim = f.dim();
        set.check_dim(dim)?;
        if let Some(d) = theta.dim() {
            if d != dim {
                return Err(Error::Invalid(format!(
                    "bifunction dimension {d} does not match the geometry dimension {dim}"
                )));
            }
        }
        if let Some(d) = phi.dim() {
            if d != dim {
                return Err(Error::Invalid(format!(
                    "regularizer dimension {d} does not match the geometry dimension {dim}"
                )));
            }
        }
        if !theta.is_monotone() {
            return Err(Error::Invalid(
                "resolvent requires a monotone bifunction; the operator's symmetric part has a negative eigenvalue".into(),
            ));
        }

        let mut affine = DenseMatrix::zeros(dim, dim);
        let mut affine_shift = vec![T::zero(); dim];
        let mut weights = vec![T::zero(); dim];
        let mut has_l1 = false;

        let absorb = |piece: &ConvexFunctional<T>,
                          affine: &mut DenseMatrix<T>,
                          shift: &mut Vec<T>,
                          weights: &mut Vec<T>,
                          has_l1: &mut bool| {
            match piece {
                ConvexFunctional::Zero => {}
                ConvexFunctional::Quadratic { matrix, linear, .. } => {
                    *affine = affine.add(matrix);
                    for (s, &c) in shift.iter_mut().zip(linear) {
                        *s = *s + c;
                    }
                }
                ConvexFunctional::WeightedL1 { weights: w } => {
                    *has_l1 = true;
                    for (acc, &wi) in weights.iter_mut().zip(w) {
                        *acc = *acc + wi;
                    }
                }
            }
        };

        match &theta {
            Bifunction::OptimizationInduced { objective } => {
                absorb(objective, &mut affine, &mut affine_shift, &mut weights, &mut has_l1)
            }
            Bifunction::OperatorInduced { matrix, shift, .. } => {
                affine = affine.add(matrix);
                for (s, &v) in affine_shift.iter_mut().zip(shift) {
                    *s = *s + v;
                }
            }
        }
        absorb(&phi, &mut affine, &mut affine_shift, &mut weights, &mut has_l1);

        if has_l1 && matches!(f.kind(), LegendreKind::NegEntropy) {
            // on the positive orthant |z| = z, so the ℓ¹ part is linear
            for (s, w) in affine_shift.iter_mut().zip(&mut weights) {
                *s = *s + *w;
                *w = T::zero();
            }
            has_l1 = false;
        }

        let lipschitz = if affine.is_zero() { T::zero() } else { spectral_norm(&affine) };
        let mut rng = ChaCha8Rng::seed_from_u64(VI_SAMPLE_SEED);
        let vi_points = sample_in_set(&f, &set, VI_SAMPLE_COUNT, &mut rng)?;

        Ok(ResolventProblem {
            f,
            set,
            theta,
            phi,
            affine,
            affine_shift,
            l1_weights: if has_l1 { Some(weights) } else { None },
            lipschitz,
            vi_points,
        })
    }

    pub fn geometry(&self) -> &LegendreFunction<T> {
        &self.f
    }

    pub fn set(&self) -> &ConvexSet<T> {
        &self.set
    }

    pub fn lipschitz(&self) -> T {
        self.lipschitz
    }

    /// Θ(z, y) + φ(y) − φ(z) + ⟨∇f(z) − ∇f(x), y − z⟩, the quantity that
    /// must be nonnegative over y ∈ C at the resolvent point.
    pub fn inequality_slack(
        &self,
        x: &PrimalPoint<T>,
        z: &PrimalPoint<T>,
        y: &PrimalPoint<T>,
    ) -> Result<T> {
        let gz = self.f.grad(z)?;
        let gx = self.f.grad(x)?;
        let gdiff: Vec<T> = gz.coords().iter().zip(gx.coords()).map(|(&a, &b)| a - b).collect();
        Ok(self.theta.eval(z, y) + self.phi.eval(y) - self.phi.eval(z)
            + dot(&gdiff, &y.minus(z).into_coords()))
    }

    /// Worst violation of the resolvent inequality at z over the cached
    /// sample of C (0 when every sampled slack is nonnegative).
    pub fn certify(&self, x: &PrimalPoint<T>, z: &PrimalPoint<T>) -> Result<T> {
        let mut worst = T::zero();
        for y in &self.vi_points {
            let slack = self.inequality_slack(x, z, y)?;
            worst = worst.max(-slack);
        }
        Ok(worst)
    }

    /// Solves the resolvent inequality at anchor x to the given sampled
    /// violation tolerance. `warm` seeds the iteration.
    pub fn solve(
        &self,
        x: &PrimalPoint<T>,
        tol: T,
        warm: Option<&PrimalPoint<T>>,
    ) -> Result<ResolventSolve<T>> {
        if !self.f.domain_contains(x) {
            return Err(Error::Domain("resolvent anchor must lie in int dom f".into()));
        }

        // squared-norm geometry with no ℓ¹ part makes the inclusion linear:
        // ∇f = id gives (I + A) z = x − s over the whole space, and a single
        // linear cut ⟨a, z⟩ {≤,=} b adds one explicit KKT multiplier
        if matches!(self.f.kind(), LegendreKind::SquaredNorm) && self.l1_weights.is_none() {
            let cut = match &self.set {
                ConvexSet::WholeSpace => Some(None),
                ConvexSet::Halfspace { normal, offset } => Some(Some((normal, *offset, false))),
                ConvexSet::Hyperplane { normal, offset } => Some(Some((normal, *offset, true))),
                _ => None,
            };
            if let Some(cut) = cut {
                let n = self.f.dim();
                let mut system = DenseMatrix::identity(n);
                for i in 0..n {
                    for j in 0..n {
                        *system.at_mut(i, j) = system.at(i, j) + self.affine.at(i, j);
                    }
                }
                let rhs: Vec<T> = x
                    .coords()
                    .iter()
                    .zip(&self.affine_shift)
                    .map(|(&xi, &si)| xi - si)
                    .collect();
                let mut z = crate::linalg::solve_dense(&system, &rhs)?;
                if let Some((normal, offset, equality)) = cut {
                    let gap = dot(normal, &z) - offset;
                    if equality || gap > T::zero() {
                        // pin to the cut with one multiplier; the divisor
                        // ⟨a, (I+A)⁻¹a⟩ is positive because I + A is
                        // positive definite
                        let dir = crate::linalg::solve_dense(&system, normal)?;
                        let mu = gap / dot(normal, &dir);
                        for (zi, &di) in z.iter_mut().zip(&dir) {
                            *zi = *zi - mu * di;
                        }
                    }
                }
                let z = PrimalPoint::new(z);
                let residual = self.certify(x, &z)?;
                return Ok(ResolventSolve { point: z, iterations: 1, residual });
            }
        }

        if matches!(self.set, ConvexSet::Intersection { .. }) {
            self.solve_by_dual_sweep(x, tol, warm)
        } else {
            self.solve_by_splitting(x, tol, warm)
        }
    }

    /// Forward-backward-forward iteration in the primal space. The forward
    /// field z ↦ Az + s − ∇f(x) is affine, hence defined everywhere, so the
    /// iterate may leave C ∩ dom f between steps; the backward step solves
    /// its strongly monotone subproblem exactly and lands back inside. The
    /// correcting second forward step keeps the scheme convergent when the
    /// affine part is monotone without being cocoercive, as a skew operator
    /// is. The step length stays fixed below 1/‖A‖, and no quantity ever
    /// passes through ∇f* directly, so geometries whose conjugate gradient
    /// has unbounded slope near zero cannot drive the iteration into
    /// oscillation.
    fn solve_by_splitting(
        &self,
        x: &PrimalPoint<T>,
        tol: T,
        warm: Option<&PrimalPoint<T>>,
    ) -> Result<ResolventSolve<T>> {
        let gx = self.f.grad(x)?;
        let gxc = gx.coords().to_vec();
        let c = T::one() / (T::one() + self.lipschitz);

        let mut z: Vec<T> = match warm {
            Some(w) if w.dim() == self.f.dim() => w.coords().to_vec(),
            _ => x.coords().to_vec(),
        };
        let scale = T::one() + x.inf_norm();
        // the half step equals z exactly at the resolvent, so the
        // step-normalized residual vanishes there; the sampled certificate
        // can miss violations between sample points, so it never gates
        // termination on its own
        let nat_floor = T::epsilon() * scale * real(32.0);
        let mut nat_goal = (tol * real(1e-2)).max(nat_floor);
        let mut multiplier = T::zero();
        let mut latest: Option<PrimalPoint<T>> = None;

        for k in 0..SOLVER_MAX_ITERS {
            let field_z = self.forward_field(&z, &gxc);
            let v: Vec<T> = z.iter().zip(&field_z).map(|(&zi, &fi)| zi - c * fi).collect();
            let half = self.backward_step(&v, c, &mut multiplier)?;
            let step = half
                .coords()
                .iter()
                .zip(&z)
                .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));

            if step / c <= nat_goal || step == T::zero() {
                let residual = self.certify(x, &half)?;
                if residual <= tol {
                    return Ok(ResolventSolve { point: half, iterations: k + 1, residual });
                }
                // certificate still above target: demand a smaller step,
                // unless the iteration already sits at an exact fixed point
                if step == T::zero() || nat_goal <= nat_floor {
                    return Err(Error::Convergence {
                        iterations: k + 1,
                        residual: as_f64(residual),
                    });
                }
                nat_goal = (nat_goal * real(1e-2)).max(nat_floor);
            }

            let field_half = self.forward_field(half.coords(), &gxc);
            z = half
                .coords()
                .iter()
                .zip(field_z.iter().zip(&field_half))
                .map(|(&hi, (&fz, &fh))| hi + c * (fz - fh))
                .collect();
            latest = Some(half);
        }

        let point = latest.unwrap_or_else(|| PrimalPoint::new(z));
        let residual = self.certify(x, &point)?;
        if residual <= tol {
            return Ok(ResolventSolve { point, iterations: SOLVER_MAX_ITERS, residual });
        }
        Err(Error::Convergence { iterations: SOLVER_MAX_ITERS, residual: as_f64(residual) })
    }

    /// Az + s − ∇f(x), the explicitly stepped part of the optimality field.
    fn forward_field(&self, z: &[T], gx: &[T]) -> Vec<T> {
        let mut out = self.affine.matvec(z);
        for ((o, &s), &g) in out.iter_mut().zip(&self.affine_shift).zip(gx) {
            *o = *o + s - g;
        }
        out
    }

    #[inline]
    fn l1_weight(&self, i: usize) -> T {
        self.l1_weights.as_ref().map_or(T::zero(), |w| w[i])
    }

    /// Euclidean proximal step of f + κ‖·‖₁ over C at v with parameter c.
    /// Separable sets split into scalar subproblems; a single linear cut
    /// adds a scalar multiplier found by bracketed root search, seeded
    /// across calls through `multiplier`.
    fn backward_step(&self, v: &[T], c: T, multiplier: &mut T) -> Result<PrimalPoint<T>> {
        let inf = T::infinity();
        match &self.set {
            ConvexSet::WholeSpace => Ok(PrimalPoint::new(
                v.iter()
                    .enumerate()
                    .map(|(i, &vi)| self.prox_1d(vi / c, c, self.l1_weight(i), -inf, inf))
                    .collect::<Vec<T>>(),
            )),
            ConvexSet::Box { lower, upper } => Ok(PrimalPoint::new(
                v.iter()
                    .enumerate()
                    .map(|(i, &vi)| {
                        self.prox_1d(vi / c, c, self.l1_weight(i), lower[i], upper[i])
                    })
                    .collect::<Vec<T>>(),
            )),
            ConvexSet::Halfspace { normal, offset } => {
                let free: Vec<T> = v
                    .iter()
                    .enumerate()
                    .map(|(i, &vi)| self.prox_1d(vi / c, c, self.l1_weight(i), -inf, inf))
                    .collect();
                if dot(normal, &free) <= *offset {
                    *multiplier = T::zero();
                    return Ok(PrimalPoint::new(free));
                }
                self.multiplier_backward(v, c, normal, *offset, -inf, multiplier)
            }
            ConvexSet::Hyperplane { normal, offset } => {
                self.multiplier_backward(v, c, normal, *offset, -inf, multiplier)
            }
            ConvexSet::Simplex { radius } => {
                let ones = vec![T::one(); v.len()];
                self.multiplier_backward(v, c, &ones, *radius, T::zero(), multiplier)
            }
            ConvexSet::Intersection { .. } => Err(Error::Invalid(
                "backward step over an intersection is not separable".into(),
            )),
        }
    }

    /// Backward step cut by one linear constraint ⟨a, u⟩ = b, with an
    /// optional common lower bound on the coordinates. Shifting every
    /// scalar target by −μ aᵢ makes ⟨a, u(μ)⟩ continuous and nonincreasing
    /// in μ, so the multiplier is a root of a monotone scalar function:
    /// bracket by doubling away from the seed, then close in with the
    /// Illinois variant of false position.
    fn multiplier_backward(
        &self,
        v: &[T],
        c: T,
        a: &[T],
        b: T,
        floor: T,
        hint: &mut T,
    ) -> Result<PrimalPoint<T>> {
        let inf = T::infinity();
        let eval = |mu: T| -> (Vec<T>, T) {
            let u: Vec<T> = v
                .iter()
                .zip(a)
                .enumerate()
                .map(|(i, (&vi, &ai))| {
                    self.prox_1d(vi / c - mu * ai, c, self.l1_weight(i), floor, inf)
                })
                .collect();
            let g = dot(a, &u) - b;
            (u, g)
        };

        let (u0, g0) = eval(*hint);
        if g0 == T::zero() {
            return Ok(PrimalPoint::new(u0));
        }

        // small first step so a warm seed brackets cheaply; doubling still
        // covers cold starts in a few dozen probes
        let mut step = (T::one() + hint.abs()) * real(1e-9);
        let (mut m_lo, mut g_lo, mut m_hi, mut g_hi);
        if g0 > T::zero() {
            m_lo = *hint;
            g_lo = g0;
            loop {
                let m = m_lo + step;
                let (_, g) = eval(m);
                if g <= T::zero() {
                    m_hi = m;
                    g_hi = g;
                    break;
                }
                m_lo = m;
                g_lo = g;
                step = step * real(2.0);
                if !step.is_finite() {
                    return Err(Error::Invalid(
                        "the linear constraint multiplier could not be bracketed".into(),
                    ));
                }
            }
        } else {
            m_hi = *hint;
            g_hi = g0;
            loop {
                let m = m_hi - step;
                let (_, g) = eval(m);
                if g >= T::zero() {
                    m_lo = m;
                    g_lo = g;
                    break;
                }
                m_hi = m;
                g_hi = g;
                step = step * real(2.0);
                if !step.is_finite() {
                    return Err(Error::Invalid(
                        "the linear constraint multiplier could not be bracketed".into(),
                    ));
                }
            }
        }

        let mut out = u0;
        let mut side = 0i8;
        for _ in 0..160 {
            let span = m_hi - m_lo;
            if span <= T::epsilon() * (T::one() + m_lo.abs().max(m_hi.abs())) * real(2.0) {
                break;
            }
            let denom = g_lo - g_hi;
            let mut m = if denom > T::zero() {
                m_lo + span * (g_lo / denom)
            } else {
                m_lo + span * real(0.5)
            };
            if !(m > m_lo && m < m_hi) {
                m = m_lo + span * real(0.5);
                if !(m > m_lo && m < m_hi) {
                    break;
                }
            }
            let (u, g) = eval(m);
            out = u;
            *hint = m;
            if g == T::zero() {
                return Ok(PrimalPoint::new(out));
            }
            if g > T::zero() {
                if side > 0 {
                    g_hi = g_hi * real(0.5);
                }
                m_lo = m;
                g_lo = g;
                side = 1;
            } else {
                if side < 0 {
                    g_lo = g_lo * real(0.5);
                }
                m_hi = m;
                g_hi = g;
                side = -1;
            }
        }
        Ok(PrimalPoint::new(out))
    }

    /// Scalar subproblem ∇f₁(u) + u/c + κ ∂|u| ∋ t on [lo, hi]. The
    /// Euclidean term gives the equation slope at least 1/c, so the root
    /// is unique, and clamping it is exact because the underlying scalar
    /// objective is convex.
    fn prox_1d(&self, t: T, c: T, kappa: T, lo: T, hi: T) -> T {
        let u = if kappa > T::zero() {
            // ∇f₁(0) = 0 for every geometry that can carry an ℓ¹ weight
            if t > kappa {
                self.root_1d(t - kappa, c)
            } else if t < -kappa {
                self.root_1d(t + kappa, c)
            } else {
                T::zero()
            }
        } else {
            self.root_1d(t, c)
        };
        u.max(lo).min(hi)
    }

    /// Root of ∇f₁(u) + u/c = t: closed form for the quadratic, bracketed
    /// guarded Newton otherwise. Rejected Newton proposals fall back to
    /// bisection of a sign-correct bracket, so neither the flat nor the
    /// steep end of the power and entropy gradients can throw the search.
    fn root_1d(&self, t: T, c: T) -> T {
        let one = T::one();
        let half = real::<T>(0.5);
        match self.f.kind() {
            LegendreKind::SquaredNorm => t * c / (one + c),
            LegendreKind::PowerP(p) => {
                if t == T::zero() {
                    return T::zero();
                }
                let m = t.abs();
                // u^{p−1} ≤ m and u/c ≤ m both bound the positive root
                let mut hi = (c * m).min(m.powf(one / (p - one)));
                let mut lo = T::zero();
                let mut u = hi * half;
                for _ in 0..128 {
                    let r = u.powf(p - one) + u / c - m;
                    if r == T::zero() {
                        break;
                    }
                    if r > T::zero() {
                        hi = u;
                    } else {
                        lo = u;
                    }
                    let slope = (p - one) * u.powf(p - one - one) + one / c;
                    let mut next = u - r / slope;
                    if !next.is_finite() || !(next > lo && next < hi) {
                        next = (lo + hi) * half;
                    }
                    if next == u {
                        next = (lo + hi) * half;
                        if next == u {
                            break;
                        }
                    }
                    u = next;
                }
                u * t.signum()
            }
            LegendreKind::NegEntropy => {
                // 1 + ln u + u/c = t has one root on (0, ∞)
                let residual_at = |u: T| one + u.ln() + u / c - t;
                let mut hi = (t - one).exp();
                if !hi.is_finite() || hi <= T::zero() {
                    hi = T::max_value().sqrt();
                }
                let mut guard = 0usize;
                while residual_at(hi) < T::zero() && guard < 2400 {
                    hi = hi * real(2.0);
                    guard += 1;
                }
                let mut lo = hi;
                guard = 0;
                while residual_at(lo) > T::zero() && lo > T::zero() && guard < 2400 {
                    lo = lo * half;
                    guard += 1;
                }
                let mut u = (lo.max(T::min_positive_value()) + hi) * half;
                for _ in 0..128 {
                    let r = residual_at(u);
                    if r == T::zero() {
                        break;
                    }
                    if r > T::zero() {
                        hi = u;
                    } else {
                        lo = u;
                    }
                    let slope = one / u + one / c;
                    let mut next = u - r / slope;
                    if !next.is_finite() || !(next > lo && next < hi) {
                        next = (lo + hi) * half;
                    }
                    if next == u {
                        next = (lo + hi) * half;
                        if next == u {
                            break;
                        }
                    }
                    u = next;
                }
                u.max(T::min_positive_value())
            }
        }
    }

    /// Dual-space sweep with an adaptive step: gradient step in
    /// ∇f-coordinates, componentwise prox, Bregman projection back onto C.
    /// Kept for intersection sets, which the separable backward step
    /// cannot express. The step halves on stalls; when it bottoms out the
    /// point is still returned if its certificate clears the target.
    fn solve_by_dual_sweep(
        &self,
        x: &PrimalPoint<T>,
        tol: T,
        warm: Option<&PrimalPoint<T>>,
    ) -> Result<ResolventSolve<T>> {
        let proj_tol = (tol * real(1e-3)).max(real(1e-14));
        let gx = self.f.grad(x)?;
        let gxc = gx.coords().to_vec();

        let mut z = match warm {
            Some(w) if self.set.contains(w, real(1e-9)) && self.f.domain_contains(w) => w.clone(),
            _ => bregman_project(&self.f, &self.set, x, proj_tol)?.point,
        };

        let mut tau = if self.lipschitz > T::one() {
            T::one() / self.lipschitz
        } else {
            T::one()
        };
        let scale = T::one() + x.inf_norm();
        // the sweep's fixed point is the resolvent for every τ > 0, so the
        // τ-normalized step ‖z⁺ − z‖/τ vanishes exactly at the solution;
        // the sampled certificate alone can miss violations concentrated
        // at vertices of the feasible set, so it never gates termination
        let nat_floor = T::epsilon() * scale * real(32.0);
        let mut nat_goal = (tol * real(1e-2)).max(nat_floor);
        let mut prev_step = T::infinity();

        for k in 0..SOLVER_MAX_ITERS {
            let z_next = self.sweep(&z, &gxc, tau, proj_tol)?;
            let step = z_next.dist_inf(&z);

            if step / tau <= nat_goal || step == T::zero() {
                let residual = self.certify(x, &z_next)?;
                if residual <= tol {
                    return Ok(ResolventSolve { point: z_next, iterations: k + 1, residual });
                }
                // certificate still above target: demand a smaller step,
                // unless the iteration already sits at an exact fixed point
                if step == T::zero() || nat_goal <= nat_floor {
                    return Err(Error::Convergence {
                        iterations: k + 1,
                        residual: as_f64(residual),
                    });
                }
                nat_goal = (nat_goal * real(1e-2)).max(nat_floor);
            }

            if k > 0 && step >= prev_step * real(0.9999) {
                // stalled or oscillating; a shorter dual step restores descent
                tau = tau * real(0.5);
                if tau < real(TAU_MIN) {
                    let residual = self.certify(x, &z_next)?;
                    if residual <= tol {
                        return Ok(ResolventSolve {
                            point: z_next,
                            iterations: k + 1,
                            residual,
                        });
                    }
                    return Err(Error::Convergence {
                        iterations: k + 1,
                        residual: as_f64(residual),
                    });
                }
                prev_step = T::infinity();
            } else {
                prev_step = step;
            }
            z = z_next;
        }

        let residual = self.certify(x, &z)?;
        if residual <= tol {
            return Ok(ResolventSolve { point: z, iterations: SOLVER_MAX_ITERS, residual });
        }
        Err(Error::Convergence { iterations: SOLVER_MAX_ITERS, residual: as_f64(residual) })
    }

    /// One dual forward-backward sweep from z with step τ.
    fn sweep(
        &self,
        z: &PrimalPoint<T>,
        gx: &[T],
        tau: T,
        proj_tol: T,
    ) -> Result<PrimalPoint<T>> {
        let gz = self.f.grad(z)?;
        let mut op = self.affine.matvec(z.coords());
        for (o, &s) in op.iter_mut().zip(&self.affine_shift) {
            *o = *o + s;
        }
        let one_minus = T::one() - tau;
        let d: Vec<T> = gz
            .coords()
            .iter()
            .zip(gx.iter().zip(&op))
            .map(|(&gzi, (&gxi, &ri))| one_minus * gzi + tau * (gxi - ri))
            .collect();
        let v = match &self.l1_weights {
            None => PrimalPoint::new(
                d.iter().map(|&w| self.f.grad_conj_1d(w)).collect::<Vec<T>>(),
            ),
            Some(weights) => PrimalPoint::new(
                d.iter()
                    .zip(weights)
                    .map(|(&di, &wi)| self.prox_coordinate(di, tau * wi))
                    .collect::<Vec<T>>(),
            ),
        };
        Ok(bregman_project(&self.f, &self.set, &v, proj_tol)?.point)
    }

    /// Solves ∇f(v) + κ ∂|v| ∋ d in one coordinate. ∇f is odd with
    /// ∇f(0) = 0 for the geometries that reach this path, so the solution
    /// is a soft shift of d followed by ∇f*.
    fn prox_coordinate(&self, d: T, kappa: T) -> T {
        if d > kappa {
            self.f.grad_conj_1d(d - kappa)
        } else if d < -kappa {
            self.f.grad_conj_1d(d + kappa)
        } else {
            T::zero()
        }
    }
}

/// One-shot resolvent evaluation; builds the problem, solves, certifies.
pub fn mixed_resolvent<T: Real>(
    f: &LegendreFunction<T>,
    theta: &Bifunction<T>,
    phi: &ConvexFunctional<T>,
    set: &ConvexSet<T>,
    x: &PrimalPoint<T>,
    tol: T,
) -> Result<ResolventSolve<T>> {
    let problem = ResolventProblem::new(f.clone(), theta.clone(), phi.clone(), set.clone())?;
    problem.solve(x, tol, None)
}

/// Worst violation of the resolvent inequality at z over `samples` fresh
/// points of C; independent of the cached certification points.
pub fn verify_resolvent_vi<T: Real, R: rand::Rng>(
    f: &LegendreFunction<T>,
    theta: &Bifunction<T>,
    phi: &ConvexFunctional<T>,
    set: &ConvexSet<T>,
    x: &PrimalPoint<T>,
    z: &PrimalPoint<T>,
    samples: usize,
    rng: &mut R,
) -> Result<T> {
    let gz = f.grad(z)?;
    let gx = f.grad(x)?;
    let gdiff: Vec<T> = gz.coords().iter().zip(gx.coords()).map(|(&a, &b)| a - b).collect();
    let phi_z = phi.eval(z);
    let ys = sample_in_set(f, set, samples, rng)?;
    let mut worst = T::zero();
    for y in &ys {
        let slack =
            theta.eval(z, y) + phi.eval(y) - phi_z + dot(&gdiff, &y.minus(z).into_coords());
        worst = worst.max(-slack);
    }
    Ok(worst)
}

/// Both characterizations of Bregman firm nonexpansiveness for one pair:
/// the gradient form ⟨∇f(z₁) − ∇f(z₂), z₁ − z₂⟩ ≤ ⟨∇f(x₁) − ∇f(x₂), z₁ − z₂⟩
/// and the equivalent four-distance form. A map is BFNE when lhs ≤ rhs on
/// every pair.
#[derive(Debug, Clone, Copy)]
pub struct FirmNonexpansiveCheck<T: Real> {
    pub gradient_lhs: T,
    pub gradient_rhs: T,
    pub distance_lhs: T,
    pub distance_rhs: T,
}

pub fn bfne_check<T: Real>(
    f: &LegendreFunction<T>,
    x1: &PrimalPoint<T>,
    x2: &PrimalPoint<T>,
    z1: &PrimalPoint<T>,
    z2: &PrimalPoint<T>,
) -> Result<FirmNonexpansiveCheck<T>> {
    let g_z1 = f.grad(z1)?;
    let g_z2 = f.grad(z2)?;
    let g_x1 = f.grad(x1)?;
    let g_x2 = f.grad(x2)?;
    let dz = z1.minus(z2).into_coords();
    let gz_diff: Vec<T> =
        g_z1.coords().iter().zip(g_z2.coords()).map(|(&a, &b)| a - b).collect();
    let gx_diff: Vec<T> =
        g_x1.coords().iter().zip(g_x2.coords()).map(|(&a, &b)| a - b).collect();
    Ok(FirmNonexpansiveCheck {
        gradient_lhs: dot(&gz_diff, &dz),
        gradient_rhs: dot(&gx_diff, &dz),
        distance_lhs: f.bregman_distance(z1, z2)? + f.bregman_distance(z2, z1)?,
        distance_rhs: f.bregman_distance(z1, x2)? + f.bregman_distance(z2, x1)?
            - f.bregman_distance(z1, x1)?
            - f.bregman_distance(z2, x2)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[f64]) -> PrimalPoint<f64> {
        PrimalPoint::new(v.to_vec())
    }

    fn identity_operator(n: usize) -> Bifunction<f64> {
        Bifunction::from_operator(DenseMatrix::identity(n), vec![0.0; n]).unwrap()
    }

    #[test]
    fn functional_constructors_validate() {
        let asym = DenseMatrix::from_rows(vec![vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(ConvexFunctional::quadratic(asym, vec![0.0, 0.0], 0.0).is_err());
        let indef = DenseMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(ConvexFunctional::quadratic(indef, vec![0.0, 0.0], 0.0).is_err());
        assert!(ConvexFunctional::weighted_l1(vec![1.0, -0.5]).is_err());
        let ok =
            ConvexFunctional::quadratic(DenseMatrix::identity(2), vec![1.0, 0.0], 0.25).unwrap();
        assert!((ok.eval(&p(&[1.0, 2.0])) - (2.5 + 1.0 + 0.25)).abs() < 1e-12);
    }

    #[test]
    fn bifunction_values_and_flags() {
        let theta = identity_operator(2);
        // ⟨x, y − x⟩ at x=(1,0), y=(0,1): -1
        assert!((theta.eval(&p(&[1.0, 0.0]), &p(&[0.0, 1.0])) + 1.0).abs() < 1e-12);
        assert!(theta.is_monotone());
        assert_eq!(theta.eval(&p(&[0.3, -0.7]), &p(&[0.3, -0.7])), 0.0);

        let mut neg = DenseMatrix::identity(2);
        *neg.at_mut(0, 0) = -1.0;
        *neg.at_mut(1, 1) = -1.0;
        assert!(Bifunction::from_operator(neg.clone(), vec![0.0, 0.0]).is_err());
        let unchecked = Bifunction::from_operator_unchecked(neg, vec![0.0, 0.0]).unwrap();
        assert!(!unchecked.is_monotone());
    }

    #[test]
    fn validation_report_monotone_vs_not() {
        let f = LegendreFunction::squared_norm(2);
        let set = ConvexSet::boxed(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let good = validate_bifunction(&f, &identity_operator(2), &set, 60, &mut rng).unwrap();
        assert!(good.is_satisfied(), "{good:?}");

        let mut neg = DenseMatrix::identity(2);
        *neg.at_mut(0, 0) = -1.0;
        *neg.at_mut(1, 1) = -1.0;
        let bad_theta = Bifunction::from_operator_unchecked(neg, vec![0.0, 0.0]).unwrap();
        let bad = validate_bifunction(&f, &bad_theta, &set, 60, &mut rng).unwrap();
        assert!(!bad.is_satisfied());
        assert!(bad.monotonicity_max > 1e-3, "{bad:?}");
    }

    #[test]
    fn linear_fast_path_matches_hand_value() {
        let f = LegendreFunction::squared_norm(2);
        let problem = ResolventProblem::new(
            f,
            identity_operator(2),
            ConvexFunctional::zero(),
            ConvexSet::whole_space(),
        )
        .unwrap();
        let r = problem.solve(&p(&[1.0, 1.0]), 1e-10, None).unwrap();
        assert!(r.point.dist_inf(&p(&[0.5, 0.5])) < 1e-12);
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn operator_and_objective_forms_agree() {
        // Θ(x,y) = g(y) − g(x) with g = ½‖·‖² has the same resolvent as
        // Θ(x,y) = ⟨x, y − x⟩ when the anchor is shared
        let f = LegendreFunction::squared_norm(2);
        let set = ConvexSet::halfspace(vec![1.0, 1.0], 0.5).unwrap();
        let x = p(&[1.0, 0.25]);
        let via_objective = mixed_resolvent(
            &f,
            &Bifunction::from_objective(
                ConvexFunctional::quadratic(DenseMatrix::identity(2), vec![0.0, 0.0], 0.0).unwrap(),
            ),
            &ConvexFunctional::zero(),
            &set,
            &x,
            1e-11,
        )
        .unwrap();
        let via_operator = mixed_resolvent(
            &f,
            &identity_operator(2),
            &ConvexFunctional::zero(),
            &set,
            &x,
            1e-11,
        )
        .unwrap();
        assert!(
            via_objective.point.dist_inf(&via_operator.point) < 1e-9,
            "{:?} vs {:?}",
            via_objective.point,
            via_operator.point
        );
    }

    #[test]
    fn soft_threshold_resolvent() {
        // Θ = 0, φ = ‖·‖₁, Euclidean geometry: the resolvent is the
        // classic soft-threshold of the anchor
        let f = LegendreFunction::squared_norm(2);
        let problem = ResolventProblem::new(
            f,
            Bifunction::from_objective(ConvexFunctional::zero()),
            ConvexFunctional::weighted_l1(vec![1.0, 1.0]).unwrap(),
            ConvexSet::whole_space(),
        )
        .unwrap();
        let r = problem.solve(&p(&[2.0, 0.3]), 1e-10, None).unwrap();
        assert!(r.point.dist_inf(&p(&[1.0, 0.0])) < 1e-9, "{:?}", r.point);
        let r2 = problem.solve(&p(&[-1.5, -0.2]), 1e-10, None).unwrap();
        assert!(r2.point.dist_inf(&p(&[-0.5, 0.0])) < 1e-9, "{:?}", r2.point);
    }

    #[test]
    fn constrained_resolvent_satisfies_inequality() {
        let f = LegendreFunction::power_p(3.0, 2).unwrap();
        let set = ConvexSet::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let theta = Bifunction::from_operator(
            DenseMatrix::from_rows(vec![vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap(),
            vec![0.3, -0.2],
        )
        .unwrap();
        let phi = ConvexFunctional::weighted_l1(vec![0.5, 0.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let x = p(&[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]);
            let r = mixed_resolvent(&f, &theta, &phi, &set, &x, 1e-9).unwrap();
            let v = verify_resolvent_vi(&f, &theta, &phi, &set, &x, &r.point, 128, &mut rng)
                .unwrap();
            assert!(v <= 1e-8, "violation {v} at x {x:?}");
        }
    }

    #[test]
    fn entropic_simplex_resolvent() {
        let f = LegendreFunction::neg_entropy(3);
        let set = ConvexSet::simplex(1.0).unwrap();
        let theta = Bifunction::from_operator(
            DenseMatrix::from_rows(vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 2.0, 0.0],
                vec![0.0, 0.0, 3.0],
            ])
            .unwrap(),
            vec![-0.5, 0.1, 0.2],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = p(&[0.2, 0.5, 0.3]);
        let r = mixed_resolvent(&f, &theta, &ConvexFunctional::zero(), &set, &x, 1e-9).unwrap();
        assert!(set.contains(&r.point, 1e-9));
        assert!(r.point.coords().iter().all(|&v| v > 0.0));
        let v = verify_resolvent_vi(
            &f,
            &theta,
            &ConvexFunctional::zero(),
            &set,
            &x,
            &r.point,
            128,
            &mut rng,
        )
        .unwrap();
        assert!(v <= 1e-8, "violation {v}");
    }

    #[test]
    fn resolvent_is_firmly_nonexpansive() {
        let f = LegendreFunction::squared_norm(3);
        let set = ConvexSet::halfspace(vec![1.0, -1.0, 0.5], 0.75).unwrap();
        let theta = Bifunction::from_operator(
            DenseMatrix::from_rows(vec![
                vec![1.0, 0.2, 0.0],
                vec![0.2, 1.5, -0.1],
                vec![0.0, -0.1, 0.8],
            ])
            .unwrap(),
            vec![0.1, 0.0, -0.3],
        )
        .unwrap();
        let problem =
            ResolventProblem::new(f.clone(), theta, ConvexFunctional::zero(), set).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..15 {
            let x1 = PrimalPoint::new(
                (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<f64>>(),
            );
            let x2 = PrimalPoint::new(
                (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<f64>>(),
            );
            let z1 = problem.solve(&x1, 1e-10, None).unwrap().point;
            let z2 = problem.solve(&x2, 1e-10, None).unwrap().point;
            let c = bfne_check(&f, &x1, &x2, &z1, &z2).unwrap();
            assert!(
                c.gradient_lhs <= c.gradient_rhs + 1e-8,
                "gradient form {} > {}",
                c.gradient_lhs,
                c.gradient_rhs
            );
            assert!(
                c.distance_lhs <= c.distance_rhs + 1e-8,
                "distance form {} > {}",
                c.distance_lhs,
                c.distance_rhs
            );
            // the two forms are the same inequality written twice
            assert!((c.gradient_lhs - c.distance_lhs).abs() < 1e-8);
            assert!((c.gradient_rhs - c.distance_rhs).abs() < 1e-8);
        }
    }

    #[test]
    fn nonmonotone_rejected_by_resolvent() {
        let mut neg = DenseMatrix::identity(2);
        *neg.at_mut(0, 0) = -1.0;
        *neg.at_mut(1, 1) = -1.0;
        let theta = Bifunction::from_operator_unchecked(neg, vec![0.0, 0.0]).unwrap();
        let err = ResolventProblem::new(
            LegendreFunction::squared_norm(2),
            theta,
            ConvexFunctional::zero(),
            ConvexSet::whole_space(),
        );
        assert!(matches!(err, Err(Error::Invalid(_))));
    }

    #[test]
    fn perturbed_point_fails_certification() {
        let f = LegendreFunction::squared_norm(2);
        let problem = ResolventProblem::new(
            f,
            identity_operator(2),
            ConvexFunctional::zero(),
            ConvexSet::whole_space(),
        )
        .unwrap();
        let x = p(&[1.0, -2.0]);
        let good = problem.solve(&x, 1e-10, None).unwrap();
        assert!(problem.certify(&x, &good.point).unwrap() <= 1e-10);
        let bad = good.point.add_scaled(0.05, &[1.0, 0.0]);
        assert!(problem.certify(&x, &bad).unwrap() > 1e-4);
    }

    #[test]
    fn warm_start_cuts_iterations() {
        let f = LegendreFunction::power_p(2.5, 2).unwrap();
        let set = ConvexSet::boxed(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let problem = ResolventProblem::new(
            f,
            identity_operator(2),
            ConvexFunctional::zero(),
            set,
        )
        .unwrap();
        let x = p(&[1.3, -0.4]);
        let cold = problem.solve(&x, 1e-11, None).unwrap();
        let near = p(&[1.301, -0.401]);
        let warm = problem.solve(&near, 1e-11, Some(&cold.point)).unwrap();
        assert!(warm.iterations <= cold.iterations, "{} > {}", warm.iterations, cold.iterations);
    }
}
