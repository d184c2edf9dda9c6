//! Legendre functions and the Bregman calculus built on them.
//!
//! A Legendre function f here is smooth and strictly convex on the interior
//! of its domain, with ∇f a bijection onto the dual space and ∇f* = (∇f)⁻¹.
//! Three separable instances are provided:
//!
//! * `SquaredNorm`: f(x) = ½‖x‖₂², so ∇f = id and D_f is ½‖x−y‖₂².
//! * `PowerP(p)`:   f(x) = (1/p) Σᵢ |xᵢ|ᵖ with p ∈ [1.1, 10]; the conjugate
//!   is (1/q) Σᵢ |xᵢ*|^q with 1/p + 1/q = 1.
//! * `NegEntropy`:  f(x) = Σᵢ xᵢ log xᵢ on the open positive orthant, with
//!   f*(x*) = Σᵢ exp(xᵢ* − 1) and the KL-type distance
//!   D_f(x,y) = Σᵢ (xᵢ log(xᵢ/yᵢ) − xᵢ + yᵢ).
//!
//! The derived quantities all reduce to the same few pieces:
//!
//! * Bregman distance   D_f(x,y) = f(x) − f(y) − ⟨∇f(y), x−y⟩
//! * Fitzpatrick-style  V_f(x,x*) = f(x) − ⟨x*,x⟩ + f*(x*) = D_f(x, ∇f*(x*))
//! * dual averaging     ∇f*( Σᵢ tᵢ ∇f(xᵢ) ) for convex weights tᵢ
//!
//! All operations validate their domains and return [`Error::Domain`] for
//! off-domain input instead of silently producing NaN.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::points::{pairing, DualPoint, PrimalPoint};
use crate::scalar::{as_f64, real, weight_sum_tol, Real};

/// Which Legendre function is in play.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LegendreKind<T: Real> {
    SquaredNorm,
    PowerP(T),
    NegEntropy,
}

/// A Legendre function on ℝⁿ together with its declared analytic flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreFunction<T: Real> {
    kind: LegendreKind<T>,
    dim: usize,
    strongly_coercive: bool,
    cofinite: bool,
}

impl<T: Real> LegendreFunction<T> {
    /// f(x) = ½‖x‖₂².
    pub fn squared_norm(dim: usize) -> Self {
        Self { kind: LegendreKind::SquaredNorm, dim, strongly_coercive: true, cofinite: true }
    }

    /// f(x) = (1/p) Σ|xᵢ|ᵖ. Exponents outside [1.1, 10] are rejected: below
    /// that band ∇f degenerates too fast near 0 for the inner solvers, and
    /// large p overflows long before the iterates do.
    pub fn power_p(p: T, dim: usize) -> Result<Self> {
        if !p.is_finite() || p < real(1.1) || p > real(10.0) {
            return Err(Error::Invalid(format!(
                "power exponent must lie in [1.1, 10], got {}",
                as_f64(p)
            )));
        }
        Ok(Self { kind: LegendreKind::PowerP(p), dim, strongly_coercive: true, cofinite: true })
    }

    /// f(x) = Σ xᵢ log xᵢ on the open positive orthant.
    pub fn neg_entropy(dim: usize) -> Self {
        Self { kind: LegendreKind::NegEntropy, dim, strongly_coercive: true, cofinite: true }
    }

    #[inline]
    pub fn kind(&self) -> LegendreKind<T> {
        self.kind
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn is_strongly_coercive(&self) -> bool {
        self.strongly_coercive
    }

    #[inline]
    pub fn is_cofinite(&self) -> bool {
        self.cofinite
    }

    /// Conjugate exponent q with 1/p + 1/q = 1, for the power geometry.
    pub fn conjugate_exponent(&self) -> Option<T> {
        match self.kind {
            LegendreKind::PowerP(p) => Some(p / (p - T::one())),
            _ => None,
        }
    }

    /// Whether x lies in (the interior of) dom f.
    pub fn domain_contains(&self, x: &PrimalPoint<T>) -> bool {
        if x.dim() != self.dim || !x.is_finite() {
            return false;
        }
        match self.kind {
            LegendreKind::NegEntropy => x.coords().iter().all(|&v| v > T::zero()),
            _ => true,
        }
    }

    /// A convenient interior point: the origin, or all-ones for the orthant.
    pub fn domain_center(&self) -> PrimalPoint<T> {
        match self.kind {
            LegendreKind::NegEntropy => PrimalPoint::new(vec![T::one(); self.dim]),
            _ => PrimalPoint::zeros(self.dim),
        }
    }

    fn check_domain(&self, x: &PrimalPoint<T>, what: &str) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::Domain(format!(
                "{what}: dimension {} does not match geometry dimension {}",
                x.dim(),
                self.dim
            )));
        }
        if !self.domain_contains(x) {
            return Err(Error::Domain(format!("{what}: point lies outside dom f")));
        }
        Ok(())
    }

    fn check_dual(&self, xstar: &DualPoint<T>, what: &str) -> Result<()> {
        if xstar.dim() != self.dim {
            return Err(Error::Domain(format!(
                "{what}: dual dimension {} does not match geometry dimension {}",
                xstar.dim(),
                self.dim
            )));
        }
        if !xstar.is_finite() {
            return Err(Error::Domain(format!("{what}: dual point has non-finite entries")));
        }
        Ok(())
    }

    // Separable one-dimensional pieces. Everything else is a fold of these.

    #[inline]
    pub(crate) fn eval_1d(&self, v: T) -> T {
        match self.kind {
            LegendreKind::SquaredNorm => v * v * real(0.5),
            LegendreKind::PowerP(p) => v.abs().powf(p) / p,
            LegendreKind::NegEntropy => v * v.ln(),
        }
    }

    #[inline]
    pub(crate) fn grad_1d(&self, v: T) -> T {
        match self.kind {
            LegendreKind::SquaredNorm => v,
            LegendreKind::PowerP(p) => {
                if v == T::zero() {
                    T::zero()
                } else {
                    v.signum() * v.abs().powf(p - T::one())
                }
            }
            LegendreKind::NegEntropy => T::one() + v.ln(),
        }
    }

    #[inline]
    pub(crate) fn conj_1d(&self, w: T) -> T {
        match self.kind {
            LegendreKind::SquaredNorm => w * w * real(0.5),
            LegendreKind::PowerP(p) => {
                let q = p / (p - T::one());
                w.abs().powf(q) / q
            }
            LegendreKind::NegEntropy => (w - T::one()).exp(),
        }
    }

    #[inline]
    pub(crate) fn grad_conj_1d(&self, w: T) -> T {
        match self.kind {
            LegendreKind::SquaredNorm => w,
            LegendreKind::PowerP(p) => {
                if w == T::zero() {
                    T::zero()
                } else {
                    w.signum() * w.abs().powf(T::one() / (p - T::one()))
                }
            }
            LegendreKind::NegEntropy => (w - T::one()).exp(),
        }
    }

    /// d/dw of the scalar inverse gradient, used by Newton polish steps.
    #[inline]
    pub(crate) fn grad_conj_slope_1d(&self, w: T) -> T {
        match self.kind {
            LegendreKind::SquaredNorm => T::one(),
            LegendreKind::PowerP(p) => {
                let e = T::one() / (p - T::one());
                if w == T::zero() {
                    // slope is 0 or +inf depending on p; report 0 so Newton
                    // falls back to bisection instead of jumping
                    T::zero()
                } else {
                    e * w.abs().powf(e - T::one())
                }
            }
            LegendreKind::NegEntropy => (w - T::one()).exp(),
        }
    }

    /// f(x).
    pub fn eval(&self, x: &PrimalPoint<T>) -> Result<T> {
        self.check_domain(x, "eval")?;
        Ok(x.coords().iter().map(|&v| self.eval_1d(v)).sum())
    }

    /// ∇f(x), a dual point.
    pub fn grad(&self, x: &PrimalPoint<T>) -> Result<DualPoint<T>> {
        self.check_domain(x, "grad")?;
        Ok(DualPoint::new(x.coords().iter().map(|&v| self.grad_1d(v)).collect()))
    }

    /// f*(x*), finite on the whole dual space for every built-in kind.
    pub fn conj(&self, xstar: &DualPoint<T>) -> Result<T> {
        self.check_dual(xstar, "conj")?;
        Ok(xstar.coords().iter().map(|&w| self.conj_1d(w)).sum())
    }

    /// ∇f*(x*) = (∇f)⁻¹(x*), a primal point in int dom f.
    pub fn grad_conj(&self, xstar: &DualPoint<T>) -> Result<PrimalPoint<T>> {
        self.check_dual(xstar, "grad_conj")?;
        Ok(PrimalPoint::new(xstar.coords().iter().map(|&w| self.grad_conj_1d(w)).collect()))
    }

    /// D_f(x, y) = f(x) − f(y) − ⟨∇f(y), x − y⟩. Nonnegative, zero iff x = y.
    pub fn bregman_distance(&self, x: &PrimalPoint<T>, y: &PrimalPoint<T>) -> Result<T> {
        self.check_domain(x, "bregman_distance (first argument)")?;
        self.check_domain(y, "bregman_distance (second argument)")?;
        let gy = self.grad(y)?;
        Ok(self.eval(x)? - self.eval(y)? - pairing(&gy, &x.minus(y)))
    }

    /// V_f(x, x*) = f(x) − ⟨x*, x⟩ + f*(x*); equals D_f(x, ∇f*(x*)).
    pub fn v_fun(&self, x: &PrimalPoint<T>, xstar: &DualPoint<T>) -> Result<T> {
        self.check_domain(x, "v_fun")?;
        Ok(self.eval(x)? - pairing(xstar, x) + self.conj(xstar)?)
    }

    /// ∇f*( Σᵢ tᵢ ∇f(xᵢ) ) with positive weights summing to one.
    pub fn dual_average(&self, weights: &[T], points: &[PrimalPoint<T>]) -> Result<PrimalPoint<T>> {
        self.dual_average_with_tol(weights, points, weight_sum_tol())
    }

    /// Same as [`dual_average`](Self::dual_average) with an explicit
    /// weight-sum tolerance.
    pub fn dual_average_with_tol(
        &self,
        weights: &[T],
        points: &[PrimalPoint<T>],
        sum_tol: T,
    ) -> Result<PrimalPoint<T>> {
        if weights.is_empty() || weights.len() != points.len() {
            return Err(Error::Weights(format!(
                "{} weights for {} points",
                weights.len(),
                points.len()
            )));
        }
        if weights.iter().any(|&w| !(w > T::zero())) {
            return Err(Error::Weights("weights must be strictly positive".into()));
        }
        let sum: T = weights.iter().copied().sum();
        if (sum - T::one()).abs() > sum_tol {
            return Err(Error::Weights(format!(
                "weights sum to {}, not 1",
                as_f64(sum)
            )));
        }
        let mut acc = vec![T::zero(); self.dim];
        for (w, x) in weights.iter().zip(points) {
            let gx = self.grad(x)?;
            for (a, &g) in acc.iter_mut().zip(gx.coords()) {
                *a = *a + *w * g;
            }
        }
        self.grad_conj(&DualPoint::new(acc))
    }
}

/// Sampled estimate of the modulus of total convexity
/// ν_f(x, t) = inf { D_f(y, x) : ‖y − x‖₂ = t }.
#[derive(Debug, Clone)]
pub struct TotalConvexityEstimate<T: Real> {
    pub base: PrimalPoint<T>,
    pub radius: T,
    pub modulus: T,
    pub samples_used: usize,
}

/// Estimates ν_f(x, t) by sampling directions on the sphere of radius t
/// around x and keeping the smallest Bregman distance. In one dimension the
/// sphere is the pair {x − t, x + t}, which the sampler enumerates
/// deterministically; off-domain samples are redrawn a bounded number of
/// times before giving up with [`Error::Sampling`].
pub fn estimate_total_convexity_modulus<T: Real, R: Rng>(
    f: &LegendreFunction<T>,
    x: &PrimalPoint<T>,
    t: T,
    samples: usize,
    rng: &mut R,
) -> Result<TotalConvexityEstimate<T>> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::Invalid(format!("radius must be finite and >= 0, got {}", as_f64(t))));
    }
    if samples == 0 {
        return Err(Error::Invalid("need at least one sample".into()));
    }
    if !f.domain_contains(x) {
        return Err(Error::Domain("base point outside dom f".into()));
    }
    if t == T::zero() {
        return Ok(TotalConvexityEstimate {
            base: x.clone(),
            radius: t,
            modulus: T::zero(),
            samples_used: samples,
        });
    }

    let n = f.dim();
    let mut best: Option<T> = None;
    let mut used = 0usize;
    for i in 0..samples {
        let mut found = false;
        for _attempt in 0..64 {
            let y = if n == 1 {
                // alternate the two sphere points so samples=2 covers both
                let sign = if (i + _attempt) % 2 == 0 { T::one() } else { -T::one() };
                x.add_scaled(sign * t, &[T::one()])
            } else {
                let mut dir: Vec<T> = (0..n)
                    .map(|_| real::<T>(<StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)))
                    .collect();
                let norm = crate::linalg::l2_norm(&dir);
                if norm <= T::epsilon() {
                    continue;
                }
                for d in dir.iter_mut() {
                    *d = *d / norm;
                }
                x.add_scaled(t, &dir)
            };
            if f.domain_contains(&y) {
                let d = f.bregman_distance(&y, x)?;
                best = Some(match best {
                    Some(b) => b.min(d),
                    None => d,
                });
                used += 1;
                found = true;
                break;
            }
        }
        if !found && n == 1 {
            // the one admissible sphere point may already be covered
            continue;
        }
    }

    match best {
        Some(modulus) => Ok(TotalConvexityEstimate { base: x.clone(), radius: t, modulus, samples_used: used }),
        None => Err(Error::Sampling(
            "no sphere sample landed inside dom f (radius too large for the orthant?)".into(),
        )),
    }
}
