//! The three-stage strong-convergence iteration and three baseline
//! schemes, with step schedules, stopping rules, and full traces.
//!
//! One step of the main scheme, from the current iterate x:
//!
//! ```text
//! z  = Res(x)                                  equilibrium subproblem
//! y  = proj_C ∇f*( β ∇f(x) + (1−β) ∇f(Tz) )
//! x⁺ = proj_C ∇f*( α ∇f(x) + (1−α) ∇f(Ty) )
//! ```
//!
//! where T is the left-to-right composition of the instance mappings.
//! Strong convergence to the Bregman projection of x₁ onto the common
//! solution set needs α_n → 0 with Σ α_n = ∞, so constant α rules are
//! rejected at construction; β_n only needs to stay inside (0,1).
//!
//! The witness point carried by every instance is test-side knowledge:
//! the iterations never read it except to record the Bregman distance
//! to it and, in the main scheme, to assert that this distance never
//! increases. A genuine increase signals an implementation bug, not a
//! tuning problem, and aborts the run.

use std::time::Instant;

use crate::equilibrium::{Bifunction, ConvexFunctional, ResolventProblem};
use crate::error::{Error, Result};
use crate::geometry::LegendreFunction;
use crate::linalg::dot;
use crate::operators::{certify_common_fixed_point, BsneMapping};
use crate::points::PrimalPoint;
use crate::scalar::{as_f64, real, Real};
use crate::sets::{bregman_project, ConvexSet};

/// Largest fixed-point residual the witness may show on any mapping.
const WITNESS_FP_TOL: f64 = 1e-9;
/// Largest equilibrium violation the witness may show.
const WITNESS_VI_TOL: f64 = 1e-7;
/// Subproblem tolerance used while certifying witnesses and samples.
const CERT_SOLVE_TOL: f64 = 1e-10;
/// Membership slack when checking that stage points stay in C.
const SET_MEMBERSHIP_TOL: f64 = 1e-9;
/// Allowed per-step slack in the distance-to-witness monotonicity.
const MONOTONE_SLACK: f64 = 1e-10;
/// Residual bound for points offered as solution-set samples.
const OMEGA_SAMPLE_TOL: f64 = 1e-6;
/// Ceiling applied to decaying step weights so they stay below one.
const WEIGHT_CAP: f64 = 0.999;

/// One weight sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleRule<T: Real> {
    Constant(T),
    /// scale / (n+1)^exponent, capped at 0.999.
    PowerDecay { scale: T, exponent: T },
}

impl<T: Real> ScheduleRule<T> {
    fn value_at(&self, n: usize) -> T {
        match self {
            ScheduleRule::Constant(v) => *v,
            ScheduleRule::PowerDecay { scale, exponent } => {
                let np1 = real::<T>((n + 1) as f64);
                (*scale / np1.powf(*exponent)).min(real(WEIGHT_CAP))
            }
        }
    }
}

/// The (α_n, β_n) pair driving the dual averages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule<T: Real> {
    alpha: ScheduleRule<T>,
    beta: ScheduleRule<T>,
}

impl<T: Real> StepSchedule<T> {
    /// α must decay (divergent sum comes from exponent ≤ 1); β may be
    /// constant in (0,1) or decay the same way.
    pub fn new(alpha: ScheduleRule<T>, beta: ScheduleRule<T>) -> Result<Self> {
        match alpha {
            ScheduleRule::Constant(_) => {
                return Err(Error::Invalid(
                    "the anchor weight sequence must decay to zero; a constant rule is not allowed there".into(),
                ))
            }
            ScheduleRule::PowerDecay { scale, exponent } => {
                Self::check_decay(scale, exponent)?
            }
        }
        match beta {
            ScheduleRule::Constant(v) => {
                if !(v > T::zero() && v < T::one()) || !v.is_finite() {
                    return Err(Error::Invalid(
                        "a constant averaging weight must lie strictly inside (0,1)".into(),
                    ));
                }
            }
            ScheduleRule::PowerDecay { scale, exponent } => {
                Self::check_decay(scale, exponent)?
            }
        }
        Ok(StepSchedule { alpha, beta })
    }

    fn check_decay(scale: T, exponent: T) -> Result<()> {
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(Error::Invalid("decay scale must be positive and finite".into()));
        }
        if !(exponent > T::zero() && exponent <= T::one()) {
            return Err(Error::Invalid(
                "decay exponent must lie in (0,1] so the weights keep a divergent sum".into(),
            ));
        }
        Ok(())
    }

    /// α_n = 1/(n+1), β_n ≡ 0.5.
    pub fn defaults() -> Self {
        StepSchedule {
            alpha: ScheduleRule::PowerDecay { scale: T::one(), exponent: T::one() },
            beta: ScheduleRule::Constant(real(0.5)),
        }
    }

    pub fn alpha_at(&self, n: usize) -> T {
        self.alpha.value_at(n)
    }

    pub fn beta_at(&self, n: usize) -> T {
        self.beta.value_at(n)
    }

    pub fn alpha_rule(&self) -> ScheduleRule<T> {
        self.alpha
    }

    pub fn beta_rule(&self) -> ScheduleRule<T> {
        self.beta
    }
}

impl<T: Real> Default for StepSchedule<T> {
    fn default() -> Self {
        Self::defaults()
    }
}

/// Iteration budget plus displacement and fixed-point tolerances. A run
/// converges when both ‖x_{n+1} − x_n‖∞ ≤ x_tol and the fixed-point
/// residual ‖x_n − Tx_n‖∞ ≤ fp_tol hold at the same step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule<T: Real> {
    pub max_iterations: usize,
    pub x_tol: T,
    pub fp_tol: T,
}

impl<T: Real> StopRule<T> {
    pub fn new(max_iterations: usize, x_tol: T, fp_tol: T) -> Result<Self> {
        if max_iterations == 0 {
            return Err(Error::Invalid("iteration budget must be at least one".into()));
        }
        if !(x_tol >= T::zero()) || !x_tol.is_finite() || !(fp_tol >= T::zero()) || !fp_tol.is_finite()
        {
            return Err(Error::Invalid("stop tolerances must be finite and nonnegative".into()));
        }
        Ok(StopRule { max_iterations, x_tol, fp_tol })
    }

    /// Tolerance passed to the inner projection and resolvent solves:
    /// two orders tighter than the outer goal, clamped to [1e-11, 1e-9].
    /// The floor respects the noise of the sampled resolvent certificate,
    /// which carries a few hundred ulps of slack-scale error, so targets
    /// much below 1e-11 are not reliably distinguishable at unit scale.
    fn inner_tolerance(&self) -> T {
        let floor = real::<T>(1e-11);
        let ceil = real::<T>(1e-9);
        let base = self.x_tol.min(self.fp_tol) * real::<T>(1e-2);
        if base <= floor {
            floor
        } else {
            base.min(ceil)
        }
    }
}

impl<T: Real> Default for StopRule<T> {
    fn default() -> Self {
        StopRule { max_iterations: 10_000, x_tol: real(1e-9), fp_tol: real(1e-7) }
    }
}

/// Everything a run needs: geometry, constraint set, equilibrium data,
/// the mapping family, the start point, and a certified solution
/// witness. Construction re-derives every certificate instead of
/// trusting the caller.
#[derive(Debug, Clone)]
pub struct ProblemInstance<T: Real> {
    f: LegendreFunction<T>,
    set: ConvexSet<T>,
    resolvent: ResolventProblem<T>,
    mappings: Vec<BsneMapping<T>>,
    composed: BsneMapping<T>,
    x1: PrimalPoint<T>,
    witness: PrimalPoint<T>,
    target: Option<PrimalPoint<T>>,
}

impl<T: Real> ProblemInstance<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        f: LegendreFunction<T>,
        theta: Bifunction<T>,
        phi: ConvexFunctional<T>,
        set: ConvexSet<T>,
        mappings: Vec<BsneMapping<T>>,
        x1: PrimalPoint<T>,
        witness: PrimalPoint<T>,
        target: Option<PrimalPoint<T>>,
    ) -> Result<Self> {
        set.check_dim(f.dim())?;
        if mappings.is_empty() {
            return Err(Error::Invalid("an instance needs at least one mapping".into()));
        }
        for m in &mappings {
            m.check_compatible(&f)?;
        }
        let member_tol = real::<T>(SET_MEMBERSHIP_TOL);
        for (label, point) in [("start point", &x1), ("witness", &witness)] {
            if !f.domain_contains(point) {
                return Err(Error::Domain(format!("{label} lies outside int dom f")));
            }
            if !set.contains(point, member_tol) {
                return Err(Error::Invalid(format!(
                    "{label} violates the constraint set by {}",
                    as_f64(set.violation(point))
                )));
            }
        }
        if let Some(t) = &target {
            if !f.domain_contains(t) || !set.contains(t, member_tol) {
                return Err(Error::Invalid(
                    "the exact target must lie in the constraint set and int dom f".into(),
                ));
            }
        }
        let resolvent = ResolventProblem::new(f.clone(), theta, phi, set.clone())?;
        let refs: Vec<&BsneMapping<T>> = mappings.iter().collect();
        let worst = certify_common_fixed_point(&f, &refs, &witness, real(CERT_SOLVE_TOL))?;
        if worst > real(WITNESS_FP_TOL) {
            return Err(Error::Invalid(format!(
                "witness is not a common fixed point: residual {}",
                as_f64(worst)
            )));
        }
        let vi = resolvent.certify(&witness, &witness)?;
        if vi > real(WITNESS_VI_TOL) {
            return Err(Error::Invalid(format!(
                "witness is not an equilibrium point: violation {}",
                as_f64(vi)
            )));
        }
        let composed = if mappings.len() == 1 {
            mappings[0].clone()
        } else {
            BsneMapping::composition(mappings.clone())?
        };
        Ok(ProblemInstance { f, set, resolvent, mappings, composed, x1, witness, target })
    }

    pub fn geometry(&self) -> &LegendreFunction<T> {
        &self.f
    }

    pub fn constraint_set(&self) -> &ConvexSet<T> {
        &self.set
    }

    pub fn resolvent(&self) -> &ResolventProblem<T> {
        &self.resolvent
    }

    pub fn mappings(&self) -> &[BsneMapping<T>] {
        &self.mappings
    }

    /// The composition actually iterated (first mapping applied first).
    pub fn mapping(&self) -> &BsneMapping<T> {
        &self.composed
    }

    pub fn initial_point(&self) -> &PrimalPoint<T> {
        &self.x1
    }

    pub fn witness(&self) -> &PrimalPoint<T> {
        &self.witness
    }

    pub fn target(&self) -> Option<&PrimalPoint<T>> {
        self.target.as_ref()
    }
}

/// Snapshot of one iteration. `x` is the iterate the step started
/// from; `step_norm` measures the move it produced. For the anchored
/// baselines, which have no z or y stage, both fields repeat `x`.
#[derive(Debug, Clone)]
pub struct IterationState<T: Real> {
    pub n: usize,
    pub alpha: T,
    pub beta: T,
    pub x: PrimalPoint<T>,
    pub z: PrimalPoint<T>,
    pub y: PrimalPoint<T>,
    pub df_to_witness: T,
    /// ‖x_n − T x_n‖∞ for the composed mapping.
    pub fp_residual: T,
    /// ‖x_{n+1} − x_n‖∞.
    pub step_norm: T,
    /// Inner iterations of the equilibrium subproblem solve that
    /// produced z this step; zero for schemes without that stage.
    pub resolvent_iterations: usize,
    /// ‖x_{n+1} − T y_n‖∞ (with y = x for the anchored baselines).
    pub coupling_gap: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct Trace<T: Real> {
    pub states: Vec<IterationState<T>>,
    pub final_point: PrimalPoint<T>,
    pub status: RunStatus,
    pub wall_seconds: f64,
    /// Stage points that left the constraint set (unprojected scheme).
    pub domain_exits: usize,
}

impl<T: Real> Trace<T> {
    pub fn iterations(&self) -> usize {
        self.states.len()
    }

    /// State recorded at 1-based iteration n.
    pub fn state_at(&self, n: usize) -> Option<&IterationState<T>> {
        if n == 0 {
            return None;
        }
        self.states.get(n - 1)
    }
}

/// Every intermediate point of one main-scheme step.
#[derive(Debug, Clone)]
pub struct StepOutcome<T: Real> {
    pub z: PrimalPoint<T>,
    pub tz: PrimalPoint<T>,
    pub y: PrimalPoint<T>,
    pub ty: PrimalPoint<T>,
    pub x_next: PrimalPoint<T>,
    pub resolvent_iterations: usize,
}

struct WarmSeeds<T: Real> {
    z: Option<PrimalPoint<T>>,
    tz: Option<PrimalPoint<T>>,
    ty: Option<PrimalPoint<T>>,
}

impl<T: Real> Default for WarmSeeds<T> {
    fn default() -> Self {
        WarmSeeds { z: None, tz: None, ty: None }
    }
}

/// One step of the main scheme from x with explicit weights. Exposed
/// separately so single steps can be checked against hand arithmetic.
pub fn step_main<T: Real>(
    inst: &ProblemInstance<T>,
    x: &PrimalPoint<T>,
    alpha: T,
    beta: T,
    tol: T,
) -> Result<StepOutcome<T>> {
    step_main_seeded(inst, x, alpha, beta, tol, &WarmSeeds::default())
}

fn step_main_seeded<T: Real>(
    inst: &ProblemInstance<T>,
    x: &PrimalPoint<T>,
    alpha: T,
    beta: T,
    tol: T,
    seeds: &WarmSeeds<T>,
) -> Result<StepOutcome<T>> {
    check_weight(alpha)?;
    check_weight(beta)?;
    let f = &inst.f;
    let solve = inst.resolvent.solve(x, tol, seeds.z.as_ref())?;
    let z = solve.point;
    let tz = inst.composed.apply_warm(f, &z, tol, seeds.tz.as_ref())?.point;
    let y_mid = f.dual_average(&[beta, T::one() - beta], &[x.clone(), tz.clone()])?;
    let y = bregman_project(f, &inst.set, &y_mid, tol)?.point;
    let ty = inst.composed.apply_warm(f, &y, tol, seeds.ty.as_ref())?.point;
    let x_mid = f.dual_average(&[alpha, T::one() - alpha], &[x.clone(), ty.clone()])?;
    let x_next = bregman_project(f, &inst.set, &x_mid, tol)?.point;
    Ok(StepOutcome { z, tz, y, ty, x_next, resolvent_iterations: solve.iterations })
}

fn check_weight<T: Real>(w: T) -> Result<()> {
    if !(w > T::zero() && w < T::one()) {
        return Err(Error::Weights(format!(
            "step weight {} must lie strictly inside (0,1)",
            as_f64(w)
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SchemeKind {
    Main,
    Kumam,
    Halpern,
    Zegeye,
}

/// Main scheme. Enforces the distance-to-witness monotonicity at every
/// step; a violation aborts the run because the supporting theory
/// rules it out for a certified witness.
pub fn run_main<T: Real>(
    inst: &ProblemInstance<T>,
    schedule: &StepSchedule<T>,
    stop: &StopRule<T>,
) -> Result<Trace<T>> {
    run_scheme(inst, schedule, stop, SchemeKind::Main, None, |_, _| {})
}

/// Main scheme with a probe that may mutate the freshly computed
/// iterate before bookkeeping sees it. Exists to prove the
/// monotonicity guard actually fires; not part of the solver surface.
pub fn run_main_instrumented<T, F>(
    inst: &ProblemInstance<T>,
    schedule: &StepSchedule<T>,
    stop: &StopRule<T>,
    probe: F,
) -> Result<Trace<T>>
where
    T: Real,
    F: FnMut(usize, &mut PrimalPoint<T>),
{
    run_scheme(inst, schedule, stop, SchemeKind::Main, None, probe)
}

/// Anchored baseline: x_{n+1} = ∇f*(α_n ∇f(u) + (1−α_n) ∇f(T x_n)),
/// no equilibrium stage and no projection.
pub fn run_halpern<T: Real>(
    inst: &ProblemInstance<T>,
    anchor: &PrimalPoint<T>,
    schedule: &StepSchedule<T>,
    stop: &StopRule<T>,
) -> Result<Trace<T>> {
    check_anchor(inst, anchor)?;
    run_scheme(inst, schedule, stop, SchemeKind::Halpern, Some(anchor), |_, _| {})
}

/// Anchored baseline with a Bregman projection onto C after each dual
/// average.
pub fn run_zegeye<T: Real>(
    inst: &ProblemInstance<T>,
    anchor: &PrimalPoint<T>,
    schedule: &StepSchedule<T>,
    stop: &StopRule<T>,
) -> Result<Trace<T>> {
    check_anchor(inst, anchor)?;
    run_scheme(inst, schedule, stop, SchemeKind::Zegeye, Some(anchor), |_, _| {})
}

/// Three-stage scheme without the two projections. Only meaningful
/// when unprojected dual averages cannot drift out of the picture, so
/// the constraint set must be the whole space or a box (our geometries
/// are all coordinate-separable, which keeps box membership stable
/// under averaging of in-box mapping images). Stage points that leave
/// C are counted in `domain_exits` rather than treated as errors.
pub fn run_kumam<T: Real>(
    inst: &ProblemInstance<T>,
    schedule: &StepSchedule<T>,
    stop: &StopRule<T>,
) -> Result<Trace<T>> {
    match inst.set {
        ConvexSet::WholeSpace | ConvexSet::Box { .. } => {}
        _ => {
            return Err(Error::Invalid(
                "the unprojected scheme supports only whole-space or box constraints".into(),
            ))
        }
    }
    run_scheme(inst, schedule, stop, SchemeKind::Kumam, None, |_, _| {})
}

fn check_anchor<T: Real>(inst: &ProblemInstance<T>, anchor: &PrimalPoint<T>) -> Result<()> {
    if anchor.dim() != inst.f.dim() || !inst.f.domain_contains(anchor) {
        return Err(Error::Domain("anchor point must lie in int dom f".into()));
    }
    Ok(())
}

fn run_scheme<T, F>(
    inst: &ProblemInstance<T>,
    schedule: &StepSchedule<T>,
    stop: &StopRule<T>,
    scheme: SchemeKind,
    anchor: Option<&PrimalPoint<T>>,
    mut probe: F,
) -> Result<Trace<T>>
where
    T: Real,
    F: FnMut(usize, &mut PrimalPoint<T>),
{
    let f = &inst.f;
    let tol = stop.inner_tolerance();
    let member_tol = real::<T>(SET_MEMBERSHIP_TOL);
    let clock = Instant::now();

    let mut x = inst.x1.clone();
    let mut states: Vec<IterationState<T>> = Vec::new();
    let mut seeds = WarmSeeds::default();
    let mut warm_tx: Option<PrimalPoint<T>> = None;
    let mut domain_exits = 0usize;
    let mut status = RunStatus::MaxIterations;

    for n in 1..=stop.max_iterations {
        let alpha = schedule.alpha_at(n);
        let beta = schedule.beta_at(n);
        let df_now = f.bregman_distance(&inst.witness, &x)?;

        let (z, y, mut x_next, fp_residual, resolvent_iterations, t_of_y) = match scheme {
            SchemeKind::Main | SchemeKind::Kumam => {
                let (step, exits) = if scheme == SchemeKind::Main {
                    (step_main_seeded(inst, &x, alpha, beta, tol, &seeds)?, 0)
                } else {
                    kumam_step(inst, &x, alpha, beta, tol, &seeds, member_tol)?
                };
                domain_exits += exits;
                let tx = inst.composed.apply_warm(f, &x, tol, warm_tx.as_ref())?.point;
                let fp = x.dist_inf(&tx);
                warm_tx = Some(tx);
                seeds = WarmSeeds {
                    z: Some(step.z.clone()),
                    tz: Some(step.tz.clone()),
                    ty: Some(step.ty.clone()),
                };
                (step.z, step.y, step.x_next, fp, step.resolvent_iterations, step.ty)
            }
            SchemeKind::Halpern | SchemeKind::Zegeye => {
                let u = anchor.expect("anchored schemes carry an anchor");
                let tx = inst.composed.apply_warm(f, &x, tol, warm_tx.as_ref())?.point;
                let fp = x.dist_inf(&tx);
                let mid =
                    f.dual_average(&[alpha, T::one() - alpha], &[u.clone(), tx.clone()])?;
                let next = if scheme == SchemeKind::Zegeye {
                    bregman_project(f, &inst.set, &mid, tol)?.point
                } else {
                    mid
                };
                warm_tx = Some(tx.clone());
                (x.clone(), x.clone(), next, fp, 0, tx)
            }
        };

        probe(n, &mut x_next);

        if scheme == SchemeKind::Main {
            let df_next = f.bregman_distance(&inst.witness, &x_next)?;
            if df_next > df_now + real(MONOTONE_SLACK) {
                return Err(Error::Monotonicity {
                    n,
                    before: as_f64(df_now),
                    after: as_f64(df_next),
                });
            }
        }

        let step_norm = x_next.dist_inf(&x);
        let coupling_gap = x_next.dist_inf(&t_of_y);
        states.push(IterationState {
            n,
            alpha,
            beta,
            x: x.clone(),
            z,
            y,
            df_to_witness: df_now,
            fp_residual,
            step_norm,
            resolvent_iterations,
            coupling_gap,
        });

        x = x_next;
        if step_norm <= stop.x_tol && fp_residual <= stop.fp_tol {
            status = RunStatus::Converged;
            break;
        }
    }

    Ok(Trace {
        states,
        final_point: x,
        status,
        wall_seconds: clock.elapsed().as_secs_f64(),
        domain_exits,
    })
}

/// The main step with both projections dropped; returns the stage
/// points plus how many of them left the constraint set.
fn kumam_step<T: Real>(
    inst: &ProblemInstance<T>,
    x: &PrimalPoint<T>,
    alpha: T,
    beta: T,
    tol: T,
    seeds: &WarmSeeds<T>,
    member_tol: T,
) -> Result<(StepOutcome<T>, usize)> {
    check_weight(alpha)?;
    check_weight(beta)?;
    let f = &inst.f;
    let solve = inst.resolvent.solve(x, tol, seeds.z.as_ref())?;
    let z = solve.point;
    let tz = inst.composed.apply_warm(f, &z, tol, seeds.tz.as_ref())?.point;
    let y = f.dual_average(&[beta, T::one() - beta], &[x.clone(), tz.clone()])?;
    let ty = inst.composed.apply_warm(f, &y, tol, seeds.ty.as_ref())?.point;
    let x_next = f.dual_average(&[alpha, T::one() - alpha], &[x.clone(), ty.clone()])?;
    let mut exits = 0usize;
    if !inst.set.contains(&y, member_tol) {
        exits += 1;
    }
    if !inst.set.contains(&x_next, member_tol) {
        exits += 1;
    }
    Ok((StepOutcome { z, tz, y, ty, x_next, resolvent_iterations: solve.iterations }, exits))
}

/// Projection characterization of the limit: for xhat to be the
/// Bregman projection of x₁ onto the solution set, every solution w
/// must satisfy ⟨∇f(x₁) − ∇f(xhat), w − xhat⟩ ≤ 0. Returns the largest
/// such inner product over the offered samples, after certifying that
/// each sample really is a common fixed point and equilibrium point.
pub fn verify_limit_is_projection<T: Real>(
    inst: &ProblemInstance<T>,
    xhat: &PrimalPoint<T>,
    omega_samples: &[PrimalPoint<T>],
) -> Result<T> {
    if omega_samples.is_empty() {
        return Err(Error::Invalid("need at least one solution-set sample".into()));
    }
    let f = &inst.f;
    if !f.domain_contains(xhat) {
        return Err(Error::Domain("candidate limit lies outside int dom f".into()));
    }
    let refs: Vec<&BsneMapping<T>> = inst.mappings.iter().collect();
    for w in omega_samples {
        let fp = certify_common_fixed_point(f, &refs, w, real(CERT_SOLVE_TOL))?;
        let vi = inst.resolvent.certify(w, w)?;
        if fp > real(OMEGA_SAMPLE_TOL) || vi > real(OMEGA_SAMPLE_TOL) {
            return Err(Error::Invalid(format!(
                "sample is not in the solution set (fixed-point residual {}, equilibrium violation {})",
                as_f64(fp),
                as_f64(vi)
            )));
        }
    }
    let g1 = f.grad(&inst.x1)?;
    let g2 = f.grad(xhat)?;
    let diff: Vec<T> =
        g1.coords().iter().zip(g2.coords()).map(|(&a, &b)| a - b).collect();
    let mut worst = T::neg_infinity();
    for w in omega_samples {
        let gap = dot(&diff, &w.minus(xhat).into_coords());
        worst = worst.max(gap);
    }
    Ok(worst)
}
