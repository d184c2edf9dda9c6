//! Batched self-checks behind the `check` command. Each suite measures
//! a family of inequalities on randomized inputs and reports one
//! pass/fail outcome per inequality, with the worst observed value next
//! to the tolerance it was held to.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algorithms::{
    run_main, verify_limit_is_projection, ProblemInstance, RunStatus, StepSchedule, StopRule,
};
use crate::config::RunConfig;
use crate::equilibrium::{
    bfne_check, validate_bifunction, verify_resolvent_vi, Bifunction, ConvexFunctional,
    ResolventProblem,
};
use crate::error::{Error, Result};
use crate::geometry::{LegendreFunction, LegendreKind};
use crate::points::{pairing, PrimalPoint};
use crate::sampling::{anchor_point, domain_sample, dual_sample, sample_in_set};
use crate::sets::{bregman_project, verify_projection_optimality, ConvexSet};

pub const CORE_SAMPLES: usize = 1000;
pub const PROJECTION_DRAWS: usize = 200;
pub const RESOLVENT_DRAWS: usize = 100;

const ROUND_TRIP_TOL: f64 = 1e-9;
const V_BRIDGE_TOL: f64 = 1e-10;
const SUBGRADIENT_TOL: f64 = 1e-10;
const JENSEN_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-10;
const NONNEG_TOL: f64 = 1e-12;

const PROJ_OPTIMALITY_TOL: f64 = 1e-8;
const PROJ_THREE_POINT_TOL: f64 = 1e-10;
const PROJ_IDEMPOTENCE_TOL: f64 = 1e-9;
const PROJ_SOLVE_TOL: f64 = 1e-10;
const PROJ_WITNESS_SAMPLES: usize = 16;

const MONOTONICITY_TOL: f64 = 1e-9;
const RES_SOLVE_TOL: f64 = 1e-10;
const RES_VI_TOL: f64 = 1e-7;
const RES_BFNE_TOL: f64 = 1e-8;
const RES_THREE_POINT_TOL: f64 = 1e-8;
const RES_AGREEMENT_TOL: f64 = 1e-7;
const RES_VI_SAMPLES: usize = 32;

const FEJER_TOL: f64 = 1e-10;
const STAGE_TOL: f64 = 1e-10;
const LIMIT_TOL: f64 = 1e-6;
const TREND_FLOOR: f64 = 1e-15;

/// One measured inequality. `worst` is absent when the measurement
/// itself failed before producing a number.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<f64>,
    pub threshold: f64,
    pub samples: usize,
    pub detail: String,
}

impl CheckOutcome {
    fn measured(name: &str, worst: f64, threshold: f64, samples: usize, detail: String) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed: worst <= threshold,
            worst: Some(worst),
            threshold,
            samples,
            detail,
        }
    }

    fn errored(name: &str, threshold: f64, err: &Error) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed: false,
            worst: None,
            threshold,
            samples: 0,
            detail: format!("measurement failed: {err}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub outcomes: Vec<CheckOutcome>,
    pub wall_seconds: f64,
}

impl SuiteReport {
    /// One line per outcome, terminal-friendly.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let tag = if o.passed { "PASS" } else { "FAIL" };
            let worst = o
                .worst
                .map(|w| format!("{w:.3e}"))
                .unwrap_or_else(|| "n/a".to_string());
            out.push_str(&format!(
                "[{tag}] {name}: worst {worst} vs tolerance {thr:.1e} over {n} samples",
                name = o.name,
                thr = o.threshold,
                n = o.samples,
            ));
            if !o.passed {
                out.push_str(&format!("  ({})", o.detail));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "suite {}: {} ({} outcomes, {:.2}s)\n",
            self.suite,
            if self.passed { "PASS" } else { "FAIL" },
            self.outcomes.len(),
            self.wall_seconds,
        ));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteKind {
    CoreIdentities,
    Projection,
    Resolvent,
    Algorithm,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 4] = [
        SuiteKind::CoreIdentities,
        SuiteKind::Projection,
        SuiteKind::Resolvent,
        SuiteKind::Algorithm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::CoreIdentities => "core-identities",
            SuiteKind::Projection => "projection",
            SuiteKind::Resolvent => "resolvent",
            SuiteKind::Algorithm => "algorithm",
        }
    }
}

impl std::str::FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core-identities" => Ok(SuiteKind::CoreIdentities),
            "projection" => Ok(SuiteKind::Projection),
            "resolvent" => Ok(SuiteKind::Resolvent),
            "algorithm" => Ok(SuiteKind::Algorithm),
            other => Err(Error::Config(format!(
                "unknown suite {other:?}; expected core-identities, projection, resolvent, or algorithm"
            ))),
        }
    }
}

/// Dispatch a suite against a run configuration. Randomness is fully
/// determined by the configured seed.
pub fn run_suite(kind: SuiteKind, cfg: &RunConfig) -> Result<SuiteReport> {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let outcomes = match kind {
        SuiteKind::CoreIdentities => {
            let f = cfg.instance.geometry.build()?;
            core_identity_outcomes(&f, CORE_SAMPLES, &mut rng)?
        }
        SuiteKind::Projection => {
            let f = cfg.instance.geometry.build()?;
            let mut all = Vec::new();
            for (label, set) in standard_set_families(&f)? {
                all.extend(projection_outcomes(&f, &label, &set, PROJECTION_DRAWS, &mut rng)?);
            }
            all
        }
        SuiteKind::Resolvent => {
            let f = cfg.instance.geometry.build()?;
            let set = cfg.instance.set.build()?;
            // lenient build so a non-monotone operator is reported by the
            // validator instead of rejected before measurement
            let theta = cfg.instance.theta.build_unchecked()?;
            let phi = cfg.instance.phi.build()?;
            let witness = PrimalPoint::new(cfg.instance.witness.clone());
            resolvent_outcomes(&f, &theta, &phi, &set, Some(&witness), RESOLVENT_DRAWS, &mut rng)?
        }
        SuiteKind::Algorithm => {
            let inst = cfg.instance.build()?;
            let schedule = cfg.schedule.build()?;
            let stop = cfg.stop.build()?;
            algorithm_outcomes(&inst, &schedule, &stop)?
        }
    };
    Ok(SuiteReport {
        suite: kind.name().to_string(),
        seed: cfg.seed,
        passed: outcomes.iter().all(|o| o.passed),
        outcomes,
        wall_seconds: clock.elapsed().as_secs_f64(),
    })
}

/// Identity and inequality checks for one geometry: gradient round
/// trips, the distance bridge through the conjugate, the subgradient
/// inequality of the dual pairing, convexity of the distance in its
/// second slot under dual averaging, the three-point expansion, and
/// nonnegativity.
pub fn core_identity_outcomes<R: Rng>(
    f: &LegendreFunction<f64>,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<CheckOutcome>> {
    let mut round_trip: f64 = 0.0;
    let mut bridge: f64 = 0.0;
    let mut subgradient: f64 = 0.0;
    let mut jensen: f64 = 0.0;
    let mut identity: f64 = 0.0;
    let mut negativity: f64 = 0.0;

    for _ in 0..samples {
        let x = domain_sample(f, rng);
        let z = domain_sample(f, rng);
        let p = domain_sample(f, rng);
        let xstar = dual_sample(f, rng);
        let ystar = dual_sample(f, rng);

        let back = f.grad_conj(&f.grad(&x)?)?;
        round_trip = round_trip.max(back.dist_inf(&x));
        let forward = f.grad(&f.grad_conj(&xstar)?)?;
        round_trip = round_trip.max(forward.dist_inf(&xstar));

        let v = f.v_fun(&x, &xstar)?;
        let mirrored = f.grad_conj(&xstar)?;
        bridge = bridge.max((v - f.bregman_distance(&x, &mirrored)?).abs());

        let shifted = xstar.add_scaled(1.0, ystar.coords());
        let lhs = v + pairing(&ystar, &mirrored.minus(&x));
        subgradient = subgradient.max(lhs - f.v_fun(&x, &shifted)?);

        let raw = [rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0)];
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let nodes = [x.clone(), z.clone(), domain_sample(f, rng)];
        let avg = f.dual_average(&weights, &nodes)?;
        let mix: f64 = weights
            .iter()
            .zip(&nodes)
            .map(|(&w, node)| Ok(w * f.bregman_distance(&p, node)?))
            .sum::<Result<f64>>()?;
        jensen = jensen.max(f.bregman_distance(&p, &avg)? - mix);

        let gz = f.grad(&z)?;
        let gx = f.grad(&x)?;
        let lhs = f.bregman_distance(&p, &x)? - f.bregman_distance(&p, &z)?;
        let rhs = f.eval(&z)? - f.eval(&x)?
            + pairing(&gz, &x.minus(&z))
            + pairing(&gz.minus(&gx), &p.minus(&x));
        identity = identity.max((lhs - rhs).abs());

        negativity = negativity.max(-f.bregman_distance(&x, &z)?);
    }

    Ok(vec![
        CheckOutcome::measured(
            "gradient round trip",
            round_trip,
            ROUND_TRIP_TOL,
            samples,
            "sup-norm error of mapping through the gradient and back".into(),
        ),
        CheckOutcome::measured(
            "distance bridge",
            bridge,
            V_BRIDGE_TOL,
            samples,
            "dual-pairing distance vs the mirrored Bregman distance".into(),
        ),
        CheckOutcome::measured(
            "subgradient inequality",
            subgradient.max(0.0),
            SUBGRADIENT_TOL,
            samples,
            "dual-pairing distance grows at least linearly in the dual slot".into(),
        ),
        CheckOutcome::measured(
            "dual-average convexity",
            jensen.max(0.0),
            JENSEN_TOL,
            samples,
            "distance to a dual average never exceeds the weighted mix".into(),
        ),
        CheckOutcome::measured(
            "three-point expansion",
            identity,
            IDENTITY_TOL,
            samples,
            "difference-of-distances identity holds to roundoff".into(),
        ),
        CheckOutcome::measured(
            "distance nonnegativity",
            negativity.max(0.0),
            NONNEG_TOL,
            samples,
            "Bregman distance never dips below zero".into(),
        ),
    ])
}

/// The set families the projection suite exercises, positioned around
/// the geometry's domain so every one has interior feasible points.
pub fn standard_set_families(
    f: &LegendreFunction<f64>,
) -> Result<Vec<(String, ConvexSet<f64>)>> {
    let dim = f.dim();
    let center = f.domain_center();
    let ones = vec![1.0; dim];
    let center_sum: f64 = center.coords().iter().sum();

    let mut families = vec![
        (
            "halfspace".to_string(),
            ConvexSet::halfspace(ones.clone(), center_sum + 1.0)?,
        ),
        ("hyperplane".to_string(), {
            let mut normal = vec![0.0; dim];
            normal[0] = 1.0;
            ConvexSet::hyperplane(normal, center.coords()[0] + 0.5)?
        }),
        ("box".to_string(), {
            let (lo, hi) = match f.kind() {
                LegendreKind::NegEntropy => (0.25, 2.5),
                _ => (-1.5, 1.5),
            };
            ConvexSet::boxed(vec![lo; dim], vec![hi; dim])?
        }),
    ];

    if dim >= 2 {
        let mut skew = vec![0.0; dim];
        skew[0] = 1.0;
        skew[1] = -1.0;
        families.push((
            "two-halfspace intersection".to_string(),
            ConvexSet::intersection(
                vec![
                    ConvexSet::halfspace(ones, center_sum + 1.0)?,
                    ConvexSet::halfspace(skew, 0.5)?,
                ],
                center,
            )?,
        ));
    }
    Ok(families)
}

/// Projection checks for one set: the variational characterization at
/// sampled feasible witnesses, the descent inequality against feasible
/// points, and idempotence.
pub fn projection_outcomes<R: Rng>(
    f: &LegendreFunction<f64>,
    label: &str,
    set: &ConvexSet<f64>,
    draws: usize,
    rng: &mut R,
) -> Result<Vec<CheckOutcome>> {
    let feasible = sample_in_set(f, set, 64, rng)?;
    let mut optimality: f64 = 0.0;
    let mut three_point: f64 = 0.0;
    let mut idempotence: f64 = 0.0;

    for i in 0..draws {
        let x = domain_sample(f, rng);
        let z = bregman_project(f, set, &x, PROJ_SOLVE_TOL)?.point;

        optimality = optimality
            .max(verify_projection_optimality(f, set, &z, &x, PROJ_WITNESS_SAMPLES, rng)?);

        let y = &feasible[i % feasible.len()];
        let gap = f.bregman_distance(y, &z)? + f.bregman_distance(&z, &x)?
            - f.bregman_distance(y, &x)?;
        three_point = three_point.max(gap);

        let again = bregman_project(f, set, &z, PROJ_SOLVE_TOL)?.point;
        idempotence = idempotence.max(again.dist_inf(&z));
    }

    Ok(vec![
        CheckOutcome::measured(
            &format!("{label}: projection optimality"),
            optimality.max(0.0),
            PROJ_OPTIMALITY_TOL,
            draws,
            "inner product against feasible directions stays nonpositive".into(),
        ),
        CheckOutcome::measured(
            &format!("{label}: projection descent"),
            three_point.max(0.0),
            PROJ_THREE_POINT_TOL,
            draws,
            "distance through the projection never exceeds the direct distance".into(),
        ),
        CheckOutcome::measured(
            &format!("{label}: idempotence"),
            idempotence,
            PROJ_IDEMPOTENCE_TOL,
            draws,
            "projecting a projected point moves it no further".into(),
        ),
    ])
}

/// Resolvent checks: bifunction validity first, then (only for a valid
/// bifunction) the defining inequality at solved points, firm
/// nonexpansiveness, the descent inequality at the witness, witness
/// fixed-point agreement, and warm-start consistency.
pub fn resolvent_outcomes<R: Rng>(
    f: &LegendreFunction<f64>,
    theta: &Bifunction<f64>,
    phi: &ConvexFunctional<f64>,
    set: &ConvexSet<f64>,
    witness: Option<&PrimalPoint<f64>>,
    draws: usize,
    rng: &mut R,
) -> Result<Vec<CheckOutcome>> {
    let report = validate_bifunction(f, theta, set, 200, rng)?;
    let structure_detail = format!(
        "diagonal max {:.2e}, monotonicity max {:.2e}, segment drift {:.2e}, midpoint convexity gap {:.2e}",
        report.diagonal_max,
        report.monotonicity_max,
        report.segment_drift,
        report.midpoint_convexity_max,
    );
    let mut structure = CheckOutcome::measured(
        "bifunction validity",
        report.monotonicity_max.max(report.diagonal_max).max(report.midpoint_convexity_max),
        MONOTONICITY_TOL,
        report.samples,
        structure_detail,
    );
    structure.passed = report.is_satisfied();
    if !structure.passed {
        structure.detail
            .push_str("; resolvent checks skipped because they presuppose these conditions");
        return Ok(vec![structure]);
    }

    let problem = ResolventProblem::new(f.clone(), theta.clone(), phi.clone(), set.clone())?;
    let warm_seed = anchor_point(f, set)?;

    let mut vi: f64 = 0.0;
    let mut bfne: f64 = f64::NEG_INFINITY;
    let mut agreement: f64 = 0.0;
    let mut witness_descent: f64 = f64::NEG_INFINITY;
    let mut previous: Option<(PrimalPoint<f64>, PrimalPoint<f64>)> = None;

    for _ in 0..draws {
        let x = domain_sample(f, rng);
        let solve = problem.solve(&x, RES_SOLVE_TOL, None)?;
        let z = solve.point;

        vi = vi.max(verify_resolvent_vi(f, theta, phi, set, &x, &z, RES_VI_SAMPLES, rng)?);

        let rewarmed = problem.solve(&x, RES_SOLVE_TOL, Some(&warm_seed))?.point;
        agreement = agreement.max(rewarmed.dist_inf(&z));

        if let Some((px, pz)) = &previous {
            let check = bfne_check(f, px, &x, pz, &z)?;
            bfne = bfne.max(check.distance_lhs - check.distance_rhs);
        }

        if let Some(w) = witness {
            let gap = f.bregman_distance(w, &z)? + f.bregman_distance(&z, &x)?
                - f.bregman_distance(w, &x)?;
            witness_descent = witness_descent.max(gap);
        }

        previous = Some((x, z));
    }

    let mut outcomes = vec![
        structure,
        CheckOutcome::measured(
            "resolvent inequality",
            vi,
            RES_VI_TOL,
            draws,
            "defining inequality holds at freshly sampled feasible points".into(),
        ),
        CheckOutcome::measured(
            "firm nonexpansiveness",
            bfne.max(0.0),
            RES_BFNE_TOL,
            draws.saturating_sub(1),
            "paired distance contraction of the resolvent map".into(),
        ),
        CheckOutcome::measured(
            "warm-start agreement",
            agreement,
            RES_AGREEMENT_TOL,
            draws,
            "cold and warm solves land on the same point".into(),
        ),
    ];

    if let Some(w) = witness {
        outcomes.push(CheckOutcome::measured(
            "witness descent",
            witness_descent.max(0.0),
            RES_THREE_POINT_TOL,
            draws,
            "distance to the witness contracts through the resolvent".into(),
        ));
        match problem.certify(w, w) {
            Ok(residual) => outcomes.push(CheckOutcome::measured(
                "witness equilibrium residual",
                residual,
                RES_AGREEMENT_TOL,
                crate::equilibrium::VI_SAMPLE_COUNT,
                "the configured witness satisfies the equilibrium inequality".into(),
            )),
            Err(e) => outcomes.push(CheckOutcome::errored(
                "witness equilibrium residual",
                RES_AGREEMENT_TOL,
                &e,
            )),
        }
        match problem.solve(w, RES_SOLVE_TOL, None) {
            Ok(fixed) => outcomes.push(CheckOutcome::measured(
                "witness fixed-point agreement",
                fixed.point.dist_inf(w),
                RES_AGREEMENT_TOL,
                1,
                "solving at the witness returns the witness".into(),
            )),
            Err(e) => outcomes.push(CheckOutcome::errored(
                "witness fixed-point agreement",
                RES_AGREEMENT_TOL,
                &e,
            )),
        }
    }

    Ok(outcomes)
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("residuals are finite"));
    sorted[sorted.len() / 2]
}

fn trend_outcome(name: &str, series: &[f64]) -> CheckOutcome {
    let last = *series.last().unwrap_or(&0.0);
    if series.len() < 20 {
        let first = *series.first().unwrap_or(&0.0);
        let passed = last <= first.max(TREND_FLOOR) || last <= 1e-7;
        return CheckOutcome {
            name: name.to_string(),
            passed,
            worst: Some(last),
            threshold: first.max(1e-7),
            samples: series.len(),
            detail: "run too short for a windowed trend; compared final against initial".into(),
        };
    }
    let early = median(&series[..series.len() / 2]);
    let late = median(&series[series.len() * 3 / 4..]);
    let threshold = (0.5 * early).max(TREND_FLOOR);
    CheckOutcome::measured(
        name,
        late,
        threshold,
        series.len(),
        format!("median over the last quarter vs half the first-half median ({early:.3e})"),
    )
}

/// Run the main scheme and check the distance inequalities along the
/// trace: monotone decrease toward the witness, the stage-point bound,
/// four vanishing gap series, and the limit-point certificate.
pub fn algorithm_outcomes(
    inst: &ProblemInstance<f64>,
    schedule: &StepSchedule<f64>,
    stop: &StopRule<f64>,
) -> Result<Vec<CheckOutcome>> {
    let trace = match run_main(inst, schedule, stop) {
        Ok(trace) => trace,
        Err(Error::Monotonicity { n, before, after }) => {
            return Ok(vec![CheckOutcome {
                name: "witness distance monotonicity".to_string(),
                passed: false,
                worst: Some(after - before),
                threshold: FEJER_TOL,
                samples: n,
                detail: format!(
                    "distance to the witness rose from {before:.6e} to {after:.6e} at iteration {n}"
                ),
            }]);
        }
        Err(e) => return Err(e),
    };

    let f = inst.geometry();
    let w = inst.witness();
    let states = &trace.states;

    let mut fejer: f64 = f64::NEG_INFINITY;
    let mut distances: Vec<f64> = states.iter().map(|s| s.df_to_witness).collect();
    distances.push(f.bregman_distance(w, &trace.final_point)?);
    for pair in distances.windows(2) {
        fejer = fejer.max(pair[1] - pair[0]);
    }

    let mut stage: f64 = f64::NEG_INFINITY;
    for s in states {
        stage = stage.max(f.bregman_distance(w, &s.y)? - s.df_to_witness);
    }

    let coupling: Vec<f64> = states.iter().map(|s| s.coupling_gap).collect();
    let xz: Vec<f64> = states.iter().map(|s| s.x.dist_inf(&s.z)).collect();
    let zy: Vec<f64> = states.iter().map(|s| s.z.dist_inf(&s.y)).collect();
    let fp: Vec<f64> = states.iter().map(|s| s.fp_residual).collect();

    let status = match trace.status {
        RunStatus::Converged => "converged",
        RunStatus::MaxIterations => "hit the iteration budget",
    };
    let mut outcomes = vec![
        CheckOutcome::measured(
            "witness distance monotonicity",
            fejer.max(0.0),
            FEJER_TOL,
            distances.len() - 1,
            format!(
                "distance to the witness never increases along the run ({status} after {} iterations)",
                trace.iterations()
            ),
        ),
        CheckOutcome::measured(
            "stage distance bound",
            stage.max(0.0),
            STAGE_TOL,
            states.len(),
            "the intermediate stage point is never farther from the witness".into(),
        ),
        trend_outcome("coupling gap vanishes", &coupling),
        trend_outcome("resolvent gap vanishes", &xz),
        trend_outcome("stage gap vanishes", &zy),
        trend_outcome("fixed-point residual vanishes", &fp),
    ];

    let mut samples = vec![w.clone()];
    if let Some(t) = inst.target() {
        if t.dist_inf(w) > 0.0 {
            samples.push(t.clone());
        }
    }
    match verify_limit_is_projection(inst, &trace.final_point, &samples) {
        Ok(worst) => outcomes.push(CheckOutcome::measured(
            "limit-point projection certificate",
            worst,
            LIMIT_TOL,
            samples.len(),
            "the limit acts as the projection of the start onto the solution set".into(),
        )),
        Err(e) => outcomes.push(CheckOutcome::errored(
            "limit-point projection certificate",
            LIMIT_TOL,
            &e,
        )),
    }

    Ok(outcomes)
}
