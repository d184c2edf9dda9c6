//! Seeded samplers for admissible points.
//!
//! Verification routines need test points drawn from C ∩ int dom f. The
//! sampler walks random chords from a feasible anchor, biasing a share of
//! draws toward the chord endpoints so constraint boundaries are exercised,
//! and projects directions onto the tangent space of any equality
//! constraints so chords do not immediately leave thin sets.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{LegendreFunction, LegendreKind};
use crate::linalg::dot;
use crate::points::{DualPoint, PrimalPoint};
use crate::scalar::{real, Real};
use crate::sets::{bregman_project, ConvexSet, DEFAULT_PROJECTION_TOL};

const CHORD_CAP: f64 = 64.0;
const CHORD_DOUBLINGS: usize = 24;
const CHORD_BISECTIONS: usize = 50;

/// A generic point of int dom f, coordinates O(1).
pub fn domain_sample<T: Real, R: Rng>(f: &LegendreFunction<T>, rng: &mut R) -> PrimalPoint<T> {
    let coords: Vec<T> = (0..f.dim())
        .map(|_| match f.kind() {
            LegendreKind::NegEntropy => real(rng.gen_range(0.05..4.0)),
            _ => real(rng.gen_range(-3.0..3.0)),
        })
        .collect();
    PrimalPoint::new(coords)
}

/// A generic dual point; every geometry here has conj defined on all of ℝⁿ.
pub fn dual_sample<T: Real, R: Rng>(f: &LegendreFunction<T>, rng: &mut R) -> DualPoint<T> {
    let coords: Vec<T> = (0..f.dim()).map(|_| real(rng.gen_range(-3.0..3.0))).collect();
    DualPoint::new(coords)
}

/// A feasible starting point in C ∩ int dom f.
pub fn anchor_point<T: Real>(
    f: &LegendreFunction<T>,
    set: &ConvexSet<T>,
) -> Result<PrimalPoint<T>> {
    let candidate = match set {
        ConvexSet::Intersection { witness, .. } => witness.clone(),
        _ => {
            let center = f.domain_center();
            bregman_project(f, set, &center, real(DEFAULT_PROJECTION_TOL))?.point
        }
    };
    if !f.domain_contains(&candidate) {
        return Err(Error::Infeasible(
            "no anchor found in the intersection of the set with int dom f".into(),
        ));
    }
    Ok(candidate)
}

/// Draws `count` points of C ∩ int dom f. Deterministic given the rng state.
pub fn sample_in_set<T: Real, R: Rng>(
    f: &LegendreFunction<T>,
    set: &ConvexSet<T>,
    count: usize,
    rng: &mut R,
) -> Result<Vec<PrimalPoint<T>>> {
    set.check_dim(f.dim())?;
    let anchor = anchor_point(f, set)?;
    let mut normals: Vec<Vec<T>> = Vec::new();
    equality_normals(set, f.dim(), &mut normals);

    let admissible =
        |pt: &PrimalPoint<T>| set.contains(pt, real(1e-12)) && f.domain_contains(pt) && pt.is_finite();

    let mut out: Vec<PrimalPoint<T>> = Vec::with_capacity(count);
    push_structured(f, set, &anchor, &admissible, &mut out);
    out.truncate(count);

    let mut stale = 0usize;
    while out.len() < count {
        if stale > 200 {
            return Err(Error::Sampling(format!(
                "chord sampler stalled after {} of {count} points",
                out.len()
            )));
        }
        let Some(dir) = tangent_direction(f.dim(), &normals, rng) else {
            stale += 1;
            continue;
        };
        let t_max = chord_reach(&anchor, &dir, T::one(), &admissible);
        let t_min = chord_reach(&anchor, &dir, -T::one(), &admissible);
        let span = t_max - t_min;
        if !(span > T::zero()) {
            // chord degenerated to the anchor itself; keep it occasionally
            if out.is_empty() {
                out.push(anchor.clone());
            }
            stale += 1;
            continue;
        }
        let t = match rng.gen_range(0..4u8) {
            0 | 1 => t_min + span * real(rng.gen_range(0.0..1.0)),
            2 => t_max - span * real(10.0f64.powf(-rng.gen_range(1.0..12.0))),
            _ => t_min + span * real(10.0f64.powf(-rng.gen_range(1.0..12.0))),
        };
        let pt = anchor.add_scaled(t, &dir);
        if admissible(&pt) {
            out.push(pt);
            stale = 0;
        } else {
            stale += 1;
        }
    }
    Ok(out)
}

fn push_structured<T: Real, F: Fn(&PrimalPoint<T>) -> bool>(
    f: &LegendreFunction<T>,
    set: &ConvexSet<T>,
    anchor: &PrimalPoint<T>,
    admissible: &F,
    out: &mut Vec<PrimalPoint<T>>,
) {
    let mut push = |pt: PrimalPoint<T>| {
        if admissible(&pt) {
            out.push(pt);
        }
    };
    push(anchor.clone());
    match set {
        ConvexSet::Box { lower, upper } => {
            let corner = |side: &[T]| -> PrimalPoint<T> {
                PrimalPoint::new(
                    side.iter()
                        .zip(anchor.coords())
                        .map(|(&s, &a)| if s.is_finite() { s } else { a })
                        .collect::<Vec<T>>(),
                )
            };
            push(corner(lower));
            push(corner(upper));
        }
        ConvexSet::Simplex { radius } => {
            let d = anchor.dim();
            let delta = real::<T>(1e-6);
            for i in 0..d.min(4) {
                let mut c = vec![*radius * delta / real(d as f64); d];
                c[i] = *radius * (T::one() - delta) + c[i];
                // renormalize the tiny drift so the sum is exact
                let s: T = c.iter().copied().sum();
                let fix = *radius / s;
                for v in &mut c {
                    *v = *v * fix;
                }
                push(PrimalPoint::new(c));
            }
        }
        ConvexSet::Intersection { witness, .. } => push(witness.clone()),
        _ => {}
    }
    let _ = f;
}

/// Largest |t| in the given sign direction keeping anchor + t·dir admissible.
fn chord_reach<T: Real, F: Fn(&PrimalPoint<T>) -> bool>(
    anchor: &PrimalPoint<T>,
    dir: &[T],
    sign: T,
    admissible: &F,
) -> T {
    let at = |t: T| anchor.add_scaled(sign * t, dir);
    let mut inside = T::zero();
    let mut probe = T::one();
    let cap = real::<T>(CHORD_CAP);
    let mut outside: Option<T> = None;
    for _ in 0..CHORD_DOUBLINGS {
        if admissible(&at(probe)) {
            inside = probe;
            if probe >= cap {
                break;
            }
            probe = (probe * real(2.0)).min(cap);
        } else {
            outside = Some(probe);
            break;
        }
    }
    if let Some(mut hi) = outside {
        let mut lo = inside;
        for _ in 0..CHORD_BISECTIONS {
            let mid = (lo + hi) * real(0.5);
            if admissible(&at(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        inside = lo;
    }
    sign * inside
}

fn tangent_direction<T: Real, R: Rng>(
    dim: usize,
    normals: &[Vec<T>],
    rng: &mut R,
) -> Option<Vec<T>> {
    let mut d: Vec<T> = (0..dim)
        .map(|_| real(rng.sample::<f64, _>(StandardNormal)))
        .collect();
    for _ in 0..4 {
        for nm in normals {
            let denom = dot(nm, nm);
            if denom <= T::epsilon() {
                continue;
            }
            let c = dot(nm, &d) / denom;
            for (di, &ni) in d.iter_mut().zip(nm) {
                *di = *di - c * ni;
            }
        }
    }
    let norm = dot(&d, &d).sqrt();
    if norm <= real(1e-8) {
        return None;
    }
    for v in &mut d {
        *v = *v / norm;
    }
    Some(d)
}

fn equality_normals<T: Real>(set: &ConvexSet<T>, dim: usize, out: &mut Vec<Vec<T>>) {
    match set {
        ConvexSet::Hyperplane { normal, .. } => out.push(normal.clone()),
        ConvexSet::Simplex { .. } => out.push(vec![T::one(); dim]),
        ConvexSet::Intersection { members, .. } => {
            for m in members {
                equality_normals(m, dim, out);
            }
        }
        _ => {}
    }
}
