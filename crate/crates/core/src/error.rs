use thiserror::Error;

/// Errors shared across the crate.
///
/// Numeric payloads are carried as `f64` regardless of the scalar the
/// computation ran in, so the enum stays object-safe and printable.
#[derive(Debug, Error)]
pub enum Error {
    /// A point lies outside the domain of the Legendre function in play.
    #[error("domain violation: {0}")]
    Domain(String),

    /// Convex-combination weights are not positive or do not sum to one.
    #[error("invalid weights: {0}")]
    Weights(String),

    /// A constraint set is empty, inconsistent, or disjoint from the domain.
    #[error("infeasible constraint set: {0}")]
    Infeasible(String),

    /// A sampler could not produce an admissible point.
    #[error("sampling failed: {0}")]
    Sampling(String),

    /// An iterative inner solver ran out of budget.
    #[error("inner solver exceeded {iterations} iterations (last residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    /// Dense linear algebra failure (singular or badly scaled system).
    #[error("linear solve failed: {0}")]
    Linalg(String),

    /// A constructor was handed arguments that violate its contract.
    #[error("invalid construction: {0}")]
    Invalid(String),

    /// The per-step decrease of D_f(p, x_n) failed; this signals a bug in a
    /// step implementation or an uncertified witness, never a tuning issue.
    #[error("Bregman monotonicity violated at n={n}: D_f(p,x_n+1)={after:.12e} > D_f(p,x_n)={before:.12e} + slack")]
    Monotonicity { n: usize, before: f64, after: f64 },

    /// Malformed or inconsistent configuration input.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
