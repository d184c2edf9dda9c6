//! Runs a configured problem and renders the results: a per-iteration
//! CSV trace, a JSON summary that echoes the effective configuration,
//! and aggregated rows for parameter sweeps.
//!
//! The trace is byte-identical across repeated runs of the same
//! configuration. Wall time lives only in the summary and sweep rows,
//! which therefore compare equal modulo that one field.

use serde::Serialize;

use crate::algorithms::{run_halpern, run_kumam, run_main, run_zegeye, ProblemInstance, RunStatus, Trace};
use crate::config::{AlgorithmChoice, GridCell, RuleConfig, RunConfig};
use crate::error::{Error, Result};
use crate::points::PrimalPoint;

/// Column layout of the per-iteration trace.
pub const TRACE_HEADER: &str =
    "n,alpha,beta,x,z,y,Df_to_witness,fp_residual,step_norm,resolvent_iters";

/// Column layout of the sweep table.
pub const SWEEP_HEADER: &str = "algorithm,p,alpha_exponent,beta,status,iterations,\
final_dist_to_witness,final_df_to_witness,domain_exits,wall_seconds";

/// Everything produced by one run.
pub struct RunOutput {
    /// The configuration the run actually used (overrides applied).
    pub config: RunConfig,
    pub instance: ProblemInstance<f64>,
    pub trace: Trace<f64>,
}

/// Build the instance named by the configuration and run the selected
/// scheme on it. The anchored baselines take their anchor from the
/// configuration, falling back to the start point.
pub fn execute_run(cfg: &RunConfig) -> Result<RunOutput> {
    let instance = cfg.instance.build()?;
    let schedule = cfg.schedule.build()?;
    let stop = cfg.stop.build()?;
    let trace = match cfg.algorithm {
        AlgorithmChoice::Main => run_main(&instance, &schedule, &stop)?,
        AlgorithmChoice::Halpern => {
            run_halpern(&instance, &cfg.anchor_point(), &schedule, &stop)?
        }
        AlgorithmChoice::Zegeye => {
            run_zegeye(&instance, &cfg.anchor_point(), &schedule, &stop)?
        }
        AlgorithmChoice::Kumam => run_kumam(&instance, &schedule, &stop)?,
    };
    Ok(RunOutput { config: cfg.clone(), instance, trace })
}

fn vector_cell(p: &PrimalPoint<f64>) -> String {
    // JSON arrays of floats never contain a double quote, so plain
    // quoting is already valid CSV.
    let inner = serde_json::to_string(p.coords()).expect("float slices always serialize");
    format!("\"{inner}\"")
}

/// Render the full iteration history. Floats use the shortest
/// round-trip decimal form, so equal runs produce equal bytes.
pub fn trace_csv(trace: &Trace<f64>) -> String {
    let mut out = String::with_capacity(64 + trace.states.len() * 160);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for s in &trace.states {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            s.n,
            s.alpha,
            s.beta,
            vector_cell(&s.x),
            vector_cell(&s.z),
            vector_cell(&s.y),
            s.df_to_witness,
            s.fp_residual,
            s.step_norm,
            s.resolvent_iterations,
        ));
    }
    out
}

fn status_name(status: RunStatus) -> &'static str {
    match status {
        RunStatus::Converged => "converged",
        RunStatus::MaxIterations => "max_iterations",
    }
}

/// End-of-run facts plus an echo of the configuration that produced
/// them. The echo is a faithful JSON image: parsing it back yields the
/// same run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub status: String,
    pub algorithm: String,
    pub iterations: usize,
    pub final_point: Vec<f64>,
    /// sup-norm distance from the final iterate to the witness.
    pub final_dist_to_witness: f64,
    /// Bregman distance from the witness to the final iterate.
    pub final_df_to_witness: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_dist_to_target: Option<f64>,
    pub domain_exits: usize,
    pub seed: u64,
    pub wall_seconds: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub config: serde_json::Value,
}

/// Condense a finished run.
pub fn summarize(out: &RunOutput) -> Result<RunSummary> {
    let f = out.instance.geometry();
    let w = out.instance.witness();
    let last = &out.trace.final_point;
    let mut notes = Vec::new();
    if matches!(out.instance.constraint_set(), crate::sets::ConvexSet::WholeSpace) {
        notes.push(
            "constraint set is the whole space: both projections are the identity, so the \
             projected schemes coincide with their unprojected counterparts"
                .to_string(),
        );
    }
    if out.trace.domain_exits > 0 {
        notes.push(format!(
            "{} stage point(s) left the constraint set during unprojected averaging",
            out.trace.domain_exits
        ));
    }
    Ok(RunSummary {
        status: status_name(out.trace.status).to_string(),
        algorithm: out.config.algorithm.name().to_string(),
        iterations: out.trace.iterations(),
        final_point: last.coords().to_vec(),
        final_dist_to_witness: last.dist_inf(w),
        final_df_to_witness: f.bregman_distance(w, last)?,
        final_dist_to_target: out.instance.target().map(|t| last.dist_inf(t)),
        domain_exits: out.trace.domain_exits,
        seed: out.config.seed,
        wall_seconds: out.trace.wall_seconds,
        notes,
        config: serde_json::to_value(&out.config)
            .map_err(|e| Error::Config(format!("summary serialization failed: {e}")))?,
    })
}

/// How one sweep cell ended: with a summary, or with the error that
/// stopped it.
pub enum CellOutcome {
    Ran(RunSummary),
    Failed(String),
}

/// Run every cell of the configuration's grid against the base
/// configuration. A grid with no axes yields no rows. A failing cell
/// becomes a `Failed` outcome instead of aborting its siblings.
pub fn execute_sweep(base: &RunConfig) -> Vec<(RunConfig, CellOutcome)> {
    let cells: Vec<GridCell> =
        base.grid.as_ref().map(|g| g.cells()).unwrap_or_default();
    cells
        .iter()
        .map(|cell| {
            let cfg = base.with_cell(cell);
            let outcome = match execute_run(&cfg).and_then(|out| summarize(&out)) {
                Ok(summary) => CellOutcome::Ran(summary),
                Err(e) => CellOutcome::Failed(e.to_string()),
            };
            (cfg, outcome)
        })
        .collect()
}

// These mirror the schedule defaults applied by ScheduleConfig::build.
fn effective_alpha_exponent(cfg: &RunConfig) -> Option<f64> {
    match &cfg.schedule.alpha {
        Some(RuleConfig::PowerDecay { exponent, .. }) => Some(*exponent),
        Some(RuleConfig::Constant { .. }) => None,
        None => Some(1.0),
    }
}

fn effective_beta(cfg: &RunConfig) -> Option<f64> {
    match &cfg.schedule.beta {
        Some(RuleConfig::Constant { value }) => Some(*value),
        Some(RuleConfig::PowerDecay { .. }) => None,
        None => Some(0.5),
    }
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Render sweep results as CSV. Columns that do not apply to a cell
/// (the exponent p outside the power geometry) are left empty.
pub fn sweep_csv(rows: &[(RunConfig, CellOutcome)]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for (cfg, outcome) in rows {
        let p = cfg.instance.geometry.p;
        let alpha_exponent = effective_alpha_exponent(cfg);
        let beta = effective_beta(cfg);
        match outcome {
            CellOutcome::Ran(s) => out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                cfg.algorithm.name(),
                opt_cell(p),
                opt_cell(alpha_exponent),
                opt_cell(beta),
                s.status,
                s.iterations,
                s.final_dist_to_witness,
                s.final_df_to_witness,
                s.domain_exits,
                s.wall_seconds,
            )),
            CellOutcome::Failed(msg) => out.push_str(&format!(
                "{},{},{},{},error: {},,,,,\n",
                cfg.algorithm.name(),
                opt_cell(p),
                opt_cell(alpha_exponent),
                opt_cell(beta),
                msg.replace([',', '\n'], ";"),
            )),
        }
    }
    out
}
