//! JSON configuration model.
//!
//! Every run is described by one JSON document that names the
//! geometry, the constraint set, the equilibrium data, the mapping
//! family, the start point, and a certified solution witness, plus the
//! algorithm, schedule, stopping rule, and sampler seed. Builders here
//! turn the parsed document into validated library objects; nothing is
//! trusted until the corresponding constructor has accepted it.
//!
//! Vectors are arrays of finite doubles. Box bounds may additionally
//! be the strings "inf" and "-inf" for one-sided intervals.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algorithms::{ProblemInstance, ScheduleRule, StepSchedule, StopRule};
use crate::equilibrium::{Bifunction, ConvexFunctional, ResolventProblem};
use crate::error::{Error, Result};
use crate::geometry::LegendreFunction;
use crate::linalg::DenseMatrix;
use crate::operators::BsneMapping;
use crate::points::PrimalPoint;
use crate::sets::ConvexSet;

/// Interval endpoint: a finite number, or "inf"/"-inf" in JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound(pub f64);

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct BoundVisitor;
        impl Visitor<'_> for BoundVisitor {
            type Value = Bound;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a finite number, \"inf\", or \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Bound, E> {
                Ok(Bound(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Bound, E> {
                Ok(Bound(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Bound, E> {
                Ok(Bound(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Bound, E> {
                match v {
                    "inf" => Ok(Bound(f64::INFINITY)),
                    "-inf" => Ok(Bound(f64::NEG_INFINITY)),
                    other => Err(E::custom(format!(
                        "bound string must be \"inf\" or \"-inf\", got {other:?}"
                    ))),
                }
            }
        }
        d.deserialize_any(BoundVisitor)
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub kind: GeometryKindConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKindConfig {
    SquaredNorm,
    PowerP,
    NegEntropy,
}

impl GeometryConfig {
    pub fn build(&self) -> Result<LegendreFunction<f64>> {
        match self.kind {
            GeometryKindConfig::PowerP => {
                let p = self.p.ok_or_else(|| {
                    Error::Config("geometry.p is required for kind power_p".into())
                })?;
                LegendreFunction::power_p(p, self.dim)
            }
            other => {
                if self.p.is_some() {
                    return Err(Error::Config(
                        "geometry.p is only meaningful for kind power_p".into(),
                    ));
                }
                Ok(match other {
                    GeometryKindConfig::SquaredNorm => LegendreFunction::squared_norm(self.dim),
                    GeometryKindConfig::NegEntropy => LegendreFunction::neg_entropy(self.dim),
                    GeometryKindConfig::PowerP => unreachable!(),
                })
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetConfig {
    WholeSpace,
    Halfspace { a: Vec<f64>, b: f64 },
    Hyperplane { a: Vec<f64>, b: f64 },
    Box { lower: Vec<Bound>, upper: Vec<Bound> },
    Simplex { radius: f64 },
    Intersection { members: Vec<SetConfig>, witness: Vec<f64> },
}

impl SetConfig {
    pub fn build(&self) -> Result<ConvexSet<f64>> {
        match self {
            SetConfig::WholeSpace => Ok(ConvexSet::whole_space()),
            SetConfig::Halfspace { a, b } => ConvexSet::halfspace(a.clone(), *b),
            SetConfig::Hyperplane { a, b } => ConvexSet::hyperplane(a.clone(), *b),
            SetConfig::Box { lower, upper } => ConvexSet::boxed(
                lower.iter().map(|b| b.0).collect(),
                upper.iter().map(|b| b.0).collect(),
            ),
            SetConfig::Simplex { radius } => ConvexSet::simplex(*radius),
            SetConfig::Intersection { members, witness } => {
                let built: Result<Vec<ConvexSet<f64>>> =
                    members.iter().map(SetConfig::build).collect();
                ConvexSet::intersection(built?, PrimalPoint::new(witness.clone()))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionalConfig {
    Zero,
    Quadratic {
        #[serde(rename = "Q")]
        q: Vec<Vec<f64>>,
        r: Vec<f64>,
        #[serde(default)]
        s: f64,
    },
    WeightedL1 {
        weights: Vec<f64>,
    },
}

impl FunctionalConfig {
    pub fn build(&self) -> Result<ConvexFunctional<f64>> {
        match self {
            FunctionalConfig::Zero => Ok(ConvexFunctional::zero()),
            FunctionalConfig::Quadratic { q, r, s } => {
                ConvexFunctional::quadratic(DenseMatrix::from_rows(q.clone())?, r.clone(), *s)
            }
            FunctionalConfig::WeightedL1 { weights } => {
                ConvexFunctional::weighted_l1(weights.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BifunctionConfig {
    Optimization {
        g: FunctionalConfig,
    },
    Operator {
        #[serde(rename = "M")]
        m: Vec<Vec<f64>>,
        c: Vec<f64>,
    },
}

impl BifunctionConfig {
    /// Strict build: operator bifunctions must be monotone.
    pub fn build(&self) -> Result<Bifunction<f64>> {
        match self {
            BifunctionConfig::Optimization { g } => Ok(Bifunction::from_objective(g.build()?)),
            BifunctionConfig::Operator { m, c } => {
                Bifunction::from_operator(DenseMatrix::from_rows(m.clone())?, c.clone())
            }
        }
    }

    /// Lenient build for diagnostic suites: a non-monotone operator is
    /// constructed anyway so the validator can report its violation.
    pub fn build_unchecked(&self) -> Result<Bifunction<f64>> {
        match self {
            BifunctionConfig::Optimization { g } => Ok(Bifunction::from_objective(g.build()?)),
            BifunctionConfig::Operator { m, c } => Bifunction::from_operator_unchecked(
                DenseMatrix::from_rows(m.clone())?,
                c.clone(),
            ),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MappingConfig {
    Projection {
        set: SetConfig,
    },
    /// Equilibrium resolvent; theta and phi default to the instance's
    /// own when omitted, and the instance constraint set is always
    /// used.
    Resolvent {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<BifunctionConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi: Option<FunctionalConfig>,
    },
    Composition {
        members: Vec<MappingConfig>,
    },
}

impl MappingConfig {
    fn build(
        &self,
        f: &LegendreFunction<f64>,
        set: &ConvexSet<f64>,
        theta: &BifunctionConfig,
        phi: &FunctionalConfig,
    ) -> Result<BsneMapping<f64>> {
        match self {
            MappingConfig::Projection { set: target } => {
                Ok(BsneMapping::projection(target.build()?))
            }
            MappingConfig::Resolvent { theta: own_theta, phi: own_phi } => {
                let theta = own_theta.as_ref().unwrap_or(theta).build()?;
                let phi = own_phi.as_ref().unwrap_or(phi).build()?;
                let problem = ResolventProblem::new(f.clone(), theta, phi, set.clone())?;
                Ok(BsneMapping::resolvent(problem))
            }
            MappingConfig::Composition { members } => {
                let built: Result<Vec<BsneMapping<f64>>> =
                    members.iter().map(|m| m.build(f, set, theta, phi)).collect();
                BsneMapping::composition(built?)
            }
        }
    }
}

fn default_phi() -> FunctionalConfig {
    FunctionalConfig::Zero
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub geometry: GeometryConfig,
    pub set: SetConfig,
    pub theta: BifunctionConfig,
    #[serde(default = "default_phi")]
    pub phi: FunctionalConfig,
    pub mappings: Vec<MappingConfig>,
    pub x1: Vec<f64>,
    pub witness: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
}

impl InstanceConfig {
    pub fn build(&self) -> Result<ProblemInstance<f64>> {
        let f = self.geometry.build()?;
        let set = self.set.build()?;
        let mappings: Result<Vec<BsneMapping<f64>>> = self
            .mappings
            .iter()
            .map(|m| m.build(&f, &set, &self.theta, &self.phi))
            .collect();
        ProblemInstance::new(
            f,
            self.theta.build()?,
            self.phi.build()?,
            set,
            mappings?,
            PrimalPoint::new(self.x1.clone()),
            PrimalPoint::new(self.witness.clone()),
            self.target.as_ref().map(|t| PrimalPoint::new(t.clone())),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleConfig {
    Constant { value: f64 },
    PowerDecay {
        #[serde(default = "one")]
        scale: f64,
        exponent: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl RuleConfig {
    fn to_rule(self) -> ScheduleRule<f64> {
        match self {
            RuleConfig::Constant { value } => ScheduleRule::Constant(value),
            RuleConfig::PowerDecay { scale, exponent } => {
                ScheduleRule::PowerDecay { scale, exponent }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<RuleConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<RuleConfig>,
}

impl ScheduleConfig {
    pub fn build(&self) -> Result<StepSchedule<f64>> {
        let alpha = self
            .alpha
            .unwrap_or(RuleConfig::PowerDecay { scale: 1.0, exponent: 1.0 })
            .to_rule();
        let beta = self.beta.unwrap_or(RuleConfig::Constant { value: 0.5 }).to_rule();
        StepSchedule::new(alpha, beta)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StopConfig {
    pub max_iterations: usize,
    pub x_tol: f64,
    pub fp_tol: f64,
}

impl Default for StopConfig {
    fn default() -> Self {
        StopConfig { max_iterations: 10_000, x_tol: 1e-9, fp_tol: 1e-7 }
    }
}

impl StopConfig {
    pub fn build(&self) -> Result<StopRule<f64>> {
        StopRule::new(self.max_iterations, self.x_tol, self.fp_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmChoice {
    Main,
    Halpern,
    Zegeye,
    Kumam,
}

impl AlgorithmChoice {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmChoice::Main => "main",
            AlgorithmChoice::Halpern => "halpern",
            AlgorithmChoice::Zegeye => "zegeye",
            AlgorithmChoice::Kumam => "kumam",
        }
    }
}

impl std::str::FromStr for AlgorithmChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main" => Ok(AlgorithmChoice::Main),
            "halpern" => Ok(AlgorithmChoice::Halpern),
            "zegeye" => Ok(AlgorithmChoice::Zegeye),
            "kumam" => Ok(AlgorithmChoice::Kumam),
            other => Err(Error::Config(format!(
                "unknown algorithm {other:?}; expected main, halpern, zegeye, or kumam"
            ))),
        }
    }
}

/// Parameter grid for batch sweeps. A missing field inherits the base
/// configuration; a present field contributes one cell per listed
/// value, and the cells are the full cross product. A grid with no
/// fields at all describes zero cells.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_exponent: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<Vec<AlgorithmChoice>>,
}

/// One sweep cell: the overrides it applies to the base run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub p: Option<f64>,
    pub alpha_exponent: Option<f64>,
    pub beta: Option<f64>,
    pub algorithm: Option<AlgorithmChoice>,
}

impl GridConfig {
    pub fn cells(&self) -> Vec<GridCell> {
        if self.p.is_none()
            && self.alpha_exponent.is_none()
            && self.beta.is_none()
            && self.algorithm.is_none()
        {
            return Vec::new();
        }
        let ps: Vec<Option<f64>> = expand(&self.p);
        let exps: Vec<Option<f64>> = expand(&self.alpha_exponent);
        let betas: Vec<Option<f64>> = expand(&self.beta);
        let algos: Vec<Option<AlgorithmChoice>> = expand(&self.algorithm);
        let mut cells = Vec::new();
        for &p in &ps {
            for &alpha_exponent in &exps {
                for &beta in &betas {
                    for &algorithm in &algos {
                        cells.push(GridCell { p, alpha_exponent, beta, algorithm });
                    }
                }
            }
        }
        cells
    }
}

fn expand<V: Copy>(axis: &Option<Vec<V>>) -> Vec<Option<V>> {
    match axis {
        None => vec![None],
        Some(values) => values.iter().map(|&v| Some(v)).collect(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub instance: InstanceConfig,
    #[serde(default = "default_algorithm")]
    pub algorithm: AlgorithmChoice,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub stop: StopConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Anchor for the halpern and zegeye baselines; defaults to x1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
}

fn default_algorithm() -> AlgorithmChoice {
    AlgorithmChoice::Main
}

fn default_seed() -> u64 {
    42
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn anchor_point(&self) -> PrimalPoint<f64> {
        PrimalPoint::new(self.anchor.clone().unwrap_or_else(|| self.instance.x1.clone()))
    }

    /// The configuration a sweep cell actually runs: the base document
    /// with the cell's overrides substituted and sweep-only fields
    /// cleared.
    pub fn with_cell(&self, cell: &GridCell) -> RunConfig {
        let mut cfg = self.clone();
        cfg.grid = None;
        cfg.out = None;
        if let Some(p) = cell.p {
            cfg.instance.geometry =
                GeometryConfig { kind: GeometryKindConfig::PowerP, p: Some(p), dim: cfg.instance.geometry.dim };
        }
        if let Some(exponent) = cell.alpha_exponent {
            let scale = match cfg.schedule.alpha {
                Some(RuleConfig::PowerDecay { scale, .. }) => scale,
                _ => 1.0,
            };
            cfg.schedule.alpha = Some(RuleConfig::PowerDecay { scale, exponent });
        }
        if let Some(beta) = cell.beta {
            cfg.schedule.beta = Some(RuleConfig::Constant { value: beta });
        }
        if let Some(algorithm) = cell.algorithm {
            cfg.algorithm = algorithm;
        }
        cfg
    }
}
