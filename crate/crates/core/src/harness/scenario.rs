use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::actions::{ActionModel, Turn};
use crate::error::{Error, Result};
use crate::spaces::{build_net, compact_cone, one_point_extension, FiniteSpace, Model, ProfiniteSpec};
use crate::warp::BaseEdgeRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    WarpMetric,
    QuotientCheck,
    FaithfulRadius,
    SchreierFamily,
    Spectral,
    Distortion,
    EmbedProfinite,
    KernelCheck,
    RoeTransfer,
    ConeSlice,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::WarpMetric,
        ExperimentKind::QuotientCheck,
        ExperimentKind::FaithfulRadius,
        ExperimentKind::SchreierFamily,
        ExperimentKind::Spectral,
        ExperimentKind::Distortion,
        ExperimentKind::EmbedProfinite,
        ExperimentKind::KernelCheck,
        ExperimentKind::RoeTransfer,
        ExperimentKind::ConeSlice,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::WarpMetric => "warp-metric",
            ExperimentKind::QuotientCheck => "quotient-check",
            ExperimentKind::FaithfulRadius => "faithful-radius",
            ExperimentKind::SchreierFamily => "schreier-family",
            ExperimentKind::Spectral => "spectral",
            ExperimentKind::Distortion => "distortion",
            ExperimentKind::EmbedProfinite => "embed-profinite",
            ExperimentKind::KernelCheck => "kernel-check",
            ExperimentKind::RoeTransfer => "roe-transfer",
            ExperimentKind::ConeSlice => "cone-slice",
        }
    }

    /// Kinds that draw random numbers and so need a seed.
    pub fn is_randomized(self) -> bool {
        matches!(self, ExperimentKind::KernelCheck)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One experiment, as read from a TOML config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionSpec>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Torus,
    Sphere3,
    Profinite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub kind: BaseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    /// Tower depth for profinite spaces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Decay ratio for profinite spaces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    /// Adjoin a fixed point at this distance from every base point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<f64>,
    /// Replace the space by its compact cone with this many slices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone_slices: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Trivial,
    Rotation,
    Translations,
    Sl2,
    FreeRotations,
    ProfiniteShift,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub kind: ActionKind,
    /// Rotation turns, one per torus coordinate (`p/q`, `golden` or a number).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub turns: Vec<String>,
    /// Translation vectors, one free generator each.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vectors: Vec<Vec<String>>,
}

/// Experiment parameters; each kind reads the fields it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<usize>,
    /// Use a k-nearest-neighbour base graph instead of the complete one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knn: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_hops: Option<usize>,
    /// `faithful` or `failure`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub moduli: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_lb_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cycles: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_baseline: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decreasing: Option<bool>,
    /// Rebuild the net at each level with this many points per unit of
    /// level, so the level graphs share one scale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_per_level: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub p_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// `folner` or `point`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_defect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Rerun at doubled resolution and slice count and require the
    /// discrepancy to at least halve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halving: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_exact: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

fn required<T: Copy>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing field `{field}`")))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                line,
                reason: e.message().to_string(),
            }
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(Error::Config(format!(
                "field `name`: `{}` must be nonempty ASCII letters, digits, `-`, `_` or `.`",
                self.name
            )));
        }
        if self.kind.is_randomized() && self.seed.is_none() {
            return Err(Error::Config(format!("field `seed` is required for {}", self.kind)));
        }
        let needs_action = !matches!(
            self.kind,
            ExperimentKind::SchreierFamily | ExperimentKind::EmbedProfinite | ExperimentKind::Distortion
        );
        if needs_action && self.action.is_none() {
            return Err(Error::Config(format!("section `[action]` is required for {}", self.kind)));
        }
        if self.kind != ExperimentKind::SchreierFamily && self.space.is_none() {
            return Err(Error::Config(format!("section `[space]` is required for {}", self.kind)));
        }
        if let Some(expect) = &self.params.expect {
            if expect != "faithful" && expect != "failure" {
                return Err(Error::Config(format!(
                    "field `params.expect`: `{expect}` is neither `faithful` nor `failure`"
                )));
            }
        }
        if let Some(maps) = &self.params.maps {
            if maps != "folner" && maps != "point" {
                return Err(Error::Config(format!(
                    "field `params.maps`: `{maps}` is neither `folner` nor `point`"
                )));
            }
        }
        Ok(())
    }

    pub fn rule(&self) -> BaseEdgeRule {
        self.params.knn.map_or(BaseEdgeRule::Complete, BaseEdgeRule::Knn)
    }

    pub fn seed_or_zero(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

impl SpaceSpec {
    pub fn model(&self) -> Result<Model> {
        match self.kind {
            BaseKind::Torus => Ok(Model::Torus {
                dim: required(self.dim, "space.dim")?,
            }),
            BaseKind::Sphere3 => Ok(Model::Sphere3),
            BaseKind::Profinite => Ok(Model::Profinite(ProfiniteSpec::dyadic(
                required(self.depth, "space.depth")?,
                required(self.ratio, "space.ratio")?,
            )?)),
        }
    }

    /// Net of the base model, before any extension or cone.
    pub fn base(&self, seed: u64) -> Result<Arc<FiniteSpace>> {
        let resolution = match self.kind {
            BaseKind::Profinite => self.resolution.unwrap_or(2),
            _ => required(self.resolution, "space.resolution")?,
        };
        Ok(Arc::new(build_net(&self.model()?, resolution, seed)?))
    }

    /// Wrap a base net into the extension or cone the spec asks for.
    pub fn wrap(&self, base: &FiniteSpace) -> Result<Option<Arc<FiniteSpace>>> {
        match (self.extension, self.cone_slices) {
            (Some(_), Some(_)) => Err(Error::Config(
                "fields `space.extension` and `space.cone_slices` are exclusive".into(),
            )),
            (Some(star), None) => Ok(Some(Arc::new(one_point_extension(base, star)?))),
            (None, Some(m)) => Ok(Some(Arc::new(compact_cone(base, m)?))),
            (None, None) => Ok(None),
        }
    }
}

impl ActionSpec {
    fn turns(list: &[String]) -> Result<Vec<Turn>> {
        list.iter().map(|s| s.parse()).collect()
    }

    pub fn build(&self, space: Arc<FiniteSpace>) -> Result<ActionModel> {
        match self.kind {
            ActionKind::Trivial => ActionModel::trivial(space),
            ActionKind::Rotation => ActionModel::rotation(space, Self::turns(&self.turns)?),
            ActionKind::Translations => ActionModel::translations(
                space,
                self.vectors.iter().map(|v| Self::turns(v)).collect::<Result<_>>()?,
            ),
            ActionKind::Sl2 => ActionModel::sl2_torus(space),
            ActionKind::FreeRotations => ActionModel::free_rotations_s3(space),
            ActionKind::ProfiniteShift => ActionModel::profinite_shift(space),
        }
    }
}

/// The scenario's action on its (possibly wrapped) space.
pub fn build_action(scenario: &Scenario) -> Result<Arc<ActionModel>> {
    let space = scenario
        .space
        .as_ref()
        .ok_or_else(|| Error::Config("section `[space]` is required".into()))?;
    let spec = scenario
        .action
        .as_ref()
        .ok_or_else(|| Error::Config("section `[action]` is required".into()))?;
    let base = space.base(scenario.seed_or_zero())?;
    let action = spec.build(Arc::clone(&base))?;
    Ok(Arc::new(match space.wrap(&base)? {
        Some(wrapped) => action.lift(wrapped)?,
        None => action,
    }))
}
