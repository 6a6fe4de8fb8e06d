//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use opinion_merge_core::scenarios::{
    AdversarialReality, Objective, RandomSceptic, Regime, SamplingReality, ScenarioError,
};
use opinion_merge_core::strategies::{
    alpha_pair, big_alpha_sceptic_i, criterion_sceptic_i, growth_joint_anytime, growth_joint_fixed,
    growth_sceptic_i_anytime, growth_sceptic_i_fixed, AlphaMember, ConstantSceptic, GrowthError, Mixture, MixtureError,
    RatioTracker, StrategyError, DEFAULT_C_MAX, DEFAULT_K_MAX,
};
use opinion_merge_core::verify::GrowthVariant;
use opinion_merge_core::{AlphaParam, ProtocolKind, Reality, Role, Sceptic};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable that replaces the configured seed.
pub const SEED_ENV: &str = "OPINION_MERGE_SEED";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{SEED_ENV}={0} is not an unsigned 64-bit integer")]
    SeedEnv(String),
    #[error("{0}")]
    Invalid(String),
    #[error("sceptic {role}: {source}")]
    Strategy { role: Role, source: StrategyError },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolName {
    #[default]
    Competitive,
    Modified,
}

impl From<ProtocolName> for ProtocolKind {
    fn from(p: ProtocolName) -> Self {
        match p {
            ProtocolName::Competitive => ProtocolKind::Competitive,
            ProtocolName::Modified => ProtocolKind::Modified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub protocol: ProtocolName,
    pub horizon: usize,
    pub outcomes: usize,
    pub seed: u64,
    pub scenario: ScenarioSpec,
    pub sceptic_i: StrategySpec,
    pub sceptic_ii: StrategySpec,
    /// Order of the cumulative divergence column of the transcript; defaults
    /// to Sceptic I's order, or 0.
    #[serde(default)]
    pub reference_alpha: Option<f64>,
    #[serde(default, rename = "check")]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub regime: RegimeName,
    /// Timidity constant of the `timid` regime.
    #[serde(default)]
    pub c: Option<f64>,
    pub reality: RealityName,
    /// Outcome played by the `fixed` Reality.
    #[serde(default)]
    pub outcome: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeName {
    Agree,
    Drift,
    Singular,
    ZeroMixed,
    Timid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealityName {
    SampleI,
    SampleIi,
    MaxRatio,
    MinRatio,
    MinPayoff,
    Fixed,
}

/// A Sceptic strategy by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategySpec {
    Constant {},
    /// One member of the power-ratio pair; give `alpha` or `eps`
    /// (`alpha = −1 + 2 eps`).
    AlphaPair {
        #[serde(default)]
        alpha: Option<f64>,
        #[serde(default)]
        eps: Option<f64>,
    },
    BigAlpha {
        alpha: f64,
    },
    Criterion {
        alpha: f64,
        #[serde(default)]
        c_max: Option<u32>,
    },
    RatioTracker {},
    /// Pair member of order `−1 + 2/√N` for the run horizon `N`.
    GrowthJointFixed {},
    /// Big-alpha strategy of order `−1 − 2/√N`.
    GrowthBigFixed {},
    GrowthJointAnytime {
        #[serde(default)]
        k_max: Option<u32>,
    },
    GrowthBigAnytime {
        #[serde(default)]
        k_max: Option<u32>,
    },
    Random {
        #[serde(default)]
        seed: Option<u64>,
    },
    Mixture {
        components: Vec<StrategySpec>,
        weights: Vec<f64>,
    },
}

/// A check run on the finished transcript.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    SmallAlpha { alpha: f64 },
    BigAlpha { alpha: f64 },
    GrowthFixedLower { c: f64 },
    GrowthFixedUpper { c: f64 },
    GrowthLower { c: f64, eps: f64 },
    GrowthUpper { c: f64, eps: f64 },
}

impl CheckSpec {
    pub fn growth(&self) -> Option<(f64, GrowthVariant)> {
        match *self {
            CheckSpec::GrowthFixedLower { c } => Some((c, GrowthVariant::FixedLower)),
            CheckSpec::GrowthFixedUpper { c } => Some((c, GrowthVariant::FixedUpper)),
            CheckSpec::GrowthLower { c, eps } => Some((c, GrowthVariant::Lower { eps })),
            CheckSpec::GrowthUpper { c, eps } => Some((c, GrowthVariant::Upper { eps })),
            _ => None,
        }
    }
}

fn pair_alpha(alpha: Option<f64>, eps: Option<f64>) -> Result<f64, ConfigError> {
    match (alpha, eps) {
        (Some(a), None) => Ok(a),
        (None, Some(e)) if e > 0.0 && e.is_finite() => Ok(-1.0 + 2.0 * e),
        (None, Some(e)) => Err(invalid(format!("eps must be positive, got {e}"))),
        _ => Err(invalid("alpha_pair needs exactly one of alpha, eps")),
    }
}

fn check_alpha(a: f64) -> Result<AlphaParam, ConfigError> {
    AlphaParam::new(a).map_err(|e| invalid(e.to_string()))
}

fn growth_err(role: Role, e: GrowthError) -> ConfigError {
    match e {
        GrowthError::Strategy(source) => ConfigError::Strategy { role, source },
        other => invalid(format!("sceptic {role}: {other}")),
    }
}

fn mixture_err(role: Role, e: MixtureError) -> ConfigError {
    ConfigError::Strategy { role, source: StrategyError::Mixture(e) }
}

impl StrategySpec {
    /// Order associated with the strategy, if any.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            StrategySpec::AlphaPair { alpha, eps } => pair_alpha(*alpha, *eps).ok(),
            StrategySpec::BigAlpha { alpha } | StrategySpec::Criterion { alpha, .. } => Some(*alpha),
            _ => None,
        }
    }

    /// Builds the strategy for `role`, checking its preconditions.
    pub fn build(&self, role: Role, horizon: usize, seed: u64) -> Result<Box<dyn Sceptic + Send>, ConfigError> {
        let first_only = |name: &str| -> Result<(), ConfigError> {
            if role == Role::I {
                Ok(())
            } else {
                Err(invalid(format!("strategy {name} is only available to Sceptic I")))
            }
        };
        let pick = |(i, ii): (AlphaMember, AlphaMember)| -> Box<dyn Sceptic + Send> {
            if role == Role::I {
                Box::new(i)
            } else {
                Box::new(ii)
            }
        };
        let strategy = |e| ConfigError::Strategy { role, source: e };
        Ok(match self {
            StrategySpec::Constant {} => Box::new(ConstantSceptic),
            StrategySpec::AlphaPair { alpha, eps } => pick(alpha_pair(check_alpha(pair_alpha(*alpha, *eps)?)?)),
            StrategySpec::BigAlpha { alpha } => {
                first_only("big_alpha")?;
                Box::new(big_alpha_sceptic_i(*alpha).map_err(strategy)?)
            }
            StrategySpec::Criterion { alpha, c_max } => {
                first_only("criterion")?;
                Box::new(criterion_sceptic_i(*alpha, c_max.unwrap_or(DEFAULT_C_MAX)).map_err(strategy)?)
            }
            StrategySpec::RatioTracker {} => {
                first_only("ratio_tracker")?;
                Box::new(RatioTracker)
            }
            StrategySpec::GrowthJointFixed {} => {
                pick(growth_joint_fixed(horizon as u64).map_err(|e| growth_err(role, e))?)
            }
            StrategySpec::GrowthBigFixed {} => {
                first_only("growth_big_fixed")?;
                Box::new(growth_sceptic_i_fixed(horizon as u64).map_err(|e| growth_err(role, e))?)
            }
            StrategySpec::GrowthJointAnytime { k_max } => {
                let (i, ii) = growth_joint_anytime(k_max.unwrap_or(DEFAULT_K_MAX)).map_err(|e| growth_err(role, e))?;
                if role == Role::I {
                    Box::new(i)
                } else {
                    Box::new(ii)
                }
            }
            StrategySpec::GrowthBigAnytime { k_max } => {
                first_only("growth_big_anytime")?;
                Box::new(growth_sceptic_i_anytime(k_max.unwrap_or(DEFAULT_K_MAX)).map_err(|e| growth_err(role, e))?)
            }
            StrategySpec::Random { seed: own } => {
                // Distinct default streams for the two Sceptics.
                let offset = if role == Role::I { 0 } else { 1 };
                Box::new(RandomSceptic::new(own.unwrap_or(seed.wrapping_add(offset))))
            }
            StrategySpec::Mixture { components, weights } => {
                let built = components.iter().map(|c| c.build(role, horizon, seed)).collect::<Result<Vec<_>, _>>()?;
                Box::new(Mixture::new(built, weights.clone()).map_err(|e| mixture_err(role, e))?)
            }
        })
    }
}

impl ScenarioSpec {
    pub fn regime(&self) -> Result<Regime, ConfigError> {
        if self.regime != RegimeName::Timid && self.c.is_some() {
            return Err(invalid("scenario.c only applies to the timid regime"));
        }
        Ok(match self.regime {
            RegimeName::Agree => Regime::Agree,
            RegimeName::Drift => Regime::Drift,
            RegimeName::Singular => Regime::Singular,
            RegimeName::ZeroMixed => Regime::ZeroMixed,
            RegimeName::Timid => {
                let c = self.c.ok_or_else(|| invalid("timid regime needs scenario.c"))?;
                if !(c > 1.0 && c.is_finite()) {
                    return Err(ScenarioError::BadTimidity(c).into());
                }
                Regime::Timid { c }
            }
        })
    }

    pub fn reality(&self, seed: u64, outcomes: usize) -> Result<Box<dyn Reality>, ConfigError> {
        if self.reality != RealityName::Fixed && self.outcome.is_some() {
            return Err(invalid("scenario.outcome only applies to the fixed Reality"));
        }
        Ok(match self.reality {
            RealityName::SampleI => Box::new(SamplingReality::new(Role::I, seed)),
            RealityName::SampleIi => Box::new(SamplingReality::new(Role::II, seed)),
            RealityName::MaxRatio => Box::new(AdversarialReality::new(Objective::MaxRatio)),
            RealityName::MinRatio => Box::new(AdversarialReality::new(Objective::MinRatio)),
            RealityName::MinPayoff => Box::new(AdversarialReality::new(Objective::MinPayoff)),
            RealityName::Fixed => {
                let w = self.outcome.ok_or_else(|| invalid("fixed Reality needs scenario.outcome"))?;
                if w >= outcomes {
                    return Err(invalid(format!("scenario.outcome {w} is outside 0..{outcomes}")));
                }
                Box::new(AdversarialReality::new(Objective::Fixed(w)))
            }
        })
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        RunConfig::parse(&text)
    }

    /// Replaces the seed with `OPINION_MERGE_SEED` when that is set.
    pub fn apply_env(&mut self) -> Result<(), ConfigError> {
        self.apply_seed_override(std::env::var(SEED_ENV).ok().as_deref())
    }

    pub fn apply_seed_override(&mut self, value: Option<&str>) -> Result<(), ConfigError> {
        if let Some(v) = value {
            self.seed = v.trim().parse().map_err(|_| ConfigError::SeedEnv(v.to_string()))?;
        }
        Ok(())
    }

    /// Order of the cumulative divergence column.
    pub fn reference_alpha(&self) -> f64 {
        self.reference_alpha.or_else(|| self.sceptic_i.alpha()).unwrap_or(0.0)
    }

    /// Checks everything that can be checked before play starts.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.horizon == 0 {
            return Err(invalid("horizon must be at least 1"));
        }
        if self.outcomes < 2 {
            return Err(invalid(format!("outcomes must be at least 2, got {}", self.outcomes)));
        }
        self.scenario.regime()?;
        self.scenario.reality(self.seed, self.outcomes)?;
        self.sceptic_i.build(Role::I, self.horizon, self.seed)?;
        self.sceptic_ii.build(Role::II, self.horizon, self.seed)?;
        check_alpha(self.reference_alpha())?;
        for check in &self.checks {
            match *check {
                CheckSpec::SmallAlpha { alpha } => {
                    check_alpha(alpha)?;
                }
                CheckSpec::BigAlpha { alpha } => {
                    if check_alpha(alpha)?.value() >= -1.0 {
                        return Err(invalid(format!("big_alpha check needs alpha < -1, got {alpha}")));
                    }
                }
                _ => {
                    let (c, _) = check.growth().expect("growth check");
                    if !(c > 1.0 && c.is_finite()) {
                        return Err(invalid(format!("growth check needs c > 1, got {c}")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
horizon = 5
outcomes = 2
seed = 1

[scenario]
regime = "agree"
reality = "sample_i"

[sceptic_i]
strategy = "constant"

[sceptic_ii]
strategy = "constant"
"#;

    #[test]
    fn minimal_config_parses() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.protocol, ProtocolName::Competitive);
        assert!(c.checks.is_empty());
        c.validate().unwrap();
        assert_eq!(c.reference_alpha(), 0.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("seed = 1", "seed = 1\ncolour = \"blue\"");
        assert!(matches!(RunConfig::parse(&text), Err(ConfigError::Parse(_))));
        let text = MINIMAL.replacen("strategy = \"constant\"", "strategy = \"constant\"\nalpha = 0.5", 1);
        assert!(matches!(RunConfig::parse(&text), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn preconditions_are_checked() {
        let text = MINIMAL.replacen("strategy = \"constant\"", "strategy = \"alpha_pair\"\nalpha = 1.0", 1);
        let err = RunConfig::parse(&text).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");

        let text = MINIMAL
            .replace("[sceptic_ii]\nstrategy = \"constant\"", "[sceptic_ii]\nstrategy = \"big_alpha\"\nalpha = -3.0");
        assert!(RunConfig::parse(&text).unwrap().validate().is_err());

        let text = MINIMAL.replace("regime = \"agree\"", "regime = \"timid\"");
        assert!(RunConfig::parse(&text).unwrap().validate().is_err());
    }

    #[test]
    fn seed_override() {
        let mut c = RunConfig::parse(MINIMAL).unwrap();
        c.apply_seed_override(Some("99")).unwrap();
        assert_eq!(c.seed, 99);
        assert!(c.apply_seed_override(Some("-4")).is_err());
        c.apply_seed_override(None).unwrap();
        assert_eq!(c.seed, 99);
    }

    #[test]
    fn nested_mixture() {
        let text = MINIMAL.replacen(
            "[sceptic_i]\nstrategy = \"constant\"",
            "[sceptic_i]\nstrategy = \"mixture\"\nweights = [0.5, 0.5]\ncomponents = [{ strategy = \"constant\" }, { strategy = \"big_alpha\", alpha = -2.0 }]",
            1,
        );
        let c = RunConfig::parse(&text).unwrap();
        c.validate().unwrap();
    }
}
