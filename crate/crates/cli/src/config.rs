//! Experiment configuration: strict JSON schema and per-experiment
//! validation. Unknown fields are rejected so typos fail loudly before any
//! run starts.

use serde::Deserialize;
use thiserror::Error;

use randbelief::causal::{GREEN_CAUSES_RED, RED_CAUSES_GREEN};
use randbelief::envs::chain_default_horizon;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Pennies,
    Causal,
    Chain,
    Seu,
    Coding,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Pennies => "pennies",
            ExperimentKind::Causal => "causal",
            ExperimentKind::Chain => "chain",
            ExperimentKind::Seu => "seu",
            ExperimentKind::Coding => "coding",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Thompson,
    Optimal,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRange {
    pub base: u64,
    pub count: u64,
}

/// Either an explicit seed list or a `(base, count)` pair expanding to
/// `base, base+1, ...`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SeedsSpec {
    List(Vec<u64>),
    Range(SeedRange),
}

impl SeedsSpec {
    /// Expands the spec. An override replaces the base seed: entry `i`
    /// becomes `override + i`, keeping the configured count.
    pub fn expand(&self, override_base: Option<u64>) -> Vec<u64> {
        let count = match self {
            SeedsSpec::List(list) => list.len() as u64,
            SeedsSpec::Range(range) => range.count,
        };
        match (self, override_base) {
            (SeedsSpec::List(list), None) => list.clone(),
            (_, Some(base)) => (0..count).map(|i| base.wrapping_add(i)).collect(),
            (SeedsSpec::Range(range), None) => {
                (0..range.count).map(|i| range.base.wrapping_add(i)).collect()
            }
        }
    }
}

/// Raw on-disk schema. Optional fields belong to specific experiments and
/// are rejected elsewhere during validation.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub experiment: ExperimentKind,
    pub seeds: SeedsSpec,
    #[serde(default)]
    pub rounds: Option<usize>,
    #[serde(default)]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub truth: Option<String>,
    #[serde(default)]
    pub agent: Option<AgentKind>,
    #[serde(default)]
    pub swap: Option<bool>,
    #[serde(default)]
    pub resample_period: Option<usize>,
    #[serde(default)]
    pub stop_at_first_reward: Option<bool>,
}

/// A validated, fully defaulted experiment.
#[derive(Debug, Clone)]
pub enum Experiment {
    Pennies {
        rounds: usize,
    },
    Causal {
        rounds: usize,
        truth: String,
    },
    Chain {
        k: usize,
        horizon: usize,
        agent: AgentKind,
        swap: bool,
        resample_period: usize,
        stop_at_first_reward: bool,
    },
    Seu,
    Coding,
}

#[derive(Debug, Clone)]
pub struct RunPlan {
    pub name: &'static str,
    pub experiment: Experiment,
    pub seeds: Vec<u64>,
}

struct FieldCheck<'a> {
    errors: Vec<String>,
    experiment: &'a str,
}

impl<'a> FieldCheck<'a> {
    fn forbid<T>(&mut self, field: &str, value: &Option<T>) {
        if value.is_some() {
            self.errors
                .push(format!("{field}: not a parameter of the {} experiment", self.experiment));
        }
    }
}

/// Validates the raw config against the named experiment's schema and
/// expands seeds. `seed_override` comes from the command line.
pub fn validate(
    config: &ExperimentConfig,
    seed_override: Option<u64>,
) -> Result<RunPlan, ConfigError> {
    let mut check = FieldCheck {
        errors: Vec::new(),
        experiment: config.experiment.name(),
    };
    if config.version != CONFIG_VERSION {
        check
            .errors
            .push(format!("version: expected {CONFIG_VERSION}, got {}", config.version));
    }
    let seeds = config.seeds.expand(seed_override);
    if seeds.is_empty() {
        check.errors.push("seeds: at least one seed is required".into());
    }

    let rounds_required = |check: &mut FieldCheck| -> usize {
        match config.rounds {
            Some(r) if r >= 1 => r,
            Some(_) => {
                check.errors.push("rounds: must be at least 1".into());
                1
            }
            None => {
                check.errors.push("rounds: required".into());
                1
            }
        }
    };

    let experiment = match config.experiment {
        ExperimentKind::Pennies => {
            let rounds = rounds_required(&mut check);
            check.forbid("horizon", &config.horizon);
            check.forbid("k", &config.k);
            check.forbid("truth", &config.truth);
            check.forbid("agent", &config.agent);
            check.forbid("swap", &config.swap);
            check.forbid("resample_period", &config.resample_period);
            check.forbid("stop_at_first_reward", &config.stop_at_first_reward);
            Experiment::Pennies { rounds }
        }
        ExperimentKind::Causal => {
            let rounds = rounds_required(&mut check);
            let truth = match config.truth.as_deref() {
                Some(t) if t == GREEN_CAUSES_RED || t == RED_CAUSES_GREEN => t.to_string(),
                Some(other) => {
                    check.errors.push(format!(
                        "truth: {other:?} is not one of {GREEN_CAUSES_RED:?}, {RED_CAUSES_GREEN:?}"
                    ));
                    GREEN_CAUSES_RED.to_string()
                }
                None => {
                    check.errors.push("truth: required".into());
                    GREEN_CAUSES_RED.to_string()
                }
            };
            check.forbid("horizon", &config.horizon);
            check.forbid("k", &config.k);
            check.forbid("agent", &config.agent);
            check.forbid("swap", &config.swap);
            check.forbid("resample_period", &config.resample_period);
            check.forbid("stop_at_first_reward", &config.stop_at_first_reward);
            Experiment::Causal { rounds, truth }
        }
        ExperimentKind::Chain => {
            let k = match config.k {
                Some(k) if k >= 1 => k,
                Some(_) => {
                    check.errors.push("k: must be at least 1".into());
                    1
                }
                None => {
                    check.errors.push("k: required".into());
                    1
                }
            };
            let horizon = match config.horizon {
                Some(h) if h >= 1 => h,
                Some(_) => {
                    check.errors.push("horizon: must be at least 1".into());
                    1
                }
                None => chain_default_horizon(k),
            };
            let resample_period = match config.resample_period {
                Some(p) if p >= 1 => p,
                Some(_) => {
                    check.errors.push("resample_period: must be at least 1".into());
                    1
                }
                None => 1,
            };
            check.forbid("rounds", &config.rounds);
            check.forbid("truth", &config.truth);
            Experiment::Chain {
                k,
                horizon,
                agent: config.agent.unwrap_or(AgentKind::Thompson),
                swap: config.swap.unwrap_or(false),
                resample_period,
                stop_at_first_reward: config.stop_at_first_reward.unwrap_or(false),
            }
        }
        ExperimentKind::Seu | ExperimentKind::Coding => {
            check.forbid("rounds", &config.rounds);
            check.forbid("horizon", &config.horizon);
            check.forbid("k", &config.k);
            check.forbid("truth", &config.truth);
            check.forbid("agent", &config.agent);
            check.forbid("swap", &config.swap);
            check.forbid("resample_period", &config.resample_period);
            check.forbid("stop_at_first_reward", &config.stop_at_first_reward);
            match config.experiment {
                ExperimentKind::Seu => Experiment::Seu,
                _ => Experiment::Coding,
            }
        }
    };

    if check.errors.is_empty() {
        Ok(RunPlan {
            name: config.experiment.name(),
            experiment,
            seeds,
        })
    } else {
        Err(ConfigError(check.errors.join("; ")))
    }
}
