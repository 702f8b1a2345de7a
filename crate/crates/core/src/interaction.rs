//! Coupling of an agent and an environment into an interaction system.

use thiserror::Error;

use crate::alphabet::Symbol;
use crate::history::History;
use crate::rng::RandomSource;
use crate::table::ConditionalTable;

/// Tolerance applied to distributions emitted by live agents/environments.
pub const PROTOCOL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum InteractionError {
    #[error("no table row covers the history prefix {key:?}")]
    UncoveredHistory { key: Vec<usize> },
    #[error("history has a pending action; interaction strings must be complete")]
    IncompleteHistory,
    #[error("{side} emitted an invalid distribution in round {round}: {reason}")]
    ProtocolViolation {
        side: &'static str,
        round: usize,
        reason: String,
    },
}

/// The agent side of an interaction system: a conditional distribution over
/// the next action given the interaction history so far.
pub trait Policy {
    fn action_distribution(&mut self, history: &History) -> Result<Vec<f64>, InteractionError>;

    /// Hook invoked after each environment reply; stateful agents update
    /// here, stateless ones read the full history on the next call.
    fn observe(&mut self, _observation: Symbol) {}
}

/// The environment side: a conditional distribution over the next
/// observation given the history including the pending action.
pub trait Environment {
    fn observation_distribution(
        &mut self,
        history: &History,
    ) -> Result<Vec<f64>, InteractionError>;

    fn act(&mut self, _action: Symbol) {}
}

/// Tabular policy backed by a [`ConditionalTable`] over decision contexts.
#[derive(Debug, Clone)]
pub struct TabularPolicy {
    pub table: ConditionalTable,
}

impl Policy for TabularPolicy {
    fn action_distribution(&mut self, history: &History) -> Result<Vec<f64>, InteractionError> {
        let key = history.current_decision_key();
        self.table
            .row(&key)
            .map(<[f64]>::to_vec)
            .ok_or(InteractionError::UncoveredHistory { key })
    }
}

/// Probability of a complete interaction string under a policy/environment
/// table pair: the product over rounds of the action conditional times the
/// observation conditional.
pub fn interaction_probability(
    agent_policy: &ConditionalTable,
    env_law: &ConditionalTable,
    history: &History,
) -> Result<f64, InteractionError> {
    if !history.is_complete() {
        return Err(InteractionError::IncompleteHistory);
    }
    let mut prob = 1.0;
    for (t, step) in history.steps().iter().enumerate() {
        let decision = history.decision_key(t);
        let policy_row = agent_policy
            .row(&decision)
            .ok_or(InteractionError::UncoveredHistory { key: decision })?;
        prob *= policy_row[step.action.0];
        let prediction = history.prediction_key(t);
        let env_row = env_law
            .row(&prediction)
            .ok_or(InteractionError::UncoveredHistory { key: prediction })?;
        prob *= env_row[step.observation.expect("complete history").0];
    }
    Ok(prob)
}

fn validate_emitted(
    probs: &[f64],
    side: &'static str,
    round: usize,
) -> Result<(), InteractionError> {
    if probs.is_empty() {
        return Err(InteractionError::ProtocolViolation {
            side,
            round,
            reason: "empty distribution".into(),
        });
    }
    if let Some(&bad) = probs.iter().find(|&&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(InteractionError::ProtocolViolation {
            side,
            round,
            reason: format!("negative or non-finite mass {bad}"),
        });
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROTOCOL_TOLERANCE {
        return Err(InteractionError::ProtocolViolation {
            side,
            round,
            reason: format!("mass sums to {sum}"),
        });
    }
    Ok(())
}

/// Runs the alternating interaction loop for `rounds` rounds and returns the
/// complete history. Both sides see the full prefix before each draw; every
/// emitted distribution is validated before sampling.
pub fn run_interaction(
    agent: &mut dyn Policy,
    env: &mut dyn Environment,
    rounds: usize,
    rng: &mut RandomSource,
) -> Result<History, InteractionError> {
    assert!(rounds >= 1, "interaction needs at least one round");
    let mut history = History::new();
    for round in 1..=rounds {
        let action_probs = agent.action_distribution(&history)?;
        validate_emitted(&action_probs, "agent", round)?;
        let action = Symbol(rng.sample_index(&action_probs));
        history.push_action(action, true);
        env.act(action);

        let obs_probs = env.observation_distribution(&history)?;
        validate_emitted(&obs_probs, "environment", round)?;
        let observation = Symbol(rng.sample_index(&obs_probs));
        history.push_observation(observation);
        agent.observe(observation);
    }
    Ok(history)
}
