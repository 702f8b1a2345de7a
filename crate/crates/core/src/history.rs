//! Interaction histories: alternating action/observation records.

use crate::alphabet::Symbol;

/// One round of interaction. The action comes first; the observation is
/// missing only while the environment's reply is pending.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub action: Symbol,
    /// Whether the action was issued by the acting agent itself, i.e. is a
    /// causal intervention rather than an observed random variable.
    pub intervened: bool,
    pub observation: Option<Symbol>,
}

/// An alternating record `a1 o1 a2 o2 ...`. At most the final step may lack
/// its observation; the empty history is the zero-length record.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct History {
    steps: Vec<Step>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a complete history from `(action, observation)` pairs, with
    /// all actions marked as interventions.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        let mut h = Self::new();
        for &(a, o) in pairs {
            h.push_action(Symbol(a), true);
            h.push_observation(Symbol(o));
        }
        h
    }

    /// Number of rounds, complete or not.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of completed rounds.
    pub fn rounds(&self) -> usize {
        if self.has_dangling_action() {
            self.steps.len() - 1
        } else {
            self.steps.len()
        }
    }

    pub fn is_complete(&self) -> bool {
        !self.has_dangling_action()
    }

    pub fn has_dangling_action(&self) -> bool {
        self.steps.last().is_some_and(|s| s.observation.is_none())
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn push_action(&mut self, action: Symbol, intervened: bool) {
        assert!(
            !self.has_dangling_action(),
            "pushed an action while the previous observation is pending"
        );
        self.steps.push(Step {
            action,
            intervened,
            observation: None,
        });
    }

    pub fn push_observation(&mut self, observation: Symbol) {
        let last = self
            .steps
            .last_mut()
            .expect("pushed an observation onto an empty history");
        assert!(
            last.observation.is_none(),
            "pushed an observation while no action is pending"
        );
        last.observation = Some(observation);
    }

    /// Removes a dangling action. Used by enumeration code that walks the
    /// history tree with push/pop pairs.
    pub fn pop_action(&mut self) -> Symbol {
        assert!(self.has_dangling_action(), "no pending action to pop");
        self.steps.pop().expect("nonempty").action
    }

    /// Removes the final observation, leaving its action dangling.
    pub fn pop_observation(&mut self) -> Symbol {
        let last = self.steps.last_mut().expect("nonempty history");
        last.observation.take().expect("final step has an observation")
    }

    /// Table key for the decision point of round `t` (0-based): the
    /// interleaved symbols of the first `t` complete steps.
    pub fn decision_key(&self, t: usize) -> Vec<usize> {
        let mut key = Vec::with_capacity(2 * t);
        for step in &self.steps[..t] {
            key.push(step.action.0);
            key.push(step.observation.expect("incomplete step in prefix").0);
        }
        key
    }

    /// Table key for the prediction point of round `t`: the decision key
    /// plus the action of round `t`.
    pub fn prediction_key(&self, t: usize) -> Vec<usize> {
        let mut key = self.decision_key(t);
        key.push(self.steps[t].action.0);
        key
    }

    /// Key covering every completed round; used to index utility tables.
    pub fn complete_key(&self) -> Vec<usize> {
        self.decision_key(self.rounds())
    }

    /// Decision key at the current frontier (all completed rounds).
    pub fn current_decision_key(&self) -> Vec<usize> {
        self.decision_key(self.rounds())
    }

    /// Prediction key at the current frontier; requires a dangling action.
    pub fn current_prediction_key(&self) -> Vec<usize> {
        assert!(self.has_dangling_action(), "no pending action");
        self.prediction_key(self.steps.len() - 1)
    }
}
