//! Bayesian mixture agents that act by sampling a random belief.
//!
//! The agent carries a set of hypotheses, each pairing a predictor for the
//! environment with the policy that is optimal if that hypothesis is true.
//! Its posterior treats the agent's own past actions as causal
//! interventions: action likelihood factors are dropped, so beliefs are
//! updated only through observations. Acting is posterior sampling: draw a
//! hypothesis from the current belief, then draw an action from that
//! hypothesis's policy.

use std::sync::Arc;

use thiserror::Error;

use crate::alphabet::Symbol;
use crate::history::History;
use crate::rng::RandomSource;
use crate::table::ConditionalTable;

/// Tolerance for belief-vector normalization.
pub const BELIEF_TOLERANCE: f64 = 1e-12;

/// Replay validation is quadratic in the history length, so debug builds
/// only check short histories.
const REPLAY_CHECK_LIMIT: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum BayesError {
    /// Every hypothesis assigns zero likelihood to the history. The agent
    /// assumes the truth is in its hypothesis set, so this is surfaced as a
    /// modeling bug instead of silently renormalizing.
    #[error("all hypotheses assign zero likelihood to the history")]
    ImpossibleObservation,
    #[error("total fitness on the population support is zero")]
    DegenerateFitness,
    #[error("invalid belief weights: {reason}")]
    InvalidBelief { reason: String },
}

/// A conditional I/O law: action distributions at complete histories and
/// observation distributions at histories with a pending action.
///
/// Laws must emit valid distributions for every reachable history.
pub trait Behavior: Send + Sync {
    fn action_distribution(&self, history: &History) -> Vec<f64>;
    fn observation_distribution(&self, history: &History) -> Vec<f64>;
}

/// A behavior backed by two lookup tables.
#[derive(Debug, Clone)]
pub struct TabularBehavior {
    pub policy: ConditionalTable,
    pub predictor: ConditionalTable,
}

impl Behavior for TabularBehavior {
    fn action_distribution(&self, history: &History) -> Vec<f64> {
        let key = history.current_decision_key();
        self.policy
            .row(&key)
            .unwrap_or_else(|| panic!("policy does not cover context {key:?}"))
            .to_vec()
    }

    fn observation_distribution(&self, history: &History) -> Vec<f64> {
        let key = history.current_prediction_key();
        self.predictor
            .row(&key)
            .unwrap_or_else(|| panic!("predictor does not cover context {key:?}"))
            .to_vec()
    }
}

/// One hypothesis: a label paired with its predictor and policy.
#[derive(Clone)]
pub struct Hypothesis {
    id: String,
    law: Arc<dyn Behavior>,
}

impl Hypothesis {
    pub fn new(id: impl Into<String>, law: Arc<dyn Behavior>) -> Self {
        Self { id: id.into(), law }
    }

    pub fn tabular(
        id: impl Into<String>,
        policy: ConditionalTable,
        predictor: ConditionalTable,
    ) -> Self {
        Self::new(id, Arc::new(TabularBehavior { policy, predictor }))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn action_distribution(&self, history: &History) -> Vec<f64> {
        self.law.action_distribution(history)
    }

    pub fn observation_distribution(&self, history: &History) -> Vec<f64> {
        self.law.observation_distribution(history)
    }
}

impl std::fmt::Debug for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Hypothesis").field("id", &self.id).finish()
    }
}

/// Probability vector over hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    weights: Vec<f64>,
}

impl BeliefState {
    pub fn new(weights: Vec<f64>) -> Result<Self, BayesError> {
        if weights.is_empty() {
            return Err(BayesError::InvalidBelief {
                reason: "empty weight vector".into(),
            });
        }
        if let Some(&bad) = weights.iter().find(|&&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(BayesError::InvalidBelief {
                reason: format!("weight {bad} is negative or not finite"),
            });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > BELIEF_TOLERANCE {
            return Err(BayesError::InvalidBelief {
                reason: format!("weights sum to {sum}"),
            });
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass on hypothesis `index`.
    pub fn delta(n: usize, index: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[index] = 1.0;
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Normalizes log-space weights into a belief. Hypotheses at `-inf` keep
/// exactly zero mass; if every hypothesis is at `-inf` the history was
/// impossible under the whole mixture.
fn normalize_log_weights(log_weights: &[f64]) -> Result<BeliefState, BayesError> {
    let max = log_weights
        .iter()
        .copied()
        .filter(|w| w.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(BayesError::ImpossibleObservation);
    }
    let mut weights: Vec<f64> = log_weights.iter().map(|&w| (w - max).exp()).collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    Ok(BeliefState { weights })
}

/// Accumulates log-likelihoods over the complete rounds of `history`,
/// replaying the prefix step by step so tabular and simulator-backed laws
/// see exactly the contexts they saw online.
fn log_weights_over(
    prior: &BeliefState,
    hypotheses: &[Hypothesis],
    history: &History,
    include_action_terms: bool,
) -> Vec<f64> {
    assert_eq!(prior.len(), hypotheses.len(), "prior/hypothesis mismatch");
    let mut log_weights: Vec<f64> = prior.weights().iter().map(|&w| w.ln()).collect();
    let mut prefix = History::new();
    for step in &history.steps()[..history.rounds()] {
        if include_action_terms {
            for (lw, hyp) in log_weights.iter_mut().zip(hypotheses) {
                *lw += hyp.action_distribution(&prefix)[step.action.0].ln();
            }
        }
        prefix.push_action(step.action, step.intervened);
        let observation = step.observation.expect("complete round");
        for (lw, hyp) in log_weights.iter_mut().zip(hypotheses) {
            *lw += hyp.observation_distribution(&prefix)[observation.0].ln();
        }
        prefix.push_observation(observation);
    }
    log_weights
}

/// Posterior over hypotheses given a history of self-issued (intervened)
/// actions: weights proportional to the prior times the observation
/// likelihoods only. Action factors are dropped because the agent's own
/// choices carry no evidence about the environment.
pub fn intervened_posterior(
    prior: &BeliefState,
    hypotheses: &[Hypothesis],
    history: &History,
) -> Result<BeliefState, BayesError> {
    assert!(history.is_complete(), "history has a pending action");
    normalize_log_weights(&log_weights_over(prior, hypotheses, history, false))
}

/// Plain Bayesian conditioning on the full history: weights proportional to
/// the prior times both action and observation likelihoods. This is the
/// non-causal update the intervened posterior deliberately avoids; the two
/// coincide exactly when all hypotheses issue actions through one shared
/// deterministic policy.
pub fn conditioned_posterior(
    prior: &BeliefState,
    hypotheses: &[Hypothesis],
    history: &History,
) -> Result<BeliefState, BayesError> {
    assert!(history.is_complete(), "history has a pending action");
    normalize_log_weights(&log_weights_over(prior, hypotheses, history, true))
}

/// One step of discrete replicator dynamics: each component is reweighted
/// by its fitness share. With likelihoods as fitness this is exactly one
/// Bayesian update.
pub fn replicator_step(population: &[f64], fitness: &[f64]) -> Result<Vec<f64>, BayesError> {
    assert_eq!(population.len(), fitness.len(), "length mismatch");
    assert!(
        fitness.iter().all(|&f| f >= 0.0),
        "fitness must be nonnegative"
    );
    let products: Vec<f64> = population
        .iter()
        .zip(fitness)
        .map(|(&x, &f)| x * f)
        .collect();
    let total: f64 = products.iter().sum();
    if total <= 0.0 {
        return Err(BayesError::DegenerateFitness);
    }
    Ok(products.into_iter().map(|p| p / total).collect())
}

/// The adaptive agent: hypotheses, a belief kept in log space, the running
/// history and the hypothesis sampled for the current round.
#[derive(Debug, Clone)]
pub struct MixtureAgent {
    hypotheses: Vec<Hypothesis>,
    prior: BeliefState,
    log_weights: Vec<f64>,
    history: History,
    pending_sample: Option<usize>,
    resample_period: usize,
    held_sample: Option<(usize, usize)>,
}

impl MixtureAgent {
    pub fn new(hypotheses: Vec<Hypothesis>, prior: BeliefState) -> Self {
        assert_eq!(prior.len(), hypotheses.len(), "prior/hypothesis mismatch");
        let log_weights = prior.weights().iter().map(|&w| w.ln()).collect();
        Self {
            hypotheses,
            prior,
            log_weights,
            history: History::new(),
            pending_sample: None,
            resample_period: 1,
            held_sample: None,
        }
    }

    /// Keeps each sampled hypothesis for `period` consecutive rounds instead
    /// of redrawing every round. The default period of 1 redraws per step.
    pub fn with_resample_period(mut self, period: usize) -> Self {
        assert!(period >= 1, "resample period must be positive");
        self.resample_period = period;
        self
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    /// Hypothesis sampled in the current round, if an action is pending.
    pub fn pending_sample(&self) -> Option<usize> {
        self.pending_sample
    }

    /// Current posterior over hypotheses.
    pub fn belief(&self) -> BeliefState {
        normalize_log_weights(&self.log_weights).expect("agent belief is always normalizable")
    }

    /// Samples a hypothesis from the belief, then an action from its policy.
    /// The action is recorded in the history as an intervention. Returns the
    /// action and the index of the sampled hypothesis.
    pub fn thompson_step(&mut self, rng: &mut RandomSource) -> (Symbol, usize) {
        assert!(
            self.history.is_complete(),
            "cannot act while an observation is pending"
        );
        let index = match self.held_sample {
            Some((held, remaining)) if remaining > 0 => {
                self.held_sample = Some((held, remaining - 1));
                held
            }
            _ => {
                let drawn = rng.sample_index(self.belief().weights());
                self.held_sample = Some((drawn, self.resample_period - 1));
                drawn
            }
        };
        let probs = self.hypotheses[index].action_distribution(&self.history);
        let action = Symbol(rng.sample_index(&probs));
        self.history.push_action(action, true);
        self.pending_sample = Some(index);
        (action, index)
    }

    /// Records an environment reply and performs one intervened-posterior
    /// update. The pending hypothesis sample is cleared.
    pub fn observe(&mut self, observation: Symbol) -> Result<(), BayesError> {
        assert!(
            self.history.has_dangling_action(),
            "no action is awaiting an observation"
        );
        let updated: Vec<f64> = self
            .log_weights
            .iter()
            .zip(&self.hypotheses)
            .map(|(&lw, hyp)| {
                lw + hyp.observation_distribution(&self.history)[observation.0].ln()
            })
            .collect();
        if updated.iter().all(|w| !w.is_finite()) {
            return Err(BayesError::ImpossibleObservation);
        }
        self.log_weights = updated;
        self.history.push_observation(observation);
        self.pending_sample = None;
        #[cfg(debug_assertions)]
        if self.history.rounds() <= REPLAY_CHECK_LIMIT {
            debug_assert!(
                self.replay_matches(),
                "incremental belief diverged from the replayed posterior"
            );
        }
        Ok(())
    }

    /// Marginal action distribution: the belief-weighted mixture of the
    /// hypothesis policies. Sampling it is equivalent to one Thompson step.
    pub fn predictive_action(&self) -> Vec<f64> {
        assert!(self.history.is_complete(), "an observation is pending");
        self.mixture(|hyp| hyp.action_distribution(&self.history))
    }

    /// Marginal observation distribution given the pending action.
    pub fn predictive_observation(&self) -> Vec<f64> {
        assert!(self.history.has_dangling_action(), "no pending action");
        self.mixture(|hyp| hyp.observation_distribution(&self.history))
    }

    fn mixture(&self, row: impl Fn(&Hypothesis) -> Vec<f64>) -> Vec<f64> {
        let belief = self.belief();
        let mut out: Option<Vec<f64>> = None;
        for (&w, hyp) in belief.weights().iter().zip(&self.hypotheses) {
            let probs = row(hyp);
            let acc = out.get_or_insert_with(|| vec![0.0; probs.len()]);
            assert_eq!(acc.len(), probs.len(), "hypotheses disagree on alphabet");
            for (a, p) in acc.iter_mut().zip(probs) {
                *a += w * p;
            }
        }
        out.expect("mixture has at least one hypothesis")
    }

    /// Checks that the incremental belief equals a from-scratch replay of
    /// intervened-posterior updates over the recorded history.
    pub fn replay_matches(&self) -> bool {
        let replayed = log_weights_over(&self.prior, &self.hypotheses, &self.history, false);
        replayed
            .iter()
            .zip(&self.log_weights)
            .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// The mixture agent's input/output law as a pure function of history:
/// the belief is recomputed by replaying intervened-posterior updates on
/// whatever prefix is passed in.
#[derive(Debug, Clone)]
pub struct MixtureBehavior {
    pub hypotheses: Vec<Hypothesis>,
    pub prior: BeliefState,
}

impl MixtureBehavior {
    fn belief_at(&self, history: &History) -> BeliefState {
        normalize_log_weights(&log_weights_over(
            &self.prior,
            &self.hypotheses,
            history,
            false,
        ))
        .expect("history must be possible under the mixture")
    }
}

impl Behavior for MixtureBehavior {
    fn action_distribution(&self, history: &History) -> Vec<f64> {
        let belief = self.belief_at(history);
        mix(belief.weights(), &self.hypotheses, |h| {
            h.action_distribution(history)
        })
    }

    fn observation_distribution(&self, history: &History) -> Vec<f64> {
        let belief = self.belief_at(history);
        mix(belief.weights(), &self.hypotheses, |h| {
            h.observation_distribution(history)
        })
    }
}

fn mix(weights: &[f64], hypotheses: &[Hypothesis], row: impl Fn(&Hypothesis) -> Vec<f64>) -> Vec<f64> {
    let mut out: Option<Vec<f64>> = None;
    for (&w, hyp) in weights.iter().zip(hypotheses) {
        let probs = row(hyp);
        let acc = out.get_or_insert_with(|| vec![0.0; probs.len()]);
        for (a, p) in acc.iter_mut().zip(probs) {
            *a += w * p;
        }
    }
    out.expect("nonempty mixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// History-independent law with fixed action and observation rows.
    struct StationaryLaw {
        action: Vec<f64>,
        observation: Vec<f64>,
    }

    impl Behavior for StationaryLaw {
        fn action_distribution(&self, _h: &History) -> Vec<f64> {
            self.action.clone()
        }
        fn observation_distribution(&self, _h: &History) -> Vec<f64> {
            self.observation.clone()
        }
    }

    fn stationary(id: &str, action: Vec<f64>, observation: Vec<f64>) -> Hypothesis {
        Hypothesis::new(id, Arc::new(StationaryLaw { action, observation }))
    }

    /// Hypotheses over one round: uniform policy over two actions, and
    /// per-action observation rows.
    fn one_round_hypothesis(id: &str, rows: &[(usize, Vec<f64>)], n_obs: usize) -> Hypothesis {
        let mut policy = ConditionalTable::new(2);
        policy.insert(vec![], vec![0.5, 0.5]).unwrap();
        let mut predictor = ConditionalTable::new(n_obs);
        for (action, row) in rows {
            predictor.insert(vec![*action], row.clone()).unwrap();
        }
        Hypothesis::tabular(id, policy, predictor)
    }

    /// The two-bulb device flattened to one round. Actions: 0 = watch,
    /// 1 = clamp the green light on. Observations index the four joint
    /// states (x,y), (x,!y), (!x,y), (!x,!y).
    fn bulb_hypotheses() -> Vec<Hypothesis> {
        let passive = vec![0.375, 0.125, 0.125, 0.375];
        let green_causes_red = one_round_hypothesis(
            "green-causes-red",
            &[(0, passive.clone()), (1, vec![0.75, 0.25, 0.0, 0.0])],
            4,
        );
        let red_causes_green = one_round_hypothesis(
            "red-causes-green",
            &[(0, passive), (1, vec![0.5, 0.5, 0.0, 0.0])],
            4,
        );
        vec![green_causes_red, red_causes_green]
    }

    fn assert_close(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "got {got:?}, want {want:?}");
        }
    }

    #[test]
    fn identical_predictors_leave_the_prior_untouched() {
        let rows = vec![(0, vec![0.3, 0.7]), (1, vec![0.9, 0.1])];
        let hyps = vec![
            one_round_hypothesis("a", &rows, 2),
            one_round_hypothesis("b", &rows, 2),
        ];
        let prior = BeliefState::new(vec![0.25, 0.75]).unwrap();
        let h = History::from_pairs(&[(1, 0)]);
        let post = intervened_posterior(&prior, &hyps, &h).unwrap();
        assert_close(post.weights(), prior.weights(), 1e-12);
    }

    #[test]
    fn watching_the_device_is_uninformative() {
        let prior = BeliefState::uniform(2);
        let h = History::from_pairs(&[(0, 0)]); // watch, see both lights on
        let post = intervened_posterior(&prior, &bulb_hypotheses(), &h).unwrap();
        assert_close(post.weights(), &[0.5, 0.5], 1e-12);
    }

    #[test]
    fn clamping_the_green_light_is_informative() {
        let prior = BeliefState::uniform(2);
        let h = History::from_pairs(&[(1, 0)]); // clamp green on, see red on
        let post = intervened_posterior(&prior, &bulb_hypotheses(), &h).unwrap();
        assert_close(post.weights(), &[0.6, 0.4], 1e-12);
    }

    #[test]
    fn impossible_history_is_surfaced() {
        let hyps = bulb_hypotheses();
        let prior = BeliefState::uniform(2);
        // after clamping green on, the green light cannot be off
        let h = History::from_pairs(&[(1, 2)]);
        assert_eq!(
            intervened_posterior(&prior, &hyps, &h).unwrap_err(),
            BayesError::ImpossibleObservation
        );
    }

    /// Two hypotheses sharing one deterministic history-dependent policy:
    /// play the last observation, starting with action 0.
    fn shared_policy_hypotheses(pred_a: [f64; 2], pred_b: [f64; 2]) -> Vec<Hypothesis> {
        let mut policy = ConditionalTable::new(2);
        policy.insert(vec![], vec![1.0, 0.0]).unwrap();
        for a in 0..2 {
            for o in 0..2 {
                let mut row = vec![0.0, 0.0];
                row[o] = 1.0;
                policy.insert(vec![a, o], row).unwrap();
            }
        }
        let build = |id: &str, p: [f64; 2]| {
            let mut predictor = ConditionalTable::new(2);
            for ctx in [vec![0], vec![1]] {
                predictor.insert(ctx, p.to_vec()).unwrap();
            }
            for a0 in 0..2 {
                for o0 in 0..2 {
                    for a1 in 0..2 {
                        predictor.insert(vec![a0, o0, a1], p.to_vec()).unwrap();
                    }
                }
            }
            Hypothesis::tabular(id, policy.clone(), predictor)
        };
        vec![build("a", pred_a), build("b", pred_b)]
    }

    #[test]
    fn shared_deterministic_policy_makes_conditioning_equal_intervening() {
        let hyps = shared_policy_hypotheses([0.8, 0.2], [0.4, 0.6]);
        let prior = BeliefState::new(vec![0.3, 0.7]).unwrap();
        // history consistent with the shared policy: a1=0, then a2 = o1
        for o1 in 0..2 {
            for o2 in 0..2 {
                let h = History::from_pairs(&[(0, o1), (o1, o2)]);
                let a = intervened_posterior(&prior, &hyps, &h).unwrap();
                let b = conditioned_posterior(&prior, &hyps, &h).unwrap();
                assert_eq!(a.weights(), b.weights());
            }
        }
    }

    #[test]
    fn conditioning_uses_action_likelihoods() {
        // theta1 plays action 0 w.p. 0.9, theta2 w.p. 0.1; the observation
        // row is shared so only the action factor moves the posterior
        let build = |id: &str, p0: f64| {
            let mut policy = ConditionalTable::new(2);
            policy.insert(vec![], vec![p0, 1.0 - p0]).unwrap();
            let mut predictor = ConditionalTable::new(2);
            predictor.insert(vec![0], vec![0.5, 0.5]).unwrap();
            predictor.insert(vec![1], vec![0.5, 0.5]).unwrap();
            Hypothesis::tabular(id, policy, predictor)
        };
        let hyps = vec![build("t1", 0.9), build("t2", 0.1)];
        let prior = BeliefState::uniform(2);
        let h = History::from_pairs(&[(0, 1)]);
        let post = conditioned_posterior(&prior, &hyps, &h).unwrap();
        assert_close(post.weights(), &[0.9, 0.1], 1e-12);
        let causal = intervened_posterior(&prior, &hyps, &h).unwrap();
        assert_close(causal.weights(), &[0.5, 0.5], 1e-12);
    }

    #[test]
    fn empty_history_returns_the_prior() {
        let hyps = bulb_hypotheses();
        let prior = BeliefState::new(vec![0.2, 0.8]).unwrap();
        let post = conditioned_posterior(&prior, &hyps, &History::new()).unwrap();
        assert_close(post.weights(), prior.weights(), 1e-12);
    }

    #[test]
    fn degenerate_belief_reproduces_the_sampled_policy() {
        let hyps = vec![
            one_round_hypothesis("a", &[(0, vec![1.0, 0.0]), (1, vec![1.0, 0.0])], 2),
            one_round_hypothesis("b", &[(0, vec![0.0, 1.0]), (1, vec![0.0, 1.0])], 2),
        ];
        let agent = MixtureAgent::new(hyps, BeliefState::delta(2, 1));
        assert_close(&agent.predictive_action(), &[0.5, 0.5], 0.0);
        let mut rng = RandomSource::new(5);
        let mut counts = [0usize; 2];
        for _ in 0..2000 {
            let mut a = agent.clone();
            let (action, sampled) = a.thompson_step(&mut rng);
            assert_eq!(sampled, 1);
            counts[action.0] += 1;
        }
        // uniform policy of hypothesis b
        assert!((counts[0] as f64 / 2000.0 - 0.5).abs() < 0.05);
    }

    /// Deterministic one-round policies playing fixed opposite actions.
    fn opposite_action_hypotheses() -> Vec<Hypothesis> {
        let build = |id: &str, action: usize| {
            let mut policy = ConditionalTable::new(2);
            let mut row = vec![0.0, 0.0];
            row[action] = 1.0;
            policy.insert(vec![], row).unwrap();
            let mut predictor = ConditionalTable::new(2);
            predictor.insert(vec![0], vec![0.5, 0.5]).unwrap();
            predictor.insert(vec![1], vec![0.5, 0.5]).unwrap();
            Hypothesis::tabular(id, policy, predictor)
        };
        vec![build("plays-0", 0), build("plays-1", 1)]
    }

    #[test]
    fn thompson_marginal_matches_the_mixture_weights() {
        let prior = BeliefState::new(vec![0.6, 0.4]).unwrap();
        let agent = MixtureAgent::new(opposite_action_hypotheses(), prior);
        assert_close(&agent.predictive_action(), &[0.6, 0.4], 1e-12);
        let n = 100_000;
        let mut zeros = 0usize;
        for seed in 0..n {
            let mut a = agent.clone();
            let mut rng = RandomSource::new(seed as u64);
            let (action, _) = a.thompson_step(&mut rng);
            if action.0 == 0 {
                zeros += 1;
            }
        }
        let freq = zeros as f64 / n as f64;
        assert!((freq - 0.6).abs() < 0.01, "freq={freq}");
    }

    #[test]
    fn observation_with_unit_likelihood_leaves_belief_unchanged() {
        let hyps = vec![
            one_round_hypothesis("a", &[(0, vec![1.0, 0.0]), (1, vec![1.0, 0.0])], 2),
            one_round_hypothesis("b", &[(0, vec![1.0, 0.0]), (1, vec![1.0, 0.0])], 2),
        ];
        let mut agent = MixtureAgent::new(hyps, BeliefState::new(vec![0.3, 0.7]).unwrap());
        let before = agent.belief();
        let mut rng = RandomSource::new(0);
        agent.thompson_step(&mut rng);
        agent.observe(Symbol(0)).unwrap();
        assert_eq!(agent.belief().weights(), before.weights());
    }

    #[test]
    fn single_observation_update_matches_the_paper_arithmetic() {
        // likelihoods (3/4, 1/2) under a uniform prior give (3/5, 2/5)
        let hyps = vec![
            one_round_hypothesis("a", &[(0, vec![0.75, 0.25]), (1, vec![0.75, 0.25])], 2),
            one_round_hypothesis("b", &[(0, vec![0.5, 0.5]), (1, vec![0.5, 0.5])], 2),
        ];
        let mut agent = MixtureAgent::new(hyps, BeliefState::uniform(2));
        let mut rng = RandomSource::new(1);
        agent.thompson_step(&mut rng);
        agent.observe(Symbol(0)).unwrap();
        assert_close(agent.belief().weights(), &[0.6, 0.4], 1e-12);
        assert_eq!(agent.pending_sample(), None);
    }

    #[test]
    fn sequential_updates_equal_the_batch_posterior_exactly() {
        let hyps = vec![
            stationary("a", vec![0.5, 0.5], vec![0.75, 0.25]),
            stationary("b", vec![0.5, 0.5], vec![0.4, 0.6]),
        ];
        let prior = BeliefState::new(vec![0.35, 0.65]).unwrap();
        let mut agent = MixtureAgent::new(hyps.clone(), prior.clone());
        let mut rng = RandomSource::new(11);
        for _ in 0..20 {
            agent.thompson_step(&mut rng);
            let obs = Symbol(rng.sample_index(&[0.7, 0.3]));
            agent.observe(obs).unwrap();
        }
        let batch = intervened_posterior(&prior, &hyps, agent.history()).unwrap();
        assert_eq!(agent.belief().weights(), batch.weights());
        assert!(agent.replay_matches());
    }

    #[test]
    fn predictive_observation_mixes_the_predictor_rows() {
        let hyps = vec![
            one_round_hypothesis("a", &[(0, vec![0.25, 0.75]), (1, vec![0.25, 0.75])], 2),
            one_round_hypothesis("b", &[(0, vec![0.75, 0.25]), (1, vec![0.75, 0.25])], 2),
        ];
        let mut agent = MixtureAgent::new(hyps, BeliefState::uniform(2));
        let mut rng = RandomSource::new(2);
        agent.thompson_step(&mut rng);
        assert_close(&agent.predictive_observation(), &[0.5, 0.5], 1e-12);
        // Monte Carlo consistency of the observation marginal
        let n = 100_000;
        let mut zeros = 0usize;
        for seed in 0..n {
            let mut rng = RandomSource::new(seed as u64);
            if rng.sample_index(&agent.predictive_observation()) == 0 {
                zeros += 1;
            }
        }
        assert!((zeros as f64 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn resample_period_holds_the_sampled_hypothesis() {
        let hyps = vec![
            stationary("plays-0", vec![1.0, 0.0], vec![0.5, 0.5]),
            stationary("plays-1", vec![0.0, 1.0], vec![0.5, 0.5]),
        ];
        let mut agent =
            MixtureAgent::new(hyps, BeliefState::uniform(2)).with_resample_period(3);
        let mut rng = RandomSource::new(9);
        let mut samples = Vec::new();
        for _ in 0..9 {
            let (_, idx) = agent.thompson_step(&mut rng);
            samples.push(idx);
            agent.observe(Symbol(0)).unwrap();
        }
        for chunk in samples.chunks(3) {
            assert!(chunk.iter().all(|&i| i == chunk[0]), "samples={samples:?}");
        }
    }

    #[test]
    fn replicator_fixed_points() {
        let pop = vec![0.2, 0.5, 0.3];
        let next = replicator_step(&pop, &[2.0, 2.0, 2.0]).unwrap();
        for (a, b) in next.iter().zip(&pop) {
            assert!((a - b).abs() < 1e-12);
        }
        let vertex = replicator_step(&[1.0, 0.0], &[0.3, 5.0]).unwrap();
        assert_eq!(vertex, vec![1.0, 0.0]);
    }

    #[test]
    fn replicator_with_likelihood_fitness_is_a_bayes_update() {
        let mut rng = RandomSource::new(77);
        for _ in 0..200 {
            let raw: Vec<f64> = (0..3).map(|_| rng.next_unit() + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            let pop: Vec<f64> = raw.iter().map(|r| r / total).collect();
            let fitness: Vec<f64> = (0..3).map(|_| 0.05 + 0.95 * rng.next_unit()).collect();

            let replicated = replicator_step(&pop, &fitness).unwrap();
            let hyps: Vec<Hypothesis> = fitness
                .iter()
                .enumerate()
                .map(|(i, &f)| stationary(&format!("h{i}"), vec![1.0], vec![f, 1.0 - f]))
                .collect();
            let prior = BeliefState::new(pop.clone()).unwrap();
            let h = History::from_pairs(&[(0, 0)]);
            let bayes = intervened_posterior(&prior, &hyps, &h).unwrap();
            for (r, b) in replicated.iter().zip(bayes.weights()) {
                assert!((r - b).abs() <= 1e-14 * b.max(1e-300), "r={r} b={b}");
            }
        }
    }

    #[test]
    fn degenerate_fitness_is_an_error() {
        let err = replicator_step(&[0.5, 0.5, 0.0], &[0.0, 0.0, 9.0]).unwrap_err();
        assert_eq!(err, BayesError::DegenerateFitness);
    }

    #[test]
    fn zero_weights_never_regain_mass() {
        let hyps = vec![
            stationary("dead", vec![0.5, 0.5], vec![0.9, 0.1]),
            stationary("live", vec![0.5, 0.5], vec![0.2, 0.8]),
        ];
        let prior = BeliefState::new(vec![0.0, 1.0]).unwrap();
        let mut agent = MixtureAgent::new(hyps, prior);
        let mut rng = RandomSource::new(3);
        for _ in 0..10 {
            agent.thompson_step(&mut rng);
            agent.observe(Symbol(0)).unwrap();
            assert_eq!(agent.belief().weights()[0], 0.0);
        }
    }

    proptest! {
        #[test]
        fn posteriors_stay_normalized(
            raw in proptest::collection::vec(1e-6f64..1.0, 2..6),
            liks in proptest::collection::vec(1e-6f64..=1.0, 2..6),
        ) {
            let n = raw.len().min(liks.len());
            let total: f64 = raw[..n].iter().sum();
            let weights: Vec<f64> = raw[..n].iter().map(|r| r / total).collect();
            let log_weights: Vec<f64> = weights
                .iter()
                .zip(&liks[..n])
                .map(|(w, l)| w.ln() + l.ln())
                .collect();
            let belief = normalize_log_weights(&log_weights).unwrap();
            let sum: f64 = belief.weights().iter().sum();
            prop_assert!((sum - 1.0).abs() <= BELIEF_TOLERANCE);
        }

        #[test]
        fn belief_state_rejects_unnormalized_weights(
            w0 in 0.0f64..1.0, bump in 1e-3f64..1.0,
        ) {
            prop_assert!(BeliefState::new(vec![w0, 1.0 - w0 + bump]).is_err());
        }
    }
}
