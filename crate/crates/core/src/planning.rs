//! Finite-horizon planning: exhaustive expected utility, backward-induction
//! optimal policies, the expectation/maximization order comparator, and the
//! coding-cost diagnostic for adaptive behaviors.

use std::collections::HashMap;

use thiserror::Error;

use crate::alphabet::Symbol;
use crate::bayes::{Behavior, BeliefState, Hypothesis};
use crate::history::History;
use crate::table::{ConditionalTable, TableError};

/// Enumeration ceiling: planning over `(|A|·|O|)^T` realizations is refused
/// above this budget.
pub const ENUMERATION_BUDGET: f64 = 1e7;

#[derive(Debug, Error, PartialEq)]
pub enum PlanningError {
    #[error("no row covers the context {key:?}")]
    Coverage { key: Vec<usize> },
    #[error("enumeration of {size:e} realizations exceeds the budget of {ENUMERATION_BUDGET:e}")]
    ComplexityGuard { size: f64 },
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Utility over complete histories of a fixed horizon, tabulated on every
/// realization.
#[derive(Debug, Clone)]
pub struct UtilityFn {
    horizon: usize,
    n_actions: usize,
    n_obs: usize,
    table: HashMap<Vec<usize>, f64>,
}

impl UtilityFn {
    /// Tabulates `f` over every complete history of the horizon.
    pub fn from_fn(
        horizon: usize,
        n_actions: usize,
        n_obs: usize,
        f: impl Fn(&History) -> f64,
    ) -> Result<Self, PlanningError> {
        check_budget(horizon, n_actions, n_obs)?;
        let mut table = HashMap::new();
        let mut h = History::new();
        fill_table(&mut h, horizon, n_actions, n_obs, &f, &mut table);
        Ok(Self {
            horizon,
            n_actions,
            n_obs,
            table,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn value(&self, h: &History) -> Result<f64, PlanningError> {
        let key = h.complete_key();
        self.table
            .get(&key)
            .copied()
            .ok_or(PlanningError::Coverage { key })
    }
}

fn fill_table(
    h: &mut History,
    remaining: usize,
    n_actions: usize,
    n_obs: usize,
    f: &impl Fn(&History) -> f64,
    table: &mut HashMap<Vec<usize>, f64>,
) {
    if remaining == 0 {
        table.insert(h.complete_key(), f(h));
        return;
    }
    for a in 0..n_actions {
        h.push_action(Symbol(a), true);
        for o in 0..n_obs {
            h.push_observation(Symbol(o));
            fill_table(h, remaining - 1, n_actions, n_obs, f, table);
            h.pop_observation();
        }
        h.pop_action();
    }
}

fn check_budget(horizon: usize, n_actions: usize, n_obs: usize) -> Result<(), PlanningError> {
    let size = ((n_actions * n_obs) as f64).powi(horizon as i32);
    if size > ENUMERATION_BUDGET {
        return Err(PlanningError::ComplexityGuard { size });
    }
    Ok(())
}

/// A probability vector over actions for each reachable decision history.
#[derive(Debug, Clone)]
pub struct PolicyTable {
    table: ConditionalTable,
}

impl PolicyTable {
    pub fn new(n_actions: usize) -> Self {
        Self {
            table: ConditionalTable::new(n_actions),
        }
    }

    pub fn insert(&mut self, context: Vec<usize>, probs: Vec<f64>) -> Result<(), TableError> {
        self.table.insert(context, probs)
    }

    /// Inserts a point mass on `action`.
    pub fn insert_deterministic(&mut self, context: Vec<usize>, action: usize) {
        let mut row = vec![0.0; self.table.output_size()];
        row[action] = 1.0;
        self.table.insert(context, row).expect("valid point mass");
    }

    pub fn row(&self, context: &[usize]) -> Option<&[f64]> {
        self.table.row(context)
    }

    /// The action a deterministic row selects.
    pub fn action(&self, context: &[usize]) -> Option<usize> {
        self.row(context)
            .map(|row| row.iter().position(|&p| p == 1.0).expect("deterministic row"))
    }

    pub fn n_actions(&self) -> usize {
        self.table.output_size()
    }
}

/// Expected utility of a policy against a predictor, by exhaustive
/// enumeration of all realizations with positive probability.
pub fn expected_utility(
    policy: &PolicyTable,
    predictor: &ConditionalTable,
    utility: &UtilityFn,
) -> Result<f64, PlanningError> {
    check_budget(utility.horizon, utility.n_actions, utility.n_obs)?;
    let mut h = History::new();
    accumulate(&mut h, 1.0, utility.horizon, policy, predictor, utility)
}

fn accumulate(
    h: &mut History,
    weight: f64,
    remaining: usize,
    policy: &PolicyTable,
    predictor: &ConditionalTable,
    utility: &UtilityFn,
) -> Result<f64, PlanningError> {
    if remaining == 0 {
        return Ok(weight * utility.value(h)?);
    }
    let decision = h.current_decision_key();
    let action_row = policy
        .row(&decision)
        .ok_or(PlanningError::Coverage { key: decision })?
        .to_vec();
    let mut total = 0.0;
    for (a, &pa) in action_row.iter().enumerate() {
        if pa == 0.0 {
            continue;
        }
        h.push_action(Symbol(a), true);
        let prediction = h.current_prediction_key();
        let obs_row = predictor
            .row(&prediction)
            .ok_or(PlanningError::Coverage { key: prediction })?
            .to_vec();
        for (o, &po) in obs_row.iter().enumerate() {
            if po == 0.0 {
                continue;
            }
            h.push_observation(Symbol(o));
            total += accumulate(h, weight * pa * po, remaining - 1, policy, predictor, utility)?;
            h.pop_observation();
        }
        h.pop_action();
    }
    Ok(total)
}

/// Dynamic programming over the full history tree: returns the
/// deterministic optimal policy. Ties break toward the lowest action index.
pub fn backward_induction(
    predictor: &ConditionalTable,
    utility: &UtilityFn,
) -> Result<PolicyTable, PlanningError> {
    check_budget(utility.horizon, utility.n_actions, utility.n_obs)?;
    let mut policy = PolicyTable::new(utility.n_actions);
    let mut h = History::new();
    induct(&mut h, utility.horizon, predictor, utility, &mut policy)?;
    Ok(policy)
}

fn induct(
    h: &mut History,
    remaining: usize,
    predictor: &ConditionalTable,
    utility: &UtilityFn,
    policy: &mut PolicyTable,
) -> Result<f64, PlanningError> {
    if remaining == 0 {
        return utility.value(h);
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_action = 0;
    for a in 0..utility.n_actions {
        h.push_action(Symbol(a), true);
        let prediction = h.current_prediction_key();
        let obs_row = predictor
            .row(&prediction)
            .ok_or(PlanningError::Coverage { key: prediction })?
            .to_vec();
        let mut q = 0.0;
        for (o, &po) in obs_row.iter().enumerate() {
            if po == 0.0 {
                continue;
            }
            h.push_observation(Symbol(o));
            q += po * induct(h, remaining - 1, predictor, utility, policy)?;
            h.pop_observation();
        }
        h.pop_action();
        if q > best {
            best = q;
            best_action = a;
        }
    }
    policy.insert_deterministic(h.current_decision_key(), best_action);
    Ok(best)
}

/// One-step decision values under the two orders of expectation and
/// maximization. `predictors[theta][action][obs]` is the per-hypothesis
/// outcome law, `utility[action][obs]` the payoff.
///
/// The first value commits to one bet before the hypothesis is known; the
/// second lets the bet depend on an instantiated belief. The second is
/// never smaller.
pub fn seu_order_comparison(
    prior: &BeliefState,
    predictors: &[Vec<Vec<f64>>],
    utility: &[Vec<f64>],
) -> (f64, f64) {
    let n_theta = prior.len();
    assert_eq!(predictors.len(), n_theta, "one predictor per hypothesis");
    let n_actions = utility.len();
    let action_value = |theta: usize, a: usize| -> f64 {
        predictors[theta][a]
            .iter()
            .zip(&utility[a])
            .map(|(p, u)| p * u)
            .sum()
    };
    // expectation first: one bet, evaluated under the full mixture
    let expectation_then_max = (0..n_actions)
        .map(|a| {
            prior
                .weights()
                .iter()
                .enumerate()
                .map(|(theta, w)| w * action_value(theta, a))
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    // maximization first: the bet may depend on the instantiated belief
    let max_then_expectation = prior
        .weights()
        .iter()
        .enumerate()
        .map(|(theta, w)| {
            w * (0..n_actions)
                .map(|a| action_value(theta, a))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    (expectation_then_max, max_then_expectation)
}

/// A behavior with fixed one-step action and observation distributions,
/// independent of history. The candidate grid of the coding diagnostic is
/// made of these.
#[derive(Debug, Clone)]
pub struct FixedBehavior {
    pub action: Vec<f64>,
    pub observation: Vec<f64>,
}

impl Behavior for FixedBehavior {
    fn action_distribution(&self, _history: &History) -> Vec<f64> {
        self.action.clone()
    }

    fn observation_distribution(&self, _history: &History) -> Vec<f64> {
        self.observation.clone()
    }
}

/// Relative entropy with support checking: infinite when `p` puts mass
/// where `q` has none. Tiny negative rounding noise is clamped to zero.
fn kl(p: &[f64], q: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return f64::INFINITY;
        }
        sum += pi * (pi.ln() - qi.ln());
    }
    sum.max(0.0)
}

/// Total expected coding cost of `candidate` against the hypothesis class:
/// for each hypothesis, the relative entropy of its action and observation
/// conditionals to the candidate's, summed over rounds and weighted by the
/// hypothesis's own realization probabilities, then averaged under the
/// prior. Returns infinity when the candidate misses support some
/// hypothesis uses.
pub fn adaptive_code_cost(
    candidate: &dyn Behavior,
    hypotheses: &[Hypothesis],
    prior: &BeliefState,
    horizon: usize,
) -> f64 {
    assert_eq!(prior.len(), hypotheses.len());
    let mut total = 0.0;
    for (&w, hyp) in prior.weights().iter().zip(hypotheses) {
        if w == 0.0 {
            continue;
        }
        let mut h = History::new();
        total += w * per_theta_cost(&mut h, hyp, candidate, horizon);
    }
    total
}

fn per_theta_cost(
    h: &mut History,
    hyp: &Hypothesis,
    candidate: &dyn Behavior,
    remaining: usize,
) -> f64 {
    if remaining == 0 {
        return 0.0;
    }
    let pa = hyp.action_distribution(h);
    let qa = candidate.action_distribution(h);
    let mut cost = kl(&pa, &qa);
    for (a, &pa_a) in pa.iter().enumerate() {
        if pa_a == 0.0 {
            continue;
        }
        h.push_action(Symbol(a), true);
        let po = hyp.observation_distribution(h);
        let qo = candidate.observation_distribution(h);
        let mut branch = kl(&po, &qo);
        for (o, &po_o) in po.iter().enumerate() {
            if po_o == 0.0 {
                continue;
            }
            h.push_observation(Symbol(o));
            branch += po_o * per_theta_cost(h, hyp, candidate, remaining - 1);
            h.pop_observation();
        }
        cost += pa_a * branch;
        h.pop_action();
    }
    cost
}

/// The two-hypothesis single-round instance used by the coding diagnostic:
/// opposite deterministic policies and mirrored observation laws
/// independent of the action.
pub fn two_hypothesis_coding_instance() -> (Vec<Hypothesis>, BeliefState) {
    let build = |id: &str, action: usize, p_obs: [f64; 2]| {
        let mut policy = ConditionalTable::new(2);
        let mut row = vec![0.0, 0.0];
        row[action] = 1.0;
        policy.insert(vec![], row).unwrap();
        let mut predictor = ConditionalTable::new(2);
        predictor.insert(vec![0], p_obs.to_vec()).unwrap();
        predictor.insert(vec![1], p_obs.to_vec()).unwrap();
        Hypothesis::tabular(id, policy, predictor)
    };
    (
        vec![
            build("mostly-first", 0, [0.75, 0.25]),
            build("mostly-second", 1, [0.25, 0.75]),
        ],
        BeliefState::uniform(2),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::MixtureBehavior;
    use crate::envs::{chain_hypotheses, chain_predictor_table, ChainMDP};
    use crate::rng::RandomSource;
    use proptest::prelude::*;

    fn uniform_tables(horizon: usize) -> (PolicyTable, ConditionalTable) {
        let mut policy = PolicyTable::new(2);
        let mut predictor = ConditionalTable::new(2);
        let mut contexts: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..horizon {
            let mut next = Vec::new();
            for ctx in &contexts {
                policy.insert(ctx.clone(), vec![0.5, 0.5]).unwrap();
                for a in 0..2 {
                    let mut key = ctx.clone();
                    key.push(a);
                    predictor.insert(key.clone(), vec![0.5, 0.5]).unwrap();
                    for o in 0..2 {
                        let mut complete = key.clone();
                        complete.push(o);
                        next.push(complete);
                    }
                }
            }
            contexts = next;
        }
        (policy, predictor)
    }

    #[test]
    fn expectation_of_a_constant_is_the_constant() {
        let (policy, predictor) = uniform_tables(2);
        let u = UtilityFn::from_fn(2, 2, 2, |_| 2.5).unwrap();
        let v = expected_utility(&policy, &predictor, &u).unwrap();
        assert!((v - 2.5).abs() < 1e-12);
    }

    #[test]
    fn deterministic_single_round_returns_the_realized_utility() {
        let mut policy = PolicyTable::new(2);
        policy.insert_deterministic(vec![], 1);
        let mut predictor = ConditionalTable::new(2);
        predictor.insert(vec![0], vec![1.0, 0.0]).unwrap();
        predictor.insert(vec![1], vec![0.0, 1.0]).unwrap();
        let u = UtilityFn::from_fn(1, 2, 2, |h| {
            let s = h.steps()[0];
            (10 * s.action.0 + s.observation.unwrap().0) as f64
        })
        .unwrap();
        assert_eq!(expected_utility(&policy, &predictor, &u).unwrap(), 11.0);
    }

    fn count_heads(h: &History) -> f64 {
        h.steps()
            .iter()
            .filter(|s| s.observation == Some(Symbol(1)))
            .count() as f64
    }

    #[test]
    fn two_round_coin_counting_has_expectation_one() {
        let (policy, predictor) = uniform_tables(2);
        let u = UtilityFn::from_fn(2, 2, 2, count_heads).unwrap();
        let v = expected_utility(&policy, &predictor, &u).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_rows_surface_as_coverage_errors() {
        let (policy, _) = uniform_tables(2);
        let sparse = ConditionalTable::new(2);
        let u = UtilityFn::from_fn(2, 2, 2, count_heads).unwrap();
        assert!(matches!(
            expected_utility(&policy, &sparse, &u),
            Err(PlanningError::Coverage { .. })
        ));
    }

    #[test]
    fn single_round_induction_picks_the_argmax() {
        let mut predictor = ConditionalTable::new(2);
        predictor.insert(vec![0], vec![0.2, 0.8]).unwrap();
        predictor.insert(vec![1], vec![0.7, 0.3]).unwrap();
        // utility pays for observing symbol 1
        let u = UtilityFn::from_fn(1, 2, 2, count_heads).unwrap();
        let policy = backward_induction(&predictor, &u).unwrap();
        assert_eq!(policy.action(&[]), Some(0));
    }

    /// All deterministic binary policies over a two-round horizon.
    fn all_deterministic_policies() -> Vec<PolicyTable> {
        let mut contexts = vec![vec![]];
        for a in 0..2 {
            for o in 0..2 {
                contexts.push(vec![a, o]);
            }
        }
        (0..(1 << contexts.len()))
            .map(|mask| {
                let mut policy = PolicyTable::new(2);
                for (bit, ctx) in contexts.iter().enumerate() {
                    policy.insert_deterministic(ctx.clone(), (mask >> bit) & 1);
                }
                policy
            })
            .collect()
    }

    #[test]
    fn induction_matches_exhaustive_policy_enumeration() {
        let mut predictor = ConditionalTable::new(2);
        predictor.insert(vec![0], vec![0.9, 0.1]).unwrap();
        predictor.insert(vec![1], vec![0.4, 0.6]).unwrap();
        for a0 in 0..2 {
            for o0 in 0..2 {
                for a1 in 0..2 {
                    let row = if a1 == 0 {
                        vec![0.25, 0.75]
                    } else {
                        vec![0.65, 0.35]
                    };
                    predictor.insert(vec![a0, o0, a1], row).unwrap();
                }
            }
        }
        // pay for heads, with a bonus when the two actions differ
        let u = UtilityFn::from_fn(2, 2, 2, |h| {
            let steps = h.steps();
            count_heads(h) + 0.5 * (steps[0].action != steps[1].action) as usize as f64
        })
        .unwrap();
        let optimal = backward_induction(&predictor, &u).unwrap();
        let optimal_value = expected_utility(&optimal, &predictor, &u).unwrap();
        let best_enumerated = all_deterministic_policies()
            .iter()
            .map(|p| expected_utility(p, &predictor, &u).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(optimal_value, best_enumerated);
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        let err = UtilityFn::from_fn(12, 2, 2, |_| 0.0).unwrap_err();
        assert!(matches!(err, PlanningError::ComplexityGuard { .. }));
    }

    #[test]
    fn chain_induction_always_advances() {
        // the plain chain of length 3 over six rounds: advancing is optimal
        // at every decision point, ties included
        let predictor = chain_predictor_table(3, false, 6);
        let u = UtilityFn::from_fn(6, 2, 2, count_heads).unwrap();
        let policy = backward_induction(&predictor, &u).unwrap();
        let mut h = History::new();
        check_always(&policy, &predictor, &mut h, 6, 0);
    }

    /// Asserts the policy plays `action` at every decision context with
    /// positive probability under the predictor.
    fn check_always(
        policy: &PolicyTable,
        predictor: &ConditionalTable,
        h: &mut History,
        remaining: usize,
        action: usize,
    ) {
        if remaining == 0 {
            return;
        }
        let ctx = h.current_decision_key();
        assert_eq!(policy.action(&ctx), Some(action), "context {ctx:?}");
        for a in 0..2 {
            h.push_action(Symbol(a), true);
            let row = predictor.row(&h.current_prediction_key()).unwrap().to_vec();
            for (o, &po) in row.iter().enumerate() {
                if po == 0.0 {
                    continue;
                }
                h.push_observation(Symbol(o));
                check_always(policy, predictor, h, remaining - 1, action);
                h.pop_observation();
            }
            h.pop_action();
        }
    }

    #[test]
    fn chain_hypothesis_policies_agree_with_induction_on_path() {
        for k in 1..=4usize {
            let horizon = 2 * k;
            let u = UtilityFn::from_fn(horizon, 2, 2, count_heads).unwrap();
            for (swap, expected_action) in [(false, 0usize), (true, 1usize)] {
                let predictor = chain_predictor_table(k, swap, horizon);
                let policy = backward_induction(&predictor, &u).unwrap();
                let hypothesis = &chain_hypotheses(k)[expected_action];
                let mut env = ChainMDP::new(k, swap);
                let mut h = History::new();
                for _ in 0..horizon {
                    let planned = policy.action(&h.current_decision_key()).unwrap();
                    let fixed = hypothesis.action_distribution(&h);
                    assert_eq!(planned, expected_action, "k={k} swap={swap}");
                    assert_eq!(fixed[planned], 1.0);
                    h.push_action(Symbol(planned), true);
                    let reward = env.step(Symbol(planned));
                    h.push_observation(reward);
                }
            }
        }
    }

    #[test]
    fn single_hypothesis_collapses_the_order_comparison() {
        let prior = BeliefState::delta(1, 0);
        let predictors = vec![vec![vec![0.3, 0.7], vec![0.6, 0.4]]];
        let utility = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let (a, b) = seu_order_comparison(&prior, &predictors, &utility);
        assert_eq!(a, b);
    }

    #[test]
    fn biased_coin_instance_separates_the_two_orders() {
        let prior = BeliefState::uniform(2);
        let predictors = vec![
            vec![vec![0.25, 0.75], vec![0.25, 0.75]],
            vec![vec![0.75, 0.25], vec![0.75, 0.25]],
        ];
        // guessing the realized outcome pays one
        let utility = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let (a, b) = seu_order_comparison(&prior, &predictors, &utility);
        assert!((a - 0.5).abs() < 1e-12);
        assert!((b - 0.75).abs() < 1e-12);
    }

    #[test]
    fn constant_payoffs_make_the_orders_equal() {
        let prior = BeliefState::uniform(2);
        let predictors = vec![
            vec![vec![0.25, 0.75], vec![0.25, 0.75]],
            vec![vec![0.75, 0.25], vec![0.75, 0.25]],
        ];
        let utility = vec![vec![0.4, 0.4], vec![0.4, 0.4]];
        let (a, b) = seu_order_comparison(&prior, &predictors, &utility);
        assert!((a - b).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn random_beliefs_never_lose_to_the_committed_bet(
            w in 1e-6f64..1.0,
            rows in proptest::collection::vec(0.0f64..=1.0, 8),
            payoffs in proptest::collection::vec(-5.0f64..5.0, 4),
        ) {
            let prior = BeliefState::new(vec![w, 1.0 - w].iter().map(|x| x / 1.0).collect())
                .unwrap();
            let predictors = vec![
                vec![vec![rows[0], 1.0 - rows[0]], vec![rows[1], 1.0 - rows[1]]],
                vec![vec![rows[2], 1.0 - rows[2]], vec![rows[3], 1.0 - rows[3]]],
            ];
            let utility = vec![
                vec![payoffs[0], payoffs[1]],
                vec![payoffs[2], payoffs[3]],
            ];
            let (a, b) = seu_order_comparison(&prior, &predictors, &utility);
            prop_assert!(b >= a - 1e-12);
        }
    }

    #[test]
    fn matching_the_single_hypothesis_costs_nothing() {
        let (hyps, _) = two_hypothesis_coding_instance();
        let prior = BeliefState::delta(2, 0);
        let candidate = MixtureBehavior {
            hypotheses: vec![hyps[0].clone()],
            prior: BeliefState::delta(1, 0),
        };
        let cost = adaptive_code_cost(&candidate, &hyps, &prior, 1);
        assert_eq!(cost, 0.0);
    }

    #[test]
    fn committing_to_the_wrong_hypothesis_costs_something() {
        let (hyps, prior) = two_hypothesis_coding_instance();
        let wrong = FixedBehavior {
            action: vec![1.0, 0.0],
            observation: vec![0.75, 0.25],
        };
        let cost = adaptive_code_cost(&wrong, &hyps, &prior, 1);
        assert!(cost.is_infinite() || cost > 0.1, "cost={cost}");
    }

    #[test]
    fn candidate_without_support_signals_infinite_cost() {
        let (hyps, prior) = two_hypothesis_coding_instance();
        let broken = FixedBehavior {
            action: vec![1.0, 0.0],
            observation: vec![1.0, 0.0],
        };
        assert!(adaptive_code_cost(&broken, &hyps, &prior, 1).is_infinite());
    }

    #[test]
    fn mixture_behavior_is_grid_minimal_on_the_desk_instance() {
        let (hyps, prior) = two_hypothesis_coding_instance();
        let mixture = MixtureBehavior {
            hypotheses: hyps.clone(),
            prior: prior.clone(),
        };
        let mixture_cost = adaptive_code_cost(&mixture, &hyps, &prior, 1);
        for i in 0..=20 {
            for j in 0..=20 {
                let p = i as f64 * 0.05;
                let q = j as f64 * 0.05;
                let candidate = FixedBehavior {
                    action: vec![p, 1.0 - p],
                    observation: vec![q, 1.0 - q],
                };
                let cost = adaptive_code_cost(&candidate, &hyps, &prior, 1);
                assert!(mixture_cost <= cost, "p={p} q={q}: {mixture_cost} > {cost}");
            }
        }
    }

    #[test]
    fn coding_cost_is_nonnegative_on_random_candidates() {
        let (hyps, prior) = two_hypothesis_coding_instance();
        let mut rng = RandomSource::new(404);
        for _ in 0..200 {
            let p = rng.next_unit();
            let q = rng.next_unit();
            let candidate = FixedBehavior {
                action: vec![p, 1.0 - p],
                observation: vec![q, 1.0 - q],
            };
            assert!(adaptive_code_cost(&candidate, &hyps, &prior, 1) >= 0.0);
        }
    }
}
