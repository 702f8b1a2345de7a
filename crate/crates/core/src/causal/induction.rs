//! Repeated causal induction: posterior sampling over causal hypotheses,
//! where the sampled hypothesis decides which variable to clamp.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::tree::{ratio, ProbTree, ProbTreeNode, TreeError};
use crate::rng::RandomSource;

/// The informative experiment a hypothesis prescribes: which variable to
/// clamp, and the cycle of values to clamp it to round by round.
///
/// A hypothesis intervenes on the variable it believes to be the cause;
/// cycling the clamped value keeps the run from confounding the posterior
/// with a stuck mechanism while staying reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterventionPolicy {
    pub variable: String,
    pub values: Vec<String>,
}

impl InterventionPolicy {
    pub fn new(variable: impl Into<String>, values: &[&str]) -> Self {
        assert!(!values.is_empty(), "policy needs at least one value");
        Self {
            variable: variable.into(),
            values: values.iter().map(|v| v.to_string()).collect(),
        }
    }

    pub fn value_for_round(&self, t: usize) -> &str {
        &self.values[(t - 1) % self.values.len()]
    }
}

/// A set of causal hypotheses sharing one hypothesis variable: its prior is
/// the root mechanism, each outcome owns a subtree, and each outcome
/// carries the intervention policy to run if it is sampled.
#[derive(Debug, Clone)]
pub struct CausalHypothesisSet {
    hypothesis_variable: String,
    outcomes: Vec<String>,
    prior: Vec<BigRational>,
    subtrees: Vec<ProbTreeNode>,
    policies: Vec<InterventionPolicy>,
}

impl CausalHypothesisSet {
    pub fn new(
        hypothesis_variable: impl Into<String>,
        entries: Vec<(String, BigRational, ProbTreeNode, InterventionPolicy)>,
    ) -> Result<Self, TreeError> {
        let hypothesis_variable = hypothesis_variable.into();
        let mut outcomes = Vec::new();
        let mut prior = Vec::new();
        let mut subtrees = Vec::new();
        let mut policies = Vec::new();
        for (outcome, weight, subtree, policy) in entries {
            outcomes.push(outcome);
            prior.push(weight);
            subtrees.push(subtree);
            policies.push(policy);
        }
        let set = Self {
            hypothesis_variable,
            outcomes,
            prior,
            subtrees,
            policies,
        };
        // the root must resolve the hypothesis variable first; building the
        // prior tree validates that plus all mechanism invariants
        set.tree_with_prior(&set.prior)?;
        Ok(set)
    }

    pub fn hypothesis_variable(&self) -> &str {
        &self.hypothesis_variable
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn prior(&self) -> &[BigRational] {
        &self.prior
    }

    /// Assembles the full tree with the given weights on the root
    /// mechanism. The root resolves the hypothesis variable first.
    pub fn tree_with_prior(&self, weights: &[BigRational]) -> Result<ProbTree, TreeError> {
        assert_eq!(weights.len(), self.outcomes.len());
        let branches = self
            .outcomes
            .iter()
            .zip(weights)
            .zip(&self.subtrees)
            .map(|((outcome, w), subtree)| {
                ProbTreeNode::branch(outcome.clone(), w.clone(), subtree.clone())
            })
            .collect();
        ProbTree::new(ProbTreeNode::mechanism(
            self.hypothesis_variable.clone(),
            branches,
        ))
    }

    fn index_of(&self, outcome: &str) -> Result<usize, TreeError> {
        self.outcomes
            .iter()
            .position(|o| o == outcome)
            .ok_or_else(|| TreeError::UnknownOutcome {
                variable: self.hypothesis_variable.clone(),
                outcome: outcome.to_string(),
            })
    }
}

/// One round of the induction loop.
#[derive(Debug, Clone)]
pub struct CausalRound {
    pub t: usize,
    pub intervened_variable: String,
    pub intervened_value: String,
    pub observed: BTreeMap<String, String>,
    /// Exact posterior over the hypothesis outcomes after this round.
    pub posterior: Vec<(String, BigRational)>,
}

impl CausalRound {
    /// Posterior mass on outcome `index` as a float.
    pub fn posterior_float(&self, index: usize) -> f64 {
        self.posterior[index].1.to_f64().expect("finite posterior")
    }

    /// Posterior mass on outcome `index` as an exact `num/den` string.
    pub fn posterior_fraction(&self, index: usize) -> String {
        let q = &self.posterior[index].1;
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Runs the induction loop: each round samples a hypothesis from the
/// current posterior, applies that hypothesis's intervention to the true
/// device, observes every variable, and updates the posterior through the
/// intervened tree. Arithmetic is exact throughout.
pub fn causal_thompson_run(
    set: &CausalHypothesisSet,
    truth: &str,
    rounds: usize,
    rng: &mut RandomSource,
) -> Result<Vec<CausalRound>, TreeError> {
    assert!(rounds >= 1);
    let truth_index = set.index_of(truth)?;
    let mut weights = set.prior.to_vec();
    let mut trajectory = Vec::with_capacity(rounds);
    for t in 1..=rounds {
        let belief: Vec<f64> = weights
            .iter()
            .map(|w| w.to_f64().expect("finite weight"))
            .collect();
        let sampled = rng.sample_index(&belief);
        let policy = &set.policies[sampled];
        let value = policy.value_for_round(t).to_string();

        // the true device, clamped by the chosen experiment
        let device = set.subtrees[truth_index].clamp(&policy.variable, &value);
        let observed = device.sample_assignment(rng);

        let tree = set.tree_with_prior(&weights)?;
        let posterior = tree.posterior(
            &set.hypothesis_variable,
            &observed,
            &[(policy.variable.clone(), value.clone())],
        )?;
        weights = posterior.iter().map(|(_, w)| w.clone()).collect();
        trajectory.push(CausalRound {
            t,
            intervened_variable: policy.variable.clone(),
            intervened_value: value,
            observed,
            posterior,
        });
    }
    Ok(trajectory)
}

/// Hypothesis name: the green light drives the red one.
pub const GREEN_CAUSES_RED: &str = "green_causes_red";
/// Hypothesis name: the red light drives the green one.
pub const RED_CAUSES_GREEN: &str = "red_causes_green";

/// The two-bulb induction problem: a hidden mechanism correlates a green
/// light (`X`) and a red light (`Y`) positively; the two causal directions
/// are observationally indistinguishable. Each hypothesis clamps the light
/// it believes to be the cause, alternating on/off across rounds.
pub fn lightbulb_hypothesis_set() -> CausalHypothesisSet {
    let effect = |variable: &str, p_on: BigRational| {
        ProbTreeNode::mechanism(
            variable,
            vec![
                ProbTreeNode::branch("on", p_on.clone(), ProbTreeNode::Leaf),
                ProbTreeNode::branch("off", BigRational::one() - p_on, ProbTreeNode::Leaf),
            ],
        )
    };
    let chain = |cause: &str, effect_var: &str| {
        ProbTreeNode::mechanism(
            cause,
            vec![
                ProbTreeNode::branch("on", ratio(1, 2), effect(effect_var, ratio(3, 4))),
                ProbTreeNode::branch("off", ratio(1, 2), effect(effect_var, ratio(1, 4))),
            ],
        )
    };
    CausalHypothesisSet::new(
        "Theta",
        vec![
            (
                GREEN_CAUSES_RED.to_string(),
                ratio(1, 2),
                chain("X", "Y"),
                InterventionPolicy::new("X", &["on", "off"]),
            ),
            (
                RED_CAUSES_GREEN.to_string(),
                ratio(1, 2),
                chain("Y", "X"),
                InterventionPolicy::new("Y", &["on", "off"]),
            ),
        ],
    )
    .expect("the reference tree is well formed")
}

/// The reference two-bulb tree with the uniform prior at the root.
pub fn build_lightbulb_tree() -> ProbTree {
    let set = lightbulb_hypothesis_set();
    set.tree_with_prior(set.prior())
        .expect("the reference tree is well formed")
}
