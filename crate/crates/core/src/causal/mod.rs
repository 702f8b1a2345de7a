//! Probability trees with interventions and the causal-induction loop.
//!
//! All arithmetic in this module is exact: branch probabilities are
//! arbitrary-precision rationals and posteriors are equal — not
//! approximately equal — to their hand-computed fractions.

mod induction;
mod tree;

pub use induction::{
    build_lightbulb_tree, causal_thompson_run, lightbulb_hypothesis_set, CausalHypothesisSet,
    CausalRound, InterventionPolicy, GREEN_CAUSES_RED, RED_CAUSES_GREEN,
};
pub use tree::{ratio, Branch, ProbTree, ProbTreeNode, TreeError};
