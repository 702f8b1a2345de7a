//! Simulation library for sequential decision-making with random beliefs.
//!
//! The crate couples finite-alphabet agents and environments in discrete
//! rounds and provides:
//!
//! - [`interaction`]: the alternating action/observation loop, history
//!   bookkeeping and tabular conditional probability tables;
//! - [`bayes`]: Bayesian mixture agents whose posteriors treat the agent's
//!   own actions as causal interventions, acting by posterior sampling;
//! - [`envs`]: an environment suite (tabular laws, the two-bulb device, the
//!   k-state chain MDP stress test);
//! - [`games`]: two co-adapting posterior-sampling players in a bimatrix
//!   game, with conjugate Beta beliefs and a relative-entropy diagnostic;
//! - [`causal`]: probability trees with interventions, exact rational
//!   posteriors and the repeated causal-induction loop;
//! - [`planning`]: finite-horizon expected utility, backward induction and
//!   the coding-cost diagnostic for adaptive behaviors.

pub mod alphabet;
pub mod bayes;
pub mod causal;
pub mod envs;
pub mod games;
pub mod history;
pub mod interaction;
pub mod planning;
pub mod rng;
pub mod table;

pub use alphabet::{Alphabet, Symbol};
pub use bayes::{BeliefState, Behavior, Hypothesis, MixtureAgent};
pub use history::{History, Step};
pub use interaction::{Environment, Policy};
pub use rng::RandomSource;
pub use table::ConditionalTable;
