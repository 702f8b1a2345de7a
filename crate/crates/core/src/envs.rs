//! Environment suite: tabular laws, the two-bulb device and the chain MDP.

use std::sync::Arc;

use crate::alphabet::Symbol;
use crate::bayes::{Behavior, BeliefState, Hypothesis, MixtureAgent};
use crate::history::History;
use crate::interaction::{Environment, InteractionError};
use crate::rng::RandomSource;
use crate::table::ConditionalTable;

/// Stationary-structure environment backed by a lookup table over
/// prediction contexts.
#[derive(Debug, Clone)]
pub struct TabularEnv {
    law: ConditionalTable,
}

impl TabularEnv {
    pub fn new(law: ConditionalTable) -> Self {
        Self { law }
    }

    pub fn law(&self) -> &ConditionalTable {
        &self.law
    }
}

impl Environment for TabularEnv {
    fn observation_distribution(
        &mut self,
        history: &History,
    ) -> Result<Vec<f64>, InteractionError> {
        let key = history.current_prediction_key();
        self.law
            .row(&key)
            .map(<[f64]>::to_vec)
            .ok_or(InteractionError::UncoveredHistory { key })
    }
}

/// Chain action alphabet: advance (`A`) or its rival (`B`).
pub const CHAIN_ACTION_A: Symbol = Symbol(0);
pub const CHAIN_ACTION_B: Symbol = Symbol(1);

/// A k-state chain. One distinguished action advances the state; the other
/// resets it. Landing on state `k` pays reward 1 and snaps back to the
/// start, so the reward channel is the only observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainMDP {
    pub k: usize,
    /// The second environment of the pair: advance/reset roles swapped.
    pub swap: bool,
    pub state: usize,
}

impl ChainMDP {
    pub fn new(k: usize, swap: bool) -> Self {
        assert!(k >= 1, "chain needs at least one state");
        Self { k, swap, state: 0 }
    }

    /// The action that advances this chain.
    pub fn advancing_action(&self) -> Symbol {
        if self.swap {
            CHAIN_ACTION_B
        } else {
            CHAIN_ACTION_A
        }
    }

    /// Applies one action. Returns the reward observation (0 or 1).
    pub fn step(&mut self, action: Symbol) -> Symbol {
        if action == self.advancing_action() {
            self.state += 1;
            if self.state == self.k {
                self.state = 0;
                return Symbol(1);
            }
        } else {
            self.state = 0;
        }
        Symbol(0)
    }
}

/// The I/O law of one chain hypothesis: a deterministic reward predictor
/// obtained by simulating the chain over the action prefix, coupled with the
/// policy that is optimal if that chain is the true environment.
#[derive(Debug, Clone)]
struct ChainLaw {
    k: usize,
    swap: bool,
}

impl ChainLaw {
    /// Chain state after replaying every action in the history, including a
    /// pending one. Observations carry no extra information (the chain is
    /// deterministic), so they are ignored.
    fn state_after(&self, history: &History) -> (ChainMDP, Option<Symbol>) {
        let mut chain = ChainMDP::new(self.k, self.swap);
        let steps = history.steps();
        let complete = history.rounds();
        for step in &steps[..complete] {
            chain.step(step.action);
        }
        let pending = steps.get(complete).map(|s| s.action);
        (chain, pending)
    }
}

impl Behavior for ChainLaw {
    fn action_distribution(&self, _history: &History) -> Vec<f64> {
        let mut row = vec![0.0, 0.0];
        row[ChainMDP::new(self.k, self.swap).advancing_action().0] = 1.0;
        row
    }

    fn observation_distribution(&self, history: &History) -> Vec<f64> {
        let (mut chain, pending) = self.state_after(history);
        let action = pending.expect("prediction context needs a pending action");
        let reward = chain.step(action);
        let mut row = vec![0.0, 0.0];
        row[reward.0] = 1.0;
        row
    }
}

/// The two chain hypotheses: the plain chain with its always-advance policy
/// and the swapped chain with the rival action. Each policy is the optimal
/// one for its environment; backward induction over small horizons agrees
/// with them (see the planning tests).
pub fn chain_hypotheses(k: usize) -> Vec<Hypothesis> {
    assert!(k >= 1);
    vec![
        Hypothesis::new("chain-plain", Arc::new(ChainLaw { k, swap: false })),
        Hypothesis::new("chain-swapped", Arc::new(ChainLaw { k, swap: true })),
    ]
}

/// Tabulated chain predictor over every action/observation context up to
/// `horizon`; used by the backward-induction cross-checks. Contexts whose
/// recorded observations contradict the simulated chain still get rows (the
/// simulator conditions on actions only), so coverage is total.
pub fn chain_predictor_table(k: usize, swap: bool, horizon: usize) -> ConditionalTable {
    let mut table = ConditionalTable::new(2);
    let mut contexts: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..horizon {
        let mut next = Vec::new();
        for ctx in &contexts {
            for a in 0..2 {
                let mut chain = ChainMDP::new(k, swap);
                for slot in ctx.chunks(2) {
                    chain.step(Symbol(slot[0]));
                }
                let reward = chain.step(Symbol(a));
                let mut row = vec![0.0, 0.0];
                row[reward.0] = 1.0;
                let mut key = ctx.clone();
                key.push(a);
                table.insert(key.clone(), row).unwrap();
                for o in 0..2 {
                    let mut complete = key.clone();
                    complete.push(o);
                    next.push(complete);
                }
            }
        }
        contexts = next;
    }
    table
}

/// Default experiment horizon for a chain of length `k`: comfortably above
/// the expected 2^k hitting time, capped at one million steps.
pub fn chain_default_horizon(k: usize) -> usize {
    (50usize.saturating_mul(1usize << k.min(40))).min(1_000_000)
}

#[derive(Debug, Clone, Copy)]
pub struct ChainStepRecord {
    pub t: usize,
    pub action: usize,
    pub reward: usize,
    /// Posterior mass on the plain (non-swapped) chain hypothesis.
    pub posterior_plain: f64,
}

#[derive(Debug, Clone)]
pub struct ChainRun {
    pub records: Vec<ChainStepRecord>,
    pub first_reward_step: Option<usize>,
    pub total_reward: usize,
}

/// Runs the posterior-sampling agent on the true chain.
pub fn run_chain_thompson(
    k: usize,
    true_swap: bool,
    horizon: usize,
    resample_period: usize,
    stop_at_first_reward: bool,
    rng: &mut RandomSource,
) -> ChainRun {
    let mut env = ChainMDP::new(k, true_swap);
    let mut agent = MixtureAgent::new(chain_hypotheses(k), BeliefState::uniform(2))
        .with_resample_period(resample_period);
    run_chain(horizon, stop_at_first_reward, |t, records| {
        let (action, _) = agent.thompson_step(rng);
        let reward = env.step(action);
        agent
            .observe(reward)
            .expect("the true chain is in the hypothesis set");
        records.push(ChainStepRecord {
            t,
            action: action.0,
            reward: reward.0,
            posterior_plain: agent.belief().weights()[0],
        });
        reward.0 == 1
    })
}

/// Runs the agent that knows the true environment: it plays the advancing
/// action from the first step, so its first reward arrives at step `k`.
pub fn run_chain_optimal(
    k: usize,
    true_swap: bool,
    horizon: usize,
    stop_at_first_reward: bool,
) -> ChainRun {
    let mut env = ChainMDP::new(k, true_swap);
    let action = env.advancing_action();
    run_chain(horizon, stop_at_first_reward, |t, records| {
        let reward = env.step(action);
        records.push(ChainStepRecord {
            t,
            action: action.0,
            reward: reward.0,
            posterior_plain: if true_swap { 0.0 } else { 1.0 },
        });
        reward.0 == 1
    })
}

fn run_chain(
    horizon: usize,
    stop_at_first_reward: bool,
    mut step: impl FnMut(usize, &mut Vec<ChainStepRecord>) -> bool,
) -> ChainRun {
    assert!(horizon >= 1);
    let mut records = Vec::new();
    let mut first_reward_step = None;
    for t in 1..=horizon {
        let rewarded = step(t, &mut records);
        if rewarded && first_reward_step.is_none() {
            first_reward_step = Some(t);
            if stop_at_first_reward {
                break;
            }
        }
    }
    let total_reward = records.iter().map(|r| r.reward).sum();
    ChainRun {
        records,
        first_reward_step,
        total_reward,
    }
}

/// Which light a device intervention clamps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Light {
    Green,
    Red,
}

/// Which way the hidden mechanism runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceTruth {
    GreenCausesRed,
    RedCausesGreen,
}

/// A device with two positively correlated lights. The cause fires on with
/// probability 1/2; the effect copies it with probability 3/4 and opposes
/// it with probability 1/4. Without interventions the two truths generate
/// identical joints over the light states.
#[derive(Debug, Clone, Copy)]
pub struct LightBulbDevice {
    pub truth: DeviceTruth,
    pub cause_on: f64,
    pub effect_given_cause: f64,
    pub effect_given_not_cause: f64,
}

impl LightBulbDevice {
    pub fn new(truth: DeviceTruth) -> Self {
        Self {
            truth,
            cause_on: 0.5,
            effect_given_cause: 0.75,
            effect_given_not_cause: 0.25,
        }
    }

    /// Emits one joint state `(green_on, red_on)`. A clamped light skips its
    /// mechanism; the downstream mechanism still fires.
    pub fn emit(
        &self,
        intervention: Option<(Light, bool)>,
        rng: &mut RandomSource,
    ) -> (bool, bool) {
        let clamp = |light: Light| {
            intervention.and_then(|(l, v)| if l == light { Some(v) } else { None })
        };
        let draw = |rng: &mut RandomSource, p_on: f64| rng.next_unit() < p_on;
        let effect_prob = |cause_on: bool| {
            if cause_on {
                self.effect_given_cause
            } else {
                self.effect_given_not_cause
            }
        };
        match self.truth {
            DeviceTruth::GreenCausesRed => {
                let green = clamp(Light::Green).unwrap_or_else(|| draw(rng, self.cause_on));
                let red = clamp(Light::Red).unwrap_or_else(|| draw(rng, effect_prob(green)));
                (green, red)
            }
            DeviceTruth::RedCausesGreen => {
                let red = clamp(Light::Red).unwrap_or_else(|| draw(rng, self.cause_on));
                let green = clamp(Light::Green).unwrap_or_else(|| draw(rng, effect_prob(red)));
                (green, red)
            }
        }
    }

    /// Joint distribution over `(green, red)` in the order
    /// (on,on), (on,off), (off,on), (off,off), without interventions.
    pub fn joint_table(&self) -> [f64; 4] {
        let c = self.cause_on;
        let e1 = self.effect_given_cause;
        let e0 = self.effect_given_not_cause;
        match self.truth {
            DeviceTruth::GreenCausesRed => [
                c * e1,
                c * (1.0 - e1),
                (1.0 - c) * e0,
                (1.0 - c) * (1.0 - e0),
            ],
            DeviceTruth::RedCausesGreen => [
                c * e1,
                (1.0 - c) * e0,
                c * (1.0 - e1),
                (1.0 - c) * (1.0 - e0),
            ],
        }
    }
}
