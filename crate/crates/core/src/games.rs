//! Two co-adapting players that act by sampling their beliefs.
//!
//! Each player keeps a conjugate Beta posterior over the opponent's
//! heads-rate, samples it every round, and plays the best response to the
//! sample. The module also carries the relative-entropy machinery used to
//! reason about lock-in: the strict equilibrium check on predictive models
//! and the expected one-step entropy change that certifies contraction.

use statrs::function::beta::beta_reg;
use thiserror::Error;

use crate::rng::RandomSource;

#[derive(Debug, Error, PartialEq)]
pub enum GamesError {
    #[error("relative entropy diverged: {0}")]
    Divergence(String),
}

/// Rectangular payoff bimatrix. Rows index player 1's action, columns
/// player 2's; each cell holds the pair (payoff to 1, payoff to 2).
#[derive(Debug, Clone, PartialEq)]
pub struct Bimatrix {
    cells: Vec<Vec<(f64, f64)>>,
}

impl Bimatrix {
    pub fn new(cells: Vec<Vec<(f64, f64)>>) -> Self {
        assert!(!cells.is_empty(), "empty payoff matrix");
        let width = cells[0].len();
        assert!(width > 0, "empty payoff row");
        for row in &cells {
            assert_eq!(row.len(), width, "payoff matrix must be rectangular");
            assert!(
                row.iter().all(|(u, v)| u.is_finite() && v.is_finite()),
                "payoffs must be finite"
            );
        }
        Self { cells }
    }

    /// Matching pennies: player 1 wins when the pennies match, player 2
    /// when they differ. Action 0 is heads, action 1 tails.
    pub fn matching_pennies() -> Self {
        Self::new(vec![
            vec![(1.0, -1.0), (-1.0, 1.0)],
            vec![(-1.0, 1.0), (1.0, -1.0)],
        ])
    }

    pub fn payoff(&self, p1_action: usize, p2_action: usize) -> (f64, f64) {
        self.cells[p1_action][p2_action]
    }
}

/// Conjugate Beta belief over an opponent's heads-rate. With the uniform
/// prior, `alpha` is one plus the opponent's observed heads and `beta` one
/// plus their observed tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPosterior {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaPosterior {
    pub fn new(alpha: f64, beta: f64) -> Self {
        assert!(alpha > 0.0 && beta > 0.0, "Beta parameters must be positive");
        Self { alpha, beta }
    }

    /// The uniform prior: no observations yet.
    pub fn uniform() -> Self {
        Self::new(1.0, 1.0)
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    /// Conjugate update on one observed opponent move.
    pub fn update(&self, opponent_played_heads: bool) -> Self {
        if opponent_played_heads {
            Self::new(self.alpha + 1.0, self.beta)
        } else {
            Self::new(self.alpha, self.beta + 1.0)
        }
    }

    /// Inverse CDF by bisection on the regularized incomplete beta
    /// function, to an interval width of 1e-12. Deterministic per seed and
    /// across platforms.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if beta_reg(self.alpha, self.beta, mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn sample(&self, rng: &mut RandomSource) -> f64 {
        self.inverse_cdf(rng.next_unit())
    }
}

/// Player 1 matches: the sharper the belief that the opponent shows heads,
/// the harder it leans heads itself.
pub fn best_response_p1(theta: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&theta));
    match theta {
        t if t < 0.5 => 0.0,
        t if t > 0.5 => 1.0,
        _ => 0.5,
    }
}

/// Player 2 mismatches: the inverted branches of player 1's response.
pub fn best_response_p2(xi: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&xi));
    match xi {
        x if x < 0.5 => 1.0,
        x if x > 0.5 => 0.0,
        _ => 0.5,
    }
}

/// Which seat a [`GameAgentState`] occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlayerRole {
    One,
    Two,
}

/// One player's adaptive state: its Beta belief about the opponent and the
/// payoffs it has collected.
#[derive(Debug, Clone)]
pub struct GameAgentState {
    pub posterior: BetaPosterior,
    pub role: PlayerRole,
    pub rewards: Vec<f64>,
}

impl GameAgentState {
    pub fn new(role: PlayerRole) -> Self {
        Self {
            posterior: BetaPosterior::uniform(),
            role,
            rewards: Vec::new(),
        }
    }

    pub fn mean_reward(&self) -> f64 {
        if self.rewards.is_empty() {
            0.0
        } else {
            self.rewards.iter().sum::<f64>() / self.rewards.len() as f64
        }
    }
}

/// One row of a matching-pennies trajectory, recorded after the round's
/// posterior updates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenniesRecord {
    pub t: usize,
    pub theta_mean: f64,
    pub xi_mean: f64,
    pub u: f64,
    pub v: f64,
    pub cumulative_mean_u: f64,
    pub cumulative_mean_v: f64,
}

/// Repeated matching pennies between two belief-sampling players. Per
/// round: each player samples its posterior, best-responds to the sample,
/// and the realized moves update both posteriors.
pub fn play_matching_pennies(rounds: usize, rng: &mut RandomSource) -> Vec<PenniesRecord> {
    assert!(rounds >= 1);
    let payoffs = Bimatrix::matching_pennies();
    let mut p1 = GameAgentState::new(PlayerRole::One);
    let mut p2 = GameAgentState::new(PlayerRole::Two);
    let mut trajectory = Vec::with_capacity(rounds);
    let mut total_u = 0.0;
    let mut total_v = 0.0;
    for t in 1..=rounds {
        let theta = p1.posterior.sample(rng);
        let p1_heads = rng.next_unit() < best_response_p1(theta);
        let xi = p2.posterior.sample(rng);
        let p2_heads = rng.next_unit() < best_response_p2(xi);

        let (u, v) = payoffs.payoff(usize::from(!p1_heads), usize::from(!p2_heads));
        p1.rewards.push(u);
        p2.rewards.push(v);
        p1.posterior = p1.posterior.update(p2_heads);
        p2.posterior = p2.posterior.update(p1_heads);

        total_u += u;
        total_v += v;
        trajectory.push(PenniesRecord {
            t,
            theta_mean: p1.posterior.mean(),
            xi_mean: p2.posterior.mean(),
            u,
            v,
            cumulative_mean_u: total_u / t as f64,
            cumulative_mean_v: total_v / t as f64,
        });
    }
    trajectory
}

/// Relative entropy of `p` to `q`; infinite when `p` puts mass outside
/// `q`'s support.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
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
    sum
}

/// Expected one-step change in relative entropy to the generative law:
/// the data-law-weighted divergence of the generative distribution to the
/// updated predictive minus its divergence to the current predictive.
/// Negative values certify contraction toward the generative law.
pub fn delta_kl(
    predict_prior: &[f64],
    predict_posterior_by_data: &[Vec<f64>],
    generative: &[f64],
    data_law: &[f64],
) -> Result<f64, GamesError> {
    assert_eq!(predict_posterior_by_data.len(), data_law.len());
    let before = kl_divergence(generative, predict_prior);
    if !before.is_finite() {
        return Err(GamesError::Divergence(
            "generative law escapes the prior predictive support".into(),
        ));
    }
    let mut after = 0.0;
    for (posterior, &weight) in predict_posterior_by_data.iter().zip(data_law) {
        if weight == 0.0 {
            continue;
        }
        let k = kl_divergence(generative, posterior);
        if !k.is_finite() {
            return Err(GamesError::Divergence(
                "generative law escapes an updated predictive support".into(),
            ));
        }
        after += weight * k;
    }
    Ok(after - before)
}

/// The upper bound on [`delta_kl`] for a mixture predictive: two
/// negative-when-locked terms plus the prior penalty `-ln w[theta_star]`.
/// `components[theta]` is the per-hypothesis predictive over observations
/// and `data_likelihood[theta]` the per-hypothesis law of the observed
/// data.
pub fn delta_kl_nash_bound(
    prior: &[f64],
    components: &[Vec<f64>],
    data_likelihood: &[Vec<f64>],
    theta_star: usize,
    generative: &[f64],
    data_law: &[f64],
) -> Result<f64, GamesError> {
    assert_eq!(prior.len(), components.len());
    assert_eq!(prior.len(), data_likelihood.len());
    let mixture = |per_theta: &[Vec<f64>], i: usize| -> f64 {
        prior
            .iter()
            .zip(per_theta)
            .map(|(&w, row)| w * row[i])
            .sum()
    };
    let mut prediction_term = 0.0;
    for (o, &g) in generative.iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        let mix = mixture(components, o);
        let star = components[theta_star][o];
        if mix == 0.0 || star == 0.0 {
            return Err(GamesError::Divergence(
                "zero predictive mass on a generative outcome".into(),
            ));
        }
        prediction_term += g * (mix.ln() - star.ln());
    }
    let mut evidence_term = 0.0;
    for (d, &w) in data_law.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let mix = mixture(data_likelihood, d);
        let star = data_likelihood[theta_star][d];
        if mix == 0.0 || star == 0.0 {
            return Err(GamesError::Divergence(
                "zero likelihood on an observable datum".into(),
            ));
        }
        evidence_term += w * (mix.ln() - star.ln());
    }
    Ok(prediction_term + evidence_term - prior[theta_star].ln())
}

/// Outcome of the strict-equilibrium check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NashCheck {
    pub is_strict: bool,
    /// Set when a side had no alternatives left to test, so its inequality
    /// held vacuously.
    pub vacuous: bool,
}

/// Checks the two strict lock-in inequalities: each player's model of the
/// opponent must be strictly closer (in relative entropy from the
/// opponent's actual play) than every alternative on the grid. Grid entries
/// identical to the candidate model are skipped.
pub fn strict_nash_check(
    p1_model_of_p2: &[f64],
    p2_actual: &[f64],
    p2_model_of_p1: &[f64],
    p1_actual: &[f64],
    alternatives: &[Vec<f64>],
) -> NashCheck {
    let side = |model: &[f64], actual: &[f64]| -> (bool, bool) {
        let base = kl_divergence(actual, model);
        let mut tested = 0usize;
        let mut holds = true;
        for alt in alternatives {
            if alt.as_slice() == model {
                continue;
            }
            tested += 1;
            if !(base < kl_divergence(actual, alt)) {
                holds = false;
                break;
            }
        }
        (holds, tested == 0)
    };
    let (holds1, vacuous1) = side(p1_model_of_p2, p2_actual);
    let (holds2, vacuous2) = side(p2_model_of_p1, p1_actual);
    NashCheck {
        is_strict: holds1 && holds2,
        vacuous: vacuous1 || vacuous2,
    }
}
