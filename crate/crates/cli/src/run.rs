//! Experiment execution and trajectory export.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use randbelief::bayes::MixtureBehavior;
use randbelief::causal::{causal_thompson_run, lightbulb_hypothesis_set};
use randbelief::envs::{run_chain_optimal, run_chain_thompson};
use randbelief::games::play_matching_pennies;
use randbelief::planning::{
    adaptive_code_cost, seu_order_comparison, two_hypothesis_coding_instance, FixedBehavior,
};
use randbelief::rng::RandomSource;
use randbelief::BeliefState;

use crate::config::{AgentKind, Experiment, RunPlan};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Runtime(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

/// Formats a float to 12 significant digits, then prints the rounded value
/// with the shortest representation that round-trips.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("round-trip");
    format!("{rounded}")
}

/// Rounds to the 12 significant digits the files carry.
fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("round-trip")
}

struct SeedResult {
    seed: u64,
    csv: String,
    stats: BTreeMap<String, f64>,
    notes: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
pub struct PerSeed {
    pub seed: u64,
    pub stats: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
pub struct Aggregate {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Serialize)]
pub struct SummaryFile {
    pub experiment: String,
    pub seeds: Vec<u64>,
    pub per_seed: Vec<PerSeed>,
    pub aggregate: BTreeMap<String, Aggregate>,
}

fn stat(map: &mut BTreeMap<String, f64>, key: &str, value: f64) {
    map.insert(key.to_string(), round_sig(value));
}

fn run_pennies(rounds: usize, seed: u64) -> SeedResult {
    let mut rng = RandomSource::new(seed);
    let trajectory = play_matching_pennies(rounds, &mut rng);
    let mut csv = String::from("t,theta_mean,xi_mean,u,v,cumulative_mean_u,cumulative_mean_v\n");
    for r in &trajectory {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.t,
            fmt_f64(r.theta_mean),
            fmt_f64(r.xi_mean),
            r.u as i64,
            r.v as i64,
            fmt_f64(r.cumulative_mean_u),
            fmt_f64(r.cumulative_mean_v),
        );
    }
    let last = trajectory.last().expect("at least one round");
    let mut stats = BTreeMap::new();
    stat(&mut stats, "final_theta_mean", last.theta_mean);
    stat(&mut stats, "final_xi_mean", last.xi_mean);
    stat(&mut stats, "mean_payoff_p1", last.cumulative_mean_u);
    stat(&mut stats, "mean_payoff_p2", last.cumulative_mean_v);
    SeedResult {
        seed,
        csv,
        stats,
        notes: BTreeMap::new(),
    }
}

fn run_causal(rounds: usize, truth: &str, seed: u64) -> Result<SeedResult, RunError> {
    let set = lightbulb_hypothesis_set();
    let mut rng = RandomSource::new(seed);
    let trajectory = causal_thompson_run(&set, truth, rounds, &mut rng)
        .map_err(|e| RunError::Runtime(format!("causal run failed: {e}")))?;
    let truth_index = set
        .outcomes()
        .iter()
        .position(|o| o == truth)
        .expect("validated truth");
    let mut csv =
        String::from("t,intervened_variable,intervened_value,observed,posterior_fraction,posterior\n");
    for r in &trajectory {
        let observed = r
            .observed
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        // the reported posterior is the mass on the forward hypothesis
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.t,
            r.intervened_variable,
            r.intervened_value,
            observed,
            r.posterior_fraction(0),
            fmt_f64(r.posterior_float(0)),
        );
    }
    let last = trajectory.last().expect("at least one round");
    let mut stats = BTreeMap::new();
    stat(
        &mut stats,
        "final_posterior_truth",
        last.posterior_float(truth_index),
    );
    stat(&mut stats, "final_posterior_forward", last.posterior_float(0));
    let mut notes = BTreeMap::new();
    notes.insert("truth".to_string(), truth.to_string());
    notes.insert(
        "final_posterior_truth_fraction".to_string(),
        last.posterior_fraction(truth_index),
    );
    Ok(SeedResult {
        seed,
        csv,
        stats,
        notes,
    })
}

fn run_chain(
    k: usize,
    horizon: usize,
    agent: AgentKind,
    swap: bool,
    resample_period: usize,
    stop_at_first_reward: bool,
    seed: u64,
) -> SeedResult {
    let run = match agent {
        AgentKind::Thompson => {
            let mut rng = RandomSource::new(seed);
            run_chain_thompson(k, swap, horizon, resample_period, stop_at_first_reward, &mut rng)
        }
        AgentKind::Optimal => run_chain_optimal(k, swap, horizon, stop_at_first_reward),
    };
    let mut csv = String::from("t,action,reward,posterior_plain\n");
    for r in &run.records {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            r.t,
            r.action,
            r.reward,
            fmt_f64(r.posterior_plain)
        );
    }
    let steps = run.records.len();
    let mut stats = BTreeMap::new();
    stat(
        &mut stats,
        "first_reward_step",
        run.first_reward_step.map_or(-1.0, |t| t as f64),
    );
    stat(&mut stats, "total_reward", run.total_reward as f64);
    stat(
        &mut stats,
        "mean_reward",
        run.total_reward as f64 / steps as f64,
    );
    stat(
        &mut stats,
        "final_posterior_plain",
        run.records.last().map_or(0.5, |r| r.posterior_plain),
    );
    SeedResult {
        seed,
        csv,
        stats,
        notes: BTreeMap::new(),
    }
}

fn run_seu(seed: u64) -> SeedResult {
    let prior = BeliefState::uniform(2);
    let predictors = vec![
        vec![vec![0.25, 0.75], vec![0.25, 0.75]],
        vec![vec![0.75, 0.25], vec![0.75, 0.25]],
    ];
    let utility = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let (value_a, value_b) = seu_order_comparison(&prior, &predictors, &utility);
    let csv = format!(
        "value_a,value_b\n{},{}\n",
        fmt_f64(value_a),
        fmt_f64(value_b)
    );
    let mut stats = BTreeMap::new();
    stat(&mut stats, "value_a", value_a);
    stat(&mut stats, "value_b", value_b);
    SeedResult {
        seed,
        csv,
        stats,
        notes: BTreeMap::new(),
    }
}

fn run_coding(seed: u64) -> SeedResult {
    let (hyps, prior) = two_hypothesis_coding_instance();
    let mixture = MixtureBehavior {
        hypotheses: hyps.clone(),
        prior: prior.clone(),
    };
    let mixture_cost = adaptive_code_cost(&mixture, &hyps, &prior, 1);
    let mut csv = String::from("candidate_action_mass,candidate_observation_mass,cost\n");
    let mut grid_min = f64::INFINITY;
    for i in 0..=20 {
        for j in 0..=20 {
            let p = i as f64 * 0.05;
            let q = j as f64 * 0.05;
            let candidate = FixedBehavior {
                action: vec![p, 1.0 - p],
                observation: vec![q, 1.0 - q],
            };
            let cost = adaptive_code_cost(&candidate, &hyps, &prior, 1);
            grid_min = grid_min.min(cost);
            let _ = writeln!(csv, "{},{},{}", fmt_f64(p), fmt_f64(q), fmt_f64(cost));
        }
    }
    let mut stats = BTreeMap::new();
    stat(&mut stats, "mixture_cost", mixture_cost);
    stat(&mut stats, "grid_min_cost", grid_min);
    stat(
        &mut stats,
        "mixture_is_min",
        f64::from(u8::from(mixture_cost <= grid_min)),
    );
    SeedResult {
        seed,
        csv,
        stats,
        notes: BTreeMap::new(),
    }
}

fn run_seed(experiment: &Experiment, seed: u64) -> Result<SeedResult, RunError> {
    match experiment {
        Experiment::Pennies { rounds } => Ok(run_pennies(*rounds, seed)),
        Experiment::Causal { rounds, truth } => run_causal(*rounds, truth, seed),
        Experiment::Chain {
            k,
            horizon,
            agent,
            swap,
            resample_period,
            stop_at_first_reward,
        } => Ok(run_chain(
            *k,
            *horizon,
            *agent,
            *swap,
            *resample_period,
            *stop_at_first_reward,
            seed,
        )),
        Experiment::Seu => Ok(run_seu(seed)),
        Experiment::Coding => Ok(run_coding(seed)),
    }
}

fn aggregate(per_seed: &[PerSeed]) -> BTreeMap<String, Aggregate> {
    let mut out = BTreeMap::new();
    if per_seed.is_empty() {
        return out;
    }
    for key in per_seed[0].stats.keys() {
        let values: Vec<f64> = per_seed.iter().filter_map(|p| p.stats.get(key)).copied().collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        out.insert(
            key.clone(),
            Aggregate {
                mean: round_sig(mean),
                min,
                max,
            },
        );
    }
    out
}

fn headline_keys(experiment: &Experiment) -> &'static [&'static str] {
    match experiment {
        Experiment::Pennies { .. } => &["final_theta_mean", "final_xi_mean", "mean_payoff_p1"],
        Experiment::Causal { .. } => &["final_posterior_truth"],
        Experiment::Chain { .. } => &["first_reward_step", "mean_reward"],
        Experiment::Seu => &["value_a", "value_b"],
        Experiment::Coding => &["mixture_cost", "grid_min_cost"],
    }
}

/// Runs every seed (concurrently up to `jobs`), writes one CSV per seed
/// plus `summary.json`, and prints a one-line digest unless quieted.
pub fn execute(
    plan: &RunPlan,
    out_dir: &Path,
    jobs: usize,
    quiet: bool,
) -> Result<SummaryFile, RunError> {
    fs::create_dir_all(out_dir).map_err(|source| RunError::Io {
        context: format!("creating {}", out_dir.display()),
        source,
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| RunError::Runtime(format!("thread pool: {e}")))?;
    let results: Result<Vec<SeedResult>, RunError> = pool.install(|| {
        plan.seeds
            .par_iter()
            .map(|&seed| run_seed(&plan.experiment, seed))
            .collect()
    });
    let results = results?;

    let mut per_seed = Vec::with_capacity(results.len());
    for result in results {
        let path = out_dir.join(format!("{}_seed_{}.csv", plan.name, result.seed));
        fs::write(&path, &result.csv).map_err(|source| RunError::Io {
            context: format!("writing {}", path.display()),
            source,
        })?;
        per_seed.push(PerSeed {
            seed: result.seed,
            stats: result.stats,
            notes: result.notes,
        });
    }
    let summary = SummaryFile {
        experiment: plan.name.to_string(),
        seeds: plan.seeds.clone(),
        aggregate: aggregate(&per_seed),
        per_seed,
    };
    let path = out_dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| RunError::Runtime(format!("serializing summary: {e}")))?;
    fs::write(&path, json + "\n").map_err(|source| RunError::Io {
        context: format!("writing {}", path.display()),
        source,
    })?;

    if !quiet {
        let mut line = format!("{}: seeds={}", plan.name, summary.seeds.len());
        for key in headline_keys(&plan.experiment) {
            if let Some(agg) = summary.aggregate.get(*key) {
                let _ = write!(
                    line,
                    " {key}[mean={} min={} max={}]",
                    fmt_f64(agg.mean),
                    fmt_f64(agg.min),
                    fmt_f64(agg.max)
                );
            }
        }
        println!("{line}");
    }
    Ok(summary)
}
