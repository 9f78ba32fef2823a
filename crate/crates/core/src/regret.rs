//! Sampled regret matching.
//!
//! Each player keeps a cumulative regret per sampled action. Per iteration,
//! every player forms its acting policy from positive regrets, samples one
//! action, and then receives the utility of each of its own actions against
//! the single sampled opponent joint; regrets move by the difference to the
//! policy's expected utility. Variants: linear weighting (prior iterations
//! discounted by `t/(t+1)`) and optimism (the most recent instantaneous
//! regret counted once more when forming the acting policy).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exploit;
use crate::rng::{child_seed, rng_from_seed, EngineRng};
use crate::subgame::SubgameSpec;

/// A probability distribution over a player's sampled actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy(Vec<f64>);

impl Policy {
    /// Uniform distribution over `n` actions.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "policy over zero actions");
        Policy(vec![1.0 / n as f64; n])
    }

    /// Normalizes nonnegative weights into a policy.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::contract("policy weights must be nonempty"));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::contract("policy weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Ok(Policy::uniform(weights.len()));
        }
        Ok(Policy(weights.iter().map(|w| w / total).collect()))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn prob(&self, action: usize) -> f64 {
        self.0[action]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Expected value of `values` under this policy.
    pub fn expectation(&self, values: &[f64]) -> f64 {
        self.0.iter().zip(values).map(|(p, v)| p * v).sum()
    }

    /// Samples an action index by inverse CDF.
    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        for (i, &p) in self.0.iter().enumerate() {
            cum += p;
            if u < cum {
                return i;
            }
        }
        self.0.len() - 1
    }

    /// True when entries are nonnegative and sum to 1 within `1e-9`.
    pub fn is_normalized(&self) -> bool {
        self.0.iter().all(|&p| p >= 0.0) && (self.0.iter().sum::<f64>() - 1.0).abs() <= 1e-9
    }
}

/// Positive-part normalization of a regret vector; uniform when no regret
/// is positive.
pub fn policy_from_regrets(regrets: &[f64]) -> Result<Policy> {
    if regrets.is_empty() {
        return Err(Error::contract("policy_from_regrets: empty regret vector"));
    }
    let positive: Vec<f64> = regrets.iter().map(|&r| r.max(0.0)).collect();
    Policy::from_weights(&positive)
}

/// Configuration for a regret matching run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmConfig {
    pub iterations: u64,
    /// Discount prior regrets and average-policy weights by `t/(t+1)`.
    pub linear: bool,
    /// Count the most recent instantaneous regret twice in the acting policy.
    pub optimism: bool,
    pub seed: u64,
    /// Record an exploitability trace point every this many iterations
    /// (plus iterations 1 and the last); 0 disables tracing.
    pub trace_every: u64,
}

impl Default for RmConfig {
    fn default() -> Self {
        RmConfig {
            iterations: 1024,
            linear: true,
            optimism: true,
            seed: 0,
            trace_every: 0,
        }
    }
}

impl RmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::contract("iterations must be >= 1"));
        }
        Ok(())
    }
}

/// One player's regret-matching state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlayerRegrets {
    regrets: Vec<f64>,
    avg_weights: Vec<f64>,
    last_instant: Vec<f64>,
    iteration: u64,
}

impl PlayerRegrets {
    pub fn new(num_actions: usize) -> Self {
        PlayerRegrets {
            regrets: vec![0.0; num_actions],
            avg_weights: vec![0.0; num_actions],
            last_instant: vec![0.0; num_actions],
            iteration: 0,
        }
    }

    pub fn num_actions(&self) -> usize {
        self.regrets.len()
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn regrets(&self) -> &[f64] {
        &self.regrets
    }

    pub fn last_instant(&self) -> &[f64] {
        &self.last_instant
    }

    /// The policy used to act and sample this iteration. With optimism the
    /// most recent instantaneous regret is added once more; before any
    /// update both variants are uniform.
    pub fn acting_policy(&self, optimism: bool) -> Policy {
        if optimism {
            let boosted: Vec<f64> = self
                .regrets
                .iter()
                .zip(&self.last_instant)
                .map(|(r, l)| r + l)
                .collect();
            policy_from_regrets(&boosted).expect("state vectors are nonempty")
        } else {
            policy_from_regrets(&self.regrets).expect("state vectors are nonempty")
        }
    }

    /// Applies one sampled update given the utility of every own action
    /// against the sampled opponent joint.
    ///
    /// The instantaneous regret of action `a` is `utilities[a]` minus the
    /// acting policy's expected utility. With `linear`, prior regrets and
    /// average-policy weights are first discounted by `t/(t+1)`.
    pub fn update(&mut self, utilities: &[f64], linear: bool, optimism: bool) -> Result<()> {
        if utilities.len() != self.regrets.len() {
            return Err(Error::contract(format!(
                "utilities length {} does not match action count {}",
                utilities.len(),
                self.regrets.len()
            )));
        }
        let acting = self.acting_policy(optimism);
        let baseline = acting.expectation(utilities);
        if linear {
            let t = self.iteration as f64;
            let discount = t / (t + 1.0);
            for r in &mut self.regrets {
                *r *= discount;
            }
            for w in &mut self.avg_weights {
                *w *= discount;
            }
        }
        for (a, &u) in utilities.iter().enumerate() {
            let instant = u - baseline;
            self.regrets[a] += instant;
            self.last_instant[a] = instant;
        }
        for (w, &p) in self.avg_weights.iter_mut().zip(acting.probs()) {
            *w += p;
        }
        self.iteration += 1;
        Ok(())
    }

    /// Normalized average-policy weights; uniform before any update.
    pub fn average_policy(&self) -> Policy {
        Policy::from_weights(&self.avg_weights).expect("state vectors are nonempty")
    }
}

/// Regret state for all players of a subgame.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegretState {
    pub players: Vec<PlayerRegrets>,
}

impl RegretState {
    pub fn new(action_counts: &[usize]) -> Self {
        RegretState {
            players: action_counts
                .iter()
                .map(|&n| PlayerRegrets::new(n))
                .collect(),
        }
    }
}

/// One point of the exploitability trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: u64,
    pub exploitability: f64,
}

/// Outcome of a regret matching run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumResult {
    /// Acting policy per player after the last update.
    pub final_policies: Vec<Policy>,
    /// Normalized average policy per player.
    pub avg_policies: Vec<Policy>,
    /// Mean sampled utility of each own action over all iterations.
    pub avg_utilities: Vec<Vec<f64>>,
    /// Unnormalized exploitability of the average policy, recorded per
    /// `trace_every`; empty when tracing is off or the oracle is not exact.
    pub trace: Vec<TracePoint>,
    pub iterations: u64,
    /// Oracle kind the run (and its trace) evaluated against.
    pub oracle_kind: String,
}

/// Runs sampled regret matching on a subgame.
///
/// Per iteration every player computes its acting policy and samples one
/// action; each player then receives the utility of each own action against
/// the sampled opponent joint (one oracle evaluation per own action) and
/// updates its regrets. Fully reproducible from `config.seed`.
pub fn run_rm(spec: &SubgameSpec, config: &RmConfig) -> Result<EquilibriumResult> {
    config.validate()?;
    let counts = spec.action_counts().to_vec();
    let num_players = counts.len();
    let mut state = RegretState::new(&counts);
    let mut rng: EngineRng = rng_from_seed(child_seed(config.seed, 0));
    let query_base = child_seed(config.seed, 1);
    let mut query_counter: u64 = 0;

    let mut util_sums: Vec<Vec<f64>> = counts.iter().map(|&n| vec![0.0; n]).collect();
    let mut trace = Vec::new();
    let trace_on = config.trace_every > 0 && spec.oracle().is_exact();

    let mut sampled = vec![0usize; num_players];
    let mut joint = vec![0usize; num_players];
    for t in 1..=config.iterations {
        let acting: Vec<Policy> = state
            .players
            .iter()
            .map(|p| p.acting_policy(config.optimism))
            .collect();
        for (i, policy) in acting.iter().enumerate() {
            sampled[i] = policy.sample(&mut rng);
        }
        for i in 0..num_players {
            joint.copy_from_slice(&sampled);
            let mut utilities = vec![0.0; counts[i]];
            for (a, slot) in utilities.iter_mut().enumerate() {
                joint[i] = a;
                let q = child_seed(query_base, query_counter);
                query_counter += 1;
                *slot = spec.oracle().evaluate_for(i, &joint, q)?;
            }
            for (sum, &u) in util_sums[i].iter_mut().zip(&utilities) {
                *sum += u;
            }
            state.players[i].update(&utilities, config.linear, config.optimism)?;
        }
        if trace_on && (t == 1 || t % config.trace_every == 0 || t == config.iterations) {
            let avg: Vec<Policy> = state.players.iter().map(|p| p.average_policy()).collect();
            let report = exploit::exploitability(spec, &avg, false)?;
            trace.push(TracePoint {
                iteration: t,
                exploitability: report.total,
            });
        }
    }

    let final_policies: Vec<Policy> = state
        .players
        .iter()
        .map(|p| p.acting_policy(config.optimism))
        .collect();
    let avg_policies: Vec<Policy> = state.players.iter().map(|p| p.average_policy()).collect();
    let avg_utilities: Vec<Vec<f64>> = util_sums
        .into_iter()
        .map(|sums| {
            sums.into_iter()
                .map(|s| s / config.iterations as f64)
                .collect()
        })
        .collect();

    Ok(EquilibriumResult {
        final_policies,
        avg_policies,
        avg_utilities,
        trace,
        iterations: config.iterations,
        oracle_kind: spec.oracle().kind().to_string(),
    })
}

/// Samples the action the agent ultimately plays from the final iteration's
/// policy.
pub fn sample_final_action(
    result: &EquilibriumResult,
    player: usize,
    rng: &mut impl Rng,
) -> usize {
    result.final_policies[player].sample(rng)
}
