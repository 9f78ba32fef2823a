//! One-ply subgame search: blueprint candidate proposal, truncated rollout
//! utilities, and the equilibrium-search and best-response agents.

use serde::{Deserialize, Serialize};

use crate::blueprint::Blueprint;
use crate::error::{Error, Result};
use crate::grid::{
    action_label, adjudicate, terminal_value, GameState, JointAction, Player, PlayerAction,
};
use crate::regret::{run_rm, sample_final_action, EquilibriumResult, RmConfig};
use crate::rng::{child_seed, rng_from_seed, EngineRng};
use crate::scoring::{sos_scores, ScoreVector};
use crate::subgame::{SubgameSpec, UtilityOracle};

/// Whether an agent plays its equilibrium part or a pure best response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Equilibrium,
    BestResponse,
}

/// One-ply search parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Candidate actions per unit: each player considers its top
    /// `ceil(actions_per_unit * units)` blueprint actions.
    pub actions_per_unit: f64,
    /// Movement phases to roll the blueprint out before truncating to the
    /// state-value estimate; adjustment phases are free.
    pub rollout_horizon: u32,
    /// Monte Carlo rollouts averaged per utility query during regret
    /// matching.
    pub rollouts_per_query: u32,
    /// Rollouts per candidate action for the best-response agent.
    pub br_rollouts: u32,
    pub rm: RmConfig,
    pub mode: SearchMode,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            actions_per_unit: 5.0,
            rollout_horizon: 2,
            rollouts_per_query: 1,
            br_rollouts: 64,
            rm: RmConfig {
                iterations: 256,
                ..RmConfig::default()
            },
            mode: SearchMode::Equilibrium,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.actions_per_unit > 0.0) {
            return Err(Error::Config("actions_per_unit must be > 0".into()));
        }
        self.rm.validate()
    }

    fn action_limit(&self, units: usize) -> usize {
        (self.actions_per_unit * units as f64).ceil() as usize
    }
}

/// The top `ceil(m * units)` blueprint actions for `player`, probability
/// descending with lexicographic tie-breaks; fewer when the blueprint's
/// support is smaller. Errors for a player without units.
pub fn propose_actions(
    blueprint: &Blueprint,
    state: &GameState,
    player: Player,
    m: f64,
) -> Result<Vec<PlayerAction>> {
    let units = state.unit_count(player);
    if units == 0 {
        return Err(Error::contract(format!(
            "player {} has no units and is out of the subgame",
            player.0
        )));
    }
    let limit = (m * units as f64).ceil() as usize;
    Ok(blueprint
        .candidate_actions(state, player, limit)
        .into_iter()
        .map(|(action, _)| action)
        .collect())
}

/// State value at rollout truncation: sum-of-squares of current supply
/// center counts.
pub fn state_value(state: &GameState) -> Result<ScoreVector> {
    sos_scores(&state.sc_counts())
}

/// Applies `joint`, then plays blueprint-sampled actions for `horizon`
/// further movement phases or until the game ends; returns the terminal
/// score or the truncation-state value estimate.
pub fn rollout_value(
    state: &GameState,
    joint: &JointAction,
    blueprint: &Blueprint,
    horizon: u32,
    rng: &mut EngineRng,
) -> Result<ScoreVector> {
    let mut current = adjudicate(state, joint)?;
    for _ in 0..horizon {
        if current.is_terminal() {
            return terminal_value(&current);
        }
        let sampled: JointAction = (0..current.num_players())
            .map(|p| blueprint.sample_action(&current, Player(p as u8), rng))
            .collect();
        current = adjudicate(&current, &sampled)?;
    }
    if current.is_terminal() {
        terminal_value(&current)
    } else {
        state_value(&current)
    }
}

/// Utility oracle backed by blueprint rollouts from a fixed root state.
pub struct RolloutOracle {
    state: GameState,
    candidates: Vec<Vec<PlayerAction>>,
    action_counts: Vec<usize>,
    blueprint: Blueprint,
    horizon: u32,
    rollouts: u32,
}

impl RolloutOracle {
    pub fn new(
        state: GameState,
        candidates: Vec<Vec<PlayerAction>>,
        blueprint: Blueprint,
        horizon: u32,
        rollouts: u32,
    ) -> Result<Self> {
        if candidates.len() != state.num_players() {
            return Err(Error::contract("one candidate list per player required"));
        }
        if candidates.iter().any(Vec::is_empty) {
            return Err(Error::contract("candidate lists must be nonempty"));
        }
        let action_counts = candidates.iter().map(Vec::len).collect();
        Ok(RolloutOracle {
            state,
            candidates,
            action_counts,
            blueprint,
            horizon,
            rollouts: rollouts.max(1),
        })
    }

    pub fn candidates(&self) -> &[Vec<PlayerAction>] {
        &self.candidates
    }

    fn joint_for(&self, joint: &[usize]) -> Result<JointAction> {
        if joint.len() != self.action_counts.len() {
            return Err(Error::contract("joint index arity mismatch"));
        }
        joint
            .iter()
            .enumerate()
            .map(|(p, &a)| {
                self.candidates[p]
                    .get(a)
                    .cloned()
                    .ok_or_else(|| Error::contract(format!("player {p} action {a} out of range")))
            })
            .collect()
    }
}

impl UtilityOracle for RolloutOracle {
    fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    fn evaluate(&self, joint: &[usize], seed: u64) -> Result<Vec<f64>> {
        let full = self.joint_for(joint)?;
        let n = self.state.num_players();
        let mut mean = vec![0.0; n];
        for r in 0..self.rollouts {
            let mut rng = rng_from_seed(child_seed(seed, r as u64));
            let value = rollout_value(&self.state, &full, &self.blueprint, self.horizon, &mut rng)?;
            for (acc, &v) in mean.iter_mut().zip(value.scores()) {
                *acc += v;
            }
        }
        for acc in &mut mean {
            *acc /= self.rollouts as f64;
        }
        Ok(mean)
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn kind(&self) -> &'static str {
        "rollout"
    }
}

/// Everything a search agent's turn produces: the chosen action plus the
/// full subgame solution for logging.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchDecision {
    pub action: PlayerAction,
    pub action_index: usize,
    pub result: EquilibriumResult,
    /// Candidate actions per player, indexed like the subgame.
    pub candidates: Vec<Vec<PlayerAction>>,
    /// Blueprint probability of each candidate.
    pub blueprint_probs: Vec<Vec<f64>>,
    /// Display labels per candidate.
    pub labels: Vec<Vec<String>>,
}

/// Builds the one-turn subgame at `state`: every player's top blueprint
/// candidates (players without units get the single empty action) with a
/// rollout-backed utility oracle.
pub fn build_subgame(
    state: &GameState,
    blueprint: &Blueprint,
    cfg: &SearchConfig,
) -> Result<(SubgameSpec, Vec<Vec<PlayerAction>>, Vec<Vec<f64>>)> {
    cfg.validate()?;
    let mut candidates: Vec<Vec<PlayerAction>> = Vec::with_capacity(state.num_players());
    let mut probs: Vec<Vec<f64>> = Vec::with_capacity(state.num_players());
    for p in 0..state.num_players() {
        let player = Player(p as u8);
        let units = state.unit_count(player);
        if units == 0 {
            candidates.push(vec![Vec::new()]);
            probs.push(vec![1.0]);
            continue;
        }
        let scored = blueprint.candidate_actions(state, player, cfg.action_limit(units));
        probs.push(scored.iter().map(|&(_, p)| p).collect());
        candidates.push(scored.into_iter().map(|(a, _)| a).collect());
    }
    let labels: Vec<Vec<String>> = candidates
        .iter()
        .map(|list| list.iter().map(|a| action_label(a, state)).collect())
        .collect();
    let oracle = RolloutOracle::new(
        state.clone(),
        candidates.clone(),
        blueprint.clone(),
        cfg.rollout_horizon,
        cfg.rollouts_per_query,
    )?;
    Ok((
        SubgameSpec::new(Box::new(oracle), Some(labels)),
        candidates,
        probs,
    ))
}

/// Equilibrium-search turn: solves the subgame with regret matching and
/// samples the agent's action from the final iteration's policy.
///
/// `seed` drives the whole turn; the `rm` seed in `cfg` is ignored in favor
/// of a stream derived from it.
pub fn search_act(
    state: &GameState,
    player: Player,
    blueprint: &Blueprint,
    cfg: &SearchConfig,
    seed: u64,
) -> Result<SearchDecision> {
    if state.unit_count(player) == 0 {
        return Err(Error::contract("search_act for a player without units"));
    }
    let (spec, candidates, blueprint_probs) = build_subgame(state, blueprint, cfg)?;
    let rm_cfg = RmConfig {
        seed: child_seed(seed, 0),
        ..cfg.rm.clone()
    };
    let result = run_rm(&spec, &rm_cfg)?;
    let mut rng = rng_from_seed(child_seed(seed, 1));
    let action_index = sample_final_action(&result, player.index(), &mut rng);
    let labels = spec.labels().cloned().unwrap_or_default();
    Ok(SearchDecision {
        action: candidates[player.index()][action_index].clone(),
        action_index,
        result,
        candidates,
        blueprint_probs,
        labels,
    })
}

/// Best-response turn: evaluates each own candidate against opponents
/// sampled from the blueprint (`br_rollouts` rollouts per candidate) and
/// plays the argmax of mean own utility, ties to the lexicographically
/// smallest action.
pub fn best_response_act(
    state: &GameState,
    player: Player,
    blueprint: &Blueprint,
    cfg: &SearchConfig,
    seed: u64,
) -> Result<PlayerAction> {
    cfg.validate()?;
    if state.unit_count(player) == 0 {
        return Err(Error::contract(
            "best_response_act for a player without units",
        ));
    }
    let candidates = propose_actions(blueprint, state, player, cfg.actions_per_unit)?;
    let mut best: Option<(f64, &PlayerAction)> = None;
    for (c, candidate) in candidates.iter().enumerate() {
        let mut mean = 0.0;
        for r in 0..cfg.br_rollouts.max(1) {
            let mut rng = rng_from_seed(child_seed(seed, (c as u64) << 32 | r as u64));
            let joint: JointAction = (0..state.num_players())
                .map(|p| {
                    if p == player.index() {
                        candidate.clone()
                    } else {
                        blueprint.sample_action(state, Player(p as u8), &mut rng)
                    }
                })
                .collect();
            let value =
                rollout_value(state, &joint, blueprint, cfg.rollout_horizon, &mut rng)?;
            mean += value.get(player.index());
        }
        mean /= cfg.br_rollouts.max(1) as f64;
        let better = match best {
            None => true,
            Some((best_value, best_action)) => {
                mean > best_value || (mean == best_value && candidate < best_action)
            }
        };
        if better {
            best = Some((mean, candidate));
        }
    }
    Ok(best.expect("nonempty candidates").1.clone())
}

/// Dispatches on the configured mode.
pub fn act(
    state: &GameState,
    player: Player,
    blueprint: &Blueprint,
    cfg: &SearchConfig,
    seed: u64,
) -> Result<PlayerAction> {
    match cfg.mode {
        SearchMode::Equilibrium => Ok(search_act(state, player, blueprint, cfg, seed)?.action),
        SearchMode::BestResponse => best_response_act(state, player, blueprint, cfg, seed),
    }
}
