//! Experiment orchestration: agents, seeded game play, tournaments, sweeps,
//! and replayable game records.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blueprint::Blueprint;
use crate::error::{Error, Result};
use crate::grid::{adjudicate, terminal_value, GameState, JointAction, Player, PlayerAction};
use crate::rng::{child_seed, rng_from_seed};
use crate::scoring::ScoreVector;
use crate::search::{best_response_act, search_act, SearchConfig, SearchDecision, SearchMode};

/// An agent seated in a game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AgentSpec {
    /// Samples directly from the blueprint at its temperature.
    Blueprint {
        #[serde(default)]
        blueprint: Blueprint,
    },
    /// One-ply equilibrium search over blueprint candidates.
    SearchBot {
        #[serde(default)]
        blueprint: Blueprint,
        #[serde(default)]
        search: SearchConfig,
    },
    /// Best response to the blueprint over its own candidates.
    BrBot {
        #[serde(default)]
        blueprint: Blueprint,
        #[serde(default)]
        search: SearchConfig,
    },
}

impl AgentSpec {
    pub fn blueprint_default() -> Self {
        AgentSpec::Blueprint {
            blueprint: Blueprint::default(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AgentSpec::Blueprint { .. } => "blueprint",
            AgentSpec::SearchBot { .. } => "searchbot",
            AgentSpec::BrBot { .. } => "brbot",
        }
    }

    /// One turn: the chosen action, plus the full subgame solution when the
    /// agent runs equilibrium search.
    pub fn act(
        &self,
        state: &GameState,
        player: Player,
        seed: u64,
    ) -> Result<(PlayerAction, Option<SearchDecision>)> {
        match self {
            AgentSpec::Blueprint { blueprint } => {
                let mut rng = rng_from_seed(seed);
                Ok((blueprint.sample_action(state, player, &mut rng), None))
            }
            AgentSpec::SearchBot { blueprint, search } => {
                let cfg = SearchConfig {
                    mode: SearchMode::Equilibrium,
                    ..search.clone()
                };
                let decision = search_act(state, player, blueprint, &cfg, seed)?;
                Ok((decision.action.clone(), Some(decision)))
            }
            AgentSpec::BrBot { blueprint, search } => {
                let cfg = SearchConfig {
                    mode: SearchMode::BestResponse,
                    ..search.clone()
                };
                Ok((best_response_act(state, player, blueprint, &cfg, seed)?, None))
            }
        }
    }
}

/// One movement phase of a recorded game.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub year: u16,
    pub joint: JointAction,
    /// Subgame solutions of the seats that ran equilibrium search.
    pub decisions: Vec<(usize, SearchDecision)>,
}

/// A full game: enough to replay it through the adjudicator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameRecord {
    pub seed: u64,
    pub agents: Vec<String>,
    pub initial: GameState,
    pub phases: Vec<PhaseRecord>,
    pub final_state: GameState,
    pub scores: ScoreVector,
}

/// Plays one seeded game. Eliminated players submit the empty action; the
/// per-phase, per-seat seeds derive from `seed`.
pub fn play_game(agents: &[AgentSpec], seed: u64, log_decisions: bool) -> Result<GameRecord> {
    let initial = GameState::new_standard();
    if agents.len() != initial.num_players() {
        return Err(Error::Config(format!(
            "need {} agents, got {}",
            initial.num_players(),
            agents.len()
        )));
    }
    let mut state = initial.clone();
    let mut phases = Vec::new();
    let mut phase_idx: u64 = 0;
    while !state.is_terminal() {
        let mut joint: JointAction = Vec::with_capacity(agents.len());
        let mut decisions = Vec::new();
        for (p, agent) in agents.iter().enumerate() {
            let player = Player(p as u8);
            if state.unit_count(player) == 0 {
                joint.push(Vec::new());
                continue;
            }
            let turn_seed = child_seed(seed, phase_idx * 16 + p as u64);
            let (action, decision) = agent.act(&state, player, turn_seed)?;
            joint.push(action);
            if log_decisions {
                if let Some(d) = decision {
                    decisions.push((p, d));
                }
            }
        }
        phases.push(PhaseRecord {
            year: state.phase.year,
            joint: joint.clone(),
            decisions,
        });
        state = adjudicate(&state, &joint)?;
        phase_idx += 1;
    }
    let scores = terminal_value(&state)?;
    Ok(GameRecord {
        seed,
        agents: agents.iter().map(|a| a.name().to_string()).collect(),
        initial,
        phases,
        final_state: state,
        scores,
    })
}

/// Replays a record through the adjudicator and checks it reaches the
/// recorded final state and scores.
pub fn replay(record: &GameRecord) -> Result<()> {
    let mut state = record.initial.clone();
    for phase in &record.phases {
        if phase.year != state.phase.year {
            return Err(Error::contract(format!(
                "phase year {} does not match state year {}",
                phase.year, state.phase.year
            )));
        }
        state = adjudicate(&state, &phase.joint)?;
    }
    if state != record.final_state {
        return Err(Error::contract("replayed final state differs"));
    }
    let scores = terminal_value(&state)?;
    if scores != record.scores {
        return Err(Error::contract("replayed scores differ"));
    }
    Ok(())
}

/// Mean and standard error over per-game scores of one seat kind.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeatSummary {
    pub agent: String,
    pub mean: f64,
    pub std_error: f64,
    pub games: usize,
}

/// Result of a one-versus-rest tournament.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchReport {
    pub agent_a: SeatSummary,
    pub agent_b: SeatSummary,
    /// Per game: (seed, seat of agent A, final scores).
    pub games: Vec<(u64, usize, ScoreVector)>,
}

fn summarize(agent: &str, samples: &[f64]) -> SeatSummary {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let std_error = if n > 1 {
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
        (var / n as f64).sqrt()
    } else {
        f64::INFINITY
    };
    SeatSummary {
        agent: agent.to_string(),
        mean,
        std_error,
        games: n,
    }
}

/// Seats one `agent_a` against copies of `agent_b` in every game, rotating
/// A's seat round-robin, and reports mean sum-of-squares scores per agent
/// kind. Games run concurrently; aggregation follows game order.
pub fn evaluate_1v6(
    agent_a: &AgentSpec,
    agent_b: &AgentSpec,
    num_games: usize,
    seed: u64,
) -> Result<MatchReport> {
    if num_games == 0 {
        return Err(Error::Config("num_games must be >= 1".into()));
    }
    let num_players = GameState::new_standard().num_players();
    let games: Vec<(u64, usize, ScoreVector)> = (0..num_games)
        .into_par_iter()
        .map(|g| -> Result<(u64, usize, ScoreVector)> {
            let a_seat = g % num_players;
            let mut agents = vec![agent_b.clone(); num_players];
            agents[a_seat] = agent_a.clone();
            let game_seed = child_seed(seed, g as u64);
            let record = play_game(&agents, game_seed, false)?;
            Ok((game_seed, a_seat, record.scores))
        })
        .collect::<Result<_>>()?;

    let a_scores: Vec<f64> = games.iter().map(|(_, seat, s)| s.get(*seat)).collect();
    let b_scores: Vec<f64> = games
        .iter()
        .flat_map(|(_, seat, s)| {
            (0..s.len())
                .filter(move |p| p != seat)
                .map(|p| s.get(p))
                .collect::<Vec<f64>>()
        })
        .collect();
    Ok(MatchReport {
        agent_a: summarize(agent_a.name(), &a_scores),
        agent_b: summarize(agent_b.name(), &b_scores),
        games,
    })
}

/// A tunable axis of the search configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    ActionsPerUnit,
    Iterations,
    RolloutHorizon,
}

impl SweepAxis {
    pub fn apply(self, cfg: &mut SearchConfig, value: f64) {
        match self {
            SweepAxis::ActionsPerUnit => cfg.actions_per_unit = value,
            SweepAxis::Iterations => cfg.rm.iterations = value.max(1.0) as u64,
            SweepAxis::RolloutHorizon => cfg.rollout_horizon = value.max(0.0) as u32,
        }
    }
}

/// Runs one tournament per axis value against a shared opponent. Each value
/// gets a seed offset derived from the common master seed.
pub fn sweep(
    axis: SweepAxis,
    values: &[f64],
    base: &AgentSpec,
    opponent: &AgentSpec,
    num_games: usize,
    seed: u64,
) -> Result<Vec<(f64, MatchReport)>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    values
        .iter()
        .enumerate()
        .map(|(k, &value)| {
            let agent = match base.clone() {
                AgentSpec::SearchBot {
                    blueprint,
                    mut search,
                } => {
                    axis.apply(&mut search, value);
                    AgentSpec::SearchBot { blueprint, search }
                }
                AgentSpec::BrBot {
                    blueprint,
                    mut search,
                } => {
                    axis.apply(&mut search, value);
                    AgentSpec::BrBot { blueprint, search }
                }
                other => other,
            };
            let report = evaluate_1v6(&agent, opponent, num_games, child_seed(seed, k as u64))?;
            Ok((value, report))
        })
        .collect()
}

/// Formats a subgame solution in policy-printout style: one block per
/// player, candidates sorted by final-policy probability.
pub fn format_decision(decision: &SearchDecision) -> String {
    let mut out = String::new();
    let result = &decision.result;
    for p in 0..result.final_policies.len() {
        let final_policy = &result.final_policies[p];
        let avg_value: f64 = final_policy
            .probs()
            .iter()
            .zip(&result.avg_utilities[p])
            .map(|(prob, u)| prob * u)
            .sum();
        out.push_str(&format!("PLAYER {p} avg_utility={avg_value:.5}\n"));
        out.push_str("  probs     bp_p      avg_u      orders\n");
        let mut rows: Vec<usize> = (0..final_policy.len()).collect();
        rows.sort_by(|&a, &b| {
            final_policy.prob(b)
                .partial_cmp(&final_policy.prob(a))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        for a in rows {
            let label = decision
                .labels
                .get(p)
                .and_then(|l| l.get(a))
                .cloned()
                .unwrap_or_else(|| format!("a{a}"));
            out.push_str(&format!(
                "  {:<9.5} {:<9.5} {:<10.5} {}\n",
                final_policy.prob(a),
                decision.blueprint_probs[p][a],
                result.avg_utilities[p][a],
                label
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regret::RmConfig;

    fn quick_search() -> AgentSpec {
        AgentSpec::SearchBot {
            blueprint: Blueprint::default(),
            search: SearchConfig {
                actions_per_unit: 1.5,
                rollout_horizon: 1,
                rm: RmConfig {
                    iterations: 8,
                    ..RmConfig::default()
                },
                ..SearchConfig::default()
            },
        }
    }

    #[test]
    fn blueprint_game_completes_and_replays() {
        let agents = vec![AgentSpec::blueprint_default(); 4];
        let record = play_game(&agents, 42, false).unwrap();
        let total: f64 = record.scores.scores().iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(!record.phases.is_empty());
        replay(&record).unwrap();
    }

    #[test]
    fn play_is_seed_deterministic() {
        let agents = vec![AgentSpec::blueprint_default(); 4];
        let a = play_game(&agents, 7, false).unwrap();
        let b = play_game(&agents, 7, false).unwrap();
        assert_eq!(a.final_state, b.final_state);
        assert_eq!(a.scores, b.scores);
    }

    #[test]
    fn search_game_records_decisions() {
        let mut agents = vec![AgentSpec::blueprint_default(); 4];
        agents[1] = quick_search();
        let record = play_game(&agents, 3, true).unwrap();
        let logged: usize = record.phases.iter().map(|ph| ph.decisions.len()).sum();
        assert!(logged > 0);
        replay(&record).unwrap();
        let printed = format_decision(&record.phases[0].decisions[0].1);
        assert!(printed.contains("probs     bp_p      avg_u      orders"));
        assert!(printed.contains("PLAYER 0"));
    }

    #[test]
    fn single_game_report_sums_to_one() {
        let bp = AgentSpec::blueprint_default();
        let report = evaluate_1v6(&bp, &bp, 1, 5).unwrap();
        assert_eq!(report.games.len(), 1);
        let total: f64 = report.games[0].2.scores().iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn seat_rotation_is_round_robin() {
        let bp = AgentSpec::blueprint_default();
        let report = evaluate_1v6(&bp, &bp, 8, 1).unwrap();
        let seats: Vec<usize> = report.games.iter().map(|(_, seat, _)| *seat).collect();
        assert_eq!(seats, vec![0, 1, 2, 3, 0, 1, 2, 3]);
    }

    #[test]
    fn sweep_produces_one_report_per_value() {
        let bp = AgentSpec::blueprint_default();
        let reports = sweep(
            SweepAxis::Iterations,
            &[2.0, 4.0],
            &quick_search(),
            &bp,
            2,
            9,
        )
        .unwrap();
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0].1.games.len(), 2);
        // Different axis values see different seeds.
        assert_ne!(reports[0].1.games[0].0, reports[1].1.games[0].0);
    }
}
