//! Heuristic blueprint policy for GridConquest.
//!
//! Each unit scores its legal orders with handcrafted features; a softmax
//! over those scores gives a per-unit order distribution, and a player's
//! action probability is the product over its units. Candidate actions are
//! the highest-probability combinations, enumerated by beam search. The
//! same distributions drive action sampling during rollouts, sharpened or
//! flattened by a temperature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{canonicalize_action, GameState, Player, PlayerAction, Province, UnitOrder};
use crate::rng::EngineRng;

/// Feature weights of the per-unit order scorer.
const CLOSING_STEP: f64 = 1.0;
const ENTER_CENTER: f64 = 0.5;
const SUPPORT_FRIENDLY_MOVE: f64 = 0.3;

/// A scored candidate action: the action and its blueprint probability
/// (product of per-unit softmax probabilities).
pub type ScoredAction = (PlayerAction, f64);

/// Policy oracle over GridConquest states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Blueprint {
    /// Sampling temperature for rollouts; `0` plays the per-unit argmax.
    pub temperature: f64,
}

impl Default for Blueprint {
    fn default() -> Self {
        Blueprint { temperature: 0.75 }
    }
}

impl Blueprint {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0) {
            return Err(Error::Config("blueprint temperature must be >= 0".into()));
        }
        Ok(Blueprint { temperature })
    }

    /// Legal orders for the unit at `source` with their feature scores.
    fn scored_orders(
        &self,
        state: &GameState,
        player: Player,
        source: Province,
        dist: &[u32],
    ) -> Vec<(UnitOrder, f64)> {
        let board = &state.board;
        let step = |p: Province| -> f64 {
            if dist[p.index()] == u32::MAX {
                0.0
            } else {
                dist[p.index()] as f64
            }
        };
        let mut orders = vec![(UnitOrder::Hold { source }, 0.0)];
        for &target in board.neighbors(source) {
            let mut score = CLOSING_STEP * (step(source) - step(target));
            if board.is_supply_center(target) {
                score += ENTER_CENTER;
            }
            orders.push((UnitOrder::Move { source, target }, score));
        }
        for &target in board.neighbors(source) {
            if state.unit_at(target) == Some(player) {
                orders.push((UnitOrder::SupportHold { source, target }, 0.0));
            }
            // Support moves of adjacent friendly units into `target`.
            for &supported_source in board.neighbors(target) {
                if supported_source == source {
                    continue;
                }
                if state.unit_at(supported_source) == Some(player) {
                    orders.push((
                        UnitOrder::SupportMove {
                            source,
                            target,
                            supported_source,
                        },
                        SUPPORT_FRIENDLY_MOVE,
                    ));
                }
            }
        }
        orders
    }

    /// Per-unit order distributions at softmax temperature `tau`
    /// (`tau == 0` puts all mass on the best-scored order, ties to the
    /// canonically smallest).
    fn unit_distributions(
        &self,
        state: &GameState,
        player: Player,
        tau: f64,
    ) -> Vec<Vec<(UnitOrder, f64)>> {
        let targets: Vec<Province> = state
            .board
            .supply_centers()
            .filter(|&c| state.owner[c.index()] != Some(player))
            .collect();
        let dist = state.board.distances_from(&targets);
        state
            .unit_provinces(player)
            .into_iter()
            .map(|source| {
                let mut scored = self.scored_orders(state, player, source, &dist);
                scored.sort_by(|a, b| {
                    b.1.partial_cmp(&a.1)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then_with(|| a.0.cmp(&b.0))
                });
                if tau == 0.0 {
                    return scored
                        .into_iter()
                        .enumerate()
                        .map(|(i, (o, _))| (o, if i == 0 { 1.0 } else { 0.0 }))
                        .collect();
                }
                let top = scored[0].1;
                let weights: Vec<f64> = scored
                    .iter()
                    .map(|&(_, s)| ((s - top) / tau).exp())
                    .collect();
                let total: f64 = weights.iter().sum();
                scored
                    .into_iter()
                    .zip(weights)
                    .map(|((o, _), w)| (o, w / total))
                    .collect()
            })
            .collect()
    }

    /// The `limit` highest-probability actions with their blueprint
    /// probabilities, ordered by probability descending (ties favor the
    /// lexicographically smaller action). Enumerated by beam search of
    /// width `4 * limit` over per-unit distributions at temperature 1.
    pub fn candidate_actions(
        &self,
        state: &GameState,
        player: Player,
        limit: usize,
    ) -> Vec<ScoredAction> {
        if limit == 0 {
            return Vec::new();
        }
        let per_unit = self.unit_distributions(state, player, 1.0);
        if per_unit.is_empty() {
            return Vec::new();
        }
        let beam_width = 4 * limit;
        let mut beam: Vec<(Vec<UnitOrder>, f64)> = vec![(Vec::new(), 1.0)];
        for unit_orders in &per_unit {
            let mut extended = Vec::with_capacity(beam.len() * unit_orders.len());
            for (prefix, prob) in &beam {
                for &(order, p) in unit_orders {
                    let mut next = prefix.clone();
                    next.push(order);
                    extended.push((next, prob * p));
                }
            }
            extended.sort_by(|a, b| {
                b.1.partial_cmp(&a.1)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| a.0.cmp(&b.0))
            });
            extended.truncate(beam_width);
            beam = extended;
        }
        beam.truncate(limit);
        beam.into_iter()
            .map(|(mut action, prob)| {
                canonicalize_action(&mut action);
                (action, prob)
            })
            .collect()
    }

    /// Samples a full action by drawing each unit's order independently at
    /// the blueprint temperature.
    pub fn sample_action(
        &self,
        state: &GameState,
        player: Player,
        rng: &mut EngineRng,
    ) -> PlayerAction {
        use rand::Rng;
        let per_unit = self.unit_distributions(state, player, self.temperature);
        let mut action: PlayerAction = per_unit
            .iter()
            .map(|orders| {
                if self.temperature == 0.0 {
                    return orders[0].0;
                }
                let u: f64 = rng.gen();
                let mut cum = 0.0;
                for &(o, p) in orders {
                    cum += p;
                    if u < cum {
                        return o;
                    }
                }
                orders.last().expect("nonempty order list").0
            })
            .collect();
        canonicalize_action(&mut action);
        action
    }

    /// Blueprint probability of an exact action (product over per-unit
    /// order probabilities at temperature 1); 0 when any order is illegal.
    pub fn action_probability(
        &self,
        state: &GameState,
        player: Player,
        action: &PlayerAction,
    ) -> f64 {
        let per_unit = self.unit_distributions(state, player, 1.0);
        if per_unit.len() != action.len() {
            return 0.0;
        }
        let mut prob = 1.0;
        for order in action {
            let source_dist = per_unit
                .iter()
                .find(|orders| orders.first().map(|(o, _)| o.source()) == Some(order.source()));
            match source_dist.and_then(|orders| orders.iter().find(|(o, _)| o == order)) {
                Some(&(_, p)) => prob *= p,
                None => return 0.0,
            }
        }
        prob
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn candidates_are_distinct_sorted_and_canonical() {
        let state = GameState::new_standard();
        let bp = Blueprint::default();
        let cands = bp.candidate_actions(&state, Player(0), 10);
        assert_eq!(cands.len(), 10);
        for window in cands.windows(2) {
            assert!(window[0].1 >= window[1].1);
            assert_ne!(window[0].0, window[1].0);
        }
        for (action, prob) in &cands {
            assert!(*prob > 0.0);
            assert_eq!(action.len(), 2);
            let mut sorted = action.clone();
            canonicalize_action(&mut sorted);
            assert_eq!(&sorted, action);
        }
    }

    #[test]
    fn support_limited_blueprint_returns_fewer() {
        // A lone unit has a finite order set; asking for more candidates
        // than exist returns them all without padding.
        let mut state = GameState::new_standard();
        state.units = vec![None; 16];
        state.units[5] = Some(Player(0));
        let bp = Blueprint::default();
        let cands = bp.candidate_actions(&state, Player(0), 50);
        assert_eq!(cands.len(), 5); // hold + four moves
    }

    #[test]
    fn zero_temperature_sampling_is_deterministic() {
        let state = GameState::new_standard();
        let bp = Blueprint::new(0.0).unwrap();
        let a = bp.sample_action(&state, Player(1), &mut rng_from_seed(1));
        let b = bp.sample_action(&state, Player(1), &mut rng_from_seed(999));
        assert_eq!(a, b);
    }

    #[test]
    fn action_probability_matches_candidate_scores() {
        let state = GameState::new_standard();
        let bp = Blueprint::default();
        for (action, prob) in bp.candidate_actions(&state, Player(2), 5) {
            let direct = bp.action_probability(&state, Player(2), &action);
            assert!((direct - prob).abs() < 1e-12);
        }
    }

    #[test]
    fn top_opening_action_moves_out() {
        // From the opening, the most likely action closes distance to
        // foreign centers rather than holding.
        let state = GameState::new_standard();
        let bp = Blueprint::default();
        let (best, _) = &bp.candidate_actions(&state, Player(0), 1)[0];
        for order in best {
            assert!(matches!(order, UnitOrder::Move { .. }));
        }
    }

    #[test]
    fn sampled_actions_are_legal() {
        let state = GameState::new_standard();
        let bp = Blueprint::default();
        let mut rng = rng_from_seed(5);
        for _ in 0..50 {
            let mut joint = Vec::new();
            for p in 0..4 {
                joint.push(bp.sample_action(&state, Player(p), &mut rng));
            }
            crate::grid::validate_joint(&state, &joint).unwrap();
        }
    }
}
