//! Game state and terminal scoring.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::{sos_scores, ScoreVector};

use super::board::{Board, Player, Province};

/// Phase season. Movement phases take orders; the adjustment that follows
/// each movement phase is deterministic and runs inside `adjudicate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Season {
    Movement,
    Adjustment,
}

/// Phase clock: one movement phase plus one adjustment phase per year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase {
    pub year: u16,
    pub season: Season,
}

/// Full game state. `units` and `owner` are indexed by province; supply
/// center ownership persists when a center is left vacant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameState {
    pub board: Arc<Board>,
    pub units: Vec<Option<Player>>,
    pub owner: Vec<Option<Player>>,
    pub phase: Phase,
    /// Maximum number of years. The year advances past this value only on
    /// the terminal state reached after the final adjustment.
    pub horizon: u16,
}

impl GameState {
    /// Starting position: every player owns and occupies its home centers.
    pub fn new(board: Arc<Board>, horizon: u16) -> GameState {
        let n = board.num_provinces();
        let mut units = vec![None; n];
        let mut owner = vec![None; n];
        for p in board.provinces() {
            if let Some(player) = board.home_of(p) {
                units[p.index()] = Some(player);
                owner[p.index()] = Some(player);
            }
        }
        GameState {
            board,
            units,
            owner,
            phase: Phase {
                year: 1,
                season: Season::Movement,
            },
            horizon,
        }
    }

    /// The standard board with the default ten-year horizon.
    pub fn new_standard() -> GameState {
        GameState::new(Arc::new(Board::standard()), 10)
    }

    pub fn num_players(&self) -> usize {
        self.board.num_players()
    }

    pub fn unit_at(&self, p: Province) -> Option<Player> {
        self.units[p.index()]
    }

    /// Provinces holding this player's units, ascending.
    pub fn unit_provinces(&self, player: Player) -> Vec<Province> {
        self.board
            .provinces()
            .filter(|&p| self.units[p.index()] == Some(player))
            .collect()
    }

    pub fn unit_count(&self, player: Player) -> usize {
        self.units.iter().filter(|&&u| u == Some(player)).count()
    }

    pub fn sc_count(&self, player: Player) -> u32 {
        self.board
            .supply_centers()
            .filter(|&p| self.owner[p.index()] == Some(player))
            .count() as u32
    }

    pub fn sc_counts(&self) -> Vec<u32> {
        (0..self.num_players())
            .map(|p| self.sc_count(Player(p as u8)))
            .collect()
    }

    /// The player holding a strict majority of supply centers, if any.
    pub fn majority_holder(&self) -> Option<Player> {
        let total = self.board.num_supply_centers() as u32;
        (0..self.num_players())
            .map(|p| Player(p as u8))
            .find(|&p| 2 * self.sc_count(p) > total)
    }

    pub fn is_terminal(&self) -> bool {
        self.majority_holder().is_some() || self.phase.year > self.horizon
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<GameState> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Score of a terminal state: 1 for a player holding a strict majority of
/// the supply centers, otherwise sum-of-squares of center counts.
pub fn terminal_value(state: &GameState) -> Result<ScoreVector> {
    if !state.is_terminal() {
        return Err(Error::contract("terminal_value on a non-terminal state"));
    }
    if let Some(winner) = state.majority_holder() {
        return Ok(ScoreVector::one_hot(state.num_players(), winner.index()));
    }
    sos_scores(&state.sc_counts())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starting_position_is_balanced() {
        let s = GameState::new_standard();
        for p in 0..4 {
            let player = Player(p);
            assert_eq!(s.unit_count(player), 2);
            assert_eq!(s.sc_count(player), 2);
        }
        assert!(!s.is_terminal());
        assert!(terminal_value(&s).is_err());
    }

    #[test]
    fn majority_holder_wins_one_hot() {
        let mut s = GameState::new_standard();
        // Hand player 0 five of the eight centers.
        for p in [3, 7, 8] {
            s.owner[p] = Some(Player(0));
        }
        assert_eq!(s.majority_holder(), Some(Player(0)));
        assert!(s.is_terminal());
        let v = terminal_value(&s).unwrap();
        assert_eq!(v.scores(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn horizon_draw_scores_by_sos() {
        let mut s = GameState::new_standard();
        s.phase.year = s.horizon + 1;
        assert!(s.is_terminal());
        let v = terminal_value(&s).unwrap();
        for p in 0..4 {
            assert!((v.get(p) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn eliminated_player_scores_zero() {
        let mut s = GameState::new_standard();
        s.owner[14] = Some(Player(0));
        s.owner[15] = Some(Player(1));
        s.phase.year = s.horizon + 1;
        let v = terminal_value(&s).unwrap();
        assert_eq!(v.get(2), 0.0);
        let counts = s.sc_counts();
        assert_eq!(counts, vec![3, 3, 0, 2]);
    }

    #[test]
    fn state_serialization_round_trips() {
        let s = GameState::new_standard();
        let text = s.to_json().unwrap();
        assert_eq!(GameState::from_json(&text).unwrap(), s);
    }
}
