//! Unit orders, per-player actions, and joint-action validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::board::{Player, Province};
use super::state::GameState;

/// One unit's order for a movement phase.
///
/// The derived ordering (variant order, then fields) is the canonical
/// ordering used for lexicographic tie-breaks.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum UnitOrder {
    Hold {
        source: Province,
    },
    /// Move to an adjacent province.
    Move {
        source: Province,
        target: Province,
    },
    /// Support the unit standing at `target` (adjacent to `source`).
    SupportHold {
        source: Province,
        target: Province,
    },
    /// Support the move `supported_source -> target`; `target` must be
    /// adjacent to `source`.
    SupportMove {
        source: Province,
        target: Province,
        supported_source: Province,
    },
}

impl UnitOrder {
    pub fn source(&self) -> Province {
        match *self {
            UnitOrder::Hold { source }
            | UnitOrder::Move { source, .. }
            | UnitOrder::SupportHold { source, .. }
            | UnitOrder::SupportMove { source, .. } => source,
        }
    }

    /// Display string using board names, e.g. `a1 - a2` or `b1 S a1 - a2`.
    pub fn describe(&self, state: &GameState) -> String {
        let name = |p: Province| state.board.province_name(p);
        match *self {
            UnitOrder::Hold { source } => format!("{} H", name(source)),
            UnitOrder::Move { source, target } => {
                format!("{} - {}", name(source), name(target))
            }
            UnitOrder::SupportHold { source, target } => {
                format!("{} S {}", name(source), name(target))
            }
            UnitOrder::SupportMove {
                source,
                target,
                supported_source,
            } => format!(
                "{} S {} - {}",
                name(source),
                name(supported_source),
                name(target)
            ),
        }
    }
}

/// One order per owned unit, sorted by source province.
pub type PlayerAction = Vec<UnitOrder>;

/// One action per player, indexed by player id. Players without units
/// submit the empty action.
pub type JointAction = Vec<PlayerAction>;

/// Sorts an action into canonical source order.
pub fn canonicalize_action(action: &mut PlayerAction) {
    action.sort_unstable();
}

/// Display label for a whole action, mirroring the order listing style of
/// game logs: `(a1 - a2, b1 S a1 - a2)`.
pub fn action_label(action: &PlayerAction, state: &GameState) -> String {
    if action.is_empty() {
        return "(none)".to_string();
    }
    let parts: Vec<String> = action.iter().map(|o| o.describe(state)).collect();
    format!("({})", parts.join(", "))
}

fn check_order(state: &GameState, player: Player, order: &UnitOrder) -> Result<()> {
    let board = &state.board;
    let source = order.source();
    if state.unit_at(source) != Some(player) {
        return Err(Error::RejectedAction(format!(
            "player {} has no unit at {}",
            player.0,
            board.province_name(source)
        )));
    }
    match *order {
        UnitOrder::Hold { .. } => Ok(()),
        UnitOrder::Move { source, target } => {
            if !board.is_adjacent(source, target) {
                return Err(Error::RejectedAction(format!(
                    "move {} -> {} is not adjacent",
                    board.province_name(source),
                    board.province_name(target)
                )));
            }
            Ok(())
        }
        UnitOrder::SupportHold { source, target } => {
            if target == source || !board.is_adjacent(source, target) {
                return Err(Error::RejectedAction("support-hold target not adjacent".into()));
            }
            if state.unit_at(target).is_none() {
                return Err(Error::RejectedAction("support-hold of an empty province".into()));
            }
            Ok(())
        }
        UnitOrder::SupportMove {
            source,
            target,
            supported_source,
        } => {
            if target == source || !board.is_adjacent(source, target) {
                return Err(Error::RejectedAction("support-move target not adjacent".into()));
            }
            if supported_source == source || !board.is_adjacent(supported_source, target) {
                return Err(Error::RejectedAction(
                    "supported move is not a legal move".into(),
                ));
            }
            if state.unit_at(supported_source).is_none() {
                return Err(Error::RejectedAction(
                    "support-move of an empty province".into(),
                ));
            }
            Ok(())
        }
    }
}

/// Validates a joint action: exactly one order per owned unit, every order
/// legal in `state`.
pub fn validate_joint(state: &GameState, joint: &JointAction) -> Result<()> {
    if joint.len() != state.num_players() {
        return Err(Error::RejectedAction(format!(
            "joint action covers {} players, expected {}",
            joint.len(),
            state.num_players()
        )));
    }
    for (p, action) in joint.iter().enumerate() {
        let player = Player(p as u8);
        let mut sources: Vec<Province> = action.iter().map(UnitOrder::source).collect();
        sources.sort_unstable();
        sources.dedup();
        if sources.len() != action.len() {
            return Err(Error::RejectedAction(format!(
                "player {p} issued multiple orders for one unit"
            )));
        }
        if sources != state.unit_provinces(player) {
            return Err(Error::RejectedAction(format!(
                "player {p} must order each of its units exactly once"
            )));
        }
        for order in action {
            check_order(state, player, order)?;
        }
    }
    Ok(())
}

/// The all-hold joint action; the identity baseline for tests and rollouts.
pub fn all_hold(state: &GameState) -> JointAction {
    (0..state.num_players())
        .map(|p| {
            state
                .unit_provinces(Player(p as u8))
                .into_iter()
                .map(|source| UnitOrder::Hold { source })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_hold_is_valid() {
        let s = GameState::new_standard();
        assert!(validate_joint(&s, &all_hold(&s)).is_ok());
    }

    #[test]
    fn non_adjacent_move_is_rejected() {
        let s = GameState::new_standard();
        let mut joint = all_hold(&s);
        joint[0][0] = UnitOrder::Move {
            source: Province(0),
            target: Province(5),
        };
        assert!(matches!(
            validate_joint(&s, &joint),
            Err(Error::RejectedAction(_))
        ));
    }

    #[test]
    fn missing_orders_are_rejected() {
        let s = GameState::new_standard();
        let mut joint = all_hold(&s);
        joint[1].pop();
        assert!(validate_joint(&s, &joint).is_err());
    }

    #[test]
    fn ordering_is_lexicographic_by_variant_then_fields() {
        let hold = UnitOrder::Hold { source: Province(3) };
        let mv = UnitOrder::Move {
            source: Province(0),
            target: Province(1),
        };
        assert!(hold < mv);
        let mv2 = UnitOrder::Move {
            source: Province(0),
            target: Province(4),
        };
        assert!(mv < mv2);
    }
}
