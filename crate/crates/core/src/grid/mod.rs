//! GridConquest: a small simultaneous-move conquest game on a torus grid.
//!
//! Four players fight over supply centers with hold / move / support orders
//! resolved simultaneously. Dislodged units are destroyed (no retreats), and
//! each year ends with a deterministic adjustment phase that disbands or
//! builds units until every player's unit count matches its center count.

mod adjudicate;
mod board;
mod order;
mod state;

pub use adjudicate::{adjudicate, resolve_movement, run_adjustment};
pub use board::{Board, Player, Province};
pub use order::{
    action_label, all_hold, canonicalize_action, validate_joint, JointAction, PlayerAction,
    UnitOrder,
};
pub use state::{terminal_value, GameState, Phase, Season};
