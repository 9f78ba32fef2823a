//! Simultaneous order resolution and the deterministic adjustment phase.
//!
//! Resolution rules:
//! - A move's strength is 1 plus its uncut, matching supports. A support is
//!   cut when the supporter's province is attacked by any unit other than
//!   the one it supports; supports that do not match the supported unit's
//!   actual order are void.
//! - A move succeeds only if it is the strictly strongest move into its
//!   destination and beats the defense there: a stationary defender's hold
//!   strength (1 plus uncut support-holds), a bounced mover's strength of 1,
//!   or, head-to-head, the opposing move's strength. Equal strengths bounce.
//! - Move cycles (other than head-to-head pairs) bounce. A unit never
//!   dislodges a unit of its own player.
//! - A unit that stays in a province taken by a successful move is removed;
//!   there are no retreats.
//!
//! After movement, supply-center ownership passes to occupiers, then each
//! player disbands down to its center count (farthest-from-nearest-owned-SC
//! first, ties to the smallest province id) or builds up to it on vacant
//! owned home centers (smallest id first).

use crate::error::{Error, Result};

use super::board::{Player, Province};
use super::order::{validate_joint, JointAction, UnitOrder};
use super::state::{GameState, Season};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Decision {
    Pending,
    Succeeds,
    Fails,
}

/// Resolves one movement phase: units move, dislodged units are removed,
/// supply-center ownership updates to occupiers. The returned state is in
/// the adjustment season of the same year.
pub fn resolve_movement(state: &GameState, joint: &JointAction) -> Result<GameState> {
    if state.phase.season != Season::Movement {
        return Err(Error::contract("resolve_movement outside a movement phase"));
    }
    validate_joint(state, joint)?;

    let n = state.board.num_provinces();
    let mut order_at: Vec<Option<(Player, UnitOrder)>> = vec![None; n];
    for (p, action) in joint.iter().enumerate() {
        for &order in action {
            order_at[order.source().index()] = Some((Player(p as u8), order));
        }
    }
    let move_target = |i: usize| -> Option<Province> {
        match order_at[i] {
            Some((_, UnitOrder::Move { target, .. })) => Some(target),
            _ => None,
        }
    };

    // Support accounting: void phantom supports, cut attacked supporters.
    let mut move_strength = vec![1u32; n]; // indexed by mover source
    let mut hold_strength = vec![1u32; n]; // indexed by stationary unit province
    for i in 0..n {
        let Some((_, order)) = order_at[i] else { continue };
        let supported_unit = match order {
            UnitOrder::SupportHold { target, .. } => target,
            UnitOrder::SupportMove {
                supported_source, ..
            } => supported_source,
            _ => continue,
        };
        let cut = (0..n).any(|j| {
            move_target(j) == Some(Province(i as u8)) && j != supported_unit.index()
        });
        if cut {
            continue;
        }
        match order {
            UnitOrder::SupportHold { target, .. } => {
                if move_target(target.index()).is_none() {
                    hold_strength[target.index()] += 1;
                }
            }
            UnitOrder::SupportMove {
                target,
                supported_source,
                ..
            } => {
                if move_target(supported_source.index()) == Some(target) {
                    move_strength[supported_source.index()] += 1;
                }
            }
            _ => unreachable!(),
        }
    }

    // Static competitor pass: only the unique strongest move into each
    // destination can succeed; ties bounce everyone.
    let movers: Vec<usize> = (0..n).filter(|&i| move_target(i).is_some()).collect();
    let mut decision = vec![Decision::Pending; n];
    for &d in movers
        .iter()
        .map(|&i| move_target(i).unwrap().index())
        .collect::<Vec<_>>()
        .iter()
    {
        let into: Vec<usize> = movers
            .iter()
            .copied()
            .filter(|&i| move_target(i) == Some(Province(d as u8)))
            .collect();
        let smax = into.iter().map(|&i| move_strength[i]).max().unwrap();
        let top: Vec<usize> = into
            .iter()
            .copied()
            .filter(|&i| move_strength[i] == smax)
            .collect();
        for &i in &into {
            if move_strength[i] < smax || top.len() > 1 {
                decision[i] = Decision::Fails;
            }
        }
    }

    // Fixed point over vacating chains; head-to-head pairs settle by
    // strength, leftover cycles bounce.
    loop {
        let mut changed = false;
        for &i in &movers {
            if decision[i] != Decision::Pending {
                continue;
            }
            let (player, _) = order_at[i].unwrap();
            let d = move_target(i).unwrap().index();
            let verdict = match state.units[d] {
                None => Decision::Succeeds,
                Some(defender) => {
                    if move_target(d) == Some(Province(i as u8)) {
                        // Head-to-head: the opposing move's strength defends.
                        if move_strength[i] > move_strength[d] && defender != player {
                            Decision::Succeeds
                        } else {
                            Decision::Fails
                        }
                    } else if move_target(d).is_some() {
                        match decision[d] {
                            Decision::Succeeds => Decision::Succeeds,
                            Decision::Fails => {
                                if move_strength[i] > 1 && defender != player {
                                    Decision::Succeeds
                                } else {
                                    Decision::Fails
                                }
                            }
                            Decision::Pending => {
                                if move_strength[i] > 1 && defender != player {
                                    // Wins whether the defender stays or leaves.
                                    Decision::Succeeds
                                } else {
                                    Decision::Pending
                                }
                            }
                        }
                    } else if move_strength[i] > hold_strength[d] && defender != player {
                        Decision::Succeeds
                    } else {
                        Decision::Fails
                    }
                }
            };
            if verdict != Decision::Pending {
                decision[i] = verdict;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for &i in &movers {
        if decision[i] == Decision::Pending {
            decision[i] = Decision::Fails;
        }
    }

    // Apply: successful movers relocate; stayers are removed when their
    // province was taken.
    let mut next = state.clone();
    let mut units = vec![None; n];
    let taken: Vec<bool> = (0..n)
        .map(|p| {
            movers
                .iter()
                .any(|&i| decision[i] == Decision::Succeeds && move_target(i) == Some(Province(p as u8)))
        })
        .collect();
    for i in 0..n {
        let Some((player, _)) = order_at[i] else { continue };
        let moved = move_target(i).is_some() && decision[i] == Decision::Succeeds;
        if moved {
            units[move_target(i).unwrap().index()] = Some(player);
        } else if !taken[i] {
            units[i] = Some(player);
        }
    }
    next.units = units;

    for p in state.board.supply_centers() {
        if let Some(occupier) = next.units[p.index()] {
            next.owner[p.index()] = Some(occupier);
        }
    }
    next.phase.season = Season::Adjustment;
    Ok(next)
}

/// Runs the deterministic adjustment: each player disbands surplus units
/// (farthest from its nearest owned center first, ties to the smallest
/// province id) or builds on vacant owned home centers (smallest id first),
/// then the clock advances to the next year's movement phase.
pub fn run_adjustment(state: &mut GameState) {
    debug_assert_eq!(state.phase.season, Season::Adjustment);
    let num_players = state.num_players();
    for p in 0..num_players {
        let player = Player(p as u8);
        let centers: Vec<Province> = state
            .board
            .supply_centers()
            .filter(|&c| state.owner[c.index()] == Some(player))
            .collect();
        let target = centers.len();
        let mut units = state.unit_provinces(player);

        if units.len() > target {
            let dist = state.board.distances_from(&centers);
            // Farthest first, ties to the smallest id.
            units.sort_by_key(|u| (std::cmp::Reverse(dist[u.index()]), u.index()));
            for u in units.iter().take(units.len() - target) {
                state.units[u.index()] = None;
            }
        } else if units.len() < target {
            let mut deficit = target - units.len();
            for c in &centers {
                if deficit == 0 {
                    break;
                }
                if state.board.is_home(*c) && state.units[c.index()].is_none() {
                    state.units[c.index()] = Some(player);
                    deficit -= 1;
                }
            }
        }
    }
    state.phase.year += 1;
    state.phase.season = Season::Movement;
}

/// Resolves a full year step: simultaneous movement, ownership update, and
/// the adjustment rule. The successor is the next year's movement phase.
pub fn adjudicate(state: &GameState, joint: &JointAction) -> Result<GameState> {
    let mut next = resolve_movement(state, joint)?;
    run_adjustment(&mut next);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::order::all_hold;
    use proptest::prelude::*;
    use rand::Rng;
    use std::sync::Arc;

    use crate::grid::Board;

    /// Empty board helper: place units and owners by hand.
    fn bare_state() -> GameState {
        let mut s = GameState::new(Arc::new(Board::standard()), 10);
        s.units = vec![None; 16];
        s
    }

    fn with_units(units: &[(u8, u8)]) -> GameState {
        let mut s = bare_state();
        for &(prov, player) in units {
            s.units[prov as usize] = Some(Player(player));
        }
        s
    }

    fn joint_of(state: &GameState, orders: &[UnitOrder]) -> JointAction {
        let mut joint: JointAction = vec![vec![]; state.num_players()];
        for &o in orders {
            let player = state.unit_at(o.source()).unwrap();
            joint[player.index()].push(o);
        }
        joint
    }

    fn mv(a: u8, b: u8) -> UnitOrder {
        UnitOrder::Move {
            source: Province(a),
            target: Province(b),
        }
    }

    fn sup_mv(s: u8, from: u8, to: u8) -> UnitOrder {
        UnitOrder::SupportMove {
            source: Province(s),
            target: Province(to),
            supported_source: Province(from),
        }
    }

    fn hold(a: u8) -> UnitOrder {
        UnitOrder::Hold { source: Province(a) }
    }

    #[test]
    fn uncontested_move_relocates() {
        let s = with_units(&[(0, 0)]);
        let joint = joint_of(&s, &[mv(0, 4)]);
        let next = resolve_movement(&s, &joint).unwrap();
        assert_eq!(next.units[4], Some(Player(0)));
        assert_eq!(next.units[0], None);
    }

    #[test]
    fn equal_strength_moves_bounce() {
        let s = with_units(&[(0, 0), (8, 1)]);
        let joint = joint_of(&s, &[mv(0, 4), mv(8, 4)]);
        let next = resolve_movement(&s, &joint).unwrap();
        assert_eq!(next.units[4], None);
        assert_eq!(next.units[0], Some(Player(0)));
        assert_eq!(next.units[8], Some(Player(1)));
    }

    #[test]
    fn supported_move_dislodges_lone_holder() {
        let s = with_units(&[(0, 0), (5, 0), (4, 1)]);
        let joint = joint_of(&s, &[mv(0, 4), sup_mv(5, 0, 4), hold(4)]);
        let next = resolve_movement(&s, &joint).unwrap();
        assert_eq!(next.units[4], Some(Player(0)));
        assert_eq!(next.units[0], None);
        // The defender is destroyed, not retreated.
        assert_eq!(next.units.iter().filter(|u| **u == Some(Player(1))).count(), 0);
    }

    #[test]
    fn support_is_cut_by_attack_from_third_unit() {
        // Same attack, but the supporter at b2 is attacked from b3 by a
        // third player's unit; the move drops to strength 1 and bounces.
        let s = with_units(&[(0, 0), (5, 0), (4, 1), (6, 2)]);
        let joint = joint_of(&s, &[mv(0, 4), sup_mv(5, 0, 4), hold(4), mv(6, 5)]);
        let next = resolve_movement(&s, &joint).unwrap();
        assert_eq!(next.units[4], Some(Player(1)));
        assert_eq!(next.units[0], Some(Player(0)));
        // The cutting move itself bounced off the supporter.
        assert_eq!(next.units[6], Some(Player(2)));
        assert_eq!(next.units[5], Some(Player(0)));
    }

    #[test]
    fn phantom_support_is_void() {
        // b2 supports a1 - b1 but the unit at a1 holds instead: the support
        // backs no real move and nothing happens to the holder at b1.
        let s = with_units(&[(0, 0), (5, 0), (4, 1)]);
        let joint = joint_of(&s, &[hold(0), sup_mv(5, 0, 4), hold(4)]);
        let next = resolve_movement(&s, &joint).unwrap();
        assert_eq!(next.units[4], Some(Player(1)));
    }

    #[test]
    fn support_hold_defends_against_supported_attack() {
        // Attack strength 2 vs hold strength 2 bounces.
        let s = with_units(&[(0, 0), (5, 0), (4, 1), (8, 1)]);
        let joint = joint_of(
            &s,
            &[
                mv(0, 4),
                sup_mv(5, 0, 4),
                hold(4),
                UnitOrder::SupportHold {
                    source: Province(8),
                    target: Province(4),
                },
            ],
        );
        let next = resolve_movement(&s, &joint).unwrap();
        assert_eq!(next.units[4], Some(Player(1)));
        assert_eq!(next.units[0], Some(Player(0)));
    }

    #[test]
    fn head_to_head_equal_strength_bounces() {
        let s = with_units(&[(0, 0), (4, 1)]);
        let joint = joint_of(&s, &[mv(0, 4), mv(4, 0)]);
        let next = resolve_movement(&s, &joint).unwrap();
        assert_eq!(next.units[0], Some(Player(0)));
        assert_eq!(next.units[4], Some(Player(1)));
    }

    #[test]
    fn head_to_head_stronger_side_wins() {
        let s = with_units(&[(0, 0), (5, 0), (4, 1)]);
        let joint = joint_of(&s, &[mv(0, 4), sup_mv(5, 0, 4), mv(4, 0)]);
        let next = resolve_movement(&s, &joint).unwrap();
        assert_eq!(next.units[4], Some(Player(0)));
        assert_eq!(next.units[0], None);
        assert_eq!(next.units.iter().filter(|u| **u == Some(Player(1))).count(), 0);
    }

    #[test]
    fn move_cycles_bounce() {
        let s = with_units(&[(0, 0), (1, 1), (5, 2), (4, 3)]);
        let joint = joint_of(&s, &[mv(0, 1), mv(1, 5), mv(5, 4), mv(4, 0)]);
        let next = resolve_movement(&s, &joint).unwrap();
        assert_eq!(next.units[0], Some(Player(0)));
        assert_eq!(next.units[1], Some(Player(1)));
        assert_eq!(next.units[5], Some(Player(2)));
        assert_eq!(next.units[4], Some(Player(3)));
    }

    #[test]
    fn follower_enters_vacated_province() {
        let s = with_units(&[(0, 0), (4, 1)]);
        let joint = joint_of(&s, &[mv(0, 4), mv(4, 8)]);
        let next = resolve_movement(&s, &joint).unwrap();
        assert_eq!(next.units[4], Some(Player(0)));
        assert_eq!(next.units[8], Some(Player(1)));
    }

    #[test]
    fn no_self_dislodgement() {
        let s = with_units(&[(0, 0), (5, 0), (4, 0)]);
        let joint = joint_of(&s, &[mv(0, 4), sup_mv(5, 0, 4), hold(4)]);
        let next = resolve_movement(&s, &joint).unwrap();
        assert_eq!(next.units[0], Some(Player(0)));
        assert_eq!(next.units[4], Some(Player(0)));
    }

    #[test]
    fn occupier_takes_center_ownership() {
        let mut s = with_units(&[(4, 1)]);
        s.owner[0] = Some(Player(0));
        let joint = joint_of(&s, &[mv(4, 0)]);
        let next = resolve_movement(&s, &joint).unwrap();
        assert_eq!(next.owner[0], Some(Player(1)));
    }

    #[test]
    fn vacant_center_ownership_persists() {
        let s = GameState::new_standard();
        let mut joint = all_hold(&s);
        joint[0] = vec![mv(0, 4), hold(1)];
        let next = resolve_movement(&s, &joint).unwrap();
        assert_eq!(next.owner[0], Some(Player(0)));
    }

    #[test]
    fn build_fills_vacant_home_center() {
        // Player 0 captured a third center (a4) and walked off its home a1,
        // so adjustment builds a unit back on a1.
        let mut s = GameState::new_standard();
        s.owner[3] = Some(Player(0));
        s.units[3] = Some(Player(0));
        s.units[0] = None; // two units on board (1, 3), three centers (0, 1, 3)
        s.phase.season = Season::Adjustment;
        run_adjustment(&mut s);
        assert_eq!(s.units[0], Some(Player(0)));
        assert_eq!(s.unit_count(Player(0)), 3);
        assert_eq!(s.phase.year, 2);
        assert_eq!(s.phase.season, Season::Movement);
    }

    #[test]
    fn disband_removes_farthest_unit_first() {
        // Player 0 owns only center a1 (0) but has units at a1 and c3 (10);
        // c3 is farther, so it disbands.
        let mut s = bare_state();
        s.owner = vec![None; 16];
        s.owner[0] = Some(Player(0));
        s.units[0] = Some(Player(0));
        s.units[10] = Some(Player(0));
        s.phase.season = Season::Adjustment;
        run_adjustment(&mut s);
        assert_eq!(s.units[0], Some(Player(0)));
        assert_eq!(s.units[10], None);
    }

    #[test]
    fn disband_tie_breaks_to_smallest_id() {
        // Units at a2 (1) and a4 (3) are both distance 1 from owned a1;
        // removing one of them keeps the smaller id? Farthest-first with a
        // tie removes the smallest id among the farthest: a2 goes.
        let mut s = bare_state();
        s.owner = vec![None; 16];
        s.owner[0] = Some(Player(0));
        s.units[1] = Some(Player(0));
        s.units[3] = Some(Player(0));
        s.phase.season = Season::Adjustment;
        run_adjustment(&mut s);
        assert_eq!(s.unit_count(Player(0)), 1);
        assert_eq!(s.units[1], None);
        assert_eq!(s.units[3], Some(Player(0)));
    }

    #[test]
    fn eliminated_player_loses_all_units() {
        let mut s = bare_state();
        s.owner = vec![None; 16];
        s.units[5] = Some(Player(2));
        s.units[6] = Some(Player(2));
        s.phase.season = Season::Adjustment;
        run_adjustment(&mut s);
        assert_eq!(s.unit_count(Player(2)), 0);
    }

    #[test]
    fn adjudicate_is_pure() {
        let s = GameState::new_standard();
        let joint = all_hold(&s);
        assert_eq!(
            adjudicate(&s, &joint).unwrap(),
            adjudicate(&s, &joint).unwrap()
        );
    }

    /// Random legal order generator for property tests.
    fn random_joint(state: &GameState, rng: &mut impl Rng) -> JointAction {
        (0..state.num_players())
            .map(|p| {
                let player = Player(p as u8);
                state
                    .unit_provinces(player)
                    .into_iter()
                    .map(|source| {
                        let neighbors = state.board.neighbors(source);
                        match rng.gen_range(0..3) {
                            0 => UnitOrder::Hold { source },
                            1 => UnitOrder::Move {
                                source,
                                target: neighbors[rng.gen_range(0..neighbors.len())],
                            },
                            _ => {
                                // Support-hold an adjacent occupied province
                                // when possible, else hold.
                                let occupied: Vec<Province> = neighbors
                                    .iter()
                                    .copied()
                                    .filter(|&q| state.unit_at(q).is_some())
                                    .collect();
                                if occupied.is_empty() {
                                    UnitOrder::Hold { source }
                                } else {
                                    UnitOrder::SupportHold {
                                        source,
                                        target: occupied[rng.gen_range(0..occupied.len())],
                                    }
                                }
                            }
                        }
                    })
                    .collect()
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn random_play_preserves_invariants(seed in 0u64..5000) {
            let mut rng = crate::rng::rng_from_seed(seed);
            let mut state = GameState::new_standard();
            for _ in 0..6 {
                if state.is_terminal() {
                    break;
                }
                let joint = random_joint(&state, &mut rng);
                let next = adjudicate(&state, &joint).unwrap();
                // Determinism of the full year step.
                prop_assert_eq!(&next, &adjudicate(&state, &joint).unwrap());
                // After adjustment every player's unit count equals its
                // center count (every center on this board is a home).
                for p in 0..4 {
                    let player = Player(p);
                    prop_assert_eq!(
                        next.unit_count(player) as u32,
                        next.sc_count(player)
                    );
                }
                let total: u32 = next.sc_counts().iter().sum();
                prop_assert_eq!(total, 8);
                state = next;
            }
        }
    }
}
