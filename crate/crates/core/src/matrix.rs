//! Explicit normal-form games with stored payoff tables.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// A normal-form game: per-player action counts and a payoff vector for
/// every joint action.
///
/// Payoffs are stored per player in row-major order over the joint action
/// space, with the last player's action index varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixGameFile", into = "MatrixGameFile")]
pub struct MatrixGame {
    action_counts: Vec<usize>,
    /// `payoffs[player][joint_index]`
    payoffs: Vec<Vec<f64>>,
}

/// On-disk representation: `num_players`, `action_counts`, and one row-major
/// payoff array per player.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct MatrixGameFile {
    num_players: usize,
    action_counts: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
}

impl TryFrom<MatrixGameFile> for MatrixGame {
    type Error = Error;

    fn try_from(f: MatrixGameFile) -> Result<Self> {
        if f.num_players != f.action_counts.len() {
            return Err(Error::contract(format!(
                "num_players {} does not match action_counts length {}",
                f.num_players,
                f.action_counts.len()
            )));
        }
        MatrixGame::new(f.action_counts, f.payoffs)
    }
}

impl From<MatrixGame> for MatrixGameFile {
    fn from(g: MatrixGame) -> Self {
        MatrixGameFile {
            num_players: g.action_counts.len(),
            action_counts: g.action_counts,
            payoffs: g.payoffs,
        }
    }
}

impl MatrixGame {
    /// Builds a game from action counts and per-player row-major payoffs.
    pub fn new(action_counts: Vec<usize>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        if action_counts.is_empty() {
            return Err(Error::contract("games need at least one player"));
        }
        if action_counts.iter().any(|&c| c == 0) {
            return Err(Error::contract("every player needs at least one action"));
        }
        let joints: usize = action_counts.iter().product();
        if payoffs.len() != action_counts.len() {
            return Err(Error::contract(format!(
                "expected {} payoff arrays, got {}",
                action_counts.len(),
                payoffs.len()
            )));
        }
        for (p, table) in payoffs.iter().enumerate() {
            if table.len() != joints {
                return Err(Error::contract(format!(
                    "player {p} payoff array has {} entries, expected {joints}",
                    table.len()
                )));
            }
        }
        Ok(MatrixGame {
            action_counts,
            payoffs,
        })
    }

    /// Two-player game from per-player payoff matrices given as rows of the
    /// first player's actions.
    pub fn two_player(rows: Vec<Vec<f64>>, cols: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let flatten = |t: Vec<Vec<f64>>| t.into_iter().flatten().collect::<Vec<f64>>();
        MatrixGame::new(vec![n, m], vec![flatten(rows), flatten(cols)])
    }

    /// Matching pennies with payoffs of plus/minus 1.
    pub fn matching_pennies() -> Self {
        MatrixGame::two_player(
            vec![vec![1.0, -1.0], vec![-1.0, 1.0]],
            vec![vec![-1.0, 1.0], vec![1.0, -1.0]],
        )
        .expect("static fixture")
    }

    /// Rock-paper-scissors with payoffs in `{-1, 0, 1}`.
    pub fn rock_paper_scissors() -> Self {
        let u = vec![
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ];
        let neg: Vec<Vec<f64>> = u
            .iter()
            .map(|r| r.iter().map(|x| -x).collect())
            .collect();
        MatrixGame::two_player(u, neg).expect("static fixture")
    }

    /// A random two-player zero-sum game. Player 1 payoffs are i.i.d. uniform
    /// in `[0, 1)` from the seeded generator; player 2 receives the negation.
    pub fn random_zero_sum(rows: usize, cols: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let p1: Vec<f64> = (0..rows * cols).map(|_| rng.gen::<f64>()).collect();
        let p2: Vec<f64> = p1.iter().map(|x| -x).collect();
        MatrixGame {
            action_counts: vec![rows, cols],
            payoffs: vec![p1, p2],
        }
    }

    pub fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn num_joint_actions(&self) -> usize {
        self.action_counts.iter().product()
    }

    /// Row-major joint index with the last player's action fastest.
    pub fn joint_index(&self, joint: &[usize]) -> Result<usize> {
        if joint.len() != self.action_counts.len() {
            return Err(Error::contract(format!(
                "joint action has {} entries, expected {}",
                joint.len(),
                self.action_counts.len()
            )));
        }
        let mut idx = 0usize;
        for (p, (&a, &count)) in joint.iter().zip(&self.action_counts).enumerate() {
            if a >= count {
                return Err(Error::contract(format!(
                    "player {p} action {a} out of range (count {count})"
                )));
            }
            idx = idx * count + a;
        }
        Ok(idx)
    }

    /// The stored payoff vector for a joint action.
    pub fn utility(&self, joint: &[usize]) -> Result<Vec<f64>> {
        let idx = self.joint_index(joint)?;
        Ok(self.payoffs.iter().map(|t| t[idx]).collect())
    }

    /// Single player's payoff for a joint action.
    pub fn utility_for(&self, player: usize, joint: &[usize]) -> Result<f64> {
        let idx = self.joint_index(joint)?;
        Ok(self.payoffs[player][idx])
    }

    /// The subgame induced by restricting each player to a subset of actions.
    ///
    /// Subset entries index into the player's original action list.
    pub fn restrict(&self, subsets: &[Vec<usize>]) -> Result<MatrixGame> {
        if subsets.len() != self.num_players() {
            return Err(Error::contract("one action subset per player required"));
        }
        for (p, s) in subsets.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::contract(format!("player {p} subset is empty")));
            }
            if s.iter().any(|&a| a >= self.action_counts[p]) {
                return Err(Error::contract(format!("player {p} subset out of range")));
            }
        }
        let counts: Vec<usize> = subsets.iter().map(Vec::len).collect();
        let joints: usize = counts.iter().product();
        let mut payoffs = vec![Vec::with_capacity(joints); self.num_players()];
        let mut joint = vec![0usize; self.num_players()];
        for flat in 0..joints {
            let mut rem = flat;
            for p in (0..self.num_players()).rev() {
                joint[p] = subsets[p][rem % counts[p]];
                rem /= counts[p];
            }
            let idx = self.joint_index(&joint)?;
            for (p, table) in payoffs.iter_mut().enumerate() {
                table.push(self.payoffs[p][idx]);
            }
        }
        MatrixGame::new(counts, payoffs)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
