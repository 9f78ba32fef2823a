//! Subgame specifications: sampled action sets plus a joint-action utility
//! oracle, either an explicit matrix or Monte Carlo rollouts.

use crate::error::Result;
use crate::matrix::MatrixGame;
use crate::rng::child_seed;

/// Supplies utility vectors for joint actions of a one-turn game.
///
/// Implementations must be safe for concurrent queries. Stochastic oracles
/// must be deterministic given `(joint, seed)`.
pub trait UtilityOracle: Send + Sync {
    /// Number of sampled actions per player.
    fn action_counts(&self) -> &[usize];

    /// Utility vector (one entry per player) for an index-based joint action.
    fn evaluate(&self, joint: &[usize], seed: u64) -> Result<Vec<f64>>;

    /// One player's utility; the default evaluates the full vector.
    fn evaluate_for(&self, player: usize, joint: &[usize], seed: u64) -> Result<f64> {
        Ok(self.evaluate(joint, seed)?[player])
    }

    /// Whether `evaluate` is exact and seed-independent, making expected
    /// utilities enumerable for best-response computation.
    fn is_exact(&self) -> bool;

    /// Short label recorded in traces and reports.
    fn kind(&self) -> &'static str;

    fn num_players(&self) -> usize {
        self.action_counts().len()
    }
}

impl UtilityOracle for MatrixGame {
    fn action_counts(&self) -> &[usize] {
        MatrixGame::action_counts(self)
    }

    fn evaluate(&self, joint: &[usize], _seed: u64) -> Result<Vec<f64>> {
        self.utility(joint)
    }

    fn evaluate_for(&self, player: usize, joint: &[usize], _seed: u64) -> Result<f64> {
        self.utility_for(player, joint)
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn kind(&self) -> &'static str {
        "matrix"
    }
}

/// A one-turn game over sampled per-player action sets.
///
/// Action identity is positional; `labels`, when present, carries a display
/// string per action for logs and policy printouts.
pub struct SubgameSpec {
    oracle: Box<dyn UtilityOracle>,
    labels: Option<Vec<Vec<String>>>,
}

impl SubgameSpec {
    pub fn new(oracle: Box<dyn UtilityOracle>, labels: Option<Vec<Vec<String>>>) -> Self {
        debug_assert!(oracle.action_counts().iter().all(|&c| c > 0));
        SubgameSpec { oracle, labels }
    }

    /// A subgame backed by an explicit payoff table.
    pub fn from_matrix(game: MatrixGame) -> Self {
        SubgameSpec {
            oracle: Box::new(game),
            labels: None,
        }
    }

    pub fn oracle(&self) -> &dyn UtilityOracle {
        self.oracle.as_ref()
    }

    pub fn action_counts(&self) -> &[usize] {
        self.oracle.action_counts()
    }

    pub fn num_players(&self) -> usize {
        self.oracle.num_players()
    }

    pub fn labels(&self) -> Option<&Vec<Vec<String>>> {
        self.labels.as_ref()
    }

    /// Action label for display; falls back to the action index.
    pub fn label(&self, player: usize, action: usize) -> String {
        match &self.labels {
            Some(l) => l[player][action].clone(),
            None => format!("a{action}"),
        }
    }
}

/// Estimates the full payoff table of a subgame by averaging `rollouts`
/// oracle evaluations per joint action, yielding a matrix-backed subgame
/// on which exact best responses can be computed.
pub fn matrixize(spec: &SubgameSpec, rollouts: u32, seed: u64) -> Result<MatrixGame> {
    let counts = spec.action_counts().to_vec();
    let num_players = counts.len();
    let joints: usize = counts.iter().product();
    let mut payoffs = vec![vec![0.0; joints]; num_players];
    let mut joint = vec![0usize; num_players];
    for flat in 0..joints {
        let mut rem = flat;
        for p in (0..num_players).rev() {
            joint[p] = rem % counts[p];
            rem /= counts[p];
        }
        let mut mean = vec![0.0; num_players];
        for r in 0..rollouts.max(1) {
            let q = child_seed(seed, (flat as u64) * 0x10000 + r as u64);
            let u = spec.oracle().evaluate(&joint, q)?;
            for (acc, v) in mean.iter_mut().zip(&u) {
                *acc += v;
            }
        }
        for (p, acc) in mean.iter().enumerate() {
            payoffs[p][flat] = acc / rollouts.max(1) as f64;
        }
    }
    MatrixGame::new(counts, payoffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_backed_spec_reports_exact() {
        let spec = SubgameSpec::from_matrix(MatrixGame::matching_pennies());
        assert!(spec.oracle().is_exact());
        assert_eq!(spec.action_counts(), &[2, 2]);
        assert_eq!(spec.oracle().evaluate(&[1, 0], 99).unwrap(), vec![-1.0, 1.0]);
    }

    #[test]
    fn matrixize_recovers_exact_tables() {
        let g = MatrixGame::random_zero_sum(3, 3, 5);
        let spec = SubgameSpec::from_matrix(g.clone());
        let m = matrixize(&spec, 4, 0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.utility(&[i, j]).unwrap(), g.utility(&[i, j]).unwrap());
            }
        }
    }
}
