//! Sum-of-squares scoring.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-player scores in `[0, 1]` that sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    /// Wraps raw scores. Callers must supply nonnegative entries summing to 1.
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::contract("score vector must be nonempty"));
        }
        if scores.iter().any(|&s| !(s >= 0.0)) {
            return Err(Error::contract("scores must be nonnegative"));
        }
        let total: f64 = scores.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::contract(format!("scores must sum to 1, got {total}")));
        }
        Ok(ScoreVector(scores))
    }

    /// One-hot score for a single winner.
    pub fn one_hot(num_players: usize, winner: usize) -> Self {
        let mut s = vec![0.0; num_players];
        s[winner] = 1.0;
        ScoreVector(s)
    }

    pub fn scores(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, player: usize) -> f64 {
        self.0[player]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Sum-of-squares scores: player `i` receives `C_i^2 / sum_j C_j^2`.
///
/// Errors when every count is zero; the score is undefined there.
pub fn sos_scores(counts: &[u32]) -> Result<ScoreVector> {
    if counts.is_empty() {
        return Err(Error::contract("sos_scores: empty counts"));
    }
    let denom: f64 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
    if denom == 0.0 {
        return Err(Error::UndefinedScore);
    }
    let scores = counts
        .iter()
        .map(|&c| (c as f64) * (c as f64) / denom)
        .collect();
    Ok(ScoreVector(scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eighteen_sixteen_split() {
        let s = sos_scores(&[18, 16, 0, 0, 0, 0, 0]).unwrap();
        assert!((s.get(0) - 324.0 / 580.0).abs() < 1e-12);
        assert!((s.get(1) - 256.0 / 580.0).abs() < 1e-12);
        assert_eq!(s.get(2), 0.0);
    }

    #[test]
    fn equal_counts_split_evenly() {
        let s = sos_scores(&[4; 7]).unwrap();
        for p in 0..7 {
            assert!((s.get(p) - 1.0 / 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sole_survivor_takes_all() {
        let s = sos_scores(&[34, 0, 0]).unwrap();
        assert_eq!(s.scores(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn all_zero_is_undefined() {
        assert!(matches!(sos_scores(&[0, 0]), Err(Error::UndefinedScore)));
    }

    proptest! {
        #[test]
        fn sums_to_one_and_permutation_equivariant(
            counts in proptest::collection::vec(0u32..40, 2..8),
            swap in (0usize..8, 0usize..8),
        ) {
            prop_assume!(counts.iter().any(|&c| c > 0));
            let s = sos_scores(&counts).unwrap();
            let total: f64 = s.scores().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);

            let (i, j) = (swap.0 % counts.len(), swap.1 % counts.len());
            let mut permuted = counts.clone();
            permuted.swap(i, j);
            let sp = sos_scores(&permuted).unwrap();
            prop_assert!((s.get(i) - sp.get(j)).abs() < 1e-12);
            prop_assert!((s.get(j) - sp.get(i)).abs() < 1e-12);
        }
    }
}
