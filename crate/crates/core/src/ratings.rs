//! Pairwise-outcome ratings fit by gradient descent on a regularized
//! logistic loss.
//!
//! Given pairs `(i, j)` meaning "player i achieved a better outcome than
//! player j in a game", the loss is
//! `sum -log sigma(s_i - s_j) + lambda * |s|_2` with the Euclidean norm
//! (not squared); a squared-norm option is available but off by default.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::ScoreVector;

/// Pairs of (better, worse) player ids from observed games.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDataset {
    pub num_players: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl OutcomeDataset {
    pub fn new(num_players: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        for &(i, j) in &pairs {
            if i >= num_players || j >= num_players {
                return Err(Error::contract("pair id out of range"));
            }
            if i == j {
                return Err(Error::contract("a player cannot outperform itself"));
            }
        }
        Ok(OutcomeDataset { num_players, pairs })
    }

    /// Extracts "better outcome" pairs from one game's final scores:
    /// a strictly higher score beats a lower one; equal outcomes produce
    /// no pair. Player ids are offset by `base` (seat -> global id).
    pub fn pairs_from_scores(scores: &ScoreVector, base: usize) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..scores.len() {
            for j in 0..scores.len() {
                if i != j && scores.get(i) > scores.get(j) {
                    pairs.push((base + i, base + j));
                }
            }
        }
        pairs
    }
}

/// Fit configuration; defaults follow the recorded choices: rate 0.01,
/// 5000 steps, non-squared norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingFitConfig {
    pub lambda: f64,
    pub learning_rate: f64,
    pub steps: usize,
    /// Use `lambda * |s|_2^2` instead of `lambda * |s|_2`.
    pub squared_norm: bool,
}

impl Default for RatingFitConfig {
    fn default() -> Self {
        RatingFitConfig {
            lambda: 0.1,
            learning_rate: 0.01,
            steps: 5000,
            squared_norm: false,
        }
    }
}

/// Fitted ratings plus the regularization weight used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingVector {
    pub ratings: Vec<f64>,
    pub lambda: f64,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `-log sigma(x)`, stable for large negative `x`.
fn neg_log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        (1.0 + (-x).exp()).ln()
    } else {
        -x + (1.0 + x.exp()).ln()
    }
}

/// Regularized negative log likelihood of ratings `s` on `dataset`.
pub fn rating_loss(s: &[f64], dataset: &OutcomeDataset, lambda: f64, squared_norm: bool) -> f64 {
    let pair_loss: f64 = dataset
        .pairs
        .iter()
        .map(|&(i, j)| neg_log_sigmoid(s[i] - s[j]))
        .sum();
    let norm_sq: f64 = s.iter().map(|x| x * x).sum();
    let reg = if squared_norm {
        lambda * norm_sq
    } else {
        lambda * norm_sq.sqrt()
    };
    pair_loss + reg
}

/// Analytic gradient of [`rating_loss`]. The norm's subgradient at the
/// origin is taken as zero.
pub fn rating_grad(
    s: &[f64],
    dataset: &OutcomeDataset,
    lambda: f64,
    squared_norm: bool,
) -> Vec<f64> {
    let mut grad = vec![0.0; s.len()];
    for &(i, j) in &dataset.pairs {
        // d/dx [-log sigma(x)] = sigma(x) - 1 = -sigma(-x)
        let g = -sigmoid(s[j] - s[i]);
        grad[i] += g;
        grad[j] -= g;
    }
    let norm: f64 = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    if squared_norm {
        for (gk, &sk) in grad.iter_mut().zip(s) {
            *gk += 2.0 * lambda * sk;
        }
    } else if norm > 0.0 {
        for (gk, &sk) in grad.iter_mut().zip(s) {
            *gk += lambda * sk / norm;
        }
    }
    grad
}

/// Gradient descent from `s = 0`. Errors with the step index if the loss
/// leaves the finite range.
pub fn fit_ratings(dataset: &OutcomeDataset, cfg: &RatingFitConfig) -> Result<RatingVector> {
    if cfg.steps == 0 {
        return Err(Error::contract("steps must be >= 1"));
    }
    if cfg.lambda < 0.0 {
        return Err(Error::contract("lambda must be >= 0"));
    }
    let mut s = vec![0.0; dataset.num_players];
    for step in 0..cfg.steps {
        let grad = rating_grad(&s, dataset, cfg.lambda, cfg.squared_norm);
        for (sk, gk) in s.iter_mut().zip(&grad) {
            *sk -= cfg.learning_rate * gk;
        }
        let loss = rating_loss(&s, dataset, cfg.lambda, cfg.squared_norm);
        if !loss.is_finite() {
            return Err(Error::Divergence { step });
        }
    }
    Ok(RatingVector {
        ratings: s,
        lambda: cfg.lambda,
    })
}
