//! Score-function estimator of the entropy gradient for categorical
//! distributions, with its exact closed-form oracle.
//!
//! For a policy `pi` parameterized by logits, the gradient of the entropy
//! `H(pi) = -sum_a pi(a) log pi(a)` equals the expectation over sampled
//! outcomes of `-(1 + log pi(a)) * d/dtheta log pi(a)`; the estimator
//! averages that term over i.i.d. samples and is unbiased for any sample
//! count.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::EngineRng;

/// A categorical distribution parameterized by one logit per outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalModel {
    logits: Vec<f64>,
}

impl CategoricalModel {
    pub fn new(logits: Vec<f64>) -> Result<Self> {
        if logits.len() < 2 {
            return Err(Error::contract("need at least two outcomes"));
        }
        if logits.iter().any(|l| !l.is_finite()) {
            return Err(Error::contract("logits must be finite"));
        }
        Ok(CategoricalModel { logits })
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn num_outcomes(&self) -> usize {
        self.logits.len()
    }

    /// Softmax probabilities; positive and summing to 1 within 1e-12.
    pub fn probabilities(&self) -> Vec<f64> {
        let top = self.logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = self.logits.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = weights.iter().sum();
        weights.into_iter().map(|w| w / total).collect()
    }

    pub fn entropy(&self) -> f64 {
        self.probabilities()
            .iter()
            .map(|&p| if p > 0.0 { -p * p.ln() } else { 0.0 })
            .sum()
    }

    fn sample(&self, probs: &[f64], rng: &mut impl Rng) -> usize {
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            cum += p;
            if u < cum {
                return i;
            }
        }
        probs.len() - 1
    }
}

/// A Monte Carlo gradient estimate with per-coordinate standard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradientEstimate {
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    pub samples: usize,
}

/// Exact entropy gradient with respect to the logits, computed by the
/// closed-form sum `-sum_a pi(a) (1 + log pi(a)) d/dtheta log pi(a)`.
pub fn exact_entropy_grad(model: &CategoricalModel) -> Vec<f64> {
    let probs = model.probabilities();
    let n = probs.len();
    let mut grad = vec![0.0; n];
    for (a, &pa) in probs.iter().enumerate() {
        let coeff = -pa * (1.0 + pa.ln());
        // d/dtheta_k log pi(a) = [a == k] - pi(k)
        for (k, g) in grad.iter_mut().enumerate() {
            let indicator = if a == k { 1.0 } else { 0.0 };
            *g += coeff * (indicator - probs[k]);
        }
    }
    grad
}

/// Unbiased sampled estimate of the entropy gradient: the mean over
/// `num_samples` draws `a ~ pi` of `-(1 + log pi(a)) * grad log pi(a)`.
pub fn entropy_grad_estimate(
    model: &CategoricalModel,
    num_samples: usize,
    rng: &mut EngineRng,
) -> Result<GradientEstimate> {
    if num_samples == 0 {
        return Err(Error::contract("need at least one sample"));
    }
    let probs = model.probabilities();
    let n = probs.len();
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    for _ in 0..num_samples {
        let a = model.sample(&probs, rng);
        let coeff = -(1.0 + probs[a].ln());
        for k in 0..n {
            let indicator = if a == k { 1.0 } else { 0.0 };
            let term = coeff * (indicator - probs[k]);
            sum[k] += term;
            sum_sq[k] += term * term;
        }
    }
    let mean: Vec<f64> = sum.iter().map(|s| s / num_samples as f64).collect();
    let std_error: Vec<f64> = sum_sq
        .iter()
        .zip(&mean)
        .map(|(&sq, &m)| {
            if num_samples < 2 {
                f64::INFINITY
            } else {
                let var = (sq / num_samples as f64 - m * m).max(0.0)
                    * (num_samples as f64 / (num_samples as f64 - 1.0));
                (var / num_samples as f64).sqrt()
            }
        })
        .collect();
    Ok(GradientEstimate {
        mean,
        std_error,
        samples: num_samples,
    })
}

/// One row of the unbiasedness verification table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnbiasednessRow {
    pub model: usize,
    pub coordinate: usize,
    pub exact: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub z_score: f64,
}

/// Batch-mean unbiasedness check: for each random model, draws `batches`
/// independent batches of `samples` estimates, and compares the mean of the
/// batch means against the exact gradient, coordinate-wise. The reported
/// standard error is that of the batch-mean distribution's mean.
pub fn unbiasedness_check(
    num_models: usize,
    outcomes: usize,
    batches: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<UnbiasednessRow>> {
    use crate::rng::{child_seed, rng_from_seed};
    let mut rows = Vec::new();
    for m in 0..num_models {
        let mut model_rng = rng_from_seed(child_seed(seed, m as u64));
        let logits: Vec<f64> = (0..outcomes).map(|_| model_rng.gen_range(-2.0..2.0)).collect();
        let model = CategoricalModel::new(logits)?;
        let exact = exact_entropy_grad(&model);
        let mut batch_means: Vec<Vec<f64>> = Vec::with_capacity(batches);
        for b in 0..batches {
            let mut rng = rng_from_seed(child_seed(seed, ((m as u64) << 32) | (b as u64 + 1)));
            batch_means.push(entropy_grad_estimate(&model, samples, &mut rng)?.mean);
        }
        for k in 0..outcomes {
            let values: Vec<f64> = batch_means.iter().map(|bm| bm[k]).collect();
            let mean = values.iter().sum::<f64>() / batches as f64;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (batches as f64 - 1.0);
            let se = (var / batches as f64).sqrt();
            let z = if se > 0.0 { (mean - exact[k]) / se } else { 0.0 };
            rows.push(UnbiasednessRow {
                model: m,
                coordinate: k,
                exact: exact[k],
                estimate: mean,
                std_error: se,
                z_score: z,
            });
        }
    }
    Ok(rows)
}
