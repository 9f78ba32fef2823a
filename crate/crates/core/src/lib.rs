//! Equilibrium search over simultaneous-move games.
//!
//! The engine combines sampled regret matching with one-ply subgame search:
//! each turn, candidate actions are proposed by a blueprint policy, payoffs
//! for joint candidates are estimated by truncated Monte Carlo rollouts, and
//! an approximate equilibrium of the resulting one-turn game is computed by
//! regret matching. The agent then plays its part of the equilibrium,
//! sampling from the final iteration's policy.
//!
//! Alongside the search core, the crate ships the measurement tooling used
//! to validate it: exact best-response and exploitability computation on
//! matrix games, seed-averaging experiments, a pairwise-outcome rating fit,
//! an unbiased entropy-gradient estimator, and a small four-player
//! grid-based conquest game (`grid`) that exercises the full search stack.

pub mod blueprint;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod exploit;
pub mod grid;
pub mod matrix;
pub mod output;
pub mod ratings;
pub mod regret;
pub mod rng;
pub mod scoring;
pub mod search;
pub mod subgame;

pub use error::{Error, Result};
