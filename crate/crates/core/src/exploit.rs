//! Best response and exploitability over subgames, plus the seed-averaging
//! experiment on random zero-sum games.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::MatrixGame;
use crate::regret::{run_rm, EquilibriumResult, Policy, RmConfig};
use crate::rng::{child_seed, rng_from_seed};
use crate::subgame::{matrixize, SubgameSpec};

/// Per-player best-response values and gains against a policy profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExploitabilityReport {
    pub br_values: Vec<f64>,
    pub policy_values: Vec<f64>,
    pub gains: Vec<f64>,
    /// Sum of gains, divided by the player count when `normalized`.
    pub total: f64,
    pub normalized: bool,
    /// Set when Monte Carlo noise produced negative gains that were clipped.
    pub mc_clipped: bool,
}

/// Expected utility of each of `player`'s actions against the opponents'
/// product policy, by enumeration over the opponents' joint support.
///
/// Requires an exact oracle.
pub fn expected_utilities(
    spec: &SubgameSpec,
    policies: &[Policy],
    player: usize,
) -> Result<Vec<f64>> {
    if !spec.oracle().is_exact() {
        return Err(Error::UnsupportedOracle);
    }
    let counts = spec.action_counts();
    if policies.len() != counts.len() {
        return Err(Error::contract("one policy per player required"));
    }
    for (p, policy) in policies.iter().enumerate() {
        if policy.len() != counts[p] {
            return Err(Error::contract(format!(
                "policy for player {p} has {} entries, expected {}",
                policy.len(),
                counts[p]
            )));
        }
    }
    let opponents: Vec<usize> = (0..counts.len()).filter(|&p| p != player).collect();
    let mut values = vec![0.0; counts[player]];
    let mut joint = vec![0usize; counts.len()];
    // Odometer over the opponents' joint action space.
    let mut opp_joint = vec![0usize; opponents.len()];
    loop {
        let mut weight = 1.0;
        for (k, &opp) in opponents.iter().enumerate() {
            joint[opp] = opp_joint[k];
            weight *= policies[opp].prob(opp_joint[k]);
        }
        if weight > 0.0 {
            for (a, value) in values.iter_mut().enumerate() {
                joint[player] = a;
                *value += weight * spec.oracle().evaluate_for(player, &joint, 0)?;
            }
        }
        let mut k = opponents.len();
        loop {
            if k == 0 {
                return Ok(values);
            }
            k -= 1;
            opp_joint[k] += 1;
            if opp_joint[k] < counts[opponents[k]] {
                break;
            }
            opp_joint[k] = 0;
        }
    }
}

/// Best-response value and action for `player` against the other players'
/// policies. Ties break to the lexicographically smallest action index.
pub fn best_response_value(
    spec: &SubgameSpec,
    policies: &[Policy],
    player: usize,
) -> Result<(f64, usize)> {
    let values = expected_utilities(spec, policies, player)?;
    let mut best = 0usize;
    for (a, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = a;
        }
    }
    Ok((values[best], best))
}

/// Exploitability of a policy profile: per-player best-response gain, summed
/// (divided by the player count when `normalized`).
pub fn exploitability(
    spec: &SubgameSpec,
    policies: &[Policy],
    normalized: bool,
) -> Result<ExploitabilityReport> {
    let num_players = spec.num_players();
    let mut br_values = Vec::with_capacity(num_players);
    let mut policy_values = Vec::with_capacity(num_players);
    let mut gains = Vec::with_capacity(num_players);
    for player in 0..num_players {
        let values = expected_utilities(spec, policies, player)?;
        let br = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let own = policies[player].expectation(&values);
        br_values.push(br);
        policy_values.push(own);
        gains.push(br - own);
    }
    let mut total: f64 = gains.iter().sum();
    if normalized {
        total /= num_players as f64;
    }
    Ok(ExploitabilityReport {
        br_values,
        policy_values,
        gains,
        total,
        normalized,
        mc_clipped: false,
    })
}

/// Exploitability of a rollout-backed subgame: the payoff table is first
/// estimated with `rollouts` Monte Carlo evaluations per joint action, then
/// exact best responses are taken on the estimate. Negative gains within
/// Monte Carlo noise are clipped to zero and flagged.
pub fn exploitability_mc(
    spec: &SubgameSpec,
    policies: &[Policy],
    normalized: bool,
    rollouts: u32,
    seed: u64,
) -> Result<ExploitabilityReport> {
    let game = matrixize(spec, rollouts, seed)?;
    let matrix_spec = SubgameSpec::from_matrix(game);
    let mut report = exploitability(&matrix_spec, policies, normalized)?;
    let mut clipped = false;
    for g in &mut report.gains {
        if *g < 0.0 {
            *g = 0.0;
            clipped = true;
        }
    }
    if clipped {
        report.total = report.gains.iter().sum();
        if normalized {
            report.total /= report.gains.len() as f64;
        }
        report.mc_clipped = true;
    }
    Ok(report)
}

/// Which policy an [`EquilibriumResult`] contributes to an average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolicyKind {
    Final,
    Average,
}

/// Arithmetic mean of the selected policies across runs, renormalized.
///
/// All results must cover the same action sets.
pub fn average_policies(results: &[EquilibriumResult], which: PolicyKind) -> Result<Vec<Policy>> {
    let first = results
        .first()
        .ok_or_else(|| Error::contract("average_policies: no results"))?;
    let num_players = first.final_policies.len();
    let shape: Vec<usize> = first.final_policies.iter().map(Policy::len).collect();
    let mut sums: Vec<Vec<f64>> = shape.iter().map(|&n| vec![0.0; n]).collect();
    for result in results {
        let policies = match which {
            PolicyKind::Final => &result.final_policies,
            PolicyKind::Average => &result.avg_policies,
        };
        if policies.len() != num_players {
            return Err(Error::contract("mismatched player counts across results"));
        }
        for (p, policy) in policies.iter().enumerate() {
            if policy.len() != shape[p] {
                return Err(Error::contract("mismatched action counts across results"));
            }
            for (s, &prob) in sums[p].iter_mut().zip(policy.probs()) {
                *s += prob;
            }
        }
    }
    sums.into_iter().map(|s| Policy::from_weights(&s)).collect()
}

/// Configuration of the seed-averaging experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedAverageConfig {
    pub rows: usize,
    pub cols: usize,
    pub rm: RmConfig,
    /// Total number of seeded runs, split evenly across games.
    pub num_seeds: usize,
    pub num_games: usize,
    /// When set, each run restricts regret matching to a per-run random
    /// subset of at most this many actions per player (exploitability is
    /// still measured in the full game), mirroring how sampled-subgame
    /// search only ever optimizes over a subset of the action space.
    pub max_actions: Option<usize>,
}

/// The four Appendix-style exploitability aggregates, averaged over games.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedAverageReport {
    /// Exploitability of the seed-averaged final policies.
    pub avg_of_final: f64,
    /// Exploitability of the seed-averaged average policies.
    pub avg_of_avg: f64,
    /// Mean over seeds of the exploitability of a single run's average policy.
    pub single_avg: f64,
    /// Mean over seeds of the exploitability of the single action a seeded
    /// run actually plays (sampled from its final policy): the play
    /// distribution an opponent faces when the seed is known.
    pub single_final: f64,
    pub seeds_per_game: usize,
    pub num_games: usize,
    pub rows: usize,
    pub cols: usize,
    pub iterations: u64,
    pub max_actions: Option<usize>,
    /// Per-game rows of the four quantities, in game order.
    pub per_game: Vec<[f64; 4]>,
}

/// Outcome of one seeded run, embedded into the full action space.
struct SeededRun {
    result: EquilibriumResult,
    played: Vec<usize>,
}

fn run_one_seed(
    game: &MatrixGame,
    rm: &RmConfig,
    max_actions: Option<usize>,
    run_seed: u64,
) -> Result<SeededRun> {
    let counts = game.action_counts().to_vec();
    let mut rng = rng_from_seed(child_seed(run_seed, 0));
    let cap = max_actions.unwrap_or(usize::MAX);
    let subsets: Vec<Vec<usize>> = counts
        .iter()
        .map(|&n| {
            if n <= cap {
                (0..n).collect()
            } else {
                let mut picked = rand::seq::index::sample(&mut rng, n, cap).into_vec();
                picked.sort_unstable();
                picked
            }
        })
        .collect();
    let restricted = game.restrict(&subsets)?;
    let spec = SubgameSpec::from_matrix(restricted);
    let cfg = RmConfig {
        seed: child_seed(run_seed, 1),
        trace_every: 0,
        ..rm.clone()
    };
    let sub_result = run_rm(&spec, &cfg)?;

    // Embed policies back into the full action space.
    let embed = |policies: &[Policy]| -> Vec<Policy> {
        policies
            .iter()
            .enumerate()
            .map(|(p, policy)| {
                let mut full = vec![0.0; counts[p]];
                for (k, &a) in subsets[p].iter().enumerate() {
                    full[a] = policy.prob(k);
                }
                Policy::from_weights(&full).expect("embedded policy")
            })
            .collect()
    };
    let final_policies = embed(&sub_result.final_policies);
    let avg_policies = embed(&sub_result.avg_policies);
    let mut play_rng = rng_from_seed(child_seed(run_seed, 2));
    let played: Vec<usize> = sub_result
        .final_policies
        .iter()
        .enumerate()
        .map(|(p, policy)| subsets[p][policy.sample(&mut play_rng)])
        .collect();

    Ok(SeededRun {
        result: EquilibriumResult {
            final_policies,
            avg_policies,
            ..sub_result
        },
        played,
    })
}

/// Runs regret matching `num_seeds` times (split evenly over `num_games`
/// random zero-sum games) and reports the four exploitability aggregates.
///
/// Exploitability is unnormalized (summed over both players) and always
/// measured in the full game. `single_final` treats the run's sampled final
/// action as the played policy; the other three quantities evaluate mixed
/// policies. Games, runs, and played actions all derive from `rm.seed`.
pub fn seed_average_experiment(cfg: &SeedAverageConfig) -> Result<SeedAverageReport> {
    if cfg.num_games == 0 || cfg.num_seeds == 0 {
        return Err(Error::contract("need at least one game and one seed"));
    }
    let seeds_per_game = (cfg.num_seeds / cfg.num_games).max(1);
    let master = cfg.rm.seed;

    let per_game: Vec<[f64; 4]> = (0..cfg.num_games)
        .into_par_iter()
        .map(|g| -> Result<[f64; 4]> {
            let game_seed = child_seed(master, 0x6001 + g as u64);
            let game = MatrixGame::random_zero_sum(cfg.rows, cfg.cols, game_seed);
            let spec = SubgameSpec::from_matrix(game.clone());

            let runs: Vec<SeededRun> = (0..seeds_per_game)
                .into_par_iter()
                .map(|s| {
                    let run_seed = child_seed(game_seed, 0xA000 + s as u64);
                    run_one_seed(&game, &cfg.rm, cfg.max_actions, run_seed)
                })
                .collect::<Result<_>>()?;

            let mut single_final = 0.0;
            let mut single_avg = 0.0;
            for run in &runs {
                let played: Vec<Policy> = run
                    .played
                    .iter()
                    .enumerate()
                    .map(|(p, &a)| {
                        let mut w = vec![0.0; game.action_counts()[p]];
                        w[a] = 1.0;
                        Policy::from_weights(&w).expect("one-hot")
                    })
                    .collect();
                single_final += exploitability(&spec, &played, false)?.total;
                single_avg += exploitability(&spec, &run.result.avg_policies, false)?.total;
            }
            single_final /= runs.len() as f64;
            single_avg /= runs.len() as f64;

            let results: Vec<EquilibriumResult> =
                runs.into_iter().map(|r| r.result).collect();
            let mean_final = average_policies(&results, PolicyKind::Final)?;
            let mean_avg = average_policies(&results, PolicyKind::Average)?;
            let avg_of_final = exploitability(&spec, &mean_final, false)?.total;
            let avg_of_avg = exploitability(&spec, &mean_avg, false)?.total;

            Ok([single_final, single_avg, avg_of_avg, avg_of_final])
        })
        .collect::<Result<_>>()?;

    let mean = |k: usize| per_game.iter().map(|row| row[k]).sum::<f64>() / per_game.len() as f64;
    Ok(SeedAverageReport {
        single_final: mean(0),
        single_avg: mean(1),
        avg_of_avg: mean(2),
        avg_of_final: mean(3),
        seeds_per_game,
        num_games: cfg.num_games,
        rows: cfg.rows,
        cols: cfg.cols,
        iterations: cfg.rm.iterations,
        max_actions: cfg.max_actions,
        per_game,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn mp_spec() -> SubgameSpec {
        SubgameSpec::from_matrix(MatrixGame::matching_pennies())
    }

    #[test]
    fn matching_pennies_vs_uniform_has_zero_value() {
        let policies = vec![Policy::uniform(2), Policy::uniform(2)];
        let (v, a) = best_response_value(&mp_spec(), &policies, 0).unwrap();
        assert!(v.abs() < 1e-12);
        assert_eq!(a, 0);
    }

    #[test]
    fn matching_pennies_vs_pure_heads() {
        let heads = Policy::from_weights(&[1.0, 0.0]).unwrap();
        let policies = vec![Policy::uniform(2), heads];
        let (v, a) = best_response_value(&mp_spec(), &policies, 0).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(a, 0);
    }

    /// Brute-force best response by explicit summation over all joints.
    fn brute_force_br(game: &MatrixGame, policies: &[Policy], player: usize) -> (f64, usize) {
        let counts = game.action_counts();
        let num_players = counts.len();
        let mut best = (f64::NEG_INFINITY, 0usize);
        for a in 0..counts[player] {
            let mut value = 0.0;
            let joints: usize = counts.iter().product();
            let mut joint = vec![0usize; num_players];
            for flat in 0..joints {
                let mut rem = flat;
                for p in (0..num_players).rev() {
                    joint[p] = rem % counts[p];
                    rem /= counts[p];
                }
                if joint[player] != a {
                    continue;
                }
                let mut w = 1.0;
                for p in 0..num_players {
                    if p != player {
                        w *= policies[p].prob(joint[p]);
                    }
                }
                value += w * game.utility_for(player, &joint).unwrap();
            }
            if value > best.0 + 1e-15 {
                best = (value, a);
            }
        }
        best
    }

    #[test]
    fn best_response_matches_brute_force_enumeration() {
        let mut rng = rng_from_seed(77);
        for trial in 0..30 {
            let game = MatrixGame::random_zero_sum(3, 3, 100 + trial);
            let policies: Vec<Policy> = (0..2)
                .map(|_| {
                    let w: Vec<f64> = (0..3).map(|_| rng.gen::<f64>()).collect();
                    Policy::from_weights(&w).unwrap()
                })
                .collect();
            let spec = SubgameSpec::from_matrix(game.clone());
            for player in 0..2 {
                let (v, a) = best_response_value(&spec, &policies, player).unwrap();
                let (bv, ba) = brute_force_br(&game, &policies, player);
                assert!((v - bv).abs() < 1e-12);
                assert_eq!(a, ba);
            }
        }
    }

    #[test]
    fn exploitability_of_uniform_matching_pennies_is_zero() {
        let policies = vec![Policy::uniform(2), Policy::uniform(2)];
        let r = exploitability(&mp_spec(), &policies, false).unwrap();
        assert!(r.total.abs() < 1e-12);
    }

    #[test]
    fn exploitability_of_pure_heads_pair_is_two() {
        let heads = Policy::from_weights(&[1.0, 0.0]).unwrap();
        let policies = vec![heads.clone(), heads];
        let r = exploitability(&mp_spec(), &policies, false).unwrap();
        assert_eq!(r.total, 2.0);
        let rn = exploitability(&mp_spec(), &policies, true).unwrap();
        assert_eq!(rn.total, 1.0);
    }

    #[test]
    fn exploitability_of_pure_rock_pair_is_two() {
        let spec = SubgameSpec::from_matrix(MatrixGame::rock_paper_scissors());
        let rock = Policy::from_weights(&[1.0, 0.0, 0.0]).unwrap();
        let r = exploitability(&spec, &[rock.clone(), rock], false).unwrap();
        assert_eq!(r.total, 2.0);
    }

    fn result_with(finals: Vec<Policy>) -> EquilibriumResult {
        EquilibriumResult {
            avg_policies: finals.clone(),
            avg_utilities: finals.iter().map(|p| vec![0.0; p.len()]).collect(),
            final_policies: finals,
            trace: vec![],
            iterations: 1,
            oracle_kind: "matrix".into(),
        }
    }

    #[test]
    fn average_of_single_result_is_identity() {
        let r = result_with(vec![Policy::from_weights(&[0.3, 0.7]).unwrap()]);
        let avg = average_policies(&[r.clone()], PolicyKind::Final).unwrap();
        assert_eq!(avg[0].probs(), r.final_policies[0].probs());
    }

    #[test]
    fn average_of_opposite_pures_is_uniform() {
        let a = result_with(vec![Policy::from_weights(&[1.0, 0.0]).unwrap()]);
        let b = result_with(vec![Policy::from_weights(&[0.0, 1.0]).unwrap()]);
        let avg = average_policies(&[a, b], PolicyKind::Final).unwrap();
        assert_eq!(avg[0].probs(), &[0.5, 0.5]);
    }

    #[test]
    fn average_rejects_mismatched_shapes() {
        let a = result_with(vec![Policy::uniform(2)]);
        let b = result_with(vec![Policy::uniform(3)]);
        assert!(average_policies(&[a, b], PolicyKind::Final).is_err());
    }

    #[test]
    fn single_seed_collapses_avg_of_final_to_single_final() {
        let cfg = SeedAverageConfig {
            rows: 4,
            cols: 4,
            rm: RmConfig {
                iterations: 64,
                linear: true,
                optimism: false,
                seed: 12,
                trace_every: 0,
            },
            num_seeds: 1,
            num_games: 1,
            max_actions: None,
        };
        let report = seed_average_experiment(&cfg).unwrap();
        assert!((report.avg_of_final - report.single_final).abs() < 1e-9);
        assert!((report.avg_of_avg - report.single_avg).abs() < 1e-9);
    }

    #[test]
    fn gains_are_nonnegative_for_exact_oracles() {
        let mut rng = rng_from_seed(5);
        for trial in 0..20 {
            let game = MatrixGame::random_zero_sum(5, 4, 500 + trial);
            let spec = SubgameSpec::from_matrix(game);
            let policies: Vec<Policy> = [5usize, 4]
                .iter()
                .map(|&n| {
                    let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
                    Policy::from_weights(&w).unwrap()
                })
                .collect();
            let r = exploitability(&spec, &policies, false).unwrap();
            for (g, (br, pv)) in r.gains.iter().zip(r.br_values.iter().zip(&r.policy_values)) {
                assert!(*g >= -1e-9);
                assert!(br >= pv || (br - pv).abs() < 1e-9);
            }
        }
    }
}
