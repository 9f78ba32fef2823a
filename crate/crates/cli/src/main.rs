//! Command-line interface for the equilibrium-search engine.
//!
//! Every subcommand is reproducible: outputs are a function of the config
//! file / flags and the master seed, written as flat tables plus a run
//! manifest under the output directory.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use eqsearch::estimators::unbiasedness_check;
use eqsearch::experiments::{
    evaluate_1v6, format_decision, play_game, sweep, AgentSpec, MatchReport, SweepAxis,
};
use eqsearch::exploit::{seed_average_experiment, SeedAverageConfig};
use eqsearch::matrix::MatrixGame;
use eqsearch::output::{fmt_f64, write_table, RunManifest};
use eqsearch::ratings::{fit_ratings, rating_loss, OutcomeDataset, RatingFitConfig};
use eqsearch::regret::{run_rm, RmConfig};
use eqsearch::subgame::SubgameSpec;

#[derive(Parser)]
#[command(name = "eqsearch", version, about = "Equilibrium search over simultaneous-move games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RmArgs {
    /// Regret matching iterations.
    #[arg(long, default_value_t = 1024)]
    iters: u64,
    /// Disable linear (iteration-weighted) updates.
    #[arg(long)]
    no_linear: bool,
    /// Disable optimism (counting the newest regret twice).
    #[arg(long)]
    no_optimism: bool,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl RmArgs {
    fn config(&self, trace_every: u64) -> RmConfig {
        RmConfig {
            iterations: self.iters,
            linear: !self.no_linear,
            optimism: !self.no_optimism,
            seed: self.seed,
            trace_every,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve an explicit matrix game with sampled regret matching.
    SolveMatrix {
        /// Path to a matrix game file (JSON).
        game_file: PathBuf,
        #[command(flatten)]
        rm: RmArgs,
        /// Exploitability trace interval (0 disables).
        #[arg(long, default_value_t = 16)]
        trace_every: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Seed-averaging experiment on random zero-sum games.
    SeedAverage {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// Total seeded runs, split evenly across games.
        #[arg(long, default_value_t = 10000)]
        seeds: usize,
        #[arg(long, default_value_t = 256)]
        iters: u64,
        #[arg(long, default_value_t = 20)]
        games: usize,
        /// Per-run random action cap per player (0 = no cap).
        #[arg(long, default_value_t = 50)]
        max_actions: usize,
        /// Run with optimism on (off reproduces the reference table).
        #[arg(long)]
        optimism: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Exploitability-vs-iteration trace for a matrix game.
    Trace {
        #[arg(long)]
        game_file: PathBuf,
        #[arg(long, default_value_t = 1024)]
        iters: u64,
        /// Trace interval in iterations.
        #[arg(long, default_value_t = 8)]
        every: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Play full GridConquest games between configured agents.
    Play {
        #[arg(long)]
        config: PathBuf,
    },
    /// One agent of kind A against copies of kind B, seat rotated.
    Evaluate1v6 {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sweep one search parameter across values, one tournament each.
    Sweep {
        /// Axis: actions-per-unit, iterations, or rollout-horizon.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values.
        #[arg(long)]
        values: String,
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit ratings from a pairwise-outcome dataset.
    Rate {
        /// Flat table: game_id,player_id,outcome_rank (rank 0 best).
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        lambda: f64,
        #[arg(long, default_value_t = 0.01)]
        learning_rate: f64,
        #[arg(long, default_value_t = 5000)]
        steps: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Statistical unbiasedness check of the entropy-gradient estimator.
    CheckEntropyGrad {
        #[arg(long, default_value_t = 10)]
        models: usize,
        #[arg(long, default_value_t = 5)]
        outcomes: usize,
        #[arg(long, default_value_t = 200)]
        batches: usize,
        #[arg(long, default_value_t = 10000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

/// Config file for `play`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PlayConfig {
    agents: Vec<AgentSpec>,
    #[serde(default = "one")]
    games: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_out")]
    output_dir: PathBuf,
}

/// Config file for `evaluate-1v6` and `sweep`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct MatchConfig {
    agent_a: AgentSpec,
    agent_b: AgentSpec,
    #[serde(default = "one")]
    games: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_out")]
    output_dir: PathBuf,
}

fn one() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn load_config<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn match_rows(report: &MatchReport) -> Vec<Vec<String>> {
    report
        .games
        .iter()
        .enumerate()
        .map(|(g, (seed, seat, scores))| {
            let mut row = vec![g.to_string(), seed.to_string(), seat.to_string()];
            row.extend(scores.scores().iter().map(|&s| fmt_f64(s)));
            row
        })
        .collect()
}

fn write_match_outputs(dir: &PathBuf, report: &MatchReport) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_table(
        dir.join("games.csv"),
        &["game", "seed", "a_seat", "score_p0", "score_p1", "score_p2", "score_p3"],
        &match_rows(report),
    )?;
    write_table(
        dir.join("summary.csv"),
        &["agent", "mean_sos", "std_error", "games"],
        &[
            vec![
                report.agent_a.agent.clone(),
                fmt_f64(report.agent_a.mean),
                fmt_f64(report.agent_a.std_error),
                report.agent_a.games.to_string(),
            ],
            vec![
                report.agent_b.agent.clone(),
                fmt_f64(report.agent_b.mean),
                fmt_f64(report.agent_b.std_error),
                report.agent_b.games.to_string(),
            ],
        ],
    )?;
    Ok(())
}

fn finish(manifest: &mut RunManifest, dir: &PathBuf, started: Instant) -> Result<()> {
    manifest.elapsed_secs = started.elapsed().as_secs_f64();
    manifest.write(dir)?;
    Ok(())
}

fn main() -> Result<()> {
    let started = Instant::now();
    match Cli::parse().command {
        Command::SolveMatrix {
            game_file,
            rm,
            trace_every,
            out,
        } => {
            let game = MatrixGame::from_json(&fs::read_to_string(&game_file)?)?;
            let spec = SubgameSpec::from_matrix(game);
            let cfg = rm.config(trace_every);
            let result = run_rm(&spec, &cfg)?;
            fs::create_dir_all(&out)?;
            fs::write(out.join("result.json"), serde_json::to_string_pretty(&result)?)?;
            let trace_rows: Vec<Vec<String>> = result
                .trace
                .iter()
                .map(|t| vec![t.iteration.to_string(), fmt_f64(t.exploitability)])
                .collect();
            write_table(out.join("trace.csv"), &["iteration", "exploitability"], &trace_rows)?;
            let mut policy_rows = Vec::new();
            for (p, (final_p, avg_p)) in result
                .final_policies
                .iter()
                .zip(&result.avg_policies)
                .enumerate()
            {
                for a in 0..final_p.len() {
                    policy_rows.push(vec![
                        p.to_string(),
                        a.to_string(),
                        fmt_f64(final_p.prob(a)),
                        fmt_f64(avg_p.prob(a)),
                        fmt_f64(result.avg_utilities[p][a]),
                    ]);
                }
            }
            write_table(
                out.join("policies.csv"),
                &["player", "action", "final_prob", "avg_prob", "avg_utility"],
                &policy_rows,
            )?;
            let mut manifest = RunManifest::new(
                "solve-matrix",
                serde_json::json!({"game_file": game_file, "rm": cfg, "trace_every": trace_every}),
                cfg.seed,
            );
            finish(&mut manifest, &out, started)?;
            println!("solved: trace points {}, output in {}", result.trace.len(), out.display());
        }
        Command::SeedAverage {
            rows,
            cols,
            seeds,
            iters,
            games,
            max_actions,
            optimism,
            seed,
            out,
        } => {
            let cfg = SeedAverageConfig {
                rows,
                cols,
                rm: RmConfig {
                    iterations: iters,
                    linear: true,
                    optimism,
                    seed,
                    trace_every: 0,
                },
                num_seeds: seeds,
                num_games: games,
                max_actions: if max_actions == 0 { None } else { Some(max_actions) },
            };
            let report = seed_average_experiment(&cfg)?;
            fs::create_dir_all(&out)?;
            fs::write(out.join("report.json"), serde_json::to_string_pretty(&report)?)?;
            write_table(
                out.join("seed_average.csv"),
                &["quantity", "value"],
                &[
                    vec!["single_final".into(), fmt_f64(report.single_final)],
                    vec!["single_avg".into(), fmt_f64(report.single_avg)],
                    vec!["avg_of_avg".into(), fmt_f64(report.avg_of_avg)],
                    vec!["avg_of_final".into(), fmt_f64(report.avg_of_final)],
                ],
            )?;
            let mut rows_out = Vec::new();
            for (g, row) in report.per_game.iter().enumerate() {
                for (k, name) in ["single_final", "single_avg", "avg_of_avg", "avg_of_final"]
                    .iter()
                    .enumerate()
                {
                    rows_out.push(vec![
                        g.to_string(),
                        report.seeds_per_game.to_string(),
                        report.iterations.to_string(),
                        (*name).to_string(),
                        fmt_f64(row[k]),
                    ]);
                }
            }
            write_table(
                out.join("measurements.csv"),
                &["game_id", "seeds", "iteration", "quantity", "value"],
                &rows_out,
            )?;
            let mut manifest =
                RunManifest::new("seed-average", serde_json::to_value(&cfg)?, seed);
            finish(&mut manifest, &out, started)?;
            println!(
                "single_final={:.4} single_avg={:.4} avg_of_avg={:.4} avg_of_final={:.4}",
                report.single_final, report.single_avg, report.avg_of_avg, report.avg_of_final
            );
        }
        Command::Trace {
            game_file,
            iters,
            every,
            seed,
            out,
        } => {
            let game = MatrixGame::from_json(&fs::read_to_string(&game_file)?)?;
            let spec = SubgameSpec::from_matrix(game);
            let cfg = RmConfig {
                iterations: iters,
                seed,
                trace_every: every,
                ..RmConfig::default()
            };
            let result = run_rm(&spec, &cfg)?;
            fs::create_dir_all(&out)?;
            let rows: Vec<Vec<String>> = result
                .trace
                .iter()
                .map(|t| vec![t.iteration.to_string(), fmt_f64(t.exploitability)])
                .collect();
            write_table(out.join("trace.csv"), &["iteration", "exploitability"], &rows)?;
            let mut manifest = RunManifest::new(
                "trace",
                serde_json::json!({"game_file": game_file, "rm": cfg}),
                seed,
            );
            finish(&mut manifest, &out, started)?;
            for t in &result.trace {
                println!("{}\t{}", t.iteration, fmt_f64(t.exploitability));
            }
        }
        Command::Play { config } => {
            let cfg: PlayConfig = load_config(&config)?;
            if cfg.agents.len() != 4 {
                bail!("play config needs exactly 4 agents");
            }
            let dir = cfg.output_dir.clone();
            fs::create_dir_all(&dir)?;
            let mut score_rows = Vec::new();
            let mut log = String::new();
            for g in 0..cfg.games {
                let game_seed = eqsearch::rng::child_seed(cfg.seed, g as u64);
                let record = play_game(&cfg.agents, game_seed, true)?;
                let mut row = vec![g.to_string(), game_seed.to_string()];
                row.extend(record.scores.scores().iter().map(|&s| fmt_f64(s)));
                score_rows.push(row);
                log.push_str(&serde_json::to_string(&record)?);
                log.push('\n');
                for phase in &record.phases {
                    for (seat, decision) in &phase.decisions {
                        println!(
                            "game {g} year {} seat {seat}\n{}",
                            phase.year,
                            format_decision(decision)
                        );
                    }
                }
            }
            fs::write(dir.join("games.jsonl"), log)?;
            write_table(
                dir.join("scores.csv"),
                &["game", "seed", "score_p0", "score_p1", "score_p2", "score_p3"],
                &score_rows,
            )?;
            let mut manifest = RunManifest::new("play", serde_json::to_value(&cfg)?, cfg.seed);
            finish(&mut manifest, &dir, started)?;
            println!("played {} games into {}", cfg.games, dir.display());
        }
        Command::Evaluate1v6 { config } => {
            let cfg: MatchConfig = load_config(&config)?;
            let report = evaluate_1v6(&cfg.agent_a, &cfg.agent_b, cfg.games, cfg.seed)?;
            let dir = cfg.output_dir.clone();
            write_match_outputs(&dir, &report)?;
            let mut manifest =
                RunManifest::new("evaluate-1v6", serde_json::to_value(&cfg)?, cfg.seed);
            finish(&mut manifest, &dir, started)?;
            println!(
                "{}: {:.4} +- {:.4} | {}: {:.4} +- {:.4} ({} games)",
                report.agent_a.agent,
                report.agent_a.mean,
                report.agent_a.std_error,
                report.agent_b.agent,
                report.agent_b.mean,
                report.agent_b.std_error,
                cfg.games
            );
        }
        Command::Sweep {
            axis,
            values,
            config,
        } => {
            let cfg: MatchConfig = load_config(&config)?;
            let axis = match axis.as_str() {
                "actions-per-unit" | "m" => SweepAxis::ActionsPerUnit,
                "iterations" => SweepAxis::Iterations,
                "rollout-horizon" => SweepAxis::RolloutHorizon,
                other => bail!("unknown sweep axis: {other}"),
            };
            let values: Vec<f64> = values
                .split(',')
                .map(|v| v.trim().parse::<f64>().context("parsing sweep value"))
                .collect::<Result<_>>()?;
            let reports = sweep(axis, &values, &cfg.agent_a, &cfg.agent_b, cfg.games, cfg.seed)?;
            let dir = cfg.output_dir.clone();
            fs::create_dir_all(&dir)?;
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|(value, r)| {
                    vec![
                        fmt_f64(*value),
                        fmt_f64(r.agent_a.mean),
                        fmt_f64(r.agent_a.std_error),
                        fmt_f64(r.agent_b.mean),
                        r.agent_a.games.to_string(),
                    ]
                })
                .collect();
            write_table(
                dir.join("sweep.csv"),
                &["value", "a_mean", "a_std_error", "b_mean", "games"],
                &rows,
            )?;
            let mut manifest = RunManifest::new(
                "sweep",
                serde_json::json!({"axis": axis, "values": values, "config": cfg}),
                cfg.seed,
            );
            finish(&mut manifest, &dir, started)?;
            for (value, r) in &reports {
                println!("{value}: a={:.4}+-{:.4}", r.agent_a.mean, r.agent_a.std_error);
            }
        }
        Command::Rate {
            dataset,
            lambda,
            learning_rate,
            steps,
            out,
        } => {
            let text = fs::read_to_string(&dataset)
                .with_context(|| format!("reading {}", dataset.display()))?;
            let d = parse_outcome_table(&text)?;
            let cfg = RatingFitConfig {
                lambda,
                learning_rate,
                steps,
                squared_norm: false,
            };
            let fit = fit_ratings(&d, &cfg)?;
            let loss = rating_loss(&fit.ratings, &d, lambda, false);
            fs::create_dir_all(&out)?;
            let rows: Vec<Vec<String>> = fit
                .ratings
                .iter()
                .enumerate()
                .map(|(p, &s)| vec![p.to_string(), fmt_f64(s)])
                .collect();
            write_table(out.join("ratings.csv"), &["player_id", "rating"], &rows)?;
            let mut manifest = RunManifest::new(
                "rate",
                serde_json::json!({"dataset": dataset, "fit": cfg, "final_loss": loss}),
                0,
            );
            finish(&mut manifest, &out, started)?;
            println!("fitted {} players, final loss {loss:.6}", d.num_players);
        }
        Command::CheckEntropyGrad {
            models,
            outcomes,
            batches,
            samples,
            seed,
            out,
        } => {
            let rows = unbiasedness_check(models, outcomes, batches, samples, seed)?;
            fs::create_dir_all(&out)?;
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.model.to_string(),
                        r.coordinate.to_string(),
                        fmt_f64(r.exact),
                        fmt_f64(r.estimate),
                        fmt_f64(r.std_error),
                        fmt_f64(r.z_score),
                    ]
                })
                .collect();
            write_table(
                out.join("entropy_grad.csv"),
                &["model_id", "coordinate", "exact", "estimate", "stderr", "z_score"],
                &table,
            )?;
            let worst = rows.iter().map(|r| r.z_score.abs()).fold(0.0, f64::max);
            let mut manifest = RunManifest::new(
                "check-entropy-grad",
                serde_json::json!({
                    "models": models, "outcomes": outcomes,
                    "batches": batches, "samples": samples
                }),
                seed,
            );
            finish(&mut manifest, &out, started)?;
            println!("max |z| over {} coordinates: {worst:.3}", rows.len());
        }
    }
    Ok(())
}

/// Parses a `game_id,player_id,outcome_rank` table (header optional) into
/// better-outcome pairs: within a game, a strictly lower rank beats a
/// higher one.
fn parse_outcome_table(text: &str) -> Result<OutcomeDataset> {
    let mut per_game: std::collections::BTreeMap<u64, Vec<(usize, u32)>> =
        std::collections::BTreeMap::new();
    let mut max_player = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("game")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            bail!("line {}: expected game_id,player_id,outcome_rank", lineno + 1);
        }
        let game: u64 = fields[0].parse().context("game_id")?;
        let player: usize = fields[1].parse().context("player_id")?;
        let rank: u32 = fields[2].parse().context("outcome_rank")?;
        max_player = max_player.max(player);
        per_game.entry(game).or_default().push((player, rank));
    }
    let mut pairs = Vec::new();
    for players in per_game.values() {
        for &(i, ri) in players {
            for &(j, rj) in players {
                if i != j && ri < rj {
                    pairs.push((i, j));
                }
            }
        }
    }
    Ok(OutcomeDataset::new(max_player + 1, pairs)?)
}
