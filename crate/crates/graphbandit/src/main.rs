//! Command-line front end: run experiments, verify the implementation's
//! invariants, inspect graphs, and generate graph corpora.

use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use graphbandit::env::{generate_graph, GraphFamily};
use graphbandit::graph::FeedbackGraph;
use graphbandit::harness::{run_experiment_to_dir, ExperimentSpec, THREADS_ENV_VAR};
use graphbandit::verify::{self, VerifyLevel};

#[derive(Parser)]
#[command(
    name = "graphbandit",
    version,
    about = "Online learning with directed feedback graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment spec and write trace/aggregate CSVs plus metadata.
    Run {
        /// JSON experiment spec.
        spec: PathBuf,
        /// Output directory (falls back to the spec's `output_dir`).
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Worker-pool size (falls back to GRAPHBANDIT_THREADS, then all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the property-check suites and exit nonzero on failure.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Print a graph's oracle statistics as JSON.
    GraphStats {
        /// Edge-list or JSON graph file.
        path: PathBuf,
        /// Reject graphs that do not list every self-loop.
        #[arg(long)]
        strict: bool,
    },
    /// Generate a graph from a named family.
    GenGraph {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Arm count (bandit, complete, erdos-renyi, star, cycle).
        #[arg(long)]
        arms: Option<usize>,
        /// Edge probability (erdos-renyi).
        #[arg(long)]
        edge_prob: Option<f64>,
        /// Draw directed edges (erdos-renyi).
        #[arg(long)]
        directed: bool,
        /// Number of cliques (cliques).
        #[arg(long)]
        num_cliques: Option<usize>,
        /// Arms per clique (cliques).
        #[arg(long)]
        clique_size: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit JSON instead of the edge-list text format.
        #[arg(long)]
        json: bool,
        /// Write to a file instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Copy, Clone, ValueEnum)]
enum FamilyArg {
    Bandit,
    Complete,
    ErdosRenyi,
    Star,
    Cliques,
    Cycle,
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run {
            spec,
            output_dir,
            threads,
        } => {
            let parsed = ExperimentSpec::from_path(&spec)
                .with_context(|| format!("failed to load {}", spec.display()))?;
            let out_dir = output_dir
                .or_else(|| parsed.output_dir.clone())
                .context("no output directory: pass --output-dir or set output_dir in the spec")?;
            let result = run_experiment_to_dir(&parsed, &out_dir, threads)?;
            println!("config {}", result.config_hash);
            for learner in &result.learners {
                let idx = result.grid.len() - 1;
                println!(
                    "{}: mean regret {:.3} +/- {:.3} at t={} over {} replicates",
                    learner.name,
                    learner.mean_regret[idx],
                    learner.stderr_regret[idx],
                    result.grid[idx],
                    learner.final_regrets.len(),
                );
            }
            println!("wrote {}", out_dir.display());
            if threads.is_none() && std::env::var(THREADS_ENV_VAR).is_ok() {
                eprintln!("(worker pool sized from {THREADS_ENV_VAR})");
            }
            Ok(())
        }
        Command::Verify { level, seed } => {
            let level = match level {
                LevelArg::Fast => VerifyLevel::Fast,
                LevelArg::Full => VerifyLevel::Full,
            };
            let results = verify::run(level, seed);
            let mut failed = false;
            for check in &results {
                let tag = if check.passed { "PASS" } else { "FAIL" };
                println!("[{tag}] {} — {}", check.name, check.detail);
                failed |= !check.passed;
            }
            if failed {
                std::process::exit(1);
            }
            Ok(())
        }
        Command::GraphStats { path, strict } => {
            let graph = if strict {
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("failed to read {}", path.display()))?;
                FeedbackGraph::from_text_strict(&text)?
            } else {
                FeedbackGraph::from_path(&path)?
            };
            let stats = graph.stats()?;
            println!("{}", serde_json::to_string_pretty(&stats)?);
            Ok(())
        }
        Command::GenGraph {
            family,
            arms,
            edge_prob,
            directed,
            num_cliques,
            clique_size,
            seed,
            json,
            output,
        } => {
            let need_arms = || arms.context("--arms is required for this family");
            let family = match family {
                FamilyArg::Bandit => GraphFamily::Bandit {
                    num_arms: need_arms()?,
                },
                FamilyArg::Complete => GraphFamily::Complete {
                    num_arms: need_arms()?,
                },
                FamilyArg::ErdosRenyi => GraphFamily::ErdosRenyi {
                    num_arms: need_arms()?,
                    edge_prob: edge_prob.context("--edge-prob is required for erdos-renyi")?,
                    directed,
                },
                FamilyArg::Star => GraphFamily::Star {
                    num_arms: need_arms()?,
                },
                FamilyArg::Cliques => GraphFamily::Cliques {
                    num_cliques: num_cliques.context("--num-cliques is required for cliques")?,
                    clique_size: clique_size.context("--clique-size is required for cliques")?,
                },
                FamilyArg::Cycle => GraphFamily::Cycle {
                    num_arms: need_arms()?,
                },
            };
            let graph = generate_graph(&family, seed)?;
            let text = if json {
                let mut s = graph.to_json_string();
                s.push('\n');
                s
            } else {
                graph.to_edge_list_text()
            };
            match output {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("failed to write {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}
