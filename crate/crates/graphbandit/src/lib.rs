//! Online learning with directed feedback graphs.
//!
//! Playing an arm reveals the losses of its whole out-neighborhood, so a
//! learner can spend far less exploration than a bandit would. This crate
//! implements an exponential-weights learner whose targeted exploration set
//! is simultaneously dominating and strongly independent, the exact graph
//! oracles its guarantees are stated in (independence number, strong
//! independence number, largest acyclic vertex set), stochastic and
//! oblivious-adversarial environments with time-varying graph schedules,
//! and a seeded experiment harness with CSV output.
//!
//! The `graphbandit` binary exposes the harness: `run`, `verify`,
//! `graph-stats`, and `gen-graph`.

pub mod env;
pub mod error;
pub mod estimator;
pub mod explore;
pub mod graph;
pub mod harness;
pub mod learner;
pub mod rng;
pub mod verify;

pub use env::{
    generate_graph, AdversarialEnv, Environment, GraphFamily, GraphSchedule, NoiseKind,
    StochasticEnv,
};
pub use error::{Error, Result};
pub use estimator::{GapEstimator, GapSnapshot};
pub use explore::{build_exploration_set, ExplorationCache, ExplorationPlan};
pub use graph::{FeedbackGraph, GraphStats, INDEPENDENCE_BRUTE_CAP, MAS_BRUTE_CAP};
pub use harness::{run_experiment, run_experiment_to_dir, ExperimentResult, ExperimentSpec};
pub use learner::{EtaMode, Exp3Baseline, Learner, LearnerConfig, Policy, StepDetail, StepOutcome};
pub use verify::{CheckResult, VerifyLevel};
