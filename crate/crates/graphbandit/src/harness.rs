//! Experiment orchestration: seeded replicates over (learner, environment,
//! graph schedule) triples, regret aggregation, and CSV/JSON output.
//!
//! Replicates are distributed over a worker pool, but every run's randomness
//! derives only from `(master seed, learner index, replicate index)`, so the
//! output is byte-identical regardless of scheduling. All learners share the
//! same loss sequence within a replicate, which is sound because the
//! environments are oblivious.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::env::{
    AdversarialEnv, Environment, GraphFamily, GraphSchedule, NoiseKind, StochasticEnv,
};
use crate::error::{Error, Result};
use crate::graph::{FeedbackGraph, GraphStats, INDEPENDENCE_BRUTE_CAP};
use crate::learner::{EtaMode, Exp3Baseline, Learner, LearnerConfig, Policy};
use crate::rng::{mix, mix2};

/// Overrides the worker-pool size when set.
pub const THREADS_ENV_VAR: &str = "GRAPHBANDIT_THREADS";

const SALT_ENV: u64 = 0xE1;
const SALT_LEARNER: u64 = 0x1EA2;

/// Where a graph in a spec file comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum GraphSource {
    /// Edge-list or JSON graph file.
    Path { path: PathBuf },
    /// Inline JSON graph.
    Inline {
        #[serde(rename = "K")]
        k: usize,
        edges: Vec<[usize; 2]>,
    },
    /// Generated family.
    Family {
        spec: GraphFamily,
        #[serde(default)]
        seed: u64,
    },
}

impl GraphSource {
    fn load(&self) -> Result<FeedbackGraph> {
        match self {
            GraphSource::Path { path } => FeedbackGraph::from_path(path),
            GraphSource::Inline { k, edges } => {
                let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                FeedbackGraph::new(*k, &pairs)
            }
            GraphSource::Family { spec, seed } => crate::env::generate_graph(spec, *seed),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum GraphScheduleSpec {
    Fixed {
        graph: GraphSource,
    },
    /// Round `t` uses `graphs[(t-1) % len]`.
    Periodic {
        graphs: Vec<GraphSource>,
    },
    /// A fresh seeded draw every round.
    ErdosRenyiPerRound {
        num_arms: usize,
        edge_prob: f64,
        #[serde(default)]
        directed: bool,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EnvironmentSpec {
    Stochastic {
        means: Vec<f64>,
        #[serde(default = "default_noise")]
        noise: NoiseKind,
    },
    /// CSV file, one row per round, `K` losses per row. The same fixed
    /// sequence is replayed in every replicate.
    AdversarialFile { path: PathBuf },
    /// Independent uniform losses per round and arm, drawn ahead of play.
    AdversarialIidUniform { num_arms: usize },
    /// Bernoulli losses whose mean vector reverses mid-run
    /// (default: at half the horizon).
    AdversarialMeanShift {
        means: Vec<f64>,
        #[serde(default)]
        flip_at: Option<u64>,
    },
}

fn default_noise() -> NoiseKind {
    NoiseKind::Bernoulli
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: LearnerKindSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum LearnerKindSpec {
    /// The graph-aware learner. Defaults: `gamma = 4`, `beta = 320`,
    /// time-varying schedule iff the graph schedule is not fixed,
    /// `lambda` = strong independence number (fixed) or 1 (time-varying).
    Exp3Gpp {
        #[serde(default = "default_gamma")]
        gamma: f64,
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default)]
        lambda: Option<f64>,
        /// Strong independence number override; required above the
        /// brute-force cap.
        #[serde(default)]
        alpha_tilde: Option<usize>,
        /// Force the learning-rate mode instead of deriving it from the
        /// graph schedule.
        #[serde(default)]
        time_varying: Option<bool>,
        #[serde(default)]
        force_rebuild_set: bool,
    },
    /// Bandit-feedback EXP3 baseline.
    Exp3,
}

fn default_gamma() -> f64 {
    4.0
}

fn default_beta() -> f64 {
    320.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub graph: GraphScheduleSpec,
    pub environment: EnvironmentSpec,
    pub learners: Vec<LearnerSpec>,
    pub horizon: u64,
    pub replicates: u32,
    pub seed: u64,
    /// Record every n-th round (default: 10 when the horizon exceeds 10^4,
    /// else 1). The final round is always recorded.
    #[serde(default)]
    pub record_stride: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Also write per-round exploration/gap sidecar CSVs.
    #[serde(default)]
    pub debug_dumps: bool,
}

impl ExperimentSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    /// Hex digest over the serialized spec; changes when any field changes.
    pub fn config_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("spec serialization cannot fail");
        let digest = Sha256::digest(&bytes);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    fn resolved_stride(&self) -> u64 {
        self.record_stride
            .unwrap_or(if self.horizon > 10_000 { 10 } else { 1 })
    }
}

/// One recorded round of one run.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub t: u64,
    pub chosen_arm: usize,
    pub incurred_loss: f64,
    pub cumulative_loss: f64,
    pub cumulative_pseudo_regret: f64,
}

#[derive(Debug, Clone, Serialize)]
struct DebugRow {
    t: u64,
    exploration_set: String,
    epsilon: String,
    gap_estimates: String,
    ucb: String,
    lcb: String,
    learning_rate: f64,
}

/// A single replicate's recorded trajectory.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub learner: String,
    pub replicate: u32,
    pub rows: Vec<TraceRow>,
    debug_rows: Vec<DebugRow>,
}

impl RunTrace {
    pub fn final_regret(&self) -> f64 {
        self.rows
            .last()
            .map(|r| r.cumulative_pseudo_regret)
            .unwrap_or(0.0)
    }
}

/// Mean and standard-error regret on the recording grid, per learner.
#[derive(Debug, Clone)]
pub struct LearnerAggregate {
    pub name: String,
    pub mean_regret: Vec<f64>,
    pub stderr_regret: Vec<f64>,
    pub final_regrets: Vec<f64>,
}

impl LearnerAggregate {
    pub fn final_mean_regret(&self) -> f64 {
        *self.mean_regret.last().unwrap_or(&0.0)
    }

    /// Mean regret at a recorded round.
    pub fn mean_regret_at(&self, grid: &[u64], round: u64) -> Option<f64> {
        grid.iter()
            .position(|&t| t == round)
            .map(|idx| self.mean_regret[idx])
    }
}

#[derive(Debug)]
pub struct ExperimentResult {
    pub grid: Vec<u64>,
    pub learners: Vec<LearnerAggregate>,
    pub traces: Vec<RunTrace>,
    pub config_hash: String,
}

impl ExperimentResult {
    pub fn learner(&self, name: &str) -> Option<&LearnerAggregate> {
        self.learners.iter().find(|l| l.name == name)
    }
}

enum EnvTemplate {
    Stochastic { means: Vec<f64>, noise: NoiseKind },
    AdversarialShared(AdversarialEnv),
    AdversarialIid { num_arms: usize },
    AdversarialShift { means: Vec<f64>, flip_at: u64 },
}

impl EnvTemplate {
    fn num_arms(&self) -> usize {
        match self {
            EnvTemplate::Stochastic { means, .. } => means.len(),
            EnvTemplate::AdversarialShared(env) => env.num_arms(),
            EnvTemplate::AdversarialIid { num_arms } => *num_arms,
            EnvTemplate::AdversarialShift { means, .. } => means.len(),
        }
    }

    fn instantiate(&self, seed: u64) -> Result<Environment> {
        Ok(match self {
            EnvTemplate::Stochastic { means, noise } => {
                Environment::Stochastic(StochasticEnv::new(means.clone(), *noise, seed)?)
            }
            EnvTemplate::AdversarialShared(env) => Environment::Adversarial(env.clone()),
            EnvTemplate::AdversarialIid { num_arms } => {
                Environment::Adversarial(AdversarialEnv::iid_uniform(*num_arms, seed)?)
            }
            EnvTemplate::AdversarialShift { means, flip_at } => {
                Environment::Adversarial(AdversarialEnv::mean_shift(means.clone(), *flip_at, seed)?)
            }
        })
    }
}

#[derive(Debug, Clone)]
enum ResolvedPolicy {
    Gpp {
        gamma: f64,
        beta: f64,
        lambda: f64,
        eta_mode: EtaMode,
        force_rebuild_set: bool,
    },
    Baseline,
}

impl ResolvedPolicy {
    fn build(&self, num_arms: usize, seed: u64) -> Result<Box<dyn Policy>> {
        Ok(match *self {
            ResolvedPolicy::Gpp {
                gamma,
                beta,
                lambda,
                eta_mode,
                force_rebuild_set,
            } => Box::new(Learner::new(
                num_arms,
                LearnerConfig {
                    gamma,
                    beta,
                    lambda,
                    eta_mode,
                    seed,
                    force_rebuild_set,
                },
            )?),
            ResolvedPolicy::Baseline => Box::new(Exp3Baseline::new(num_arms, seed)?),
        })
    }

    fn describe(&self) -> serde_json::Value {
        match self {
            ResolvedPolicy::Gpp {
                gamma,
                beta,
                lambda,
                eta_mode,
                force_rebuild_set,
            } => {
                let (mode, alpha_tilde) = match eta_mode {
                    EtaMode::FixedGraph { alpha_tilde } => ("fixed_graph", Some(*alpha_tilde)),
                    EtaMode::TimeVarying => ("time_varying", None),
                };
                serde_json::json!({
                    "algorithm": "exp3gpp",
                    "gamma": gamma,
                    "beta": beta,
                    "lambda": lambda,
                    "eta_mode": mode,
                    "alpha_tilde": alpha_tilde,
                    "force_rebuild_set": force_rebuild_set,
                })
            }
            ResolvedPolicy::Baseline => serde_json::json!({ "algorithm": "exp3" }),
        }
    }
}

struct ResolvedExperiment {
    schedule: GraphSchedule,
    env: EnvTemplate,
    learners: Vec<(String, ResolvedPolicy)>,
    horizon: u64,
    replicates: u32,
    stride: u64,
    seed: u64,
    debug_dumps: bool,
}

pub fn resolve_schedule(spec: &GraphScheduleSpec, master_seed: u64) -> Result<GraphSchedule> {
    let schedule = match spec {
        GraphScheduleSpec::Fixed { graph } => GraphSchedule::Fixed(graph.load()?),
        GraphScheduleSpec::Periodic { graphs } => GraphSchedule::Periodic(
            graphs
                .iter()
                .map(|g| g.load())
                .collect::<Result<Vec<_>>>()?,
        ),
        GraphScheduleSpec::ErdosRenyiPerRound {
            num_arms,
            edge_prob,
            directed,
        } => GraphSchedule::ErdosRenyiPerRound {
            num_arms: *num_arms,
            edge_prob: *edge_prob,
            directed: *directed,
            seed: mix(master_seed, 0x92A9),
        },
    };
    schedule.validate()?;
    Ok(schedule)
}

fn resolve(spec: &ExperimentSpec) -> Result<ResolvedExperiment> {
    if spec.learners.is_empty() {
        return Err(Error::Domain("the spec lists no learners".into()));
    }
    {
        let mut seen = std::collections::BTreeSet::new();
        for learner in &spec.learners {
            if !seen.insert(&learner.name) {
                return Err(Error::Domain(format!(
                    "duplicate learner name {:?}",
                    learner.name
                )));
            }
        }
    }
    if spec.replicates == 0 {
        return Err(Error::Domain("replicates must be at least 1".into()));
    }
    if spec.resolved_stride() == 0 {
        return Err(Error::Domain("record_stride must be at least 1".into()));
    }

    let schedule = resolve_schedule(&spec.graph, spec.seed)?;
    let num_arms = schedule.num_arms();
    if spec.horizon < num_arms as u64 + 1 {
        return Err(Error::Domain(format!(
            "horizon must be at least K+1 = {}, got {}",
            num_arms + 1,
            spec.horizon
        )));
    }

    let env = match &spec.environment {
        EnvironmentSpec::Stochastic { means, noise } => EnvTemplate::Stochastic {
            means: means.clone(),
            noise: *noise,
        },
        EnvironmentSpec::AdversarialFile { path } => {
            let env = AdversarialEnv::from_csv_path(path)?;
            if let Some(len) = env.sequence_len() {
                if (len as u64) < spec.horizon {
                    return Err(Error::Domain(format!(
                        "loss file {} has {len} rounds but the horizon is {}",
                        path.display(),
                        spec.horizon
                    )));
                }
            }
            EnvTemplate::AdversarialShared(env)
        }
        EnvironmentSpec::AdversarialIidUniform { num_arms } => EnvTemplate::AdversarialIid {
            num_arms: *num_arms,
        },
        EnvironmentSpec::AdversarialMeanShift { means, flip_at } => EnvTemplate::AdversarialShift {
            means: means.clone(),
            flip_at: flip_at.unwrap_or(spec.horizon / 2),
        },
    };
    if env.num_arms() != num_arms {
        return Err(Error::Domain(format!(
            "environment has {} arms but the graph schedule has {num_arms}",
            env.num_arms()
        )));
    }

    let mut learners = Vec::new();
    for learner in &spec.learners {
        let resolved = match &learner.kind {
            LearnerKindSpec::Exp3 => ResolvedPolicy::Baseline,
            LearnerKindSpec::Exp3Gpp {
                gamma,
                beta,
                lambda,
                alpha_tilde,
                time_varying,
                force_rebuild_set,
            } => {
                let tv = time_varying.unwrap_or(!schedule.is_fixed());
                let eta_mode = if tv {
                    EtaMode::TimeVarying
                } else {
                    let alpha_tilde = match (alpha_tilde, &schedule) {
                        (Some(a), _) => *a,
                        (None, GraphSchedule::Fixed(graph)) => {
                            if graph.num_arms() > INDEPENDENCE_BRUTE_CAP {
                                return Err(Error::Domain(format!(
                                    "learner {:?}: the graph has {} arms, above the exact-oracle cap; \
                                     supply alpha_tilde explicitly",
                                    learner.name,
                                    graph.num_arms()
                                )));
                            }
                            graph.strong_independence_number()?
                        }
                        (None, _) => {
                            return Err(Error::Domain(format!(
                                "learner {:?}: a fixed-graph learning rate on a changing graph \
                                 schedule needs an explicit alpha_tilde",
                                learner.name
                            )));
                        }
                    };
                    EtaMode::FixedGraph { alpha_tilde }
                };
                let lambda = lambda.unwrap_or(match eta_mode {
                    EtaMode::FixedGraph { alpha_tilde } => alpha_tilde as f64,
                    EtaMode::TimeVarying => 1.0,
                });
                let prototype = LearnerConfig {
                    gamma: *gamma,
                    beta: *beta,
                    lambda,
                    eta_mode,
                    seed: 0,
                    force_rebuild_set: *force_rebuild_set,
                };
                prototype.validate(num_arms)?;
                ResolvedPolicy::Gpp {
                    gamma: *gamma,
                    beta: *beta,
                    lambda,
                    eta_mode,
                    force_rebuild_set: *force_rebuild_set,
                }
            }
        };
        learners.push((learner.name.clone(), resolved));
    }

    Ok(ResolvedExperiment {
        schedule,
        env,
        learners,
        horizon: spec.horizon,
        replicates: spec.replicates,
        stride: spec.resolved_stride(),
        seed: spec.seed,
        debug_dumps: spec.debug_dumps,
    })
}

fn run_single(
    resolved: &ResolvedExperiment,
    learner_idx: usize,
    replicate: u32,
) -> Result<RunTrace> {
    let (name, policy_spec) = &resolved.learners[learner_idx];
    let num_arms = resolved.schedule.num_arms();
    let env_seed = mix2(resolved.seed, SALT_ENV, replicate as u64);
    let env = resolved.env.instantiate(env_seed)?;
    let learner_seed = mix(
        mix2(resolved.seed, SALT_LEARNER, learner_idx as u64),
        replicate as u64,
    );
    let mut policy = policy_spec.build(num_arms, learner_seed)?;

    let gaps = match &env {
        Environment::Stochastic(env) => Some(env.gaps()),
        Environment::Adversarial(_) => None,
    };
    let mut cumulative_loss = 0.0f64;
    let mut cumulative_gap_regret = 0.0f64;
    let mut arm_totals = vec![0.0f64; num_arms];
    let mut rows = Vec::new();
    let mut debug_rows = Vec::new();

    for t in 1..=resolved.horizon {
        let graph = resolved.schedule.graph_at(t);
        let losses = env.losses_at(t)?;
        let outcome = policy.step(graph.as_ref(), &mut |arm| losses[arm])?;

        cumulative_loss += losses[outcome.chosen];
        match &gaps {
            Some(gaps) => cumulative_gap_regret += gaps[outcome.chosen],
            None => {
                for (total, loss) in arm_totals.iter_mut().zip(&losses) {
                    *total += loss;
                }
            }
        }

        if t % resolved.stride == 0 || t == resolved.horizon {
            let regret = match &gaps {
                Some(_) => cumulative_gap_regret,
                None => {
                    let best = arm_totals.iter().copied().fold(f64::INFINITY, f64::min);
                    cumulative_loss - best
                }
            };
            rows.push(TraceRow {
                t,
                chosen_arm: outcome.chosen,
                incurred_loss: outcome.incurred_loss,
                cumulative_loss,
                cumulative_pseudo_regret: regret,
            });
            if resolved.debug_dumps {
                if let Some(detail) = &outcome.detail {
                    let join = |values: &[f64]| {
                        values
                            .iter()
                            .map(|v| v.to_string())
                            .collect::<Vec<_>>()
                            .join("|")
                    };
                    debug_rows.push(DebugRow {
                        t,
                        exploration_set: detail
                            .exploration_set
                            .iter()
                            .map(|a| a.to_string())
                            .collect::<Vec<_>>()
                            .join("|"),
                        epsilon: join(&detail.epsilon),
                        gap_estimates: join(&detail.snapshot.delta_hat),
                        ucb: join(&detail.snapshot.ucb),
                        lcb: join(&detail.snapshot.lcb),
                        learning_rate: detail.learning_rate,
                    });
                }
            }
        }
    }

    Ok(RunTrace {
        learner: name.clone(),
        replicate,
        rows,
        debug_rows,
    })
}

fn grid_of(resolved: &ResolvedExperiment) -> Vec<u64> {
    let mut grid: Vec<u64> = (1..=resolved.horizon)
        .filter(|t| t % resolved.stride == 0)
        .collect();
    if grid.last() != Some(&resolved.horizon) {
        grid.push(resolved.horizon);
    }
    grid
}

fn resolve_threads(threads: Option<usize>) -> usize {
    threads.unwrap_or_else(|| {
        std::env::var(THREADS_ENV_VAR)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0)
    })
}

/// Runs every (learner, replicate) pair and aggregates regret curves.
pub fn run_experiment(spec: &ExperimentSpec, threads: Option<usize>) -> Result<ExperimentResult> {
    let resolved = resolve(spec)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_threads(threads))
        .build()
        .map_err(|e| Error::Domain(format!("failed to build the worker pool: {e}")))?;

    let jobs: Vec<(usize, u32)> = (0..resolved.learners.len())
        .flat_map(|li| (0..resolved.replicates).map(move |rep| (li, rep)))
        .collect();
    let traces: Vec<RunTrace> = pool.install(|| {
        jobs.par_iter()
            .map(|&(li, rep)| run_single(&resolved, li, rep))
            .collect::<Result<Vec<_>>>()
    })?;

    let grid = grid_of(&resolved);
    let replicates = resolved.replicates as usize;
    let mut learners = Vec::new();
    for (li, (name, _)) in resolved.learners.iter().enumerate() {
        let runs = &traces[li * replicates..(li + 1) * replicates];
        let mut mean = Vec::with_capacity(grid.len());
        let mut stderr = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let values: Vec<f64> = runs
                .iter()
                .map(|run| run.rows[idx].cumulative_pseudo_regret)
                .collect();
            let m = values.iter().sum::<f64>() / replicates as f64;
            let se = if replicates > 1 {
                let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
                    / (replicates as f64 - 1.0);
                (var / replicates as f64).sqrt()
            } else {
                0.0
            };
            mean.push(m);
            stderr.push(se);
        }
        learners.push(LearnerAggregate {
            name: name.clone(),
            mean_regret: mean,
            stderr_regret: stderr,
            final_regrets: runs.iter().map(|r| r.final_regret()).collect(),
        });
    }

    Ok(ExperimentResult {
        grid,
        learners,
        traces,
        config_hash: spec.config_hash(),
    })
}

fn safe_name(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// Runs the experiment and writes per-run traces, the aggregate curve, and a
/// metadata file into `out_dir`.
pub fn run_experiment_to_dir(
    spec: &ExperimentSpec,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<ExperimentResult> {
    let result = run_experiment(spec, threads)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    for trace in &result.traces {
        let path = out_dir.join(format!(
            "trace_{}_rep{:03}.csv",
            safe_name(&trace.learner),
            trace.replicate
        ));
        let mut writer = csv::Writer::from_path(&path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(&path, io),
            other => Error::Domain(format!("csv error: {other:?}")),
        })?;
        for row in &trace.rows {
            writer
                .serialize(row)
                .map_err(|e| Error::Domain(format!("csv write failed: {e}")))?;
        }
        writer.flush().map_err(|e| Error::io(&path, e))?;

        if !trace.debug_rows.is_empty() {
            let debug_path = out_dir.join(format!(
                "debug_{}_rep{:03}.csv",
                safe_name(&trace.learner),
                trace.replicate
            ));
            let mut writer =
                csv::Writer::from_path(&debug_path).map_err(|e| match e.into_kind() {
                    csv::ErrorKind::Io(io) => Error::io(&debug_path, io),
                    other => Error::Domain(format!("csv error: {other:?}")),
                })?;
            for row in &trace.debug_rows {
                writer
                    .serialize(row)
                    .map_err(|e| Error::Domain(format!("csv write failed: {e}")))?;
            }
            writer.flush().map_err(|e| Error::io(&debug_path, e))?;
        }
    }

    let aggregate_path = out_dir.join("aggregate.csv");
    {
        let mut header = vec!["t".to_string()];
        for learner in &result.learners {
            header.push(format!("{}_mean_regret", safe_name(&learner.name)));
            header.push(format!("{}_stderr", safe_name(&learner.name)));
        }
        let mut writer =
            csv::Writer::from_path(&aggregate_path).map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::io(&aggregate_path, io),
                other => Error::Domain(format!("csv error: {other:?}")),
            })?;
        writer
            .write_record(&header)
            .map_err(|e| Error::Domain(format!("csv write failed: {e}")))?;
        for (idx, &t) in result.grid.iter().enumerate() {
            let mut record = vec![t.to_string()];
            for learner in &result.learners {
                record.push(learner.mean_regret[idx].to_string());
                record.push(learner.stderr_regret[idx].to_string());
            }
            writer
                .write_record(&record)
                .map_err(|e| Error::Domain(format!("csv write failed: {e}")))?;
        }
        writer.flush().map_err(|e| Error::io(&aggregate_path, e))?;
    }

    let metadata_path = out_dir.join("metadata.json");
    let metadata = metadata_json(spec, &result)?;
    std::fs::write(
        &metadata_path,
        serde_json::to_string_pretty(&metadata).expect("metadata serialization cannot fail"),
    )
    .map_err(|e| Error::io(&metadata_path, e))?;

    Ok(result)
}

fn metadata_json(spec: &ExperimentSpec, result: &ExperimentResult) -> Result<serde_json::Value> {
    let resolved = resolve(spec)?;
    let graph_stats: Option<Vec<GraphStats>> = match &resolved.schedule {
        GraphSchedule::Fixed(graph) => graph.stats().ok().map(|s| vec![s]),
        GraphSchedule::Periodic(graphs) => graphs
            .iter()
            .map(|g| g.stats().ok())
            .collect::<Option<Vec<_>>>(),
        GraphSchedule::ErdosRenyiPerRound { .. } => None,
    };
    let learners: Vec<serde_json::Value> = resolved
        .learners
        .iter()
        .map(|(name, policy)| {
            let mut described = policy.describe();
            described["name"] = serde_json::json!(name);
            described
        })
        .collect();
    let final_regret: BTreeMap<&str, f64> = result
        .learners
        .iter()
        .map(|l| (l.name.as_str(), l.final_mean_regret()))
        .collect();
    Ok(serde_json::json!({
        "config_hash": result.config_hash,
        "spec": spec,
        "resolved": {
            "record_stride": resolved.stride,
            "num_arms": resolved.schedule.num_arms(),
            "learners": learners,
            "graph_stats": graph_stats,
        },
        "final_mean_regret": final_regret,
    }))
}
