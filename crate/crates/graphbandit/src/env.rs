//! Loss and graph generators: stochastic environments with fixed means,
//! oblivious adversarial loss sequences, and per-round graph schedules.
//!
//! Every loss vector is a pure function of `(seed, round)` (or of a
//! materialized sequence), so a sequence never depends on the learner's
//! actions and replaying it against a different learner yields the identical
//! loss tensor.

use std::borrow::Cow;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::FeedbackGraph;
use crate::rng::{mix, stream_rng};

/// Per-round noise applied around each arm's mean loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    /// Loss is 1 with probability equal to the mean, else 0.
    Bernoulli,
    /// Loss is uniform on `mean ± width/2`, clamped into `[0, 1]`.
    UniformBand { width: f64 },
}

/// I.i.d. losses with a fixed mean per arm.
#[derive(Debug, Clone)]
pub struct StochasticEnv {
    means: Vec<f64>,
    noise: NoiseKind,
    seed: u64,
}

impl StochasticEnv {
    pub fn new(means: Vec<f64>, noise: NoiseKind, seed: u64) -> Result<Self> {
        if means.len() < 2 {
            return Err(Error::Domain(format!(
                "a stochastic environment needs at least 2 arms, got {}",
                means.len()
            )));
        }
        if let Some(&bad) = means.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(Error::Domain(format!("mean loss {bad} outside [0, 1]")));
        }
        if let NoiseKind::UniformBand { width } = noise {
            if !(0.0..=1.0).contains(&width) {
                return Err(Error::Domain(format!(
                    "uniform band width {width} outside [0, 1]"
                )));
            }
        }
        Ok(StochasticEnv { means, noise, seed })
    }

    pub fn num_arms(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Arm with the smallest mean loss, ties to the lowest index.
    pub fn best_arm(&self) -> usize {
        let mut best = 0;
        for i in 1..self.means.len() {
            if self.means[i] < self.means[best] {
                best = i;
            }
        }
        best
    }

    /// Per-arm suboptimality gaps against the best arm.
    pub fn gaps(&self) -> Vec<f64> {
        let best = self.means[self.best_arm()];
        self.means.iter().map(|&m| m - best).collect()
    }

    /// Smallest positive gap, if any arm is suboptimal.
    pub fn min_positive_gap(&self) -> Option<f64> {
        self.gaps()
            .into_iter()
            .filter(|&g| g > 0.0)
            .fold(None, |acc, g| Some(acc.map_or(g, |a: f64| a.min(g))))
    }

    /// The full loss vector for round `t >= 1`, a pure function of
    /// `(seed, t)`.
    pub fn losses_at(&self, round: u64) -> Vec<f64> {
        let mut rng = stream_rng(self.seed, round);
        self.means
            .iter()
            .map(|&mean| match self.noise {
                NoiseKind::Bernoulli => {
                    if rng.random::<f64>() < mean {
                        1.0
                    } else {
                        0.0
                    }
                }
                NoiseKind::UniformBand { width } => {
                    (mean + width * (rng.random::<f64>() - 0.5)).clamp(0.0, 1.0)
                }
            })
            .collect()
    }
}

/// Where an adversarial sequence comes from.
#[derive(Debug, Clone)]
pub enum LossSource {
    /// Fully materialized rows, e.g. loaded from a CSV file.
    Sequence(Arc<Vec<Vec<f64>>>),
    /// Independent uniform draws per round and arm.
    IidUniform,
    /// Bernoulli draws around a mean vector that is reversed from
    /// `flip_at` on, to exercise regime changes.
    MeanShift { means: Vec<f64>, flip_at: u64 },
}

/// An oblivious adversarial loss sequence: fixed (or derivable from the
/// seed alone) before play begins.
#[derive(Debug, Clone)]
pub struct AdversarialEnv {
    num_arms: usize,
    source: LossSource,
    seed: u64,
}

impl AdversarialEnv {
    pub fn iid_uniform(num_arms: usize, seed: u64) -> Result<Self> {
        if num_arms < 2 {
            return Err(Error::Domain(format!(
                "an adversarial environment needs at least 2 arms, got {num_arms}"
            )));
        }
        Ok(AdversarialEnv {
            num_arms,
            source: LossSource::IidUniform,
            seed,
        })
    }

    pub fn mean_shift(means: Vec<f64>, flip_at: u64, seed: u64) -> Result<Self> {
        if means.len() < 2 {
            return Err(Error::Domain(format!(
                "an adversarial environment needs at least 2 arms, got {}",
                means.len()
            )));
        }
        if let Some(&bad) = means.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(Error::Domain(format!("mean loss {bad} outside [0, 1]")));
        }
        Ok(AdversarialEnv {
            num_arms: means.len(),
            source: LossSource::MeanShift { means, flip_at },
            seed,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::Domain("adversarial loss sequence is empty".into()));
        };
        let num_arms = first.len();
        if num_arms < 2 {
            return Err(Error::Domain(format!(
                "an adversarial environment needs at least 2 arms, got {num_arms}"
            )));
        }
        for (idx, row) in rows.iter().enumerate() {
            if row.len() != num_arms {
                return Err(Error::Domain(format!(
                    "loss row {} has {} entries, expected {num_arms}",
                    idx + 1,
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|l| !(0.0..=1.0).contains(*l)) {
                return Err(Error::Domain(format!(
                    "loss {bad} in row {} outside [0, 1]",
                    idx + 1
                )));
            }
        }
        Ok(AdversarialEnv {
            num_arms,
            source: LossSource::Sequence(Arc::new(rows)),
            seed: 0,
        })
    }

    /// Loads a CSV file with one row per round, `K` comma-separated losses.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut rows = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            let row: Vec<f64> = trimmed
                .split(',')
                .map(|field| {
                    field.trim().parse::<f64>().map_err(|_| Error::Parse {
                        line: idx + 1,
                        msg: format!("expected a loss value, got {field:?}"),
                    })
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        Self::from_rows(rows)
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    /// Number of materialized rounds, when the sequence is finite.
    pub fn sequence_len(&self) -> Option<usize> {
        match &self.source {
            LossSource::Sequence(rows) => Some(rows.len()),
            _ => None,
        }
    }

    pub fn losses_at(&self, round: u64) -> Result<Vec<f64>> {
        match &self.source {
            LossSource::Sequence(rows) => {
                rows.get((round - 1) as usize).cloned().ok_or_else(|| {
                    Error::Domain(format!(
                        "loss sequence has {} rounds, requested round {round}",
                        rows.len()
                    ))
                })
            }
            LossSource::IidUniform => {
                let mut rng = stream_rng(self.seed, round);
                Ok((0..self.num_arms).map(|_| rng.random()).collect())
            }
            LossSource::MeanShift { means, flip_at } => {
                let mut rng = stream_rng(self.seed, round);
                let pick = |i: usize| {
                    if round >= *flip_at {
                        means[means.len() - 1 - i]
                    } else {
                        means[i]
                    }
                };
                Ok((0..self.num_arms)
                    .map(|i| {
                        if rng.random::<f64>() < pick(i) {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect())
            }
        }
    }
}

/// The per-round loss source driving one run.
#[derive(Debug, Clone)]
pub enum Environment {
    Stochastic(StochasticEnv),
    Adversarial(AdversarialEnv),
}

impl Environment {
    pub fn num_arms(&self) -> usize {
        match self {
            Environment::Stochastic(env) => env.num_arms(),
            Environment::Adversarial(env) => env.num_arms(),
        }
    }

    pub fn losses_at(&self, round: u64) -> Result<Vec<f64>> {
        match self {
            Environment::Stochastic(env) => Ok(env.losses_at(round)),
            Environment::Adversarial(env) => env.losses_at(round),
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, Environment::Stochastic(_))
    }

    /// Pseudo-regret of a completed run given the arms chosen in rounds
    /// `1..=trace.len()`.
    ///
    /// Stochastic mode sums the suboptimality gaps of the chosen arms
    /// (never negative); adversarial mode compares the realized loss with
    /// the best fixed arm in hindsight and may be negative for a single run.
    pub fn pseudo_regret(&self, chosen: &[usize]) -> Result<f64> {
        match self {
            Environment::Stochastic(env) => {
                let gaps = env.gaps();
                Ok(chosen.iter().map(|&arm| gaps[arm]).sum())
            }
            Environment::Adversarial(env) => {
                let mut learner_total = 0.0;
                let mut arm_totals = vec![0.0; env.num_arms()];
                for (idx, &arm) in chosen.iter().enumerate() {
                    let losses = env.losses_at(idx as u64 + 1)?;
                    learner_total += losses[arm];
                    for (total, loss) in arm_totals.iter_mut().zip(&losses) {
                        *total += loss;
                    }
                }
                let best = arm_totals.iter().copied().fold(f64::INFINITY, f64::min);
                Ok(learner_total - best)
            }
        }
    }
}

/// Named graph families for corpus generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphFamily {
    /// Self-loops only.
    Bandit { num_arms: usize },
    /// Every ordered pair.
    Complete { num_arms: usize },
    /// Each candidate edge appears independently with `edge_prob`.
    ErdosRenyi {
        num_arms: usize,
        edge_prob: f64,
        #[serde(default)]
        directed: bool,
    },
    /// Arm 0 mutually connected to every other arm.
    Star { num_arms: usize },
    /// Disjoint undirected cliques.
    Cliques {
        num_cliques: usize,
        clique_size: usize,
    },
    /// Undirected cycle.
    Cycle { num_arms: usize },
}

/// Builds a graph from a family description, deterministically in the seed.
pub fn generate_graph(family: &GraphFamily, seed: u64) -> Result<FeedbackGraph> {
    let need_arms = |n: usize| -> Result<usize> {
        if n < 2 {
            Err(Error::Domain(format!(
                "graph families need at least 2 arms, got {n}"
            )))
        } else {
            Ok(n)
        }
    };
    match *family {
        GraphFamily::Bandit { num_arms } => FeedbackGraph::new(need_arms(num_arms)?, &[]),
        GraphFamily::Complete { num_arms } => {
            let k = need_arms(num_arms)?;
            let mut edges = Vec::with_capacity(k * k);
            for u in 0..k {
                for v in 0..k {
                    edges.push((u, v));
                }
            }
            FeedbackGraph::new(k, &edges)
        }
        GraphFamily::ErdosRenyi {
            num_arms,
            edge_prob,
            directed,
        } => {
            let k = need_arms(num_arms)?;
            if !(0.0..=1.0).contains(&edge_prob) {
                return Err(Error::Domain(format!(
                    "edge probability {edge_prob} outside [0, 1]"
                )));
            }
            let mut rng = stream_rng(seed, 0);
            let mut edges = Vec::new();
            if directed {
                for u in 0..k {
                    for v in 0..k {
                        if u != v && rng.random::<f64>() < edge_prob {
                            edges.push((u, v));
                        }
                    }
                }
            } else {
                for u in 0..k {
                    for v in (u + 1)..k {
                        if rng.random::<f64>() < edge_prob {
                            edges.push((u, v));
                            edges.push((v, u));
                        }
                    }
                }
            }
            FeedbackGraph::new(k, &edges)
        }
        GraphFamily::Star { num_arms } => {
            let k = need_arms(num_arms)?;
            let mut edges = Vec::new();
            for leaf in 1..k {
                edges.push((0, leaf));
                edges.push((leaf, 0));
            }
            FeedbackGraph::new(k, &edges)
        }
        GraphFamily::Cliques {
            num_cliques,
            clique_size,
        } => {
            if num_cliques == 0 || clique_size == 0 {
                return Err(Error::Domain(
                    "cliques need a positive count and size".into(),
                ));
            }
            let k = need_arms(num_cliques * clique_size)?;
            let mut edges = Vec::new();
            for block in 0..num_cliques {
                let base = block * clique_size;
                for u in base..base + clique_size {
                    for v in base..base + clique_size {
                        if u != v {
                            edges.push((u, v));
                        }
                    }
                }
            }
            FeedbackGraph::new(k, &edges)
        }
        GraphFamily::Cycle { num_arms } => {
            let k = need_arms(num_arms)?;
            let mut edges = Vec::new();
            for u in 0..k {
                let v = (u + 1) % k;
                edges.push((u, v));
                edges.push((v, u));
            }
            FeedbackGraph::new(k, &edges)
        }
    }
}

/// Which graph is in force at each round.
#[derive(Debug, Clone)]
pub enum GraphSchedule {
    Fixed(FeedbackGraph),
    /// Round `t` uses `graphs[(t - 1) % len]`.
    Periodic(Vec<FeedbackGraph>),
    /// A fresh seeded draw every round.
    ErdosRenyiPerRound {
        num_arms: usize,
        edge_prob: f64,
        directed: bool,
        seed: u64,
    },
}

impl GraphSchedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            GraphSchedule::Fixed(_) => Ok(()),
            GraphSchedule::Periodic(graphs) => {
                let Some(first) = graphs.first() else {
                    return Err(Error::Domain("periodic schedule has no graphs".into()));
                };
                if graphs.iter().any(|g| g.num_arms() != first.num_arms()) {
                    return Err(Error::Domain(
                        "every graph in a schedule must have the same number of arms".into(),
                    ));
                }
                Ok(())
            }
            GraphSchedule::ErdosRenyiPerRound {
                num_arms,
                edge_prob,
                ..
            } => {
                if *num_arms < 2 {
                    return Err(Error::Domain(format!(
                        "graph schedules need at least 2 arms, got {num_arms}"
                    )));
                }
                if !(0.0..=1.0).contains(edge_prob) {
                    return Err(Error::Domain(format!(
                        "edge probability {edge_prob} outside [0, 1]"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn num_arms(&self) -> usize {
        match self {
            GraphSchedule::Fixed(g) => g.num_arms(),
            GraphSchedule::Periodic(graphs) => graphs[0].num_arms(),
            GraphSchedule::ErdosRenyiPerRound { num_arms, .. } => *num_arms,
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, GraphSchedule::Fixed(_))
    }

    /// The graph in force at round `t >= 1`.
    pub fn graph_at(&self, round: u64) -> Cow<'_, FeedbackGraph> {
        match self {
            GraphSchedule::Fixed(g) => Cow::Borrowed(g),
            GraphSchedule::Periodic(graphs) => {
                Cow::Borrowed(&graphs[((round - 1) % graphs.len() as u64) as usize])
            }
            GraphSchedule::ErdosRenyiPerRound {
                num_arms,
                edge_prob,
                directed,
                seed,
            } => Cow::Owned(
                generate_graph(
                    &GraphFamily::ErdosRenyi {
                        num_arms: *num_arms,
                        edge_prob: *edge_prob,
                        directed: *directed,
                    },
                    mix(*seed, round),
                )
                .expect("parameters validated at construction"),
            ),
        }
    }
}
