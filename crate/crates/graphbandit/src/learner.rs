//! Exponential-weights learners over feedback graphs.
//!
//! [`Learner`] is the graph-aware algorithm: exponential weights on
//! importance-weighted loss estimates, mixed with the targeted exploration
//! rates from [`crate::explore`], with a learning-rate schedule for either a
//! fixed graph or a per-round graph sequence. [`Exp3Baseline`] is plain
//! bandit-feedback EXP3 for comparison curves.
//!
//! Both learners spend their first `K` rounds playing each arm once in index
//! order; exponential-weight updates start at round `K + 1`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimator::{GapEstimator, GapSnapshot};
use crate::explore::ExplorationCache;
use crate::graph::FeedbackGraph;
use crate::rng::stream_rng;

/// Learning-rate schedule selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaMode {
    /// `sqrt(ln K / (2 * alpha_tilde * t))`; needs the strong independence
    /// number of the (fixed) graph.
    FixedGraph { alpha_tilde: usize },
    /// `sqrt(ln K / (2 * sum of theta))` where theta accumulates the
    /// play-to-observe probability ratios of past rounds.
    TimeVarying,
}

#[derive(Debug, Clone, Copy)]
pub struct LearnerConfig {
    /// Confidence-width exponent for the gap estimator.
    pub gamma: f64,
    /// Exploration-rate scale.
    pub beta: f64,
    /// Exploration budget shape parameter, in `[1, K]`.
    pub lambda: f64,
    pub eta_mode: EtaMode,
    pub seed: u64,
    /// Rebuild the exploration set every round instead of only when the gap
    /// order changes (differential testing).
    pub force_rebuild_set: bool,
}

impl LearnerConfig {
    /// Defaults for a fixed feedback graph with the given strong
    /// independence number.
    pub fn fixed_graph(alpha_tilde: usize, seed: u64) -> Self {
        LearnerConfig {
            gamma: 4.0,
            beta: 320.0,
            lambda: alpha_tilde as f64,
            eta_mode: EtaMode::FixedGraph { alpha_tilde },
            seed,
            force_rebuild_set: false,
        }
    }

    /// Defaults for graphs that change over time.
    pub fn time_varying(seed: u64) -> Self {
        LearnerConfig {
            gamma: 4.0,
            beta: 320.0,
            lambda: 1.0,
            eta_mode: EtaMode::TimeVarying,
            seed,
            force_rebuild_set: false,
        }
    }

    pub fn validate(&self, num_arms: usize) -> Result<()> {
        if num_arms < 2 {
            return Err(Error::Domain(format!(
                "the learner needs at least 2 arms, got {num_arms}"
            )));
        }
        if self.gamma.is_nan() || self.gamma < 3.0 {
            return Err(Error::Domain(format!(
                "gamma must be >= 3, got {}",
                self.gamma
            )));
        }
        let beta_floor = 64.0 * (self.gamma + 1.0);
        if self.beta.is_nan() || self.beta < beta_floor {
            return Err(Error::Domain(format!(
                "beta must be >= 64 * (gamma + 1) = {beta_floor}, got {}",
                self.beta
            )));
        }
        if !(1.0..=num_arms as f64).contains(&self.lambda) {
            return Err(Error::Domain(format!(
                "lambda must lie in [1, {num_arms}], got {}",
                self.lambda
            )));
        }
        if let EtaMode::FixedGraph { alpha_tilde } = self.eta_mode {
            if alpha_tilde < 1 || alpha_tilde > num_arms {
                return Err(Error::Domain(format!(
                    "alpha_tilde must lie in [1, {num_arms}], got {alpha_tilde}"
                )));
            }
        }
        Ok(())
    }
}

/// What one round produced.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub round: u64,
    pub chosen: usize,
    pub incurred_loss: f64,
    /// The revealed `(arm, loss)` pairs: the out-neighborhood of the chosen
    /// arm (just the chosen arm for bandit feedback).
    pub observed: Vec<(usize, f64)>,
    /// Distribution-level detail; absent during the deterministic
    /// initialization rounds and for the baseline.
    pub detail: Option<StepDetail>,
}

/// Per-round distributions and rates, mainly for invariant checks and
/// debug traces.
#[derive(Debug, Clone)]
pub struct StepDetail {
    /// Exponential-weights distribution before exploration mixing.
    pub weights: Vec<f64>,
    /// Sampling distribution after mixing.
    pub probs: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub observe_lower: Vec<f64>,
    /// Probability of each arm being observed under `probs`.
    pub observe_prob: Vec<f64>,
    /// The round's confidence bounds and gap estimates.
    pub snapshot: GapSnapshot,
    pub exploration_set: Vec<usize>,
    pub learning_rate: f64,
    /// Sum over arms of play probability over observe probability.
    pub theta: f64,
}

/// Shift-stable softmax of `-rate * loss_sum`.
///
/// The smallest loss sum is subtracted before exponentiation, so the largest
/// weight is exactly 1 and the normalizer is at least 1 for any finite input.
pub fn compute_weights(est_loss_sum: &[f64], learning_rate: f64) -> Vec<f64> {
    let min = est_loss_sum.iter().copied().fold(f64::INFINITY, f64::min);
    let mut weights: Vec<f64> = est_loss_sum
        .iter()
        .map(|&l| (-learning_rate * (l - min)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= z;
    }
    weights
}

/// Inverse-CDF sample over arm index order with a single uniform draw.
pub fn sample_index(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Probability of observing each arm: the sampling mass on its in-neighborhood.
pub fn observe_probs(graph: &FeedbackGraph, probs: &[f64]) -> Vec<f64> {
    (0..graph.num_arms())
        .map(|i| graph.in_neighbors(i).iter().map(|&j| probs[j]).sum())
        .collect()
}

/// Importance-weighted loss estimates for one realized outcome: observed
/// arms get `loss / observe_prob`, everything else zero.
pub fn importance_weighted_estimates(
    graph: &FeedbackGraph,
    probs: &[f64],
    chosen: usize,
    losses: &[f64],
) -> Vec<f64> {
    let observe_prob = observe_probs(graph, probs);
    let mut estimates = vec![0.0; graph.num_arms()];
    for &arm in graph.out_neighbors(chosen) {
        estimates[arm] = losses[arm] / observe_prob[arm];
    }
    estimates
}

/// `sqrt(ln K / (2 * alpha_tilde * t))`.
pub fn learning_rate_fixed(num_arms: usize, alpha_tilde: usize, round: u64) -> f64 {
    ((num_arms as f64).ln() / (2.0 * alpha_tilde as f64 * round as f64)).sqrt()
}

/// `sqrt(ln K / (2 * theta_cumsum))`.
pub fn learning_rate_time_varying(num_arms: usize, theta_cumsum: f64) -> f64 {
    ((num_arms as f64).ln() / (2.0 * theta_cumsum)).sqrt()
}

/// Plain EXP3 rate, `sqrt(ln K / (t * K))`.
pub fn learning_rate_bandit(num_arms: usize, round: u64) -> f64 {
    ((num_arms as f64).ln() / (round as f64 * num_arms as f64)).sqrt()
}

fn validated_loss(arm: usize, loss: f64, round: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&loss) {
        return Err(Error::Domain(format!(
            "environment returned loss {loss} for arm {arm} at round {round}, outside [0, 1]"
        )));
    }
    Ok(loss)
}

/// Anything the harness can drive one round at a time.
pub trait Policy {
    /// Plays one round. `loss_of` is queried exactly for the arms whose
    /// losses the feedback graph reveals, after the arm is chosen.
    fn step(
        &mut self,
        graph: &FeedbackGraph,
        loss_of: &mut dyn FnMut(usize) -> f64,
    ) -> Result<StepOutcome>;
}

/// The graph-aware exponential-weights learner.
#[derive(Debug, Clone)]
pub struct Learner {
    cfg: LearnerConfig,
    num_arms: usize,
    est_loss_sum: Vec<f64>,
    estimator: GapEstimator,
    cache: ExplorationCache,
    theta_cumsum: f64,
    round: u64,
    rng: ChaCha8Rng,
}

impl Learner {
    pub fn new(num_arms: usize, cfg: LearnerConfig) -> Result<Self> {
        cfg.validate(num_arms)?;
        Ok(Learner {
            cfg,
            num_arms,
            est_loss_sum: vec![0.0; num_arms],
            estimator: GapEstimator::new(num_arms, cfg.gamma)?,
            cache: ExplorationCache::new(),
            // Stands in for the rounds before any sampling distribution
            // exists, so the time-varying rate is defined from round K+1 on.
            theta_cumsum: num_arms as f64,
            round: 1,
            rng: stream_rng(cfg.seed, 0),
        })
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    /// Next round to be played (1-based). Rounds `1..=K` are the
    /// deterministic initialization.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.cfg
    }

    pub fn estimator(&self) -> &GapEstimator {
        &self.estimator
    }

    pub fn est_loss_sum(&self) -> &[f64] {
        &self.est_loss_sum
    }

    pub fn theta_cumsum(&self) -> f64 {
        self.theta_cumsum
    }

    fn learning_rate_at(&self, round: u64) -> f64 {
        match self.cfg.eta_mode {
            EtaMode::FixedGraph { alpha_tilde } => {
                learning_rate_fixed(self.num_arms, alpha_tilde, round)
            }
            EtaMode::TimeVarying => learning_rate_time_varying(self.num_arms, self.theta_cumsum),
        }
    }

    fn init_step(
        &mut self,
        graph: &FeedbackGraph,
        loss_of: &mut dyn FnMut(usize) -> f64,
    ) -> Result<StepOutcome> {
        let round = self.round;
        let chosen = (round - 1) as usize;
        let mut observed = Vec::with_capacity(graph.out_neighbors(chosen).len());
        for &arm in graph.out_neighbors(chosen) {
            observed.push((arm, validated_loss(arm, loss_of(arm), round)?));
        }
        self.estimator.record_observations(&observed)?;
        let incurred_loss = observed
            .iter()
            .find(|&&(arm, _)| arm == chosen)
            .map(|&(_, l)| l)
            .expect("self-loops guarantee the chosen arm is observed");
        self.round += 1;
        Ok(StepOutcome {
            round,
            chosen,
            incurred_loss,
            observed,
            detail: None,
        })
    }
}

impl Policy for Learner {
    fn step(
        &mut self,
        graph: &FeedbackGraph,
        loss_of: &mut dyn FnMut(usize) -> f64,
    ) -> Result<StepOutcome> {
        if graph.num_arms() != self.num_arms {
            return Err(Error::Domain(format!(
                "graph has {} arms but the learner was built for {}",
                graph.num_arms(),
                self.num_arms
            )));
        }
        if (self.round as usize) <= self.num_arms {
            return self.init_step(graph, loss_of);
        }

        let round = self.round;
        let snapshot = self.estimator.snapshot(round)?;
        let plan = self.cache.plan(
            graph,
            &snapshot.delta_hat,
            round,
            self.cfg.lambda,
            self.cfg.beta,
            self.cfg.force_rebuild_set,
        )?;
        let learning_rate = self.learning_rate_at(round);
        let weights = compute_weights(&self.est_loss_sum, learning_rate);
        let sum_eps: f64 = plan.epsilon.iter().sum();
        let probs: Vec<f64> = (0..self.num_arms)
            .map(|i| (1.0 - sum_eps) * weights[i] + plan.epsilon[i])
            .collect();

        let chosen = sample_index(&probs, &mut self.rng);
        let mut observed = Vec::with_capacity(graph.out_neighbors(chosen).len());
        for &arm in graph.out_neighbors(chosen) {
            observed.push((arm, validated_loss(arm, loss_of(arm), round)?));
        }

        let observe_prob = observe_probs(graph, &probs);
        for &(arm, loss) in &observed {
            if observe_prob[arm] <= 0.0 || observe_prob[arm].is_nan() {
                return Err(Error::Invariant {
                    round,
                    msg: format!(
                        "observed arm {arm} has zero observation probability; \
                         self-loops and positive exploration rule this out"
                    ),
                });
            }
            self.est_loss_sum[arm] += loss / observe_prob[arm];
        }
        self.estimator.record_observations(&observed)?;

        let theta: f64 = (0..self.num_arms).map(|i| probs[i] / observe_prob[i]).sum();
        if matches!(self.cfg.eta_mode, EtaMode::TimeVarying) {
            self.theta_cumsum += theta;
        }

        let incurred_loss = observed
            .iter()
            .find(|&&(arm, _)| arm == chosen)
            .map(|&(_, l)| l)
            .expect("self-loops guarantee the chosen arm is observed");
        self.round += 1;
        Ok(StepOutcome {
            round,
            chosen,
            incurred_loss,
            observed,
            detail: Some(StepDetail {
                weights,
                probs,
                epsilon: plan.epsilon,
                observe_lower: plan.observe_lower,
                observe_prob,
                snapshot,
                exploration_set: plan.exploration_set,
                learning_rate,
                theta,
            }),
        })
    }
}

/// Plain EXP3 with bandit feedback: only the played arm's loss is revealed
/// and importance-weighted.
#[derive(Debug, Clone)]
pub struct Exp3Baseline {
    num_arms: usize,
    est_loss_sum: Vec<f64>,
    round: u64,
    rng: ChaCha8Rng,
}

impl Exp3Baseline {
    pub fn new(num_arms: usize, seed: u64) -> Result<Self> {
        if num_arms < 2 {
            return Err(Error::Domain(format!(
                "the learner needs at least 2 arms, got {num_arms}"
            )));
        }
        Ok(Exp3Baseline {
            num_arms,
            est_loss_sum: vec![0.0; num_arms],
            round: 1,
            rng: stream_rng(seed, 0),
        })
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Current exponential-weights distribution.
    pub fn distribution(&self) -> Vec<f64> {
        compute_weights(
            &self.est_loss_sum,
            learning_rate_bandit(self.num_arms, self.round),
        )
    }
}

impl Policy for Exp3Baseline {
    fn step(
        &mut self,
        graph: &FeedbackGraph,
        loss_of: &mut dyn FnMut(usize) -> f64,
    ) -> Result<StepOutcome> {
        if graph.num_arms() != self.num_arms {
            return Err(Error::Domain(format!(
                "graph has {} arms but the learner was built for {}",
                graph.num_arms(),
                self.num_arms
            )));
        }
        let round = self.round;
        if (round as usize) <= self.num_arms {
            let chosen = (round - 1) as usize;
            let loss = validated_loss(chosen, loss_of(chosen), round)?;
            self.round += 1;
            return Ok(StepOutcome {
                round,
                chosen,
                incurred_loss: loss,
                observed: vec![(chosen, loss)],
                detail: None,
            });
        }
        let weights = compute_weights(
            &self.est_loss_sum,
            learning_rate_bandit(self.num_arms, round),
        );
        let chosen = sample_index(&weights, &mut self.rng);
        let loss = validated_loss(chosen, loss_of(chosen), round)?;
        self.est_loss_sum[chosen] += loss / weights[chosen];
        self.round += 1;
        Ok(StepOutcome {
            round,
            chosen,
            incurred_loss: loss,
            observed: vec![(chosen, loss)],
            detail: None,
        })
    }
}
