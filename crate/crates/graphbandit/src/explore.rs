//! Exploration-set construction and exploration rates.
//!
//! The exploration set is built greedily over arms in ascending order of
//! their gap estimates: each selected arm knocks out its whole
//! out-neighborhood. The result is simultaneously a dominating set and a
//! strongly independent set, and every arm is observed by some set member
//! whose gap estimate is no larger than its own. Those three properties are
//! what lets the per-arm observation probability be lower bounded without
//! exploring every arm directly.

use crate::error::{Error, Result};
use crate::graph::FeedbackGraph;

/// Per-round exploration state: the set, the rates, and the observation
/// lower bound implied by them.
#[derive(Debug, Clone)]
pub struct ExplorationPlan {
    /// Selected arms in pick order (ascending gap estimate).
    pub exploration_set: Vec<usize>,
    /// Per-arm exploration rate mixed into the sampling distribution.
    pub epsilon: Vec<f64>,
    /// Per-arm lower bound on the probability of being observed.
    pub observe_lower: Vec<f64>,
    pub lambda: f64,
    pub beta: f64,
    pub round: u64,
    /// Ascending-gap permutation used to build the set (the cache key).
    pub sorted_order: Vec<usize>,
}

/// Arms ordered by ascending gap estimate, ties broken by ascending index.
pub fn gap_ascending_order(gap_estimates: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..gap_estimates.len()).collect();
    order.sort_by(|&a, &b| {
        gap_estimates[a]
            .total_cmp(&gap_estimates[b])
            .then(a.cmp(&b))
    });
    order
}

/// Greedy construction: walk arms by ascending gap estimate, keep an arm if
/// it is still uncovered, and discard its entire out-neighborhood.
pub fn build_exploration_set(graph: &FeedbackGraph, gap_estimates: &[f64]) -> Vec<usize> {
    debug_assert_eq!(graph.num_arms(), gap_estimates.len());
    let order = gap_ascending_order(gap_estimates);
    let mut alive = vec![true; graph.num_arms()];
    let mut set = Vec::new();
    for &arm in &order {
        if !alive[arm] {
            continue;
        }
        set.push(arm);
        for &covered in graph.out_neighbors(arm) {
            alive[covered] = false;
        }
    }
    set
}

fn validate_rate_inputs(num_arms: usize, round: u64, lambda: f64, beta: f64) -> Result<()> {
    if num_arms < 2 {
        return Err(Error::Domain(format!(
            "exploration rates need at least 2 arms, got {num_arms}"
        )));
    }
    if round < 2 {
        return Err(Error::Precondition(format!(
            "exploration rates need round >= 2, got {round}"
        )));
    }
    if !(1.0..=num_arms as f64).contains(&lambda) {
        return Err(Error::Domain(format!(
            "lambda must lie in [1, {num_arms}], got {lambda}"
        )));
    }
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    Ok(())
}

/// The two gap-independent rate terms: the `1/(2K)` cap and the
/// horizon-scaled square-root term.
fn base_terms(num_arms: usize, round: u64, lambda: f64) -> (f64, f64) {
    let k = num_arms as f64;
    let cap = 1.0 / (2.0 * k);
    let sqrt_term = 0.5 * (lambda * k.ln() / (round as f64 * k * k)).sqrt();
    (cap, sqrt_term)
}

/// `beta * ln(t) / (t * gap^2)`; unbounded when the gap estimate is zero so
/// that the other terms decide the minimum.
fn gap_term(gap: f64, round: u64, beta: f64) -> f64 {
    if gap > 0.0 {
        beta * (round as f64).ln() / (round as f64 * gap * gap)
    } else {
        f64::INFINITY
    }
}

/// Per-arm exploration rates. Members of the exploration set get the
/// gap-scaled term; everyone else gets the negligible `4/t^2` term.
pub fn exploration_rates(
    exploration_set: &[usize],
    gap_estimates: &[f64],
    round: u64,
    lambda: f64,
    beta: f64,
) -> Result<Vec<f64>> {
    let num_arms = gap_estimates.len();
    validate_rate_inputs(num_arms, round, lambda, beta)?;
    let mut in_set = vec![false; num_arms];
    for &arm in exploration_set {
        in_set[arm] = true;
    }
    let (cap, sqrt_term) = base_terms(num_arms, round, lambda);
    let off_set = 4.0 / (round as f64 * round as f64);
    Ok((0..num_arms)
        .map(|i| {
            let tail = if in_set[i] {
                gap_term(gap_estimates[i], round, beta)
            } else {
                off_set
            };
            cap.min(sqrt_term).min(tail)
        })
        .collect())
}

/// Per-arm lower bound on the observation probability. Unlike the rates,
/// the gap-scaled term applies to every arm: the dominating property of the
/// exploration set transfers its members' exploration to all arms.
pub fn observation_lower_bound(
    gap_estimates: &[f64],
    round: u64,
    lambda: f64,
    beta: f64,
) -> Result<Vec<f64>> {
    let num_arms = gap_estimates.len();
    validate_rate_inputs(num_arms, round, lambda, beta)?;
    let (cap, sqrt_term) = base_terms(num_arms, round, lambda);
    Ok(gap_estimates
        .iter()
        .map(|&gap| cap.min(sqrt_term).min(gap_term(gap, round, beta)))
        .collect())
}

/// Rebuilds the exploration set only when the ascending-gap order or the
/// graph changes; the rates are recomputed every round regardless.
#[derive(Debug, Clone, Default)]
pub struct ExplorationCache {
    key: Option<(u64, Vec<usize>)>,
    set: Vec<usize>,
}

impl ExplorationCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn plan(
        &mut self,
        graph: &FeedbackGraph,
        gap_estimates: &[f64],
        round: u64,
        lambda: f64,
        beta: f64,
        force_rebuild: bool,
    ) -> Result<ExplorationPlan> {
        let sorted_order = gap_ascending_order(gap_estimates);
        let stale = force_rebuild
            || match &self.key {
                Some((fp, order)) => *fp != graph.fingerprint() || order != &sorted_order,
                None => true,
            };
        if stale {
            self.set = build_exploration_set(graph, gap_estimates);
            self.key = Some((graph.fingerprint(), sorted_order.clone()));
        }
        let epsilon = exploration_rates(&self.set, gap_estimates, round, lambda, beta)?;
        let observe_lower = observation_lower_bound(gap_estimates, round, lambda, beta)?;
        Ok(ExplorationPlan {
            exploration_set: self.set.clone(),
            epsilon,
            observe_lower,
            lambda,
            beta,
            round,
            sorted_order,
        })
    }
}
