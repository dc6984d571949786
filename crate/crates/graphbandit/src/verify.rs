//! Property suites behind `graphbandit verify` and the acceptance tests.
//!
//! Each check returns a [`CheckResult`] instead of panicking so the CLI can
//! print one line per check and exit nonzero on the first failure.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::env::{generate_graph, GraphFamily, NoiseKind, StochasticEnv};
use crate::explore::build_exploration_set;
use crate::graph::FeedbackGraph;
use crate::learner::{importance_weighted_estimates, Learner, LearnerConfig, Policy};
use crate::rng::{mix, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyLevel {
    Fast,
    Full,
}

impl std::str::FromStr for VerifyLevel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fast" => Ok(VerifyLevel::Fast),
            "full" => Ok(VerifyLevel::Full),
            other => Err(format!("unknown verify level {other:?} (fast|full)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &str, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            detail,
        }
    }

    fn fail(name: &str, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            detail,
        }
    }
}

/// Runs the fast suite, plus the Monte-Carlo concentration check at the
/// full level.
pub fn run(level: VerifyLevel, seed: u64) -> Vec<CheckResult> {
    let mut results = vec![
        check_exploration_set_properties(500, seed),
        check_distribution_invariants(
            match level {
                VerifyLevel::Fast => 2_000,
                VerifyLevel::Full => 10_000,
            },
            seed,
        ),
        check_estimator_unbiasedness(100, seed),
        check_combinatorial_chain(200, seed),
    ];
    if level == VerifyLevel::Full {
        results.push(check_gap_concentration(2_000, &[200, 1_000], seed));
    }
    results
}

/// The three structural guarantees of a constructed exploration set: it
/// dominates the graph, it is strongly independent, and every arm is
/// observed by a member with a no-larger gap estimate.
pub fn exploration_set_properties_hold(
    graph: &FeedbackGraph,
    gap_estimates: &[f64],
    set: &[usize],
) -> Result<(), String> {
    if !graph.is_dominating(set) {
        return Err(format!("{set:?} is not a dominating set"));
    }
    for (idx, &a) in set.iter().enumerate() {
        for &b in &set[idx + 1..] {
            if graph.has_edge(a, b) && graph.has_edge(b, a) {
                return Err(format!(
                    "{set:?} is not strongly independent: arms {a} and {b} share a mutual edge"
                ));
            }
        }
    }
    for arm in 0..graph.num_arms() {
        let covered = set
            .iter()
            .any(|&j| graph.has_edge(j, arm) && gap_estimates[j] <= gap_estimates[arm]);
        if !covered {
            return Err(format!(
                "arm {arm} is not observed by any set member with a no-larger gap estimate"
            ));
        }
    }
    Ok(())
}

/// A graph drawn from a family mix, biased toward sparse-to-dense
/// Erdős–Rényi draws.
pub fn random_graph(rng: &mut ChaCha8Rng, num_arms: usize) -> FeedbackGraph {
    let seed: u64 = rng.random();
    let family = match rng.random_range(0u8..8) {
        0 => GraphFamily::Bandit { num_arms },
        1 => GraphFamily::Complete { num_arms },
        2 => GraphFamily::Star { num_arms },
        3 => GraphFamily::ErdosRenyi {
            num_arms,
            edge_prob: rng.random_range(0.05..0.95),
            directed: false,
        },
        _ => GraphFamily::ErdosRenyi {
            num_arms,
            edge_prob: rng.random_range(0.05..0.95),
            directed: true,
        },
    };
    generate_graph(&family, seed).expect("family parameters are valid")
}

fn random_gaps(rng: &mut ChaCha8Rng, num_arms: usize) -> Vec<f64> {
    let quantize = rng.random::<f64>() < 0.3;
    (0..num_arms)
        .map(|_| {
            let g = rng.random::<f64>();
            if quantize {
                (g * 4.0).round() / 4.0
            } else {
                g
            }
        })
        .collect()
}

pub fn check_exploration_set_properties(instances: usize, seed: u64) -> CheckResult {
    let name = "exploration-set-properties";
    let mut rng = stream_rng(mix(seed, 0x5E7), 0);
    for case in 0..instances {
        let num_arms = rng.random_range(2usize..=12);
        let graph = random_graph(&mut rng, num_arms);
        let gaps = random_gaps(&mut rng, num_arms);
        let set = build_exploration_set(&graph, &gaps);
        if let Err(msg) = exploration_set_properties_hold(&graph, &gaps, &set) {
            return CheckResult::fail(name, format!("instance {case} (K={num_arms}): {msg}"));
        }
    }
    CheckResult::pass(
        name,
        format!("{instances} random (graph, gap) instances, all three properties hold"),
    )
}

/// Runs the learner for `horizon` rounds on ten arms (a two-clique graph and
/// a directed Erdős–Rényi draw) and checks every round's distributions.
pub fn check_distribution_invariants(horizon: u64, seed: u64) -> CheckResult {
    let name = "distribution-invariants";
    let graphs = [
        generate_graph(
            &GraphFamily::Cliques {
                num_cliques: 2,
                clique_size: 5,
            },
            0,
        )
        .expect("valid family"),
        generate_graph(
            &GraphFamily::ErdosRenyi {
                num_arms: 10,
                edge_prob: 0.3,
                directed: true,
            },
            mix(seed, 0xD15),
        )
        .expect("valid family"),
    ];
    for (graph_idx, graph) in graphs.iter().enumerate() {
        let alpha_tilde = graph
            .strong_independence_number()
            .expect("within the brute-force cap");
        let means: Vec<f64> = (0..10).map(|i| 0.2 + 0.06 * i as f64).collect();
        let env = StochasticEnv::new(means, NoiseKind::Bernoulli, mix(seed, graph_idx as u64))
            .expect("valid means");
        let mut learner =
            Learner::new(10, LearnerConfig::fixed_graph(alpha_tilde, seed)).expect("valid config");
        for t in 1..=horizon {
            let losses = env.losses_at(t);
            let outcome = match learner.step(graph, &mut |arm| losses[arm]) {
                Ok(o) => o,
                Err(e) => return CheckResult::fail(name, format!("round {t}: {e}")),
            };
            let Some(detail) = outcome.detail else {
                continue;
            };
            let fail = |msg: String| {
                CheckResult::fail(name, format!("graph {graph_idx}, round {t}: {msg}"))
            };
            let sum_p: f64 = detail.probs.iter().sum();
            if (sum_p - 1.0).abs() > 1e-12 {
                return fail(format!("|sum p - 1| = {:e}", (sum_p - 1.0).abs()));
            }
            let sum_eps: f64 = detail.epsilon.iter().sum();
            if sum_eps > 0.5 + 1e-12 {
                return fail(format!("sum eps = {sum_eps}"));
            }
            for i in 0..10 {
                if detail.probs[i].is_nan() || detail.probs[i] < 0.0 {
                    return fail(format!("p[{i}] = {}", detail.probs[i]));
                }
                if detail.probs[i] < detail.weights[i] / 2.0 {
                    return fail(format!(
                        "p[{i}] = {} < q/2 = {}",
                        detail.probs[i],
                        detail.weights[i] / 2.0
                    ));
                }
                if detail.probs[i] < detail.epsilon[i] {
                    return fail(format!(
                        "p[{i}] = {} < eps = {}",
                        detail.probs[i], detail.epsilon[i]
                    ));
                }
                if detail.observe_prob[i] < detail.observe_lower[i] {
                    return fail(format!(
                        "observe prob {} < lower bound {}",
                        detail.observe_prob[i], detail.observe_lower[i]
                    ));
                }
            }
        }
    }
    CheckResult::pass(
        name,
        format!("2 graphs x {horizon} rounds, every per-round invariant holds"),
    )
}

/// Exact enumeration over the chosen arm: the importance-weighted estimates
/// average back to the true loss vector under the sampling distribution.
pub fn check_estimator_unbiasedness(triples: usize, seed: u64) -> CheckResult {
    let name = "estimator-unbiasedness";
    let mut rng = stream_rng(mix(seed, 0xB1A5), 0);
    let mut worst = 0.0f64;
    for case in 0..triples {
        let num_arms = rng.random_range(2usize..=10);
        let graph = random_graph(&mut rng, num_arms);
        let probs: Vec<f64> = {
            let raw: Vec<f64> = (0..num_arms).map(|_| rng.random::<f64>() + 0.05).collect();
            let z: f64 = raw.iter().sum();
            raw.into_iter().map(|w| w / z).collect()
        };
        let losses: Vec<f64> = (0..num_arms).map(|_| rng.random()).collect();

        let mut expected = vec![0.0; num_arms];
        for chosen in 0..num_arms {
            let est = importance_weighted_estimates(&graph, &probs, chosen, &losses);
            for arm in 0..num_arms {
                expected[arm] += probs[chosen] * est[arm];
            }
        }
        for arm in 0..num_arms {
            let err = (expected[arm] - losses[arm]).abs();
            worst = worst.max(err);
            if err > 1e-12 {
                return CheckResult::fail(
                    name,
                    format!("triple {case}, arm {arm}: |E[estimate] - loss| = {err:e}"),
                );
            }
        }
    }
    CheckResult::pass(
        name,
        format!("{triples} random (graph, p, loss) triples, worst error {worst:.2e}"),
    )
}

/// Oracle chain on random graphs: the play-to-observe ratio sum is at most
/// the largest acyclic set, which is at most the strong independence number,
/// which is at most the number of arms.
pub fn check_combinatorial_chain(graphs: usize, seed: u64) -> CheckResult {
    let name = "combinatorial-chain";
    let mut rng = stream_rng(mix(seed, 0xC4A1), 0);
    for case in 0..graphs {
        let num_arms = rng.random_range(2usize..=8);
        let graph = random_graph(&mut rng, num_arms);
        let probs: Vec<f64> = {
            let raw: Vec<f64> = (0..num_arms).map(|_| rng.random::<f64>() + 1e-3).collect();
            let z: f64 = raw.iter().sum();
            raw.into_iter().map(|w| w / z).collect()
        };
        let theta: f64 = (0..num_arms)
            .map(|i| {
                let observe: f64 = graph.in_neighbors(i).iter().map(|&j| probs[j]).sum();
                probs[i] / observe
            })
            .sum();
        let mas = graph.mas().expect("within cap");
        let alpha_strong = graph.strong_independence_number().expect("within cap");
        // 1e-9 slack absorbs floating-point rounding in the theta sum; the
        // bound is tight (theta equals K on the bandit graph).
        let ok = theta <= mas as f64 + 1e-9 && mas <= alpha_strong && alpha_strong <= num_arms;
        if !ok {
            return CheckResult::fail(
                name,
                format!(
                    "graph {case} (K={num_arms}): theta={theta}, mas={mas}, alpha_strong={alpha_strong}"
                ),
            );
        }
    }
    CheckResult::pass(
        name,
        format!("{graphs} random graphs, theta <= mas <= alpha_strong <= K"),
    )
}

/// Monte-Carlo check of the gap-estimate upper tail: across replicates of a
/// stochastic run, the frequency of a gap estimate at or above the
/// regularized true gap stays within `1/(K * t^(gamma-1))` plus three
/// binomial standard errors, per arm and checkpoint.
pub fn check_gap_concentration(replicates: usize, checkpoints: &[u64], seed: u64) -> CheckResult {
    let name = "gap-concentration";
    let graph = generate_graph(
        &GraphFamily::Cliques {
            num_cliques: 2,
            clique_size: 3,
        },
        0,
    )
    .expect("valid family");
    let num_arms = graph.num_arms();
    let means = vec![0.2, 0.6, 0.6, 0.6, 0.6, 0.6];
    let gamma = 4.0;
    let min_gap = 0.4;
    let regularized_gaps: Vec<f64> = means.iter().map(|&m| (m - 0.2f64).max(min_gap)).collect();
    let alpha_tilde = graph.strong_independence_number().expect("within cap");
    let max_t = *checkpoints.iter().max().expect("nonempty checkpoints");

    // counts[c][i]: replicates whose gap estimate for arm i at checkpoint c
    // reached the regularized gap.
    let counts: Vec<Vec<u64>> = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let env = StochasticEnv::new(
                means.clone(),
                NoiseKind::Bernoulli,
                mix(mix(seed, 0xC0CE), rep as u64),
            )
            .expect("valid means");
            let mut learner = Learner::new(
                num_arms,
                LearnerConfig::fixed_graph(alpha_tilde, mix(seed, rep as u64)),
            )
            .expect("valid config");
            let mut hits = vec![vec![0u64; num_arms]; checkpoints.len()];
            for t in 1..=max_t {
                let losses = env.losses_at(t);
                let outcome = learner
                    .step(&graph, &mut |arm| losses[arm])
                    .expect("run cannot fail");
                if let Some(c) = checkpoints.iter().position(|&cp| cp == t) {
                    let detail = outcome.detail.expect("past initialization");
                    for arm in 0..num_arms {
                        if detail.snapshot.delta_hat[arm] >= regularized_gaps[arm] {
                            hits[c][arm] = 1;
                        }
                    }
                }
            }
            hits
        })
        .reduce(
            || vec![vec![0u64; num_arms]; checkpoints.len()],
            |mut acc, hits| {
                for (a, h) in acc.iter_mut().zip(&hits) {
                    for (x, y) in a.iter_mut().zip(h) {
                        *x += y;
                    }
                }
                acc
            },
        );

    let mut worst = String::new();
    for (c, &t) in checkpoints.iter().enumerate() {
        let tail_bound = 1.0 / (num_arms as f64 * (t as f64).powf(gamma - 1.0));
        for (arm, &count) in counts[c].iter().enumerate() {
            let freq = count as f64 / replicates as f64;
            let stderr = (freq * (1.0 - freq) / replicates as f64).sqrt();
            let allowed = tail_bound + 3.0 * stderr;
            if freq > allowed {
                return CheckResult::fail(
                    name,
                    format!(
                        "arm {arm} at t={t}: frequency {freq} exceeds bound {tail_bound:e} + 3se"
                    ),
                );
            }
            if count > 0 {
                worst = format!(" (max observed frequency {freq} at t={t})");
            }
        }
    }
    CheckResult::pass(
        name,
        format!("{replicates} replicates at checkpoints {checkpoints:?}{worst}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::observe_probs;

    #[test]
    fn fast_suite_passes() {
        // Trimmed-down versions of each check; the full sizes run in the
        // acceptance suite.
        assert!(check_exploration_set_properties(50, 7).passed);
        assert!(check_distribution_invariants(300, 7).passed);
        assert!(check_estimator_unbiasedness(25, 7).passed);
        assert!(check_combinatorial_chain(40, 7).passed);
    }

    #[test]
    fn mutated_exploration_set_fails_the_dominating_check() {
        let graph = generate_graph(&GraphFamily::Bandit { num_arms: 4 }, 0).unwrap();
        let gaps = [0.1, 0.2, 0.3, 0.4];
        let mut set = build_exploration_set(&graph, &gaps);
        assert!(exploration_set_properties_hold(&graph, &gaps, &set).is_ok());
        set.pop();
        let err = exploration_set_properties_hold(&graph, &gaps, &set).unwrap_err();
        assert!(err.contains("dominating"), "{err}");
    }

    #[test]
    fn mutual_pair_in_the_set_fails_strong_independence() {
        let graph = FeedbackGraph::new(3, &[(0, 1), (1, 0)]).unwrap();
        let gaps = [0.0, 0.0, 0.0];
        let err = exploration_set_properties_hold(&graph, &gaps, &[0, 1, 2]).unwrap_err();
        assert!(err.contains("strongly independent"), "{err}");
    }

    #[test]
    fn biased_estimator_fails_the_enumeration() {
        // Drop the importance weight: the enumeration must notice.
        let graph = FeedbackGraph::new(3, &[(0, 1), (2, 0)]).unwrap();
        let probs: [f64; 3] = [0.5, 0.2, 0.3];
        let losses: [f64; 3] = [0.9, 0.1, 0.4];
        let mut expected = [0.0f64; 3];
        for (chosen, &p) in probs.iter().enumerate() {
            for &arm in graph.out_neighbors(chosen) {
                expected[arm] += p * losses[arm]; // missing 1/P
            }
        }
        let worst = (0..3)
            .map(|i| (expected[i] - losses[i]).abs())
            .fold(0.0_f64, f64::max);
        assert!(worst > 1e-3, "bias went undetected: {worst}");

        // And the real estimator passes on the same instance.
        let mut unbiased = [0.0f64; 3];
        for (chosen, &p) in probs.iter().enumerate() {
            let est = importance_weighted_estimates(&graph, &probs, chosen, &losses);
            for (total, e) in unbiased.iter_mut().zip(&est) {
                *total += p * e;
            }
        }
        for arm in 0..3 {
            assert!((unbiased[arm] - losses[arm]).abs() < 1e-12);
        }
        // Sanity: the observation probabilities the weights divide by.
        let op = observe_probs(&graph, &probs);
        assert!(op.iter().all(|&p| p > 0.0));
    }
}
