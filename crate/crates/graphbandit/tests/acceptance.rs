//! End-to-end acceptance suite. Each test pins one of the library's
//! structural or statistical guarantees at desk scale and prints a single
//! PASS/FAIL line (run with `--nocapture` to see them on success).

use std::time::Instant;

use rayon::prelude::*;

use graphbandit::env::{AdversarialEnv, Environment, GraphFamily, GraphSchedule};
use graphbandit::harness::{
    EnvironmentSpec, ExperimentSpec, GraphScheduleSpec, GraphSource, LearnerKindSpec, LearnerSpec,
};
use graphbandit::learner::{Learner, LearnerConfig, Policy};
use graphbandit::rng::mix2;
use graphbandit::verify;
use graphbandit::NoiseKind;

const SEED: u64 = 20_240_817;

fn report(criterion: &str, passed: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} — {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "{criterion}: {detail}");
}

fn two_cliques_spec() -> GraphSource {
    GraphSource::Family {
        spec: GraphFamily::Cliques {
            num_cliques: 2,
            clique_size: 5,
        },
        seed: 0,
    }
}

fn gpp_learner(name: &str) -> LearnerSpec {
    LearnerSpec {
        name: name.into(),
        kind: LearnerKindSpec::Exp3Gpp {
            gamma: 4.0,
            beta: 320.0,
            lambda: None,
            alpha_tilde: None,
            time_varying: None,
            force_rebuild_set: false,
        },
    }
}

#[test]
fn criterion_1_exploration_set_properties() {
    let start = Instant::now();
    let check = verify::check_exploration_set_properties(500, SEED);
    let elapsed = start.elapsed();
    report(
        "1 (exploration-set-properties)",
        check.passed && elapsed.as_secs_f64() < 10.0,
        &format!("{} in {:.2?}", check.detail, elapsed),
    );
}

#[test]
fn criterion_2_distribution_and_mixing_invariants() {
    let check = verify::check_distribution_invariants(10_000, SEED);
    report("2 (distribution-invariants)", check.passed, &check.detail);
}

#[test]
fn criterion_3_estimator_unbiasedness() {
    let check = verify::check_estimator_unbiasedness(100, SEED);
    report("3 (estimator-unbiasedness)", check.passed, &check.detail);
}

#[test]
fn criterion_4_combinatorial_chain() {
    let check = verify::check_combinatorial_chain(200, SEED);
    report("4 (combinatorial-chain)", check.passed, &check.detail);
}

#[test]
fn criterion_5_adversarial_regret_bound() {
    let start = Instant::now();
    let horizon = 100_000u64;
    let graph = graphbandit::generate_graph(
        &GraphFamily::Cliques {
            num_cliques: 2,
            clique_size: 5,
        },
        0,
    )
    .unwrap();
    let alpha_tilde = graph.strong_independence_number().unwrap();
    assert_eq!(alpha_tilde, 2);
    let num_arms = graph.num_arms() as f64;

    let spec = ExperimentSpec {
        graph: GraphScheduleSpec::Fixed {
            graph: two_cliques_spec(),
        },
        environment: EnvironmentSpec::AdversarialIidUniform { num_arms: 10 },
        learners: vec![gpp_learner("gpp")],
        horizon,
        replicates: 50,
        seed: SEED,
        record_stride: Some(25_000),
        output_dir: None,
        debug_dumps: false,
    };
    let result = graphbandit::run_experiment(&spec, None).unwrap();
    let gpp = result.learner("gpp").unwrap();
    let final_mean = gpp.final_mean_regret();
    let quarter_mean = gpp.mean_regret_at(&result.grid, horizon / 4).unwrap();

    let bound = 4.0 * (alpha_tilde as f64 * horizon as f64 * num_arms.ln()).sqrt() + num_arms;
    let ratio = final_mean / quarter_mean;
    let elapsed = start.elapsed();

    report(
        "5 (adversarial-regret-bound)",
        final_mean <= bound
            && (1.6..=2.6).contains(&ratio)
            && elapsed.as_secs_f64() < 300.0,
        &format!(
            "mean regret {final_mean:.1} <= {bound:.1}; regret(4T)/regret(T) = {ratio:.2} in [1.6, 2.6]; {:.1?}",
            elapsed
        ),
    );
}

#[test]
fn criterion_6_stochastic_scaling_and_baseline_gap() {
    let horizon = 100_000u64;
    let mut means = vec![0.5; 10];
    means[0] = 0.25; // minimum gap 0.25

    let spec = ExperimentSpec {
        graph: GraphScheduleSpec::Fixed {
            graph: two_cliques_spec(),
        },
        environment: EnvironmentSpec::Stochastic {
            means,
            noise: NoiseKind::Bernoulli,
        },
        learners: vec![
            gpp_learner("gpp"),
            LearnerSpec {
                name: "exp3".into(),
                kind: LearnerKindSpec::Exp3,
            },
        ],
        horizon,
        replicates: 50,
        seed: SEED + 1,
        record_stride: Some(25_000),
        output_dir: None,
        debug_dumps: false,
    };
    let result = graphbandit::run_experiment(&spec, None).unwrap();
    let gpp = result.learner("gpp").unwrap();
    let exp3 = result.learner("exp3").unwrap();

    let gpp_final = gpp.final_mean_regret();
    let gpp_quarter = gpp.mean_regret_at(&result.grid, horizon / 4).unwrap();
    let ratio = gpp_final / gpp_quarter;
    let exp3_final = exp3.final_mean_regret();
    let improvement = 1.0 - gpp_final / exp3_final;

    report(
        "6 (stochastic-scaling-and-baseline-gap)",
        ratio <= 1.8 && improvement >= 0.30,
        &format!(
            "regret(4T)/regret(T) = {ratio:.2} <= 1.8 (sub-sqrt growth); \
             graph learner {gpp_final:.1} vs bandit baseline {exp3_final:.1} \
             ({:.0}% lower)",
            improvement * 100.0
        ),
    );
}

#[test]
fn criterion_7_gap_estimate_concentration() {
    let check = verify::check_gap_concentration(2_000, &[200, 1_000], SEED);
    report("7 (gap-concentration)", check.passed, &check.detail);
}

#[test]
fn criterion_8_time_varying_mode() {
    let horizon = 100_000u64;
    let replicates = 20u64;
    let num_arms = 8usize;
    let bandit = graphbandit::generate_graph(&GraphFamily::Bandit { num_arms }, 0).unwrap();
    let complete = graphbandit::generate_graph(&GraphFamily::Complete { num_arms }, 0).unwrap();
    let schedule = GraphSchedule::Periodic(vec![bandit.clone(), complete.clone()]);

    // Independence numbers of the alternating graphs, via the exact oracle.
    let alpha_bandit = bandit.independence_number(true).unwrap() as f64;
    let alpha_complete = complete.independence_number(true).unwrap() as f64;
    let bandit_rounds = horizon.div_ceil(2) as f64;
    let complete_rounds = (horizon / 2) as f64;
    let alpha_sum = alpha_bandit * bandit_rounds + alpha_complete * complete_rounds;

    let k = num_arms as f64;
    let bound =
        9.0 * k.ln().sqrt() * ((k * horizon as f64).ln()).sqrt() * alpha_sum.sqrt() + 2.0 * k;
    let seed_rate = (k.ln() / (2.0 * k)).sqrt();

    let runs: Vec<(f64, bool, f64)> = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let env = AdversarialEnv::iid_uniform(num_arms, mix2(SEED + 2, 0xE1, rep)).unwrap();
            let mut learner = Learner::new(
                num_arms,
                LearnerConfig::time_varying(mix2(SEED + 2, 0x1EA2, rep)),
            )
            .unwrap();
            let mut chosen = Vec::with_capacity(horizon as usize);
            let mut last_rate = f64::INFINITY;
            let mut monotone = true;
            let mut rate_at_first_mixed_round = f64::NAN;
            for t in 1..=horizon {
                let graph = schedule.graph_at(t);
                let losses = env.losses_at(t).unwrap();
                let outcome = learner
                    .step(graph.as_ref(), &mut |arm| losses[arm])
                    .unwrap();
                if let Some(detail) = outcome.detail {
                    if t == num_arms as u64 + 1 {
                        rate_at_first_mixed_round = detail.learning_rate;
                    }
                    monotone &= detail.learning_rate <= last_rate;
                    last_rate = detail.learning_rate;
                }
                chosen.push(outcome.chosen);
            }
            let regret = Environment::Adversarial(env)
                .pseudo_regret(&chosen)
                .unwrap();
            (regret, monotone, rate_at_first_mixed_round)
        })
        .collect();

    let mean_regret: f64 = runs.iter().map(|r| r.0).sum::<f64>() / replicates as f64;
    let all_monotone = runs.iter().all(|r| r.1);
    let seeding_ok = runs.iter().all(|r| (r.2 - seed_rate).abs() < 1e-15);

    report(
        "8 (time-varying-mode)",
        mean_regret <= bound && all_monotone && seeding_ok,
        &format!(
            "mean regret {mean_regret:.1} <= {bound:.1}; learning rate non-increasing in all \
             {replicates} runs; first mixed round uses sqrt(ln K / 2K) = {seed_rate:.4}"
        ),
    );
}

#[test]
fn criterion_9_byte_identical_traces() {
    let spec = ExperimentSpec {
        graph: GraphScheduleSpec::Fixed {
            graph: GraphSource::Family {
                spec: GraphFamily::Star { num_arms: 5 },
                seed: 0,
            },
        },
        environment: EnvironmentSpec::Stochastic {
            means: vec![0.2, 0.5, 0.5, 0.5, 0.5],
            noise: NoiseKind::Bernoulli,
        },
        learners: vec![
            gpp_learner("gpp"),
            LearnerSpec {
                name: "exp3".into(),
                kind: LearnerKindSpec::Exp3,
            },
        ],
        horizon: 500,
        replicates: 3,
        seed: SEED + 3,
        record_stride: Some(50),
        output_dir: None,
        debug_dumps: true,
    };

    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    graphbandit::run_experiment_to_dir(&spec, dir_a.path(), Some(2)).unwrap();
    graphbandit::run_experiment_to_dir(&spec, dir_b.path(), Some(1)).unwrap();

    let mut names: Vec<String> = std::fs::read_dir(dir_a.path())
        .unwrap()
        .map(|entry| entry.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let csv_count = names.iter().filter(|n| n.ends_with(".csv")).count();

    let mut identical = true;
    for name in &names {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        identical &= a == b;
    }

    report(
        "9 (byte-identical-traces)",
        identical && csv_count >= 7,
        &format!("{csv_count} CSV files identical across repeated runs and thread counts"),
    );
}
