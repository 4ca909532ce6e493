//! Monte Carlo engines: random walks over a model's transition structure and
//! an alternating renewal up/down process.
//!
//! Both engines exist to cross-check the analytic routes (the absorption
//! solvers and the closed-form availability ratios), so determinism is part
//! of their contract: trial `k` draws from a substream derived from
//! `(seed, k)` alone. Results are therefore independent of execution order
//! and identical inputs give bit-identical outputs, including under the
//! internal parallelism used to fan trials out across cores.
//!
//! Up and down durations are sampled exponentially (by inversion); the
//! exponential is the memoryless choice consistent with a constant failure
//! intensity, and it is an assumption of this module, not a derived fact.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::availability::DomainError;
use crate::fsm::{AbsorptionResult, NodeId, ReliabilityFsm, Target, Violation};
use crate::monitor::{OperationalProfile, ProfileEvent, ServiceState};

/// Trial plan for a simulation run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimConfig {
    /// Number of independent trials; at least 1.
    pub trials: u64,
    /// Master seed; trial `k` uses substream `(seed, k)`.
    pub seed: u64,
    /// Step cutoff per walk; walks still transient after this many steps are
    /// censored. At least 1.
    pub max_steps: u64,
}

/// Estimate of the correct-termination probability from sampled walks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkEstimate {
    /// Fraction of walks that terminated in `C`. Censored walks count as
    /// faults, which biases the estimate downward (conservative).
    pub p_correct_hat: f64,
    /// Binomial standard error `sqrt(p(1-p)/trials)`.
    pub standard_error: f64,
    /// Walks cut off at `max_steps` while still transient.
    pub censored_walks: u64,
    /// Total trials, echoed for reporting.
    pub trials: u64,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SimError {
    #[error("model failed validation with {} violation(s)", .0.len())]
    InvalidModel(Vec<Violation>),
    #[error("{what} must be at least 1")]
    InvalidConfig { what: &'static str },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// The deterministic per-trial generator: a counter-based stream cipher RNG
/// keyed by the master seed, with the trial index as the stream number.
fn substream(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Exponential sample by inversion with the given mean; resamples the
/// measure-zero draw that would map to a zero duration.
fn sample_exp(rng: &mut ChaCha8Rng, mean_hours: f64) -> f64 {
    loop {
        let u: f64 = rng.random();
        let duration = -mean_hours * (1.0 - u).ln();
        if duration > 0.0 {
            return duration;
        }
    }
}

/// Advances a clock by an exponential duration, retrying until the sum
/// actually moves forward (guards against rounding at large clock values).
fn advance(rng: &mut ChaCha8Rng, mean_hours: f64, now: f64) -> f64 {
    loop {
        let next = now + sample_exp(rng, mean_hours);
        if next > now {
            return next;
        }
    }
}

enum WalkOutcome {
    Correct,
    Fault,
    Censored,
}

/// Model compiled for sampling: per-node cumulative distributions over the
/// positive-probability transitions, nodes indexed in sorted label order.
struct CompiledWalk {
    rows: Vec<Vec<(f64, Step)>>,
    start: usize,
}

#[derive(Clone, Copy)]
enum Step {
    Node(usize),
    Correct,
    Fault,
}

impl CompiledWalk {
    fn build(model: &ReliabilityFsm) -> Self {
        let order: Vec<&NodeId> = model.nodes().collect();
        let index: std::collections::BTreeMap<&NodeId, usize> =
            order.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut rows = vec![Vec::new(); order.len()];
        for edge in model.edges() {
            if edge.probability <= 0.0 {
                continue;
            }
            let row = &mut rows[index[&edge.from]];
            let cumulative = row.last().map(|&(c, _)| c).unwrap_or(0.0) + edge.probability;
            let step = match &edge.to {
                Target::Node(to) => Step::Node(index[to]),
                Target::Correct => Step::Correct,
                Target::Fault => Step::Fault,
            };
            row.push((cumulative, step));
        }
        CompiledWalk {
            rows,
            start: index[model.start()],
        }
    }

    fn walk(&self, rng: &mut ChaCha8Rng, max_steps: u64) -> WalkOutcome {
        let mut at = self.start;
        for _ in 0..max_steps {
            let u: f64 = rng.random();
            let row = &self.rows[at];
            // Cumulative sums end within 1e-9 of 1; a draw beyond the last
            // entry falls back to it.
            let mut step = row.last().expect("validated rows are nonempty").1;
            for &(cumulative, candidate) in row {
                if u < cumulative {
                    step = candidate;
                    break;
                }
            }
            match step {
                Step::Correct => return WalkOutcome::Correct,
                Step::Fault => return WalkOutcome::Fault,
                Step::Node(next) => at = next,
            }
        }
        WalkOutcome::Censored
    }
}

/// Estimates the correct-termination probability by sampling independent
/// walks from the start node. Walks stop at `C`, `F`, or the step cutoff;
/// censored walks are counted and treated as faults.
pub fn walk_absorption(
    model: &ReliabilityFsm,
    config: &SimConfig,
) -> Result<WalkEstimate, SimError> {
    if config.trials == 0 {
        return Err(SimError::InvalidConfig { what: "trials" });
    }
    if config.max_steps == 0 {
        return Err(SimError::InvalidConfig { what: "maxSteps" });
    }
    let violations = model.validate();
    if !violations.is_empty() {
        return Err(SimError::InvalidModel(violations));
    }

    let compiled = CompiledWalk::build(model);
    let (correct, censored) = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = substream(config.seed, trial);
            match compiled.walk(&mut rng, config.max_steps) {
                WalkOutcome::Correct => (1u64, 0u64),
                WalkOutcome::Fault => (0, 0),
                WalkOutcome::Censored => (0, 1),
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let p = correct as f64 / config.trials as f64;
    Ok(WalkEstimate {
        p_correct_hat: p,
        standard_error: (p * (1.0 - p) / config.trials as f64).sqrt(),
        censored_walks: censored,
        trials: config.trials,
    })
}

/// Generates one alternating renewal trajectory: exponentially distributed
/// up durations (mean `mtbf_hours`) and down durations (mean `mttr_hours`),
/// starting up at t = 0 and truncated at the horizon. Deterministic for a
/// fixed seed.
pub fn simulate_renewal(
    service_name: &str,
    mtbf_hours: f64,
    mttr_hours: f64,
    horizon_hours: f64,
    seed: u64,
) -> Result<OperationalProfile, SimError> {
    require_positive("mtbfHours", mtbf_hours)?;
    require_positive("mttrHours", mttr_hours)?;
    require_positive("horizonHours", horizon_hours)?;

    let mut rng = substream(seed, 0);
    let mut events = vec![ProfileEvent {
        timestamp_hours: 0.0,
        state: ServiceState::Up,
    }];
    let mut now = 0.0;
    loop {
        now = advance(&mut rng, mtbf_hours, now);
        if now >= horizon_hours {
            break;
        }
        events.push(ProfileEvent {
            timestamp_hours: now,
            state: ServiceState::Down,
        });
        now = advance(&mut rng, mttr_hours, now);
        if now >= horizon_hours {
            break;
        }
        events.push(ProfileEvent {
            timestamp_hours: now,
            state: ServiceState::Up,
        });
    }
    Ok(OperationalProfile::new(service_name, events, horizon_hours)
        .expect("generated trajectory satisfies the profile rules"))
}

/// Fraction of independent renewal trajectories that are up at time `t`:
/// the ensemble reading of availability at an instant.
pub fn ensemble_availability(
    mtbf_hours: f64,
    mttr_hours: f64,
    t_hours: f64,
    trials: u64,
    seed: u64,
) -> Result<f64, SimError> {
    require_positive("mtbfHours", mtbf_hours)?;
    require_positive("mttrHours", mttr_hours)?;
    if !(t_hours.is_finite() && t_hours >= 0.0) {
        return Err(SimError::Domain(DomainError {
            name: "t",
            value: t_hours,
            requirement: "must be nonnegative and finite",
        }));
    }
    if trials == 0 {
        return Err(SimError::InvalidConfig { what: "trials" });
    }

    let ups: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = substream(seed, trial);
            u64::from(trajectory_up_at(&mut rng, mtbf_hours, mttr_hours, t_hours))
        })
        .sum();
    Ok(ups as f64 / trials as f64)
}

/// Walks one trajectory's alternation just far enough to know the state at
/// `t`. Draws in the same order as [`simulate_renewal`], so trial `k` here
/// matches the trajectory `simulate_renewal` writes for stream `k`.
fn trajectory_up_at(rng: &mut ChaCha8Rng, mtbf_hours: f64, mttr_hours: f64, t: f64) -> bool {
    let mut now = 0.0;
    loop {
        now = advance(rng, mtbf_hours, now);
        if t < now {
            return true;
        }
        now = advance(rng, mttr_hours, now);
        if t < now {
            return false;
        }
    }
}

fn require_positive(name: &'static str, value: f64) -> Result<(), SimError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(SimError::Domain(DomainError {
            name,
            value,
            requirement: "must be positive and finite",
        }))
    }
}

/// Cross-checks a walk estimate against an analytic absorption result:
/// agreement means the estimate lies within `sigmas` standard errors, with
/// an exact match required where the standard error collapses to zero.
pub fn walk_agrees_with(
    estimate: &WalkEstimate,
    analytic: &AbsorptionResult,
    sigmas: f64,
) -> bool {
    let delta = (estimate.p_correct_hat - analytic.reliability()).abs();
    if estimate.standard_error == 0.0 {
        delta == 0.0
    } else {
        delta <= sigmas * estimate.standard_error
    }
}

#[cfg(test)]
pub(crate) mod testgen {
    //! Random validated-model generation shared by the statistical tests.

    use std::collections::BTreeMap;

    use rand::Rng;

    use crate::fsm::{Edge, NodeId, ReliabilityFsm, Target};

    /// Builds a random model that passes validation: every node sends at
    /// least a few percent of its mass directly to each absorbing state and
    /// up to three extra transitions at other transient nodes.
    pub fn random_validated_model<R: Rng>(rng: &mut R, max_nodes: usize) -> ReliabilityFsm {
        let count = rng.random_range(1..=max_nodes);
        let labels: Vec<NodeId> = (0..count)
            .map(|i| NodeId::new(format!("n{i:02}")).unwrap())
            .collect();
        let mut edges = Vec::new();
        for from in &labels {
            let mut weights: BTreeMap<Target, f64> = BTreeMap::new();
            weights.insert(Target::Correct, 0.05 + rng.random::<f64>());
            weights.insert(Target::Fault, 0.05 + rng.random::<f64>());
            for _ in 0..rng.random_range(0..=3usize) {
                let to = labels[rng.random_range(0..count)].clone();
                *weights.entry(Target::Node(to)).or_insert(0.0) += rng.random::<f64>();
            }
            let total: f64 = weights.values().sum();
            edges.extend(weights.into_iter().map(|(to, weight)| Edge {
                from: from.clone(),
                to,
                probability: weight / total,
            }));
        }
        let model = ReliabilityFsm::new(labels[0].clone(), labels, edges);
        debug_assert!(model.validate().is_empty());
        model
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::absorption::solve_absorption;
    use crate::fsm::Edge;

    fn node(label: &str) -> NodeId {
        NodeId::new(label).unwrap()
    }

    fn edge(from: &str, to: &str, probability: f64) -> Edge {
        Edge {
            from: node(from),
            to: Target::from_label(to).unwrap(),
            probability,
        }
    }

    fn self_loop_model() -> ReliabilityFsm {
        ReliabilityFsm::new(
            node("n"),
            [node("n")],
            vec![edge("n", "n", 0.1), edge("n", "C", 0.8), edge("n", "F", 0.1)],
        )
    }

    fn config(trials: u64, seed: u64) -> SimConfig {
        SimConfig {
            trials,
            seed,
            max_steps: 10_000,
        }
    }

    #[test]
    fn certain_success_estimates_exactly_one() {
        let m = ReliabilityFsm::new(node("n"), [node("n")], vec![edge("n", "C", 1.0)]);
        let est = walk_absorption(&m, &config(1000, 1)).unwrap();
        assert_eq!(est.p_correct_hat, 1.0);
        assert_eq!(est.censored_walks, 0);
        assert_eq!(est.standard_error, 0.0);
    }

    #[test]
    fn certain_failure_estimates_exactly_zero() {
        let m = ReliabilityFsm::new(node("n"), [node("n")], vec![edge("n", "F", 1.0)]);
        let est = walk_absorption(&m, &config(1000, 1)).unwrap();
        assert_eq!(est.p_correct_hat, 0.0);
    }

    #[test]
    fn self_loop_walks_agree_with_the_solver() {
        let m = self_loop_model();
        let analytic = solve_absorption(&m).unwrap();
        let est = walk_absorption(&m, &config(200_000, 42)).unwrap();
        assert!(est.censored_walks == 0);
        assert!(walk_agrees_with(&est, &analytic, 3.0));
    }

    #[test]
    fn walks_are_deterministic_across_runs() {
        let m = self_loop_model();
        let a = walk_absorption(&m, &config(50_000, 7)).unwrap();
        let b = walk_absorption(&m, &config(50_000, 7)).unwrap();
        assert_eq!(a, b);
        let c = walk_absorption(&m, &config(50_000, 8)).unwrap();
        assert_ne!(a.p_correct_hat, c.p_correct_hat);
    }

    #[test]
    fn max_steps_of_one_censors_loops() {
        // One step from the start can only absorb via a direct edge; the
        // self-loop draw is censored and counted as a fault.
        let est = walk_absorption(
            &self_loop_model(),
            &SimConfig {
                trials: 10_000,
                seed: 3,
                max_steps: 1,
            },
        )
        .unwrap();
        assert!(est.censored_walks > 0);
        assert!(est.p_correct_hat < 0.85);
    }

    #[test]
    fn config_and_model_errors() {
        let m = self_loop_model();
        assert!(matches!(
            walk_absorption(&m, &SimConfig { trials: 0, seed: 0, max_steps: 1 }),
            Err(SimError::InvalidConfig { what: "trials" })
        ));
        assert!(matches!(
            walk_absorption(&m, &SimConfig { trials: 1, seed: 0, max_steps: 0 }),
            Err(SimError::InvalidConfig { what: "maxSteps" })
        ));
        let bad = ReliabilityFsm::new(node("n"), [node("n")], vec![edge("n", "C", 0.4)]);
        assert!(matches!(
            walk_absorption(&bad, &config(10, 0)),
            Err(SimError::InvalidModel(_))
        ));
    }

    #[test]
    fn renewal_profiles_are_structurally_valid_and_deterministic() {
        for seed in [0u64, 1, 7, 42] {
            let p = simulate_renewal("svc", 9.0, 1.0, 5000.0, seed).unwrap();
            assert_eq!(p.events()[0].timestamp_hours, 0.0);
            assert_eq!(p.events()[0].state, ServiceState::Up);
            let again = simulate_renewal("svc", 9.0, 1.0, 5000.0, seed).unwrap();
            assert_eq!(p, again);
        }
    }

    #[test]
    fn renewal_long_run_average_approaches_the_mtbf_ratio() {
        let p = simulate_renewal("svc", 9.0, 1.0, 100_000.0, 11).unwrap();
        let avg = p.average_availability(p.horizon_hours()).unwrap();
        assert!(
            (avg - 0.9).abs() < 0.01,
            "long-run average {avg} strayed from 0.9"
        );
    }

    #[test]
    fn renewal_reproduces_the_worked_example_ratio() {
        // 71394-hour MTBF, one-hour recoveries: the long-run average must sit
        // on 71394/71395 once the horizon covers enough failure cycles.
        let p = simulate_renewal("svc", 71394.0, 1.0, 1e7, 4).unwrap();
        let avg = p.average_availability(p.horizon_hours()).unwrap();
        assert!(
            (avg - 0.99998599).abs() < 5e-5,
            "average {avg} strayed from the MTBF ratio"
        );
    }

    #[test]
    fn standard_error_is_the_binomial_formula() {
        let est = walk_absorption(&self_loop_model(), &config(25_000, 4)).unwrap();
        let expected =
            (est.p_correct_hat * (1.0 - est.p_correct_hat) / est.trials as f64).sqrt();
        assert!((est.standard_error - expected).abs() <= 1e-12);
    }

    #[test]
    fn renewal_rejects_nonpositive_arguments() {
        assert!(simulate_renewal("svc", 0.0, 1.0, 10.0, 0).is_err());
        assert!(simulate_renewal("svc", 9.0, -1.0, 10.0, 0).is_err());
        assert!(simulate_renewal("svc", 9.0, 1.0, 0.0, 0).is_err());
    }

    #[test]
    fn ensemble_at_time_zero_is_one() {
        assert_eq!(ensemble_availability(9.0, 1.0, 0.0, 1000, 5).unwrap(), 1.0);
    }

    #[test]
    fn ensemble_converges_to_the_steady_state() {
        let trials = 20_000u64;
        let p = ensemble_availability(9.0, 1.0, 1000.0, trials, 13).unwrap();
        let se = (0.9f64 * 0.1 / trials as f64).sqrt();
        assert!(
            (p - 0.9).abs() <= 3.0 * se,
            "ensemble {p} strayed from 0.9 (3 sigma = {})",
            3.0 * se
        );
    }

    #[test]
    fn ensemble_shortly_after_start_matches_the_survival_probability() {
        // Survival of the first up period: exp(-t / mtbf); recoveries within
        // so short a window are second-order.
        let trials = 100_000u64;
        let p = ensemble_availability(9.0, 1.0, 0.01, trials, 17).unwrap();
        let expected = (-0.01f64 / 9.0).exp();
        let se = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!((p - expected).abs() <= 3.0 * se);
        assert!(p >= 0.998);
    }

    #[test]
    fn ensemble_trial_zero_matches_the_renewal_trajectory() {
        for (seed, t) in [(1u64, 3.0f64), (2, 17.5), (9, 42.0)] {
            let profile = simulate_renewal("svc", 9.0, 1.0, 100.0, seed).unwrap();
            let single = ensemble_availability(9.0, 1.0, t, 1, seed).unwrap();
            let from_profile = f64::from(u8::from(profile.is_up_at(t).unwrap()));
            assert_eq!(single, from_profile, "seed {seed} t {t}");
        }
    }

    #[test]
    fn substreams_are_pinned() {
        // Golden draws freeze the generator choice; a library bump that
        // changes the stream would surface here rather than as a silent
        // statistics shift.
        let mut s0 = substream(42, 0);
        let mut s1 = substream(42, 1);
        let a: u64 = s0.random();
        let b: u64 = s1.random();
        assert_ne!(a, b);
        assert_eq!(a, GOLDEN_STREAM0_DRAW);
        assert_eq!(b, GOLDEN_STREAM1_DRAW);
    }

    #[test]
    fn walk_estimate_is_pinned() {
        let est = walk_absorption(&self_loop_model(), &config(10_000, 42)).unwrap();
        assert_eq!(est.p_correct_hat, GOLDEN_SELF_LOOP_P_HAT);
    }

    #[test]
    fn renewal_event_times_are_pinned() {
        let p = simulate_renewal("svc", 9.0, 1.0, 100.0, 7).unwrap();
        assert_eq!(p.events().len(), GOLDEN_RENEWAL_EVENT_COUNT);
        assert_eq!(p.events()[1].timestamp_hours, GOLDEN_RENEWAL_FIRST_DOWN);
    }

    // Frozen outputs of the pinned generator (ChaCha8, 64-bit seed, trial
    // index as stream).
    const GOLDEN_STREAM0_DRAW: u64 = 12578764544318200737;
    const GOLDEN_STREAM1_DRAW: u64 = 13222472167927179408;
    const GOLDEN_SELF_LOOP_P_HAT: f64 = 0.8853;
    const GOLDEN_RENEWAL_EVENT_COUNT: usize = 31;
    const GOLDEN_RENEWAL_FIRST_DOWN: f64 = 1.545598160985495;

    mod statistical {
        use super::*;

        #[test]
        fn walks_match_the_solver_on_random_models() {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
            for round in 0..20 {
                let m = super::super::testgen::random_validated_model(&mut rng, 12);
                let analytic = solve_absorption(&m).unwrap();
                let est = walk_absorption(&m, &config(100_000, 1000 + round)).unwrap();
                assert!(est.censored_walks < est.trials / 1000);
                assert!(
                    walk_agrees_with(&est, &analytic, 3.0),
                    "round {round}: walk {} vs solve {} (se {})",
                    est.p_correct_hat,
                    analytic.reliability(),
                    est.standard_error
                );
            }
        }
    }
}
