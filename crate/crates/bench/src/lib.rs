//! Deterministic input generators shared by the benchmarks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wsrel_core::{Edge, NodeId, OperationalProfile, ProfileEvent, ReliabilityFsm, ServiceState, Target};

/// A validated model with `nodes` transient nodes: every node keeps a few
/// percent of direct absorption mass and up to three transient transitions.
pub fn model_with_nodes(nodes: usize, seed: u64) -> ReliabilityFsm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<NodeId> = (0..nodes)
        .map(|i| NodeId::new(format!("n{i:05}")).unwrap())
        .collect();
    let mut edges = Vec::new();
    for from in &labels {
        let mut weights: BTreeMap<Target, f64> = BTreeMap::new();
        weights.insert(Target::Correct, 0.02 + rng.random::<f64>() * 0.1);
        weights.insert(Target::Fault, 0.02 + rng.random::<f64>() * 0.1);
        for _ in 0..3 {
            let to = labels[rng.random_range(0..nodes)].clone();
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

/// An alternating up/down log with `events` entries over a matching horizon.
pub fn profile_with_events(events: usize) -> OperationalProfile {
    let list: Vec<ProfileEvent> = (0..events)
        .map(|i| ProfileEvent {
            timestamp_hours: i as f64,
            state: if i % 2 == 0 {
                ServiceState::Up
            } else {
                ServiceState::Down
            },
        })
        .collect();
    OperationalProfile::new("bench", list, events as f64).unwrap()
}
