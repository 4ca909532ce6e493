//! Workflow model types: transient nodes, probability-weighted transitions,
//! and the two absorbing outcomes `C` (correct termination) and `F` (fault).
//!
//! A [`ReliabilityFsm`] accepts arbitrary candidate data on construction;
//! [`ReliabilityFsm::validate`] reports every structural breach as a
//! [`Violation`] value instead of failing, so callers can show all problems
//! in one pass.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Absolute tolerance on the per-node outgoing probability sum.
///
/// Models outside this tolerance are rejected rather than renormalized;
/// silent renormalization would hide authoring errors.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Reserved label of the correct-termination absorbing state.
pub const CORRECT_LABEL: &str = "C";
/// Reserved label of the fault absorbing state.
pub const FAULT_LABEL: &str = "F";

/// Label of a transient node.
///
/// Labels are nonempty and may not collide with the reserved absorbing
/// labels [`CORRECT_LABEL`] / [`FAULT_LABEL`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(label: impl Into<String>) -> Result<Self, FsmError> {
        let label = label.into();
        if label.is_empty() {
            return Err(FsmError::EmptyLabel);
        }
        if label == CORRECT_LABEL || label == FAULT_LABEL {
            return Err(FsmError::ReservedLabel { label });
        }
        Ok(NodeId(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Destination of a transition: another transient node or an absorbing state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Node(NodeId),
    Correct,
    Fault,
}

impl Target {
    pub fn label(&self) -> &str {
        match self {
            Target::Node(id) => id.as_str(),
            Target::Correct => CORRECT_LABEL,
            Target::Fault => FAULT_LABEL,
        }
    }

    /// Maps a wire label to a target; `C` and `F` name the absorbing states.
    pub fn from_label(label: &str) -> Result<Self, FsmError> {
        match label {
            CORRECT_LABEL => Ok(Target::Correct),
            FAULT_LABEL => Ok(Target::Fault),
            other => NodeId::new(other).map(Target::Node),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A probability-weighted transition out of a transient node.
///
/// Absorbing states have no outgoing edges by construction: `from` is a
/// [`NodeId`], which can never carry a reserved label.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub from: NodeId,
    pub to: Target,
    pub probability: f64,
}

/// Errors from constructing individual model values.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FsmError {
    #[error("node label may not be empty")]
    EmptyLabel,
    #[error("label \"{label}\" is reserved for an absorbing state")]
    ReservedLabel { label: String },
    #[error("unknown node \"{node}\"")]
    UnknownNode { node: NodeId },
}

/// One structural rule breach found by [`ReliabilityFsm::validate`].
///
/// Violations are data, not failures: validation always succeeds and returns
/// the full list.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Violation {
    #[error("start node \"{start}\" is not in the node set")]
    StartNotDeclared { start: NodeId },
    #[error("edge {from} -> {to} leaves an undeclared node")]
    EdgeFromUndeclared { from: NodeId, to: Target },
    #[error("edge {from} -> {to} targets an undeclared node")]
    EdgeToUndeclared { from: NodeId, to: Target },
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: NodeId, to: Target },
    #[error("edge {from} -> {to} has probability {probability} outside [0, 1]")]
    ProbabilityOutOfRange {
        from: NodeId,
        to: Target,
        probability: f64,
    },
    #[error("row sum != 1 at {node}: outgoing probabilities sum to {sum}")]
    RowSumMismatch { node: NodeId, sum: f64 },
    #[error("no absorbing path from {node}")]
    NoAbsorbingPath { node: NodeId },
}

/// A workflow model: transient nodes, weighted transitions, and a start node.
///
/// A valid model is an absorbing chain: every transient row sums to 1 within
/// [`ROW_SUM_TOLERANCE`] and every node reaches `C` or `F` along some path of
/// positive-probability edges. Models are immutable after construction and
/// safe to share across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct ReliabilityFsm {
    start: NodeId,
    nodes: BTreeSet<NodeId>,
    edges: Vec<Edge>,
}

impl ReliabilityFsm {
    /// Builds a candidate model. No rules are checked here; run
    /// [`validate`](Self::validate) to inspect it.
    pub fn new(
        start: NodeId,
        nodes: impl IntoIterator<Item = NodeId>,
        edges: Vec<Edge>,
    ) -> Self {
        ReliabilityFsm {
            start,
            nodes: nodes.into_iter().collect(),
            edges,
        }
    }

    pub fn start(&self) -> &NodeId {
        &self.start
    }

    /// Transient nodes in sorted label order.
    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.iter()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.nodes.contains(node)
    }

    /// Edges in declaration order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn outgoing<'a>(&'a self, node: &'a NodeId) -> impl Iterator<Item = &'a Edge> {
        self.edges.iter().filter(move |e| &e.from == node)
    }

    /// The probability mass a node sends straight to the fault state: the
    /// complement of the node's reliability factor. Zero when the node has
    /// no direct fault edge.
    pub fn node_fault_factor(&self, node: &NodeId) -> Result<f64, FsmError> {
        if !self.nodes.contains(node) {
            return Err(FsmError::UnknownNode { node: node.clone() });
        }
        Ok(self
            .outgoing(node)
            .find(|e| e.to == Target::Fault)
            .map(|e| e.probability)
            .unwrap_or(0.0))
    }

    /// Checks every structural rule and returns one [`Violation`] per breach.
    /// An empty result means the model is a well-formed absorbing chain.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();

        if !self.nodes.contains(&self.start) {
            violations.push(Violation::StartNotDeclared {
                start: self.start.clone(),
            });
        }

        let mut seen: BTreeSet<(&NodeId, &str)> = BTreeSet::new();
        for edge in &self.edges {
            if !self.nodes.contains(&edge.from) {
                violations.push(Violation::EdgeFromUndeclared {
                    from: edge.from.clone(),
                    to: edge.to.clone(),
                });
            }
            if let Target::Node(to) = &edge.to {
                if !self.nodes.contains(to) {
                    violations.push(Violation::EdgeToUndeclared {
                        from: edge.from.clone(),
                        to: edge.to.clone(),
                    });
                }
            }
            if !edge.probability.is_finite() || edge.probability < 0.0 || edge.probability > 1.0 {
                violations.push(Violation::ProbabilityOutOfRange {
                    from: edge.from.clone(),
                    to: edge.to.clone(),
                    probability: edge.probability,
                });
            }
            if !seen.insert((&edge.from, edge.to.label())) {
                violations.push(Violation::DuplicateEdge {
                    from: edge.from.clone(),
                    to: edge.to.clone(),
                });
            }
        }

        for node in &self.nodes {
            let sum: f64 = self.outgoing(node).map(|e| e.probability).sum();
            let deviation = (sum - 1.0).abs();
            if deviation.is_nan() || deviation > ROW_SUM_TOLERANCE {
                violations.push(Violation::RowSumMismatch {
                    node: node.clone(),
                    sum,
                });
            }
        }

        violations.extend(
            self.nodes_without_absorbing_path()
                .into_iter()
                .map(|node| Violation::NoAbsorbingPath { node }),
        );

        violations
    }

    /// Transient nodes with no positive-probability path to `C` or `F`,
    /// in sorted order. Zero-probability edges do not carry the walk.
    fn nodes_without_absorbing_path(&self) -> Vec<NodeId> {
        // Reverse reachability from the absorbing states.
        let mut predecessors: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
        let mut queue: VecDeque<&NodeId> = VecDeque::new();
        let mut reached: BTreeSet<&NodeId> = BTreeSet::new();

        for edge in &self.edges {
            if edge.probability <= 0.0 || !self.nodes.contains(&edge.from) {
                continue;
            }
            match &edge.to {
                Target::Correct | Target::Fault => {
                    if reached.insert(&edge.from) {
                        queue.push_back(&edge.from);
                    }
                }
                Target::Node(to) => predecessors.entry(to).or_default().push(&edge.from),
            }
        }

        while let Some(node) = queue.pop_front() {
            if let Some(preds) = predecessors.get(node) {
                for pred in preds {
                    if reached.insert(pred) {
                        queue.push_back(pred);
                    }
                }
            }
        }

        self.nodes
            .iter()
            .filter(|n| !reached.contains(n))
            .cloned()
            .collect()
    }
}

/// Per-node absorption probabilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeAbsorption {
    /// Probability a walk from this node terminates in `C`.
    pub p_correct: f64,
    /// Probability a walk from this node terminates in `F`.
    pub p_fault: f64,
}

/// Absorption probabilities for every transient node of one model.
#[derive(Clone, Debug, PartialEq)]
pub struct AbsorptionResult {
    start: NodeId,
    per_node: BTreeMap<NodeId, NodeAbsorption>,
}

impl AbsorptionResult {
    pub(crate) fn new(start: NodeId, per_node: BTreeMap<NodeId, NodeAbsorption>) -> Self {
        debug_assert!(per_node.contains_key(&start));
        AbsorptionResult { start, per_node }
    }

    pub fn start(&self) -> &NodeId {
        &self.start
    }

    pub fn per_node(&self) -> &BTreeMap<NodeId, NodeAbsorption> {
        &self.per_node
    }

    /// The workflow's reliability: probability of correct termination from
    /// the start node.
    pub fn reliability(&self) -> f64 {
        self.per_node[&self.start].p_correct
    }

    /// Probability of terminating in the fault state from the start node.
    pub fn fault_probability(&self) -> f64 {
        self.per_node[&self.start].p_fault
    }

    /// The workflow counts as reliable when correct termination outweighs
    /// fault termination from the start node.
    pub fn is_reliable(&self) -> bool {
        self.reliability() > self.fault_probability()
    }
}
