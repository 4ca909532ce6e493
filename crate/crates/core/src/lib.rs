//! Reliability and availability analysis for composed service workflows.
//!
//! A workflow is modeled as a finite state machine whose transient nodes
//! carry probability-weighted transitions into each other and into two
//! absorbing outcomes: `C` (the run terminates with a correct result) and
//! `F` (the run ends in a fault). The probability of reaching `C` from the
//! start node is the workflow's reliability.
//!
//! The crate provides:
//!
//! * [`fsm`] — model types and structural validation,
//! * [`absorption`] — exact absorption-probability solvers (dense direct
//!   and fixed-point iterative),
//! * [`availability`] — closed-form availability/reliability conversions
//!   (MTBF/MTTR, downtime-per-failure, failure intensity),
//! * [`composition`] — availability aggregation over service composition
//!   sets,
//! * [`monitor`] — exact time-average availability over up/down event logs,
//! * [`sim`] — Monte Carlo cross-checks for both analytic engines (random
//!   walks on the model and an alternating renewal process),
//! * [`formats`] — the on-disk model, composition and event-log formats.
//!
//! Every analytic quantity has an independent Monte Carlo route so results
//! can be cross-validated; simulations are seed-deterministic with
//! per-trial substreams, so identical inputs give bit-identical outputs.

pub mod absorption;
pub mod availability;
pub mod composition;
pub mod formats;
pub mod fsm;
pub mod monitor;
pub mod render;
pub mod sim;

pub use absorption::{solve_absorption, solve_absorption_iterative, SolveError};
pub use availability::{
    availability_from_downtime, availability_from_mtbf_mttr, failure_intensity_from_availability,
    intensity_from_reliability, reliability_from_intensity, DomainError, FailureIntensity,
    ServiceProfile,
};
pub use composition::{
    availability_from_uptime_expectations, evaluate_composition,
    evaluate_composition_with_profiles, AvailabilitySource, CompositionReport, CompositionSet,
    ServiceAvailability,
};
pub use formats::{
    parse_compositions, parse_model, parse_operational_profile, serialize_compositions,
    serialize_model, serialize_operational_profile, CompositionDocument, ModelDocument,
    ParseError, ParseOptions, Parsed,
};
pub use fsm::{
    AbsorptionResult, Edge, FsmError, NodeAbsorption, NodeId, ReliabilityFsm, Target, Violation,
};
pub use monitor::{
    LimitingAvailability, MonitorError, OperationalProfile, ProfileEvent, ServiceState,
    WindowAverage,
};
pub use sim::{ensemble_availability, simulate_renewal, walk_absorption, SimConfig, SimError, WalkEstimate};
