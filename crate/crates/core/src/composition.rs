//! Availability aggregation over a service composition set.
//!
//! Per-service availability comes from the MTBF/MTTR ratio, or from an
//! attached operational profile when one exists (the observed log wins over
//! the declared figures). Three aggregates are reported side by side rather
//! than picking one silently:
//!
//! * `paper_sum` — the plain sum of per-service availabilities. It can
//!   exceed 1 and has no normalization; reported verbatim.
//! * `mean` — `paper_sum / n`, the average availability across the set.
//! * `series_product` — the product of per-service availabilities, the
//!   availability of the set treated as a series system.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::availability::{DomainError, ServiceProfile};
use crate::monitor::OperationalProfile;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CompositionError {
    #[error("a composition set must contain at least one service")]
    EmptySet,
    #[error("duplicate service name \"{name}\" in composition set")]
    DuplicateService { name: String },
}

/// An ordered set of services participating in one composition.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositionSet {
    name: String,
    services: Vec<ServiceProfile>,
}

impl CompositionSet {
    pub fn new(
        name: impl Into<String>,
        services: Vec<ServiceProfile>,
    ) -> Result<Self, CompositionError> {
        if services.is_empty() {
            return Err(CompositionError::EmptySet);
        }
        let mut seen = std::collections::BTreeSet::new();
        for service in &services {
            if !seen.insert(service.name()) {
                return Err(CompositionError::DuplicateService {
                    name: service.name().to_string(),
                });
            }
        }
        Ok(CompositionSet {
            name: name.into(),
            services,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn services(&self) -> &[ServiceProfile] {
        &self.services
    }

    pub fn len(&self) -> usize {
        self.services.len()
    }

    pub fn is_empty(&self) -> bool {
        self.services.is_empty()
    }
}

/// Which source produced a per-service availability figure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AvailabilitySource {
    /// Computed from the declared MTBF/MTTR ratio.
    MtbfMttr,
    /// Measured from an attached operational profile.
    OperationalProfile,
}

impl AvailabilitySource {
    pub fn label(&self) -> &'static str {
        match self {
            AvailabilitySource::MtbfMttr => "mtbf/mttr",
            AvailabilitySource::OperationalProfile => "operational-profile",
        }
    }
}

/// Availability of one service inside a composition report.
#[derive(Clone, Debug, PartialEq)]
pub struct ServiceAvailability {
    pub name: String,
    pub availability: f64,
    pub source: AvailabilitySource,
}

/// Aggregated availability over one composition set.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositionReport {
    pub set_name: String,
    /// Per-service availability in the set's declared order.
    pub per_service: Vec<ServiceAvailability>,
    /// Plain sum of per-service availabilities; may exceed 1.
    pub paper_sum: f64,
    /// `paper_sum / n`.
    pub mean: f64,
    /// Product of per-service availabilities (series-system availability).
    pub series_product: f64,
}

/// Evaluates a composition set from declared MTBF/MTTR figures only.
pub fn evaluate_composition(set: &CompositionSet) -> CompositionReport {
    evaluate_composition_with_profiles(set, &BTreeMap::new())
}

/// Evaluates a composition set, preferring an attached operational profile
/// over the declared MTBF/MTTR figures for any service that has one. The
/// profile's availability is its time average over the full observation
/// horizon.
///
/// Aggregates are folded over name-sorted values so that permuting the
/// service list changes nothing but the per-service ordering.
pub fn evaluate_composition_with_profiles(
    set: &CompositionSet,
    profiles: &BTreeMap<String, OperationalProfile>,
) -> CompositionReport {
    let per_service: Vec<ServiceAvailability> = set
        .services()
        .iter()
        .map(|service| match profiles.get(service.name()) {
            Some(profile) => ServiceAvailability {
                name: service.name().to_string(),
                availability: profile
                    .average_availability(profile.horizon_hours())
                    .expect("profile horizon is positive"),
                source: AvailabilitySource::OperationalProfile,
            },
            None => ServiceAvailability {
                name: service.name().to_string(),
                availability: service.availability(),
                source: AvailabilitySource::MtbfMttr,
            },
        })
        .collect();

    let mut sorted: Vec<&ServiceAvailability> = per_service.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    let paper_sum: f64 = sorted.iter().map(|s| s.availability).sum();
    let series_product: f64 = sorted.iter().map(|s| s.availability).product();

    CompositionReport {
        set_name: set.name().to_string(),
        mean: paper_sum / per_service.len() as f64,
        per_service,
        paper_sum,
        series_product,
    }
}

/// Availability as the ratio of expected uptime to total expected time:
/// `up / (up + down)`.
pub fn availability_from_uptime_expectations(
    up_hours: f64,
    down_hours: f64,
) -> Result<f64, DomainError> {
    let requirement = "uptime and downtime must be nonnegative with a positive sum";
    if !(up_hours.is_finite() && up_hours >= 0.0) {
        return Err(DomainError {
            name: "upHours",
            value: up_hours,
            requirement,
        });
    }
    if !(down_hours.is_finite() && down_hours >= 0.0) {
        return Err(DomainError {
            name: "downHours",
            value: down_hours,
            requirement,
        });
    }
    if up_hours + down_hours <= 0.0 {
        return Err(DomainError {
            name: "upHours + downHours",
            value: up_hours + down_hours,
            requirement,
        });
    }
    Ok(up_hours / (up_hours + down_hours))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monitor::{ProfileEvent, ServiceState};

    fn travel_set() -> CompositionSet {
        CompositionSet::new(
            "Travel Service",
            vec![
                ServiceProfile::new("Reservation", 36441.6, 1.0).unwrap(),
                ServiceProfile::new("Accommodation", 42924.0, 1.0).unwrap(),
                ServiceProfile::new("Hotel", 41172.0, 1.0).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn travel_set_per_service_availabilities() {
        let report = evaluate_composition(&travel_set());
        let expected = [
            36441.6 / 36442.6,
            42924.0 / 42925.0,
            41172.0 / 41173.0,
        ];
        for (service, want) in report.per_service.iter().zip(expected) {
            assert!((service.availability - want).abs() < 1e-15);
            assert_eq!(service.source, AvailabilitySource::MtbfMttr);
        }
        let rendered: Vec<String> = report
            .per_service
            .iter()
            .map(|s| crate::render::percent_truncated_4dp(s.availability))
            .collect();
        assert_eq!(rendered, ["99.9972", "99.9976", "99.9975"]);
    }

    #[test]
    fn travel_set_series_product() {
        let report = evaluate_composition(&travel_set());
        let want = (36441.6 / 36442.6) * (42924.0 / 42925.0) * (41172.0 / 41173.0);
        assert!((report.series_product - want).abs() < 1e-12);
        // Three ~99.9975% services in series sit near 99.9925%.
        assert!((report.series_product - 0.999925).abs() < 1e-5);
    }

    #[test]
    fn singleton_set_aggregates_collapse() {
        let set = CompositionSet::new(
            "solo",
            vec![ServiceProfile::new("only", 10.0, 0.0).unwrap()],
        )
        .unwrap();
        let report = evaluate_composition(&set);
        assert_eq!(report.paper_sum, 1.0);
        assert_eq!(report.mean, 1.0);
        assert_eq!(report.series_product, 1.0);
    }

    #[test]
    fn aggregate_identities_hold() {
        let report = evaluate_composition(&travel_set());
        let sum: f64 = report.per_service.iter().map(|s| s.availability).sum();
        assert!((report.paper_sum - sum).abs() <= 1e-12);
        assert!((report.mean - report.paper_sum / 3.0).abs() <= 1e-12);
        let min = report
            .per_service
            .iter()
            .map(|s| s.availability)
            .fold(f64::INFINITY, f64::min);
        assert!(report.series_product <= min);
        assert!(report.series_product <= report.mean);
        assert!(report.mean <= 1.0);
        assert!(report.paper_sum <= report.per_service.len() as f64);
    }

    #[test]
    fn attached_profile_wins_over_declared_figures() {
        let set = CompositionSet::new(
            "set",
            vec![
                ServiceProfile::new("measured", 1000.0, 0.0).unwrap(),
                ServiceProfile::new("declared", 9.0, 1.0).unwrap(),
            ],
        )
        .unwrap();
        let mut profiles = BTreeMap::new();
        profiles.insert(
            "measured".to_string(),
            OperationalProfile::new(
                "measured",
                vec![
                    ProfileEvent {
                        timestamp_hours: 0.0,
                        state: ServiceState::Up,
                    },
                    ProfileEvent {
                        timestamp_hours: 5.0,
                        state: ServiceState::Down,
                    },
                ],
                10.0,
            )
            .unwrap(),
        );
        let report = evaluate_composition_with_profiles(&set, &profiles);
        assert_eq!(report.per_service[0].source, AvailabilitySource::OperationalProfile);
        assert_eq!(report.per_service[0].availability, 0.5);
        assert_eq!(report.per_service[1].source, AvailabilitySource::MtbfMttr);
        assert!((report.per_service[1].availability - 0.9).abs() < 1e-15);
    }

    #[test]
    fn set_construction_rejects_bad_input() {
        assert_eq!(
            CompositionSet::new("empty", vec![]),
            Err(CompositionError::EmptySet)
        );
        let dup = CompositionSet::new(
            "dup",
            vec![
                ServiceProfile::new("a", 1.0, 0.0).unwrap(),
                ServiceProfile::new("a", 2.0, 0.0).unwrap(),
            ],
        );
        assert_eq!(
            dup,
            Err(CompositionError::DuplicateService {
                name: "a".to_string()
            })
        );
    }

    #[test]
    fn uptime_expectation_ratios() {
        assert!(
            (availability_from_uptime_expectations(71394.0, 1.0).unwrap() - 0.99998599).abs()
                < 1e-8
        );
        assert_eq!(availability_from_uptime_expectations(0.0, 5.0).unwrap(), 0.0);
        assert_eq!(availability_from_uptime_expectations(3.0, 1.0).unwrap(), 0.75);
        assert!(availability_from_uptime_expectations(0.0, 0.0).is_err());
        assert!(availability_from_uptime_expectations(-1.0, 2.0).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn permutation_leaves_aggregates_unchanged(
                mtbfs in proptest::collection::vec(1.0..1e5f64, 1..8),
                rotation in 0usize..8,
            ) {
                let services: Vec<ServiceProfile> = mtbfs
                    .iter()
                    .enumerate()
                    .map(|(i, &mtbf)| ServiceProfile::new(format!("s{i}"), mtbf, 1.0).unwrap())
                    .collect();
                let mut rotated = services.clone();
                rotated.rotate_left(rotation % services.len().max(1));

                let a = evaluate_composition(&CompositionSet::new("x", services).unwrap());
                let b = evaluate_composition(&CompositionSet::new("x", rotated).unwrap());
                prop_assert_eq!(a.paper_sum, b.paper_sum);
                prop_assert_eq!(a.mean, b.mean);
                prop_assert_eq!(a.series_product, b.series_product);
            }

            #[test]
            fn aggregate_bounds(mtbfs in proptest::collection::vec(1.0..1e5f64, 1..8)) {
                let services: Vec<ServiceProfile> = mtbfs
                    .iter()
                    .enumerate()
                    .map(|(i, &mtbf)| ServiceProfile::new(format!("s{i}"), mtbf, 1.0).unwrap())
                    .collect();
                let n = services.len() as f64;
                let report = evaluate_composition(&CompositionSet::new("x", services).unwrap());
                let min = report
                    .per_service
                    .iter()
                    .map(|s| s.availability)
                    .fold(f64::INFINITY, f64::min);
                prop_assert!(report.series_product <= min + 1e-15);
                prop_assert!(report.series_product <= report.mean + 1e-15);
                prop_assert!(report.mean <= 1.0 + 1e-15);
                prop_assert!(report.paper_sum <= n + 1e-12);
            }
        }
    }
}
