//! Closed-form availability and reliability conversions.
//!
//! Two formula families are covered: downtime-per-failure against failure
//! intensity (`A = 1 / (1 + t_m * lambda)` and its inverse) and exponential
//! reliability against failure intensity (`R = exp(-lambda * t)` and its
//! inverse), plus the steady-state ratio `MTBF / (MTBF + MTTR)` for service
//! profiles. All functions are pure and stateless.

use thiserror::Error;

/// Hours per year as used in every year-to-hour conversion: `365 * 24`,
/// no leap years.
pub const HOURS_PER_YEAR: f64 = 8760.0;

/// An argument fell outside a formula's domain.
#[derive(Clone, Copy, Debug, PartialEq, Error)]
#[error("{name} = {value} violates: {requirement}")]
pub struct DomainError {
    pub name: &'static str,
    pub value: f64,
    pub requirement: &'static str,
}

fn require(
    condition: bool,
    name: &'static str,
    value: f64,
    requirement: &'static str,
) -> Result<(), DomainError> {
    if condition {
        Ok(())
    } else {
        Err(DomainError {
            name,
            value,
            requirement,
        })
    }
}

/// A named service with its mean time between failures and mean time to
/// recovery, both in hours.
#[derive(Clone, Debug, PartialEq)]
pub struct ServiceProfile {
    name: String,
    mtbf_hours: f64,
    mttr_hours: f64,
}

impl ServiceProfile {
    pub fn new(
        name: impl Into<String>,
        mtbf_hours: f64,
        mttr_hours: f64,
    ) -> Result<Self, DomainError> {
        require(
            mtbf_hours.is_finite() && mtbf_hours > 0.0,
            "mtbfHours",
            mtbf_hours,
            "must be positive and finite",
        )?;
        require(
            mttr_hours.is_finite() && mttr_hours >= 0.0,
            "mttrHours",
            mttr_hours,
            "must be nonnegative and finite",
        )?;
        Ok(ServiceProfile {
            name: name.into(),
            mtbf_hours,
            mttr_hours,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mtbf_hours(&self) -> f64 {
        self.mtbf_hours
    }

    pub fn mttr_hours(&self) -> f64 {
        self.mttr_hours
    }

    pub fn availability(&self) -> f64 {
        availability_from_mtbf_mttr(self)
    }
}

/// Failure intensity: expected failures per unit of time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FailureIntensity(f64);

impl FailureIntensity {
    pub fn new(lambda: f64) -> Result<Self, DomainError> {
        require(
            lambda.is_finite() && lambda >= 0.0,
            "lambda",
            lambda,
            "must be nonnegative and finite",
        )?;
        Ok(FailureIntensity(lambda))
    }

    /// Bridging helper equating the failure intensity with `1 / MTBF`.
    ///
    /// The downtime formula family and the MTBF/MTTR family are otherwise
    /// independent; this conversion is an extension for users who want to
    /// move between them, not part of either formula set.
    pub fn from_mtbf_hours(mtbf_hours: f64) -> Result<Self, DomainError> {
        require(
            mtbf_hours.is_finite() && mtbf_hours > 0.0,
            "mtbfHours",
            mtbf_hours,
            "must be positive and finite",
        )?;
        Ok(FailureIntensity(1.0 / mtbf_hours))
    }

    pub fn per_hour(&self) -> f64 {
        self.0
    }
}

/// Availability from average downtime per failure and failure intensity:
/// `A = 1 / (1 + tm * lambda)`.
pub fn availability_from_downtime(tm_hours: f64, lambda_f: f64) -> Result<f64, DomainError> {
    require(
        tm_hours.is_finite() && tm_hours > 0.0,
        "tm",
        tm_hours,
        "must be positive and finite",
    )?;
    require(
        lambda_f.is_finite() && lambda_f >= 0.0,
        "lambda",
        lambda_f,
        "must be nonnegative and finite",
    )?;
    Ok(1.0 / (1.0 + tm_hours * lambda_f))
}

/// Failure intensity from availability and average downtime per failure:
/// `lambda = (1 - A) / (tm * A)`. Exact inverse of
/// [`availability_from_downtime`].
pub fn failure_intensity_from_availability(
    tm_hours: f64,
    availability: f64,
) -> Result<f64, DomainError> {
    require(
        tm_hours.is_finite() && tm_hours > 0.0,
        "tm",
        tm_hours,
        "must be positive and finite",
    )?;
    require(
        availability > 0.0 && availability <= 1.0,
        "availability",
        availability,
        "must lie in (0, 1]",
    )?;
    Ok((1.0 - availability) / (tm_hours * availability))
}

/// Reliability over an exposure of `t` units at constant failure intensity:
/// `R = exp(-lambda * t)`.
pub fn reliability_from_intensity(lambda: f64, t: f64) -> Result<f64, DomainError> {
    require(
        lambda.is_finite() && lambda >= 0.0,
        "lambda",
        lambda,
        "must be nonnegative and finite",
    )?;
    require(t.is_finite() && t >= 0.0, "t", t, "must be nonnegative and finite")?;
    Ok((-lambda * t).exp())
}

/// Failure intensity from observed reliability over `t` units:
/// `lambda = -ln(R) / t`. Exact inverse of [`reliability_from_intensity`].
pub fn intensity_from_reliability(reliability: f64, t: f64) -> Result<f64, DomainError> {
    require(
        reliability > 0.0 && reliability <= 1.0,
        "reliability",
        reliability,
        "must lie in (0, 1]",
    )?;
    require(t.is_finite() && t > 0.0, "t", t, "must be positive and finite")?;
    Ok(-reliability.ln() / t)
}

/// Steady-state availability of a service: `MTBF / (MTBF + MTTR)`.
pub fn availability_from_mtbf_mttr(profile: &ServiceProfile) -> f64 {
    profile.mtbf_hours / (profile.mtbf_hours + profile.mttr_hours)
}

/// Year-to-hour conversion at [`HOURS_PER_YEAR`].
pub fn years_to_hours(years: f64) -> f64 {
    years * HOURS_PER_YEAR
}
