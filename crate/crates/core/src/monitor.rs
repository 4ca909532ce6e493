//! Event-log-driven availability.
//!
//! An [`OperationalProfile`] is one observed trajectory of a service: a
//! time-ordered, state-alternating list of up/down events plus an
//! observation horizon. State changes take effect exactly at their
//! timestamp, so the service state is constant on each `[t_i, t_{i+1})`
//! interval. Availability over a window is computed by exact
//! piecewise-constant integration — there is no quadrature error.

use thiserror::Error;

/// Whether a service is functioning.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ServiceState {
    Up,
    Down,
}

impl ServiceState {
    pub fn label(&self) -> &'static str {
        match self {
            ServiceState::Up => "up",
            ServiceState::Down => "down",
        }
    }
}

/// One observed state change at an absolute time, in hours.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileEvent {
    pub timestamp_hours: f64,
    pub state: ServiceState,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MonitorError {
    #[error("profile has no events; an initial state at t = 0 is required")]
    EmptyProfile,
    #[error("first event must declare the state at t = 0, found t = {timestamp}")]
    FirstEventNotAtZero { timestamp: f64 },
    #[error("timestamp at event {index} is not finite")]
    NonFiniteTimestamp { index: usize },
    #[error("timestamps must be strictly increasing: event {index} at t = {timestamp}")]
    NonIncreasingTimestamp { index: usize, timestamp: f64 },
    #[error("events must alternate state: event {index} repeats {state}", state = .state.label())]
    NonAlternatingState { index: usize, state: ServiceState },
    #[error("horizon {horizon} must be positive and finite")]
    HorizonNotPositive { horizon: f64 },
    #[error("horizon {horizon} lies before the last event at t = {last}")]
    HorizonBeforeLastEvent { horizon: f64, last: f64 },
    #[error("{name} = {value} is outside [0, {horizon}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        horizon: f64,
    },
    #[error("window = {value} must be positive")]
    WindowNotPositive { value: f64 },
}

/// One observed up/down trajectory of a service over `[0, horizon]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperationalProfile {
    service_name: String,
    events: Vec<ProfileEvent>,
    horizon_hours: f64,
}

impl OperationalProfile {
    /// Validates and builds a profile. The first event must sit exactly at
    /// t = 0, timestamps must strictly increase, consecutive events must
    /// alternate state, and the horizon must be positive, finite, and not
    /// precede the last event.
    pub fn new(
        service_name: impl Into<String>,
        events: Vec<ProfileEvent>,
        horizon_hours: f64,
    ) -> Result<Self, MonitorError> {
        let Some(first) = events.first() else {
            return Err(MonitorError::EmptyProfile);
        };
        if first.timestamp_hours != 0.0 {
            return Err(MonitorError::FirstEventNotAtZero {
                timestamp: first.timestamp_hours,
            });
        }
        for (index, event) in events.iter().enumerate() {
            if !event.timestamp_hours.is_finite() {
                return Err(MonitorError::NonFiniteTimestamp { index });
            }
            if index > 0 {
                let previous = &events[index - 1];
                if event.timestamp_hours <= previous.timestamp_hours {
                    return Err(MonitorError::NonIncreasingTimestamp {
                        index,
                        timestamp: event.timestamp_hours,
                    });
                }
                if event.state == previous.state {
                    return Err(MonitorError::NonAlternatingState {
                        index,
                        state: event.state,
                    });
                }
            }
        }
        if !(horizon_hours.is_finite() && horizon_hours > 0.0) {
            return Err(MonitorError::HorizonNotPositive {
                horizon: horizon_hours,
            });
        }
        let last = events.last().expect("nonempty").timestamp_hours;
        if horizon_hours < last {
            return Err(MonitorError::HorizonBeforeLastEvent {
                horizon: horizon_hours,
                last,
            });
        }
        Ok(OperationalProfile {
            service_name: service_name.into(),
            events,
            horizon_hours,
        })
    }

    pub fn service_name(&self) -> &str {
        &self.service_name
    }

    pub fn events(&self) -> &[ProfileEvent] {
        &self.events
    }

    pub fn horizon_hours(&self) -> f64 {
        self.horizon_hours
    }

    /// The monitoring indicator: is the service up at time `t`? The state is
    /// the one set by the most recent event at or before `t`.
    pub fn is_up_at(&self, t: f64) -> Result<bool, MonitorError> {
        if !(t >= 0.0 && t <= self.horizon_hours) {
            return Err(MonitorError::OutOfRange {
                name: "t",
                value: t,
                horizon: self.horizon_hours,
            });
        }
        let idx = self
            .events
            .partition_point(|e| e.timestamp_hours <= t)
            .saturating_sub(1);
        Ok(self.events[idx].state == ServiceState::Up)
    }

    /// Average availability over `[0, window]`: total up time divided by the
    /// window length, via exact interval arithmetic.
    pub fn average_availability(&self, window_hours: f64) -> Result<f64, MonitorError> {
        if window_hours.is_nan() || window_hours <= 0.0 {
            return Err(MonitorError::WindowNotPositive {
                value: window_hours,
            });
        }
        if window_hours > self.horizon_hours {
            return Err(MonitorError::OutOfRange {
                name: "window",
                value: window_hours,
                horizon: self.horizon_hours,
            });
        }
        Ok(self.up_hours_until(window_hours) / window_hours)
    }

    /// Total up time in `[0, cutoff]`.
    fn up_hours_until(&self, cutoff: f64) -> f64 {
        let mut up = 0.0;
        for (i, event) in self.events.iter().enumerate() {
            let seg_start = event.timestamp_hours;
            if seg_start >= cutoff {
                break;
            }
            let seg_end = self
                .events
                .get(i + 1)
                .map(|next| next.timestamp_hours)
                .unwrap_or(self.horizon_hours)
                .min(cutoff);
            if event.state == ServiceState::Up {
                up += seg_end - seg_start;
            }
        }
        up
    }

    /// Estimate of the limiting (steady-state) availability together with a
    /// window-doubling series for inspecting convergence.
    ///
    /// The true limit cannot be computed from a finite log; the series makes
    /// non-convergence visible instead. Windows are geometrically spaced at
    /// `horizon / 2^k` down to the first event gap and reported in ascending
    /// order; the estimate is the average over the full horizon.
    pub fn limiting_availability(&self) -> LimitingAvailability {
        let floor = self
            .events
            .get(1)
            .map(|e| e.timestamp_hours)
            .unwrap_or(self.horizon_hours / 1024.0);
        let mut windows = Vec::new();
        let mut window = self.horizon_hours;
        while window >= floor && window > 0.0 {
            let average = self
                .average_availability(window)
                .expect("window within (0, horizon]");
            windows.push(WindowAverage {
                window_hours: window,
                average,
            });
            window /= 2.0;
        }
        if windows.is_empty() {
            // First gap wider than half the horizon: report the full window.
            windows.push(WindowAverage {
                window_hours: self.horizon_hours,
                average: self
                    .average_availability(self.horizon_hours)
                    .expect("horizon is positive"),
            });
        }
        windows.reverse();
        LimitingAvailability {
            estimate: windows.last().expect("nonempty").average,
            windows,
        }
    }
}

/// Average availability over one window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowAverage {
    pub window_hours: f64,
    pub average: f64,
}

/// Steady-state availability estimate with its convergence series.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitingAvailability {
    /// Average availability over the full horizon.
    pub estimate: f64,
    /// Window averages in ascending window order; the last entry is the
    /// full-horizon estimate.
    pub windows: Vec<WindowAverage>,
}
