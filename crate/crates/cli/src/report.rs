//! Report types and their renderings.
//!
//! Every command builds one of these structs and renders it either as
//! aligned text or as pretty-printed JSON. The JSON layer is the documented
//! machine-readable schema (see `docs/formats.md`); all structs deserialize
//! back, so emitted reports round-trip.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use wsrel_core::render::{percent_fixed, percent_truncated_4dp, significant};

/// Default significant digits for text-mode numerals.
const SIG: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeProbabilities {
    pub p_correct: f64,
    pub p_fault: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub reliability: f64,
    pub fault_probability: f64,
    pub is_reliable: bool,
    pub method: String,
    pub per_node: BTreeMap<String, NodeProbabilities>,
}

impl SolveReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("reliability        {}\n", significant(self.reliability, SIG)));
        out.push_str(&format!(
            "fault_probability  {}\n",
            significant(self.fault_probability, SIG)
        ));
        out.push_str(&format!("is_reliable        {}\n", self.is_reliable));
        out.push_str(&format!("method             {}\n", self.method));
        let width = self
            .per_node
            .keys()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max("node".len());
        out.push_str(&format!("{:width$}  p_correct     p_fault\n", "node"));
        for (node, p) in &self.per_node {
            out.push_str(&format!(
                "{node:width$}  {:<12}  {}\n",
                significant(p.p_correct, SIG),
                significant(p.p_fault, SIG)
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvailReport {
    /// Which conversion ran: `availability`, `failure_intensity`, or
    /// `reliability`.
    pub quantity: String,
    pub value: f64,
    /// Complement of the availability, present for the MTBF/MTTR family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unavailability: Option<f64>,
}

impl AvailReport {
    pub fn text(&self, paper_precision: bool) -> String {
        let mut out = String::new();
        let percent = |x: f64| {
            if paper_precision {
                percent_truncated_4dp(x)
            } else {
                percent_fixed(x, 5)
            }
        };
        match self.quantity.as_str() {
            "availability" => {
                out.push_str(&format!(
                    "availability    {} ({}%)\n",
                    significant(self.value, SIG),
                    percent(self.value)
                ));
                if let Some(unavailability) = self.unavailability {
                    out.push_str(&format!(
                        "unavailability  {} ({}%)\n",
                        significant(unavailability, SIG),
                        significant(unavailability * 100.0, 5)
                    ));
                }
            }
            "reliability" => {
                out.push_str(&format!("reliability  {}\n", significant(self.value, SIG)));
            }
            _ => {
                // Units: failures per unit of the paired time argument.
                out.push_str(&format!(
                    "failure_intensity  {}\n",
                    significant(self.value, SIG)
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceReport {
    pub name: String,
    pub availability: f64,
    /// `mtbf/mttr` or `operational-profile`.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionSetReport {
    pub name: String,
    pub services: Vec<ServiceReport>,
    /// Plain sum of per-service availabilities; may exceed 1.
    pub paper_sum: f64,
    /// `paper_sum / n`.
    pub mean: f64,
    /// Product of per-service availabilities (series-system reading).
    pub series_product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposeReport {
    pub sets: Vec<CompositionSetReport>,
}

impl ComposeReport {
    pub fn text(&self, paper_precision: bool) -> String {
        let mut out = String::new();
        for (i, set) in self.sets.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!(
                "composition  {}  ({} services)\n",
                set.name,
                set.services.len()
            ));
            let width = set
                .services
                .iter()
                .map(|s| s.name.len())
                .max()
                .unwrap_or(0)
                .max("service".len());
            out.push_str(&format!("{:width$}  availability  source\n", "service"));
            for service in &set.services {
                let availability = if paper_precision {
                    percent_truncated_4dp(service.availability)
                } else {
                    significant(service.availability, SIG)
                };
                out.push_str(&format!(
                    "{:width$}  {availability:<12}  {}\n",
                    service.name, service.source
                ));
            }
            out.push_str(&format!(
                "paper_sum       {}  (plain sum of per-service availability; may exceed 1)\n",
                significant(set.paper_sum, SIG)
            ));
            out.push_str(&format!(
                "mean            {}  (paper_sum / n)\n",
                significant(set.mean, SIG)
            ));
            out.push_str(&format!(
                "series_product  {}  (product; series-system availability)\n",
                significant(set.series_product, SIG)
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorAtReport {
    pub t: f64,
    pub up: bool,
    /// The indicator as 0/1.
    pub value: u8,
}

impl MonitorAtReport {
    pub fn text(&self) -> String {
        format!("{}\n", self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorWindowReport {
    pub window_hours: f64,
    pub average_availability: f64,
}

impl MonitorWindowReport {
    pub fn text(&self) -> String {
        format!(
            "average_availability  {}\n",
            significant(self.average_availability, SIG)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub window_hours: f64,
    pub average: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorLimitsReport {
    pub estimate: f64,
    /// Ascending window sizes; the last row is the full-horizon estimate.
    pub windows: Vec<WindowReport>,
}

impl MonitorLimitsReport {
    pub fn text(&self) -> String {
        let mut out = String::from("window_hours  average\n");
        for window in &self.windows {
            out.push_str(&format!(
                "{:<12}  {}\n",
                significant(window.window_hours, SIG),
                significant(window.average, SIG)
            ));
        }
        out.push_str(&format!("estimate      {}\n", significant(self.estimate, SIG)));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkReport {
    pub trials: u64,
    pub seed: u64,
    pub max_steps: u64,
    pub p_correct_hat: f64,
    pub standard_error: f64,
    pub censored_walks: u64,
}

impl WalkReport {
    pub fn text(&self) -> String {
        format!(
            "p_correct_hat   {}\nstandard_error  {}\ncensored_walks  {}\ntrials          {}\n",
            significant(self.p_correct_hat, SIG),
            significant(self.standard_error, SIG),
            self.censored_walks,
            self.trials
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub mtbf_hours: f64,
    pub mttr_hours: f64,
    pub t_hours: f64,
    pub trials: u64,
    pub seed: u64,
    pub availability: f64,
}

impl EnsembleReport {
    pub fn text(&self) -> String {
        format!("availability  {}\n", significant(self.availability, SIG))
    }
}

/// Pretty JSON with a trailing newline; the canonical machine rendering.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut rendered = serde_json::to_string_pretty(report).expect("reports serialize");
    rendered.push('\n');
    rendered
}
