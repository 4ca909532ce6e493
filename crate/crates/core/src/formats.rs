//! On-disk document formats.
//!
//! Three file kinds exist, documented in `docs/formats.md` with the bundled
//! fixtures as normative examples:
//!
//! * model documents — JSON carrying a [`ReliabilityFsm`],
//! * composition documents — JSON carrying one or more [`CompositionSet`]s,
//! * operational profiles — flat CSV event logs, because logs are appended
//!   by external tools.
//!
//! Parsing is strict by default: unknown fields are rejected with a named
//! rule; the lenient option downgrades them to warnings. Every error carries
//! a location (a JSON path or a row number) and the rule that was broken.
//! Serialization is canonical (sorted keys, full-precision numerals), so
//! `parse(serialize(d))` reproduces `d` exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::availability::ServiceProfile;
use crate::composition::CompositionSet;
use crate::fsm::{Edge, NodeId, ReliabilityFsm, Target, Violation};
use crate::monitor::{OperationalProfile, ProfileEvent, ServiceState};

/// The only recognized document format version.
pub const FORMAT_VERSION: &str = "1";

/// CSV header of operational profile files.
pub const PROFILE_HEADER: &str = "timestamp_hours,state";

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Downgrade unknown fields from errors to warnings.
    pub lenient: bool,
}

/// A non-fatal observation from a lenient parse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseWarning {
    pub location: String,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "warning at {}: {}", self.location, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {location} [{rule}]: {message}")]
    Schema {
        location: String,
        rule: &'static str,
        message: String,
    },
    #[error("model failed validation with {} violation(s)", .0.len())]
    Validation(Vec<Violation>),
}

/// A successfully parsed document plus any lenient-mode warnings.
#[derive(Clone, Debug, PartialEq)]
pub struct Parsed<T> {
    pub document: T,
    pub warnings: Vec<ParseWarning>,
}

/// A model file: format version, free-form metadata, and the model itself.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelDocument {
    pub format_version: String,
    pub metadata: BTreeMap<String, String>,
    pub model: ReliabilityFsm,
}

/// A composition file: one or more named composition sets.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositionDocument {
    pub format_version: String,
    pub metadata: BTreeMap<String, String>,
    pub sets: Vec<CompositionSet>,
}

fn schema(
    location: impl Into<String>,
    rule: &'static str,
    message: impl Into<String>,
) -> ParseError {
    ParseError::Schema {
        location: location.into(),
        rule,
        message: message.into(),
    }
}

fn syntax(error: serde_json::Error) -> ParseError {
    ParseError::Syntax {
        line: error.line(),
        column: error.column(),
        message: error.to_string(),
    }
}

fn as_object<'v>(value: &'v Value, location: &str) -> Result<&'v Map<String, Value>, ParseError> {
    value
        .as_object()
        .ok_or_else(|| schema(location, "type", "expected an object"))
}

fn as_array<'v>(value: &'v Value, location: &str) -> Result<&'v Vec<Value>, ParseError> {
    value
        .as_array()
        .ok_or_else(|| schema(location, "type", "expected an array"))
}

fn as_str<'v>(value: &'v Value, location: &str) -> Result<&'v str, ParseError> {
    value
        .as_str()
        .ok_or_else(|| schema(location, "type", "expected a string"))
}

fn as_f64(value: &Value, location: &str) -> Result<f64, ParseError> {
    value
        .as_f64()
        .ok_or_else(|| schema(location, "type", "expected a number"))
}

fn get<'v>(
    object: &'v Map<String, Value>,
    key: &'static str,
    location: &str,
) -> Result<&'v Value, ParseError> {
    object
        .get(key)
        .ok_or_else(|| schema(location, "missing-field", format!("field \"{key}\" is required")))
}

struct Scanner<'o> {
    options: &'o ParseOptions,
    warnings: Vec<ParseWarning>,
}

impl<'o> Scanner<'o> {
    fn new(options: &'o ParseOptions) -> Self {
        Scanner {
            options,
            warnings: Vec::new(),
        }
    }

    fn check_keys(
        &mut self,
        object: &Map<String, Value>,
        allowed: &[&str],
        location: &str,
    ) -> Result<(), ParseError> {
        for key in object.keys() {
            if !allowed.contains(&key.as_str()) {
                if self.options.lenient {
                    self.warnings.push(ParseWarning {
                        location: location.to_string(),
                        message: format!("ignoring unknown field \"{key}\""),
                    });
                } else {
                    return Err(schema(
                        location,
                        "unknown-field",
                        format!("unrecognized field \"{key}\""),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn parse_version(root: &Map<String, Value>) -> Result<String, ParseError> {
    let version = as_str(get(root, "formatVersion", "$")?, "formatVersion")?;
    if version != FORMAT_VERSION {
        return Err(schema(
            "formatVersion",
            "format-version",
            format!("unsupported version \"{version}\"; this toolkit reads \"{FORMAT_VERSION}\""),
        ));
    }
    Ok(version.to_string())
}

fn parse_metadata(root: &Map<String, Value>) -> Result<BTreeMap<String, String>, ParseError> {
    let Some(value) = root.get("metadata") else {
        return Ok(BTreeMap::new());
    };
    let object = as_object(value, "metadata")?;
    let mut metadata = BTreeMap::new();
    for (key, entry) in object {
        let location = format!("metadata.{key}");
        metadata.insert(key.clone(), as_str(entry, &location)?.to_string());
    }
    Ok(metadata)
}

/// Parses a model document. The embedded model must pass
/// [`ReliabilityFsm::validate`]; a document whose model breaks a structural
/// rule is rejected with the full violation list.
pub fn parse_model(text: &str, options: &ParseOptions) -> Result<Parsed<ModelDocument>, ParseError> {
    let root: Value = serde_json::from_str(text).map_err(syntax)?;
    let mut scanner = Scanner::new(options);
    let root = as_object(&root, "$")?;
    scanner.check_keys(root, &["formatVersion", "metadata", "model"], "$")?;

    let format_version = parse_version(root)?;
    let metadata = parse_metadata(root)?;

    let model_object = as_object(get(root, "model", "$")?, "model")?;
    scanner.check_keys(model_object, &["start", "nodes", "edges"], "model")?;

    let mut nodes = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, value) in as_array(get(model_object, "nodes", "model")?, "model.nodes")?
        .iter()
        .enumerate()
    {
        let location = format!("model.nodes[{i}]");
        let label = as_str(value, &location)?;
        let id = NodeId::new(label).map_err(|e| schema(&location, "node-label", e.to_string()))?;
        if !seen.insert(id.clone()) {
            return Err(schema(
                &location,
                "duplicate-node",
                format!("node \"{label}\" is declared twice"),
            ));
        }
        nodes.push(id);
    }

    let start_label = as_str(get(model_object, "start", "model")?, "model.start")?;
    let start =
        NodeId::new(start_label).map_err(|e| schema("model.start", "node-label", e.to_string()))?;

    let mut edges = Vec::new();
    for (i, value) in as_array(get(model_object, "edges", "model")?, "model.edges")?
        .iter()
        .enumerate()
    {
        let location = format!("model.edges[{i}]");
        let object = as_object(value, &location)?;
        scanner.check_keys(object, &["from", "to", "probability"], &location)?;

        let from_label = as_str(get(object, "from", &location)?, &format!("{location}.from"))?;
        let from = NodeId::new(from_label).map_err(|e| {
            schema(
                format!("{location}.from"),
                "edge-from-absorbing",
                format!("edges may not originate from an absorbing state: {e}"),
            )
        })?;
        let to_label = as_str(get(object, "to", &location)?, &format!("{location}.to"))?;
        let to = Target::from_label(to_label)
            .map_err(|e| schema(format!("{location}.to"), "node-label", e.to_string()))?;
        let probability = as_f64(
            get(object, "probability", &location)?,
            &format!("{location}.probability"),
        )?;
        if !probability.is_finite() || !(0.0..=1.0).contains(&probability) {
            return Err(schema(
                format!("{location}.probability"),
                "probability-range",
                format!("edge {from} -> {to} has probability {probability} outside [0, 1]"),
            ));
        }
        edges.push(Edge {
            from,
            to,
            probability,
        });
    }

    let model = ReliabilityFsm::new(start, nodes, edges);
    let violations = model.validate();
    if !violations.is_empty() {
        return Err(ParseError::Validation(violations));
    }

    Ok(Parsed {
        document: ModelDocument {
            format_version,
            metadata,
            model,
        },
        warnings: scanner.warnings,
    })
}

/// Serializes a model document canonically: sorted keys, sorted node list,
/// edges in declaration order, full-precision numerals.
pub fn serialize_model(document: &ModelDocument) -> String {
    let mut root = Map::new();
    root.insert(
        "formatVersion".to_string(),
        Value::String(document.format_version.clone()),
    );
    if !document.metadata.is_empty() {
        root.insert("metadata".to_string(), metadata_value(&document.metadata));
    }

    let mut model = Map::new();
    model.insert(
        "start".to_string(),
        Value::String(document.model.start().as_str().to_string()),
    );
    model.insert(
        "nodes".to_string(),
        Value::Array(
            document
                .model
                .nodes()
                .map(|n| Value::String(n.as_str().to_string()))
                .collect(),
        ),
    );
    model.insert(
        "edges".to_string(),
        Value::Array(
            document
                .model
                .edges()
                .iter()
                .map(|edge| {
                    let mut e = Map::new();
                    e.insert(
                        "from".to_string(),
                        Value::String(edge.from.as_str().to_string()),
                    );
                    e.insert("to".to_string(), Value::String(edge.to.label().to_string()));
                    e.insert("probability".to_string(), number(edge.probability));
                    Value::Object(e)
                })
                .collect(),
        ),
    );
    root.insert("model".to_string(), Value::Object(model));
    render_json(Value::Object(root))
}

/// Parses a composition document: one or more named sets of services with
/// MTBF/MTTR figures in hours.
pub fn parse_compositions(
    text: &str,
    options: &ParseOptions,
) -> Result<Parsed<CompositionDocument>, ParseError> {
    let root: Value = serde_json::from_str(text).map_err(syntax)?;
    let mut scanner = Scanner::new(options);
    let root = as_object(&root, "$")?;
    scanner.check_keys(root, &["formatVersion", "metadata", "compositions"], "$")?;

    let format_version = parse_version(root)?;
    let metadata = parse_metadata(root)?;

    let set_values = as_array(get(root, "compositions", "$")?, "compositions")?;
    if set_values.is_empty() {
        return Err(schema(
            "compositions",
            "empty-document",
            "at least one composition set is required",
        ));
    }

    let mut sets = Vec::new();
    for (i, value) in set_values.iter().enumerate() {
        let set_location = format!("compositions[{i}]");
        let object = as_object(value, &set_location)?;
        scanner.check_keys(object, &["name", "services"], &set_location)?;
        let set_name = as_str(get(object, "name", &set_location)?, &format!("{set_location}.name"))?;

        let service_values = as_array(
            get(object, "services", &set_location)?,
            &format!("{set_location}.services"),
        )?;
        if service_values.is_empty() {
            return Err(schema(
                format!("{set_location}.services"),
                "empty-composition",
                format!("composition \"{set_name}\" declares no services"),
            ));
        }

        let mut services = Vec::new();
        for (j, service_value) in service_values.iter().enumerate() {
            let location = format!("{set_location}.services[{j}]");
            let service = as_object(service_value, &location)?;
            scanner.check_keys(service, &["name", "mtbfHours", "mttrHours"], &location)?;
            let name = as_str(get(service, "name", &location)?, &format!("{location}.name"))?;
            let mtbf = as_f64(
                get(service, "mtbfHours", &location)?,
                &format!("{location}.mtbfHours"),
            )?;
            let mttr = as_f64(
                get(service, "mttrHours", &location)?,
                &format!("{location}.mttrHours"),
            )?;
            services.push(
                ServiceProfile::new(name, mtbf, mttr)
                    .map_err(|e| schema(&location, "service-figures", e.to_string()))?,
            );
        }

        sets.push(
            CompositionSet::new(set_name, services)
                .map_err(|e| schema(&set_location, "duplicate-service", e.to_string()))?,
        );
    }

    Ok(Parsed {
        document: CompositionDocument {
            format_version,
            metadata,
            sets,
        },
        warnings: scanner.warnings,
    })
}

/// Serializes a composition document canonically.
pub fn serialize_compositions(document: &CompositionDocument) -> String {
    let mut root = Map::new();
    root.insert(
        "formatVersion".to_string(),
        Value::String(document.format_version.clone()),
    );
    if !document.metadata.is_empty() {
        root.insert("metadata".to_string(), metadata_value(&document.metadata));
    }
    root.insert(
        "compositions".to_string(),
        Value::Array(
            document
                .sets
                .iter()
                .map(|set| {
                    let mut s = Map::new();
                    s.insert("name".to_string(), Value::String(set.name().to_string()));
                    s.insert(
                        "services".to_string(),
                        Value::Array(
                            set.services()
                                .iter()
                                .map(|service| {
                                    let mut v = Map::new();
                                    v.insert(
                                        "name".to_string(),
                                        Value::String(service.name().to_string()),
                                    );
                                    v.insert("mtbfHours".to_string(), number(service.mtbf_hours()));
                                    v.insert("mttrHours".to_string(), number(service.mttr_hours()));
                                    Value::Object(v)
                                })
                                .collect(),
                        ),
                    );
                    Value::Object(s)
                })
                .collect(),
        ),
    );
    render_json(Value::Object(root))
}

/// Parses an operational profile from CSV text.
///
/// The first line must be the `timestamp_hours,state` header; data rows hold
/// an hour timestamp and `up`/`down` (case-insensitive). Comment lines of the
/// form `# horizon=<hours>` and `# service=<name>` carry the horizon and the
/// service name; `horizon_override`, when given, wins over the comment.
/// Row numbers in errors count data rows, excluding header and comments.
pub fn parse_operational_profile(
    text: &str,
    horizon_override: Option<f64>,
) -> Result<OperationalProfile, ParseError> {
    let mut lines = text.lines();
    let header = lines.next().map(str::trim_end).unwrap_or("");
    if header.trim() != PROFILE_HEADER {
        return Err(schema(
            "line 1",
            "header",
            format!("expected header \"{PROFILE_HEADER}\""),
        ));
    }

    let mut events: Vec<ProfileEvent> = Vec::new();
    let mut horizon_comment: Option<f64> = None;
    let mut service_name: Option<String> = None;
    let mut row = 0usize;

    for (line_index, raw) in lines.enumerate() {
        let line_number = line_index + 2;
        if let Some(comment) = raw.trim_start().strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "horizon" => {
                        let parsed: f64 = value.trim().parse().map_err(|_| {
                            schema(
                                format!("line {line_number}"),
                                "horizon-number",
                                format!("cannot read \"{}\" as hours", value.trim()),
                            )
                        })?;
                        horizon_comment = Some(parsed);
                    }
                    // The name is taken verbatim after `=` so that any name
                    // a serializer wrote comes back unchanged.
                    "service" => service_name = Some(value.to_string()),
                    // Unknown comment keys come from external annotators.
                    _ => {}
                }
            }
            continue;
        }
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }

        row += 1;
        let location = format!("row {row}");
        let Some((timestamp_text, state_text)) = line.split_once(',') else {
            return Err(schema(
                &location,
                "row-shape",
                "expected \"<timestamp_hours>,<state>\"",
            ));
        };
        let timestamp: f64 = timestamp_text.trim().parse().map_err(|_| {
            schema(
                &location,
                "timestamp-number",
                format!("cannot read \"{}\" as hours", timestamp_text.trim()),
            )
        })?;
        if !timestamp.is_finite() {
            return Err(schema(&location, "timestamp-number", "timestamp must be finite"));
        }
        let state = match state_text.trim().to_ascii_lowercase().as_str() {
            "up" => ServiceState::Up,
            "down" => ServiceState::Down,
            other => {
                return Err(schema(
                    &location,
                    "state-label",
                    format!("expected \"up\" or \"down\", found \"{other}\""),
                ));
            }
        };

        if let Some(previous) = events.last() {
            if timestamp <= previous.timestamp_hours {
                return Err(schema(
                    &location,
                    "timestamp-order",
                    format!(
                        "timestamps must be strictly increasing; {timestamp} follows {}",
                        previous.timestamp_hours
                    ),
                ));
            }
            if state == previous.state {
                return Err(schema(
                    &location,
                    "alternation",
                    format!("consecutive events repeat state \"{}\"", state.label()),
                ));
            }
        } else if timestamp != 0.0 {
            return Err(schema(
                &location,
                "initial-state",
                "the first event must declare the state at t = 0",
            ));
        }
        events.push(ProfileEvent {
            timestamp_hours: timestamp,
            state,
        });
    }

    if events.is_empty() {
        return Err(schema(
            "end of input",
            "initial-state",
            "profile has no events; an initial state at t = 0 is required",
        ));
    }
    let horizon = horizon_override.or(horizon_comment).ok_or_else(|| {
        schema(
            "end of input",
            "missing-horizon",
            "horizon not given; supply a `# horizon=<hours>` comment or the --horizon flag",
        )
    })?;

    OperationalProfile::new(
        service_name.unwrap_or_else(|| "service".to_string()),
        events,
        horizon,
    )
    .map_err(|e| schema("horizon", "horizon-range", e.to_string()))
}

/// Serializes a profile to CSV with trailing `service` and `horizon`
/// comments, so a round trip reproduces the profile exactly.
pub fn serialize_operational_profile(profile: &OperationalProfile) -> String {
    let mut out = String::with_capacity(16 * profile.events().len() + 64);
    out.push_str(PROFILE_HEADER);
    out.push('\n');
    for event in profile.events() {
        out.push_str(&format!(
            "{},{}\n",
            event.timestamp_hours,
            event.state.label()
        ));
    }
    out.push_str(&format!("# service={}\n", profile.service_name()));
    out.push_str(&format!("# horizon={}\n", profile.horizon_hours()));
    out
}

fn metadata_value(metadata: &BTreeMap<String, String>) -> Value {
    Value::Object(
        metadata
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect(),
    )
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .expect("document numerals are finite")
}

fn render_json(value: Value) -> String {
    let mut rendered = serde_json::to_string_pretty(&value).expect("value serializes");
    rendered.push('\n');
    rendered
}
