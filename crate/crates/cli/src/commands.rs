//! Command implementations and the exit-code discipline.
//!
//! 0 success; 1 model-validation failure; 2 I/O or parse failure; 3 solver
//! failure; 4 usage or domain failure. Reports go to stdout, diagnostics to
//! stderr, and identical invocations produce byte-identical stdout.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use wsrel_core::absorption::{solve_absorption, solve_absorption_iterative};
use wsrel_core::composition::evaluate_composition_with_profiles;
use wsrel_core::formats::{
    parse_compositions, parse_model, parse_operational_profile, serialize_operational_profile,
    ModelDocument, ParseError, ParseOptions,
};
use wsrel_core::monitor::OperationalProfile;
use wsrel_core::sim::{ensemble_availability, simulate_renewal, walk_absorption, SimConfig};
use wsrel_core::{
    availability_from_downtime, failure_intensity_from_availability, intensity_from_reliability,
    reliability_from_intensity, ServiceProfile,
};

use crate::args::{AvailArgs, Cli, Command, SimulateCommand};
use crate::report::{
    to_json, AvailReport, ComposeReport, CompositionSetReport, EnsembleReport, MonitorAtReport,
    MonitorLimitsReport, MonitorWindowReport, NodeProbabilities, ServiceReport, SolveReport,
    WalkReport, WindowReport,
};
use crate::{Failure, EXIT_INPUT, EXIT_SOLVER, EXIT_USAGE, EXIT_VALIDATION};

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: Some(message.into()),
        }
    }

    fn solver(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_SOLVER,
            message: Some(message.into()),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: Some(message.into()),
        }
    }

    fn validation() -> Self {
        Failure {
            code: EXIT_VALIDATION,
            message: None,
        }
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { model, lenient } => cmd_validate(&model, lenient),
        Command::Solve {
            model,
            iterative,
            tol,
            max_iter,
            json,
            lenient,
        } => cmd_solve(&model, iterative, tol, max_iter, json, lenient),
        Command::Avail(args) => cmd_avail(&args),
        Command::Compose {
            set,
            paper_precision,
            json,
            lenient,
            profiles,
        } => cmd_compose(&set, paper_precision, json, lenient, &profiles),
        Command::Monitor {
            profile,
            horizon,
            at,
            window,
            limits,
            json,
        } => cmd_monitor(&profile, horizon, at, window, limits, json),
        Command::Simulate { simulation } => match simulation {
            SimulateCommand::Walk {
                model,
                trials,
                seed,
                max_steps,
                json,
                lenient,
            } => cmd_walk(&model, trials, seed, max_steps, json, lenient),
            SimulateCommand::Renewal {
                mtbf,
                mttr,
                horizon,
                seed,
                service,
                out,
            } => cmd_renewal(mtbf, mttr, horizon, seed, &service, out.as_deref()),
            SimulateCommand::Ensemble {
                mtbf,
                mttr,
                t,
                trials,
                seed,
                json,
            } => cmd_ensemble(mtbf, mttr, t, trials, seed, json),
        },
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path, lenient: bool) -> Result<ModelDocument, Failure> {
    let text = read(path)?;
    let parsed = parse_model(&text, &ParseOptions { lenient })
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    for warning in &parsed.warnings {
        eprintln!("{warning}");
    }
    Ok(parsed.document)
}

fn cmd_validate(path: &Path, lenient: bool) -> Result<(), Failure> {
    let text = read(path)?;
    match parse_model(&text, &ParseOptions { lenient }) {
        Ok(parsed) => {
            for warning in &parsed.warnings {
                eprintln!("{warning}");
            }
            println!("OK");
            Ok(())
        }
        Err(ParseError::Validation(violations)) => {
            let mut out = String::new();
            for violation in &violations {
                out.push_str(&format!("{violation}\n"));
            }
            print!("{out}");
            Err(Failure::validation())
        }
        Err(other) => Err(Failure::input(format!("{}: {other}", path.display()))),
    }
}

fn cmd_solve(
    path: &Path,
    iterative: bool,
    tol: f64,
    max_iter: u64,
    json: bool,
    lenient: bool,
) -> Result<(), Failure> {
    let document = load_model(path, lenient)?;
    let result = if iterative {
        solve_absorption_iterative(&document.model, max_iter, tol)
    } else {
        solve_absorption(&document.model)
    }
    .map_err(|e| Failure::solver(e.to_string()))?;

    let report = SolveReport {
        reliability: result.reliability(),
        fault_probability: result.fault_probability(),
        is_reliable: result.is_reliable(),
        method: if iterative { "iterative" } else { "direct" }.to_string(),
        per_node: result
            .per_node()
            .iter()
            .map(|(node, p)| {
                (
                    node.as_str().to_string(),
                    NodeProbabilities {
                        p_correct: p.p_correct,
                        p_fault: p.p_fault,
                    },
                )
            })
            .collect(),
    };
    print!("{}", if json { to_json(&report) } else { report.text() });
    Ok(())
}

fn cmd_avail(args: &AvailArgs) -> Result<(), Failure> {
    let report = evaluate_avail(args)?;
    print!(
        "{}",
        if args.json {
            to_json(&report)
        } else {
            report.text(args.paper_precision)
        }
    );
    Ok(())
}

/// Flag families, exactly one of which must be complete:
/// `--mtbf --mttr`, `--tm --lambda`, `--tm --availability`,
/// `--lambda --t [--reliability]`, `--r --t`.
fn evaluate_avail(args: &AvailArgs) -> Result<AvailReport, Failure> {
    let usage = || {
        Failure::usage(
            "supply exactly one flag family: --mtbf --mttr (availability), \
             --tm --lambda (availability), --tm --availability (failure intensity), \
             --lambda --t (reliability), or --r --t (failure intensity)"
                .to_string(),
        )
    };
    let domain = |e: wsrel_core::DomainError| Failure::usage(e.to_string());

    let present = (
        args.mtbf.is_some(),
        args.mttr.is_some(),
        args.tm.is_some(),
        args.lambda.is_some(),
        args.t.is_some(),
        args.r.is_some(),
        args.availability.is_some(),
    );
    match present {
        (true, true, false, false, false, false, false) if !args.reliability => {
            let profile = ServiceProfile::new("service", args.mtbf.unwrap(), args.mttr.unwrap())
                .map_err(domain)?;
            let availability = profile.availability();
            Ok(AvailReport {
                quantity: "availability".to_string(),
                value: availability,
                unavailability: Some(1.0 - availability),
            })
        }
        (false, false, true, true, false, false, false) if !args.reliability => {
            let value =
                availability_from_downtime(args.tm.unwrap(), args.lambda.unwrap()).map_err(domain)?;
            Ok(AvailReport {
                quantity: "availability".to_string(),
                value,
                unavailability: None,
            })
        }
        (false, false, true, false, false, false, true) if !args.reliability => {
            let value =
                failure_intensity_from_availability(args.tm.unwrap(), args.availability.unwrap())
                    .map_err(domain)?;
            Ok(AvailReport {
                quantity: "failure_intensity".to_string(),
                value,
                unavailability: None,
            })
        }
        (false, false, false, true, true, false, false) => {
            let value =
                reliability_from_intensity(args.lambda.unwrap(), args.t.unwrap()).map_err(domain)?;
            Ok(AvailReport {
                quantity: "reliability".to_string(),
                value,
                unavailability: None,
            })
        }
        (false, false, false, false, true, true, false) if !args.reliability => {
            let value =
                intensity_from_reliability(args.r.unwrap(), args.t.unwrap()).map_err(domain)?;
            Ok(AvailReport {
                quantity: "failure_intensity".to_string(),
                value,
                unavailability: None,
            })
        }
        _ => Err(usage()),
    }
}

fn cmd_compose(
    path: &Path,
    paper_precision: bool,
    json: bool,
    lenient: bool,
    profile_specs: &[String],
) -> Result<(), Failure> {
    let text = read(path)?;
    let parsed = parse_compositions(&text, &ParseOptions { lenient })
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    for warning in &parsed.warnings {
        eprintln!("{warning}");
    }

    let mut attached: BTreeMap<String, OperationalProfile> = BTreeMap::new();
    for spec in profile_specs {
        let Some((name, profile_path)) = spec.split_once('=') else {
            return Err(Failure::usage(format!(
                "--profile expects NAME=PATH, got \"{spec}\""
            )));
        };
        let profile_text = read(Path::new(profile_path))?;
        let profile = parse_operational_profile(&profile_text, None)
            .map_err(|e| Failure::input(format!("{profile_path}: {e}")))?;
        attached.insert(name.to_string(), profile);
    }
    let known: Vec<&str> = parsed
        .document
        .sets
        .iter()
        .flat_map(|s| s.services().iter().map(|p| p.name()))
        .collect();
    for name in attached.keys() {
        if !known.contains(&name.as_str()) {
            eprintln!("warning: profile \"{name}\" matches no service in the catalog");
        }
    }

    let report = ComposeReport {
        sets: parsed
            .document
            .sets
            .iter()
            .map(|set| {
                let evaluated = evaluate_composition_with_profiles(set, &attached);
                CompositionSetReport {
                    name: evaluated.set_name,
                    services: evaluated
                        .per_service
                        .into_iter()
                        .map(|s| ServiceReport {
                            name: s.name,
                            availability: s.availability,
                            source: s.source.label().to_string(),
                        })
                        .collect(),
                    paper_sum: evaluated.paper_sum,
                    mean: evaluated.mean,
                    series_product: evaluated.series_product,
                }
            })
            .collect(),
    };
    print!(
        "{}",
        if json {
            to_json(&report)
        } else {
            report.text(paper_precision)
        }
    );
    Ok(())
}

fn cmd_monitor(
    path: &Path,
    horizon: Option<f64>,
    at: Option<f64>,
    window: Option<f64>,
    limits: bool,
    json: bool,
) -> Result<(), Failure> {
    let text = read(path)?;
    let profile = parse_operational_profile(&text, horizon)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;

    let modes = usize::from(at.is_some()) + usize::from(window.is_some()) + usize::from(limits);
    if modes != 1 {
        return Err(Failure::usage(
            "supply exactly one of --at T, --window C, or --limits",
        ));
    }

    if let Some(t) = at {
        let up = profile
            .is_up_at(t)
            .map_err(|e| Failure::usage(e.to_string()))?;
        let report = MonitorAtReport {
            t,
            up,
            value: u8::from(up),
        };
        print!("{}", if json { to_json(&report) } else { report.text() });
    } else if let Some(window_hours) = window {
        let average = profile
            .average_availability(window_hours)
            .map_err(|e| Failure::usage(e.to_string()))?;
        let report = MonitorWindowReport {
            window_hours,
            average_availability: average,
        };
        print!("{}", if json { to_json(&report) } else { report.text() });
    } else {
        let limiting = profile.limiting_availability();
        let report = MonitorLimitsReport {
            estimate: limiting.estimate,
            windows: limiting
                .windows
                .iter()
                .map(|w| WindowReport {
                    window_hours: w.window_hours,
                    average: w.average,
                })
                .collect(),
        };
        print!("{}", if json { to_json(&report) } else { report.text() });
    }
    Ok(())
}

fn cmd_walk(
    path: &Path,
    trials: u64,
    seed: u64,
    max_steps: u64,
    json: bool,
    lenient: bool,
) -> Result<(), Failure> {
    let document = load_model(path, lenient)?;
    let estimate = walk_absorption(
        &document.model,
        &SimConfig {
            trials,
            seed,
            max_steps,
        },
    )
    .map_err(|e| Failure::usage(e.to_string()))?;
    let report = WalkReport {
        trials,
        seed,
        max_steps,
        p_correct_hat: estimate.p_correct_hat,
        standard_error: estimate.standard_error,
        censored_walks: estimate.censored_walks,
    };
    print!("{}", if json { to_json(&report) } else { report.text() });
    Ok(())
}

fn cmd_renewal(
    mtbf: f64,
    mttr: f64,
    horizon: f64,
    seed: u64,
    service: &str,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let profile = simulate_renewal(service, mtbf, mttr, horizon, seed)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let rendered = serialize_operational_profile(&profile);
    match out {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn cmd_ensemble(
    mtbf: f64,
    mttr: f64,
    t: f64,
    trials: u64,
    seed: u64,
    json: bool,
) -> Result<(), Failure> {
    let availability =
        ensemble_availability(mtbf, mttr, t, trials, seed).map_err(|e| Failure::usage(e.to_string()))?;
    let report = EnsembleReport {
        mtbf_hours: mtbf,
        mttr_hours: mttr,
        t_hours: t,
        trials,
        seed,
        availability,
    };
    print!("{}", if json { to_json(&report) } else { report.text() });
    Ok(())
}
