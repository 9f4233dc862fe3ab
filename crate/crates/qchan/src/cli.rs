//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage, parse or I/O errors, 2 when the
//! mathematics says no — an infeasible channel or a singular transfer
//! matrix. State arguments accept an inline ket expression, `preset:NAME`
//! or `file:PATH` (a UTF-8 file holding one expression, `#` comments
//! allowed). Measurements are `bell:i,j`, `state:<expression>` or
//! `preset:NAME`.

use clap::{Parser, Subcommand};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::ket::{format_ket_expression, KetExpression};
use crate::presets;
use crate::rank::{classify, Tolerances};
use crate::report;
use crate::state::{random_state_stream, PureState};
use crate::teleport::{
    bob_transform, simulate_teleportation, teleportable, transfer_matrix, AliceAssignment,
    Measurement, TeleportError,
};
use crate::unfolding::{channel_matrix, single_unfolding, Pairing, QubitLabel};

#[derive(Parser)]
#[command(
    name = "qchan",
    version,
    about = "Channel-matrix analysis and two-qubit teleportation for four-qubit states",
    after_help = "State arguments take an inline ket expression like \
                  \"1/sqrt(2)(|0000> + |1111>)\", preset:NAME, or file:PATH. \
                  Run `qchan analyze preset:ghz` to get started; presets: \
                  ghz, w, bellpairs, cluster, eq19, eq23, sep, nonbell."
)]
struct Cli {
    /// Emit one JSON document instead of tables
    #[arg(long, global = true)]
    json: bool,
    /// Relative singular-value threshold for rank decisions
    #[arg(long, global = true, default_value_t = 1e-9, value_name = "REL")]
    rel_tol: f64,
    /// Absolute singular-value floor for rank decisions
    #[arg(long, global = true, default_value_t = 1e-12, value_name = "ABS")]
    abs_tol: f64,
    /// Digits after the decimal point for printed coefficients
    #[arg(long, global = true, default_value_t = 6, value_name = "DIGITS")]
    precision: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a state expression and echo its canonical form
    Parse {
        /// Ket expression, preset:NAME or file:PATH
        #[arg(allow_hyphen_values = true)]
        state: String,
        /// Accept non-normalized input and rescale it (with a warning)
        #[arg(long)]
        normalize: bool,
    },
    /// Print all seven unfolding matrices, their ranks and the classification
    Analyze {
        #[arg(allow_hyphen_values = true)]
        state: String,
    },
    /// Print the rank table and entanglement class
    Classify {
        #[arg(allow_hyphen_values = true)]
        state: String,
    },
    /// Decide whether a channel can teleport for Alice's wiring (exit 2 if not)
    #[command(name = "teleport-check")]
    TeleportCheck {
        #[arg(allow_hyphen_values = true)]
        channel: String,
        /// Alice's channel wires: 34, 35 or 36
        #[arg(long)]
        alice: String,
    },
    /// Compute Bob's recovery matrix sigma_B for a channel and measurement
    Sigma {
        #[arg(allow_hyphen_values = true)]
        channel: String,
        /// Alice's channel wires: 34, 35 or 36
        #[arg(long)]
        alice: String,
        /// bell:i,j | state:<expression> | preset:NAME
        #[arg(long)]
        measurement: String,
    },
    /// Run the teleportation protocol end to end
    Simulate {
        #[arg(allow_hyphen_values = true)]
        channel: String,
        /// Alice's channel wires: 34, 35 or 36
        #[arg(long)]
        alice: String,
        /// bell:i,j | state:<expression> | preset:NAME
        #[arg(long)]
        measurement: String,
        /// Two-qubit input state; omitted or "random" draws per trial
        #[arg(long)]
        input: Option<String>,
        /// Number of protocol runs
        #[arg(long, default_value_t = 1)]
        trials: u32,
        /// Seed for per-trial random inputs
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    }
}

fn execute(cli: Cli) -> Result<i32, String> {
    let tol = Tolerances::new(cli.rel_tol, cli.abs_tol).map_err(|e| e.to_string())?;
    let json = cli.json;
    let precision = cli.precision;
    match cli.command {
        Command::Parse { state, normalize } => cmd_parse(&state, normalize, json, precision, &tol),
        Command::Analyze { state } => cmd_analyze(&state, json, precision, &tol),
        Command::Classify { state } => cmd_classify(&state, json, precision, &tol),
        Command::TeleportCheck { channel, alice } => {
            cmd_teleport_check(&channel, &alice, json, &tol)
        }
        Command::Sigma {
            channel,
            alice,
            measurement,
        } => cmd_sigma(&channel, &alice, &measurement, json, precision, &tol),
        Command::Simulate {
            channel,
            alice,
            measurement,
            input,
            trials,
            seed,
        } => cmd_simulate(
            &channel,
            &alice,
            &measurement,
            input.as_deref(),
            trials,
            seed,
            json,
            &tol,
        ),
    }
}

/// Resolve a state argument: `preset:NAME`, `file:PATH` or an inline
/// expression. Returns the state plus the expression text it came from.
fn resolve_state(spec: &str, normalize: bool) -> Result<(PureState, String), String> {
    let text = if let Some(name) = spec.strip_prefix("preset:") {
        let preset = presets::find(name).ok_or_else(|| {
            format!(
                "unknown preset '{name}'; available: {}",
                presets::PRESETS
                    .iter()
                    .map(|p| p.name)
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        })?;
        preset.expression.to_string()
    } else if let Some(path) = spec.strip_prefix("file:") {
        let raw = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
        strip_comments(&raw)
    } else {
        spec.to_string()
    };

    let expr = KetExpression::parse(&text).map_err(|e| e.to_string())?;
    let state = if normalize {
        let norm_sqr = expr.norm_sqr();
        let state = expr.to_state_normalized().map_err(|e| e.to_string())?;
        if (norm_sqr - 1.0).abs() > crate::ket::PARSE_NORM_TOL {
            eprintln!("warning: input norm-squared was {norm_sqr}; amplitudes have been rescaled");
        }
        state
    } else {
        expr.to_state().map_err(|e| e.to_string())?
    };
    Ok((state, text))
}

fn strip_comments(raw: &str) -> String {
    raw.lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join(" ")
        .trim()
        .to_string()
}

fn resolve_assignment(alice: &str) -> Result<AliceAssignment, String> {
    AliceAssignment::from_wires(alice)
        .ok_or_else(|| format!("invalid --alice '{alice}': expected 34, 35 or 36"))
}

fn resolve_measurement(spec: &str) -> Result<Measurement, String> {
    if let Some(indices) = spec.strip_prefix("bell:") {
        let (i, j) = indices
            .split_once(',')
            .ok_or_else(|| format!("invalid measurement '{spec}': expected bell:i,j"))?;
        let i: usize = i
            .trim()
            .parse()
            .map_err(|_| format!("invalid Bell index '{i}'"))?;
        let j: usize = j
            .trim()
            .parse()
            .map_err(|_| format!("invalid Bell index '{j}'"))?;
        Measurement::bell_product(i, j).map_err(|e| e.to_string())
    } else if let Some(expression) = spec.strip_prefix("state:") {
        let (state, _) = resolve_state(expression, false)?;
        Measurement::from_state(&state).map_err(|e| e.to_string())
    } else if let Some(name) = spec.strip_prefix("preset:") {
        let (state, _) = resolve_state(&format!("preset:{name}"), false)?;
        Measurement::from_state(&state).map_err(|e| e.to_string())
    } else {
        Err(format!(
            "invalid measurement '{spec}': expected bell:i,j, state:<expression> or preset:NAME"
        ))
    }
}

fn cmd_parse(
    spec: &str,
    normalize: bool,
    json: bool,
    precision: usize,
    tol: &Tolerances,
) -> Result<i32, String> {
    let (state, text) = resolve_state(spec, normalize)?;
    let canonical = format_ket_expression(&state, precision.max(10));
    if json {
        let result = json!({
            "expression": text,
            "canonical": canonical,
            "num_qubits": state.num_qubits(),
            "amplitudes": report::amplitudes_value(&state),
        });
        print!(
            "{}",
            report::to_output(&report::document("parse", tol, None, result))
        );
    } else {
        println!("qubits: {}", state.num_qubits());
        println!("state:  {canonical}");
    }
    Ok(0)
}

fn cmd_analyze(spec: &str, json: bool, precision: usize, tol: &Tolerances) -> Result<i32, String> {
    let (state, text) = resolve_state(spec, false)?;
    let classification = classify(&state, tol).map_err(|e| e.to_string())?;

    let singles: Vec<_> = QubitLabel::ALL
        .iter()
        .map(|&label| single_unfolding(&state, label).expect("state is four qubits"))
        .collect();
    let channels: Vec<_> = Pairing::ALL
        .iter()
        .map(|&pairing| channel_matrix(&state, pairing).expect("state is four qubits"))
        .collect();

    if json {
        let mut single_map = serde_json::Map::new();
        for unfolding in &singles {
            single_map.insert(
                unfolding.label().to_string(),
                json!({
                    "matrix": report::matrix_value(unfolding.entries()),
                    "rank": classification.single_rank(unfolding.label()),
                }),
            );
        }
        let mut channel_map = serde_json::Map::new();
        for cm in &channels {
            channel_map.insert(
                cm.pairing().to_string(),
                json!({
                    "matrix": report::matrix_value(cm.entries()),
                    "rank": classification.pair_rank(cm.pairing()),
                    "complement": cm.pairing().complement_name(),
                }),
            );
        }
        let result = json!({
            "input": text,
            "single_unfoldings": Value::Object(single_map),
            "channel_matrices": Value::Object(channel_map),
            "classification": report::classification_value(&classification, precision),
        });
        print!(
            "{}",
            report::to_output(&report::document("analyze", tol, None, result))
        );
        return Ok(0);
    }

    println!("state: {text}");
    println!();
    println!("single unfoldings (2x8):");
    for unfolding in &singles {
        println!(
            "C_{}: rank {}",
            unfolding.label(),
            classification.single_rank(unfolding.label())
        );
        print_matrix(unfolding.entries(), precision);
    }
    println!("channel matrices (4x4):");
    for cm in &channels {
        println!(
            "C_{} (complement {}): rank {}",
            cm.pairing(),
            cm.pairing().complement_name(),
            classification.pair_rank(cm.pairing())
        );
        print_matrix(cm.entries(), precision);
    }
    print_classification_text(&classification, precision);
    Ok(0)
}

fn cmd_classify(spec: &str, json: bool, precision: usize, tol: &Tolerances) -> Result<i32, String> {
    let (state, _) = resolve_state(spec, false)?;
    let classification = classify(&state, tol).map_err(|e| e.to_string())?;
    if json {
        let result = report::classification_value(&classification, precision);
        print!(
            "{}",
            report::to_output(&report::document("classify", tol, None, result))
        );
    } else {
        print_classification_text(&classification, precision);
    }
    Ok(0)
}

fn cmd_teleport_check(
    channel_spec: &str,
    alice: &str,
    json: bool,
    tol: &Tolerances,
) -> Result<i32, String> {
    let (channel, text) = resolve_state(channel_spec, false)?;
    let assignment = resolve_assignment(alice)?;
    let feasibility = teleportable(&channel, assignment, tol).map_err(|e| e.to_string())?;
    if json {
        let result = json!({
            "channel": text,
            "alice": assignment.to_string(),
            "pairing": feasibility.pairing.to_string(),
            "complement": feasibility.pairing.complement_name(),
            "rank": feasibility.rank,
            "required_rank": 4,
            "feasible": feasibility.feasible,
        });
        print!(
            "{}",
            report::to_output(&report::document("teleport-check", tol, None, result))
        );
    } else {
        println!("channel: {text}");
        println!(
            "alice wires {assignment} -> channel matrix C_{} (complement {})",
            feasibility.pairing,
            feasibility.pairing.complement_name()
        );
        println!("rank: {} (required: 4)", feasibility.rank);
        println!(
            "verdict: {}",
            if feasibility.feasible {
                "feasible"
            } else {
                "infeasible"
            }
        );
    }
    Ok(if feasibility.feasible { 0 } else { 2 })
}

fn cmd_sigma(
    channel_spec: &str,
    alice: &str,
    measurement_spec: &str,
    json: bool,
    precision: usize,
    tol: &Tolerances,
) -> Result<i32, String> {
    let (channel, text) = resolve_state(channel_spec, false)?;
    let assignment = resolve_assignment(alice)?;
    let measurement = resolve_measurement(measurement_spec)?;
    let transfer =
        transfer_matrix(&channel, assignment, &measurement).map_err(|e| e.to_string())?;

    match bob_transform(&transfer, tol) {
        Ok(recovery) => {
            if json {
                let result = json!({
                    "channel": text,
                    "alice": assignment.to_string(),
                    "measurement": measurement.description(),
                    "pairing": assignment.pairing().to_string(),
                    "transfer": report::matrix_value(transfer.entries()),
                    "sigma": report::matrix_value(&recovery.sigma),
                    "condition_number": recovery.condition_number,
                    "proportional_to_unitary": recovery.proportional_to_unitary,
                });
                print!(
                    "{}",
                    report::to_output(&report::document("sigma", tol, None, result))
                );
            } else {
                println!("channel: {text}");
                println!("measurement: {}", measurement.description());
                println!("sigma_B:");
                print_matrix(&recovery.sigma, precision);
                println!("condition number: {:.6}", recovery.condition_number);
                println!(
                    "proportional to unitary: {}",
                    if recovery.proportional_to_unitary {
                        "yes"
                    } else {
                        "no"
                    }
                );
            }
            Ok(0)
        }
        Err(TeleportError::SingularTransfer { rank }) => {
            if json {
                let result = json!({
                    "channel": text,
                    "alice": assignment.to_string(),
                    "measurement": measurement.description(),
                    "pairing": assignment.pairing().to_string(),
                    "transfer": report::matrix_value(transfer.entries()),
                    "singular": true,
                    "transfer_rank": rank,
                });
                print!(
                    "{}",
                    report::to_output(&report::document("sigma", tol, None, result))
                );
            } else {
                println!("transfer matrix rank {rank}; no invertible recovery exists");
            }
            Ok(2)
        }
        Err(other) => Err(other.to_string()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    channel_spec: &str,
    alice: &str,
    measurement_spec: &str,
    input_spec: Option<&str>,
    trials: u32,
    seed: u64,
    json: bool,
    tol: &Tolerances,
) -> Result<i32, String> {
    if trials == 0 {
        return Err("--trials must be at least 1".to_string());
    }
    let (channel, text) = resolve_state(channel_spec, false)?;
    let assignment = resolve_assignment(alice)?;
    let measurement = resolve_measurement(measurement_spec)?;

    let fixed_input = match input_spec {
        None | Some("random") => None,
        Some(spec) => Some(resolve_state(spec, false)?),
    };
    if let Some((state, _)) = &fixed_input {
        if state.num_qubits() != 2 {
            return Err(format!(
                "--input must be a two-qubit state, got {} qubit(s)",
                state.num_qubits()
            ));
        }
    }

    let mut results = Vec::with_capacity(trials as usize);
    let mut max_error = 0.0_f64;
    let mut probability_sum = 0.0_f64;
    for trial in 0..trials {
        let input = match &fixed_input {
            Some((state, _)) => state.clone(),
            // Stream 0 is the plain random_state stream; trials start at 1.
            None => {
                random_state_stream(2, seed, u64::from(trial) + 1).expect("two qubits is in range")
            }
        };
        let outcome = match simulate_teleportation(&channel, assignment, &measurement, &input, tol)
        {
            Ok(outcome) => outcome,
            Err(TeleportError::SingularTransfer { rank }) => {
                if json {
                    let result = json!({
                        "channel": text,
                        "alice": assignment.to_string(),
                        "measurement": measurement.description(),
                        "singular": true,
                        "transfer_rank": rank,
                    });
                    print!(
                        "{}",
                        report::to_output(&report::document("simulate", tol, Some(seed), result))
                    );
                } else {
                    println!("transfer matrix rank {rank}; no invertible recovery exists");
                }
                return Ok(2);
            }
            Err(other) => return Err(other.to_string()),
        };
        max_error = max_error.max(outcome.max_error);
        probability_sum += outcome.outcome_probability;
        results.push((trial, outcome));
    }

    if json {
        let trials_json: Vec<Value> = results
            .iter()
            .map(|(trial, outcome)| {
                json!({
                    "trial": trial,
                    "outcome_probability": outcome.outcome_probability,
                    "max_error": outcome.max_error,
                })
            })
            .collect();
        let result = json!({
            "channel": text,
            "alice": assignment.to_string(),
            "measurement": measurement.description(),
            "input": fixed_input.as_ref().map(|(_, t)| t.as_str()).unwrap_or("random"),
            "trials": trials,
            "results": trials_json,
            "summary": {
                "max_error": max_error,
                "mean_outcome_probability": probability_sum / f64::from(trials),
            },
        });
        print!(
            "{}",
            report::to_output(&report::document("simulate", tol, Some(seed), result))
        );
    } else {
        println!("channel: {text}");
        println!("measurement: {}", measurement.description());
        println!(
            "input: {}",
            fixed_input
                .as_ref()
                .map(|(_, t)| t.as_str())
                .unwrap_or("random")
        );
        for (trial, outcome) in &results {
            println!(
                "trial {trial}: outcome probability {:.6}, max error {:.3e}",
                outcome.outcome_probability, outcome.max_error
            );
        }
        println!(
            "summary: max error {:.3e}, mean outcome probability {:.6}",
            max_error,
            probability_sum / f64::from(trials)
        );
    }
    Ok(0)
}

fn print_classification_text(report: &crate::rank::ClassificationReport, precision: usize) {
    println!("classification: {}", report.label);
    println!(
        "single ranks: A={} B={} C={} D={}",
        report.single_rank(QubitLabel::A),
        report.single_rank(QubitLabel::B),
        report.single_rank(QubitLabel::C),
        report.single_rank(QubitLabel::D),
    );
    println!(
        "pair ranks: AB={} AC={} AD={}",
        report.pair_rank(Pairing::AB),
        report.pair_rank(Pairing::AC),
        report.pair_rank(Pairing::AD),
    );
    if let Some(factors) = &report.factors {
        println!("factors:");
        for (label, factor) in QubitLabel::ALL.iter().zip(factors.iter()) {
            println!(
                "  {label}: {}",
                format_ket_expression(factor, precision.max(10))
            );
        }
    }
}

fn format_complex(z: Complex64, precision: usize) -> String {
    let half_ulp = 0.5 * 10f64.powi(-(precision as i32));
    let trim = |value: f64| -> String {
        let mut s = format!("{:.*}", precision, value);
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        if s == "-0" {
            s = "0".to_string();
        }
        s
    };
    if z.im.abs() < half_ulp {
        trim(z.re)
    } else if z.re.abs() < half_ulp {
        format!("{}i", trim(z.im))
    } else {
        format!(
            "{}{}{}i",
            trim(z.re),
            if z.im < 0.0 { "-" } else { "+" },
            trim(z.im.abs())
        )
    }
}

fn print_matrix(m: &DMatrix<Complex64>, precision: usize) {
    let cells: Vec<Vec<String>> = (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| format_complex(m[(r, c)], precision))
                .collect()
        })
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    for row in &cells {
        let line: Vec<String> = row.iter().map(|cell| format!("{cell:>width$}")).collect();
        println!("  [ {} ]", line.join("  "));
    }
}
