//! Machine-readable report documents.
//!
//! Every command emits one JSON object with the same top-level shape:
//! `tool`, `version`, `command`, `tolerances`, `seed`, `prng` and the
//! command-specific `result`. Complex numbers are always two-element
//! `[re, im]` arrays, matrices row-major arrays of such pairs. Keys are
//! serialized in sorted order, so identical runs produce identical bytes.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::rank::{ClassificationReport, EntanglementClass, Tolerances};
use crate::state::{PureState, PRNG_NAME};
use crate::unfolding::{Pairing, QubitLabel};

pub fn complex_value(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix_value(m: &DMatrix<Complex64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| complex_value(m[(r, c)])).collect()))
            .collect(),
    )
}

pub fn amplitudes_value(state: &PureState) -> Value {
    Value::Array(
        state
            .amplitudes()
            .iter()
            .map(|&z| complex_value(z))
            .collect(),
    )
}

pub fn classification_value(report: &ClassificationReport, precision: usize) -> Value {
    let mut singles = Map::new();
    for label in QubitLabel::ALL {
        singles.insert(label.to_string(), json!(report.single_rank(label)));
    }
    let mut pairs = Map::new();
    for pairing in Pairing::ALL {
        pairs.insert(pairing.to_string(), json!(report.pair_rank(pairing)));
    }
    let (label, pairing, separable) = match &report.label {
        EntanglementClass::FullySeparable => ("FullySeparable", Value::Null, Value::Null),
        EntanglementClass::PartiallySeparable { separable } => (
            "PartiallySeparable",
            Value::Null,
            Value::Array(separable.iter().map(|l| json!(l.to_string())).collect()),
        ),
        EntanglementClass::BipartitePair(p) => (
            "BipartitePair",
            json!(format!("{p}-{}", p.complement_name())),
            Value::Null,
        ),
        EntanglementClass::CompletelyEntangled => ("CompletelyEntangled", Value::Null, Value::Null),
    };
    let factors = report.factors.as_ref().map(|factors| {
        Value::Array(
            factors
                .iter()
                .map(|f| {
                    json!({
                        "expression": crate::ket::format_ket_expression(f, precision.max(10)),
                        "amplitudes": amplitudes_value(f),
                    })
                })
                .collect(),
        )
    });
    json!({
        "label": label,
        "pairing": pairing,
        "separable_qubits": separable,
        "single_ranks": Value::Object(singles),
        "pair_ranks": Value::Object(pairs),
        "factors": factors,
    })
}

/// Assemble the full document around a command-specific `result`.
pub fn document(command: &str, tolerances: &Tolerances, seed: Option<u64>, result: Value) -> Value {
    json!({
        "tool": "qchan",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "tolerances": {
            "relative": tolerances.relative,
            "absolute": tolerances.absolute,
        },
        "seed": seed,
        "prng": PRNG_NAME,
        "result": result,
    })
}

/// Serialize with a trailing newline; byte-identical for identical input.
pub fn to_output(document: &Value) -> String {
    let mut text = serde_json::to_string_pretty(document).expect("reports serialize");
    text.push('\n');
    text
}
