//! Acceptance suite: one test per release criterion, each printing a
//! pass line (run with `cargo test --test acceptance -- --nocapture` to
//! see them). Tolerances are pinned in the assertions.

use nalgebra::DMatrix;
use num_complex::Complex64;

use qchan::linalg::max_entry_diff;
use qchan::presets;
use qchan::rank::{classify, numerical_rank, EntanglementClass, Tolerances};
use qchan::state::{
    partial_trace, phase_aligned_max_error, random_state, random_state_stream, PureState,
};
use qchan::teleport::{
    bob_transform, factorization_check, simulate_teleportation, teleportable, transfer_matrix,
    AliceAssignment, Measurement,
};
use qchan::unfolding::{channel_matrix, single_unfolding, Pairing, QubitLabel};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn real_matrix(rows: usize, cols: usize, scale: f64, pattern: &[f64]) -> DMatrix<Complex64> {
    assert_eq!(pattern.len(), rows * cols);
    DMatrix::from_row_slice(
        rows,
        cols,
        &pattern
            .iter()
            .map(|&x| Complex64::new(scale * x, 0.0))
            .collect::<Vec<_>>(),
    )
}

fn preset(name: &str) -> PureState {
    presets::state(name).expect("preset exists")
}

fn all_measurements() -> Vec<Measurement> {
    let mut measurements: Vec<Measurement> = (1..=4)
        .flat_map(|i| (1..=4).map(move |j| Measurement::bell_product(i, j).unwrap()))
        .collect();
    measurements.push(Measurement::from_state(&preset("nonbell")).unwrap());
    measurements
}

#[test]
fn criterion_1_channel_matrix_fixtures() {
    let corner = |scale: f64| {
        real_matrix(
            4,
            4,
            scale,
            &[
                1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
            ],
        )
    };
    let w_pattern = real_matrix(
        4,
        4,
        0.5,
        &[
            0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        ],
    );
    let four_corners = real_matrix(
        4,
        4,
        0.5,
        &[
            1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0,
        ],
    );
    let half_identity = real_matrix(
        4,
        4,
        0.5,
        &[
            1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0,
        ],
    );
    let middle_swap = real_matrix(
        4,
        4,
        0.5,
        &[
            1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
        ],
    );
    let hadamard_like = real_matrix(
        4,
        4,
        0.25,
        &[
            1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0, 1.0,
        ],
    );
    // The sixteen-term state's AC and AD matrices are printed with a 1/2
    // prefactor in the source material, but all sixteen amplitudes have
    // modulus 1/4, so normalization fixes the entry magnitude at 1/4.
    let repeated_rows = real_matrix(
        4,
        4,
        0.25,
        &[
            1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0, 1.0,
        ],
    );
    let signed_blocks = real_matrix(
        4,
        4,
        0.25,
        &[
            1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, -1.0, 1.0,
        ],
    );

    // (preset, expected per pairing or None, expected rank triple)
    type Expected = (Option<DMatrix<Complex64>>, usize);
    let cases: Vec<(&str, [Expected; 3])> = vec![
        (
            "ghz",
            [
                (Some(corner(SQRT_HALF)), 2),
                (Some(corner(SQRT_HALF)), 2),
                (Some(corner(SQRT_HALF)), 2),
            ],
        ),
        (
            "w",
            [
                (Some(w_pattern.clone()), 2),
                (Some(w_pattern.clone()), 2),
                (Some(w_pattern.clone()), 2),
            ],
        ),
        (
            "bellpairs",
            [
                (Some(four_corners.clone()), 1),
                (Some(half_identity.clone()), 4),
                (Some(half_identity.clone()), 4),
            ],
        ),
        ("cluster", [(None, 2), (None, 4), (None, 4)]),
        (
            "eq19",
            [
                (Some(half_identity.clone()), 4),
                (Some(four_corners.clone()), 1),
                (Some(middle_swap.clone()), 4),
            ],
        ),
        (
            "eq23",
            [
                (Some(hadamard_like.clone()), 4),
                (Some(repeated_rows.clone()), 1),
                (Some(signed_blocks.clone()), 4),
            ],
        ),
    ];

    for (name, expected) in &cases {
        let state = preset(name);
        for (slot, pairing) in Pairing::ALL.into_iter().enumerate() {
            let cm = channel_matrix(&state, pairing).unwrap();
            let (matrix, rank) = &expected[slot];
            if let Some(matrix) = matrix {
                let diff = max_entry_diff(cm.entries(), matrix);
                assert!(diff < 1e-12, "{name} {pairing}: entry deviation {diff:e}");
            }
            let got_rank = numerical_rank(cm.entries(), &tol()).unwrap();
            assert_eq!(got_rank, *rank, "{name} {pairing} rank");
        }
    }
    println!("criterion 1 PASS: channel matrices of the six reference states match entrywise within 1e-12 with rank triples (2,2,2) (2,2,2) (1,4,4) (2,4,4) (4,1,4) (4,1,4)");
}

#[test]
fn criterion_2_single_unfolding_fixtures() {
    let tolerance = 1e-12;
    let ghz_unfolding = real_matrix(
        2,
        8,
        SQRT_HALF,
        &[
            1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
        ],
    );
    for label in QubitLabel::ALL {
        let unf = single_unfolding(&preset("ghz"), label).unwrap();
        assert!(max_entry_diff(unf.entries(), &ghz_unfolding) < tolerance);
        assert_eq!(numerical_rank(unf.entries(), &tol()).unwrap(), 2);
    }

    let w_unfolding = real_matrix(
        2,
        8,
        0.5,
        &[
            0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, //
            1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        ],
    );
    for label in QubitLabel::ALL {
        let unf = single_unfolding(&preset("w"), label).unwrap();
        assert!(max_entry_diff(unf.entries(), &w_unfolding) < tolerance);
        assert_eq!(numerical_rank(unf.entries(), &tol()).unwrap(), 2);
    }

    // Bell-pair product: A and C share one pattern, B and D the other.
    // The printed form of the B/D matrix carries a stray entry at row 1,
    // column 4 that would break normalization; the value below is the one
    // the unfolding definition actually produces.
    let bellpairs_ac = real_matrix(
        2,
        8,
        0.5,
        &[
            1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0,
        ],
    );
    let bellpairs_bd = real_matrix(
        2,
        8,
        0.5,
        &[
            1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
        ],
    );
    for (label, expected) in [
        (QubitLabel::A, &bellpairs_ac),
        (QubitLabel::B, &bellpairs_bd),
        (QubitLabel::C, &bellpairs_ac),
        (QubitLabel::D, &bellpairs_bd),
    ] {
        let unf = single_unfolding(&preset("bellpairs"), label).unwrap();
        assert!(
            max_entry_diff(unf.entries(), expected) < tolerance,
            "{label}"
        );
        assert_eq!(numerical_rank(unf.entries(), &tol()).unwrap(), 2);
    }

    // Separable state: all four unfoldings have rank one.
    let sep_expected = [
        real_matrix(
            2,
            8,
            0.5,
            &[
                0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, //
                0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            ],
        ),
        real_matrix(
            2,
            8,
            0.5,
            &[
                0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0,
            ],
        ),
        real_matrix(
            2,
            8,
            0.5,
            &[
                0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0,
            ],
        ),
        real_matrix(
            2,
            8,
            0.5,
            &[
                0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
                1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0,
            ],
        ),
    ];
    for (label, expected) in QubitLabel::ALL.into_iter().zip(sep_expected.iter()) {
        let unf = single_unfolding(&preset("sep"), label).unwrap();
        assert!(
            max_entry_diff(unf.entries(), expected) < tolerance,
            "{label}"
        );
        assert_eq!(numerical_rank(unf.entries(), &tol()).unwrap(), 1, "{label}");
    }

    // Separable state classifies with the published factors.
    let report = classify(&preset("sep"), &tol()).unwrap();
    assert_eq!(report.label, EntanglementClass::FullySeparable);
    let factors = report.factors.as_ref().unwrap();
    let zero = PureState::basis(1, 0);
    let one = PureState::basis(1, 1);
    let plus =
        PureState::normalized(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)], 1).unwrap();
    for (factor, expected) in factors.iter().zip([&zero, &plus, &plus, &one]) {
        assert!(phase_aligned_max_error(factor, expected) < 1e-9);
    }
    let product = factors[0]
        .tensor(&factors[1])
        .and_then(|s| s.tensor(&factors[2]))
        .and_then(|s| s.tensor(&factors[3]))
        .unwrap();
    assert!(phase_aligned_max_error(&product, &preset("sep")) < 1e-9);

    println!("criterion 2 PASS: single unfoldings match entrywise within 1e-12 (ranks 2 for the entangled fixtures, 1 for the separable one) and the separable state factors correctly");
}

#[test]
fn criterion_3_sigma_fixtures() {
    let tolerance = 1e-10;
    let nonbell = Measurement::from_state(&preset("nonbell")).unwrap();
    let cases: Vec<(&str, Measurement, DMatrix<Complex64>)> = vec![
        (
            "eq19",
            Measurement::bell_product(1, 3).unwrap(),
            real_matrix(
                4,
                4,
                4.0,
                &[
                    0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0,
                ],
            ),
        ),
        (
            "eq23",
            Measurement::bell_product(1, 1).unwrap(),
            real_matrix(
                4,
                4,
                2.0,
                &[
                    1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0,
                    -1.0, 1.0,
                ],
            ),
        ),
        (
            "eq19",
            nonbell.clone(),
            real_matrix(
                4,
                4,
                4.0,
                &[
                    1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0,
                ],
            ),
        ),
        (
            "eq23",
            nonbell,
            real_matrix(
                4,
                4,
                2.0,
                &[
                    1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, -1.0, 1.0, 1.0, 1.0, -1.0,
                    -1.0,
                ],
            ),
        ),
    ];
    for (name, measurement, expected) in &cases {
        let transfer = transfer_matrix(&preset(name), AliceAssignment::Q34, measurement).unwrap();
        let recovery = bob_transform(&transfer, &tol()).unwrap();
        let diff = max_entry_diff(&recovery.sigma, expected);
        assert!(
            diff < tolerance,
            "{name} x {}: sigma deviation {diff:e}",
            measurement.description()
        );
    }
    println!("criterion 3 PASS: all four published recovery matrices reproduced entrywise within 1e-10 from channel and measurement alone");
}

#[test]
fn criterion_4_classification_labels() {
    let expected: Vec<(&str, EntanglementClass)> = vec![
        ("ghz", EntanglementClass::CompletelyEntangled),
        ("w", EntanglementClass::CompletelyEntangled),
        ("bellpairs", EntanglementClass::BipartitePair(Pairing::AB)),
        ("cluster", EntanglementClass::CompletelyEntangled),
        ("eq19", EntanglementClass::BipartitePair(Pairing::AC)),
        ("eq23", EntanglementClass::BipartitePair(Pairing::AC)),
        ("sep", EntanglementClass::FullySeparable),
    ];
    for (name, label) in &expected {
        let report = classify(&preset(name), &tol()).unwrap();
        assert_eq!(report.label, *label, "{name}");
    }
    println!("criterion 4 PASS: classification labels match for all seven named states");
}

#[test]
fn criterion_5_oracle_equivalence() {
    let mut failures = 0usize;
    for seed in 0..1000u64 {
        let state = random_state(4, seed).unwrap();
        let rho = state.density_matrix();
        for label in QubitLabel::ALL {
            let gram = single_unfolding(&state, label).unwrap().gram();
            let oracle = partial_trace(&rho, &[label.qubit_index()]).unwrap();
            if max_entry_diff(gram.entries(), oracle.entries()) >= 1e-12 {
                failures += 1;
            }
        }
        for pairing in Pairing::ALL {
            let gram = channel_matrix(&state, pairing).unwrap().gram();
            let keep: Vec<usize> = pairing
                .row_qubits()
                .iter()
                .map(|l| l.qubit_index())
                .collect();
            let oracle = partial_trace(&rho, &keep).unwrap();
            if max_entry_diff(gram.entries(), oracle.entries()) >= 1e-12 {
                failures += 1;
            }
        }
    }
    assert_eq!(failures, 0, "{failures} gram/partial-trace mismatches");
    println!("criterion 5 PASS: 1000 random states x 7 unfoldings, every Gram product equals the brute-force partial trace within 1e-12");
}

#[test]
fn criterion_6_round_trip_teleportation() {
    let measurements = all_measurements();
    let mut worst = 0.0_f64;
    for channel_name in ["eq19", "eq23"] {
        let channel = preset(channel_name);
        for trial in 0..100u64 {
            let input = random_state_stream(2, 11, trial + 1).unwrap();
            let mut probability_sum = 0.0;
            for (index, measurement) in measurements.iter().enumerate() {
                let transfer =
                    transfer_matrix(&channel, AliceAssignment::Q34, measurement).unwrap();
                bob_transform(&transfer, &tol())
                    .unwrap_or_else(|e| panic!("{channel_name} meas {index}: {e}"));
                let outcome = simulate_teleportation(
                    &channel,
                    AliceAssignment::Q34,
                    measurement,
                    &input,
                    &tol(),
                )
                .unwrap();
                worst = worst.max(outcome.max_error);
                assert!(
                    outcome.max_error < 1e-10,
                    "{channel_name} trial {trial} meas {index}: error {:e}",
                    outcome.max_error
                );
                if index < 16 {
                    probability_sum += outcome.outcome_probability;
                }
            }
            assert!(
                (probability_sum - 1.0).abs() < 1e-9,
                "{channel_name} trial {trial}: Bell probabilities sum to {probability_sum}"
            );
        }
    }
    println!("criterion 6 PASS: 100 random inputs through both rank-four channels under 17 measurements round-trip with max error {worst:.2e} (< 1e-10), Bell probabilities sum to 1 within 1e-9");
}

#[test]
fn criterion_7_no_go() {
    let measurements = all_measurements();

    let mut channels: Vec<(String, PureState)> = vec![
        ("ghz".to_string(), preset("ghz")),
        ("w".to_string(), preset("w")),
        ("bellpairs".to_string(), preset("bellpairs")),
    ];
    for seed in 0..100u64 {
        let left = random_state_stream(2, 23, 2 * seed + 1).unwrap();
        let right = random_state_stream(2, 23, 2 * seed + 2).unwrap();
        channels.push((format!("product-{seed}"), left.tensor(&right).unwrap()));
    }

    for (name, channel) in &channels {
        let feasibility = teleportable(channel, AliceAssignment::Q34, &tol()).unwrap();
        assert!(!feasibility.feasible, "{name} rank {}", feasibility.rank);
        for (index, measurement) in measurements.iter().enumerate() {
            let transfer = transfer_matrix(channel, AliceAssignment::Q34, measurement).unwrap();
            let rank = numerical_rank(transfer.entries(), &tol()).unwrap();
            assert!(rank < 4, "{name} meas {index}: transfer rank {rank}");
            assert!(
                matches!(
                    bob_transform(&transfer, &tol()),
                    Err(qchan::teleport::TeleportError::SingularTransfer { .. })
                ),
                "{name} meas {index}"
            );
        }
    }

    // The command-line check agrees and signals infeasibility via exit 2.
    for name in ["ghz", "w", "bellpairs"] {
        let output = std::process::Command::new(env!("CARGO_BIN_EXE_qchan"))
            .args(["teleport-check", &format!("preset:{name}"), "--alice", "34"])
            .output()
            .expect("binary runs");
        assert_eq!(output.status.code(), Some(2), "{name}");
    }
    println!("criterion 7 PASS: rank-deficient channels (3 named + 100 random bipartite products) give singular transfer matrices for all 17 measurements and teleport-check exits 2");
}

#[test]
fn criterion_8_factorization_identity() {
    let mut worst = 0.0_f64;
    let measurements = all_measurements();
    for preset_info in presets::PRESETS {
        let channel = preset(preset_info.name);
        for assignment in AliceAssignment::ALL {
            for measurement in &measurements {
                let check = factorization_check(&channel, assignment, measurement).unwrap();
                worst = worst.max(check.max_deviation);
                assert!(
                    check.max_deviation < 1e-14,
                    "{} {assignment} {}: deviation {:e}",
                    preset_info.name,
                    measurement.description(),
                    check.max_deviation
                );
            }
        }
    }
    println!("criterion 8 PASS: transfer matrix equals transpose(channel matrix) x measurement matrix for 8 channels x 3 wirings x 17 measurements, worst deviation {worst:.2e} (< 1e-14)");
}

#[test]
fn criterion_9_determinism() {
    let run = || {
        let output = std::process::Command::new(env!("CARGO_BIN_EXE_qchan"))
            .args([
                "--json",
                "simulate",
                "preset:eq19",
                "--alice",
                "34",
                "--measurement",
                "bell:1,3",
                "--seed",
                "7",
                "--trials",
                "100",
            ])
            .output()
            .expect("binary runs");
        assert!(output.status.success());
        output.stdout
    };
    let first = run();
    let second = run();
    assert!(!first.is_empty());
    assert_eq!(first, second, "repeated runs must emit identical bytes");
    let parsed: serde_json::Value = serde_json::from_slice(&first).expect("valid JSON");
    assert_eq!(parsed["result"]["trials"], 100);
    println!(
        "criterion 9 PASS: simulate --seed 7 --trials 100 emits byte-identical JSON across runs"
    );
}
