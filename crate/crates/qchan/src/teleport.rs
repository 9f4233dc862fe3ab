//! Teleportation of an arbitrary two-qubit state through a four-qubit
//! channel.
//!
//! Wiring: the information state sits on wires 1 and 2, the channel on
//! wires 3 to 6. Alice measures her two information qubits together with
//! two of the channel qubits; Bob holds the other two. The measurement
//! maps the information coefficients linearly onto Bob's collapsed pair
//! through a 4x4 transfer matrix `T`, and teleportation succeeds exactly
//! when `T` is invertible — Bob applies `sigma_B = T^-1` to his collapsed
//! state. `T` factors as `C^T * M`, with `C` the channel matrix selected
//! by Alice's wiring and `M` the measurement's conjugated amplitudes, so
//! the channel can serve at all only if its channel matrix has rank four.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::linalg;
use crate::rank::{RankError, Tolerances};
use crate::state::{PureState, StateError};
use crate::unfolding::{channel_matrix, Pairing};

/// Which two channel wires Alice measures alongside her information qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AliceAssignment {
    /// Alice holds channel wires 3 and 4; Bob holds 5 and 6.
    Q34,
    /// Alice holds channel wires 3 and 5; Bob holds 4 and 6.
    Q35,
    /// Alice holds channel wires 3 and 6; Bob holds 4 and 5.
    Q36,
}

impl AliceAssignment {
    pub const ALL: [AliceAssignment; 3] = [
        AliceAssignment::Q34,
        AliceAssignment::Q35,
        AliceAssignment::Q36,
    ];

    /// The channel matrix this wiring selects.
    pub fn pairing(self) -> Pairing {
        match self {
            AliceAssignment::Q34 => Pairing::AB,
            AliceAssignment::Q35 => Pairing::AC,
            AliceAssignment::Q36 => Pairing::AD,
        }
    }

    /// Positions (within the four-qubit channel) of Alice's channel qubits.
    pub fn alice_channel_positions(self) -> [usize; 2] {
        let [a, b] = self.pairing().row_qubits();
        [a.qubit_index(), b.qubit_index()]
    }

    /// Positions (within the four-qubit channel) of Bob's qubits.
    pub fn bob_channel_positions(self) -> [usize; 2] {
        let [a, b] = self.pairing().column_qubits();
        [a.qubit_index(), b.qubit_index()]
    }

    /// Zero-based positions of the four measured qubits in the six-qubit
    /// joint system (information qubits first).
    pub fn measured_joint_positions(self) -> [usize; 4] {
        let [a, b] = self.alice_channel_positions();
        [0, 1, 2 + a, 2 + b]
    }

    /// Zero-based positions of Bob's two qubits in the joint system.
    pub fn bob_joint_positions(self) -> [usize; 2] {
        let [a, b] = self.bob_channel_positions();
        [2 + a, 2 + b]
    }

    /// Parse the wire-pair notation used on the command line (34, 35, 36).
    pub fn from_wires(wires: &str) -> Option<Self> {
        match wires {
            "34" => Some(AliceAssignment::Q34),
            "35" => Some(AliceAssignment::Q35),
            "36" => Some(AliceAssignment::Q36),
            _ => None,
        }
    }
}

impl fmt::Display for AliceAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AliceAssignment::Q34 => "34",
            AliceAssignment::Q35 => "35",
            AliceAssignment::Q36 => "36",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TeleportError {
    #[error("Bell index {index} out of range 1..=4")]
    IndexOutOfRange { index: usize },
    #[error("expected a {expected}-qubit state, got {got} qubit(s)")]
    ArityMismatch { expected: usize, got: usize },
    #[error("measurement amplitudes are not normalized: sum of squares is {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },
    #[error("transfer matrix is numerically singular: rank {rank} < 4")]
    SingularTransfer { rank: usize },
    #[error("measurement outcome has vanishing probability")]
    ZeroProbability,
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// One of the four maximally entangled two-qubit states:
/// 1, 2 -> `(|00> +/- |11>)/sqrt(2)`; 3, 4 -> `(|01> +/- |10>)/sqrt(2)`.
pub fn bell_state(index: usize) -> Result<PureState, TeleportError> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match index {
        1 => [s, 0.0, 0.0, s],
        2 => [s, 0.0, 0.0, -s],
        3 => [0.0, s, s, 0.0],
        4 => [0.0, s, -s, 0.0],
        _ => return Err(TeleportError::IndexOutOfRange { index }),
    };
    Ok(
        PureState::new(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect(), 2)
            .expect("Bell states are normalized"),
    )
}

/// A rank-one projector over the four measured qubits.
///
/// Amplitudes are stored in natural measured-qubit order: index bits are
/// (information qubit 1, information qubit 2, Alice channel qubit a, Alice
/// channel qubit b), most significant first.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    amps: [Complex64; 16],
    description: String,
}

impl Measurement {
    /// Validate raw amplitudes (must be normalized to within 1e-9).
    pub fn new(amps: [Complex64; 16], description: String) -> Result<Self, TeleportError> {
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > crate::state::NORM_TOL {
            return Err(TeleportError::NotNormalized { norm_sqr });
        }
        Ok(Self { amps, description })
    }

    /// Product of two Bell states, interleaved so the first factor spans
    /// (information qubit 1, Alice's first channel qubit) and the second
    /// spans (information qubit 2, Alice's second channel qubit).
    pub fn bell_product(i: usize, j: usize) -> Result<Self, TeleportError> {
        let beta_i = bell_state(i)?;
        let beta_j = bell_state(j)?;
        let mut amps = [Complex64::new(0.0, 0.0); 16];
        for q1 in 0..2 {
            for q2 in 0..2 {
                for qa in 0..2 {
                    for qb in 0..2 {
                        amps[(q1 << 3) | (q2 << 2) | (qa << 1) | qb] =
                            beta_i.amplitude((q1 << 1) | qa) * beta_j.amplitude((q2 << 1) | qb);
                    }
                }
            }
        }
        Ok(Self {
            amps,
            description: format!("bell:{i},{j}"),
        })
    }

    /// Adopt a four-qubit state's amplitudes in natural order as written.
    pub fn from_state(state: &PureState) -> Result<Self, TeleportError> {
        if state.num_qubits() != 4 {
            return Err(TeleportError::ArityMismatch {
                expected: 4,
                got: state.num_qubits(),
            });
        }
        let mut amps = [Complex64::new(0.0, 0.0); 16];
        amps.copy_from_slice(state.amplitudes());
        Self::new(amps, crate::ket::format_ket_expression(state, 10))
    }

    pub fn amplitudes(&self) -> &[Complex64; 16] {
        &self.amps
    }

    pub fn amplitude(&self, q1: usize, q2: usize, qa: usize, qb: usize) -> Complex64 {
        self.amps[(q1 << 3) | (q2 << 2) | (qa << 1) | qb]
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// The conjugated measurement amplitudes arranged as a 4x4 matrix with
    /// row (Alice channel bits) and column (information bits); the factor
    /// `M` in `T = C^T * M`.
    pub fn contraction_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(4, 4, |channel_bits, info_bits| {
            self.amps[(info_bits << 2) | channel_bits].conj()
        })
    }
}

/// The linear map from information coefficients to Bob's unnormalized
/// collapsed amplitudes: rows are Bob-pair bits, columns information bits.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    assignment: AliceAssignment,
    entries: DMatrix<Complex64>,
}

impl TransferMatrix {
    pub fn assignment(&self) -> AliceAssignment {
        self.assignment
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Apply to an information-state coefficient vector.
    pub fn apply(&self, input: &PureState) -> [Complex64; 4] {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (row, slot) in out.iter_mut().enumerate() {
            for col in 0..4 {
                *slot += self.entries[(row, col)] * input.amplitude(col);
            }
        }
        out
    }
}

/// Contract the channel with a measurement to obtain the transfer matrix.
///
/// Entry `[(bob bits), (info bits)]` sums `conj(m) * c` over Alice's two
/// channel bits, with the channel amplitude's bits placed according to the
/// assignment. This is the direct index-sum route; `factorization_check`
/// compares it against the channel-matrix product.
pub fn transfer_matrix(
    channel: &PureState,
    assignment: AliceAssignment,
    meas: &Measurement,
) -> Result<TransferMatrix, TeleportError> {
    if channel.num_qubits() != 4 {
        return Err(TeleportError::ArityMismatch {
            expected: 4,
            got: channel.num_qubits(),
        });
    }
    let [alice0, alice1] = assignment.alice_channel_positions();
    let [bob0, bob1] = assignment.bob_channel_positions();
    let entries = DMatrix::from_fn(4, 4, |bob_bits, info_bits| {
        let mut acc = Complex64::new(0.0, 0.0);
        for u in 0..2 {
            for v in 0..2 {
                let meas_amp = meas.amps[(info_bits << 2) | (u << 1) | v];
                let mut index = 0usize;
                index |= u << (3 - alice0);
                index |= v << (3 - alice1);
                index |= ((bob_bits >> 1) & 1) << (3 - bob0);
                index |= (bob_bits & 1) << (3 - bob1);
                acc += meas_amp.conj() * channel.amplitude(index);
            }
        }
        acc
    });
    Ok(TransferMatrix {
        assignment,
        entries,
    })
}

/// Bob's recovery transformation: the exact inverse of the transfer matrix
/// plus diagnostics about how well-behaved that inverse is.
#[derive(Debug, Clone)]
pub struct BobTransform {
    pub sigma: DMatrix<Complex64>,
    pub condition_number: f64,
    /// Whether `sigma^H sigma` is a multiple of the identity (to 1e-9),
    /// i.e. the recovery is a scaled unitary.
    pub proportional_to_unitary: bool,
}

/// Invert the transfer matrix. Fails with the achieved numerical rank when
/// the smallest singular value sits below the tolerance threshold.
pub fn bob_transform(
    transfer: &TransferMatrix,
    tol: &Tolerances,
) -> Result<BobTransform, TeleportError> {
    let decomp = linalg::svd(&transfer.entries);
    let sigma_max = decomp.sigma[0];
    let sigma_min = decomp.sigma[3];
    let threshold = tol.threshold(sigma_max);
    if sigma_min <= threshold {
        let rank = decomp.sigma.iter().filter(|&&s| s > threshold).count();
        return Err(TeleportError::SingularTransfer { rank });
    }
    let sigma = decomp.inverse();
    let condition_number = sigma_max / sigma_min;

    let gram = sigma.adjoint() * &sigma;
    let mean_diag = gram.trace().re / 4.0;
    let mut deviation = 0.0_f64;
    for r in 0..4 {
        for c in 0..4 {
            let expected = if r == c {
                Complex64::new(mean_diag, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            deviation = deviation.max((gram[(r, c)] - expected).norm());
        }
    }
    let proportional_to_unitary = deviation <= 1e-9 * mean_diag.max(1.0);

    Ok(BobTransform {
        sigma,
        condition_number,
        proportional_to_unitary,
    })
}

/// Feasibility of teleportation through `channel` for a given wiring.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportFeasibility {
    pub pairing: Pairing,
    pub rank: usize,
    pub feasible: bool,
}

/// Teleportation is possible exactly when the selected channel matrix has
/// rank four.
pub fn teleportable(
    channel: &PureState,
    assignment: AliceAssignment,
    tol: &Tolerances,
) -> Result<TeleportFeasibility, TeleportError> {
    let pairing = assignment.pairing();
    let cm = channel_matrix(channel, pairing)?;
    let rank = crate::rank::numerical_rank(cm.entries(), tol)?;
    Ok(TeleportFeasibility {
        pairing,
        rank,
        feasible: rank == 4,
    })
}

/// Outcome of one full protocol run.
#[derive(Debug, Clone)]
pub struct TeleportationOutcome {
    /// Bob's unnormalized collapsed amplitudes, `T * x`.
    pub collapsed: [Complex64; 4],
    /// Squared norm of the collapsed state; the probability of this
    /// measurement outcome.
    pub outcome_probability: f64,
    /// `normalize(sigma_B * collapsed)`.
    pub recovered: PureState,
    /// Largest amplitude deviation of `recovered` from the input after
    /// global-phase alignment.
    pub max_error: f64,
}

/// Run the protocol end to end: join the input to the channel, contract
/// the six-qubit joint state with the measurement (an independent route —
/// the transfer matrix is only used for Bob's inverse), normalize Bob's
/// state after recovery and compare with the input.
pub fn simulate_teleportation(
    channel: &PureState,
    assignment: AliceAssignment,
    meas: &Measurement,
    input: &PureState,
    tol: &Tolerances,
) -> Result<TeleportationOutcome, TeleportError> {
    if input.num_qubits() != 2 {
        return Err(TeleportError::ArityMismatch {
            expected: 2,
            got: input.num_qubits(),
        });
    }
    let transfer = transfer_matrix(channel, assignment, meas)?;
    let recovery = bob_transform(&transfer, tol)?;

    let joint = input.tensor(channel)?;
    let [m0, m1, m2, m3] = assignment.measured_joint_positions();
    let [b0, b1] = assignment.bob_joint_positions();
    let mut collapsed = [Complex64::new(0.0, 0.0); 4];
    for (bob_bits, slot) in collapsed.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for measured in 0..16 {
            let mut index = 0usize;
            for (j, &pos) in [m0, m1, m2, m3].iter().enumerate() {
                index |= ((measured >> (3 - j)) & 1) << (5 - pos);
            }
            index |= ((bob_bits >> 1) & 1) << (5 - b0);
            index |= (bob_bits & 1) << (5 - b1);
            acc += meas.amps[measured].conj() * joint.amplitude(index);
        }
        *slot = acc;
    }

    let outcome_probability: f64 = collapsed.iter().map(|z| z.norm_sqr()).sum();
    if outcome_probability.sqrt() < tol.absolute {
        return Err(TeleportError::ZeroProbability);
    }

    let mut recovered_raw = vec![Complex64::new(0.0, 0.0); 4];
    for (row, amp) in recovered_raw.iter_mut().enumerate() {
        for (col, collapsed_amp) in collapsed.iter().enumerate() {
            *amp += recovery.sigma[(row, col)] * collapsed_amp;
        }
    }
    let recovered =
        PureState::normalized(recovered_raw, 2).map_err(|_| TeleportError::ZeroProbability)?;
    let max_error = crate::state::phase_aligned_max_error(&recovered, input);

    Ok(TeleportationOutcome {
        collapsed,
        outcome_probability,
        recovered,
        max_error,
    })
}

/// Both routes to the transfer matrix side by side: the direct contraction
/// and the product `C^T * M`.
#[derive(Debug, Clone)]
pub struct FactorizationCheck {
    pub transfer: TransferMatrix,
    pub product: DMatrix<Complex64>,
    pub max_deviation: f64,
}

/// Evaluate `T` against `transpose(C) * M` entrywise.
pub fn factorization_check(
    channel: &PureState,
    assignment: AliceAssignment,
    meas: &Measurement,
) -> Result<FactorizationCheck, TeleportError> {
    let transfer = transfer_matrix(channel, assignment, meas)?;
    let cm = channel_matrix(channel, assignment.pairing())?;
    let product = cm.entries().transpose() * meas.contraction_matrix();
    let max_deviation = linalg::max_entry_diff(&transfer.entries, &product);
    Ok(FactorizationCheck {
        transfer,
        product,
        max_deviation,
    })
}
