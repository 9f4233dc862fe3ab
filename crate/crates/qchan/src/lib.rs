//! Channel-matrix analysis of four-qubit states.
//!
//! A four-qubit pure state can be unfolded into 2x8 single-qubit matrices
//! and 4x4 pair ("channel") matrices whose Gram products reproduce the
//! reduced density matrices. The ranks of those unfoldings decide the
//! state's entanglement structure, and the rank of the channel matrix
//! matching Alice's wiring decides whether an arbitrary two-qubit state can
//! be teleported through the channel: teleportation needs rank four, and
//! the receiver's recovery matrix is the inverse of the measurement's
//! transfer matrix.
//!
//! The crate ships a bra-ket expression parser ([`ket`]), state and
//! density-matrix machinery with a brute-force partial trace ([`state`]),
//! the unfolding constructions ([`unfolding`]), rank classification
//! ([`rank`]), the teleportation pipeline ([`teleport`]) and a command-line
//! front end ([`cli`]).

pub mod cli;
pub mod ket;
pub mod linalg;
pub mod presets;
pub mod rank;
pub mod report;
pub mod state;
pub mod teleport;
pub mod unfolding;

pub use ket::{format_ket_expression, parse_ket_expression, parse_ket_expression_normalized};
pub use rank::{classify, numerical_rank, separable_factors, EntanglementClass, Tolerances};
pub use state::{partial_trace, random_state, DensityMatrix, PureState};
pub use teleport::{
    bell_state, bob_transform, factorization_check, simulate_teleportation, teleportable,
    transfer_matrix, AliceAssignment, Measurement,
};
pub use unfolding::{
    channel_matrix, single_unfolding, ChannelMatrix, Pairing, QubitLabel, UnfoldingMatrix,
};
