//! Unfolding (matricization) of four-qubit states.
//!
//! A four-qubit amplitude tensor `c[ijkl]` can be read as a matrix by
//! letting one subset of the qubit labels index rows and the complement
//! index columns. The 4x4 pair unfoldings are the channel matrices used by
//! the teleportation criterion; the 2x8 single unfoldings drive the
//! separability analysis. Either way the Gram product `M * M.adjoint()`
//! reproduces the corresponding reduced density matrix, which is what the
//! partial-trace oracle checks.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::state::{DensityMatrix, PureState, StateError};

/// The four channel qubits. `A` is the leftmost ket symbol; in the
/// teleportation wiring of the six-qubit joint system they sit on wires
/// 3, 4, 5 and 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitLabel {
    A,
    B,
    C,
    D,
}

impl QubitLabel {
    pub const ALL: [QubitLabel; 4] = [QubitLabel::A, QubitLabel::B, QubitLabel::C, QubitLabel::D];

    /// Position of this label within the four-qubit state (0 = leftmost).
    pub fn qubit_index(self) -> usize {
        match self {
            QubitLabel::A => 0,
            QubitLabel::B => 1,
            QubitLabel::C => 2,
            QubitLabel::D => 3,
        }
    }

    /// Wire number of this channel qubit in the six-qubit joint system.
    pub fn wire(self) -> usize {
        self.qubit_index() + 3
    }

    /// Column ordering of the remaining three qubits: cyclic continuation
    /// after the labeled qubit, so A -> (B,C,D), B -> (C,D,A), C -> (D,A,B)
    /// and D -> (A,B,C).
    pub fn column_order(self) -> [QubitLabel; 3] {
        match self {
            QubitLabel::A => [QubitLabel::B, QubitLabel::C, QubitLabel::D],
            QubitLabel::B => [QubitLabel::C, QubitLabel::D, QubitLabel::A],
            QubitLabel::C => [QubitLabel::D, QubitLabel::A, QubitLabel::B],
            QubitLabel::D => [QubitLabel::A, QubitLabel::B, QubitLabel::C],
        }
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QubitLabel::A => "A",
            QubitLabel::B => "B",
            QubitLabel::C => "C",
            QubitLabel::D => "D",
        })
    }
}

/// Row-qubit pair of a 4x4 channel matrix. The column pair is always the
/// complement: AB|CD, AC|BD, AD|BC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pairing {
    AB,
    AC,
    AD,
}

impl Pairing {
    pub const ALL: [Pairing; 3] = [Pairing::AB, Pairing::AC, Pairing::AD];

    pub fn row_qubits(self) -> [QubitLabel; 2] {
        match self {
            Pairing::AB => [QubitLabel::A, QubitLabel::B],
            Pairing::AC => [QubitLabel::A, QubitLabel::C],
            Pairing::AD => [QubitLabel::A, QubitLabel::D],
        }
    }

    pub fn column_qubits(self) -> [QubitLabel; 2] {
        match self {
            Pairing::AB => [QubitLabel::C, QubitLabel::D],
            Pairing::AC => [QubitLabel::B, QubitLabel::D],
            Pairing::AD => [QubitLabel::B, QubitLabel::C],
        }
    }

    pub fn complement_name(self) -> &'static str {
        match self {
            Pairing::AB => "CD",
            Pairing::AC => "BD",
            Pairing::AD => "BC",
        }
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pairing::AB => "AB",
            Pairing::AC => "AC",
            Pairing::AD => "AD",
        })
    }
}

/// 2x8 single-qubit unfolding: row index is the labeled qubit's bit,
/// columns run over the remaining three bits in the label's cyclic order,
/// most significant first.
#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldingMatrix {
    label: QubitLabel,
    entries: DMatrix<Complex64>,
}

/// 4x4 pair unfolding: rows are indexed by the pairing's qubit bits and
/// columns by the complement's, both big-endian.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pairing: Pairing,
    entries: DMatrix<Complex64>,
}

fn require_four_qubits(state: &PureState) -> Result<(), StateError> {
    if state.num_qubits() != 4 {
        return Err(StateError::ArityMismatch {
            expected: 4,
            got: state.num_qubits(),
        });
    }
    Ok(())
}

/// Build the 2x8 unfolding of a four-qubit state for one labeled qubit.
pub fn single_unfolding(
    state: &PureState,
    label: QubitLabel,
) -> Result<UnfoldingMatrix, StateError> {
    require_four_qubits(state)?;
    let order = label.column_order();
    let entries = DMatrix::from_fn(2, 8, |row, col| {
        let mut index = row << (3 - label.qubit_index());
        for (j, lab) in order.iter().enumerate() {
            index |= ((col >> (2 - j)) & 1) << (3 - lab.qubit_index());
        }
        state.amplitude(index)
    });
    Ok(UnfoldingMatrix { label, entries })
}

/// Build the 4x4 channel matrix of a four-qubit state for one pairing.
pub fn channel_matrix(state: &PureState, pairing: Pairing) -> Result<ChannelMatrix, StateError> {
    require_four_qubits(state)?;
    let rows = pairing.row_qubits();
    let cols = pairing.column_qubits();
    let entries = DMatrix::from_fn(4, 4, |row, col| {
        let mut index = 0usize;
        for (j, lab) in rows.iter().enumerate() {
            index |= ((row >> (1 - j)) & 1) << (3 - lab.qubit_index());
        }
        for (j, lab) in cols.iter().enumerate() {
            index |= ((col >> (1 - j)) & 1) << (3 - lab.qubit_index());
        }
        state.amplitude(index)
    });
    Ok(ChannelMatrix { pairing, entries })
}

impl UnfoldingMatrix {
    pub fn label(&self) -> QubitLabel {
        self.label
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `M * M.adjoint()`, the single reduced density matrix of the labeled
    /// qubit.
    pub fn gram(&self) -> DensityMatrix {
        DensityMatrix::trusted(&self.entries * self.entries.adjoint())
    }
}

impl ChannelMatrix {
    pub fn pairing(&self) -> Pairing {
        self.pairing
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `M * M.adjoint()`, the pair reduced density matrix of the row
    /// qubits.
    pub fn gram(&self) -> DensityMatrix {
        DensityMatrix::trusted(&self.entries * self.entries.adjoint())
    }
}
