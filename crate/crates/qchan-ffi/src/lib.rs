//! C ABI for the qchan library.
//!
//! Conventions: every function returns a [`QchanStatus`]; results travel
//! through out-pointers. States and measurements are opaque handles that
//! must be released with their matching `_free` function. Complex buffers
//! are row-major `re, im` interleaved doubles, so an n x m matrix occupies
//! `2 * n * m` doubles. On any failure `qchan_last_error()` returns a
//! thread-local human-readable message for the most recent error.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use qchan::ket::ParseError;
use qchan::rank::{RankError, Tolerances};
use qchan::state::StateError;
use qchan::teleport::TeleportError;
use qchan::unfolding::{Pairing, QubitLabel};
use qchan::{AliceAssignment, EntanglementClass, Measurement, PureState};

/// Result codes for every FFI entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QchanStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    NotNormalized = 4,
    ArityError = 5,
    SingularTransfer = 6,
    InconsistentRanks = 7,
    NotSeparable = 8,
    ZeroProbability = 9,
    Utf8Error = 10,
    BufferTooSmall = 11,
    InternalError = 12,
}

/// Channel qubit labels, leftmost ket symbol first.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QchanQubitLabel {
    A = 0,
    B = 1,
    C = 2,
    D = 3,
}

/// Row-qubit pairs of the three channel matrices.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QchanPairing {
    AB = 0,
    AC = 1,
    AD = 2,
}

/// Alice's channel wires, named by the joint-system wire numbers.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QchanAliceWires {
    Q34 = 34,
    Q35 = 35,
    Q36 = 36,
}

/// Entanglement classes reported by `qchan_classify`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QchanClassLabel {
    FullySeparable = 0,
    PartiallySeparable = 1,
    BipartitePair = 2,
    CompletelyEntangled = 3,
}

/// Classification result. `bipartite_pairing` is meaningful only when
/// `label` is `BipartitePair` (and is `-1` otherwise); `factors_re_im`
/// holds the four single-qubit factors (two complex amplitudes each) only
/// when `has_factors` is true.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QchanClassification {
    pub single_ranks: [u32; 4],
    pub pair_ranks: [u32; 3],
    pub label: QchanClassLabel,
    pub bipartite_pairing: i32,
    pub separable_qubits: [bool; 4],
    pub has_factors: bool,
    pub factors_re_im: [f64; 16],
}

/// Opaque pure-state handle.
pub struct QchanState(PureState);

/// Opaque measurement handle.
pub struct QchanMeasurement(Measurement);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl AsRef<str>) {
    let sanitized = message.as_ref().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of_state_error(err: &StateError) -> QchanStatus {
    match err {
        StateError::NotNormalized { .. } => QchanStatus::NotNormalized,
        StateError::ArityOverflow { .. } | StateError::ArityMismatch { .. } => {
            QchanStatus::ArityError
        }
        _ => QchanStatus::InvalidArgument,
    }
}

fn status_of_rank_error(err: &RankError) -> QchanStatus {
    match err {
        RankError::InconsistentRanks { .. } => QchanStatus::InconsistentRanks,
        RankError::NotSeparable { .. } => QchanStatus::NotSeparable,
        RankError::State(state) => status_of_state_error(state),
        _ => QchanStatus::InvalidArgument,
    }
}

fn status_of_teleport_error(err: &TeleportError) -> QchanStatus {
    match err {
        TeleportError::SingularTransfer { .. } => QchanStatus::SingularTransfer,
        TeleportError::ZeroProbability => QchanStatus::ZeroProbability,
        TeleportError::NotNormalized { .. } => QchanStatus::NotNormalized,
        TeleportError::ArityMismatch { .. } => QchanStatus::ArityError,
        TeleportError::IndexOutOfRange { .. } => QchanStatus::InvalidArgument,
        TeleportError::Rank(rank) => status_of_rank_error(rank),
        TeleportError::State(state) => status_of_state_error(state),
    }
}

fn guard(body: impl FnOnce() -> QchanStatus) -> QchanStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            QchanStatus::InternalError
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, QchanStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(QchanStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        QchanStatus::Utf8Error
    })
}

fn tolerances(rel_tol: f64, abs_tol: f64) -> Result<Tolerances, QchanStatus> {
    Tolerances::new(rel_tol, abs_tol).map_err(|err| {
        set_error(err.to_string());
        QchanStatus::InvalidArgument
    })
}

fn label_of(label: QchanQubitLabel) -> QubitLabel {
    match label {
        QchanQubitLabel::A => QubitLabel::A,
        QchanQubitLabel::B => QubitLabel::B,
        QchanQubitLabel::C => QubitLabel::C,
        QchanQubitLabel::D => QubitLabel::D,
    }
}

fn pairing_of(pairing: QchanPairing) -> Pairing {
    match pairing {
        QchanPairing::AB => Pairing::AB,
        QchanPairing::AC => Pairing::AC,
        QchanPairing::AD => Pairing::AD,
    }
}

fn assignment_of(wires: QchanAliceWires) -> AliceAssignment {
    match wires {
        QchanAliceWires::Q34 => AliceAssignment::Q34,
        QchanAliceWires::Q35 => AliceAssignment::Q35,
        QchanAliceWires::Q36 => AliceAssignment::Q36,
    }
}

fn write_complex_slice(values: &[Complex64], out: *mut f64) {
    for (k, z) in values.iter().enumerate() {
        unsafe {
            *out.add(2 * k) = z.re;
            *out.add(2 * k + 1) = z.im;
        }
    }
}

fn write_matrix(matrix: &nalgebra::DMatrix<Complex64>, out: *mut f64) {
    let mut k = 0usize;
    for r in 0..matrix.nrows() {
        for c in 0..matrix.ncols() {
            let z = matrix[(r, c)];
            unsafe {
                *out.add(2 * k) = z.re;
                *out.add(2 * k + 1) = z.im;
            }
            k += 1;
        }
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn qchan_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread; valid until the
/// next failing call. Do not free.
#[no_mangle]
pub extern "C" fn qchan_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parse a ket expression. With `normalize` false the expression must
/// already be normalized to within 1e-6.
///
/// # Safety
/// `expression` must be a valid NUL-terminated string and `out_state` a
/// valid pointer; the returned handle must be freed with
/// `qchan_state_free`.
#[no_mangle]
pub unsafe extern "C" fn qchan_state_parse(
    expression: *const c_char,
    normalize: bool,
    out_state: *mut *mut QchanState,
) -> QchanStatus {
    guard(|| {
        if out_state.is_null() {
            set_error("null output pointer");
            return QchanStatus::NullPointer;
        }
        let text = match read_str(expression) {
            Ok(text) => text,
            Err(status) => return status,
        };
        let parsed = if normalize {
            qchan::parse_ket_expression_normalized(text)
        } else {
            qchan::parse_ket_expression(text)
        };
        match parsed {
            Ok(state) => {
                *out_state = Box::into_raw(Box::new(QchanState(state)));
                QchanStatus::Ok
            }
            Err(err @ ParseError::NotNormalized { .. }) => {
                set_error(err.to_string());
                QchanStatus::NotNormalized
            }
            Err(err) => {
                set_error(err.to_string());
                QchanStatus::ParseError
            }
        }
    })
}

/// Build a state from `2^num_qubits` interleaved complex amplitudes
/// (`len` counts doubles, so it must equal `2^(num_qubits+1)`).
///
/// # Safety
/// `re_im` must point to `len` readable doubles; `out_state` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qchan_state_from_amplitudes(
    re_im: *const f64,
    len: usize,
    num_qubits: u32,
    out_state: *mut *mut QchanState,
) -> QchanStatus {
    guard(|| {
        if re_im.is_null() || out_state.is_null() {
            set_error("null pointer");
            return QchanStatus::NullPointer;
        }
        if num_qubits == 0 || num_qubits > 8 || len != (2usize << num_qubits) {
            set_error(format!(
                "expected 2^(num_qubits+1) doubles for {num_qubits} qubit(s), got {len}"
            ));
            return QchanStatus::InvalidArgument;
        }
        let amps: Vec<Complex64> = (0..len / 2)
            .map(|k| Complex64::new(*re_im.add(2 * k), *re_im.add(2 * k + 1)))
            .collect();
        match PureState::new(amps, num_qubits as usize) {
            Ok(state) => {
                *out_state = Box::into_raw(Box::new(QchanState(state)));
                QchanStatus::Ok
            }
            Err(err) => {
                let status = status_of_state_error(&err);
                set_error(err.to_string());
                status
            }
        }
    })
}

/// Look up a named preset state (ghz, w, bellpairs, cluster, eq19, eq23,
/// sep, nonbell).
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out_state` valid.
#[no_mangle]
pub unsafe extern "C" fn qchan_state_preset(
    name: *const c_char,
    out_state: *mut *mut QchanState,
) -> QchanStatus {
    guard(|| {
        if out_state.is_null() {
            set_error("null output pointer");
            return QchanStatus::NullPointer;
        }
        let name = match read_str(name) {
            Ok(name) => name,
            Err(status) => return status,
        };
        match qchan::presets::state(name) {
            Some(state) => {
                *out_state = Box::into_raw(Box::new(QchanState(state)));
                QchanStatus::Ok
            }
            None => {
                set_error(format!("unknown preset '{name}'"));
                QchanStatus::InvalidArgument
            }
        }
    })
}

/// Deterministic seeded random state.
///
/// # Safety
/// `out_state` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qchan_state_random(
    num_qubits: u32,
    seed: u64,
    out_state: *mut *mut QchanState,
) -> QchanStatus {
    guard(|| {
        if out_state.is_null() {
            set_error("null output pointer");
            return QchanStatus::NullPointer;
        }
        match qchan::random_state(num_qubits as usize, seed) {
            Ok(state) => {
                *out_state = Box::into_raw(Box::new(QchanState(state)));
                QchanStatus::Ok
            }
            Err(err) => {
                let status = status_of_state_error(&err);
                set_error(err.to_string());
                status
            }
        }
    })
}

/// Number of qubits, or zero for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qchan_state_num_qubits(state: *const QchanState) -> u32 {
    if state.is_null() {
        return 0;
    }
    (*state).0.num_qubits() as u32
}

/// Copy the amplitudes into `out_re_im` (`capacity` counts doubles and
/// must be at least `2^(num_qubits+1)`).
///
/// # Safety
/// `state` must be a live handle; `out_re_im` must have room for
/// `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn qchan_state_amplitudes(
    state: *const QchanState,
    out_re_im: *mut f64,
    capacity: usize,
) -> QchanStatus {
    guard(|| {
        if state.is_null() || out_re_im.is_null() {
            set_error("null pointer");
            return QchanStatus::NullPointer;
        }
        let amps = (*state).0.amplitudes();
        if capacity < 2 * amps.len() {
            set_error(format!(
                "buffer holds {capacity} doubles, need {}",
                2 * amps.len()
            ));
            return QchanStatus::BufferTooSmall;
        }
        write_complex_slice(amps, out_re_im);
        QchanStatus::Ok
    })
}

/// Render the state as a ket expression; free the result with
/// `qchan_string_free`.
///
/// # Safety
/// `state` must be a live handle and `out_text` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qchan_state_format(
    state: *const QchanState,
    precision: u32,
    out_text: *mut *mut c_char,
) -> QchanStatus {
    guard(|| {
        if state.is_null() || out_text.is_null() {
            set_error("null pointer");
            return QchanStatus::NullPointer;
        }
        let text = qchan::format_ket_expression(&(*state).0, precision as usize);
        match CString::new(text) {
            Ok(text) => {
                *out_text = text.into_raw();
                QchanStatus::Ok
            }
            Err(_) => {
                set_error("formatted text contained an interior NUL");
                QchanStatus::InternalError
            }
        }
    })
}

/// # Safety
/// `state` must be null or a handle returned by this library, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn qchan_state_free(state: *mut QchanState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `text` must be null or a string returned by this library, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn qchan_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// 2x8 single-qubit unfolding into 32 doubles (row-major interleaved).
///
/// # Safety
/// `state` must be a live handle, `out_re_im` must hold 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn qchan_single_unfolding(
    state: *const QchanState,
    label: QchanQubitLabel,
    out_re_im: *mut f64,
) -> QchanStatus {
    guard(|| {
        if state.is_null() || out_re_im.is_null() {
            set_error("null pointer");
            return QchanStatus::NullPointer;
        }
        match qchan::single_unfolding(&(*state).0, label_of(label)) {
            Ok(unfolding) => {
                write_matrix(unfolding.entries(), out_re_im);
                QchanStatus::Ok
            }
            Err(err) => {
                let status = status_of_state_error(&err);
                set_error(err.to_string());
                status
            }
        }
    })
}

/// 4x4 channel matrix into 32 doubles (row-major interleaved).
///
/// # Safety
/// `state` must be a live handle, `out_re_im` must hold 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn qchan_channel_matrix(
    state: *const QchanState,
    pairing: QchanPairing,
    out_re_im: *mut f64,
) -> QchanStatus {
    guard(|| {
        if state.is_null() || out_re_im.is_null() {
            set_error("null pointer");
            return QchanStatus::NullPointer;
        }
        match qchan::channel_matrix(&(*state).0, pairing_of(pairing)) {
            Ok(channel) => {
                write_matrix(channel.entries(), out_re_im);
                QchanStatus::Ok
            }
            Err(err) => {
                let status = status_of_state_error(&err);
                set_error(err.to_string());
                status
            }
        }
    })
}

/// Numerical rank of an arbitrary complex matrix supplied as row-major
/// interleaved doubles.
///
/// # Safety
/// `re_im` must hold `2 * rows * cols` doubles; `out_rank` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qchan_matrix_rank(
    re_im: *const f64,
    rows: usize,
    cols: usize,
    rel_tol: f64,
    abs_tol: f64,
    out_rank: *mut u32,
) -> QchanStatus {
    guard(|| {
        if re_im.is_null() || out_rank.is_null() {
            set_error("null pointer");
            return QchanStatus::NullPointer;
        }
        if rows == 0 || cols == 0 || rows > 64 || cols > 64 {
            set_error("matrix dimensions must be within 1..=64");
            return QchanStatus::InvalidArgument;
        }
        let tol = match tolerances(rel_tol, abs_tol) {
            Ok(tol) => tol,
            Err(status) => return status,
        };
        let matrix = nalgebra::DMatrix::from_fn(rows, cols, |r, c| {
            let k = r * cols + c;
            Complex64::new(*re_im.add(2 * k), *re_im.add(2 * k + 1))
        });
        match qchan::numerical_rank(&matrix, &tol) {
            Ok(rank) => {
                *out_rank = rank as u32;
                QchanStatus::Ok
            }
            Err(err) => {
                let status = status_of_rank_error(&err);
                set_error(err.to_string());
                status
            }
        }
    })
}

/// Classify a four-qubit state.
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qchan_classify(
    state: *const QchanState,
    rel_tol: f64,
    abs_tol: f64,
    out: *mut QchanClassification,
) -> QchanStatus {
    guard(|| {
        if state.is_null() || out.is_null() {
            set_error("null pointer");
            return QchanStatus::NullPointer;
        }
        let tol = match tolerances(rel_tol, abs_tol) {
            Ok(tol) => tol,
            Err(status) => return status,
        };
        let report = match qchan::classify(&(*state).0, &tol) {
            Ok(report) => report,
            Err(err) => {
                let status = status_of_rank_error(&err);
                set_error(err.to_string());
                return status;
            }
        };

        let mut result = QchanClassification {
            single_ranks: [0; 4],
            pair_ranks: [0; 3],
            label: QchanClassLabel::CompletelyEntangled,
            bipartite_pairing: -1,
            separable_qubits: [false; 4],
            has_factors: false,
            factors_re_im: [0.0; 16],
        };
        for label in QubitLabel::ALL {
            result.single_ranks[label.qubit_index()] = report.single_rank(label) as u32;
        }
        for (slot, pairing) in Pairing::ALL.into_iter().enumerate() {
            result.pair_ranks[slot] = report.pair_rank(pairing) as u32;
        }
        match &report.label {
            EntanglementClass::FullySeparable => {
                result.label = QchanClassLabel::FullySeparable;
                result.separable_qubits = [true; 4];
            }
            EntanglementClass::PartiallySeparable { separable } => {
                result.label = QchanClassLabel::PartiallySeparable;
                for label in separable {
                    result.separable_qubits[label.qubit_index()] = true;
                }
            }
            EntanglementClass::BipartitePair(pairing) => {
                result.label = QchanClassLabel::BipartitePair;
                result.bipartite_pairing = match pairing {
                    Pairing::AB => QchanPairing::AB as i32,
                    Pairing::AC => QchanPairing::AC as i32,
                    Pairing::AD => QchanPairing::AD as i32,
                };
            }
            EntanglementClass::CompletelyEntangled => {
                result.label = QchanClassLabel::CompletelyEntangled;
            }
        }
        if let Some(factors) = &report.factors {
            result.has_factors = true;
            for (f, factor) in factors.iter().enumerate() {
                for (a, z) in factor.amplitudes().iter().enumerate() {
                    result.factors_re_im[4 * f + 2 * a] = z.re;
                    result.factors_re_im[4 * f + 2 * a + 1] = z.im;
                }
            }
        }
        *out = result;
        QchanStatus::Ok
    })
}

/// Bell-product measurement with indices in 1..=4.
///
/// # Safety
/// `out_measurement` must be a valid pointer; free the handle with
/// `qchan_measurement_free`.
#[no_mangle]
pub unsafe extern "C" fn qchan_measurement_bell(
    i: u32,
    j: u32,
    out_measurement: *mut *mut QchanMeasurement,
) -> QchanStatus {
    guard(|| {
        if out_measurement.is_null() {
            set_error("null output pointer");
            return QchanStatus::NullPointer;
        }
        match Measurement::bell_product(i as usize, j as usize) {
            Ok(measurement) => {
                *out_measurement = Box::into_raw(Box::new(QchanMeasurement(measurement)));
                QchanStatus::Ok
            }
            Err(err) => {
                let status = status_of_teleport_error(&err);
                set_error(err.to_string());
                status
            }
        }
    })
}

/// Use a four-qubit state's amplitudes as a projective measurement.
///
/// # Safety
/// `state` must be a live handle and `out_measurement` valid.
#[no_mangle]
pub unsafe extern "C" fn qchan_measurement_from_state(
    state: *const QchanState,
    out_measurement: *mut *mut QchanMeasurement,
) -> QchanStatus {
    guard(|| {
        if state.is_null() || out_measurement.is_null() {
            set_error("null pointer");
            return QchanStatus::NullPointer;
        }
        match Measurement::from_state(&(*state).0) {
            Ok(measurement) => {
                *out_measurement = Box::into_raw(Box::new(QchanMeasurement(measurement)));
                QchanStatus::Ok
            }
            Err(err) => {
                let status = status_of_teleport_error(&err);
                set_error(err.to_string());
                status
            }
        }
    })
}

/// # Safety
/// `measurement` must be null or a handle returned by this library, not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn qchan_measurement_free(measurement: *mut QchanMeasurement) {
    if !measurement.is_null() {
        drop(Box::from_raw(measurement));
    }
}

/// Rank-four feasibility of a channel for Alice's wiring.
///
/// # Safety
/// `channel` must be a live handle; `out_rank` and `out_feasible` valid.
#[no_mangle]
pub unsafe extern "C" fn qchan_teleport_check(
    channel: *const QchanState,
    alice: QchanAliceWires,
    rel_tol: f64,
    abs_tol: f64,
    out_rank: *mut u32,
    out_feasible: *mut bool,
) -> QchanStatus {
    guard(|| {
        if channel.is_null() || out_rank.is_null() || out_feasible.is_null() {
            set_error("null pointer");
            return QchanStatus::NullPointer;
        }
        let tol = match tolerances(rel_tol, abs_tol) {
            Ok(tol) => tol,
            Err(status) => return status,
        };
        match qchan::teleportable(&(*channel).0, assignment_of(alice), &tol) {
            Ok(feasibility) => {
                *out_rank = feasibility.rank as u32;
                *out_feasible = feasibility.feasible;
                QchanStatus::Ok
            }
            Err(err) => {
                let status = status_of_teleport_error(&err);
                set_error(err.to_string());
                status
            }
        }
    })
}

/// Transfer matrix (4x4, 32 doubles) for a channel, wiring and measurement.
///
/// # Safety
/// Handles must be live; `out_re_im` must hold 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn qchan_transfer_matrix(
    channel: *const QchanState,
    alice: QchanAliceWires,
    measurement: *const QchanMeasurement,
    out_re_im: *mut f64,
) -> QchanStatus {
    guard(|| {
        if channel.is_null() || measurement.is_null() || out_re_im.is_null() {
            set_error("null pointer");
            return QchanStatus::NullPointer;
        }
        match qchan::transfer_matrix(&(*channel).0, assignment_of(alice), &(*measurement).0) {
            Ok(transfer) => {
                write_matrix(transfer.entries(), out_re_im);
                QchanStatus::Ok
            }
            Err(err) => {
                let status = status_of_teleport_error(&err);
                set_error(err.to_string());
                status
            }
        }
    })
}

/// Bob's recovery matrix sigma_B (4x4, 32 doubles) plus diagnostics.
/// Returns `SingularTransfer` when the transfer matrix cannot be inverted;
/// in that case `out_rank` receives its numerical rank.
///
/// # Safety
/// Handles must be live; out-pointers must be valid, `out_sigma_re_im`
/// with room for 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn qchan_bob_transform(
    channel: *const QchanState,
    alice: QchanAliceWires,
    measurement: *const QchanMeasurement,
    rel_tol: f64,
    abs_tol: f64,
    out_sigma_re_im: *mut f64,
    out_condition_number: *mut f64,
    out_proportional_to_unitary: *mut bool,
    out_rank: *mut u32,
) -> QchanStatus {
    guard(|| {
        if channel.is_null()
            || measurement.is_null()
            || out_sigma_re_im.is_null()
            || out_condition_number.is_null()
            || out_proportional_to_unitary.is_null()
            || out_rank.is_null()
        {
            set_error("null pointer");
            return QchanStatus::NullPointer;
        }
        let tol = match tolerances(rel_tol, abs_tol) {
            Ok(tol) => tol,
            Err(status) => return status,
        };
        let transfer =
            match qchan::transfer_matrix(&(*channel).0, assignment_of(alice), &(*measurement).0) {
                Ok(transfer) => transfer,
                Err(err) => {
                    let status = status_of_teleport_error(&err);
                    set_error(err.to_string());
                    return status;
                }
            };
        match qchan::bob_transform(&transfer, &tol) {
            Ok(recovery) => {
                write_matrix(&recovery.sigma, out_sigma_re_im);
                *out_condition_number = recovery.condition_number;
                *out_proportional_to_unitary = recovery.proportional_to_unitary;
                *out_rank = 4;
                QchanStatus::Ok
            }
            Err(TeleportError::SingularTransfer { rank }) => {
                *out_rank = rank as u32;
                set_error(format!("transfer matrix is singular with rank {rank}"));
                QchanStatus::SingularTransfer
            }
            Err(err) => {
                let status = status_of_teleport_error(&err);
                set_error(err.to_string());
                status
            }
        }
    })
}

/// Run the full protocol for one input. `out_collapsed_re_im` receives
/// Bob's unnormalized pair (8 doubles), `out_recovered_re_im` the
/// recovered two-qubit state (8 doubles).
///
/// # Safety
/// Handles must be live; out buffers must hold 8 doubles each and the
/// scalar out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qchan_simulate(
    channel: *const QchanState,
    alice: QchanAliceWires,
    measurement: *const QchanMeasurement,
    input: *const QchanState,
    rel_tol: f64,
    abs_tol: f64,
    out_collapsed_re_im: *mut f64,
    out_probability: *mut f64,
    out_recovered_re_im: *mut f64,
    out_max_error: *mut f64,
) -> QchanStatus {
    guard(|| {
        if channel.is_null()
            || measurement.is_null()
            || input.is_null()
            || out_collapsed_re_im.is_null()
            || out_probability.is_null()
            || out_recovered_re_im.is_null()
            || out_max_error.is_null()
        {
            set_error("null pointer");
            return QchanStatus::NullPointer;
        }
        let tol = match tolerances(rel_tol, abs_tol) {
            Ok(tol) => tol,
            Err(status) => return status,
        };
        match qchan::simulate_teleportation(
            &(*channel).0,
            assignment_of(alice),
            &(*measurement).0,
            &(*input).0,
            &tol,
        ) {
            Ok(outcome) => {
                write_complex_slice(&outcome.collapsed, out_collapsed_re_im);
                *out_probability = outcome.outcome_probability;
                write_complex_slice(outcome.recovered.amplitudes(), out_recovered_re_im);
                *out_max_error = outcome.max_error;
                QchanStatus::Ok
            }
            Err(err) => {
                let status = status_of_teleport_error(&err);
                set_error(err.to_string());
                status
            }
        }
    })
}
