/* C interface for the qchan four-qubit channel analysis library. */

#ifndef QCHAN_H
#define QCHAN_H

/* Generated by cbindgen from qchan-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes for every FFI entry point.
typedef enum QchanStatus {
  QchanStatus_Ok = 0,
  QchanStatus_NullPointer = 1,
  QchanStatus_InvalidArgument = 2,
  QchanStatus_ParseError = 3,
  QchanStatus_NotNormalized = 4,
  QchanStatus_ArityError = 5,
  QchanStatus_SingularTransfer = 6,
  QchanStatus_InconsistentRanks = 7,
  QchanStatus_NotSeparable = 8,
  QchanStatus_ZeroProbability = 9,
  QchanStatus_Utf8Error = 10,
  QchanStatus_BufferTooSmall = 11,
  QchanStatus_InternalError = 12,
} QchanStatus;

// Channel qubit labels, leftmost ket symbol first.
typedef enum QchanQubitLabel {
  QchanQubitLabel_A = 0,
  QchanQubitLabel_B = 1,
  QchanQubitLabel_C = 2,
  QchanQubitLabel_D = 3,
} QchanQubitLabel;

// Row-qubit pairs of the three channel matrices.
typedef enum QchanPairing {
  QchanPairing_AB = 0,
  QchanPairing_AC = 1,
  QchanPairing_AD = 2,
} QchanPairing;

// Entanglement classes reported by `qchan_classify`.
typedef enum QchanClassLabel {
  QchanClassLabel_FullySeparable = 0,
  QchanClassLabel_PartiallySeparable = 1,
  QchanClassLabel_BipartitePair = 2,
  QchanClassLabel_CompletelyEntangled = 3,
} QchanClassLabel;

// Alice's channel wires, named by the joint-system wire numbers.
typedef enum QchanAliceWires {
  QchanAliceWires_Q34 = 34,
  QchanAliceWires_Q35 = 35,
  QchanAliceWires_Q36 = 36,
} QchanAliceWires;

// Opaque measurement handle.
typedef struct QchanMeasurement QchanMeasurement;

// Opaque pure-state handle.
typedef struct QchanState QchanState;

// Classification result. `bipartite_pairing` is meaningful only when
// `label` is `BipartitePair` (and is `-1` otherwise); `factors_re_im`
// holds the four single-qubit factors (two complex amplitudes each) only
// when `has_factors` is true.
typedef struct QchanClassification {
  uint32_t single_ranks[4];
  uint32_t pair_ranks[3];
  enum QchanClassLabel label;
  int32_t bipartite_pairing;
  bool separable_qubits[4];
  bool has_factors;
  double factors_re_im[16];
} QchanClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string; do not free.
const char *qchan_version(void);

// Message for the most recent failure on this thread; valid until the
// next failing call. Do not free.
const char *qchan_last_error(void);

// Parse a ket expression. With `normalize` false the expression must
// already be normalized to within 1e-6.
//
// # Safety
// `expression` must be a valid NUL-terminated string and `out_state` a
// valid pointer; the returned handle must be freed with
// `qchan_state_free`.
enum QchanStatus qchan_state_parse(const char *expression,
                                   bool normalize,
                                   struct QchanState **out_state);

// Build a state from `2^num_qubits` interleaved complex amplitudes
// (`len` counts doubles, so it must equal `2^(num_qubits+1)`).
//
// # Safety
// `re_im` must point to `len` readable doubles; `out_state` must be valid.
enum QchanStatus qchan_state_from_amplitudes(const double *re_im,
                                             size_t len,
                                             uint32_t num_qubits,
                                             struct QchanState **out_state);

// Look up a named preset state (ghz, w, bellpairs, cluster, eq19, eq23,
// sep, nonbell).
//
// # Safety
// `name` must be a valid NUL-terminated string and `out_state` valid.
enum QchanStatus qchan_state_preset(const char *name, struct QchanState **out_state);

// Deterministic seeded random state.
//
// # Safety
// `out_state` must be a valid pointer.
enum QchanStatus qchan_state_random(uint32_t num_qubits,
                                    uint64_t seed,
                                    struct QchanState **out_state);

// Number of qubits, or zero for a null handle.
//
// # Safety
// `state` must be null or a live handle.
uint32_t qchan_state_num_qubits(const struct QchanState *state);

// Copy the amplitudes into `out_re_im` (`capacity` counts doubles and
// must be at least `2^(num_qubits+1)`).
//
// # Safety
// `state` must be a live handle; `out_re_im` must have room for
// `capacity` doubles.
enum QchanStatus qchan_state_amplitudes(const struct QchanState *state,
                                        double *out_re_im,
                                        size_t capacity);

// Render the state as a ket expression; free the result with
// `qchan_string_free`.
//
// # Safety
// `state` must be a live handle and `out_text` a valid pointer.
enum QchanStatus qchan_state_format(const struct QchanState *state,
                                    uint32_t precision,
                                    char **out_text);

// # Safety
// `state` must be null or a handle returned by this library, not yet
// freed.
void qchan_state_free(struct QchanState *state);

// # Safety
// `text` must be null or a string returned by this library, not yet
// freed.
void qchan_string_free(char *text);

// 2x8 single-qubit unfolding into 32 doubles (row-major interleaved).
//
// # Safety
// `state` must be a live handle, `out_re_im` must hold 32 doubles.
enum QchanStatus qchan_single_unfolding(const struct QchanState *state,
                                        enum QchanQubitLabel label,
                                        double *out_re_im);

// 4x4 channel matrix into 32 doubles (row-major interleaved).
//
// # Safety
// `state` must be a live handle, `out_re_im` must hold 32 doubles.
enum QchanStatus qchan_channel_matrix(const struct QchanState *state,
                                      enum QchanPairing pairing,
                                      double *out_re_im);

// Numerical rank of an arbitrary complex matrix supplied as row-major
// interleaved doubles.
//
// # Safety
// `re_im` must hold `2 * rows * cols` doubles; `out_rank` must be valid.
enum QchanStatus qchan_matrix_rank(const double *re_im,
                                   size_t rows,
                                   size_t cols,
                                   double rel_tol,
                                   double abs_tol,
                                   uint32_t *out_rank);

// Classify a four-qubit state.
//
// # Safety
// `state` must be a live handle and `out` a valid pointer.
enum QchanStatus qchan_classify(const struct QchanState *state,
                                double rel_tol,
                                double abs_tol,
                                struct QchanClassification *out);

// Bell-product measurement with indices in 1..=4.
//
// # Safety
// `out_measurement` must be a valid pointer; free the handle with
// `qchan_measurement_free`.
enum QchanStatus qchan_measurement_bell(uint32_t i,
                                        uint32_t j,
                                        struct QchanMeasurement **out_measurement);

// Use a four-qubit state's amplitudes as a projective measurement.
//
// # Safety
// `state` must be a live handle and `out_measurement` valid.
enum QchanStatus qchan_measurement_from_state(const struct QchanState *state,
                                              struct QchanMeasurement **out_measurement);

// # Safety
// `measurement` must be null or a handle returned by this library, not
// yet freed.
void qchan_measurement_free(struct QchanMeasurement *measurement);

// Rank-four feasibility of a channel for Alice's wiring.
//
// # Safety
// `channel` must be a live handle; `out_rank` and `out_feasible` valid.
enum QchanStatus qchan_teleport_check(const struct QchanState *channel,
                                      enum QchanAliceWires alice,
                                      double rel_tol,
                                      double abs_tol,
                                      uint32_t *out_rank,
                                      bool *out_feasible);

// Transfer matrix (4x4, 32 doubles) for a channel, wiring and measurement.
//
// # Safety
// Handles must be live; `out_re_im` must hold 32 doubles.
enum QchanStatus qchan_transfer_matrix(const struct QchanState *channel,
                                       enum QchanAliceWires alice,
                                       const struct QchanMeasurement *measurement,
                                       double *out_re_im);

// Bob's recovery matrix sigma_B (4x4, 32 doubles) plus diagnostics.
// Returns `SingularTransfer` when the transfer matrix cannot be inverted;
// in that case `out_rank` receives its numerical rank.
//
// # Safety
// Handles must be live; out-pointers must be valid, `out_sigma_re_im`
// with room for 32 doubles.
enum QchanStatus qchan_bob_transform(const struct QchanState *channel,
                                     enum QchanAliceWires alice,
                                     const struct QchanMeasurement *measurement,
                                     double rel_tol,
                                     double abs_tol,
                                     double *out_sigma_re_im,
                                     double *out_condition_number,
                                     bool *out_proportional_to_unitary,
                                     uint32_t *out_rank);

// Run the full protocol for one input. `out_collapsed_re_im` receives
// Bob's unnormalized pair (8 doubles), `out_recovered_re_im` the
// recovered two-qubit state (8 doubles).
//
// # Safety
// Handles must be live; out buffers must hold 8 doubles each and the
// scalar out-pointers must be valid.
enum QchanStatus qchan_simulate(const struct QchanState *channel,
                                enum QchanAliceWires alice,
                                const struct QchanMeasurement *measurement,
                                const struct QchanState *input,
                                double rel_tol,
                                double abs_tol,
                                double *out_collapsed_re_im,
                                double *out_probability,
                                double *out_recovered_re_im,
                                double *out_max_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCHAN_H */
