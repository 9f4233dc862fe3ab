//! Pure states, density matrices, tensor products and the partial trace.
//!
//! States are stored as dense amplitude vectors in big-endian basis order:
//! in `|b1 b2 ... bn>` the leftmost ket symbol `b1` is the most significant
//! bit of the basis index. Qubit indices used throughout the crate follow
//! the same convention, so qubit 0 is the leftmost symbol.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest number of qubits any state in this crate may carry.
pub const MAX_QUBITS: usize = 8;

/// Accepted deviation of `sum |amplitude|^2` from one.
pub const NORM_TOL: f64 = 1e-9;

/// Accepted Hermiticity deviation for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Name of the deterministic generator behind [`random_state`], recorded in
/// machine-readable reports: a ChaCha8 stream feeding Box-Muller normals.
pub const PRNG_NAME: &str = "chacha8-box-muller";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("amplitude vector has length {got}, expected {expected} for {qubits} qubit(s)")]
    DimensionMismatch {
        qubits: usize,
        expected: usize,
        got: usize,
    },
    #[error("state is not normalized: sum of squared amplitudes is {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("{qubits} qubit(s) outside the supported range 1..={max}", max = MAX_QUBITS)]
    ArityOverflow { qubits: usize },
    #[error("expected a {expected}-qubit state, got {got} qubit(s)")]
    ArityMismatch { expected: usize, got: usize },
    #[error("qubit index {index} out of range for {qubits} qubit(s)")]
    IndexOutOfRange { index: usize, qubits: usize },
    #[error("duplicate qubit index {index}")]
    DuplicateIndex { index: usize },
    #[error("non-finite amplitude at index {index}")]
    NonFinite { index: usize },
    #[error("matrix of dimension {dim} is not a power-of-two square")]
    BadDimension { dim: usize },
    #[error("matrix is not Hermitian: max |m - m^H| entry is {deviation}")]
    NotHermitian { deviation: f64 },
    #[error("matrix trace {trace} is not one")]
    BadTrace { trace: f64 },
}

/// A normalized n-qubit state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Build a state from amplitudes, validating length, finiteness and
    /// normalization (within [`NORM_TOL`]).
    pub fn new(amplitudes: Vec<Complex64>, num_qubits: usize) -> Result<Self, StateError> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(StateError::ArityOverflow { qubits: num_qubits });
        }
        let expected = 1usize << num_qubits;
        if amplitudes.len() != expected {
            return Err(StateError::DimensionMismatch {
                qubits: num_qubits,
                expected,
                got: amplitudes.len(),
            });
        }
        for (index, z) in amplitudes.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(StateError::NonFinite { index });
            }
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotNormalized { norm_sqr });
        }
        Ok(Self {
            num_qubits,
            amps: amplitudes,
        })
    }

    /// Build a state from an arbitrary nonzero vector, dividing by its norm.
    pub fn normalized(amplitudes: Vec<Complex64>, num_qubits: usize) -> Result<Self, StateError> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(StateError::ArityOverflow { qubits: num_qubits });
        }
        let expected = 1usize << num_qubits;
        if amplitudes.len() != expected {
            return Err(StateError::DimensionMismatch {
                qubits: num_qubits,
                expected,
                got: amplitudes.len(),
            });
        }
        for (index, z) in amplitudes.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(StateError::NonFinite { index });
            }
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr <= f64::MIN_POSITIVE {
            return Err(StateError::ZeroVector);
        }
        let norm = norm_sqr.sqrt();
        Ok(Self {
            num_qubits,
            amps: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// The computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        assert!((1..=MAX_QUBITS).contains(&num_qubits));
        assert!(index < (1 << num_qubits), "basis index out of range");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &PureState) -> Complex64 {
        assert_eq!(self.num_qubits, other.num_qubits);
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Tensor product; `self`'s qubits come first.
    pub fn tensor(&self, right: &PureState) -> Result<PureState, StateError> {
        let qubits = self.num_qubits + right.num_qubits;
        if qubits > MAX_QUBITS {
            return Err(StateError::ArityOverflow { qubits });
        }
        let mut amps = Vec::with_capacity(1 << qubits);
        for a in &self.amps {
            for b in &right.amps {
                amps.push(a * b);
            }
        }
        Ok(PureState {
            num_qubits: qubits,
            amps,
        })
    }

    /// The rank-one projector `|self><self|`.
    pub fn density_matrix(&self) -> DensityMatrix {
        let dim = self.dim();
        let entries = DMatrix::from_fn(dim, dim, |r, c| self.amps[r] * self.amps[c].conj());
        DensityMatrix::trusted(entries)
    }
}

/// A Hermitian, trace-one matrix over a power-of-two dimension.
///
/// Positive semidefiniteness holds for everything this crate constructs
/// (projectors, partial traces, Gram products) and is exercised by tests
/// through [`DensityMatrix::spectrum`] rather than revalidated on every
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validate and wrap an externally supplied matrix.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self, StateError> {
        let dim = entries.nrows();
        if entries.ncols() != dim || dim == 0 || !dim.is_power_of_two() {
            return Err(StateError::BadDimension { dim });
        }
        for (index, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(StateError::NonFinite { index });
            }
        }
        let mut herm_dev = 0.0_f64;
        for r in 0..dim {
            for c in r..dim {
                herm_dev = herm_dev.max((entries[(r, c)] - entries[(c, r)].conj()).norm());
            }
        }
        if herm_dev > HERMITIAN_TOL {
            return Err(StateError::NotHermitian {
                deviation: herm_dev,
            });
        }
        let trace: f64 = (0..dim).map(|i| entries[(i, i)].re).sum();
        if (trace - 1.0).abs() > NORM_TOL {
            return Err(StateError::BadTrace { trace });
        }
        Ok(Self { entries })
    }

    /// Wrap a matrix that is Hermitian and trace-one by construction.
    pub(crate) fn trusted(entries: DMatrix<Complex64>) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entries[(i, i)]).sum()
    }

    /// Real eigenvalues, descending by modulus. Uses the SVD of the matrix
    /// and recovers each sign from a Rayleigh quotient, which is exact
    /// enough for Hermitian input.
    pub fn spectrum(&self) -> Vec<f64> {
        let decomp = crate::linalg::svd(&self.entries);
        let dim = self.dim();
        let mut eigs = Vec::with_capacity(dim);
        for k in 0..dim {
            if decomp.sigma[k] == 0.0 {
                eigs.push(0.0);
                continue;
            }
            let v: Vec<Complex64> = (0..dim).map(|r| decomp.v[(r, k)]).collect();
            let mut rayleigh = Complex64::new(0.0, 0.0);
            for r in 0..dim {
                for c in 0..dim {
                    rayleigh += v[r].conj() * self.entries[(r, c)] * v[c];
                }
            }
            eigs.push(if rayleigh.re < 0.0 {
                -decomp.sigma[k]
            } else {
                decomp.sigma[k]
            });
        }
        eigs
    }
}

/// Trace out every qubit not listed in `keep`.
///
/// The result's row/column bits follow the order of `keep` as given, most
/// significant first. Implemented as the direct sum over the traced bits so
/// it can serve as the independent oracle for the unfolding Gram identities.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix, StateError> {
    let n = rho.num_qubits();
    let mut seen = [false; MAX_QUBITS];
    for &q in keep {
        if q >= n {
            return Err(StateError::IndexOutOfRange {
                index: q,
                qubits: n,
            });
        }
        if seen[q] {
            return Err(StateError::DuplicateIndex { index: q });
        }
        seen[q] = true;
    }

    let kept = keep.len();
    let traced: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();
    let out_dim = 1usize << kept;
    let trace_count = 1usize << traced.len();
    let entries = rho.entries();

    let mut out = DMatrix::<Complex64>::zeros(out_dim, out_dim);
    for row in 0..out_dim {
        for col in 0..out_dim {
            let mut base_row = 0usize;
            let mut base_col = 0usize;
            for (j, &q) in keep.iter().enumerate() {
                let shift = n - 1 - q;
                base_row |= ((row >> (kept - 1 - j)) & 1) << shift;
                base_col |= ((col >> (kept - 1 - j)) & 1) << shift;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..trace_count {
                let mut extra = 0usize;
                for (j, &q) in traced.iter().enumerate() {
                    extra |= ((t >> (traced.len() - 1 - j)) & 1) << (n - 1 - q);
                }
                acc += entries[(base_row | extra, base_col | extra)];
            }
            out[(row, col)] = acc;
        }
    }
    Ok(DensityMatrix::trusted(out))
}

/// Deterministic Haar-like random state: `2^(n+1)` standard-normal draws
/// (one Box-Muller pair per amplitude) from a ChaCha8 stream seeded with
/// `seed`, then normalized. Identical `(num_qubits, seed)` always yields
/// identical amplitudes.
pub fn random_state(num_qubits: usize, seed: u64) -> Result<PureState, StateError> {
    random_state_stream(num_qubits, seed, 0)
}

/// Like [`random_state`] but drawing from ChaCha8 stream `stream`, so
/// independent trials can share one seed without overlapping draws.
pub fn random_state_stream(
    num_qubits: usize,
    seed: u64,
    stream: u64,
) -> Result<PureState, StateError> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(StateError::ArityOverflow { qubits: num_qubits });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let amps: Vec<Complex64> = (0..(1usize << num_qubits))
        .map(|_| {
            let (re, im) = normal_pair(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    PureState::normalized(amps, num_qubits)
}

// Box-Muller transform; u1 is shifted into (0, 1] so the logarithm is finite.
fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = std::f64::consts::TAU * u2;
    (radius * angle.cos(), radius * angle.sin())
}

/// Largest amplitude deviation between two equal-arity states after
/// aligning the global phase of `a` to `b`.
pub fn phase_aligned_max_error(a: &PureState, b: &PureState) -> f64 {
    assert_eq!(a.num_qubits(), b.num_qubits());
    let inner: Complex64 = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes().iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    let phase = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.amplitudes()
        .iter()
        .zip(b.amplitudes().iter())
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}
