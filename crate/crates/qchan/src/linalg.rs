//! Complex singular value decomposition via one-sided Jacobi rotations.
//!
//! All matrices in this crate are at most 16x16, so a short, numerically
//! careful Jacobi sweep beats a general-purpose bidiagonalization here and
//! keeps rank decisions trustworthy for exactly rank-deficient inputs.

use nalgebra::DMatrix;
use num_complex::Complex64;

const MAX_SWEEPS: usize = 64;

/// Result of `svd`: `a = u * diag(sigma) * v.adjoint()` with `sigma` sorted
/// in descending order. `u` is m x n; columns whose singular value is zero
/// are left as zero vectors. `v` is n x n unitary.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<Complex64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<Complex64>,
}

/// Decompose a complex matrix.
pub fn svd(a: &DMatrix<Complex64>) -> Svd {
    let m = a.nrows();
    let n = a.ncols();
    let mut b = a.clone();
    let mut v = DMatrix::<Complex64>::identity(n, n);

    // The Frobenius norm is invariant under the column rotations, so it is
    // a stable scale reference. Columns whose norm falls below the machine
    // noise floor of that scale carry no rank information and would only
    // make the sweep chase rounding noise, so they are left alone.
    let frobenius_sqr: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let floor_sqr = f64::EPSILON * f64::EPSILON * frobenius_sqr;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let mut npp = 0.0;
                let mut nqq = 0.0;
                let mut cpq = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    npp += b[(r, p)].norm_sqr();
                    nqq += b[(r, q)].norm_sqr();
                    cpq += b[(r, p)].conj() * b[(r, q)];
                }
                if npp <= floor_sqr || nqq <= floor_sqr {
                    continue;
                }
                let off = cpq.norm();
                if off <= f64::EPSILON * (npp * nqq).sqrt() || off == 0.0 {
                    continue;
                }
                rotated = true;

                // Factor out the phase of the off-diagonal Gram entry, then
                // apply the classic real Jacobi rotation.
                let phase_conj = (cpq / off).conj();
                let tau = (nqq - npp) / (2.0 * off);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;

                for r in 0..m {
                    let bp = b[(r, p)];
                    let bq = b[(r, q)];
                    b[(r, p)] = cs * bp - sn * (phase_conj * bq);
                    b[(r, q)] = sn * bp + cs * (phase_conj * bq);
                }
                for r in 0..n {
                    let vp = v[(r, p)];
                    let vq = v[(r, q)];
                    v[(r, p)] = cs * vp - sn * (phase_conj * vq);
                    v[(r, q)] = sn * vp + cs * (phase_conj * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort them descending and carry
    // the permutation over to v.
    let mut norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|r| b[(r, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut u = DMatrix::<Complex64>::zeros(m, n);
    let mut v_sorted = DMatrix::<Complex64>::zeros(n, n);
    let mut sigma = vec![0.0; n];
    for (dst, &src) in order.iter().enumerate() {
        sigma[dst] = norms[src];
        for r in 0..n {
            v_sorted[(r, dst)] = v[(r, src)];
        }
        if norms[src] > 0.0 {
            for r in 0..m {
                u[(r, dst)] = b[(r, src)] / norms[src];
            }
        }
    }
    norms.clear();

    Svd {
        u,
        sigma,
        v: v_sorted,
    }
}

impl Svd {
    /// Inverse of the decomposed matrix, `v * diag(1/sigma) * u.adjoint()`.
    /// The caller must have checked that the matrix is square and that every
    /// singular value is safely above its noise floor.
    pub fn inverse(&self) -> DMatrix<Complex64> {
        let n = self.v.nrows();
        let mut scaled_ut = self.u.adjoint();
        for (k, &s) in self.sigma.iter().enumerate().take(n) {
            for c in 0..scaled_ut.ncols() {
                scaled_ut[(k, c)] /= Complex64::new(s, 0.0);
            }
        }
        &self.v * scaled_ut
    }

    /// Column `k` of `u` as an owned vector.
    pub fn left_vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.u.nrows()).map(|r| self.u[(r, k)]).collect()
    }
}

/// Singular values only, sorted descending.
pub fn singular_values(a: &DMatrix<Complex64>) -> Vec<f64> {
    svd(a).sigma
}

/// Largest entrywise modulus of `a - b`.
pub fn max_entry_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus of `a`.
pub fn max_entry_norm(a: &DMatrix<Complex64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
