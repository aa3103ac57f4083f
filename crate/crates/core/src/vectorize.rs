//! Isometric real vectorization of Hermitian matrices.
//!
//! An n x n complex Hermitian matrix has n^2 real degrees of freedom. The
//! coordinate order is fixed and documented because problem files and solver
//! vectors expose it directly:
//!
//! 1. the n real diagonal entries `X[0,0], ..., X[n-1,n-1]`;
//! 2. for each off-diagonal pair `i < j` in lexicographic order `(0,1),
//!    (0,2), ..., (0,n-1), (1,2), ...`: first `sqrt(2) * Re X[i,j]`, then
//!    `sqrt(2) * Im X[i,j]`.
//!
//! The sqrt(2) weights make the map a linear isometry: the trace inner
//! product of matrices equals the Euclidean dot product of their vectors, so
//! gradients and Hessians can move between the two pictures without extra
//! scaling.

use crate::hermitian::HermitianMatrix;
use crate::{C64, Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Vector length of an n x n Hermitian matrix.
pub fn vec_len(n: usize) -> usize {
    n * n
}

/// Write the coordinates of `x` into `out` (length must be `n^2`).
pub fn vectorize_into(x: &HermitianMatrix, out: &mut [f64]) {
    let n = x.dim();
    debug_assert_eq!(out.len(), vec_len(n));
    let m = x.as_matrix();
    for i in 0..n {
        out[i] = m[(i, i)].re;
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            out[k] = SQRT2 * m[(i, j)].re;
            out[k + 1] = SQRT2 * m[(i, j)].im;
            k += 2;
        }
    }
}

/// Coordinates of `x` as a fresh vector.
pub fn vectorize(x: &HermitianMatrix) -> Vec<f64> {
    let mut out = vec![0.0; vec_len(x.dim())];
    vectorize_into(x, &mut out);
    out
}

/// Rebuild an n x n Hermitian matrix from its coordinates.
pub fn unvectorize(v: &[f64], n: usize) -> Result<HermitianMatrix> {
    if v.len() != vec_len(n) {
        return Err(Error::DimensionMismatch {
            expected: vec_len(n),
            got: v.len(),
        });
    }
    let mut m = crate::CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(v[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = C64::new(v[k] / SQRT2, v[k + 1] / SQRT2);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    HermitianMatrix::new(m)
}

/// Index of the coordinate holding the diagonal entry `X[i,i]`.
pub fn diag_index(_n: usize, i: usize) -> usize {
    i
}

/// Indices of the (real, imag) coordinates for the off-diagonal entry
/// `X[i,j]`, `i < j`.
pub fn offdiag_indices(n: usize, i: usize, j: usize) -> (usize, usize) {
    debug_assert!(i < j && j < n);
    // Pairs (0,1)..(0,n-1) come first: row i starts after
    // sum_{r<i} (n-1-r) earlier pairs.
    let pairs_before = i * n - i * (i + 1) / 2 + (j - i - 1);
    let k = n + 2 * pairs_before;
    (k, k + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::random;
    use crate::rng::Stream;

    #[test]
    fn round_trip_is_exact() {
        let mut rng = Stream::new(23);
        for n in [1usize, 2, 3, 5] {
            let x = random::hermitian(&mut rng, n);
            let v = vectorize(&x);
            assert_eq!(v.len(), n * n);
            let back = unvectorize(&v, n).unwrap();
            assert!((&back - &x).norm() < 1e-15 * x.norm().max(1.0));
        }
    }

    #[test]
    fn inner_products_are_preserved() {
        let mut rng = Stream::new(29);
        let a = random::hermitian(&mut rng, 4);
        let b = random::hermitian(&mut rng, 4);
        let va = vectorize(&a);
        let vb = vectorize(&b);
        let dot: f64 = va.iter().zip(&vb).map(|(x, y)| x * y).sum();
        assert!((dot - a.inner(&b)).abs() < 1e-12 * a.norm() * b.norm());
    }

    #[test]
    fn coordinate_order_is_pinned() {
        // 2x2 matrix [[1, 2+3i], [2-3i, 4]] -> [1, 4, 2*sqrt2, 3*sqrt2].
        let x = HermitianMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => C64::new(1.0, 0.0),
            (1, 1) => C64::new(4.0, 0.0),
            _ => C64::new(2.0, 3.0),
        });
        let v = vectorize(&x);
        assert_eq!(v[0], 1.0);
        assert_eq!(v[1], 4.0);
        assert!((v[2] - 2.0 * SQRT2).abs() < 1e-15);
        assert!((v[3] - 3.0 * SQRT2).abs() < 1e-15);
    }

    #[test]
    fn index_helpers_match_layout() {
        let n = 4;
        let mut x = HermitianMatrix::zeros(n);
        let v0 = vectorize(&x);
        assert!(v0.iter().all(|&t| t == 0.0));
        for i in 0..n {
            for j in (i + 1)..n {
                x = HermitianMatrix::from_fn(n, |a, b| {
                    if (a, b) == (i, j) {
                        C64::new(1.0, -2.0)
                    } else if (a, b) == (j, i) {
                        C64::new(1.0, 2.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                let v = vectorize(&x);
                let (re, im) = offdiag_indices(n, i, j);
                assert!((v[re] - SQRT2).abs() < 1e-15);
                assert!((v[im] + 2.0 * SQRT2).abs() < 1e-15);
                assert_eq!(v.iter().filter(|&&t| t != 0.0).count(), 2);
            }
        }
        for i in 0..n {
            let x = HermitianMatrix::from_diagonal(
                &(0..n).map(|k| if k == i { 7.0 } else { 0.0 }).collect::<Vec<_>>(),
            );
            let v = vectorize(&x);
            assert_eq!(v[diag_index(n, i)], 7.0);
        }
    }

    #[test]
    fn wrong_length_errors() {
        assert!(unvectorize(&[1.0, 2.0, 3.0], 2).is_err());
    }
}
