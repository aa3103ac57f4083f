//! Packed complex matrix products for the derivative hot paths.
//!
//! nalgebra's `*` on complex matrices falls back to a scalar loop; routing
//! the inner-loop products through `matrixmultiply::zgemm` keeps the barrier
//! Hessian assembly from dominating solve time. The adjoint variants copy the
//! conjugate transpose first (O(n^2), immaterial next to the O(n^3) product)
//! because this zgemm has no conjugation flags.

use crate::CMatrix;
use matrixmultiply::{zgemm, CGemmOption};

// `Complex<f64>` is repr(C) `{ re, im }`, layout-identical to `[f64; 2]`,
// and `DMatrix` storage is contiguous column-major.
fn ptr(a: &CMatrix) -> *const [f64; 2] {
    a.as_ptr() as *const [f64; 2]
}

fn ptr_mut(c: &mut CMatrix) -> *mut [f64; 2] {
    c.as_mut_ptr() as *mut [f64; 2]
}

const ONE: [f64; 2] = [1.0, 0.0];
const ZERO: [f64; 2] = [0.0, 0.0];

fn mul_into(c: &mut CMatrix, a: &CMatrix, b: &CMatrix, beta: [f64; 2]) {
    let (m, k) = a.shape();
    let n = b.ncols();
    debug_assert_eq!(b.nrows(), k);
    debug_assert_eq!(c.shape(), (m, n));
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            ONE,
            ptr(a),
            1,
            m as isize,
            ptr(b),
            1,
            k as isize,
            beta,
            ptr_mut(c),
            1,
            m as isize,
        );
    }
}

/// `A B`.
pub(crate) fn mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut c = CMatrix::zeros(a.nrows(), b.ncols());
    mul_into(&mut c, a, b, ZERO);
    c
}

/// `C += A B`.
pub(crate) fn mul_acc(c: &mut CMatrix, a: &CMatrix, b: &CMatrix) {
    mul_into(c, a, b, ONE);
}

/// `A* B` (conjugate transpose of the first factor).
pub(crate) fn adj_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    mul(&a.adjoint(), b)
}

/// `A B*` (conjugate transpose of the second factor).
pub(crate) fn mul_adj(a: &CMatrix, b: &CMatrix) -> CMatrix {
    mul(a, &b.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use crate::C64;

    fn random(rng: &mut Stream, m: usize, n: usize) -> CMatrix {
        CMatrix::from_fn(m, n, |_, _| C64::new(rng.normal(), rng.normal()))
    }

    #[test]
    fn products_match_operator_forms() {
        let mut rng = Stream::new(42);
        for &(m, k, n) in &[(1, 1, 1), (2, 3, 4), (5, 5, 5), (7, 1, 3), (8, 8, 8)] {
            let a = random(&mut rng, m, k);
            let b = random(&mut rng, k, n);
            let tol = 1e-13 * (k as f64);

            assert!((mul(&a, &b) - &a * &b).norm() <= tol);

            let mut c = random(&mut rng, m, n);
            let expect = &c + &a * &b;
            mul_acc(&mut c, &a, &b);
            assert!((c - expect).norm() <= tol);

            let g = random(&mut rng, k, m);
            assert!((adj_mul(&g, &b) - g.adjoint() * &b).norm() <= tol);

            let h = random(&mut rng, n, k);
            assert!((mul_adj(&a, &h) - &a * h.adjoint()).norm() <= tol);
        }
    }
}
