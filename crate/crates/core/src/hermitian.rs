//! Dense complex Hermitian linear algebra.
//!
//! The [`HermitianMatrix`] newtype guarantees exact Hermitian symmetry (the
//! lower triangle is stored as the conjugate of the upper triangle and the
//! diagonal is real), so downstream spectral code never re-checks it.
//! Spectral functions and their Frechet derivatives are evaluated in the
//! eigenbasis with divided-difference kernels; near-degenerate eigenvalue
//! pairs switch to confluent (derivative-based) kernels under the relative
//! gap rule in [`crate::scalar`].

use crate::scalar::{dd1, dd2, dd3, ScalarFunction};
use crate::{C64, CMatrix, Error, RMatrix, Result};

/// Relative asymmetry above which [`hermitize`] refuses to average.
pub const HERMITIZE_TOL: f64 = 1e-8;

/// Dense complex Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    /// Wrap a matrix that is already numerically Hermitian.
    ///
    /// Rejects non-square or non-finite input, and input whose relative
    /// asymmetry `||M - M*|| / max(1, ||M||)` exceeds [`HERMITIZE_TOL`].
    /// Below that the skew part is averaged away exactly.
    pub fn new(m: CMatrix) -> Result<Self> {
        hermitize(&m)
    }

    /// Build from an entry closure; the strict upper triangle and diagonal are
    /// consulted, the rest mirrored. Diagonal imaginary parts are dropped.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(f(i, i).re, 0.0);
            for j in (i + 1)..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        HermitianMatrix { m }
    }

    /// Zero matrix.
    pub fn zeros(n: usize) -> Self {
        HermitianMatrix {
            m: CMatrix::zeros(n, n),
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        HermitianMatrix {
            m: CMatrix::identity(n, n),
        }
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(d: &[f64]) -> Self {
        HermitianMatrix::from_fn(d.len(), |i, j| {
            if i == j {
                C64::new(d[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// View of the underlying storage.
    pub fn as_matrix(&self) -> &CMatrix {
        &self.m
    }

    /// Consume into the underlying storage.
    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    /// Side length.
    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// Trace (exactly real by the diagonal invariant).
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// Trace inner product `<A, B> = tr[A B]`, real for Hermitian arguments.
    pub fn inner(&self, other: &HermitianMatrix) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = 0.0;
        for (a, b) in self.m.iter().zip(other.m.iter()) {
            acc += a.re * b.re + a.im * b.im;
        }
        acc
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    /// Entrywise complex conjugate (equals the transpose).
    pub fn conjugate(&self) -> HermitianMatrix {
        HermitianMatrix {
            m: self.m.map(|z| z.conj()),
        }
    }

    /// `self + t * other`.
    pub fn add_scaled(&self, t: f64, other: &HermitianMatrix) -> HermitianMatrix {
        let mut m = self.m.clone();
        m.zip_apply(&other.m, |a, b| *a += b * C64::new(t, 0.0));
        HermitianMatrix { m }
    }

    /// `t * self`.
    pub fn scale(&self, t: f64) -> HermitianMatrix {
        HermitianMatrix {
            m: self.m.map(|z| z * t),
        }
    }

    /// Eigendecomposition; see [`eigh`].
    pub fn eigh(&self) -> Result<EigenDecomposition> {
        eigh(self)
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigh()?.eigenvalues[0])
    }
}

impl std::ops::Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            m: &self.m + &rhs.m,
        }
    }
}

impl std::ops::Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            m: &self.m - &rhs.m,
        }
    }
}

/// Symmetrize `(M + M*) / 2` after validating shape, finiteness, and that the
/// relative asymmetry does not exceed [`HERMITIZE_TOL`].
pub fn hermitize(m: &CMatrix) -> Result<HermitianMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NotFinite);
    }
    let n = m.nrows();
    let mut skew: f64 = 0.0;
    for i in 0..n {
        skew += m[(i, i)].im * m[(i, i)].im;
        for j in (i + 1)..n {
            skew += (m[(i, j)] - m[(j, i)].conj()).norm_sqr() / 2.0;
        }
    }
    let skew = (2.0 * skew).sqrt();
    let scale = m.norm().max(1.0);
    if skew > HERMITIZE_TOL * scale {
        return Err(Error::NotHermitian {
            asymmetry: skew / scale,
            limit: HERMITIZE_TOL,
        });
    }
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    Ok(HermitianMatrix { m: out })
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues in ascending
/// order and a unitary whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix of eigenvectors (column `k` pairs with `eigenvalues[k]`).
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    /// `U diag(v) U*` for a real vector `v` in the eigenbasis.
    pub fn recombine(&self, vals: &[f64]) -> HermitianMatrix {
        let n = self.eigenvalues.len();
        debug_assert_eq!(vals.len(), n);
        let mut scaled = self.vectors.clone();
        for k in 0..n {
            let c = C64::new(vals[k], 0.0);
            for i in 0..n {
                scaled[(i, k)] *= c;
            }
        }
        let m = crate::gemm::mul_adj(&scaled, &self.vectors);
        // Products of unitaries with real spectra are Hermitian up to rounding;
        // re-impose the invariant exactly.
        hermitian_part_unchecked(&m)
    }

    /// Reassemble the original matrix.
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.recombine(&self.eigenvalues)
    }

    /// Conjugate `A` into the eigenbasis: `U* A U`.
    pub fn to_basis(&self, a: &CMatrix) -> CMatrix {
        crate::gemm::adj_mul(&self.vectors, &crate::gemm::mul(a, &self.vectors))
    }

    /// Conjugate `A` back from the eigenbasis: `U A U*`.
    pub fn from_basis(&self, a: &CMatrix) -> CMatrix {
        crate::gemm::mul_adj(&crate::gemm::mul(&self.vectors, a), &self.vectors)
    }
}

/// Hermitian part `(M + M*) / 2` with no asymmetry check; for results that are
/// Hermitian up to rounding by construction.
pub(crate) fn hermitian_part_unchecked(m: &CMatrix) -> HermitianMatrix {
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    HermitianMatrix { m: out }
}

/// Maximum cyclic Jacobi sweeps before the eigensolver reports failure.
/// Convergence is quadratic; well-posed inputs finish in under a dozen.
const EIGH_MAX_SWEEPS: usize = 64;

/// One Jacobi rotation: a plane unitary on rows/columns `p < q` chosen so the
/// conjugated matrix has a zero `(p, q)` entry. The phase of `a[(p, q)]` is
/// absorbed first, reducing the pivot block to the real symmetric case.
///
/// Operates on column-major storage. Only the two pivot columns are computed
/// (contiguously, via the `colp`/`colq` scratch copies); the pivot rows follow
/// by Hermitian mirroring, which halves the arithmetic of the textbook
/// two-sided update.
#[allow(clippy::too_many_arguments)]
fn jacobi_rotate(
    a: &mut [C64],
    v: &mut [C64],
    n: usize,
    p: usize,
    q: usize,
    colp: &mut [C64],
    colq: &mut [C64],
) {
    let apq = a[q * n + p];
    let m = apq.norm();
    if m == 0.0 {
        a[q * n + p] = C64::new(0.0, 0.0);
        a[p * n + q] = C64::new(0.0, 0.0);
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let u = apq.unscale(m);
    let tau = (aqq - app) / (2.0 * m);
    // Smaller-magnitude root of t^2 + 2 tau t - 1 = 0; stays in (-1, 1] so the
    // rotation angle never exceeds pi/4 and convergence is monotone.
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // Plane unitary G with columns (c, s)ᵀ and (-s conj(u), c conj(u))ᵀ; the
    // new pivot columns of A = G* A G and of V = V G share one formula.
    let suc = u.conj() * s;
    let cuc = u.conj() * c;
    colp.copy_from_slice(&a[p * n..p * n + n]);
    colq.copy_from_slice(&a[q * n..q * n + n]);
    for j in 0..n {
        a[p * n + j] = colp[j] * c - suc * colq[j];
        a[q * n + j] = colp[j] * s + cuc * colq[j];
    }
    // Pivot rows mirror the new columns; the 2x2 block takes the values the
    // rotation guarantees algebraically (zero pivot, shifted real diagonal).
    for j in 0..n {
        if j != p && j != q {
            a[j * n + p] = a[p * n + j].conj();
            a[j * n + q] = a[q * n + j].conj();
        }
    }
    a[q * n + p] = C64::new(0.0, 0.0);
    a[p * n + q] = C64::new(0.0, 0.0);
    a[p * n + p] = C64::new(app - t * m, 0.0);
    a[q * n + q] = C64::new(aqq + t * m, 0.0);
    colp.copy_from_slice(&v[p * n..p * n + n]);
    colq.copy_from_slice(&v[q * n..q * n + n]);
    for j in 0..n {
        v[p * n + j] = colp[j] * c - suc * colq[j];
        v[q * n + j] = colp[j] * s + cuc * colq[j];
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// Cyclic Jacobi on the complex matrix itself. The accumulated transform is a
/// product of elementary unitaries, so the eigenvectors stay orthonormal and
/// each stays paired with the diagonal entry it produced — including for
/// clustered or near-zero spectra, where shifted tridiagonal solvers can hand
/// back crossed eigenvalue/eigenvector pairs.
pub fn eigh(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let mut a = h.m.clone();
    let mut v = CMatrix::identity(n, n);
    let scale = a.norm();
    // Rounding from later rotations re-fills zeroed entries at the level of
    // eps times the row norms, so the resting off-diagonal mass grows with n.
    let tol = f64::EPSILON * scale * n as f64;
    let mut colp = vec![C64::new(0.0, 0.0); n];
    let mut colq = vec![C64::new(0.0, 0.0); n];
    let mut converged = false;
    {
        let ad = a.as_mut_slice();
        let vd = v.as_mut_slice();
        for _ in 0..EIGH_MAX_SWEEPS {
            let mut off2 = 0.0;
            for q in 0..n {
                for p in 0..q {
                    off2 += ad[q * n + p].norm_sqr();
                }
            }
            if (2.0 * off2).sqrt() <= tol {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(ad, vd, n, p, q, &mut colp, &mut colq);
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigenFailed);
    }
    if (0..n).any(|k| !a[(k, k)].re.is_finite()) {
        return Err(Error::EigenFailed);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
    })
}

/// Apply a scalar function spectrally: `f(X) = U f(L) U*`.
///
/// Errors if any eigenvalue falls outside the domain of `f`.
pub fn spectral_apply(f: &ScalarFunction, x: &HermitianMatrix) -> Result<HermitianMatrix> {
    let e = x.eigh()?;
    let vals = e
        .eigenvalues
        .iter()
        .map(|&t| f.eval(t))
        .collect::<Result<Vec<f64>>>()?;
    Ok(e.recombine(&vals))
}

/// Divided-difference tables of a scalar function on a fixed ascending
/// eigenvalue grid. First and second orders are tabulated; third order is
/// evaluated on demand through the same sorted recursion.
pub(crate) struct DdTables {
    evals: Vec<f64>,
    f: ScalarFunction,
    d1: RMatrix,
    d2: Vec<f64>,
    n: usize,
}

impl DdTables {
    pub(crate) fn new(f: &ScalarFunction, evals: &[f64]) -> Result<Self> {
        let n = evals.len();
        let mut d1m = RMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = dd1(f, evals[i], evals[j])?;
                d1m[(i, j)] = v;
                d1m[(j, i)] = v;
            }
        }
        let mut d2 = vec![0.0; n * n * n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    // Symmetric in all arguments; compute once per sorted triple.
                    let (a, b, c) = sort3(i, k, j);
                    if (i, k, j) == (a, b, c) {
                        d2[(i * n + k) * n + j] = dd2(f, evals[a], evals[b], evals[c])?;
                    }
                }
            }
        }
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    let (a, b, c) = sort3(i, k, j);
                    d2[(i * n + k) * n + j] = d2[(a * n + b) * n + c];
                }
            }
        }
        Ok(DdTables {
            evals: evals.to_vec(),
            f: *f,
            d1: d1m,
            d2,
            n,
        })
    }

    #[inline]
    pub(crate) fn k1(&self, i: usize, j: usize) -> f64 {
        self.d1[(i, j)]
    }

    #[inline]
    pub(crate) fn k2(&self, i: usize, k: usize, j: usize) -> f64 {
        self.d2[(i * self.n + k) * self.n + j]
    }

    pub(crate) fn k3(&self, i: usize, k: usize, l: usize, j: usize) -> Result<f64> {
        dd3(
            &self.f,
            self.evals[i],
            self.evals[k],
            self.evals[l],
            self.evals[j],
        )
    }

    /// First Frechet derivative in the eigenbasis: entrywise kernel product.
    pub(crate) fn apply_dd1(&self, a: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = a[(i, j)] * self.d1[(i, j)];
            }
        }
        out
    }

    /// Symmetrized second Frechet derivative in the eigenbasis:
    /// `C_ij = sum_k k2(i,k,j) (A_ik B_kj + B_ik A_kj)`.
    pub(crate) fn apply_dd2(&self, a: &CMatrix, b: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += (a[(i, k)] * b[(k, j)] + b[(i, k)] * a[(k, j)]) * self.k2(i, k, j);
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Third Frechet derivative along a single direction, in the eigenbasis:
    /// `C_ij = 6 sum_{k,l} k3(i,k,l,j) V_ik V_kl V_lj`.
    pub(crate) fn apply_dd3(&self, v: &CMatrix) -> Result<CMatrix> {
        let n = self.n;
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    for l in 0..n {
                        acc += v[(i, k)] * v[(k, l)] * v[(l, j)] * self.k3(i, k, l, j)?;
                    }
                }
                out[(i, j)] = acc * 6.0;
            }
        }
        Ok(out)
    }

    /// Adjoint contraction of the second divided difference against a fixed
    /// Hermitian `W`: returns `G` with `<G, B> = <W, D2f[V, B]>` for all
    /// Hermitian `B` (all matrices expressed in the eigenbasis).
    pub(crate) fn contract_dd2_against(&self, w: &CMatrix, v: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut g = CMatrix::zeros(n, n);
        // <W, D2f[V,B]> = sum_{ikj} conj(W_ij) k2(i,k,j) (V_ik B_kj + B_ik V_kj).
        // Reading off the coefficient of each B entry in the sesquilinear
        // pairing tr[G* B]:
        //   G_kj += sum_i k2(i,k,j) W_ij conj(V_ik)
        //   G_ik += sum_j k2(i,k,j) W_ij conj(V_kj)
        // Both passes keep `j` innermost so the d2 table (the one O(n^3)
        // object) streams contiguously; slice indexing is column-major.
        let gs = g.as_mut_slice();
        let ws = w.as_slice();
        let vs = v.as_slice();
        for i in 0..n {
            for k in 0..n {
                let vc = vs[k * n + i].conj();
                let base = (i * n + k) * n;
                for j in 0..n {
                    gs[j * n + k] += ws[j * n + i] * vc * self.d2[base + j];
                }
            }
        }
        for i in 0..n {
            for k in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                let base = (i * n + k) * n;
                for j in 0..n {
                    acc += ws[j * n + i] * vs[j * n + k].conj() * self.d2[base + j];
                }
                gs[k * n + i] += acc;
            }
        }
        g
    }
}

fn sort3(a: usize, b: usize, c: usize) -> (usize, usize, usize) {
    let mut v = [a, b, c];
    v.sort_unstable();
    (v[0], v[1], v[2])
}

/// Frechet derivative of a spectral function.
///
/// Order 1 takes one direction and returns `Df(X)[H]`; order 2 takes two and
/// returns the symmetric bilinear `D2f(X)[H1, H2]`. Higher orders are not
/// exposed here; third directional derivatives of trace functions are
/// assembled in [`crate::tracefn`] from divided differences directly.
pub fn frechet_derivative(
    f: &ScalarFunction,
    x: &HermitianMatrix,
    order: usize,
    directions: &[HermitianMatrix],
) -> Result<HermitianMatrix> {
    if order == 0 || order > 2 {
        return Err(Error::UnsupportedOrder {
            order,
            supported: "1 or 2",
        });
    }
    if directions.len() != order {
        return Err(Error::DimensionMismatch {
            expected: order,
            got: directions.len(),
        });
    }
    for d in directions {
        if d.dim() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                got: d.dim(),
            });
        }
    }
    let e = x.eigh()?;
    let tables = DdTables::new(f, &e.eigenvalues)?;
    let out = match order {
        1 => {
            let h = e.to_basis(directions[0].as_matrix());
            tables.apply_dd1(&h)
        }
        _ => {
            let h1 = e.to_basis(directions[0].as_matrix());
            let h2 = e.to_basis(directions[1].as_matrix());
            tables.apply_dd2(&h1, &h2)
        }
    };
    Ok(hermitian_part_unchecked(&e.from_basis(&out)))
}

/// Kronecker product of Hermitian matrices (Hermitian again).
pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    hermitian_part_unchecked(&a.as_matrix().kronecker(b.as_matrix()))
}

/// Block-diagonal direct sum.
pub fn direct_sum(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let mut m = CMatrix::zeros(na + nb, na + nb);
    m.view_mut((0, 0), (na, na)).copy_from(a.as_matrix());
    m.view_mut((na, na), (nb, nb)).copy_from(b.as_matrix());
    HermitianMatrix { m }
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOut {
    /// Remove the first factor: `tr1(X (x) Y) = tr[X] Y`.
    First,
    /// Remove the second factor: `tr2(X (x) Y) = tr[Y] X`.
    Second,
}

/// Partial trace of a matrix on a bipartite space with factor dimensions
/// `(d1, d2)` (composite index `i * d2 + k`).
pub fn partial_trace(
    m: &HermitianMatrix,
    out: TraceOut,
    dims: (usize, usize),
) -> Result<HermitianMatrix> {
    let (d1, d2) = dims;
    if d1 * d2 != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            got: m.dim(),
        });
    }
    let src = m.as_matrix();
    match out {
        TraceOut::First => {
            let mut t = CMatrix::zeros(d2, d2);
            for k in 0..d2 {
                for l in 0..d2 {
                    let mut acc = C64::new(0.0, 0.0);
                    for i in 0..d1 {
                        acc += src[(i * d2 + k, i * d2 + l)];
                    }
                    t[(k, l)] = acc;
                }
            }
            Ok(hermitian_part_unchecked(&t))
        }
        TraceOut::Second => {
            let mut t = CMatrix::zeros(d1, d1);
            for i in 0..d1 {
                for j in 0..d1 {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..d2 {
                        acc += src[(i * d2 + k, j * d2 + k)];
                    }
                    t[(i, j)] = acc;
                }
            }
            Ok(hermitian_part_unchecked(&t))
        }
    }
}

/// Random-matrix helpers shared by tests, the verifier, and the experiment
/// generators. All draws come from the deterministic stream.
pub mod random {
    use super::*;
    use crate::rng::Stream;

    /// Ginibre-style matrix: independent standard complex normal entries.
    pub fn complex_gaussian(rng: &mut Stream, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| C64::new(rng.normal(), rng.normal()))
    }

    /// Random Hermitian matrix with O(1) entries.
    pub fn hermitian(rng: &mut Stream, n: usize) -> HermitianMatrix {
        let g = complex_gaussian(rng, n);
        hermitian_part_unchecked(&((&g + g.adjoint()) * C64::new(0.5, 0.0)))
    }

    /// Random Hermitian positive definite matrix `G G* + floor * I`.
    pub fn positive_definite(rng: &mut Stream, n: usize, floor: f64) -> HermitianMatrix {
        let g = complex_gaussian(rng, n);
        let mut m = &g * g.adjoint();
        m /= C64::new(n as f64, 0.0);
        for i in 0..n {
            m[(i, i)] += C64::new(floor, 0.0);
        }
        hermitian_part_unchecked(&m)
    }

    /// Random density matrix (unit trace positive definite).
    pub fn density(rng: &mut Stream, n: usize) -> HermitianMatrix {
        let p = positive_definite(rng, n, 1e-3);
        p.scale(1.0 / p.trace())
    }
}
