//! Sandwiched Renyi trace functions and their derivative oracles.
//!
//! The central object is
//!
//! ```text
//! Psi(X, Y) = tr[ g( s(Y) X s(Y) ) ],        s = h^(1/2),
//! ```
//!
//! which for `g = x^alpha`, `h = x^((1-alpha)/alpha)` is the trace term
//! `Psi_alpha(X, Y) = tr[(Y^((1-alpha)/2alpha) X Y^((1-alpha)/2alpha))^alpha]`
//! of the sandwiched Renyi divergence
//! `D_alpha(X, Y) = log(Psi_alpha(X, Y)) / (alpha - 1)`, together with the
//! homogeneous perspective
//! `PD_alpha(u, X, Y) = u * D_alpha(X/u, Y/u) = u * log(Psi/u) / (alpha-1)`.
//!
//! All derivatives up to third order are exact (no finite differences):
//! writing `S = s(Y)`, `M = S X S`, `P = g'(M)` and, along a direction
//! `d = (H, V)`, `S1 = Ds(Y)[V]`, `S2 = D2s(Y)[V,V]`, `S3 = D3s(Y)[V,V,V]`,
//! the chain rule gives
//!
//! ```text
//! M1 = S1 X S + S X S1 + S H S
//! M2 = S2 X S + S X S2 + 2 S1 X S1 + 2 S1 H S + 2 S H S1
//! M3 = S3 X S + S X S3 + 3(S2 X S1 + S1 X S2) + 3(S2 H S + S H S2) + 6 S1 H S1
//!
//! D1 Psi = <P, M1>
//! D2 Psi = <Dg'(M)[M1], M1> + <P, M2>
//! D3 Psi = <D2g'(M)[M1,M1], M1> + 3 <Dg'(M)[M1], M2> + <P, M3>
//! ```
//!
//! Frechet derivatives of the scalar functions `s` and `g'` are evaluated in
//! the respective eigenbases with divided-difference kernels. The Hessian is
//! also exposed in operator form (`hessian_apply`): the only non-obvious
//! block is the Y,Y term involving `D2s`, computed as the Riesz representer
//! of `V2 -> <P S X + X S P, D2s(Y)[V, V2]>` directly in the eigenbasis of
//! `Y`, so no derivative of `h` itself is ever needed.

use crate::gemm;
use crate::hermitian::{hermitian_part_unchecked, DdTables, EigenDecomposition, HermitianMatrix};
use crate::scalar::ScalarFunction;
use crate::{C64, CMatrix, Error, Result};

/// The scalar pair defining a trace function `tr[g(s(Y) X s(Y))]`.
///
/// `s` must be the square root of `h` and `gp` the derivative of `g`; the
/// constructors enforce this for the built-in families.
#[derive(Debug, Clone, Copy)]
pub struct TraceFnParams {
    /// Outer scalar function.
    pub g: ScalarFunction,
    /// Inner scalar function applied to `Y`.
    pub h: ScalarFunction,
    /// `h^(1/2)`, the function actually applied to `Y`.
    pub s: ScalarFunction,
    /// `g'`.
    pub gp: ScalarFunction,
}

impl TraceFnParams {
    /// Parameters of the sandwiched Renyi trace term `Psi_alpha`.
    ///
    /// Any finite `alpha > 0` is accepted; the divergence itself additionally
    /// excludes `alpha = 1` (see [`renyi_divergence`]).
    pub fn sandwiched_renyi(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a finite positive number, got {alpha}"
            )));
        }
        let q = (1.0 - alpha) / alpha;
        Ok(TraceFnParams {
            g: ScalarFunction::Power(alpha),
            h: ScalarFunction::Power(q),
            s: ScalarFunction::Power(q / 2.0),
            gp: ScalarFunction::ScaledPower {
                c: alpha,
                p: alpha - 1.0,
            },
        })
    }
}

/// A direction in the product space of the two matrix arguments.
#[derive(Debug, Clone)]
pub struct DirectionPair {
    /// Perturbation of the first argument `X`.
    pub dx: HermitianMatrix,
    /// Perturbation of the second argument `Y`.
    pub dy: HermitianMatrix,
}

impl DirectionPair {
    pub fn new(dx: HermitianMatrix, dy: HermitianMatrix) -> Self {
        DirectionPair { dx, dy }
    }

    /// Direction moving only `X`.
    pub fn x_only(dx: HermitianMatrix) -> Self {
        let n = dx.dim();
        DirectionPair {
            dx,
            dy: HermitianMatrix::zeros(n),
        }
    }

    /// Direction moving only `Y`.
    pub fn y_only(dy: HermitianMatrix) -> Self {
        let n = dy.dim();
        DirectionPair {
            dx: HermitianMatrix::zeros(n),
            dy,
        }
    }

    pub fn scale(&self, t: f64) -> Self {
        DirectionPair {
            dx: self.dx.scale(t),
            dy: self.dy.scale(t),
        }
    }
}

/// `Re tr[A B]` for same-size complex matrices.
fn real_trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (a[(i, j)], b[(j, i)]);
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}

/// `Re tr[A* B]`, the real trace inner product in a fixed basis.
fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.re * y.re + x.im * y.im;
    }
    acc
}

/// Value of `Psi` together with the spectra computed along the way.
#[derive(Debug, Clone)]
pub struct PsiValueDetail {
    /// `tr[g(s(Y) X s(Y))]`.
    pub psi: f64,
    /// Ascending eigenvalues of `Y`.
    pub y_eigenvalues: Vec<f64>,
    /// Ascending eigenvalues of `M = s(Y) X s(Y)`.
    pub m_eigenvalues: Vec<f64>,
}

/// Evaluate `Psi` without building derivative caches (two eigendecompositions
/// and two matrix products). Used on line-search trial points.
pub fn psi_value_detail(
    params: &TraceFnParams,
    x: &HermitianMatrix,
    y: &HermitianMatrix,
) -> Result<PsiValueDetail> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let e_y = y.eigh()?;
    let s_vals = e_y
        .eigenvalues
        .iter()
        .map(|&t| params.s.eval(t))
        .collect::<Result<Vec<f64>>>()?;
    let s_mat = e_y.recombine(&s_vals);
    let m = hermitian_part_unchecked(
        &(s_mat.as_matrix() * x.as_matrix() * s_mat.as_matrix()),
    );
    let e_m = m.eigh()?;
    let mut psi = 0.0;
    for &mu in &e_m.eigenvalues {
        psi += params.g.eval(mu)?;
    }
    Ok(PsiValueDetail {
        psi,
        y_eigenvalues: e_y.eigenvalues,
        m_eigenvalues: e_m.eigenvalues,
    })
}

/// Value of `Psi(X, Y)`.
pub fn psi_value(
    params: &TraceFnParams,
    x: &HermitianMatrix,
    y: &HermitianMatrix,
) -> Result<f64> {
    Ok(psi_value_detail(params, x, y)?.psi)
}

/// `Psi_alpha(X, Y)`.
pub fn renyi_trace_value(alpha: f64, x: &HermitianMatrix, y: &HermitianMatrix) -> Result<f64> {
    psi_value(&TraceFnParams::sandwiched_renyi(alpha)?, x, y)
}

/// Sandwiched Renyi divergence `D_alpha = log(Psi_alpha) / (alpha - 1)`.
pub fn renyi_divergence(alpha: f64, x: &HermitianMatrix, y: &HermitianMatrix) -> Result<f64> {
    if (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::InvalidParameter(
            "the divergence is defined through a limit at alpha = 1; pick alpha != 1".into(),
        ));
    }
    let psi = renyi_trace_value(alpha, x, y)?;
    if psi <= 0.0 {
        return Err(Error::DomainViolation {
            func: "log".into(),
            x: psi,
        });
    }
    Ok(psi.ln() / (alpha - 1.0))
}

/// Fully prepared evaluation point of a trace function: caches both
/// eigendecompositions, the divided-difference tables of `s` and `g'`, and
/// the gradient. All derivative queries run off these caches.
pub struct PsiPoint {
    params: TraceFnParams,
    n: usize,
    x_c: CMatrix,
    e_y: EigenDecomposition,
    s_tab: DdTables,
    s_c: CMatrix,
    sx: CMatrix,
    xs: CMatrix,
    e_m: EigenDecomposition,
    gp_tab: DdTables,
    gp_vals: Vec<f64>,
    p_c: CMatrix,
    ps: CMatrix,
    sp: CMatrix,
    w_grad_y: CMatrix,
    psi: f64,
    grad_x: HermitianMatrix,
    grad_y: HermitianMatrix,
}

/// First-order per-direction quantities shared by the derivative routines.
struct DirFirst {
    /// Direction in `Y`, expressed in the eigenbasis of `Y`.
    v_y: CMatrix,
    /// `Ds(Y)[V]` in the original basis.
    s1: CMatrix,
    /// `DM[d]` in the eigenbasis of `M`.
    m1_m: CMatrix,
}

impl PsiPoint {
    /// Prepare a point. Errors if the spectra leave the scalar domains (for
    /// the Renyi family with non-integer exponents this requires `X, Y` to be
    /// positive definite).
    pub fn prepare(
        params: &TraceFnParams,
        x: &HermitianMatrix,
        y: &HermitianMatrix,
    ) -> Result<Self> {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                got: y.dim(),
            });
        }
        let n = x.dim();
        let e_y = y.eigh()?;
        let s_vals = e_y
            .eigenvalues
            .iter()
            .map(|&t| params.s.eval(t))
            .collect::<Result<Vec<f64>>>()?;
        let s_tab = DdTables::new(&params.s, &e_y.eigenvalues)?;
        let s_c = e_y.recombine(&s_vals).into_matrix();
        let x_c = x.as_matrix().clone();
        let sx = &s_c * &x_c;
        let xs = &x_c * &s_c;
        let m = hermitian_part_unchecked(&(&s_c * &xs));
        let e_m = m.eigh()?;
        let mut psi = 0.0;
        for &mu in &e_m.eigenvalues {
            psi += params.g.eval(mu)?;
        }
        let gp_vals = e_m
            .eigenvalues
            .iter()
            .map(|&t| params.gp.eval(t))
            .collect::<Result<Vec<f64>>>()?;
        let gp_tab = DdTables::new(&params.gp, &e_m.eigenvalues)?;
        let p_c = e_m.recombine(&gp_vals).into_matrix();
        let ps = &p_c * &s_c;
        let sp = &s_c * &p_c;
        let w_grad = hermitian_part_unchecked(&(&p_c * &sx + &xs * &p_c));
        let w_grad_y = e_y.to_basis(w_grad.as_matrix());
        let grad_x = hermitian_part_unchecked(&(&s_c * &p_c * &s_c));
        let grad_y =
            hermitian_part_unchecked(&e_y.from_basis(&s_tab.apply_dd1(&w_grad_y)));
        Ok(PsiPoint {
            params: *params,
            n,
            x_c,
            e_y,
            s_tab,
            s_c,
            sx,
            xs,
            e_m,
            gp_tab,
            gp_vals,
            p_c,
            ps,
            sp,
            w_grad_y,
            psi,
            grad_x,
            grad_y,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &TraceFnParams {
        &self.params
    }

    /// `Psi(X, Y)`.
    pub fn value(&self) -> f64 {
        self.psi
    }

    /// Gradient in the first argument: `s(Y) g'(M) s(Y)`.
    pub fn gradient_x(&self) -> &HermitianMatrix {
        &self.grad_x
    }

    /// Gradient in the second argument: `Ds(Y)[P S X + X S P]`.
    pub fn gradient_y(&self) -> &HermitianMatrix {
        &self.grad_y
    }

    /// `D Psi [d] = <grad_x, dx> + <grad_y, dy>`.
    pub fn first_directional(&self, d: &DirectionPair) -> f64 {
        self.grad_x.inner(&d.dx) + self.grad_y.inner(&d.dy)
    }

    fn dir_first(&self, d: &DirectionPair) -> DirFirst {
        let v_y = self.e_y.to_basis(d.dy.as_matrix());
        let s1 = self.e_y.from_basis(&self.s_tab.apply_dd1(&v_y));
        let h = d.dx.as_matrix();
        // s1 X S is the adjoint of S X s1 (all factors Hermitian), so the
        // first two terms of DM[d] come from a single product.
        let t = gemm::mul(&s1, &self.xs);
        let mut m1 = &t + t.adjoint();
        gemm::mul_acc(&mut m1, &gemm::mul(&self.s_c, h), &self.s_c);
        let m1_m = self.e_m.to_basis(&m1);
        DirFirst { v_y, s1, m1_m }
    }

    /// `D2s(Y)[V1, V2]` in the original basis, from eigenbasis directions.
    fn s_second(&self, v1_y: &CMatrix, v2_y: &CMatrix) -> CMatrix {
        self.e_y.from_basis(&self.s_tab.apply_dd2(v1_y, v2_y))
    }

    /// Polarized `D2M[d1, d2]` in the original basis.
    fn m_second(&self, d1: &DirectionPair, f1: &DirFirst, d2: &DirectionPair, f2: &DirFirst) -> CMatrix {
        let s12 = self.s_second(&f1.v_y, &f2.v_y);
        let (h1, h2) = (d1.dx.as_matrix(), d2.dx.as_matrix());
        &s12 * &self.xs
            + &self.sx * &s12
            + &f1.s1 * &self.x_c * &f2.s1
            + &f2.s1 * &self.x_c * &f1.s1
            + &f1.s1 * h2 * &self.s_c
            + &f2.s1 * h1 * &self.s_c
            + &self.s_c * h2 * &f1.s1
            + &self.s_c * h1 * &f2.s1
    }

    /// `D2 Psi [d, d]`.
    pub fn second_directional(&self, d: &DirectionPair) -> f64 {
        self.hessian_bilinear_with(d, None)
    }

    /// `D2 Psi [d1, d2]` (symmetric bilinear form).
    pub fn hessian_bilinear(&self, d1: &DirectionPair, d2: &DirectionPair) -> f64 {
        if std::ptr::eq(d1, d2) {
            return self.hessian_bilinear_with(d1, None);
        }
        self.hessian_bilinear_with(d1, Some(d2))
    }

    fn hessian_bilinear_with(&self, d1: &DirectionPair, d2: Option<&DirectionPair>) -> f64 {
        let f1 = self.dir_first(d1);
        let (term_dd1, m2);
        match d2 {
            None => {
                term_dd1 = {
                    let mut acc = 0.0;
                    for i in 0..self.n {
                        for j in 0..self.n {
                            acc += self.gp_tab.k1(i, j) * f1.m1_m[(i, j)].norm_sqr();
                        }
                    }
                    acc
                };
                m2 = self.m_second(d1, &f1, d1, &f1);
            }
            Some(d2) => {
                let f2 = self.dir_first(d2);
                term_dd1 = {
                    let mut acc = 0.0;
                    for i in 0..self.n {
                        for j in 0..self.n {
                            let (a, b) = (f1.m1_m[(i, j)], f2.m1_m[(i, j)]);
                            acc += self.gp_tab.k1(i, j) * (a.re * b.re + a.im * b.im);
                        }
                    }
                    acc
                };
                m2 = self.m_second(d1, &f1, d2, &f2);
            }
        }
        term_dd1 + real_trace_product(&self.p_c, &m2)
    }

    /// Operator form of the Hessian: the pair `(G_X, G_Y)` with
    /// `<G_X, H2> + <G_Y, V2> = D2 Psi [d, (H2, V2)]` for all directions.
    pub fn hessian_apply(&self, d: &DirectionPair) -> (HermitianMatrix, HermitianMatrix) {
        let f = self.dir_first(d);
        let q_c = self
            .e_m
            .from_basis(&self.gp_tab.apply_dd1(&f.m1_m));
        let h = d.dx.as_matrix();
        // Hermitian factors again pair terms into product + adjoint.
        let u = gemm::mul(&f.s1, &self.ps);
        let mut gx = &u + u.adjoint();
        gemm::mul_acc(&mut gx, &gemm::mul(&self.s_c, &q_c), &self.s_c);
        let g_x = hermitian_part_unchecked(&gx);
        // Everything contracted against Ds(Y)[.]:
        let qsx = gemm::mul(&q_c, &self.sx);
        let xsp = gemm::mul(&gemm::mul(&self.x_c, &f.s1), &self.p_c);
        let hsp = gemm::mul(h, &self.sp);
        let r = &qsx + qsx.adjoint() + &xsp + xsp.adjoint() + &hsp + hsp.adjoint();
        let g_y1 = self.e_y.from_basis(&self.s_tab.apply_dd1(&self.e_y.to_basis(&r)));
        // Riesz representer of V2 -> <W, D2s(Y)[V, V2]> with W = P S X + X S P.
        let g_y2 = self
            .e_y
            .from_basis(&self.s_tab.contract_dd2_against(&self.w_grad_y, &f.v_y));
        let g_y = hermitian_part_unchecked(&(g_y1 + g_y2));
        (g_x, g_y)
    }

    /// `D3 Psi [d, d, d]`.
    pub fn third_directional(&self, d: &DirectionPair) -> Result<f64> {
        let f = self.dir_first(d);
        let h = d.dx.as_matrix();
        let s2 = self.s_second(&f.v_y, &f.v_y);
        let s3 = self
            .e_y
            .from_basis(&self.s_tab.apply_dd3(&f.v_y)?);
        let m2 = &s2 * &self.xs
            + &self.sx * &s2
            + (&f.s1 * &self.x_c * &f.s1) * C64::new(2.0, 0.0)
            + (&f.s1 * h * &self.s_c) * C64::new(2.0, 0.0)
            + (&self.s_c * h * &f.s1) * C64::new(2.0, 0.0);
        let m3 = &s3 * &self.xs
            + &self.sx * &s3
            + (&s2 * &self.x_c * &f.s1 + &f.s1 * &self.x_c * &s2) * C64::new(3.0, 0.0)
            + (&s2 * h * &self.s_c + &self.s_c * h * &s2) * C64::new(3.0, 0.0)
            + (&f.s1 * h * &f.s1) * C64::new(6.0, 0.0);
        let m2_m = self.e_m.to_basis(&m2);
        // <D2g'(M)[M1, M1], M1>
        let d2gp = self.gp_tab.apply_dd2(&f.m1_m, &f.m1_m);
        let term1 = real_inner(&f.m1_m, &d2gp);
        // 3 <Dg'(M)[M1], M2>
        let dgp = self.gp_tab.apply_dd1(&f.m1_m);
        let term2 = 3.0 * real_inner(&dgp, &m2_m);
        // <P, M3>, with P diagonal in the M eigenbasis.
        let m3_m = self.e_m.to_basis(&m3);
        let mut term3 = 0.0;
        for i in 0..self.n {
            term3 += self.gp_vals[i] * m3_m[(i, i)].re;
        }
        Ok(term1 + term2 + term3)
    }
}

/// Partial derivatives of `phi(u, w) = u (log w - log u) / (alpha - 1)`, the
/// scalar shell of the perspective.
#[derive(Debug, Clone, Copy)]
struct PhiPartials {
    value: f64,
    u: f64,
    w: f64,
    uu: f64,
    uw: f64,
    ww: f64,
    uuu: f64,
    uww: f64,
    www: f64,
}

fn phi_partials(alpha: f64, u: f64, w: f64) -> PhiPartials {
    let k = 1.0 / (alpha - 1.0);
    PhiPartials {
        value: k * u * (w.ln() - u.ln()),
        u: k * (w.ln() - u.ln() - 1.0),
        w: k * u / w,
        uu: -k / u,
        uw: k / w,
        ww: -k * u / (w * w),
        uuu: k / (u * u),
        uww: -k / (w * w),
        www: 2.0 * k * u / (w * w * w),
    }
}

/// Prepared point of the perspective `PD_alpha(u, X, Y) = phi(u, Psi(X, Y))`.
///
/// Directions are triples `(sigma, d)` with `sigma` the `u`-component.
pub struct PerspectivePoint {
    psi: PsiPoint,
    phi: PhiPartials,
}

impl PerspectivePoint {
    /// Requires `u > 0`, `Psi(X, Y) > 0`, and `alpha != 1`.
    pub fn prepare(alpha: f64, u: f64, x: &HermitianMatrix, y: &HermitianMatrix) -> Result<Self> {
        if (alpha - 1.0).abs() < 1e-12 {
            return Err(Error::InvalidParameter(
                "the perspective is defined through a limit at alpha = 1; pick alpha != 1".into(),
            ));
        }
        if !(u > 0.0) {
            return Err(Error::DomainViolation { func: "log".into(), x: u });
        }
        let params = TraceFnParams::sandwiched_renyi(alpha)?;
        let psi = PsiPoint::prepare(&params, x, y)?;
        if psi.value() <= 0.0 {
            return Err(Error::DomainViolation {
                func: "log".into(),
                x: psi.value(),
            });
        }
        let phi = phi_partials(alpha, u, psi.value());
        Ok(PerspectivePoint { psi, phi })
    }

    /// The underlying trace-function point.
    pub fn psi(&self) -> &PsiPoint {
        &self.psi
    }

    /// `PD_alpha(u, X, Y)`.
    pub fn value(&self) -> f64 {
        self.phi.value
    }

    /// Gradient `(d/du, d/dX, d/dY)`.
    pub fn gradient(&self) -> (f64, HermitianMatrix, HermitianMatrix) {
        (
            self.phi.u,
            self.psi.gradient_x().scale(self.phi.w),
            self.psi.gradient_y().scale(self.phi.w),
        )
    }

    /// First directional derivative along `(sigma, d)`.
    pub fn first_directional(&self, sigma: f64, d: &DirectionPair) -> f64 {
        self.phi.u * sigma + self.phi.w * self.psi.first_directional(d)
    }

    /// Second directional derivative along `(sigma, d)`.
    pub fn second_directional(&self, sigma: f64, d: &DirectionPair) -> f64 {
        let p1 = self.psi.first_directional(d);
        let p2 = self.psi.second_directional(d);
        self.phi.uu * sigma * sigma
            + 2.0 * self.phi.uw * sigma * p1
            + self.phi.ww * p1 * p1
            + self.phi.w * p2
    }

    /// Third directional derivative along `(sigma, d)`.
    pub fn third_directional(&self, sigma: f64, d: &DirectionPair) -> Result<f64> {
        let p1 = self.psi.first_directional(d);
        let p2 = self.psi.second_directional(d);
        let p3 = self.psi.third_directional(d)?;
        // phi_uuw = 0 for this phi, so its term is absent.
        Ok(self.phi.uuu * sigma.powi(3)
            + 3.0 * self.phi.uww * sigma * p1 * p1
            + self.phi.www * p1.powi(3)
            + 3.0 * (self.phi.uw * sigma + self.phi.ww * p1) * p2
            + self.phi.w * p3)
    }

    /// Operator form of the Hessian: `(g_u, G_X, G_Y)` representing
    /// `D2 PD [(sigma, d), .]`.
    pub fn hessian_apply(&self, sigma: f64, d: &DirectionPair) -> (f64, HermitianMatrix, HermitianMatrix) {
        let p1 = self.psi.first_directional(d);
        let (hx, hy) = self.psi.hessian_apply(d);
        let g_u = self.phi.uu * sigma + self.phi.uw * p1;
        let c = self.phi.uw * sigma + self.phi.ww * p1;
        let g_x = self
            .psi
            .gradient_x()
            .scale(c)
            .add_scaled(self.phi.w, &hx);
        let g_y = self
            .psi
            .gradient_y()
            .scale(c)
            .add_scaled(self.phi.w, &hy);
        (g_u, g_x, g_y)
    }
}

/// `PD_alpha(u, X, Y)` by value.
pub fn d_alpha_perspective(
    alpha: f64,
    u: f64,
    x: &HermitianMatrix,
    y: &HermitianMatrix,
) -> Result<f64> {
    Ok(PerspectivePoint::prepare(alpha, u, x, y)?.value())
}

/// Noncommutative perspective `P_g(A, B) = A^(1/2) g(A^(-1/2) B A^(-1/2)) A^(1/2)`.
///
/// Requires `A` positive definite and the spectrum of `A^(-1/2) B A^(-1/2)`
/// inside the domain of `g`.
pub fn nc_perspective(
    g: &ScalarFunction,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<HermitianMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let e_a = a.eigh()?;
    let min = e_a.eigenvalues.first().copied().unwrap_or(0.0);
    if min <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eig: min,
            floor: 0.0,
        });
    }
    let half: Vec<f64> = e_a.eigenvalues.iter().map(|t| t.sqrt()).collect();
    let ihalf: Vec<f64> = half.iter().map(|t| 1.0 / t).collect();
    let a_half = e_a.recombine(&half);
    let a_ihalf = e_a.recombine(&ihalf);
    let inner = hermitian_part_unchecked(
        &(a_ihalf.as_matrix() * b.as_matrix() * a_ihalf.as_matrix()),
    );
    let g_inner = crate::hermitian::spectral_apply(g, &inner)?;
    Ok(hermitian_part_unchecked(
        &(a_half.as_matrix() * g_inner.as_matrix() * a_half.as_matrix()),
    ))
}

/// Composed perspective `P_{g,h}(A, B, C) = P_g(A, P_h(B, C))`.
pub fn composed_perspective(
    g: &ScalarFunction,
    h: &ScalarFunction,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    c: &HermitianMatrix,
) -> Result<HermitianMatrix> {
    let inner = nc_perspective(h, b, c)?;
    nc_perspective(g, a, &inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::random;
    use crate::rng::Stream;

    fn rand_pair(rng: &mut Stream, n: usize) -> DirectionPair {
        DirectionPair::new(random::hermitian(rng, n), random::hermitian(rng, n))
    }

    /// Richardson-extrapolated central differences of
    /// `t -> Psi(X + t H, Y + t V)` for derivative orders 1..3.
    fn fd_directional(
        params: &TraceFnParams,
        x: &HermitianMatrix,
        y: &HermitianMatrix,
        d: &DirectionPair,
        order: usize,
        h: f64,
    ) -> f64 {
        let f = |t: f64| {
            psi_value(
                params,
                &x.add_scaled(t, &d.dx),
                &y.add_scaled(t, &d.dy),
            )
            .unwrap()
        };
        let stencil = |h: f64| match order {
            1 => (f(h) - f(-h)) / (2.0 * h),
            2 => (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h),
            3 => (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h),
            _ => unreachable!(),
        };
        (4.0 * stencil(h / 2.0) - stencil(h)) / 3.0
    }

    #[test]
    fn identity_point_has_closed_form_derivatives() {
        let mut rng = Stream::new(31);
        for &alpha in &[0.6, 0.75, 1.5, 2.0] {
            let n = 3;
            let params = TraceFnParams::sandwiched_renyi(alpha).unwrap();
            let id = HermitianMatrix::identity(n);
            let p = PsiPoint::prepare(&params, &id, &id).unwrap();
            assert!((p.value() - n as f64).abs() < 1e-12);
            assert!(
                (p.gradient_x() - &id.scale(alpha)).norm() < 1e-11,
                "grad_x at alpha={alpha}"
            );
            assert!(
                (p.gradient_y() - &id.scale(1.0 - alpha)).norm() < 1e-11,
                "grad_y at alpha={alpha}"
            );
            let h = random::hermitian(&mut rng, n);
            let d = DirectionPair::x_only(h.clone());
            let tr_h2 = h.inner(&h);
            let h2 = crate::hermitian::spectral_apply(&ScalarFunction::Power(2.0), &h).unwrap();
            let tr_h3 = h2.inner(&h);
            let want2 = alpha * (alpha - 1.0) * tr_h2;
            let got2 = p.second_directional(&d);
            assert!(
                (got2 - want2).abs() < 1e-10 * tr_h2.abs().max(1.0),
                "second at alpha={alpha}: {got2} vs {want2}"
            );
            let want3 = alpha * (alpha - 1.0) * (alpha - 2.0) * tr_h3;
            let got3 = p.third_directional(&d).unwrap();
            assert!(
                (got3 - want3).abs() < 1e-9 * tr_h3.abs().max(1.0),
                "third at alpha={alpha}: {got3} vs {want3}"
            );
        }
    }

    #[test]
    fn value_matches_cyclic_form() {
        // tr[g(s(Y) X s(Y))] = tr[g(X^(1/2) h(Y) X^(1/2))].
        let mut rng = Stream::new(37);
        for &alpha in &[0.6, 1.3] {
            let params = TraceFnParams::sandwiched_renyi(alpha).unwrap();
            let x = random::positive_definite(&mut rng, 4, 0.3);
            let y = random::positive_definite(&mut rng, 4, 0.3);
            let psi = psi_value(&params, &x, &y).unwrap();
            let x_half =
                crate::hermitian::spectral_apply(&ScalarFunction::Power(0.5), &x).unwrap();
            let hy = crate::hermitian::spectral_apply(&params.h, &y).unwrap();
            let inner = hermitian_part_unchecked(
                &(x_half.as_matrix() * hy.as_matrix() * x_half.as_matrix()),
            );
            let g_inner = crate::hermitian::spectral_apply(&params.g, &inner).unwrap();
            assert!(
                (psi - g_inner.trace()).abs() < 1e-11 * psi.abs().max(1.0),
                "alpha={alpha}"
            );
        }
    }

    #[test]
    fn value_is_jointly_one_homogeneous() {
        let mut rng = Stream::new(41);
        let params = TraceFnParams::sandwiched_renyi(0.8).unwrap();
        let x = random::positive_definite(&mut rng, 3, 0.3);
        let y = random::positive_definite(&mut rng, 3, 0.3);
        let base = psi_value(&params, &x, &y).unwrap();
        for &c in &[0.5, 2.0, 7.5] {
            let scaled = psi_value(&params, &x.scale(c), &y.scale(c)).unwrap();
            assert!((scaled - c * base).abs() < 1e-10 * base.abs().max(1.0));
        }
    }

    #[test]
    fn divergence_vanishes_on_equal_states_and_grows_with_alpha() {
        let mut rng = Stream::new(43);
        let x = random::density(&mut rng, 4);
        let y = random::density(&mut rng, 4);
        assert!(renyi_divergence(0.7, &x, &x).unwrap().abs() < 1e-10);
        assert!(renyi_divergence(1.6, &x, &x).unwrap().abs() < 1e-10);
        let alphas = [0.55, 0.7, 0.9, 1.2, 1.5, 1.9];
        let vals: Vec<f64> = alphas
            .iter()
            .map(|&a| renyi_divergence(a, &x, &y).unwrap())
            .collect();
        for w in vals.windows(2) {
            assert!(w[1] >= w[0] - 1e-10, "divergence not monotone: {vals:?}");
        }
        // Divergence of distinct states is strictly positive.
        assert!(vals[0] > 1e-3);
    }

    #[test]
    fn directional_derivatives_match_finite_differences() {
        let mut rng = Stream::new(47);
        for &alpha in &[0.6, 0.9, 1.3, 1.8] {
            let params = TraceFnParams::sandwiched_renyi(alpha).unwrap();
            for n in [2usize, 4] {
                let x = random::positive_definite(&mut rng, n, 0.5);
                let y = random::positive_definite(&mut rng, n, 0.5);
                let d = rand_pair(&mut rng, n);
                let p = PsiPoint::prepare(&params, &x, &y).unwrap();
                let h0 = 1e-3;

                let d1 = p.first_directional(&d);
                let fd1 = fd_directional(&params, &x, &y, &d, 1, h0);
                assert!(
                    (d1 - fd1).abs() <= 1e-7 * d1.abs().max(1.0),
                    "D1 alpha={alpha} n={n}: {d1} vs {fd1}"
                );

                let d2 = p.second_directional(&d);
                let fd2 = fd_directional(&params, &x, &y, &d, 2, h0);
                assert!(
                    (d2 - fd2).abs() <= 1e-6 * d2.abs().max(1.0),
                    "D2 alpha={alpha} n={n}: {d2} vs {fd2}"
                );

                let d3 = p.third_directional(&d).unwrap();
                let fd3 = fd_directional(&params, &x, &y, &d, 3, 5e-3);
                assert!(
                    (d3 - fd3).abs() <= 1e-5 * d3.abs().max(1.0),
                    "D3 alpha={alpha} n={n}: {d3} vs {fd3}"
                );
            }
        }
    }

    #[test]
    fn hessian_apply_represents_the_bilinear_form() {
        let mut rng = Stream::new(53);
        for &alpha in &[0.7, 1.4] {
            let params = TraceFnParams::sandwiched_renyi(alpha).unwrap();
            let n = 3;
            let x = random::positive_definite(&mut rng, n, 0.4);
            let y = random::positive_definite(&mut rng, n, 0.4);
            let p = PsiPoint::prepare(&params, &x, &y).unwrap();
            for _ in 0..4 {
                let d1 = rand_pair(&mut rng, n);
                let d2 = rand_pair(&mut rng, n);
                let blf = p.hessian_bilinear(&d1, &d2);
                let blf_t = p.hessian_bilinear(&d2, &d1);
                assert!(
                    (blf - blf_t).abs() < 1e-9 * blf.abs().max(1.0),
                    "bilinear form not symmetric"
                );
                let (gx, gy) = p.hessian_apply(&d1);
                let via_apply = gx.inner(&d2.dx) + gy.inner(&d2.dy);
                assert!(
                    (blf - via_apply).abs() < 1e-9 * blf.abs().max(1.0),
                    "alpha={alpha}: {blf} vs {via_apply}"
                );
                // Quadratic form consistency.
                let q = p.hessian_bilinear(&d1, &d1);
                let q2 = p.second_directional(&d1);
                assert!((q - q2).abs() < 1e-10 * q.abs().max(1.0));
            }
        }
    }

    #[test]
    fn concavity_sign_flips_across_alpha_one() {
        // Psi_alpha is jointly concave on [1/2, 1) and jointly convex on
        // (1, 2]: second directional derivatives keep one sign.
        let mut rng = Stream::new(59);
        for &(alpha, sign) in &[(0.6, -1.0), (0.9, -1.0), (1.3, 1.0), (2.0, 1.0)] {
            let params = TraceFnParams::sandwiched_renyi(alpha).unwrap();
            for _ in 0..6 {
                let x = random::positive_definite(&mut rng, 3, 0.3);
                let y = random::positive_definite(&mut rng, 3, 0.3);
                let p = PsiPoint::prepare(&params, &x, &y).unwrap();
                let d = rand_pair(&mut rng, 3);
                let q = p.second_directional(&d);
                assert!(
                    sign * q >= -1e-9 * q.abs().max(1.0),
                    "alpha={alpha}: D2 = {q}"
                );
            }
        }
    }

    #[test]
    fn perspective_reduces_at_unit_scale_and_is_homogeneous() {
        let mut rng = Stream::new(61);
        let alpha = 0.7;
        let x = random::positive_definite(&mut rng, 3, 0.4);
        let y = random::positive_definite(&mut rng, 3, 0.4);
        let d = renyi_divergence(alpha, &x, &y).unwrap();
        let pd1 = d_alpha_perspective(alpha, 1.0, &x, &y).unwrap();
        assert!((pd1 - d).abs() < 1e-12 * d.abs().max(1.0));
        let base = d_alpha_perspective(alpha, 0.8, &x, &y).unwrap();
        for &c in &[0.5, 3.0] {
            let scaled =
                d_alpha_perspective(alpha, 0.8 * c, &x.scale(c), &y.scale(c)).unwrap();
            assert!((scaled - c * base).abs() < 1e-10 * base.abs().max(1.0));
        }
    }

    #[test]
    fn perspective_derivatives_match_finite_differences() {
        let mut rng = Stream::new(67);
        for &alpha in &[0.55, 0.8] {
            let n = 3;
            let x = random::positive_definite(&mut rng, n, 0.5);
            let y = random::positive_definite(&mut rng, n, 0.5);
            let u = 0.9;
            let d = rand_pair(&mut rng, n);
            let sigma = rng.normal();
            let pt = PerspectivePoint::prepare(alpha, u, &x, &y).unwrap();
            let f = |t: f64| {
                d_alpha_perspective(
                    alpha,
                    u + t * sigma,
                    &x.add_scaled(t, &d.dx),
                    &y.add_scaled(t, &d.dy),
                )
                .unwrap()
            };
            let h0 = 5e-4;
            let st1 = |h: f64| (f(h) - f(-h)) / (2.0 * h);
            let st2 = |h: f64| (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
            let st3 =
                |h: f64| (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h);
            let fd1 = (4.0 * st1(h0 / 2.0) - st1(h0)) / 3.0;
            let fd2 = (4.0 * st2(h0 / 2.0) - st2(h0)) / 3.0;
            // Larger step for the third stencil: its roundoff grows as h^-3.
            let h3 = 5e-3;
            let fd3 = (4.0 * st3(h3 / 2.0) - st3(h3)) / 3.0;
            let d1 = pt.first_directional(sigma, &d);
            let d2 = pt.second_directional(sigma, &d);
            let d3 = pt.third_directional(sigma, &d).unwrap();
            assert!((d1 - fd1).abs() < 1e-7 * d1.abs().max(1.0), "alpha={alpha}");
            assert!((d2 - fd2).abs() < 1e-5 * d2.abs().max(1.0), "alpha={alpha}");
            assert!(
                (d3 - fd3).abs() < 1e-4 * d3.abs().max(1.0),
                "alpha={alpha}: {d3} vs {fd3}"
            );
            // Gradient consistency with the directional form.
            let (gu, gx, gy) = pt.gradient();
            let via_grad = gu * sigma + gx.inner(&d.dx) + gy.inner(&d.dy);
            assert!((via_grad - d1).abs() < 1e-11 * d1.abs().max(1.0));
            // Hessian-apply consistency.
            let d2b = rand_pair(&mut rng, n);
            let sigma2 = rng.normal();
            let (hu, hx, hy) = pt.hessian_apply(sigma, &d);
            let lhs = hu * sigma2 + hx.inner(&d2b.dx) + hy.inner(&d2b.dy);
            // Polarization: B[d, d2] = (Q(d + d2) - Q(d - d2)) / 4.
            let dp = DirectionPair::new(
                d.dx.add_scaled(1.0, &d2b.dx),
                d.dy.add_scaled(1.0, &d2b.dy),
            );
            let dm = DirectionPair::new(
                d.dx.add_scaled(-1.0, &d2b.dx),
                d.dy.add_scaled(-1.0, &d2b.dy),
            );
            let rhs = (pt.second_directional(sigma + sigma2, &dp)
                - pt.second_directional(sigma - sigma2, &dm))
                / 4.0;
            assert!(
                (lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0),
                "perspective hessian apply alpha={alpha}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn perspective_is_jointly_convex_below_one() {
        let mut rng = Stream::new(71);
        for &alpha in &[0.55, 0.75, 0.95] {
            for _ in 0..5 {
                let x = random::positive_definite(&mut rng, 3, 0.2);
                let y = random::positive_definite(&mut rng, 3, 0.2);
                let u = rng.uniform_in(0.3, 2.0);
                let pt = PerspectivePoint::prepare(alpha, u, &x, &y).unwrap();
                let d = rand_pair(&mut rng, 3);
                let sigma = rng.normal();
                let q = pt.second_directional(sigma, &d);
                assert!(q >= -1e-9 * q.abs().max(1.0), "alpha={alpha}: D2 = {q}");
            }
        }
    }

    #[test]
    fn nc_perspective_commuting_and_transpose_identity() {
        // Commuting case: diagonal entries a_i g(b_i / a_i).
        let g = ScalarFunction::Power(0.3);
        let a = HermitianMatrix::from_diagonal(&[1.0, 2.0, 5.0]);
        let b = HermitianMatrix::from_diagonal(&[3.0, 1.0, 4.0]);
        let p = nc_perspective(&g, &a, &b).unwrap();
        for (i, (&ai, &bi)) in [1.0f64, 2.0, 5.0].iter().zip(&[3.0f64, 1.0, 4.0]).enumerate() {
            let want = ai * (bi / ai).powf(0.3);
            assert!((p.as_matrix()[(i, i)].re - want).abs() < 1e-12);
        }
        // Transpose identity: P_g(A, B) = P_ghat(B, A) with ghat(x) = x g(1/x);
        // for g = x^p that is ghat = x^(1-p).
        let mut rng = Stream::new(73);
        let a = random::positive_definite(&mut rng, 3, 0.3);
        let b = random::positive_definite(&mut rng, 3, 0.3);
        let lhs = nc_perspective(&ScalarFunction::Power(0.3), &a, &b).unwrap();
        let rhs = nc_perspective(&ScalarFunction::Power(0.7), &b, &a).unwrap();
        assert!((&lhs - &rhs).norm() < 1e-10 * lhs.norm().max(1.0));
        // Degenerate base errors.
        let sing = HermitianMatrix::from_diagonal(&[1.0, 0.0, 2.0]);
        assert!(nc_perspective(&g, &sing, &b).is_err());
    }

    #[test]
    fn composed_perspective_collapses_on_identities() {
        // P_{g,h}(A, B, C) with A = B = I reduces to g(h(C)) on commuting input.
        let g = ScalarFunction::Power(2.0);
        let h = ScalarFunction::Power(0.5);
        let c = HermitianMatrix::from_diagonal(&[4.0, 9.0]);
        let id = HermitianMatrix::identity(2);
        let p = composed_perspective(&g, &h, &id, &id, &c).unwrap();
        // g(h(c)) = (c^(1/2))^2 = c.
        assert!((&p - &c).norm() < 1e-11);
    }
}
