//! Randomized numeric certification of the structural properties everything
//! else relies on: self-concordance and the barrier parameter of each cone,
//! logarithmic homogeneity, the third-derivative compatibility inequality,
//! operator concavity/convexity along matrix lines (midpoint tests on
//! spectral lifts plus Hansen-Tomiyama minor matrices), a Kronecker
//! contraction identity tying composed noncommutative perspectives back to
//! the trace function, and finite-difference consistency of the analytic
//! derivatives.
//!
//! Every check is deterministic given `(seed, spec)`: sample `i` draws from
//! [`Stream::for_sample`]`(seed, i)`, so a worst case reported here can be
//! reproduced in isolation.
//!
//! Violations are oriented so that nonpositive means "inequality holds";
//! a report passes when `worst_violation <= tolerance`. Checks that combine
//! sub-tests with different numeric resolutions (operator lines, derivative
//! consistency) normalize each sub-test by its own resolution and declare a
//! tolerance of 1.

use crate::barrier::{Cone, ConeSet};
use crate::error::{Error, Result};
use crate::hermitian::{kron, random, spectral_apply, HermitianMatrix};
use crate::rng::Stream;
use crate::scalar::ScalarFunction;
use crate::tracefn::{
    composed_perspective, psi_value, renyi_trace_value, DirectionPair, PerspectivePoint,
    PsiPoint, TraceFnParams,
};
use crate::vectorize::vectorize_into;
use crate::RMatrix;

/// Normalized slack allowed in `|D^3 F| <= 2 (D^2 F)^{3/2}`.
pub const SELF_CONCORDANCE_TOL: f64 = 1e-7;
/// Slack allowed in `sup_h (2 DF[h] - D^2 F[h,h]) <= nu`.
pub const BARRIER_PARAMETER_TOL: f64 = 1e-9;
/// Absolute slack in `F(lambda x) = F(x) - nu log lambda`.
pub const LOG_HOMOGENEITY_TOL: f64 = 1e-10;
/// Normalized slack in `|D^3 f[h^3]| <= -3 beta D^2 f[h^2]`.
pub const COMPATIBILITY_TOL: f64 = 1e-8;
/// Deviation allowed between the reported scalar ratio supremum and `2 alpha - 1`.
pub const SCALAR_RATIO_TOL: f64 = 1e-9;
/// Eigenvalue resolution of the midpoint operator test.
pub const MIDPOINT_TOL: f64 = 1e-7;
/// Eigenvalue resolution of Hansen-Tomiyama minors of order `m <= 2`
/// (derivatives up to `f''''` from Richardson-extrapolated stencils).
pub const HT_TOL_LOW: f64 = 1e-6;
/// Eigenvalue resolution of the order-3 minor, limited by roundoff in the
/// sixth-derivative stencil (base step 5e-2, noise ~`64 eps |f| / h^6`).
pub const HT_TOL_HIGH: f64 = 2e-4;
/// Absolute slack in the Kronecker contraction identity.
pub const KRON_TOL: f64 = 1e-10;
/// Relative agreement required between analytic and finite-difference gradients.
pub const DERIV_TOL_GRADIENT: f64 = 1e-6;
/// Relative agreement for Hessian quadratic forms.
pub const DERIV_TOL_HESSIAN: f64 = 1e-5;
/// Relative agreement for third directional derivatives.
pub const DERIV_TOL_THIRD: f64 = 1e-4;

/// Sampling plan shared by all checks.
#[derive(Debug, Clone)]
pub struct SampleSpec {
    /// Base seed; sample `i` uses `Stream::for_sample(seed, i)`.
    pub seed: u64,
    /// Number of random samples per check.
    pub count: usize,
    /// Matrix side lengths to cycle through.
    pub dims: Vec<usize>,
    /// Renyi orders to cycle through where a check is alpha-dependent.
    pub alpha_grid: Vec<f64>,
    /// In `[0, 1)`: 0 keeps generous interior margins, values near 1 shrink
    /// slacks toward the cone boundary by up to three orders of magnitude.
    pub boundary_bias: f64,
}

impl SampleSpec {
    /// A small default plan: `count` samples on sides 2 and 3 with a
    /// representative alpha grid and moderate boundary pressure.
    pub fn quick(seed: u64, count: usize) -> Self {
        SampleSpec {
            seed,
            count,
            dims: vec![2, 3],
            alpha_grid: vec![0.6, 0.75, 0.9, 1.25, 1.5, 1.9],
            boundary_bias: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidParameter("sample count must be positive".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&n| n == 0) {
            return Err(Error::InvalidParameter(
                "dims must be a nonempty list of positive side lengths".into(),
            ));
        }
        if self.alpha_grid.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return Err(Error::InvalidParameter(
                "alpha grid entries must be finite and positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.boundary_bias) {
            return Err(Error::InvalidParameter(format!(
                "boundary bias {} outside [0, 1)",
                self.boundary_bias
            )));
        }
        Ok(())
    }
}

/// Outcome of one property check.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub property_name: String,
    /// Total sub-tests evaluated (samples times probes per sample).
    pub samples: usize,
    /// Largest oriented violation seen; nonpositive means the inequality held
    /// with margin everywhere.
    pub worst_violation: f64,
    /// Human-readable description of the worst sample, sufficient to replay it.
    pub worst_case_inputs: String,
    /// Declared tolerance the worst violation is compared against.
    pub tolerance: f64,
    pub passed: bool,
    pub seed: u64,
}

struct Accumulator {
    samples: usize,
    worst: f64,
    inputs: String,
}

impl Accumulator {
    fn new() -> Self {
        Accumulator { samples: 0, worst: f64::NEG_INFINITY, inputs: String::new() }
    }

    fn observe(&mut self, violation: f64, inputs: impl FnOnce() -> String) {
        self.samples += 1;
        if violation > self.worst {
            self.worst = violation;
            self.inputs = inputs();
        }
    }

    fn report(self, name: String, tolerance: f64, seed: u64) -> VerificationReport {
        let worst = if self.samples == 0 { 0.0 } else { self.worst };
        VerificationReport {
            property_name: name,
            samples: self.samples,
            worst_violation: worst,
            worst_case_inputs: self.inputs,
            tolerance,
            passed: worst <= tolerance,
            seed,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn cone_label(cone: &Cone) -> String {
    match cone {
        Cone::NonNeg { dim } => format!("NonNeg({dim})"),
        Cone::Psd { side } => format!("Psd({side})"),
        Cone::RenyiHypo { side, alpha } => format!("RenyiHypo({side}, alpha={alpha})"),
        Cone::RenyiEpi { side, alpha } => format!("RenyiEpi({side}, alpha={alpha})"),
        Cone::RenyiPerspEpi { side, alpha } => format!("RenyiPerspEpi({side}, alpha={alpha})"),
        Cone::Free { dim } => format!("Free({dim})"),
    }
}

/// Draw a strictly interior point of `cone`. `bias` multiplies every slack by
/// `10^(-3 u bias)` with `u` uniform, so bias 0 keeps healthy margins and
/// bias near 1 presses against the boundary.
fn sample_interior(cone: &Cone, rng: &mut Stream, bias: f64) -> Result<Vec<f64>> {
    fn squeeze(rng: &mut Stream, bias: f64) -> f64 {
        10f64.powf(-3.0 * bias * rng.uniform())
    }
    match cone {
        Cone::NonNeg { dim } => Ok((0..*dim)
            .map(|_| (0.7 * rng.normal()).exp() * squeeze(rng, bias))
            .collect()),
        Cone::Psd { side } => {
            let floor = 0.3 * squeeze(rng, bias);
            let m = random::positive_definite(rng, *side, floor);
            let mut out = vec![0.0; cone.dim()];
            vectorize_into(&m, &mut out);
            Ok(out)
        }
        Cone::RenyiHypo { side, alpha } | Cone::RenyiEpi { side, alpha } => {
            let hypo = matches!(cone, Cone::RenyiHypo { .. });
            let x = random::positive_definite(rng, *side, 0.3);
            let y = random::positive_definite(rng, *side, 0.3);
            let psi = renyi_trace_value(*alpha, &x, &y)?;
            let gap = (0.2 + 0.8 * rng.uniform()) * psi.abs().max(1.0) * squeeze(rng, bias);
            let t = if hypo { psi - gap } else { psi + gap };
            let mut out = vec![0.0; cone.dim()];
            out[0] = t;
            let m = side * side;
            vectorize_into(&x, &mut out[1..1 + m]);
            vectorize_into(&y, &mut out[1 + m..]);
            Ok(out)
        }
        Cone::RenyiPerspEpi { side, alpha } => {
            let x = random::positive_definite(rng, *side, 0.3);
            let y = random::positive_definite(rng, *side, 0.3);
            let u = (0.5 * rng.normal()).exp() * squeeze(rng, bias);
            let p = PerspectivePoint::prepare(*alpha, u, &x, &y)?;
            let gap = (0.2 + 0.8 * rng.uniform()) * p.value().abs().max(1.0) * squeeze(rng, bias);
            let mut out = vec![0.0; cone.dim()];
            out[0] = p.value() + gap;
            out[1] = u;
            let m = side * side;
            vectorize_into(&x, &mut out[2..2 + m]);
            vectorize_into(&y, &mut out[2 + m..]);
            Ok(out)
        }
        Cone::Free { dim } => Ok((0..*dim).map(|_| rng.normal()).collect()),
    }
}

// ---------------------------------------------------------------------------
// Finite differences.

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// Central-difference stencil for the `order`-th derivative: coefficients by
/// offset `-reach..=reach`, to be divided by `h^order`.
fn stencil(order: usize) -> Result<(&'static [f64], usize)> {
    match order {
        1 => Ok((&[-0.5, 0.0, 0.5], 1)),
        2 => Ok((&[1.0, -2.0, 1.0], 1)),
        3 => Ok((&[-0.5, 1.0, 0.0, -1.0, 0.5], 2)),
        4 => Ok((&[1.0, -4.0, 6.0, -4.0, 1.0], 2)),
        5 => Ok((&[-0.5, 2.0, -2.5, 0.0, 2.5, -2.0, 0.5], 3)),
        6 => Ok((&[1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0], 3)),
        _ => Err(Error::UnsupportedOrder { order, supported: "1..=6" }),
    }
}

/// Richardson-extrapolated central difference `f^{(order)}(t)`: the stencil is
/// evaluated at steps `h` and `h/2` and combined as `(4 fine - coarse) / 3`,
/// cancelling the `h^2` error term.
pub fn fd_derivative(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    t: f64,
    order: usize,
    h: f64,
) -> Result<f64> {
    let (coeffs, reach) = stencil(order)?;
    let mut level = |hh: f64| -> Result<f64> {
        let mut acc = 0.0;
        for (idx, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                let k = idx as f64 - reach as f64;
                acc += c * f(t + k * hh)?;
            }
        }
        Ok(acc / hh.powi(order as i32))
    };
    let coarse = level(h)?;
    let fine = level(h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Hansen-Tomiyama minor matrix `H_m(t; f)` with entries
/// `f^(i+j)(t) / (i+j)!` for `i, j` in `1..=m`, the derivatives estimated by
/// [`fd_derivative`] with base step `h0`. A function is m-convex near `t`
/// only if this matrix is positive semidefinite.
pub fn hansen_tomiyama_matrix(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    t: f64,
    m: usize,
    h0: f64,
) -> Result<RMatrix> {
    if m == 0 || m > 3 {
        return Err(Error::InvalidParameter(format!(
            "minor order {m} outside 1..=3 (stencils stop at the sixth derivative)"
        )));
    }
    if !(h0 > 0.0) || !h0.is_finite() {
        return Err(Error::InvalidParameter(format!("step {h0} must be positive")));
    }
    let mut derivs = vec![0.0; 2 * m + 1];
    for (k, slot) in derivs.iter_mut().enumerate().take(2 * m + 1).skip(2) {
        *slot = fd_derivative(f, t, k, h0)?;
    }
    let mut out = RMatrix::zeros(m, m);
    for i in 1..=m {
        for j in 1..=m {
            out[(i - 1, j - 1)] = derivs[i + j] / factorial(i + j);
        }
    }
    Ok(out)
}

fn sym_min_eigenvalue(m: &RMatrix) -> f64 {
    let n = m.nrows();
    let mut c = crate::CMatrix::zeros(n, n);
    for i in 0..n {
        c[(i, i)] = crate::C64::new(m[(i, i)], 0.0);
        for j in (i + 1)..n {
            // Hankel-style minors are symmetric by construction.
            let v = crate::C64::new(0.5 * (m[(i, j)] + m[(j, i)]), 0.0);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    crate::hermitian::hermitian_part_unchecked(&c)
        .min_eigenvalue()
        .unwrap_or(f64::NEG_INFINITY)
}

fn spectral_radius(g: &HermitianMatrix) -> Result<f64> {
    Ok(g.eigh()?.eigenvalues.iter().fold(0.0f64, |a, &v| a.max(v.abs())))
}

/// Random Hermitian direction `theta * B^{1/2} G B^{1/2}` with `G` normalized
/// to unit spectral radius, so `B + s H` stays PSD for every `|s| <= 1/theta`
/// and touches the boundary exactly at `theta = 1`.
fn boundary_direction(rng: &mut Stream, base: &HermitianMatrix, theta: f64) -> Result<HermitianMatrix> {
    let g = random::hermitian(rng, base.dim());
    let rho = spectral_radius(&g)?;
    let ghat = if rho > 1e-12 { g.scale(1.0 / rho) } else { HermitianMatrix::identity(base.dim()) };
    let root = spectral_apply(&ScalarFunction::Power(0.5), base)?;
    let m = root.as_matrix() * ghat.as_matrix() * root.as_matrix();
    Ok(crate::hermitize(&m)?.scale(theta))
}

// ---------------------------------------------------------------------------
// Barrier properties.

/// `|D^3 F[h,h,h]| <= 2 (D^2 F[h,h])^{3/2}` along random interior points and
/// directions. Violations are normalized by `(D^2 F)^{3/2}`.
pub fn check_self_concordance(cone: &Cone, spec: &SampleSpec) -> Result<VerificationReport> {
    spec.validate()?;
    cone.validate()?;
    let set = ConeSet::new(vec![cone.clone()])?;
    let mut acc = Accumulator::new();
    for i in 0..spec.count {
        let mut rng = Stream::for_sample(spec.seed, i as u64);
        let x = sample_interior(cone, &mut rng, spec.boundary_bias)?;
        let p = set.prepare(&x)?;
        let dim = p.dim();
        let mut hd = vec![0.0; dim];
        let mut found = None;
        // Redraw directions of numerically flat curvature; barrier cones are
        // nondegenerate, so this only guards pathological draws.
        for _ in 0..8 {
            let d: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
            p.hessian_apply(&d, &mut hd)?;
            let d2 = dot(&d, &hd);
            if d2 >= 1e-14 {
                found = Some((d, d2));
                break;
            }
        }
        let (d, d2) = found.ok_or_else(|| {
            Error::NumericalFailure("no direction of positive curvature found".into())
        })?;
        let d3 = p.third_directional(&d)?;
        let denom = d2.powf(1.5);
        acc.observe((d3.abs() - 2.0 * denom) / denom, || format!("sample {i}"));
    }
    Ok(acc.report(
        format!("self-concordance {}", cone_label(cone)),
        SELF_CONCORDANCE_TOL,
        spec.seed,
    ))
}

/// `sup_h (2 DF[h] - D^2 F[h,h]) <= nu`. The supremum equals
/// `g^T H^{-1} g` and is attained at `h = H^{-1} g = -x`; both that point and
/// random probes are checked.
pub fn check_barrier_parameter(cone: &Cone, spec: &SampleSpec) -> Result<VerificationReport> {
    spec.validate()?;
    cone.validate()?;
    let set = ConeSet::new(vec![cone.clone()])?;
    let nu = set.barrier_parameter();
    let mut acc = Accumulator::new();
    for i in 0..spec.count {
        let mut rng = Stream::for_sample(spec.seed, i as u64);
        let x = sample_interior(cone, &mut rng, spec.boundary_bias)?;
        let p = set.prepare(&x)?;
        let dim = p.dim();
        let g = p.gradient().to_vec();
        let mut hd = vec![0.0; dim];
        let probe = |h: &[f64], p: &crate::barrier::PreparedBarrier, hd: &mut [f64]| -> Result<f64> {
            p.hessian_apply(h, hd)?;
            Ok(2.0 * dot(&g, h) - dot(h, hd))
        };
        let mut best = probe(&p.hessian_solve(&g)?, &p, &mut hd)?;
        let minus_x: Vec<f64> = x.iter().map(|v| -v).collect();
        best = best.max(probe(&minus_x, &p, &mut hd)?);
        best = best.max(probe(&x, &p, &mut hd)?);
        for _ in 0..3 {
            let h: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
            best = best.max(probe(&h, &p, &mut hd)?);
        }
        acc.observe(best - nu, || format!("sample {i}"));
    }
    Ok(acc.report(
        format!("barrier-parameter {}", cone_label(cone)),
        BARRIER_PARAMETER_TOL,
        spec.seed,
    ))
}

/// `F(lambda x) = F(x) - nu log lambda` for `lambda` in `{1/2, 3}`.
pub fn check_log_homogeneity(cone: &Cone, spec: &SampleSpec) -> Result<VerificationReport> {
    spec.validate()?;
    cone.validate()?;
    let set = ConeSet::new(vec![cone.clone()])?;
    let nu = set.barrier_parameter();
    let mut acc = Accumulator::new();
    for i in 0..spec.count {
        let mut rng = Stream::for_sample(spec.seed, i as u64);
        let x = sample_interior(cone, &mut rng, spec.boundary_bias)?;
        let base = set.value(&x)?;
        for lambda in [0.5, 3.0] {
            let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
            let v = set.value(&scaled)?;
            acc.observe((v - base + nu * lambda.ln()).abs(), || {
                format!("sample {i}, lambda={lambda}")
            });
        }
    }
    Ok(acc.report(
        format!("log-homogeneity {}", cone_label(cone)),
        LOG_HOMOGENEITY_TOL,
        spec.seed,
    ))
}

// ---------------------------------------------------------------------------
// Compatibility.

/// Concave function family whose third derivative must be controlled by its
/// curvature: `|D^3 f[h^3]| <= -3 beta D^2 f[h^2]` for all `h` keeping the
/// arguments in the closed domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompatFamily {
    /// `f = Psi_alpha`, jointly concave for `alpha` in `[1/2, 1]`.
    PsiConcave { alpha: f64 },
    /// `f = -Psi_alpha`, concave for `alpha` in `[1, 2]`. Any `alpha > 1` is
    /// accepted when all sampled sides are 1, where scalar concavity of
    /// `-x^alpha y^(1-alpha)` has no upper limit on `alpha`.
    NegPsi { alpha: f64 },
    /// `f = -PD_alpha(u, X, Y)`, concave for `alpha` in `[1/2, 1)`.
    NegPerspective { alpha: f64 },
}

impl CompatFamily {
    pub fn alpha(&self) -> f64 {
        match self {
            CompatFamily::PsiConcave { alpha }
            | CompatFamily::NegPsi { alpha }
            | CompatFamily::NegPerspective { alpha } => *alpha,
        }
    }

    fn label(&self) -> String {
        match self {
            CompatFamily::PsiConcave { alpha } => format!("psi-concave(alpha={alpha})"),
            CompatFamily::NegPsi { alpha } => format!("neg-psi(alpha={alpha})"),
            CompatFamily::NegPerspective { alpha } => format!("neg-perspective(alpha={alpha})"),
        }
    }

    fn validate(&self, dims: &[usize]) -> Result<()> {
        let a = self.alpha();
        if !a.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        let ok = match self {
            CompatFamily::PsiConcave { .. } => (0.5..=1.0).contains(&a),
            CompatFamily::NegPsi { .. } => {
                a >= 1.0 && (a <= 2.0 || dims.iter().all(|&n| n == 1))
            }
            CompatFamily::NegPerspective { .. } => (0.5..1.0).contains(&a),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "alpha {a} outside the concavity range of {} (alpha > 2 needs all-scalar dims)",
                self.label()
            )))
        }
    }
}

/// Second and third directional derivatives of the family member, oriented so
/// the function is concave (`d2 <= 0`).
fn concave_derivs(
    family: &CompatFamily,
    params: &TraceFnParams,
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    d: &DirectionPair,
    u: f64,
    sigma: f64,
) -> Result<(f64, f64)> {
    match family {
        CompatFamily::PsiConcave { .. } => {
            let p = PsiPoint::prepare(params, x, y)?;
            Ok((p.second_directional(d), p.third_directional(d)?))
        }
        CompatFamily::NegPsi { .. } => {
            let p = PsiPoint::prepare(params, x, y)?;
            Ok((-p.second_directional(d), -p.third_directional(d)?))
        }
        CompatFamily::NegPerspective { alpha } => {
            let p = PerspectivePoint::prepare(*alpha, u, x, y)?;
            Ok((-p.second_directional(sigma, d), -p.third_directional(sigma, d)?))
        }
    }
}

/// `|D^3 f| <= -3 beta D^2 f` over random base points and admissible
/// directions scaled to approach the domain boundary. Both `+h` and `-h` are
/// probed (the third derivative is odd in `h`); violations are normalized by
/// `max(1, |D^2 f|)`.
pub fn check_compatibility(
    family: &CompatFamily,
    beta: f64,
    spec: &SampleSpec,
) -> Result<VerificationReport> {
    spec.validate()?;
    family.validate(&spec.dims)?;
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::InvalidParameter(format!("beta {beta} must be positive")));
    }
    let alpha = family.alpha();
    let params = TraceFnParams::sandwiched_renyi(alpha)?;
    let theta_grid = [0.1, 0.5, 0.9, 0.999];
    let mut acc = Accumulator::new();
    let observe = |acc: &mut Accumulator, d2: f64, d3: f64, scale: f64, inputs: &dyn Fn() -> String| {
        // Concavity gives d2 <= 0; max over +-h of D^3 f + 3 beta D^2 f.
        let v = (d3.abs() + 3.0 * beta * d2) / d2.abs().max(scale).max(1.0);
        acc.observe(v, inputs);
    };
    for i in 0..spec.count {
        let mut rng = Stream::for_sample(spec.seed, i as u64);
        let n = spec.dims[i % spec.dims.len()];
        let theta = theta_grid[i % theta_grid.len()];
        let x = random::positive_definite(&mut rng, n, 0.3);
        let y = random::positive_definite(&mut rng, n, 0.3);
        let d = DirectionPair::new(
            boundary_direction(&mut rng, &x, theta)?,
            boundary_direction(&mut rng, &y, theta)?,
        );
        let u = (0.3 * rng.normal()).exp();
        let sigma = theta * u * rng.uniform_in(-1.0, 1.0);
        let (d2, d3) = concave_derivs(family, &params, &x, &y, &d, u, sigma)?;
        // Random directions can be nearly flat (for scalars, matching signs
        // make them exactly flat) while Psi itself is huge, leaving pure
        // roundoff in both derivatives. Normalize by the curvature along the
        // never-degenerate direction (theta X, -theta Y) so noise at flat
        // samples is measured against the point's real curvature scale.
        let dref = DirectionPair::new(x.scale(theta), y.scale(-theta));
        let (d2_ref, _) = concave_derivs(family, &params, &x, &y, &dref, u, 0.0)?;
        observe(&mut acc, d2, d3, d2_ref.abs(), &|| {
            format!("sample {i}: n={n} theta={theta}")
        });
    }
    // Deterministic extremal probes in the all-scalar case, including the
    // closed-domain boundary theta = 1 where the inequality is tight at
    // beta = (2 alpha - 1) / 3.
    if spec.dims.iter().all(|&n| n == 1)
        && !matches!(family, CompatFamily::NegPerspective { .. })
    {
        let e = HermitianMatrix::identity(1);
        for theta in [0.1, 0.5, 0.9, 1.0] {
            let d = DirectionPair::new(e.scale(theta), e.scale(-theta));
            let (d2, d3) = concave_derivs(family, &params, &e, &e, &d, 1.0, 0.0)?;
            observe(&mut acc, d2, d3, 0.0, &|| format!("extremal probe theta={theta}"));
        }
    }
    Ok(acc.report(
        format!("compatibility beta={beta} {}", family.label()),
        COMPATIBILITY_TOL,
        spec.seed,
    ))
}

/// Supremum of `|D^3 f| / (-D^2 f)` for the scalar member `f = -x^alpha y^(1-alpha)`,
/// evaluated through the production derivatives at the extremal probe
/// `(x, y) = (1, 1)`, `(dx, dy) = (1, -1)`. Equals `2 alpha - 1` exactly.
pub fn scalar_compatibility_ratio(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "the scalar ratio is defined for alpha > 1, got {alpha}"
        )));
    }
    let params = TraceFnParams::sandwiched_renyi(alpha)?;
    let e = HermitianMatrix::identity(1);
    let p = PsiPoint::prepare(&params, &e, &e)?;
    let d = DirectionPair::new(e.clone(), e.scale(-1.0));
    // f = -Psi: -D^2 f = D^2 Psi = 4 alpha (alpha - 1) > 0 at this probe.
    Ok(p.third_directional(&d)?.abs() / p.second_directional(&d))
}

/// The reported scalar supremum matches `2 alpha - 1`, and no random base
/// point or direction exceeds it.
pub fn check_scalar_ratio(alpha: f64, spec: &SampleSpec) -> Result<VerificationReport> {
    spec.validate()?;
    let target = 2.0 * alpha - 1.0;
    let params = TraceFnParams::sandwiched_renyi(alpha)?;
    let mut acc = Accumulator::new();
    acc.observe((scalar_compatibility_ratio(alpha)? - target).abs(), || {
        "extremal probe (1, -1) at (1, 1)".into()
    });
    for i in 0..spec.count {
        let mut rng = Stream::for_sample(spec.seed, i as u64);
        let x = HermitianMatrix::from_diagonal(&[(0.5 * rng.normal()).exp()]);
        let y = HermitianMatrix::from_diagonal(&[(0.5 * rng.normal()).exp()]);
        // Admissible directions keep x +- dx and y +- dy nonnegative, which
        // for scalars means |a|, |b| <= 1 in dx = a x, dy = b y. The supremum
        // 2 alpha - 1 is over exactly this set; unconstrained directions can
        // exceed it.
        let (a, b) = (rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
        let d = DirectionPair::new(x.scale(a), y.scale(b));
        let p = PsiPoint::prepare(&params, &x, &y)?;
        let d2 = p.second_directional(&d);
        // The curvature degenerates on the line a = b, where the ratio is
        // roundoff over roundoff; skip draws that are flat relative to the
        // extremal direction's curvature.
        let d2_ref = p.second_directional(&DirectionPair::new(x.clone(), y.scale(-1.0)));
        if d2 < 1e-4 * d2_ref {
            continue;
        }
        let ratio = p.third_directional(&d)?.abs() / d2;
        acc.observe(ratio - target, || format!("sample {i}: a={a:.3} b={b:.3}"));
    }
    Ok(acc.report(
        format!("scalar-ratio alpha={alpha}"),
        SCALAR_RATIO_TOL,
        spec.seed,
    ))
}

// ---------------------------------------------------------------------------
// Operator concavity along lines.

/// Concavity (alpha <= 1) or convexity (alpha > 1) of
/// `F(t) = Psi_alpha(X + t H, Y + t V)` on `(-1, 1)`, certified two ways per
/// sample: a midpoint test on spectral lifts `F(T)` of random Hermitian `T`
/// with spectra inside `(-0.9, 0.9)`, and positive semidefiniteness of the
/// Hansen-Tomiyama minor matrices of `-F` (resp. `+F`) at sampled `t`.
///
/// Requires `X +- H` and `Y +- V` PSD so the whole line stays in the closed
/// domain. Violations are normalized by each sub-test's numeric resolution
/// ([`MIDPOINT_TOL`], [`HT_TOL_LOW`], [`HT_TOL_HIGH`]); the report tolerance
/// is 1.
pub fn check_operator_concavity_line(
    alpha: f64,
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    direction: &DirectionPair,
    lift_dims: &[usize],
    spec: &SampleSpec,
) -> Result<VerificationReport> {
    spec.validate()?;
    if !alpha.is_finite() || !(0.5..=2.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "operator line checks cover alpha in [1/2, 2], got {alpha}"
        )));
    }
    if lift_dims.is_empty() {
        return Err(Error::InvalidParameter("lift dimension list is empty".into()));
    }
    for &m in lift_dims {
        if m == 0 || m > 3 {
            return Err(Error::InvalidParameter(format!(
                "lift dimension {m} outside 1..=3 (minor matrices stop at the sixth derivative)"
            )));
        }
    }
    if x.dim() != y.dim() || direction.dx.dim() != x.dim() || direction.dy.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim().max(direction.dx.dim()).max(direction.dy.dim()) });
    }
    for (mat, dir, label) in [(x, &direction.dx, "X"), (y, &direction.dy, "Y")] {
        for s in [-1.0, 1.0] {
            let lo = mat.add_scaled(s, dir).min_eigenvalue()?;
            if lo < -1e-12 * mat.norm().max(1.0) {
                return Err(Error::ExteriorPoint(format!(
                    "{label} {s:+} direction leaves the PSD cone (min eigenvalue {lo:.3e})"
                )));
            }
        }
    }
    let params = TraceFnParams::sandwiched_renyi(alpha)?;
    let concave = alpha <= 1.0;
    let line = |t: f64| -> Result<f64> {
        psi_value(
            &params,
            &x.add_scaled(t, &direction.dx),
            &y.add_scaled(t, &direction.dy),
        )
    };
    let mut acc = Accumulator::new();
    for i in 0..spec.count {
        let mut rng = Stream::for_sample(spec.seed, i as u64);
        for &m in lift_dims {
            // (a) Midpoint test on the spectral lift.
            let draw = |rng: &mut Stream| -> Result<HermitianMatrix> {
                let g = random::hermitian(rng, m);
                let rho = spectral_radius(&g)?.max(1e-12);
                Ok(g.scale(0.88 * rng.uniform_in(0.3, 1.0) / rho))
            };
            let t1 = draw(&mut rng)?;
            let t2 = draw(&mut rng)?;
            let lift = |tm: &HermitianMatrix| -> Result<(HermitianMatrix, f64)> {
                let e = tm.eigh()?;
                let vals = e
                    .eigenvalues
                    .iter()
                    .map(|&tau| line(tau))
                    .collect::<Result<Vec<f64>>>()?;
                let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                Ok((e.recombine(&vals), scale))
            };
            let (f1, s1) = lift(&t1)?;
            let (f2, s2) = lift(&t2)?;
            let (fm, _) = lift(&t1.add_scaled(1.0, &t2).scale(0.5))?;
            let mut gap = fm.add_scaled(-0.5, &f1).add_scaled(-0.5, &f2);
            if !concave {
                gap = gap.scale(-1.0);
            }
            let lam = gap.min_eigenvalue()?;
            let scale = s1.max(s2).max(1.0);
            acc.observe(-lam / scale / MIDPOINT_TOL, || {
                format!("sample {i}: midpoint lift m={m}")
            });
        }
        // (b) Hansen-Tomiyama minors of the convex orientation of the line.
        let t0 = if i == 0 { 0.0 } else { rng.uniform_in(-0.3, 0.3) };
        for &m in lift_dims {
            let h0 = if m <= 2 { 1e-2 } else { 5e-2 };
            let mut f = |t: f64| -> Result<f64> {
                let v = line(t)?;
                Ok(if concave { -v } else { v })
            };
            let hm = hansen_tomiyama_matrix(&mut f, t0, m, h0)?;
            let lam = sym_min_eigenvalue(&hm);
            let scale = hm.norm().max(1.0);
            let tol = if m <= 2 { HT_TOL_LOW } else { HT_TOL_HIGH };
            acc.observe(-lam / scale / tol, || {
                format!("sample {i}: Hansen-Tomiyama m={m} at t={t0:.3}")
            });
        }
    }
    Ok(acc.report(
        format!(
            "operator-{} line alpha={alpha} n={}",
            if concave { "concavity" } else { "convexity" },
            x.dim()
        ),
        1.0,
        spec.seed,
    ))
}

/// Drive [`check_operator_concavity_line`] over random base points and
/// admissible directions (spectral-norm scaled, staying clear of the domain
/// boundary): one aggregated report per alpha grid entry, `spec.count`
/// instances each with lift dimensions 2 and 3.
pub fn operator_line_suite(spec: &SampleSpec) -> Result<Vec<VerificationReport>> {
    spec.validate()?;
    if spec.alpha_grid.is_empty() {
        return Err(Error::InvalidParameter("alpha grid must be nonempty".into()));
    }
    let lift_dims = [2usize, 3];
    let mut out = Vec::with_capacity(spec.alpha_grid.len());
    for &alpha in &spec.alpha_grid {
        let mut acc = Accumulator::new();
        let mut total = 0usize;
        for j in 0..spec.count {
            // Instance draws come from a stream family disjoint from the
            // per-sample streams used inside the check.
            let mut rng = Stream::for_sample(spec.seed ^ 0xA5A5_5A5A_0F0F_F0F0, j as u64);
            let n = spec.dims[j % spec.dims.len()];
            let x = random::positive_definite(&mut rng, n, 0.3);
            let y = random::positive_definite(&mut rng, n, 0.3);
            let theta_x = rng.uniform_in(0.1, 0.7);
            let theta_y = rng.uniform_in(0.1, 0.7);
            let d = DirectionPair::new(
                boundary_direction(&mut rng, &x, theta_x)?,
                boundary_direction(&mut rng, &y, theta_y)?,
            );
            let inner = SampleSpec {
                seed: rng.next_u64(),
                count: 2,
                dims: spec.dims.clone(),
                alpha_grid: vec![alpha],
                boundary_bias: spec.boundary_bias,
            };
            let rep = check_operator_concavity_line(alpha, &x, &y, &d, &lift_dims, &inner)?;
            total += rep.samples;
            acc.observe(rep.worst_violation, || {
                format!("instance {j} (n={n}): {}", rep.worst_case_inputs)
            });
        }
        let mut rep = acc.report(format!("operator-line alpha={alpha}"), 1.0, spec.seed);
        rep.samples = total;
        out.push(rep);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Kronecker contraction identity.

/// Contract the composed perspective `P_{g,h}(X (x) I, Y (x) I, I (x) conj(Y))`
/// with `g = -x^(1-alpha)`, `h = x^(1/alpha)` through the map
/// `Phi(M) = sum_{ij} M[i n + i, j n + j]` and compare against
/// `-Psi_alpha(X, Y)`. The identity certifies the Kronecker lifting used to
/// transfer operator convexity of two-variable perspectives to the trace
/// function for `alpha` in `[1, 2]`.
pub fn check_kron_identity(
    alpha: f64,
    x: &HermitianMatrix,
    y: &HermitianMatrix,
) -> Result<VerificationReport> {
    if !alpha.is_finite() || !(1.0..=2.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "the contraction identity is certified for alpha in [1, 2], got {alpha}"
        )));
    }
    let n = x.dim();
    if y.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.dim() });
    }
    if n == 0 || n > 3 {
        return Err(Error::InvalidParameter(format!(
            "side {n} outside 1..=3: the composed perspective lives on n^2 x n^2 matrices"
        )));
    }
    for m in [x, y] {
        if m.min_eigenvalue()? <= 0.0 {
            return Err(Error::ExteriorPoint(
                "the contraction identity needs strictly positive definite arguments".into(),
            ));
        }
    }
    let eye = HermitianMatrix::identity(n);
    let p = composed_perspective(
        &ScalarFunction::NegPower(1.0 - alpha),
        &ScalarFunction::Power(1.0 / alpha),
        &kron(x, &eye),
        &kron(y, &eye),
        &kron(&eye, &y.conjugate()),
    )?;
    let mm = p.as_matrix();
    let mut contracted = 0.0;
    for i in 0..n {
        for j in 0..n {
            // Hermitian symmetry cancels the imaginary parts pairwise.
            contracted += mm[(i * n + i, j * n + j)].re;
        }
    }
    let psi = renyi_trace_value(alpha, x, y)?;
    let viol = (contracted + psi).abs();
    Ok(VerificationReport {
        property_name: format!("kron-identity alpha={alpha} n={n}"),
        samples: 1,
        worst_violation: viol,
        worst_case_inputs: format!("n={n} alpha={alpha}"),
        tolerance: KRON_TOL,
        passed: viol <= KRON_TOL,
        seed: 0,
    })
}

/// [`check_kron_identity`] over random positive definite pairs: one report
/// per alpha grid entry. Every grid entry must lie in `[1, 2]` and every
/// side in `1..=3`.
pub fn kron_identity_suite(spec: &SampleSpec) -> Result<Vec<VerificationReport>> {
    spec.validate()?;
    if spec.alpha_grid.is_empty() {
        return Err(Error::InvalidParameter("alpha grid must be nonempty".into()));
    }
    for &n in &spec.dims {
        if n > 3 {
            return Err(Error::InvalidParameter(format!(
                "side {n} outside 1..=3 for the contraction identity"
            )));
        }
    }
    let mut out = Vec::with_capacity(spec.alpha_grid.len());
    for &alpha in &spec.alpha_grid {
        let mut acc = Accumulator::new();
        for i in 0..spec.count {
            let mut rng = Stream::for_sample(spec.seed, i as u64);
            let n = spec.dims[i % spec.dims.len()];
            let x = random::positive_definite(&mut rng, n, 0.3);
            let y = random::positive_definite(&mut rng, n, 0.3);
            let rep = check_kron_identity(alpha, &x, &y)?;
            acc.observe(rep.worst_violation, || format!("sample {i}: n={n}"));
        }
        out.push(acc.report(format!("kron-identity alpha={alpha}"), KRON_TOL, spec.seed));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Derivative consistency.

/// Which analytic derivative stack to compare against finite differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeTarget {
    /// The trace function `Psi_alpha` through [`PsiPoint`].
    TraceFn,
    /// Each cone barrier through [`ConeSet::prepare`].
    Barrier,
}

/// Analytic first/second/third directional derivatives against
/// Richardson-extrapolated central differences along random lines. Each
/// order's relative error is normalized by its tolerance
/// ([`DERIV_TOL_GRADIENT`], [`DERIV_TOL_HESSIAN`], [`DERIV_TOL_THIRD`]); the
/// report tolerance is 1.
pub fn check_derivative_consistency(
    target: DerivativeTarget,
    spec: &SampleSpec,
) -> Result<VerificationReport> {
    spec.validate()?;
    match target {
        DerivativeTarget::TraceFn => deriv_tracefn(spec),
        DerivativeTarget::Barrier => deriv_barrier(spec),
    }
}

fn observe_orders(
    acc: &mut Accumulator,
    analytic: [f64; 3],
    fd: [f64; 3],
    cross: f64,
    inputs: &dyn Fn(&'static str) -> String,
) {
    let tols = [DERIV_TOL_GRADIENT, DERIV_TOL_HESSIAN, DERIV_TOL_THIRD];
    let labels = ["gradient", "hessian", "third"];
    for k in 0..3 {
        let mut err = (fd[k] - analytic[k]).abs();
        if k == 0 {
            // The gradient pairing and the directional formula must agree on
            // top of matching the finite difference.
            err = err.max(cross);
        }
        let rel = err / analytic[k].abs().max(1.0) / tols[k];
        acc.observe(rel, &|| inputs(labels[k]));
    }
}

fn deriv_tracefn(spec: &SampleSpec) -> Result<VerificationReport> {
    if spec.alpha_grid.is_empty() {
        return Err(Error::InvalidParameter("alpha grid must be nonempty".into()));
    }
    let mut acc = Accumulator::new();
    for i in 0..spec.count {
        let mut rng = Stream::for_sample(spec.seed, i as u64);
        let n = spec.dims[i % spec.dims.len()];
        let alpha = spec.alpha_grid[i % spec.alpha_grid.len()];
        let params = TraceFnParams::sandwiched_renyi(alpha)?;
        let x = random::positive_definite(&mut rng, n, 0.3);
        let y = random::positive_definite(&mut rng, n, 0.3);
        let mut d = DirectionPair::new(random::hermitian(&mut rng, n), random::hermitian(&mut rng, n));
        let dn = (d.dx.norm().powi(2) + d.dy.norm().powi(2)).sqrt();
        d = d.scale(1.0 / dn);
        let p = PsiPoint::prepare(&params, &x, &y)?;
        let an1 = p.gradient_x().inner(&d.dx) + p.gradient_y().inner(&d.dy);
        let cross = (an1 - p.first_directional(&d)).abs();
        let (hx, hy) = p.hessian_apply(&d);
        let an2 = hx.inner(&d.dx) + hy.inner(&d.dy);
        let an3 = p.third_directional(&d)?;
        let h0 = 1e-3 * (1.0 + (x.norm().powi(2) + y.norm().powi(2)).sqrt());
        let mut f = |t: f64| -> Result<f64> {
            psi_value(&params, &x.add_scaled(t, &d.dx), &y.add_scaled(t, &d.dy))
        };
        let fd = [
            fd_derivative(&mut f, 0.0, 1, h0)?,
            fd_derivative(&mut f, 0.0, 2, h0)?,
            fd_derivative(&mut f, 0.0, 3, h0)?,
        ];
        observe_orders(&mut acc, [an1, an2, an3], fd, cross, &|order| {
            format!("sample {i}: {order} n={n} alpha={alpha}")
        });
    }
    Ok(acc.report("derivative-consistency trace-fn".into(), 1.0, spec.seed))
}

fn deriv_barrier(spec: &SampleSpec) -> Result<VerificationReport> {
    let roster = cone_roster(spec);
    let mut acc = Accumulator::new();
    for i in 0..spec.count {
        let mut rng = Stream::for_sample(spec.seed, i as u64);
        let cone = &roster[i % roster.len()];
        let set = ConeSet::new(vec![cone.clone()])?;
        // Half the configured boundary pressure: the difference stencil needs
        // interior room on both sides.
        let x = sample_interior(cone, &mut rng, 0.5 * spec.boundary_bias)?;
        let p = set.prepare(&x)?;
        let dim = p.dim();
        let mut d: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
        let dn = norm(&d);
        for v in &mut d {
            *v /= dn;
        }
        let an1 = dot(p.gradient(), &d);
        let mut hd = vec![0.0; dim];
        p.hessian_apply(&d, &mut hd)?;
        let an2 = dot(&d, &hd);
        let an3 = p.third_directional(&d)?;
        // Barrier derivatives along d grow like powers of the Newton-metric
        // length sqrt(<d, H d>); keeping the step small in that metric bounds
        // the Richardson truncation uniformly in the boundary distance.
        let mut h0 = (1e-3 * (1.0 + norm(&x))).min(2e-2 / an2.max(1e-12).sqrt());
        // The widest stencil reaches 2 h0; shrink until the whole segment is
        // interior (the cone is convex, so the endpoints decide).
        for _ in 0..8 {
            let edge = |s: f64| -> Vec<f64> {
                x.iter().zip(&d).map(|(xv, dv)| xv + s * dv).collect()
            };
            if set.is_interior(&edge(2.0 * h0)) && set.is_interior(&edge(-2.0 * h0)) {
                break;
            }
            h0 *= 0.25;
        }
        let mut f = |t: f64| -> Result<f64> {
            let shifted: Vec<f64> = x.iter().zip(&d).map(|(xv, dv)| xv + t * dv).collect();
            set.value(&shifted)
        };
        let fd = [
            fd_derivative(&mut f, 0.0, 1, h0)?,
            fd_derivative(&mut f, 0.0, 2, h0)?,
            fd_derivative(&mut f, 0.0, 3, h0)?,
        ];
        observe_orders(&mut acc, [an1, an2, an3], fd, 0.0, &|order| {
            format!("sample {i}: {order} {}", cone_label(cone))
        });
    }
    Ok(acc.report("derivative-consistency barrier".into(), 1.0, spec.seed))
}

// ---------------------------------------------------------------------------
// Suites.

/// Cones exercised by the barrier suites: the orthant, PSD blocks for each
/// side, and every Renyi cone whose validity range contains an alpha grid
/// entry.
pub fn cone_roster(spec: &SampleSpec) -> Vec<Cone> {
    let mut v = vec![Cone::NonNeg { dim: 3 }];
    for &n in &spec.dims {
        v.push(Cone::Psd { side: n });
    }
    for &alpha in &spec.alpha_grid {
        for &n in &spec.dims {
            if (0.5..=1.0).contains(&alpha) {
                v.push(Cone::RenyiHypo { side: n, alpha });
            }
            if (1.0..=2.0).contains(&alpha) {
                v.push(Cone::RenyiEpi { side: n, alpha });
            }
            if (0.5..1.0).contains(&alpha) {
                v.push(Cone::RenyiPerspEpi { side: n, alpha });
            }
        }
    }
    v
}

/// [`check_self_concordance`] across the cone roster.
pub fn self_concordance_suite(spec: &SampleSpec) -> Result<Vec<VerificationReport>> {
    cone_roster(spec)
        .iter()
        .map(|c| check_self_concordance(c, spec))
        .collect()
}

/// [`check_barrier_parameter`] across the cone roster.
pub fn barrier_parameter_suite(spec: &SampleSpec) -> Result<Vec<VerificationReport>> {
    cone_roster(spec)
        .iter()
        .map(|c| check_barrier_parameter(c, spec))
        .collect()
}

/// [`check_log_homogeneity`] across the cone roster.
pub fn log_homogeneity_suite(spec: &SampleSpec) -> Result<Vec<VerificationReport>> {
    cone_roster(spec)
        .iter()
        .map(|c| check_log_homogeneity(c, spec))
        .collect()
}

/// [`check_compatibility`] at `beta = 1` for every family member the alpha
/// grid instantiates.
pub fn compatibility_suite(spec: &SampleSpec) -> Result<Vec<VerificationReport>> {
    spec.validate()?;
    let mut out = Vec::new();
    for &alpha in &spec.alpha_grid {
        if (0.5..=1.0).contains(&alpha) {
            out.push(check_compatibility(&CompatFamily::PsiConcave { alpha }, 1.0, spec)?);
        }
        if (1.0..=2.0).contains(&alpha) {
            out.push(check_compatibility(&CompatFamily::NegPsi { alpha }, 1.0, spec)?);
        }
        if (0.5..1.0).contains(&alpha) {
            out.push(check_compatibility(&CompatFamily::NegPerspective { alpha }, 1.0, spec)?);
        }
    }
    Ok(out)
}

/// [`check_scalar_ratio`] for every alpha grid entry (all must exceed 1),
/// plus the scalar compatibility check at the exact threshold
/// `beta = (2 alpha - 1) / 3` inflated by 10%.
pub fn scalar_alpha_gt2_suite(spec: &SampleSpec) -> Result<Vec<VerificationReport>> {
    spec.validate()?;
    if spec.alpha_grid.is_empty() {
        return Err(Error::InvalidParameter("alpha grid must be nonempty".into()));
    }
    let scalar = SampleSpec { dims: vec![1], ..spec.clone() };
    let mut out = Vec::new();
    for &alpha in &spec.alpha_grid {
        out.push(check_scalar_ratio(alpha, &scalar)?);
        let beta = 1.1 * (2.0 * alpha - 1.0) / 3.0;
        out.push(check_compatibility(&CompatFamily::NegPsi { alpha }, beta, &scalar)?);
    }
    Ok(out)
}

/// [`check_derivative_consistency`] for both targets.
pub fn derivative_consistency_suite(spec: &SampleSpec) -> Result<Vec<VerificationReport>> {
    Ok(vec![
        check_derivative_consistency(DerivativeTarget::TraceFn, spec)?,
        check_derivative_consistency(DerivativeTarget::Barrier, spec)?,
    ])
}

/// Every suite the alpha grid supports: barrier properties across the cone
/// roster, compatibility at `beta = 1`, operator lines, the contraction
/// identity (restricted to grid entries in `[1, 2]` and sides up to 3), and
/// derivative consistency.
pub fn run_all(spec: &SampleSpec) -> Result<Vec<VerificationReport>> {
    spec.validate()?;
    let mut out = Vec::new();
    out.extend(self_concordance_suite(spec)?);
    out.extend(barrier_parameter_suite(spec)?);
    out.extend(log_homogeneity_suite(spec)?);
    out.extend(compatibility_suite(spec)?);
    out.extend(operator_line_suite(spec)?);
    let kron_grid: Vec<f64> = spec
        .alpha_grid
        .iter()
        .copied()
        .filter(|a| (1.0..=2.0).contains(a))
        .collect();
    let kron_dims: Vec<usize> = spec.dims.iter().copied().filter(|&n| n <= 3).collect();
    if !kron_grid.is_empty() && !kron_dims.is_empty() {
        let kron_spec = SampleSpec { alpha_grid: kron_grid, dims: kron_dims, ..spec.clone() };
        out.extend(kron_identity_suite(&kron_spec)?);
    }
    out.extend(derivative_consistency_suite(spec)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(seed: u64, count: usize) -> SampleSpec {
        SampleSpec::quick(seed, count)
    }

    #[test]
    fn stencils_reproduce_monomial_derivatives() {
        // f = x^k has k-th derivative k! everywhere; the stencils are exact
        // on polynomials of matching degree.
        for k in 1..=6usize {
            let mut f = |t: f64| -> Result<f64> { Ok(t.powi(k as i32)) };
            let d = fd_derivative(&mut f, 0.0, k, 0.1).unwrap();
            assert!(
                (d - factorial(k)).abs() < 1e-8 * factorial(k),
                "order {k}: got {d}"
            );
        }
    }

    #[test]
    fn minor_matrix_of_square_is_the_unit() {
        // x^2 is 1-convex with H_1 = [1].
        let mut f = |t: f64| -> Result<f64> { Ok(t * t) };
        let h = hansen_tomiyama_matrix(&mut f, 0.7, 1, 1e-2).unwrap();
        assert_eq!(h.nrows(), 1);
        assert!((h[(0, 0)] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn minor_matrix_of_quartic_has_negative_determinant() {
        // For f = x^4: H_2 = [[6x^2, 4x], [4x, 1]] with determinant -10 x^2,
        // so x^4 is not 2-convex away from the origin.
        let x0 = 0.8;
        let mut f = |t: f64| -> Result<f64> { Ok(t.powi(4)) };
        let h = hansen_tomiyama_matrix(&mut f, x0, 2, 1e-2).unwrap();
        assert!((h[(0, 0)] - 6.0 * x0 * x0).abs() < 1e-6);
        assert!((h[(0, 1)] - 4.0 * x0).abs() < 1e-6);
        assert!((h[(1, 0)] - 4.0 * x0).abs() < 1e-6);
        assert!((h[(1, 1)] - 1.0).abs() < 1e-6);
        let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)];
        assert!((det + 10.0 * x0 * x0).abs() < 1e-4);
        assert!(sym_min_eigenvalue(&h) < -1e-3);
    }

    #[test]
    fn minor_matrix_of_exponential_matches_analytic_entries() {
        // Entries are e^t / (i+j)!. exp is convex but not matrix convex, and
        // the order-3 minor detects that: already det H_2 = -e^{2t}/144.
        let t0 = 0.3;
        let mut f = |t: f64| -> Result<f64> { Ok(t.exp()) };
        let h = hansen_tomiyama_matrix(&mut f, t0, 3, 5e-2).unwrap();
        for i in 1..=3usize {
            for j in 1..=3usize {
                let expect = t0.exp() / factorial(i + j);
                let got = h[(i - 1, j - 1)];
                assert!(
                    (got - expect).abs() < 2e-4 * t0.exp(),
                    "entry ({i},{j}): got {got}, expected {expect}"
                );
            }
        }
        assert!(sym_min_eigenvalue(&h) < -5e-5);
    }

    #[test]
    fn orthant_self_concordance_is_tight() {
        // For -log x the ratio |D^3| / (2 (D^2)^{3/2}) is exactly 1, so the
        // normalized violation sits at 0 to machine precision.
        let rep = check_self_concordance(&Cone::NonNeg { dim: 1 }, &spec(11, 200)).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.worst_violation.abs() < 1e-12, "{}", rep.worst_violation);
    }

    #[test]
    fn barrier_suites_pass_on_all_cones() {
        let s = spec(17, 40);
        for rep in self_concordance_suite(&s).unwrap() {
            assert!(rep.passed, "{rep:?}");
        }
        for rep in barrier_parameter_suite(&s).unwrap() {
            assert!(rep.passed, "{rep:?}");
        }
        for rep in log_homogeneity_suite(&s).unwrap() {
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn barrier_parameter_supremum_is_attained() {
        // The probe h = H^{-1} g reaches nu exactly, so the worst violation is
        // a hair under 0, never far below.
        let rep = check_barrier_parameter(
            &Cone::RenyiHypo { side: 2, alpha: 0.75 },
            &spec(23, 60),
        )
        .unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.worst_violation > -1e-6, "{}", rep.worst_violation);
    }

    #[test]
    fn compatibility_holds_at_beta_one() {
        let s = spec(29, 60);
        for rep in compatibility_suite(&s).unwrap() {
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn compatibility_survives_inflated_beta() {
        let s = spec(31, 60);
        let rep =
            check_compatibility(&CompatFamily::NegPsi { alpha: 2.0 }, 1.1, &s).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn deflated_beta_fails_on_the_scalar_extremal() {
        // At alpha = 2 the tight constant is beta = 1; beta = 0.9 must be
        // caught, and the scalar extremal probe at theta = 1 is the witness:
        // |D^3 f| - 2.7 |D^2 f| = 24 - 21.6 > 0.
        let s = SampleSpec { dims: vec![1], ..spec(37, 40) };
        let rep = check_compatibility(&CompatFamily::NegPsi { alpha: 2.0 }, 0.9, &s).unwrap();
        assert!(!rep.passed, "{rep:?}");
        assert!(rep.worst_violation > 0.1, "{}", rep.worst_violation);
        assert!(rep.worst_case_inputs.contains("extremal"), "{rep:?}");
    }

    #[test]
    fn scalar_ratio_matches_closed_form() {
        for alpha in [2.0, 2.5, 3.0, 5.0] {
            let ratio = scalar_compatibility_ratio(alpha).unwrap();
            assert!(
                (ratio - (2.0 * alpha - 1.0)).abs() < 1e-9,
                "alpha={alpha}: ratio {ratio}"
            );
        }
    }

    #[test]
    fn scalar_ratio_suite_covers_alpha_beyond_two() {
        let s = SampleSpec {
            alpha_grid: vec![2.0, 2.5, 3.0, 5.0],
            dims: vec![1],
            ..spec(41, 120)
        };
        for rep in scalar_alpha_gt2_suite(&s).unwrap() {
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn operator_lines_pass_for_concave_and_convex_orders() {
        let s = SampleSpec {
            alpha_grid: vec![0.75, 1.5],
            count: 6,
            ..spec(43, 6)
        };
        for rep in operator_line_suite(&s).unwrap() {
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn operator_line_rejects_directions_leaving_the_domain() {
        let mut rng = Stream::new(47);
        let x = random::positive_definite(&mut rng, 2, 0.3);
        let y = random::positive_definite(&mut rng, 2, 0.3);
        // A direction twice the spectral envelope of X escapes the PSD cone.
        let bad = boundary_direction(&mut rng, &x, 2.0).unwrap();
        let d = DirectionPair::new(bad, HermitianMatrix::zeros(2));
        let err = check_operator_concavity_line(0.75, &x, &y, &d, &[2], &spec(47, 2));
        assert!(matches!(err, Err(Error::ExteriorPoint(_))), "{err:?}");
    }

    #[test]
    fn operator_line_rejects_large_lift_orders() {
        let mut rng = Stream::new(53);
        let x = random::positive_definite(&mut rng, 2, 0.3);
        let y = random::positive_definite(&mut rng, 2, 0.3);
        let d = DirectionPair::new(
            boundary_direction(&mut rng, &x, 0.5).unwrap(),
            boundary_direction(&mut rng, &y, 0.5).unwrap(),
        );
        let err = check_operator_concavity_line(0.75, &x, &y, &d, &[4], &spec(53, 2));
        assert!(matches!(err, Err(Error::InvalidParameter(_))), "{err:?}");
    }

    #[test]
    fn kron_identity_holds_to_quadrature_precision() {
        let s = SampleSpec {
            alpha_grid: vec![1.25, 1.5, 2.0],
            dims: vec![1, 2, 3],
            ..spec(59, 20)
        };
        for rep in kron_identity_suite(&s).unwrap() {
            assert!(rep.passed, "{rep:?}");
            assert!(rep.worst_violation <= 1e-10, "{rep:?}");
        }
    }

    #[test]
    fn kron_identity_rejects_alpha_outside_range() {
        let mut rng = Stream::new(61);
        let x = random::positive_definite(&mut rng, 2, 0.3);
        let y = random::positive_definite(&mut rng, 2, 0.3);
        assert!(check_kron_identity(0.75, &x, &y).is_err());
        assert!(check_kron_identity(2.5, &x, &y).is_err());
    }

    #[test]
    fn derivative_consistency_holds_for_both_targets() {
        let s = spec(67, 50);
        for rep in derivative_consistency_suite(&s).unwrap() {
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn reports_are_deterministic_in_the_seed() {
        let s = spec(71, 15);
        let a = check_self_concordance(&Cone::Psd { side: 2 }, &s).unwrap();
        let b = check_self_concordance(&Cone::Psd { side: 2 }, &s).unwrap();
        assert_eq!(a.worst_violation.to_bits(), b.worst_violation.to_bits());
        assert_eq!(a.worst_case_inputs, b.worst_case_inputs);
        let c = check_self_concordance(
            &Cone::Psd { side: 2 },
            &SampleSpec { seed: 72, ..s },
        )
        .unwrap();
        assert_ne!(a.worst_violation.to_bits(), c.worst_violation.to_bits());
    }

    #[test]
    fn sample_spec_validation_rejects_nonsense() {
        let mut s = spec(73, 10);
        s.count = 0;
        assert!(s.validate().is_err());
        let mut s = spec(73, 10);
        s.dims.clear();
        assert!(s.validate().is_err());
        let mut s = spec(73, 10);
        s.boundary_bias = 1.0;
        assert!(s.validate().is_err());
        let mut s = spec(73, 10);
        s.alpha_grid.push(-0.5);
        assert!(s.validate().is_err());
    }

    #[test]
    fn boundary_bias_presses_samples_toward_the_boundary() {
        // With bias near 1 the orthant samples carry slacks orders of
        // magnitude smaller than with bias 0, and the checks still pass.
        let tight = SampleSpec { boundary_bias: 0.9, ..spec(79, 80) };
        let rep = check_self_concordance(&Cone::RenyiEpi { side: 2, alpha: 1.5 }, &tight).unwrap();
        assert!(rep.passed, "{rep:?}");
        let rep = check_log_homogeneity(&Cone::RenyiPerspEpi { side: 2, alpha: 0.7 }, &tight)
            .unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn run_all_aggregates_every_suite() {
        let s = SampleSpec {
            alpha_grid: vec![0.75, 1.5],
            count: 5,
            ..spec(83, 5)
        };
        let reports = run_all(&s).unwrap();
        assert!(reports.iter().all(|r| r.passed), "{:?}", reports.iter().find(|r| !r.passed));
        // roster: NonNeg + 2 Psd + hypo x2 + epi x2 + persp x2 = 9 cones, three
        // barrier suites each; compatibility 3 families; operator lines 2;
        // kron 1; derivative consistency 2.
        assert_eq!(reports.len(), 9 * 3 + 3 + 2 + 1 + 2);
    }
}
