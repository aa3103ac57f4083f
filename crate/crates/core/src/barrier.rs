//! Logarithmically homogeneous self-concordant barriers for the supported
//! cones.
//!
//! Each cone carries a canonical barrier `F` with parameter `nu`:
//!
//! | cone                | set                                        | barrier                                | nu      |
//! |---------------------|--------------------------------------------|----------------------------------------|---------|
//! | `NonNeg(k)`         | `x >= 0`                                   | `-sum log x_i`                          | `k`     |
//! | `Psd(n)`            | Hermitian `X >= 0`                         | `-log det X`                            | `n`     |
//! | `RenyiHypo(n, a)`   | `t <= Psi_a(X,Y)`, `X,Y >= 0`, `a in [1/2,1]` | `-log(Psi-t) - log det X - log det Y` | `1+2n`  |
//! | `RenyiEpi(n, a)`    | `t >= Psi_a(X,Y)`, `X,Y >= 0`, `a in [1,2]`   | `-log(t-Psi) - log det X - log det Y` | `1+2n`  |
//! | `RenyiPerspEpi(n,a)`| `t >= PD_a(u,X,Y)`, `u >= 0`, `a in [1/2,1)`  | `-log(t-PD) - log u - log det X - log det Y` | `2+2n` |
//! | `Free(k)`           | all of `R^k`                               | `0`                                     | `0`     |
//!
//! Matrix variables are stored in the isometric coordinates of
//! [`crate::vectorize`]; a cone's coordinate block is `[t, vec(X), vec(Y)]`
//! (with `u` between `t` and `vec(X)` for the perspective cone). All oracles
//! are exact: gradients and Hessian applications come from the derivative
//! calculus in [`crate::tracefn`], so the solver never differentiates
//! numerically.

use crate::hermitian::{hermitian_part_unchecked, HermitianMatrix};
use crate::tracefn::{DirectionPair, PerspectivePoint, PsiPoint, TraceFnParams};
use crate::vectorize::{unvectorize, vec_len, vectorize, vectorize_into};
use crate::{CMatrix, Error, Result};

/// Cone descriptor. `side` is the matrix side length of Hermitian blocks.
#[derive(Debug, Clone, PartialEq)]
pub enum Cone {
    /// Nonnegative orthant of the given dimension.
    NonNeg { dim: usize },
    /// Hermitian positive semidefinite matrices of the given side length.
    Psd { side: usize },
    /// Hypograph `{(t, X, Y) : t <= Psi_alpha(X, Y)}` for `alpha in [1/2, 1]`,
    /// where `Psi_alpha` is jointly concave.
    RenyiHypo { side: usize, alpha: f64 },
    /// Epigraph `{(t, X, Y) : t >= Psi_alpha(X, Y)}` for `alpha in [1, 2]`,
    /// where `Psi_alpha` is jointly convex.
    RenyiEpi { side: usize, alpha: f64 },
    /// Epigraph of the divergence perspective,
    /// `{(t, u, X, Y) : t >= PD_alpha(u, X, Y), u >= 0}`, `alpha in [1/2, 1)`.
    RenyiPerspEpi { side: usize, alpha: f64 },
    /// Unconstrained coordinates (zero barrier). Used internally for scalar
    /// auxiliary variables such as the phase-1 infeasibility scale.
    Free { dim: usize },
}

impl Cone {
    /// Number of real coordinates of the cone's block.
    pub fn dim(&self) -> usize {
        match *self {
            Cone::NonNeg { dim } | Cone::Free { dim } => dim,
            Cone::Psd { side } => vec_len(side),
            Cone::RenyiHypo { side, .. } | Cone::RenyiEpi { side, .. } => 1 + 2 * vec_len(side),
            Cone::RenyiPerspEpi { side, .. } => 2 + 2 * vec_len(side),
        }
    }

    /// Barrier parameter `nu`.
    pub fn barrier_parameter(&self) -> f64 {
        match *self {
            Cone::NonNeg { dim } => dim as f64,
            Cone::Free { .. } => 0.0,
            Cone::Psd { side } => side as f64,
            Cone::RenyiHypo { side, .. } | Cone::RenyiEpi { side, .. } => (1 + 2 * side) as f64,
            Cone::RenyiPerspEpi { side, .. } => (2 + 2 * side) as f64,
        }
    }

    /// Validate dimensions and parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            Cone::NonNeg { dim } | Cone::Free { dim } => {
                if dim == 0 {
                    return bad("cone dimension must be positive".into());
                }
            }
            Cone::Psd { side } => {
                if side == 0 {
                    return bad("matrix side must be positive".into());
                }
            }
            Cone::RenyiHypo { side, alpha } => {
                if side == 0 {
                    return bad("matrix side must be positive".into());
                }
                if !(0.5..=1.0).contains(&alpha) {
                    return bad(format!(
                        "hypograph cone needs alpha in [1/2, 1], got {alpha}"
                    ));
                }
            }
            Cone::RenyiEpi { side, alpha } => {
                if side == 0 {
                    return bad("matrix side must be positive".into());
                }
                if !(1.0..=2.0).contains(&alpha) {
                    return bad(format!("epigraph cone needs alpha in [1, 2], got {alpha}"));
                }
            }
            Cone::RenyiPerspEpi { side, alpha } => {
                if side == 0 {
                    return bad("matrix side must be positive".into());
                }
                if !(0.5..1.0).contains(&alpha) {
                    return bad(format!(
                        "perspective cone needs alpha in [1/2, 1), got {alpha}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// A canonical strictly interior point of the cone, written into `out`.
    fn initial_point_into(&self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim());
        out.fill(0.0);
        match *self {
            Cone::NonNeg { dim } => out[..dim].fill(1.0),
            Cone::Free { .. } => {}
            Cone::Psd { side } => {
                vectorize_into(&HermitianMatrix::identity(side), out);
            }
            Cone::RenyiHypo { side, .. } => {
                // Psi(I, I) = n; pick t = n/2 so the slack is n/2.
                let n = side as f64;
                out[0] = n / 2.0;
                let id = vectorize(&HermitianMatrix::identity(side));
                out[1..1 + id.len()].copy_from_slice(&id);
                out[1 + id.len()..].copy_from_slice(&id);
            }
            Cone::RenyiEpi { side, .. } => {
                let n = side as f64;
                out[0] = 1.5 * n;
                let id = vectorize(&HermitianMatrix::identity(side));
                out[1..1 + id.len()].copy_from_slice(&id);
                out[1 + id.len()..].copy_from_slice(&id);
            }
            Cone::RenyiPerspEpi { side, alpha } => {
                // PD(1, I, I) = log(n) / (alpha - 1) <= 0; slack 1.
                let n = side as f64;
                out[0] = n.ln() / (alpha - 1.0) + 1.0;
                out[1] = 1.0;
                let id = vectorize(&HermitianMatrix::identity(side));
                out[2..2 + id.len()].copy_from_slice(&id);
                out[2 + id.len()..].copy_from_slice(&id);
            }
        }
    }
}

/// Map a domain failure (non-PD matrix, scalar domain violation, bad slack)
/// to an exterior-point error; pass through structural errors.
fn exterior(e: Error, what: &str) -> Error {
    match e {
        Error::DomainViolation { .. } | Error::NotPositiveDefinite { .. } | Error::EigenFailed => {
            Error::ExteriorPoint(format!("{what}: {e}"))
        }
        other => other,
    }
}

/// `-log det` block: inverse, log-determinant, and derivative helpers.
struct LogDet {
    inv: HermitianMatrix,
    logdet: f64,
}

impl LogDet {
    fn new(x: &HermitianMatrix, what: &str) -> Result<Self> {
        let e = x.eigh().map_err(|err| exterior(err, what))?;
        let min = e.eigenvalues.first().copied().unwrap_or(0.0);
        if min <= 0.0 {
            return Err(Error::ExteriorPoint(format!(
                "{what}: minimum eigenvalue {min:.3e} is not positive"
            )));
        }
        let logdet = e.eigenvalues.iter().map(|t| t.ln()).sum();
        let inv_vals: Vec<f64> = e.eigenvalues.iter().map(|t| 1.0 / t).collect();
        Ok(LogDet {
            inv: e.recombine(&inv_vals),
            logdet,
        })
    }

    /// `X^{ -1} H X^{-1}`.
    fn hessian_apply(&self, h: &HermitianMatrix) -> HermitianMatrix {
        hermitian_part_unchecked(
            &(self.inv.as_matrix() * h.as_matrix() * self.inv.as_matrix()),
        )
    }

    /// `D3(-log det)(X)[H,H,H] = -2 tr[(X^{-1} H)^3]`.
    fn third(&self, h: &HermitianMatrix) -> f64 {
        let k: CMatrix = self.inv.as_matrix() * h.as_matrix();
        let k2 = &k * &k;
        let n = k.nrows();
        let mut tr = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (k2[(i, j)], k[(j, i)]);
                tr += a.re * b.re - a.im * b.im;
            }
        }
        -2.0 * tr
    }
}

/// Prepared state of one cone block at a strictly interior point.
enum Block {
    NonNeg {
        z: Vec<f64>,
    },
    Free,
    Psd {
        side: usize,
        ld: LogDet,
    },
    /// Hypograph and epigraph share a sign: the slack is
    /// `s = sign * (Psi - t)` with `sign = +1` (hypo) or `-1` (epi).
    Renyi {
        side: usize,
        sign: f64,
        slack: f64,
        psi: PsiPoint,
        ld_x: LogDet,
        ld_y: LogDet,
    },
    Persp {
        side: usize,
        slack: f64,
        u: f64,
        pd: PerspectivePoint,
        ld_x: LogDet,
        ld_y: LogDet,
    },
}

/// Split a hypo/epi block's coordinates.
fn split_tv(v: &[f64], side: usize) -> (f64, &[f64], &[f64]) {
    let m = vec_len(side);
    (v[0], &v[1..1 + m], &v[1 + m..1 + 2 * m])
}

/// Split a perspective block's coordinates.
fn split_tuv(v: &[f64], side: usize) -> (f64, f64, &[f64], &[f64]) {
    let m = vec_len(side);
    (v[0], v[1], &v[2..2 + m], &v[2 + m..2 + 2 * m])
}

impl Block {
    fn prepare(cone: &Cone, v: &[f64]) -> Result<Self> {
        if v.iter().any(|t| !t.is_finite()) {
            return Err(Error::NotFinite);
        }
        match *cone {
            Cone::NonNeg { .. } => {
                if let Some(bad) = v.iter().find(|&&t| t <= 0.0) {
                    return Err(Error::ExteriorPoint(format!(
                        "orthant coordinate {bad:.3e} is not positive"
                    )));
                }
                Ok(Block::NonNeg { z: v.to_vec() })
            }
            Cone::Free { .. } => Ok(Block::Free),
            Cone::Psd { side } => Ok(Block::Psd {
                side,
                ld: LogDet::new(&unvectorize(v, side)?, "psd block")?,
            }),
            Cone::RenyiHypo { side, alpha } | Cone::RenyiEpi { side, alpha } => {
                let sign = if matches!(cone, Cone::RenyiHypo { .. }) {
                    1.0
                } else {
                    -1.0
                };
                let (t, xv, yv) = split_tv(v, side);
                let x = unvectorize(xv, side)?;
                let y = unvectorize(yv, side)?;
                let params = TraceFnParams::sandwiched_renyi(alpha)?;
                let psi = PsiPoint::prepare(&params, &x, &y)
                    .map_err(|e| exterior(e, "renyi trace argument"))?;
                let slack = sign * (psi.value() - t);
                if slack <= 0.0 {
                    return Err(Error::ExteriorPoint(format!(
                        "trace-function slack {slack:.3e} is not positive"
                    )));
                }
                let ld_x = LogDet::new(&x, "first argument")?;
                let ld_y = LogDet::new(&y, "second argument")?;
                Ok(Block::Renyi {
                    side,
                    sign,
                    slack,
                    psi,
                    ld_x,
                    ld_y,
                })
            }
            Cone::RenyiPerspEpi { side, alpha } => {
                let (t, u, xv, yv) = split_tuv(v, side);
                if u <= 0.0 {
                    return Err(Error::ExteriorPoint(format!(
                        "perspective scale {u:.3e} is not positive"
                    )));
                }
                let x = unvectorize(xv, side)?;
                let y = unvectorize(yv, side)?;
                let pd = PerspectivePoint::prepare(alpha, u, &x, &y)
                    .map_err(|e| exterior(e, "divergence perspective"))?;
                let slack = t - pd.value();
                if slack <= 0.0 {
                    return Err(Error::ExteriorPoint(format!(
                        "perspective slack {slack:.3e} is not positive"
                    )));
                }
                let ld_x = LogDet::new(&x, "first argument")?;
                let ld_y = LogDet::new(&y, "second argument")?;
                Ok(Block::Persp {
                    side,
                    slack,
                    u,
                    pd,
                    ld_x,
                    ld_y,
                })
            }
        }
    }

    fn value(&self) -> f64 {
        match self {
            Block::NonNeg { z } => -z.iter().map(|t| t.ln()).sum::<f64>(),
            Block::Free => 0.0,
            Block::Psd { ld, .. } => -ld.logdet,
            Block::Renyi {
                slack, ld_x, ld_y, ..
            } => -slack.ln() - ld_x.logdet - ld_y.logdet,
            Block::Persp {
                slack,
                u,
                ld_x,
                ld_y,
                ..
            } => -slack.ln() - u.ln() - ld_x.logdet - ld_y.logdet,
        }
    }

    fn gradient_into(&self, out: &mut [f64]) {
        match self {
            Block::NonNeg { z } => {
                for (o, t) in out.iter_mut().zip(z) {
                    *o = -1.0 / t;
                }
            }
            Block::Free => out.fill(0.0),
            Block::Psd { ld, .. } => vectorize_into(&ld.inv.scale(-1.0), out),
            Block::Renyi {
                side,
                sign,
                slack,
                psi,
                ld_x,
                ld_y,
            } => {
                let m = vec_len(*side);
                // d/dt [-log(sign (Psi - t))] = sign / slack.
                out[0] = sign / slack;
                let gx = psi
                    .gradient_x()
                    .scale(-sign / slack)
                    .add_scaled(-1.0, &ld_x.inv);
                vectorize_into(&gx, &mut out[1..1 + m]);
                let gy = psi
                    .gradient_y()
                    .scale(-sign / slack)
                    .add_scaled(-1.0, &ld_y.inv);
                vectorize_into(&gy, &mut out[1 + m..1 + 2 * m]);
            }
            Block::Persp {
                side,
                slack,
                u,
                pd,
                ld_x,
                ld_y,
            } => {
                let m = vec_len(*side);
                let (pu, px, py) = pd.gradient();
                out[0] = -1.0 / slack;
                out[1] = pu / slack - 1.0 / u;
                let gx = px.scale(1.0 / slack).add_scaled(-1.0, &ld_x.inv);
                vectorize_into(&gx, &mut out[2..2 + m]);
                let gy = py.scale(1.0 / slack).add_scaled(-1.0, &ld_y.inv);
                vectorize_into(&gy, &mut out[2 + m..2 + 2 * m]);
            }
        }
    }

    fn hessian_apply_into(&self, d: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            Block::NonNeg { z } => {
                for ((o, t), dd) in out.iter_mut().zip(z).zip(d) {
                    *o = dd / (t * t);
                }
            }
            Block::Free => out.fill(0.0),
            Block::Psd { side, ld } => {
                let h = unvectorize(d, *side)?;
                vectorize_into(&ld.hessian_apply(&h), out);
            }
            Block::Renyi {
                side,
                sign,
                slack,
                psi,
                ld_x,
                ld_y,
            } => {
                let m = vec_len(*side);
                let (tau, hv, vv) = split_tv(d, *side);
                let dir = DirectionPair::new(unvectorize(hv, *side)?, unvectorize(vv, *side)?);
                // s = sign (Psi - t): sdot = sign (DPsi[d] - tau).
                let sdot = sign * (psi.first_directional(&dir) - tau);
                let (hx, hy) = psi.hessian_apply(&dir);
                // H = grad s grad s^T / s^2 - (1/s) Hess s + logdet parts,
                // with grad s = sign (grad Psi, -1) and Hess s = sign Hess Psi.
                out[0] = sdot / (slack * slack) * (-sign);
                let gx = psi
                    .gradient_x()
                    .scale(sign * sdot / (slack * slack))
                    .add_scaled(-sign / slack, &hx)
                    .add_scaled(1.0, &ld_x.hessian_apply(&dir.dx));
                vectorize_into(&gx, &mut out[1..1 + m]);
                let gy = psi
                    .gradient_y()
                    .scale(sign * sdot / (slack * slack))
                    .add_scaled(-sign / slack, &hy)
                    .add_scaled(1.0, &ld_y.hessian_apply(&dir.dy));
                vectorize_into(&gy, &mut out[1 + m..1 + 2 * m]);
            }
            Block::Persp {
                side,
                slack,
                u,
                pd,
                ld_x,
                ld_y,
            } => {
                let m = vec_len(*side);
                let (tau, sigma, hv, vv) = split_tuv(d, *side);
                let dir = DirectionPair::new(unvectorize(hv, *side)?, unvectorize(vv, *side)?);
                // s = t - PD: sdot = tau - DPD[(sigma, d)].
                let pd1 = pd.first_directional(sigma, &dir);
                let sdot = tau - pd1;
                let (pu, px, py) = pd.gradient();
                let (hu, hx, hy) = pd.hessian_apply(sigma, &dir);
                let q = sdot / (slack * slack);
                // grad s = (1, -grad PD); -Hess s / s = Hess PD / s.
                out[0] = q;
                out[1] = -q * pu + hu / slack + sigma / (u * u);
                let gx = px
                    .scale(-q)
                    .add_scaled(1.0 / slack, &hx)
                    .add_scaled(1.0, &ld_x.hessian_apply(&dir.dx));
                vectorize_into(&gx, &mut out[2..2 + m]);
                let gy = py
                    .scale(-q)
                    .add_scaled(1.0 / slack, &hy)
                    .add_scaled(1.0, &ld_y.hessian_apply(&dir.dy));
                vectorize_into(&gy, &mut out[2 + m..2 + 2 * m]);
            }
        }
        Ok(())
    }

    fn third_directional(&self, d: &[f64]) -> Result<f64> {
        // D3(-log s)[d] from the chain rule:
        // -sddd/s + 3 sdot sddot / s^2 - 2 sdot^3 / s^3.
        fn neg_log_third(s: f64, s1: f64, s2: f64, s3: f64) -> f64 {
            -s3 / s + 3.0 * s1 * s2 / (s * s) - 2.0 * s1.powi(3) / (s * s * s)
        }
        match self {
            Block::NonNeg { z } => Ok(z
                .iter()
                .zip(d)
                .map(|(t, dd)| -2.0 * dd.powi(3) / t.powi(3))
                .sum()),
            Block::Free => Ok(0.0),
            Block::Psd { side, ld } => Ok(ld.third(&unvectorize(d, *side)?)),
            Block::Renyi {
                side,
                sign,
                slack,
                psi,
                ld_x,
                ld_y,
            } => {
                let (tau, hv, vv) = split_tv(d, *side);
                let dir = DirectionPair::new(unvectorize(hv, *side)?, unvectorize(vv, *side)?);
                let s1 = sign * (psi.first_directional(&dir) - tau);
                let s2 = sign * psi.second_directional(&dir);
                let s3 = sign * psi.third_directional(&dir)?;
                Ok(neg_log_third(*slack, s1, s2, s3)
                    + ld_x.third(&dir.dx)
                    + ld_y.third(&dir.dy))
            }
            Block::Persp {
                side,
                slack,
                u,
                pd,
                ld_x,
                ld_y,
            } => {
                let (tau, sigma, hv, vv) = split_tuv(d, *side);
                let dir = DirectionPair::new(unvectorize(hv, *side)?, unvectorize(vv, *side)?);
                let s1 = tau - pd.first_directional(sigma, &dir);
                let s2 = -pd.second_directional(sigma, &dir);
                let s3 = -pd.third_directional(sigma, &dir)?;
                Ok(neg_log_third(*slack, s1, s2, s3)
                    - 2.0 * sigma.powi(3) / u.powi(3)
                    + ld_x.third(&dir.dx)
                    + ld_y.third(&dir.dy))
            }
        }
    }

    /// Barrier value without derivative caches, for line-search trials.
    fn value_only(cone: &Cone, v: &[f64]) -> Result<f64> {
        if v.iter().any(|t| !t.is_finite()) {
            return Err(Error::NotFinite);
        }
        match *cone {
            Cone::NonNeg { .. } => {
                let mut acc = 0.0;
                for &t in v {
                    if t <= 0.0 {
                        return Err(Error::ExteriorPoint(format!(
                            "orthant coordinate {t:.3e} is not positive"
                        )));
                    }
                    acc -= t.ln();
                }
                Ok(acc)
            }
            Cone::Free { .. } => Ok(0.0),
            Cone::Psd { side } => {
                Ok(-LogDet::new(&unvectorize(v, side)?, "psd block")?.logdet)
            }
            Cone::RenyiHypo { side, alpha } | Cone::RenyiEpi { side, alpha } => {
                let sign = if matches!(cone, Cone::RenyiHypo { .. }) {
                    1.0
                } else {
                    -1.0
                };
                let (t, xv, yv) = split_tv(v, side);
                let x = unvectorize(xv, side)?;
                let y = unvectorize(yv, side)?;
                let params = TraceFnParams::sandwiched_renyi(alpha)?;
                let detail = crate::tracefn::psi_value_detail(&params, &x, &y)
                    .map_err(|e| exterior(e, "renyi trace argument"))?;
                let slack = sign * (detail.psi - t);
                if slack <= 0.0 {
                    return Err(Error::ExteriorPoint(format!(
                        "trace-function slack {slack:.3e} is not positive"
                    )));
                }
                // Y's log-determinant falls out of the spectra already computed.
                let mut logdet_y = 0.0;
                for &l in &detail.y_eigenvalues {
                    if l <= 0.0 {
                        return Err(Error::ExteriorPoint(format!(
                            "second argument eigenvalue {l:.3e} is not positive"
                        )));
                    }
                    logdet_y += l.ln();
                }
                let ld_x = LogDet::new(&x, "first argument")?;
                Ok(-slack.ln() - ld_x.logdet - logdet_y)
            }
            Cone::RenyiPerspEpi { side, alpha } => {
                let (t, u, xv, yv) = split_tuv(v, side);
                if u <= 0.0 {
                    return Err(Error::ExteriorPoint(format!(
                        "perspective scale {u:.3e} is not positive"
                    )));
                }
                let x = unvectorize(xv, side)?;
                let y = unvectorize(yv, side)?;
                let params = TraceFnParams::sandwiched_renyi(alpha)?;
                let detail = crate::tracefn::psi_value_detail(&params, &x, &y)
                    .map_err(|e| exterior(e, "divergence perspective"))?;
                if detail.psi <= 0.0 {
                    return Err(Error::ExteriorPoint(
                        "trace value is not positive".into(),
                    ));
                }
                let pd = u * (detail.psi / u).ln() / (alpha - 1.0);
                let slack = t - pd;
                if slack <= 0.0 {
                    return Err(Error::ExteriorPoint(format!(
                        "perspective slack {slack:.3e} is not positive"
                    )));
                }
                let mut logdet_y = 0.0;
                for &l in &detail.y_eigenvalues {
                    if l <= 0.0 {
                        return Err(Error::ExteriorPoint(format!(
                            "second argument eigenvalue {l:.3e} is not positive"
                        )));
                    }
                    logdet_y += l.ln();
                }
                let ld_x = LogDet::new(&x, "first argument")?;
                Ok(-slack.ln() - u.ln() - ld_x.logdet - logdet_y)
            }
        }
    }
}

/// An ordered product of cones acting on a block-partitioned vector.
#[derive(Debug, Clone)]
pub struct ConeSet {
    cones: Vec<Cone>,
    offsets: Vec<usize>,
    total: usize,
    nu: f64,
}

impl ConeSet {
    pub fn new(cones: Vec<Cone>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(cones.len());
        let mut total = 0;
        let mut nu = 0.0;
        for c in &cones {
            c.validate()?;
            offsets.push(total);
            total += c.dim();
            nu += c.barrier_parameter();
        }
        Ok(ConeSet {
            cones,
            offsets,
            total,
            nu,
        })
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    /// Total coordinate dimension.
    pub fn total_dim(&self) -> usize {
        self.total
    }

    /// Offset of cone block `i` in the coordinate vector.
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Sum of the blocks' barrier parameters.
    pub fn barrier_parameter(&self) -> f64 {
        self.nu
    }

    /// Canonical strictly interior point (identity matrices, unit scalars,
    /// slacks of order one).
    pub fn initial_point(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.total];
        for (c, &o) in self.cones.iter().zip(&self.offsets) {
            c.initial_point_into(&mut out[o..o + c.dim()]);
        }
        out
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.total {
            return Err(Error::DimensionMismatch {
                expected: self.total,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Barrier value at `x`, or an error if `x` is not strictly interior.
    /// Cheaper than [`ConeSet::prepare`]; intended for line-search trials.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        let mut acc = 0.0;
        for (c, &o) in self.cones.iter().zip(&self.offsets) {
            acc += Block::value_only(c, &x[o..o + c.dim()])?;
        }
        Ok(acc)
    }

    /// Strict interior membership.
    pub fn is_interior(&self, x: &[f64]) -> bool {
        self.value(x).is_ok()
    }

    /// Prepare the barrier at a strictly interior point.
    pub fn prepare(&self, x: &[f64]) -> Result<PreparedBarrier> {
        self.check_len(x)?;
        let mut blocks = Vec::with_capacity(self.cones.len());
        for (c, &o) in self.cones.iter().zip(&self.offsets) {
            blocks.push(Block::prepare(c, &x[o..o + c.dim()])?);
        }
        let value = blocks.iter().map(Block::value).sum();
        let mut gradient = vec![0.0; self.total];
        for ((b, c), &o) in blocks.iter().zip(&self.cones).zip(&self.offsets) {
            b.gradient_into(&mut gradient[o..o + c.dim()]);
        }
        Ok(PreparedBarrier {
            cones: self.cones.clone(),
            offsets: self.offsets.clone(),
            total: self.total,
            blocks,
            value,
            gradient,
        })
    }
}

/// Prepared barrier state: value, gradient, and exact Hessian / third-order
/// oracles at a fixed interior point.
pub struct PreparedBarrier {
    cones: Vec<Cone>,
    offsets: Vec<usize>,
    total: usize,
    blocks: Vec<Block>,
    value: f64,
    gradient: Vec<f64>,
}

impl PreparedBarrier {
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient
    }

    pub fn dim(&self) -> usize {
        self.total
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.total {
            return Err(Error::DimensionMismatch {
                expected: self.total,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `out = Hessian F(x) [d]`.
    pub fn hessian_apply(&self, d: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_len(d)?;
        self.check_len(out)?;
        for ((b, c), &o) in self.blocks.iter().zip(&self.cones).zip(&self.offsets) {
            let r = o..o + c.dim();
            b.hessian_apply_into(&d[r.clone()], &mut out[r])?;
        }
        Ok(())
    }

    /// `D3 F(x)[d, d, d]`.
    pub fn third_directional(&self, d: &[f64]) -> Result<f64> {
        self.check_len(d)?;
        let mut acc = 0.0;
        for ((b, c), &o) in self.blocks.iter().zip(&self.cones).zip(&self.offsets) {
            acc += b.third_directional(&d[o..o + c.dim()])?;
        }
        Ok(acc)
    }

    /// Dense Hessian matrix (block diagonal). Cost is `dim` Hessian
    /// applications; intended for diagnostics and small blocks.
    pub fn dense_hessian(&self) -> Result<crate::RMatrix> {
        let n = self.total;
        let mut h = crate::RMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.hessian_apply(&e, &mut col)?;
            e[j] = 0.0;
            for i in 0..n {
                h[(i, j)] = col[i];
            }
        }
        // Symmetrize away rounding.
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (h[(i, j)] + h[(j, i)]);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        Ok(h)
    }

    /// Solve `Hessian F(x) [y] = rhs` by dense Cholesky with a jitter ladder.
    /// Intended for diagnostics and small problems; the path-following solver
    /// works in a reduced space and never calls this on large blocks.
    pub fn hessian_solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.check_len(rhs)?;
        let h = self.dense_hessian()?;
        let scale = h.diagonal().amax().max(1.0);
        let mut jitter = 0.0;
        for _ in 0..12 {
            let mut hj = h.clone();
            for i in 0..self.total {
                hj[(i, i)] += jitter;
            }
            if let Some(chol) = hj.cholesky() {
                let mut y = crate::RVector::from_column_slice(rhs);
                chol.solve_mut(&mut y);
                return Ok(y.as_slice().to_vec());
            }
            jitter = if jitter == 0.0 {
                1e-14 * scale
            } else {
                jitter * 10.0
            };
        }
        Err(Error::FactorizationFailed(
            "barrier Hessian is numerically indefinite".into(),
        ))
    }
}
