//! Builders and drivers for the experiment subcommands.
//!
//! Each experiment assembles a conic program in the solver's vectorized
//! coordinates together with an analytic strictly interior start, so no
//! phase-1 run is ever needed. The Eq.-style log transform and the
//! `1/(alpha-1)` sign live here, not in the solver: the cones are always used
//! in their native epigraph/hypograph orientation and divergences are
//! recovered from the optimal trace-function value afterwards.

use renyicone::barrier::{Cone, ConeSet};
use renyicone::hermitian::{random, TraceOut};
use renyicone::rng::Stream;
use renyicone::solver::{
    self, ConicProblem, SolveResult, SolverConfig, SparseMatrix,
};
use renyicone::tracefn::{psi_value, renyi_trace_value, TraceFnParams};
use renyicone::vectorize::{unvectorize, vec_len, vectorize, vectorize_into};
use renyicone::verify::{
    self, SampleSpec, VerificationReport,
};
use renyicone::{
    direct_sum, hermitize, kron, partial_trace, spectral_apply, C64, CMatrix, Error,
    HermitianMatrix, ScalarFunction,
};

use crate::{CliError, CliResult};

// ---------------------------------------------------------------------------
// shared plumbing

/// Columns of a real-linear map between Hermitian spaces, in vectorized
/// coordinates: column `s` is the image of the `s`-th basis coordinate.
fn map_columns<F>(n_in: usize, n_out: usize, f: F) -> CliResult<Vec<Vec<f64>>>
where
    F: Fn(&HermitianMatrix) -> renyicone::Result<HermitianMatrix>,
{
    let m_in = vec_len(n_in);
    let m_out = vec_len(n_out);
    let mut cols = Vec::with_capacity(m_in);
    let mut unit = vec![0.0; m_in];
    for s in 0..m_in {
        unit[s] = 1.0;
        let basis = unvectorize(&unit, n_in)?;
        unit[s] = 0.0;
        let image = f(&basis)?;
        debug_assert_eq!(image.dim(), n_out);
        let mut col = vec![0.0; m_out];
        vectorize_into(&image, &mut col);
        cols.push(col);
    }
    Ok(cols)
}

fn require(cond: bool, msg: impl Into<String>) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Invalid(msg.into()))
    }
}

/// The experiments accept `alpha` on both sides of 1 but not at it.
fn check_two_sided_alpha(alpha: f64) -> CliResult<()> {
    require(
        (0.5..1.0).contains(&alpha) || (alpha > 1.0 && alpha <= 2.0),
        format!("alpha must lie in [1/2, 1) or (1, 2], got {alpha}"),
    )
}

/// Solver defaults for the experiment drivers. The divergence experiments
/// push the path parameter further than the generic default because their
/// reported values are amplified by `1/(alpha-1)` near `alpha = 1`.
pub fn experiment_config(
    tol: Option<f64>,
    max_iter: Option<usize>,
    default_gap: f64,
) -> SolverConfig {
    SolverConfig {
        gap_tolerance: tol.unwrap_or(default_gap),
        max_iterations: max_iter.unwrap_or(500),
        ..SolverConfig::default()
    }
}

/// Extrapolate the central-path objective to `mu -> 0`.
///
/// At each centered stage end `<c, x(mu)> = v* + s mu + O(mu^2)`, so a linear
/// fit through the last two stage ends cancels the `s mu` term and leaves an
/// error far below the duality gap itself. Falls back to the midpoint
/// estimate when fewer than two stages completed.
pub fn path_limit_objective(result: &SolveResult) -> f64 {
    let mut ends: Vec<(f64, f64)> = Vec::new();
    for w in result.trace.windows(2) {
        if w[1].mu < w[0].mu * 0.999_999 {
            ends.push((w[0].mu, w[0].objective));
        }
    }
    if let Some(last) = result.trace.last() {
        ends.push((last.mu, last.objective));
    }
    let k = ends.len();
    if k >= 2 && ends[k - 1].0 < ends[k - 2].0 {
        let (mu1, v1) = ends[k - 2];
        let (mu2, v2) = ends[k - 1];
        (v2 * mu1 - v1 * mu2) / (mu1 - mu2)
    } else {
        result.objective_estimate
    }
}

// ---------------------------------------------------------------------------
// mutual information

/// How the source state `A` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    /// `A = B B* / tr[B B*]` with the entries of `B` drawn uniformly from
    /// `[0, 1)` in row-major order, real part before imaginary part.
    Random,
    /// `A = I / n^2`; the optimum is `X = I / n` with divergence zero.
    Identity,
    /// `A = rho (x) sigma` for random densities; divergence zero at `X = sigma`.
    Product,
}

impl SourceKind {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "random" => Ok(SourceKind::Random),
            "identity" => Ok(SourceKind::Identity),
            "product" => Ok(SourceKind::Product),
            other => Err(CliError::invalid(format!(
                "unknown source {other:?} (expected random, identity, or product)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SourceKind::Random => "random",
            SourceKind::Identity => "identity",
            SourceKind::Product => "product",
        }
    }
}

/// Draw the bipartite source state for the mutual-information experiment.
pub fn source_state(n: usize, seed: u64, kind: SourceKind) -> CliResult<HermitianMatrix> {
    let n2 = n * n;
    match kind {
        SourceKind::Identity => Ok(HermitianMatrix::identity(n2).scale(1.0 / n2 as f64)),
        SourceKind::Product => {
            let mut rho_rng = Stream::for_sample(seed, 0);
            let mut sigma_rng = Stream::for_sample(seed, 1);
            let rho = random::density(&mut rho_rng, n);
            let sigma = random::density(&mut sigma_rng, n);
            Ok(kron(&rho, &sigma))
        }
        SourceKind::Random => {
            let mut rng = Stream::for_sample(seed, 0);
            let mut b = CMatrix::zeros(n2, n2);
            for i in 0..n2 {
                for j in 0..n2 {
                    let re = rng.uniform();
                    let im = rng.uniform();
                    b[(i, j)] = C64::new(re, im);
                }
            }
            let gram = hermitize(&(&b * b.adjoint()))?;
            let tr = gram.trace();
            if !(tr > 0.0) {
                return Err(CliError::Core(Error::NumericalFailure(
                    "drawn source state has nonpositive trace".into(),
                )));
            }
            Ok(gram.scale(1.0 / tr))
        }
    }
}

/// Residual of the mutual-information fixed-point map at `X`:
/// `|| X - tr_1 Z / tr Z ||_F` with
/// `Z = ((tr_2 A (x) X)^{(1-a)/2a} A (tr_2 A (x) X)^{(1-a)/2a})^a`.
pub fn fixed_point_residual(
    a: &HermitianMatrix,
    alpha: f64,
    x: &HermitianMatrix,
) -> renyicone::Result<f64> {
    let n = x.dim();
    if a.dim() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: a.dim(),
        });
    }
    let a2 = partial_trace(a, TraceOut::Second, (n, n))?;
    let y = kron(&a2, x);
    let s = spectral_apply(&ScalarFunction::Power((1.0 - alpha) / (2.0 * alpha)), &y)?;
    let m = hermitize(&(s.as_matrix() * a.as_matrix() * s.as_matrix()))?;
    let z = spectral_apply(&ScalarFunction::Power(alpha), &m)?;
    let tr = z.trace();
    if !(tr > 0.0) {
        return Err(Error::NumericalFailure(
            "fixed-point map produced a nonpositive trace".into(),
        ));
    }
    let xstar = partial_trace(&z, TraceOut::First, (n, n))?.scale(1.0 / tr);
    Ok(x.add_scaled(-1.0, &xstar).norm())
}

/// Assembled program: minimize the divergence of `A` against `tr_2 A (x) X`
/// over densities `X`. Variables `[t, X', Y', X]`; `X'` is pinned to `A`,
/// `Y'` is linked to `tr_2(A) (x) X`, and `tr X = 1`.
pub fn build_mutual_info(
    n: usize,
    alpha: f64,
    a: &HermitianMatrix,
) -> CliResult<(ConicProblem, Vec<f64>)> {
    let n2 = n * n;
    let m2 = vec_len(n2);
    let mx = vec_len(n);
    let hypo = alpha < 1.0;
    let renyi = if hypo {
        Cone::RenyiHypo { side: n2, alpha }
    } else {
        Cone::RenyiEpi { side: n2, alpha }
    };
    let cones = ConeSet::new(vec![renyi, Cone::Psd { side: n }])?;
    let dim = cones.total_dim();
    let (off_xp, off_yp, off_x) = (1, 1 + m2, 1 + 2 * m2);

    let a2 = partial_trace(a, TraceOut::Second, (n, n))?;
    let link = map_columns(n, n2, |e| Ok(kron(&a2, e)))?;

    let mut con = SparseMatrix::new(2 * m2 + 1, dim);
    let va = vectorize(a);
    for r in 0..m2 {
        con.push(r, off_xp + r, 1.0);
    }
    for r in 0..m2 {
        con.push(m2 + r, off_yp + r, 1.0);
        for (s, col) in link.iter().enumerate() {
            if col[r] != 0.0 {
                con.push(m2 + r, off_x + s, -col[r]);
            }
        }
    }
    for i in 0..n {
        con.push(2 * m2, off_x + i, 1.0);
    }

    let mut rhs = vec![0.0; 2 * m2 + 1];
    rhs[..m2].copy_from_slice(&va);
    rhs[2 * m2] = 1.0;

    let mut objective = vec![0.0; dim];
    objective[0] = if hypo { -1.0 } else { 1.0 };

    // Interior start: X = I/n, and t placed strictly inside the cone.
    let x0 = HermitianMatrix::identity(n).scale(1.0 / n as f64);
    let y0 = kron(&a2, &x0);
    let params = TraceFnParams::sandwiched_renyi(alpha)?;
    let psi0 = psi_value(&params, a, &y0)?;
    let t0 = if hypo {
        0.5 * psi0
    } else {
        1.5 * psi0 + 0.5
    };
    let mut start = vec![0.0; dim];
    start[0] = t0;
    start[off_xp..off_xp + m2].copy_from_slice(&va);
    vectorize_into(&y0, &mut start[off_yp..off_yp + m2]);
    vectorize_into(&x0, &mut start[off_x..off_x + mx]);

    let problem = ConicProblem::new(objective, con, rhs, cones)?;
    Ok((problem, start))
}

#[derive(Debug)]
pub struct MutualInfoOutcome {
    pub a: HermitianMatrix,
    pub x_opt: HermitianMatrix,
    /// `(alpha-1)^{-1} log Psi` recomputed from the returned `X`.
    pub divergence: f64,
    /// Same functional evaluated on the extrapolated path-limit `t`.
    pub solver_divergence: f64,
    pub fixed_point_residual: f64,
    pub solve: SolveResult,
}

pub fn run_mutual_info(
    n: usize,
    alpha: f64,
    seed: u64,
    source: SourceKind,
    config: &SolverConfig,
) -> CliResult<MutualInfoOutcome> {
    require(
        (2..=8).contains(&n),
        format!("n must lie in [2, 8], got {n}"),
    )?;
    check_two_sided_alpha(alpha)?;
    let a = source_state(n, seed, source)?;
    let (problem, start) = build_mutual_info(n, alpha, &a)?;
    let result = solver::solve_from(&problem, config, &start)?;

    let n2 = n * n;
    let m2 = vec_len(n2);
    let off_x = 1 + 2 * m2;
    let x_opt = unvectorize(&result.x[off_x..off_x + vec_len(n)], n)?;

    let params = TraceFnParams::sandwiched_renyi(alpha)?;
    let a2 = partial_trace(&a, TraceOut::Second, (n, n))?;
    let y_opt = kron(&a2, &x_opt);
    let psi_opt = psi_value(&params, &a, &y_opt)?;
    let divergence = psi_opt.ln() / (alpha - 1.0);

    let v_limit = path_limit_objective(&result);
    let t_limit = if alpha < 1.0 { -v_limit } else { v_limit };
    let solver_divergence = if t_limit > 0.0 {
        t_limit.ln() / (alpha - 1.0)
    } else {
        divergence
    };

    let fixed_point_residual = fixed_point_residual(&a, alpha, &x_opt)?;
    Ok(MutualInfoOutcome {
        a,
        x_opt,
        divergence,
        solver_divergence,
        fixed_point_residual,
        solve: result,
    })
}

// ---------------------------------------------------------------------------
// rate distortion

/// Projector onto the maximally entangled state `(1/sqrt n) sum_i |ii>`.
pub fn entangled_projector(n: usize) -> HermitianMatrix {
    let n2 = n * n;
    let mut m = CMatrix::zeros(n2, n2);
    let w = 1.0 / n as f64;
    for i in 0..n {
        for j in 0..n {
            m[(i * n + i, j * n + j)] = C64::new(w, 0.0);
        }
    }
    HermitianMatrix::new(m).expect("entangled projector is Hermitian")
}

/// Distortion observable `Delta = I - Phi_ent`.
pub fn distortion_observable(n: usize) -> HermitianMatrix {
    HermitianMatrix::identity(n * n).add_scaled(-1.0, &entangled_projector(n))
}

/// Reference rate curve: the entanglement-assisted closed form
/// `log n + (1-d) log(1-d) + d log(d / (n^2-1))`, clamped at zero once it
/// goes negative and equal to `log n` at `d = 0`.
pub fn closed_form_rate(n: usize, delta: f64) -> f64 {
    let nn = n as f64;
    if delta <= 0.0 {
        return nn.ln();
    }
    if delta >= 1.0 {
        return 0.0;
    }
    let raw = nn.ln()
        + (1.0 - delta) * (1.0 - delta).ln()
        + delta * (delta / (nn * nn - 1.0)).ln();
    raw.max(0.0)
}

/// Assembled program: minimize `D_alpha(X || I (x) tr_1 X)` over `X` with
/// `tr_2 X = I/n` and `<X, Delta> <= delta`. Variables `[t, X', Y', w]` with
/// `Y'` linked to `I (x) tr_1 X'` and `w` the distortion slack.
pub fn build_rate_distortion(
    n: usize,
    alpha: f64,
    delta: f64,
) -> CliResult<(ConicProblem, Vec<f64>)> {
    let n2 = n * n;
    let m2 = vec_len(n2);
    let mn = vec_len(n);
    let hypo = alpha < 1.0;
    let renyi = if hypo {
        Cone::RenyiHypo { side: n2, alpha }
    } else {
        Cone::RenyiEpi { side: n2, alpha }
    };
    let cones = ConeSet::new(vec![renyi, Cone::NonNeg { dim: 1 }])?;
    let dim = cones.total_dim();
    let (off_x, off_y, off_w) = (1, 1 + m2, 1 + 2 * m2);

    let eye = HermitianMatrix::identity(n);
    let link = map_columns(n2, n2, |e| {
        Ok(kron(&eye, &partial_trace(e, TraceOut::First, (n, n))?))
    })?;
    let marginal = map_columns(n2, n, |e| partial_trace(e, TraceOut::Second, (n, n)))?;

    let mut con = SparseMatrix::new(m2 + mn + 1, dim);
    for r in 0..m2 {
        con.push(r, off_y + r, 1.0);
        for (s, col) in link.iter().enumerate() {
            if col[r] != 0.0 {
                con.push(r, off_x + s, -col[r]);
            }
        }
    }
    for (s, col) in marginal.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            if v != 0.0 {
                con.push(m2 + r, off_x + s, v);
            }
        }
    }
    let vdelta = vectorize(&distortion_observable(n));
    for (s, &v) in vdelta.iter().enumerate() {
        if v != 0.0 {
            con.push(m2 + mn, off_x + s, v);
        }
    }
    con.push(m2 + mn, off_w, 1.0);

    let mut rhs = vec![0.0; m2 + mn + 1];
    vectorize_into(&eye.scale(1.0 / n as f64), &mut rhs[m2..m2 + mn]);
    rhs[m2 + mn] = delta;

    let mut objective = vec![0.0; dim];
    objective[0] = if hypo { -1.0 } else { 1.0 };

    // Interior start on the segment from the entangled state to the maximally
    // mixed one. Both have the required marginal; the mixture is strictly
    // positive for theta > 0 and keeps the distortion strictly under delta.
    let spread = 1.0 - 1.0 / n2 as f64;
    let theta = (0.9 * delta / spread).min(0.9);
    require(
        theta > 0.0,
        "delta = 0 admits no strictly interior point; evaluate directly instead",
    )?;
    let x0 = entangled_projector(n)
        .scale(1.0 - theta)
        .add_scaled(theta / n2 as f64, &HermitianMatrix::identity(n2));
    let y0 = kron(&eye, &partial_trace(&x0, TraceOut::First, (n, n))?);
    let params = TraceFnParams::sandwiched_renyi(alpha)?;
    let psi0 = psi_value(&params, &x0, &y0)?;
    let t0 = if hypo { 0.5 * psi0 } else { 1.5 * psi0 + 0.5 };
    let w0 = delta - x0.inner(&distortion_observable(n));

    let mut start = vec![0.0; dim];
    start[0] = t0;
    vectorize_into(&x0, &mut start[off_x..off_x + m2]);
    vectorize_into(&y0, &mut start[off_y..off_y + m2]);
    start[off_w] = w0;

    let problem = ConicProblem::new(objective, con, rhs, cones)?;
    Ok((problem, start))
}

#[derive(Debug)]
pub struct RateDistortionOutcome {
    /// Reported rate: the solved divergence clamped at zero.
    pub rate: f64,
    /// Extrapolated path-limit divergence, unclamped.
    pub objective: f64,
    /// Divergence recomputed at the returned iterate, when a solve ran.
    pub iterate_objective: Option<f64>,
    pub closed_form: f64,
    /// `1 - 1/n^2`: beyond this distortion the unconstrained optimum is
    /// feasible and the reported rate is zero.
    pub zero_rate_threshold: f64,
    pub solve: Option<SolveResult>,
}

pub fn run_rate_distortion(
    n: usize,
    alpha: f64,
    delta: f64,
    config: &SolverConfig,
) -> CliResult<RateDistortionOutcome> {
    require(
        (2..=4).contains(&n),
        format!("n must lie in [2, 4], got {n}"),
    )?;
    require(
        (0.0..=1.0).contains(&delta),
        format!("delta must lie in [0, 1], got {delta}"),
    )?;
    check_two_sided_alpha(alpha)?;
    let nn = n as f64;
    let threshold = 1.0 - 1.0 / (nn * nn);

    if delta == 0.0 {
        // The feasible set is the single maximally entangled state: it is the
        // only density with marginal I/n and zero distortion. Its divergence
        // is log n for every alpha (the sandwiched trace function of a
        // rank-one state against I/n is n^{alpha-1}).
        let rate = nn.ln();
        return Ok(RateDistortionOutcome {
            rate,
            objective: rate,
            iterate_objective: None,
            closed_form: closed_form_rate(n, 0.0),
            zero_rate_threshold: threshold,
            solve: None,
        });
    }

    let (problem, start) = build_rate_distortion(n, alpha, delta)?;
    let result = solver::solve_from(&problem, config, &start)?;

    let n2 = n * n;
    let m2 = vec_len(n2);
    let x_opt = unvectorize(&result.x[1..1 + m2], n2)?;
    let eye = HermitianMatrix::identity(n);
    let y_opt = kron(&eye, &partial_trace(&x_opt, TraceOut::First, (n, n))?);
    let params = TraceFnParams::sandwiched_renyi(alpha)?;
    let psi_opt = psi_value(&params, &x_opt, &y_opt)?;
    let iterate_objective = psi_opt.ln() / (alpha - 1.0);

    let v_limit = path_limit_objective(&result);
    let t_limit = if alpha < 1.0 { -v_limit } else { v_limit };
    let objective = if t_limit > 0.0 {
        t_limit.ln() / (alpha - 1.0)
    } else {
        iterate_objective
    };

    Ok(RateDistortionOutcome {
        rate: objective.max(0.0),
        objective,
        iterate_objective: Some(iterate_objective),
        closed_form: closed_form_rate(n, delta),
        zero_rate_threshold: threshold,
        solve: Some(result),
    })
}

// ---------------------------------------------------------------------------
// fidelity

/// Block SDP whose optimum is the fidelity `Psi_{1/2}(X, Y)`: maximize
/// `tr[Z + Z*]/2` over `[[X, Z], [Z*, Y]] >= 0` with both diagonal blocks
/// pinned. Encoded as minimization of `<-C, W>` with `C = [[0, I], [I, 0]]/2`.
pub fn build_fidelity(
    x: &HermitianMatrix,
    y: &HermitianMatrix,
) -> CliResult<(ConicProblem, Vec<f64>)> {
    let n = x.dim();
    require(y.dim() == n, "fidelity blocks must have equal sides")?;
    let side = 2 * n;
    let mw = vec_len(side);
    let mn = vec_len(n);
    let cones = ConeSet::new(vec![Cone::Psd { side }])?;

    let zeros = HermitianMatrix::zeros(n);
    let embed_x = map_columns(n, side, |e| Ok(direct_sum(e, &zeros)))?;
    let embed_y = map_columns(n, side, |e| Ok(direct_sum(&zeros, e)))?;

    let mut con = SparseMatrix::new(2 * mn, mw);
    let mut rhs = vec![0.0; 2 * mn];
    let vx = vectorize(x);
    let vy = vectorize(y);
    for (s, col) in embed_x.iter().enumerate() {
        for (w, &v) in col.iter().enumerate() {
            if v != 0.0 {
                con.push(s, w, v);
            }
        }
        rhs[s] = vx[s];
    }
    for (s, col) in embed_y.iter().enumerate() {
        for (w, &v) in col.iter().enumerate() {
            if v != 0.0 {
                con.push(mn + s, w, v);
            }
        }
        rhs[mn + s] = vy[s];
    }

    let mut c = CMatrix::zeros(side, side);
    for i in 0..n {
        c[(i, n + i)] = C64::new(0.5, 0.0);
        c[(n + i, i)] = C64::new(0.5, 0.0);
    }
    let c = HermitianMatrix::new(c).expect("coupling objective is Hermitian");
    let objective: Vec<f64> = vectorize(&c).iter().map(|v| -v).collect();

    let start = vectorize(&direct_sum(x, y));
    let problem = ConicProblem::new(objective, con, rhs, cones)?;
    Ok((problem, start))
}

#[derive(Debug, Clone, Copy)]
pub struct FidelityTrial {
    pub sdp_value: f64,
    pub psi_half: f64,
    pub deviation: f64,
}

#[derive(Debug)]
pub struct FidelityOutcome {
    pub trials: Vec<FidelityTrial>,
    pub max_deviation: f64,
    /// Worst solve status across trials, for the exit code.
    pub worst_status: renyicone::solver::SolveStatus,
}

pub fn run_fidelity(
    n: usize,
    seed: u64,
    trials: usize,
    config: &SolverConfig,
) -> CliResult<FidelityOutcome> {
    require(
        (1..=8).contains(&n),
        format!("n must lie in [1, 8], got {n}"),
    )?;
    require(trials >= 1, "at least one trial is required")?;
    let mut rows = Vec::with_capacity(trials);
    let mut max_deviation = 0.0f64;
    let mut worst = renyicone::solver::SolveStatus::Optimal;
    for trial in 0..trials {
        let mut rng = Stream::for_sample(seed, trial as u64);
        let x = random::positive_definite(&mut rng, n, 0.1);
        let y = random::positive_definite(&mut rng, n, 0.1);
        let (problem, start) = build_fidelity(&x, &y)?;
        let result = solver::solve_from(&problem, config, &start)?;
        if result.status != renyicone::solver::SolveStatus::Optimal {
            worst = result.status;
        }
        let sdp_value = -result.objective_value;
        let psi_half = renyi_trace_value(0.5, &x, &y)?;
        let deviation = (sdp_value - psi_half).abs();
        max_deviation = max_deviation.max(deviation);
        rows.push(FidelityTrial {
            sdp_value,
            psi_half,
            deviation,
        });
    }
    Ok(FidelityOutcome {
        trials: rows,
        max_deviation,
        worst_status: worst,
    })
}

// ---------------------------------------------------------------------------
// verification suites

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteKind {
    All,
    SelfConcordance,
    Compatibility,
    OperatorLines,
    KronIdentity,
    ScalarAlphaGt2,
}

impl SuiteKind {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "all" => Ok(SuiteKind::All),
            "self-concordance" => Ok(SuiteKind::SelfConcordance),
            "compatibility" => Ok(SuiteKind::Compatibility),
            "operator-lines" => Ok(SuiteKind::OperatorLines),
            "kron-identity" => Ok(SuiteKind::KronIdentity),
            "scalar-alpha-gt2" => Ok(SuiteKind::ScalarAlphaGt2),
            other => Err(CliError::invalid(format!(
                "unknown suite {other:?} (expected all, self-concordance, compatibility, \
                 operator-lines, kron-identity, or scalar-alpha-gt2)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::All => "all",
            SuiteKind::SelfConcordance => "self-concordance",
            SuiteKind::Compatibility => "compatibility",
            SuiteKind::OperatorLines => "operator-lines",
            SuiteKind::KronIdentity => "kron-identity",
            SuiteKind::ScalarAlphaGt2 => "scalar-alpha-gt2",
        }
    }
}

fn base_grid() -> Vec<f64> {
    vec![0.6, 0.75, 0.9, 1.25, 1.5, 1.9]
}

fn spec(seed: u64, count: usize, dims: Vec<usize>, grid: Vec<f64>) -> SampleSpec {
    SampleSpec {
        seed,
        count,
        dims,
        alpha_grid: grid,
        boundary_bias: 0.5,
    }
}

/// Run one named verification suite with its documented default sampling
/// plan; `count` overrides the per-suite default sample count.
pub fn run_suite(
    kind: SuiteKind,
    seed: u64,
    count: Option<usize>,
) -> CliResult<Vec<VerificationReport>> {
    let mut reports = Vec::new();
    match kind {
        SuiteKind::SelfConcordance => {
            let s = spec(seed, count.unwrap_or(1000), vec![2, 3], base_grid());
            reports.extend(verify::self_concordance_suite(&s)?);
            reports.extend(verify::barrier_parameter_suite(&s)?);
            reports.extend(verify::log_homogeneity_suite(&s)?);
        }
        SuiteKind::Compatibility => {
            let s = spec(seed, count.unwrap_or(1000), vec![2, 3], base_grid());
            reports.extend(verify::compatibility_suite(&s)?);
        }
        SuiteKind::OperatorLines => {
            let s = spec(seed, count.unwrap_or(100), vec![2, 3], base_grid());
            reports.extend(verify::operator_line_suite(&s)?);
        }
        SuiteKind::KronIdentity => {
            let s = spec(
                seed,
                count.unwrap_or(20),
                vec![1, 2, 3],
                vec![1.25, 1.5, 2.0],
            );
            reports.extend(verify::kron_identity_suite(&s)?);
        }
        SuiteKind::ScalarAlphaGt2 => {
            let s = spec(
                seed,
                count.unwrap_or(1000),
                vec![1],
                vec![2.0, 2.5, 3.0, 5.0],
            );
            reports.extend(verify::scalar_alpha_gt2_suite(&s)?);
        }
        SuiteKind::All => {
            for sub in [
                SuiteKind::SelfConcordance,
                SuiteKind::Compatibility,
                SuiteKind::OperatorLines,
                SuiteKind::KronIdentity,
                SuiteKind::ScalarAlphaGt2,
            ] {
                reports.extend(run_suite(sub, seed, count)?);
            }
            let s = spec(seed, count.unwrap_or(50), vec![2, 3], base_grid());
            reports.extend(verify::derivative_consistency_suite(&s)?);
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use renyicone::solver::SolveStatus;

    #[test]
    fn map_columns_agrees_with_direct_application() {
        let mut rng = Stream::new(11);
        let x = random::hermitian(&mut rng, 3);
        let a = random::positive_definite(&mut rng, 3, 0.2);
        let cols = map_columns(3, 9, |e| Ok(kron(&a, e))).expect("columns");
        let v = vectorize(&x);
        let mut combo = vec![0.0; vec_len(9)];
        for (s, col) in cols.iter().enumerate() {
            for (r, &c) in col.iter().enumerate() {
                combo[r] += v[s] * c;
            }
        }
        let direct = vectorize(&kron(&a, &x));
        let err = combo
            .iter()
            .zip(&direct)
            .fold(0.0f64, |m, (u, w)| m.max((u - w).abs()));
        assert!(err < 1e-12, "column expansion deviates by {err}");
    }

    #[test]
    fn fixed_point_residual_vanishes_on_the_uniform_source() {
        let n = 3;
        let a = HermitianMatrix::identity(n * n).scale(1.0 / (n * n) as f64);
        let x = HermitianMatrix::identity(n).scale(1.0 / n as f64);
        let r = fixed_point_residual(&a, 0.75, &x).expect("residual");
        assert!(r < 1e-13, "uniform-source residual {r}");
        let mut rng = Stream::new(5);
        let x_rand = random::density(&mut rng, n);
        let r_rand = fixed_point_residual(&a, 0.75, &x_rand).expect("residual");
        assert!(r_rand > 1e-6, "random state should not be a fixed point");
    }

    #[test]
    fn closed_form_rate_matches_the_reference_point() {
        let v = closed_form_rate(4, 0.25);
        assert!((v - 0.1469467).abs() < 5e-7, "closed form {v}");
        assert_eq!(closed_form_rate(4, 0.0), (4.0f64).ln());
        assert_eq!(closed_form_rate(4, 0.95), 0.0);
    }

    #[test]
    fn identity_source_mutual_info_is_zero() {
        let config = experiment_config(None, None, 1e-9);
        let out = run_mutual_info(2, 0.75, 3, SourceKind::Identity, &config).expect("solve");
        assert_eq!(out.solve.status, SolveStatus::Optimal);
        assert!(out.divergence.abs() < 1e-7, "divergence {}", out.divergence);
        assert!(
            out.fixed_point_residual < 1e-7,
            "residual {}",
            out.fixed_point_residual
        );
        // X should be the maximally mixed state.
        let xbar = out
            .x_opt
            .add_scaled(-0.5, &HermitianMatrix::identity(2))
            .norm();
        assert!(xbar < 1e-5, "optimal X deviates from I/2 by {xbar}");
    }

    #[test]
    fn product_source_mutual_info_is_zero_above_one() {
        let config = experiment_config(None, None, 1e-9);
        let out = run_mutual_info(2, 1.5, 4, SourceKind::Product, &config).expect("solve");
        assert_eq!(out.solve.status, SolveStatus::Optimal);
        assert!(out.divergence.abs() < 1e-7, "divergence {}", out.divergence);
        assert!(
            out.fixed_point_residual < 1e-6,
            "residual {}",
            out.fixed_point_residual
        );
    }

    #[test]
    fn rate_distortion_edges_follow_the_reporting_rules() {
        let config = experiment_config(None, None, 1e-9);
        let at_zero = run_rate_distortion(2, 1.5, 0.0, &config).expect("edge");
        assert!(at_zero.solve.is_none());
        assert!((at_zero.rate - (2.0f64).ln()).abs() < 1e-12);

        let beyond = run_rate_distortion(2, 1.5, 0.9, &config).expect("solve");
        assert_eq!(
            beyond.solve.as_ref().unwrap().status,
            SolveStatus::Optimal
        );
        // threshold = 3/4: the unconstrained optimum I/4 is feasible, the raw
        // divergence is -log 2, and the reported rate clamps to zero.
        assert!(beyond.rate.abs() < 1e-6, "rate {}", beyond.rate);
        assert!(
            (beyond.objective + (2.0f64).ln()).abs() < 1e-6,
            "raw value {}",
            beyond.objective
        );
    }

    #[test]
    fn fidelity_sdp_reproduces_psi_half() {
        let config = experiment_config(None, None, 1e-8);
        let out = run_fidelity(3, 9, 2, &config).expect("trials");
        assert_eq!(out.worst_status, SolveStatus::Optimal);
        assert!(
            out.max_deviation < 1e-6,
            "max deviation {}",
            out.max_deviation
        );
    }

    #[test]
    fn suite_names_round_trip() {
        for kind in [
            SuiteKind::All,
            SuiteKind::SelfConcordance,
            SuiteKind::Compatibility,
            SuiteKind::OperatorLines,
            SuiteKind::KronIdentity,
            SuiteKind::ScalarAlphaGt2,
        ] {
            assert_eq!(SuiteKind::parse(kind.name()).unwrap(), kind);
        }
        assert!(SuiteKind::parse("everything").is_err());
    }

    #[test]
    fn small_suites_run_and_pass() {
        let reports = run_suite(SuiteKind::KronIdentity, 3, Some(3)).expect("suite");
        assert!(!reports.is_empty());
        assert!(reports.iter().all(|r| r.passed));
    }
}
