//! Feasible-start primal path-following interior-point solver.
//!
//! Solves `minimize <c, x>  subject to  A x = b,  x in K` where `K` is a
//! product of the barrier cones of [`crate::barrier`].
//!
//! The equality constraints are removed once per solve instead of being
//! carried through a KKT system:
//!
//! * a sparse greedy elimination repeatedly peels a row whose pivot column
//!   occurs in no other remaining row. The pin, link, and trace rows emitted
//!   by the experiment builders dissolve completely under this rule, leaving
//!   the reduced variable space (typically orders of magnitude smaller than
//!   the full variable count);
//! * any rows that survive the greedy pass go through a dense Gauss-Jordan
//!   fallback; a row that eliminates to zero means the constraints are not
//!   of full row rank and is reported as an error rather than silently
//!   dropped.
//!
//! The result is a particular solution and a dense null-space basis `N`.
//! Newton steps solve the reduced system `(N' H N) dz = -N' (c/mu + grad F)`
//! by Cholesky with a jitter ladder and one round of iterative refinement,
//! so every iterate satisfies `A x = b` exactly. Steps are damped by an
//! Armijo backtracking line search on `f_mu = <c,x>/mu + F(x)` starting from
//! the self-concordance step `1/(1+lambda)` when the Newton decrement
//! `lambda` is large. The path parameter shrinks geometrically once the
//! decrement certifies proximity to the central path, and the final stage
//! re-centers tightly so the reported objective midpoint
//! `<c,x> - nu*mu/2` carries an error of at most `nu*mu/2`.
//!
//! A feasible strictly interior start is produced, when none is supplied, by
//! the standard phase-1 problem `minimize tau` over `A v - (A e) tau = b`,
//! `v in K`, with `e` a canonical interior point; every iterate keeps
//! `A (v - tau e) = b`, and the search stops as soon as that shifted
//! candidate is strictly interior (guaranteed once `tau < 0`).

use crate::barrier::{Cone, ConeSet, PreparedBarrier};
use crate::{Error, RMatrix, Result, RVector};

/// Sparse matrix in triplet form. Duplicate entries are summed.
#[derive(Debug, Clone, Default)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    triplets: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            triplets: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.triplets.push((row, col, value));
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.triplets.len()
    }

    pub fn triplets(&self) -> &[(usize, usize, f64)] {
        &self.triplets
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for &(r, c, v) in &self.triplets {
            y[r] += v * x[c];
        }
        y
    }

    /// Row-oriented view with duplicates merged and exact zeros dropped.
    fn merged_rows(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.nrows];
        for &(r, c, v) in &self.triplets {
            rows[r].push((c, v));
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|&(_, v)| v != 0.0);
            *row = merged;
        }
        rows
    }
}

/// A conic program `min <c,x> : Ax = b, x in K`.
#[derive(Debug, Clone)]
pub struct ConicProblem {
    pub objective: Vec<f64>,
    pub constraints: SparseMatrix,
    pub rhs: Vec<f64>,
    pub cones: ConeSet,
}

impl ConicProblem {
    pub fn new(
        objective: Vec<f64>,
        constraints: SparseMatrix,
        rhs: Vec<f64>,
        cones: ConeSet,
    ) -> Result<Self> {
        if objective.len() != cones.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: cones.total_dim(),
                got: objective.len(),
            });
        }
        if constraints.ncols() != cones.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: cones.total_dim(),
                got: constraints.ncols(),
            });
        }
        if rhs.len() != constraints.nrows() {
            return Err(Error::DimensionMismatch {
                expected: constraints.nrows(),
                got: rhs.len(),
            });
        }
        if objective.iter().any(|t| !t.is_finite())
            || rhs.iter().any(|t| !t.is_finite())
            || constraints.triplets().iter().any(|t| !t.2.is_finite())
        {
            return Err(Error::NotFinite);
        }
        Ok(ConicProblem {
            objective,
            constraints,
            rhs,
            cones,
        })
    }
}

/// Solver parameters. Defaults follow the documented contract; `validate`
/// rejects out-of-range values.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Terminate once `nu * mu <= gap_tolerance`.
    pub gap_tolerance: f64,
    /// Total Newton-step budget across all stages (including phase 1).
    pub max_iterations: usize,
    /// Geometric factor applied to `mu` after each centered stage.
    pub mu_reduction: f64,
    /// Backtracking factor of the Armijo line search.
    pub line_search_backtrack: f64,
    /// Armijo slope fraction.
    pub armijo_coefficient: f64,
    /// Maximum backtracking steps before declaring numerical failure.
    pub max_backtracks: usize,
    /// Tolerance on `||A x - b||` used by the elimination and phase 1.
    pub feasibility_tolerance: f64,
    /// Initial path parameter.
    pub initial_mu: f64,
    /// Stage-advance threshold on the Newton decrement.
    pub centering_threshold: f64,
    /// Newton-decrement target of the final centering stage.
    pub final_centering_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gap_tolerance: 1e-8,
            max_iterations: 200,
            mu_reduction: 0.1,
            line_search_backtrack: 0.8,
            armijo_coefficient: 1e-4,
            max_backtracks: 60,
            feasibility_tolerance: 1e-9,
            initial_mu: 1.0,
            centering_threshold: 0.25,
            final_centering_threshold: 1e-3,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if !(self.gap_tolerance > 0.0) {
            return bad("gap_tolerance must be positive");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if !(self.mu_reduction > 0.0 && self.mu_reduction < 1.0) {
            return bad("mu_reduction must lie in (0, 1)");
        }
        if !(self.line_search_backtrack > 0.0 && self.line_search_backtrack < 1.0) {
            return bad("line_search_backtrack must lie in (0, 1)");
        }
        if !(self.armijo_coefficient > 0.0 && self.armijo_coefficient < 0.5) {
            return bad("armijo_coefficient must lie in (0, 1/2)");
        }
        if !(self.feasibility_tolerance > 0.0) {
            return bad("feasibility_tolerance must be positive");
        }
        if !(self.initial_mu > 0.0) {
            return bad("initial_mu must be positive");
        }
        if !(self.centering_threshold > 0.0 && self.centering_threshold < 1.0) {
            return bad("centering_threshold must lie in (0, 1)");
        }
        if !(self.final_centering_threshold > 0.0
            && self.final_centering_threshold <= self.centering_threshold)
        {
            return bad("final_centering_threshold must lie in (0, centering_threshold]");
        }
        Ok(())
    }
}

/// Why the solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Path followed to the gap tolerance and re-centered.
    Optimal,
    /// Newton budget exhausted; the iterate is feasible but the gap bound is
    /// larger than requested.
    IterationLimit,
    /// Line search or factorization broke down.
    NumericalFailure,
    /// Phase 1 certified that no strictly interior feasible point exists.
    Infeasible,
}

/// Residuals of the path-following optimality certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    /// `max |A x - b|`.
    pub primal: f64,
    /// `max |N' (c + mu grad F(x))|` — the dual residual projected onto the
    /// null space of `A`, which is the exact stationarity defect of the
    /// reduced problem.
    pub dual: f64,
    /// Complementarity gap: `nu * mu` when reported by a solve, `<x, z>` when
    /// computed from an explicit dual estimate. At a strictly interior `x`
    /// with `z = -mu grad F(x)` the two coincide by Euler's identity.
    pub gap: f64,
}

/// One accepted Newton step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub mu: f64,
    pub newton_decrement: f64,
    pub step_size: f64,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    /// `<c, x>` at the final iterate.
    pub objective_value: f64,
    /// Midpoint estimate `<c, x> - nu*mu/2`; its distance to the optimum is
    /// at most `nu*mu/2` at a centered iterate.
    pub objective_estimate: f64,
    /// `nu * mu` at termination.
    pub gap_bound: f64,
    /// Accepted Newton steps (phase 1 included).
    pub iterations: usize,
    pub mu: f64,
    pub kkt: KktResiduals,
    pub trace: Vec<IterationRecord>,
    /// Value of the phase-1 infeasibility scale, if phase 1 ran to its end
    /// without finding an interior point.
    pub infeasibility: Option<f64>,
}

/// Back-substitution recipe: `x[pivot] = (rhs - sum_j coeff_j x[j]) / coeff`.
#[derive(Debug, Clone)]
struct Recipe {
    pivot: usize,
    coeff: f64,
    others: Vec<(usize, f64)>,
    rhs: f64,
}

/// Affine parameterization `x = x_p + N z` of the feasible set.
#[derive(Debug)]
struct Reduction {
    x_particular: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl Reduction {
    fn reduced_dim(&self) -> usize {
        self.basis.len()
    }

    /// `N' g`.
    fn project(&self, g: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|col| dot(col, g)).collect()
    }

    /// `N z`.
    fn expand(&self, z: &[f64]) -> Vec<f64> {
        let n = self.x_particular.len();
        let mut out = vec![0.0; n];
        for (col, &zk) in self.basis.iter().zip(z) {
            for i in 0..n {
                out[i] += zk * col[i];
            }
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Relative pivot floor of the greedy pass; smaller pivots defer the row to
/// the dense fallback.
const GREEDY_PIVOT_FLOOR: f64 = 1e-12;

/// Eliminate `A x = b` into a particular solution plus null-space basis.
fn eliminate(a: &SparseMatrix, b: &[f64], feas_tol: f64) -> Result<Reduction> {
    let n = a.ncols();
    let rows = a.merged_rows();
    let mut alive: Vec<bool> = rows.iter().map(|r| !r.is_empty()).collect();
    // Initially empty rows are rank deficiencies straight away.
    if let Some(r) = alive.iter().position(|&al| !al) {
        if rows[r].is_empty() {
            return Err(Error::RankDeficient { row: r });
        }
    }
    let mut col_count = vec![0usize; n];
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            col_count[c] += 1;
            col_rows[c].push(r);
        }
    }
    let mut pivoted = vec![false; n];
    let mut recipes: Vec<Recipe> = Vec::new();
    let mut queue: std::collections::VecDeque<usize> = (0..n)
        .filter(|&c| col_count[c] == 1)
        .collect();
    while let Some(c) = queue.pop_front() {
        if pivoted[c] || col_count[c] != 1 {
            continue;
        }
        let Some(&r) = col_rows[c].iter().find(|&&r| alive[r]) else {
            continue;
        };
        let row = &rows[r];
        let coeff = row.iter().find(|&&(cc, _)| cc == c).unwrap().1;
        let row_scale = row.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
        if coeff.abs() < GREEDY_PIVOT_FLOOR * row_scale {
            // Numerically unusable pivot; leave the row for the fallback.
            continue;
        }
        alive[r] = false;
        pivoted[c] = true;
        let others: Vec<(usize, f64)> =
            row.iter().copied().filter(|&(cc, _)| cc != c).collect();
        for &(cc, _) in row {
            col_count[cc] -= 1;
            if cc != c && !pivoted[cc] && col_count[cc] == 1 {
                queue.push_back(cc);
            }
        }
        recipes.push(Recipe {
            pivot: c,
            coeff,
            others,
            rhs: b[r],
        });
    }

    // Dense Gauss-Jordan over whatever the greedy pass left behind.
    let live_rows: Vec<usize> = (0..rows.len()).filter(|&r| alive[r]).collect();
    if !live_rows.is_empty() {
        let live_cols: Vec<usize> = (0..n).filter(|&c| !pivoted[c]).collect();
        let col_index: std::collections::HashMap<usize, usize> = live_cols
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i))
            .collect();
        let (m, w) = (live_rows.len(), live_cols.len());
        let mut dense = vec![vec![0.0f64; w]; m];
        let mut rhs: Vec<f64> = live_rows.iter().map(|&r| b[r]).collect();
        for (i, &r) in live_rows.iter().enumerate() {
            for &(c, v) in &rows[r] {
                dense[i][col_index[&c]] = v;
            }
        }
        let a_scale = dense
            .iter()
            .flatten()
            .fold(0.0f64, |mx, t| mx.max(t.abs()))
            .max(1.0);
        let mut pivot_of_row: Vec<Option<usize>> = vec![None; m];
        let mut col_used = vec![false; w];
        for i in 0..m {
            // Partial pivoting: swap up the row with the largest entry in the
            // best available column.
            let mut best = (0.0f64, i, 0usize);
            for ii in i..m {
                for (jj, &cu) in col_used.iter().enumerate() {
                    if !cu && dense[ii][jj].abs() > best.0 {
                        best = (dense[ii][jj].abs(), ii, jj);
                    }
                }
            }
            let (pv, pr, pc) = best;
            if pv <= 1e-12 * a_scale {
                // Remaining rows are numerically zero: rank deficiency.
                return Err(Error::RankDeficient { row: live_rows[i] });
            }
            dense.swap(i, pr);
            rhs.swap(i, pr);
            pivot_of_row[i] = Some(pc);
            col_used[pc] = true;
            // Eliminate the pivot column from every other row (Gauss-Jordan
            // keeps each recipe free of the other pivots).
            for ii in 0..m {
                if ii == i || dense[ii][pc] == 0.0 {
                    continue;
                }
                let f = dense[ii][pc] / dense[i][pc];
                for jj in 0..w {
                    dense[ii][jj] -= f * dense[i][jj];
                }
                dense[ii][pc] = 0.0;
                rhs[ii] -= f * rhs[i];
            }
        }
        for i in 0..m {
            let pc = pivot_of_row[i].unwrap();
            let pivot = live_cols[pc];
            pivoted[pivot] = true;
            let others: Vec<(usize, f64)> = (0..w)
                .filter(|&jj| jj != pc && dense[i][jj] != 0.0)
                .map(|jj| (live_cols[jj], dense[i][jj]))
                .collect();
            recipes.push(Recipe {
                pivot,
                coeff: dense[i][pc],
                others,
                rhs: rhs[i],
            });
        }
    }

    let free_cols: Vec<usize> = (0..n).filter(|&c| !pivoted[c]).collect();
    // Back-substitute in reverse peel order: a recipe only references later
    // pivots and free columns.
    let substitute = |x: &mut [f64], homogeneous: bool| {
        for rec in recipes.iter().rev() {
            let mut v = if homogeneous { 0.0 } else { rec.rhs };
            for &(c, coeff) in &rec.others {
                v -= coeff * x[c];
            }
            x[rec.pivot] = v / rec.coeff;
        }
    };
    let mut x_particular = vec![0.0; n];
    substitute(&mut x_particular, false);
    let resid = a
        .matvec(&x_particular)
        .iter()
        .zip(b)
        .fold(0.0f64, |mx, (ax, bb)| mx.max((ax - bb).abs()));
    let b_scale = 1.0 + b.iter().fold(0.0f64, |mx, t| mx.max(t.abs()));
    if resid > feas_tol.max(1e-12) * b_scale * 1e3 {
        return Err(Error::NumericalFailure(format!(
            "elimination left a residual of {resid:.3e}"
        )));
    }
    let mut basis = Vec::with_capacity(free_cols.len());
    for &f in &free_cols {
        let mut col = vec![0.0; n];
        col[f] = 1.0;
        substitute(&mut col, true);
        basis.push(col);
    }
    Ok(Reduction {
        x_particular,
        basis,
    })
}

/// Solve the SPD reduced system by Cholesky with a jitter ladder and one
/// round of iterative refinement.
fn solve_reduced(h: &RMatrix, g: &[f64]) -> Result<Vec<f64>> {
    let k = h.nrows();
    let scale = (0..k).fold(0.0f64, |m, i| m.max(h[(i, i)].abs())).max(1.0);
    let mut jitter = 0.0;
    for _ in 0..14 {
        let mut hj = h.clone();
        for i in 0..k {
            hj[(i, i)] += jitter;
        }
        if let Some(chol) = hj.clone().cholesky() {
            let rhs = RVector::from_fn(k, |i, _| -g[i]);
            let mut dz = rhs.clone();
            chol.solve_mut(&mut dz);
            // One refinement round against the unjittered matrix.
            let resid = &rhs - h * &dz;
            let mut corr = resid;
            chol.solve_mut(&mut corr);
            dz += corr;
            if dz.iter().all(|t| t.is_finite()) {
                return Ok(dz.as_slice().to_vec());
            }
        }
        jitter = if jitter == 0.0 {
            1e-14 * scale
        } else {
            jitter * 10.0
        };
    }
    Err(Error::FactorizationFailed(
        "reduced Newton system is numerically indefinite".into(),
    ))
}

struct PathOutcome {
    status: SolveStatus,
    x: Vec<f64>,
    mu: f64,
    trace: Vec<IterationRecord>,
}

/// Follow the central path from a strictly interior feasible `x0`.
/// `early_stop`, when supplied, is checked after every accepted step.
fn path_follow(
    cones: &ConeSet,
    c: &[f64],
    red: &Reduction,
    x0: Vec<f64>,
    config: &SolverConfig,
    budget: &mut usize,
    early_stop: Option<&dyn Fn(&[f64]) -> bool>,
) -> Result<PathOutcome> {
    let nu = cones.barrier_parameter().max(1.0);
    let mut x = x0;
    let mut mu = config.initial_mu;
    let mut trace = Vec::new();
    let f_mu = |x: &[f64], mu: f64| -> Result<f64> {
        Ok(dot(c, x) / mu + cones.value(x)?)
    };
    loop {
        let final_stage = nu * mu <= config.gap_tolerance;
        let target = if final_stage {
            config.final_centering_threshold
        } else {
            config.centering_threshold
        };
        loop {
            let p: PreparedBarrier = cones.prepare(&x)?;
            let mut g_full: Vec<f64> = c.iter().map(|t| t / mu).collect();
            for (g, df) in g_full.iter_mut().zip(p.gradient()) {
                *g += df;
            }
            let g_z = red.project(&g_full);
            let k = red.reduced_dim();
            if k == 0 {
                // Fully pinned problem: the particular solution is the answer.
                return Ok(PathOutcome {
                    status: SolveStatus::Optimal,
                    x,
                    mu,
                    trace,
                });
            }
            let mut hz = RMatrix::zeros(k, k);
            let mut hcol = vec![0.0; x.len()];
            for j in 0..k {
                p.hessian_apply(&red.basis[j], &mut hcol)?;
                for i in 0..k {
                    hz[(i, j)] = dot(&red.basis[i], &hcol);
                }
            }
            for i in 0..k {
                for j in (i + 1)..k {
                    let v = 0.5 * (hz[(i, j)] + hz[(j, i)]);
                    hz[(i, j)] = v;
                    hz[(j, i)] = v;
                }
            }
            let dz = solve_reduced(&hz, &g_z)?;
            let lambda2 = -dot(&g_z, &dz);
            let lambda = lambda2.max(0.0).sqrt();
            if lambda <= target {
                break;
            }
            if *budget == 0 {
                return Ok(PathOutcome {
                    status: SolveStatus::IterationLimit,
                    x,
                    mu,
                    trace,
                });
            }
            *budget -= 1;
            let dx = red.expand(&dz);
            let slope = dot(&g_full, &dx);
            let f0 = f_mu(&x, mu)?;
            let mut t = if lambda <= 0.5 { 1.0 } else { 1.0 / (1.0 + lambda) };
            let mut accepted = false;
            for _ in 0..=config.max_backtracks {
                let xt: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + t * b).collect();
                if let Ok(ft) = f_mu(&xt, mu) {
                    if ft <= f0 + config.armijo_coefficient * t * slope {
                        x = xt;
                        accepted = true;
                        break;
                    }
                }
                t *= config.line_search_backtrack;
            }
            if !accepted {
                if std::env::var_os("SOLVER_DEBUG").is_some() {
                    eprintln!(
                        "line search failed: mu {mu:9.3e} lambda {lambda:11.4e} slope {slope:11.4e} f0 {f0:14.8e}"
                    );
                }
                return Ok(PathOutcome {
                    status: SolveStatus::NumericalFailure,
                    x,
                    mu,
                    trace,
                });
            }
            if std::env::var_os("SOLVER_DEBUG").is_some() {
                eprintln!(
                    "mu {mu:9.3e} lambda {lambda:11.4e} t {t:9.3e} f0 {f0:14.8e} slope {slope:11.4e}"
                );
            }
            trace.push(IterationRecord {
                mu,
                newton_decrement: lambda,
                step_size: t,
                objective: dot(c, &x),
            });
            if let Some(stop) = early_stop {
                if stop(&x) {
                    return Ok(PathOutcome {
                        status: SolveStatus::Optimal,
                        x,
                        mu,
                        trace,
                    });
                }
            }
        }
        if final_stage {
            return Ok(PathOutcome {
                status: SolveStatus::Optimal,
                x,
                mu,
                trace,
            });
        }
        mu *= config.mu_reduction;
    }
}

enum Phase1Outcome {
    Interior(Vec<f64>),
    /// Optimal infeasibility scale of the phase-1 program (nonnegative).
    Infeasible(f64),
    /// Newton budget ran out before either verdict.
    Exhausted,
}

/// Find a strictly interior feasible point via the phase-1 program.
fn phase1(
    problem: &ConicProblem,
    red: &Reduction,
    config: &SolverConfig,
    budget: &mut usize,
) -> Result<Phase1Outcome> {
    let n = problem.cones.total_dim();
    let e_bar = problem.cones.initial_point();
    let a_e = problem.constraints.matvec(&e_bar);
    let xp = &red.x_particular;

    // Scale-free shift: if A e = 0, sliding along e never disturbs Ax = b.
    if a_e.iter().all(|t| t.abs() <= 1e-14) {
        let mut tau = 1.0;
        for _ in 0..60 {
            let cand: Vec<f64> = xp.iter().zip(&e_bar).map(|(a, b)| a + tau * b).collect();
            if problem.cones.is_interior(&cand) {
                return Ok(Phase1Outcome::Interior(cand));
            }
            tau *= 2.0;
        }
        return Err(Error::NumericalFailure(
            "could not move the particular solution into the cone interior".into(),
        ));
    }

    // Find tau0 with x_p + tau0 e interior.
    let mut tau0 = 1.0;
    let mut v0 = None;
    for _ in 0..60 {
        let cand: Vec<f64> = xp.iter().zip(&e_bar).map(|(a, b)| a + tau0 * b).collect();
        if problem.cones.is_interior(&cand) {
            v0 = Some(cand);
            break;
        }
        tau0 *= 2.0;
    }
    let Some(v0) = v0 else {
        return Err(Error::NumericalFailure(
            "could not move the particular solution into the cone interior".into(),
        ));
    };

    // Augmented program: variables (v, tau), constraints A v - (A e) tau = b.
    let mut cones_aug: Vec<Cone> = problem.cones.cones().to_vec();
    cones_aug.push(Cone::Free { dim: 1 });
    let cones_aug = ConeSet::new(cones_aug)?;
    let mut a_aug = SparseMatrix::new(problem.constraints.nrows(), n + 1);
    for &(r, c, v) in problem.constraints.triplets() {
        a_aug.push(r, c, v);
    }
    for (r, &v) in a_e.iter().enumerate() {
        if v != 0.0 {
            a_aug.push(r, n, -v);
        }
    }
    let mut c_aug = vec![0.0; n + 1];
    c_aug[n] = 1.0;
    let red_aug = eliminate(&a_aug, &problem.rhs, config.feasibility_tolerance)?;
    let mut x0_aug = v0;
    x0_aug.push(tau0);
    // The elimination's particular solution is irrelevant here; we already
    // have a feasible interior start for the augmented program.
    //
    // Early stop on the actual goal: `v - tau e` satisfies the equalities for
    // every iterate, so the search is over as soon as that shifted candidate
    // is strictly interior. (Once tau < 0 this holds automatically, but cone
    // coordinates that no equality touches can make the candidate interior
    // well before tau crosses zero — and for epigraph-type cones those
    // coordinates make the stage subproblems unbounded, so waiting on tau
    // alone could spin forever.)
    let shifted = |x: &[f64]| -> Vec<f64> {
        let tau = x[n];
        x[..n]
            .iter()
            .zip(&e_bar)
            .map(|(v, e)| v - tau * e)
            .collect()
    };
    let mut cfg1 = config.clone();
    cfg1.gap_tolerance = config.gap_tolerance.max(1e-6);
    cfg1.initial_mu = 1.0;
    let outcome = path_follow(
        &cones_aug,
        &c_aug,
        &red_aug,
        x0_aug,
        &cfg1,
        budget,
        Some(&|x: &[f64]| problem.cones.is_interior(&shifted(x))),
    )?;
    {
        let x = shifted(&outcome.x);
        if problem.cones.is_interior(&x) {
            return Ok(Phase1Outcome::Interior(x));
        }
    }
    let tau = outcome.x[n];
    match outcome.status {
        SolveStatus::Optimal => Ok(Phase1Outcome::Infeasible(tau)),
        SolveStatus::IterationLimit => Ok(Phase1Outcome::Exhausted),
        _ => Err(Error::NumericalFailure(
            "phase 1 broke down before certifying feasibility".into(),
        )),
    }
}

fn package(
    problem: &ConicProblem,
    red: &Reduction,
    outcome: PathOutcome,
    iterations: usize,
    infeasibility: Option<f64>,
) -> SolveResult {
    let nu = problem.cones.barrier_parameter();
    let obj = dot(&problem.objective, &outcome.x);
    let gap = nu * outcome.mu;
    let primal = problem
        .constraints
        .matvec(&outcome.x)
        .iter()
        .zip(&problem.rhs)
        .fold(0.0f64, |m, (ax, b)| m.max((ax - b).abs()));
    let dual = match problem.cones.prepare(&outcome.x) {
        Ok(p) => {
            let g: Vec<f64> = problem
                .objective
                .iter()
                .zip(p.gradient())
                .map(|(c, df)| c + outcome.mu * df)
                .collect();
            red.project(&g)
                .iter()
                .fold(0.0f64, |m, t| m.max(t.abs()))
        }
        Err(_) => f64::NAN,
    };
    SolveResult {
        status: outcome.status,
        objective_value: obj,
        objective_estimate: obj - 0.5 * gap,
        gap_bound: gap,
        iterations,
        mu: outcome.mu,
        kkt: KktResiduals {
            primal,
            dual,
            gap,
        },
        trace: outcome.trace,
        x: outcome.x,
        infeasibility,
    }
}

/// Dual certificate attached to a central-path iterate: `z = -mu grad F(x)`
/// lies in the dual cone and satisfies `<x, z> = nu * mu` exactly (Euler's
/// identity), so it bounds the suboptimality of any feasible point.
#[derive(Debug, Clone)]
pub struct DualEstimate {
    /// Dual point `-mu grad F(x)`.
    pub z: Vec<f64>,
    /// Path parameter the estimate was formed at.
    pub mu: f64,
}

/// Build the path-following dual estimate at a strictly interior `x`.
pub fn dual_estimate(problem: &ConicProblem, x: &[f64], mu: f64) -> Result<DualEstimate> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::InvalidParameter(format!("mu {mu} must be positive")));
    }
    if x.len() != problem.cones.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.cones.total_dim(),
            got: x.len(),
        });
    }
    let p = problem.cones.prepare(x)?;
    Ok(DualEstimate {
        z: p.gradient().iter().map(|g| -mu * g).collect(),
        mu,
    })
}

/// KKT residuals of a primal-dual pair, independent of any solve: primal
/// feasibility `max |A x - b|`, the stationarity defect `max |N' (c - z)|`
/// projected onto the null space of `A`, and the complementarity gap
/// `<x, z>`.
///
/// At a centered iterate with `z = -mu grad F(x)` the projected dual residual
/// vanishes and the gap equals `nu * mu`; off the path the dual residual
/// grows even while primal feasibility is intact.
pub fn kkt_residuals(
    problem: &ConicProblem,
    x: &[f64],
    dual: &DualEstimate,
) -> Result<KktResiduals> {
    let n = problem.cones.total_dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    if dual.z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: dual.z.len() });
    }
    let red = eliminate(
        &problem.constraints,
        &problem.rhs,
        SolverConfig::default().feasibility_tolerance,
    )?;
    let primal = problem
        .constraints
        .matvec(x)
        .iter()
        .zip(&problem.rhs)
        .fold(0.0f64, |m, (ax, b)| m.max((ax - b).abs()));
    let resid: Vec<f64> = problem
        .objective
        .iter()
        .zip(&dual.z)
        .map(|(c, z)| c - z)
        .collect();
    let dual_res = red
        .project(&resid)
        .iter()
        .fold(0.0f64, |m, t| m.max(t.abs()));
    Ok(KktResiduals {
        primal,
        dual: dual_res,
        gap: dot(x, &dual.z),
    })
}

/// Solve from a supplied strictly interior feasible point.
pub fn solve_from(
    problem: &ConicProblem,
    config: &SolverConfig,
    x0: &[f64],
) -> Result<SolveResult> {
    config.validate()?;
    if x0.len() != problem.cones.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.cones.total_dim(),
            got: x0.len(),
        });
    }
    let red = eliminate(
        &problem.constraints,
        &problem.rhs,
        config.feasibility_tolerance,
    )?;
    let resid = problem
        .constraints
        .matvec(x0)
        .iter()
        .zip(&problem.rhs)
        .fold(0.0f64, |m, (ax, b)| m.max((ax - b).abs()));
    let b_scale = 1.0 + problem.rhs.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if resid > config.feasibility_tolerance * b_scale * 1e3 {
        return Err(Error::ExteriorPoint(format!(
            "supplied start violates the equalities by {resid:.3e}"
        )));
    }
    // Refuse silently infeasible starts.
    problem.cones.value(x0)?;
    let mut budget = config.max_iterations;
    let outcome = path_follow(
        &problem.cones,
        &problem.objective,
        &red,
        x0.to_vec(),
        config,
        &mut budget,
        None,
    )?;
    let iterations = config.max_iterations - budget;
    Ok(package(problem, &red, outcome, iterations, None))
}

/// Solve, constructing a strictly interior feasible start automatically
/// (phase 1) when the elimination's particular solution is not interior.
pub fn solve(problem: &ConicProblem, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let red = eliminate(
        &problem.constraints,
        &problem.rhs,
        config.feasibility_tolerance,
    )?;
    let mut budget = config.max_iterations;
    let x0 = if problem.cones.is_interior(&red.x_particular) {
        red.x_particular.clone()
    } else {
        match phase1(problem, &red, config, &mut budget)? {
            Phase1Outcome::Interior(x0) => x0,
            Phase1Outcome::Infeasible(tau) => {
                // No strictly interior feasible point: report the certificate.
                let outcome = PathOutcome {
                    status: SolveStatus::Infeasible,
                    x: red.x_particular.clone(),
                    mu: config.initial_mu,
                    trace: Vec::new(),
                };
                let iterations = config.max_iterations - budget;
                return Ok(package(problem, &red, outcome, iterations, Some(tau)));
            }
            Phase1Outcome::Exhausted => {
                let outcome = PathOutcome {
                    status: SolveStatus::IterationLimit,
                    x: red.x_particular.clone(),
                    mu: config.initial_mu,
                    trace: Vec::new(),
                };
                return Ok(package(problem, &red, outcome, config.max_iterations, None));
            }
        }
    };
    let outcome = path_follow(
        &problem.cones,
        &problem.objective,
        &red,
        x0,
        config,
        &mut budget,
        None,
    )?;
    let iterations = config.max_iterations - budget;
    Ok(package(problem, &red, outcome, iterations, None))
}
