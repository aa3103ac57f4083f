use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use renyicone::solver::{self, SolverConfig};
use renyicone::vectorize::vectorize;
use renyicone_cli::experiments::{self, SourceKind, SuiteKind};
use renyicone_cli::problem::{parse_problem_file, ProblemFile};
use renyicone_cli::report::{status_exit_code, ReportFile, SolvePayload};
use renyicone_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "renyicone",
    version,
    about = "Conic optimization experiments over sandwiched Renyi entropy cones"
)]
struct Cli {
    /// Seed for every randomized draw.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Override the solver's duality-gap tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override the solver's Newton-step budget.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Report format; only "json" is supported.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimize the divergence of a bipartite source A against tr_2(A) (x) X
    /// over densities X, and report the fixed-point residual of the optimum.
    MutualInfo {
        /// Local dimension (the source lives on an n^2-dimensional system).
        #[arg(long)]
        n: usize,
        /// Renyi order in [1/2, 1) or (1, 2].
        #[arg(long)]
        alpha: f64,
        /// Source construction: random (default), identity, or product.
        #[arg(long, default_value = "random")]
        source: String,
    },
    /// One point of the entanglement rate-distortion curve.
    RateDistortion {
        /// Local dimension in [2, 4].
        #[arg(long)]
        n: usize,
        /// Renyi order in [1/2, 1) or (1, 2].
        #[arg(long)]
        alpha: f64,
        /// Distortion budget in [0, 1].
        #[arg(long)]
        delta: f64,
        /// Also write the assembled program as a problem file.
        #[arg(long)]
        export_problem: Option<PathBuf>,
    },
    /// Check the block-SDP fidelity against Psi_{1/2} on random pairs.
    FidelityCheck {
        /// Matrix side in [1, 8].
        #[arg(long)]
        n: usize,
        /// Number of random pairs to test.
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Run a numeric verification suite and report worst-case violations.
    Verify {
        /// all, self-concordance, compatibility, operator-lines,
        /// kron-identity, or scalar-alpha-gt2.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Override the suite's default sample count.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Solve a problem file.
    Solve {
        /// Path to a schema-1 problem file.
        problem: PathBuf,
        /// Construct an interior start with phase 1 when the file has none.
        #[arg(long)]
        phase1: bool,
    },
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload serialization")
}

fn dispatch(cli: &Cli) -> CliResult<(ReportFile, u8)> {
    match &cli.command {
        Cmd::MutualInfo { n, alpha, source } => {
            let source = SourceKind::parse(source)?;
            let config = experiments::experiment_config(cli.tol, cli.max_iter, 1e-9);
            let out = experiments::run_mutual_info(*n, *alpha, cli.seed, source, &config)?;
            let results = json!({
                "divergence": out.divergence,
                "solver_divergence": out.solver_divergence,
                "fixed_point_residual": out.fixed_point_residual,
                "x": vectorize(&out.x_opt),
                "solve": to_value(&SolvePayload::from_result(&out.solve)),
            });
            let config_echo = json!({
                "n": n,
                "alpha": alpha,
                "source": source.name(),
                "gap_tolerance": config.gap_tolerance,
                "max_iterations": config.max_iterations,
            });
            let report = ReportFile::new("mutual-info", Some(cli.seed), config_echo, results);
            Ok((report, status_exit_code(out.solve.status)))
        }
        Cmd::RateDistortion {
            n,
            alpha,
            delta,
            export_problem,
        } => {
            let config = experiments::experiment_config(cli.tol, cli.max_iter, 1e-9);
            if let Some(path) = export_problem {
                if *delta <= 0.0 {
                    return Err(CliError::invalid(
                        "delta = 0 admits no strictly interior start, so the program \
                         cannot be exported in solvable form",
                    ));
                }
                let (problem, start) = experiments::build_rate_distortion(*n, *alpha, *delta)?;
                let file = ProblemFile::from_problem(&problem, Some(&start));
                let mut text =
                    serde_json::to_string_pretty(&file).expect("problem serialization");
                text.push('\n');
                std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
            }
            let out = experiments::run_rate_distortion(*n, *alpha, *delta, &config)?;
            let mut results = json!({
                "rate": out.rate,
                "objective": out.objective,
                "closed_form": out.closed_form,
                "zero_rate_threshold": out.zero_rate_threshold,
            });
            if let Some(v) = out.iterate_objective {
                results["iterate_objective"] = json!(v);
            }
            if let Some(solve) = &out.solve {
                results["solve"] = to_value(&SolvePayload::from_result(solve));
            }
            let config_echo = json!({
                "n": n,
                "alpha": alpha,
                "delta": delta,
                "gap_tolerance": config.gap_tolerance,
                "max_iterations": config.max_iterations,
            });
            let report = ReportFile::new("rate-distortion", None, config_echo, results);
            let code = out
                .solve
                .as_ref()
                .map_or(0, |solve| status_exit_code(solve.status));
            Ok((report, code))
        }
        Cmd::FidelityCheck { n, trials } => {
            let config = experiments::experiment_config(cli.tol, cli.max_iter, 1e-8);
            let out = experiments::run_fidelity(*n, cli.seed, *trials, &config)?;
            let rows: Vec<Value> = out
                .trials
                .iter()
                .map(|t| {
                    json!({
                        "sdp_value": t.sdp_value,
                        "psi_half": t.psi_half,
                        "deviation": t.deviation,
                    })
                })
                .collect();
            let results = json!({
                "trials": rows,
                "max_deviation": out.max_deviation,
            });
            let config_echo = json!({
                "n": n,
                "trials": trials,
                "gap_tolerance": config.gap_tolerance,
                "max_iterations": config.max_iterations,
            });
            let report = ReportFile::new("fidelity-check", Some(cli.seed), config_echo, results);
            Ok((report, status_exit_code(out.worst_status)))
        }
        Cmd::Verify { suite, count } => {
            let kind = SuiteKind::parse(suite)?;
            let reports = experiments::run_suite(kind, cli.seed, *count)?;
            let passed = reports.iter().all(|r| r.passed);
            let rows: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "property": r.property_name,
                        "samples": r.samples,
                        "worst_violation": r.worst_violation,
                        "tolerance": r.tolerance,
                        "passed": r.passed,
                        "seed": r.seed,
                        "worst_case": r.worst_case_inputs,
                    })
                })
                .collect();
            let results = json!({
                "suite": kind.name(),
                "passed": passed,
                "checks": rows,
            });
            let config_echo = json!({ "suite": kind.name(), "count": count });
            let report = ReportFile::new("verify", Some(cli.seed), config_echo, results);
            Ok((report, u8::from(!passed)))
        }
        Cmd::Solve { problem, phase1 } => {
            let text = std::fs::read_to_string(problem).map_err(|e| CliError::io(problem, e))?;
            let file = parse_problem_file(problem, &text)?;
            let (conic, start) = file.into_problem()?;
            let config = SolverConfig {
                gap_tolerance: cli.tol.unwrap_or(SolverConfig::default().gap_tolerance),
                max_iterations: cli
                    .max_iter
                    .unwrap_or(SolverConfig::default().max_iterations),
                ..SolverConfig::default()
            };
            let result = match (&start, phase1) {
                (Some(x0), _) => solver::solve_from(&conic, &config, x0)?,
                (None, true) => solver::solve(&conic, &config)?,
                (None, false) => {
                    return Err(CliError::invalid(
                        "problem file carries no interior start; pass --phase1 to construct one",
                    ))
                }
            };
            let results = json!({
                "solve": to_value(&SolvePayload::from_result(&result)),
            });
            let config_echo = json!({
                "problem": problem.display().to_string(),
                "phase1": phase1,
                "gap_tolerance": config.gap_tolerance,
                "max_iterations": config.max_iterations,
            });
            let report = ReportFile::new("solve", None, config_echo, results);
            Ok((report, status_exit_code(result.status)))
        }
    }
}

fn run(cli: &Cli) -> CliResult<u8> {
    if cli.format != "json" {
        return Err(CliError::invalid(format!(
            "unsupported format {:?} (only \"json\")",
            cli.format
        )));
    }
    let started = Instant::now();
    let (mut report, code) = dispatch(cli)?;
    report.wall_time_seconds = started.elapsed().as_secs_f64();
    report.emit(cli.output.as_deref())?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let benign = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            if benign {
                return ExitCode::SUCCESS;
            }
            return ExitCode::from(4);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
