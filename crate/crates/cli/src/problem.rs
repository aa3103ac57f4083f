//! JSON problem files: `min <c,x> : Ax = b, x in K` with an optional
//! strictly interior start.
//!
//! All vectors live in the fixed real coordinates documented in
//! [`renyicone::vectorize`]: for each Hermitian block, the diagonal first,
//! then for every pair `i < j` in lexicographic order `sqrt(2) Re X[i,j]`
//! followed by `sqrt(2) Im X[i,j]`. The `vectorization` field names this
//! convention and is rejected when it does not match, so a file can never be
//! silently reinterpreted under a different coordinate order.

use serde::{Deserialize, Serialize};

use renyicone::barrier::{Cone, ConeSet};
use renyicone::solver::{ConicProblem, SparseMatrix};

use crate::{CliError, CliResult};

/// Problem-file schema understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// Name of the coordinate convention used by every vector in the file.
pub const VECTORIZATION_TAG: &str = "diag-then-upper-sqrt2-reim";

/// Sparse constraint matrix in triplet form. Entries with the same
/// `(row, col)` are summed; explicit zeros are allowed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

/// One cone block. `kind` selects the cone; `n` is its dimension parameter
/// (vector length for `nonneg`/`free`, matrix side otherwise); `alpha` is
/// required exactly for the Renyi cones.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeRecord {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

/// The on-disk problem. Unknown keys are rejected so that typos fail loudly
/// instead of being ignored.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: u32,
    pub objective: Vec<f64>,
    #[serde(rename = "A")]
    pub a: TripletMatrix,
    pub b: Vec<f64>,
    pub cones: Vec<ConeRecord>,
    pub vectorization: String,
    /// Strictly interior feasible start, when the producer knows one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
}

fn cone_from_record(rec: &ConeRecord) -> CliResult<Cone> {
    let need_n = || {
        rec.n
            .ok_or_else(|| CliError::invalid(format!("cone kind {:?} requires \"n\"", rec.kind)))
    };
    let need_alpha = || {
        rec.alpha.ok_or_else(|| {
            CliError::invalid(format!("cone kind {:?} requires \"alpha\"", rec.kind))
        })
    };
    let no_alpha = |cone: Cone| -> CliResult<Cone> {
        if rec.alpha.is_some() {
            return Err(CliError::invalid(format!(
                "cone kind {:?} does not take \"alpha\"",
                rec.kind
            )));
        }
        Ok(cone)
    };
    match rec.kind.as_str() {
        "nonneg" => no_alpha(Cone::NonNeg { dim: need_n()? }),
        "free" => no_alpha(Cone::Free { dim: need_n()? }),
        "psd" => no_alpha(Cone::Psd { side: need_n()? }),
        "renyi-hypo" => Ok(Cone::RenyiHypo {
            side: need_n()?,
            alpha: need_alpha()?,
        }),
        "renyi-epi" => Ok(Cone::RenyiEpi {
            side: need_n()?,
            alpha: need_alpha()?,
        }),
        "renyi-persp-epi" => Ok(Cone::RenyiPerspEpi {
            side: need_n()?,
            alpha: need_alpha()?,
        }),
        other => Err(CliError::invalid(format!("unknown cone kind {other:?}"))),
    }
}

fn record_from_cone(cone: &Cone) -> ConeRecord {
    let (kind, n, alpha) = match *cone {
        Cone::NonNeg { dim } => ("nonneg", dim, None),
        Cone::Free { dim } => ("free", dim, None),
        Cone::Psd { side } => ("psd", side, None),
        Cone::RenyiHypo { side, alpha } => ("renyi-hypo", side, Some(alpha)),
        Cone::RenyiEpi { side, alpha } => ("renyi-epi", side, Some(alpha)),
        Cone::RenyiPerspEpi { side, alpha } => ("renyi-persp-epi", side, Some(alpha)),
    };
    ConeRecord {
        kind: kind.to_string(),
        n: Some(n),
        alpha,
    }
}

impl ProblemFile {
    /// Package an assembled problem (and optionally its interior start) for
    /// writing to disk.
    pub fn from_problem(problem: &ConicProblem, start: Option<&[f64]>) -> Self {
        let trip = problem.constraints.triplets();
        ProblemFile {
            schema: SCHEMA_VERSION,
            objective: problem.objective.clone(),
            a: TripletMatrix {
                nrows: problem.constraints.nrows(),
                ncols: problem.constraints.ncols(),
                rows: trip.iter().map(|t| t.0).collect(),
                cols: trip.iter().map(|t| t.1).collect(),
                vals: trip.iter().map(|t| t.2).collect(),
            },
            b: problem.rhs.clone(),
            cones: problem.cones.cones().iter().map(record_from_cone).collect(),
            vectorization: VECTORIZATION_TAG.to_string(),
            start: start.map(<[f64]>::to_vec),
        }
    }

    /// Validate the file and build the solver-side problem. Returns the
    /// problem together with the interior start if the file carries one.
    pub fn into_problem(self) -> CliResult<(ConicProblem, Option<Vec<f64>>)> {
        if self.schema != SCHEMA_VERSION {
            return Err(CliError::invalid(format!(
                "unsupported schema {} (this build reads schema {SCHEMA_VERSION})",
                self.schema
            )));
        }
        if self.vectorization != VECTORIZATION_TAG {
            return Err(CliError::invalid(format!(
                "unknown vectorization {:?} (expected {VECTORIZATION_TAG:?})",
                self.vectorization
            )));
        }
        let t = &self.a;
        if t.rows.len() != t.vals.len() || t.cols.len() != t.vals.len() {
            return Err(CliError::invalid(format!(
                "triplet arrays disagree in length: {} rows, {} cols, {} vals",
                t.rows.len(),
                t.cols.len(),
                t.vals.len()
            )));
        }
        let mut constraints = SparseMatrix::new(t.nrows, t.ncols);
        for k in 0..t.vals.len() {
            if t.rows[k] >= t.nrows || t.cols[k] >= t.ncols {
                return Err(CliError::invalid(format!(
                    "triplet {k} at ({}, {}) is outside the declared {} x {} shape",
                    t.rows[k], t.cols[k], t.nrows, t.ncols
                )));
            }
            constraints.push(t.rows[k], t.cols[k], t.vals[k]);
        }
        let cones = self
            .cones
            .iter()
            .map(cone_from_record)
            .collect::<CliResult<Vec<Cone>>>()?;
        let cones = ConeSet::new(cones)?;
        if let Some(start) = &self.start {
            if start.len() != cones.total_dim() {
                return Err(CliError::invalid(format!(
                    "start has {} coordinates but the cones span {}",
                    start.len(),
                    cones.total_dim()
                )));
            }
        }
        let problem = ConicProblem::new(self.objective, constraints, self.b, cones)?;
        Ok((problem, self.start))
    }
}

/// Parse a problem file, annotating syntax errors with their position.
pub fn parse_problem_file(path: &std::path::Path, text: &str) -> CliResult<ProblemFile> {
    serde_json::from_str(text).map_err(|e| CliError::parse(path, &e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use renyicone::barrier::{Cone, ConeSet};
    use renyicone::solver::{ConicProblem, SparseMatrix};
    use std::path::Path;

    fn toy_problem() -> ConicProblem {
        // min x0 : x0 + x1 = 1, x in R^2_+
        let mut a = SparseMatrix::new(1, 2);
        a.push(0, 0, 1.0);
        a.push(0, 1, 1.0);
        ConicProblem::new(
            vec![1.0, 0.0],
            a,
            vec![1.0],
            ConeSet::new(vec![Cone::NonNeg { dim: 2 }]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn round_trips_through_json() {
        let problem = toy_problem();
        let file = ProblemFile::from_problem(&problem, Some(&[0.5, 0.5]));
        let text = serde_json::to_string_pretty(&file).unwrap();
        let parsed = parse_problem_file(Path::new("toy.json"), &text).unwrap();
        let (rebuilt, start) = parsed.into_problem().unwrap();
        assert_eq!(rebuilt.objective, problem.objective);
        assert_eq!(rebuilt.rhs, problem.rhs);
        assert_eq!(rebuilt.constraints.triplets(), problem.constraints.triplets());
        assert_eq!(rebuilt.cones.cones(), problem.cones.cones());
        assert_eq!(start.unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn rejects_unknown_keys_with_a_position() {
        let text = r#"{"schema": 1, "objektive": []}"#;
        let err = parse_problem_file(Path::new("bad.json"), text).unwrap_err();
        match err {
            CliError::Parse { line, column, .. } => {
                assert!(line >= 1 && column > 1);
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_schema_and_vectorization() {
        let problem = toy_problem();
        let mut file = ProblemFile::from_problem(&problem, None);
        file.schema = 2;
        assert!(matches!(
            file.clone().into_problem(),
            Err(CliError::Invalid(_))
        ));
        file.schema = 1;
        file.vectorization = "column-major".into();
        assert!(matches!(file.into_problem(), Err(CliError::Invalid(_))));
    }

    #[test]
    fn rejects_malformed_cone_records() {
        let problem = toy_problem();
        let mut file = ProblemFile::from_problem(&problem, None);
        file.cones[0].alpha = Some(1.5);
        assert!(matches!(
            file.clone().into_problem(),
            Err(CliError::Invalid(_))
        ));
        file.cones[0] = ConeRecord {
            kind: "renyi-hypo".into(),
            n: Some(1),
            alpha: None,
        };
        assert!(matches!(file.into_problem(), Err(CliError::Invalid(_))));
    }

    #[test]
    fn rejects_out_of_shape_triplets() {
        let problem = toy_problem();
        let mut file = ProblemFile::from_problem(&problem, None);
        file.a.rows[0] = 5;
        assert!(matches!(file.into_problem(), Err(CliError::Invalid(_))));
    }

    #[test]
    fn rejects_start_of_the_wrong_length() {
        let problem = toy_problem();
        let mut file = ProblemFile::from_problem(&problem, None);
        file.start = Some(vec![1.0]);
        assert!(matches!(file.into_problem(), Err(CliError::Invalid(_))));
    }
}
