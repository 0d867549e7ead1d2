//! Problem files: JSON documents describing one projection problem.
//!
//! Matrices are row-major lists of rows; each entry is an `[re, im]` pair (a
//! bare number is read as a real entry). A starting point may be given as the
//! string `"identity_normalized"` for `I/d` or `"identity"`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matcore::{CMatrix, HermitianMatrix, C64};
use crate::solvers::{Algorithm, ConstraintSystem, Normalization, StoppingRule, DEFAULT_DELTA_MAX};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Complex([f64; 2]),
    Real(f64),
}

impl Entry {
    fn value(&self) -> C64 {
        match *self {
            Entry::Complex([re, im]) => C64::new(re, im),
            Entry::Real(re) => C64::new(re, 0.0),
        }
    }
}

pub type MatrixRows = Vec<Vec<Entry>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StartSpec {
    Named(String),
    Matrix(MatrixRows),
}

/// On-disk layout of a problem file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default = "default_family")]
    pub family: String,
    pub dim: usize,
    #[serde(rename = "F", default)]
    pub operators: Vec<MatrixRows>,
    #[serde(rename = "X0", default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<MatrixRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<f64>>,
    #[serde(rename = "Y0", default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<StartSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<Algorithm>,
    #[serde(default)]
    pub stopping: StoppingRule,
    #[serde(default = "default_delta_max")]
    pub delta_max: f64,
    /// Boosting data: labels `±1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<f64>>,
    /// Boosting data: `hypotheses[j][i] = h_j(x_i)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypotheses: Option<Vec<Vec<f64>>>,
}

fn default_family() -> String {
    "shannon".to_string()
}

fn default_delta_max() -> f64 {
    DEFAULT_DELTA_MAX
}

/// Where the projection is measured from.
#[derive(Clone, Debug, PartialEq)]
pub enum Reference {
    Matrix(HermitianMatrix),
    Targets(Vec<f64>),
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Start {
    Matrix(HermitianMatrix),
    IdentityNormalized,
    Identity,
}

impl Start {
    pub fn resolve(&self, dim: usize) -> HermitianMatrix {
        match self {
            Start::Matrix(m) => m.clone(),
            Start::IdentityNormalized => HermitianMatrix::identity(dim).scale(1.0 / dim as f64),
            Start::Identity => HermitianMatrix::identity(dim),
        }
    }
}

/// Validated problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub family: String,
    pub dim: usize,
    pub operators: Vec<HermitianMatrix>,
    pub reference: Reference,
    pub start: Option<Start>,
    pub normalization: Option<Normalization>,
    pub solver: Option<Algorithm>,
    pub stopping: StoppingRule,
    pub delta_max: f64,
    pub labels: Option<Vec<f64>>,
    pub hypotheses: Option<Vec<Vec<f64>>>,
    /// SHA-256 of the file contents.
    pub hash: String,
}

fn parse_error(field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        location: field.to_string(),
        message: message.into(),
    }
}

/// Decodes `rows` as a Hermitian `dim × dim` matrix; errors name `field`.
pub fn to_matrix(rows: &MatrixRows, dim: usize, field: &str) -> Result<HermitianMatrix> {
    if rows.len() != dim {
        return Err(Error::DimensionMismatch {
            context: format!("{field} row count"),
            expected: dim,
            found: rows.len(),
        });
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                context: format!("{field} row {i} length"),
                expected: dim,
                found: row.len(),
            });
        }
    }
    let m = CMatrix::from_fn(dim, dim, |i, j| rows[i][j].value());
    let herm_gap = (&m - m.adjoint()).norm();
    if herm_gap > 1e-12 * m.norm().max(1.0) {
        return Err(parse_error(field, format!("matrix is not Hermitian (|A − A†| = {herm_gap:e})")));
    }
    HermitianMatrix::new(m).map_err(|e| parse_error(field, e.to_string()))
}

/// Row-major `[re, im]` encoding of `m`.
pub fn matrix_rows(m: &HermitianMatrix) -> MatrixRows {
    let a = m.matrix();
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| Entry::Complex([a[(i, j)].re, a[(i, j)].im])).collect())
        .collect()
}

fn hash_text(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl Problem {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse { location, message } => Error::Parse {
                location: format!("{}: {location}", path.display()),
                message,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(text)
            .map_err(|e| parse_error(&format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        let mut p = Self::from_file(&file)?;
        p.hash = hash_text(text);
        Ok(p)
    }

    pub fn from_file(file: &ProblemFile) -> Result<Self> {
        let dim = file.dim;
        if dim == 0 {
            return Err(parse_error("dim", "dimension must be positive"));
        }
        let operators = file
            .operators
            .iter()
            .enumerate()
            .map(|(j, rows)| to_matrix(rows, dim, &format!("F[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        let reference = match (&file.x0, &file.targets) {
            (Some(_), Some(_)) => return Err(parse_error("X0", "give either X0 or targets, not both")),
            (Some(rows), None) => Reference::Matrix(to_matrix(rows, dim, "X0")?),
            (None, Some(t)) => {
                if t.len() != operators.len() {
                    return Err(Error::DimensionMismatch {
                        context: "targets".into(),
                        expected: operators.len(),
                        found: t.len(),
                    });
                }
                Reference::Targets(t.clone())
            }
            (None, None) => Reference::None,
        };
        let start = match &file.y0 {
            None => None,
            Some(StartSpec::Named(name)) => Some(match name.as_str() {
                "identity_normalized" => Start::IdentityNormalized,
                "identity" => Start::Identity,
                other => return Err(parse_error("Y0", format!("unknown shorthand '{other}'"))),
            }),
            Some(StartSpec::Matrix(rows)) => Some(Start::Matrix(to_matrix(rows, dim, "Y0")?)),
        };
        if let (Some(n), false) = (file.normalization, operators.is_empty()) {
            ConstraintSystem::from_targets(operators.clone(), vec![0.0; operators.len()], n)?;
        }
        file.stopping.validate().map_err(|e| parse_error("stopping", e.to_string()))?;
        if !(file.delta_max > 0.0) {
            return Err(parse_error("delta_max", "must be positive"));
        }
        Ok(Problem {
            family: file.family.clone(),
            dim,
            operators,
            reference,
            start,
            normalization: file.normalization,
            solver: file.solver,
            stopping: file.stopping,
            delta_max: file.delta_max,
            labels: file.labels.clone(),
            hypotheses: file.hypotheses.clone(),
            hash: String::new(),
        })
    }

    pub fn to_file(&self) -> ProblemFile {
        let (x0, targets) = match &self.reference {
            Reference::Matrix(m) => (Some(matrix_rows(m)), None),
            Reference::Targets(t) => (None, Some(t.clone())),
            Reference::None => (None, None),
        };
        ProblemFile {
            family: self.family.clone(),
            dim: self.dim,
            operators: self.operators.iter().map(matrix_rows).collect(),
            x0,
            targets,
            y0: self.start.as_ref().map(|s| match s {
                Start::Matrix(m) => StartSpec::Matrix(matrix_rows(m)),
                Start::IdentityNormalized => StartSpec::Named("identity_normalized".into()),
                Start::Identity => StartSpec::Named("identity".into()),
            }),
            normalization: self.normalization,
            solver: self.solver,
            stopping: self.stopping,
            delta_max: self.delta_max,
            labels: self.labels.clone(),
            hypotheses: self.hypotheses.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("problem files serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAXENT: &str = r#"{
        "family": "shannon",
        "dim": 2,
        "F": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]],
        "targets": [0.9],
        "Y0": "identity_normalized",
        "normalization": "povm",
        "solver": "qis"
    }"#;

    #[test]
    fn parses_pairs_and_shorthand() {
        let p = Problem::parse(MAXENT).unwrap();
        assert_eq!(p.dim, 2);
        assert_eq!(p.operators[0].diagonal(), vec![1.0, 0.0]);
        assert_eq!(p.start, Some(Start::IdentityNormalized));
        assert_eq!(p.solver, Some(Algorithm::Qis));
        assert_eq!(p.stopping, StoppingRule::default());
    }

    #[test]
    fn round_trip_is_exact() {
        let p = Problem::parse(MAXENT).unwrap();
        let q = Problem::parse(&p.to_json()).unwrap();
        assert_eq!(p.operators, q.operators);
        assert_eq!(p.reference, q.reference);
        assert_eq!(p.start, q.start);
    }

    #[test]
    fn dimension_errors_name_the_matrix() {
        let bad = MAXENT.replace(r#""F": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]]"#, r#""F": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]], [[[1, 0]]]]"#);
        match Problem::parse(&bad).unwrap_err() {
            Error::DimensionMismatch { context, .. } => assert!(context.contains("F[1]"), "{context}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_name_the_line() {
        match Problem::parse("{\n  \"dim\": 2,\n  \"F\": [oops]\n}").unwrap_err() {
            Error::Parse { location, .. } => assert!(location.starts_with("line 3"), "{location}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let bad = MAXENT.replace(r#"[[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]]"#, r#"[[[[1, 0], [2, 0]], [[0, 0], [0, 0]]]]"#);
        assert!(matches!(Problem::parse(&bad), Err(Error::Parse { .. })));
    }
}
