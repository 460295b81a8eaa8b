//! JSON problem files and machine-readable reports.
//!
//! A problem file records a bracket table, a scalar product, a three-form
//! and a divergence in one JSON object with 1-based indices, so files read
//! side by side with basis notation `e_1, ..., e_n`. Loading validates every
//! structural invariant and fails with an error naming the violated one:
//! bracket antisymmetry, the Jacobi identity, closure of the three-form, or
//! degeneracy of the metric.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::einstein::{Divergence, GEProblem};
use crate::error::{Error, Result};
use crate::lie::{KForm, LieAlgebra};
use crate::metric::ScalarProduct;
use crate::search::ScanRow;

/// One structure constant: `[e_i, e_j] += c e_k`, indices 1-based, `i < j`.
/// The antisymmetric mirror entry is filled in by the loader.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

/// One three-form coefficient on `e^i ^ e^j ^ e^k`, indices 1-based,
/// `i < j < k`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FormEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub v: f64,
}

/// Divergence operator values on the basis vectors and covectors.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DeltaSpec {
    pub on_vectors: Vec<f64>,
    pub on_covectors: Vec<f64>,
}

/// On-disk problem description. `metric` is the full symmetric matrix in
/// row-major order; `tolerance` defaults to the crate-wide tolerance.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProblemFile {
    pub dim: usize,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
    pub metric: Vec<f64>,
    #[serde(default)]
    pub h_form: Vec<FormEntry>,
    pub delta: DeltaSpec,
    pub tolerance: Option<f64>,
}

fn invalid(detail: String) -> Error {
    Error::InvalidProblem { detail }
}

impl ProblemFile {
    /// Validates the file and builds the problem it describes.
    pub fn to_problem(&self) -> Result<GEProblem> {
        let n = self.dim;
        if n == 0 {
            return Err(invalid("dim must be at least 1".to_string()));
        }
        let mut entries = Vec::with_capacity(self.brackets.len());
        for (pos, b) in self.brackets.iter().enumerate() {
            for (name, index) in [("i", b.i), ("j", b.j), ("k", b.k)] {
                if index < 1 || index > n {
                    return Err(invalid(format!(
                        "brackets[{pos}].{name} = {index} is outside 1..={n}"
                    )));
                }
            }
            if b.i >= b.j {
                return Err(invalid(format!(
                    "brackets[{pos}] has i = {}, j = {}: antisymmetry admits only i < j entries, the mirror constant is implied",
                    b.i, b.j
                )));
            }
            entries.push((b.i, b.j, b.k, b.c));
        }
        let algebra = LieAlgebra::new(n, &entries)?;

        if self.metric.len() != n * n {
            return Err(invalid(format!(
                "metric has {} entries, expected {} for dim {n}",
                self.metric.len(),
                n * n
            )));
        }
        let metric = ScalarProduct::new(DMatrix::from_row_slice(n, n, &self.metric))?;

        let mut terms = Vec::with_capacity(self.h_form.len());
        for (pos, t) in self.h_form.iter().enumerate() {
            for (name, index) in [("i", t.i), ("j", t.j), ("k", t.k)] {
                if index < 1 || index > n {
                    return Err(invalid(format!(
                        "h_form[{pos}].{name} = {index} is outside 1..={n}"
                    )));
                }
            }
            if !(t.i < t.j && t.j < t.k) {
                return Err(invalid(format!(
                    "h_form[{pos}] has indices ({}, {}, {}): only i < j < k entries are accepted",
                    t.i, t.j, t.k
                )));
            }
            terms.push((vec![t.i, t.j, t.k], t.v));
        }
        let h_form = KForm::from_terms(n, 3, &terms)?;

        if self.delta.on_vectors.len() != n || self.delta.on_covectors.len() != n {
            return Err(invalid(format!(
                "delta lists have lengths {} and {}, expected {n}",
                self.delta.on_vectors.len(),
                self.delta.on_covectors.len()
            )));
        }
        let divergence = Divergence::new(
            DVector::from_row_slice(&self.delta.on_vectors),
            DVector::from_row_slice(&self.delta.on_covectors),
        );

        let tolerance = match self.tolerance {
            None => crate::DEFAULT_TOL,
            Some(t) if t.is_finite() && t > 0.0 => t,
            Some(t) => {
                return Err(invalid(format!(
                    "tolerance must be a positive real, got {t}"
                )))
            }
        };
        GEProblem::new(algebra, metric, h_form, divergence, tolerance)
    }

    /// The file describing an existing problem; loading it back yields a
    /// field-wise identical problem.
    pub fn from_problem(p: &GEProblem) -> Self {
        let n = p.dim();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let c = p.algebra.structure_constant(i, j, k);
                    if c != 0.0 {
                        brackets.push(BracketEntry {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                            c,
                        });
                    }
                }
            }
        }
        let metric = p.metric.matrix().transpose().as_slice().to_vec();
        let h_form = p
            .h_form
            .canonical_terms()
            .into_iter()
            .map(|(indices, v)| FormEntry {
                i: indices[0] + 1,
                j: indices[1] + 1,
                k: indices[2] + 1,
                v,
            })
            .collect();
        let coords = p.divergence.coords();
        ProblemFile {
            dim: n,
            brackets,
            metric,
            h_form,
            delta: DeltaSpec {
                on_vectors: coords.rows(0, n).iter().copied().collect(),
                on_covectors: coords.rows(n, n).iter().copied().collect(),
            },
            tolerance: Some(p.tolerance),
        }
    }
}

/// Parses problem JSON. Syntax errors carry the line and column.
pub fn parse_problem(text: &str) -> Result<GEProblem> {
    let file: ProblemFile = serde_json::from_str(text)?;
    file.to_problem()
}

/// Reads a problem file from a path, or directly from JSON text when the
/// argument starts with `{`. No validation beyond the JSON schema.
pub fn load_file(path_or_text: &str) -> Result<ProblemFile> {
    if path_or_text.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(path_or_text)?);
    }
    let text = std::fs::read_to_string(path_or_text)?;
    Ok(serde_json::from_str(&text)?)
}

/// Loads and validates a problem from a file path or inline JSON text.
pub fn load_problem(path_or_text: &str) -> Result<GEProblem> {
    load_file(path_or_text)?.to_problem()
}

/// Pretty-printed problem JSON.
pub fn problem_json(p: &GEProblem) -> String {
    serde_json::to_string_pretty(&ProblemFile::from_problem(p)).expect("schema serializes")
}

/// Writes the problem to a file.
pub fn save_problem(p: &GEProblem, path: &Path) -> Result<()> {
    std::fs::write(path, problem_json(p) + "\n")?;
    Ok(())
}

/// Field-wise equality of two problems: structure constants, metric,
/// three-form, divergence and tolerance.
pub fn problems_identical(a: &GEProblem, b: &GEProblem) -> bool {
    let n = a.dim();
    if n != b.dim() || a.tolerance != b.tolerance {
        return false;
    }
    for i in 0..n {
        if a.algebra.ad_basis(i) != b.algebra.ad_basis(i) {
            return false;
        }
    }
    a.metric.matrix() == b.metric.matrix()
        && a.h_form.canonical_terms() == b.h_form.canonical_terms()
        && a.divergence.coords() == b.divergence.coords()
}

/// Verification report with the stable JSON key set.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub eq1: f64,
    pub eq2: f64,
    pub eq3: f64,
    pub eq4: f64,
    pub total: f64,
    pub is_einstein: bool,
    /// `[positive, negative]` inertia of the scalar product.
    pub signature: [usize; 2],
    pub flat: bool,
    /// Dimension of the admissible divergence space, when the structure is
    /// generalised Einstein at zero divergence; `null` otherwise.
    pub div_space_dim: Option<usize>,
}

/// One scan row in report form.
#[derive(Clone, Debug, Serialize)]
pub struct ScanReportRow {
    pub params: crate::catalog::ParamMap,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Serializable scan report.
pub fn scan_report(rows: &[ScanRow]) -> Vec<ScanReportRow> {
    rows.iter()
        .map(|row| ScanReportRow {
            params: row.params.clone(),
            residual: row.residual,
            error: row.error.clone(),
        })
        .collect()
}
