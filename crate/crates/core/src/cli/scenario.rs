//! Scenario files: versioned JSON task descriptions with exact rationals.

use serde::{Deserialize, Serialize};

use crate::error::{JetError, Result};
use crate::jet::{VectorJet, VectorJetSection};
use crate::lie_equations::{StructureJet, StructureKind};
use crate::liealg::{BracketTerms, FiniteLieAlgebra};
use crate::linalg::Mat;
use crate::poly::{Poly, PolyTerm};
use crate::scalar::{serde_scalar, Scalar};

pub const SCHEMA_VERSION: u32 = 1;

/// An exact rational written as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rational(#[serde(with = "serde_scalar")] pub Scalar);

pub fn scalars(v: &[Rational]) -> Vec<Scalar> {
    v.iter().map(|r| r.0.clone()).collect()
}

pub fn matrix(m: &[Vec<Rational>]) -> Mat {
    m.iter().map(|r| scalars(r)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    /// Chart dimension.
    pub n: usize,
    pub task: Task,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Task {
    Identities(IdentitiesTask),
    Bracket(BracketTask),
    Forms(FormsTask),
    Prolongation(ProlongationTask),
    Klein(KleinTask),
    Extension(ExtensionTask),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesTask {
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketTask {
    pub k: usize,
    /// `x[i][pos(α)]`: polynomial slot `ξ^i_α`.
    pub x: Vec<Vec<Vec<PolyTerm>>>,
    pub y: Vec<Vec<Vec<PolyTerm>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormsTask {
    pub k: usize,
    pub r: usize,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProlongationTask {
    pub structure: StructureSpec,
    pub k_max: usize,
    pub system: SystemName,
    #[serde(default)]
    pub require_closed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KleinTask {
    pub algebra: AlgebraSpec,
    /// `fields[b][i]`: component `i` of the field realizing basis element `b`.
    pub fields: Vec<Vec<Vec<PolyTerm>>>,
    pub base: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_max: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionTask {
    pub big: AlgebraSpec,
    pub quotient: AlgebraSpec,
    /// Rows indexed by the quotient basis.
    pub projection: Vec<Vec<Rational>>,
    /// Rows indexed by the big algebra basis.
    pub section: Vec<Vec<Rational>>,
    /// Expected splitting verdict, checked when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_split: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemName {
    Killing,
    Symplectic,
}

/// A metric or 2-form given by Taylor polynomials around `base`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub kind: StructureKind,
    pub order: usize,
    pub base: Vec<Rational>,
    /// `components[i][j]`, polynomials in the displacement from `base`.
    pub components: Vec<Vec<Vec<PolyTerm>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    /// `[e_i, e_j] = Σ value · e_index`.
    pub result: Vec<BasisTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisTerm {
    pub index: usize,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub dim: usize,
    pub brackets: Vec<BracketEntry>,
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<FiniteLieAlgebra> {
        let br: Vec<(usize, usize, BracketTerms)> = self
            .brackets
            .iter()
            .map(|b| (b.i, b.j, b.result.iter().map(|t| (t.index, t.value.0.clone())).collect()))
            .collect();
        FiniteLieAlgebra::from_brackets(self.dim, &br)
    }
}

impl StructureSpec {
    pub fn build(&self, n: usize) -> Result<StructureJet> {
        let polys = self
            .components
            .iter()
            .map(|row| row.iter().map(|t| Poly::from_term_list(n, t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        StructureJet::from_polys(self.kind, self.order, scalars(&self.base), &polys)
    }
}

pub fn section_from_terms(n: usize, k: usize, comps: &[Vec<Vec<PolyTerm>>]) -> Result<VectorJetSection> {
    let comps = comps
        .iter()
        .map(|c| c.iter().map(|t| Poly::from_term_list(n, t)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    VectorJet::new(n, k, comps)
}

pub fn fields_from_terms(n: usize, fields: &[Vec<Vec<PolyTerm>>]) -> Result<Vec<Vec<Poly>>> {
    fields
        .iter()
        .map(|f| f.iter().map(|t| Poly::from_term_list(n, t)).collect::<Result<Vec<_>>>())
        .collect()
}

/// Schema or semantic problem in a scenario file, with a JSON pointer-like path.
#[derive(Debug)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "schema error at {}: {}", self.path, self.message)
    }
}

fn typed<T: serde::de::DeserializeOwned>(v: serde_json::Value, prefix: &str) -> std::result::Result<T, SchemaError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner == ".") {
            (true, _) => inner,
            (false, true) => prefix.to_string(),
            (false, false) => format!("{prefix}.{inner}"),
        };
        SchemaError { path: if path.is_empty() { ".".into() } else { path }, message: e.into_inner().to_string() }
    })
}

// The tagged task enum buffers its content, which hides the offending field;
// on failure the payload is re-read against its concrete type to locate it.
fn locate_task_error(task: &serde_json::Value) -> Option<SchemaError> {
    let mut body = task.as_object()?.clone();
    let kind = body.remove("kind")?;
    let body = serde_json::Value::Object(body);
    let err = match kind.as_str()? {
        "identities" => typed::<IdentitiesTask>(body, "task").err(),
        "bracket" => typed::<BracketTask>(body, "task").err(),
        "forms" => typed::<FormsTask>(body, "task").err(),
        "prolongation" => typed::<ProlongationTask>(body, "task").err(),
        "klein" => typed::<KleinTask>(body, "task").err(),
        "extension" => typed::<ExtensionTask>(body, "task").err(),
        _ => None,
    };
    err
}

/// Parses and version-checks a scenario.
pub fn parse_scenario(text: &str) -> std::result::Result<Scenario, SchemaError> {
    let raw: serde_json::Value =
        serde_json::from_str(text).map_err(|e| SchemaError { path: ".".into(), message: e.to_string() })?;
    let s: Scenario = typed(raw.clone(), "").map_err(|e| {
        if e.path == "task" {
            raw.get("task").and_then(locate_task_error).unwrap_or(e)
        } else {
            e
        }
    })?;
    if s.schema_version != SCHEMA_VERSION {
        return Err(SchemaError {
            path: "schema_version".into(),
            message: format!("unsupported version {} (expected {SCHEMA_VERSION})", s.schema_version),
        });
    }
    if s.n == 0 {
        return Err(SchemaError { path: "n".into(), message: JetError::ZeroDimension.to_string() });
    }
    Ok(s)
}
