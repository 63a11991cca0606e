//! Named example scenarios, each built from library constructors.

use num_traits::Zero;
use serde::Serialize;

use super::scenario::{
    AlgebraSpec, BasisTerm, BracketEntry, ExtensionTask, KleinTask, ProlongationTask, Rational, Scenario, StructureSpec,
    SystemName, Task, SCHEMA_VERSION,
};
use crate::error::{JetError, Result};
use crate::klein::{affine_line_example, build_projective_example, projective_line_example, RealizedLieAlgebra};
use crate::lie_equations::StructureJet;
use crate::liealg::FiniteLieAlgebra;
use crate::linalg::Mat;
use crate::poly::PolyTerm;
use crate::spencer::jet_group_extension;

#[derive(Clone, Debug, Serialize)]
pub struct BuiltinEntry {
    pub name: &'static str,
    pub command: &'static str,
    pub description: &'static str,
    /// The mathematical statement the example exercises.
    pub claim: &'static str,
}

pub const CATALOG: &[BuiltinEntry] = &[
    BuiltinEntry {
        name: "flat-metric-2d",
        command: "prolong",
        description: "Euclidean metric on the plane, Killing equations",
        claim: "solution dimensions stay at 3 and every restricted projection is bijective",
    },
    BuiltinEntry {
        name: "sphere-metric-2d",
        command: "prolong",
        description: "round sphere metric in stereographic chart, jets to order 3",
        claim: "constant curvature: solution dimensions (3,3,3) with surjective projections",
    },
    BuiltinEntry {
        name: "generic-metric-2d",
        command: "prolong",
        description: "metric with g22 = 1 + x1^2 + x1^3, jets to order 3",
        claim: "non-constant curvature: the order 3 to 2 projection on solutions is not surjective",
    },
    BuiltinEntry {
        name: "standard-symplectic-2d",
        command: "prolong",
        description: "standard symplectic form dx1 ^ dx2",
        claim: "closed form: the symplectic system is formally integrable",
    },
    BuiltinEntry {
        name: "nonclosed-2form-4d",
        command: "prolong",
        description: "nondegenerate 2-form on R^4 with nonzero exterior derivative",
        claim: "surjectivity at order 2 fails without closedness",
    },
    BuiltinEntry {
        name: "affine-line",
        command: "klein",
        description: "affine group of the line acting by x -> ax + b",
        claim: "Klein order 1, no ghost",
    },
    BuiltinEntry {
        name: "projective-line",
        command: "klein",
        description: "sl(2) acting on the line by fractional linear maps",
        claim: "Klein order 2, no ghost",
    },
    BuiltinEntry {
        name: "gl2-projective",
        command: "klein",
        description: "gl(2) acting on the projective line",
        claim: "Klein order 2 with a one-dimensional ghost spanned by the identity matrix",
    },
    BuiltinEntry {
        name: "jetgroup-ext-n1-k3-m2",
        command: "extension",
        description: "extension of the order-2 jet group algebra by its kernel in the order-3 one, n = 1",
        claim: "the jet group extension does not split in general",
    },
];

pub fn lookup(name: &str) -> Option<&'static BuiltinEntry> {
    CATALOG.iter().find(|e| e.name == name)
}

fn rat(s: &crate::Scalar) -> Rational {
    Rational(s.clone())
}

fn rows(m: &Mat) -> Vec<Vec<Rational>> {
    m.iter().map(|r| r.iter().map(rat).collect()).collect()
}

pub fn algebra_spec(g: &FiniteLieAlgebra) -> AlgebraSpec {
    let mut brackets = Vec::new();
    for i in 0..g.dim() {
        for j in (i + 1)..g.dim() {
            let result: Vec<BasisTerm> = g.consts()[i][j]
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(index, c)| BasisTerm { index, value: rat(c) })
                .collect();
            if !result.is_empty() {
                brackets.push(BracketEntry { i, j, result });
            }
        }
    }
    AlgebraSpec { dim: g.dim(), brackets }
}

fn structure_spec(s: &StructureJet) -> StructureSpec {
    let d = s.dim();
    StructureSpec {
        kind: s.kind(),
        order: s.order(),
        base: s.base().iter().map(rat).collect(),
        components: (0..d).map(|i| (0..d).map(|j| s.component_poly(i, j).to_terms()).collect()).collect(),
    }
}

fn prolongation(s: StructureJet, system: SystemName, require_closed: bool, k_max: usize) -> Scenario {
    Scenario {
        schema_version: SCHEMA_VERSION,
        n: s.dim(),
        task: Task::Prolongation(ProlongationTask { structure: structure_spec(&s), k_max, system, require_closed }),
    }
}

fn klein(a: RealizedLieAlgebra) -> Scenario {
    let fields: Vec<Vec<Vec<PolyTerm>>> = a.fields.iter().map(|f| f.iter().map(|p| p.to_terms()).collect()).collect();
    Scenario {
        schema_version: SCHEMA_VERSION,
        n: a.chart_dim(),
        task: Task::Klein(KleinTask {
            algebra: algebra_spec(&a.algebra),
            fields,
            base: a.base.iter().map(rat).collect(),
            depth_max: None,
        }),
    }
}

/// Options that parameterize builtins.
#[derive(Clone, Copy, Debug)]
pub struct BuiltinParams {
    pub k_max: usize,
    /// Chart dimension for the `projective` family.
    pub n: usize,
}

/// Builds the scenario for a builtin name. `projective` takes `params.n`.
pub fn scenario(name: &str, params: BuiltinParams) -> Result<Scenario> {
    let k = params.k_max;
    Ok(match name {
        "flat-metric-2d" => prolongation(StructureJet::flat_metric(2, k)?, SystemName::Killing, false, k),
        "sphere-metric-2d" => prolongation(StructureJet::sphere_metric_2d(3)?, SystemName::Killing, false, k.min(3)),
        "generic-metric-2d" => prolongation(StructureJet::generic_metric_2d(3)?, SystemName::Killing, false, k.min(3)),
        "standard-symplectic-2d" => {
            prolongation(StructureJet::standard_symplectic(2, k)?, SystemName::Symplectic, true, k)
        }
        "nonclosed-2form-4d" => {
            prolongation(StructureJet::nonclosed_two_form_4d(2)?, SystemName::Symplectic, false, k.min(2))
        }
        "affine-line" => klein(affine_line_example()?),
        "projective-line" => klein(projective_line_example()?),
        "gl2-projective" => klein(build_projective_example(1)?),
        "projective" => klein(build_projective_example(params.n)?),
        "jetgroup-ext-n1-k3-m2" => {
            let ext = jet_group_extension(1, 3, 2)?;
            Scenario {
                schema_version: SCHEMA_VERSION,
                n: 1,
                task: Task::Extension(ExtensionTask {
                    big: algebra_spec(&ext.big),
                    quotient: algebra_spec(&ext.quotient),
                    projection: rows(&ext.projection),
                    section: rows(&ext.section),
                    expect_split: Some(false),
                }),
            }
        }
        other => return Err(JetError::Invalid(format!("unknown builtin `{other}`"))),
    })
}
