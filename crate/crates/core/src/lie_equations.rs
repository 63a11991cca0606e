//! Linear jet equations at a base point: Killing and symplectic systems,
//! their prolongations, restricted projections, Levi-Civita extraction and
//! the anchor/isotropy exactness check.
//!
//! Structure jets are stored as derivative values at the base point; every
//! computation happens in the displacement `u = x − base`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arrow::{jet_values, pushforward_vector_jet, taylor_poly, Arrow};
use crate::error::{check_dim, check_order, JetError, Result};
use crate::jet::{prolong_vector_field, vector_fiber_dim, AtPoint, VectorJet, VectorJetSection, VectorJetValue};
use crate::linalg::{determinant, inverse, sparse_from_dense, Echelon, Mat};
use crate::multiindex::{count_upto, JetIndex, MultiIndex};
use crate::poly::Poly;
use crate::scalar::{int, serde_scalars, Point, Scalar};
use crate::spencer::{spencer_bracket, LiftPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    Metric,
    TwoForm,
}

/// Jet of a metric or a 2-form at a base point: `slots[i][j][pos(α)] = ∂^α T_ij(base)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureJet {
    kind: StructureKind,
    n: usize,
    order: usize,
    base: Point,
    slots: Vec<Vec<Vec<Scalar>>>,
}

impl StructureJet {
    pub fn new(kind: StructureKind, n: usize, order: usize, base: Point, slots: Vec<Vec<Vec<Scalar>>>) -> Result<Self> {
        if n == 0 {
            return Err(JetError::ZeroDimension);
        }
        check_dim(n, base.len())?;
        check_dim(n, slots.len())?;
        let len = count_upto(n, order);
        for row in &slots {
            check_dim(n, row.len())?;
            for s in row {
                check_dim(len, s.len())?;
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ok = match kind {
                    StructureKind::Metric => slots[i][j] == slots[j][i],
                    StructureKind::TwoForm => slots[i][j].iter().zip(&slots[j][i]).all(|(a, b)| a == &-b.clone()),
                };
                if !ok {
                    return Err(JetError::Invalid(format!("structure jet not {kind:?}-symmetric at ({i},{j})")));
                }
            }
        }
        Ok(StructureJet { kind, n, order, base, slots })
    }

    /// From polynomials in the displacement from `base`, truncated at `order`.
    pub fn from_polys(kind: StructureKind, order: usize, base: Point, polys: &[Vec<Poly>]) -> Result<Self> {
        let n = base.len();
        let idx = JetIndex::new(n, order);
        check_dim(n, polys.len())?;
        let slots = polys
            .iter()
            .map(|row| {
                check_dim(n, row.len())?;
                row.iter().map(|p| { check_dim(n, p.dim())?; Ok(jet_values(p, &idx)) }).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        StructureJet::new(kind, n, order, base, slots)
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn slots(&self) -> &[Vec<Vec<Scalar>>] {
        &self.slots
    }

    pub fn slot(&self, i: usize, j: usize, alpha: &MultiIndex) -> &Scalar {
        &self.slots[i][j][alpha.position()]
    }

    /// Order-0 matrix `T_ij(base)`.
    pub fn value(&self) -> Mat {
        (0..self.n).map(|i| (0..self.n).map(|j| self.slots[i][j][0].clone()).collect()).collect()
    }

    /// Taylor polynomial of `T_ij` in the displacement.
    pub fn component_poly(&self, i: usize, j: usize) -> Poly {
        taylor_poly(&self.slots[i][j], &JetIndex::new(self.n, self.order), 0)
    }

    /// Same jet with slots above the current order set to zero.
    pub fn zero_extend(&self, order: usize) -> Self {
        let len = count_upto(self.n, order);
        let slots = self
            .slots
            .iter()
            .map(|row| row.iter().map(|s| {
                let mut s = s.clone();
                s.resize(len, Scalar::zero());
                s
            }).collect())
            .collect();
        StructureJet { kind: self.kind, n: self.n, order: order.max(self.order), base: self.base.clone(), slots }
    }

    /// Constant identity metric.
    pub fn flat_metric(n: usize, order: usize) -> Result<Self> {
        let polys = (0..n)
            .map(|i| (0..n).map(|j| Poly::constant(n, if i == j { Scalar::one() } else { Scalar::zero() })).collect())
            .collect::<Vec<Vec<Poly>>>();
        StructureJet::from_polys(StructureKind::Metric, order, vec![Scalar::zero(); n], &polys)
    }

    /// `Σ dx_{2i} ∧ dx_{2i+1}` with constant coefficients.
    pub fn standard_symplectic(n: usize, order: usize) -> Result<Self> {
        if n % 2 == 1 {
            return Err(JetError::OddDimension(n));
        }
        let mut polys = vec![vec![Poly::zero(n); n]; n];
        for p in 0..n / 2 {
            polys[2 * p][2 * p + 1] = Poly::constant(n, int(1));
            polys[2 * p + 1][2 * p] = Poly::constant(n, int(-1));
        }
        StructureJet::from_polys(StructureKind::TwoForm, order, vec![Scalar::zero(); n], &polys)
    }

    /// Round sphere in stereographic coordinates, `4δ/(1+|x|²)²`, through order 3
    /// (Taylor part `4 − 8|x|²`).
    pub fn sphere_metric_2d(order: usize) -> Result<Self> {
        if order > 3 {
            return Err(JetError::OrderOutOfRange { requested: order, min: 0, max: 3 });
        }
        let taylor = Poly::from_terms(
            2,
            [(MultiIndex::new(vec![0, 0]), int(4)), (MultiIndex::new(vec![2, 0]), int(-8)), (MultiIndex::new(vec![0, 2]), int(-8))],
        )?;
        let polys = vec![vec![taylor.clone(), Poly::zero(2)], vec![Poly::zero(2), taylor]];
        StructureJet::from_polys(StructureKind::Metric, order, vec![Scalar::zero(); 2], &polys)
    }

    /// `g = dx₁² + (1 + x₁² + x₁³) dx₂²`, whose curvature has nonzero derivative at 0.
    pub fn generic_metric_2d(order: usize) -> Result<Self> {
        let g22 = Poly::from_terms(
            2,
            [(MultiIndex::new(vec![0, 0]), int(1)), (MultiIndex::new(vec![2, 0]), int(1)), (MultiIndex::new(vec![3, 0]), int(1))],
        )?;
        let polys = vec![vec![Poly::one(2), Poly::zero(2)], vec![Poly::zero(2), g22]];
        StructureJet::from_polys(StructureKind::Metric, order, vec![Scalar::zero(); 2], &polys)
    }

    /// `dx₁∧dx₂ + dx₃∧dx₄ + x₁ dx₂∧dx₃`; its differential is `dx₁∧dx₂∧dx₃ ≠ 0`.
    pub fn nonclosed_two_form_4d(order: usize) -> Result<Self> {
        let mut polys = vec![vec![Poly::zero(4); 4]; 4];
        let mut set = |i: usize, j: usize, p: Poly| {
            polys[j][i] = p.neg();
            polys[i][j] = p;
        };
        set(0, 1, Poly::constant(4, int(1)));
        set(2, 3, Poly::constant(4, int(1)));
        set(1, 2, Poly::var(4, 0));
        StructureJet::from_polys(StructureKind::TwoForm, order, vec![Scalar::zero(); 4], &polys)
    }

    /// Whether `dω` vanishes through the available order (two-forms only).
    pub fn is_closed(&self) -> Result<bool> {
        if self.kind != StructureKind::TwoForm {
            return Err(JetError::Invalid("closedness applies to two-forms".into()));
        }
        let n = self.n;
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    let d = self.component_poly(b, c).partial(a)?
                        .add(&self.component_poly(c, a).partial(b)?)?
                        .add(&self.component_poly(a, b).partial(c)?)?;
                    if !d.is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Linear equations on the flat `𝔤_k` fiber coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct JetEquations {
    pub n: usize,
    pub k: usize,
    pub base: Point,
    pub rows: Vec<Vec<Scalar>>,
}

impl JetEquations {
    pub fn solve(&self) -> LinearJetSubspace {
        let fiber = vector_fiber_dim(self.n, self.k);
        let null = Echelon::from_dense(fiber, &self.rows).nullspace();
        LinearJetSubspace::from_vectors(self.n, self.k, self.base.clone(), null)
    }
}

/// `Σ_c ξ^c ∂_c T_ij + T_cj ∂_i ξ^c + T_ic ∂_j ξ^c` for polynomial `ξ`.
fn lie_derivative_tensor(t: &[Vec<Poly>], xi: &[Poly], i: usize, j: usize) -> Result<Poly> {
    let n = xi.len();
    let mut acc = Poly::zero(n);
    for c in 0..n {
        acc = acc.add(&xi[c].mul(&t[i][j].partial(c)?)?)?;
        acc = acc.add(&t[c][j].mul(&xi[c].partial(i)?)?)?;
        acc = acc.add(&t[i][c].mul(&xi[c].partial(j)?)?)?;
    }
    Ok(acc)
}

/// Prolonged `L_X T = 0` through order `k − 1`, one column per fiber slot.
fn invariance_equations(t: &StructureJet, k: usize) -> Result<JetEquations> {
    if t.order < k {
        return Err(JetError::InsufficientJetOrder { have: t.order, need: k });
    }
    let n = t.n;
    let fiber = vector_fiber_dim(n, k);
    let base = t.base.clone();
    if k == 0 {
        return Ok(JetEquations { n, k, base, rows: Vec::new() });
    }
    let polys: Vec<Vec<Poly>> = (0..n).map(|i| (0..n).map(|j| t.component_poly(i, j)).collect()).collect();
    let eq_idx = JetIndex::new(n, k - 1);
    let pairs: Vec<(usize, usize)> = match t.kind {
        StructureKind::Metric => (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect(),
        StructureKind::TwoForm => (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect(),
    };
    let nrows = pairs.len() * eq_idx.list.len();
    let mut rows = vec![vec![Scalar::zero(); fiber]; nrows];
    let slot_idx = JetIndex::new(n, k);
    for s in 0..fiber {
        let (a, p) = crate::jet::unflat_slot(n, s);
        let beta = &slot_idx.list[p];
        let mut xi = vec![Poly::zero(n); n];
        xi[a] = Poly::monomial(beta.clone(), Scalar::one() / Scalar::from_integer(beta.factorial()));
        for (q, &(i, j)) in pairs.iter().enumerate() {
            let l = lie_derivative_tensor(&polys, &xi, i, j)?;
            for (g, v) in jet_values(&l, &eq_idx).into_iter().enumerate() {
                rows[q * eq_idx.list.len() + g][s] = v;
            }
        }
    }
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    Ok(JetEquations { n, k, base, rows })
}

/// Infinitesimal isometries of a metric jet at order `k`; needs the metric through order `k`.
pub fn killing_system(g: &StructureJet, k: usize) -> Result<JetEquations> {
    if g.kind != StructureKind::Metric {
        return Err(JetError::Invalid("killing_system needs a metric jet".into()));
    }
    if determinant(&g.value()).is_zero() {
        return Err(JetError::SingularStructure);
    }
    invariance_equations(g, k)
}

/// Infinitesimal symplectomorphisms of a 2-form jet at order `k`. With
/// `require_closed`, a jet with `dω ≠ 0` is rejected.
pub fn symplectic_system(w: &StructureJet, k: usize, require_closed: bool) -> Result<JetEquations> {
    if w.kind != StructureKind::TwoForm {
        return Err(JetError::Invalid("symplectic_system needs a two-form jet".into()));
    }
    if w.n % 2 == 1 {
        return Err(JetError::OddDimension(w.n));
    }
    if determinant(&w.value()).is_zero() {
        return Err(JetError::SingularStructure);
    }
    if require_closed && !w.is_closed()? {
        return Err(JetError::NotClosed("dω ≠ 0 in the supplied jet".into()));
    }
    invariance_equations(w, k)
}

/// A linear subspace of the `𝔤_k` fiber at a point, kept in reduced echelon form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearJetSubspace {
    pub n: usize,
    pub k: usize,
    #[serde(with = "serde_scalars")]
    pub base: Point,
    #[serde(serialize_with = "serialize_rows")]
    basis: Vec<Vec<Scalar>>,
}

fn serialize_rows<S: serde::Serializer>(rows: &[Vec<Scalar>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for r in rows {
        seq.serialize_element(&r.iter().map(crate::scalar::format).collect::<Vec<_>>())?;
    }
    seq.end()
}

impl LinearJetSubspace {
    pub fn from_vectors(n: usize, k: usize, base: Point, vectors: Vec<Vec<Scalar>>) -> Self {
        let fiber = vector_fiber_dim(n, k);
        let e = Echelon::from_dense(fiber, &vectors);
        LinearJetSubspace { n, k, base, basis: e.basis_rows() }
    }

    pub fn full(n: usize, k: usize, base: Point) -> Self {
        let fiber = vector_fiber_dim(n, k);
        LinearJetSubspace::from_vectors(n, k, base, (0..fiber).map(|s| crate::liealg::unit(fiber, s)).collect())
    }

    /// Span of jets at one base point.
    pub fn from_jets(base: Point, jets: &[VectorJetValue]) -> Result<Self> {
        let first = jets.first().ok_or_else(|| JetError::Invalid("no jets".into()))?;
        let (n, k) = (first.dim(), first.order());
        for j in jets {
            check_dim(n, j.dim())?;
            check_order(k, j.order())?;
        }
        Ok(LinearJetSubspace::from_vectors(n, k, base, jets.iter().map(|j| j.to_flat()).collect()))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn basis_jets(&self) -> Vec<VectorJetValue> {
        self.basis.iter().map(|v| VectorJet::from_flat(self.n, self.k, v).expect("fiber vector")).collect()
    }

    fn echelon(&self) -> Echelon {
        Echelon::from_dense(vector_fiber_dim(self.n, self.k), &self.basis)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.echelon().contains(sparse_from_dense(v))
    }

    pub fn same_span(&self, o: &Self) -> bool {
        self.n == o.n && self.k == o.k && self.basis == o.basis
    }

    /// Image under `π_{k,m}` (flat prefix of the coordinates).
    pub fn project(&self, m: usize) -> Result<Self> {
        if m > self.k {
            return Err(JetError::OrderOutOfRange { requested: m, min: 0, max: self.k });
        }
        let len = vector_fiber_dim(self.n, m);
        Ok(LinearJetSubspace::from_vectors(self.n, m, self.base.clone(), self.basis.iter().map(|v| v[..len].to_vec()).collect()))
    }

    /// Dimension of the kernel of `π_{k,m}` restricted to the subspace.
    pub fn projection_kernel_dim(&self, m: usize) -> Result<usize> {
        Ok(self.dim() - self.project(m)?.dim())
    }
}

/// Fields `ξ^c ≡ 0`: transitive along the other axes only.
pub fn intransitive_system(n: usize, k: usize, frozen: usize) -> Result<LinearJetSubspace> {
    if frozen >= n {
        return Err(JetError::DimensionMismatch { expected: n, found: frozen + 1 });
    }
    let fiber = vector_fiber_dim(n, k);
    let vectors = (0..fiber)
        .filter(|&s| crate::jet::unflat_slot(n, s).0 != frozen)
        .map(|s| crate::liealg::unit(fiber, s))
        .collect();
    Ok(LinearJetSubspace::from_vectors(n, k, vec![Scalar::zero(); n], vectors))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "system")]
pub enum SystemKind {
    Killing,
    Symplectic { require_closed: bool },
}

/// Solution spaces of a system at orders `0..=k_max`.
pub fn solution_tower(kind: SystemKind, s: &StructureJet, k_max: usize) -> Result<Vec<LinearJetSubspace>> {
    (0..=k_max)
        .map(|k| {
            Ok(match kind {
                SystemKind::Killing => killing_system(s, k)?,
                SystemKind::Symplectic { require_closed } => symplectic_system(s, k, require_closed)?,
            }
            .solve())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProlongationRow {
    pub k: usize,
    pub solution_dim: usize,
    /// `dim S_{k−1}`.
    pub lower_dim: usize,
    /// Rank of `π_{k,k−1}` restricted to `S_k`.
    pub image_dim: usize,
    /// `dim (S_k ∩ ker π_{k,k−1})`, the symbol.
    pub kernel_dim: usize,
    pub surjective: bool,
    pub bijective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProlongationReport {
    pub k_max: usize,
    pub rows: Vec<ProlongationRow>,
}

impl ProlongationReport {
    pub fn dims(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.solution_dim).collect()
    }

    /// Surjectivity of every restricted projection, the anchor included.
    pub fn all_surjective(&self) -> bool {
        self.rows.iter().all(|r| r.surjective)
    }

    /// Bijectivity of `π_{k,k−1}` for `2 ≤ k ≤ k_max`.
    pub fn bijective_from_two(&self) -> bool {
        self.rows.iter().filter(|r| r.k >= 2).all(|r| r.bijective)
    }

    pub fn row(&self, k: usize) -> Option<&ProlongationRow> {
        self.rows.iter().find(|r| r.k == k)
    }
}

/// Report rows `k = 1..` of a tower of solution spaces indexed by order from 0.
pub fn prolongation_report_of(tower: &[LinearJetSubspace]) -> Result<ProlongationReport> {
    let mut rows = Vec::new();
    for k in 1..tower.len() {
        let (s, lower) = (&tower[k], &tower[k - 1]);
        let image = s.project(k - 1)?;
        let image_dim = image.dim();
        // the image always sits inside S_{k−1}; check it rather than assume
        if !image.basis().iter().all(|v| lower.contains(v)) {
            return Err(JetError::Invalid(format!("π_{{{k},{}}}(S_{k}) ⊄ S_{}", k - 1, k - 1)));
        }
        let kernel_dim = s.dim() - image_dim;
        rows.push(ProlongationRow {
            k,
            solution_dim: s.dim(),
            lower_dim: lower.dim(),
            image_dim,
            kernel_dim,
            surjective: image_dim == lower.dim(),
            bijective: image_dim == lower.dim() && kernel_dim == 0,
        });
    }
    Ok(ProlongationReport { k_max: tower.len().saturating_sub(1), rows })
}

pub fn prolongation_report(kind: SystemKind, s: &StructureJet, k_max: usize) -> Result<ProlongationReport> {
    prolongation_report_of(&solution_tower(kind, s, k_max)?)
}

/// `Γ^i_{jk}` at the base point.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    pub n: usize,
    pub gamma: Vec<Vec<Vec<Scalar>>>,
}

fn first_derivatives(g: &StructureJet) -> Vec<Vec<Vec<Scalar>>> {
    // dg[c][i][j] = ∂_c g_ij
    (0..g.n).map(|c| (0..g.n).map(|i| (0..g.n).map(|j| g.slots[i][j][1 + c].clone()).collect()).collect()).collect()
}

/// `Γ^i_{jk} = ½ g^{ia}(∂_k g_aj + ∂_j g_ak − ∂_a g_jk)`.
pub fn levi_civita(g: &StructureJet) -> Result<Christoffel> {
    if g.kind != StructureKind::Metric {
        return Err(JetError::Invalid("levi_civita needs a metric jet".into()));
    }
    if g.order < 1 {
        return Err(JetError::InsufficientJetOrder { have: g.order, need: 1 });
    }
    let n = g.n;
    let ginv = inverse(&g.value()).map_err(|_| JetError::SingularStructure)?;
    let dg = first_derivatives(g);
    let half = Scalar::one() / int(2);
    let mut gamma = vec![vec![vec![Scalar::zero(); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = Scalar::zero();
                for a in 0..n {
                    s += &ginv[i][a] * (&dg[k][a][j] + &dg[j][a][k] - &dg[a][j][k]);
                }
                gamma[i][j][k] = &half * s;
            }
        }
    }
    Ok(Christoffel { n, gamma })
}

impl Christoffel {
    /// `∂_k g_ij = g_aj Γ^a_ik + g_ia Γ^a_jk` against the metric 1-jet.
    pub fn is_metric(&self, g: &StructureJet) -> bool {
        let n = self.n;
        let (g0, dg) = (g.value(), first_derivatives(g));
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| {
            let mut s = Scalar::zero();
            for a in 0..n {
                s += &g0[a][j] * &self.gamma[a][i][k] + &g0[i][a] * &self.gamma[a][j][k];
            }
            s == dg[k][i][j]
        })))
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.gamma[i][j][k] == self.gamma[i][k][j])))
    }
}

/// `∂_c Γ^i_{jk}` at the base point; needs the metric through order 2.
fn christoffel_derivatives(g: &StructureJet) -> Result<Vec<Vec<Vec<Vec<Scalar>>>>> {
    if g.order < 2 {
        return Err(JetError::InsufficientJetOrder { have: g.order, need: 2 });
    }
    let n = g.n;
    // differentiate the closed formula on the Taylor polynomials, using
    // ∂ g^{-1} = −g^{-1} (∂g) g^{-1} at the base point
    let ginv = inverse(&g.value()).map_err(|_| JetError::SingularStructure)?;
    let dg = first_derivatives(g);
    let second = |i: usize, j: usize, a: usize, b: usize| -> Scalar {
        let e = MultiIndex::unit(n, a).add(&MultiIndex::unit(n, b));
        g.slots[i][j][e.position()].clone()
    };
    let half = Scalar::one() / int(2);
    let mut out = vec![vec![vec![vec![Scalar::zero(); n]; n]; n]; n];
    for c in 0..n {
        let mut dginv = vec![vec![Scalar::zero(); n]; n];
        for i in 0..n {
            for a in 0..n {
                let mut s = Scalar::zero();
                for p in 0..n {
                    for q in 0..n {
                        s -= &ginv[i][p] * &dg[c][p][q] * &ginv[q][a];
                    }
                }
                dginv[i][a] = s;
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = Scalar::zero();
                    for a in 0..n {
                        let lower = &dg[k][a][j] + &dg[j][a][k] - &dg[a][j][k];
                        let dlower = second(a, j, k, c) + second(a, k, j, c) - second(j, k, a, c);
                        s += &dginv[i][a] * lower + &ginv[i][a] * dlower;
                    }
                    out[c][i][j][k] = &half * s;
                }
            }
        }
    }
    Ok(out)
}

/// Levi-Civita cross-check against the order-2 Killing solutions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeviCivitaCheck {
    pub symmetric: bool,
    pub metric: bool,
    /// `π_{2,1}` restricted to Killing solutions is bijective.
    pub projection_bijective: bool,
    /// Every order-2 Killing slot equals the value forced by `Γ`.
    pub second_order_matches: bool,
}

impl LeviCivitaCheck {
    pub fn passed(&self) -> bool {
        self.symmetric && self.metric && self.projection_bijective && self.second_order_matches
    }
}

/// Checks `ξ^i_{jk} = Γ^a_{jk} ξ^i_a − Γ^i_{ak} ξ^a_j − Γ^i_{ja} ξ^a_k − ξ^a ∂_a Γ^i_{jk}` on every
/// order-2 Killing solution, with `g` zero-extended to order 2 if needed.
pub fn levi_civita_check(g: &StructureJet) -> Result<LeviCivitaCheck> {
    let g2 = if g.order < 2 { g.zero_extend(2) } else { g.clone() };
    let n = g.n;
    let c = levi_civita(&g2)?;
    let dc = christoffel_derivatives(&g2)?;
    let s2 = killing_system(&g2, 2)?.solve();
    let s1 = killing_system(&g2, 1)?.solve();
    let image = s2.project(1)?;
    let projection_bijective = image.dim() == s1.dim() && s2.dim() == s1.dim();
    let mut matches = true;
    for x in s2.basis_jets() {
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    let mut v = Scalar::zero();
                    for a in 0..n {
                        v += &c.gamma[a][j][k] * x.slot(i, &MultiIndex::unit(n, a));
                        v -= &c.gamma[i][a][k] * x.slot(a, &MultiIndex::unit(n, j));
                        v -= &c.gamma[i][j][a] * x.slot(a, &MultiIndex::unit(n, k));
                        v -= &dc[a][i][j][k] * x.slot(a, &MultiIndex::zero(n));
                    }
                    let e = MultiIndex::unit(n, j).add(&MultiIndex::unit(n, k));
                    if x.slot(i, &e) != &v {
                        matches = false;
                    }
                }
            }
        }
    }
    Ok(LeviCivitaCheck { symmetric: c.is_symmetric(), metric: c.is_metric(&g2), projection_bijective, second_order_matches: matches })
}

/// Exactness data for `0 → isotropy → S_k → T → 0` at the base point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtiyahReport {
    pub n: usize,
    pub k: usize,
    pub solution_dim: usize,
    pub anchor_rank: usize,
    pub anchor_surjective: bool,
    /// `dim (S_k ∩ ker π_{k,0})`, computed as a nullspace.
    pub kernel_dim: usize,
    /// `kernel_dim == solution_dim − n`.
    pub kernel_identity: bool,
}

impl AtiyahReport {
    pub fn exact(&self) -> bool {
        self.anchor_surjective && self.kernel_identity
    }
}

pub fn atiyah_exactness(s: &LinearJetSubspace) -> AtiyahReport {
    let n = s.n;
    // anchor matrix: columns are the basis vectors' 𝔤_0 parts
    let anchor_rows: Vec<Vec<Scalar>> = (0..n).map(|i| s.basis().iter().map(|v| v[i].clone()).collect()).collect();
    let e = Echelon::from_dense(s.dim(), &anchor_rows);
    let anchor_rank = e.rank();
    let kernel_dim = e.nullspace().len();
    AtiyahReport {
        n,
        k: s.k,
        solution_dim: s.dim(),
        anchor_rank,
        anchor_surjective: anchor_rank == n,
        kernel_dim,
        kernel_identity: s.dim() >= n && kernel_dim == s.dim() - n,
    }
}

/// Prolonged Euclidean fields `∂_i` and `x_i ∂_j − x_j ∂_i`.
pub fn euclidean_sections(n: usize, k: usize) -> Result<Vec<VectorJetSection>> {
    let mut fields = Vec::new();
    for i in 0..n {
        let mut f = vec![Poly::zero(n); n];
        f[i] = Poly::one(n);
        fields.push(f);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut f = vec![Poly::zero(n); n];
            f[j] = Poly::var(n, i);
            f[i] = Poly::var(n, j).neg();
            fields.push(f);
        }
    }
    fields.iter().map(|f| prolong_vector_field(f, k)).collect()
}

/// Prolonged Hamiltonian fields `∂₂H ∂₁ − ∂₁H ∂₂` of the monomials of degree `1..=k+1`
/// for `dx₁ ∧ dx₂`.
pub fn hamiltonian_sections_2d(k: usize) -> Result<Vec<VectorJetSection>> {
    let mut out = Vec::new();
    for d in 1..=k + 1 {
        for e in crate::multiindex::of_order(2, d) {
            let h = Poly::monomial(e, Scalar::one());
            out.push(prolong_vector_field(&[h.partial(1)?, h.partial(0)?.neg()], k)?);
        }
    }
    Ok(out)
}

/// Pointwise membership of a polynomial section in a constant subspace:
/// every monomial coefficient vector must lie in it.
fn section_in(s: &LinearJetSubspace, x: &VectorJetSection) -> bool {
    let flat = x.to_flat();
    let mut by_mono: std::collections::BTreeMap<MultiIndex, Vec<Scalar>> = Default::default();
    for (slot, p) in flat.iter().enumerate() {
        for (m, c) in p.terms() {
            by_mono.entry(m.clone()).or_insert_with(|| vec![Scalar::zero(); flat.len()])[slot] = c.clone();
        }
    }
    let e = s.echelon();
    by_mono.into_values().all(|v| e.contains(sparse_from_dense(&v)))
}

/// Whether Spencer brackets of the given solution sections stay in the
/// (translation-invariant) solution subspace `s`.
pub fn bracket_closure_check(s: &LinearJetSubspace, sections: &[VectorJetSection]) -> Result<bool> {
    for x in sections {
        check_dim(s.n, x.dim())?;
        check_order(s.k, x.order())?;
        if !section_in(s, x) {
            return Err(JetError::Invalid("spanning section is not a solution".into()));
        }
    }
    for (a, x) in sections.iter().enumerate() {
        for y in &sections[a..] {
            if !section_in(s, &spencer_bracket(x, y, LiftPolicy::ZeroExtension)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Pushes a solution subspace at `h.source` to `h.target` with an arrow of order `k + 1`.
pub fn ad_transform_system(h: &Arrow, s: &LinearJetSubspace) -> Result<LinearJetSubspace> {
    check_dim(s.n, h.dim())?;
    check_order(s.k + 1, h.order())?;
    if h.source() != &s.base {
        return Err(JetError::BasePointMismatch);
    }
    let pushed: Vec<Vec<Scalar>> = s
        .basis_jets()
        .into_iter()
        .map(|x| Ok(pushforward_vector_jet(h, &AtPoint::new(s.base.clone(), x))?.jet.to_flat()))
        .collect::<Result<_>>()?;
    Ok(LinearJetSubspace::from_vectors(s.n, s.k, h.target(), pushed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_killing_dims() {
        for (n, d) in [(2, 3), (3, 6)] {
            let g = StructureJet::flat_metric(n, 1).unwrap();
            assert_eq!(killing_system(&g, 1).unwrap().solve().dim(), d);
        }
    }

    #[test]
    fn scaling_field_is_not_killing() {
        let g = StructureJet::flat_metric(2, 1).unwrap();
        let s = killing_system(&g, 1).unwrap().solve();
        let scaling = prolong_vector_field(&[Poly::var(2, 0), Poly::var(2, 1)], 1).unwrap().at(&[int(0), int(0)]).unwrap();
        assert!(!s.contains(&scaling.jet.to_flat()));
        let rot = prolong_vector_field(&[Poly::var(2, 1).neg(), Poly::var(2, 0)], 1).unwrap().at(&[int(0), int(0)]).unwrap();
        assert!(s.contains(&rot.jet.to_flat()));
    }

    #[test]
    fn insufficient_order_and_singular_metric() {
        let g = StructureJet::flat_metric(2, 1).unwrap();
        assert_eq!(killing_system(&g, 2).unwrap_err(), JetError::InsufficientJetOrder { have: 1, need: 2 });
        let z = StructureJet::new(StructureKind::Metric, 1, 0, vec![int(0)], vec![vec![vec![int(0)]]]).unwrap();
        assert_eq!(killing_system(&z, 0).unwrap_err(), JetError::SingularStructure);
    }

    #[test]
    fn symplectic_dims_and_closedness() {
        let w = StructureJet::standard_symplectic(2, 3).unwrap();
        let r = prolongation_report(SystemKind::Symplectic { require_closed: true }, &w, 3).unwrap();
        assert_eq!(r.dims(), vec![5, 9, 14]);
        assert!(r.all_surjective());
        let bad = StructureJet::nonclosed_two_form_4d(2).unwrap();
        assert!(!bad.is_closed().unwrap());
        assert!(matches!(symplectic_system(&bad, 1, true), Err(JetError::NotClosed(_))));
        assert_eq!(StructureJet::standard_symplectic(3, 1).unwrap_err(), JetError::OddDimension(3));
    }

    #[test]
    fn flat_levi_civita_vanishes() {
        let g = StructureJet::flat_metric(2, 2).unwrap();
        let c = levi_civita(&g).unwrap();
        assert!(c.gamma.iter().flatten().flatten().all(|x| x.is_zero()));
        assert!(levi_civita_check(&g).unwrap().passed());
    }

    #[test]
    fn atiyah_flat_and_intransitive() {
        let g = StructureJet::flat_metric(2, 1).unwrap();
        let r = atiyah_exactness(&killing_system(&g, 1).unwrap().solve());
        assert!(r.exact());
        assert_eq!(r.kernel_dim, 1);
        let bad = atiyah_exactness(&intransitive_system(2, 1, 1).unwrap());
        assert!(!bad.anchor_surjective);
    }
}
