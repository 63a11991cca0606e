//! Klein pairs infinitesimally: Lie algebras realized by polynomial vector
//! fields, the isotropy filtration at a base point, order and ghost, and the
//! jet map `X ↦ j_m(X*)` as a homomorphism onto the algebraic bracket.

use num_traits::Zero;
use serde::Serialize;

use crate::arrow::{pushforward_vector_jet, Arrow};
use crate::error::{check_dim, JetError, Result};
use crate::jet::{prolong_vector_field, vector_fiber_dim, AtPoint, VectorJetValue};
use crate::lie_equations::LinearJetSubspace;
use crate::liealg::FiniteLieAlgebra;
use crate::linalg::{sparse_from_dense, Echelon};
use crate::poly::Poly;
use crate::scalar::{int, Point, Scalar};
use crate::spencer::algebraic_bracket;

/// An abstract Lie algebra with a field `X_i*` for each basis element.
#[derive(Clone, Debug)]
pub struct RealizedLieAlgebra {
    pub algebra: FiniteLieAlgebra,
    pub fields: Vec<Vec<Poly>>,
    pub base: Point,
}

/// A basis pair whose realized bracket disagrees with the structure constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealizationWitness {
    pub i: usize,
    pub j: usize,
}

/// Classical bracket `[X, Y]^i = X^a ∂_a Y^i − Y^a ∂_a X^i`.
pub fn field_bracket(x: &[Poly], y: &[Poly]) -> Result<Vec<Poly>> {
    let n = x.len();
    check_dim(n, y.len())?;
    (0..n)
        .map(|i| {
            let mut acc = Poly::zero(n);
            for a in 0..n {
                acc = acc.add(&x[a].mul(&y[i].partial(a)?)?)?.add(&y[a].mul(&x[i].partial(a)?)?.neg())?;
            }
            Ok(acc)
        })
        .collect()
}

fn combine_fields(n: usize, fields: &[Vec<Poly>], coeffs: &[Scalar]) -> Vec<Poly> {
    let mut out = vec![Poly::zero(n); n];
    for (f, c) in fields.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, p) in out.iter_mut().zip(f) {
            *o = o.add(&p.scale(c)).expect("same dimension");
        }
    }
    out
}

/// First basis pair with `[X_i*, X_j*] ≠ Σ c^k_ij X_k*`, if any.
pub fn validate_realization(a: &RealizedLieAlgebra) -> Result<Option<RealizationWitness>> {
    let d = a.algebra.dim();
    check_dim(d, a.fields.len())?;
    let n = a.base.len();
    for f in &a.fields {
        check_dim(n, f.len())?;
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let lhs = field_bracket(&a.fields[i], &a.fields[j])?;
            let rhs = combine_fields(n, &a.fields, a.algebra.bracket_basis(i, j));
            if lhs != rhs {
                return Ok(Some(RealizationWitness { i, j }));
            }
        }
    }
    Ok(None)
}

impl RealizedLieAlgebra {
    /// Validated constructor.
    pub fn new(algebra: FiniteLieAlgebra, fields: Vec<Vec<Poly>>, base: Point) -> Result<Self> {
        let a = RealizedLieAlgebra { algebra, fields, base };
        if let Some(w) = validate_realization(&a)? {
            return Err(JetError::NotLieAlgebra(format!("realization fails on basis pair ({}, {})", w.i, w.j)));
        }
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn chart_dim(&self) -> usize {
        self.base.len()
    }

    /// `σ_m(X_i) = j_m(X_i*)` at the base point.
    pub fn sigma(&self, m: usize) -> Result<Vec<VectorJetValue>> {
        self.fields.iter().map(|f| Ok(prolong_vector_field(f, m)?.at(&self.base)?.jet)).collect()
    }

    /// Whether the fields span the tangent space at the base point.
    pub fn is_transitive(&self) -> Result<bool> {
        let jets = self.sigma(0)?;
        let rows: Vec<Vec<Scalar>> = jets.iter().map(|j| j.to_flat()).collect();
        Ok(Echelon::from_dense(self.chart_dim(), &rows).rank() == self.chart_dim())
    }
}

/// Dimensions of `h_k = {X : j_k(X*)_o = 0}` until stabilization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiltrationReport {
    /// `dims[k] = dim h_k`, up to and including the verifying step.
    pub dims: Vec<usize>,
    /// Least `m` with `h_m = h_{m+1}`.
    pub order: usize,
    pub ghost_dim: usize,
    #[serde(serialize_with = "serialize_rows")]
    pub ghost_basis: Vec<Vec<Scalar>>,
    pub transitive: bool,
}

fn serialize_rows<S: serde::Serializer>(rows: &[Vec<Scalar>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for r in rows {
        seq.serialize_element(&r.iter().map(crate::scalar::format).collect::<Vec<_>>())?;
    }
    seq.end()
}

/// Nullspace in abstract coordinates of `c ↦ Σ c_i jets[i]`.
fn jet_kernel(jets: &[VectorJetValue]) -> Vec<Vec<Scalar>> {
    let d = jets.len();
    let flats: Vec<Vec<Scalar>> = jets.iter().map(|j| j.to_flat()).collect();
    let len = flats.first().map_or(0, |f| f.len());
    let rows: Vec<Vec<Scalar>> = (0..len).map(|s| flats.iter().map(|f| f[s].clone()).collect()).collect();
    Echelon::from_dense(d, &rows).nullspace()
}

/// Isotropy filtration from jets `σ_k` supplied for `k = 0..=depth` by `jets_at`.
fn filtration_from(
    algebra: &FiniteLieAlgebra,
    realization_kernel: Option<Vec<Vec<Scalar>>>,
    transitive: bool,
    depth_max: usize,
    jets_at: impl Fn(usize) -> Result<Vec<VectorJetValue>>,
) -> Result<FiltrationReport> {
    let mut dims = Vec::new();
    let mut kernels = Vec::new();
    for k in 0..=depth_max {
        let ker = jet_kernel(&jets_at(k)?);
        dims.push(ker.len());
        kernels.push(ker);
        if k >= 1 && dims[k] == dims[k - 1] {
            let order = k - 1;
            let ghost = kernels[order].clone();
            if !algebra.is_ideal(&ghost) {
                return Err(JetError::Invalid("stabilized isotropy subspace is not an ideal".into()));
            }
            if let Some(rk) = realization_kernel {
                let a = Echelon::from_dense(algebra.dim(), &ghost);
                let b = Echelon::from_dense(algebra.dim(), &rk);
                if a.basis_rows() != b.basis_rows() {
                    return Err(JetError::Invalid("stabilized isotropy subspace differs from the realization kernel".into()));
                }
            }
            return Ok(FiltrationReport { dims, order, ghost_dim: ghost.len(), ghost_basis: ghost, transitive });
        }
    }
    Err(JetError::ResourceBound(format!("isotropy filtration not stabilized by depth {depth_max}")))
}

/// Abstract elements whose realized field vanishes identically.
pub fn realization_kernel(a: &RealizedLieAlgebra) -> Vec<Vec<Scalar>> {
    let d = a.dim();
    let mut keys: std::collections::BTreeMap<(usize, crate::multiindex::MultiIndex), usize> = Default::default();
    let mut cols: Vec<Vec<(usize, Scalar)>> = Vec::new();
    for f in &a.fields {
        let mut col = Vec::new();
        for (i, p) in f.iter().enumerate() {
            for (m, c) in p.terms() {
                let next = keys.len();
                let r = *keys.entry((i, m.clone())).or_insert(next);
                col.push((r, c.clone()));
            }
        }
        cols.push(col);
    }
    let mut rows = vec![vec![Scalar::zero(); d]; keys.len()];
    for (c, col) in cols.into_iter().enumerate() {
        for (r, v) in col {
            rows[r][c] = v;
        }
    }
    Echelon::from_dense(d, &rows).nullspace()
}

/// `h_k` for `k = 0, 1, …` until `h_m = h_{m+1}`; the stabilized subspace is the
/// ghost, verified to be an ideal and to equal the realization kernel.
pub fn isotropy_filtration(a: &RealizedLieAlgebra, depth_max: usize) -> Result<FiltrationReport> {
    let top = a.sigma(depth_max)?;
    filtration_from(&a.algebra, Some(realization_kernel(a)), a.is_transitive()?, depth_max, |k| {
        top.iter().map(|j| j.project(k)).collect()
    })
}

/// The filtration computed from the jets pushed by an arrow `g` (order `depth + 1`)
/// to `g.target`, for equivariance checks.
pub fn pushed_isotropy_filtration(a: &RealizedLieAlgebra, g: &Arrow, depth_max: usize) -> Result<FiltrationReport> {
    if g.source() != &a.base {
        return Err(JetError::BasePointMismatch);
    }
    let top: Vec<VectorJetValue> = a
        .sigma(depth_max)?
        .into_iter()
        .map(|j| Ok(pushforward_vector_jet(&g.project(depth_max + 1)?, &AtPoint::new(a.base.clone(), j))?.jet))
        .collect::<Result<_>>()?;
    let transitive = Echelon::from_dense(a.chart_dim(), &top.iter().map(|j| j.project(0).map(|p| p.to_flat())).collect::<Result<Vec<_>>>()?).rank()
        == a.chart_dim();
    filtration_from(&a.algebra, Some(realization_kernel(a)), transitive, depth_max, |k| top.iter().map(|j| j.project(k)).collect())
}

/// `gl(n+1)` acting on the affine chart of `ℝPⁿ`: `E_ab ↦ −v_ab` with
/// `v^i = Σ_j Z_ij x^j + Z_{i,n+1} − x^i (Σ_j Z_{n+1,j} x^j + Z_{n+1,n+1})`.
/// The sign makes the map a homomorphism for the commutator bracket.
pub fn build_projective_example(n: usize) -> Result<RealizedLieAlgebra> {
    if n == 0 {
        return Err(JetError::ZeroDimension);
    }
    let big = n + 1;
    let coord = |j: usize| if j < n { Poly::var(n, j) } else { Poly::one(n) };
    let mut fields = Vec::with_capacity(big * big);
    for a in 0..big {
        for b in 0..big {
            // Z = E_ab
            let mut v = vec![Poly::zero(n); n];
            if a < n {
                v[a] = v[a].add(&coord(b))?;
            }
            if a == n {
                let lin = coord(b);
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi = vi.add(&Poly::var(n, i).mul(&lin)?.neg())?;
                }
            }
            fields.push(v.into_iter().map(|p| p.neg()).collect());
        }
    }
    RealizedLieAlgebra::new(FiniteLieAlgebra::gl(big), fields, vec![Scalar::zero(); n])
}

/// `{∂, x∂}` on the line, `[e_0, e_1] = e_1` with `e_0 ↦ −x∂`, `e_1 ↦ ∂`.
pub fn affine_line_example() -> Result<RealizedLieAlgebra> {
    let fields = vec![vec![Poly::var(1, 0).neg()], vec![Poly::one(1)]];
    RealizedLieAlgebra::new(FiniteLieAlgebra::affine_line(), fields, vec![Scalar::zero()])
}

/// `sl(2)` on the line: `h ↦ −2x∂`, `e ↦ ∂`, `f ↦ −x²∂`.
pub fn projective_line_example() -> Result<RealizedLieAlgebra> {
    let x = Poly::var(1, 0);
    let fields = vec![vec![x.scale(&int(-2))], vec![Poly::one(1)], vec![x.mul(&x)?.neg()]];
    RealizedLieAlgebra::new(FiniteLieAlgebra::sl2(), fields, vec![Scalar::zero()])
}

/// `π_{m,m−1} σ_m[X_i, X_j] = {σ_m X_i, σ_m X_j}` for all basis pairs.
pub fn sigma_homomorphism_check(a: &RealizedLieAlgebra, m: usize) -> Result<bool> {
    if m == 0 {
        return Err(JetError::OrderOutOfRange { requested: 0, min: 1, max: usize::MAX });
    }
    let s = a.sigma(m)?;
    let d = a.dim();
    for i in 0..d {
        for j in (i + 1)..d {
            let c = a.algebra.bracket_basis(i, j);
            let mut lhs = VectorJetValue::zero(a.chart_dim(), m);
            for (k, ck) in c.iter().enumerate() {
                if !ck.is_zero() {
                    lhs = lhs.add(&s[k].scale(ck))?;
                }
            }
            if lhs.project(m - 1)? != algebraic_bracket(&s[i], &s[j])? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Rank of `σ_m` on the abstract algebra.
pub fn sigma_rank(a: &RealizedLieAlgebra, m: usize) -> Result<usize> {
    let rows: Vec<Vec<Scalar>> = a.sigma(m)?.iter().map(|j| j.to_flat()).collect();
    Ok(Echelon::from_dense(vector_fiber_dim(a.chart_dim(), m), &rows).rank())
}

/// Span of `σ_k` at the base point for `k = 0..=k_max`.
pub fn sigma_tower(a: &RealizedLieAlgebra, k_max: usize) -> Result<Vec<LinearJetSubspace>> {
    let top = a.sigma(k_max)?;
    (0..=k_max)
        .map(|k| LinearJetSubspace::from_jets(a.base.clone(), &top.iter().map(|j| j.project(k)).collect::<Result<Vec<_>>>()?))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "order", rename_all = "snake_case")]
pub enum KleinOrder {
    Stabilized(usize),
    /// No bijective step `S_{m+1} → S_m` with `m < k_max`.
    NotWithin(usize),
}

/// Least `m` with `S_{m+1} → S_m` bijective, over solution spaces indexed by order from 0.
pub fn klein_order_of_system(tower: &[LinearJetSubspace]) -> Result<KleinOrder> {
    for m in 0..tower.len().saturating_sub(1) {
        let (lo, hi) = (&tower[m], &tower[m + 1]);
        let image = hi.project(m)?;
        if image.dim() == lo.dim() && hi.dim() == lo.dim() {
            return Ok(KleinOrder::Stabilized(m));
        }
    }
    Ok(KleinOrder::NotWithin(tower.len().saturating_sub(1)))
}

/// Whether a jet lies in the span of `σ_m` (convenience for membership queries).
pub fn in_sigma_image(a: &RealizedLieAlgebra, jet: &VectorJetValue) -> Result<bool> {
    let rows: Vec<Vec<Scalar>> = a.sigma(jet.order())?.iter().map(|j| j.to_flat()).collect();
    Ok(Echelon::from_dense(jet.fiber_dim(), &rows).contains(sparse_from_dense(&jet.to_flat())))
}

/// Sign-flipped constants, for negative tests.
pub fn with_flipped_constants(a: &RealizedLieAlgebra) -> RealizedLieAlgebra {
    let d = a.dim();
    let mut c = a.algebra.consts().to_vec();
    for row in c.iter_mut().take(d) {
        for v in row.iter_mut().flatten() {
            *v = -v.clone();
        }
    }
    RealizedLieAlgebra { algebra: FiniteLieAlgebra::new(c).expect("negated constants are a Lie algebra"), fields: a.fields.clone(), base: a.base.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn realizations_validate() {
        assert!(affine_line_example().is_ok());
        assert!(projective_line_example().is_ok());
        let p = projective_line_example().unwrap();
        assert!(validate_realization(&with_flipped_constants(&p)).unwrap().is_some());
        assert!(build_projective_example(2).unwrap().is_transitive().unwrap());
    }

    #[test]
    fn filtrations() {
        let a = isotropy_filtration(&affine_line_example().unwrap(), 6).unwrap();
        assert_eq!((a.dims.clone(), a.order, a.ghost_dim), (vec![1, 0, 0], 1, 0));
        let p = isotropy_filtration(&projective_line_example().unwrap(), 6).unwrap();
        assert_eq!((p.dims.clone(), p.order, p.ghost_dim), (vec![2, 1, 0, 0], 2, 0));
        let g = isotropy_filtration(&build_projective_example(1).unwrap(), 6).unwrap();
        assert_eq!((g.dims.clone(), g.order, g.ghost_dim), (vec![3, 2, 1, 1], 2, 1));
    }

    #[test]
    fn sigma_and_orders() {
        let p = projective_line_example().unwrap();
        for m in 1..=3 {
            assert!(sigma_homomorphism_check(&p, m).unwrap());
        }
        assert_eq!(sigma_rank(&p, 2).unwrap(), 3);
        assert_eq!(klein_order_of_system(&sigma_tower(&p, 4).unwrap()).unwrap(), KleinOrder::Stabilized(2));
        let full: Vec<_> = (0..=3).map(|k| LinearJetSubspace::full(1, k, crate::scalar::origin(1))).collect();
        assert_eq!(klein_order_of_system(&full).unwrap(), KleinOrder::NotWithin(3));
    }
}
