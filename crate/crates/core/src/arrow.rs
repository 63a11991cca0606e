//! k-arrows: k-jets of local diffeomorphisms with a source and a target.
//!
//! Arrows are handled as truncated Taylor maps in the displacement from the
//! source. Composition is truncated series substitution and inversion is a
//! fixed-point iteration on the nonlinear remainder, both exact.

use num_traits::{One, Zero};

use crate::error::{check_dim, check_order, JetError, Result};
use crate::jet::{AtPoint, FunctionJet, FunctionJetValue, VectorJet, VectorJetValue};
use crate::linalg::{determinant, inverse, Mat};
use crate::multiindex::{enumerate, JetIndex, MultiIndex};
use crate::poly::Poly;
use crate::scalar::{Point, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Arrow {
    source: Point,
    /// Slot `(i, 0)` is the target; slot `(i, α)`, `|α| ≥ 1`, is `∂^α g^i`.
    jet: VectorJetValue,
}

impl Arrow {
    /// Builds an arrow from its target and the derivative values `∂^α g^i`
    /// (`coeffs[i][p]` for the `p`-th multi-index of order `1..=k`).
    pub fn new(source: Point, target: Point, order: usize, coeffs: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = source.len();
        if n == 0 {
            return Err(JetError::ZeroDimension);
        }
        if order == 0 {
            return Err(JetError::OrderOutOfRange { requested: 0, min: 1, max: usize::MAX });
        }
        check_dim(n, target.len())?;
        check_dim(n, coeffs.len())?;
        let comps = coeffs
            .into_iter()
            .zip(&target)
            .map(|(c, t)| {
                let mut row = Vec::with_capacity(c.len() + 1);
                row.push(t.clone());
                row.extend(c);
                row
            })
            .collect();
        Arrow::from_jet(source, VectorJet::new(n, order, comps)?)
    }

    /// `jet` holds the target in its order-0 slots.
    pub fn from_jet(source: Point, jet: VectorJetValue) -> Result<Self> {
        check_dim(jet.dim(), source.len())?;
        if jet.order() == 0 {
            return Err(JetError::OrderOutOfRange { requested: 0, min: 1, max: usize::MAX });
        }
        let a = Arrow { source, jet };
        if determinant(&a.linear_part()).is_zero() {
            return Err(JetError::SingularLinearPart);
        }
        Ok(a)
    }

    pub fn identity(point: Point, order: usize) -> Result<Self> {
        let n = point.len();
        let mut jet = VectorJet::zero(n, order.max(1));
        for i in 0..n {
            jet.set_slot(i, &MultiIndex::zero(n), point[i].clone());
            jet.set_slot(i, &MultiIndex::unit(n, i), Scalar::one());
        }
        Arrow::from_jet(point, jet)
    }

    /// Arrow of the affine map `x ↦ target + A (x − source)`.
    pub fn affine(source: Point, target: Point, linear: &Mat, order: usize) -> Result<Self> {
        let n = source.len();
        check_dim(n, linear.len())?;
        let mut jet = VectorJet::zero(n, order.max(1));
        for i in 0..n {
            jet.set_slot(i, &MultiIndex::zero(n), target[i].clone());
            for j in 0..n {
                jet.set_slot(i, &MultiIndex::unit(n, j), linear[i][j].clone());
            }
        }
        Arrow::from_jet(source, jet)
    }

    /// The arrow of the polynomial map `field` at `source`.
    pub fn of_map(field: &[Poly], source: Point, order: usize) -> Result<Self> {
        let j = crate::jet::prolong_vector_field(field, order)?.at(&source)?;
        Arrow::from_jet(source, j.jet)
    }

    pub fn dim(&self) -> usize {
        self.source.len()
    }

    pub fn order(&self) -> usize {
        self.jet.order()
    }

    pub fn source(&self) -> &Point {
        &self.source
    }

    pub fn target(&self) -> Point {
        self.jet.vector_part()
    }

    pub fn jet(&self) -> &VectorJetValue {
        &self.jet
    }

    /// `∂^α g^i` for `|α| ≥ 1`.
    pub fn coeff(&self, i: usize, alpha: &MultiIndex) -> &Scalar {
        self.jet.slot(i, alpha)
    }

    /// Jacobian matrix `∂_j g^i`.
    pub fn linear_part(&self) -> Mat {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.jet.slot_at(i, j + 1).clone()).collect()).collect()
    }

    pub fn project(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.order() {
            return Err(JetError::OrderOutOfRange { requested: m, min: 1, max: self.order() });
        }
        Ok(Arrow { source: self.source.clone(), jet: self.jet.project(m)? })
    }

    /// Displacement series `u ↦ g(source + u) − target`, truncated at the arrow order.
    pub fn displacement(&self) -> Vec<Poly> {
        let n = self.dim();
        let idx = JetIndex::new(n, self.order());
        (0..n).map(|i| taylor_poly(&self.jet.comps()[i], &idx, 1)).collect()
    }

    fn from_displacement(source: Point, target: Point, disp: &[Poly], order: usize) -> Result<Self> {
        let n = source.len();
        let idx = JetIndex::new(n, order);
        let comps = disp
            .iter()
            .zip(&target)
            .map(|(p, t)| {
                let mut c = jet_values(p, &idx);
                c[0] = t.clone();
                c
            })
            .collect();
        Arrow::from_jet(source, VectorJet::new(n, order, comps)?)
    }
}

/// `Σ_{|α| ≥ from} slots[α] u^α / α!`
pub(crate) fn taylor_poly<C: AsScalar>(slots: &[C], idx: &JetIndex, from: usize) -> Poly {
    let mut p = Poly::zero(idx.n);
    for (a, s) in idx.list.iter().zip(slots) {
        if a.order() >= from {
            p.add_term(a.clone(), s.as_scalar().clone() / Scalar::from_integer(a.factorial()));
        }
    }
    p
}

/// Derivative values at `u = 0` of a polynomial in the displacement, up to `idx.k`.
pub(crate) fn jet_values(p: &Poly, idx: &JetIndex) -> Vec<Scalar> {
    idx.list.iter().map(|a| p.coeff(a) * Scalar::from_integer(a.factorial())).collect()
}

pub(crate) trait AsScalar {
    fn as_scalar(&self) -> &Scalar;
}

impl AsScalar for Scalar {
    fn as_scalar(&self) -> &Scalar {
        self
    }
}

/// `outer(inner(u))` truncated at total degree `deg`; `inner` must have no constant terms.
pub fn substitute(outer: &Poly, inner: &[Poly], deg: usize) -> Poly {
    let n_out = inner.first().map_or(outer.dim(), |p| p.dim());
    let mut powers: Vec<Vec<Poly>> = inner.iter().map(|p| vec![Poly::one(n_out), p.truncate(deg)]).collect();
    let mut out = Poly::zero(n_out);
    for (e, c) in outer.terms() {
        if e.order() > deg {
            continue;
        }
        let mut t = Poly::constant(n_out, c.clone());
        for (j, &p) in e.exponents().iter().enumerate() {
            let p = p as usize;
            while powers[j].len() <= p {
                let next = powers[j].last().unwrap().mul_truncated(&powers[j][1], deg);
                powers[j].push(next);
            }
            t = t.mul_truncated(&powers[j][p], deg);
            if t.is_zero() {
                break;
            }
        }
        out.add_assign(&t);
    }
    out
}

/// `b ∘ a`; requires `target(a) = source(b)`.
pub fn compose_arrows(b: &Arrow, a: &Arrow) -> Result<Arrow> {
    check_dim(a.dim(), b.dim())?;
    check_order(a.order(), b.order())?;
    if a.target() != *b.source() {
        return Err(JetError::ChainMismatch);
    }
    let k = a.order();
    let inner = a.displacement();
    let disp: Vec<Poly> = b.displacement().iter().map(|q| substitute(q, &inner, k)).collect();
    Arrow::from_displacement(a.source.clone(), b.target(), &disp, k)
}

/// Truncated inverse of a displacement series with invertible linear part `lin`.
fn invert_displacement(disp: &[Poly], lin: &Mat, k: usize) -> Result<Vec<Poly>> {
    let n = disp.len();
    let linv = inverse(lin).map_err(|_| JetError::SingularLinearPart)?;
    let nonlinear: Vec<Poly> = disp
        .iter()
        .map(|p| Poly::from_terms(n, p.terms().filter(|(e, _)| e.order() >= 2).map(|(e, c)| (e.clone(), c.clone()))))
        .collect::<Result<_>>()?;
    let v: Vec<Poly> = (0..n).map(|j| Poly::var(n, j)).collect();
    let apply_linv = |w: &[Poly]| -> Vec<Poly> {
        (0..n)
            .map(|i| {
                let mut acc = Poly::zero(n);
                for (j, wj) in w.iter().enumerate() {
                    acc.add_assign(&wj.scale(&linv[i][j]));
                }
                acc
            })
            .collect()
    };
    // B = L⁻¹ (v − N(B)); each pass fixes one more degree.
    let mut b = apply_linv(&v);
    for _ in 1..k {
        let rhs: Vec<Poly> = (0..n)
            .map(|i| {
                let mut r = v[i].clone();
                r.sub_assign(&substitute(&nonlinear[i], &b, k));
                r
            })
            .collect();
        b = apply_linv(&rhs);
    }
    Ok(b)
}

pub fn invert_arrow(a: &Arrow) -> Result<Arrow> {
    let k = a.order();
    let b = invert_displacement(&a.displacement(), &a.linear_part(), k)?;
    Arrow::from_displacement(a.target(), a.source.clone(), &b, k)
}

/// Pushes a `k`-jet of a vector field at `source(a)` to `target(a)` along an
/// arrow of order `k + 1`: the jet of `Dg · X ∘ g⁻¹`.
pub fn pushforward_vector_jet(a: &Arrow, x: &AtPoint<VectorJetValue>) -> Result<AtPoint<VectorJetValue>> {
    check_dim(a.dim(), x.jet.dim())?;
    if x.base != a.source {
        return Err(JetError::BasePointMismatch);
    }
    let k = x.jet.order();
    check_order(k + 1, a.order())?;
    let n = a.dim();
    let idx = JetIndex::new(n, k);
    let disp = a.displacement();
    let xs: Vec<Poly> = (0..n).map(|i| taylor_poly(&x.jet.comps()[i], &idx, 0)).collect();
    // W(u) = DA(u) X(u)
    let mut w = vec![Poly::zero(n); n];
    for (i, wi) in w.iter_mut().enumerate() {
        for (j, xj) in xs.iter().enumerate() {
            wi.add_assign(&disp[i].partial(j)?.mul_truncated(xj, k));
        }
    }
    let binv = invert_displacement(&disp, &a.linear_part(), k)?;
    let comps = w.iter().map(|wi| jet_values(&substitute(wi, &binv, k), &idx)).collect();
    Ok(AtPoint::new(a.target(), VectorJet::new(n, k, comps)?))
}

/// Transports a `k`-jet of a function at `source(a)` to `target(a)`: the jet of `f ∘ g⁻¹`.
pub fn pushforward_function_jet(a: &Arrow, f: &AtPoint<FunctionJetValue>) -> Result<AtPoint<FunctionJetValue>> {
    check_dim(a.dim(), f.jet.dim())?;
    if f.base != a.source {
        return Err(JetError::BasePointMismatch);
    }
    let k = f.jet.order();
    if k > a.order() {
        return Err(JetError::OrderMismatch { expected: a.order(), found: k });
    }
    let n = a.dim();
    let idx = JetIndex::new(n, k);
    let fp = taylor_poly(f.jet.slots(), &idx, 0);
    let binv = invert_displacement(&a.displacement(), &a.linear_part(), k.max(1))?;
    let slots = jet_values(&substitute(&fp, &binv, k), &idx);
    Ok(AtPoint::new(a.target(), FunctionJet::new(n, k, slots)?))
}

/// All multi-indices `1 ≤ |α| ≤ k`, the coefficient layout of [`Arrow::new`].
pub fn arrow_coefficient_indices(n: usize, k: usize) -> Vec<MultiIndex> {
    enumerate(n, k).into_iter().skip(1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int, origin};

    fn line(f1: i64, f2: i64, from: i64, to: i64) -> Arrow {
        Arrow::new(vec![int(from)], vec![int(to)], 2, vec![vec![int(f1), int(f2)]]).unwrap()
    }

    #[test]
    fn one_variable_chain_rule() {
        let a = line(2, 1, 0, 5);
        let b = line(3, 4, 5, 7);
        let c = compose_arrows(&b, &a).unwrap();
        assert_eq!(c.source(), &vec![int(0)]);
        assert_eq!(c.target(), vec![int(7)]);
        assert_eq!(c.coeff(0, &MultiIndex::new(vec![1])), &int(6));
        assert_eq!(c.coeff(0, &MultiIndex::new(vec![2])), &int(19));
    }

    #[test]
    fn one_variable_inverse() {
        let inv = invert_arrow(&line(2, 1, 0, 0)).unwrap();
        assert_eq!(inv.coeff(0, &MultiIndex::new(vec![1])), &frac(1, 2));
        assert_eq!(inv.coeff(0, &MultiIndex::new(vec![2])), &frac(-1, 8));
    }

    #[test]
    fn chaining_and_singularity_errors() {
        let a = line(2, 1, 0, 5);
        assert_eq!(compose_arrows(&a, &a).unwrap_err(), JetError::ChainMismatch);
        assert_eq!(
            Arrow::new(vec![int(0)], vec![int(0)], 1, vec![vec![int(0)]]).unwrap_err(),
            JetError::SingularLinearPart
        );
        assert!(a.project(0).is_err());
    }

    #[test]
    fn identity_is_neutral() {
        let id0 = Arrow::identity(vec![int(0)], 2).unwrap();
        let id5 = Arrow::identity(vec![int(5)], 2).unwrap();
        let a = line(2, 1, 0, 5);
        assert_eq!(compose_arrows(&a, &id0).unwrap(), a);
        assert_eq!(compose_arrows(&id5, &a).unwrap(), a);
        assert_eq!(invert_arrow(&id0).unwrap(), id0);
    }

    #[test]
    fn pushforward_of_tangent_vector_is_jacobian_action() {
        let lin = vec![vec![int(1), int(2)], vec![int(0), int(3)]];
        let a = Arrow::affine(origin(2), origin(2), &lin, 1).unwrap();
        let x = AtPoint::new(origin(2), VectorJet::new(2, 0, vec![vec![int(1)], vec![int(1)]]).unwrap());
        let y = pushforward_vector_jet(&a, &x).unwrap();
        assert_eq!(y.jet.vector_part(), vec![int(3), int(3)]);
    }

    #[test]
    fn pushforward_of_field_matches_classical_formula() {
        // g(x) = x + x², X = x∂ at 0. Pushed field at g(x): (1+2x)x, as a function of y = g(x).
        let a = Arrow::of_map(&[Poly::var(1, 0).add(&Poly::monomial(MultiIndex::new(vec![2]), int(1))).unwrap()], origin(1), 3)
            .unwrap();
        let x = crate::jet::prolong_vector_field(&[Poly::var(1, 0)], 2).unwrap().at(&origin(1)).unwrap();
        let z = pushforward_vector_jet(&a, &x).unwrap();
        // x(y) = y − y² + 2y³ − …, Z = x + 2x² = y + y² − 2y³ + … → derivative values (0, 1, 2).
        assert_eq!(z.jet.comps()[0], vec![int(0), int(1), int(2)]);
    }

    #[test]
    fn function_transport_of_constant() {
        let a = line(2, 1, 0, 5);
        let c = AtPoint::new(vec![int(0)], FunctionJet::new(1, 2, vec![int(3), int(0), int(0)]).unwrap());
        let t = pushforward_function_jet(&a, &c).unwrap();
        assert_eq!(t.base, vec![int(5)]);
        assert_eq!(t.jet.slots(), &[int(3), int(0), int(0)]);
    }
}
