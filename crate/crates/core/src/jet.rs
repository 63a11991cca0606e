//! Jets of functions and vector fields on a chart.
//!
//! A jet of order `k` stores one coefficient per multi-index `|α| ≤ k`, in the
//! graded order of [`crate::multiindex`]. Slot `α` holds the *derivative
//! value* `∂^α f`, not the Taylor coefficient `∂^α f / α!`. Sections are not
//! required to be holonomic: slot `α + e_j` need not equal `∂_j` of slot `α`.
//!
//! Coefficients are generic: [`Poly`] for sections over the chart and
//! [`Scalar`] for values at a point.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{check_dim, check_order, JetError, Result};
use crate::multiindex::{count_upto, JetIndex, MultiIndex};
use crate::poly::Poly;
use crate::scalar::{Point, Scalar};

/// Coefficient ring of a jet.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero_in(n: usize) -> Self;
    fn vanishes(&self) -> bool;
    fn from_scalar(n: usize, s: Scalar) -> Self;
    fn add_assign(&mut self, o: &Self);
    fn sub_assign(&mut self, o: &Self);
    /// `self += c · a · b`
    fn add_product(&mut self, c: &Scalar, a: &Self, b: &Self);
    fn scale(&self, s: &Scalar) -> Self;
}

impl Coeff for Scalar {
    fn zero_in(_n: usize) -> Self {
        <Scalar as Zero>::zero()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_scalar(_n: usize, s: Scalar) -> Self {
        s
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn sub_assign(&mut self, o: &Self) {
        *self -= o;
    }
    fn add_product(&mut self, c: &Scalar, a: &Self, b: &Self) {
        if !Zero::is_zero(a) && !Zero::is_zero(b) && !Zero::is_zero(c) {
            *self += c * a * b;
        }
    }
    fn scale(&self, s: &Scalar) -> Self {
        self * s
    }
}

impl Coeff for Poly {
    fn zero_in(n: usize) -> Self {
        Poly::zero(n)
    }
    fn vanishes(&self) -> bool {
        Poly::is_zero(self)
    }
    fn from_scalar(n: usize, s: Scalar) -> Self {
        Poly::constant(n, s)
    }
    fn add_assign(&mut self, o: &Self) {
        Poly::add_assign(self, o);
    }
    fn sub_assign(&mut self, o: &Self) {
        Poly::sub_assign(self, o);
    }
    fn add_product(&mut self, c: &Scalar, a: &Self, b: &Self) {
        self.add_scaled_product(c, a, b);
    }
    fn scale(&self, s: &Scalar) -> Self {
        Poly::scale(self, s)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(JetError::ZeroDimension)
    } else {
        Ok(())
    }
}

/// Number of slots of a vector jet fiber: `n · C(n+k, n)`.
pub fn vector_fiber_dim(n: usize, k: usize) -> usize {
    n * count_upto(n, k)
}

/// Flat index of the vector slot `(i, α)`: `position(α) · n + i`.
///
/// Slots of order `≤ m` form a prefix, so the `𝔤_m` fiber is a prefix of
/// the `𝔤_k` fiber.
pub fn flat_slot(n: usize, i: usize, alpha_pos: usize) -> usize {
    alpha_pos * n + i
}

/// Inverse of [`flat_slot`]: `(component, position of α)`.
pub fn unflat_slot(n: usize, s: usize) -> (usize, usize) {
    (s % n, s / n)
}

/// Jet order of the flat slot `s`.
pub fn slot_order(n: usize, s: usize, index: &JetIndex) -> usize {
    index.list[s / n].order()
}

// ---------------------------------------------------------------------------
// Function jets
// ---------------------------------------------------------------------------

/// Element of `J_k(M)` (with [`Poly`] coefficients) or of the fiber `J_k(M)_x`
/// (with [`Scalar`] coefficients).
#[derive(Clone, PartialEq)]
pub struct FunctionJet<C> {
    n: usize,
    order: usize,
    slots: Vec<C>,
}

pub type FunctionJetSection = FunctionJet<Poly>;
pub type FunctionJetValue = FunctionJet<Scalar>;

impl<C: Coeff> FunctionJet<C> {
    pub fn zero(n: usize, order: usize) -> Self {
        FunctionJet { n, order, slots: vec![C::zero_in(n); count_upto(n, order)] }
    }

    pub fn new(n: usize, order: usize, slots: Vec<C>) -> Result<Self> {
        check_n(n)?;
        check_dim(count_upto(n, order), slots.len())?;
        Ok(FunctionJet { n, order, slots })
    }

    /// `j_k(1)`, the unit of the jet algebra.
    pub fn unit(n: usize, order: usize) -> Self {
        let mut j = FunctionJet::zero(n, order);
        j.slots[0] = C::from_scalar(n, Scalar::one());
        j
    }

    /// The "smooth function" embedding: `f` in slot 0, zero elsewhere.
    pub fn smooth_function(n: usize, order: usize, f: C) -> Self {
        let mut j = FunctionJet::zero(n, order);
        j.slots[0] = f;
        j
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn slots(&self) -> &[C] {
        &self.slots
    }

    pub fn slot(&self, alpha: &MultiIndex) -> &C {
        &self.slots[alpha.position()]
    }

    pub fn slot_at(&self, pos: usize) -> &C {
        &self.slots[pos]
    }

    pub fn set_slot(&mut self, alpha: &MultiIndex, v: C) {
        let p = alpha.position();
        self.slots[p] = v;
    }

    pub(crate) fn slots_mut(&mut self) -> &mut [C] {
        &mut self.slots
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(|c| c.vanishes())
    }

    /// `f_α = 0` for `1 ≤ |α| ≤ k`.
    pub fn is_smooth_function(&self) -> bool {
        self.slots[1..].iter().all(|c| c.vanishes())
    }

    /// `π_{k,m}`: drops all slots with `|α| > m`.
    pub fn project(&self, m: usize) -> Result<Self> {
        if m > self.order {
            return Err(JetError::OrderOutOfRange { requested: m, min: 0, max: self.order });
        }
        Ok(FunctionJet { n: self.n, order: m, slots: self.slots[..count_upto(self.n, m)].to_vec() })
    }

    /// Lift to a higher order with zero top slots.
    pub fn lift_zero(&self, order: usize) -> Self {
        let mut slots = self.slots.clone();
        slots.resize(count_upto(self.n, order.max(self.order)), C::zero_in(self.n));
        FunctionJet { n: self.n, order: order.max(self.order), slots }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let mut r = self.clone();
        for (a, b) in r.slots.iter_mut().zip(&o.slots) {
            a.add_assign(b);
        }
        Ok(r)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let mut r = self.clone();
        for (a, b) in r.slots.iter_mut().zip(&o.slots) {
            a.sub_assign(b);
        }
        Ok(r)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        FunctionJet { n: self.n, order: self.order, slots: self.slots.iter().map(|c| c.scale(s)).collect() }
    }

    /// Module multiplication by a coefficient (a smooth function acting slotwise).
    pub fn mul_coeff(&self, f: &C) -> Self {
        let slots = self
            .slots
            .iter()
            .map(|c| {
                let mut r = C::zero_in(self.n);
                r.add_product(&Scalar::one(), f, c);
                r
            })
            .collect();
        FunctionJet { n: self.n, order: self.order, slots }
    }

    fn compatible(&self, o: &Self) -> Result<()> {
        check_dim(self.n, o.n)?;
        check_order(self.order, o.order)
    }

    /// The jet-algebra product `•`: `(f•g)_α = Σ_{β≤α} C(α,β) f_β g_{α−β}`.
    pub fn product(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let idx = JetIndex::new(self.n, self.order);
        let mut out = FunctionJet::zero(self.n, self.order);
        for (p, splits) in idx.splits.iter().enumerate() {
            let acc: &mut C = &mut out.slots[p];
            for (b, rest, c) in splits {
                acc.add_product(c, &self.slots[*b], &o.slots[*rest]);
            }
        }
        Ok(out)
    }
}

impl FunctionJet<Poly> {
    /// Evaluates every slot at `point`.
    pub fn at(&self, point: &[Scalar]) -> Result<AtPoint<FunctionJetValue>> {
        let slots = self.slots.iter().map(|p| p.eval(point)).collect::<Result<_>>()?;
        Ok(AtPoint { base: point.to_vec(), jet: FunctionJet { n: self.n, order: self.order, slots } })
    }

    /// Checks `f_{α+e_j} = ∂_j f_α` for `|α| ≤ k−1`; returns the first violation `(α, j)`.
    pub fn holonomy_defect(&self) -> Result<Option<(MultiIndex, usize)>> {
        if self.order == 0 {
            return Err(JetError::OrderOutOfRange { requested: 0, min: 1, max: usize::MAX });
        }
        let idx = JetIndex::new(self.n, self.order - 1);
        for (p, a) in idx.list.iter().enumerate() {
            for j in 0..self.n {
                if self.slots[idx.plus[j][p]] != self.slots[p].partial(j)? {
                    return Ok(Some((a.clone(), j)));
                }
            }
        }
        Ok(None)
    }

    pub fn is_holonomic(&self) -> Result<bool> {
        Ok(self.holonomy_defect()?.is_none())
    }
}

impl FunctionJet<Scalar> {
    pub fn to_sections(&self) -> FunctionJetSection {
        FunctionJet {
            n: self.n,
            order: self.order,
            slots: self.slots.iter().map(|s| Poly::constant(self.n, s.clone())).collect(),
        }
    }
}

impl<C: fmt::Debug> fmt::Debug for FunctionJet<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FunctionJet(n={}, k={}) {:?}", self.n, self.order, self.slots)
    }
}

/// `j_k(f)`: slots `∂^α f`.
pub fn prolong_function(f: &Poly, order: usize) -> Result<FunctionJetSection> {
    let n = f.dim();
    check_n(n)?;
    let idx = JetIndex::new(n, order);
    let mut slots = Vec::with_capacity(idx.len());
    for a in &idx.list {
        slots.push(f.partial_multi(a)?);
    }
    FunctionJet::new(n, order, slots)
}

// ---------------------------------------------------------------------------
// Vector jets
// ---------------------------------------------------------------------------

/// Element of `𝔤_k(M) = J_k(T(M))` (sections) or of its fiber at a point.
#[derive(Clone, PartialEq)]
pub struct VectorJet<C> {
    n: usize,
    order: usize,
    /// `comps[i][pos(α)] = ξ^i_α`
    comps: Vec<Vec<C>>,
}

pub type VectorJetSection = VectorJet<Poly>;
pub type VectorJetValue = VectorJet<Scalar>;

impl<C: Coeff> VectorJet<C> {
    pub fn zero(n: usize, order: usize) -> Self {
        VectorJet { n, order, comps: vec![vec![C::zero_in(n); count_upto(n, order)]; n] }
    }

    pub fn new(n: usize, order: usize, comps: Vec<Vec<C>>) -> Result<Self> {
        check_n(n)?;
        check_dim(n, comps.len())?;
        for c in &comps {
            check_dim(count_upto(n, order), c.len())?;
        }
        Ok(VectorJet { n, order, comps })
    }

    /// Builds a jet from its flat slot vector (see [`flat_slot`]).
    pub fn from_flat(n: usize, order: usize, flat: &[C]) -> Result<Self> {
        check_n(n)?;
        check_dim(vector_fiber_dim(n, order), flat.len())?;
        let m = count_upto(n, order);
        let comps = (0..n).map(|i| (0..m).map(|p| flat[flat_slot(n, i, p)].clone()).collect()).collect();
        Ok(VectorJet { n, order, comps })
    }

    pub fn to_flat(&self) -> Vec<C> {
        let m = count_upto(self.n, self.order);
        let mut out = Vec::with_capacity(self.n * m);
        for p in 0..m {
            for i in 0..self.n {
                out.push(self.comps[i][p].clone());
            }
        }
        out
    }

    /// The section that is `1` in flat slot `s` and `0` elsewhere.
    pub fn basis(n: usize, order: usize, s: usize) -> Self {
        let mut v = VectorJet::zero(n, order);
        let (i, p) = unflat_slot(n, s);
        v.comps[i][p] = C::from_scalar(n, Scalar::one());
        v
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn fiber_dim(&self) -> usize {
        vector_fiber_dim(self.n, self.order)
    }

    pub fn comps(&self) -> &[Vec<C>] {
        &self.comps
    }

    /// `ξ^i_α` (0-based `i`).
    pub fn slot(&self, i: usize, alpha: &MultiIndex) -> &C {
        &self.comps[i][alpha.position()]
    }

    pub fn slot_at(&self, i: usize, pos: usize) -> &C {
        &self.comps[i][pos]
    }

    pub fn set_slot(&mut self, i: usize, alpha: &MultiIndex, v: C) {
        let p = alpha.position();
        self.comps[i][p] = v;
    }

    pub(crate) fn set_slot_at(&mut self, i: usize, pos: usize, v: C) {
        self.comps[i][pos] = v;
    }

    pub(crate) fn comps_mut(&mut self) -> &mut [Vec<C>] {
        &mut self.comps
    }

    /// Component `i` as a function jet.
    pub fn component(&self, i: usize) -> FunctionJet<C> {
        FunctionJet { n: self.n, order: self.order, slots: self.comps[i].clone() }
    }

    pub fn from_components(comps: Vec<FunctionJet<C>>) -> Result<Self> {
        let n = comps.len();
        check_n(n)?;
        let order = comps[0].order;
        for c in &comps {
            check_dim(n, c.n)?;
            check_order(order, c.order)?;
        }
        Ok(VectorJet { n, order, comps: comps.into_iter().map(|c| c.slots).collect() })
    }

    /// The underlying vector `ξ^i_0` (the `π_{k,0}` projection).
    pub fn vector_part(&self) -> Vec<C> {
        self.comps.iter().map(|c| c[0].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|x| x.vanishes()))
    }

    pub fn project(&self, m: usize) -> Result<Self> {
        if m > self.order {
            return Err(JetError::OrderOutOfRange { requested: m, min: 0, max: self.order });
        }
        let len = count_upto(self.n, m);
        Ok(VectorJet { n: self.n, order: m, comps: self.comps.iter().map(|c| c[..len].to_vec()).collect() })
    }

    pub fn lift_zero(&self, order: usize) -> Self {
        let order = order.max(self.order);
        let len = count_upto(self.n, order);
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.resize(len, C::zero_in(self.n));
                c
            })
            .collect();
        VectorJet { n: self.n, order, comps }
    }

    fn compatible(&self, o: &Self) -> Result<()> {
        check_dim(self.n, o.n)?;
        check_order(self.order, o.order)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let mut r = self.clone();
        for (a, b) in r.comps.iter_mut().zip(&o.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                x.add_assign(y);
            }
        }
        Ok(r)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let mut r = self.clone();
        for (a, b) in r.comps.iter_mut().zip(&o.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                x.sub_assign(y);
            }
        }
        Ok(r)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        VectorJet {
            n: self.n,
            order: self.order,
            comps: self.comps.iter().map(|c| c.iter().map(|x| x.scale(s)).collect()).collect(),
        }
    }

    /// Module multiplication by a coefficient (slotwise).
    pub fn mul_coeff(&self, f: &C) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| {
                c.iter()
                    .map(|x| {
                        let mut r = C::zero_in(self.n);
                        r.add_product(&Scalar::one(), f, x);
                        r
                    })
                    .collect()
            })
            .collect();
        VectorJet { n: self.n, order: self.order, comps }
    }
}

impl VectorJet<Poly> {
    pub fn at(&self, point: &[Scalar]) -> Result<AtPoint<VectorJetValue>> {
        check_dim(self.n, point.len())?;
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().map(|p| p.eval(point)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(AtPoint { base: point.to_vec(), jet: VectorJet { n: self.n, order: self.order, comps } })
    }

    pub fn holonomy_defect(&self) -> Result<Option<(usize, MultiIndex, usize)>> {
        for i in 0..self.n {
            if let Some((a, j)) = self.component(i).holonomy_defect()? {
                return Ok(Some((i, a, j)));
            }
        }
        Ok(None)
    }

    pub fn is_holonomic(&self) -> Result<bool> {
        Ok(self.holonomy_defect()?.is_none())
    }
}

impl VectorJet<Scalar> {
    /// The constant section with these fiber values.
    pub fn to_sections(&self) -> VectorJetSection {
        VectorJet {
            n: self.n,
            order: self.order,
            comps: self
                .comps
                .iter()
                .map(|c| c.iter().map(|s| Poly::constant(self.n, s.clone())).collect())
                .collect(),
        }
    }
}

impl<C: fmt::Debug> fmt::Debug for VectorJet<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorJet(n={}, k={}) {:?}", self.n, self.order, self.comps)
    }
}

/// `j_k(X)`: slots `ξ^i_α = ∂^α ξ^i`.
pub fn prolong_vector_field(field: &[Poly], order: usize) -> Result<VectorJetSection> {
    let n = field.len();
    check_n(n)?;
    let comps = field
        .iter()
        .map(|xi| {
            check_dim(n, xi.dim())?;
            Ok(prolong_function(xi, order)?.slots)
        })
        .collect::<Result<_>>()?;
    VectorJet::new(n, order, comps)
}

/// A jet value together with its base point (an element of `J_k(M)_x` or `𝔤_k(M)_x`).
#[derive(Clone, Debug, PartialEq)]
pub struct AtPoint<J> {
    pub base: Point,
    pub jet: J,
}

impl<J> AtPoint<J> {
    pub fn new(base: Point, jet: J) -> Self {
        AtPoint { base, jet }
    }

    pub(crate) fn same_base<K>(&self, o: &AtPoint<K>) -> Result<()> {
        if self.base == o.base {
            Ok(())
        } else {
            Err(JetError::BasePointMismatch)
        }
    }
}

impl AtPoint<VectorJetValue> {
    pub fn project(&self, m: usize) -> Result<Self> {
        Ok(AtPoint { base: self.base.clone(), jet: self.jet.project(m)? })
    }
}

impl AtPoint<FunctionJetValue> {
    pub fn project(&self, m: usize) -> Result<Self> {
        Ok(AtPoint { base: self.base.clone(), jet: self.jet.project(m)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn mono(e: &[u32], c: i64) -> Poly {
        Poly::monomial(MultiIndex::new(e.to_vec()), int(c))
    }

    #[test]
    fn prolong_x_squared() {
        let j = prolong_function(&mono(&[2], 1), 2).unwrap();
        assert_eq!(j.slots(), &[mono(&[2], 1), mono(&[1], 2), mono(&[0], 2)]);
    }

    #[test]
    fn prolong_constant_and_product_monomial() {
        let c = prolong_function(&Poly::constant(2, int(5)), 3).unwrap();
        assert_eq!(c.slot_at(0), &Poly::constant(2, int(5)));
        assert!(c.slots()[1..].iter().all(|p| p.is_zero()));

        let j = prolong_function(&mono(&[1, 1], 1), 2).unwrap();
        assert_eq!(j.slot(&MultiIndex::new(vec![1, 1])), &Poly::one(2));
        assert_eq!(j.slot(&MultiIndex::unit(2, 0)), &mono(&[0, 1], 1));
        assert_eq!(j.slot(&MultiIndex::unit(2, 1)), &mono(&[1, 0], 1));
    }

    #[test]
    fn prolong_vector_fields() {
        let d1 = prolong_vector_field(&[Poly::one(2), Poly::zero(2)], 2).unwrap();
        let nonzero: Vec<_> = d1.to_flat().into_iter().enumerate().filter(|(_, p)| !p.is_zero()).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].0, 0);

        let xd = prolong_vector_field(&[mono(&[1], 1)], 1).unwrap();
        assert_eq!(xd.slot_at(0, 0), &mono(&[1], 1));
        assert_eq!(xd.slot_at(0, 1), &Poly::one(1));
    }

    #[test]
    fn product_of_prolongations_is_prolongation_of_product() {
        let f = Poly::one(1).add(&mono(&[1], 1)).unwrap();
        let jf = prolong_function(&f, 2).unwrap();
        let sq = jf.product(&jf).unwrap();
        let expected = prolong_function(&f.mul(&f).unwrap(), 2).unwrap();
        assert_eq!(sq, expected);
        assert_eq!(sq.slot_at(1), &Poly::constant(1, int(2)).add(&mono(&[1], 2)).unwrap());
        assert_eq!(sq.slot_at(2), &Poly::constant(1, int(2)));
    }

    #[test]
    fn unit_and_smooth_function_product() {
        let f = prolong_function(&mono(&[2, 1], 3), 2).unwrap();
        assert_eq!(f.product(&FunctionJet::unit(2, 2)).unwrap(), f);
        let s = FunctionJet::smooth_function(2, 2, mono(&[0, 1], 2));
        let p = s.product(&f).unwrap();
        assert_eq!(p, f.mul_coeff(&mono(&[0, 1], 2)));
    }

    #[test]
    fn holonomy() {
        assert!(prolong_function(&mono(&[3], 1), 3).unwrap().is_holonomic().unwrap());
        let bad = FunctionJet::new(1, 1, vec![Poly::zero(1), Poly::one(1)]).unwrap();
        assert_eq!(bad.holonomy_defect().unwrap(), Some((MultiIndex::zero(1), 0)));
        assert!(FunctionJet::<Poly>::zero(1, 0).is_holonomic().is_err());
    }

    #[test]
    fn projection_tower_and_range() {
        let x = prolong_vector_field(&[mono(&[2, 1], 1), mono(&[0, 3], 2)], 3).unwrap();
        assert_eq!(x.project(3).unwrap(), x);
        assert_eq!(x.project(2).unwrap().project(1).unwrap(), x.project(1).unwrap());
        assert_eq!(x.project(0).unwrap().vector_part(), vec![mono(&[2, 1], 1), mono(&[0, 3], 2)]);
        assert!(x.project(4).is_err());
    }

    #[test]
    fn zero_dimension_rejected() {
        assert_eq!(prolong_vector_field(&[], 1).unwrap_err(), JetError::ZeroDimension);
        assert!(FunctionJet::<Scalar>::new(0, 1, vec![]).is_err());
    }

    #[test]
    fn flat_round_trip() {
        let x = prolong_vector_field(&[mono(&[1, 1], 1), mono(&[2, 0], 2)], 2).unwrap();
        assert_eq!(VectorJet::from_flat(2, 2, &x.to_flat()).unwrap(), x);
    }
}
