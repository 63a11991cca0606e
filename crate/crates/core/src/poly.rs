//! Multivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, JetError, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::{self, Scalar};

/// A finitely supported map `MultiIndex → Scalar` in `n` variables.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<MultiIndex, Scalar>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        let mut p = Poly::zero(n);
        p.add_term(MultiIndex::zero(n), c);
        p
    }

    pub fn one(n: usize) -> Self {
        Poly::constant(n, Scalar::one())
    }

    /// The coordinate function `x_j` (0-based).
    pub fn var(n: usize, j: usize) -> Self {
        Poly::monomial(MultiIndex::unit(n, j), Scalar::one())
    }

    pub fn monomial(exp: MultiIndex, c: Scalar) -> Self {
        let mut p = Poly::zero(exp.dim());
        p.add_term(exp, c);
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (MultiIndex, Scalar)>) -> Result<Self> {
        let mut p = Poly::zero(n);
        for (e, c) in terms {
            check_dim(n, e.dim())?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &MultiIndex) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| e.order()).max()
    }

    pub fn add_term(&mut self, e: MultiIndex, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Result<Poly> {
        check_dim(self.n, o.n)?;
        let mut r = self.clone();
        r.add_assign(o);
        Ok(r)
    }

    pub fn mul(&self, o: &Poly) -> Result<Poly> {
        check_dim(self.n, o.n)?;
        Ok(self.mul_unchecked(o))
    }

    pub(crate) fn add_assign(&mut self, o: &Poly) {
        for (e, c) in &o.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub(crate) fn sub_assign(&mut self, o: &Poly) {
        for (e, c) in &o.terms {
            self.add_term(e.clone(), -c.clone());
        }
    }

    pub(crate) fn mul_unchecked(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero(self.n);
        r.add_scaled_product(&Scalar::one(), self, o);
        r
    }

    /// `self += c · a · b`
    pub(crate) fn add_scaled_product(&mut self, c: &Scalar, a: &Poly, b: &Poly) {
        if c.is_zero() {
            return;
        }
        for (ea, ca) in &a.terms {
            let cac = ca * c;
            for (eb, cb) in &b.terms {
                self.add_term(ea.add(eb), &cac * cb);
            }
        }
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.n);
        }
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Scalar::one())
    }

    /// `∂/∂x_j` (0-based `j`): `x^α ↦ α_j x^{α−e_j}`.
    pub fn partial(&self, j: usize) -> Result<Poly> {
        if j >= self.n {
            return Err(JetError::Invalid(format!("variable index {j} ≥ dimension {}", self.n)));
        }
        let mut r = Poly::zero(self.n);
        for (e, c) in &self.terms {
            if let Some(lower) = e.minus_unit(j) {
                r.add_term(lower, c * Scalar::from_integer(e.exponents()[j].into()));
            }
        }
        Ok(r)
    }

    /// `∂^α` applied to `self`.
    pub fn partial_multi(&self, alpha: &MultiIndex) -> Result<Poly> {
        check_dim(self.n, alpha.dim())?;
        let mut r = self.clone();
        for (j, &e) in alpha.exponents().iter().enumerate() {
            for _ in 0..e {
                r = r.partial(j)?;
            }
        }
        Ok(r)
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        check_dim(self.n, point.len())?;
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &p) in point.iter().zip(e.exponents()) {
                for _ in 0..p {
                    t *= x;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Drops every term of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> Poly {
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.order() <= max_degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Product truncated at `max_degree`.
    pub fn mul_truncated(&self, o: &Poly, max_degree: usize) -> Poly {
        let mut r = Poly::zero(self.n);
        for (ea, ca) in &self.terms {
            let da = ea.order();
            if da > max_degree {
                continue;
            }
            for (eb, cb) in &o.terms {
                if da + eb.order() <= max_degree {
                    r.add_term(ea.add(eb), ca * cb);
                }
            }
        }
        r
    }

    /// Re-expands the polynomial around `center`: returns `q` with `q(u) = p(center + u)`.
    pub fn shift(&self, center: &[Scalar]) -> Result<Poly> {
        check_dim(self.n, center.len())?;
        let n = self.n;
        let lins: Vec<Poly> = (0..n)
            .map(|j| {
                let mut l = Poly::var(n, j);
                l.add_term(MultiIndex::zero(n), center[j].clone());
                l
            })
            .collect();
        let mut r = Poly::zero(n);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(n, c.clone());
            for (j, &p) in e.exponents().iter().enumerate() {
                for _ in 0..p {
                    t = t.mul_unchecked(&lins[j]);
                }
            }
            r.add_assign(&t);
        }
        Ok(r)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (j, &p) in e.exponents().iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{}", j + 1)?,
                    _ => write!(f, "*x{}^{}", j + 1, p)?,
                }
            }
        }
        Ok(())
    }
}

/// JSON form of a polynomial: a sparse list of `{exponents, value}` terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    #[serde(with = "scalar::serde_scalar")]
    pub value: Scalar,
}

impl Poly {
    pub fn to_terms(&self) -> Vec<PolyTerm> {
        self.terms
            .iter()
            .map(|(e, c)| PolyTerm { exponents: e.exponents().to_vec(), value: c.clone() })
            .collect()
    }

    pub fn from_term_list(n: usize, terms: &[PolyTerm]) -> Result<Poly> {
        Poly::from_terms(
            n,
            terms.iter().map(|t| (MultiIndex::new(t.exponents.clone()), t.value.clone())),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use proptest::prelude::*;

    fn x(n: usize, j: usize) -> Poly {
        Poly::var(n, j)
    }

    #[test]
    fn square_of_one_plus_x() {
        let p = Poly::one(1).add(&x(1, 0)).unwrap();
        let sq = p.mul(&p).unwrap();
        let expected = Poly::from_terms(
            1,
            [
                (MultiIndex::new(vec![0]), int(1)),
                (MultiIndex::new(vec![1]), int(2)),
                (MultiIndex::new(vec![2]), int(1)),
            ],
        )
        .unwrap();
        assert_eq!(sq, expected);
    }

    #[test]
    fn partial_and_eval() {
        let p = Poly::monomial(MultiIndex::new(vec![2, 1]), int(1));
        let d = p.partial(0).unwrap();
        assert_eq!(d, Poly::monomial(MultiIndex::new(vec![1, 1]), int(2)));
        assert_eq!(p.eval(&[int(2), int(3)]).unwrap(), int(12));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(x(1, 0).add(&x(2, 0)).is_err());
        assert!(x(2, 0).eval(&[int(1)]).is_err());
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec((prop::collection::vec(0u32..3, n), -4i64..5), 0..5).prop_map(move |ts| {
            Poly::from_terms(n, ts.into_iter().map(|(e, c)| (MultiIndex::new(e), int(c)))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn shift_agrees_with_evaluation(p in arb_poly(2), a in -3i64..4, b in -3i64..4, u in -3i64..4, v in -3i64..4) {
            let q = p.shift(&[int(a), int(b)]).unwrap();
            prop_assert_eq!(q.eval(&[int(u), int(v)]).unwrap(), p.eval(&[int(a + u), int(b + v)]).unwrap());
        }

        #[test]
        fn leibniz_for_partials(p in arb_poly(2), q in arb_poly(2)) {
            let lhs = p.mul(&q).unwrap().partial(1).unwrap();
            let rhs = p.partial(1).unwrap().mul(&q).unwrap().add(&p.mul(&q.partial(1).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
