//! `(k, r)`-forms: alternating `r`-linear maps on the `𝔤_k` fiber with values
//! in the `J_k` fiber, their exterior derivative, wedge product, Lie
//! derivative and interior product, filtrations, and the structure algebra
//! `Θ` of a family of vector jets.
//!
//! Normalizations: `d` carries the factor `1/(r+1)`, `i_Y` on `r`-forms the
//! factor `r`, and the wedge product `1/(r+s)!` in front of the full
//! alternation. With these, `L_Y = d i_Y + i_Y d` holds on the nose.
//!
//! Tensorial operators are computed on constant basis sections `E_s` of
//! `𝔤_k`; [`d_on_sections`] evaluates the defining formula on arbitrary
//! sections so that this shortcut can be checked.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arrow::{invert_arrow, pushforward_function_jet, pushforward_vector_jet, Arrow};
use crate::error::{check_dim, check_order, JetError, Result};
use crate::jet::{
    slot_order, unflat_slot, vector_fiber_dim, AtPoint, Coeff, FunctionJet, FunctionJetSection, FunctionJetValue,
    VectorJet, VectorJetSection, VectorJetValue,
};
use crate::liealg::{increasing_tuples, sort_with_sign};
use crate::linalg::{Echelon, SparseRow};
use crate::multiindex::{count_upto, enumerate, JetIndex, MultiIndex};
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::spencer::{basis_action, basis_bracket, jet_action, spencer_bracket, LiftPolicy};

/// Alternating form on the `𝔤_k` fiber. Coefficients are stored on strictly
/// increasing tuples of flat fiber slots; absent tuples are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct FormKR<C> {
    n: usize,
    k: usize,
    r: usize,
    coeffs: BTreeMap<Vec<usize>, FunctionJet<C>>,
}

pub type FormSection = FormKR<Poly>;
pub type FormValue = FormKR<Scalar>;

fn sign_scalar(sign: i32) -> Scalar {
    if sign > 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

impl<C: Coeff> FormKR<C> {
    pub fn zero(n: usize, k: usize, r: usize) -> Self {
        FormKR { n, k, r, coeffs: BTreeMap::new() }
    }

    /// Builds a form from `(tuple, value)` pairs. Tuples may be in any order;
    /// the alternating sign is applied and repeated slots are rejected.
    pub fn from_entries(n: usize, k: usize, r: usize, entries: Vec<(Vec<usize>, FunctionJet<C>)>) -> Result<Self> {
        if n == 0 {
            return Err(JetError::ZeroDimension);
        }
        let fiber = vector_fiber_dim(n, k);
        if r > fiber {
            return Err(JetError::DegreeOverflow { degree: r, max: fiber });
        }
        let mut f = FormKR::zero(n, k, r);
        for (t, v) in entries {
            check_dim(r, t.len())?;
            check_dim(n, v.dim())?;
            check_order(k, v.order())?;
            if t.iter().any(|&s| s >= fiber) {
                return Err(JetError::Invalid(format!("slot index out of range in {t:?}")));
            }
            let (sorted, sign) =
                sort_with_sign(&t).ok_or_else(|| JetError::Invalid(format!("repeated slot in {t:?}")))?;
            f.add_to(sorted, &v.scale(&sign_scalar(sign)));
        }
        Ok(f)
    }

    /// Degree-0 form: a single value.
    pub fn function(f: FunctionJet<C>) -> Self {
        let mut w = FormKR::zero(f.dim(), f.order(), 0);
        w.add_to(Vec::new(), &f);
        w
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> usize {
        self.r
    }

    pub fn fiber_dim(&self) -> usize {
        vector_fiber_dim(self.n, self.k)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &FunctionJet<C>)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient on an increasing tuple.
    pub fn coeff(&self, t: &[usize]) -> Option<&FunctionJet<C>> {
        self.coeffs.get(t)
    }

    /// `ω(E_{t_1}, …, E_{t_r})` for an arbitrary tuple.
    pub fn value(&self, t: &[usize]) -> FunctionJet<C> {
        match sort_with_sign(t) {
            Some((s, sign)) => match self.coeffs.get(&s) {
                Some(v) if sign > 0 => v.clone(),
                Some(v) => v.scale(&sign_scalar(sign)),
                None => FunctionJet::zero(self.n, self.k),
            },
            None => FunctionJet::zero(self.n, self.k),
        }
    }

    fn add_to(&mut self, t: Vec<usize>, v: &FunctionJet<C>) {
        if v.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&t) {
            Some(cur) => {
                *cur = cur.add(v).expect("same shape");
                if cur.is_zero() {
                    self.coeffs.remove(&t);
                }
            }
            None => {
                self.coeffs.insert(t, v.clone());
            }
        }
    }

    fn compatible(&self, o: &Self) -> Result<()> {
        check_dim(self.n, o.n)?;
        check_order(self.k, o.k)?;
        if self.r != o.r {
            return Err(JetError::Arity { expected: self.r, found: o.r });
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let mut out = self.clone();
        for (t, v) in &o.coeffs {
            out.add_to(t.clone(), v);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&-Scalar::one()))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return FormKR::zero(self.n, self.k, self.r);
        }
        FormKR { n: self.n, k: self.k, r: self.r, coeffs: self.coeffs.iter().map(|(t, v)| (t.clone(), v.scale(s))).collect() }
    }

    /// Pointwise evaluation: `Σ_S det[X_a(S_b)] ω_S`.
    pub fn eval(&self, args: &[VectorJet<C>]) -> Result<FunctionJet<C>> {
        if args.len() != self.r {
            return Err(JetError::Arity { expected: self.r, found: args.len() });
        }
        for a in args {
            check_dim(self.n, a.dim())?;
            check_order(self.k, a.order())?;
        }
        let flats: Vec<Vec<C>> = args.iter().map(|a| a.to_flat()).collect();
        let perms = permutations(self.r);
        let mut out = FunctionJet::zero(self.n, self.k);
        for (t, v) in &self.coeffs {
            let mut det = C::zero_in(self.n);
            for (perm, sign) in &perms {
                let mut prod = C::from_scalar(self.n, sign_scalar(*sign));
                for (a, &b) in perm.iter().enumerate() {
                    let x = &flats[a][t[b]];
                    if x.vanishes() {
                        prod = C::zero_in(self.n);
                        break;
                    }
                    let mut next = C::zero_in(self.n);
                    next.add_product(&Scalar::one(), &prod, x);
                    prod = next;
                }
                det.add_assign(&prod);
            }
            if !det.vanishes() {
                out = out.add(&v.mul_coeff(&det))?;
            }
        }
        Ok(out)
    }
}

/// All permutations of `0..r` with their signs.
fn permutations(r: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; r], &mut out);
    out.into_iter()
        .map(|p| {
            let mut inv = 0;
            for i in 0..r {
                for j in (i + 1)..r {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            (p, if inv % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

impl FormKR<Poly> {
    pub fn at(&self, point: &[Scalar]) -> Result<AtPoint<FormValue>> {
        let mut out = FormKR::zero(self.n, self.k, self.r);
        for (t, v) in &self.coeffs {
            out.add_to(t.clone(), &v.at(point)?.jet);
        }
        Ok(AtPoint::new(point.to_vec(), out))
    }
}

impl FormKR<Scalar> {
    pub fn to_sections(&self) -> FormSection {
        FormKR {
            n: self.n,
            k: self.k,
            r: self.r,
            coeffs: self.coeffs.iter().map(|(t, v)| (t.clone(), v.to_sections())).collect(),
        }
    }
}

pub fn eval_form<C: Coeff>(w: &FormKR<C>, args: &[VectorJet<C>]) -> Result<FunctionJet<C>> {
    w.eval(args)
}

/// Spencer brackets of constant basis sections, cached per `(n, k)`.
pub struct BasisBrackets {
    n: usize,
    k: usize,
    /// `table[s][t]` = sparse flat coordinates of `[E_s, E_t]` (constant).
    table: Vec<Vec<Vec<(usize, Scalar)>>>,
}

impl BasisBrackets {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let fiber = vector_fiber_dim(n, k);
        let mut table = vec![vec![Vec::new(); fiber]; fiber];
        for s in 0..fiber {
            for t in (s + 1)..fiber {
                let b = basis_bracket(n, k, s, t)?;
                let sparse: Vec<(usize, Scalar)> =
                    b.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
                table[t][s] = sparse.iter().map(|(i, x)| (*i, -x.clone())).collect();
                table[s][t] = sparse;
            }
        }
        Ok(BasisBrackets { n, k, table })
    }
}

fn without(t: &[usize], skip: &[usize]) -> Vec<usize> {
    t.iter().enumerate().filter(|(q, _)| !skip.contains(q)).map(|(_, x)| *x).collect()
}

fn parity(i: usize) -> Scalar {
    if i.is_multiple_of(2) {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// `dω` with a precomputed bracket table and no degree truncation.
pub fn exterior_derivative_with(ctx: &BasisBrackets, w: &FormSection) -> Result<FormSection> {
    check_dim(ctx.n, w.n)?;
    check_order(ctx.k, w.k)?;
    let (n, k, r) = (w.n, w.k, w.r);
    // above the fiber dimension the space of forms is zero and the loop is empty
    let fiber = vector_fiber_dim(n, k);
    let norm = Scalar::one() / Scalar::from_integer((r as i64 + 1).into());
    let mut out = FormKR::zero(n, k, r + 1);
    for t in increasing_tuples(fiber, r + 1) {
        let mut acc: FunctionJetSection = FunctionJet::zero(n, k);
        for i in 0..=r {
            let rest = without(&t, &[i]);
            if let Some(v) = w.coeffs.get(&rest) {
                acc = acc.add(&basis_action(n, t[i], v)?.scale(&parity(i)))?;
            }
        }
        for i in 0..=r {
            for j in (i + 1)..=r {
                let rest = without(&t, &[i, j]);
                for (s, c) in &ctx.table[t[i]][t[j]] {
                    let mut tuple = vec![*s];
                    tuple.extend(&rest);
                    let v = w.value(&tuple);
                    if !v.is_zero() {
                        acc = acc.add(&v.scale(&(c * parity(i + j))))?;
                    }
                }
            }
        }
        out.add_to(t, &acc.scale(&norm));
    }
    Ok(out)
}

/// `dω` on the complex truncated at degree `n`: `r ≥ n` is rejected.
pub fn exterior_derivative(w: &FormSection) -> Result<FormSection> {
    if w.r >= w.n {
        return Err(JetError::DegreeOverflow { degree: w.r + 1, max: w.n });
    }
    exterior_derivative_full(w)
}

/// `dω` without the degree-`n` truncation; zero once `r + 1` exceeds the fiber dimension.
pub fn exterior_derivative_full(w: &FormSection) -> Result<FormSection> {
    exterior_derivative_with(&BasisBrackets::new(w.n, w.k)?, w)
}

/// The defining formula of `d` evaluated on arbitrary sections `X_0..X_r`.
pub fn d_on_sections(w: &FormSection, args: &[VectorJetSection], policy: LiftPolicy) -> Result<FunctionJetSection> {
    let r = w.r;
    if args.len() != r + 1 {
        return Err(JetError::Arity { expected: r + 1, found: args.len() });
    }
    let (n, k) = (w.n, w.k);
    let mut acc: FunctionJetSection = FunctionJet::zero(n, k);
    for i in 0..=r {
        let rest: Vec<VectorJetSection> = without_sections(args, &[i]);
        let v = w.eval(&rest)?;
        acc = acc.add(&jet_action(&args[i], &v, policy)?.scale(&parity(i)))?;
    }
    for i in 0..=r {
        for j in (i + 1)..=r {
            let mut rest = vec![spencer_bracket(&args[i], &args[j], policy)?];
            rest.extend(without_sections(args, &[i, j]));
            acc = acc.add(&w.eval(&rest)?.scale(&parity(i + j)))?;
        }
    }
    Ok(acc.scale(&(Scalar::one() / Scalar::from_integer((r as i64 + 1).into()))))
}

fn without_sections(args: &[VectorJetSection], skip: &[usize]) -> Vec<VectorJetSection> {
    args.iter().enumerate().filter(|(q, _)| !skip.contains(q)).map(|(_, x)| x.clone()).collect()
}

/// `ω ∧ τ = 1/(r+s)! Σ_σ sgn(σ) ω(X_σ…) • τ(X_σ…)`, truncated at degree `n`.
pub fn wedge(w: &FormSection, t: &FormSection) -> Result<FormSection> {
    if w.r + t.r > w.n {
        return Err(JetError::DegreeOverflow { degree: w.r + t.r, max: w.n });
    }
    wedge_full(w, t)
}

/// [`wedge`] without the degree-`n` truncation.
pub fn wedge_full<C: Coeff>(w: &FormKR<C>, t: &FormKR<C>) -> Result<FormKR<C>> {
    check_dim(w.n, t.n)?;
    check_order(w.k, t.k)?;
    let (r, s) = (w.r, t.r);
    let fiber = vector_fiber_dim(w.n, w.k);
    if r + s > fiber {
        return Err(JetError::DegreeOverflow { degree: r + s, max: fiber });
    }
    // r! s! / (r+s)! = 1 / C(r+s, r)
    let norm = Scalar::one() / Scalar::from_integer((crate::multiindex::binom(r + s, r) as i64).into());
    let mut out = FormKR::zero(w.n, w.k, r + s);
    for (a, va) in &w.coeffs {
        for (b, vb) in &t.coeffs {
            let mut joined = a.clone();
            joined.extend(b);
            let Some((sorted, sign)) = sort_with_sign(&joined) else { continue };
            let prod = va.product(vb)?;
            out.add_to(sorted, &prod.scale(&(&norm * sign_scalar(sign))));
        }
    }
    Ok(out)
}

/// `(i_Y ω)(X_1..X_{r−1}) = r · ω(Y, X_1, …, X_{r−1})`.
pub fn interior_product(y: &VectorJetSection, w: &FormSection) -> Result<FormSection> {
    check_dim(w.n, y.dim())?;
    check_order(w.k, y.order())?;
    if w.r == 0 {
        return Err(JetError::DegreeOverflow { degree: 0, max: 0 });
    }
    let r = w.r;
    let factor = Scalar::from_integer((r as i64).into());
    let yflat = y.to_flat();
    let mut out = FormKR::zero(w.n, w.k, r - 1);
    for (t, v) in &w.coeffs {
        // ω_t contributes to U = t \ {t_i} with coefficient (−1)^i Y[t_i]
        for i in 0..r {
            let yc = &yflat[t[i]];
            if yc.is_zero() {
                continue;
            }
            let u = without(t, &[i]);
            out.add_to(u, &v.mul_coeff(yc).scale(&(&factor * parity(i))));
        }
    }
    Ok(out)
}

/// `(L_Y ω)(X_1..X_r) = Y(ω(X_1..X_r)) − Σ_i ω(X_1, …, [Y, X_i], …, X_r)`.
pub fn lie_derivative(y: &VectorJetSection, w: &FormSection) -> Result<FormSection> {
    check_dim(w.n, y.dim())?;
    check_order(w.k, y.order())?;
    let (n, k, r) = (w.n, w.k, w.r);
    let fiber = vector_fiber_dim(n, k);
    // [Y, E_s] for every slot, as flat polynomial coefficient vectors
    let brackets: Vec<Vec<Poly>> = (0..fiber)
        .map(|s| Ok(spencer_bracket(y, &VectorJet::basis(n, k, s), LiftPolicy::ZeroExtension)?.to_flat()))
        .collect::<Result<_>>()?;
    let mut out = FormKR::zero(n, k, r);
    for t in increasing_tuples(fiber, r) {
        let mut acc = match w.coeffs.get(&t) {
            Some(v) => jet_action(y, v, LiftPolicy::ZeroExtension)?,
            None => FunctionJet::zero(n, k),
        };
        for i in 0..r {
            for (s, c) in brackets[t[i]].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut tuple = t.clone();
                tuple[i] = s;
                let v = w.value(&tuple);
                if !v.is_zero() {
                    acc = acc.sub(&v.mul_coeff(c))?;
                }
            }
        }
        out.add_to(t, &acc);
    }
    Ok(out)
}

/// `π_{k,m} ω` depends only on the order-`m` parts of the arguments.
pub fn kr_membership<C: Coeff>(w: &FormKR<C>, m: usize) -> Result<bool> {
    if m > w.k {
        return Err(JetError::OrderOutOfRange { requested: m, min: 0, max: w.k });
    }
    let low = vector_fiber_dim(w.n, m);
    let len = count_upto(w.n, m);
    Ok(w.coeffs.iter().all(|(t, v)| t.iter().all(|&s| s < low) || v.slots()[..len].iter().all(|c| c.vanishes())))
}

/// Membership in `∧^{(k,r)}`: [`kr_membership`] at every `m ≤ k`.
pub fn is_kr_form<C: Coeff>(w: &FormKR<C>) -> bool {
    (0..=w.k).all(|m| kr_membership(w, m).expect("m ≤ k"))
}

/// `π_{k,m}: ∧^{(k,r)} → ∧^{(m,r)}`.
pub fn project_form<C: Coeff>(w: &FormKR<C>, m: usize) -> Result<FormKR<C>> {
    if !kr_membership(w, m)? {
        return Err(JetError::Invalid(format!("form is not of type ({m}, r) after projection")));
    }
    let low = vector_fiber_dim(w.n, m);
    let mut out = FormKR::zero(w.n, m, w.r);
    for (t, v) in &w.coeffs {
        if t.iter().all(|&s| s < low) {
            out.add_to(t.clone(), &v.project(m)?);
        }
    }
    Ok(out)
}

/// Position of a form in the filtration `C^{a,r}` at working order `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FormFiltrationTag {
    /// Largest `m` with all projections to orders `≤ m` vanishing; `None` if
    /// the order-0 part is already nonzero.
    pub vanishes_through: Option<usize>,
    /// `a` with the form in `C^{a,r}` (`m + 1`, or `0`).
    pub level: usize,
    pub working_order: usize,
}

pub fn filtration_tag<C: Coeff>(w: &FormKR<C>) -> FormFiltrationTag {
    let idx = enumerate(w.n, w.k);
    let lowest = w
        .coeffs
        .values()
        .flat_map(|v| v.slots().iter().zip(&idx).filter(|(c, _)| !c.vanishes()).map(|(_, a)| a.order()))
        .min();
    let level = lowest.unwrap_or(w.k + 1);
    FormFiltrationTag { vanishes_through: level.checked_sub(1), level, working_order: w.k }
}

/// Relative cochain test: `i_X ω = 0` and `L_X ω = 0` for every `X` in `spanning`.
pub fn relative_membership(w: &FormSection, spanning: &[VectorJetSection]) -> Result<bool> {
    for x in spanning {
        check_dim(w.n, x.dim())?;
        if w.r > 0 && !interior_product(x, w)?.is_zero() {
            return Ok(false);
        }
        if !lie_derivative(x, w)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Constant basis sections `E_s` spanning the full `𝔤_k` fiber.
pub fn full_fiber_sections(n: usize, k: usize) -> Vec<VectorJetSection> {
    (0..vector_fiber_dim(n, k)).map(|s| VectorJet::basis(n, k, s)).collect()
}

/// Interns `(group, slot, monomial)` keys as column indices.
#[derive(Default)]
struct KeySpace {
    index: HashMap<(Vec<usize>, usize, MultiIndex), usize>,
}

impl KeySpace {
    fn key(&mut self, k: (Vec<usize>, usize, MultiIndex)) -> usize {
        let next = self.index.len();
        *self.index.entry(k).or_insert(next)
    }

    fn row_of_form(&mut self, w: &FormSection) -> SparseRow {
        let mut row: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (t, v) in &w.coeffs {
            for (p, poly) in v.slots().iter().enumerate() {
                for (e, c) in poly.terms() {
                    let col = self.key((t.clone(), p, e.clone()));
                    *row.entry(col).or_insert_with(Scalar::zero) += c;
                }
            }
        }
        row.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }
}

/// Resource cap for the finite-dimensional coefficient spaces below.
pub const MAX_UNKNOWNS: usize = 6_000;

/// Basis of `{f ∈ J_k : X f = 0 for all X in spanning}` among sections with
/// polynomial slots of degree `≤ degree`.
pub fn theta_structure_algebra(n: usize, k: usize, spanning: &[VectorJetSection], degree: usize) -> Result<Vec<FunctionJetSection>> {
    let slots = count_upto(n, k);
    let monos = enumerate(n, degree);
    let unknowns = slots * monos.len();
    if unknowns > MAX_UNKNOWNS {
        return Err(JetError::ResourceBound(format!("{unknowns} unknowns > {MAX_UNKNOWNS}")));
    }
    for x in spanning {
        check_dim(n, x.dim())?;
        check_order(k, x.order())?;
    }
    // columns: unknowns; rows: (X index, slot, monomial) of X f
    let mut keys = KeySpace::default();
    let mut columns: Vec<SparseRow> = Vec::with_capacity(unknowns);
    for p in 0..slots {
        for e in &monos {
            let mut f: FunctionJetSection = FunctionJet::zero(n, k);
            f.slots_mut()[p] = Poly::monomial(e.clone(), Scalar::one());
            let mut col: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (xi, x) in spanning.iter().enumerate() {
                let xf = jet_action(x, &f, LiftPolicy::ZeroExtension)?;
                for (q, poly) in xf.slots().iter().enumerate() {
                    for (m, c) in poly.terms() {
                        let key = keys.key((vec![xi], q, m.clone()));
                        *col.entry(key).or_insert_with(Scalar::zero) += c;
                    }
                }
            }
            columns.push(col.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        }
    }
    let nrows = keys.index.len();
    let mut rows: Vec<SparseRow> = vec![Vec::new(); nrows];
    for (c, col) in columns.iter().enumerate() {
        for (r, v) in col {
            rows[*r].push((c, v.clone()));
        }
    }
    let null = Echelon::from_rows(unknowns, rows).nullspace();
    null.into_iter()
        .map(|v| {
            let mut f: FunctionJetSection = FunctionJet::zero(n, k);
            for (u, c) in v.into_iter().enumerate() {
                if !c.is_zero() {
                    let (p, e) = (u / monos.len(), &monos[u % monos.len()]);
                    f.slots_mut()[p].add_term(e.clone(), c);
                }
            }
            Ok(f)
        })
        .collect()
}

/// Whether the span of `basis` is closed under `•` (up to the same degree bound
/// is not required: membership is tested exactly in the span).
pub fn is_product_closed(basis: &[FunctionJetSection]) -> Result<bool> {
    let mut keys = KeySpace::default();
    let as_form = |f: &FunctionJetSection| FormKR::function(f.clone());
    let rows: Vec<SparseRow> = basis.iter().map(|f| keys.row_of_form(&as_form(f))).collect();
    let mut products = Vec::new();
    for a in basis {
        for b in basis {
            products.push(keys.row_of_form(&as_form(&a.product(b)?)));
        }
    }
    let ncols = keys.index.len();
    let span = Echelon::from_rows(ncols, rows);
    Ok(products.into_iter().all(|p| span.contains(p)))
}

/// `(g ω)(X_1..X_r)(p) = g · ω(q)(g⁻¹ X_1, …, g⁻¹ X_r)` for an arrow `g: q → p` of order `k + 1`.
pub fn arrow_transform_form(g: &Arrow, w: &AtPoint<FormValue>) -> Result<AtPoint<FormValue>> {
    let f = &w.jet;
    check_dim(f.n, g.dim())?;
    check_order(f.k + 1, g.order())?;
    if &w.base != g.source() {
        return Err(JetError::BasePointMismatch);
    }
    let target = g.target();
    let ginv = invert_arrow(g)?;
    let fiber = vector_fiber_dim(f.n, f.k);
    let pulled: Vec<VectorJetValue> = (0..fiber)
        .map(|s| Ok(pushforward_vector_jet(&ginv, &AtPoint::new(target.clone(), VectorJet::basis(f.n, f.k, s)))?.jet))
        .collect::<Result<_>>()?;
    let mut out = FormKR::zero(f.n, f.k, f.r);
    for t in increasing_tuples(fiber, f.r) {
        let args: Vec<VectorJetValue> = t.iter().map(|&s| pulled[s].clone()).collect();
        let v = f.eval(&args)?;
        if v.is_zero() {
            continue;
        }
        let moved: FunctionJetValue = pushforward_function_jet(g, &AtPoint::new(w.base.clone(), v))?.jet;
        out.add_to(t, &moved);
    }
    Ok(AtPoint::new(target, out))
}

/// [`arrow_transform_form`] applied to a section form at each arrow's source.
pub fn arrow_transform_family(arrows: &[Arrow], w: &FormSection) -> Result<Vec<AtPoint<FormValue>>> {
    arrows.iter().map(|g| arrow_transform_form(g, &w.at(g.source())?)).collect()
}

/// Result of [`local_exactness_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    /// Coefficient degree bound of the closed forms.
    pub degree: usize,
    /// Coefficient degree bound allowed for primitives.
    pub primitive_degree: usize,
    pub closed_dim: usize,
    pub exact_count: usize,
    /// Indices (in the closed basis) of forms with no primitive at this bound.
    pub unsolved: Vec<usize>,
    /// `dim ker(d)` on degree-0 forms with coefficients of degree `≤ degree`.
    pub constants_kernel_dim: usize,
}

impl ExactnessReport {
    pub fn all_exact(&self) -> bool {
        self.unsolved.is_empty()
    }
}

/// Monomial basis of `(k, r)`-forms with coefficients of degree `≤ degree`.
fn basis_forms(n: usize, k: usize, r: usize, degree: usize) -> Result<Vec<FormSection>> {
    let fiber = vector_fiber_dim(n, k);
    let tuples = increasing_tuples(fiber, r);
    let slots = count_upto(n, k);
    let monos = enumerate(n, degree);
    let total = tuples.len() * slots * monos.len();
    if total > MAX_UNKNOWNS {
        return Err(JetError::ResourceBound(format!("{total} coefficient unknowns > {MAX_UNKNOWNS}")));
    }
    let idx = JetIndex::new(n, k);
    let orders = enumerate(n, k);
    let mut out = Vec::with_capacity(total);
    for t in &tuples {
        // membership in ∧^{(k,r)}: value slots below the top argument order vanish
        let top = t.iter().map(|&s| slot_order(n, s, &idx)).max().unwrap_or(0);
        for p in (0..slots).filter(|&p| orders[p].order() >= top) {
            for e in &monos {
                let mut v: FunctionJetSection = FunctionJet::zero(n, k);
                v.slots_mut()[p] = Poly::monomial(e.clone(), Scalar::one());
                let mut w = FormKR::zero(n, k, r);
                w.add_to(t.clone(), &v);
                out.push(w);
            }
        }
    }
    Ok(out)
}

/// Kernel of `d` on the given basis, as combinations of it.
fn closed_combinations(ctx: &BasisBrackets, basis: &[FormSection]) -> Result<Vec<Vec<Scalar>>> {
    let mut keys = KeySpace::default();
    let columns: Vec<SparseRow> = basis
        .iter()
        .map(|w| Ok(keys.row_of_form(&exterior_derivative_with(ctx, w)?)))
        .collect::<Result<_>>()?;
    let mut rows: Vec<SparseRow> = vec![Vec::new(); keys.index.len()];
    for (c, col) in columns.iter().enumerate() {
        for (r, v) in col {
            rows[*r].push((c, v.clone()));
        }
    }
    Ok(Echelon::from_rows(basis.len(), rows).nullspace())
}

fn combine(basis: &[FormSection], coeffs: &[Scalar]) -> Result<FormSection> {
    let mut acc = FormKR::zero(basis[0].n, basis[0].k, basis[0].r);
    for (w, c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            acc = acc.add(&w.scale(c))?;
        }
    }
    Ok(acc)
}

/// Solvability probe for `dη = ω` over closed `r`-forms with coefficients of
/// degree `≤ degree`, allowing primitives of degree `≤ degree + 1`.
/// Closedness uses the untruncated `d`.
pub fn local_exactness_check(n: usize, k: usize, r: usize, degree: usize) -> Result<ExactnessReport> {
    local_exactness_check_with(n, k, r, degree, degree + 1)
}

/// [`local_exactness_check`] with an explicit primitive degree bound.
pub fn local_exactness_check_with(n: usize, k: usize, r: usize, degree: usize, primitive_degree: usize) -> Result<ExactnessReport> {
    if n == 0 {
        return Err(JetError::ZeroDimension);
    }
    if r == 0 {
        return Err(JetError::DegreeOverflow { degree: 0, max: 0 });
    }
    let ctx = BasisBrackets::new(n, k)?;
    let zero_basis = basis_forms(n, k, 0, degree)?;
    let constants_kernel_dim = closed_combinations(&ctx, &zero_basis)?.len();

    let basis = basis_forms(n, k, r, degree)?;
    let closed = closed_combinations(&ctx, &basis)?;
    let prim = basis_forms(n, k, r - 1, primitive_degree)?;
    let mut keys = KeySpace::default();
    let image_rows: Vec<SparseRow> = prim
        .iter()
        .map(|p| Ok(keys.row_of_form(&exterior_derivative_with(&ctx, p)?)))
        .collect::<Result<_>>()?;
    let targets: Vec<SparseRow> = closed
        .iter()
        .map(|c| Ok(keys.row_of_form(&combine(&basis, c)?)))
        .collect::<Result<_>>()?;
    let image = Echelon::from_rows(keys.index.len(), image_rows);
    let unsolved: Vec<usize> =
        targets.into_iter().enumerate().filter(|(_, t)| !image.contains(t.clone())).map(|(i, _)| i).collect();
    Ok(ExactnessReport {
        n,
        k,
        r,
        degree,
        primitive_degree,
        closed_dim: closed.len(),
        exact_count: closed.len() - unsolved.len(),
        unsolved,
        constants_kernel_dim,
    })
}

/// Coordinate 1-form picking the flat slot `s` of its argument, valued in the
/// constant jet `j_k(1)`.
pub fn coordinate_form(n: usize, k: usize, s: usize) -> FormSection {
    let mut w = FormKR::zero(n, k, 1);
    w.add_to(vec![s], &FunctionJet::unit(n, k));
    w
}

/// Jet order of a flat slot (convenience re-export for form builders).
pub fn fiber_slot_order(n: usize, k: usize, s: usize) -> usize {
    slot_order(n, s, &JetIndex::new(n, k))
}

/// `(component, α)` of a flat slot.
pub fn fiber_slot(n: usize, k: usize, s: usize) -> (usize, MultiIndex) {
    let (i, p) = unflat_slot(n, s);
    (i, enumerate(n, k)[p].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::prolong_function;
    use crate::scalar::int;

    #[test]
    fn repeated_argument_and_coordinate_form() {
        let mut rng = crate::random::rng(5);
        let x = crate::random::vector_jet_section(&mut rng, 2, 1, 1);
        let w = FormKR::from_entries(2, 1, 2, vec![(vec![0, 3], crate::random::function_jet_section(&mut rng, 2, 1, 1))]).unwrap();
        assert!(w.eval(&[x.clone(), x.clone()]).unwrap().is_zero());
        let c = coordinate_form(2, 1, 0);
        let v = c.eval(std::slice::from_ref(&x)).unwrap();
        assert_eq!(v.slot_at(0), x.slot_at(0, 0));
        assert!(v.slots()[1..].iter().all(|p| p.is_zero()));
    }

    #[test]
    fn degree_zero_differential_is_the_action() {
        let f = prolong_function(&Poly::monomial(MultiIndex::new(vec![2, 1]), int(1)), 1).unwrap();
        let df = exterior_derivative(&FormKR::function(f.clone())).unwrap();
        let mut rng = crate::random::rng(9);
        let x = crate::random::vector_jet_section(&mut rng, 2, 1, 2);
        assert_eq!(df.eval(std::slice::from_ref(&x)).unwrap(), jet_action(&x, &f, LiftPolicy::ZeroExtension).unwrap());
        let c = FormKR::function(FunctionJet::smooth_function(2, 2, Poly::constant(2, int(3))));
        assert!(exterior_derivative(&c).unwrap().is_zero());
    }

    #[test]
    fn truncation_at_degree_n() {
        let w = coordinate_form(1, 1, 0);
        assert_eq!(exterior_derivative(&w).unwrap_err(), JetError::DegreeOverflow { degree: 2, max: 1 });
        assert!(exterior_derivative_full(&w).is_ok());
    }

    #[test]
    fn wedge_of_degree_zero_is_product() {
        let mut rng = crate::random::rng(2);
        let f = crate::random::function_jet_section(&mut rng, 2, 2, 1);
        let g = crate::random::function_jet_section(&mut rng, 2, 2, 1);
        let w = wedge(&FormKR::function(f.clone()), &FormKR::function(g.clone())).unwrap();
        assert_eq!(w.value(&[]), f.product(&g).unwrap());
        let a = coordinate_form(2, 1, 1);
        assert!(wedge(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn membership_examples() {
        let w0 = coordinate_form(2, 0, 1);
        assert!(is_kr_form(&w0));
        // reads an order-1 slot and has a nonzero order-0 value
        let w = coordinate_form(2, 1, 3);
        assert!(!kr_membership(&w, 0).unwrap());
        assert!(kr_membership(&w, 1).unwrap());
    }

    #[test]
    fn theta_of_full_fiber_is_constants() {
        let basis = theta_structure_algebra(1, 1, &full_fiber_sections(1, 1), 2).unwrap();
        assert_eq!(basis.len(), 1);
        assert!(basis[0].is_smooth_function());
        assert!(is_product_closed(&basis).unwrap());
    }

    #[test]
    fn volume_form_under_linear_arrow() {
        let vol = FormKR::from_entries(2, 0, 2, vec![(vec![0, 1], FunctionJet::unit(2, 0))]).unwrap();
        let lin = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let g = Arrow::affine(crate::scalar::origin(2), crate::scalar::origin(2), &lin, 1).unwrap();
        let moved = arrow_transform_form(&g, &vol.at(&crate::scalar::origin(2)).unwrap()).unwrap();
        assert_eq!(moved.jet.value(&[0, 1]).slot_at(0), &crate::scalar::frac(1, 5));
    }
}
