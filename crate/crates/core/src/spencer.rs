//! Bracket calculus on jets: the algebraic bracket, the Lie algebras
//! `J_{k,0}`, the Spencer operator `D`, the Spencer bracket and the action of
//! vector jets on function jets.
//!
//! Lie derivatives and interior products of forms live in [`crate::forms`]
//! and are re-exported here.

use num_traits::{One, Zero};

use crate::error::{check_dim, check_order, JetError, Result};
use crate::jet::{
    flat_slot, vector_fiber_dim, AtPoint, Coeff, FunctionJet, FunctionJetSection, VectorJet, VectorJetSection,
    VectorJetValue,
};
use crate::liealg::{ExtensionData, FiniteLieAlgebra};
use crate::multiindex::{count_upto, JetIndex};
use crate::poly::Poly;
use crate::random;
use crate::scalar::Scalar;

pub use crate::forms::{interior_product, lie_derivative};

/// A section of `T* ⊗ E`: one jet per covector index `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovectorIndexed<J> {
    comps: Vec<J>,
}

pub type CovectorIndexedSection = CovectorIndexed<VectorJetSection>;

impl<J> CovectorIndexed<J> {
    pub fn component(&self, j: usize) -> &J {
        &self.comps[j]
    }

    pub fn components(&self) -> &[J] {
        &self.comps
    }
}

fn require_order_at_least(k: usize, min: usize) -> Result<()> {
    if k < min {
        Err(JetError::OrderOutOfRange { requested: k, min, max: usize::MAX })
    } else {
        Ok(())
    }
}

fn compatible<C: Coeff>(x: &VectorJet<C>, y: &VectorJet<C>) -> Result<()> {
    check_dim(x.dim(), y.dim())?;
    check_order(x.order(), y.order())
}

/// `{X, Y}^i_α = Σ_{β≤α} C(α,β) (ξ^a_β η^i_{α−β+e_a} − η^a_β ξ^i_{α−β+e_a})` for `|α| ≤ top`,
/// skipping `β = 0` when `skip_zero` is set.
fn bracket_core<C: Coeff>(x: &VectorJet<C>, y: &VectorJet<C>, top: usize, skip_zero: bool) -> VectorJet<C> {
    let n = x.dim();
    let idx = JetIndex::new(n, top);
    let mut out = VectorJet::zero(n, top);
    for (p, splits) in idx.splits.iter().enumerate() {
        for (b, rest, c) in splits {
            if skip_zero && *b == 0 {
                continue;
            }
            let neg = -c.clone();
            for a in 0..n {
                let q = idx.plus[a][*rest];
                let (xa, ya) = (x.slot_at(a, *b), y.slot_at(a, *b));
                if xa.vanishes() && ya.vanishes() {
                    continue;
                }
                for i in 0..n {
                    let comps: &mut [Vec<C>] = out.comps_mut();
                    comps[i][p].add_product(c, xa, y.slot_at(i, q));
                    comps[i][p].add_product(&neg, ya, x.slot_at(i, q));
                }
            }
        }
    }
    out
}

/// The algebraic bracket `{ , }`: order `k` in, order `k − 1` out.
pub fn algebraic_bracket<C: Coeff>(x: &VectorJet<C>, y: &VectorJet<C>) -> Result<VectorJet<C>> {
    compatible(x, y)?;
    require_order_at_least(x.order(), 1)?;
    Ok(bracket_core(x, y, x.order() - 1, false))
}

/// [`algebraic_bracket`] on fiber values, checking the base points.
pub fn algebraic_bracket_at(x: &AtPoint<VectorJetValue>, y: &AtPoint<VectorJetValue>) -> Result<AtPoint<VectorJetValue>> {
    x.same_base(y)?;
    Ok(AtPoint::new(x.base.clone(), algebraic_bracket(&x.jet, &y.jet)?))
}

/// Bracket of `J_{k,0}`: jets with vanishing vector part keep their order.
pub fn isotropy_bracket<C: Coeff>(x: &VectorJet<C>, y: &VectorJet<C>) -> Result<VectorJet<C>> {
    compatible(x, y)?;
    if x.vector_part().iter().chain(y.vector_part().iter()).any(|c| !c.vanishes()) {
        return Err(JetError::Invalid("isotropy bracket needs vanishing vector parts".into()));
    }
    Ok(bracket_core(x, y, x.order(), true))
}

/// The Lie algebra `J_{k,0}` at a point, on the basis of slots `(i, α)`, `1 ≤ |α| ≤ k`,
/// ordered as the flat fiber slots `n, n+1, …`.
#[derive(Clone, Debug)]
pub struct JetGroupAlgebra {
    pub n: usize,
    pub k: usize,
    pub algebra: FiniteLieAlgebra,
}

impl JetGroupAlgebra {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Flat fiber slot of basis element `b`.
    pub fn fiber_slot(&self, b: usize) -> usize {
        self.n + b
    }

    /// The fiber value of a coordinate vector.
    pub fn to_jet(&self, coords: &[Scalar]) -> Result<VectorJetValue> {
        check_dim(self.dim(), coords.len())?;
        let mut flat = vec![Scalar::zero(); self.n];
        flat.extend(coords.iter().cloned());
        VectorJet::from_flat(self.n, self.k, &flat)
    }

    /// Basis elements with `|α| ≥ m + 1`: the kernel of `J_{k,0} → J_{m,0}`.
    pub fn kernel_basis(&self, m: usize) -> Vec<Vec<Scalar>> {
        let start = vector_fiber_dim(self.n, m) - self.n;
        (start..self.dim()).map(|b| crate::liealg::unit(self.dim(), b)).collect()
    }

    /// Matrix of the truncation `J_{k,0} → J_{m,0}` (rows: target basis).
    pub fn projection_matrix(&self, m: usize) -> Vec<Vec<Scalar>> {
        let dm = vector_fiber_dim(self.n, m) - self.n;
        (0..dm).map(|r| crate::liealg::unit(self.dim(), r)).collect()
    }

    /// Matrix of the zero-extension `J_{m,0} → J_{k,0}` (rows: this basis).
    pub fn zero_extension_matrix(&self, m: usize) -> Vec<Vec<Scalar>> {
        let dm = vector_fiber_dim(self.n, m) - self.n;
        (0..self.dim())
            .map(|r| (0..dm).map(|c| if r == c { Scalar::one() } else { Scalar::zero() }).collect())
            .collect()
    }
}

/// Structure constants of `J_{k,0}`; the Jacobi identity is verified on construction.
pub fn jet_group_algebra(n: usize, k: usize) -> Result<JetGroupAlgebra> {
    if n == 0 {
        return Err(JetError::ZeroDimension);
    }
    require_order_at_least(k, 1)?;
    let dim = vector_fiber_dim(n, k) - n;
    let basis: Vec<VectorJetValue> = (0..dim).map(|b| VectorJet::basis(n, k, n + b)).collect();
    let mut consts = vec![vec![vec![Scalar::zero(); dim]; dim]; dim];
    for i in 0..dim {
        for j in (i + 1)..dim {
            let flat = isotropy_bracket(&basis[i], &basis[j])?.to_flat();
            debug_assert!(flat[..n].iter().all(|x| x.is_zero()));
            for (c, v) in flat.into_iter().skip(n).enumerate() {
                consts[j][i][c] = -v.clone();
                consts[i][j][c] = v;
            }
        }
    }
    Ok(JetGroupAlgebra { n, k, algebra: FiniteLieAlgebra::new(consts)? })
}

/// `(D s)_j^{i,α} = ∂_j ξ^i_α − ξ^i_{α+e_j}`, order `k + 1` in, order `k` out.
pub fn spencer_operator_vec(s: &VectorJetSection) -> Result<CovectorIndexedSection> {
    require_order_at_least(s.order(), 1)?;
    let n = s.dim();
    let comps = (0..n)
        .map(|j| {
            let parts = (0..n).map(|i| spencer_operator_fun(&s.component(i)).map(|d| d.comps[j].clone()));
            VectorJet::from_components(parts.collect::<Result<_>>()?)
        })
        .collect::<Result<_>>()?;
    Ok(CovectorIndexed { comps })
}

/// `(D f)_j^α = ∂_j f_α − f_{α+e_j}`.
pub fn spencer_operator_fun(f: &FunctionJetSection) -> Result<CovectorIndexed<FunctionJetSection>> {
    require_order_at_least(f.order(), 1)?;
    let n = f.dim();
    let k = f.order() - 1;
    let idx = JetIndex::new(n, k);
    let comps = (0..n)
        .map(|j| {
            let slots = (0..idx.len())
                .map(|p| {
                    let mut v = f.slot_at(p).partial(j)?;
                    v.sub_assign(f.slot_at(idx.plus[j][p]));
                    Ok(v)
                })
                .collect::<Result<_>>()?;
            FunctionJet::new(n, k, slots)
        })
        .collect::<Result<_>>()?;
    Ok(CovectorIndexed { comps })
}

/// How the order-`(k+1)` slots of a lift are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LiftPolicy {
    #[default]
    ZeroExtension,
    /// Random polynomial top slots of degree `≤ 2`, drawn from this seed.
    Randomized { seed: u64 },
}

const LIFT_DEGREE: usize = 2;

/// A lift of `x` to order `k + 1`, with top slots chosen by `policy`.
pub fn lift_vector(x: &VectorJetSection, policy: LiftPolicy, salt: u64) -> VectorJetSection {
    let mut lifted = x.lift_zero(x.order() + 1);
    if let LiftPolicy::Randomized { seed } = policy {
        let mut rng = random::rng(seed.wrapping_add(salt));
        let n = x.dim();
        for p in count_upto(n, x.order())..count_upto(n, x.order() + 1) {
            for i in 0..n {
                lifted.set_slot_at(i, p, random::poly(&mut rng, n, LIFT_DEGREE));
            }
        }
    }
    lifted
}

pub fn lift_function(f: &FunctionJetSection, policy: LiftPolicy, salt: u64) -> FunctionJetSection {
    let mut lifted = f.lift_zero(f.order() + 1);
    if let LiftPolicy::Randomized { seed } = policy {
        let mut rng = random::rng(seed.wrapping_add(salt));
        let n = f.dim();
        for p in count_upto(n, f.order())..count_upto(n, f.order() + 1) {
            lifted.slots_mut()[p] = random::poly(&mut rng, n, LIFT_DEGREE);
        }
    }
    lifted
}

/// `[X, Y] = {X̃, Ỹ} + i(X₀) DỸ − i(Y₀) DX̃` for lifts `X̃, Ỹ` of order `k + 1`.
pub fn spencer_bracket(x: &VectorJetSection, y: &VectorJetSection, policy: LiftPolicy) -> Result<VectorJetSection> {
    compatible(x, y)?;
    let xt = lift_vector(x, policy, 1);
    let yt = lift_vector(y, policy, 2);
    let mut out = algebraic_bracket(&xt, &yt)?;
    let dx = spencer_operator_vec(&xt)?;
    let dy = spencer_operator_vec(&yt)?;
    for j in 0..x.dim() {
        out = out.add(&dy.comps[j].mul_coeff(x.slot_at(j, 0)))?;
        out = out.sub(&dx.comps[j].mul_coeff(y.slot_at(j, 0)))?;
    }
    Ok(out)
}

/// `(X ∗ f)_α = Σ_{β≤α} C(α,β) ξ^a_β f_{α−β+e_a}`: `X` of order `k`, `f` of order `k + 1`.
pub fn algebraic_action_star<C: Coeff>(x: &VectorJet<C>, f: &FunctionJet<C>) -> Result<FunctionJet<C>> {
    check_dim(x.dim(), f.dim())?;
    check_order(x.order() + 1, f.order())?;
    let n = x.dim();
    let idx = JetIndex::new(n, x.order());
    let mut out = FunctionJet::zero(n, x.order());
    for (p, splits) in idx.splits.iter().enumerate() {
        let mut acc = C::zero_in(n);
        for (b, rest, c) in splits {
            for a in 0..n {
                acc.add_product(c, x.slot_at(a, *b), f.slot_at(idx.plus[a][*rest]));
            }
        }
        out.slots_mut()[p] = acc;
    }
    Ok(out)
}

/// `X f = X ∗ f̃ + i(X₀) D f̃` for a lift `f̃` of order `k + 1`.
pub fn jet_action(x: &VectorJetSection, f: &FunctionJetSection, policy: LiftPolicy) -> Result<FunctionJetSection> {
    check_dim(x.dim(), f.dim())?;
    check_order(x.order(), f.order())?;
    let ft = lift_function(f, policy, 3);
    let mut out = algebraic_action_star(x, &ft)?;
    let df = spencer_operator_fun(&ft)?;
    for j in 0..x.dim() {
        out = out.add(&df.comps[j].mul_coeff(x.slot_at(j, 0)))?;
    }
    Ok(out)
}

/// Action of the constant basis section `E_s` on `f`: for an order-0 slot
/// `(i, 0)` this is `∂_i` slotwise, otherwise the purely algebraic part.
pub(crate) fn basis_action(n: usize, s: usize, f: &FunctionJetSection) -> Result<FunctionJetSection> {
    let (i, bpos) = crate::jet::unflat_slot(n, s);
    let k = f.order();
    if bpos == 0 {
        let slots = f.slots().iter().map(|p| p.partial(i)).collect::<Result<_>>()?;
        return FunctionJet::new(n, k, slots);
    }
    let idx = JetIndex::new(n, k);
    let mut out = FunctionJet::zero(n, k);
    for (p, splits) in idx.splits.iter().enumerate() {
        let mut acc = Poly::zero(n);
        for (b, rest, c) in splits {
            if *b == bpos {
                let q = idx.plus[i][*rest];
                acc.add_assign(&f.slot_at(q).scale(c));
            }
        }
        out.slots_mut()[p] = acc;
    }
    Ok(out)
}

/// Spencer bracket of two constant basis sections `E_s, E_t` as a flat constant vector.
pub(crate) fn basis_bracket(n: usize, k: usize, s: usize, t: usize) -> Result<Vec<Scalar>> {
    let es: VectorJetSection = VectorJet::basis(n, k, s);
    let et: VectorJetSection = VectorJet::basis(n, k, t);
    let b = spencer_bracket(&es, &et, LiftPolicy::ZeroExtension)?;
    Ok(b.to_flat().into_iter().map(|p| p.coeff(&crate::multiindex::MultiIndex::zero(n))).collect())
}

/// Flat slot of `(i, α)` by components, for callers that think in `(i, α)`.
pub fn slot_index(n: usize, i: usize, alpha: &crate::multiindex::MultiIndex) -> usize {
    flat_slot(n, i, alpha.position())
}

/// `0 → ker → J_{k,0} → J_{m,0} → 0` at a point, with the zero-extension section.
pub fn jet_group_extension(n: usize, k: usize, m: usize) -> Result<ExtensionData> {
    if m == 0 || m >= k {
        return Err(JetError::OrderOutOfRange { requested: m, min: 1, max: k.saturating_sub(1) });
    }
    let big = jet_group_algebra(n, k)?;
    let small = jet_group_algebra(n, m)?;
    ExtensionData::new(big.algebra.clone(), small.algebra, big.projection_matrix(m), big.zero_extension_matrix(m))
}

/// The kernel of `J_{k,0} → J_{m,0}` as a Lie algebra.
pub fn jet_group_kernel(n: usize, k: usize, m: usize) -> Result<FiniteLieAlgebra> {
    if m > k {
        return Err(JetError::OrderOutOfRange { requested: m, min: 0, max: k });
    }
    let big = jet_group_algebra(n, k)?;
    big.algebra.subalgebra(&big.kernel_basis(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{prolong_function, prolong_vector_field};
    use crate::multiindex::MultiIndex;
    use crate::scalar::{int, origin};

    fn mono(e: &[u32], c: i64) -> Poly {
        Poly::monomial(MultiIndex::new(e.to_vec()), int(c))
    }

    #[test]
    fn bracket_of_linear_parts() {
        // X = (0, A), Y = (0, B) in n = 2, k = 1
        let a = [[1, 2], [3, 4]];
        let b = [[0, 1], [-1, 2]];
        let mk = |m: [[i64; 2]; 2]| {
            let mut v = VectorJet::<Scalar>::zero(2, 1);
            for i in 0..2 {
                for j in 0..2 {
                    v.set_slot(i, &MultiIndex::unit(2, j), int(m[i][j]));
                }
            }
            v
        };
        let (x, y) = (mk(a), mk(b));
        assert!(algebraic_bracket(&x, &y).unwrap().is_zero());
        let br = isotropy_bracket(&x, &y).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let ba: i64 = (0..2).map(|l| b[i][l] * a[l][j]).sum();
                let ab: i64 = (0..2).map(|l| a[i][l] * b[l][j]).sum();
                assert_eq!(br.slot(i, &MultiIndex::unit(2, j)), &int(ba - ab));
            }
        }
    }

    #[test]
    fn algebraic_bracket_of_holonomic_jets() {
        let x = prolong_vector_field(&[mono(&[1], 1)], 2).unwrap().at(&origin(1)).unwrap();
        let y = prolong_vector_field(&[Poly::one(1)], 2).unwrap().at(&origin(1)).unwrap();
        let b = algebraic_bracket_at(&x, &y).unwrap();
        // [x∂, ∂] = −∂
        assert_eq!(b.jet.comps()[0], vec![int(-1), int(0)]);
        assert!(algebraic_bracket(&x.jet, &x.jet).unwrap().is_zero());
    }

    #[test]
    fn jet_group_kernels_at_n1() {
        use crate::liealg::nilpotency_analysis;
        assert!(nilpotency_analysis(&jet_group_kernel(1, 2, 1).unwrap()).abelian);
        assert!(nilpotency_analysis(&jet_group_kernel(1, 3, 2).unwrap()).abelian);
        // at n = 1 brackets of orders 2 and 3 land in order 4, so this kernel is abelian too
        assert!(nilpotency_analysis(&jet_group_kernel(1, 3, 1).unwrap()).abelian);
        let r = nilpotency_analysis(&jet_group_kernel(2, 3, 1).unwrap());
        assert!(r.nilpotent && !r.abelian);
        let e = jet_group_extension(1, 3, 2).unwrap();
        assert_eq!(e.big.dim(), e.ideal.len() + e.quotient.dim());
    }

    #[test]
    fn jet_group_algebra_dimensions() {
        let g1 = jet_group_algebra(1, 1).unwrap();
        assert_eq!(g1.dim(), 1);
        let g2 = jet_group_algebra(1, 2).unwrap();
        assert_eq!(g2.dim(), 2);
        // basis (x∂, x²∂) slots: e1 = ξ_1, e2 = ξ_2; [x∂, x²∂/2] = x²∂/2
        assert_eq!(g2.algebra.bracket_basis(0, 1), &[int(0), int(1)]);
        assert_eq!(jet_group_algebra(2, 2).unwrap().dim(), 2 * (6 - 1));
    }

    #[test]
    fn spencer_operator_examples() {
        let s = VectorJet::new(1, 1, vec![vec![Poly::zero(1), Poly::one(1)]]).unwrap();
        let d = spencer_operator_vec(&s).unwrap();
        assert_eq!(d.component(0).comps()[0], vec![Poly::constant(1, int(-1))]);
        let f = FunctionJet::new(1, 1, vec![Poly::var(1, 0), Poly::zero(1)]).unwrap();
        assert_eq!(spencer_operator_fun(&f).unwrap().component(0).slots(), &[Poly::one(1)]);
        let x = prolong_vector_field(&[mono(&[2, 1], 3), mono(&[0, 2], 1)], 3).unwrap();
        assert!(spencer_operator_vec(&x).unwrap().components().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn classical_bracket_at_order_zero() {
        let d = prolong_vector_field(&[Poly::one(1)], 0).unwrap();
        let xd = prolong_vector_field(&[Poly::var(1, 0)], 0).unwrap();
        assert_eq!(spencer_bracket(&d, &xd, LiftPolicy::ZeroExtension).unwrap(), d);
    }

    #[test]
    fn star_action_and_jet_action() {
        let x = prolong_vector_field(&[Poly::one(1)], 2).unwrap();
        let f = prolong_function(&mono(&[2], 1), 3).unwrap();
        assert_eq!(algebraic_action_star(&x, &f).unwrap(), prolong_function(&mono(&[1], 2), 2).unwrap());
        let one = FunctionJet::<Poly>::unit(2, 2);
        let y = prolong_vector_field(&[mono(&[1, 1], 1), mono(&[0, 2], 2)], 2).unwrap();
        assert!(jet_action(&y, &one, LiftPolicy::Randomized { seed: 3 }).unwrap().is_zero());
    }

    #[test]
    fn basis_action_matches_general_action() {
        let mut rng = random::rng(11);
        let f = random::function_jet_section(&mut rng, 2, 2, 2);
        for s in 0..vector_fiber_dim(2, 2) {
            let e: VectorJetSection = VectorJet::basis(2, 2, s);
            assert_eq!(basis_action(2, s, &f).unwrap(), jet_action(&e, &f, LiftPolicy::ZeroExtension).unwrap());
        }
    }
}
