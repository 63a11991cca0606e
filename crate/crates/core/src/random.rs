//! Seeded generators for randomized identity checks.
//!
//! Everything draws from a `ChaCha8Rng`, so a seed fixes every value
//! independently of platform.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrow::Arrow;
use crate::forms::{FormKR, FormSection};
use crate::jet::{FunctionJet, FunctionJetSection, FunctionJetValue, VectorJet, VectorJetSection, VectorJetValue};
use crate::multiindex::{count_upto, enumerate, MultiIndex};
use crate::poly::Poly;
use crate::scalar::{frac, Point, Scalar};

pub type JetRng = ChaCha8Rng;

pub fn rng(seed: u64) -> JetRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small rational `p/q` with `|p| ≤ 4`, `1 ≤ q ≤ 3`.
pub fn scalar(rng: &mut JetRng) -> Scalar {
    frac(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

pub fn nonzero_scalar(rng: &mut JetRng) -> Scalar {
    loop {
        let s = scalar(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn point(rng: &mut JetRng, n: usize) -> Point {
    (0..n).map(|_| scalar(rng)).collect()
}

/// A polynomial of degree `≤ deg` with at most three terms.
pub fn poly(rng: &mut JetRng, n: usize, deg: usize) -> Poly {
    let monos = enumerate(n, deg);
    let mut p = Poly::zero(n);
    let terms = rng.gen_range(0..=3);
    for _ in 0..terms {
        let e: MultiIndex = monos[rng.gen_range(0..monos.len())].clone();
        p.add_term(e, scalar(rng));
    }
    p
}

pub fn function_jet_section(rng: &mut JetRng, n: usize, k: usize, deg: usize) -> FunctionJetSection {
    let slots = (0..count_upto(n, k)).map(|_| poly(rng, n, deg)).collect();
    FunctionJet::new(n, k, slots).expect("consistent shape")
}

pub fn vector_jet_section(rng: &mut JetRng, n: usize, k: usize, deg: usize) -> VectorJetSection {
    let comps = (0..n).map(|_| (0..count_upto(n, k)).map(|_| poly(rng, n, deg)).collect()).collect();
    VectorJet::new(n, k, comps).expect("consistent shape")
}

pub fn function_jet_value(rng: &mut JetRng, n: usize, k: usize) -> FunctionJetValue {
    let slots = (0..count_upto(n, k)).map(|_| scalar(rng)).collect();
    FunctionJet::new(n, k, slots).expect("consistent shape")
}

pub fn vector_jet_value(rng: &mut JetRng, n: usize, k: usize) -> VectorJetValue {
    let comps = (0..n).map(|_| (0..count_upto(n, k)).map(|_| scalar(rng)).collect()).collect();
    VectorJet::new(n, k, comps).expect("consistent shape")
}

/// A random polynomial vector field of degree `≤ deg`.
pub fn vector_field(rng: &mut JetRng, n: usize, deg: usize) -> Vec<Poly> {
    (0..n).map(|_| poly(rng, n, deg)).collect()
}

/// A random arrow from `source` to `target` with invertible linear part.
pub fn arrow(rng: &mut JetRng, source: Point, target: Point, k: usize) -> Arrow {
    let n = source.len();
    let m = count_upto(n, k) - 1;
    loop {
        let coeffs = (0..n).map(|_| (0..m).map(|_| scalar(rng)).collect()).collect();
        if let Ok(a) = Arrow::new(source.clone(), target.clone(), k, coeffs) {
            return a;
        }
    }
}

/// A random `(k, r)`-form: each coefficient tuple is kept with probability
/// `1/2`, and values on tuples that read slots of order `> m` vanish through
/// order `m`, so the result lies in `∧^{(k,r)}`.
pub fn kr_form(rng: &mut JetRng, n: usize, k: usize, r: usize, deg: usize) -> FormSection {
    let fiber = crate::jet::vector_fiber_dim(n, k);
    let idx = crate::multiindex::JetIndex::new(n, k);
    let orders = enumerate(n, k);
    let mut entries = Vec::new();
    for t in crate::liealg::increasing_tuples(fiber, r) {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let top = t.iter().map(|&s| crate::jet::slot_order(n, s, &idx)).max().unwrap_or(0);
        let mut v = function_jet_section(rng, n, k, deg);
        if top > 0 {
            for (p, a) in orders.iter().enumerate() {
                if a.order() < top {
                    v.slots_mut()[p] = Poly::zero(n);
                }
            }
        }
        entries.push((t, v));
    }
    FormKR::from_entries(n, k, r, entries).expect("consistent shape")
}

/// A random form with no membership constraint.
pub fn form(rng: &mut JetRng, n: usize, k: usize, r: usize, deg: usize) -> FormSection {
    let fiber = crate::jet::vector_fiber_dim(n, k);
    let mut entries = Vec::new();
    for t in crate::liealg::increasing_tuples(fiber, r) {
        if rng.gen_bool(0.5) {
            entries.push((t, function_jet_section(rng, n, k, deg)));
        }
    }
    FormKR::from_entries(n, k, r, entries).expect("consistent shape")
}
