//! Multi-indices and their graded enumeration.
//!
//! Multi-indices of a fixed chart dimension are ordered first by total
//! order `|α|` and then reverse-lexicographically on the exponent vector, so
//! that `e_1 < e_2 < ... < e_n` and every set `{|α| ≤ m}` is a prefix of
//! `{|α| ≤ k}` for `m ≤ k`. That prefix property is what makes jet
//! projections plain truncations everywhere in the crate.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{JetError, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit multi-index `e_j` (0-based `j`).
    pub fn unit(n: usize, j: usize) -> Self {
        let mut v = vec![0; n];
        v[j] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn plus_unit(&self, j: usize) -> Self {
        let mut v = self.0.clone();
        v[j] += 1;
        MultiIndex(v)
    }

    pub fn minus_unit(&self, j: usize) -> Option<Self> {
        if self.0[j] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[j] -= 1;
        Some(MultiIndex(v))
    }

    pub fn add(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other` when `other ≤ self` componentwise.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut v = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            v.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(v))
    }

    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `α! = Π α_i!`
    pub fn factorial(&self) -> BigInt {
        let mut f = BigInt::one();
        for &e in &self.0 {
            for t in 2..=e {
                f *= t;
            }
        }
        f
    }

    /// Position of `self` in the graded enumeration of its dimension.
    pub fn position(&self) -> usize {
        let n = self.0.len();
        let d = self.order();
        let mut pos = if d == 0 { 0 } else { count_upto(n, d - 1) };
        let mut rem = d;
        for i in 0..n.saturating_sub(1) {
            let parts = n - i - 1;
            for v in (self.0[i] as usize + 1)..=rem {
                pos += binom(rem - v + parts - 1, parts - 1);
            }
            rem -= self.0[i] as usize;
        }
        pos
    }

    /// All multi-indices `β ≤ self`, in graded order.
    pub fn lower_set(&self) -> Vec<MultiIndex> {
        enumerate(self.dim(), self.order())
            .into_iter()
            .filter(|b| b.le(self))
            .collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Number of multi-indices of dimension `n` with `|α| ≤ k`, i.e. `C(n+k, n)`.
pub fn count_upto(n: usize, k: usize) -> usize {
    binom(n + k, n)
}

/// Multi-indices of dimension `n` with `|α| = d`, in graded order.
pub fn of_order(n: usize, d: usize) -> Vec<MultiIndex> {
    fn rec(n: usize, rem: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == n {
            prefix.push(rem as u32);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for v in (0..=rem).rev() {
            prefix.push(v as u32);
            rec(n, rem - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// All multi-indices of dimension `n` with `|α| ≤ k`, in graded order.
pub fn enumerate(n: usize, k: usize) -> Vec<MultiIndex> {
    (0..=k).flat_map(|d| of_order(n, d)).collect()
}

/// `C(α, β) = Π C(α_i, β_i)`, zero when some `β_i > α_i`.
pub fn multi_binomial(alpha: &MultiIndex, beta: &MultiIndex) -> Result<Scalar> {
    if alpha.dim() != beta.dim() {
        return Err(JetError::DimensionMismatch {
            expected: alpha.dim(),
            found: beta.dim(),
        });
    }
    let mut acc = BigInt::one();
    for (&a, &b) in alpha.0.iter().zip(&beta.0) {
        if b > a {
            return Ok(Scalar::zero());
        }
        acc *= BigInt::from(binom(a as usize, b as usize));
    }
    Ok(Scalar::from_integer(acc))
}

/// Precomputed combinatorics for jets of dimension `n` up to order `k`.
///
/// Built per operation; nothing is cached globally.
#[derive(Clone, Debug)]
pub struct JetIndex {
    pub n: usize,
    pub k: usize,
    pub list: Vec<MultiIndex>,
    /// `plus[j][p]` = position of `list[p] + e_j` (always within order `k+1`).
    pub plus: Vec<Vec<usize>>,
    /// For each position `p`: all `(pos β, pos α−β, C(α,β))` with `β ≤ α`.
    pub splits: Vec<Vec<(usize, usize, Scalar)>>,
}

impl JetIndex {
    pub fn new(n: usize, k: usize) -> Self {
        let list = enumerate(n, k);
        let plus = (0..n)
            .map(|j| list.iter().map(|a| a.plus_unit(j).position()).collect())
            .collect();
        let splits = list
            .iter()
            .map(|a| {
                a.lower_set()
                    .into_iter()
                    .map(|b| {
                        let rest = a.checked_sub(&b).expect("β ≤ α");
                        let c = multi_binomial(a, &b).expect("same dimension");
                        (b.position(), rest.position(), c)
                    })
                    .collect()
            })
            .collect();
        JetIndex { n, k, list, plus, splits }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }
}
