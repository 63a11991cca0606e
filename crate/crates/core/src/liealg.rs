//! Finite-dimensional Lie algebras, Chevalley–Eilenberg cohomology and
//! abelian extensions.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{check_dim, JetError, Result};
use crate::linalg::{identity, mat_mul, sparse_from_dense, Echelon, Mat, SparseRow};
use crate::scalar::{int, Scalar};

/// Cochain spaces larger than this (as `dim C^r · dim V`) are refused.
pub const MAX_COCHAIN_DIM: usize = 20_000;

/// Structure constants `consts[i][j][k] = c^k_{ij}`, i.e. `[e_i, e_j] = Σ_k c^k_{ij} e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteLieAlgebra {
    dim: usize,
    consts: Vec<Vec<Vec<Scalar>>>,
}

/// Outcome of [`validate_lie_algebra`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// `[e_i, e_j] ≠ −[e_j, e_i]`
    Antisymmetry { i: usize, j: usize },
    /// Jacobi fails on `(e_i, e_j, e_k)`.
    Jacobi { i: usize, j: usize, k: usize },
}

fn add_scaled(acc: &mut [Scalar], c: &Scalar, v: &[Scalar]) {
    if c.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += c * x;
        }
    }
}

/// `[e_i, e_j] = Σ c e_k` as `(k, c)` pairs.
pub type BracketTerms = Vec<(usize, Scalar)>;

/// An increasing pair of basis indices.
pub type BasisPair = (usize, usize);

/// Checks antisymmetry and the Jacobi identity; returns the first violation.
pub fn validate_lie_algebra(consts: &[Vec<Vec<Scalar>>]) -> Result<Option<Violation>> {
    let d = consts.len();
    for row in consts {
        check_dim(d, row.len())?;
        for v in row {
            check_dim(d, v.len())?;
        }
    }
    for i in 0..d {
        for j in i..d {
            let s: Vec<Scalar> = consts[i][j].iter().zip(&consts[j][i]).map(|(a, b)| a + b).collect();
            if s.iter().any(|x| !x.is_zero()) {
                return Ok(Some(Violation::Antisymmetry { i, j }));
            }
        }
    }
    let g = FiniteLieAlgebra { dim: d, consts: consts.to_vec() };
    for i in 0..d {
        for j in (i + 1)..d {
            for k in (j + 1)..d {
                let mut acc = vec![Scalar::zero(); d];
                for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                    let inner = &g.consts[b][c];
                    for (m, coef) in inner.iter().enumerate() {
                        add_scaled(&mut acc, coef, &g.consts[a][m]);
                    }
                }
                if acc.iter().any(|x| !x.is_zero()) {
                    return Ok(Some(Violation::Jacobi { i, j, k }));
                }
            }
        }
    }
    Ok(None)
}

impl FiniteLieAlgebra {
    /// Validates antisymmetry and Jacobi.
    pub fn new(consts: Vec<Vec<Vec<Scalar>>>) -> Result<Self> {
        if let Some(v) = validate_lie_algebra(&consts)? {
            return Err(JetError::NotLieAlgebra(format!("{v:?}")));
        }
        Ok(FiniteLieAlgebra { dim: consts.len(), consts })
    }

    /// Builds from nonzero brackets `[e_i, e_j] = Σ c e_k` listed once per `i < j`.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, BracketTerms)]) -> Result<Self> {
        let mut consts = vec![vec![vec![Scalar::zero(); dim]; dim]; dim];
        for (i, j, terms) in brackets {
            if *i >= dim || *j >= dim {
                return Err(JetError::Invalid(format!("basis index out of range in bracket ({i},{j})")));
            }
            for (k, c) in terms {
                if *k >= dim {
                    return Err(JetError::Invalid(format!("basis index {k} out of range")));
                }
                consts[*i][*j][*k] += c;
                consts[*j][*i][*k] -= c;
            }
        }
        FiniteLieAlgebra::new(consts)
    }

    pub fn abelian(dim: usize) -> Self {
        FiniteLieAlgebra { dim, consts: vec![vec![vec![Scalar::zero(); dim]; dim]; dim] }
    }

    /// `sl(2)` in the basis `(h, e, f)`: `[h,e] = 2e`, `[h,f] = −2f`, `[e,f] = h`.
    pub fn sl2() -> Self {
        FiniteLieAlgebra::from_brackets(
            3,
            &[(0, 1, vec![(1, int(2))]), (0, 2, vec![(2, int(-2))]), (1, 2, vec![(0, int(1))])],
        )
        .expect("sl(2) is a Lie algebra")
    }

    /// The 2-dimensional nonabelian algebra `[e_0, e_1] = e_1`.
    pub fn affine_line() -> Self {
        FiniteLieAlgebra::from_brackets(2, &[(0, 1, vec![(1, int(1))])]).expect("aff(1)")
    }

    /// Heisenberg algebra `[x, y] = z`.
    pub fn heisenberg() -> Self {
        FiniteLieAlgebra::from_brackets(3, &[(0, 1, vec![(2, int(1))])]).expect("heisenberg")
    }

    /// `gl(n)` in the basis of matrix units `E_{ab}` at index `a·n + b`.
    pub fn gl(n: usize) -> Self {
        let d = n * n;
        let mut consts = vec![vec![vec![Scalar::zero(); d]; d]; d];
        // [E_ab, E_cd] = δ_bc E_ad − δ_da E_cb
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for e in 0..n {
                        let (x, y) = (a * n + b, c * n + e);
                        if b == c {
                            consts[x][y][a * n + e] += Scalar::one();
                        }
                        if e == a {
                            consts[x][y][c * n + b] -= Scalar::one();
                        }
                    }
                }
            }
        }
        FiniteLieAlgebra { dim: d, consts }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn consts(&self) -> &[Vec<Vec<Scalar>>] {
        &self.consts
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Scalar] {
        &self.consts[i][j]
    }

    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                add_scaled(&mut out, &(xi * yj), &self.consts[i][j]);
            }
        }
        out
    }

    /// `ad(e_i)` as a matrix acting on coordinate columns.
    pub fn ad(&self, i: usize) -> Mat {
        (0..self.dim).map(|k| (0..self.dim).map(|j| self.consts[i][j][k].clone()).collect()).collect()
    }

    /// Span of all brackets `[a, b]`, `a ∈ A`, `b ∈ B` (rows are coordinate vectors).
    pub fn bracket_span(&self, a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Echelon {
        let mut e = Echelon::new(self.dim);
        for x in a {
            for y in b {
                e.insert(sparse_from_dense(&self.bracket(x, y)));
            }
        }
        e
    }

    pub fn is_subalgebra(&self, basis: &[Vec<Scalar>]) -> bool {
        let span = Echelon::from_dense(self.dim, basis);
        basis.iter().all(|x| basis.iter().all(|y| span.contains(sparse_from_dense(&self.bracket(x, y)))))
    }

    pub fn is_ideal(&self, basis: &[Vec<Scalar>]) -> bool {
        let span = Echelon::from_dense(self.dim, basis);
        (0..self.dim).all(|i| {
            let e = unit(self.dim, i);
            basis.iter().all(|y| span.contains(sparse_from_dense(&self.bracket(&e, y))))
        })
    }

    /// The algebra induced on a subalgebra, in the coordinates of `basis`.
    pub fn subalgebra(&self, basis: &[Vec<Scalar>]) -> Result<FiniteLieAlgebra> {
        let d = basis.len();
        let mut consts = vec![vec![vec![Scalar::zero(); d]; d]; d];
        for i in 0..d {
            for j in 0..d {
                let v = self.bracket(&basis[i], &basis[j]);
                consts[i][j] = coordinates(basis, &v)
                    .ok_or_else(|| JetError::NotSubalgebra(format!("[b_{i}, b_{j}] leaves the span")))?;
            }
        }
        FiniteLieAlgebra::new(consts)
    }
}

pub(crate) fn unit(d: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); d];
    v[i] = Scalar::one();
    v
}

/// Coordinates of `v` in the (independent) family `basis`, if `v` lies in its span.
pub fn coordinates(basis: &[Vec<Scalar>], v: &[Scalar]) -> Option<Vec<Scalar>> {
    let ncols = basis.len();
    let rows: Vec<(SparseRow, Scalar)> = (0..v.len())
        .map(|r| (sparse_from_dense(&basis.iter().map(|b| b[r].clone()).collect::<Vec<_>>()), v[r].clone()))
        .collect();
    crate::linalg::solve_sparse(&rows, ncols)
}

/// Lower central series and the derived flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NilpotencyReport {
    /// `dim g^1 = dim g, dim g^2 = dim [g,g], …` until the series stabilizes.
    pub lower_central_series: Vec<usize>,
    pub nilpotent: bool,
    pub abelian: bool,
}

pub fn nilpotency_analysis(g: &FiniteLieAlgebra) -> NilpotencyReport {
    let all: Vec<Vec<Scalar>> = (0..g.dim).map(|i| unit(g.dim, i)).collect();
    let mut current = all.clone();
    let mut dims = vec![g.dim];
    loop {
        let next = g.bracket_span(&all, &current).basis_rows();
        let d = next.len();
        let stable = d == *dims.last().unwrap();
        if !stable {
            dims.push(d);
        }
        if stable || d == 0 {
            break;
        }
        current = next;
    }
    let last = *dims.last().unwrap();
    NilpotencyReport {
        abelian: g.dim == 0 || dims.get(1) == Some(&0),
        nilpotent: last == 0,
        lower_central_series: dims,
    }
}

/// A representation `ρ: g → gl(V)` given by the matrices `ρ(e_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieModule {
    dim: usize,
    action: Vec<Mat>,
}

impl LieModule {
    /// Checks `ρ([e_i, e_j]) = [ρ(e_i), ρ(e_j)]`.
    pub fn new(g: &FiniteLieAlgebra, action: Vec<Mat>) -> Result<Self> {
        check_dim(g.dim, action.len())?;
        let m = action.first().map_or(0, |a| a.len());
        for a in &action {
            check_dim(m, a.len())?;
            for row in a {
                check_dim(m, row.len())?;
            }
        }
        let module = LieModule { dim: m, action };
        for i in 0..g.dim {
            for j in (i + 1)..g.dim {
                let lhs = module.act_element(&g.consts[i][j]);
                let ab = mat_mul(&module.action[i], &module.action[j]);
                let ba = mat_mul(&module.action[j], &module.action[i]);
                let rhs: Mat = ab.iter().zip(&ba).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect();
                if lhs != rhs {
                    return Err(JetError::Invalid(format!("not a representation on ({i},{j})")));
                }
            }
        }
        Ok(module)
    }

    pub fn trivial(g: &FiniteLieAlgebra, m: usize) -> Self {
        LieModule { dim: m, action: vec![vec![vec![Scalar::zero(); m]; m]; g.dim] }
    }

    pub fn adjoint(g: &FiniteLieAlgebra) -> Self {
        LieModule { dim: g.dim, action: (0..g.dim).map(|i| g.ad(i)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action(&self) -> &[Mat] {
        &self.action
    }

    fn act_element(&self, x: &[Scalar]) -> Mat {
        let mut out = vec![vec![Scalar::zero(); self.dim]; self.dim];
        for (c, a) in x.iter().zip(&self.action) {
            if c.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(a) {
                add_scaled(o, c, r);
            }
        }
        out
    }

    fn apply(&self, i: usize, v: &[Scalar]) -> Vec<Scalar> {
        crate::linalg::mat_vec(&self.action[i], v)
    }
}

/// Strictly increasing `r`-tuples from `0..d`, in lexicographic order.
pub fn increasing_tuples(d: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for x in start..d {
            cur.push(x);
            rec(x + 1, d, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, r, &mut Vec::with_capacity(r), &mut out);
    out
}

/// Sign and sorted form of a tuple of distinct indices; `None` on a repeat.
pub fn sort_with_sign(t: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = t.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Cochains `∧^r g* ⊗ V`, coordinates indexed by `(tuple position) · m + v`.
struct CochainSpace {
    tuples: Vec<Vec<usize>>,
    index: std::collections::HashMap<Vec<usize>, usize>,
    m: usize,
}

impl CochainSpace {
    fn new(d: usize, r: usize, m: usize) -> Result<Self> {
        let tuples = increasing_tuples(d, r);
        if tuples.len() * m > MAX_COCHAIN_DIM {
            return Err(JetError::ResourceBound(format!(
                "cochain space of degree {r} has dimension {} > {MAX_COCHAIN_DIM}",
                tuples.len() * m
            )));
        }
        let index = tuples.iter().enumerate().map(|(p, t)| (t.clone(), p)).collect();
        Ok(CochainSpace { tuples, index, m })
    }

    fn dim(&self) -> usize {
        self.tuples.len() * self.m
    }

    /// Adds `c · value(E_t)` of a cochain to `acc` at an arbitrary (unsorted) tuple.
    fn eval_into(&self, cochain: &[Scalar], t: &[usize], c: &Scalar, acc: &mut [Scalar]) {
        if let Some((s, sign)) = sort_with_sign(t) {
            let p = self.index[&s];
            let coef = if sign > 0 { c.clone() } else { -c.clone() };
            add_scaled(acc, &coef, &cochain[p * self.m..(p + 1) * self.m]);
        }
    }
}

/// `(dc)(x_0..x_r) = Σ (−1)^i ρ(x_i) c(..x̂_i..) + Σ_{i<j} (−1)^{i+j} c([x_i,x_j], ..x̂_i..x̂_j..)`
fn ce_differential(g: &FiniteLieAlgebra, v: &LieModule, src: &CochainSpace, dst: &CochainSpace, c: &[Scalar]) -> Vec<Scalar> {
    let m = v.dim;
    let mut out = vec![Scalar::zero(); dst.dim()];
    for (p, t) in dst.tuples.iter().enumerate() {
        let mut acc = vec![Scalar::zero(); m];
        for i in 0..t.len() {
            let rest: Vec<usize> = t.iter().enumerate().filter(|(q, _)| *q != i).map(|(_, x)| *x).collect();
            let mut val = vec![Scalar::zero(); m];
            src.eval_into(c, &rest, &Scalar::one(), &mut val);
            let sign = if i % 2 == 0 { Scalar::one() } else { -Scalar::one() };
            add_scaled(&mut acc, &sign, &v.apply(t[i], &val));
        }
        for i in 0..t.len() {
            for j in (i + 1)..t.len() {
                let sign = if (i + j) % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                let rest: Vec<usize> =
                    t.iter().enumerate().filter(|(q, _)| *q != i && *q != j).map(|(_, x)| *x).collect();
                for (k, ck) in g.consts[t[i]][t[j]].iter().enumerate() {
                    if ck.is_zero() {
                        continue;
                    }
                    let mut tuple = vec![k];
                    tuple.extend(&rest);
                    src.eval_into(c, &tuple, &(&sign * ck), &mut acc);
                }
            }
        }
        out[p * m..(p + 1) * m].clone_from_slice(&acc);
    }
    out
}

/// Matrix of `d` on the subspace spanned by `basis` (images as rows).
fn image_rank(g: &FiniteLieAlgebra, v: &LieModule, src: &CochainSpace, dst: &CochainSpace, basis: &[Vec<Scalar>]) -> usize {
    let mut e = Echelon::new(dst.dim());
    for b in basis {
        e.insert(sparse_from_dense(&ce_differential(g, v, src, dst, b)));
    }
    e.rank()
}

fn standard_basis(d: usize) -> Vec<Vec<Scalar>> {
    identity(d)
}

/// `dim H^r(g, V)` for `r = 0..=r_max`.
pub fn ce_cohomology_dims(g: &FiniteLieAlgebra, v: &LieModule, r_max: usize) -> Result<Vec<usize>> {
    relative_ce_cohomology_dims(g, &[], v, r_max)
}

/// Relative cochains: `i_s c = 0` and `θ_s c = 0` for all `s` in `sub`.
fn relative_constraints(g: &FiniteLieAlgebra, sub: &[Vec<Scalar>], v: &LieModule, sp: &CochainSpace, r: usize) -> Echelon {
    let dimc = sp.dim();
    let m = v.dim;
    let mut cons = Echelon::new(dimc);
    if sub.is_empty() {
        return cons;
    }
    let lower = CochainSpace::new(g.dim, r.saturating_sub(1), m).expect("smaller than the current space");
    // Constraint maps are built column by column on standard basis cochains.
    let mut rows_contract: Vec<Vec<Scalar>> = Vec::new();
    let mut rows_theta: Vec<Vec<Scalar>> = Vec::new();
    for s in sub {
        // i_s: C^r → C^{r−1}
        if r >= 1 {
            let mut mat = vec![vec![Scalar::zero(); dimc]; lower.dim()];
            for col in 0..dimc {
                let c = unit(dimc, col);
                for (p, t) in lower.tuples.iter().enumerate() {
                    let mut acc = vec![Scalar::zero(); m];
                    for (a, sa) in s.iter().enumerate() {
                        if sa.is_zero() {
                            continue;
                        }
                        let mut tuple = vec![a];
                        tuple.extend(t);
                        sp.eval_into(&c, &tuple, sa, &mut acc);
                    }
                    for (q, x) in acc.into_iter().enumerate() {
                        mat[p * m + q][col] = x;
                    }
                }
            }
            rows_contract.extend(mat);
        }
        // θ_s c (x_1..x_r) = ρ(s) c(x..) − Σ_i c(.., [s, x_i], ..)
        let mut mat = vec![vec![Scalar::zero(); dimc]; dimc];
        for col in 0..dimc {
            let c = unit(dimc, col);
            for (p, t) in sp.tuples.iter().enumerate() {
                let mut acc = vec![Scalar::zero(); m];
                let mut val = vec![Scalar::zero(); m];
                sp.eval_into(&c, t, &Scalar::one(), &mut val);
                let rs = v.act_element(s);
                add_scaled(&mut acc, &Scalar::one(), &crate::linalg::mat_vec(&rs, &val));
                for i in 0..t.len() {
                    let e_i = unit(g.dim, t[i]);
                    let br = g.bracket(s, &e_i);
                    for (k, bk) in br.iter().enumerate() {
                        if bk.is_zero() {
                            continue;
                        }
                        let mut tuple = t.clone();
                        tuple[i] = k;
                        sp.eval_into(&c, &tuple, &-bk.clone(), &mut acc);
                    }
                }
                for (q, x) in acc.into_iter().enumerate() {
                    mat[p * m + q][col] = x;
                }
            }
        }
        rows_theta.extend(mat);
    }
    for r in rows_contract.into_iter().chain(rows_theta) {
        cons.insert(sparse_from_dense(&r));
    }
    cons
}

/// `dim H^r(g, s, V)` for `r = 0..=r_max`; with `sub` empty this is absolute cohomology.
pub fn relative_ce_cohomology_dims(
    g: &FiniteLieAlgebra,
    sub: &[Vec<Scalar>],
    v: &LieModule,
    r_max: usize,
) -> Result<Vec<usize>> {
    check_dim(g.dim, v.action.len())?;
    for s in sub {
        check_dim(g.dim, s.len())?;
    }
    if !g.is_subalgebra(sub) {
        return Err(JetError::NotSubalgebra("relative cohomology needs a subalgebra".into()));
    }
    let m = v.dim;
    let spaces: Vec<CochainSpace> = (0..=r_max + 1).map(|r| CochainSpace::new(g.dim, r, m)).collect::<Result<_>>()?;
    let bases: Vec<Vec<Vec<Scalar>>> = spaces
        .iter()
        .enumerate()
        .map(|(r, sp)| {
            if sub.is_empty() {
                standard_basis(sp.dim())
            } else {
                relative_constraints(g, sub, v, sp, r).nullspace()
            }
        })
        .collect();
    let ranks: Vec<usize> = (0..=r_max)
        .map(|r| image_rank(g, v, &spaces[r], &spaces[r + 1], &bases[r]))
        .collect();
    Ok((0..=r_max)
        .map(|r| bases[r].len() - ranks[r] - if r == 0 { 0 } else { ranks[r - 1] })
        .collect())
}

/// Checks `d ∘ d = 0` on every standard basis cochain of degree `r`.
pub fn ce_square_vanishes(g: &FiniteLieAlgebra, v: &LieModule, r: usize) -> Result<bool> {
    let s0 = CochainSpace::new(g.dim, r, v.dim)?;
    let s1 = CochainSpace::new(g.dim, r + 1, v.dim)?;
    let s2 = CochainSpace::new(g.dim, r + 2, v.dim)?;
    Ok((0..s0.dim()).all(|col| {
        let c = unit(s0.dim(), col);
        let dc = ce_differential(g, v, &s0, &s1, &c);
        ce_differential(g, v, &s1, &s2, &dc).iter().all(|x| x.is_zero())
    }))
}

/// An extension `0 → A → E → Q → 0` with a linear section `σ: Q → E`.
///
/// `projection` is the matrix of `E → Q` (rows indexed by `Q`), `section`
/// the matrix of `σ` (rows indexed by `E`). The ideal is `ker(projection)`.
#[derive(Clone, Debug)]
pub struct ExtensionData {
    pub big: FiniteLieAlgebra,
    pub quotient: FiniteLieAlgebra,
    pub projection: Mat,
    pub section: Mat,
    /// Basis of `A` as coordinate vectors in `E`.
    pub ideal: Vec<Vec<Scalar>>,
}

impl ExtensionData {
    pub fn new(big: FiniteLieAlgebra, quotient: FiniteLieAlgebra, projection: Mat, section: Mat) -> Result<Self> {
        let (de, dq) = (big.dim, quotient.dim);
        check_dim(dq, projection.len())?;
        check_dim(de, section.len())?;
        if projection.iter().any(|r| r.len() != de) || section.iter().any(|r| r.len() != dq) {
            return Err(JetError::InvalidExtension("projection/section shapes".into()));
        }
        if mat_mul(&projection, &section) != identity(dq) {
            return Err(JetError::InvalidExtension("projection ∘ section is not the identity".into()));
        }
        // projection must be a surjective homomorphism
        for i in 0..de {
            for j in (i + 1)..de {
                let lhs = crate::linalg::mat_vec(&projection, &big.consts[i][j]);
                let pi = crate::linalg::mat_vec(&projection, &unit(de, i));
                let pj = crate::linalg::mat_vec(&projection, &unit(de, j));
                if lhs != quotient.bracket(&pi, &pj) {
                    return Err(JetError::InvalidExtension(format!("projection is not a homomorphism on ({i},{j})")));
                }
            }
        }
        let ideal = Echelon::from_dense(de, &projection).nullspace();
        Ok(ExtensionData { big, quotient, projection, section, ideal })
    }

    fn sigma(&self, q: &[Scalar]) -> Vec<Scalar> {
        crate::linalg::mat_vec(&self.section, q)
    }

    fn ideal_coords(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        coordinates(&self.ideal, x).ok_or_else(|| JetError::InvalidExtension("value outside the ideal".into()))
    }

    pub fn ideal_is_abelian(&self) -> bool {
        self.ideal.iter().all(|a| self.ideal.iter().all(|b| self.big.bracket(a, b).iter().all(|x| x.is_zero())))
    }

    /// `Q`-module structure on `A`: `q · a = [σ q, a]` (requires `A` abelian).
    pub fn module(&self) -> Result<LieModule> {
        if !self.ideal_is_abelian() {
            return Err(JetError::NonAbelianKernel);
        }
        let dq = self.quotient.dim;
        let da = self.ideal.len();
        let mut action = Vec::with_capacity(dq);
        for i in 0..dq {
            let s = self.sigma(&unit(dq, i));
            let mut m = vec![vec![Scalar::zero(); da]; da];
            for (c, a) in self.ideal.iter().enumerate() {
                let coords = self.ideal_coords(&self.big.bracket(&s, a))?;
                for (r, x) in coords.into_iter().enumerate() {
                    m[r][c] = x;
                }
            }
            action.push(m);
        }
        LieModule::new(&self.quotient, action)
    }
}

/// The 2-cocycle `ω(q_i, q_j) = [σq_i, σq_j] − σ[q_i, q_j]` in ideal coordinates,
/// indexed by increasing pairs `(i, j)`.
pub fn extension_two_cocycle(ext: &ExtensionData) -> Result<Vec<(BasisPair, Vec<Scalar>)>> {
    let dq = ext.quotient.dim;
    let mut out = Vec::new();
    for i in 0..dq {
        for j in (i + 1)..dq {
            let si = ext.sigma(&unit(dq, i));
            let sj = ext.sigma(&unit(dq, j));
            let mut w = ext.big.bracket(&si, &sj);
            let s_br = ext.sigma(&ext.quotient.consts[i][j]);
            for (x, y) in w.iter_mut().zip(&s_br) {
                *x -= y;
            }
            out.push(((i, j), ext.ideal_coords(&w)?));
        }
    }
    Ok(out)
}

/// Flat cochain vector of the cocycle, in the layout of the CE complex.
fn cocycle_vector(ext: &ExtensionData) -> Result<Vec<Scalar>> {
    Ok(extension_two_cocycle(ext)?.into_iter().flat_map(|(_, v)| v).collect())
}

/// Whether `ω` is a 2-cocycle for the module of [`ExtensionData::module`].
pub fn cocycle_is_closed(ext: &ExtensionData) -> Result<bool> {
    let v = ext.module()?;
    let s2 = CochainSpace::new(ext.quotient.dim, 2, v.dim)?;
    let s3 = CochainSpace::new(ext.quotient.dim, 3, v.dim)?;
    let w = cocycle_vector(ext)?;
    Ok(ce_differential(&ext.quotient, &v, &s2, &s3, &w).iter().all(|x| x.is_zero()))
}

/// Whether `a − b` is a coboundary `dh`, `h ∈ C^1(Q, A)`.
pub fn differ_by_coboundary(q: &FiniteLieAlgebra, v: &LieModule, a: &[Scalar], b: &[Scalar]) -> Result<bool> {
    let s1 = CochainSpace::new(q.dim, 1, v.dim)?;
    let s2 = CochainSpace::new(q.dim, 2, v.dim)?;
    let diff: Vec<Scalar> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mut e = Echelon::new(s2.dim());
    for col in 0..s1.dim() {
        e.insert(sparse_from_dense(&ce_differential(q, v, &s1, &s2, &unit(s1.dim(), col))));
    }
    Ok(e.contains(sparse_from_dense(&diff)))
}

/// `true` iff the class of the extension cocycle vanishes in `H²(Q, A)`.
pub fn is_split(ext: &ExtensionData) -> Result<bool> {
    let v = ext.module()?;
    let w = cocycle_vector(ext)?;
    differ_by_coboundary(&ext.quotient, &v, &w, &vec![Scalar::zero(); w.len()])
}

/// Cocycle vector for a different section (used to test section independence).
pub fn cocycle_for_section(ext: &ExtensionData, section: Mat) -> Result<Vec<Scalar>> {
    let other = ExtensionData::new(ext.big.clone(), ext.quotient.clone(), ext.projection.clone(), section)?;
    // Both cocycles must be written in the same ideal basis.
    let mut o = other;
    o.ideal = ext.ideal.clone();
    cocycle_vector(&o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_valid_and_perturbed_invalid() {
        let g = FiniteLieAlgebra::sl2();
        assert_eq!(validate_lie_algebra(g.consts()).unwrap(), None);
        let mut c = g.consts().to_vec();
        // flip [e, f] = h to −h on one side only: antisymmetry witness
        c[1][2][0] = int(-1);
        assert_eq!(validate_lie_algebra(&c).unwrap(), Some(Violation::Antisymmetry { i: 1, j: 2 }));
        // flip consistently: Jacobi witness
        c[2][1][0] = int(1);
        assert_eq!(validate_lie_algebra(&c).unwrap(), None);
        let mut bad = c.clone();
        bad[0][2][2] = int(2);
        bad[2][0][2] = int(-2);
        assert!(matches!(validate_lie_algebra(&bad).unwrap(), Some(Violation::Jacobi { .. })));
    }

    #[test]
    fn cohomology_of_small_algebras() {
        let a1 = FiniteLieAlgebra::abelian(1);
        assert_eq!(ce_cohomology_dims(&a1, &LieModule::trivial(&a1, 1), 1).unwrap(), vec![1, 1]);
        let aff = FiniteLieAlgebra::affine_line();
        assert_eq!(ce_cohomology_dims(&aff, &LieModule::trivial(&aff, 1), 2).unwrap(), vec![1, 1, 0]);
        let sl2 = FiniteLieAlgebra::sl2();
        assert_eq!(ce_cohomology_dims(&sl2, &LieModule::adjoint(&sl2), 1).unwrap(), vec![0, 0]);
        for r in 0..2 {
            assert!(ce_square_vanishes(&sl2, &LieModule::adjoint(&sl2), r).unwrap());
        }
    }

    #[test]
    fn relative_cohomology_edge_cases() {
        let aff = FiniteLieAlgebra::affine_line();
        let triv = LieModule::trivial(&aff, 1);
        let all = identity(2);
        assert_eq!(relative_ce_cohomology_dims(&aff, &all, &triv, 2).unwrap(), vec![1, 0, 0]);
        assert_eq!(
            relative_ce_cohomology_dims(&aff, &[], &triv, 2).unwrap(),
            ce_cohomology_dims(&aff, &triv, 2).unwrap()
        );
        // span{e, f} is not closed in sl(2)
        let sl2 = FiniteLieAlgebra::sl2();
        let not_sub = vec![vec![int(0), int(1), int(0)], vec![int(0), int(0), int(1)]];
        let err = relative_ce_cohomology_dims(&sl2, &not_sub, &LieModule::trivial(&sl2, 1), 1).unwrap_err();
        assert!(matches!(err, JetError::NotSubalgebra(_)));
        // derived line of aff(1), trivial coefficients
        let line = vec![vec![int(0), int(1)]];
        assert_eq!(relative_ce_cohomology_dims(&aff, &line, &triv, 2).unwrap(), vec![1, 1, 0]);
    }

    #[test]
    fn heisenberg_extension_does_not_split() {
        let h = FiniteLieAlgebra::heisenberg();
        let q = FiniteLieAlgebra::abelian(2);
        let proj = vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)]];
        let sec = vec![vec![int(1), int(0)], vec![int(0), int(1)], vec![int(0), int(0)]];
        let ext = ExtensionData::new(h, q, proj, sec).unwrap();
        assert!(cocycle_is_closed(&ext).unwrap());
        assert!(!is_split(&ext).unwrap());
    }

    #[test]
    fn direct_sum_splits() {
        let aff = FiniteLieAlgebra::affine_line();
        // aff ⊕ ℝ with the projection onto aff
        let e = FiniteLieAlgebra::from_brackets(3, &[(0, 1, vec![(1, int(1))])]).unwrap();
        let proj = vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)]];
        let sec = vec![vec![int(1), int(0)], vec![int(0), int(1)], vec![int(0), int(0)]];
        let ext = ExtensionData::new(e, aff, proj, sec).unwrap();
        assert!(extension_two_cocycle(&ext).unwrap().iter().all(|(_, v)| v.iter().all(|x| x.is_zero())));
        assert!(is_split(&ext).unwrap());
    }

    #[test]
    fn lower_central_series() {
        let r = nilpotency_analysis(&FiniteLieAlgebra::heisenberg());
        assert_eq!(r.lower_central_series, vec![3, 1, 0]);
        assert!(r.nilpotent && !r.abelian);
        let a = nilpotency_analysis(&FiniteLieAlgebra::abelian(2));
        assert_eq!(a.lower_central_series, vec![2, 0]);
        assert!(a.abelian);
        let s = nilpotency_analysis(&FiniteLieAlgebra::sl2());
        assert_eq!(s.lower_central_series, vec![3]);
        assert!(!s.nilpotent);
    }

    #[test]
    fn gl2_is_a_lie_algebra() {
        assert_eq!(validate_lie_algebra(FiniteLieAlgebra::gl(2).consts()).unwrap(), None);
    }
}
