//! Exact linear algebra over the rationals.
//!
//! The workhorse is [`Echelon`], an incrementally built row-echelon basis of
//! sparse rows. Ranks, nullspaces, membership tests and linear solves all go
//! through it; no tolerance is involved anywhere.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{JetError, Result};
use crate::scalar::Scalar;

/// Sparse row: `(column, value)` pairs, strictly increasing columns, no zeros.
pub type SparseRow = Vec<(usize, Scalar)>;

pub fn sparse_from_dense(row: &[Scalar]) -> SparseRow {
    row.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (c, v.clone()))
        .collect()
}

pub fn dense_from_sparse(row: &SparseRow, ncols: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); ncols];
    for (c, x) in row {
        v[*c] = x.clone();
    }
    v
}

#[derive(Clone, Debug, Default)]
pub struct Echelon {
    ncols: usize,
    /// leading column -> row with leading coefficient 1
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: BTreeMap::new() }
    }

    pub fn from_rows<I: IntoIterator<Item = SparseRow>>(ncols: usize, rows: I) -> Self {
        let mut e = Echelon::new(ncols);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn from_dense(ncols: usize, rows: &[Vec<Scalar>]) -> Self {
        Echelon::from_rows(ncols, rows.iter().map(|r| sparse_from_dense(r)))
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.keys().copied().collect()
    }

    /// Reduces `row` against every pivot (left to right).
    pub fn reduce(&self, row: SparseRow) -> SparseRow {
        let mut work: BTreeMap<usize, Scalar> = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let mut cursor = 0usize;
        loop {
            let next = work
                .range(cursor..)
                .find(|(c, _)| self.pivots.contains_key(c))
                .map(|(c, v)| (*c, v.clone()));
            let Some((col, coef)) = next else { break };
            for (c, v) in &self.pivots[&col] {
                let e = work.entry(*c).or_insert_with(Scalar::zero);
                *e -= &coef * v;
                if e.is_zero() {
                    work.remove(c);
                }
            }
            cursor = col + 1;
        }
        work.into_iter().collect()
    }

    /// Adds a row; returns `true` if it was independent of the current rows.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let r = self.reduce(row);
        let Some((lead, lv)) = r.first().cloned() else {
            return false;
        };
        let inv = Scalar::one() / lv;
        let normalized = r.into_iter().map(|(c, v)| (c, v * &inv)).collect();
        self.pivots.insert(lead, normalized);
        true
    }

    pub fn contains(&self, row: SparseRow) -> bool {
        self.reduce(row).is_empty()
    }

    /// Fully reduced rows (RREF), keyed by pivot column.
    fn reduced(&self) -> BTreeMap<usize, SparseRow> {
        let mut done: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for (&lead, row) in self.pivots.iter().rev() {
            let mut work: BTreeMap<usize, Scalar> = row.iter().cloned().collect();
            let cols: Vec<usize> = work.keys().copied().filter(|c| *c != lead && done.contains_key(c)).collect();
            for c in cols {
                let Some(coef) = work.get(&c).cloned() else { continue };
                for (cc, v) in &done[&c] {
                    let e = work.entry(*cc).or_insert_with(Scalar::zero);
                    *e -= &coef * v;
                    if e.is_zero() {
                        work.remove(cc);
                    }
                }
            }
            done.insert(lead, work.into_iter().collect());
        }
        done
    }

    /// Basis of `{x : row · x = 0 for all rows}` as dense vectors.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let red = self.reduced();
        let free: Vec<usize> = (0..self.ncols).filter(|c| !red.contains_key(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.ncols];
                v[f] = Scalar::one();
                for (&p, row) in &red {
                    if let Some((_, x)) = row.iter().find(|(c, _)| *c == f) {
                        v[p] = -x.clone();
                    }
                }
                v
            })
            .collect()
    }

    /// Rows of the basis (echelon form, dense).
    pub fn basis_rows(&self) -> Vec<Vec<Scalar>> {
        self.pivots.values().map(|r| dense_from_sparse(r, self.ncols)).collect()
    }
}

pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    Echelon::from_dense(ncols, rows).rank()
}

pub fn nullspace(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    Echelon::from_dense(ncols, rows).nullspace()
}

/// Solves `A x = b` for sparse `A` with `ncols` unknowns; `None` if inconsistent.
/// Free variables are set to zero.
pub fn solve_sparse(rows: &[(SparseRow, Scalar)], ncols: usize) -> Option<Vec<Scalar>> {
    let mut e = Echelon::new(ncols + 1);
    for (r, b) in rows {
        let mut aug = r.clone();
        if !b.is_zero() {
            aug.push((ncols, b.clone()));
        }
        e.insert(aug);
    }
    if e.pivots.contains_key(&ncols) {
        return None;
    }
    let red = e.reduced();
    let mut x = vec![Scalar::zero(); ncols];
    for (&p, row) in &red {
        if let Some((_, v)) = row.iter().find(|(c, _)| *c == ncols) {
            x[p] = v.clone();
        }
    }
    Some(x)
}

pub fn solve(a: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let ncols = a.first().map_or(0, |r| r.len());
    let rows: Vec<(SparseRow, Scalar)> = a.iter().zip(b).map(|(r, v)| (sparse_from_dense(r), v.clone())).collect();
    solve_sparse(&rows, ncols)
}

/// Dense square matrix helpers (small sizes: metric tensors, linear parts of arrows).
pub type Mat = Vec<Vec<Scalar>>;

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    let mut acc = Scalar::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() {
                            acc += x * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Mat, v: &[Scalar]) -> Vec<Scalar> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Scalar::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Gauss–Jordan inverse; `SingularStructure` if not invertible.
pub fn inverse(a: &Mat) -> Result<Mat> {
    let n = a.len();
    let mut m: Vec<Vec<Scalar>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(JetError::SingularStructure)?;
        m.swap(col, piv);
        let inv = Scalar::one() / m[col][col].clone();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let prow = m[col].clone();
                for (x, p) in m[r].iter_mut().zip(prow) {
                    *x -= &f * p;
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn determinant(a: &Mat) -> Scalar {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Scalar::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Scalar::zero();
        };
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in (col + 1)..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &p;
                let prow = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(prow) {
                    *x -= &f * y;
                }
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    fn m(rows: &[&[i64]]) -> Mat {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        for row in &a {
            let dot = row.iter().zip(&ns[0]).fold(int(0), |acc, (x, y)| acc + x * y);
            assert_eq!(dot, int(0));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 1], &[1, -1]]);
        assert_eq!(solve(&a, &[int(2), int(0)]).unwrap(), vec![int(1), int(1)]);
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&b, &[int(1), int(3)]).is_none());
    }

    #[test]
    fn inverse_and_determinant() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert_eq!(determinant(&a), int(1));
        assert_eq!(determinant(&m(&[&[1, 2], &[2, 4]])), int(0));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_err());
        assert_eq!(inverse(&m(&[&[4]])).unwrap()[0][0], frac(1, 4));
    }

    #[test]
    fn nullspace_of_empty_system_is_everything() {
        let e = Echelon::new(3);
        assert_eq!(e.nullspace().len(), 3);
    }
}
