//! Exact rational vectors, matrices and the handful of elimination routines
//! the rest of the crate needs. Nothing here touches floating point.

mod rational;

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use rational::Rational;

use crate::error::{Error, Result};

/// A vector in `Q^d`. Ordered lexicographically by coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QVector(Vec<Rational>);

impl QVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        QVector(coords)
    }

    pub fn zero(d: usize) -> Self {
        QVector(vec![Rational::zero(); d])
    }

    /// Standard basis vector `e_i` (0-based).
    pub fn unit(d: usize, i: usize) -> Self {
        let mut v = Self::zero(d);
        v.0[i] = Rational::one();
        v
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        QVector(coords.iter().map(|&c| Rational::from_int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    pub fn dot(&self, other: &QVector) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, other: &QVector) -> QVector {
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &QVector) -> QVector {
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Rational) -> QVector {
        QVector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn neg(&self) -> QVector {
        QVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Index<usize> for QVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl fmt::Debug for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix whose rows are the given vectors. `cols` is needed
    /// for the empty case.
    pub fn from_rows(rows: &[QVector], cols: usize) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.dim(), cols, "ragged rows");
            entries.extend(r.coords().iter().cloned());
        }
        QMatrix { rows: rows.len(), cols, entries }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let vs: Vec<QVector> = rows.iter().map(|r| QVector::from_ints(r)).collect();
        Self::from_rows(&vs, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> QVector {
        QVector::new(self.entries[r * self.cols..(r + 1) * self.cols].to_vec())
    }

    pub fn column(&self, c: usize) -> QVector {
        QVector::new((0..self.rows).map(|r| self.get(r, c).clone()).collect())
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &QVector) -> QVector {
        assert_eq!(v.dim(), self.cols);
        QVector::new((0..self.rows).map(|r| self.row(r).dot(v)).collect())
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let s: Rational = (0..self.cols).map(|k| self.get(r, k) * other.get(k, c)).sum();
                out.set(r, c, s);
            }
        }
        out
    }

    /// Rows scaled to primitive integer vectors (rank-preserving).
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = &self.entries[r * self.cols..(r + 1) * self.cols];
                let lcm = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
            })
            .collect()
    }
}

/// Fraction-free (Bareiss) forward elimination on integer rows. Returns the
/// rank and the pivot columns.
fn bareiss_rank(mut m: Vec<Vec<BigInt>>, cols: usize) -> (usize, Vec<usize>) {
    let rows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let v = (&m[r][c] * &m[rank][col] - &m[r][col] * &m[rank][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        pivots.push(col);
        rank += 1;
    }
    (rank, pivots)
}

/// Exact rank over the rationals.
pub fn rank(m: &QMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    bareiss_rank(m.integer_rows(), m.cols).0
}

/// Rank of a list of vectors of common dimension `d`.
pub fn rank_of(vectors: &[QVector], d: usize) -> usize {
    rank(&QMatrix::from_rows(vectors, d))
}

/// Indices of a maximal linearly independent subset, chosen greedily in
/// input order.
pub fn independent_subset(vectors: &[QVector], d: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut current: Vec<QVector> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if current.len() == d {
            break;
        }
        current.push(v.clone());
        if rank_of(&current, d) == current.len() {
            chosen.push(i);
        } else {
            current.pop();
        }
    }
    chosen
}

/// Affine dimension of a point set (`-1` for the empty set).
pub fn affine_dim(points: &[QVector]) -> isize {
    let Some(first) = points.first() else {
        return -1;
    };
    let diffs: Vec<QVector> = points[1..].iter().map(|p| p.sub(first)).collect();
    rank_of(&diffs, first.dim()) as isize
}

/// Result of [`solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub x: QVector,
    /// True when the system has more than one solution; `x` sets every free
    /// variable to zero.
    pub underdetermined: bool,
}

/// Reduced row echelon form of `m` in place; returns pivot columns.
fn rref(m: &mut QMatrix) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
            continue;
        };
        if p != row {
            for c in 0..m.cols {
                let a = m.get(row, c).clone();
                let b = m.get(p, c).clone();
                m.set(row, c, b);
                m.set(p, c, a);
            }
        }
        let inv = m.get(row, col).recip();
        for c in 0..m.cols {
            let v = m.get(row, c) * &inv;
            m.set(row, c, v);
        }
        for r in 0..m.rows {
            if r == row || m.get(r, col).is_zero() {
                continue;
            }
            let f = m.get(r, col).clone();
            for c in 0..m.cols {
                let v = m.get(r, c) - &(&f * m.get(row, c));
                m.set(r, c, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Solves `a x = rhs` exactly. Returns `None` when the system is
/// inconsistent.
pub fn solve(a: &QMatrix, rhs: &QVector) -> Result<Option<Solution>> {
    if rhs.dim() != a.rows {
        return Err(Error::DimensionMismatch { expected: a.rows, found: rhs.dim() });
    }
    let n = a.cols;
    let mut aug = QMatrix::zeros(a.rows, n + 1);
    for r in 0..a.rows {
        for c in 0..n {
            aug.set(r, c, a.get(r, c).clone());
        }
        aug.set(r, n, rhs[r].clone());
    }
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug.get(r, n).clone();
    }
    Ok(Some(Solution { x: QVector::new(x), underdetermined: pivots.len() < n }))
}

/// Inverse of a square matrix, or `SingularBasis`.
pub fn inverse(a: &QMatrix) -> Result<QMatrix> {
    assert_eq!(a.rows, a.cols, "inverse of a non-square matrix");
    let n = a.rows;
    let mut aug = QMatrix::zeros(n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            aug.set(r, c, a.get(r, c).clone());
        }
        aug.set(r, n + r, Rational::one());
    }
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::SingularBasis);
    }
    let mut inv = QMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            inv.set(r, c, aug.get(r, n + c).clone());
        }
    }
    Ok(inv)
}

/// Dual basis: returns `a_j*` with `<a_i, a_j*> = [i == j]`.
pub fn dual_basis(basis: &[QVector]) -> Result<Vec<QVector>> {
    let d = basis.len();
    if d == 0 {
        return Err(Error::SingularBasis);
    }
    for v in basis {
        if v.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: v.dim() });
        }
    }
    let inv = inverse(&QMatrix::from_rows(basis, d))?;
    Ok((0..d).map(|j| inv.column(j)).collect())
}

/// Orthogonal projection of `x` onto `span(spanning)`, via the Gram matrix
/// of a basis of the span. Stays rational.
pub fn project_onto_span(x: &QVector, spanning: &[QVector]) -> QVector {
    let d = x.dim();
    let idx = independent_subset(spanning, d);
    if idx.is_empty() {
        return QVector::zero(d);
    }
    let basis: Vec<QVector> = idx.iter().map(|&i| spanning[i].clone()).collect();
    let k = basis.len();
    let mut gram = QMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram.set(i, j, basis[i].dot(&basis[j]));
        }
    }
    let rhs = QVector::new(basis.iter().map(|b| b.dot(x)).collect());
    let coeffs = solve(&gram, &rhs)
        .expect("gram system is square")
        .expect("gram matrix of a basis is invertible")
        .x;
    let mut y = QVector::zero(d);
    for (b, c) in basis.iter().zip(coeffs.coords()) {
        y = y.add(&b.scale(c));
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(v: &[i64]) -> QVector {
        QVector::from_ints(v)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&QMatrix::identity(2)), 2);
        assert_eq!(rank(&QMatrix::zeros(3, 3)), 0);
        assert_eq!(rank(&QMatrix::from_ints(&[&[1, 0], &[0, 1], &[1, 1]])), 2);
    }

    #[test]
    fn solve_examples() {
        let s = solve(&QMatrix::identity(2), &q(&[1, 0])).unwrap().unwrap();
        assert_eq!(s.x, q(&[1, 0]));
        assert!(!s.underdetermined);

        let a = QMatrix::from_ints(&[&[1, 1]]);
        let s = solve(&a, &q(&[1])).unwrap().unwrap();
        assert!(s.underdetermined);
        assert_eq!(a.mul_vec(&s.x), q(&[1]));

        let a = QMatrix::from_ints(&[&[1, 0], &[1, 0]]);
        assert_eq!(solve(&a, &q(&[0, 1])).unwrap(), None);
    }

    #[test]
    fn dual_basis_examples() {
        let std = vec![q(&[1, 0]), q(&[0, 1])];
        assert_eq!(dual_basis(&std).unwrap(), std);
        let b = vec![q(&[1, 0]), q(&[1, 1])];
        let dual = dual_basis(&b).unwrap();
        assert_eq!(dual, vec![q(&[1, -1]), q(&[0, 1])]);
        for (i, a) in b.iter().enumerate() {
            for (j, s) in dual.iter().enumerate() {
                assert_eq!(a.dot(s), Rational::from_int((i == j) as i64));
            }
        }
        assert_eq!(dual_basis(&[q(&[1, 0]), q(&[2, 0])]), Err(Error::SingularBasis));
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_onto_span(&q(&[1, 1]), &[q(&[1, 0])]), q(&[1, 0]));
        assert_eq!(project_onto_span(&q(&[2, 3]), &[q(&[1, 0]), q(&[0, 1])]), q(&[2, 3]));
        assert_eq!(
            project_onto_span(&q(&[0, 1, 1]), &[q(&[1, 0, 0]), q(&[0, 1, 0])]),
            q(&[0, 1, 0])
        );
        assert_eq!(project_onto_span(&q(&[1, 2]), &[q(&[0, 0])]), q(&[0, 0]));
    }

    #[test]
    fn affine_dims() {
        assert_eq!(affine_dim(&[]), -1);
        assert_eq!(affine_dim(&[q(&[1, 1])]), 0);
        assert_eq!(affine_dim(&[q(&[1, 0]), q(&[0, 1]), q(&[2, -1])]), 1);
    }

    fn small_vec(d: usize) -> impl Strategy<Value = QVector> {
        prop::collection::vec((-3i64..=3, 1i64..=3), d)
            .prop_map(|v| QVector::new(v.into_iter().map(|(p, q)| Rational::new(p, q)).collect()))
    }

    proptest! {
        #[test]
        fn dual_of_dual_is_original(basis in prop::collection::vec(small_vec(3), 3)) {
            if let Ok(dual) = dual_basis(&basis) {
                for (i, a) in basis.iter().enumerate() {
                    for (j, s) in dual.iter().enumerate() {
                        prop_assert_eq!(a.dot(s), Rational::from_int((i == j) as i64));
                    }
                }
                prop_assert_eq!(dual_basis(&dual).unwrap(), basis);
            }
        }

        #[test]
        fn projection_idempotent_and_preserves_products(
            x in small_vec(4),
            span in prop::collection::vec(small_vec(4), 1..4),
        ) {
            let y = project_onto_span(&x, &span);
            for s in &span {
                prop_assert_eq!(s.dot(&y), s.dot(&x));
            }
            prop_assert_eq!(project_onto_span(&y, &span), y);
        }

        #[test]
        fn rank_invariant_under_permutation_and_transpose(
            rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 4), 1..5),
            seed in any::<u64>(),
        ) {
            let vs: Vec<QVector> = rows.iter().map(|r| QVector::from_ints(r)).collect();
            let m = QMatrix::from_rows(&vs, 4);
            let r = rank(&m);
            prop_assert_eq!(rank(&m.transpose()), r);
            let mut rev = vs.clone();
            rev.rotate_left((seed as usize) % vs.len());
            prop_assert_eq!(rank(&QMatrix::from_rows(&rev, 4)), r);
            let swapped: Vec<QVector> = vs
                .iter()
                .map(|v| {
                    let mut c = v.coords().to_vec();
                    c.swap(0, 3);
                    QVector::new(c)
                })
                .collect();
            prop_assert_eq!(rank(&QMatrix::from_rows(&swapped, 4)), r);
        }
    }
}
