//! 0/1 matrices of scalar products.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::VectorFamily;
use crate::linalg::{self, QMatrix, QVector, Rational};
use crate::pair::BspPair;

/// `bits[i][j] = <a_i, b_j>` for a pair with binary products.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ProductMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    bits: Vec<String>,
}

impl TryFrom<MatrixJson> for ProductMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        let m = ProductMatrix::from_strings(&j.bits)?;
        if m.rows != j.rows || (m.rows > 0 && m.cols != j.cols) {
            return Err(Error::Parse(format!(
                "declared {}x{} but bits are {}x{}",
                j.rows, j.cols, m.rows, m.cols
            )));
        }
        Ok(ProductMatrix { cols: j.cols, ..m })
    }
}

impl From<ProductMatrix> for MatrixJson {
    fn from(m: ProductMatrix) -> Self {
        MatrixJson { rows: m.rows, cols: m.cols, bits: m.row_strings() }
    }
}

impl ProductMatrix {
    pub fn new(bits: Vec<Vec<bool>>) -> Result<Self> {
        let rows = bits.len();
        let cols = bits.first().map_or(0, Vec::len);
        if bits.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("ragged bit rows".into()));
        }
        Ok(ProductMatrix { rows, cols, bits })
    }

    /// Parses rows like `"0101"`.
    pub fn from_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let bits = rows
            .iter()
            .map(|r| {
                r.as_ref()
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(Error::Parse(format!("bad bit character {c:?}"))),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r][c]
    }

    pub fn bits(&self) -> &[Vec<bool>] {
        &self.bits
    }

    pub fn row_strings(&self) -> Vec<String> {
        self.bits
            .iter()
            .map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect()
    }

    pub fn transpose(&self) -> ProductMatrix {
        let bits = (0..self.cols).map(|c| (0..self.rows).map(|r| self.bits[r][c]).collect()).collect();
        ProductMatrix { rows: self.cols, cols: self.rows, bits }
    }

    /// Row `i` of the result is row `row_order[i]` of `self`, likewise for
    /// columns.
    pub fn permute(&self, row_order: &[usize], col_order: &[usize]) -> ProductMatrix {
        let bits = row_order
            .iter()
            .map(|&r| col_order.iter().map(|&c| self.bits[r][c]).collect())
            .collect();
        ProductMatrix { rows: self.rows, cols: self.cols, bits }
    }

    fn to_qmatrix(&self) -> QMatrix {
        let mut m = QMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.bits[r][c] {
                    m.set(r, c, Rational::one());
                }
            }
        }
        m
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        linalg::rank(&self.to_qmatrix())
    }

    pub fn rows_distinct(&self) -> bool {
        let mut r = self.bits.clone();
        r.sort();
        r.windows(2).all(|w| w[0] != w[1])
    }

    pub fn cols_distinct(&self) -> bool {
        self.transpose().rows_distinct()
    }

    pub fn zero_row_count(&self) -> usize {
        self.bits.iter().filter(|r| r.iter().all(|b| !b)).count()
    }

    /// Recovers a pair realizing this matrix: a greedy basis of rows is sent
    /// to the standard basis, so the second family is the columns restricted
    /// to those rows, and every row solves a linear system against them.
    /// Rank-`d` factorizations are unique up to an invertible linear map.
    pub fn factorize(&self) -> Result<BspPair> {
        let qm = self.to_qmatrix();
        let row_vecs: Vec<QVector> = (0..self.rows).map(|r| qm.row(r)).collect();
        let basis_rows = linalg::independent_subset(&row_vecs, self.cols);
        let d = basis_rows.len();
        if d == 0 {
            return Err(Error::NotSpanning(0));
        }
        let b: Vec<QVector> = (0..self.cols)
            .map(|c| QVector::new(basis_rows.iter().map(|&r| qm.get(r, c).clone()).collect()))
            .collect();
        let system = QMatrix::from_rows(&b, d);
        let mut a = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let sol = linalg::solve(&system, &qm.row(r))?
                .ok_or_else(|| Error::Parse("row outside the row space".into()))?;
            a.push(sol.x);
        }
        let fa = VectorFamily::new(d, a)?;
        let fb = VectorFamily::new(d, b)?;
        if fa.len() != self.rows || fb.len() != self.cols {
            return Err(Error::Parse("matrix has repeated rows or columns".into()));
        }
        BspPair::new(fa, fb)
    }
}

impl fmt::Debug for ProductMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}{:?}", self.rows, self.cols, self.row_strings())
    }
}

/// Product matrix of a pair, rows and columns in family order.
pub fn product_matrix(p: &BspPair) -> Result<ProductMatrix> {
    let bits = p
        .a()
        .iter()
        .map(|x| {
            p.b()
                .iter()
                .map(|y| {
                    let v = x.dot(y);
                    if v.is_zero() {
                        Ok(false)
                    } else if v.is_one() {
                        Ok(true)
                    } else {
                        Err(Error::NotBinary { value: v.to_string() })
                    }
                })
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProductMatrix { rows: p.a().len(), cols: p.b().len(), bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pair::close_pair;

    #[test]
    fn cube_pair_matrix() {
        let b = VectorFamily::from_ints(2, &[&[0, 0], &[1, 0], &[0, 1]]).unwrap();
        let p = BspPair::new(b.clone(), crate::pair::b_max(&b).unwrap()).unwrap();
        // a = {0,e1,e2}, b = cube
        let m = product_matrix(&p).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 4));
        assert_eq!(m.rank(), 2);
        let mut rows = m.row_strings();
        rows.sort();
        // cube sorted: (0,0),(0,1),(1,0),(1,1)
        assert_eq!(rows, vec!["0000", "0011", "0101"]);
        assert_eq!(m.zero_row_count(), 1);
        assert!(m.rows_distinct() && m.cols_distinct());

        let q = close_pair(&VectorFamily::from_ints(2, &[&[0, 0], &[1, 0], &[0, 1]]).unwrap()).unwrap();
        assert_eq!(q.sizes(), (4, 3));
    }

    #[test]
    fn factorize_recovers_matrix_up_to_order() {
        let b = VectorFamily::from_ints(2, &[&[0, 0], &[1, 0], &[1, 1]]).unwrap();
        let p = close_pair(&b).unwrap();
        let m = product_matrix(&p).unwrap();
        let q = m.factorize().unwrap();
        assert!(q.verify().ok);
        assert_eq!(q.sizes(), p.sizes());
        let m2 = product_matrix(&q).unwrap();
        let mut r1 = m.row_strings();
        let mut r2 = m2.transpose().transpose().row_strings();
        r1.sort();
        r2.sort();
        assert_eq!(m.rank(), m2.rank());
        assert_eq!(r1.len(), r2.len());
    }

    #[test]
    fn json_shape() {
        let m = ProductMatrix::from_strings(&["01", "10"]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":2,"bits":["01","10"]}"#);
        assert_eq!(serde_json::from_str::<ProductMatrix>(&s).unwrap(), m);
        assert!(serde_json::from_str::<ProductMatrix>(r#"{"rows":2,"cols":2,"bits":["012","10"]}"#).is_err());
    }
}
