//! Pairs of families with binary scalar products, and the maximal-partner
//! operators that define closed pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::VectorFamily;
use crate::linalg::{self, QMatrix, QVector, Rational};

/// Two families in `Q^d` that both span. Binary products are checked by
/// [`verify_binary_products`], not enforced on construction, so that
/// invalid input can still be loaded and reported on.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "PairJson", into = "PairJson")]
pub struct BspPair {
    d: usize,
    a: VectorFamily,
    b: VectorFamily,
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    d: usize,
    a: VectorFamily,
    b: VectorFamily,
}

impl TryFrom<PairJson> for BspPair {
    type Error = Error;
    fn try_from(j: PairJson) -> Result<Self> {
        if j.a.dim() != j.d {
            return Err(Error::DimensionMismatch { expected: j.d, found: j.a.dim() });
        }
        BspPair::new(j.a, j.b)
    }
}

impl From<BspPair> for PairJson {
    fn from(p: BspPair) -> Self {
        PairJson { d: p.d, a: p.a, b: p.b }
    }
}

impl BspPair {
    pub fn new(a: VectorFamily, b: VectorFamily) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
        }
        let d = a.dim();
        if !a.spans() || !b.spans() {
            return Err(Error::NotSpanning(d));
        }
        Ok(BspPair { d, a, b })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn a(&self) -> &VectorFamily {
        &self.a
    }

    pub fn b(&self) -> &VectorFamily {
        &self.b
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.a.len(), self.b.len())
    }

    pub fn product(&self) -> usize {
        self.a.len() * self.b.len()
    }

    /// The same pair with the roles of the two families exchanged.
    pub fn swapped(&self) -> BspPair {
        BspPair { d: self.d, a: self.b.clone(), b: self.a.clone() }
    }

    /// True when neither family can be enlarged.
    pub fn is_maximal(&self) -> Result<bool> {
        Ok(maximal_partner(&self.b)? == self.a && maximal_partner(&self.a)? == self.b)
    }

    pub fn verify(&self) -> ProductCheck {
        verify_binary_products(&self.a, &self.b).expect("pair families share a dimension")
    }
}

/// First product outside `{0,1}`, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub a: QVector,
    pub b: QVector,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductCheck {
    pub ok: bool,
    pub witness: Option<Violation>,
}

pub fn is_binary(x: &Rational) -> bool {
    x.is_zero() || x.is_one()
}

pub fn verify_binary_products(a: &VectorFamily, b: &VectorFamily) -> Result<ProductCheck> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    for x in a {
        for y in b {
            let value = x.dot(y);
            if !is_binary(&value) {
                return Ok(ProductCheck {
                    ok: false,
                    witness: Some(Violation { a: x.clone(), b: y.clone(), value }),
                });
            }
        }
    }
    Ok(ProductCheck { ok: true, witness: None })
}

/// All `x` with `<x, v>` in `{0,1}` for every `v` in `family`.
///
/// Fixes a basis inside `family`, solves each of the `2^d` 0/1 assignments
/// on it and keeps the solutions that are binary against the remaining
/// vectors. The result always contains 0.
pub fn maximal_partner(family: &VectorFamily) -> Result<VectorFamily> {
    let d = family.dim();
    let idx = linalg::independent_subset(family.vectors(), d);
    if idx.len() < d {
        return Err(Error::NotSpanning(d));
    }
    let basis: Vec<QVector> = idx.iter().map(|&i| family.vectors()[i].clone()).collect();
    // x = B^{-1} delta, with B the basis as rows.
    let inv = linalg::inverse(&QMatrix::from_rows(&basis, d))?;
    let columns: Vec<QVector> = (0..d).map(|j| inv.column(j)).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << d) {
        let mut x = QVector::zero(d);
        for (j, col) in columns.iter().enumerate() {
            if mask >> j & 1 == 1 {
                x = x.add(col);
            }
        }
        if family.iter().all(|v| is_binary(&x.dot(v))) {
            out.push(x);
        }
    }
    VectorFamily::new(d, out)
}

/// Maximal first family for a given second family.
pub fn a_max(b: &VectorFamily) -> Result<VectorFamily> {
    maximal_partner(b)
}

/// Maximal second family for a given first family.
pub fn b_max(a: &VectorFamily) -> Result<VectorFamily> {
    maximal_partner(a)
}

/// `b_max(a_max(b))`: extensive, monotone and idempotent on spanning
/// families.
pub fn closure(b: &VectorFamily) -> Result<VectorFamily> {
    b_max(&a_max(b)?)
}

/// The closed pair generated by a spanning family `b`.
pub fn close_pair(b: &VectorFamily) -> Result<BspPair> {
    let a = a_max(b)?;
    let b = b_max(&a)?;
    BspPair::new(a, b)
}

/// Searches for an invertible `T` with `T A_p = A_q` and `T^{-T} B_p = B_q`
/// by trying every image of a fixed basis of `A_p`. Exponential; meant as
/// an oracle for small pairs.
pub fn find_linear_isomorphism(p: &BspPair, q: &BspPair) -> Option<QMatrix> {
    let d = p.dim();
    if q.dim() != d || p.sizes() != q.sizes() {
        return None;
    }
    let src = p.a().vectors();
    let idx = linalg::independent_subset(src, d);
    let basis: Vec<QVector> = idx.iter().map(|&i| src[i].clone()).collect();
    // T = targets^T * (basis^T)^{-1}
    let basis_t_inv = linalg::inverse(&QMatrix::from_rows(&basis, d).transpose()).ok()?;
    let dst = q.a().vectors();
    let mut choice = vec![0usize; d];
    loop {
        let distinct = (0..d).all(|i| (0..i).all(|j| choice[i] != choice[j]));
        if distinct {
            let targets: Vec<QVector> = choice.iter().map(|&c| dst[c].clone()).collect();
            let t = QMatrix::from_rows(&targets, d).transpose().mul(&basis_t_inv);
            if let Ok(t_inv) = linalg::inverse(&t) {
                let dual = t_inv.transpose();
                let maps_a = src.iter().all(|a| q.a().contains(&t.mul_vec(a)));
                let maps_b = maps_a && p.b().iter().all(|b| q.b().contains(&dual.mul_vec(b)));
                if maps_b {
                    return Some(t);
                }
            }
        }
        // next tuple
        let mut pos = 0;
        loop {
            if pos == d {
                return None;
            }
            choice[pos] += 1;
            if choice[pos] < dst.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fam(d: usize, v: &[&[i64]]) -> VectorFamily {
        VectorFamily::from_ints(d, v).unwrap()
    }

    #[test]
    fn violation_witness() {
        let check = verify_binary_products(&fam(2, &[&[2, 0]]), &fam(2, &[&[1, 0]])).unwrap();
        assert!(!check.ok);
        assert_eq!(check.witness.unwrap().value, Rational::from_int(2));
        assert!(verify_binary_products(&fam(2, &[&[1, 0]]), &fam(3, &[&[1, 0, 0]])).is_err());
    }

    #[test]
    fn a_max_examples() {
        let b = fam(2, &[&[0, 0], &[1, 0], &[0, 1]]);
        assert_eq!(a_max(&b).unwrap(), fam(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]));

        let b3 = fam(3, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0], &[1, 0, 1]]);
        let expected = fam(3, &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 1, 1], &[1, 0, 0]]);
        assert_eq!(a_max(&b3).unwrap(), expected);

        assert_eq!(a_max(&fam(2, &[&[0, 0], &[1, 0]])), Err(Error::NotSpanning(2)));
    }

    #[test]
    fn b_max_examples() {
        let cube = fam(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(b_max(&cube).unwrap(), fam(2, &[&[0, 0], &[1, 0], &[0, 1]]));
        assert_eq!(b_max(&fam(1, &[&[0], &[1]])).unwrap(), fam(1, &[&[0], &[1]]));
        let a3 = fam(3, &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 1, 1], &[1, 0, 0]]);
        let b3 = fam(3, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0], &[1, 0, 1]]);
        assert_eq!(b_max(&a3).unwrap(), b3);
    }

    #[test]
    fn closure_examples() {
        let s = fam(2, &[&[0, 0], &[1, 0], &[0, 1]]);
        assert_eq!(closure(&s).unwrap(), s);
        let s = fam(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(closure(&s).unwrap(), s);
        assert_eq!(a_max(&s).unwrap(), fam(2, &[&[0, 0], &[1, 0], &[0, 1]]));
        let s = fam(2, &[&[0, 0], &[1, 0], &[1, 1]]);
        assert_eq!(closure(&s).unwrap(), s);
        assert_eq!(a_max(&s).unwrap(), fam(2, &[&[0, 0], &[0, 1], &[1, 0], &[1, -1]]));
    }

    fn cube_subset(d: usize) -> impl Strategy<Value = VectorFamily> {
        let n = 1u64 << d;
        (0u64..(1 << (n - 1))).prop_map(move |m| {
            let mask = (m << 1) | 1;
            let pts = (0..n).filter(|p| mask >> p & 1 == 1).map(|p| {
                QVector::from_ints(&(0..d).map(|i| ((p >> i) & 1) as i64).collect::<Vec<_>>())
            });
            VectorFamily::new(d, pts).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn closure_laws((s, t) in (2usize..=4).prop_flat_map(|d| (cube_subset(d), cube_subset(d)))) {
            prop_assume!(s.spans());
            let c = closure(&s).unwrap();
            prop_assert!(s.is_subset(&c));
            prop_assert_eq!(closure(&c).unwrap(), c.clone());
            let a = a_max(&s).unwrap();
            prop_assert!(a.contains(&QVector::zero(s.dim())));
            prop_assert!(a.len() <= 1 << s.dim());
            prop_assert!(c.len() <= 1 << s.dim());
            // Monotonicity on the union, which contains s.
            let u = s.union(&t);
            prop_assert!(c.is_subset(&closure(&u).unwrap()));
        }
    }
}
