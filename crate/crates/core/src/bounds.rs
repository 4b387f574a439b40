//! Product bounds for pairs and the conjectured interpolation between them.

use serde::{Deserialize, Serialize};

use crate::canon::canonical_key;
use crate::constructions::{construct_example, ExampleKind};
use crate::error::{Error, Result};
use crate::pair::BspPair;
use crate::product::{product_matrix, ProductMatrix};

/// Outcome of testing `|A| * |B| <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub d: usize,
    pub size_a: usize,
    pub size_b: usize,
    pub product: u128,
    pub bound: u128,
    pub applicable: bool,
    pub pass: bool,
    pub equality: bool,
}

impl BoundReport {
    fn new(name: &str, d: usize, (size_a, size_b): (usize, usize), bound: u128, applicable: bool) -> Self {
        let product = size_a as u128 * size_b as u128;
        BoundReport {
            name: name.to_string(),
            d,
            size_a,
            size_b,
            product,
            bound,
            applicable,
            pass: !applicable || product <= bound,
            equality: applicable && product == bound,
        }
    }
}

fn pow2(e: usize) -> u128 {
    1u128 << e
}

/// `(d+1) 2^d`.
pub fn general_bound(d: usize) -> u128 {
    (d as u128 + 1) * pow2(d)
}

/// `d 2^d + 2d`.
pub fn stability_bound(d: usize) -> u128 {
    d as u128 * pow2(d) + 2 * d as u128
}

pub fn check_thm4_sizes(d: usize, sizes: (usize, usize)) -> BoundReport {
    BoundReport::new("general", d, sizes, general_bound(d), true)
}

pub fn check_thm3_sizes(d: usize, sizes: (usize, usize)) -> BoundReport {
    let applicable = sizes.0 >= d + 2 && sizes.1 >= d + 2;
    BoundReport::new("stability", d, sizes, stability_bound(d), applicable)
}

pub fn check_thm4(p: &BspPair) -> BoundReport {
    check_thm4_sizes(p.dim(), p.sizes())
}

pub fn check_thm3(p: &BspPair) -> BoundReport {
    check_thm3_sizes(p.dim(), p.sizes())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

/// Classification of a pair against the equality case of the general bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EqualityCase {
    /// The product is below `(d+1) 2^d`.
    Strict,
    /// One side has `d+1` vectors and the other is a linear image of the
    /// cube.
    Equality { cube_side: Side },
    /// The bound is attained by something else; contradicts uniqueness.
    Unexpected { reason: String },
}

/// Product matrix of the reference pair: rows are the cube.
pub fn cube_pair_matrix(d: usize) -> Result<ProductMatrix> {
    product_matrix(&construct_example(ExampleKind::CubePair, d, None)?)
}

pub fn check_thm6_equality(p: &BspPair) -> Result<EqualityCase> {
    let d = p.dim();
    if (p.product() as u128) != general_bound(d) {
        return Ok(EqualityCase::Strict);
    }
    let (m, n) = p.sizes();
    let sizes_ok = (m == d + 1 && n == 1 << d) || (n == d + 1 && m == 1 << d);
    if !sizes_ok {
        return Ok(EqualityCase::Unexpected { reason: format!("sizes ({m},{n})") });
    }
    let key = canonical_key(&product_matrix(p)?, false);
    let reference = cube_pair_matrix(d)?;
    if key == canonical_key(&reference, false) {
        return Ok(EqualityCase::Equality { cube_side: Side::A });
    }
    if key == canonical_key(&reference.transpose(), false) {
        return Ok(EqualityCase::Equality { cube_side: Side::B });
    }
    Ok(EqualityCase::Unexpected { reason: "not the cube pair".into() })
}

/// A size pair breaking the conjectured bound for some `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureViolation {
    pub size_a: usize,
    pub size_b: usize,
    pub k: usize,
    pub product: u128,
    pub bound: u128,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub d: usize,
    pub checked: usize,
    pub violations: Vec<ConjectureViolation>,
}

impl ConjectureReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Bound `(2^{d-k} + k) 2^k (d-k+1)` for sizes above threshold `k`.
pub fn conjecture_bound(d: usize, k: usize) -> u128 {
    (pow2(d - k) + k as u128) * pow2(k) * (d - k + 1) as u128
}

/// True iff `s > 2^{k-1} (d-k+2)`.
pub fn above_threshold(d: usize, k: usize, s: usize) -> bool {
    2 * s as u128 > pow2(k) * (d - k + 2) as u128
}

/// Tests the conjectured implication for every pair and every `k` in
/// `[0, d]`.
pub fn check_conjecture1(sizes: &[(usize, usize)], d: usize) -> Result<ConjectureReport> {
    if d > 100 {
        return Err(Error::BadParameter(format!("dimension {d} too large")));
    }
    let mut report = ConjectureReport { d, checked: sizes.len(), violations: Vec::new() };
    for &(m, n) in sizes {
        let product = m as u128 * n as u128;
        for k in 0..=d {
            let bound = conjecture_bound(d, k);
            if above_threshold(d, k, m.min(n)) && product > bound {
                report.violations.push(ConjectureViolation { size_a: m, size_b: n, k, product, bound });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::VectorFamily;

    fn cube2() -> BspPair {
        BspPair::new(
            VectorFamily::from_ints(2, &[&[0, 0], &[1, 0], &[0, 1]]).unwrap(),
            VectorFamily::from_ints(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn general() {
        let r = check_thm4(&cube2());
        assert!(r.pass && r.equality);
        assert_eq!((r.product, r.bound), (12, 12));
        let e3 = construct_example(ExampleKind::Example3, 3, None).unwrap();
        let r = check_thm4(&e3);
        assert!(r.pass && !r.equality);
        assert_eq!((r.product, r.bound), (30, 32));
        let r = check_thm4(&construct_example(ExampleKind::CubePair, 1, None).unwrap());
        assert_eq!((r.product, r.bound, r.equality), (4, 4, true));
    }

    #[test]
    fn stability() {
        let e3 = construct_example(ExampleKind::Example3, 3, None).unwrap();
        let r = check_thm3(&e3);
        assert!(r.applicable && r.pass && r.equality);
        assert_eq!(r.product, 30);
        assert!(!check_thm3(&cube2()).applicable);
        let r = check_thm3_sizes(4, (6, 12));
        assert!(r.applicable && r.equality);
        assert_eq!(r.bound, 72);
    }

    #[test]
    fn equality_classes() {
        assert_eq!(check_thm6_equality(&cube2()).unwrap(), EqualityCase::Equality { cube_side: Side::B });
        let e3 = construct_example(ExampleKind::Example3, 3, None).unwrap();
        assert_eq!(check_thm6_equality(&e3).unwrap(), EqualityCase::Strict);
        let one = construct_example(ExampleKind::CubePair, 1, None).unwrap();
        assert!(matches!(check_thm6_equality(&one).unwrap(), EqualityCase::Equality { .. }));
        let c4 = construct_example(ExampleKind::CubePair, 4, None).unwrap();
        assert_eq!(check_thm6_equality(&c4).unwrap(), EqualityCase::Equality { cube_side: Side::A });
    }

    #[test]
    fn conjecture() {
        let r = check_conjecture1(&[(10, 17)], 5).unwrap();
        assert!(r.pass());
        assert_eq!(conjecture_bound(5, 1), 170);
        assert!(above_threshold(5, 1, 10));
        assert!(above_threshold(4, 0, 5));
        assert_eq!(conjecture_bound(4, 0), 80);
        assert!(check_conjecture1(&[(16, 5)], 4).unwrap().pass());
        assert!(check_conjecture1(&[], 3).unwrap().pass());
        let bad = check_conjecture1(&[(11, 17)], 5).unwrap();
        let ks: Vec<usize> = bad.violations.iter().map(|v| v.k).collect();
        assert_eq!(ks, vec![1, 2]);
    }
}
