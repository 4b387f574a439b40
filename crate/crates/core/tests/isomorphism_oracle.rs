use bsp_core::canon::canonical_key;
use bsp_core::family::VectorFamily;
use bsp_core::linalg::{QMatrix, QVector, Rational};
use bsp_core::pair::{self, find_linear_isomorphism, BspPair};
use bsp_core::product::product_matrix;

/// Closed pairs from every closed spanning subset of the cube containing 0,
/// found with the rational closure.
fn closed_frame_pairs(d: usize) -> Vec<BspPair> {
    let n = 1usize << d;
    let point = |p: usize| QVector::from_ints(&(0..d).map(|i| (p >> i & 1) as i64).collect::<Vec<_>>());
    let mut out = Vec::new();
    for rest in 0u64..(1 << (n - 1)) {
        let b = VectorFamily::new(
            d,
            std::iter::once(point(0)).chain((1..n).filter(|p| rest >> (p - 1) & 1 == 1).map(point)),
        )
        .unwrap();
        if b.spans() && pair::closure(&b).unwrap() == b {
            out.push(pair::close_pair(&b).unwrap());
        }
    }
    out
}

fn transform(p: &BspPair, t: &QMatrix) -> BspPair {
    let dual = bsp_core::linalg::inverse(t).unwrap().transpose();
    let a = p.a().map(|v| t.mul_vec(v));
    let b = p.b().map(|v| dual.mul_vec(v));
    BspPair::new(a, b).unwrap()
}

fn isomorphic(p: &BspPair, q: &BspPair) -> bool {
    find_linear_isomorphism(p, q).is_some() || find_linear_isomorphism(p, &q.swapped()).is_some()
}

#[test]
fn keys_agree_with_explicit_transforms() {
    for d in 1..=3 {
        let mut pairs = closed_frame_pairs(d);
        // a few pairs moved out of the cube frame
        let t = match d {
            1 => QMatrix::from_ints(&[&[3]]),
            2 => QMatrix::from_ints(&[&[1, 2], &[1, 3]]),
            _ => QMatrix::from_ints(&[&[1, 1, 0], &[0, 2, 1], &[1, 0, 1]]),
        };
        let moved: Vec<BspPair> = pairs.iter().step_by(7).map(|p| transform(p, &t)).collect();
        pairs.extend(moved);
        let keys: Vec<_> = pairs.iter().map(|p| canonical_key(&product_matrix(p).unwrap(), true)).collect();
        let mut equal = 0;
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                let same_key = keys[i] == keys[j];
                if same_key {
                    equal += 1;
                } else if pairs[i].sizes() != pairs[j].sizes() && pairs[i].sizes() != pairs[j].swapped().sizes() {
                    continue;
                }
                assert_eq!(same_key, isomorphic(&pairs[i], &pairs[j]), "d={d} i={i} j={j}");
            }
        }
        assert!(equal > 0);
    }
}

#[test]
fn transform_found_for_scaled_pair() {
    let p = pair::close_pair(&VectorFamily::from_ints(2, &[&[0, 0], &[1, 0], &[0, 1]]).unwrap()).unwrap();
    let mut t = QMatrix::identity(2);
    t.set(0, 1, Rational::new(1, 2));
    let q = transform(&p, &t);
    assert!(find_linear_isomorphism(&p, &q).is_some());
    assert!(find_linear_isomorphism(&p, &p.swapped()).is_none());
}
