//! Recognizing the cube and the cross-polytope.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{slack_matrix, Polytope2L};
use crate::canon::canonical_key;
use crate::error::{Error, Result};
use crate::linalg::{self, QMatrix, QVector};
use crate::product::ProductMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Special {
    Cube,
    Cross,
    Neither,
}

impl fmt::Display for Special {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Special::Cube => "cube",
            Special::Cross => "cross",
            Special::Neither => "neither",
        })
    }
}

/// Slack matrix of `[0,1]^d`: columns `x_i >= 0` then `x_i <= 1`.
pub fn cube_slack(d: usize) -> ProductMatrix {
    let bits = (0..1usize << d)
        .map(|m| (0..2 * d).map(|c| (m >> (c % d) & 1 == 1) == (c < d)).collect())
        .collect();
    ProductMatrix::new(bits).expect("rectangular")
}

/// Slack matrix of `conv{+-e_i}`: rows `e_0, -e_0, e_1, ...`, one column
/// per sign vector; a vertex is tight where its sign matches.
pub fn cross_slack(d: usize) -> ProductMatrix {
    let bits = (0..2 * d)
        .map(|r| (0..1usize << d).map(|eps| (eps >> (r / 2) & 1 == 1) != (r % 2 == 1)).collect())
        .collect();
    ProductMatrix::new(bits).expect("rectangular")
}

/// Compares the slack matrix against the references up to row and column
/// permutations. The segment and the square count as cubes.
pub fn detect_special(p: &Polytope2L) -> Result<Special> {
    let slack = slack_matrix(p)?;
    let d = p.d;
    let key = || canonical_key(slack, false);
    let shape = (slack.rows(), slack.cols());
    if shape == (1 << d, 2 * d) && key() == canonical_key(&cube_slack(d), false) {
        return Ok(Special::Cube);
    }
    if shape == (2 * d, 1 << d) && key() == canonical_key(&cross_slack(d), false) {
        return Ok(Special::Cross);
    }
    Ok(Special::Neither)
}

/// Largest dimension for [`affine_special_oracle`].
pub const ORACLE_MAX_DIM: usize = 3;

/// Searches for an affine map taking the vertex set onto the cube's or the
/// cross-polytope's, by sending a fixed affine basis of the vertices to
/// every ordered tuple of target vertices.
pub fn affine_special_oracle(p: &Polytope2L) -> Result<Special> {
    let d = p.d;
    if d > ORACLE_MAX_DIM {
        return Err(Error::BadParameter(format!("affine search limited to d <= {ORACLE_MAX_DIM}")));
    }
    let cube = super::polytope_vertices(super::PolytopeKind::Cube, d)?;
    let cross = super::polytope_vertices(super::PolytopeKind::Cross, d)?;
    if affine_onto(&p.vertices, &cube, d)? {
        return Ok(Special::Cube);
    }
    if affine_onto(&p.vertices, &cross, d)? {
        return Ok(Special::Cross);
    }
    Ok(Special::Neither)
}

fn affine_onto(vertices: &[QVector], target: &[QVector], d: usize) -> Result<bool> {
    if vertices.len() != target.len() {
        return Ok(false);
    }
    let origin = &vertices[0];
    let diffs: Vec<QVector> = vertices.iter().map(|v| v.sub(origin)).collect();
    let idx = linalg::independent_subset(&diffs, d);
    if idx.len() < d {
        return Err(Error::NotFullDimensional);
    }
    let basis: Vec<QVector> = idx.iter().map(|&i| diffs[i].clone()).collect();
    let inv_t = linalg::inverse(&QMatrix::from_rows(&basis, d))?.transpose();
    let goal: BTreeSet<&QVector> = target.iter().collect();
    let mut tuple = Vec::with_capacity(d + 1);
    Ok(search(&mut tuple, target, d + 1, &mut |t: &[usize]| {
        let t0 = &target[t[0]];
        let images: Vec<QVector> = t[1..].iter().map(|&j| target[j].sub(t0)).collect();
        let m = QMatrix::from_rows(&images, d).transpose().mul(&inv_t);
        vertices.iter().all(|v| goal.contains(&m.mul_vec(&v.sub(origin)).add(t0)))
    }))
}

fn search(tuple: &mut Vec<usize>, target: &[QVector], len: usize, test: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if tuple.len() == len {
        return test(tuple);
    }
    for j in 0..target.len() {
        if tuple.contains(&j) {
            continue;
        }
        tuple.push(j);
        let hit = search(tuple, target, len, test);
        tuple.pop();
        if hit {
            return true;
        }
    }
    false
}

/// The map and images behind the cross-polytope certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma3Certificate {
    pub d: usize,
    /// `v + a_1 + ... + a_{d-1}`.
    pub apex: QVector,
    /// Rows of the linear map.
    pub map: Vec<QVector>,
    /// Images of the vertices after the shift by `-e_d`.
    pub images: Vec<QVector>,
    pub pass: bool,
}

/// Given a basis `a_1, ..., a_{d-1}, v` (in that order), builds
/// `P = conv{0, a_i, s, s - a_i}` with `s = v + sum a_i` and checks that the
/// linear map `a_i -> e_d + e_i`, `s -> 2 e_d` followed by the shift `-e_d`
/// sends the vertices of `P` onto `{+-e_i}`.
pub fn verify_lemma3(basis: &[QVector]) -> Result<Lemma3Certificate> {
    let d = basis.len();
    if d == 0 {
        return Err(Error::SingularBasis);
    }
    for v in basis {
        if v.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: v.dim() });
        }
    }
    let top = d - 1;
    let a = &basis[..top];
    let apex = a.iter().fold(basis[top].clone(), |s, x| s.add(x));
    let mut sources: Vec<QVector> = a.to_vec();
    sources.push(apex.clone());
    let inv_t = linalg::inverse(&QMatrix::from_rows(&sources, d))?.transpose();
    let e_top = QVector::unit(d, top);
    let mut goals: Vec<QVector> = (0..top).map(|i| e_top.add(&QVector::unit(d, i))).collect();
    goals.push(e_top.add(&e_top));
    let map = QMatrix::from_rows(&goals, d).transpose().mul(&inv_t);
    let mut vertices = vec![QVector::zero(d), apex.clone()];
    for x in a {
        vertices.push(x.clone());
        vertices.push(apex.sub(x));
    }
    let images: Vec<QVector> = vertices.iter().map(|v| map.mul_vec(v).sub(&e_top)).collect();
    let got: BTreeSet<&QVector> = images.iter().collect();
    let cross = super::polytope_vertices(super::PolytopeKind::Cross, d)?;
    let pass = images.len() == cross.len() && got == cross.iter().collect();
    Ok(Lemma3Certificate { d, apex, map: (0..d).map(|r| map.row(r)).collect(), images, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Rational;
    use crate::polytope::{construct_polytope, PolytopeKind};

    #[test]
    fn references() {
        for d in 1..=5 {
            let cube = construct_polytope(PolytopeKind::Cube, d).unwrap();
            assert_eq!(canonical_key(&cube_slack(d), false), canonical_key(cube.slack.as_ref().unwrap(), false));
            let cross = construct_polytope(PolytopeKind::Cross, d).unwrap();
            assert_eq!(canonical_key(&cross_slack(d), false), canonical_key(cross.slack.as_ref().unwrap(), false));
            let expect = if d <= 2 { Special::Cube } else { Special::Cross };
            assert_eq!(detect_special(&cross).unwrap(), expect);
            assert_eq!(detect_special(&cube).unwrap(), Special::Cube);
        }
    }

    #[test]
    fn small_cases() {
        let prism = construct_polytope(PolytopeKind::Prism, 3).unwrap();
        assert_eq!(detect_special(&prism).unwrap(), Special::Neither);
        let s3 = construct_polytope(PolytopeKind::SuspensionCube, 3).unwrap();
        assert_eq!(detect_special(&s3).unwrap(), Special::Cross);
        let c3 = construct_polytope(PolytopeKind::CrossXSegment, 3).unwrap();
        assert_eq!(detect_special(&c3).unwrap(), Special::Cube);
        for kind in [PolytopeKind::SuspensionCube, PolytopeKind::CrossXSegment] {
            assert_eq!(detect_special(&construct_polytope(kind, 4).unwrap()).unwrap(), Special::Neither);
        }
        let sheared: Vec<QVector> = crate::polytope::polytope_vertices(PolytopeKind::Cube, 3)
            .unwrap()
            .iter()
            .map(|v| {
                let c = v.coords();
                QVector::new(vec![&c[0] + &(&c[1] * &Rational::new(1, 2)), &c[1] * &Rational::from(3), &c[2] - &c[0]])
            })
            .collect();
        let p = Polytope2L::from_vertices(3, &sheared).unwrap();
        assert_eq!(detect_special(&p).unwrap(), Special::Cube);
        assert_eq!(affine_special_oracle(&p).unwrap(), Special::Cube);
    }

    #[test]
    fn oracle_agrees() {
        for kind in PolytopeKind::ALL {
            for d in 1..=ORACLE_MAX_DIM {
                let Ok(p) = construct_polytope(kind, d) else { continue };
                assert_eq!(detect_special(&p).unwrap(), affine_special_oracle(&p).unwrap(), "{kind} d={d}");
            }
        }
        assert!(affine_special_oracle(&construct_polytope(PolytopeKind::Cube, 4).unwrap()).is_err());
    }

    #[test]
    fn lemma3() {
        for d in 1..=4 {
            let basis: Vec<QVector> = (0..d).map(|i| QVector::unit(d, i)).collect();
            let c = verify_lemma3(&basis).unwrap();
            assert!(c.pass, "d={d}");
            assert_eq!(c.images.len(), 2 * d);
        }
        let skew = vec![QVector::from_ints(&[2, 1, 0]), QVector::from_ints(&[0, 1, 5]), QVector::from_ints(&[1, -3, 1])];
        assert!(verify_lemma3(&skew).unwrap().pass);
        let dependent = vec![QVector::from_ints(&[1, 0]), QVector::from_ints(&[2, 0])];
        assert_eq!(verify_lemma3(&dependent), Err(Error::SingularBasis));
    }
}
