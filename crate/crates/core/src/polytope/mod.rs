//! 2-level polytopes: facets from vertices, slack matrices, the vertex and
//! facet count bounds, and recognition of the cube and cross-polytope.

mod hull;
mod special;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{check_conjecture1, ConjectureReport};
use crate::error::{Error, Result};
use crate::family::VectorFamily;
use crate::linalg::{self, QVector, Rational};
use crate::pair::BspPair;
use crate::product::ProductMatrix;

pub use hull::{facets, facets_double_description, Facet, MAX_POINTS};
pub use special::{
    affine_special_oracle, cross_slack, cube_slack, detect_special, verify_lemma3, Lemma3Certificate, Special,
};

/// Brute-force facet search is used up to this many points; larger inputs
/// go through double description.
pub const SPANNED_SEARCH_LIMIT: usize = 40;

/// A full-dimensional polytope given by its vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polytope2L {
    pub d: usize,
    /// Sorted; points that are not vertices of the hull are dropped.
    pub vertices: Vec<QVector>,
    pub facets: Vec<Facet>,
    /// Vertices by facets, entry 1 where the vertex is off the facet. Only
    /// present when the polytope is 2-level.
    pub slack: Option<ProductMatrix>,
    pub two_level: bool,
}

/// Input format: `{"d": 3, "vertices": [["0", "1/2", "1"], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexList {
    pub d: usize,
    pub vertices: Vec<QVector>,
}

impl Polytope2L {
    pub fn from_vertices(d: usize, points: &[QVector]) -> Result<Self> {
        if d == 0 {
            return Err(Error::BadParameter("dimension must be positive".into()));
        }
        let facets = if points.len() <= SPANNED_SEARCH_LIMIT {
            hull::facets(d, points)?
        } else {
            hull::facets_double_description(d, points)?
        };
        let mut vertices: Vec<QVector> = points.to_vec();
        vertices.sort();
        vertices.dedup();
        vertices.retain(|v| {
            let tight: Vec<QVector> =
                facets.iter().filter(|f| f.normal.dot(v) == f.offset).map(|f| f.normal.clone()).collect();
            linalg::rank_of(&tight, d) == d
        });
        let slack = slack_of(&vertices, &facets);
        Ok(Polytope2L { d, two_level: slack.is_some(), vertices, facets, slack })
    }

    pub fn from_list(list: &VertexList) -> Result<Self> {
        Self::from_vertices(list.d, &list.vertices)
    }

    pub fn f0(&self) -> usize {
        self.vertices.len()
    }

    /// Number of facets.
    pub fn f_top(&self) -> usize {
        self.facets.len()
    }

    pub fn to_list(&self) -> VertexList {
        VertexList { d: self.d, vertices: self.vertices.clone() }
    }
}

fn slack_of(vertices: &[QVector], facets: &[Facet]) -> Option<ProductMatrix> {
    let mut cols = Vec::with_capacity(facets.len());
    for f in facets {
        let values: Vec<Rational> = vertices.iter().map(|v| f.normal.dot(v)).collect();
        let distinct: BTreeSet<&Rational> = values.iter().collect();
        if distinct.len() != 2 {
            return None;
        }
        cols.push(values.iter().map(|x| *x != f.offset).collect::<Vec<bool>>());
    }
    let bits = (0..vertices.len()).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    Some(ProductMatrix::new(bits).expect("rectangular"))
}

pub fn is_two_level(p: &Polytope2L) -> bool {
    p.two_level
}

pub fn slack_matrix(p: &Polytope2L) -> Result<&ProductMatrix> {
    p.slack.as_ref().ok_or(Error::NotTwoLevel)
}

/// Vertex set moved so that 0 is a vertex, against one facet normal per
/// parallel class scaled to take values `{0, 1}`, plus 0.
pub fn extract_pair(p: &Polytope2L) -> Result<BspPair> {
    if !p.two_level {
        return Err(Error::NotTwoLevel);
    }
    let zero = QVector::zero(p.d);
    let origin = if p.vertices.contains(&zero) { zero.clone() } else { p.vertices[0].clone() };
    let a: Vec<QVector> = p.vertices.iter().map(|v| v.sub(&origin)).collect();
    let mut b = vec![zero];
    for f in &p.facets {
        let t = a
            .iter()
            .map(|v| f.normal.dot(v))
            .find(|x| !x.is_zero())
            .expect("a facet normal is nonconstant on a full-dimensional polytope");
        b.push(f.normal.scale(&t.recip()));
    }
    BspPair::new(VectorFamily::new(p.d, a)?, VectorFamily::new(p.d, b)?)
}

/// Facet classes of a 0/1 slack matrix: complementary columns belong to
/// parallel facets.
pub fn facet_classes(slack: &ProductMatrix) -> usize {
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut classes = 0;
    for c in 0..slack.cols() {
        let col: Vec<bool> = (0..slack.rows()).map(|r| slack.get(r, c)).collect();
        let comp: Vec<bool> = col.iter().map(|x| !x).collect();
        if !seen.contains(&comp) {
            classes += 1;
        }
        seen.insert(col);
    }
    classes
}

/// Checks that a 0/1 matrix can be the slack matrix of a `d`-polytope:
/// distinct rows and columns, every column takes both values, and the rank
/// is `d + 1`.
pub fn validate_slack(slack: &ProductMatrix, d: usize) -> Result<()> {
    if slack.rows() < d + 1 || slack.cols() < d + 1 {
        return Err(Error::MalformedSlack(format!("{}x{} is too small for d={d}", slack.rows(), slack.cols())));
    }
    if !slack.rows_distinct() || !slack.cols_distinct() {
        return Err(Error::MalformedSlack("repeated rows or columns".into()));
    }
    for c in 0..slack.cols() {
        let ones = (0..slack.rows()).filter(|&r| slack.get(r, c)).count();
        if ones == 0 || ones == slack.rows() {
            return Err(Error::MalformedSlack(format!("column {c} is constant")));
        }
    }
    let rank = slack.rank();
    if rank != d + 1 {
        return Err(Error::MalformedSlack(format!("rank {rank}, expected {}", d + 1)));
    }
    Ok(())
}

/// Runs the conjectured size bound on `(vertices, facet classes + 1)` of
/// each slack matrix.
pub fn audit_conjecture_on_slacks(slacks: &[ProductMatrix], d: usize) -> Result<ConjectureReport> {
    let mut sizes = Vec::with_capacity(slacks.len());
    for s in slacks {
        validate_slack(s, d)?;
        sizes.push((s.rows(), facet_classes(s) + 1));
    }
    check_conjecture1(&sizes, d)
}

/// Outcome of a vertex-facet product bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeBoundReport {
    pub name: String,
    pub d: usize,
    pub f0: usize,
    pub facets: usize,
    pub product: u128,
    pub bound: u128,
    pub applicable: bool,
    pub pass: bool,
    pub equality: bool,
}

impl PolytopeBoundReport {
    fn new(name: &str, p: &Polytope2L, bound: u128, applicable: bool) -> Self {
        let product = p.f0() as u128 * p.f_top() as u128;
        PolytopeBoundReport {
            name: name.into(),
            d: p.d,
            f0: p.f0(),
            facets: p.f_top(),
            product,
            bound,
            applicable,
            pass: !applicable || product <= bound,
            equality: applicable && product == bound,
        }
    }
}

/// `d 2^{d+1}`.
pub fn vertex_facet_bound(d: usize) -> u128 {
    (d as u128) << (d + 1)
}

/// `(d-1) 2^{d+1} + 8(d-1)`.
pub fn vertex_facet_stability_bound(d: usize) -> u128 {
    ((d as u128 - 1) << (d + 1)) + 8 * (d as u128 - 1)
}

pub fn check_thm1(p: &Polytope2L) -> PolytopeBoundReport {
    PolytopeBoundReport::new("vertex-facet", p, vertex_facet_bound(p.d), p.two_level)
}

pub fn check_thm2(p: &Polytope2L) -> Result<PolytopeBoundReport> {
    if p.d < 2 {
        return Err(Error::BadParameter("needs d > 1".into()));
    }
    let applicable = detect_special(p)? == Special::Neither;
    Ok(PolytopeBoundReport::new("vertex-facet-stability", p, vertex_facet_stability_bound(p.d), applicable))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolytopeKind {
    /// The `(d-1)`-cube `{-1,1}^{d-1}` at height 0 with apexes `+-e_d`.
    SuspensionCube,
    /// `conv{+-e_i}` in the first `d-1` coordinates times `[-1, 1]`.
    CrossXSegment,
    Cube,
    Cross,
    Simplex,
    /// A `(d-1)`-simplex times a segment.
    Prism,
}

impl PolytopeKind {
    pub const ALL: [PolytopeKind; 6] = [
        PolytopeKind::SuspensionCube,
        PolytopeKind::CrossXSegment,
        PolytopeKind::Cube,
        PolytopeKind::Cross,
        PolytopeKind::Simplex,
        PolytopeKind::Prism,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolytopeKind::SuspensionCube => "suspension-cube",
            PolytopeKind::CrossXSegment => "cross-x-segment",
            PolytopeKind::Cube => "cube",
            PolytopeKind::Cross => "cross",
            PolytopeKind::Simplex => "simplex",
            PolytopeKind::Prism => "prism",
        }
    }

    fn min_dim(self) -> usize {
        match self {
            PolytopeKind::SuspensionCube | PolytopeKind::CrossXSegment | PolytopeKind::Prism => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for PolytopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolytopeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PolytopeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::BadParameter(format!("unknown polytope kind {s:?}")))
    }
}

/// Largest dimension accepted by [`construct_polytope`].
pub const MAX_POLYTOPE_DIM: usize = 8;

fn signed_units(d: usize, range: std::ops::Range<usize>) -> Vec<QVector> {
    range.flat_map(|i| [QVector::unit(d, i), QVector::unit(d, i).neg()]).collect()
}

/// `{low,1}` points over the coordinates `0..k`, zero elsewhere.
fn cube_points(d: usize, k: usize, low: i64) -> Vec<QVector> {
    (0..1usize << k)
        .map(|m| {
            let coord = |i: usize| match (i < k, m >> i & 1 == 1) {
                (false, _) => 0,
                (true, true) => 1,
                (true, false) => low,
            };
            QVector::new((0..d).map(|i| Rational::from(coord(i))).collect())
        })
        .collect()
}

pub fn polytope_vertices(kind: PolytopeKind, d: usize) -> Result<Vec<QVector>> {
    if d < kind.min_dim() || d > MAX_POLYTOPE_DIM {
        return Err(Error::BadParameter(format!(
            "{kind} needs d in {}..={MAX_POLYTOPE_DIM}, got {d}",
            kind.min_dim()
        )));
    }
    let top = d - 1;
    Ok(match kind {
        PolytopeKind::SuspensionCube => {
            let mut v = cube_points(d, top, -1);
            v.extend(signed_units(d, top..d));
            v
        }
        PolytopeKind::CrossXSegment => signed_units(d, 0..top)
            .into_iter()
            .flat_map(|x| [x.add(&QVector::unit(d, top)), x.sub(&QVector::unit(d, top))])
            .collect(),
        PolytopeKind::Cube => cube_points(d, d, 0),
        PolytopeKind::Cross => signed_units(d, 0..d),
        PolytopeKind::Simplex => std::iter::once(QVector::zero(d)).chain((0..d).map(|i| QVector::unit(d, i))).collect(),
        PolytopeKind::Prism => {
            let base: Vec<QVector> =
                std::iter::once(QVector::zero(d)).chain((0..top).map(|i| QVector::unit(d, i))).collect();
            base.iter().flat_map(|b| [b.clone(), b.add(&QVector::unit(d, top))]).collect()
        }
    })
}

pub fn construct_polytope(kind: PolytopeKind, d: usize) -> Result<Polytope2L> {
    Polytope2L::from_vertices(d, &polytope_vertices(kind, d)?)
}

/// Closed-form `(f_0, number of facets)`.
pub fn expected_f_vector(kind: PolytopeKind, d: usize) -> (usize, usize) {
    match kind {
        PolytopeKind::SuspensionCube => (2 + (1 << (d - 1)), 4 * (d - 1)),
        PolytopeKind::CrossXSegment => (4 * (d - 1), 2 + (1 << (d - 1))),
        PolytopeKind::Cube => (1 << d, 2 * d),
        PolytopeKind::Cross => (2 * d, 1 << d),
        PolytopeKind::Simplex => (d + 1, d + 1),
        PolytopeKind::Prism => (2 * d, d + 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_key;

    fn from_ints(d: usize, v: &[&[i64]]) -> Polytope2L {
        Polytope2L::from_vertices(d, &v.iter().map(|c| QVector::from_ints(c)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn f_vectors() {
        for kind in PolytopeKind::ALL {
            for d in kind.min_dim()..=5 {
                let p = construct_polytope(kind, d).unwrap();
                assert_eq!((p.f0(), p.f_top()), expected_f_vector(kind, d), "{kind} d={d}");
                assert!(p.two_level, "{kind} d={d}");
            }
        }
        assert!(construct_polytope(PolytopeKind::Prism, 1).is_err());
        assert!(construct_polytope(PolytopeKind::Cube, 9).is_err());
        assert!("tesseract".parse::<PolytopeKind>().is_err());
    }

    #[test]
    fn two_level() {
        let pentagon = from_ints(2, &[&[0, 0], &[2, 0], &[3, 2], &[1, 3], &[-1, 2]]);
        assert_eq!(pentagon.f_top(), 5);
        assert!(!pentagon.two_level);
        assert_eq!(extract_pair(&pentagon), Err(Error::NotTwoLevel));
        assert_eq!(slack_matrix(&pentagon), Err(Error::NotTwoLevel));
        let with_inner = from_ints(2, &[&[0, 0], &[2, 0], &[0, 2], &[2, 2], &[1, 1], &[1, 0]]);
        assert_eq!(with_inner.f0(), 4);
        assert!(with_inner.two_level);
    }

    #[test]
    fn pairs() {
        let cube = construct_polytope(PolytopeKind::Cube, 3).unwrap();
        let p = extract_pair(&cube).unwrap();
        assert_eq!(p.b(), &VectorFamily::from_ints(3, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap());
        let tri = construct_polytope(PolytopeKind::Simplex, 2).unwrap();
        let p = extract_pair(&tri).unwrap();
        assert_eq!(p.b(), &VectorFamily::from_ints(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]).unwrap());
        let s4 = construct_polytope(PolytopeKind::SuspensionCube, 4).unwrap();
        let p = extract_pair(&s4).unwrap();
        assert_eq!(p.sizes(), (10, 7));
        for kind in PolytopeKind::ALL {
            for d in kind.min_dim()..=4 {
                let p = extract_pair(&construct_polytope(kind, d).unwrap()).unwrap();
                assert!(p.verify().ok && p.a().spans(), "{kind} d={d}");
            }
        }
    }

    #[test]
    fn bounds() {
        let r = check_thm1(&construct_polytope(PolytopeKind::Cube, 3).unwrap());
        assert_eq!((r.product, r.bound, r.equality), (48, 48, true));
        let r = check_thm1(&construct_polytope(PolytopeKind::Cube, 1).unwrap());
        assert_eq!((r.product, r.bound, r.equality), (4, 4, true));
        let s4 = construct_polytope(PolytopeKind::SuspensionCube, 4).unwrap();
        let r = check_thm1(&s4);
        assert_eq!((r.product, r.bound, r.equality), (120, 128, false));
        let r = check_thm2(&s4).unwrap();
        assert!(r.applicable && r.equality && r.bound == 120);
        let r = check_thm2(&construct_polytope(PolytopeKind::CrossXSegment, 4).unwrap()).unwrap();
        assert!(r.applicable && r.equality);
        assert!(!check_thm2(&construct_polytope(PolytopeKind::Cube, 3).unwrap()).unwrap().applicable);
        assert!(check_thm2(&construct_polytope(PolytopeKind::Cube, 1).unwrap()).is_err());
    }

    #[test]
    fn duality() {
        for d in 2..=5 {
            let s = construct_polytope(PolytopeKind::SuspensionCube, d).unwrap();
            let c = construct_polytope(PolytopeKind::CrossXSegment, d).unwrap();
            assert_eq!(
                canonical_key(slack_matrix(&s).unwrap(), false),
                canonical_key(&slack_matrix(&c).unwrap().transpose(), false)
            );
        }
    }

    #[test]
    fn slack_audit() {
        let cube5 = construct_polytope(PolytopeKind::Cube, 5).unwrap();
        let s = slack_matrix(&cube5).unwrap().clone();
        assert_eq!(facet_classes(&s), 5);
        let r = audit_conjecture_on_slacks(std::slice::from_ref(&s), 5).unwrap();
        assert!(r.pass() && r.checked == 1);
        assert!(audit_conjecture_on_slacks(&[], 5).unwrap().pass());
        assert!(matches!(audit_conjecture_on_slacks(&[s], 4), Err(Error::MalformedSlack(_))));
        let bad = ProductMatrix::from_strings(&["01", "01", "10"]).unwrap();
        assert!(matches!(validate_slack(&bad, 1), Err(Error::MalformedSlack(_))));
    }
}
