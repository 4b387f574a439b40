//! Facets of the convex hull of a finite point set.
//!
//! Two independent routes over exact `i128` arithmetic: an exhaustive walk
//! over hyperplanes spanned by the points, and double description on the
//! homogenized cone. Inputs are rescaled to integers first.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{QVector, Rational};

/// Supporting inequality `<normal, x> <= offset` with a primitive integer
/// normal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Facet {
    pub normal: QVector,
    pub offset: Rational,
}

/// Largest point count the hull routines accept.
pub const MAX_POINTS: usize = 256;

type IVec = Vec<i128>;

#[derive(Clone, Copy, PartialEq, Eq, Default)]
struct Bits([u64; MAX_POINTS / 64]);

impl Bits {
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn and(&self, o: &Bits) -> Bits {
        let mut r = *self;
        for (x, y) in r.0.iter_mut().zip(o.0) {
            *x &= y;
        }
        r
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(o.0).all(|(x, y)| x & !y == 0)
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|x| x.count_ones()).sum()
    }
}

fn overflow() -> Error {
    Error::BadParameter("coordinates too large for exact hull arithmetic".into())
}

fn dot(x: &[i128], y: &[i128]) -> Option<i128> {
    x.iter().zip(y).try_fold(0i128, |acc, (a, b)| acc.checked_add(a.checked_mul(*b)?))
}

fn make_primitive(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

/// `a x - b y`, divided by the gcd of its entries.
fn comb(a: i128, x: &[i128], b: i128, y: &[i128]) -> Option<IVec> {
    let mut out = Vec::with_capacity(x.len());
    for (p, q) in x.iter().zip(y) {
        out.push(a.checked_mul(*p)?.checked_sub(b.checked_mul(*q)?)?);
    }
    make_primitive(&mut out);
    Some(out)
}

fn det(mut m: Vec<IVec>) -> Option<i128> {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| m[r][k] != 0) else {
            return Some(0);
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[k][k].checked_mul(m[i][j])?.checked_sub(m[i][k].checked_mul(m[k][j])?)?;
                m[i][j] = v / prev;
            }
        }
        prev = m[k][k];
    }
    Some(sign * m[n - 1][n - 1])
}

/// Vector orthogonal to `n - 1` rows in `Z^n`, by cofactor expansion.
fn cross(rows: &[IVec], n: usize) -> Option<IVec> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let minor: Vec<IVec> =
            rows.iter().map(|r| r.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect()).collect();
        let m = if minor.is_empty() { 1 } else { det(minor)? };
        out.push(if i % 2 == 0 { m } else { -m });
    }
    make_primitive(&mut out);
    Some(out)
}

/// Row echelon basis of a linear subspace, one row per pivot column.
#[derive(Clone, Default)]
struct Echelon {
    rows: Vec<(usize, IVec)>,
}

impl Echelon {
    fn reduce(&self, v: &[i128]) -> Option<IVec> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p] != 0 {
                v = comb(row[*p], &v, v[*p], row)?;
            }
        }
        Some(v)
    }

    /// Adds a vector already reduced against `self`; false if it is zero.
    fn push(&mut self, v: IVec) -> bool {
        match v.iter().position(|&x| x != 0) {
            Some(p) => {
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }
}

/// Points scaled by the common denominator.
struct Scaled {
    d: usize,
    pts: Vec<IVec>,
    scale: BigInt,
}

fn scale_points(d: usize, vertices: &[QVector]) -> Result<Scaled> {
    if vertices.len() > MAX_POINTS {
        return Err(Error::BadParameter(format!("at most {MAX_POINTS} points supported")));
    }
    let mut scale = BigInt::from(1);
    for v in vertices {
        if v.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: v.dim() });
        }
        for x in v.coords() {
            scale = scale.lcm(x.denom());
        }
    }
    let pts = vertices
        .iter()
        .map(|v| {
            v.coords()
                .iter()
                .map(|x| {
                    let n = x.numer() * (&scale / x.denom());
                    i128::try_from(n).map_err(|_| overflow())
                })
                .collect::<Result<IVec>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Scaled { d, pts, scale })
}

fn to_facet(normal: IVec, offset: i128, scale: &BigInt) -> Facet {
    Facet {
        normal: QVector::new(normal.iter().map(|&x| Rational::from(BigInt::from(x))).collect()),
        offset: Rational::from_bigs(BigInt::from(offset), scale.clone()),
    }
}

fn check_full_dimensional(s: &Scaled) -> Result<()> {
    let Some(first) = s.pts.first() else {
        return Err(Error::NotFullDimensional);
    };
    let mut ech = Echelon::default();
    for p in &s.pts[1..] {
        let diff: IVec = p.iter().zip(first).map(|(a, b)| a - b).collect();
        let r = ech.reduce(&diff).ok_or_else(overflow)?;
        ech.push(r);
    }
    if ech.rows.len() < s.d {
        return Err(Error::NotFullDimensional);
    }
    Ok(())
}

fn dedup(vertices: &[QVector]) -> Vec<QVector> {
    let mut v = vertices.to_vec();
    v.sort();
    v.dedup();
    v
}

fn finish(mut facets: Vec<Facet>) -> Vec<Facet> {
    facets.sort();
    facets.dedup();
    facets
}

/// Facets by exhaustive search over hyperplanes spanned by `d` of the
/// points.
///
/// Each spanned hyperplane is visited once, through its greedy affine basis
/// in index order; flats whose points break that order are pruned.
pub fn facets(d: usize, vertices: &[QVector]) -> Result<Vec<Facet>> {
    let s = scale_points(d, &dedup(vertices))?;
    check_full_dimensional(&s)?;
    let mut search = Spanned { s: &s, found: Vec::new() };
    for first in 0..s.pts.len() {
        let mut flat = Bits::default();
        flat.set(first);
        let residuals: Vec<IVec> =
            s.pts.iter().map(|p| p.iter().zip(&s.pts[first]).map(|(a, b)| a - b).collect()).collect();
        search.grow(first, first, &Echelon::default(), &flat, &residuals)?;
    }
    Ok(finish(search.found))
}

struct Spanned<'a> {
    s: &'a Scaled,
    found: Vec<Facet>,
}

impl Spanned<'_> {
    /// `residuals[u]` is `p_u - p_first` reduced against `ech`.
    fn grow(&mut self, first: usize, last: usize, ech: &Echelon, flat: &Bits, residuals: &[IVec]) -> Result<()> {
        let n = self.s.pts.len();
        if ech.rows.len() + 1 == self.s.d {
            return self.test_hyperplane(first, ech);
        }
        for i in last + 1..n {
            if flat.get(i) {
                continue;
            }
            let r = residuals[i].clone();
            let p = r.iter().position(|&x| x != 0).expect("point outside the flat");
            let mut next_flat = *flat;
            let mut next_res = Vec::with_capacity(n);
            let mut canonical = true;
            for u in 0..n {
                if flat.get(u) {
                    next_res.push(Vec::new());
                    continue;
                }
                let res = if residuals[u][p] == 0 {
                    residuals[u].clone()
                } else {
                    comb(r[p], &residuals[u], residuals[u][p], &r).ok_or_else(overflow)?
                };
                if res.iter().all(|&x| x == 0) {
                    if u < i {
                        canonical = false;
                        break;
                    }
                    next_flat.set(u);
                }
                next_res.push(res);
            }
            if !canonical {
                continue;
            }
            let mut next = ech.clone();
            next.push(r);
            self.grow(first, i, &next, &next_flat, &next_res)?;
        }
        Ok(())
    }

    fn test_hyperplane(&mut self, first: usize, ech: &Echelon) -> Result<()> {
        let d = self.s.d;
        let rows: Vec<IVec> = ech.rows.iter().map(|(_, r)| r.clone()).collect();
        let normal = cross(&rows, d).ok_or_else(overflow)?;
        let c = dot(&normal, &self.s.pts[first]).ok_or_else(overflow)?;
        let (mut below, mut above) = (false, false);
        for p in &self.s.pts {
            let v = dot(&normal, p).ok_or_else(overflow)?;
            below |= v < c;
            above |= v > c;
        }
        match (below, above) {
            (true, false) => self.found.push(to_facet(normal, c, &self.s.scale)),
            (false, true) => self.found.push(to_facet(normal.iter().map(|x| -x).collect(), -c, &self.s.scale)),
            _ => {}
        }
        Ok(())
    }
}

struct Ray {
    y: IVec,
    zeros: Bits,
}

/// Facets by double description: the extreme rays of
/// `{(a, beta) : <a, p> + beta >= 0 for every point p}`.
pub fn facets_double_description(d: usize, vertices: &[QVector]) -> Result<Vec<Facet>> {
    let s = scale_points(d, &dedup(vertices))?;
    check_full_dimensional(&s)?;
    let rows: Vec<IVec> = s.pts.iter().map(|p| p.iter().copied().chain([1]).collect()).collect();
    let mut basis = Echelon::default();
    let mut initial = Vec::new();
    for (i, w) in rows.iter().enumerate() {
        if basis.push(basis.reduce(w).ok_or_else(overflow)?) {
            initial.push(i);
        }
        if initial.len() == d + 1 {
            break;
        }
    }
    let mut rays = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let others: Vec<IVec> = initial.iter().filter(|&&i| i != initial[j]).map(|&i| rows[i].clone()).collect();
        let mut y = cross(&others, d + 1).ok_or_else(overflow)?;
        if dot(&y, &rows[initial[j]]).ok_or_else(overflow)? < 0 {
            y.iter_mut().for_each(|x| *x = -*x);
        }
        let mut zeros = Bits::default();
        for &i in &initial {
            if i != initial[j] {
                zeros.set(i);
            }
        }
        rays.push(Ray { y, zeros });
    }
    for (u, w) in rows.iter().enumerate() {
        if initial.contains(&u) {
            continue;
        }
        let vals: Vec<i128> = rays.iter().map(|r| dot(&r.y, w)).collect::<Option<_>>().ok_or_else(overflow)?;
        if vals.iter().all(|&v| v >= 0) {
            for (r, &v) in rays.iter_mut().zip(&vals) {
                if v == 0 {
                    r.zeros.set(u);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < 0).collect();
        let mut next = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if (common.count() as usize) + 1 < d {
                    continue;
                }
                let adjacent =
                    (0..rays.len()).all(|r| r == p || r == q || !common.subset_of(&rays[r].zeros));
                if !adjacent {
                    continue;
                }
                let y = comb(vals[p], &rays[q].y, vals[q], &rays[p].y).ok_or_else(overflow)?;
                let mut zeros = common;
                zeros.set(u);
                next.push(Ray { y, zeros });
            }
        }
        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + next.len());
        for (r, &v) in rays.into_iter().zip(&vals) {
            if v > 0 {
                kept.push(r);
            } else if v == 0 {
                let mut r = r;
                r.zeros.set(u);
                kept.push(r);
            }
        }
        kept.extend(next);
        rays = kept;
    }
    let facets = rays
        .into_iter()
        .map(|r| {
            let mut normal: IVec = r.y[..d].iter().map(|x| -x).collect();
            let g = normal.iter().fold(0i128, |g, &x| g.gcd(&x));
            normal.iter_mut().for_each(|x| *x /= g);
            Facet {
                normal: QVector::new(normal.iter().map(|&x| Rational::from(BigInt::from(x))).collect()),
                offset: Rational::from_bigs(BigInt::from(r.y[d]), &s.scale * BigInt::from(g)),
            }
        })
        .collect();
    Ok(finish(facets))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[&[i64]]) -> Vec<QVector> {
        v.iter().map(|c| QVector::from_ints(c)).collect()
    }

    fn cube(d: usize) -> Vec<QVector> {
        (0..1i64 << d).map(|m| QVector::from_ints(&(0..d).map(|i| m >> i & 1).collect::<Vec<_>>())).collect()
    }

    #[test]
    fn square() {
        let sq = cube(2);
        let f = facets(2, &sq).unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(f, facets_double_description(2, &sq).unwrap());
        assert!(f.contains(&Facet { normal: QVector::from_ints(&[-1, 0]), offset: Rational::zero() }));
        assert!(f.contains(&Facet { normal: QVector::from_ints(&[1, 0]), offset: Rational::one() }));
    }

    #[test]
    fn simplex_and_interior_points() {
        let tri = pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(facets(3, &tri).unwrap().len(), 4);
        let mut with_inner = pts(&[&[0, 0], &[4, 0], &[0, 4], &[1, 1], &[2, 0], &[2, 2]]);
        let f = facets(2, &with_inner).unwrap();
        assert_eq!(f.len(), 3);
        with_inner.reverse();
        assert_eq!(f, facets_double_description(2, &with_inner).unwrap());
    }

    #[test]
    fn rational_offsets() {
        let p = vec![
            QVector::new(vec![Rational::zero(), Rational::zero()]),
            QVector::new(vec![Rational::new(1, 2), Rational::zero()]),
            QVector::new(vec![Rational::zero(), Rational::new(1, 3)]),
        ];
        let f = facets(2, &p).unwrap();
        assert!(f.contains(&Facet { normal: QVector::from_ints(&[2, 3]), offset: Rational::one() }));
        assert_eq!(f, facets_double_description(2, &p).unwrap());
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(facets(2, &pts(&[&[0, 0], &[1, 1], &[2, 2]])), Err(Error::NotFullDimensional));
        assert_eq!(facets_double_description(2, &pts(&[&[0, 0], &[1, 1]])), Err(Error::NotFullDimensional));
        assert_eq!(facets(3, &[]), Err(Error::NotFullDimensional));
        assert!(matches!(facets(2, &pts(&[&[0, 0, 0]])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn cubes_agree() {
        for d in 1..=4 {
            let f = facets(d, &cube(d)).unwrap();
            assert_eq!(f.len(), 2 * d);
            assert_eq!(f, facets_double_description(d, &cube(d)).unwrap());
        }
    }
}
