//! Splitting a pair along one vector of the second family, and the
//! inequalities that the split is known to satisfy.
//!
//! For a pair `(A, B)` and a nonzero `b_d` in `B`, the first family splits as
//! `A_0 + A_1` by the product with `b_d`. Projecting `B` along `b_d` gives
//! `pi(B)`; vectors whose projection has a single preimage form `B_*`, and
//! the rest is split into `B_0` and `B_1` by which half of `A` they are
//! constant on.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::VectorFamily;
use crate::linalg::{self, QVector, Rational};
use crate::pair::BspPair;

fn values_on(fam: &VectorFamily, b: &QVector) -> BTreeSet<Rational> {
    fam.iter().map(|a| a.dot(b)).collect()
}

fn split(a: &VectorFamily, b_d: &QVector) -> (VectorFamily, VectorFamily) {
    let zero = a.filter(|x| x.dot(b_d).is_zero());
    let one = a.filter(|x| x.dot(b_d).is_one());
    (zero, one)
}

/// `max(dim A_0, dim A_1)` for the split along `b` (affine dimensions).
pub fn split_dimension(p: &BspPair, b: &QVector) -> isize {
    let (a0, a1) = split(p.a(), b);
    a0.affine_dim().max(a1.affine_dim())
}

/// Every nonzero `b` in the second family attaining the largest split
/// dimension, best first: ties are ordered by decreasing coordinates.
pub fn tied_bd(p: &BspPair) -> Vec<QVector> {
    let scored: Vec<(isize, &QVector)> =
        p.b().iter().filter(|b| !b.is_zero()).map(|b| (split_dimension(p, b), b)).collect();
    let best = scored.iter().map(|s| s.0).max().unwrap_or(-1);
    let mut out: Vec<QVector> = scored.into_iter().filter(|s| s.0 == best).map(|s| s.1.clone()).collect();
    out.sort_by(|x, y| y.cmp(x));
    out
}

pub fn choose_bd(p: &BspPair) -> Result<QVector> {
    tied_bd(p).into_iter().next().ok_or(Error::NotSpanning(p.dim()))
}

/// A pair brought into the position where the split along `b_d` behaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub pair: BspPair,
    /// `b_d` after normalization (it is negated when `A` is translated).
    pub b_d: QVector,
    /// The translation applied to `A`, if any.
    pub shift: Option<QVector>,
}

/// Translates `A` and negates some vectors of `B` so that: products with
/// `b_d` are 0/1, `|A_0| >= |A_1|`, products between `A_0` and `B` are 0/1,
/// and `pi(B)` has no opposite points. Follows the constructive order:
/// translate if `|A_0| <= |A_1|`, then fix signs against `A_0`, then against
/// a translate of `A_1` through the origin.
pub fn normalize(p: &BspPair, b_d: &QVector) -> Result<Normalized> {
    if !p.b().contains(b_d) || b_d.is_zero() {
        return Err(Error::NormalizationFailed("b_d must be a nonzero member of B".into()));
    }
    let d = p.dim();
    let (a0, a1) = split(p.a(), b_d);
    let mut a = p.a().clone();
    let mut b = p.b().clone();
    let mut bd = b_d.clone();
    let mut shift = None;
    if a0.len() <= a1.len() {
        let star = a1.vectors().first().ok_or_else(|| Error::NormalizationFailed("A_1 is empty".into()))?.clone();
        a = a.map(|x| x.sub(&star));
        let neg = bd.neg();
        b = b.map(|x| if x == &bd { neg.clone() } else { x.clone() });
        bd = neg;
        shift = Some(star);
    }
    let (a0, a1) = split(&a, &bd);
    let minus_one = -Rational::one();
    let zero_one_neg: BTreeSet<Rational> = [Rational::zero(), minus_one.clone()].into();
    let only_zero: BTreeSet<Rational> = [Rational::zero()].into();
    let b = b.map(|x| if values_on(&a0, x) == zero_one_neg { x.neg() } else { x.clone() });
    let a1_shifted = match a1.vectors().first() {
        Some(base) => a1.map(|x| x.sub(base)),
        None => a1.clone(),
    };
    let b = b.map(|x| {
        if values_on(&a0, x) == only_zero && values_on(&a1_shifted, x) == zero_one_neg {
            x.neg()
        } else {
            x.clone()
        }
    });
    if b.len() != p.b().len() {
        return Err(Error::NormalizationFailed("sign changes merged two vectors".into()));
    }
    let pair = BspPair::new(a, b)?;
    let out = Normalized { pair, b_d: bd, shift };
    let report = claim1_items(&out.pair, &out.b_d);
    if let Some(bad) = report.iter().find(|i| !i.pass) {
        return Err(Error::NormalizationFailed(format!("{} does not hold ({} vs {})", bad.name, bad.lhs, bad.rhs)));
    }
    debug_assert_eq!(out.pair.dim(), d);
    Ok(out)
}

/// Orthogonal projection along `b_d`.
fn project_along(x: &QVector, b_d: &QVector) -> QVector {
    let t = x.dot(b_d) / b_d.dot(b_d);
    x.sub(&b_d.scale(&t))
}

fn has_opposites(fam: &VectorFamily) -> bool {
    fam.iter().any(|x| !x.is_zero() && fam.contains(&x.neg()))
}

/// The split of a normalized pair along `b_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub pair: BspPair,
    pub b_d: QVector,
    pub a0: VectorFamily,
    pub a1: VectorFamily,
    pub b_star: VectorFamily,
    pub b0: VectorFamily,
    pub b1: VectorFamily,
    /// Vectors of `B \ B_*` constant on neither half of `A`.
    pub unassigned: VectorFamily,
    /// Linear dimension of `span(A_0)`.
    pub u0_dim: usize,
    pub pi_b: VectorFamily,
    pub tau_pi_b: VectorFamily,
    /// Largest number of vectors of `B` with a common projection.
    pub max_preimages: usize,
}

/// Decomposes `p` along its preferred `b_d`, taking `p` as already
/// normalized.
pub fn decompose(p: &BspPair) -> Result<Decomposition> {
    let b_d = choose_bd(p)?;
    decompose_along(p, &b_d)
}

pub fn decompose_along(p: &BspPair, b_d: &QVector) -> Result<Decomposition> {
    let d = p.dim();
    if !p.b().contains(b_d) || b_d.is_zero() {
        return Err(Error::BadParameter("b_d must be a nonzero member of B".into()));
    }
    let (a0, a1) = split(p.a(), b_d);
    let mut fibres: BTreeMap<QVector, Vec<QVector>> = BTreeMap::new();
    for b in p.b() {
        fibres.entry(project_along(b, b_d)).or_default().push(b.clone());
    }
    let max_preimages = fibres.values().map(Vec::len).max().unwrap_or(0);
    let pi_b = VectorFamily::new(d, fibres.keys().cloned())?;
    let b_star = VectorFamily::new(d, fibres.values().filter(|f| f.len() == 1).flatten().cloned())?;

    let mut b0 = Vec::new();
    let mut b1 = Vec::new();
    let mut unassigned = Vec::new();
    for b in p.b().iter().filter(|b| !b_star.contains(b)) {
        let const0 = values_on(&a0, b).len() <= 1;
        let const1 = values_on(&a1, b).len() <= 1;
        if (b.is_zero() || b == b_d) && const1 {
            b1.push(b.clone());
        } else if const0 {
            b0.push(b.clone());
        } else if const1 {
            b1.push(b.clone());
        } else {
            unassigned.push(b.clone());
        }
    }

    let u0: Vec<QVector> = a0.vectors().to_vec();
    let u0_dim = linalg::rank_of(&u0, d);
    let tau_pi_b = pi_b.map(|v| linalg::project_onto_span(v, &u0));
    Ok(Decomposition {
        pair: p.clone(),
        b_d: b_d.clone(),
        a0,
        a1,
        b_star,
        b0: VectorFamily::new(d, b0)?,
        b1: VectorFamily::new(d, b1)?,
        unassigned: VectorFamily::new(d, unassigned)?,
        u0_dim,
        pi_b,
        tau_pi_b,
        max_preimages,
    })
}

/// One inequality evaluated on concrete numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditItem {
    pub name: String,
    pub lhs: i128,
    pub rhs: i128,
    pub pass: bool,
}

impl AuditItem {
    fn le(name: &str, lhs: i128, rhs: i128) -> Self {
        AuditItem { name: name.into(), lhs, rhs, pass: lhs <= rhs }
    }

    fn eq(name: &str, lhs: i128, rhs: i128) -> Self {
        AuditItem { name: name.into(), lhs, rhs, pass: lhs == rhs }
    }

    fn ge(name: &str, lhs: i128, rhs: i128) -> Self {
        AuditItem { name: name.into(), lhs, rhs, pass: lhs >= rhs }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub d: usize,
    pub b_d: QVector,
    pub items: Vec<AuditItem>,
}

impl AuditReport {
    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AuditItem> {
        self.items.iter().filter(|i| !i.pass)
    }
}

fn claim1_items(p: &BspPair, b_d: &QVector) -> Vec<AuditItem> {
    let (a0, a1) = split(p.a(), b_d);
    let off_split = (p.a().len() - a0.len() - a1.len()) as i128;
    let a0_nonbinary = p.b().iter().filter(|b| a0.iter().any(|a| !crate::pair::is_binary(&a.dot(b)))).count();
    let pi_b = p.b().map(|b| project_along(b, b_d));
    vec![
        AuditItem::eq("claim1-split", off_split, 0),
        AuditItem::ge("claim1-halves", a0.len() as i128, a1.len() as i128),
        AuditItem::eq("claim1-binary-on-a0", a0_nonbinary as i128, 0),
        AuditItem::eq("claim1-no-opposites", has_opposites(&pi_b) as i128, 0),
    ]
}

fn pow2(e: isize) -> i128 {
    if e < 0 {
        0
    } else {
        1i128 << e
    }
}

/// Evaluates every inequality of the split exactly.
pub fn audit(dec: &Decomposition) -> AuditReport {
    let d = dec.pair.dim();
    let n = |f: &VectorFamily| f.len() as i128;
    let (a, b) = (n(dec.pair.a()), n(dec.pair.b()));
    let (a0, a1) = (n(&dec.a0), n(&dec.a1));
    let (b0, b1) = (n(&dec.b0), n(&dec.b1));
    let star = n(&dec.b_star);
    let pi = n(&dec.pi_b);
    let cube = 1i128 << d;
    let u0 = dec.u0_dim as isize;

    let mut items = claim1_items(&dec.pair, &dec.b_d);
    items.push(AuditItem::le("claim2-preimages", dec.max_preimages as i128, 2));
    items.push(AuditItem::eq("cardinality", b, 2 * pi - star));
    items.push(AuditItem::le("inequality0", a * b, 2 * a0 * pi + a1 * (b - star)));
    items.push(AuditItem::le("claim3", pi, pow2(d as isize - 1 - u0) * n(&dec.tau_pi_b)));
    items.push(AuditItem::eq("claim4-partition", n(&dec.unassigned), 0));
    items.push(AuditItem::le("claim5-0", a0 * b0, cube));
    items.push(AuditItem::le("claim5-1", a1 * b1, cube));
    items.push(AuditItem::le("eq8", a0 * (b0 + 2), cube));
    items.push(AuditItem::le("inequality1", a * b, (u0 as i128 + 1) * cube + a0 * b0 + a1 * b1));
    for (i, (ai, bi)) in [(&dec.a0, &dec.b0), (&dec.a1, &dec.b1)].into_iter().enumerate() {
        let dim_a = ai.affine_dim();
        let dim_b = bi.rank() as isize;
        let cap_a = if ai.is_empty() { 0 } else { pow2(dim_a) };
        items.push(AuditItem::le(&format!("slice-size-a{i}"), n(ai), cap_a));
        items.push(AuditItem::le(&format!("slice-size-b{i}"), n(bi), pow2(dim_b)));
        items.push(AuditItem::le(&format!("slice-dims-{i}"), (dim_a.max(0) + dim_b) as i128, d as i128));
    }
    AuditReport { d, b_d: dec.b_d.clone(), items }
}

/// Normalizes, decomposes and audits along every tied `b_d`.
pub fn audit_all_ties(p: &BspPair) -> Result<Vec<AuditReport>> {
    tied_bd(p)
        .iter()
        .map(|bd| {
            let norm = normalize(p, bd)?;
            Ok(audit(&decompose_along(&norm.pair, &norm.b_d)?))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SliceMode {
    Exhaustive,
    Random { seed: u64, trials: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceReport {
    pub d: usize,
    pub mode: SliceMode,
    /// Candidate sets generated.
    pub trials: u64,
    /// Sets inside the two half-cubes without opposite points.
    pub eligible: u64,
    /// Eligible sets with `|X| = 2^{dim X}`.
    pub tight: u64,
}

/// Points of `{0,1}^d` and `{0,-1}^d` (the origin once).
fn half_cube_points(d: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for sign in [1i64, -1] {
        for m in 0..1usize << d {
            if sign == -1 && m == 0 {
                continue;
            }
            out.push((0..d).map(|i| sign * (m >> i & 1) as i64).collect());
        }
    }
    out
}

fn in_half_cubes(x: &[i64]) -> bool {
    x.iter().all(|&c| c == 0 || c == 1) || x.iter().all(|&c| c == 0 || c == -1)
}

/// Checks `|X| <= 2^{dim X}`; returns whether it is tight.
fn check_slice(d: usize, x: &[Vec<i64>]) -> Result<Option<bool>> {
    if x.is_empty() || !x.iter().all(|v| in_half_cubes(v)) {
        return Ok(None);
    }
    let set: BTreeSet<&Vec<i64>> = x.iter().collect();
    let opposite = x.iter().any(|v| v.iter().any(|&c| c != 0) && set.contains(&v.iter().map(|c| -c).collect::<Vec<_>>()));
    if opposite {
        return Ok(None);
    }
    let pts: Vec<QVector> = set.iter().map(|v| QVector::from_ints(v)).collect();
    let dim = linalg::affine_dim(&pts);
    debug_assert!(dim <= d as isize);
    let cap = 1u64 << dim;
    if pts.len() as u64 > cap {
        return Err(Error::CounterexampleFound(format!("{pts:?}")));
    }
    Ok(Some(pts.len() as u64 == cap))
}

fn tally(r: Option<bool>, report: &mut SliceReport) {
    report.trials += 1;
    if let Some(t) = r {
        report.eligible += 1;
        report.tight += t as u64;
    }
}

/// Tests the half-cube slice bound on every subset of `{-1,0,1}^d` (d <= 2)
/// or on seeded random sets.
pub fn check_lemslice(d: usize, mode: SliceMode) -> Result<SliceReport> {
    if d == 0 {
        return Err(Error::BadParameter("d must be positive".into()));
    }
    let mut report = SliceReport { d, mode, trials: 0, eligible: 0, tight: 0 };
    match mode {
        SliceMode::Exhaustive => {
            if d > 2 {
                return Err(Error::BadParameter("exhaustive mode needs d <= 2".into()));
            }
            let grid: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
                .map(|mut m| {
                    (0..d)
                        .map(|_| {
                            let c = (m % 3) as i64 - 1;
                            m /= 3;
                            c
                        })
                        .collect()
                })
                .collect();
            for mask in 0u32..(1 << grid.len()) {
                let x: Vec<Vec<i64>> =
                    grid.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v.clone()).collect();
                let r = check_slice(d, &x)?;
                tally(r, &mut report);
            }
        }
        SliceMode::Random { seed, trials } => {
            if d > 10 {
                return Err(Error::BadParameter("random mode needs d <= 10".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points = half_cube_points(d);
            for t in 0..trials {
                // Alternate between unconstrained sets and sets inside a
                // random hyperplane, where the bound is tighter.
                let pool: Vec<&Vec<i64>> = if t % 2 == 0 {
                    points.iter().collect()
                } else {
                    let c: Vec<i64> = (0..d).map(|_| rng.gen_range(-2i64..=2)).collect();
                    let delta = rng.gen_range(0i64..=1);
                    points.iter().filter(|x| x.iter().zip(&c).map(|(a, b)| a * b).sum::<i64>() == delta).collect()
                };
                if pool.is_empty() {
                    tally(None, &mut report);
                    continue;
                }
                let size = rng.gen_range(1..=pool.len().min((1 << d) + 2));
                let mut x: Vec<Vec<i64>> = Vec::with_capacity(size);
                for v in pool.choose_multiple(&mut rng, size) {
                    let opp: Vec<i64> = v.iter().map(|c| -c).collect();
                    if !x.contains(&opp) {
                        x.push((*v).clone());
                    }
                }
                let r = check_slice(d, &x)?;
                tally(r, &mut report);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{construct_example, ExampleKind};

    fn fam(d: usize, v: &[&[i64]]) -> VectorFamily {
        VectorFamily::from_ints(d, v).unwrap()
    }

    /// A = unit square, B = {0, e1, e2}.
    fn square_pair() -> BspPair {
        BspPair::new(fam(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]), fam(2, &[&[0, 0], &[1, 0], &[0, 1]])).unwrap()
    }

    #[test]
    fn choose_prefers_first_coordinate() {
        let p = square_pair();
        assert_eq!(choose_bd(&p).unwrap(), QVector::from_ints(&[1, 0]));
        assert_eq!(split_dimension(&p, &QVector::from_ints(&[1, 0])), 1);
        assert_eq!(tied_bd(&p).len(), 2);
        let one = BspPair::new(fam(1, &[&[0], &[1]]), fam(1, &[&[0], &[1]])).unwrap();
        assert_eq!(choose_bd(&one).unwrap(), QVector::from_ints(&[1]));
        let e3 = construct_example(ExampleKind::Example3, 3, None).unwrap();
        let bd = choose_bd(&e3).unwrap();
        let (a0, a1) = split(e3.a(), &bd);
        assert_eq!(a0.affine_dim().max(a1.affine_dim()), 2);
    }

    #[test]
    fn square_decomposition() {
        let dec = decompose(&square_pair()).unwrap();
        assert_eq!(dec.a0, fam(2, &[&[0, 0], &[0, 1]]));
        assert_eq!(dec.a1, fam(2, &[&[1, 0], &[1, 1]]));
        assert_eq!(dec.b_star, fam(2, &[&[0, 1]]));
        assert_eq!(dec.b1, fam(2, &[&[0, 0], &[1, 0]]));
        assert!(dec.b0.is_empty());
        let report = audit(&dec);
        assert!(report.pass(), "{:?}", report.failures().collect::<Vec<_>>());
        let ineq0 = report.items.iter().find(|i| i.name == "inequality0").unwrap();
        assert_eq!((ineq0.lhs, ineq0.rhs), (12, 12));
    }

    #[test]
    fn one_dimensional() {
        let p = BspPair::new(fam(1, &[&[0], &[1]]), fam(1, &[&[0], &[1]])).unwrap();
        let dec = decompose(&p).unwrap();
        assert_eq!(dec.a0, fam(1, &[&[0]]));
        assert_eq!(dec.a1, fam(1, &[&[1]]));
        assert!(dec.b_star.is_empty());
        assert_eq!(dec.b1, fam(1, &[&[0], &[1]]));
        let r = audit(&dec);
        let get = |name: &str| r.items.iter().find(|i| i.name == name).unwrap().clone();
        assert_eq!((get("claim5-1").lhs, get("claim5-1").rhs), (2, 2));
        assert_eq!((get("eq8").lhs, get("eq8").rhs), (2, 2));
        assert!(r.pass());

        // equal halves: the translation branch runs
        let n = normalize(&p, &QVector::from_ints(&[1])).unwrap();
        assert!(n.shift.is_some());
        assert_eq!(n.b_d, QVector::from_ints(&[-1]));
        let (a0, a1) = split(n.pair.a(), &n.b_d);
        assert!(a0.len() >= a1.len());
    }

    #[test]
    fn normalized_fixpoint() {
        // A = {0, e1, e2}, B = square: |A_0| > |A_1| along e1
        let p = BspPair::new(fam(2, &[&[0, 0], &[1, 0], &[0, 1]]), fam(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])).unwrap();
        let n = normalize(&p, &QVector::from_ints(&[1, 0])).unwrap();
        assert_eq!(n.pair, p);
        assert!(n.shift.is_none());
    }

    #[test]
    fn example4_normalizes() {
        let p = construct_example(ExampleKind::Example4, 3, None).unwrap();
        for bd in tied_bd(&p) {
            let n = normalize(&p, &bd).unwrap();
            let dec = decompose_along(&n.pair, &n.b_d).unwrap();
            assert!(audit(&dec).pass());
        }
    }

    #[test]
    fn example3_claim3() {
        let p = construct_example(ExampleKind::Example3, 3, None).unwrap();
        for r in audit_all_ties(&p).unwrap() {
            assert!(r.pass(), "{:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn rejects_bad_bd() {
        let p = square_pair();
        assert!(normalize(&p, &QVector::from_ints(&[0, 0])).is_err());
        assert!(normalize(&p, &QVector::from_ints(&[1, 1])).is_err());
    }

    #[test]
    fn slices() {
        let r = check_lemslice(2, SliceMode::Exhaustive).unwrap();
        assert_eq!(r.trials, 512);
        assert!(r.eligible > 0 && r.tight > 0);
        let r = check_lemslice(1, SliceMode::Exhaustive).unwrap();
        assert_eq!(r.trials, 8);
        assert!(check_lemslice(3, SliceMode::Exhaustive).is_err());
        let r = check_lemslice(4, SliceMode::Random { seed: 1, trials: 2000 }).unwrap();
        assert_eq!(r.trials, 2000);
        assert!(r.eligible > 1000);
        // the full cube is tight
        let cube: Vec<Vec<i64>> = (0..8).map(|m| (0..3).map(|i| (m >> i & 1) as i64).collect()).collect();
        assert_eq!(check_slice(3, &cube).unwrap(), Some(true));
    }
}
