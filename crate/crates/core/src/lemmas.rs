//! Exhaustive checks of the auxiliary counting lemmas.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{QVector, Rational};
use crate::polytope::{verify_lemma3, Lemma3Certificate};

/// Subsets of `{1, ..., ground}` as bitmasks, bit `i - 1` for element `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubsetFamily {
    pub ground: usize,
    pub sets: Vec<u32>,
}

impl SubsetFamily {
    pub fn new(ground: usize, mut sets: Vec<u32>) -> Result<Self> {
        if ground > 31 || sets.iter().any(|&s| s >> ground != 0) {
            return Err(Error::BadParameter(format!("sets do not fit in a ground set of {ground}")));
        }
        sets.sort_unstable();
        sets.dedup();
        Ok(SubsetFamily { ground, sets })
    }

    /// Every subset whose size passes `keep`.
    pub fn by_size(ground: usize, keep: impl Fn(u32) -> bool) -> Self {
        let sets = (0..1u32 << ground).filter(|s| keep(s.count_ones())).collect();
        SubsetFamily { ground, sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Elements of each set, 1-based.
    pub fn members(&self) -> Vec<Vec<usize>> {
        self.sets.iter().map(|&s| (0..self.ground).filter(|i| s >> i & 1 == 1).map(|i| i + 1).collect()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality2Report {
    pub d_max: usize,
    pub checked: usize,
    /// `(d, f)` with both sides equal.
    pub equality_cases: Vec<(usize, usize)>,
    pub violations: Vec<(usize, usize)>,
}

impl Inequality2Report {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

fn pow2(e: usize) -> BigInt {
    BigInt::from(1) << e
}

/// `(d+f)(2^{d-1} + 2^{d-f}) <= d 2^d + 2d` for `2 <= f <= d <= d_max`.
pub fn check_inequality2(d_max: usize) -> Inequality2Report {
    let mut report = Inequality2Report { d_max, checked: 0, equality_cases: Vec::new(), violations: Vec::new() };
    for d in 2..=d_max {
        let rhs = BigInt::from(d) * pow2(d) + 2 * d;
        for f in 2..=d {
            let lhs = BigInt::from(d + f) * (pow2(d - 1) + pow2(d - f));
            report.checked += 1;
            if lhs > rhs {
                report.violations.push((d, f));
            } else if lhs == rhs {
                report.equality_cases.push((d, f));
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinomReport {
    pub n_max: usize,
    pub checked: usize,
    /// `(n, j)` where the three-term sum is exactly `7/8 2^n`.
    pub equality_cases: Vec<(usize, i64)>,
    pub violations: Vec<(usize, i64)>,
}

impl BinomReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Binomial coefficient, zero outside `0..=n`.
pub fn binom(n: usize, k: i64) -> BigInt {
    if k < 0 || k as usize > n {
        return BigInt::from(0);
    }
    let k = (k as usize).min(n - k as usize);
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

fn three_terms(n: usize, j: i64) -> BigInt {
    binom(n, j - 1) + binom(n, j) + binom(n, j + 1)
}

/// `C(n,j-1) + C(n,j) + C(n,j+1) <= 7/8 2^n` for `3 <= n <= n_max` and
/// `-1 <= j <= n+1`.
pub fn check_binom_bound(n_max: usize) -> BinomReport {
    let mut report = BinomReport { n_max, checked: 0, equality_cases: Vec::new(), violations: Vec::new() };
    for n in 3..=n_max {
        let bound = BigInt::from(7) * pow2(n);
        for j in -1..=n as i64 + 1 {
            let lhs = BigInt::from(8) * three_terms(n, j);
            report.checked += 1;
            if lhs > bound {
                report.violations.push((n, j));
            } else if lhs == bound {
                report.equality_cases.push((n, j));
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Violation {
    pub s1: u32,
    pub s2: u32,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub d: usize,
    /// Pairs `(S1, S2)` with `|S2 \ S1| > 1`.
    pub checked_pairs: u64,
    pub max_count: u64,
    /// Pairs whose count exceeds `7/8 2^{d-1}`.
    pub violations: Vec<Lemma1Violation>,
    /// Pairs whose count differs from `2^{d-1-p-q}` times the three-term
    /// binomial sum in `p + q`.
    pub formula_mismatches: Vec<Lemma1Violation>,
}

impl Lemma1Report {
    pub fn pass(&self) -> bool {
        self.violations.is_empty() && self.formula_mismatches.is_empty()
    }
}

/// Largest `d` accepted by [`check_lemma1`].
pub const LEMMA1_MAX_DIM: usize = 13;

/// For all `S1, S2` in `[d-1]` with `|S2 \ S1| > 1`, counts the sets `S`
/// with `|S & S2| - |S & S1|` in `{-1, 0, 1}`.
pub fn check_lemma1(d: usize) -> Result<Lemma1Report> {
    if !(2..=LEMMA1_MAX_DIM).contains(&d) {
        return Err(Error::BadParameter(format!("d must be in 2..={LEMMA1_MAX_DIM}, got {d}")));
    }
    let n = d - 1;
    let bound = 7u64 << n;
    let formula: Vec<Vec<u64>> = (0..=n)
        .map(|pq| (0..=pq).map(|q| u64::try_from(three_terms(pq, q as i64)).expect("small")).collect())
        .collect();
    let per_s1: Vec<Lemma1Report> = (0..1u32 << n)
        .into_par_iter()
        .map(|s1| {
            let mut r =
                Lemma1Report { d, checked_pairs: 0, max_count: 0, violations: Vec::new(), formula_mismatches: Vec::new() };
            for s2 in 0..1u32 << n {
                let p = (s2 & !s1).count_ones() as usize;
                if p <= 1 {
                    continue;
                }
                let q = (s1 & !s2).count_ones() as usize;
                let count = (0..1u32 << n)
                    .filter(|s| {
                        let diff = (s & s2).count_ones() as i64 - (s & s1).count_ones() as i64;
                        diff.abs() <= 1
                    })
                    .count() as u64;
                r.checked_pairs += 1;
                r.max_count = r.max_count.max(count);
                if 8 * count > bound {
                    r.violations.push(Lemma1Violation { s1, s2, count });
                }
                if count != formula[p + q][q] << (n - p - q) {
                    r.formula_mismatches.push(Lemma1Violation { s1, s2, count });
                }
            }
            r
        })
        .collect();
    let mut report =
        Lemma1Report { d, checked_pairs: 0, max_count: 0, violations: Vec::new(), formula_mismatches: Vec::new() };
    for r in per_s1 {
        report.checked_pairs += r.checked_pairs;
        report.max_count = report.max_count.max(r.max_count);
        report.violations.extend(r.violations);
        report.formula_mismatches.extend(r.formula_mismatches);
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma2Report {
    pub d: usize,
    /// Every family of `d` subsets of `[d-1]` with pairwise differences of
    /// size at most one.
    pub families: Vec<SubsetFamily>,
    /// False in the degenerate case `d = 2`, where the count is reported
    /// but not checked.
    pub asserted: bool,
    pub matches_expected: bool,
}

impl Lemma2Report {
    pub fn pass(&self) -> bool {
        !self.asserted || self.matches_expected
    }
}

/// Largest `d` accepted by [`check_lemma2`].
pub const LEMMA2_MAX_DIM: usize = 6;

pub fn check_lemma2(d: usize) -> Result<Lemma2Report> {
    if !(2..=LEMMA2_MAX_DIM).contains(&d) {
        return Err(Error::BadParameter(format!("d must be in 2..={LEMMA2_MAX_DIM}, got {d}")));
    }
    let n = d - 1;
    let mut families = Vec::new();
    let mut current = Vec::with_capacity(d);
    extend_family(n, d, 0, &mut current, &mut families);
    let high = SubsetFamily::by_size(n, |k| k as usize + 2 >= d);
    let low = SubsetFamily::by_size(n, |k| k <= 1);
    let mut expected = vec![high, low];
    expected.sort();
    expected.dedup();
    let matches_expected = families == expected;
    Ok(Lemma2Report { d, families, asserted: d > 2, matches_expected })
}

fn extend_family(n: usize, size: usize, from: u32, current: &mut Vec<u32>, out: &mut Vec<SubsetFamily>) {
    if current.len() == size {
        out.push(SubsetFamily { ground: n, sets: current.clone() });
        return;
    }
    for s in from..1u32 << n {
        if current.iter().all(|&t| (s & !t).count_ones() <= 1 && (t & !s).count_ones() <= 1) {
            current.push(s);
            extend_family(n, size, s + 1, current, out);
            current.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma3Report {
    pub d_max: usize,
    pub seed: u64,
    pub bases: usize,
    /// Random draws rejected as dependent before a basis was found.
    pub resampled: usize,
    pub failures: Vec<Lemma3Certificate>,
}

impl Lemma3Report {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs the cross-polytope certificate on `count` random rational bases,
/// cycling the dimension through `1..=d_max`.
pub fn check_lemma3(d_max: usize, count: usize, seed: u64) -> Result<Lemma3Report> {
    if d_max == 0 {
        return Err(Error::BadParameter("d_max must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Lemma3Report { d_max, seed, bases: count, resampled: 0, failures: Vec::new() };
    for i in 0..count {
        let d = 1 + i % d_max;
        loop {
            let basis: Vec<QVector> = (0..d)
                .map(|_| QVector::new((0..d).map(|_| Rational::new(rng.gen_range(-4..=4), rng.gen_range(1..=3))).collect()))
                .collect();
            match verify_lemma3(&basis) {
                Ok(cert) => {
                    if !cert.pass {
                        report.failures.push(cert);
                    }
                    break;
                }
                Err(Error::SingularBasis) => report.resampled += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inequality2() {
        let r = check_inequality2(10);
        assert!(r.pass());
        assert!(r.equality_cases.contains(&(4, 4)));
        assert!(r.equality_cases.contains(&(3, 2)));
        assert!(!r.equality_cases.contains(&(10, 3)));
        assert_eq!(r.checked, 45);
        assert!(check_inequality2(1).pass());
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(4, 2), BigInt::from(6));
        assert_eq!(binom(3, -1), BigInt::from(0));
        assert_eq!(three_terms(3, -1), BigInt::from(1));
        let r = check_binom_bound(12);
        assert!(r.pass());
        assert!(r.equality_cases.contains(&(3, 1)));
        assert!(r.equality_cases.contains(&(4, 2)));
        assert_eq!(r.checked, (3..=12).map(|n| n + 3).sum::<usize>());
    }

    #[test]
    fn lemma1() {
        let count = |d: usize, s1: u32, s2: u32| {
            (0..1u32 << (d - 1))
                .filter(|s| ((s & s2).count_ones() as i64 - (s & s1).count_ones() as i64).abs() <= 1)
                .count()
        };
        assert_eq!(count(4, 0, 0b011), 6);
        assert!(8 * count(4, 0b100, 0b011) <= 7 * 8);
        for d in 2..=7 {
            let r = check_lemma1(d).unwrap();
            assert!(r.pass(), "d={d}");
        }
        assert_eq!(check_lemma1(2).unwrap().checked_pairs, 0);
        assert_eq!(check_lemma1(3).unwrap().max_count, 3);
        assert!(check_lemma1(14).is_err());
    }

    #[test]
    fn lemma2() {
        let r = check_lemma2(3).unwrap();
        assert!(r.pass() && r.asserted);
        assert_eq!(r.families.len(), 2);
        let members: Vec<Vec<Vec<usize>>> = r.families.iter().map(SubsetFamily::members).collect();
        assert!(members.contains(&vec![vec![], vec![1], vec![2]]));
        assert!(members.contains(&vec![vec![1], vec![2], vec![1, 2]]));
        for d in 4..=5 {
            let r = check_lemma2(d).unwrap();
            assert!(r.pass() && r.families.len() == 2, "d={d}");
        }
        let r = check_lemma2(2).unwrap();
        assert!(!r.asserted && r.pass());
        assert_eq!(r.families.len(), 1);
        assert!(check_lemma2(7).is_err());
    }

    #[test]
    fn lemma3_random() {
        let r = check_lemma3(4, 40, 7).unwrap();
        assert!(r.pass());
        assert_eq!(r, check_lemma3(4, 40, 7).unwrap());
        assert!(check_lemma3(0, 1, 0).is_err());
    }

    #[test]
    fn subset_family() {
        assert!(SubsetFamily::new(2, vec![0b100]).is_err());
        let f = SubsetFamily::new(3, vec![3, 1, 3]).unwrap();
        assert_eq!(f.sets, vec![1, 3]);
        assert_eq!(f.members(), vec![vec![1], vec![1, 2]]);
    }
}
