//! Size statistics of a catalog.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::catalog::Catalog;
use crate::error::{Error, Result};

/// Achievable family sizes and their extremes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeStats {
    pub d: usize,
    /// Every `(|A|, |B|)` realized by spanning families with binary
    /// products, symmetric under swap.
    pub achievable: BTreeSet<(usize, usize)>,
    /// Elements of `achievable` not dominated in the product order.
    pub maximal_pairs: BTreeSet<(usize, usize)>,
    pub max_product: usize,
}

impl SizeStats {
    /// Stats generated by a list of realizable size pairs.
    ///
    /// Removing a vector from a spanning family of more than `d` vectors can
    /// keep it spanning, and every pair sits inside a closed one, so the
    /// achievable set is the downward closure of the closed sizes within
    /// `[d, inf)^2`.
    pub fn from_sizes(d: usize, sizes: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut tops: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (m, n) in sizes {
            tops.insert((m, n));
            tops.insert((n, m));
        }
        let mut achievable = BTreeSet::new();
        for &(m, n) in &tops {
            for x in d..=m {
                for y in d..=n {
                    achievable.insert((x, y));
                }
            }
        }
        let maximal_pairs: BTreeSet<(usize, usize)> = achievable
            .iter()
            .copied()
            .filter(|&(m, n)| !achievable.contains(&(m + 1, n)) && !achievable.contains(&(m, n + 1)))
            .collect();
        let max_product = achievable.iter().map(|&(m, n)| m * n).max().unwrap_or(0);
        SizeStats { d, achievable, maximal_pairs, max_product }
    }

    /// Points `(|A|, |B|)`.
    pub fn size_points(&self) -> Vec<(usize, usize)> {
        self.achievable.iter().copied().collect()
    }

    /// Points `(min(|A|,|B|), |A||B|)`, deduplicated.
    pub fn min_product_points(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<_> = self.achievable.iter().map(|&(m, n)| (m.min(n), m * n)).collect();
        set.into_iter().collect()
    }

    /// Largest product among pairs whose smaller side is at least `k`.
    pub fn max_product_with_min(&self, k: usize) -> Option<usize> {
        self.achievable.iter().filter(|&&(m, n)| m.min(n) >= k).map(|&(m, n)| m * n).max()
    }

    pub fn achievable_csv(&self) -> String {
        to_csv(self.achievable.iter().copied())
    }

    pub fn maximal_csv(&self) -> String {
        to_csv(self.maximal_pairs.iter().copied())
    }
}

fn to_csv(points: impl Iterator<Item = (usize, usize)>) -> String {
    let mut s = String::from("size_a,size_b\n");
    for (m, n) in points {
        s.push_str(&format!("{m},{n}\n"));
    }
    s
}

pub fn stats(c: &Catalog) -> SizeStats {
    SizeStats::from_sizes(c.d, c.classes.values().map(|e| (e.size_a, e.size_b)))
}

/// Parses `a,b` lines; a non-numeric first line is taken as a header.
pub fn parse_size_csv(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse(format!("line {}: expected two fields", i + 1)));
        };
        match (a.parse(), b.parse()) {
            (Ok(a), Ok(b)) => out.push((a, b)),
            _ if i == 0 => continue,
            _ => return Err(Error::Parse(format!("line {}: not a size pair", i + 1))),
        }
    }
    Ok(out)
}

/// Set difference between computed and reference achievable sizes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceDiff {
    /// In the reference but not computed.
    pub missing: Vec<(usize, usize)>,
    /// Computed but not in the reference.
    pub extra: Vec<(usize, usize)>,
}

impl ReferenceDiff {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

pub fn verify_against_reference(s: &SizeStats, reference: &[(usize, usize)]) -> ReferenceDiff {
    let reference: BTreeSet<_> = reference.iter().copied().collect();
    ReferenceDiff {
        missing: reference.difference(&s.achievable).copied().collect(),
        extra: s.achievable.difference(&reference).copied().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn downward_closure() {
        let s = SizeStats::from_sizes(2, [(3, 4)]);
        let expect: BTreeSet<_> = [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4), (4, 2), (4, 3)].into();
        assert_eq!(s.achievable, expect);
        assert_eq!(s.maximal_pairs, [(3, 4), (4, 3)].into());
        assert_eq!(s.max_product, 12);
        assert_eq!(s.max_product_with_min(4), None);
        assert_eq!(s.min_product_points(), vec![(2, 4), (2, 6), (2, 8), (3, 9), (3, 12)]);
    }

    #[test]
    fn empty() {
        let s = stats(&Catalog::new(5));
        assert!(s.achievable.is_empty());
        assert_eq!(s.max_product, 0);
        assert!(verify_against_reference(&s, &[]).is_empty());
    }

    #[test]
    fn csv() {
        let s = SizeStats::from_sizes(1, [(2, 2)]);
        let text = s.achievable_csv();
        let back = parse_size_csv(&text).unwrap();
        assert!(verify_against_reference(&s, &back).is_empty());
        let diff = verify_against_reference(&s, &[(1, 1), (9, 9)]);
        assert_eq!(diff.missing, vec![(9, 9)]);
        assert_eq!(diff.extra, vec![(1, 2), (2, 1), (2, 2)]);
        assert!(parse_size_csv("1,2\nx,y\n").is_err());
        assert!(parse_size_csv("1,2,3\n").is_err());
    }
}
