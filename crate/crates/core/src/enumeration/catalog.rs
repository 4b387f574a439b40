//! Isomorph-free catalogs of closed pairs.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, CanonicalKey};
use crate::error::{Error, Result};
use crate::family::VectorFamily;
use crate::linalg::QVector;
use crate::pair::{self, BspPair};
use crate::product::{product_matrix, ProductMatrix};

/// Metadata stored per isomorphism class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassEntry {
    pub size_a: usize,
    pub size_b: usize,
    /// Canonical representative; rows are the first family.
    pub matrix: ProductMatrix,
}

impl ClassEntry {
    pub fn from_canonical(matrix: ProductMatrix) -> Self {
        ClassEntry { size_a: matrix.rows(), size_b: matrix.cols(), matrix }
    }

    pub fn product(&self) -> usize {
        self.size_a * self.size_b
    }

    /// A pair realizing the representative.
    pub fn pair(&self) -> Result<BspPair> {
        self.matrix.factorize()
    }
}

/// Closed spanning pairs of one dimension, one entry per class up to
/// transpose, ordered by key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalog {
    pub d: usize,
    pub classes: BTreeMap<CanonicalKey, ClassEntry>,
    /// False when the search stopped before exhausting the lattice.
    pub complete: bool,
}

#[derive(Serialize, Deserialize)]
struct Line {
    d: usize,
    size_a: usize,
    size_b: usize,
    matrix: Vec<String>,
    key: CanonicalKey,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    complete: bool,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

impl Catalog {
    pub fn new(d: usize) -> Self {
        Catalog { d, classes: BTreeMap::new(), complete: true }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Adds the class of `m` (any row/column order). Returns true if new.
    pub fn insert_matrix(&mut self, m: &ProductMatrix) -> bool {
        let form = canonical_form(m, true);
        if self.classes.contains_key(&form.key) {
            return false;
        }
        self.classes.insert(form.key, ClassEntry::from_canonical(form.matrix));
        true
    }

    pub fn insert_pair(&mut self, p: &BspPair) -> Result<bool> {
        Ok(self.insert_matrix(&product_matrix(p)?))
    }

    /// Rebuilds an entry from its key alone.
    pub fn insert_key(&mut self, key: CanonicalKey) {
        let m = key.matrix();
        self.classes.entry(key).or_insert_with(|| ClassEntry::from_canonical(m));
    }

    pub fn merge(&mut self, other: Catalog) {
        for (k, v) in other.classes {
            self.classes.entry(k).or_insert(v);
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &CanonicalKey> {
        self.classes.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&CanonicalKey, &ClassEntry)> {
        self.classes.iter()
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for (key, e) in &self.classes {
            let line = Line {
                d: self.d,
                size_a: e.size_a,
                size_b: e.size_b,
                matrix: e.matrix.row_strings(),
                key: key.clone(),
                complete: self.complete,
            };
            let s = serde_json::to_string(&line).map_err(|e| Error::Parse(e.to_string()))?;
            writeln!(w, "{s}").map_err(|e| Error::Parse(e.to_string()))?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    /// Parses JSONL. `d` is needed for the empty catalog; otherwise it is
    /// checked against every line.
    pub fn read_jsonl<R: BufRead>(r: R, d: Option<usize>) -> Result<Catalog> {
        let mut cat: Option<Catalog> = d.map(Catalog::new);
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let l: Line = serde_json::from_str(&line)
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
            let cat = cat.get_or_insert_with(|| Catalog::new(l.d));
            if l.d != cat.d {
                return Err(Error::DimensionMismatch { expected: cat.d, found: l.d });
            }
            let matrix = ProductMatrix::from_strings(&l.matrix)?;
            if matrix.rows() != l.size_a || matrix.cols() != l.size_b {
                return Err(Error::Parse(format!("line {}: sizes disagree with matrix", i + 1)));
            }
            if l.key.matrix() != matrix {
                return Err(Error::Parse(format!("line {}: key does not encode matrix", i + 1)));
            }
            cat.complete &= l.complete;
            cat.classes.insert(l.key, ClassEntry { size_a: l.size_a, size_b: l.size_b, matrix });
        }
        cat.ok_or_else(|| Error::Parse("empty catalog without a dimension".into()))
    }

    /// Checks the catalog invariants on every entry and returns one message
    /// per problem.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (key, e) in &self.classes {
            let form = canonical_form(&e.matrix, true);
            if &form.key != key {
                problems.push(format!("{}: representative does not re-canonicalize", key.to_hex()));
                continue;
            }
            match check_closed(self.d, e) {
                Ok(()) => {}
                Err(msg) => problems.push(format!("{}: {msg}", key.to_hex())),
            }
        }
        problems
    }
}

fn check_closed(d: usize, e: &ClassEntry) -> std::result::Result<(), String> {
    let p = e.pair().map_err(|err| err.to_string())?;
    if p.dim() != d {
        return Err(format!("rank {} instead of {d}", p.dim()));
    }
    if !p.verify().ok {
        return Err("products are not binary".into());
    }
    let closed = pair::closure(p.b()).map_err(|err| err.to_string())?;
    if &closed != p.b() {
        return Err("second family is not closed".into());
    }
    let a = pair::a_max(p.b()).map_err(|err| err.to_string())?;
    if &a != p.a() {
        return Err("first family is not maximal".into());
    }
    Ok(())
}

/// Every subset of `{0,1}^d` containing 0 is tested with the rational
/// closure; spanning fixpoints are canonicalized. Independent of the
/// bitmask search and meant only for small `d` (at most 4).
pub fn brute_force(d: usize) -> Result<Catalog> {
    if !(1..=4).contains(&d) {
        return Err(Error::BadParameter(format!("brute force needs 1 <= d <= 4, got {d}")));
    }
    let points: Vec<QVector> = (0..1usize << d)
        .map(|p| QVector::from_ints(&(0..d).map(|i| ((p >> i) & 1) as i64).collect::<Vec<_>>()))
        .collect();
    let mut cat = Catalog::new(d);
    for rest in 0u64..(1 << (points.len() - 1)) {
        let chosen = std::iter::once(points[0].clone()).chain(
            (1..points.len()).filter(|&p| rest >> (p - 1) & 1 == 1).map(|p| points[p].clone()),
        );
        let b = VectorFamily::new(d, chosen)?;
        if !b.spans() {
            continue;
        }
        if pair::closure(&b)? != b {
            continue;
        }
        let p = BspPair::new(pair::a_max(&b)?, b)?;
        cat.insert_pair(&p)?;
    }
    Ok(cat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_small() {
        let c1 = brute_force(1).unwrap();
        assert_eq!(c1.len(), 1);
        let e = c1.classes.values().next().unwrap();
        assert_eq!((e.size_a, e.size_b), (2, 2));

        let c2 = brute_force(2).unwrap();
        assert_eq!(c2.len(), 1);
        let e = c2.classes.values().next().unwrap();
        assert_eq!(e.product(), 12);
        assert!(c2.validate().is_empty());
    }

    #[test]
    fn jsonl_round_trip() {
        let mut c = brute_force(3).unwrap();
        let text = c.to_jsonl();
        assert_eq!(text.lines().count(), c.len());
        assert!(!text.contains("complete"));
        let back = Catalog::read_jsonl(text.as_bytes(), None).unwrap();
        assert_eq!(back, c);

        c.complete = false;
        let back = Catalog::read_jsonl(c.to_jsonl().as_bytes(), None).unwrap();
        assert!(!back.complete);

        let empty = Catalog::read_jsonl(&b""[..], Some(4)).unwrap();
        assert_eq!(empty, Catalog::new(4));
        assert!(Catalog::read_jsonl(&b""[..], None).is_err());
    }

    #[test]
    fn rejects_tampered_lines() {
        let c = brute_force(2).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(c.to_jsonl().trim()).unwrap();
        v["size_a"] = serde_json::json!(v["size_a"].as_u64().unwrap() + 1);
        assert!(Catalog::read_jsonl(v.to_string().as_bytes(), None).is_err());
        let mut v: serde_json::Value = serde_json::from_str(c.to_jsonl().trim()).unwrap();
        v["matrix"][0] = serde_json::json!("1111");
        assert!(Catalog::read_jsonl(v.to_string().as_bytes(), None).is_err());
    }
}
