use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, QVector};

/// A finite set of vectors in `Q^d`, kept sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "FamilyJson", into = "FamilyJson")]
pub struct VectorFamily {
    dim: usize,
    vectors: Vec<QVector>,
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    d: usize,
    vectors: Vec<QVector>,
}

impl TryFrom<FamilyJson> for VectorFamily {
    type Error = Error;
    fn try_from(j: FamilyJson) -> Result<Self> {
        VectorFamily::new(j.d, j.vectors)
    }
}

impl From<VectorFamily> for FamilyJson {
    fn from(f: VectorFamily) -> Self {
        FamilyJson { d: f.dim, vectors: f.vectors }
    }
}

impl VectorFamily {
    /// Duplicates are dropped silently.
    pub fn new(dim: usize, vectors: impl IntoIterator<Item = QVector>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadParameter("dimension must be positive".into()));
        }
        let mut set = BTreeSet::new();
        for v in vectors {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.dim() });
            }
            set.insert(v);
        }
        Ok(VectorFamily { dim, vectors: set.into_iter().collect() })
    }

    pub fn from_ints(dim: usize, vectors: &[&[i64]]) -> Result<Self> {
        Self::new(dim, vectors.iter().map(|v| QVector::from_ints(v)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[QVector] {
        &self.vectors
    }

    pub fn iter(&self) -> std::slice::Iter<'_, QVector> {
        self.vectors.iter()
    }

    pub fn contains(&self, v: &QVector) -> bool {
        self.vectors.binary_search(v).is_ok()
    }

    pub fn is_subset(&self, other: &VectorFamily) -> bool {
        self.vectors.iter().all(|v| other.contains(v))
    }

    /// Dimension of the linear span.
    pub fn rank(&self) -> usize {
        linalg::rank_of(&self.vectors, self.dim)
    }

    pub fn spans(&self) -> bool {
        self.rank() == self.dim
    }

    /// Affine dimension, `-1` when empty.
    pub fn affine_dim(&self) -> isize {
        linalg::affine_dim(&self.vectors)
    }

    pub fn map(&self, f: impl Fn(&QVector) -> QVector) -> VectorFamily {
        VectorFamily::new(self.dim, self.vectors.iter().map(f)).expect("map preserves dimension")
    }

    pub fn filter(&self, f: impl Fn(&QVector) -> bool) -> VectorFamily {
        VectorFamily { dim: self.dim, vectors: self.vectors.iter().filter(|v| f(v)).cloned().collect() }
    }

    pub fn union(&self, other: &VectorFamily) -> VectorFamily {
        VectorFamily::new(self.dim, self.vectors.iter().chain(other.iter()).cloned())
            .expect("union of equal-dimension families")
    }
}

impl<'a> IntoIterator for &'a VectorFamily {
    type Item = &'a QVector;
    type IntoIter = std::slice::Iter<'a, QVector>;
    fn into_iter(self) -> Self::IntoIter {
        self.vectors.iter()
    }
}
