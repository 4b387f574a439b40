//! Explicit families from the extremal examples.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::family::VectorFamily;
use crate::linalg::{QVector, Rational};
use crate::pair::BspPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExampleKind {
    /// The cube against `{0, e_1, ..., e_d}`.
    CubePair,
    /// Half-cube plus `e_1`, against `e_j` and `e_1 + e_j`.
    Example3,
    /// Sign vectors lifted to height 1, against half-sums of `e_d` and `+-e_i`.
    Example4,
    /// The cube-pair interpolation with `k` split coordinates.
    Example5,
}

impl ExampleKind {
    pub const ALL: [ExampleKind; 4] =
        [ExampleKind::CubePair, ExampleKind::Example3, ExampleKind::Example4, ExampleKind::Example5];

    pub fn name(self) -> &'static str {
        match self {
            ExampleKind::CubePair => "cube-pair",
            ExampleKind::Example3 => "example3",
            ExampleKind::Example4 => "example4",
            ExampleKind::Example5 => "example5",
        }
    }
}

impl fmt::Display for ExampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExampleKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::BadParameter(format!("unknown example kind {s:?}")))
    }
}

/// Largest dimension accepted by the constructors (family sizes are
/// exponential in `d`).
pub const MAX_EXAMPLE_DIM: usize = 16;

fn unit(d: usize, i: usize) -> QVector {
    QVector::unit(d, i)
}

/// Sum of `e_i` over the set bits `i` of `mask`, shifted by `offset`.
fn indicator(d: usize, mask: usize, offset: usize) -> QVector {
    let coords = (0..d)
        .map(|i| if i >= offset && (mask >> (i - offset)) & 1 == 1 { Rational::one() } else { Rational::zero() })
        .collect();
    QVector::new(coords)
}

/// Builds one of the explicit pairs. `k` is used only by
/// [`ExampleKind::Example5`] and must lie in `[0, d]`.
pub fn construct_example(kind: ExampleKind, d: usize, k: Option<usize>) -> Result<BspPair> {
    if d == 0 || d > MAX_EXAMPLE_DIM {
        return Err(Error::BadParameter(format!("dimension must be in 1..={MAX_EXAMPLE_DIM}, got {d}")));
    }
    if kind != ExampleKind::Example5 && k.is_some() {
        return Err(Error::BadParameter(format!("{kind} takes no k")));
    }
    match kind {
        ExampleKind::CubePair => example5(d, 0),
        ExampleKind::Example3 => example3(d),
        ExampleKind::Example4 => example4(d),
        ExampleKind::Example5 => {
            let k = k.ok_or_else(|| Error::BadParameter("example5 needs k".into()))?;
            if k > d {
                return Err(Error::BadParameter(format!("k must be in [0, {d}], got {k}")));
            }
            example5(d, k)
        }
    }
}

fn example3(d: usize) -> Result<BspPair> {
    let mut a: Vec<QVector> = (0..1usize << (d - 1)).map(|m| indicator(d, m, 1)).collect();
    a.push(unit(d, 0));
    let mut b = vec![unit(d, 0), QVector::zero(d)];
    for j in 1..d {
        b.push(unit(d, j));
        b.push(unit(d, j).add(&unit(d, 0)));
    }
    BspPair::new(VectorFamily::new(d, a)?, VectorFamily::new(d, b)?)
}

fn example4(d: usize) -> Result<BspPair> {
    let top = d - 1;
    let mut a = vec![QVector::zero(d)];
    for signs in 0..1usize << top {
        let mut v = unit(d, top);
        for i in 0..top {
            let e = unit(d, i);
            v = if signs >> i & 1 == 1 { v.sub(&e) } else { v.add(&e) };
        }
        a.push(v);
    }
    let half = Rational::new(1, 2);
    let mut b = Vec::new();
    for i in 0..d {
        for e in [unit(d, i), unit(d, i).neg()] {
            b.push(unit(d, top).add(&e).scale(&half));
        }
    }
    BspPair::new(VectorFamily::new(d, a)?, VectorFamily::new(d, b)?)
}

fn example5(d: usize, k: usize) -> Result<BspPair> {
    let mut a: Vec<QVector> = (0..1usize << (d - k)).map(|m| indicator(d, m, k)).collect();
    a.extend((0..k).map(|i| unit(d, i)));
    let mut b = Vec::new();
    for m in 0..1usize << k {
        let low = indicator(d, m, 0);
        b.push(low.clone());
        for j in k..d {
            b.push(low.add(&unit(d, j)));
        }
    }
    BspPair::new(VectorFamily::new(d, a)?, VectorFamily::new(d, b)?)
}

/// Closed-form sizes `(|A|, |B|)` of each construction.
pub fn expected_sizes(kind: ExampleKind, d: usize, k: Option<usize>) -> (usize, usize) {
    match kind {
        ExampleKind::CubePair => (1 << d, d + 1),
        ExampleKind::Example3 | ExampleKind::Example4 => ((1 << (d - 1)) + 1, 2 * d),
        ExampleKind::Example5 => {
            let k = k.unwrap_or(0);
            ((1 << (d - k)) + k, (1 << k) * (d - k + 1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(construct_example(ExampleKind::Example3, 4, None).unwrap().sizes(), (9, 8));
        assert_eq!(construct_example(ExampleKind::Example5, 4, Some(0)).unwrap().sizes(), (16, 5));
        assert_eq!(construct_example(ExampleKind::Example5, 4, Some(4)).unwrap().sizes(), (5, 16));
        for d in 1..=6 {
            for kind in [ExampleKind::CubePair, ExampleKind::Example3, ExampleKind::Example4] {
                let p = construct_example(kind, d, None).unwrap();
                assert_eq!(p.sizes(), expected_sizes(kind, d, None), "{kind} d={d}");
                assert!(p.verify().ok, "{kind} d={d}");
            }
            for k in 0..=d {
                let p = construct_example(ExampleKind::Example5, d, Some(k)).unwrap();
                assert_eq!(p.sizes(), expected_sizes(ExampleKind::Example5, d, Some(k)));
                assert!(p.verify().ok);
            }
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(construct_example(ExampleKind::Example5, 3, Some(4)).is_err());
        assert!(construct_example(ExampleKind::Example5, 3, None).is_err());
        assert!(construct_example(ExampleKind::Example3, 0, None).is_err());
        assert!(construct_example(ExampleKind::Example3, 3, Some(1)).is_err());
        assert!("example9".parse::<ExampleKind>().is_err());
        assert_eq!("cube-pair".parse::<ExampleKind>().unwrap(), ExampleKind::CubePair);
    }

    #[test]
    fn example4_has_halves() {
        let p = construct_example(ExampleKind::Example4, 3, None).unwrap();
        assert!(p.b().iter().any(|v| v.coords().iter().any(|x| !x.is_integer())));
    }
}
