//! Canonical forms of 0/1 matrices under row and column permutations
//! (optionally also transposition).
//!
//! The search is the usual individualize-and-refine scheme on the bipartite
//! row/column incidence graph. Every leaf of the search tree yields a
//! permuted matrix and the lexicographically least one is the canonical
//! form. Since the set of leaves depends only on the isomorphism class,
//! so does its minimum. Automorphisms discovered at equal leaves prune
//! subtrees that are images of explored ones.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::product::ProductMatrix;

/// Byte serialization of a canonical form: a flag byte (1 when the class
/// is taken up to transposition), rows and columns as big-endian `u16`,
/// then the bits row-major, most significant bit first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        if !s.len().is_multiple_of(2) || s.len() < 10 {
            return Err(Error::Parse(format!("bad key {s:?}")));
        }
        (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&s[i..i + 2], 16))
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map(CanonicalKey)
            .map_err(|_| Error::Parse(format!("bad key {s:?}")))
    }

    pub fn includes_transpose(&self) -> bool {
        self.0[0] == 1
    }

    pub fn shape(&self) -> (usize, usize) {
        let r = u16::from_be_bytes([self.0[1], self.0[2]]) as usize;
        let c = u16::from_be_bytes([self.0[3], self.0[4]]) as usize;
        (r, c)
    }

    /// Rebuilds the canonical matrix the key encodes.
    pub fn matrix(&self) -> ProductMatrix {
        let (r, c) = self.shape();
        let body = &self.0[5..];
        let bits = (0..r)
            .map(|i| (0..c).map(|j| bit_at(body, i * c + j)).collect())
            .collect();
        ProductMatrix::new(bits).expect("rectangular")
    }

    fn encode(flag: bool, m: &ProductMatrix) -> Self {
        let mut out = Vec::with_capacity(5 + (m.rows() * m.cols()).div_ceil(8));
        out.push(flag as u8);
        out.extend((m.rows() as u16).to_be_bytes());
        out.extend((m.cols() as u16).to_be_bytes());
        let mut byte = 0u8;
        let mut n = 0;
        for row in m.bits() {
            for &b in row {
                byte = (byte << 1) | b as u8;
                n += 1;
                if n == 8 {
                    out.push(byte);
                    byte = 0;
                    n = 0;
                }
            }
        }
        if n > 0 {
            out.push(byte << (8 - n));
        }
        CanonicalKey(out)
    }
}

fn bit_at(body: &[u8], k: usize) -> bool {
    body[k / 8] >> (7 - k % 8) & 1 == 1
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.to_hex())
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CanonicalKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CanonicalKey::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Canonical key together with the canonical representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    pub matrix: ProductMatrix,
    /// True when the representative is a permutation of the transpose.
    pub transposed: bool,
}

pub fn canonical_key(m: &ProductMatrix, include_transpose: bool) -> CanonicalKey {
    canonical_form(m, include_transpose).key
}

pub fn canonical_form(m: &ProductMatrix, include_transpose: bool) -> CanonicalForm {
    let direct = canonical_matrix(m);
    if !include_transpose {
        return CanonicalForm { key: CanonicalKey::encode(false, &direct), matrix: direct, transposed: false };
    }
    let flipped = canonical_matrix(&m.transpose());
    let kd = CanonicalKey::encode(true, &direct);
    let kf = CanonicalKey::encode(true, &flipped);
    if kf < kd {
        CanonicalForm { key: kf, matrix: flipped, transposed: true }
    } else {
        CanonicalForm { key: kd, matrix: direct, transposed: false }
    }
}

/// Lexicographically least row/column permutation reachable by the
/// refinement search.
pub fn canonical_matrix(m: &ProductMatrix) -> ProductMatrix {
    let mut search = Search::new(m);
    let colors = search.initial_colors();
    search.run(colors, &mut Vec::new());
    let (bits, _) = search.best.expect("search reaches a leaf");
    let rows = m.rows();
    let cols = m.cols();
    let grid = (0..rows).map(|r| bits[r * cols..(r + 1) * cols].to_vec()).collect();
    ProductMatrix::new(grid).expect("rectangular")
}

struct Search<'a> {
    m: &'a ProductMatrix,
    rows: usize,
    /// Neighbours in the bipartite graph; columns are vertices
    /// `rows..rows + cols`.
    adj: Vec<Vec<usize>>,
    best: Option<(Vec<bool>, Vec<usize>)>,
    first: Option<(Vec<bool>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(m: &'a ProductMatrix) -> Self {
        let rows = m.rows();
        let cols = m.cols();
        let mut adj = vec![Vec::new(); rows + cols];
        for r in 0..rows {
            for c in 0..cols {
                if m.get(r, c) {
                    adj[r].push(rows + c);
                    adj[rows + c].push(r);
                }
            }
        }
        Search { m, rows, adj, best: None, first: None, automorphisms: Vec::new() }
    }

    fn initial_colors(&self) -> Vec<u32> {
        (0..self.adj.len()).map(|v| (v >= self.rows) as u32).collect()
    }

    /// Equitable refinement. Cells keep their relative order; a cell splits
    /// by the multiset of neighbour colours, in sorted order.
    fn refine(&self, colors: &mut [u32]) {
        let n = colors.len();
        let mut count = count_colors(colors);
        loop {
            let mut keyed: Vec<(u32, Vec<u32>, usize)> = (0..n)
                .map(|v| {
                    let mut sig: Vec<u32> = self.adj[v].iter().map(|&u| colors[u]).collect();
                    sig.sort_unstable();
                    (colors[v], sig, v)
                })
                .collect();
            keyed.sort_unstable_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
            let mut next = 0u32;
            for i in 0..n {
                if i > 0 && (keyed[i].0, &keyed[i].1) != (keyed[i - 1].0, &keyed[i - 1].1) {
                    next += 1;
                }
                colors[keyed[i].2] = next;
            }
            let new_count = next as usize + 1;
            if new_count == count {
                break;
            }
            count = new_count;
        }
    }

    fn run(&mut self, mut colors: Vec<u32>, path: &mut Vec<usize>) {
        self.refine(&mut colors);
        let n = colors.len();
        let ncolors = count_colors(&colors);
        if ncolors == n {
            self.leaf(&colors);
            return;
        }
        // First non-singleton cell in colour order.
        let mut sizes = vec![0usize; ncolors];
        for &c in colors.iter() {
            sizes[c as usize] += 1;
        }
        let target = sizes.iter().position(|&s| s > 1).unwrap() as u32;
        let cell: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.in_explored_orbit(v, &explored, path) {
                continue;
            }
            let mut child: Vec<u32> = colors.iter().map(|&c| 2 * c + 1).collect();
            child[v] = 2 * target;
            path.push(v);
            self.run(child, path);
            path.pop();
            explored.push(v);
        }
    }

    fn in_explored_orbit(&self, v: usize, explored: &[usize], path: &[usize]) -> bool {
        let n = self.adj.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut any = false;
        for g in &self.automorphisms {
            if path.iter().all(|&p| g[p] == p) {
                any = true;
                for x in 0..n {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, g[x]));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&u| find(&mut parent, u) == rv)
    }

    fn leaf(&mut self, colors: &[u32]) {
        let n = colors.len();
        // order[i] = vertex at position i
        let mut order = vec![0usize; n];
        for (v, &c) in colors.iter().enumerate() {
            order[c as usize] = v;
        }
        let row_order: Vec<usize> = order.iter().copied().filter(|&v| v < self.rows).collect();
        let col_order: Vec<usize> =
            order.iter().copied().filter(|&v| v >= self.rows).map(|v| v - self.rows).collect();
        let mut bits = Vec::with_capacity(self.m.rows() * self.m.cols());
        for &r in &row_order {
            for &c in &col_order {
                bits.push(self.m.get(r, c));
            }
        }
        let mut vertex_order = row_order.clone();
        vertex_order.extend(col_order.iter().map(|&c| c + self.rows));

        for reference in [&self.first, &self.best].into_iter().flatten() {
            if reference.0 == bits {
                let mut g = vec![0usize; n];
                for (a, b) in reference.1.iter().zip(&vertex_order) {
                    g[*a] = *b;
                }
                if g.iter().enumerate().any(|(i, &x)| i != x) {
                    self.automorphisms.push(g);
                }
                return;
            }
        }
        if self.first.is_none() {
            self.first = Some((bits.clone(), vertex_order.clone()));
        }
        let better = match &self.best {
            None => true,
            Some((b, _)) => bits.cmp(b) == Ordering::Less,
        };
        if better {
            self.best = Some((bits, vertex_order));
        }
    }
}

fn count_colors(colors: &[u32]) -> usize {
    colors.iter().copied().max().map_or(0, |m| m as usize + 1)
}
