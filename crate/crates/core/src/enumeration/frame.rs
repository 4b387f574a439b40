//! Closure kernel over subsets of the 0/1 cube.
//!
//! Fix coordinates in which a basis of the first family is the standard
//! basis. The second family then lives inside `{0,1}^d`, and a family is
//! encoded as a bitmask over the `2^d` cube points (point `p` has coordinate
//! `i` equal to bit `i` of `p`). All arithmetic here is exact small-integer
//! arithmetic; rationals appear only as `numerator / det` with a shared
//! determinant.

/// Largest dimension the bitmask kernel supports (`2^6 = 64` cube points).
pub const MAX_FRAME_DIM: usize = 6;

/// Precomputed data for the cube `{0,1}^d`.
#[derive(Clone, Debug)]
pub struct CubeFrame {
    d: usize,
    points: usize,
}

/// A functional compatible with a family, described by its values on the
/// cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Functional {
    /// Cube points where the value is 0 or 1.
    pub compat: u64,
    /// Cube points where the value is 1.
    pub ones: u64,
    /// The functional is `numerator / det`.
    pub numerator: [i64; MAX_FRAME_DIM],
}

/// Result of solving for every functional compatible with a family.
#[derive(Clone, Debug)]
pub struct FunctionalSet {
    /// Common denominator of all functionals (nonzero, may be negative).
    pub det: i64,
    pub functionals: Vec<Functional>,
    /// Intersection of the compatibility masks, i.e. the closure.
    pub closure: u64,
    /// Rank of the input family.
    pub rank: usize,
}

impl CubeFrame {
    pub fn new(d: usize) -> Self {
        assert!((1..=MAX_FRAME_DIM).contains(&d), "frame dimension out of range");
        CubeFrame { d, points: 1 << d }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn num_points(&self) -> usize {
        self.points
    }

    /// Mask with every cube point set.
    pub fn full_mask(&self) -> u64 {
        if self.points == 64 {
            u64::MAX
        } else {
            (1u64 << self.points) - 1
        }
    }

    /// Integer coordinates of cube point `p`.
    pub fn point(&self, p: usize) -> [i64; MAX_FRAME_DIM] {
        let mut v = [0i64; MAX_FRAME_DIM];
        for (i, c) in v.iter_mut().enumerate().take(self.d) {
            *c = ((p >> i) & 1) as i64;
        }
        v
    }

    /// Greedy basis (in increasing point order) of the span of `set`.
    pub fn basis_points(&self, set: u64) -> Vec<usize> {
        let mut echelon: Vec<([i64; MAX_FRAME_DIM], usize)> = Vec::with_capacity(self.d);
        let mut chosen = Vec::with_capacity(self.d);
        let mut rest = set;
        while rest != 0 && chosen.len() < self.d {
            let p = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut v = self.point(p);
            for (row, piv) in &echelon {
                let a = v[*piv];
                if a != 0 {
                    let b = row[*piv];
                    for k in 0..self.d {
                        v[k] = v[k] * b - row[k] * a;
                    }
                    reduce_row(&mut v[..self.d]);
                }
            }
            if let Some(piv) = (0..self.d).find(|&k| v[k] != 0) {
                echelon.push((v, piv));
                chosen.push(p);
            }
        }
        chosen
    }

    pub fn rank(&self, set: u64) -> usize {
        self.basis_points(set).len()
    }

    pub fn is_spanning(&self, set: u64) -> bool {
        self.rank(set) == self.d
    }

    /// Closure of `set`: every cube point `y` such that each functional
    /// taking values in `{0,1}` on `set` also takes a value in `{0,1}` on
    /// `y`. Defined for non-spanning sets too (functionals are free on the
    /// orthogonal complement, so the closure stays inside the span).
    pub fn closure(&self, set: u64) -> u64 {
        self.functionals(set).closure
    }

    /// All functionals (up to their component orthogonal to `span(set)`)
    /// with values in `{0,1}` on `set`, plus the resulting closure.
    ///
    /// When `set` spans, the functionals are exactly the vectors of the
    /// maximal partner family.
    pub fn functionals(&self, set: u64) -> FunctionalSet {
        let d = self.d;
        let basis = self.basis_points(set);
        let k = basis.len();

        // Complete the basis with standard vectors.
        let mut rows = [[0i64; MAX_FRAME_DIM]; MAX_FRAME_DIM];
        for (r, &p) in basis.iter().enumerate() {
            rows[r] = self.point(p);
        }
        let mut filled = k;
        for j in 0..d {
            if filled == d {
                break;
            }
            let mut candidate = rows;
            candidate[filled] = [0; MAX_FRAME_DIM];
            candidate[filled][j] = 1;
            if small_det(&candidate, filled + 1, d) {
                rows = candidate;
                filled += 1;
            }
        }
        debug_assert_eq!(filled, d);
        let (adj, det) = adjugate(&rows, d);

        // coords[y][j] * (1/det) = coefficient of basis row j in y.
        let n = self.points;
        let mut coords = [[0i64; MAX_FRAME_DIM]; 1 << MAX_FRAME_DIM];
        for y in 1..n {
            let low = y.trailing_zeros() as usize;
            let prev = coords[y & (y - 1)];
            let mut c = prev;
            for j in 0..d {
                c[j] += adj[low][j];
            }
            coords[y] = c;
        }

        let mut span_mask = 0u64;
        for (y, c) in coords.iter().enumerate() {
            if c[k..d].iter().all(|&v| v == 0) {
                span_mask |= 1 << y;
            }
        }

        let mut closure = span_mask;
        let mut functionals = Vec::new();
        let mut values = [0i64; 1 << MAX_FRAME_DIM];
        let values = &mut values[..n];
        let coords = &coords[..n];
        let mut delta = 0usize;
        for g in 0..(1usize << k) {
            if g > 0 {
                let flip = g.trailing_zeros() as usize;
                let on = (delta >> flip) & 1 == 0;
                delta ^= 1 << flip;
                for (v, c) in values.iter_mut().zip(coords.iter()) {
                    if on {
                        *v += c[flip];
                    } else {
                        *v -= c[flip];
                    }
                }
            }
            let mut ok = 0u64;
            let mut ones = 0u64;
            for (y, &v) in values.iter().enumerate() {
                if v == 0 {
                    ok |= 1 << y;
                } else if v == det {
                    ok |= 1 << y;
                    ones |= 1 << y;
                }
            }
            if ok & set == set {
                closure &= ok;
                let mut num = [0i64; MAX_FRAME_DIM];
                for j in 0..k {
                    if (delta >> j) & 1 == 1 {
                        for (i, x) in num.iter_mut().enumerate().take(d) {
                            *x += adj[i][j];
                        }
                    }
                }
                functionals.push(Functional { compat: ok, ones, numerator: num });
            }
        }
        FunctionalSet { det, functionals, closure, rank: k }
    }
}

fn reduce_row(v: &mut [i64]) {
    let g = v.iter().fold(0i64, |g, &x| gcd(g, x.abs()));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// True iff the first `r` rows are linearly independent.
fn small_det(rows: &[[i64; MAX_FRAME_DIM]; MAX_FRAME_DIM], r: usize, d: usize) -> bool {
    let mut m: Vec<[i64; MAX_FRAME_DIM]> = rows[..r].to_vec();
    let mut rank = 0;
    for col in 0..d {
        let Some(piv) = (rank..r).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        for i in rank + 1..r {
            let a = m[i][col];
            if a != 0 {
                let b = m[rank][col];
                for c in 0..d {
                    m[i][c] = m[i][c] * b - m[rank][c] * a;
                }
                reduce_row(&mut m[i][..d]);
            }
        }
        rank += 1;
    }
    rank == r
}

/// Integer determinant by Bareiss elimination.
fn det_bareiss(m: &[[i64; MAX_FRAME_DIM]], n: usize) -> i64 {
    if n == 0 {
        return 1;
    }
    let mut a: Vec<[i64; MAX_FRAME_DIM]> = m[..n].to_vec();
    let mut sign = 1;
    let mut prev = 1i64;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Adjugate and determinant of the leading `d x d` block.
fn adjugate(
    m: &[[i64; MAX_FRAME_DIM]; MAX_FRAME_DIM],
    d: usize,
) -> ([[i64; MAX_FRAME_DIM]; MAX_FRAME_DIM], i64) {
    let det = det_bareiss(&m[..], d);
    let mut adj = [[0i64; MAX_FRAME_DIM]; MAX_FRAME_DIM];
    if d == 1 {
        adj[0][0] = 1;
        return (adj, det);
    }
    for i in 0..d {
        for j in 0..d {
            let mut minor = [[0i64; MAX_FRAME_DIM]; MAX_FRAME_DIM];
            let mut r = 0;
            for (ri, row) in m.iter().enumerate().take(d) {
                if ri == i {
                    continue;
                }
                let mut c = 0;
                for (ci, &v) in row.iter().enumerate().take(d) {
                    if ci == j {
                        continue;
                    }
                    minor[r][c] = v;
                    c += 1;
                }
                r += 1;
            }
            let cof = det_bareiss(&minor[..], d - 1);
            // adj = cofactor transpose
            adj[j][i] = if (i + j) % 2 == 0 { cof } else { -cof };
        }
    }
    (adj, det)
}
