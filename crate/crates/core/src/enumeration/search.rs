//! Closure-driven depth-first search over subsets of the cube.
//!
//! Every closed set is reached exactly once: a child `D = closure(C + y)` is
//! kept only if adding `y` did not pull in any point below `y` that `C`
//! lacked. Spanning nodes carry the list of compatible functionals, so
//! their children are closed by intersecting masks instead of re-solving.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::catalog::Catalog;
use super::frame::{CubeFrame, MAX_FRAME_DIM};
use crate::canon::{canonical_form, CanonicalKey};
use crate::error::{Error, Result};
use crate::product::ProductMatrix;

/// Knobs for [`enumerate`]. The defaults run to completion on all cores.
#[derive(Clone, Debug, Default)]
pub struct EnumOptions {
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
    pub checkpoint_path: Option<PathBuf>,
    /// Stop claiming new branches after this long.
    pub time_budget: Option<Duration>,
    /// Stop after this many branches (counted in this run).
    pub max_branches: Option<usize>,
    /// Print a branch counter to stderr.
    pub progress: bool,
}

/// On-disk progress: finished branches and every key found so far.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub d: usize,
    pub done_branches: Vec<u64>,
    pub partial_keys: Vec<CanonicalKey>,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Checkpoint> {
        let text = fs::read_to_string(path).map_err(|e| Error::CheckpointCorrupt(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| Error::CheckpointCorrupt(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string(self).map_err(|e| Error::Parse(e.to_string()))?;
        fs::write(&tmp, text).map_err(|e| Error::Parse(e.to_string()))?;
        fs::rename(&tmp, path).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Clone, Debug)]
struct Node {
    set: u64,
    next: usize,
    /// `(compat, ones)` for every compatible functional, when `set` spans.
    funcs: Option<Vec<(u64, u64)>>,
}

struct Searcher {
    frame: CubeFrame,
    /// For each coordinate permutation, byte-wise lookup tables mapping a
    /// mask to its image.
    perm_tables: Vec<Vec<[u64; 256]>>,
}

impl Searcher {
    fn new(d: usize) -> Self {
        let frame = CubeFrame::new(d);
        let n = frame.num_points();
        let chunks = n.div_ceil(8);
        let mut perm_tables = Vec::new();
        for perm in permutations(d) {
            if perm.iter().enumerate().all(|(i, &p)| i == p) {
                continue;
            }
            let image = |p: usize| (0..d).fold(0usize, |acc, i| acc | ((p >> i) & 1) << perm[i]);
            let tables = (0..chunks)
                .map(|c| {
                    let mut t = [0u64; 256];
                    for (byte, slot) in t.iter_mut().enumerate() {
                        for b in 0..8 {
                            let p = c * 8 + b;
                            if byte >> b & 1 == 1 && p < n {
                                *slot |= 1u64 << image(p);
                            }
                        }
                    }
                    t
                })
                .collect();
            perm_tables.push(tables);
        }
        Searcher { frame, perm_tables }
    }

    fn root(&self) -> Node {
        let fs = self.frame.functionals(0);
        let funcs = (fs.rank == self.frame.dim())
            .then(|| fs.functionals.iter().map(|f| (f.compat, f.ones)).collect());
        Node { set: fs.closure, next: 0, funcs }
    }

    fn children(&self, node: &Node) -> Vec<Node> {
        let mut out = Vec::new();
        for y in node.next..self.frame.num_points() {
            let bit = 1u64 << y;
            if node.set & bit != 0 {
                continue;
            }
            let low = bit - 1;
            let (set, funcs) = match &node.funcs {
                Some(list) => {
                    let mut closed = self.frame.full_mask();
                    for &(compat, _) in list {
                        if compat & bit != 0 {
                            closed &= compat;
                        }
                    }
                    if closed & low != node.set & low {
                        continue;
                    }
                    let kept = list.iter().copied().filter(|&(c, _)| c & bit != 0).collect();
                    (closed, Some(kept))
                }
                None => {
                    let fs = self.frame.functionals(node.set | bit);
                    if fs.closure & low != node.set & low {
                        continue;
                    }
                    let funcs = (fs.rank == self.frame.dim())
                        .then(|| fs.functionals.iter().map(|f| (f.compat, f.ones)).collect());
                    (fs.closure, funcs)
                }
            };
            out.push(Node { set, next: y + 1, funcs });
        }
        out
    }

    /// True iff no coordinate permutation maps `set` to a smaller mask.
    fn is_orbit_min(&self, set: u64) -> bool {
        let bytes = set.to_le_bytes();
        self.perm_tables.iter().all(|tables| {
            let img = tables.iter().zip(bytes).fold(0u64, |acc, (t, b)| acc | t[b as usize]);
            img >= set
        })
    }

    fn record(&self, node: &Node, out: &mut Catalog) {
        let Some(funcs) = &node.funcs else { return };
        if !self.is_orbit_min(node.set) {
            return;
        }
        let cols: Vec<usize> = (0..self.frame.num_points()).filter(|&p| node.set >> p & 1 == 1).collect();
        let bits = funcs
            .iter()
            .map(|&(_, ones)| cols.iter().map(|&p| ones >> p & 1 == 1).collect())
            .collect();
        let m = ProductMatrix::new(bits).expect("rectangular");
        let form = canonical_form(&m, true);
        out.classes.entry(form.key).or_insert_with(|| super::ClassEntry::from_canonical(form.matrix));
    }

    fn dfs(&self, node: &Node, out: &mut Catalog) {
        self.record(node, out);
        for child in self.children(node) {
            self.dfs(&child, out);
        }
    }

    /// Splits the tree into independent branches. Nodes above the split are
    /// recorded into `top`. Depends only on `d`.
    fn frontier(&self, top: &mut Catalog) -> Vec<Node> {
        const TARGET: usize = 512;
        const MAX_DEPTH: usize = 4;
        let mut level = vec![self.root()];
        for _ in 0..MAX_DEPTH {
            if level.len() >= TARGET {
                break;
            }
            let mut next = Vec::new();
            for node in &level {
                let kids = self.children(node);
                self.record(node, top);
                next.extend(kids);
            }
            if next.is_empty() {
                return next;
            }
            level = next;
        }
        level.sort_by_key(|n| n.set);
        level
    }
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..d {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=p.len()).map(move |i| {
                    let mut q = p.clone();
                    q.insert(i, k);
                    q
                })
            })
            .collect();
    }
    out.sort();
    out
}

/// All closed spanning pairs of dimension `d`, one per class up to
/// transpose.
///
/// With a checkpoint path, finished branches and their keys are saved as
/// the search goes and skipped on the next call. The result has
/// `complete = false` when a budget stopped the search early.
pub fn enumerate(d: usize, opts: &EnumOptions) -> Result<Catalog> {
    if !(1..=MAX_FRAME_DIM).contains(&d) {
        return Err(Error::BadParameter(format!("enumeration needs 1 <= d <= {MAX_FRAME_DIM}, got {d}")));
    }
    let searcher = Searcher::new(d);
    let mut catalog = Catalog::new(d);
    let branches = searcher.frontier(&mut catalog);
    let branch_ids: BTreeSet<u64> = branches.iter().map(|n| n.set).collect();

    let mut done: BTreeSet<u64> = BTreeSet::new();
    if let Some(path) = &opts.checkpoint_path {
        if path.exists() {
            let cp = Checkpoint::load(path)?;
            if cp.d != d {
                return Err(Error::CheckpointCorrupt(format!("checkpoint is for d={}, not {d}", cp.d)));
            }
            for id in &cp.done_branches {
                if !branch_ids.contains(id) {
                    return Err(Error::CheckpointCorrupt(format!("unknown branch {id}")));
                }
            }
            for key in cp.partial_keys {
                let (rows, cols) = key.shape();
                if !key.includes_transpose() || rows.max(cols) > 1 << d {
                    return Err(Error::CheckpointCorrupt(format!("bad key {}", key.to_hex())));
                }
                if canonical_form(&key.matrix(), true).key != key {
                    return Err(Error::CheckpointCorrupt(format!("non-canonical key {}", key.to_hex())));
                }
                catalog.insert_key(key);
            }
            done.extend(cp.done_branches);
        }
    }

    let pending: Vec<&Node> = branches.iter().filter(|n| !done.contains(&n.set)).collect();
    let total = branches.len();
    let state = Mutex::new((catalog, done, Instant::now()));
    let claimed = AtomicUsize::new(0);
    let stopped = AtomicBool::new(false);
    let start = Instant::now();

    let work = |node: &&Node| -> Result<()> {
        let ticket = claimed.fetch_add(1, Ordering::SeqCst);
        let over_count = opts.max_branches.is_some_and(|m| ticket >= m);
        let over_time = opts.time_budget.is_some_and(|b| start.elapsed() >= b);
        if over_count || over_time {
            stopped.store(true, Ordering::SeqCst);
            return Ok(());
        }
        let mut local = Catalog::new(d);
        searcher.dfs(node, &mut local);
        let mut guard = state.lock().expect("lock poisoned");
        let (cat, done, last_save) = &mut *guard;
        cat.merge(local);
        done.insert(node.set);
        if opts.progress {
            eprintln!("branches {}/{total} classes {}", done.len(), cat.len());
        }
        if let Some(path) = &opts.checkpoint_path {
            if last_save.elapsed() >= Duration::from_secs(10) {
                save(path, d, cat, done)?;
                *last_save = Instant::now();
            }
        }
        Ok(())
    };

    match opts.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::BadParameter(e.to_string()))?;
            pool.install(|| pending.par_iter().try_for_each(work))?;
        }
        None => pending.par_iter().try_for_each(work)?,
    }

    let (mut catalog, done, _) = state.into_inner().expect("lock poisoned");
    if let Some(path) = &opts.checkpoint_path {
        save(path, d, &catalog, &done)?;
    }
    catalog.complete = !stopped.load(Ordering::SeqCst) && done.len() == total;
    Ok(catalog)
}

fn save(path: &Path, d: usize, cat: &Catalog, done: &BTreeSet<u64>) -> Result<()> {
    Checkpoint {
        d,
        done_branches: done.iter().copied().collect(),
        partial_keys: cat.keys().cloned().collect(),
    }
    .save(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_count() {
        for d in 1..=5 {
            let ps = permutations(d);
            let distinct: BTreeSet<_> = ps.iter().cloned().collect();
            assert_eq!(distinct.len(), (1..=d).product::<usize>());
        }
    }

    fn count_closed(d: usize) -> (usize, usize) {
        let s = Searcher::new(d);
        let mut stack = vec![s.root()];
        let (mut all, mut spanning) = (0, 0);
        while let Some(n) = stack.pop() {
            all += 1;
            spanning += n.funcs.is_some() as usize;
            stack.extend(s.children(&n));
        }
        (all, spanning)
    }

    #[test]
    fn closed_set_counts() {
        // Independent count by testing every subset containing 0.
        for d in 1..=3 {
            let frame = CubeFrame::new(d);
            let n = frame.num_points();
            let mut all = 0;
            let mut spanning = 0;
            for rest in 0u64..(1 << (n - 1)) {
                let set = 1 | rest << 1;
                if frame.closure(set) == set {
                    all += 1;
                    spanning += frame.is_spanning(set) as usize;
                }
            }
            assert_eq!(count_closed(d), (all, spanning), "d={d}");
        }
        assert_eq!(count_closed(4), (8059, 6963));
    }

    #[test]
    fn orbit_filter() {
        let s = Searcher::new(3);
        // {0, e1} is minimal, {0, e3} is not
        assert!(s.is_orbit_min(0b11));
        assert!(!s.is_orbit_min(1 | 1 << 4));
    }

    #[test]
    fn small_catalogs() {
        let c = enumerate(1, &EnumOptions::default()).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.complete);
        let c = enumerate(2, &EnumOptions::default()).unwrap();
        assert_eq!(c.len(), 1);
        assert!(enumerate(0, &EnumOptions::default()).is_err());
        assert!(enumerate(7, &EnumOptions::default()).is_err());
    }
}
