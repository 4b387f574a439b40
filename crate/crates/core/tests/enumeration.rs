use std::collections::BTreeSet;

use bsp_core::bounds::{check_thm3_sizes, check_thm4_sizes, check_thm6_equality, EqualityCase};
use bsp_core::canon::canonical_key;
use bsp_core::constructions::{construct_example, ExampleKind};
use bsp_core::enumeration::{brute_force, enumerate, stats, Catalog, Checkpoint, EnumOptions};
use bsp_core::pair;
use bsp_core::product::product_matrix;
use bsp_core::Error;

fn keys(c: &Catalog) -> BTreeSet<String> {
    c.keys().map(|k| k.to_hex()).collect()
}

#[test]
fn matches_brute_force() {
    for d in 1..=4 {
        let fast = enumerate(d, &EnumOptions::default()).unwrap();
        let slow = brute_force(d).unwrap();
        assert_eq!(keys(&fast), keys(&slow), "d={d}");
        assert_eq!(fast, slow);
    }
}

#[test]
fn small_dimensions() {
    let c = enumerate(1, &EnumOptions::default()).unwrap();
    let e = c.classes.values().next().unwrap();
    assert_eq!((c.len(), e.size_a, e.size_b), (1, 2, 2));

    let s = stats(&enumerate(2, &EnumOptions::default()).unwrap());
    assert_eq!(s.maximal_pairs, [(3, 4), (4, 3)].into());
    assert_eq!(s.max_product, 12);
}

#[test]
fn four_dimensional_maximal_pairs() {
    let c = enumerate(4, &EnumOptions::default()).unwrap();
    let s = stats(&c);
    let expect: BTreeSet<(usize, usize)> =
        [(5, 16), (6, 12), (7, 10), (8, 9), (9, 8), (10, 7), (12, 6), (16, 5)].into();
    assert_eq!(s.maximal_pairs, expect);
    assert_eq!(s.max_product, 80);
}

#[test]
fn catalog_invariants() {
    for d in 1..=4 {
        let c = enumerate(d, &EnumOptions::default()).unwrap();
        assert!(c.complete);
        assert_eq!(c.validate(), Vec::<String>::new(), "d={d}");
        for e in c.classes.values() {
            assert!(check_thm4_sizes(d, (e.size_a, e.size_b)).pass);
            assert!(check_thm3_sizes(d, (e.size_a, e.size_b)).pass);
            let p = e.pair().unwrap();
            assert!(!matches!(check_thm6_equality(&p).unwrap(), EqualityCase::Unexpected { .. }));
        }
    }
}

#[test]
fn examples_appear_after_closure() {
    for d in 1..=4 {
        let c = enumerate(d, &EnumOptions::default()).unwrap();
        let mut pairs = vec![
            construct_example(ExampleKind::Example3, d, None).unwrap(),
            construct_example(ExampleKind::Example4, d, None).unwrap(),
        ];
        for k in 0..=d {
            pairs.push(construct_example(ExampleKind::Example5, d, Some(k)).unwrap());
        }
        for p in pairs {
            let closed = pair::close_pair(p.b()).unwrap();
            let key = canonical_key(&product_matrix(&closed).unwrap(), true);
            assert!(c.classes.contains_key(&key), "d={d} sizes={:?}", p.sizes());
        }
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let one = enumerate(4, &EnumOptions { workers: Some(1), ..Default::default() }).unwrap();
    let three = enumerate(4, &EnumOptions { workers: Some(3), ..Default::default() }).unwrap();
    assert_eq!(one.to_jsonl(), three.to_jsonl());
}

#[test]
fn resumes_from_checkpoint() {
    let dir = std::env::temp_dir().join(format!("bsp-cp-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("d4.json");
    let _ = std::fs::remove_file(&path);
    let full = enumerate(4, &EnumOptions::default()).unwrap();

    let opts = EnumOptions { checkpoint_path: Some(path.clone()), max_branches: Some(3), ..Default::default() };
    let partial = enumerate(4, &opts).unwrap();
    assert!(!partial.complete);
    let cp = Checkpoint::load(&path).unwrap();
    assert_eq!(cp.d, 4);
    assert_eq!(cp.done_branches.len(), 3);

    let opts = EnumOptions { checkpoint_path: Some(path.clone()), ..Default::default() };
    let resumed = enumerate(4, &opts).unwrap();
    assert!(resumed.complete);
    assert_eq!(resumed.to_jsonl(), full.to_jsonl());

    // wrong dimension and garbage are rejected
    assert!(matches!(enumerate(3, &opts), Err(Error::CheckpointCorrupt(_))));
    std::fs::write(&path, "{not json").unwrap();
    assert!(matches!(enumerate(4, &opts), Err(Error::CheckpointCorrupt(_))));
    let mut bad = cp.clone();
    bad.done_branches.push(u64::MAX);
    bad.save(&path).unwrap();
    assert!(matches!(enumerate(4, &opts), Err(Error::CheckpointCorrupt(_))));
    let _ = std::fs::remove_dir_all(&dir);
}
