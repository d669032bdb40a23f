mod common;

use common::{fig2, five_ways, labels};
use safeflow_core::graph::MaxEdgeIndex;
use safeflow_core::optenum::{build_extension_forests, opt_concise, opt_rep_enumerate};
use safeflow_core::safety::maximal_safe_paths_bruteforce;

#[test]
fn fig2_paths() {
    let g = fig2();
    let expected: Vec<Vec<u32>> =
        ["abcdef", "acdefghij", "cdefhij", "cdefghijl", "hijkl"].iter().map(|s| labels(s)).collect();
    let mut expected_sorted = expected.clone();
    expected_sorted.sort();
    let brute = maximal_safe_paths_bruteforce(&g).unwrap();
    assert_eq!(brute.iter().map(|p| p.vertices.clone()).collect::<Vec<_>>(), expected_sorted);
    assert!(brute.iter().all(|p| p.excess == 3));
    for (i, set) in five_ways(&g).iter().enumerate() {
        assert_eq!(set, &brute, "variant {i}");
    }
}

#[test]
fn fig2_records() {
    let g = fig2();
    let idx = MaxEdgeIndex::new(&g);
    let (fi, fo) = build_extension_forests(&g, &idx);
    let recs = opt_rep_enumerate(&g, &idx, &fi, &fo);
    assert_eq!(recs.iter().filter(|r| r.trivial).count(), 2);
    assert_eq!(recs.iter().filter(|r| !r.trivial).count(), 3);
    let concise = opt_concise(&g, &idx);
    println!("{concise:?}");
    assert_eq!(concise.len(), 2);
}
