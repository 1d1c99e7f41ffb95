//! Checks the exhaustive test oracle itself, then spot-checks the library
//! solver against it.

mod common;

use common::{choosable_naive, demands, graphs_up_to_iso, BruteForce, Small};
use listcolor::choosability::{is_f_choosable, DemandFunction, Verdict};
use listcolor::graph::Graph;

#[test]
fn graph_counts_match_known_sequence() {
    let counts: Vec<usize> = (1..=6).map(|n| graphs_up_to_iso(n).len()).collect();
    assert_eq!(counts, [1, 2, 4, 11, 34, 156]);
}

#[test]
fn anchors() {
    let mut bf = BruteForce::default();
    let cycle = |n: usize| (0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>();
    let k4: Vec<_> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
    assert!(bf.choosable(&Small::from_edges(4, &cycle(4), &[2; 6])));
    assert!(!bf.choosable(&Small::from_edges(5, &cycle(5), &[2; 6])));
    assert!(!bf.choosable(&Small::from_edges(4, &k4, &[3; 6])));
    assert!(bf.choosable(&Small::from_edges(4, &k4, &[4; 6])));
    // K2,3 is 2-choosable, K2,4 is not.
    let k2 = |b: usize| (0..2).flat_map(|i| (2..2 + b).map(move |j| (i, j))).collect::<Vec<_>>();
    assert!(bf.choosable(&Small::from_edges(5, &k2(3), &[2; 6])));
    assert!(!bf.choosable(&Small::from_edges(6, &k2(4), &[2; 6])));
}

#[test]
fn reduction_agrees_with_the_definition() {
    let mut bf = BruteForce::default();
    for n in 1..=4 {
        for g in graphs_up_to_iso(n) {
            for f in demands(n, 3) {
                let inst = Small { f, ..g };
                assert_eq!(bf.choosable(&inst), choosable_naive(&inst), "{inst:?}");
            }
        }
    }
}

#[test]
fn solver_agrees_on_five_vertices() {
    let mut bf = BruteForce::default();
    for g in graphs_up_to_iso(5) {
        let graph = Graph::from_edges(5, g.edges()).unwrap();
        for f in demands(5, 3) {
            let inst = Small { f, ..g };
            let cert = is_f_choosable(&graph, &DemandFunction(f[..5].iter().map(|&x| x as u32).collect())).unwrap();
            assert_eq!(cert.verdict == Verdict::Deletable, bf.choosable(&inst), "{inst:?} {cert:?}");
        }
    }
}
