#![allow(dead_code)]

use safeflow_core::graph::{FlowGraph, MaxEdgeIndex, Vertex};
use safeflow_core::optenum::{
    build_extension_forests, expand_concise, expand_optimal, opt_concise, opt_raw_enumerate, opt_rep_enumerate,
};
use safeflow_core::{legacy, WeightedSafePath};

/// Fig. 2 of the reference example, labels a..l as 0..11.
pub const FIG2_EDGES: [(Vertex, Vertex, i64); 14] = [
    (0, 1, 3),
    (0, 2, 6),
    (1, 2, 3),
    (2, 3, 9),
    (3, 4, 9),
    (4, 5, 9),
    (5, 6, 6),
    (5, 7, 3),
    (6, 7, 6),
    (7, 8, 9),
    (8, 9, 9),
    (9, 10, 3),
    (9, 11, 6),
    (10, 11, 3),
];

pub fn fig2() -> FlowGraph {
    FlowGraph::new(12, FIG2_EDGES).unwrap()
}

pub fn labels(s: &str) -> Vec<Vertex> {
    s.bytes().filter(|b| b.is_ascii_lowercase()).map(|b| (b - b'a') as Vertex).collect()
}

fn sorted(mut v: Vec<WeightedSafePath>) -> Vec<WeightedSafePath> {
    v.sort_by(|a, b| a.vertices.cmp(&b.vertices).then(a.excess.cmp(&b.excess)));
    v
}

/// Path sets of the five variants, each sorted by vertex sequence:
/// old raw, old concise, optimal raw, optimal concise, optimal.
pub fn five_ways(g: &FlowGraph) -> [Vec<WeightedSafePath>; 5] {
    let idx = MaxEdgeIndex::new(g);
    let (fi, fo) = build_extension_forests(g, &idx);
    let rep: Vec<WeightedSafePath> = opt_rep_enumerate(g, &idx, &fi, &fo)
        .iter()
        .map(|r| expand_optimal(g, &fi, &fo, r).expect("optimal record expands"))
        .collect();
    [
        sorted(legacy::rawrep(g)),
        sorted(expand_concise(&legacy::conrep(g)).expect("old concise expands")),
        sorted(opt_raw_enumerate(g, &idx)),
        sorted(expand_concise(&opt_concise(g, &idx)).expect("concise expands")),
        sorted(rep),
    ]
}
