//! Excess-flow arithmetic, safety checks, the classical candidate flow
//! decomposition with its two-pointer scan, and exhaustive oracles.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Flow, FlowGraph, Vertex};

/// A safe path together with the flow that necessarily traverses all of it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightedSafePath {
    pub vertices: Vec<Vertex>,
    pub excess: Flow,
}

impl WeightedSafePath {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathError {
    TooShort,
    MissingEdge { from: Vertex, to: Vertex },
    NotAdjacent,
    GuardExceeded,
}

impl fmt::Display for PathError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathError::TooShort => write!(f, "path needs at least one edge"),
            PathError::MissingEdge { from, to } => write!(f, "({from},{to}) is not an edge of the graph"),
            PathError::NotAdjacent => write!(f, "edge does not touch the path end it extends"),
            PathError::GuardExceeded => write!(f, "graph too large for exhaustive enumeration"),
        }
    }
}

impl core::error::Error for PathError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn edge_flow(g: &FlowGraph, from: Vertex, to: Vertex) -> Result<Flow, PathError> {
    g.flow(from, to).ok_or(PathError::MissingEdge { from, to })
}

/// Excess flow of `path`: the flow of its first edge minus all flow leaving
/// the path at internal vertices.
pub fn excess_flow(g: &FlowGraph, path: &[Vertex]) -> Result<Flow, PathError> {
    if path.len() < 2 {
        return Err(PathError::TooShort);
    }
    let mut excess = edge_flow(g, path[0], path[1])?;
    for w in path.windows(2).skip(1) {
        excess -= g.f_out(w[0]) - edge_flow(g, w[0], w[1])?;
    }
    debug_assert_eq!(Ok(excess), excess_flow_incoming(g, path));
    Ok(excess)
}

/// The same quantity computed from the last edge and the flow entering the
/// path at internal vertices.
pub fn excess_flow_incoming(g: &FlowGraph, path: &[Vertex]) -> Result<Flow, PathError> {
    if path.len() < 2 {
        return Err(PathError::TooShort);
    }
    let k = path.len();
    let mut excess = edge_flow(g, path[k - 2], path[k - 1])?;
    for w in path.windows(2).take(k - 2) {
        excess -= g.f_in(w[1]) - edge_flow(g, w[0], w[1])?;
    }
    Ok(excess)
}

/// Change in excess flow when `path` is extended by the edge `(from, to)` on
/// `side`. Always non-positive.
pub fn delta_extend(
    g: &FlowGraph,
    path: &[Vertex],
    side: Side,
    from: Vertex,
    to: Vertex,
) -> Result<Flow, PathError> {
    let f = edge_flow(g, from, to)?;
    match side {
        Side::Left if path.first() == Some(&to) => Ok(-(g.f_in(to) - f)),
        Side::Right if path.last() == Some(&from) => Ok(-(g.f_out(from) - f)),
        _ => Err(PathError::NotAdjacent),
    }
}

pub fn is_safe(g: &FlowGraph, path: &[Vertex]) -> Result<bool, PathError> {
    Ok(excess_flow(g, path)? > 0)
}

/// A set of weighted source-to-sink paths whose superposition is the graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct CandidateDecomposition {
    pub paths: Vec<(Vec<Vertex>, Flow)>,
}

/// Classical path-peeling decomposition: repeatedly walk from a source along
/// the lowest-id edge with positive residual flow and subtract the bottleneck.
/// Each round empties at least one edge, so there are at most `m` paths.
pub fn candidate_flow_decomposition(g: &FlowGraph) -> CandidateDecomposition {
    let mut residual: Vec<Flow> = g.edges().iter().map(|e| e.flow).collect();
    // First out-edge of each vertex that may still carry residual flow.
    let mut cursor: Vec<u32> = (0..g.n() as Vertex).map(|v| g.out_edge_ids(v).start).collect();
    let mut paths = Vec::new();
    let mut walk = Vec::new();
    let mut edge_ids = Vec::new();

    for s in 0..g.n() as Vertex {
        if !g.is_source(s) {
            continue;
        }
        loop {
            walk.clear();
            edge_ids.clear();
            let mut v = s;
            walk.push(v);
            loop {
                let end = g.out_edge_ids(v).end;
                let c = &mut cursor[v as usize];
                while *c < end && residual[*c as usize] == 0 {
                    *c += 1;
                }
                if *c == end {
                    break;
                }
                edge_ids.push(*c);
                v = g.edge(*c).to;
                walk.push(v);
            }
            if edge_ids.is_empty() {
                break;
            }
            let weight = edge_ids.iter().map(|&id| residual[id as usize]).min().unwrap_or(0);
            for &id in &edge_ids {
                residual[id as usize] -= weight;
            }
            paths.push((walk.clone(), weight));
        }
    }
    debug_assert!(residual.iter().all(|&r| r == 0));
    CandidateDecomposition { paths }
}

/// All subpaths of `path` that are safe and cannot be extended inside `path`
/// in either direction without becoming unsafe, left to right. Includes
/// single-edge windows. Linear in `path.len()`.
pub fn two_pointer_scan(g: &FlowGraph, path: &[Vertex]) -> Vec<WeightedSafePath> {
    let mut out = Vec::new();
    scan_windows(g, path, |l, r, excess| {
        out.push(WeightedSafePath { vertices: path[l..=r].to_vec(), excess });
    });
    out
}

/// Window form of [`two_pointer_scan`]: calls `emit(l, r, excess)` with
/// inclusive vertex positions.
pub(crate) fn scan_windows(g: &FlowGraph, path: &[Vertex], mut emit: impl FnMut(usize, usize, Flow)) {
    if path.len() < 2 {
        return;
    }
    let flow = |i: usize| g.flow(path[i], path[i + 1]).expect("scan path must follow graph edges");
    let (mut l, mut r) = (0usize, 1usize);
    let mut excess = flow(0);
    loop {
        while r + 1 < path.len() {
            let next = excess - (g.f_out(path[r]) - flow(r));
            if next <= 0 {
                break;
            }
            excess = next;
            r += 1;
        }
        emit(l, r, excess);
        if r + 1 == path.len() {
            return;
        }
        excess -= g.f_out(path[r]) - flow(r);
        r += 1;
        while excess <= 0 {
            excess += g.f_in(path[l + 1]) - flow(l);
            l += 1;
        }
    }
}

/// Size limit of [`maximal_safe_paths_bruteforce`].
pub const BRUTEFORCE_MAX_VERTICES: usize = 64;

/// Ground truth by exhaustion: every safe path with at least two edges that
/// is not a subpath of another such path. Excess values are recomputed from
/// scratch for every candidate. Sorted by vertex sequence.
pub fn maximal_safe_paths_bruteforce(g: &FlowGraph) -> Result<Vec<WeightedSafePath>, PathError> {
    if g.n() > BRUTEFORCE_MAX_VERTICES {
        return Err(PathError::GuardExceeded);
    }
    // Safe paths are closed under taking subpaths, so depth-first growth to
    // the right can stop at the first unsafe extension.
    let mut safe: BTreeSet<Vec<Vertex>> = BTreeSet::new();
    let mut stack: Vec<Vec<Vertex>> = g.edges().iter().map(|e| vec![e.from, e.to]).collect();
    while let Some(p) = stack.pop() {
        if excess_flow(g, &p)? <= 0 {
            continue;
        }
        let last = *p.last().unwrap();
        for e in g.out_edges(last) {
            let mut q = p.clone();
            q.push(e.to);
            stack.push(q);
        }
        safe.insert(p);
    }
    let long: Vec<&Vec<Vertex>> = safe.iter().filter(|p| p.len() >= 3).collect();
    let mut out = Vec::new();
    for p in &long {
        let contained = long
            .iter()
            .any(|q| q.len() > p.len() && q.windows(p.len()).any(|w| w == p.as_slice()));
        if !contained {
            out.push(WeightedSafePath { vertices: (*p).clone(), excess: excess_flow(g, p)? });
        }
    }
    Ok(out)
}

/// Size limits of [`enumerate_flow_decompositions`].
pub const DECOMPOSITION_MAX_EDGES: usize = 12;
pub const DECOMPOSITION_MAX_FLOW: Flow = 32;

/// Every integral flow decomposition of a tiny graph, each canonicalized as a
/// sorted list of distinct paths with their total weights.
pub fn enumerate_flow_decompositions(g: &FlowGraph) -> Result<BTreeSet<CandidateDecomposition>, PathError> {
    if g.m() > DECOMPOSITION_MAX_EDGES || g.total_flow() > DECOMPOSITION_MAX_FLOW {
        return Err(PathError::GuardExceeded);
    }
    let routes = source_sink_paths(g);
    let route_edges: Vec<Vec<usize>> = routes
        .iter()
        .map(|p| p.windows(2).map(|w| g.find_edge(w[0], w[1]).unwrap() as usize).collect())
        .collect();
    let mut residual: Vec<Flow> = g.edges().iter().map(|e| e.flow).collect();
    let mut chosen: Vec<(usize, Flow)> = Vec::new();
    let mut found = BTreeSet::new();
    peel(&routes, &route_edges, 0, &mut residual, &mut chosen, &mut found);
    Ok(found)
}

fn peel(
    routes: &[Vec<Vertex>],
    route_edges: &[Vec<usize>],
    first: usize,
    residual: &mut Vec<Flow>,
    chosen: &mut Vec<(usize, Flow)>,
    found: &mut BTreeSet<CandidateDecomposition>,
) {
    if residual.iter().all(|&r| r == 0) {
        let paths = chosen.iter().map(|&(i, w)| (routes[i].clone(), w)).collect();
        found.insert(CandidateDecomposition { paths });
        return;
    }
    // Routes are used in increasing index order so every decomposition (a set
    // of distinct paths with weights) is produced exactly once.
    for i in first..routes.len() {
        let cap = route_edges[i].iter().map(|&e| residual[e]).min().unwrap_or(0);
        for w in 1..=cap {
            for &e in &route_edges[i] {
                residual[e] -= w;
            }
            chosen.push((i, w));
            peel(routes, route_edges, i + 1, residual, chosen, found);
            chosen.pop();
            for &e in &route_edges[i] {
                residual[e] += w;
            }
        }
    }
}

/// All source-to-sink paths, in lexicographic order.
pub fn source_sink_paths(g: &FlowGraph) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    let mut walk = Vec::new();
    for s in 0..g.n() as Vertex {
        if g.is_source(s) && !g.is_sink(s) {
            walk.push(s);
            extend_to_sinks(g, &mut walk, &mut out);
            walk.pop();
        }
    }
    out
}

fn extend_to_sinks(g: &FlowGraph, walk: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
    let v = *walk.last().unwrap();
    if g.is_sink(v) {
        out.push(walk.clone());
        return;
    }
    for e in g.out_edges(v) {
        walk.push(e.to);
        extend_to_sinks(g, walk, out);
        walk.pop();
    }
}

/// Safety by definition: `path` is a subpath of some path in every
/// decomposition.
pub fn is_safe_by_definition(decompositions: &BTreeSet<CandidateDecomposition>, path: &[Vertex]) -> bool {
    decompositions.iter().all(|d| {
        d.paths
            .iter()
            .any(|(p, _)| p.len() >= path.len() && p.windows(path.len()).any(|w| w == path))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn merge_graph() -> FlowGraph {
        // s=0 -> a=2 : 5, x=1 -> a : 2, a -> t=3 : 7
        FlowGraph::new(4, [(0, 2, 5), (1, 2, 2), (2, 3, 7)]).unwrap()
    }

    #[test]
    fn excess_of_single_edge_is_its_flow() {
        let g = merge_graph();
        assert_eq!(excess_flow(&g, &[0, 2]), Ok(5));
        assert_eq!(is_safe(&g, &[1, 2]), Ok(true));
    }

    #[test]
    fn both_excess_formulas_agree_by_hand() {
        let g = merge_graph();
        assert_eq!(excess_flow(&g, &[0, 2, 3]), Ok(5));
        assert_eq!(excess_flow_incoming(&g, &[0, 2, 3]), Ok(5));
        assert_eq!(excess_flow(&g, &[1, 2, 3]), Ok(2));
    }

    #[test]
    fn excess_errors() {
        let g = merge_graph();
        assert_eq!(excess_flow(&g, &[0]), Err(PathError::TooShort));
        assert_eq!(excess_flow(&g, &[0, 3]), Err(PathError::MissingEdge { from: 0, to: 3 }));
    }

    #[test]
    fn delta_extend_matches_excess_difference() {
        let g = merge_graph();
        assert_eq!(delta_extend(&g, &[2, 3], Side::Left, 0, 2), Ok(-2));
        assert_eq!(excess_flow(&g, &[2, 3]).unwrap() - 2, excess_flow(&g, &[0, 2, 3]).unwrap());
        // right extension by the only out-edge loses nothing
        assert_eq!(delta_extend(&g, &[0, 2], Side::Right, 2, 3), Ok(0));
        assert_eq!(delta_extend(&g, &[0, 2], Side::Left, 2, 3), Err(PathError::NotAdjacent));
    }

    #[test]
    fn candidate_decomposition_of_diamond() {
        let g = FlowGraph::new(4, [(0, 1, 3), (0, 2, 2), (1, 3, 3), (2, 3, 2)]).unwrap();
        let d = candidate_flow_decomposition(&g);
        assert_eq!(d.paths, vec![(vec![0, 1, 3], 3), (vec![0, 2, 3], 2)]);
        let single = FlowGraph::new(3, [(0, 1, 7), (1, 2, 7)]).unwrap();
        assert_eq!(candidate_flow_decomposition(&single).paths, vec![(vec![0, 1, 2], 7)]);
    }

    #[test]
    fn scan_on_merge_graph() {
        let g = merge_graph();
        let out = two_pointer_scan(&g, &[0, 2, 3]);
        assert_eq!(out, vec![WeightedSafePath { vertices: vec![0, 2, 3], excess: 5 }]);
    }

    #[test]
    fn scan_of_funnel_path_is_whole_path() {
        let g = FlowGraph::new(4, [(0, 1, 4), (1, 2, 4), (2, 3, 4)]).unwrap();
        assert_eq!(
            two_pointer_scan(&g, &[0, 1, 2, 3]),
            vec![WeightedSafePath { vertices: vec![0, 1, 2, 3], excess: 4 }]
        );
    }

    #[test]
    fn decompositions_of_small_graphs() {
        let single = FlowGraph::new(3, [(0, 1, 2), (1, 2, 2)]).unwrap();
        assert_eq!(enumerate_flow_decompositions(&single).unwrap().len(), 1);
        let diamond = FlowGraph::new(4, [(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1)]).unwrap();
        assert_eq!(enumerate_flow_decompositions(&diamond).unwrap().len(), 1);
        // X shape: two merges into one vertex then two forks, two decompositions.
        let x = FlowGraph::new(5, [(0, 2, 1), (1, 2, 1), (2, 3, 1), (2, 4, 1)]).unwrap();
        assert_eq!(enumerate_flow_decompositions(&x).unwrap().len(), 2);
    }

    #[test]
    fn bruteforce_on_funnel_returns_decomposition_paths() {
        let g = FlowGraph::new(4, [(0, 1, 3), (0, 2, 2), (1, 3, 3), (2, 3, 2)]).unwrap();
        let got = maximal_safe_paths_bruteforce(&g).unwrap();
        assert_eq!(
            got,
            vec![
                WeightedSafePath { vertices: vec![0, 1, 3], excess: 3 },
                WeightedSafePath { vertices: vec![0, 2, 3], excess: 2 },
            ]
        );
    }

    #[test]
    fn guards() {
        let big = FlowGraph::new(65, (0..64).map(|v| (v, v + 1, 1))).unwrap();
        assert_eq!(maximal_safe_paths_bruteforce(&big), Err(PathError::GuardExceeded));
        assert_eq!(enumerate_flow_decompositions(&big), Err(PathError::GuardExceeded));
    }
}
