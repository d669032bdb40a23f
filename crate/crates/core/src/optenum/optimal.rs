use alloc::vec;
use alloc::vec::Vec;

use super::forest::ExtensionForest;
use super::RecordError;
use crate::graph::{Flow, FlowGraph, MaxEdgeIndex, Vertex};
use crate::safety::{excess_flow, WeightedSafePath};

/// A maximal safe path given by its representative edge `(edge_left,
/// edge_right)` and its end vertices. The part left of the edge follows the
/// in-forest, the part right of it the out-forest.
///
/// `trivial` marks paths whose every edge is a unique maximum in-edge; their
/// representative is the last edge, so `right == edge_right`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OptimalRecord {
    pub edge_left: Vertex,
    pub edge_right: Vertex,
    pub left: Vertex,
    pub right: Vertex,
    pub flow: Flow,
    pub trivial: bool,
}

/// Whether some in-edge of `x` keeps a path of excess `flow` safe.
pub fn is_left_extendable(g: &FlowGraph, idx: &MaxEdgeIndex, x: Vertex, flow: Flow) -> bool {
    idx.max_in(x).is_some_and(|m| g.f_in(x) - m.flow < flow)
}

/// Whether some out-edge of `u` keeps a path of excess `flow` safe.
pub fn is_right_extendable(g: &FlowGraph, idx: &MaxEdgeIndex, u: Vertex, flow: Flow) -> bool {
    idx.max_out(u).is_some_and(|m| g.f_out(u) - m.flow < flow)
}

/// All maximal safe paths with at least two edges, as representative
/// records. Non-trivial records come first, grouped by edge in edge order,
/// then the trivial ones.
pub fn opt_rep_enumerate(
    g: &FlowGraph,
    idx: &MaxEdgeIndex,
    fi: &ExtensionForest,
    fo: &ExtensionForest,
) -> Vec<OptimalRecord> {
    let mut out = Vec::new();
    opt_rep_visit(g, idx, fi, fo, |r| out.push(r));
    out
}

/// Streaming form of [`opt_rep_enumerate`].
pub fn opt_rep_visit(
    g: &FlowGraph,
    idx: &MaxEdgeIndex,
    fi: &ExtensionForest,
    fo: &ExtensionForest,
    mut emit: impl FnMut(OptimalRecord),
) {
    for (id, e) in g.edges().iter().enumerate() {
        if idx.unique_max_in(e.to).is_some_and(|m| m.edge as usize == id) {
            continue;
        }
        let (u, v, f) = (e.from, e.to, e.flow);
        let mut excess = f;
        while excess > 0 {
            let l = fi.extend(u, excess);
            excess = f - fi.loss(u, l);
            let r = fo.extend(v, excess);
            let flow = excess - fo.loss(v, r);
            if (l != u || r != v) && !is_left_extendable(g, idx, l, flow) {
                emit(OptimalRecord { edge_left: u, edge_right: v, left: l, right: r, flow, trivial: false });
            }
            match fo.parent(r) {
                None => break,
                Some(next) => excess = f - fo.loss(v, next),
            }
        }
    }

    let mut marked = vec![false; g.n()];
    for &leaf in g.topological_order() {
        if !fi.is_leaf(leaf) || fi.parent(leaf).is_none() {
            continue;
        }
        let mut u = leaf;
        while !marked[u as usize] {
            marked[u as usize] = true;
            let Some(v) = fi.parent(u) else { break };
            let f = fi.link_flow(u);
            let x = fi.extend(v, f);
            let flow = f - fi.loss(v, x);
            if x != v && !is_left_extendable(g, idx, x, flow) && !is_right_extendable(g, idx, u, flow) {
                emit(OptimalRecord { edge_left: v, edge_right: u, left: x, right: u, flow, trivial: true });
            }
            let Some(y) = fi.parent(x) else { break };
            match fi.deepest_safe_below(y, u) {
                Some(w) => u = w,
                None => break,
            }
        }
    }
}

/// Rebuilds the path of a record and checks its stated flow.
pub fn expand_optimal(
    g: &FlowGraph,
    fi: &ExtensionForest,
    fo: &ExtensionForest,
    rec: &OptimalRecord,
) -> Result<WeightedSafePath, RecordError> {
    if g.find_edge(rec.edge_left, rec.edge_right).is_none() {
        return Err(RecordError::NotAnEdge { from: rec.edge_left, to: rec.edge_right });
    }
    let walk = |forest: &ExtensionForest, from: Vertex, to: Vertex| -> Result<Vec<Vertex>, RecordError> {
        let mut seq = vec![from];
        let mut x = from;
        while x != to {
            x = forest.parent(x).ok_or(RecordError::BadAncestor { vertex: to })?;
            seq.push(x);
        }
        Ok(seq)
    };
    let mut vertices = walk(fi, rec.edge_left, rec.left)?;
    vertices.reverse();
    vertices.extend(walk(fo, rec.edge_right, rec.right)?);
    let actual = excess_flow(g, &vertices).map_err(|_| RecordError::BadAncestor { vertex: rec.left })?;
    if actual != rec.flow {
        return Err(RecordError::FlowMismatch { stated: rec.flow, actual });
    }
    Ok(WeightedSafePath { vertices, excess: actual })
}
