//! Flow graphs: validation, adjacency, topological order and the preferred
//! maximum edge index.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

pub type Vertex = u32;
/// Flow units. Signed so that excess-flow arithmetic can go negative.
pub type Flow = i64;
pub type EdgeId = u32;

pub(crate) const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: Vertex,
    pub to: Vertex,
    pub flow: Flow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    VertexOutOfRange { from: Vertex, to: Vertex, n: usize },
    NonPositiveFlow { from: Vertex, to: Vertex, flow: Flow },
    FlowOverflow { from: Vertex, to: Vertex },
    TooManyVertices(usize),
    Cycle,
    Conservation { vertex: Vertex, inflow: Flow, outflow: Flow },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::VertexOutOfRange { from, to, n } => {
                write!(f, "edge ({from},{to}) has an endpoint outside 0..{n}")
            }
            GraphError::NonPositiveFlow { from, to, flow } => {
                write!(f, "edge ({from},{to}) has non-positive flow {flow}")
            }
            GraphError::FlowOverflow { from, to } => {
                write!(f, "flow on edge ({from},{to}) overflows after merging parallel edges")
            }
            GraphError::TooManyVertices(n) => write!(f, "{n} vertices exceed the 32-bit id space"),
            GraphError::Cycle => write!(f, "graph contains a directed cycle"),
            GraphError::Conservation { vertex, inflow, outflow } => write!(
                f,
                "flow conservation violated at vertex {vertex}: in {inflow} != out {outflow}"
            ),
        }
    }
}

impl core::error::Error for GraphError {}

/// A DAG whose edges carry positive integral flow, conserved at every vertex
/// that is neither a source nor a sink.
///
/// Parallel edges are merged by summing their flows. Edges are stored sorted
/// by `(from, to)`, so the out-edges of a vertex are a contiguous slice and
/// edge ids are stable for a given edge set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowGraph {
    n: usize,
    edges: Vec<Edge>,
    out_start: Vec<u32>,
    in_start: Vec<u32>,
    in_edges: Vec<EdgeId>,
    f_in: Vec<Flow>,
    f_out: Vec<Flow>,
    topo: Vec<Vertex>,
    pos: Vec<u32>,
}

impl FlowGraph {
    pub fn new<I>(n: usize, edges: I) -> Result<FlowGraph, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex, Flow)>,
    {
        if n >= NONE as usize {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut raw = Vec::new();
        for (from, to, flow) in edges {
            if from as usize >= n || to as usize >= n {
                return Err(GraphError::VertexOutOfRange { from, to, n });
            }
            if flow <= 0 {
                return Err(GraphError::NonPositiveFlow { from, to, flow });
            }
            if from == to {
                return Err(GraphError::Cycle);
            }
            raw.push(Edge { from, to, flow });
        }
        raw.sort_unstable_by_key(|e| (e.from, e.to));

        let mut merged: Vec<Edge> = Vec::with_capacity(raw.len());
        for e in raw {
            match merged.last_mut() {
                Some(last) if last.from == e.from && last.to == e.to => {
                    last.flow = last
                        .flow
                        .checked_add(e.flow)
                        .ok_or(GraphError::FlowOverflow { from: e.from, to: e.to })?;
                }
                _ => merged.push(e),
            }
        }
        Self::from_sorted(n, merged)
    }

    fn from_sorted(n: usize, edges: Vec<Edge>) -> Result<FlowGraph, GraphError> {
        if edges.len() >= NONE as usize {
            return Err(GraphError::TooManyVertices(edges.len()));
        }
        let mut out_start = vec![0u32; n + 1];
        let mut in_start = vec![0u32; n + 1];
        let mut f_in = vec![0 as Flow; n];
        let mut f_out = vec![0 as Flow; n];
        for e in &edges {
            out_start[e.from as usize + 1] += 1;
            in_start[e.to as usize + 1] += 1;
            f_out[e.from as usize] += e.flow;
            f_in[e.to as usize] += e.flow;
        }
        for v in 0..n {
            out_start[v + 1] += out_start[v];
            in_start[v + 1] += in_start[v];
        }
        // Counting sort by head; edges are visited in (from, to) order so each
        // head's in-edges end up sorted by tail id.
        let mut fill = in_start.clone();
        let mut in_edges = vec![0 as EdgeId; edges.len()];
        for (id, e) in edges.iter().enumerate() {
            let slot = &mut fill[e.to as usize];
            in_edges[*slot as usize] = id as EdgeId;
            *slot += 1;
        }

        let topo = kahn(n, &out_start, &in_start, &edges)?;
        let mut pos = vec![0u32; n];
        for (i, &v) in topo.iter().enumerate() {
            pos[v as usize] = i as u32;
        }

        for v in 0..n {
            if f_in[v] > 0 && f_out[v] > 0 && f_in[v] != f_out[v] {
                return Err(GraphError::Conservation {
                    vertex: v as Vertex,
                    inflow: f_in[v],
                    outflow: f_out[v],
                });
            }
        }

        Ok(FlowGraph { n, edges, out_start, in_start, in_edges, f_in, f_out, topo, pos })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// All edges, sorted by `(from, to)`; the index is the [`EdgeId`].
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id as usize]
    }

    pub fn out_edges(&self, v: Vertex) -> &[Edge] {
        let (s, e) = (self.out_start[v as usize], self.out_start[v as usize + 1]);
        &self.edges[s as usize..e as usize]
    }

    pub fn out_edge_ids(&self, v: Vertex) -> core::ops::Range<EdgeId> {
        self.out_start[v as usize]..self.out_start[v as usize + 1]
    }

    /// Ids of the in-edges of `v`, sorted by tail id.
    pub fn in_edge_ids(&self, v: Vertex) -> &[EdgeId] {
        let (s, e) = (self.in_start[v as usize], self.in_start[v as usize + 1]);
        &self.in_edges[s as usize..e as usize]
    }

    pub fn in_edges(&self, v: Vertex) -> impl Iterator<Item = &Edge> + '_ {
        self.in_edge_ids(v).iter().map(move |&id| &self.edges[id as usize])
    }

    pub fn indegree(&self, v: Vertex) -> usize {
        (self.in_start[v as usize + 1] - self.in_start[v as usize]) as usize
    }

    pub fn outdegree(&self, v: Vertex) -> usize {
        (self.out_start[v as usize + 1] - self.out_start[v as usize]) as usize
    }

    pub fn f_in(&self, v: Vertex) -> Flow {
        self.f_in[v as usize]
    }

    pub fn f_out(&self, v: Vertex) -> Flow {
        self.f_out[v as usize]
    }

    pub fn is_source(&self, v: Vertex) -> bool {
        self.f_in[v as usize] == 0
    }

    pub fn is_sink(&self, v: Vertex) -> bool {
        self.f_out[v as usize] == 0
    }

    pub fn find_edge(&self, from: Vertex, to: Vertex) -> Option<EdgeId> {
        if from as usize >= self.n {
            return None;
        }
        let range = self.out_edge_ids(from);
        let slice = self.out_edges(from);
        slice
            .binary_search_by_key(&to, |e| e.to)
            .ok()
            .map(|i| range.start + i as EdgeId)
    }

    pub fn flow(&self, from: Vertex, to: Vertex) -> Option<Flow> {
        self.find_edge(from, to).map(|id| self.edges[id as usize].flow)
    }

    /// Deterministic topological order (Kahn's algorithm, smallest id first).
    pub fn topological_order(&self) -> &[Vertex] {
        &self.topo
    }

    /// Position of `v` in [`FlowGraph::topological_order`].
    pub fn position(&self, v: Vertex) -> u32 {
        self.pos[v as usize]
    }

    pub fn total_flow(&self) -> Flow {
        (0..self.n).filter(|&v| self.f_in[v] == 0).map(|v| self.f_out[v]).sum()
    }

    /// True when no merge vertex (in-degree > 1) reaches, or is, a fork
    /// vertex (out-degree > 1). Such graphs have a single flow decomposition.
    pub fn is_funnel(&self) -> bool {
        let mut after_merge = vec![false; self.n];
        for &v in &self.topo {
            let merged = after_merge[v as usize] || self.indegree(v) > 1;
            if merged && self.outdegree(v) > 1 {
                return false;
            }
            if merged {
                for e in self.out_edges(v) {
                    after_merge[e.to as usize] = true;
                }
            }
        }
        true
    }

    /// Share of vertices with in-degree or out-degree at most one. An empty
    /// graph counts as fully funnel-like.
    pub fn funnel_vertex_ratio(&self) -> f64 {
        if self.n == 0 {
            return 1.0;
        }
        let count = (0..self.n as Vertex)
            .filter(|&v| self.indegree(v) <= 1 || self.outdegree(v) <= 1)
            .count();
        count as f64 / self.n as f64
    }
}

fn kahn(n: usize, out_start: &[u32], in_start: &[u32], edges: &[Edge]) -> Result<Vec<Vertex>, GraphError> {
    let mut remaining: Vec<u32> = (0..n).map(|v| in_start[v + 1] - in_start[v]).collect();
    let mut ready: BinaryHeap<Reverse<Vertex>> =
        (0..n as Vertex).filter(|&v| remaining[v as usize] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for e in &edges[out_start[v as usize] as usize..out_start[v as usize + 1] as usize] {
            let r = &mut remaining[e.to as usize];
            *r -= 1;
            if *r == 0 {
                ready.push(Reverse(e.to));
            }
        }
    }
    if order.len() != n {
        return Err(GraphError::Cycle);
    }
    Ok(order)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MaxEdge {
    pub edge: EdgeId,
    /// The endpoint other than the indexed vertex.
    pub far: Vertex,
    pub flow: Flow,
    /// False when another edge on the same side carries the same flow.
    pub unique: bool,
}

/// Per-vertex maximum incoming and outgoing edges. Among tied edges the one
/// whose far endpoint comes first in topological order is kept (the
/// *preferred* maximum).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxEdgeIndex {
    max_in: Vec<Option<MaxEdge>>,
    max_out: Vec<Option<MaxEdge>>,
}

impl MaxEdgeIndex {
    pub fn new(g: &FlowGraph) -> MaxEdgeIndex {
        let pick = |ids: &mut dyn Iterator<Item = EdgeId>, incoming: bool| {
            let mut best: Option<MaxEdge> = None;
            for id in ids {
                let e = g.edge(id);
                let far = if incoming { e.from } else { e.to };
                match &mut best {
                    None => best = Some(MaxEdge { edge: id, far, flow: e.flow, unique: true }),
                    Some(b) if e.flow > b.flow => {
                        *b = MaxEdge { edge: id, far, flow: e.flow, unique: true };
                    }
                    Some(b) if e.flow == b.flow => {
                        b.unique = false;
                        if g.position(far) < g.position(b.far) {
                            b.edge = id;
                            b.far = far;
                        }
                    }
                    Some(_) => {}
                }
            }
            best
        };
        let max_in = (0..g.n() as Vertex)
            .map(|v| pick(&mut g.in_edge_ids(v).iter().copied(), true))
            .collect();
        let max_out = (0..g.n() as Vertex)
            .map(|v| pick(&mut g.out_edge_ids(v), false))
            .collect();
        MaxEdgeIndex { max_in, max_out }
    }

    pub fn max_in(&self, v: Vertex) -> Option<&MaxEdge> {
        self.max_in[v as usize].as_ref()
    }

    pub fn max_out(&self, v: Vertex) -> Option<&MaxEdge> {
        self.max_out[v as usize].as_ref()
    }

    pub fn unique_max_in(&self, v: Vertex) -> Option<&MaxEdge> {
        self.max_in(v).filter(|m| m.unique)
    }

    pub fn unique_max_out(&self, v: Vertex) -> Option<&MaxEdge> {
        self.max_out(v).filter(|m| m.unique)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond(a: Flow, b: Flow) -> FlowGraph {
        FlowGraph::new(4, [(0, 1, a), (0, 2, b), (1, 3, a), (2, 3, b)]).unwrap()
    }

    #[test]
    fn merges_parallel_edges_before_checking_conservation() {
        let err = FlowGraph::new(4, [(0, 1, 3), (0, 1, 2), (1, 2, 5), (1, 3, 5)]).unwrap_err();
        assert_eq!(err, GraphError::Conservation { vertex: 1, inflow: 5, outflow: 10 });

        let g = FlowGraph::new(3, [(0, 1, 3), (0, 1, 2), (1, 2, 5)]).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.flow(0, 1), Some(5));
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            FlowGraph::new(3, [(0, 1, 5), (1, 2, 4)]).unwrap_err(),
            GraphError::Conservation { vertex: 1, inflow: 5, outflow: 4 }
        );
        assert!(matches!(
            FlowGraph::new(2, [(0, 1, 0)]),
            Err(GraphError::NonPositiveFlow { .. })
        ));
        assert!(matches!(
            FlowGraph::new(2, [(0, 1, -3)]),
            Err(GraphError::NonPositiveFlow { .. })
        ));
        assert!(matches!(
            FlowGraph::new(2, [(0, 2, 1)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
        assert_eq!(
            FlowGraph::new(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap_err(),
            GraphError::Cycle
        );
        assert_eq!(FlowGraph::new(2, [(1, 1, 1)]).unwrap_err(), GraphError::Cycle);
    }

    #[test]
    fn topological_order_breaks_ties_by_id() {
        let g = FlowGraph::new(3, [(0, 1, 5), (1, 2, 5)]).unwrap();
        assert_eq!(g.topological_order(), &[0, 1, 2]);
        assert_eq!(diamond(3, 2).topological_order(), &[0, 1, 2, 3]);
        let single = FlowGraph::new(1, []).unwrap();
        assert_eq!(single.topological_order(), &[0]);

        let g = FlowGraph::new(4, [(3, 1, 2), (1, 0, 2), (2, 0, 1), (3, 2, 1)]).unwrap();
        assert_eq!(g.topological_order(), &[3, 1, 2, 0]);
        assert_eq!(g.position(0), 3);
    }

    #[test]
    fn max_edge_index_ties_prefer_earliest_far_endpoint() {
        // a=0, b=1 feed c=2 with equal flow.
        let g = FlowGraph::new(4, [(0, 2, 3), (1, 2, 3), (2, 3, 6)]).unwrap();
        let idx = MaxEdgeIndex::new(&g);
        let m = idx.max_in(2).unwrap();
        assert_eq!((m.far, m.flow, m.unique), (0, 3, false));
        assert!(idx.unique_max_in(2).is_none());
        assert!(idx.max_in(0).is_none());
        assert!(idx.max_out(3).is_none());

        let g = FlowGraph::new(4, [(0, 2, 2), (1, 2, 7), (2, 3, 9)]).unwrap();
        let idx = MaxEdgeIndex::new(&g);
        let m = idx.max_in(2).unwrap();
        assert_eq!((m.far, m.flow, m.unique), (1, 7, true));
        let m = idx.max_in(3).unwrap();
        assert_eq!((m.far, m.flow, m.unique), (2, 9, true));
    }

    #[test]
    fn funnel_detection() {
        let path = FlowGraph::new(3, [(0, 1, 5), (1, 2, 5)]).unwrap();
        assert!(path.is_funnel());
        assert_eq!(path.funnel_vertex_ratio(), 1.0);
        assert!(diamond(3, 2).is_funnel());
        // merge then fork
        let g = FlowGraph::new(6, [(0, 2, 2), (1, 2, 3), (2, 3, 5), (3, 4, 1), (3, 5, 4)]).unwrap();
        assert!(!g.is_funnel());
    }

    #[test]
    fn funnel_ratio_counts_unit_degree_vertices() {
        // source 0 -> {1,2}, complete bipartite {1,2} -> {3,4}, {3,4} -> sink 5.
        // 1 and 2 have indegree 1; 3 and 4 have outdegree 1; 0 has indegree 0;
        // 5 has outdegree 0, so every vertex qualifies.
        let g = FlowGraph::new(
            6,
            [(0, 1, 2), (0, 2, 2), (1, 3, 1), (1, 4, 1), (2, 3, 1), (2, 4, 1), (3, 5, 2), (4, 5, 2)],
        )
        .unwrap();
        assert_eq!(g.funnel_vertex_ratio(), 1.0);
        // two sources and two sinks joined through the bipartite core: 1 and 2
        // become merge+fork vertices.
        let g = FlowGraph::new(
            6,
            [(0, 1, 2), (0, 2, 2), (5, 1, 2), (5, 2, 2), (1, 3, 2), (1, 4, 2), (2, 3, 2), (2, 4, 2)],
        )
        .unwrap();
        assert_eq!(g.funnel_vertex_ratio(), 4.0 / 6.0);
    }
}
