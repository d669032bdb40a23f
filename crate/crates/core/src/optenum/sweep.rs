//! Topological sweep over reversed tries.
//!
//! When vertex `u` is processed, the trie rooted at `u` holds every
//! left-maximal safe path ending at `u`, each root-to-leaf path read
//! backwards. Tries share structure: the trie of `u` becomes the child
//! subtree of `u` in the trie of its preferred max out-neighbour `v*`, and
//! out-edges other than `(u, v*)` copy only the chain of their own
//! left-maximal path.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{ConciseRecord, Interval};
use crate::graph::{Flow, FlowGraph, MaxEdgeIndex, Vertex, NONE};
use crate::safety::WeightedSafePath;

type NodeId = u32;

/// Operation counts of one sweep, for work-scaling checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub nodes_created: u64,
    /// Chain, trim and output steps over trie nodes.
    pub node_steps: u64,
    pub records: u64,
}

struct Trie {
    vertex: Vec<Vertex>,
    /// Kept after a node is detached, so removed prefixes can still be read.
    parent: Vec<NodeId>,
    first_child: Vec<NodeId>,
    next: Vec<NodeId>,
    prev: Vec<NodeId>,
}

impl Trie {
    fn new() -> Trie {
        Trie { vertex: Vec::new(), parent: Vec::new(), first_child: Vec::new(), next: Vec::new(), prev: Vec::new() }
    }

    fn add(&mut self, vertex: Vertex) -> NodeId {
        let id = self.vertex.len() as NodeId;
        self.vertex.push(vertex);
        self.parent.push(NONE);
        self.first_child.push(NONE);
        self.next.push(NONE);
        self.prev.push(NONE);
        id
    }

    fn attach(&mut self, child: NodeId, parent: NodeId) {
        let head = self.first_child[parent as usize];
        self.parent[child as usize] = parent;
        self.prev[child as usize] = NONE;
        self.next[child as usize] = head;
        if head != NONE {
            self.prev[head as usize] = child;
        }
        self.first_child[parent as usize] = child;
    }

    fn detach(&mut self, x: NodeId) {
        let (p, n) = (self.prev[x as usize], self.next[x as usize]);
        if p == NONE {
            self.first_child[self.parent[x as usize] as usize] = n;
        } else {
            self.next[p as usize] = n;
        }
        if n != NONE {
            self.prev[n as usize] = p;
        }
    }

    fn is_leaf(&self, x: NodeId) -> bool {
        self.first_child[x as usize] == NONE
    }

    fn child(&self, x: NodeId, vertex: Vertex) -> Option<NodeId> {
        let mut c = self.first_child[x as usize];
        while c != NONE {
            if self.vertex[c as usize] == vertex {
                return Some(c);
            }
            c = self.next[c as usize];
        }
        None
    }

    /// Vertices from `from` up to and excluding `stop`.
    fn push_path(&self, mut from: NodeId, stop: NodeId, out: &mut Vec<Vertex>, steps: &mut u64) {
        while from != stop {
            out.push(self.vertex[from as usize]);
            from = self.parent[from as usize];
            *steps += 1;
        }
    }
}

struct Sweep<'g> {
    g: &'g FlowGraph,
    idx: &'g MaxEdgeIndex,
    trie: Trie,
    root: Vec<NodeId>,
    stats: SweepStats,
}

impl<'g> Sweep<'g> {
    fn new(g: &'g FlowGraph, idx: &'g MaxEdgeIndex) -> Sweep<'g> {
        Sweep { g, idx, trie: Trie::new(), root: vec![NONE; g.n()], stats: SweepStats::default() }
    }

    fn root(&mut self, v: Vertex) -> NodeId {
        if self.root[v as usize] == NONE {
            self.root[v as usize] = self.trie.add(v);
            self.stats.nodes_created += 1;
        }
        self.root[v as usize]
    }

    fn preferred_out(&self, u: Vertex) -> Option<Vertex> {
        if self.g.is_source(u) {
            None
        } else {
            self.idx.max_out(u).map(|m| m.far)
        }
    }

    /// Copies the left-maximal chain of edge `(u, v)` into the trie of `v`.
    /// Returns the node of `T_u` where the chain ends, its copy in `T_v`,
    /// and the excess of the chain path.
    fn chain(&mut self, u: Vertex, v: Vertex, f: Flow) -> (NodeId, NodeId, Flow) {
        let root_v = self.root(v);
        let mut x = self.root[u as usize];
        let mut f = f;
        let mut copy = self.trie.add(u);
        self.stats.nodes_created += 1;
        self.trie.attach(copy, root_v);
        while !self.trie.is_leaf(x) {
            let a = self.trie.vertex[x as usize];
            let Some(m) = self.idx.max_in(a) else { break };
            let next = f - self.g.f_in(a) + m.flow;
            if next <= 0 {
                break;
            }
            let Some(c) = self.trie.child(x, m.far) else { break };
            f = next;
            x = c;
            let nc = self.trie.add(m.far);
            self.trie.attach(nc, copy);
            copy = nc;
            self.stats.nodes_created += 1;
            self.stats.node_steps += 1;
        }
        (x, copy, f)
    }

    /// Links `T_u` below the root of `T_{v*}`.
    fn link(&mut self, u: Vertex, vs: Vertex) {
        let r = self.root(vs);
        let ru = self.root[u as usize];
        self.trie.attach(ru, r);
    }

    /// Excess of `path(x) + (u, v*)` from the excess `f` of `path(x)`.
    fn through(&self, u: Vertex, vs: Option<Vertex>, f: Flow) -> Option<Flow> {
        vs.map(|vs| f - self.g.f_out(u) + self.g.flow(u, vs).unwrap_or(0))
    }

    /// One trimming step: removes leaf `x` and returns its parent with the
    /// updated excess.
    fn trim(&mut self, x: NodeId, fx: Option<Flow>) -> (NodeId, Option<Flow>) {
        let y = self.trie.parent[x as usize];
        let (a, b) = (self.trie.vertex[x as usize], self.trie.vertex[y as usize]);
        let fx = fx.map(|f| f + self.g.f_in(b) - self.g.flow(a, b).unwrap_or(0));
        self.trie.detach(x);
        self.stats.node_steps += 1;
        (y, fx)
    }
}

/// Raw maximal safe paths with at least two edges, in canonical order.
pub fn opt_raw_enumerate(g: &FlowGraph, idx: &MaxEdgeIndex) -> Vec<WeightedSafePath> {
    let mut out = Vec::new();
    opt_raw_visit(g, idx, |p, f| out.push(WeightedSafePath { vertices: p.to_vec(), excess: f }));
    super::sort_paths(g, &mut out);
    out
}

/// Streams raw maximal safe paths in sweep order.
pub fn opt_raw_visit(g: &FlowGraph, idx: &MaxEdgeIndex, mut emit: impl FnMut(&[Vertex], Flow)) -> SweepStats {
    let mut s = Sweep::new(g, idx);
    // live leaves of each trie with the excess of their path
    let mut live: Vec<Vec<(NodeId, Flow)>> = vec![Vec::new(); g.n()];
    let mut buf = Vec::new();
    for &u in g.topological_order() {
        s.root(u);
        let vs = s.preferred_out(u);
        for e in g.out_edges(u) {
            if Some(e.to) != vs {
                let (_, copy, f) = s.chain(u, e.to, e.flow);
                live[e.to as usize].push((copy, f));
            }
        }
        if let Some(vs) = vs {
            s.link(u, vs);
        }
        let root_u = s.root[u as usize];
        for (l, f) in core::mem::take(&mut live[u as usize]) {
            let mut fx = s.through(u, vs, f);
            if fx.is_some_and(|f| f > 0) {
                live[vs.unwrap() as usize].push((l, fx.unwrap()));
                continue;
            }
            buf.clear();
            s.trie.push_path(l, root_u, &mut buf, &mut s.stats.node_steps);
            buf.push(u);
            if buf.len() >= 3 {
                emit(&buf, f);
                s.stats.records += 1;
            }
            let Some(vs) = vs else { continue };
            let mut x = l;
            while fx.is_some_and(|f| f <= 0) && x != root_u && s.trie.is_leaf(x) {
                (x, fx) = s.trim(x, fx);
            }
            if let Some(f) = fx.filter(|&f| f > 0) {
                if s.trie.is_leaf(x) {
                    live[vs as usize].push((x, f));
                }
            }
        }
    }
    s.stats
}

struct Pending {
    carrier: Vec<Vertex>,
    intervals: Vec<Interval>,
    /// Left end of the last interval, as a node of the current trie.
    live: NodeId,
}

/// Concise maximal safe paths, sorted by first carrier vertex position and
/// carrier length.
pub fn opt_concise(g: &FlowGraph, idx: &MaxEdgeIndex) -> Vec<ConciseRecord> {
    let mut out = Vec::new();
    opt_concise_visit(g, idx, |r| out.push(r));
    out.sort_by(|a, b| {
        let key = |r: &ConciseRecord| (r.carrier.first().map(|&v| g.position(v)), r.carrier.len());
        key(a).cmp(&key(b)).then_with(|| a.cmp(b))
    });
    out
}

/// Streams concise records in sweep order.
pub fn opt_concise_visit(g: &FlowGraph, idx: &MaxEdgeIndex, mut emit: impl FnMut(ConciseRecord)) -> SweepStats {
    let mut s = Sweep::new(g, idx);
    let mut pending: Vec<Vec<Pending>> = (0..g.n()).map(|_| Vec::new()).collect();
    // chain end node in T_u -> (out-neighbour, index of its chain record)
    let mut marks: BTreeMap<NodeId, Vec<(Vertex, usize)>> = BTreeMap::new();
    for &u in g.topological_order() {
        s.root(u);
        let vs = s.preferred_out(u);
        for e in g.out_edges(u) {
            if Some(e.to) != vs {
                let (x, copy, f) = s.chain(u, e.to, e.flow);
                let left = s.trie.vertex[x as usize];
                let list = &mut pending[e.to as usize];
                marks.entry(x).or_default().push((e.to, list.len()));
                list.push(Pending {
                    carrier: Vec::new(),
                    intervals: vec![Interval { left, right: e.to, flow: f }],
                    live: copy,
                });
            }
        }
        if let Some(vs) = vs {
            s.link(u, vs);
        }
        let root_u = s.root[u as usize];
        for mut rec in core::mem::take(&mut pending[u as usize]) {
            let l = rec.live;
            let last = *rec.intervals.last().expect("pending records hold an interval");
            let mut x = l;
            let mut fx = s.through(u, vs, last.flow);
            while fx.is_none_or(|f| f <= 0)
                && x != root_u
                && s.trie.is_leaf(x)
                && marks.get(&x).is_none_or(|m| m.is_empty())
            {
                (x, fx) = s.trim(x, fx);
            }
            s.trie.push_path(l, x, &mut rec.carrier, &mut s.stats.node_steps);

            if x != l && x == root_u && s.trie.parent[l as usize] == root_u {
                // the last interval is a single edge into u
                rec.intervals.pop();
                if !rec.intervals.is_empty() {
                    s.stats.records += 1;
                    emit(ConciseRecord {
                        carrier: core::mem::take(&mut rec.carrier),
                        intervals: core::mem::take(&mut rec.intervals),
                    });
                }
                rec.carrier.clear();
            }

            if let (Some(f), Some(vs)) = (fx.filter(|&f| f > 0), vs) {
                if s.trie.is_leaf(x) {
                    match rec.intervals.last_mut() {
                        Some(iv) if x == l => {
                            iv.right = vs;
                            iv.flow = f;
                        }
                        _ => rec.intervals.push(Interval { left: s.trie.vertex[x as usize], right: vs, flow: f }),
                    }
                    rec.live = x;
                    pending[vs as usize].push(rec);
                    continue;
                }
            }
            let mark = marks.get_mut(&x).and_then(|m| m.pop());
            if let Some((v, at)) = mark {
                let chain = &mut pending[v as usize][at];
                rec.intervals.append(&mut chain.intervals);
                chain.intervals = rec.intervals;
                chain.carrier = rec.carrier;
                continue;
            }
            if !rec.intervals.is_empty() {
                s.trie.push_path(x, s.trie.parent[root_u as usize], &mut rec.carrier, &mut s.stats.node_steps);
                s.stats.records += 1;
                emit(ConciseRecord { carrier: rec.carrier, intervals: rec.intervals });
            }
        }
        marks.clear();
    }
    s.stats
}
