use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{Flow, FlowGraph, MaxEdgeIndex, Vertex, NONE};

/// Forest over the vertices whose parent links are unique maximum edges.
///
/// In the in-forest the parent of `v` is the tail of its unique max in-edge;
/// in the out-forest it is the head of its unique max out-edge. `cum_loss`
/// accumulates the extension loss of each link from the root down, so the
/// loss of extending a path end at `v` up to its ancestor `a` is
/// `cum_loss(v) - cum_loss(a)`.
#[derive(Clone, Debug)]
pub struct ExtensionForest {
    parent: Vec<u32>,
    depth: Vec<u32>,
    cum_loss: Vec<Flow>,
    /// Flow on the link from `v` to its parent.
    link_flow: Vec<Flow>,
    has_child: Vec<bool>,
    /// `jump[k][v]` is the `2^k`-th ancestor of `v`, or NONE.
    jump: Vec<Vec<u32>>,
}

/// Builds the in-forest and the out-forest of `g`.
pub fn build_extension_forests(g: &FlowGraph, idx: &MaxEdgeIndex) -> (ExtensionForest, ExtensionForest) {
    let topo = g.topological_order();
    let fi = ExtensionForest::build(
        g.n(),
        topo.iter().copied(),
        |v| idx.unique_max_in(v).map(|m| (m.far, m.flow, g.f_in(v) - m.flow)),
    );
    let fo = ExtensionForest::build(
        g.n(),
        topo.iter().rev().copied(),
        |v| idx.unique_max_out(v).map(|m| (m.far, m.flow, g.f_out(v) - m.flow)),
    );
    (fi, fo)
}

impl ExtensionForest {
    /// `order` must list every parent before its children.
    fn build(
        n: usize,
        order: impl Iterator<Item = Vertex>,
        link: impl Fn(Vertex) -> Option<(Vertex, Flow, Flow)>,
    ) -> ExtensionForest {
        let mut parent = vec![NONE; n];
        let mut depth = vec![0u32; n];
        let mut cum_loss = vec![0; n];
        let mut link_flow = vec![0; n];
        let mut has_child = vec![false; n];
        let mut max_depth = 0;
        for v in order {
            if let Some((p, flow, loss)) = link(v) {
                let (v, p) = (v as usize, p as usize);
                parent[v] = p as u32;
                depth[v] = depth[p] + 1;
                cum_loss[v] = cum_loss[p] + loss;
                link_flow[v] = flow;
                has_child[p] = true;
                max_depth = max_depth.max(depth[v]);
            }
        }
        let levels = (u32::BITS - max_depth.leading_zeros()) as usize;
        let mut jump: Vec<Vec<u32>> = Vec::with_capacity(levels);
        if levels > 0 {
            jump.push(parent.clone());
        }
        for k in 1..levels {
            let prev = &jump[k - 1];
            let next = prev.iter().map(|&a| if a == NONE { NONE } else { prev[a as usize] }).collect();
            jump.push(next);
        }
        ExtensionForest { parent, depth, cum_loss, link_flow, has_child, jump }
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        let p = self.parent[v as usize];
        (p != NONE).then_some(p)
    }

    pub fn depth(&self, v: Vertex) -> u32 {
        self.depth[v as usize]
    }

    pub fn cum_loss(&self, v: Vertex) -> Flow {
        self.cum_loss[v as usize]
    }

    /// Flow on the link from `v` to its parent (0 for roots).
    pub fn link_flow(&self, v: Vertex) -> Flow {
        self.link_flow[v as usize]
    }

    pub fn is_leaf(&self, v: Vertex) -> bool {
        !self.has_child[v as usize]
    }

    /// Total loss of extending from `v` up to its ancestor `a`.
    pub fn loss(&self, v: Vertex, a: Vertex) -> Flow {
        self.cum_loss(v) - self.cum_loss(a)
    }

    /// Ancestor of `v` at depth `d`, if `d <= depth(v)`.
    pub fn level_ancestor(&self, mut v: Vertex, d: u32) -> Option<Vertex> {
        let dv = self.depth(v);
        if d > dv {
            return None;
        }
        let mut climb = dv - d;
        let mut k = 0;
        while climb > 0 {
            if climb & 1 == 1 {
                v = self.jump[k][v as usize];
            }
            climb >>= 1;
            k += 1;
        }
        Some(v)
    }

    /// Highest ancestor `a` of `v` (possibly `v`) with `loss(v, a) < excess`.
    /// `excess` must be positive.
    pub fn extend(&self, v: Vertex, excess: Flow) -> Vertex {
        debug_assert!(excess > 0);
        let mut x = v;
        for k in (0..self.jump.len()).rev() {
            let a = self.jump[k][x as usize];
            if a != NONE && self.loss(v, a) < excess {
                x = a;
            }
        }
        x
    }

    /// Deepest `w` on the path from `r` up to (excluding) its ancestor `y`
    /// such that the forest path `y .. w` is safe, i.e.
    /// `link_flow(w) - loss(parent(w), y) > 0`. Returns `None` when `y` is
    /// not a proper ancestor of `r`.
    pub fn deepest_safe_below(&self, y: Vertex, r: Vertex) -> Option<Vertex> {
        let dy = self.depth(y);
        if self.depth(r) <= dy || self.level_ancestor(r, dy) != Some(y) {
            return None;
        }
        let safe = |w: Vertex| {
            let p = self.parent[w as usize];
            self.link_flow(w) - self.loss(p, y) > 0
        };
        if safe(r) {
            return Some(r);
        }
        // climb to the shallowest unsafe node below y
        let mut x = r;
        for k in (0..self.jump.len()).rev() {
            let a = self.jump[k][x as usize];
            if a != NONE && self.depth(a) > dy && !safe(a) {
                x = a;
            }
        }
        Some(self.parent[x as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: u32, flows: &[(u32, u32, i64)]) -> FlowGraph {
        FlowGraph::new(n as usize, flows.iter().copied()).unwrap()
    }

    #[test]
    fn chain_forest_depths_and_losses() {
        // 0 -> 1 -> 2 -> 3 with a side input 4 -> 2 and side output 2 -> 5
        let g = chain(6, &[(0, 1, 5), (1, 2, 5), (4, 2, 2), (2, 3, 4), (2, 5, 3)]);
        let idx = MaxEdgeIndex::new(&g);
        let (fi, fo) = build_extension_forests(&g, &idx);
        assert_eq!(fi.parent(3), Some(2));
        assert_eq!(fi.parent(2), Some(1));
        assert_eq!(fi.depth(3), 3);
        assert_eq!(fi.loss(2, 1), 2);
        assert_eq!(fi.loss(3, 0), 2);
        assert_eq!(fi.level_ancestor(3, 1), Some(1));
        assert_eq!(fi.level_ancestor(3, 4), None);
        assert_eq!(fi.extend(3, 3), 0);
        assert_eq!(fi.extend(2, 2), 2);
        assert_eq!(fo.parent(0), Some(1));
        assert_eq!(fo.parent(2), Some(3));
        assert_eq!(fo.loss(1, 3), 3);
        assert_eq!(fo.extend(1, 3), 2);
        assert!(fi.is_leaf(3) && !fi.is_leaf(2));
    }

    #[test]
    fn deepest_safe_below_on_a_spine() {
        let g = chain(6, &[(0, 1, 5), (1, 2, 5), (4, 2, 2), (2, 3, 4), (2, 5, 3)]);
        let idx = MaxEdgeIndex::new(&g);
        let (fi, _) = build_extension_forests(&g, &idx);
        assert_eq!(fi.deepest_safe_below(0, 3), Some(3));
        assert_eq!(fi.deepest_safe_below(3, 3), None);
        assert_eq!(fi.deepest_safe_below(4, 3), None);
    }
}
