//! Removal of duplicate and contained paths with an Aho-Corasick automaton
//! over the vertex alphabet.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{Vertex, NONE};

type NodeId = u32;

struct Automaton {
    /// Sorted `(symbol, child)` lists.
    children: Vec<Vec<(Vertex, NodeId)>>,
    fail: Vec<NodeId>,
    /// Nearest proper suffix state that ends a pattern.
    dict: Vec<NodeId>,
    /// First pattern ending here, or NONE.
    terminal: Vec<u32>,
}

impl Automaton {
    fn child(&self, node: NodeId, symbol: Vertex) -> Option<NodeId> {
        let kids = &self.children[node as usize];
        kids.binary_search_by_key(&symbol, |&(s, _)| s).ok().map(|i| kids[i].1)
    }

    fn build<'a>(patterns: impl Iterator<Item = &'a [Vertex]>) -> (Automaton, Vec<NodeId>) {
        let mut a = Automaton {
            children: vec![Vec::new()],
            fail: vec![0],
            dict: vec![NONE],
            terminal: vec![NONE],
        };
        let mut ends = Vec::new();
        for (id, p) in patterns.enumerate() {
            let mut node = 0;
            for &s in p {
                node = match a.child(node, s) {
                    Some(c) => c,
                    None => {
                        let c = a.children.len() as NodeId;
                        a.children.push(Vec::new());
                        a.fail.push(0);
                        a.dict.push(NONE);
                        a.terminal.push(NONE);
                        let kids = &mut a.children[node as usize];
                        let at = kids.partition_point(|&(x, _)| x < s);
                        kids.insert(at, (s, c));
                        c
                    }
                };
            }
            if a.terminal[node as usize] == NONE {
                a.terminal[node as usize] = id as u32;
            }
            ends.push(node);
        }

        let mut queue: VecDeque<NodeId> = a.children[0].iter().map(|&(_, c)| c).collect();
        while let Some(node) = queue.pop_front() {
            for i in 0..a.children[node as usize].len() {
                let (s, c) = a.children[node as usize][i];
                let mut f = a.fail[node as usize];
                let target = loop {
                    if let Some(t) = a.child(f, s) {
                        break t;
                    }
                    if f == 0 {
                        break 0;
                    }
                    f = a.fail[f as usize];
                };
                a.fail[c as usize] = target;
                a.dict[c as usize] = if a.terminal[target as usize] != NONE {
                    target
                } else {
                    a.dict[target as usize]
                };
                queue.push_back(c);
            }
        }
        (a, ends)
    }

    fn step(&self, mut node: NodeId, s: Vertex) -> NodeId {
        loop {
            if let Some(c) = self.child(node, s) {
                return c;
            }
            if node == 0 {
                return 0;
            }
            node = self.fail[node as usize];
        }
    }
}

/// Drops every path that equals an earlier path or occurs as a contiguous
/// subsequence of another path, keeping the payload of the first occurrence.
/// Survivors keep their input order.
pub fn filter_subpaths<T>(paths: Vec<(Vec<Vertex>, T)>) -> Vec<(Vec<Vertex>, T)> {
    let keep = contained_mask(paths.iter().map(|(p, _)| p.as_slice()));
    paths
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

/// `true` for every pattern that survives [`filter_subpaths`].
pub fn contained_mask<'a>(patterns: impl Iterator<Item = &'a [Vertex]> + Clone) -> Vec<bool> {
    let (a, ends) = Automaton::build(patterns.clone());
    let mut contained = vec![false; a.children.len()];
    for (id, p) in patterns.enumerate() {
        if a.terminal[ends[id] as usize] != id as u32 {
            // duplicate; its terminal belongs to the first copy
            continue;
        }
        let mut node = 0;
        for (i, &s) in p.iter().enumerate() {
            node = a.step(node, s);
            let mut t = if a.terminal[node as usize] != NONE { node } else { a.dict[node as usize] };
            while t != NONE {
                let own = i + 1 == p.len() && t == ends[id];
                if !own {
                    if contained[t as usize] {
                        // everything further down this suffix chain was
                        // marked together with t
                        break;
                    }
                    contained[t as usize] = true;
                }
                t = a.dict[t as usize];
            }
        }
    }
    ends.iter()
        .enumerate()
        .map(|(id, &end)| a.terminal[end as usize] == id as u32 && !contained[end as usize])
        .collect()
}
