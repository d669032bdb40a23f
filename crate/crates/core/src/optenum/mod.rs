//! Output-sensitive enumeration of maximal safe paths.
//!
//! [`opt_raw_enumerate`] and [`opt_concise`] sweep the graph in topological
//! order keeping, for the current vertex, a reversed trie of all left-maximal
//! safe paths that end there. [`opt_rep_enumerate`] instead reports each path
//! as a representative edge plus its two endpoints, located by binary search
//! over the forests of unique maximum in/out edges.

mod forest;
mod optimal;
mod sweep;

use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Flow, FlowGraph, Vertex};
use crate::safety::WeightedSafePath;

pub use forest::{build_extension_forests, ExtensionForest};
pub use optimal::{
    expand_optimal, is_left_extendable, is_right_extendable, opt_rep_enumerate, opt_rep_visit, OptimalRecord,
};
pub use sweep::{opt_concise, opt_concise_visit, opt_raw_enumerate, opt_raw_visit, SweepStats};

/// A safe subpath of a carrier, named by its end vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub left: Vertex,
    pub right: Vertex,
    pub flow: Flow,
}

/// A carrier path with the safe paths it contains, ordered by left end.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConciseRecord {
    pub carrier: Vec<Vertex>,
    pub intervals: Vec<Interval>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecordError {
    EndpointNotOnCarrier { left: Vertex, right: Vertex },
    BadAncestor { vertex: Vertex },
    FlowMismatch { stated: Flow, actual: Flow },
    NotAnEdge { from: Vertex, to: Vertex },
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordError::EndpointNotOnCarrier { left, right } => {
                write!(f, "interval ({left},{right}) is not an ordered sub-range of its carrier")
            }
            RecordError::BadAncestor { vertex } => {
                write!(f, "endpoint {vertex} is not reachable along the max-edge forest")
            }
            RecordError::FlowMismatch { stated, actual } => {
                write!(f, "record states flow {stated} but the path has excess {actual}")
            }
            RecordError::NotAnEdge { from, to } => write!(f, "({from},{to}) is not an edge"),
        }
    }
}

impl core::error::Error for RecordError {}

impl ConciseRecord {
    /// Carrier positions `(left, right)` of every interval.
    pub fn positions(&self) -> Result<Vec<(usize, usize)>, RecordError> {
        let find = |v: Vertex, from: usize| {
            let c = &self.carrier;
            c.get(from..)
                .and_then(|t| t.iter().position(|&x| x == v))
                .map(|i| i + from)
                .or_else(|| c.iter().position(|&x| x == v))
        };
        // intervals are usually ordered along the carrier, so both ends are
        // searched from the previous interval's ends first
        let (mut cl, mut cr) = (0, 0);
        self.intervals
            .iter()
            .map(|iv| {
                let bad = RecordError::EndpointNotOnCarrier { left: iv.left, right: iv.right };
                let l = find(iv.left, cl).ok_or(bad.clone())?;
                let r = find(iv.right, cr.max(l)).ok_or(bad.clone())?;
                if r <= l {
                    return Err(bad);
                }
                (cl, cr) = (l, r);
                Ok((l, r))
            })
            .collect()
    }
}

/// Materializes every interval as a path slice of its carrier.
pub fn expand_concise(records: &[ConciseRecord]) -> Result<Vec<WeightedSafePath>, RecordError> {
    let mut out = Vec::new();
    for rec in records {
        for ((l, r), iv) in rec.positions()?.into_iter().zip(&rec.intervals) {
            out.push(WeightedSafePath { vertices: rec.carrier[l..=r].to_vec(), excess: iv.flow });
        }
    }
    Ok(out)
}

/// Canonical order: topological position of the first vertex, then length,
/// then the vertex sequence.
pub fn sort_paths(g: &FlowGraph, paths: &mut [WeightedSafePath]) {
    paths.sort_by(|a, b| {
        let key = |p: &WeightedSafePath| (p.vertices.first().map(|&v| g.position(v)), p.vertices.len());
        key(a).cmp(&key(b)).then_with(|| a.vertices.cmp(&b.vertices))
    });
}
