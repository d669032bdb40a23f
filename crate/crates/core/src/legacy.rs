//! The decomposition-based pipeline: candidate flow decomposition, two-pointer
//! scan of every decomposition path, then the subpath filter.
//!
//! Both outputs hold the whole intermediate result in memory before
//! filtering, which is what makes this pipeline expensive on large graphs.

use alloc::vec::Vec;

use crate::graph::FlowGraph;
use crate::optenum::{sort_paths, ConciseRecord, Interval};
use crate::safety::{candidate_flow_decomposition, scan_windows, WeightedSafePath};
use crate::subpath::{contained_mask, filter_subpaths};

/// Raw maximal safe paths (at least two edges), in canonical order.
pub fn rawrep(g: &FlowGraph) -> Vec<WeightedSafePath> {
    let decomposition = candidate_flow_decomposition(g);
    let mut candidates = Vec::new();
    for (path, _) in &decomposition.paths {
        scan_windows(g, path, |l, r, excess| {
            if r - l >= 2 {
                candidates.push((path[l..=r].to_vec(), excess));
            }
        });
    }
    let mut out: Vec<WeightedSafePath> = filter_subpaths(candidates)
        .into_iter()
        .map(|(vertices, excess)| WeightedSafePath { vertices, excess })
        .collect();
    sort_paths(g, &mut out);
    out
}

/// Concise output of the decomposition pipeline: the surviving windows of
/// each decomposition path, with overlapping windows (sharing at least one
/// vertex) merged onto one carrier.
pub fn conrep(g: &FlowGraph) -> Vec<ConciseRecord> {
    let decomposition = candidate_flow_decomposition(g);
    // (decomposition path, left position, right position, excess)
    let mut windows = Vec::new();
    for (k, (path, _)) in decomposition.paths.iter().enumerate() {
        scan_windows(g, path, |l, r, excess| {
            if r - l >= 2 {
                windows.push((k, l, r, excess));
            }
        });
    }
    let slices = windows.iter().map(|&(k, l, r, _)| &decomposition.paths[k].0[l..=r]);
    let keep = contained_mask(slices);

    let mut records = Vec::new();
    let mut current: Option<(usize, usize, usize, Vec<Interval>)> = None;
    let flush = |cur: Option<(usize, usize, usize, Vec<Interval>)>, records: &mut Vec<ConciseRecord>| {
        if let Some((k, start, end, intervals)) = cur {
            let carrier = decomposition.paths[k].0[start..=end].to_vec();
            records.push(ConciseRecord { carrier, intervals });
        }
    };
    for (&(k, l, r, excess), kept) in windows.iter().zip(keep) {
        if !kept {
            continue;
        }
        let path = &decomposition.paths[k].0;
        let interval = Interval { left: path[l], right: path[r], flow: excess };
        match &mut current {
            Some((ck, _, end, intervals)) if *ck == k && l <= *end => {
                *end = r;
                intervals.push(interval);
            }
            _ => {
                flush(current.take(), &mut records);
                current = Some((k, l, r, alloc::vec![interval]));
            }
        }
    }
    flush(current, &mut records);
    records
}
