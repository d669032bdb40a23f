//! Cross-checks every algorithm and serialization on the same graphs.

use std::collections::BTreeSet;

use rayon::prelude::*;
use safeflow_core::graph::{FlowGraph, MaxEdgeIndex};
use safeflow_core::optenum::{
    build_extension_forests, expand_concise, expand_optimal, opt_concise, opt_raw_enumerate, opt_rep_enumerate,
};
use safeflow_core::safety::{maximal_safe_paths_bruteforce, BRUTEFORCE_MAX_VERTICES};
use safeflow_core::{legacy, Flow, Vertex, WeightedSafePath};

use crate::codec::{parse_concise, parse_optimal, Encoder, OptimalContext, Style};
use crate::format::GraphBlock;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub graph: String,
    pub check: String,
    pub witness: String,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "graph `{}`: {}: {}", self.graph, self.check, self.witness)
    }
}

type PathSet = BTreeSet<(Vec<Vertex>, Flow)>;

fn as_set(paths: impl IntoIterator<Item = WeightedSafePath>) -> PathSet {
    paths.into_iter().map(|p| (p.vertices, p.excess)).collect()
}

/// `Err` names the shortest path that only one side has.
pub fn compare_sets(expected: &PathSet, got: &PathSet) -> Result<(), String> {
    let describe = |(p, f): &(Vec<Vertex>, Flow)| {
        let vs: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        format!("{} (excess {f})", vs.join(" "))
    };
    let missing = expected.difference(got).min_by_key(|(p, _)| p.len());
    let extra = got.difference(expected).min_by_key(|(p, _)| p.len());
    match (missing, extra) {
        (None, None) => Ok(()),
        (Some(m), None) => Err(format!("missing {}", describe(m))),
        (None, Some(x)) => Err(format!("unexpected {}", describe(x))),
        (Some(m), Some(x)) if m.0.len() <= x.0.len() => Err(format!("missing {}", describe(m))),
        (_, Some(x)) => Err(format!("unexpected {}", describe(x))),
    }
}

/// Runs all algorithms on `g`, compares their path sets (against the
/// brute-force oracle when the graph is small enough) and checks that every
/// serialization parses back to the records it came from.
pub fn check_graph(g: &FlowGraph) -> Result<(), (String, String)> {
    let idx = MaxEdgeIndex::new(g);
    let (fi, fo) = build_extension_forests(g, &idx);
    let concise = opt_concise(g, &idx);
    let optimal = opt_rep_enumerate(g, &idx, &fi, &fo);
    let old_concise = legacy::conrep(g);

    let fail = |check: &str, w: String| (check.to_string(), w);
    let reference = if g.n() <= BRUTEFORCE_MAX_VERTICES {
        ("bruteforce", as_set(maximal_safe_paths_bruteforce(g).map_err(|e| fail("bruteforce", e.to_string()))?))
    } else {
        ("optrawrep", as_set(opt_raw_enumerate(g, &idx)))
    };
    let expanded_opt = optimal
        .iter()
        .map(|r| expand_optimal(g, &fi, &fo, r))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| fail("optrep expansion", e.to_string()))?;
    let variants: [(&str, PathSet); 5] = [
        ("rawrep", as_set(legacy::rawrep(g))),
        ("conrep", as_set(expand_concise(&old_concise).map_err(|e| fail("conrep", e.to_string()))?)),
        ("optrawrep", as_set(opt_raw_enumerate(g, &idx))),
        ("optconrep", as_set(expand_concise(&concise).map_err(|e| fail("optconrep", e.to_string()))?)),
        ("optrep", as_set(expanded_opt)),
    ];
    for (name, set) in &variants {
        compare_sets(&reference.1, set).map_err(|w| fail(&format!("{name} vs {}", reference.0), w))?;
    }

    let ctx = OptimalContext { graph: g, index: &idx };
    let mut tokens = [0u64; 2];
    for (i, style) in [Style::Plain, Style::Compact].into_iter().enumerate() {
        let mut enc = Encoder::new(Vec::new());
        for r in &concise {
            enc.concise(r, style).map_err(|e| fail("concise encode", e.to_string()))?;
        }
        tokens[i] = enc.report().tokens;
        let text = String::from_utf8(enc.into_inner()).expect("utf-8 output");
        let back = parse_concise(&text, style).map_err(|e| fail("concise parse", e.to_string()))?;
        if back != concise {
            return Err(fail("concise round trip", format!("{style:?} output parses to different records")));
        }
    }
    if tokens[1] > tokens[0] {
        return Err(fail("concise compaction", format!("{} > {} tokens", tokens[1], tokens[0])));
    }
    for (i, style) in [Style::Plain, Style::Compact].into_iter().enumerate() {
        let mut enc = Encoder::new(Vec::new());
        for r in &optimal {
            enc.optimal(r, style).map_err(|e| fail("optimal encode", e.to_string()))?;
        }
        tokens[i] = enc.report().tokens;
        let text = String::from_utf8(enc.into_inner()).expect("utf-8 output");
        let back = parse_optimal(&text, style, Some(&ctx)).map_err(|e| fail("optimal parse", e.to_string()))?;
        if back != optimal {
            return Err(fail("optimal round trip", format!("{style:?} output parses to different records")));
        }
    }
    if tokens[1] > tokens[0] {
        return Err(fail("optimal compaction", format!("{} > {} tokens", tokens[1], tokens[0])));
    }
    Ok(())
}

/// Thread count from `SAFEFLOW_THREADS`, if set to a positive number.
pub fn thread_limit() -> Option<usize> {
    std::env::var("SAFEFLOW_THREADS").ok()?.parse().ok().filter(|&t| t > 0)
}

/// Checks all graphs in parallel; mismatches come back in input order.
pub fn verify_all(graphs: &[GraphBlock]) -> Vec<Mismatch> {
    let run = || -> Vec<Mismatch> {
        graphs
            .par_iter()
            .filter_map(|b| {
                check_graph(&b.graph)
                    .err()
                    .map(|(check, witness)| Mismatch { graph: b.id.clone(), check, witness })
            })
            .collect()
    };
    match thread_limit() {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_names_the_differing_path() {
        let a: PathSet = [(vec![0, 1, 2], 3), (vec![1, 2, 3, 4], 1)].into_iter().collect();
        let mut b = a.clone();
        assert!(compare_sets(&a, &b).is_ok());
        b.remove(&(vec![0, 1, 2], 3));
        b.insert((vec![0, 1, 2], 2));
        let w = compare_sets(&a, &b).unwrap_err();
        assert_eq!(w, "missing 0 1 2 (excess 3)");
    }
}
