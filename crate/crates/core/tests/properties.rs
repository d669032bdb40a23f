mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use safeflow_core::graph::{FlowGraph, MaxEdgeIndex, Vertex};
use safeflow_core::optenum::{
    build_extension_forests, opt_concise, opt_concise_visit, opt_raw_visit, opt_rep_enumerate,
};
use safeflow_core::randgen::{generate, GenParams, Model};
use safeflow_core::safety::{
    candidate_flow_decomposition, delta_extend, enumerate_flow_decompositions, excess_flow,
    is_safe, is_safe_by_definition, maximal_safe_paths_bruteforce, source_sink_paths, Side,
    DECOMPOSITION_MAX_EDGES, DECOMPOSITION_MAX_FLOW,
};

/// Superposed paths from sources `0..3` to sinks `n-3..n`.
fn graph(max_n: u32, max_paths: usize, max_flow: i64) -> impl Strategy<Value = FlowGraph> {
    (8u32..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(
            (0..3u32, n - 3..n, prop::collection::btree_set(3..n - 3, 0..=5usize), 1..=max_flow),
            1..=max_paths,
        )
        .prop_map(move |paths| {
            let mut edges = Vec::new();
            for (s, t, inner, f) in paths {
                let v: Vec<u32> = std::iter::once(s).chain(inner).chain(std::iter::once(t)).collect();
                edges.extend(v.windows(2).map(|w| (w[0], w[1], f)));
            }
            FlowGraph::new(n as usize, edges).unwrap()
        })
    })
}

/// Every path of the graph with at least one edge.
fn all_paths(g: &FlowGraph) -> Vec<Vec<Vertex>> {
    let mut out = std::collections::BTreeSet::new();
    for p in source_sink_paths(g) {
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                out.insert(p[i..=j].to_vec());
            }
        }
    }
    out.into_iter().collect()
}

fn superimpose(paths: &[(Vec<Vertex>, i64)]) -> BTreeMap<(Vertex, Vertex), i64> {
    let mut m = BTreeMap::new();
    for (p, f) in paths {
        for w in p.windows(2) {
            *m.entry((w[0], w[1])).or_insert(0) += f;
        }
    }
    m
}

fn edge_map(g: &FlowGraph) -> BTreeMap<(Vertex, Vertex), i64> {
    g.edges().iter().map(|e| ((e.from, e.to), e.flow)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn safety_matches_definition(g in graph(9, 3, 5)) {
        prop_assume!(g.m() <= DECOMPOSITION_MAX_EDGES && g.total_flow() <= DECOMPOSITION_MAX_FLOW);
        let decomps = enumerate_flow_decompositions(&g).unwrap();
        prop_assert!(!decomps.is_empty());
        for p in all_paths(&g) {
            prop_assert_eq!(is_safe(&g, &p).unwrap(), is_safe_by_definition(&decomps, &p), "{:?}", p);
        }
        if g.is_funnel() {
            prop_assert_eq!(decomps.len(), 1);
        }
    }

    #[test]
    fn extension_loss_matches_recomputed_excess(g in graph(20, 6, 20)) {
        for p in all_paths(&g) {
            let base = excess_flow(&g, &p).unwrap();
            let (first, last) = (p[0], *p.last().unwrap());
            for e in g.in_edges(first) {
                let mut q = vec![e.from];
                q.extend(&p);
                let d = delta_extend(&g, &p, Side::Left, e.from, first).unwrap();
                prop_assert_eq!(excess_flow(&g, &q).unwrap(), base + d);
                prop_assert!(d <= 0);
            }
            for e in g.out_edges(last) {
                let mut q = p.clone();
                q.push(e.to);
                let d = delta_extend(&g, &p, Side::Right, last, e.to).unwrap();
                prop_assert_eq!(excess_flow(&g, &q).unwrap(), base + d);
            }
        }
    }

    #[test]
    fn candidate_decomposition_superimposes(g in graph(24, 8, 1000)) {
        let d = candidate_flow_decomposition(&g);
        prop_assert!(d.paths.len() <= g.m());
        prop_assert!(d.paths.iter().all(|(p, f)| *f > 0 && g.is_source(p[0]) && g.is_sink(*p.last().unwrap())));
        prop_assert_eq!(superimpose(&d.paths), edge_map(&g));
    }

    #[test]
    fn forest_searches_match_naive_walks(g in graph(24, 8, 30), excess in 1i64..60) {
        let idx = MaxEdgeIndex::new(&g);
        let (fi, fo) = build_extension_forests(&g, &idx);
        for forest in [&fi, &fo] {
            for v in 0..g.n() as Vertex {
                let mut x = v;
                while let Some(p) = forest.parent(x) {
                    if forest.loss(v, p) >= excess { break; }
                    x = p;
                }
                prop_assert_eq!(forest.extend(v, excess), x);
                for d in 0..=forest.depth(v) + 1 {
                    let mut a = Some(v);
                    for _ in d..forest.depth(v) { a = a.and_then(|a| forest.parent(a)); }
                    let want = if d > forest.depth(v) { None } else { a };
                    prop_assert_eq!(forest.level_ancestor(v, d), want);
                }
            }
        }
        // deepest safe node below each proper ancestor, on in-forest spines
        for r in 0..g.n() as Vertex {
            let mut y = fi.parent(r);
            while let Some(yy) = y {
                let mut spine = vec![r];
                let mut x = r;
                while fi.parent(x) != Some(yy) { x = fi.parent(x).unwrap(); spine.push(x); }
                spine.push(yy);
                spine.reverse();
                let want = (1..spine.len())
                    .rev()
                    .find(|&i| excess_flow(&g, &spine[..=i]).unwrap() > 0)
                    .map(|i| spine[i]);
                prop_assert_eq!(fi.deepest_safe_below(yy, r), want);
                y = fi.parent(yy);
            }
        }
    }

    #[test]
    fn concise_records_are_well_formed(g in graph(24, 8, 20)) {
        let idx = MaxEdgeIndex::new(&g);
        for rec in opt_concise(&g, &idx) {
            prop_assert!(excess_flow(&g, &rec.carrier).is_ok());
            let pos = rec.positions().unwrap();
            prop_assert!(!pos.is_empty());
            prop_assert_eq!(pos[0].0, 0);
            prop_assert_eq!(pos.last().unwrap().1, rec.carrier.len() - 1);
            for w in pos.windows(2) {
                prop_assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1 && w[1].0 <= w[0].1);
            }
            for ((l, r), iv) in pos.iter().zip(&rec.intervals) {
                prop_assert_eq!(excess_flow(&g, &rec.carrier[*l..=*r]).unwrap(), iv.flow);
                prop_assert!(iv.flow > 0);
            }
        }
    }

    #[test]
    fn trivial_flag_matches_edge_classes(g in graph(24, 8, 20)) {
        let idx = MaxEdgeIndex::new(&g);
        let (fi, fo) = build_extension_forests(&g, &idx);
        for rec in opt_rep_enumerate(&g, &idx, &fi, &fo) {
            let p = safeflow_core::optenum::expand_optimal(&g, &fi, &fo, &rec).unwrap();
            let all_unique_in = p.vertices.windows(2).all(|w| {
                idx.unique_max_in(w[1]).is_some_and(|m| m.far == w[0])
            });
            prop_assert_eq!(rec.trivial, all_unique_in);
            if rec.trivial {
                prop_assert_eq!(rec.right, rec.edge_right);
            } else {
                // first edge that is not a unique max in-edge
                let i = p.vertices.windows(2).position(|w| {
                    !idx.unique_max_in(w[1]).is_some_and(|m| m.far == w[0])
                }).unwrap();
                prop_assert_eq!((p.vertices[i], p.vertices[i + 1]), (rec.edge_left, rec.edge_right));
            }
        }
    }

    #[test]
    fn generator_ledger_superimposes(
        model in prop_oneof![Just(Model::Uniform), Just(Model::PowerLaw), Just(Model::Improved)],
        n in 2usize..200, k in 1usize..20, d in 2usize..30, p in 0.0f64..=1.0, seed in any::<u64>(),
    ) {
        let params = GenParams { n, k, d: d.min(n), p, seed, ..GenParams::default() };
        let a = generate(model, &params).unwrap();
        prop_assert_eq!(superimpose(&a.decomposition()), edge_map(&a.graph));
        let b = generate(model, &params).unwrap();
        prop_assert_eq!(a.graph.edges(), b.graph.edges());
        for path in &a.paths {
            prop_assert_eq!(path.waypoints.len(), params.d);
            prop_assert!(path.waypoints.windows(2).all(|w| w[0] < w[1]));
            prop_assert!((1..=1000).contains(&path.flow));
        }
    }
}

#[test]
fn funnels_have_only_decomposition_paths() {
    for seed in 0..100u64 {
        let (model, p) = if seed % 2 == 0 { (Model::Uniform, 0.5) } else { (Model::Improved, 1.0) };
        let gen = generate(model, &GenParams { n: 40, k: 1 + (seed as usize % 2) * 4, d: 6, p, seed, ..GenParams::default() })
            .unwrap();
        let g = &gen.graph;
        assert!(g.is_funnel());
        let mut want: Vec<Vec<Vertex>> = source_sink_paths(g).into_iter().filter(|p| p.len() >= 3).collect();
        want.sort();
        let mut got: Vec<Vec<Vertex>> =
            maximal_safe_paths_bruteforce(g).unwrap().into_iter().map(|p| p.vertices).collect();
        got.sort();
        assert_eq!(got, want, "seed {seed}");
        for set in common::five_ways(g) {
            assert_eq!(set.into_iter().map(|p| p.vertices).collect::<Vec<_>>(), got);
        }
    }
}

#[test]
fn power_law_prefers_high_degree_vertices() {
    let params = GenParams { n: 200, k: 1000, d: 6, seed: 7, ..GenParams::default() };
    let gen = generate(Model::PowerLaw, &params).unwrap();
    let mut hits = vec![0usize; params.n];
    for p in &gen.paths {
        for &v in &p.waypoints[1..p.waypoints.len() - 1] {
            hits[v as usize] += 1;
        }
    }
    let mut counts: Vec<usize> = hits[1..params.n - 1].to_vec();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let decile = counts.len() / 10;
    let top: usize = counts[..decile].iter().sum();
    let total: usize = counts.iter().sum();
    assert!(top * 10 > total * 2, "top decile got {top} of {total}");

    let uni = generate(Model::Uniform, &params).unwrap();
    let mut hits = vec![0usize; params.n];
    for p in &uni.paths {
        for &v in &p.waypoints[1..p.waypoints.len() - 1] {
            hits[v as usize] += 1;
        }
    }
    let mut counts: Vec<usize> = hits[1..params.n - 1].to_vec();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let top_uniform: usize = counts[..decile].iter().sum();
    assert!(top > top_uniform);
}

#[test]
fn safe_paths_lengthen_with_funnel_probability() {
    let mut means = Vec::new();
    for p in [0.0, 0.5, 0.81, 1.0] {
        let (mut len, mut count) = (0usize, 0usize);
        for seed in 0..20 {
            let gen = generate(Model::Improved, &GenParams { n: 400, k: 10, d: 20, p, seed, ..GenParams::default() })
                .unwrap();
            let idx = MaxEdgeIndex::new(&gen.graph);
            opt_raw_visit(&gen.graph, &idx, |path, _| {
                len += path.len();
                count += 1;
            });
        }
        means.push(len as f64 / count as f64);
    }
    assert!(means.windows(2).all(|w| w[0] < w[1]), "{means:?}");
}

#[test]
fn sweep_work_is_linear_in_input_plus_output() {
    for seed in 0..20 {
        let gen = generate(Model::Improved, &GenParams { n: 3000, k: 30, d: 100, seed, ..GenParams::default() }).unwrap();
        let g = &gen.graph;
        let idx = MaxEdgeIndex::new(g);
        let mut out_len = 0u64;
        let stats = opt_raw_visit(g, &idx, |p, _| out_len += p.len() as u64);
        let bound = 4 * (g.n() + g.m()) as u64 + 2 * out_len;
        assert!(stats.nodes_created + stats.node_steps <= bound, "{stats:?} vs {bound}");
        let cstats = opt_concise_visit(g, &idx, |_| {});
        assert!(cstats.nodes_created + cstats.node_steps <= bound, "{cstats:?} vs {bound}");
    }
}
