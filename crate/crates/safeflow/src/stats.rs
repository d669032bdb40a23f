//! Dataset statistics of the representations: safe path and carrier
//! lengths, how intervals sit on their carriers, and the share of
//! non-trivial optimal records.

use std::collections::BTreeSet;
use std::io::Write;

use safeflow_core::graph::{FlowGraph, MaxEdgeIndex};
use safeflow_core::optenum::{build_extension_forests, opt_concise_visit, opt_raw_visit, opt_rep_visit};
use safeflow_core::safety::candidate_flow_decomposition;

/// Pooled counts over a dataset; ratios are derived on output.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StatCounts {
    pub graphs: u64,
    pub vertices: u64,
    pub edges: u64,
    pub funnel_vertices: u64,
    pub decomposition_paths: u64,
    pub safe_paths: u64,
    /// Sum of safe path lengths, in vertices.
    pub safe_path_vertices: u64,
    pub carriers: u64,
    pub single_carriers: u64,
    pub carrier_vertices: u64,
    pub intervals: u64,
    /// Intervals starting at the carrier's first or ending at its last vertex.
    pub start_end_intervals: u64,
    /// Consecutive interval pairs, and those where the second starts where
    /// the first ends.
    pub interval_pairs: u64,
    pub successive_pairs: u64,
    pub optimal_records: u64,
    pub nontrivial_records: u64,
    pub nontrivial_edges: u64,
}

impl StatCounts {
    pub fn add_graph(&mut self, g: &FlowGraph) {
        let idx = MaxEdgeIndex::new(g);
        self.graphs += 1;
        self.vertices += g.n() as u64;
        self.edges += g.m() as u64;
        self.funnel_vertices +=
            (0..g.n() as u32).filter(|&v| g.indegree(v) <= 1 || g.outdegree(v) <= 1).count() as u64;
        self.decomposition_paths += candidate_flow_decomposition(g).paths.len() as u64;

        opt_raw_visit(g, &idx, |p, _| {
            self.safe_paths += 1;
            self.safe_path_vertices += p.len() as u64;
        });
        opt_concise_visit(g, &idx, |r| {
            let (first, last) = (r.carrier[0], *r.carrier.last().unwrap());
            self.carriers += 1;
            self.carrier_vertices += r.carrier.len() as u64;
            self.single_carriers += (r.intervals.len() == 1) as u64;
            self.intervals += r.intervals.len() as u64;
            for iv in &r.intervals {
                self.start_end_intervals += (iv.left == first || iv.right == last) as u64;
            }
            for w in r.intervals.windows(2) {
                self.interval_pairs += 1;
                self.successive_pairs += (w[0].right == w[1].left) as u64;
            }
        });
        let (fi, fo) = build_extension_forests(g, &idx);
        let mut edges = BTreeSet::new();
        opt_rep_visit(g, &idx, &fi, &fo, |r| {
            self.optimal_records += 1;
            if !r.trivial {
                self.nontrivial_records += 1;
                edges.insert((r.edge_left, r.edge_right));
            }
        });
        self.nontrivial_edges += edges.len() as u64;
    }

    pub fn summary(&self) -> StatSummary {
        let pct = |a: u64, b: u64| if b == 0 { 0.0 } else { 100.0 * a as f64 / b as f64 };
        let avg = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        StatSummary {
            graphs: self.graphs,
            avg_s_len: avg(self.safe_path_vertices, self.safe_paths),
            pct_single: pct(self.single_carriers, self.carriers),
            pct_start_end: pct(self.start_end_intervals, self.intervals),
            pct_successive: pct(self.successive_pairs, self.interval_pairs),
            avg_indices: avg(self.intervals, self.carriers),
            avg_c_len: avg(self.carrier_vertices, self.carriers),
            pct_nontrivial: pct(self.nontrivial_records, self.optimal_records),
            avg_indices_opt: avg(self.nontrivial_records, self.nontrivial_edges),
            avg_complexity: avg(self.decomposition_paths, self.graphs),
            funnel_probability: avg(self.funnel_vertices, self.vertices),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatSummary {
    pub graphs: u64,
    pub avg_s_len: f64,
    pub pct_single: f64,
    pub pct_start_end: f64,
    pub pct_successive: f64,
    pub avg_indices: f64,
    pub avg_c_len: f64,
    pub pct_nontrivial: f64,
    pub avg_indices_opt: f64,
    pub avg_complexity: f64,
    pub funnel_probability: f64,
}

pub const STATS_HEADER: [&str; 12] = [
    "dataset",
    "graphs",
    "avg_s_len",
    "pct_single",
    "pct_start_end",
    "pct_successive",
    "avg_indices",
    "avg_c_len",
    "pct_nontrivial",
    "avg_indices_opt",
    "avg_complexity",
    "funnel_probability",
];

/// Statistics of a set of graphs, optionally leaving out funnels.
pub fn dataset_statistics<'a>(graphs: impl IntoIterator<Item = &'a FlowGraph>, skip_funnels: bool) -> StatCounts {
    let mut c = StatCounts::default();
    for g in graphs {
        if !(skip_funnels && g.is_funnel()) {
            c.add_graph(g);
        }
    }
    c
}

pub fn write_stats_csv(w: impl Write, rows: &[(String, StatSummary)], header: bool) -> csv::Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    if header {
        out.write_record(STATS_HEADER)?;
    }
    for (name, s) in rows {
        let f = |x: f64| format!("{x:.4}");
        out.write_record([
            name.clone(),
            s.graphs.to_string(),
            f(s.avg_s_len),
            f(s.pct_single),
            f(s.pct_start_end),
            f(s.pct_successive),
            f(s.avg_indices),
            f(s.avg_c_len),
            f(s.pct_nontrivial),
            f(s.avg_indices_opt),
            f(s.avg_complexity),
            f(s.funnel_probability),
        ])?;
    }
    out.flush()?;
    Ok(())
}
