//! Random flow-graph families built by superimposing `k` source-to-sink
//! paths over vertices `0..n`, where ids are already a topological order.
//!
//! Every path draws from its own ChaCha8 stream (`seed`, stream = path
//! index), so a graph is reproducible from its parameters alone.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Flow, FlowGraph, GraphError, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Uniform,
    PowerLaw,
    Improved,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// Funnel probability, improved model only.
    pub p: f64,
    pub seed: u64,
    pub flow_min: Flow,
    pub flow_max: Flow,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { n: 100, k: 10, d: 10, p: 0.81, seed: 0, flow_min: 1, flow_max: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GenError {
    Params(&'static str),
    Graph(GraphError),
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::Params(msg) => write!(f, "invalid generator parameters: {msg}"),
            GenError::Graph(e) => write!(f, "generated graph rejected: {e}"),
        }
    }
}

impl core::error::Error for GenError {}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.d < 2 {
            return Err(GenError::Params("d must be at least 2"));
        }
        if self.d > self.n {
            return Err(GenError::Params("d must not exceed n"));
        }
        if self.k == 0 {
            return Err(GenError::Params("k must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(GenError::Params("p must lie in [0, 1]"));
        }
        if self.flow_min < 1 || self.flow_max < self.flow_min {
            return Err(GenError::Params("flow range must be non-empty and positive"));
        }
        if self.n > u32::MAX as usize - 1 {
            return Err(GenError::Params("n too large"));
        }
        Ok(())
    }
}

/// One generated path: its chosen vertices and flow. In the improved model
/// `backbone[i]` tells whether the hop from `waypoints[i]` to
/// `waypoints[i + 1]` runs along the backbone instead of a direct edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedPath {
    pub waypoints: Vec<Vertex>,
    pub backbone: Vec<bool>,
    pub flow: Flow,
}

impl GeneratedPath {
    /// The full vertex sequence, with backbone hops expanded.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut out = vec![self.waypoints[0]];
        for (i, w) in self.waypoints.windows(2).enumerate() {
            if self.backbone.get(i).copied().unwrap_or(false) {
                out.extend(w[0] + 1..=w[1]);
            } else {
                out.push(w[1]);
            }
        }
        out
    }
}

/// The generated graph and the paths it was built from. In the improved
/// model the ledger omits the backbone path itself (flow 1 on `0 -> ... ->
/// n-1`); see [`Generated::decomposition`].
#[derive(Clone, Debug)]
pub struct Generated {
    pub graph: FlowGraph,
    pub model: Model,
    pub paths: Vec<GeneratedPath>,
}

impl Generated {
    /// The generating paths as a flow decomposition of the graph.
    pub fn decomposition(&self) -> Vec<(Vec<Vertex>, Flow)> {
        let mut out: Vec<_> = self.paths.iter().map(|p| (p.vertices(), p.flow)).collect();
        if self.model == Model::Improved && self.graph.n() >= 2 {
            out.push(((0..self.graph.n() as Vertex).collect(), 1));
        }
        out
    }
}

pub fn generate(model: Model, params: &GenParams) -> Result<Generated, GenError> {
    match model {
        Model::Uniform => gen_uniform(params),
        Model::PowerLaw => gen_power_law(params),
        Model::Improved => gen_improved(params),
    }
}

fn path_rng(params: &GenParams, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(i as u64);
    rng
}

fn uniform_waypoints(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vertex> {
    let mut inner: Vec<Vertex> = sample(rng, n - 2, d - 2).into_iter().map(|i| i as Vertex + 1).collect();
    inner.sort_unstable();
    let mut w = Vec::with_capacity(d);
    w.push(0);
    w.extend(inner);
    w.push(n as Vertex - 1);
    w
}

fn build(params: &GenParams, model: Model, paths: Vec<GeneratedPath>) -> Result<Generated, GenError> {
    let mut edges: Vec<(Vertex, Vertex, Flow)> = Vec::new();
    // backbone load per edge (i, i + 1), as a difference array
    let mut diff: Vec<Flow> = vec![0; params.n + 1];
    for p in &paths {
        for (i, w) in p.waypoints.windows(2).enumerate() {
            if p.backbone.get(i).copied().unwrap_or(false) {
                diff[w[0] as usize] += p.flow;
                diff[w[1] as usize] -= p.flow;
            } else {
                edges.push((w[0], w[1], p.flow));
            }
        }
    }
    if model == Model::Improved {
        let mut load = 0;
        for (i, d) in diff.iter().enumerate().take(params.n.saturating_sub(1)) {
            load += d;
            edges.push((i as Vertex, i as Vertex + 1, 1 + load));
        }
    }
    let graph = FlowGraph::new(params.n, edges).map_err(GenError::Graph)?;
    Ok(Generated { graph, model, paths })
}

/// Each path is `0`, then `d - 2` distinct internal vertices drawn
/// uniformly and sorted, then `n - 1`.
pub fn gen_uniform(params: &GenParams) -> Result<Generated, GenError> {
    params.validate()?;
    let paths = (0..params.k)
        .map(|i| {
            let mut rng = path_rng(params, i);
            let waypoints = uniform_waypoints(&mut rng, params.n, params.d);
            let flow = rng.random_range(params.flow_min..=params.flow_max);
            GeneratedPath { waypoints, backbone: Vec::new(), flow }
        })
        .collect();
    build(params, Model::Uniform, paths)
}

/// Fenwick tree over `u64` weights with prefix search.
struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(weights: &[u64]) -> Fenwick {
        let mut tree = vec![0u64; weights.len() + 1];
        tree[1..].copy_from_slice(weights);
        for i in 1..tree.len() {
            let j = i + (i & i.wrapping_neg());
            if j < tree.len() {
                tree[j] += tree[i];
            }
        }
        Fenwick { tree }
    }

    fn add(&mut self, i: usize, delta: i128) {
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] = (self.tree[j] as i128 + delta) as u64;
            j += j & j.wrapping_neg();
        }
    }

    fn total(&self) -> u64 {
        let mut j = self.tree.len() - 1;
        let mut s = 0;
        while j > 0 {
            s += self.tree[j];
            j &= j - 1;
        }
        s
    }

    /// Smallest index whose prefix sum exceeds `target`.
    fn find(&self, mut target: u64) -> usize {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

fn degree_weight(deg: u64) -> u64 {
    (deg + 1).pow(3)
}

/// As [`gen_uniform`], but internal vertices are drawn without replacement
/// with weight `(degree + 1)^3`, degrees counting edges of earlier paths.
pub fn gen_power_law(params: &GenParams) -> Result<Generated, GenError> {
    params.validate()?;
    let inner = params.n - 2;
    let mut degree = vec![0u64; inner];
    let mut fen = Fenwick::new(&vec![1u64; inner]);
    let mut paths = Vec::with_capacity(params.k);
    for i in 0..params.k {
        let mut rng = path_rng(params, i);
        let mut chosen = Vec::with_capacity(params.d - 2);
        for _ in 0..params.d - 2 {
            let t = rng.random_range(0..fen.total());
            let j = fen.find(t);
            fen.add(j, -(degree_weight(degree[j]) as i128));
            chosen.push(j);
        }
        for &j in &chosen {
            degree[j] += 2;
            fen.add(j, degree_weight(degree[j]) as i128);
        }
        chosen.sort_unstable();
        let mut waypoints = Vec::with_capacity(params.d);
        waypoints.push(0);
        waypoints.extend(chosen.iter().map(|&j| j as Vertex + 1));
        waypoints.push(params.n as Vertex - 1);
        let flow = rng.random_range(params.flow_min..=params.flow_max);
        paths.push(GeneratedPath { waypoints, backbone: Vec::new(), flow });
    }
    build(params, Model::PowerLaw, paths)
}

/// A backbone `0 -> 1 -> ... -> n-1` of flow 1 plus `k` uniform paths whose
/// hops each follow the backbone with probability `p^2`.
pub fn gen_improved(params: &GenParams) -> Result<Generated, GenError> {
    params.validate()?;
    let q = params.p * params.p;
    let paths = (0..params.k)
        .map(|i| {
            let mut rng = path_rng(params, i);
            let waypoints = uniform_waypoints(&mut rng, params.n, params.d);
            let backbone = (1..waypoints.len()).map(|_| rng.random_bool(q)).collect();
            let flow = rng.random_range(params.flow_min..=params.flow_max);
            GeneratedPath { waypoints, backbone, flow }
        })
        .collect();
    build(params, Model::Improved, paths)
}
