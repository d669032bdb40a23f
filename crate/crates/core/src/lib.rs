//! Maximal safe paths of flow decompositions in DAG flow networks.
//!
//! A path is *safe* when it is a subpath of some path in every possible flow
//! decomposition of the graph. Safety is decided by the excess flow of the
//! path (the flow that necessarily traverses all of it), which makes every
//! algorithm here exact integer arithmetic over [`FlowGraph`].
//!
//! The crate offers the same answer in several shapes:
//!
//! * [`legacy`]: candidate decomposition, two-pointer scan and an
//!   Aho-Corasick subpath filter (raw and concise output).
//! * [`optenum::opt_raw_enumerate`]: topological sweep over shared-suffix
//!   tries, output-sensitive raw enumeration.
//! * [`optenum::opt_concise`]: the same sweep producing carrier paths with
//!   interval lists.
//! * [`optenum::opt_rep_enumerate`]: one representative edge plus two
//!   endpoints per path, found by binary search over max-edge forests.
//!
//! [`safety`] carries the brute-force oracles every variant is checked
//! against, and [`randgen`] the random flow-graph families used for fuzzing
//! and scaling runs.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod graph;
pub mod legacy;
pub mod optenum;
pub mod randgen;
pub mod safety;
pub mod subpath;

pub use graph::{Edge, EdgeId, Flow, FlowGraph, GraphError, MaxEdge, MaxEdgeIndex, Vertex};
pub use optenum::{ConciseRecord, Interval, OptimalRecord};
pub use safety::{PathError, WeightedSafePath};
