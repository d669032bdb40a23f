//! File formats, serializers and the benchmark harness around
//! `safeflow-core`.

pub mod algo;
pub mod bench;
pub mod codec;
pub mod format;
pub mod mem;
pub mod stats;
pub mod verify;
