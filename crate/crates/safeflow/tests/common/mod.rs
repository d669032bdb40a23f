#![allow(dead_code)]

use std::path::PathBuf;

use safeflow::codec::{Encoder, Style, TokenReport};
use safeflow::format::{parse_graphs, GraphBlock};
use safeflow_core::{ConciseRecord, Interval, OptimalRecord, Vertex};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// The Fig. 2 example graph; letters a..l are vertices 0..11.
pub fn fig2() -> GraphBlock {
    let text = std::fs::read_to_string(data("example.graph")).unwrap();
    parse_graphs(text.as_bytes()).unwrap().remove(0)
}

pub fn labels(s: &str) -> Vec<Vertex> {
    s.bytes().filter(|b| b.is_ascii_lowercase()).map(|b| (b - b'a') as Vertex).collect()
}

pub fn v(c: char) -> Vertex {
    c as Vertex - 'a' as Vertex
}

pub fn iv(l: char, r: char, flow: i64) -> Interval {
    Interval { left: v(l), right: v(r), flow }
}

/// The old pipeline's concise output for Fig. 2 as published.
pub fn listed_old_concise() -> Vec<ConciseRecord> {
    vec![
        ConciseRecord { carrier: labels("abcdefhij"), intervals: vec![iv('a', 'f', 3), iv('c', 'j', 3)] },
        ConciseRecord { carrier: labels("acdefghijl"), intervals: vec![iv('a', 'j', 3), iv('c', 'l', 3)] },
        ConciseRecord { carrier: labels("hijkl"), intervals: vec![iv('h', 'l', 3)] },
    ]
}

pub fn concise_report(recs: &[ConciseRecord], style: Style) -> (String, TokenReport) {
    let mut e = Encoder::new(Vec::new());
    for r in recs {
        e.concise(r, style).unwrap();
    }
    let rep = e.report();
    (String::from_utf8(e.into_inner()).unwrap(), rep)
}

pub fn optimal_report(recs: &[OptimalRecord], style: Style) -> (String, TokenReport) {
    let mut e = Encoder::new(Vec::new());
    for r in recs {
        e.optimal(r, style).unwrap();
    }
    let rep = e.report();
    (String::from_utf8(e.into_inner()).unwrap(), rep)
}

pub fn raw_report(paths: &[(Vec<Vertex>, i64)]) -> (String, TokenReport) {
    let mut e = Encoder::new(Vec::new());
    for (p, f) in paths {
        e.raw(p, *f).unwrap();
    }
    let rep = e.report();
    (String::from_utf8(e.into_inner()).unwrap(), rep)
}
