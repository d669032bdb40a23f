//! Text serializations of the three representations plus the two
//! token-saving variants, with token accounting and parsers.
//!
//! Layouts, one record group per line group:
//!
//! * raw: `v1 v2 ... vk f`
//! * concise: the carrier on its own line, then one indented `l r f` line
//!   per interval. The compact form drops the first interval's `l`, the last
//!   interval's `r`, and any `l` equal to the previous interval's `r`.
//! * optimal: non-trivial records under an edge line `eL eR`, one indented
//!   `l r f` line each; trivial records as `l eL eR f`. The compact form
//!   drops `l` when it equals `eL` and `r` when it equals `eR`, and writes
//!   trivial records as `f l r`.
//!
//! Lines starting with `#` separate graphs and carry no tokens. Parsing the
//! compact optimal form needs the graph (topological positions and unique
//! max in-edges) to place omitted endpoints.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::ops::AddAssign;

use safeflow_core::graph::{FlowGraph, MaxEdgeIndex};
use safeflow_core::optenum::RecordError;
use safeflow_core::{ConciseRecord, Flow, Interval, OptimalRecord, Vertex};

#[derive(Debug, thiserror::Error)]
pub enum CodecError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error("record cannot be written compactly: {0}")]
    Shape(&'static str),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TokenReport {
    pub tokens: u64,
    pub bytes: u64,
    pub records: u64,
}

impl AddAssign for TokenReport {
    fn add_assign(&mut self, o: TokenReport) {
        self.tokens += o.tokens;
        self.bytes += o.bytes;
        self.records += o.records;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Plain,
    Compact,
}

/// Counts the tokens of serialized text the way [`Encoder`] does.
pub fn count_tokens(text: &str) -> u64 {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().count() as u64)
        .sum()
}

/// Streaming serializer. Each line is formatted into a reused buffer and
/// written in one call.
pub struct Encoder<W: Write> {
    out: W,
    line: String,
    report: TokenReport,
    group: Option<(Vertex, Vertex)>,
}

impl<W: Write> Encoder<W> {
    pub fn new(out: W) -> Self {
        Encoder { out, line: String::new(), report: TokenReport::default(), group: None }
    }

    pub fn report(&self) -> TokenReport {
        self.report
    }

    pub fn into_inner(self) -> W {
        self.out
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }

    fn token(&mut self, x: impl std::fmt::Display) {
        if !self.line.is_empty() && !self.line.ends_with(' ') {
            self.line.push(' ');
        }
        let _ = write!(self.line, "{x}");
        self.report.tokens += 1;
    }

    fn indent(&mut self) {
        self.line.push_str("  ");
    }

    fn end_line(&mut self) -> io::Result<()> {
        self.line.push('\n');
        self.out.write_all(self.line.as_bytes())?;
        self.report.bytes += self.line.len() as u64;
        self.line.clear();
        Ok(())
    }

    /// Starts the output of a new graph.
    pub fn graph_header(&mut self, id: &str) -> io::Result<()> {
        self.group = None;
        let _ = write!(self.line, "#{id}");
        self.end_line()
    }

    pub fn raw(&mut self, path: &[Vertex], flow: Flow) -> io::Result<()> {
        for &v in path {
            self.token(v);
        }
        self.token(flow);
        self.report.records += 1;
        self.end_line()
    }

    pub fn concise(&mut self, rec: &ConciseRecord, style: Style) -> Result<(), CodecError> {
        let pos = rec.positions()?;
        if rec.intervals.is_empty() {
            return Err(CodecError::Shape("record without intervals"));
        }
        if style == Style::Compact && (pos[0].0 != 0 || pos[pos.len() - 1].1 + 1 != rec.carrier.len()) {
            return Err(CodecError::Shape("carrier extends beyond its intervals"));
        }
        for &v in &rec.carrier {
            self.token(v);
        }
        self.end_line()?;
        let m = rec.intervals.len();
        for (i, iv) in rec.intervals.iter().enumerate() {
            self.indent();
            let (keep_l, keep_r) = match style {
                Style::Plain => (true, true),
                Style::Compact => (i > 0 && iv.left != rec.intervals[i - 1].right, i + 1 < m),
            };
            if keep_l {
                self.token(iv.left);
            }
            if keep_r {
                self.token(iv.right);
            }
            self.token(iv.flow);
            self.end_line()?;
        }
        self.report.records += m as u64;
        Ok(())
    }

    pub fn optimal(&mut self, rec: &OptimalRecord, style: Style) -> io::Result<()> {
        self.report.records += 1;
        if rec.trivial {
            self.group = None;
            match style {
                Style::Plain => {
                    for x in [rec.left, rec.edge_left, rec.edge_right] {
                        self.token(x);
                    }
                    self.token(rec.flow);
                }
                Style::Compact => {
                    self.token(rec.flow);
                    self.token(rec.left);
                    self.token(rec.right);
                }
            }
            return self.end_line();
        }
        let edge = (rec.edge_left, rec.edge_right);
        if self.group != Some(edge) {
            self.token(edge.0);
            self.token(edge.1);
            self.end_line()?;
            self.group = Some(edge);
        }
        self.indent();
        if style == Style::Plain || rec.left != rec.edge_left {
            self.token(rec.left);
        }
        if style == Style::Plain || rec.right != rec.edge_right {
            self.token(rec.right);
        }
        self.token(rec.flow);
        self.end_line()
    }
}

/// Splits serialized output into `(graph id, body)` sections. Text before
/// the first header forms a section with an empty id.
pub fn split_sections(text: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        if let Some(id) = line.strip_prefix('#') {
            out.push((id.to_string(), String::new()));
        } else {
            if out.is_empty() {
                out.push((String::new(), String::new()));
            }
            let body = &mut out.last_mut().unwrap().1;
            body.push_str(line);
            body.push('\n');
        }
    }
    out
}

struct Line<'a> {
    no: usize,
    indented: bool,
    tokens: Vec<&'a str>,
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let tokens: Vec<&str> = l.split_whitespace().collect();
        (!tokens.is_empty() && !l.starts_with('#')).then(|| Line {
            no: i + 1,
            indented: l.starts_with(char::is_whitespace),
            tokens,
        })
    })
}

fn err(no: usize, msg: impl Into<String>) -> CodecError {
    CodecError::Parse { line: no, msg: msg.into() }
}

fn num<T: std::str::FromStr>(line: &Line, i: usize) -> Result<T, CodecError> {
    line.tokens[i].parse().map_err(|_| err(line.no, format!("bad number `{}`", line.tokens[i])))
}

pub fn parse_raw(text: &str) -> Result<Vec<(Vec<Vertex>, Flow)>, CodecError> {
    lines(text)
        .map(|l| {
            if l.tokens.len() < 2 || l.indented {
                return Err(err(l.no, "expected `v1 ... vk f`"));
            }
            let k = l.tokens.len() - 1;
            let path = (0..k).map(|i| num(&l, i)).collect::<Result<_, _>>()?;
            Ok((path, num(&l, k)?))
        })
        .collect()
}

pub fn parse_concise(text: &str, style: Style) -> Result<Vec<ConciseRecord>, CodecError> {
    let mut groups: Vec<(ConciseRecord, Vec<Line>)> = Vec::new();
    for l in lines(text) {
        if !l.indented {
            let carrier = (0..l.tokens.len()).map(|i| num(&l, i)).collect::<Result<_, _>>()?;
            groups.push((ConciseRecord { carrier, intervals: Vec::new() }, Vec::new()));
        } else {
            match groups.last_mut() {
                Some(g) => g.1.push(l),
                None => return Err(err(l.no, "interval line before any carrier")),
            }
        }
    }
    let mut out = Vec::with_capacity(groups.len());
    for (mut rec, ivs) in groups {
        let m = ivs.len();
        let (Some(&first), Some(&last)) = (rec.carrier.first(), rec.carrier.last()) else {
            continue;
        };
        let mut prev_r = first;
        for (i, l) in ivs.iter().enumerate() {
            let t = l.tokens.len();
            let f: Flow = num(l, t - 1)?;
            let (left, right) = match (style, t) {
                (Style::Plain, 3) => (num(l, 0)?, num(l, 1)?),
                (Style::Compact, _) => {
                    let (first_i, last_i) = (i == 0, i + 1 == m);
                    match (first_i, last_i, t) {
                        (true, true, 1) => (first, last),
                        (true, false, 2) => (first, num(l, 0)?),
                        (false, false, 2) => (prev_r, num(l, 0)?),
                        (false, false, 3) => (num(l, 0)?, num(l, 1)?),
                        (false, true, 1) => (prev_r, last),
                        (false, true, 2) => (num(l, 0)?, last),
                        _ => return Err(err(l.no, "interval line has the wrong number of tokens")),
                    }
                }
                _ => return Err(err(l.no, "expected `l r f`")),
            };
            rec.intervals.push(Interval { left, right, flow: f });
            prev_r = right;
        }
        if rec.intervals.is_empty() {
            return Err(err(0, "carrier without intervals"));
        }
        out.push(rec);
    }
    Ok(out)
}

/// Graph context needed to resolve omitted endpoints of compact optimal
/// records.
pub struct OptimalContext<'a> {
    pub graph: &'a FlowGraph,
    pub index: &'a MaxEdgeIndex,
}

pub fn parse_optimal(
    text: &str,
    style: Style,
    ctx: Option<&OptimalContext>,
) -> Result<Vec<OptimalRecord>, CodecError> {
    let mut out = Vec::new();
    let mut group: Option<(Vertex, Vertex)> = None;
    for l in lines(text) {
        let t = l.tokens.len();
        if l.indented {
            let Some((el, er)) = group else {
                return Err(err(l.no, "endpoint line outside an edge group"));
            };
            let flow: Flow = num(&l, t - 1)?;
            let (left, right) = match (style, t) {
                (Style::Plain, 3) | (Style::Compact, 3) => (num(&l, 0)?, num(&l, 1)?),
                (Style::Compact, 2) => {
                    let ctx = ctx.ok_or_else(|| err(l.no, "compact endpoints need the graph"))?;
                    let x: Vertex = num(&l, 0)?;
                    if x as usize >= ctx.graph.n() {
                        return Err(err(l.no, "vertex out of range"));
                    }
                    if ctx.graph.position(x) < ctx.graph.position(el) {
                        (x, er)
                    } else {
                        (el, x)
                    }
                }
                (Style::Compact, 1) => (el, er),
                _ => return Err(err(l.no, "expected `l r f`")),
            };
            out.push(OptimalRecord { edge_left: el, edge_right: er, left, right, flow, trivial: false });
            continue;
        }
        match (style, t) {
            (_, 2) => group = Some((num(&l, 0)?, num(&l, 1)?)),
            (Style::Plain, 4) => {
                group = None;
                let (left, el, er) = (num(&l, 0)?, num(&l, 1)?, num(&l, 2)?);
                out.push(OptimalRecord { edge_left: el, edge_right: er, left, right: er, flow: num(&l, 3)?, trivial: true });
            }
            (Style::Compact, 3) => {
                group = None;
                let ctx = ctx.ok_or_else(|| err(l.no, "compact trivial records need the graph"))?;
                let (flow, left, right): (Flow, Vertex, Vertex) = (num(&l, 0)?, num(&l, 1)?, num(&l, 2)?);
                if right as usize >= ctx.graph.n() {
                    return Err(err(l.no, "vertex out of range"));
                }
                let el = ctx
                    .index
                    .unique_max_in(right)
                    .ok_or_else(|| err(l.no, format!("{right} has no unique max in-edge")))?
                    .far;
                out.push(OptimalRecord { edge_left: el, edge_right: right, left, right, flow, trivial: true });
            }
            _ => return Err(err(l.no, "unrecognized optimal line")),
        }
    }
    Ok(out)
}
