//! The catfish graph format: repeated blocks of a `#` header line, a vertex
//! count line and one `u v f` line per edge.

use std::io::{self, BufRead, Write};

use safeflow_core::{FlowGraph, GraphError, Vertex};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("graph `{id}` (line {line})")]
    Graph { line: usize, id: String, source: GraphError },
}

/// One graph of a dataset file with its header text.
#[derive(Clone, Debug)]
pub struct GraphBlock {
    pub id: String,
    pub graph: FlowGraph,
}

struct Pending {
    id: String,
    line: usize,
    n: Option<usize>,
    edges: Vec<(Vertex, Vertex, i64)>,
}

impl Pending {
    fn finish(self) -> Result<GraphBlock, FormatError> {
        let n = self.n.ok_or_else(|| FormatError::Syntax {
            line: self.line,
            msg: format!("graph `{}` has no vertex count", self.id),
        })?;
        let graph = FlowGraph::new(n, self.edges).map_err(|source| FormatError::Graph {
            line: self.line,
            id: self.id.clone(),
            source,
        })?;
        Ok(GraphBlock { id: self.id, graph })
    }
}

/// Streams graph blocks out of a reader, one at a time.
pub struct GraphReader<R> {
    lines: io::Lines<R>,
    line: usize,
    pending: Option<Pending>,
    done: bool,
}

impl<R: BufRead> GraphReader<R> {
    pub fn new(reader: R) -> Self {
        GraphReader { lines: reader.lines(), line: 0, pending: None, done: false }
    }

    fn syntax(&self, msg: impl Into<String>) -> FormatError {
        FormatError::Syntax { line: self.line, msg: msg.into() }
    }

    fn step(&mut self) -> Result<Option<GraphBlock>, FormatError> {
        loop {
            let Some(text) = self.lines.next() else {
                self.done = true;
                return self.pending.take().map(Pending::finish).transpose();
            };
            let text = text?;
            self.line += 1;
            let t = text.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(id) = t.strip_prefix('#') {
                let next = Pending { id: id.trim().to_string(), line: self.line, n: None, edges: Vec::new() };
                if let Some(done) = self.pending.replace(next) {
                    return done.finish().map(Some);
                }
                continue;
            }
            let mut fields = t.split_whitespace();
            let Some(p) = self.pending.as_mut() else {
                return Err(self.syntax("data before the first `#` header"));
            };
            if p.n.is_none() {
                let n = fields.next().and_then(|s| s.parse().ok());
                if n.is_none() || fields.next().is_some() {
                    return Err(self.syntax(format!("expected a vertex count, got `{t}`")));
                }
                p.n = n;
                continue;
            }
            let parsed = (|| {
                let u = fields.next()?.parse::<Vertex>().ok()?;
                let v = fields.next()?.parse::<Vertex>().ok()?;
                let f = fields.next()?.parse::<i64>().ok()?;
                fields.next().is_none().then_some((u, v, f))
            })();
            let n = p.n.unwrap_or(0);
            match parsed {
                Some((u, v, _)) if u as usize >= n || v as usize >= n => {
                    return Err(self.syntax(format!("edge ({u},{v}) has an endpoint outside 0..{n}")))
                }
                Some(e) => p.edges.push(e),
                None => return Err(self.syntax(format!("expected `u v f`, got `{t}`"))),
            }
        }
    }
}

impl<R: BufRead> Iterator for GraphReader<R> {
    type Item = Result<GraphBlock, FormatError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.step();
        if item.is_err() {
            self.done = true;
        }
        item.transpose()
    }
}

pub fn parse_graphs(reader: impl BufRead) -> Result<Vec<GraphBlock>, FormatError> {
    GraphReader::new(reader).collect()
}

/// Canonical form: edges sorted by `(u, v)`, parallel edges already merged.
pub fn write_graph(mut w: impl Write, id: &str, g: &FlowGraph) -> io::Result<()> {
    writeln!(w, "#{id}")?;
    writeln!(w, "{}", g.n())?;
    for e in g.edges() {
        writeln!(w, "{} {} {}", e.from, e.to, e.flow)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_block() {
        let gs = parse_graphs("#1\n3\n0 1 5\n1 2 5\n".as_bytes()).unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!(gs[0].id, "1");
        assert_eq!(gs[0].graph.n(), 3);
        assert_eq!(gs[0].graph.flow(1, 2), Some(5));
    }

    #[test]
    fn conservation_errors_name_the_graph() {
        let err = parse_graphs("#1\n3\n0 1 5\n1 2 4\n".as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            FormatError::Graph { source: GraphError::Conservation { vertex: 1, inflow: 5, outflow: 4 }, .. }
        ));
        let err = parse_graphs("#1\n4\n0 1 3\n0 1 2\n1 2 5\n1 3 5\n".as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            FormatError::Graph { source: GraphError::Conservation { vertex: 1, inflow: 5, outflow: 10 }, .. }
        ));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_graphs("#a\n3\n0 1 5\n\n0 x 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 5, .. }), "{err}");
        let err = parse_graphs("0 1 5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 1, .. }));
        let err = parse_graphs("#a\n#b\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 1, .. }));
    }

    #[test]
    fn several_blocks_and_round_trip() {
        let text = "# g1\n2\n0 1 4\n#g2\n0\n";
        let gs = parse_graphs(text.as_bytes()).unwrap();
        assert_eq!(gs.len(), 2);
        let mut out = Vec::new();
        for b in &gs {
            write_graph(&mut out, &b.id, &b.graph).unwrap();
        }
        assert_eq!(String::from_utf8(out).unwrap(), "#g1\n2\n0 1 4\n#g2\n0\n");
        assert!(parse_graphs("".as_bytes()).unwrap().is_empty());
    }
}
