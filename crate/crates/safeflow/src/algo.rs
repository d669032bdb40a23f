use std::fmt;
use std::io::Write;
use std::str::FromStr;

use safeflow_core::graph::{FlowGraph, MaxEdgeIndex};
use safeflow_core::legacy;
use safeflow_core::optenum::{build_extension_forests, opt_concise_visit, opt_raw_visit, opt_rep_visit};

use crate::codec::{CodecError, Encoder, Style};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algo {
    RawRep,
    ConRep,
    OptRawRep,
    OptConRep,
    OptConRepCompact,
    OptRep,
    OptRepCompact,
}

impl Algo {
    pub const ALL: [Algo; 7] = [
        Algo::RawRep,
        Algo::ConRep,
        Algo::OptRawRep,
        Algo::OptConRep,
        Algo::OptConRepCompact,
        Algo::OptRep,
        Algo::OptRepCompact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algo::RawRep => "rawrep",
            Algo::ConRep => "conrep",
            Algo::OptRawRep => "optrawrep",
            Algo::OptConRep => "optconrep",
            Algo::OptConRepCompact => "optconrep#",
            Algo::OptRep => "optrep",
            Algo::OptRepCompact => "optrep#",
        }
    }

    /// Whether this is one of the decomposition-based pipelines.
    pub fn is_legacy(self) -> bool {
        matches!(self, Algo::RawRep | Algo::ConRep)
    }

    /// Runs the algorithm on `g` and streams its output into `enc`.
    pub fn emit<W: Write>(self, g: &FlowGraph, enc: &mut Encoder<W>) -> Result<(), CodecError> {
        match self {
            Algo::RawRep => {
                for p in legacy::rawrep(g) {
                    enc.raw(&p.vertices, p.excess)?;
                }
            }
            Algo::ConRep => {
                for r in legacy::conrep(g) {
                    enc.concise(&r, Style::Plain)?;
                }
            }
            Algo::OptRawRep => {
                let idx = MaxEdgeIndex::new(g);
                let mut res = Ok(());
                opt_raw_visit(g, &idx, |p, f| {
                    if res.is_ok() {
                        res = enc.raw(p, f);
                    }
                });
                res?;
            }
            Algo::OptConRep | Algo::OptConRepCompact => {
                let style = if self == Algo::OptConRep { Style::Plain } else { Style::Compact };
                let idx = MaxEdgeIndex::new(g);
                let mut res = Ok(());
                opt_concise_visit(g, &idx, |r| {
                    if res.is_ok() {
                        res = enc.concise(&r, style);
                    }
                });
                res?;
            }
            Algo::OptRep | Algo::OptRepCompact => {
                let style = if self == Algo::OptRep { Style::Plain } else { Style::Compact };
                let idx = MaxEdgeIndex::new(g);
                let (fi, fo) = build_extension_forests(g, &idx);
                let mut res = Ok(());
                opt_rep_visit(g, &idx, &fi, &fo, |r| {
                    if res.is_ok() {
                        res = enc.optimal(&r, style);
                    }
                });
                res?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Algo::ALL.iter().map(|a| a.name()).collect();
                format!("unknown algorithm `{s}` (expected one of {})", names.join(", "))
            })
    }
}
