//! Timing and memory measurement of single runs, and the CSV they land in.

use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context, Result};

use crate::algo::Algo;
use crate::codec::{Encoder, TokenReport};
use crate::format::GraphBlock;
use crate::mem::{self, PeakSampler};

pub const CSV_HEADER: [&str; 9] = ["dataset", "graph", "algo", "ms", "peak_mb", "tokens", "bytes", "n", "m"];

/// One measured cell. `ms` is `None` when the run did not finish.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub dataset: String,
    pub graph: String,
    pub algo: String,
    pub ms: Option<f64>,
    pub peak_mb: f64,
    pub tokens: u64,
    pub bytes: u64,
    pub n: u64,
    pub m: u64,
}

impl BenchRecord {
    pub fn to_row(&self) -> [String; 9] {
        [
            self.dataset.clone(),
            self.graph.clone(),
            self.algo.clone(),
            self.ms.map_or_else(|| "DNF".to_string(), |ms| format!("{ms:.3}")),
            format!("{:.2}", self.peak_mb),
            self.tokens.to_string(),
            self.bytes.to_string(),
            self.n.to_string(),
            self.m.to_string(),
        ]
    }

    pub fn from_row(row: &csv::StringRecord) -> Result<BenchRecord> {
        if row.len() != 9 {
            return Err(anyhow!("expected 9 fields, got {}", row.len()));
        }
        let num = |i: usize| -> Result<u64> { row[i].parse().with_context(|| format!("field {}", CSV_HEADER[i])) };
        Ok(BenchRecord {
            dataset: row[0].to_string(),
            graph: row[1].to_string(),
            algo: row[2].to_string(),
            ms: if &row[3] == "DNF" { None } else { Some(row[3].parse().context("field ms")?) },
            peak_mb: row[4].parse().context("field peak_mb")?,
            tokens: num(5)?,
            bytes: num(6)?,
            n: num(7)?,
            m: num(8)?,
        })
    }
}

pub fn format_row(rec: &BenchRecord) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(rec.to_row()).expect("in-memory csv");
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

pub fn parse_rows(text: &str) -> Result<Vec<BenchRecord>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        if row.get(0) == Some(CSV_HEADER[0]) {
            continue;
        }
        out.push(BenchRecord::from_row(&row)?);
    }
    Ok(out)
}

/// Appends rows with a single write, adding the header to a new file.
pub fn append_rows(path: &Path, rows: &[BenchRecord]) -> io::Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    let mut text = String::new();
    if f.metadata()?.len() == 0 {
        text.push_str(&CSV_HEADER.join(","));
        text.push('\n');
    }
    for r in rows {
        text.push_str(&format_row(r));
    }
    f.write_all(text.as_bytes())
}

/// Runs `algo` over parsed graphs in this process. Time covers the
/// algorithms and serialization, not parsing.
pub fn run_in_process(dataset: &str, algo: Algo, graphs: &[GraphBlock], out: Option<&Path>) -> Result<BenchRecord> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::sink()),
    };
    let sampler = PeakSampler::start();
    let start = Instant::now();
    let mut enc = Encoder::new(BufWriter::with_capacity(1 << 16, sink));
    for b in graphs {
        enc.graph_header(&b.id)?;
        algo.emit(&b.graph, &mut enc)?;
    }
    enc.flush()?;
    let report: TokenReport = enc.report();
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let peak = sampler.stop();
    Ok(BenchRecord {
        dataset: dataset.to_string(),
        graph: graph_label(graphs),
        algo: algo.name().to_string(),
        ms: Some(ms),
        peak_mb: mem::to_mb(peak),
        tokens: report.tokens,
        bytes: report.bytes,
        n: graphs.iter().map(|b| b.graph.n() as u64).sum(),
        m: graphs.iter().map(|b| b.graph.m() as u64).sum(),
    })
}

/// The graph id for single-graph inputs, otherwise `*<count>`.
pub fn graph_label(graphs: &[GraphBlock]) -> String {
    match graphs {
        [one] => one.id.clone(),
        _ => format!("*{}", graphs.len()),
    }
}

/// Limits of a child run.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub timeout: Duration,
    pub mem_cap_mb: Option<f64>,
}

/// Outcome of [`run_child`].
#[derive(Clone, Debug, PartialEq)]
pub enum ChildOutcome {
    Done(BenchRecord),
    TimedOut { peak_mb: f64 },
    MemCapped { peak_mb: f64 },
}

/// Runs `safeflow run` in a child process, killing it when it exceeds the
/// limits. The child measures itself; the parent only watches its RSS.
pub fn run_child(exe: &Path, dataset: &str, algo: Algo, input: &Path, limits: Limits) -> Result<ChildOutcome> {
    let mut child = Command::new(exe)
        .args(["run", "--algo", algo.name(), "--dataset", dataset, "--in"])
        .arg(input)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .with_context(|| format!("spawning {}", exe.display()))?;
    let start = Instant::now();
    let mut peak = 0u64;
    let status = loop {
        if let Some(s) = child.try_wait()? {
            break Some(s);
        }
        if let Some(rss) = mem::status_field(Some(child.id()), "VmRSS") {
            peak = peak.max(rss);
        }
        let over_mem = limits.mem_cap_mb.is_some_and(|cap| mem::to_mb(peak) > cap);
        if over_mem || start.elapsed() > limits.timeout {
            let _ = child.kill();
            let _ = child.wait();
            let peak_mb = mem::to_mb(peak);
            return Ok(if over_mem { ChildOutcome::MemCapped { peak_mb } } else { ChildOutcome::TimedOut { peak_mb } });
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    let mut out = String::new();
    child.stdout.take().expect("piped stdout").read_to_string(&mut out)?;
    let status = status.expect("exited");
    if !status.success() {
        let mut err = String::new();
        child.stderr.take().expect("piped stderr").read_to_string(&mut err)?;
        return Err(anyhow!("{} failed on {}: {}", algo, input.display(), err.trim()));
    }
    let rec = parse_rows(&out)?.pop().ok_or_else(|| anyhow!("child printed no record"))?;
    Ok(ChildOutcome::Done(rec))
}

/// Median of the measured times after one warmup run. Any run that does not
/// finish makes the whole cell DNF.
pub fn measure_cell(
    exe: &Path,
    dataset: &str,
    algo: Algo,
    input: &Path,
    reps: usize,
    limits: Limits,
) -> Result<BenchRecord> {
    let mut runs = Vec::new();
    for i in 0..=reps.max(1) {
        match run_child(exe, dataset, algo, input, limits)? {
            ChildOutcome::Done(r) => {
                if i > 0 {
                    runs.push(r);
                }
            }
            ChildOutcome::TimedOut { peak_mb } | ChildOutcome::MemCapped { peak_mb } => {
                let mut rec = runs.pop().unwrap_or_else(|| BenchRecord {
                    dataset: dataset.to_string(),
                    graph: String::new(),
                    algo: algo.name().to_string(),
                    ms: None,
                    peak_mb: 0.0,
                    tokens: 0,
                    bytes: 0,
                    n: 0,
                    m: 0,
                });
                rec.ms = None;
                rec.peak_mb = rec.peak_mb.max(peak_mb);
                return Ok(rec);
            }
        }
    }
    runs.sort_by(|a, b| a.ms.partial_cmp(&b.ms).expect("finite times"));
    let peak = runs.iter().map(|r| r.peak_mb).fold(0.0, f64::max);
    let mut rec = runs.swap_remove(runs.len() / 2);
    rec.peak_mb = peak;
    Ok(rec)
}
