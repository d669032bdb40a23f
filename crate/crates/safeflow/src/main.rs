use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use safeflow::algo::Algo;
use safeflow::bench::{self, BenchRecord, Limits};
use safeflow::format::{self, GraphBlock};
use safeflow::stats::{dataset_statistics, write_stats_csv};
use safeflow::verify::verify_all;
use safeflow_core::randgen::{generate, GenParams, Model};

#[derive(Parser)]
#[command(name = "safeflow", version, about = "Maximal safe paths of DAG flow decompositions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one algorithm over a dataset and print its measurement as CSV.
    Run(RunArgs),
    /// Check that all algorithms and serializations agree.
    Verify(VerifyArgs),
    /// Measure a matrix of inputs and algorithms in child processes.
    Bench(BenchArgs),
    /// Representation statistics of datasets.
    Stats(StatsArgs),
    /// Write random graphs in the catfish format.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Uniform,
    #[value(name = "powerlaw")]
    PowerLaw,
    Improved,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Uniform => Model::Uniform,
            ModelArg::PowerLaw => Model::PowerLaw,
            ModelArg::Improved => Model::Improved,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// rawrep, conrep, optrawrep, optconrep, optconrep#, optrep or optrep#.
    #[arg(long)]
    algo: Algo,
    /// Dataset file in the catfish format.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file; without it the output is serialized and discarded.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dataset name for the CSV row (default: input file stem).
    #[arg(long)]
    dataset: Option<String>,
    /// Seconds before the run is abandoned with a DNF row.
    #[arg(long)]
    timeout: Option<f64>,
    /// Also append the row to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct GenSpec {
    #[arg(long, value_enum, default_value = "improved")]
    model: ModelArg,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 10)]
    d: usize,
    #[arg(long, default_value_t = 0.81)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    flow_max: i64,
}

impl GenSpec {
    fn params(&self, seed: u64) -> GenParams {
        GenParams {
            n: self.n,
            k: self.k,
            d: self.d,
            p: self.p,
            seed,
            flow_min: 1,
            flow_max: self.flow_max,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Dataset files; without them graphs are generated.
    #[arg(long = "in")]
    input: Vec<PathBuf>,
    #[command(flatten)]
    gen: GenSpec,
    /// Number of generated graphs (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 100)]
    count: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Dataset files; without them graphs are generated from the matrix.
    #[arg(long = "in")]
    input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "improved")]
    model: ModelArg,
    #[arg(long, value_delimiter = ',', default_value = "100000")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "100")]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    d: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.81")]
    p: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    flow_max: i64,
    #[arg(long, value_delimiter = ',', default_value = "optrawrep,optconrep,optconrep#,optrep,optrep#")]
    algo: Vec<Algo>,
    /// Measured repetitions per cell, after one warmup run.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Seconds per run before the cell is recorded as DNF.
    #[arg(long, default_value_t = 600.0)]
    timeout: f64,
    /// Kill runs whose resident memory exceeds this many MB (DNF).
    #[arg(long)]
    mem_cap_mb: Option<f64>,
    /// Also append the rows to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Where generated inputs are written (default: a temporary directory).
    #[arg(long)]
    workdir: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Dataset files, one output row each.
    #[arg(long = "in", required = true)]
    input: Vec<PathBuf>,
    /// Also append the rows to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Leave out graphs with a unique flow decomposition.
    #[arg(long)]
    skip_funnels: bool,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    gen: GenSpec,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long)]
    out: PathBuf,
}

fn read_dataset(path: &Path) -> Result<Vec<GraphBlock>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    format::parse_graphs(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let dataset = a.dataset.clone().unwrap_or_else(|| stem(&a.input));
    let graphs = read_dataset(&a.input)?;
    if let Some(t) = a.timeout {
        let row = BenchRecord {
            dataset: dataset.clone(),
            graph: bench::graph_label(&graphs),
            algo: a.algo.name().to_string(),
            ms: None,
            peak_mb: 0.0,
            tokens: 0,
            bytes: 0,
            n: graphs.iter().map(|b| b.graph.n() as u64).sum(),
            m: graphs.iter().map(|b| b.graph.m() as u64).sum(),
        };
        let csv = a.csv.clone();
        std::thread::spawn(move || {
            std::thread::sleep(Duration::from_secs_f64(t));
            let row = BenchRecord { peak_mb: safeflow::mem::to_mb(safeflow::mem::status_field(None, "VmHWM").unwrap_or(0)), ..row };
            print!("{}", bench::format_row(&row));
            let _ = io::stdout().flush();
            if let Some(p) = csv {
                let _ = bench::append_rows(&p, &[row]);
            }
            std::process::exit(124);
        });
    }
    let rec = bench::run_in_process(&dataset, a.algo, &graphs, a.out.as_deref())?;
    print!("{}", bench::format_row(&rec));
    if let Some(p) = &a.csv {
        bench::append_rows(p, &[rec])?;
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    let mut graphs = Vec::new();
    for p in &a.input {
        graphs.extend(read_dataset(p)?);
    }
    if a.input.is_empty() {
        for i in 0..a.count {
            let seed = a.gen.seed + i;
            let g = generate(a.gen.model.into(), &a.gen.params(seed))?;
            graphs.push(GraphBlock { id: format!("seed{seed}"), graph: g.graph });
        }
    }
    let bad = verify_all(&graphs);
    for m in bad.iter().take(10) {
        println!("FAIL {m}");
    }
    if bad.is_empty() {
        println!("PASS {} graphs", graphs.len());
    } else {
        println!("FAIL {} of {} graphs", bad.len(), graphs.len());
    }
    Ok(bad.is_empty())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let exe = std::env::current_exe()?;
    let limits = Limits { timeout: Duration::from_secs_f64(a.timeout), mem_cap_mb: a.mem_cap_mb };
    let tmp = tempfile::tempdir()?;
    let workdir = a.workdir.clone().unwrap_or_else(|| tmp.path().to_path_buf());
    std::fs::create_dir_all(&workdir)?;
    let mut inputs: Vec<(String, PathBuf)> = a.input.iter().map(|p| (stem(p), p.clone())).collect();
    if inputs.is_empty() {
        for &n in &a.n {
            for &k in &a.k {
                for &d in &a.d {
                    for &p in &a.p {
                        let params = GenParams { n, k, d, p, seed: a.seed, flow_min: 1, flow_max: a.flow_max };
                        let name = format!("{}_n{n}_k{k}_d{d}_p{p}_s{}", model_name(a.model), a.seed);
                        let path = workdir.join(format!("{name}.graph"));
                        let g = generate(a.model.into(), &params)?;
                        let mut w = BufWriter::new(File::create(&path)?);
                        format::write_graph(&mut w, &name, &g.graph)?;
                        w.flush()?;
                        inputs.push((name, path));
                    }
                }
            }
        }
    }
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(io::stdout());
    out.write_record(bench::CSV_HEADER)?;
    out.flush()?;
    for (name, path) in &inputs {
        for &algo in &a.algo {
            let rec = bench::measure_cell(&exe, name, algo, path, a.reps, limits)?;
            out.write_record(rec.to_row())?;
            out.flush()?;
            if let Some(p) = &a.csv {
                bench::append_rows(p, &[rec])?;
            }
        }
    }
    Ok(())
}

fn model_name(m: ModelArg) -> &'static str {
    match m {
        ModelArg::Uniform => "uniform",
        ModelArg::PowerLaw => "powerlaw",
        ModelArg::Improved => "improved",
    }
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    let mut rows = Vec::new();
    for p in &a.input {
        let graphs = read_dataset(p)?;
        let c = dataset_statistics(graphs.iter().map(|b| &b.graph), a.skip_funnels);
        rows.push((stem(p), c.summary()));
    }
    write_stats_csv(io::stdout(), &rows, true)?;
    if let Some(p) = &a.csv {
        let fresh = std::fs::metadata(p).map_or(true, |m| m.len() == 0);
        let f = std::fs::OpenOptions::new().create(true).append(true).open(p)?;
        write_stats_csv(f, &rows, fresh)?;
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    if a.count == 0 {
        bail!("--count must be positive");
    }
    let mut w = BufWriter::new(File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?);
    let (mut ratio, mut funnels) = (0.0, 0u64);
    for i in 0..a.count {
        let seed = a.gen.seed + i;
        let g = generate(a.gen.model.into(), &a.gen.params(seed))?;
        ratio += g.graph.funnel_vertex_ratio();
        funnels += g.graph.is_funnel() as u64;
        format::write_graph(&mut w, &format!("seed{seed}"), &g.graph)?;
    }
    w.flush()?;
    println!(
        "wrote {} graphs to {}; mean funnel vertex ratio {:.4}; funnels {}/{}",
        a.count,
        a.out.display(),
        ratio / a.count as f64,
        funnels,
        a.count
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run(a) => cmd_run(a).map(|_| true),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Bench(a) => cmd_bench(a).map(|_| true),
        Cmd::Stats(a) => cmd_stats(a).map(|_| true),
        Cmd::Gen(a) => cmd_gen(a).map(|_| true),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
