use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use anosketch::eval::{self, Method, RunParams, RESULTS_HEADER};
use anosketch::stream_io::{self, InputFormat, SyntheticSpec};
use anosketch::{Error, Result};

const SEED_ENV: &str = "ANOSKETCH_SEED";

#[derive(Parser)]
#[command(
    name = "anosketch",
    version,
    about = "Streaming edge and graph anomaly detection on higher-order count-min sketches"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score a stream with one method: anoedge-g, anoedge-l, anograph or anograph-k.
    Score(RunArgs),
    /// Time repeated runs of one method and print a results row.
    Bench(RunArgs),
    /// Generate a synthetic edge stream with injected dense bursts.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Method to run (anoedge-g, anoedge-l, anograph, anograph-k).
    #[arg(value_name = "METHOD", conflicts_with = "method_flag")]
    method: Option<Method>,

    /// Same as the positional METHOD.
    #[arg(long = "method", id = "method_flag", value_name = "METHOD")]
    method_flag: Option<Method>,

    /// Edge file.
    #[arg(long)]
    edges: PathBuf,

    /// Label file, one 0/1 per edge.
    #[arg(long)]
    labels: Option<PathBuf>,

    /// Edge file layout: csv-uvt or csv-uvwt.
    #[arg(long, default_value = "csv-uvt")]
    format: InputFormat,

    /// Number of hash rows (n_r).
    #[arg(long, default_value_t = 2)]
    rows: usize,

    /// Buckets per matrix side (n_b).
    #[arg(long, default_value_t = 32)]
    buckets: usize,

    /// Temporal decay factor per tick, in (0, 1].
    #[arg(long, default_value_t = 0.9)]
    decay: f64,

    /// Number of seed cells for anograph-k.
    #[arg(long, default_value_t = 5)]
    k: usize,

    /// Snapshot window length in minutes (graph methods).
    #[arg(long, default_value_t = 60)]
    window: u64,

    /// Timestamp ticks per minute, used to convert --window to ticks.
    #[arg(long, default_value_t = 1)]
    ticks_per_minute: u64,

    /// Positive edges needed to label a snapshot anomalous.
    #[arg(long, default_value_t = 100)]
    threshold: usize,

    /// Seed for hashing and initial blocks. ANOSKETCH_SEED overrides it.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Score output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Repeat count for bench.
    #[arg(long, default_value_t = 5)]
    repeats: usize,

    /// Treat each input edge as two directed edges.
    #[arg(long)]
    undirected: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Node count for background traffic.
    #[arg(long, default_value_t = 100)]
    nodes: u64,

    /// Background duration in ticks.
    #[arg(long, default_value_t = 1000)]
    ticks: u64,

    /// Background edges per tick.
    #[arg(long, default_value_t = 10)]
    rate: usize,

    /// Number of bursts, spread evenly over the background.
    #[arg(long, default_value_t = 1)]
    bursts: usize,

    /// Nodes per burst.
    #[arg(long, default_value_t = 5)]
    burst_nodes: usize,

    /// Edges per burst.
    #[arg(long, default_value_t = 500)]
    burst_edges: usize,

    /// Ticks per burst.
    #[arg(long, default_value_t = 10)]
    burst_duration: u64,

    /// PRNG seed. ANOSKETCH_SEED overrides it.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Edge output path (csv-uvt).
    #[arg(long)]
    out: PathBuf,

    /// Label output path.
    #[arg(long)]
    labels_out: PathBuf,
}

fn effective_seed(flag: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Parse {
            path: PathBuf::from(format!("${SEED_ENV}")),
            line: 0,
            message: format!("not an unsigned integer: `{v}`"),
        }),
        Err(_) => Ok(flag),
    }
}

impl RunArgs {
    fn method(&self) -> Result<Method> {
        self.method
            .or(self.method_flag)
            .ok_or_else(|| Error::UnknownMethod("none given".into()))
    }

    fn params(&self) -> Result<RunParams> {
        let window_ticks = self
            .window
            .checked_mul(self.ticks_per_minute)
            .filter(|&w| w > 0)
            .ok_or(Error::InvalidWindow)?;
        Ok(RunParams {
            rows: self.rows,
            buckets: self.buckets,
            decay: self.decay,
            k: self.k,
            window_ticks,
            edge_threshold: self.threshold,
            seed: effective_seed(self.seed)?,
            undirected: self.undirected,
        })
    }

    fn dataset(&self) -> String {
        self.edges
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_scores(out: &mut dyn Write, method: Method, scores: &[f64]) -> io::Result<()> {
    for (i, s) in scores.iter().enumerate() {
        if method.is_graph() {
            writeln!(out, "{i},{s}")?;
        } else {
            writeln!(out, "{s}")?;
        }
    }
    out.flush()
}

fn load(args: &RunArgs) -> Result<(Vec<anosketch::EdgeRecord>, Option<Vec<bool>>)> {
    let stream = stream_io::parse_edge_stream(&args.edges, args.format)?;
    let labels = args
        .labels
        .as_ref()
        .map(stream_io::read_labels)
        .transpose()?;
    if let Some(l) = &labels {
        if l.len() != stream.edges.len() {
            return Err(Error::Alignment {
                items: stream.edges.len(),
                labels: l.len(),
            });
        }
    }
    Ok((stream.edges, labels))
}

fn score(args: RunArgs) -> Result<()> {
    let method = args.method()?;
    let params = args.params()?;
    let (edges, labels) = load(&args)?;
    let out = eval::run_method(method, &edges, labels.as_deref(), &params)?;
    write_scores(&mut *open_out(args.out.as_deref())?, method, &out.scores)?;
    if let Some(auc) = out.auc() {
        let auc = auc?;
        let report = eval::BenchReport {
            method,
            auc: Some(eval::Summary {
                mean: auc,
                std: 0.0,
            }),
            runtime_seconds: eval::Summary {
                mean: out.runtime.as_secs_f64(),
                std: 0.0,
            },
            peak_state_bytes: out.peak_state_bytes,
            scores: Vec::new(),
        };
        let row = eval::results_row(&report, &args.dataset(), &params);
        if args.out.is_some() {
            println!("{RESULTS_HEADER}\n{row}");
        } else {
            eprintln!("{RESULTS_HEADER}\n{row}");
        }
    }
    Ok(())
}

fn bench(args: RunArgs) -> Result<()> {
    let method = args.method()?;
    let params = args.params()?;
    let (edges, labels) = load(&args)?;
    let report = eval::run_benchmark(method, &edges, labels.as_deref(), &params, args.repeats)?;
    if let Some(path) = &args.out {
        write_scores(&mut *open_out(Some(path))?, method, &report.scores)?;
    }
    println!("{RESULTS_HEADER}");
    println!("{}", eval::results_row(&report, &args.dataset(), &params));
    eprintln!(
        "runtime_std_s={:.6} peak_state_bytes={}",
        report.runtime_seconds.std, report.peak_state_bytes
    );
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let spec = SyntheticSpec::with_even_bursts(
        args.nodes,
        args.ticks,
        args.rate,
        args.bursts,
        args.burst_nodes,
        args.burst_edges,
        args.burst_duration,
        effective_seed(args.seed)?,
    )?;
    let (edges, labels) = stream_io::generate_synthetic(&spec)?;
    let mut out = BufWriter::new(File::create(&args.out)?);
    stream_io::write_edges(&edges, &mut out)?;
    out.flush()?;
    let mut lout = BufWriter::new(File::create(&args.labels_out)?);
    stream_io::write_labels(&labels, &mut lout)?;
    lout.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Score(a) => score(a),
        Command::Bench(a) => bench(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
