use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use djm_core::experiment::{
    aggregate_relative, per_instance_table, read_records, reduce, run_experiment, write_records, ExperimentConfig,
    DEFAULT_REPEATS,
};
use djm_core::instance::{
    gen_rmat_dynamic, ingest_trace, split_instance, Initiator, InstanceStream, RmatParams, SplitParams, TraceFormat,
    DEFAULT_WEIGHT_RATE,
};
use djm_core::oracle::{brute_force_opt_bounded, invariant_violation};
use djm_core::solver::{DEFAULT_ALPHA, DEFAULT_FILTER_T};
use djm_core::{validate, AlgoKind, AlgoSpec, Error, Session};

#[derive(Parser)]
#[command(name = "djm", version, about = "Dynamic k-disjoint weighted matchings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay an instance through one algorithm and write per-batch metrics.
    Run(RunArgs),
    /// Generate a dynamic RMAT instance.
    GenRmat(GenRmatArgs),
    /// Split every batch into sub-batches with capped weights.
    Split(SplitArgs),
    /// Turn a packet trace into an instance.
    Ingest(IngestArgs),
    /// Relative metrics against a reference algorithm, from run CSVs.
    Aggregate(AggregateArgs),
    /// Replay an instance through algorithms and check every batch.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Algorithm id, optionally with a `+p`, `+f` or `+pf` suffix.
    #[arg(long)]
    algo: String,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    repeats: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Drop weight changes within a factor of T.
    #[arg(long, value_name = "T")]
    filter: Option<f64>,
    #[arg(long)]
    postprocess: bool,
    /// Record recourse instead of time.
    #[arg(long)]
    measure_recourse: bool,
    /// Recursion depth of dyn-greedy and hybrid-greedy.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: u32,
    /// Deferral threshold of the node-centered algorithms.
    #[arg(long)]
    theta: Option<f64>,
    /// Instance id written to the CSV; defaults to the input file stem.
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenRmatArgs {
    #[arg(long)]
    log_nodes: u32,
    /// Initiator: b, g or er.
    #[arg(long, default_value = "g")]
    model: String,
    #[arg(long, default_value_t = 0.1)]
    fraction: f64,
    #[arg(long, default_value_t = 0.1)]
    del_prob: f64,
    #[arg(long, default_value_t = 30)]
    update_batches: usize,
    /// Edges per node in the static graph.
    #[arg(long, default_value_t = 8.0)]
    density: f64,
    /// Rate of the exponential weight distribution.
    #[arg(long, default_value_t = DEFAULT_WEIGHT_RATE)]
    weight_rate: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    sub_batches: usize,
    #[arg(long)]
    cap: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IngestArgs {
    /// Distinct time values per batch.
    #[arg(long)]
    group: usize,
    /// ts (summed sizes) or seq (packet counts).
    #[arg(long, default_value = "ts")]
    format: String,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AggregateArgs {
    #[arg(long, default_value = "kec")]
    reference: String,
    #[arg(long = "in", required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Dataset label written to every row.
    #[arg(long, default_value = "all")]
    dataset: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    /// Algorithms to check; all of them by default.
    #[arg(long, num_args = 1..)]
    algo: Vec<String>,
    /// Largest graph on which the exact optimum is computed.
    #[arg(long, default_value_t = 20)]
    oracle_max_edges: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Failure of `djm verify`, reported with exit code 3.
#[derive(Debug)]
struct VerifyFailed(String);

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerifyFailed {}

fn read_instance(path: &Path) -> Result<InstanceStream> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    InstanceStream::read(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn write_instance(inst: &InstanceStream, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    inst.write(&mut w)?;
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn run(a: RunArgs) -> Result<()> {
    let mut spec = AlgoSpec::from_label(&a.algo, a.filter.unwrap_or(DEFAULT_FILTER_T))?;
    if spec.filter.is_some() && a.filter.is_none() {
        return Err(Error::Config(format!("'{}' filters updates; pass the threshold with --filter T", a.algo)).into());
    }
    spec.filter = a.filter;
    spec.postprocess |= a.postprocess;
    spec.alpha = a.alpha;
    if let Some(t) = a.theta {
        spec.theta = t;
    }
    spec.validate()?;
    let inst = read_instance(&a.input)?;
    let name = a.name.unwrap_or_else(|| a.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let mut cfg = ExperimentConfig::new(name, spec, a.k);
    cfg.repeats = a.repeats;
    cfg.seed = a.seed;
    cfg.measure_recourse = a.measure_recourse;
    let rows = run_experiment(&cfg, &inst)?;
    let mut w = create(&a.out)?;
    write_records(&mut w, &rows)?;
    w.flush()?;
    log::info!("{}: {} rows written to {}", spec.label(), rows.len(), a.out.display());
    Ok(())
}

fn gen_rmat(a: GenRmatArgs) -> Result<()> {
    let params = RmatParams {
        log_nodes: a.log_nodes,
        initiator: a.model.parse::<Initiator>()?,
        fraction: a.fraction,
        del_prob: a.del_prob,
        update_batches: a.update_batches,
        density: a.density,
        weight_rate: a.weight_rate,
        seed: a.seed,
    };
    write_instance(&gen_rmat_dynamic(&params)?, &a.out)
}

fn split(a: SplitArgs) -> Result<()> {
    let inst = read_instance(&a.input)?;
    let out = split_instance(&inst, SplitParams { y: a.sub_batches, z: a.cap, seed: a.seed })?;
    write_instance(&out, &a.out)
}

fn ingest(a: IngestArgs) -> Result<()> {
    let format: TraceFormat = a.format.parse()?;
    let file = File::open(&a.input).with_context(|| format!("cannot open {}", a.input.display()))?;
    let inst = ingest_trace(BufReader::new(file), a.group, format)?;
    write_instance(&inst, &a.out)
}

fn is_randomized(label: &str) -> bool {
    AlgoSpec::from_label(label, DEFAULT_FILTER_T).map(|s| s.kind.is_randomized()).unwrap_or(false)
}

fn aggregate(a: AggregateArgs) -> Result<()> {
    let mut rows = Vec::new();
    for path in &a.input {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        rows.extend(read_records(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?);
    }
    let table = per_instance_table(&reduce(&rows, is_randomized))?;
    let out = aggregate_relative(&table, &a.reference, &a.dataset);
    if out.is_empty() {
        log::warn!("no algorithm shares an instance with reference {}", a.reference);
    }
    let mut w = create(&a.out)?;
    write_records(&mut w, &out)?;
    w.flush()?;
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<()> {
    let inst = read_instance(&a.input)?;
    let specs: Vec<AlgoSpec> = if a.algo.is_empty() {
        AlgoKind::ALL.iter().map(|&k| AlgoSpec::new(k)).collect()
    } else {
        a.algo.iter().map(|l| AlgoSpec::from_label(l, DEFAULT_FILTER_T)).collect::<djm_core::Result<_>>()?
    };
    let batches = inst.to_delta_batches();
    for spec in &specs {
        let label = spec.label();
        let mut s = Session::new(inst.n, a.k, spec, a.seed)?;
        // enhanced runs must keep the local optimality invariant
        let guaranteed = spec.postprocess || spec.kind == AlgoKind::Batch2Apx;
        for (idx, raw) in batches.iter().enumerate() {
            s.process_batch(raw)?;
            if let Err(v) = validate(&s.graph, &s.coloring) {
                return Err(VerifyFailed(format!("{label} batch {idx}: {v}")).into());
            }
            if guaranteed {
                if let Some((e, col)) = invariant_violation(&s.graph, &s.coloring) {
                    let (u, v) = s.graph.endpoints(e);
                    return Err(VerifyFailed(format!(
                        "{label} batch {idx}: uncolored {{{u},{v}}} outweighs its color {} neighborhood",
                        col.0
                    ))
                    .into());
                }
            }
            if s.graph.m() <= a.oracle_max_edges {
                let (opt, _) = brute_force_opt_bounded(&s.graph, a.k, a.oracle_max_edges)?;
                let w = s.coloring.total_weight();
                if w > opt || (guaranteed && 2 * w < opt) {
                    return Err(VerifyFailed(format!("{label} batch {idx}: weight {w} against optimum {opt}")).into());
                }
            }
        }
        println!("{label}: {} batches ok, final weight {}", batches.len(), s.coloring.total_weight());
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerifyFailed>().is_some() {
        return 3;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Internal(_)) => 3,
        Some(Error::Config(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::GenRmat(a) => gen_rmat(a),
        Command::Split(a) => split(a),
        Command::Ingest(a) => ingest(a),
        Command::Aggregate(a) => aggregate(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
