//! The `dnnd` command: cluster, generate, sweep and serve.
//!
//! Exit status is 0 on success, 1 for configuration errors, 2 for input or
//! output errors and 3 when the clustering itself fails.

pub mod server;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dnnd_core::dataset::{
    generate_gaussian_mixture, load_csv, write_csv, Delimiter, GaussianMixtureConfig, LoadOptions,
};
use dnnd_core::eval::{cluster_stats, summarize, write_sweep_csv};
use dnnd_core::{
    run_sweep, CutSpec, Dataset, Error, Method, Metric, PipelineConfig, PotentialConfig,
    PotentialMode, SweepConfig,
};

use crate::server::{Meta, ServeState};

#[derive(Debug, Parser)]
#[command(name = "dnnd", version, about = "Clustering by layered nearest neighbor descent")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a dataset and write labels and the decision graph.
    Cluster(ClusterArgs),
    /// Write a Gaussian mixture dataset as CSV.
    Generate(GenerateArgs),
    /// Run a parameter grid from a TOML file.
    Sweep(SweepArgs),
    /// Serve a decision graph over HTTP for interactive cuts.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Dataset CSV; one row per point.
    #[arg(long, conflicts_with = "generate")]
    pub input: Option<PathBuf>,
    /// Generate a Gaussian mixture instead: `M:N:D` or `M:N:D:SEPARATION`.
    #[arg(long, value_name = "SPEC")]
    pub generate: Option<String>,
    /// Seed for `--generate`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// The last column holds reference labels.
    #[arg(long)]
    pub has_labels: bool,
    /// Skip the first line of the input.
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value = "comma", value_parser = parse_with::<Delimiter>)]
    pub delimiter: Delimiter,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Kernel bandwidth for `--mode expkernel`.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value = "expkernel", value_parser = parse_with::<PotentialMode>)]
    pub mode: PotentialMode,
    #[arg(long, default_value = "euclidean", value_parser = parse_with::<Metric>)]
    pub metric: Metric,
    #[arg(long, default_value = "dnnd", value_parser = parse_with::<Method>)]
    pub method: Method,
    /// Rescale every dimension to [0, 1] first.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// `topk:K`, `autogap[:M]`, `box:W,P` or `nodes:I,J,...`. Defaults to
    /// `autogap` for tree methods; `graphga` takes none.
    #[arg(long, value_parser = parse_with::<CutSpec>)]
    pub cut: Option<CutSpec>,
    /// Labels CSV destination; stdout if omitted.
    #[arg(long, value_name = "PATH")]
    pub labels_out: Option<PathBuf>,
    /// Decision-graph JSON destination.
    #[arg(long, value_name = "PATH")]
    pub graph_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of components.
    #[arg(long)]
    pub m: usize,
    /// Number of points.
    #[arg(long)]
    pub n: usize,
    /// Dimension.
    #[arg(long)]
    pub d: usize,
    /// Minimum distance between component means, in standard deviations.
    #[arg(long, default_value_t = 10.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; stdout if omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML file with `ks`, `sigmas`, `modes` and optionally `cut`, `seeds`,
    /// `metric`, `normalize`.
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub input: InputArgs,
    /// Results CSV destination; stdout if omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Serve an exported decision graph instead of clustering.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["input", "generate"])]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// 0 picks a free port.
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
}

fn parse_with<T>(s: &str) -> Result<T, String>
where
    T: std::str::FromStr<Err = Error>,
{
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failed command and its exit status.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Io(String),
    Pipeline(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Io(_) => 2,
            Failure::Pipeline(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Io(m) | Failure::Pipeline(m) => m,
        }
    }

    fn io(path: &Path, err: io::Error) -> Self {
        Failure::Io(format!("{}: {err}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let msg = err.to_string();
        match err {
            Error::InvalidConfig(_) | Error::InvalidCut(_) | Error::Generation(_) => Failure::Config(msg),
            Error::Io { .. }
            | Error::RaggedRow { .. }
            | Error::Parse { .. }
            | Error::EmptyDataset
            | Error::InvalidDataset(_) => Failure::Io(msg),
            Error::LabelLengthMismatch { .. } | Error::Structure(_) | Error::UndefinedInput(_) => {
                Failure::Pipeline(msg)
            }
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `args` (program name first), runs the command and returns the
/// exit status. Errors go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Cluster(a) => cmd_cluster(&a),
        Command::Generate(a) => cmd_generate(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Serve(a) => cmd_serve(&a),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}

fn parse_generator(spec: &str, seed: u64) -> Result<GaussianMixtureConfig, Failure> {
    let bad = || Failure::Config(format!("--generate expects M:N:D[:SEPARATION], got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let int = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let config = GaussianMixtureConfig {
        components: int(parts[0])?,
        points: int(parts[1])?,
        dim: int(parts[2])?,
        separation: match parts.get(3) {
            Some(s) => s.parse().map_err(|_| bad())?,
            None => 10.0,
        },
        seed,
    };
    config.validate()?;
    Ok(config)
}

fn load_input(args: &InputArgs) -> Result<Dataset, Failure> {
    match (&args.input, &args.generate) {
        (Some(path), None) => Ok(load_csv(
            path,
            LoadOptions {
                has_labels: args.has_labels,
                delimiter: args.delimiter,
                header: args.header,
            },
        )?),
        (None, Some(spec)) => Ok(generate_gaussian_mixture(&parse_generator(spec, args.seed)?)?),
        _ => Err(Failure::Config("give exactly one of --input or --generate".into())),
    }
}

fn pipeline_config(model: &ModelArgs, cut: Option<CutSpec>) -> PipelineConfig {
    PipelineConfig {
        metric: model.metric,
        normalize: model.normalize,
        k: model.k,
        potential: PotentialConfig {
            mode: model.mode,
            sigma: model.sigma,
        },
        method: model.method,
        cut,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::io(path, e))
}

/// Writes to `path`, or to stdout when it is `None`.
fn write_output(
    path: Option<&Path>,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> CmdResult {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            body(&mut w).and_then(|()| w.flush()).map_err(|e| Failure::io(p, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)
                .and_then(|()| w.flush())
                .map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

/// `id,cluster` rows, with a `truth` column when reference labels exist.
pub fn write_labels_csv(out: &mut dyn Write, labels: &[usize], truth: Option<&[String]>) -> io::Result<()> {
    match truth {
        Some(truth) => {
            writeln!(out, "id,cluster,truth")?;
            for (i, (c, t)) in labels.iter().zip(truth).enumerate() {
                writeln!(out, "{i},{c},{t}")?;
            }
        }
        None => {
            writeln!(out, "id,cluster")?;
            for (i, c) in labels.iter().enumerate() {
                writeln!(out, "{i},{c}")?;
            }
        }
    }
    Ok(())
}

fn cmd_cluster(args: &ClusterArgs) -> CmdResult {
    let config = pipeline_config(&args.model, args.cut.clone());
    config.validate()?;
    let data = load_input(&args.input)?;
    let run = dnnd_core::run(&data, &config)?;
    let labels = &run.clustering.labels;

    if let Some(path) = &args.graph_out {
        let json = serde_json::to_string(&run.decision_graph)
            .map_err(|e| Failure::Pipeline(format!("serializing decision graph: {e}")))?;
        fs::write(path, json).map_err(|e| Failure::io(path, e))?;
    }
    write_output(args.labels_out.as_deref(), |w| {
        write_labels_csv(w, labels, data.labels())
    })?;

    let stats = cluster_stats(labels, data.labels())?;
    let mut summary = format!(
        "{} clusters ({} with more than one point), layers {:?}",
        stats.clusters, stats.clusters_nonsingleton, run.bottom_up.trace
    );
    if let Some(e) = stats.error {
        summary.push_str(&format!(", error rate {e}"));
    }
    eprintln!("{summary}");
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> CmdResult {
    let config = GaussianMixtureConfig {
        components: args.m,
        points: args.n,
        dim: args.d,
        separation: args.separation,
        seed: args.seed,
    };
    let data = generate_gaussian_mixture(&config)?;
    write_output(args.out.as_deref(), |w| write_csv(&data, w))
}

/// Reads a sweep definition from TOML.
pub fn load_sweep_config(path: &Path) -> Result<SweepConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let config: SweepConfig =
        toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

fn cmd_sweep(args: &SweepArgs) -> CmdResult {
    let config = load_sweep_config(&args.config)?;
    let data = load_input(&args.input)?;
    let rows = run_sweep(&data, &config)?;
    write_output(args.out.as_deref(), |w| write_sweep_csv(&rows, w))?;
    match summarize(&rows) {
        Some((mean, std)) => eprintln!("{} runs, error rate {mean} ± {std}", rows.len()),
        None => eprintln!("{} runs", rows.len()),
    }
    Ok(())
}

fn serve_state(args: &ServeArgs) -> Result<ServeState, Failure> {
    if let Some(path) = &args.graph {
        let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        let graph = serde_json::from_str(&text)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        return Ok(ServeState::new(graph, Meta::default())?);
    }
    let config = pipeline_config(&args.model, None);
    config.validate()?;
    let data = load_input(&args.input)?;
    let run = dnnd_core::run(&data, &config)?;
    let meta = Meta {
        method: Some(config.method),
        k: Some(config.k),
        sigma: Some(config.potential.sigma),
        mode: Some(config.potential.mode),
    };
    Ok(ServeState::new(run.decision_graph, meta)?)
}

fn cmd_serve(args: &ServeArgs) -> CmdResult {
    let state = serve_state(args)?;
    let runtime = tokio::runtime::Builder::new_current_thread()
        .enable_io()
        .build()
        .map_err(|e| Failure::Io(format!("starting runtime: {e}")))?;
    runtime.block_on(async {
        let addr = format!("{}:{}", args.host, args.port);
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| Failure::Io(format!("binding {addr}: {e}")))?;
        let local = listener
            .local_addr()
            .map_err(|e| Failure::Io(format!("binding {addr}: {e}")))?;
        eprintln!("listening on http://{local}");
        axum::serve(listener, server::router(state))
            .await
            .map_err(|e| Failure::Io(format!("serving: {e}")))
    })
}
