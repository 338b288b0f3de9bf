//! The `maxtda` command line.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code: 0 on success, 1 on usage errors, 2 on runtime errors. Every
//! file-producing run also writes a [`RunManifest`] next to its first output.

mod reproduce;

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::datagen::{gen_ellipses3d, gen_rv_series, gen_two_circles, RvConfig, RvSignal};
use crate::density::{KdeModel, ProposalRegion, Subsampler};
use crate::error::Error;
use crate::filtration::PersistenceDiagram;
use crate::geometry::{mean_knn_distances, PointCloud};
use crate::inference::{
    bootstrap_talpha, classify_features, level_quantiles, parse_band, select_parameters, BootstrapConfig,
    ParameterGrid, SubsampleSpec,
};
use crate::metrics::{bottleneck, max_persistence};
use crate::pipeline::Pipeline;
use crate::plot::diagram_svg;
use crate::rng::stream;
use crate::timeseries::{
    ami_profile, cao_dimension, delay_embed, pca_project, periodicity_score, EmbeddingConfig, TimeSeries, AMI_BINS,
    CAO_THRESHOLD,
};

pub use reproduce::Preset;

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] Error),
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Replay record written next to the outputs of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after merging the config file, as parsed.
    pub argv: Vec<String>,
    pub parameters: Value,
    pub seed: u64,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub results: Value,
    pub version: String,
    pub wall_time_sec: f64,
}

#[derive(Parser, Debug)]
#[command(name = "maxtda", version, about = "Maximal persistence estimation and inference", args_override_self = true)]
struct Cli {
    /// Base seed of every random stream.
    #[arg(long, global = true, env = "MAXTDA_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Generate a reference data set.
    Gen(GenArgs),
    /// Smooth subsample from a KDE level set.
    Sample(SampleArgs),
    /// Persistence diagram of a point cloud.
    Diagram(DiagramArgs),
    /// Bottleneck distance between two diagrams.
    Bottleneck(BottleneckArgs),
    /// Maximal persistence of a diagram.
    Mp(MpArgs),
    /// Grid search for the subsampling threshold and bandwidth.
    SelectParams(SelectArgs),
    /// Bootstrap rejection band.
    Infer(InferArgs),
    /// Time-delay embedding of a series.
    Tde(TdeArgs),
    /// Periodicity score of a diagram.
    Score(ScoreArgs),
    /// Render a diagram as SVG.
    Plot(PlotArgs),
    /// Run a full reference experiment and keep every artifact.
    Reproduce(reproduce::ReproduceArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Dataset {
    TwoCircles,
    Ellipses3d,
    Rv,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SignalArg {
    Planet,
    Spot,
    Combined,
}

#[derive(Args, Debug, Serialize)]
struct GenArgs {
    dataset: Dataset,
    /// Multiplies every point count.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = SignalArg::Combined)]
    signal: SignalArg,
    /// Days per sample (rv only).
    #[arg(long, default_value_t = 1.0)]
    cadence: f64,
    /// Series length before scaling (rv only).
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1.0)]
    noise_sd: f64,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    sigma: f64,
    /// Points to draw (default: input size).
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PipelineKind {
    Vr,
    Dtm,
    Kde,
}

#[derive(Args, Debug, Clone, Serialize)]
struct PipelineArgs {
    #[arg(long, value_enum, default_value_t = PipelineKind::Kde)]
    pipeline: PipelineKind,
    /// Grid nodes per axis for the function pipelines.
    #[arg(long)]
    grid_res: Option<usize>,
    /// Rips truncation scale (default: cloud diameter).
    #[arg(long)]
    delta_max: Option<f64>,
    /// KDE bandwidth of the diagram filtration (default: the subsampling σ).
    #[arg(long)]
    bandwidth: Option<f64>,
    /// DTM mass parameter.
    #[arg(long, default_value_t = 0.1)]
    mass: f64,
}

impl PipelineArgs {
    fn pipeline(&self) -> Pipeline {
        match self.pipeline {
            PipelineKind::Vr => Pipeline::Vr { delta_max: self.delta_max },
            PipelineKind::Dtm => Pipeline::Dtm { m: self.mass, grid_res: self.grid_res },
            PipelineKind::Kde => Pipeline::Kde { bandwidth: self.bandwidth, grid_res: self.grid_res },
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct DiagramArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Output JSON (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct BottleneckArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Also write the value to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct MpArgs {
    diagram: PathBuf,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SelectArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Candidate density thresholds.
    #[arg(long, value_delimiter = ',')]
    lambdas: Vec<f64>,
    /// Candidate thresholds as quantiles of the KDE at the data, using the
    /// median bandwidth candidate.
    #[arg(long, value_delimiter = ',')]
    lambda_quantiles: Vec<f64>,
    /// Candidate bandwidths.
    #[arg(long, value_delimiter = ',')]
    sigmas: Vec<f64>,
    /// Bandwidth candidates as mean k-NN distances, used when no σ is given.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,5,10")]
    ks: Vec<usize>,
    /// Number of leading features scored.
    #[arg(long, default_value_t = 1)]
    top: usize,
    /// Feature weights; overrides --top.
    #[arg(long, value_delimiter = ',')]
    weights: Vec<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct InferArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Subsampling threshold; without it the data are used directly.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    /// Bootstrap replicates.
    #[arg(long = "N", default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Band JSON (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reference diagram JSON.
    #[arg(long)]
    diagram_out: Option<PathBuf>,
}

/// `auto` or a fixed positive integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AutoOr {
    Auto,
    Fixed(usize),
}

impl FromStr for AutoOr {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(AutoOr::Auto);
        }
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(AutoOr::Fixed(v)),
            _ => Err(format!("expected `auto` or a positive integer, got {s:?}")),
        }
    }
}

impl Serialize for AutoOr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AutoOr::Auto => s.serialize_str("auto"),
            AutoOr::Fixed(v) => s.serialize_u64(*v as u64),
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct TdeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Delay in samples.
    #[arg(long, default_value = "auto")]
    tau: AutoOr,
    /// Embedding dimension M + 1.
    #[arg(long, default_value = "auto")]
    dim: AutoOr,
    /// Project onto this many principal components.
    #[arg(long)]
    pca: Option<usize>,
    #[arg(long, default_value_t = 20)]
    tau_max: usize,
    #[arg(long, default_value_t = AMI_BINS)]
    bins: usize,
    #[arg(long, default_value_t = 12)]
    d_max: usize,
    #[arg(long, default_value_t = CAO_THRESHOLD)]
    threshold: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ScoreArgs {
    diagram: PathBuf,
    /// Divide by √3.
    #[arg(long)]
    normalized: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct PlotArgs {
    diagram: PathBuf,
    #[arg(long)]
    band: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

/// Inputs, outputs and results gathered while a command runs.
struct Session {
    seed: u64,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    results: Map<String, Value>,
    manifest_path: Option<PathBuf>,
}

impl Session {
    fn new(seed: u64) -> Self {
        Self { seed, inputs: Vec::new(), outputs: Vec::new(), results: Map::new(), manifest_path: None }
    }

    fn read(&mut self, path: &Path) -> CliResult<String> {
        self.inputs.push(path.to_path_buf());
        std::fs::read_to_string(path)
            .map_err(|e| Failure::Runtime(Error::Parse(format!("cannot read {}: {e}", path.display()))))
    }

    fn cloud(&mut self, path: &Path) -> CliResult<PointCloud> {
        let text = self.read(path)?;
        Ok(PointCloud::parse_csv(&text)?)
    }

    fn diagram(&mut self, path: &Path) -> CliResult<PersistenceDiagram> {
        let text = self.read(path)?;
        Ok(PersistenceDiagram::from_json(&text)?)
    }

    fn write(&mut self, path: &Path, contents: &str) -> CliResult<()> {
        std::fs::write(path, contents)
            .map_err(|e| Failure::Runtime(Error::Parse(format!("cannot write {}: {e}", path.display()))))?;
        if self.manifest_path.is_none() {
            let mut name = path.as_os_str().to_owned();
            name.push(".manifest.json");
            self.manifest_path = Some(PathBuf::from(name));
        }
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    fn note(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.into(), serde_json::to_value(value).expect("result serializes"));
    }
}

/// Prints a float in shortest round-trip form.
fn print_value(x: f64) -> String {
    format!("{x:?}")
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let start = Instant::now();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(f) => return report(&f),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.render().to_string();
            eprintln!("{}", text.lines().next().unwrap_or("error: bad arguments"));
            return 1;
        }
    };
    let mut session = Session::new(cli.seed);
    let outcome = match cli.jobs {
        Some(0) => Err(usage("--jobs must be at least 1")),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command, &mut session)),
            Err(e) => Err(Failure::Runtime(Error::InvalidParameter(e.to_string()))),
        },
        None => dispatch(&cli.command, &mut session),
    };
    if let Err(f) = outcome {
        return report(&f);
    }
    if let Some(path) = session.manifest_path.take() {
        let params = serde_json::to_value(&cli.command).expect("arguments serialize");
        let (command, parameters) = match params {
            Value::Object(m) if m.len() == 1 => m.into_iter().next().unwrap(),
            other => (String::new(), other),
        };
        let manifest = RunManifest {
            command,
            argv: argv[1..].to_vec(),
            parameters,
            seed: cli.seed,
            inputs: session.inputs,
            outputs: session.outputs,
            results: Value::Object(session.results),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_sec: start.elapsed().as_secs_f64(),
        };
        if let Err(e) = std::fs::write(&path, pretty(&manifest)) {
            eprintln!("error: cannot write manifest {}: {e}", path.display());
            return 2;
        }
    }
    0
}

fn report(f: &Failure) -> i32 {
    let msg = f.to_string().replace('\n', " ");
    eprintln!("error: {msg}");
    match f {
        Failure::Usage(_) => 1,
        Failure::Runtime(_) => 2,
    }
}

/// Splices flags from `--config` right after the subcommand name, so that
/// explicit flags, which come later, override them.
fn merge_config(argv: Vec<String>) -> CliResult<Vec<String>> {
    let mut config = None;
    let mut i = 1;
    while i < argv.len() {
        if argv[i] == "--config" {
            config = Some(argv.get(i + 1).ok_or_else(|| usage("--config needs a path"))?.clone());
            break;
        }
        if let Some(p) = argv[i].strip_prefix("--config=") {
            config = Some(p.to_string());
            break;
        }
        i += 1;
    }
    let Some(path) = config else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("cannot read config {path}: {e}")))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| usage(format!("config {path}: {e}")))?;
    let Value::Object(map) = value else {
        return Err(usage(format!("config {path} must be a JSON object")));
    };
    let mut extra = Vec::new();
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => extra.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => extra.extend([flag, s]),
            Value::Number(n) => extra.extend([flag, n.to_string()]),
            Value::Array(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|x| match x {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                extra.extend([flag, parts.join(",")]);
            }
            Value::Object(_) => return Err(usage(format!("config key {key:?} cannot be an object"))),
        }
    }
    let names: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
    let at = argv.iter().skip(1).position(|a| names.contains(a)).map(|p| p + 2).unwrap_or(argv.len());
    let mut merged = argv[..at].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&argv[at..]);
    Ok(merged)
}

fn dispatch(cmd: &Command, s: &mut Session) -> CliResult<()> {
    match cmd {
        Command::Gen(a) => cmd_gen(a, s),
        Command::Sample(a) => cmd_sample(a, s),
        Command::Diagram(a) => cmd_diagram(a, s),
        Command::Bottleneck(a) => {
            let (da, db) = (s.diagram(&a.a)?, s.diagram(&a.b)?);
            emit_value(bottleneck(&da, &db, a.dim)?, a.out.as_deref(), s)
        }
        Command::Mp(a) => {
            let d = s.diagram(&a.diagram)?;
            emit_value(max_persistence(&d, a.dim), a.out.as_deref(), s)
        }
        Command::SelectParams(a) => cmd_select(a, s),
        Command::Infer(a) => cmd_infer(a, s),
        Command::Tde(a) => cmd_tde(a, s),
        Command::Score(a) => {
            let d = s.diagram(&a.diagram)?;
            emit_value(periodicity_score(&d, a.normalized), a.out.as_deref(), s)
        }
        Command::Plot(a) => {
            let d = s.diagram(&a.diagram)?;
            let band = match &a.band {
                Some(p) => Some(parse_band(&s.read(p)?)?),
                None => None,
            };
            s.write(&a.out, &diagram_svg(&d, band.as_ref()))
        }
        Command::Reproduce(a) => reproduce::run(a, s),
    }
}

fn emit_value(x: f64, out: Option<&Path>, s: &mut Session) -> CliResult<()> {
    println!("{}", print_value(x));
    s.note("value", x);
    if let Some(p) = out {
        s.write(p, &format!("{}\n", print_value(x)))?;
    }
    Ok(())
}

fn emit_text(text: &str, out: Option<&Path>, s: &mut Session) -> CliResult<()> {
    match out {
        Some(p) => s.write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn positive(name: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be positive, got {x}")))
    }
}

fn check_alpha(alpha: f64) -> CliResult<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(usage(format!("--alpha must lie in (0, 1), got {alpha}")))
    }
}

fn cmd_gen(a: &GenArgs, s: &mut Session) -> CliResult<()> {
    positive("scale", a.scale)?;
    let text = match a.dataset {
        Dataset::TwoCircles => gen_two_circles(s.seed, a.scale)?.to_csv(),
        Dataset::Ellipses3d => gen_ellipses3d(s.seed, a.scale)?.to_csv(),
        Dataset::Rv => {
            let samples = ((a.samples as f64 * a.scale).round() as usize).max(2);
            let cfg = RvConfig { cadence: a.cadence, samples, noise_sd: a.noise_sd };
            let which = match a.signal {
                SignalArg::Planet => RvSignal::Planet,
                SignalArg::Spot => RvSignal::Spot,
                SignalArg::Combined => RvSignal::Combined,
            };
            gen_rv_series(s.seed, which, &cfg)?.to_csv()
        }
    };
    s.write(&a.out, &text)
}

fn cmd_sample(a: &SampleArgs, s: &mut Session) -> CliResult<()> {
    positive("sigma", a.sigma)?;
    let cloud = s.cloud(&a.input)?;
    let count = a.count.unwrap_or(cloud.len());
    let region = ProposalRegion::for_bandwidth(&cloud, a.sigma)?;
    let sampler = Subsampler::new(KdeModel::new(cloud, a.sigma)?, region)?;
    let sub = sampler.draw(a.lambda, count, &mut stream(s.seed, 0))?;
    s.note("envelope", sampler.envelope().gamma);
    s.write(&a.out, &sub.to_csv(None))
}

fn cmd_diagram(a: &DiagramArgs, s: &mut Session) -> CliResult<()> {
    if a.pipeline.pipeline == PipelineKind::Kde && a.pipeline.bandwidth.is_none() {
        return Err(usage("--pipeline kde needs --bandwidth"));
    }
    let cloud = s.cloud(&a.input)?;
    let d = a.pipeline.pipeline().diagram(&cloud, None)?;
    s.note("max_persistence_h1", max_persistence(&d, 1));
    emit_text(&format!("{}\n", d.to_json()), a.out.as_deref(), s)
}

fn cmd_select(a: &SelectArgs, s: &mut Session) -> CliResult<()> {
    let cloud = s.cloud(&a.input)?;
    let sigmas = if a.sigmas.is_empty() { mean_knn_distances(&cloud, &a.ks)? } else { a.sigmas.clone() };
    let mut lambdas = a.lambdas.clone();
    if !a.lambda_quantiles.is_empty() {
        let mut sorted = sigmas.clone();
        sorted.sort_by(f64::total_cmp);
        lambdas.extend(level_quantiles(&cloud, sorted[sorted.len() / 2], &a.lambda_quantiles)?);
    }
    if lambdas.is_empty() {
        return Err(usage("select-params needs --lambdas or --lambda-quantiles"));
    }
    let grid = if a.weights.is_empty() {
        ParameterGrid::new(lambdas, sigmas, a.top)?
    } else {
        ParameterGrid::with_weights(lambdas, sigmas, a.weights.clone())?
    };
    let count = a.count.unwrap_or(cloud.len());
    let sel = select_parameters(&cloud, &grid, &a.pipeline.pipeline(), a.dim, count, s.seed)?;
    println!("lambda {} sigma {} score {}", print_value(sel.lambda), print_value(sel.sigma), print_value(sel.score));
    s.note("lambda", sel.lambda);
    s.note("sigma", sel.sigma);
    s.note("score", sel.score);
    if let Some(p) = &a.out {
        s.write(p, &pretty(&sel))?;
    }
    Ok(())
}

fn cmd_infer(a: &InferArgs, s: &mut Session) -> CliResult<()> {
    check_alpha(a.alpha)?;
    if a.n == 0 {
        return Err(usage("--N must be at least 1"));
    }
    let level = match (a.lambda, a.sigma) {
        (Some(lambda), Some(sigma)) => {
            positive("sigma", sigma)?;
            Some((lambda, sigma))
        }
        (None, None) => None,
        _ => return Err(usage("--lambda and --sigma must be given together")),
    };
    let pipeline = a.pipeline.pipeline();
    if matches!(pipeline, Pipeline::Kde { bandwidth: None, .. }) && level.is_none() {
        return Err(usage("--pipeline kde without subsampling needs --bandwidth"));
    }
    let cloud = s.cloud(&a.input)?;
    let subsample = level.map(|(lambda, sigma)| SubsampleSpec { lambda, sigma, count: a.count.unwrap_or(cloud.len()) });
    let cfg = BootstrapConfig { pipeline, subsample, dim: a.dim, replicates: a.n, alpha: a.alpha, seed: s.seed };
    let result = bootstrap_talpha(&cloud, &cfg)?;
    let class = classify_features(&result.reference, &result.band);
    println!("t_alpha {}", print_value(result.band.t_alpha));
    println!("significant {}", class.significant.len());
    s.note("t_alpha", result.band.t_alpha);
    s.note("failed_replicates", result.failed);
    let pairs: Vec<[f64; 2]> = class.significant.iter().map(|p| [p.birth, p.death]).collect();
    s.note("significant", pairs);
    s.note("max_persistence", max_persistence(&result.reference, a.dim));
    if let Some(p) = &a.diagram_out {
        s.write(p, &format!("{}\n", result.reference.to_json()))?;
    }
    emit_text(&format!("{}\n", result.to_json()), a.out.as_deref(), s)
}

fn cmd_tde(a: &TdeArgs, s: &mut Session) -> CliResult<()> {
    let text = s.read(&a.input)?;
    let series = TimeSeries::parse_csv(&text)?;
    let tau = match a.tau {
        AutoOr::Fixed(t) => t,
        AutoOr::Auto => {
            let ami = ami_profile(&series, a.tau_max, a.bins)?;
            s.note("ami", &ami.values);
            s.note("ami_local_minimum", ami.local_minimum);
            ami.selected
        }
    };
    let dim = match a.dim {
        AutoOr::Fixed(d) => d,
        AutoOr::Auto => {
            let cao = cao_dimension(&series, tau, a.d_max, a.threshold)?;
            s.note("cao_e1", &cao.e1);
            s.note("cao_saturated", cao.saturated);
            cao.dimension
        }
    };
    let mut cloud = delay_embed(&series, EmbeddingConfig { tau, m: dim - 1 })?;
    if let Some(k) = a.pca {
        let pca = pca_project(&cloud, k)?;
        s.note("explained_variance", &pca.explained);
        cloud = pca.projected;
    }
    println!("tau {tau}");
    println!("dim {dim}");
    s.note("tau", tau);
    s.note("dim", dim);
    s.write(&a.out, &cloud.to_csv(None))
}

/// Formats a map of named values as `name value` lines.
fn kv_lines<K: Display>(items: &[(K, f64)]) -> String {
    items.iter().map(|(k, v)| format!("{k} {}\n", print_value(*v))).collect()
}
