//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a run or verification fails an
//! invariant, 2 on usage or input errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::baseline_mr::{compare_volumes, VolumeReport};
use crate::engine::{run_two_rounds, Capacity, EngineError, RunConfig, Scheduler};
use crate::graph_io::{generate, write_edge_list, EdgeSource, GeneratorSpec, GraphError, Interner, Model, ParseMode};
use crate::metrics::export_profile;
use crate::stage::{AdjacencyMode, MultisetRule};
use crate::verify::verify;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "tripipe", version, about = "Two-pass pipeline triangle counting over edge streams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count triangles.
    Count {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// Write a parallelism profile CSV (cooperative scheduler only).
        #[arg(long, value_name = "PATH")]
        profile: Option<PathBuf>,
        /// Print every stage's responsible node and local count.
        #[arg(long)]
        per_responsible: bool,
    },
    /// Write a synthetic graph as an edge list.
    Generate {
        #[arg(long, value_enum)]
        model: GenModel,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(short = 'o', long = "output", value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Check the pipeline's invariants and compare it against the oracles.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Compare MapReduce 2-path volume with pipeline adjacency storage (CSV).
    Baseline {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Record the parallelism profile of a cooperative run.
    Profile {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Set)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = RuleArg::Product)]
        multiset_rule: RuleArg,
        /// Channel capacity: a positive integer or `unbounded`.
        #[arg(long, default_value = "1024", value_parser = parse_capacity)]
        capacity: Capacity,
        #[arg(short = 'o', long = "output", value_name = "PATH")]
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenModel {
    Complete,
    Path,
    Cycle,
    Star,
    Gnp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Set,
    List,
    Multiset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    PaperMin,
    Product,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Edge-list file.
    #[arg(long, value_name = "PATH", conflicts_with = "gen", required_unless_present = "gen")]
    pub input: Option<PathBuf>,
    /// Generate the input instead of reading a file.
    #[arg(long, value_enum, requires = "n")]
    pub gen: Option<GenModel>,
    #[arg(long, requires = "gen")]
    pub n: Option<u32>,
    #[arg(long, requires = "gen")]
    pub p: Option<f64>,
    #[arg(long, requires = "gen")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Set)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = RuleArg::Product)]
    pub multiset_rule: RuleArg,
    /// Worker threads.
    #[arg(long, value_name = "K", conflicts_with = "cooperative")]
    pub threads: Option<usize>,
    /// Single-threaded lockstep scheduler (the default).
    #[arg(long)]
    pub cooperative: bool,
    /// Channel capacity: a positive integer or `unbounded`.
    #[arg(long, default_value = "1024", value_parser = parse_capacity)]
    pub capacity: Capacity,
}

fn parse_capacity(s: &str) -> Result<Capacity, String> {
    if s.eq_ignore_ascii_case("unbounded") {
        return Ok(Capacity::Unbounded);
    }
    let n: usize = s.parse().map_err(|_| format!("expected a positive integer or `unbounded`, got `{s}`"))?;
    Capacity::bounded(n).ok_or_else(|| "capacity must be at least 1".to_owned())
}

impl From<ModeArg> for AdjacencyMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Set => AdjacencyMode::Set,
            ModeArg::List => AdjacencyMode::List,
            ModeArg::Multiset => AdjacencyMode::Multiset,
        }
    }
}

impl From<RuleArg> for MultisetRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::PaperMin => MultisetRule::PaperMin,
            RuleArg::Product => MultisetRule::Product,
        }
    }
}

fn generator_spec(model: GenModel, n: u32, p: Option<f64>, seed: u64) -> Result<GeneratorSpec, CliError> {
    let spec = match model {
        GenModel::Complete => GeneratorSpec::complete(n),
        GenModel::Path => GeneratorSpec::path(n),
        GenModel::Cycle => GeneratorSpec::cycle(n),
        GenModel::Star => GeneratorSpec::star(n),
        GenModel::Gnp => {
            let p = p.ok_or_else(|| CliError::Usage("--p is required for gnp".into()))?;
            GeneratorSpec::gnp(n, p, seed)
        }
    };
    spec.validate()?;
    Ok(spec)
}

impl InputArgs {
    fn open(&self, mode: AdjacencyMode) -> Result<(EdgeSource, String), CliError> {
        let parse = if mode == AdjacencyMode::Multiset { ParseMode::Lenient } else { ParseMode::Simple };
        match (&self.input, self.gen) {
            (Some(path), None) => {
                // Fail on unreadable files before any work starts.
                File::open(path).map_err(GraphError::from)?;
                Ok((EdgeSource::file(path, parse), path.display().to_string()))
            }
            (None, Some(model)) => {
                let n = self.n.ok_or_else(|| CliError::Usage("--n is required with --gen".into()))?;
                let spec = generator_spec(model, n, self.p, self.seed.unwrap_or(0))?;
                let id = match spec.model {
                    Model::Gnp => format!("gnp(n={n} p={} seed={})", spec.p, spec.seed),
                    other => format!("{}(n={n})", format!("{other:?}").to_lowercase()),
                };
                Ok((EdgeSource::generated(spec)?, id))
            }
            _ => Err(CliError::Usage("give exactly one of --input or --gen".into())),
        }
    }
}

impl EngineArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            mode: self.mode.into(),
            multiset_rule: self.multiset_rule.into(),
            scheduler: match self.threads {
                Some(k) => Scheduler::Threads(k),
                None => Scheduler::Cooperative,
            },
            channel_capacity: self.capacity,
            profile: false,
            trace: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Input(#[from] GraphError),
    #[error(transparent)]
    Engine(EngineError),
    #[error("{0}")]
    Failed(String),
    #[error("IoFailure: {0}")]
    Io(#[from] io::Error),
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Source(g) => CliError::Input(g),
            EngineError::InvalidConfig(msg) => CliError::Usage(msg),
            other => CliError::Engine(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Engine(_) | CliError::Failed(_) => EXIT_FAILURE,
        }
    }
}

/// Parses `args` and runs the command, writing reports to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Count { input, engine, profile, per_responsible } => {
            let mut config = engine.config();
            if profile.is_some() {
                if engine.threads.is_some() {
                    return Err(CliError::Usage("--profile needs the cooperative scheduler".into()));
                }
                config.profile = true;
            }
            let (mut source, _) = input.open(config.mode)?;
            config.validate()?;
            let report = run_two_rounds(&mut source, &config)?;
            if let (Some(path), Some(p)) = (&profile, &report.profile) {
                export_profile(p, path)?;
            }
            if per_responsible {
                writeln!(out, "{}", report.result.render(source.interner()))?;
            } else {
                writeln!(out, "triangles: {}", report.result.total)?;
            }
            Ok(())
        }
        Command::Generate { model, n, p, seed, output } => {
            let spec = generator_spec(model, n, p, seed)?;
            let edges = generate(&spec)?;
            let labels = Interner::numeric(spec.n as usize);
            match output {
                Some(path) => write_edge_list(BufWriter::new(File::create(path)?), &edges, &labels)?,
                None => write_edge_list(&mut *out, &edges, &labels)?,
            }
            Ok(())
        }
        Command::Verify { input, engine } => {
            let config = engine.config();
            config.validate()?;
            let (mut source, _) = input.open(config.mode)?;
            let report = verify(&mut source, &config)?;
            for check in &report.checks {
                writeln!(out, "{check}")?;
            }
            writeln!(out, "total: {}", report.run.result.total)?;
            match report.first_failure() {
                None => Ok(()),
                Some(check) => Err(CliError::Failed(format!("verification failed: {check}"))),
            }
        }
        Command::Baseline { input } => {
            let (mut source, id) = input.open(AdjacencyMode::Set)?;
            let edges = source.collect_edges()?;
            let report = compare_volumes(&id, &edges)?;
            writeln!(out, "{}", VolumeReport::CSV_HEADER)?;
            writeln!(out, "{}", report.csv_row())?;
            if !report.triangles_agree() {
                return Err(CliError::Failed(format!(
                    "MapReduce simulation found {} triangles, pipeline {}",
                    report.mr_triangles, report.pipeline_triangles
                )));
            }
            Ok(())
        }
        Command::Profile { input, mode, multiset_rule, capacity, output } => {
            let config = RunConfig {
                mode: mode.into(),
                multiset_rule: multiset_rule.into(),
                scheduler: Scheduler::Cooperative,
                channel_capacity: capacity,
                profile: true,
                trace: false,
            };
            let (mut source, _) = input.open(config.mode)?;
            let report = run_two_rounds(&mut source, &config)?;
            let profile = report.profile.unwrap_or_default();
            export_profile(&profile, &output)?;
            writeln!(out, "steps: {}", profile.len())?;
            writeln!(out, "max_fireable: {}", profile.max_fireable())?;
            writeln!(out, "stages: {}", report.stages.len())?;
            writeln!(out, "triangles: {}", report.result.total)?;
            Ok(())
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(err) => {
            let _ = out.flush();
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
