//! Drives the stage chain over two passes of an edge stream.
//!
//! The chain starts with a single picking stage. Whenever the last stage is
//! collecting and forwards an edge, a fresh picking stage is appended to take
//! it, so the chain never holds more than |V| - 1 stages. The first pass ends
//! with every collecting stage turned into a counting stage; the second pass
//! ends with every stage dead and reaped, leaving an empty chain.
//!
//! Two schedulers drive the same chain: a single-threaded lockstep loop that
//! can also record a parallelism profile, and a pool of worker threads that
//! check stages out of a shared run queue. Both produce identical results.

mod chain;
mod cooperative;
mod feed;
mod threaded;

use std::fmt;
use std::num::NonZeroUsize;

use crate::graph_io::{EdgeSource, GraphError, Interner, NodeId};
use crate::metrics::ParallelismProfile;
use crate::stage::{AdjacencyMode, AdjacencySet, MultisetRule, StageError, StageRules};

pub use chain::StageRecord;

/// Capacity of every inter-stage channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    Bounded(NonZeroUsize),
    Unbounded,
}

impl Capacity {
    pub const DEFAULT: Capacity = Capacity::Bounded(match NonZeroUsize::new(1024) {
        Some(n) => n,
        None => unreachable!(),
    });

    /// Bounded capacity; `None` for zero.
    pub fn bounded(n: usize) -> Option<Self> {
        NonZeroUsize::new(n).map(Capacity::Bounded)
    }

    /// Free slots in a channel currently holding `len` items.
    pub fn room(self, len: usize) -> usize {
        match self {
            Capacity::Bounded(cap) => cap.get().saturating_sub(len),
            Capacity::Unbounded => usize::MAX,
        }
    }
}

impl Default for Capacity {
    fn default() -> Self {
        Capacity::DEFAULT
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Bounded(n) => write!(f, "{n}"),
            Capacity::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheduler {
    /// One thread steps every ready stage in lockstep sweeps.
    #[default]
    Cooperative,
    /// `k` worker threads pull ready stages from a shared queue.
    Threads(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunConfig {
    pub mode: AdjacencyMode,
    pub multiset_rule: MultisetRule,
    pub scheduler: Scheduler,
    pub channel_capacity: Capacity,
    /// Record a parallelism profile. Cooperative scheduler only.
    pub profile: bool,
    /// Keep every stage's adjacency set in the report, for invariant checks.
    pub trace: bool,
}

impl RunConfig {
    pub fn rules(&self) -> StageRules {
        StageRules { mode: self.mode, multiset_rule: self.multiset_rule }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.scheduler == Scheduler::Threads(0) {
            return Err(EngineError::InvalidConfig("threads(k) needs k >= 1".into()));
        }
        if self.profile && self.scheduler != Scheduler::Cooperative {
            return Err(EngineError::InvalidConfig(
                "parallelism profiles are only defined under the cooperative scheduler".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Source(#[from] GraphError),
    #[error(transparent)]
    Stage(#[from] StageError),
    #[error("ProtocolViolation: {0}")]
    Protocol(&'static str),
    #[error("BoundExceeded: spawning stage {stages} exceeds |V| - 1 = {bound}")]
    BoundExceeded { stages: usize, bound: usize },
    #[error("Deadlock: no stage can fire but the chain is not finished")]
    Deadlock,
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
}

/// Per-responsible triangle counts in chain order, and their sum.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PipelineResult {
    pub per_responsible: Vec<(NodeId, u64)>,
    pub total: u64,
}

impl PipelineResult {
    /// `label: count` lines followed by `total: n`.
    pub fn render(&self, interner: &Interner) -> String {
        let mut out = String::new();
        for (node, count) in &self.per_responsible {
            out.push_str(&format!("{}: {}\n", interner.label(*node), count));
        }
        out.push_str(&format!("total: {}", self.total));
        out
    }
}

/// Sums per-stage counts, keeping the sequence for reporting.
pub fn aggregate(results: &[(NodeId, u64)]) -> PipelineResult {
    PipelineResult { per_responsible: results.to_vec(), total: results.iter().map(|(_, c)| c).sum() }
}

/// The dying-stage relay reading of aggregation: each stage adds its count to
/// the partial sum handed over by its upstream neighbour.
pub fn running_total(results: &[(NodeId, u64)]) -> u64 {
    results.iter().fold(0, |carried, (_, c)| carried + c)
}

/// Counters gathered while driving the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunStats {
    pub stages_spawned: usize,
    pub max_live_stages: usize,
    /// Items pushed into the chain head (both passes, eofs included).
    pub items_fed: u64,
    /// Individual stage steps.
    pub activations: u64,
    /// Lockstep sweeps; zero under the threaded scheduler.
    pub sweeps: u64,
    pub sink_round1_edges: u64,
    pub sink_round2_edges: u64,
    pub sink_eofs: u64,
    /// Largest channel occupancy observed.
    pub max_channel_len: usize,
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub result: PipelineResult,
    /// One record per stage that claimed a responsible node, in chain order.
    pub stages: Vec<StageRecord>,
    pub stats: RunStats,
    pub profile: Option<ParallelismProfile>,
}

impl RunReport {
    /// Total adjacency entries held across stages at the end of the first pass.
    pub fn adjacency_storage(&self) -> usize {
        self.stages.iter().map(|s| s.adjacency_len).sum()
    }

    pub fn adjacency(&self, stage: usize) -> Option<&AdjacencySet> {
        self.stages.get(stage).and_then(|s| s.adjacency.as_ref())
    }
}

/// Runs both passes of `source` through a fresh chain.
pub fn run_two_rounds(source: &mut EdgeSource, config: &RunConfig) -> Result<RunReport, EngineError> {
    config.validate()?;
    let bound = source.known_vertex_count();
    let chain = chain::Chain::new(config, bound);
    let feed = feed::Feed::new(source);
    match config.scheduler {
        Scheduler::Cooperative => cooperative::run(chain, feed, config.profile),
        Scheduler::Threads(k) => threaded::run(chain, feed, k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_io::{Edge, GeneratorSpec, ParseMode};

    fn n(x: u32) -> NodeId {
        NodeId(x)
    }

    fn all_configs() -> Vec<RunConfig> {
        let mut out = Vec::new();
        for scheduler in [Scheduler::Cooperative, Scheduler::Threads(1), Scheduler::Threads(3)] {
            for cap in [Capacity::bounded(1).unwrap(), Capacity::DEFAULT, Capacity::Unbounded] {
                out.push(RunConfig { scheduler, channel_capacity: cap, trace: true, ..RunConfig::default() });
            }
        }
        out
    }

    #[test]
    fn k3_trace() {
        for config in all_configs() {
            let mut src = EdgeSource::edges(vec![Edge::of(1, 2), Edge::of(1, 3), Edge::of(2, 3)]);
            let report = run_two_rounds(&mut src, &config).unwrap();
            assert_eq!(report.result.per_responsible, vec![(n(1), 1), (n(2), 0)], "{config:?}");
            assert_eq!(report.result.total, 1);
            assert_eq!(report.stats.stages_spawned, 2);
            assert_eq!(report.stats.sink_round1_edges, 0);
            assert_eq!(report.stats.sink_round2_edges, 3);
            assert_eq!(report.stats.sink_eofs, 2);
            let first: Vec<_> = report.adjacency(0).unwrap().members().collect();
            assert_eq!(first, vec![n(3), n(2)]);
        }
    }

    #[test]
    fn text_source_labels() {
        let mut src = EdgeSource::text("a b\na c\nb c\n", ParseMode::Simple);
        let report = run_two_rounds(&mut src, &RunConfig::default()).unwrap();
        assert_eq!(report.result.render(src.interner()), "a: 1\nb: 0\ntotal: 1");
    }

    #[test]
    fn path_has_no_triangles() {
        let mut src = EdgeSource::generated(GeneratorSpec::path(5)).unwrap();
        let report = run_two_rounds(&mut src, &RunConfig::default()).unwrap();
        assert_eq!(report.result.total, 0);
        assert_eq!(report.result.per_responsible.len(), 4);
        assert!(report.result.per_responsible.iter().all(|&(_, c)| c == 0));
    }

    #[test]
    fn complete5() {
        let mut src = EdgeSource::generated(GeneratorSpec::complete(5)).unwrap();
        let report = run_two_rounds(&mut src, &RunConfig::default()).unwrap();
        assert_eq!(report.result.total, 10);
        assert_eq!(report.stats.stages_spawned, 4);
    }

    #[test]
    fn empty_graph_has_no_stages() {
        for config in all_configs() {
            let mut src = EdgeSource::text("# empty\n", ParseMode::Simple);
            let report = run_two_rounds(&mut src, &config).unwrap();
            assert_eq!(report.result, PipelineResult::default());
            assert!(report.stages.is_empty());
            assert_eq!(report.stats.sink_eofs, 2);
        }
    }

    #[test]
    fn star_centre_first_uses_one_stage() {
        let mut src = EdgeSource::generated(GeneratorSpec::star(20)).unwrap();
        let report = run_two_rounds(&mut src, &RunConfig::default()).unwrap();
        assert_eq!(report.stats.stages_spawned, 1);
        assert_eq!(report.adjacency_storage(), 19);
    }

    #[test]
    fn parse_error_aborts_run() {
        for scheduler in [Scheduler::Cooperative, Scheduler::Threads(2)] {
            let mut src = EdgeSource::text("a b\nb c d\n", ParseMode::Simple);
            let config = RunConfig { scheduler, ..RunConfig::default() };
            let err = run_two_rounds(&mut src, &config).unwrap_err();
            assert!(matches!(err, EngineError::Source(GraphError::MalformedLine { line: 2, .. })), "{err}");
        }
    }

    #[test]
    fn bad_configs_rejected() {
        let mut src = EdgeSource::generated(GeneratorSpec::complete(3)).unwrap();
        let threads0 = RunConfig { scheduler: Scheduler::Threads(0), ..RunConfig::default() };
        assert!(matches!(run_two_rounds(&mut src, &threads0), Err(EngineError::InvalidConfig(_))));
        let profiled = RunConfig { scheduler: Scheduler::Threads(2), profile: true, ..RunConfig::default() };
        assert!(matches!(run_two_rounds(&mut src, &profiled), Err(EngineError::InvalidConfig(_))));
        assert_eq!(Capacity::bounded(0), None);
    }

    #[test]
    fn aggregation_variants() {
        let seq = [(n(1), 3), (n(4), 0), (n(2), 1)];
        assert_eq!(aggregate(&seq).total, 4);
        assert_eq!(running_total(&seq), 4);
        assert_eq!(aggregate(&[]).total, 0);
        assert_eq!(aggregate(&seq).per_responsible, seq.to_vec());
    }

    #[test]
    fn step_budget_is_linear_in_stages_times_items() {
        let mut src = EdgeSource::generated(GeneratorSpec::gnp(60, 0.2, 5)).unwrap();
        let m = src.collect_edges().unwrap().len() as u64;
        let report = run_two_rounds(&mut src, &RunConfig::default()).unwrap();
        let stages = report.stats.stages_spawned as u64;
        assert!(report.stats.activations <= 2 * (m + 1) * (stages + 1), "{:?}", report.stats);
        assert!(report.stats.sweeps <= 2 * (m + 1) + stages + 2, "{:?}", report.stats);
    }
}
