use std::collections::VecDeque;

use super::{aggregate, Capacity, EngineError, PipelineResult, RunConfig, RunStats};
use crate::graph_io::NodeId;
use crate::metrics::StageView;
use crate::stage::{AdjacencySet, Role, StageRules, StageState, StreamItem};

/// What a stage looked like when it finished counting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageRecord {
    /// Position in the chain, which is also spawn order.
    pub id: usize,
    pub responsible: NodeId,
    /// Entries stored in the adjacency set.
    pub adjacency_len: usize,
    /// Edge occurrences the adjacency set remembers.
    pub absorbed: u64,
    pub local_count: u64,
    /// Full adjacency set, when the run was traced.
    pub adjacency: Option<AdjacencySet>,
}

pub(super) struct Slot {
    pub id: usize,
    /// `None` while a worker has the stage checked out.
    pub state: Option<StageState>,
    /// The channel feeding this stage.
    pub input: VecDeque<StreamItem>,
    /// Eofs forwarded downstream so far; a stage is finished after two.
    pub eofs_out: u8,
}

/// Outputs of a run of consecutive steps on one stage.
#[derive(Default)]
pub(super) struct Batch {
    /// Each emitted item with the role the stage had when it emitted it.
    pub emits: Vec<(Role, StreamItem)>,
    pub record: Option<StageRecord>,
    pub steps: u64,
}

type Stepped = (Option<(Role, StreamItem)>, Option<StageRecord>);

/// Applies one item to a stage, returning what it emits (tagged with the
/// role the stage had when it emitted) and, when the stage finishes
/// counting, its record.
///
/// A stage that died while still picking (first pass was empty) behaves as
/// the identity until it has forwarded the second pass's eof.
pub(super) fn step_one(
    id: usize,
    state: &mut StageState,
    eofs_out: &mut u8,
    item: StreamItem,
    rules: StageRules,
    trace: bool,
) -> Result<Stepped, EngineError> {
    let role = state.role();
    let mut record = None;
    let emitted = if role == Role::Dead && *eofs_out < 2 {
        Some(item)
    } else {
        if let (StageState::CountTriangles(counter), StreamItem::Eof) = (&*state, item) {
            record = Some(StageRecord {
                id,
                responsible: counter.adj.responsible(),
                adjacency_len: counter.adj.len(),
                absorbed: counter.adj.total_multiplicity(),
                local_count: counter.local_count,
                adjacency: trace.then(|| counter.adj.clone()),
            });
        }
        state.step(item, rules)?.emit_downstream
    };
    if emitted == Some(StreamItem::Eof) {
        *eofs_out += 1;
    }
    Ok((emitted.map(|out| (role, out)), record))
}

/// [`step_one`] over `items` in order.
pub(super) fn run_batch(
    id: usize,
    state: &mut StageState,
    eofs_out: &mut u8,
    items: impl IntoIterator<Item = StreamItem>,
    rules: StageRules,
    trace: bool,
) -> Result<Batch, EngineError> {
    let mut batch = Batch::default();
    for item in items {
        batch.steps += 1;
        let (emitted, record) = step_one(id, state, eofs_out, item, rules, trace)?;
        batch.emits.extend(emitted);
        if record.is_some() {
            batch.record = record;
        }
    }
    Ok(batch)
}

pub(super) struct Chain {
    pub slots: VecDeque<Slot>,
    next_id: usize,
    pub rules: StageRules,
    pub capacity: Capacity,
    pub trace: bool,
    /// Largest admissible stage count, |V| - 1, when |V| is known.
    stage_bound: Option<usize>,
    records: Vec<Option<StageRecord>>,
    pub stats: RunStats,
}

impl Chain {
    pub fn new(config: &RunConfig, vertex_count: Option<usize>) -> Self {
        let mut chain = Chain {
            slots: VecDeque::new(),
            next_id: 0,
            rules: config.rules(),
            capacity: config.channel_capacity,
            trace: config.trace,
            stage_bound: vertex_count.map(|v| v.saturating_sub(1)),
            records: Vec::new(),
            stats: RunStats::default(),
        };
        chain.push_slot(VecDeque::new());
        chain
    }

    fn push_slot(&mut self, input: VecDeque<StreamItem>) {
        self.slots.push_back(Slot { id: self.next_id, state: Some(StageState::PickResponsible), input, eofs_out: 0 });
        self.next_id += 1;
        self.records.push(None);
        self.stats.stages_spawned += 1;
        self.stats.max_live_stages = self.stats.max_live_stages.max(self.slots.len());
    }

    pub fn index_of(&self, id: usize) -> usize {
        id - self.slots.front().expect("stage id of an empty chain").id
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Items the stage at `idx` may emit before its output channel fills.
    /// A tail stage writes either to the sink or to a freshly spawned stage,
    /// so its allowance is one full channel.
    pub fn output_room(&self, idx: usize) -> usize {
        match self.slots.get(idx + 1) {
            Some(next) => self.capacity.room(next.input.len()),
            None => self.capacity.room(0),
        }
    }

    pub fn view(&self, idx: usize) -> StageView {
        let slot = &self.slots[idx];
        StageView { pending: slot.input.len(), output_room: self.output_room(idx), busy: slot.state.is_none() }
    }

    pub fn is_fireable(&self, idx: usize) -> bool {
        self.view(idx).is_fireable()
    }

    pub fn head_room(&self) -> usize {
        match self.slots.front() {
            Some(head) => self.capacity.room(head.input.len()),
            None => usize::MAX,
        }
    }

    /// Pushes a source item into the chain head.
    pub fn feed(&mut self, item: StreamItem) {
        self.stats.items_fed += 1;
        match self.slots.front_mut() {
            Some(head) => {
                head.input.push_back(item);
                let len = head.input.len();
                self.stats.max_channel_len = self.stats.max_channel_len.max(len);
            }
            None => self.sink(item),
        }
    }

    fn sink(&mut self, item: StreamItem) {
        match item {
            StreamItem::Eof => self.stats.sink_eofs += 1,
            StreamItem::Edge(_) if self.stats.sink_eofs == 0 => self.stats.sink_round1_edges += 1,
            StreamItem::Edge(_) => self.stats.sink_round2_edges += 1,
        }
    }

    /// Routes one output of stage `id`: to its successor, to a newly spawned
    /// stage when a collecting tail forwards an edge, or to the sink.
    pub fn deliver(&mut self, id: usize, role: Role, item: StreamItem) -> Result<(), EngineError> {
        let idx = self.index_of(id);
        if let Some(next) = self.slots.get_mut(idx + 1) {
            next.input.push_back(item);
            let len = next.input.len();
            self.stats.max_channel_len = self.stats.max_channel_len.max(len);
            return Ok(());
        }
        if role == Role::CollectAdjacent && matches!(item, StreamItem::Edge(_)) {
            let stages = self.next_id + 1;
            if let Some(bound) = self.stage_bound {
                if stages > bound {
                    return Err(EngineError::BoundExceeded { stages, bound });
                }
            }
            self.push_slot(VecDeque::from([item]));
            self.stats.max_channel_len = self.stats.max_channel_len.max(1);
            return Ok(());
        }
        self.sink(item);
        Ok(())
    }

    /// Returns a checked-out stage and routes its outputs.
    pub fn complete(&mut self, id: usize, state: StageState, eofs_out: u8, batch: Batch) -> Result<(), EngineError> {
        let idx = self.index_of(id);
        let slot = &mut self.slots[idx];
        debug_assert!(slot.state.is_none());
        slot.state = Some(state);
        slot.eofs_out = eofs_out;
        self.stats.activations += batch.steps;
        if let Some(record) = batch.record {
            self.records[id] = Some(record);
        }
        for (role, item) in batch.emits {
            self.deliver(id, role, item)?;
        }
        Ok(())
    }

    /// Steps the stage at `idx` once, in place.
    pub fn fire_one(&mut self, idx: usize) -> Result<(), EngineError> {
        let slot = &mut self.slots[idx];
        let id = slot.id;
        let item = slot.input.pop_front().expect("fired a stage with no input");
        let state = slot.state.as_mut().expect("stage is checked out");
        let (emitted, record) = step_one(id, state, &mut slot.eofs_out, item, self.rules, self.trace)?;
        self.stats.activations += 1;
        if let Some(record) = record {
            self.records[id] = Some(record);
        }
        if let Some((role, item)) = emitted {
            self.deliver(id, role, item)?;
        }
        Ok(())
    }

    /// Drops finished stages from the front of the chain.
    pub fn reap(&mut self) {
        while let Some(front) = self.slots.front() {
            let finished = front.eofs_out >= 2
                && front.input.is_empty()
                && matches!(front.state, Some(StageState::Dead(_)));
            if !finished {
                break;
            }
            self.slots.pop_front();
        }
    }

    pub fn finish(self) -> (PipelineResult, Vec<StageRecord>, RunStats) {
        let records: Vec<StageRecord> = self.records.into_iter().flatten().collect();
        let counts: Vec<(NodeId, u64)> = records.iter().map(|r| (r.responsible, r.local_count)).collect();
        (aggregate(&counts), records, self.stats)
    }
}
