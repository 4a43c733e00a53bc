//! Role automaton of a single pipeline stage.
//!
//! A stage starts as [`StageState::PickResponsible`]. The first edge `(a, b)`
//! it receives makes `a` its responsible node and turns it into
//! [`StageState::CollectAdjacent`], which absorbs every later edge incident
//! to `a` and forwards the rest. The end of the first pass turns it into
//! [`StageState::CountTriangles`]: during the second pass it forwards every
//! edge, counting those whose endpoints are both in its adjacency set, and
//! reports its count when the second pass ends.
//!
//! Everything here is a pure transition on owned values; channels, spawning
//! and scheduling live in [`crate::engine`].

use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::graph_io::{Edge, NodeId};

/// One item on a round channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamItem {
    Edge(Edge),
    /// End of one pass over the edge stream.
    Eof,
}

/// How a collecting stage stores the neighbours it absorbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdjacencyMode {
    /// Every arrival is prepended, duplicates included.
    List,
    /// Union; duplicate input edges are counted once.
    #[default]
    Set,
    /// Each neighbour carries the number of times its edge arrived.
    Multiset,
}

/// Triangles closed by one occurrence of a closing edge in multiset mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MultisetRule {
    /// `min(mult(a), mult(b))`.
    PaperMin,
    /// `mult(a) * mult(b)`: one triangle per distinct triple of edge occurrences.
    #[default]
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StageRules {
    pub mode: AdjacencyMode,
    pub multiset_rule: MultisetRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    PickResponsible = 0,
    CollectAdjacent = 1,
    CountTriangles = 2,
    Dead = 3,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Role::PickResponsible => "pick-responsible",
            Role::CollectAdjacent => "collect-adjacent",
            Role::CountTriangles => "count-triangles",
            Role::Dead => "dead",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StageError {
    #[error("ProtocolViolation: {role} stage received {item:?}: {detail}")]
    ProtocolViolation { role: Role, item: StreamItem, detail: &'static str },
}

/// Neighbours of a responsible node collected by one stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencySet {
    responsible: NodeId,
    mode: AdjacencyMode,
    /// Arrival order. Distinct entries except in list mode.
    order: Vec<NodeId>,
    mult: FxHashMap<NodeId, u64>,
}

impl AdjacencySet {
    pub fn new(responsible: NodeId, mode: AdjacencyMode) -> Self {
        AdjacencySet { responsible, mode, order: Vec::new(), mult: FxHashMap::default() }
    }

    pub fn with_members(responsible: NodeId, mode: AdjacencyMode, members: impl IntoIterator<Item = NodeId>) -> Self {
        let mut adj = Self::new(responsible, mode);
        for m in members {
            adj.insert(m);
        }
        adj
    }

    pub fn responsible(&self) -> NodeId {
        self.responsible
    }

    pub fn mode(&self) -> AdjacencyMode {
        self.mode
    }

    pub fn insert(&mut self, node: NodeId) {
        debug_assert_ne!(node, self.responsible);
        let count = self.mult.entry(node).or_insert(0);
        let fresh = *count == 0;
        match self.mode {
            AdjacencyMode::List => {
                *count += 1;
                self.order.push(node);
            }
            AdjacencyMode::Set => {
                *count = 1;
                if fresh {
                    self.order.push(node);
                }
            }
            AdjacencyMode::Multiset => {
                *count += 1;
                if fresh {
                    self.order.push(node);
                }
            }
        }
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.mult.contains_key(&node)
    }

    pub fn multiplicity(&self, node: NodeId) -> u64 {
        self.mult.get(&node).copied().unwrap_or(0)
    }

    /// Members, most recent arrival first.
    pub fn members(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.order.iter().rev().copied()
    }

    /// Stored entries: list length in list mode, distinct members otherwise.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn distinct_len(&self) -> usize {
        self.mult.len()
    }

    /// Sum of multiplicities, i.e. the number of absorbed edge occurrences
    /// this set remembers.
    pub fn total_multiplicity(&self) -> u64 {
        self.mult.values().sum()
    }
}

/// Count-phase payload: the collected adjacency and the running count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleCounter {
    pub adj: AdjacencySet,
    pub local_count: u64,
    /// Closing edges already counted; only kept in set mode so that repeated
    /// input lines do not close the same wedge twice.
    closed: Option<FxHashSet<(NodeId, NodeId)>>,
}

impl TriangleCounter {
    pub fn new(adj: AdjacencySet) -> Self {
        let closed = (adj.mode == AdjacencyMode::Set).then(FxHashSet::default);
        TriangleCounter { adj, local_count: 0, closed }
    }

    pub fn with_count(adj: AdjacencySet, local_count: u64) -> Self {
        TriangleCounter { local_count, ..Self::new(adj) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum StageState {
    #[default]
    PickResponsible,
    CollectAdjacent(AdjacencySet),
    CountTriangles(TriangleCounter),
    Dead(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepOutput {
    pub emit_downstream: Option<StreamItem>,
    /// Local count, present only when a counting stage dies.
    pub emit_result: Option<u64>,
    /// Set when a picking stage has just claimed its first edge.
    pub spawn_request: bool,
}

impl StepOutput {
    fn forward(item: StreamItem) -> Self {
        StepOutput { emit_downstream: Some(item), ..Self::default() }
    }
}

impl StageState {
    pub fn role(&self) -> Role {
        match self {
            StageState::PickResponsible => Role::PickResponsible,
            StageState::CollectAdjacent(_) => Role::CollectAdjacent,
            StageState::CountTriangles(_) => Role::CountTriangles,
            StageState::Dead(_) => Role::Dead,
        }
    }

    pub fn responsible(&self) -> Option<NodeId> {
        match self {
            StageState::CollectAdjacent(adj) => Some(adj.responsible),
            StageState::CountTriangles(c) => Some(c.adj.responsible),
            _ => None,
        }
    }

    pub fn adjacency(&self) -> Option<&AdjacencySet> {
        match self {
            StageState::CollectAdjacent(adj) => Some(adj),
            StageState::CountTriangles(c) => Some(&c.adj),
            _ => None,
        }
    }

    /// Applies one input item in place.
    pub fn step(&mut self, item: StreamItem, rules: StageRules) -> Result<StepOutput, StageError> {
        match self {
            StageState::PickResponsible => match item {
                StreamItem::Edge(e) => {
                    *self = StageState::CollectAdjacent(AdjacencySet::with_members(e.u, rules.mode, [e.v]));
                    Ok(StepOutput { spawn_request: true, ..StepOutput::default() })
                }
                StreamItem::Eof => {
                    *self = StageState::Dead(0);
                    Ok(StepOutput::forward(StreamItem::Eof))
                }
            },
            StageState::CollectAdjacent(adj) => match item {
                StreamItem::Edge(e) => match e.other(adj.responsible) {
                    Some(s) => {
                        adj.insert(s);
                        Ok(StepOutput::default())
                    }
                    None => Ok(StepOutput::forward(item)),
                },
                StreamItem::Eof => {
                    let StageState::CollectAdjacent(adj) = std::mem::take(self) else { unreachable!() };
                    *self = StageState::CountTriangles(TriangleCounter::new(adj));
                    Ok(StepOutput::forward(StreamItem::Eof))
                }
            },
            StageState::CountTriangles(counter) => match item {
                StreamItem::Edge(e) => {
                    if counter.adj.contains(e.u) && counter.adj.contains(e.v) {
                        let first = counter.closed.as_mut().is_none_or(|closed| closed.insert(e.key()));
                        if first {
                            counter.local_count += closure_increment(&counter.adj, e, rules.multiset_rule);
                        }
                    }
                    Ok(StepOutput::forward(item))
                }
                StreamItem::Eof => {
                    let count = counter.local_count;
                    *self = StageState::Dead(count);
                    Ok(StepOutput { emit_downstream: Some(StreamItem::Eof), emit_result: Some(count), spawn_request: false })
                }
            },
            StageState::Dead(_) => Err(StageError::ProtocolViolation {
                role: Role::Dead,
                item,
                detail: "item after the stage consumed its final eof",
            }),
        }
    }
}

fn expect_role(state: &StageState, role: Role, item: StreamItem) -> Result<(), StageError> {
    if state.role() == role {
        Ok(())
    } else {
        Err(StageError::ProtocolViolation { role: state.role(), item, detail: "step applied to a stage in another role" })
    }
}

/// Transition of a picking stage.
pub fn step_pick(
    mut state: StageState,
    item: StreamItem,
    rules: StageRules,
) -> Result<(StageState, StepOutput), StageError> {
    expect_role(&state, Role::PickResponsible, item)?;
    let out = state.step(item, rules)?;
    Ok((state, out))
}

/// Transition of a collecting stage.
pub fn step_collect(
    mut state: StageState,
    item: StreamItem,
    rules: StageRules,
) -> Result<(StageState, StepOutput), StageError> {
    expect_role(&state, Role::CollectAdjacent, item)?;
    let out = state.step(item, rules)?;
    Ok((state, out))
}

/// Transition of a counting stage.
pub fn step_count(
    mut state: StageState,
    item: StreamItem,
    rules: StageRules,
) -> Result<(StageState, StepOutput), StageError> {
    expect_role(&state, Role::CountTriangles, item)?;
    let out = state.step(item, rules)?;
    Ok((state, out))
}

/// Triangles closed by one occurrence of `e`, whose endpoints must both be in `adj`.
pub fn closure_increment(adj: &AdjacencySet, e: Edge, rule: MultisetRule) -> u64 {
    debug_assert!(adj.contains(e.u) && adj.contains(e.v));
    match adj.mode {
        AdjacencyMode::List | AdjacencyMode::Set => 1,
        AdjacencyMode::Multiset => {
            let (a, b) = (adj.multiplicity(e.u), adj.multiplicity(e.v));
            match rule {
                MultisetRule::PaperMin => a.min(b),
                MultisetRule::Product => a * b,
            }
        }
    }
}
