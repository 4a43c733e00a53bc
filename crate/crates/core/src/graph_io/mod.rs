//! Edge-list input: node labels, edges, the text format, synthetic
//! generators, and replayable edge sources.

mod generate;
mod parse;
mod source;

use std::collections::HashMap;
use std::fmt;

pub use generate::{generate, with_duplicates, GeneratedEdges, GeneratorSpec, Model};
pub use parse::{parse_edge_list, parse_line, write_edge_list, EdgeLines, ParseMode};
pub(crate) use source::ReplayCursor;
pub use source::{EdgeSource, Replay};

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("MalformedLine {line}: expected 2 tokens, found {tokens}")]
    MalformedLine { line: usize, tokens: usize },
    #[error("SelfLoop {line}: both endpoints are the same node")]
    SelfLoop { line: usize },
    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),
    #[error("IoFailure: {0}")]
    IoFailure(#[from] std::io::Error),
}

impl GraphError {
    /// Line number for parse errors, 1-based.
    pub fn line(&self) -> Option<usize> {
        match self {
            GraphError::MalformedLine { line, .. } | GraphError::SelfLoop { line } => Some(*line),
            _ => None,
        }
    }
}

/// Dense id for an interned node label.
///
/// Only equality is meaningful to the counting algorithm; the ordering exists
/// so ids can key ordered collections in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Maps opaque label tokens to dense [`NodeId`]s in first-seen order.
#[derive(Debug, Clone, Default)]
pub struct Interner {
    ids: HashMap<String, NodeId>,
    labels: Vec<String>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interner pre-seeded with labels `"0"..n`, so that `NodeId(i)` prints as `i`.
    pub fn numeric(n: usize) -> Self {
        let mut interner = Self::new();
        for i in 0..n {
            interner.intern(&i.to_string());
        }
        interner
    }

    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = NodeId(u32::try_from(self.labels.len()).expect("more than u32::MAX node labels"));
        self.ids.insert(label.to_owned(), id);
        self.labels.push(label.to_owned());
        id
    }

    pub fn get(&self, label: &str) -> Option<NodeId> {
        self.ids.get(label).copied()
    }

    /// Label for `id`. Panics if `id` was not produced by this interner.
    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id.index()]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// An undirected edge as it appears on the stream.
///
/// `Edge { u, v }` and `Edge { u: v, v: u }` denote the same graph edge, but
/// the orientation is kept because the first endpoint is the one a fresh
/// stage claims as responsible. Derived equality is therefore structural;
/// use [`Edge::key`] for undirected identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
}

impl Edge {
    pub fn new(u: NodeId, v: NodeId) -> Self {
        debug_assert_ne!(u, v, "self-loop edge");
        Edge { u, v }
    }

    /// Shorthand for numeric ids, mostly for tests and generators.
    pub fn of(u: u32, v: u32) -> Self {
        Edge::new(NodeId(u), NodeId(v))
    }

    /// Orientation-free key: the endpoints in ascending id order.
    pub fn key(self) -> (NodeId, NodeId) {
        if self.u <= self.v {
            (self.u, self.v)
        } else {
            (self.v, self.u)
        }
    }

    pub fn touches(self, n: NodeId) -> bool {
        self.u == n || self.v == n
    }

    /// The endpoint that is not `n`, if `n` is an endpoint.
    pub fn other(self, n: NodeId) -> Option<NodeId> {
        if self.u == n {
            Some(self.v)
        } else if self.v == n {
            Some(self.u)
        } else {
            None
        }
    }

    pub fn reversed(self) -> Self {
        Edge { u: self.v, v: self.u }
    }
}

/// Distinct undirected edges of `edges`, in first-occurrence order.
pub fn dedup_edges(edges: &[Edge]) -> Vec<Edge> {
    let mut seen = std::collections::HashSet::with_capacity(edges.len());
    edges.iter().copied().filter(|e| seen.insert(e.key())).collect()
}

/// Number of distinct endpoints appearing in `edges`.
pub fn vertex_count(edges: &[Edge]) -> usize {
    let mut seen = std::collections::HashSet::new();
    for e in edges {
        seen.insert(e.u);
        seen.insert(e.v);
    }
    seen.len()
}
