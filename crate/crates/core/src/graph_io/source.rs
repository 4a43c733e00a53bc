use std::fs::File;
use std::io::{BufRead, BufReader, Cursor as IoCursor};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::generate::GeneratedEdges;
use super::parse::{next_edge, ParseMode};
use super::{Edge, GeneratorSpec, GraphError, Interner};
use crate::stage::StreamItem;

#[derive(Debug, Clone)]
enum Origin {
    File(PathBuf),
    Text(Arc<str>),
    Generated(GeneratorSpec),
    Edges(Arc<[Edge]>),
}

/// A graph that can be streamed from the start any number of times.
///
/// Labels are interned into the source's own [`Interner`] on the first pass;
/// later passes resolve to the same ids. Only one replay can be open at a
/// time, which the `&mut self` receiver of [`EdgeSource::replay`] enforces.
#[derive(Debug, Clone)]
pub struct EdgeSource {
    origin: Origin,
    interner: Interner,
    mode: ParseMode,
    replays: u64,
}

impl EdgeSource {
    pub fn file(path: impl AsRef<Path>, mode: ParseMode) -> Self {
        Self::with_origin(Origin::File(path.as_ref().to_owned()), Interner::new(), mode)
    }

    /// In-memory edge-list text, parsed afresh on every replay.
    pub fn text(text: impl Into<Arc<str>>, mode: ParseMode) -> Self {
        Self::with_origin(Origin::Text(text.into()), Interner::new(), mode)
    }

    pub fn generated(spec: GeneratorSpec) -> Result<Self, GraphError> {
        spec.validate()?;
        Ok(Self::with_origin(Origin::Generated(spec), Interner::numeric(spec.n as usize), ParseMode::Simple))
    }

    /// Pre-built edges over numeric labels `0..max_id`.
    pub fn edges(edges: impl Into<Arc<[Edge]>>) -> Self {
        let edges: Arc<[Edge]> = edges.into();
        let n = edges.iter().map(|e| e.u.index().max(e.v.index()) + 1).max().unwrap_or(0);
        Self::with_origin(Origin::Edges(edges), Interner::numeric(n), ParseMode::Simple)
    }

    fn with_origin(origin: Origin, interner: Interner, mode: ParseMode) -> Self {
        EdgeSource { origin, interner, mode, replays: 0 }
    }

    pub fn interner(&self) -> &Interner {
        &self.interner
    }

    /// Number of replays opened so far.
    pub fn replay_count(&self) -> u64 {
        self.replays
    }

    /// Upper bound on |V| when it is known before reading, as for generators.
    pub fn known_vertex_count(&self) -> Option<usize> {
        match &self.origin {
            Origin::Generated(spec) => Some(spec.n as usize),
            Origin::Edges(_) => Some(self.interner.len()),
            Origin::File(_) | Origin::Text(_) => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.origin {
            Origin::File(p) => p.display().to_string(),
            Origin::Text(_) => "<text>".to_owned(),
            Origin::Generated(spec) => format!("{:?}(n={}, p={}, seed={})", spec.model, spec.n, spec.p, spec.seed),
            Origin::Edges(e) => format!("<{} edges>", e.len()),
        }
    }

    /// Opens a fresh pass: every edge in order, then one [`StreamItem::Eof`].
    pub fn replay(&mut self) -> Result<Replay<'_>, GraphError> {
        let cursor = self.open()?;
        Ok(Replay { source: self, cursor })
    }

    /// Reads one full pass into memory.
    pub fn collect_edges(&mut self) -> Result<Vec<Edge>, GraphError> {
        let mut edges = Vec::new();
        for item in self.replay()? {
            if let StreamItem::Edge(e) = item? {
                edges.push(e);
            }
        }
        Ok(edges)
    }

    pub(crate) fn open(&mut self) -> Result<ReplayCursor, GraphError> {
        let state = match &self.origin {
            Origin::File(path) => CursorState::Lines {
                reader: Box::new(BufReader::new(File::open(path)?)),
                lineno: 0,
                buf: String::new(),
            },
            Origin::Text(text) => CursorState::Lines {
                reader: Box::new(IoCursor::new(ArcStr(text.clone()))),
                lineno: 0,
                buf: String::new(),
            },
            Origin::Generated(spec) => CursorState::Generated(Box::new(spec.edges()?)),
            Origin::Edges(edges) => CursorState::Slice { edges: edges.clone(), pos: 0 },
        };
        self.replays += 1;
        Ok(ReplayCursor { state, finished: false })
    }

    pub(crate) fn advance(&mut self, cursor: &mut ReplayCursor) -> Option<Result<StreamItem, GraphError>> {
        if cursor.finished {
            return None;
        }
        let next = match &mut cursor.state {
            CursorState::Lines { reader, lineno, buf } => next_edge(reader, buf, lineno, &mut self.interner, self.mode),
            CursorState::Generated(gen) => Ok(gen.next()),
            CursorState::Slice { edges, pos } => {
                let e = edges.get(*pos).copied();
                *pos += 1;
                Ok(e)
            }
        };
        match next {
            Ok(Some(e)) => Some(Ok(StreamItem::Edge(e))),
            Ok(None) => {
                cursor.finished = true;
                Some(Ok(StreamItem::Eof))
            }
            Err(err) => {
                cursor.finished = true;
                Some(Err(err))
            }
        }
    }
}

struct ArcStr(Arc<str>);

impl AsRef<[u8]> for ArcStr {
    fn as_ref(&self) -> &[u8] {
        self.0.as_bytes()
    }
}

enum CursorState {
    Lines { reader: Box<dyn BufRead + Send>, lineno: usize, buf: String },
    Generated(Box<GeneratedEdges>),
    Slice { edges: Arc<[Edge]>, pos: usize },
}

/// Position within one pass over an [`EdgeSource`], detached from the borrow
/// of the source so a driver can own it across rounds.
pub(crate) struct ReplayCursor {
    state: CursorState,
    finished: bool,
}

/// One pass over an [`EdgeSource`].
pub struct Replay<'a> {
    source: &'a mut EdgeSource,
    cursor: ReplayCursor,
}

impl Iterator for Replay<'_> {
    type Item = Result<StreamItem, GraphError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.source.advance(&mut self.cursor)
    }
}
