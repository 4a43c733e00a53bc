use super::EngineError;
use crate::graph_io::{EdgeSource, ReplayCursor};
use crate::stage::StreamItem;

/// Concatenation of two replays of a source: the input of the chain head.
pub(super) struct Feed<'a> {
    source: &'a mut EdgeSource,
    cursor: Option<ReplayCursor>,
    passes_done: u8,
}

impl<'a> Feed<'a> {
    pub fn new(source: &'a mut EdgeSource) -> Self {
        Feed { source, cursor: None, passes_done: 0 }
    }

    /// Pass currently being streamed: 1, or 2 once the first pass's eof is out.
    pub fn round(&self) -> u8 {
        (self.passes_done + 1).min(2)
    }

    pub fn is_done(&self) -> bool {
        self.passes_done >= 2
    }

    pub fn next_item(&mut self) -> Option<Result<StreamItem, EngineError>> {
        if self.is_done() {
            return None;
        }
        let cursor = match &mut self.cursor {
            Some(c) => c,
            None => match self.source.open() {
                Ok(c) => self.cursor.insert(c),
                Err(e) => return Some(Err(e.into())),
            },
        };
        match self.source.advance(cursor) {
            Some(Ok(StreamItem::Eof)) => {
                if self.source.advance(cursor).is_some() {
                    return Some(Err(EngineError::Protocol("source yielded items after its eof")));
                }
                self.cursor = None;
                self.passes_done += 1;
                Some(Ok(StreamItem::Eof))
            }
            Some(Ok(item)) => Some(Ok(item)),
            Some(Err(e)) => Some(Err(e.into())),
            None => Some(Err(EngineError::Protocol("source ended without an eof"))),
        }
    }
}
