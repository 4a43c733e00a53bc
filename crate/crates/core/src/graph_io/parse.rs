use std::io::{self, BufRead, Write};

use super::{Edge, GraphError, Interner};

/// How the parser treats a line whose two tokens are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Self-loops are an input error.
    #[default]
    Simple,
    /// Self-loops are dropped; they can never be part of a triangle.
    Lenient,
}

/// Parses one line of the edge-list format. Blank lines and lines whose first
/// non-blank character is `#` yield `Ok(None)`.
pub fn parse_line(
    line: &str,
    lineno: usize,
    interner: &mut Interner,
    mode: ParseMode,
) -> Result<Option<Edge>, GraphError> {
    let trimmed = line.trim_start();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let mut tokens = trimmed.split_whitespace();
    let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
        (Some(a), Some(b), None) => (a, b),
        _ => {
            return Err(GraphError::MalformedLine {
                line: lineno,
                tokens: trimmed.split_whitespace().count(),
            })
        }
    };
    if a == b {
        return match mode {
            ParseMode::Simple => Err(GraphError::SelfLoop { line: lineno }),
            ParseMode::Lenient => Ok(None),
        };
    }
    Ok(Some(Edge::new(interner.intern(a), interner.intern(b))))
}

/// Lazily parsed edges of a line-oriented reader, in file order.
pub struct EdgeLines<'a, R> {
    reader: R,
    interner: &'a mut Interner,
    mode: ParseMode,
    lineno: usize,
    buf: String,
    failed: bool,
}

pub fn parse_edge_list<R: BufRead>(reader: R, interner: &mut Interner, mode: ParseMode) -> EdgeLines<'_, R> {
    EdgeLines { reader, interner, mode, lineno: 0, buf: String::new(), failed: false }
}

impl<R: BufRead> Iterator for EdgeLines<'_, R> {
    type Item = Result<Edge, GraphError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let result = next_edge(&mut self.reader, &mut self.buf, &mut self.lineno, self.interner, self.mode);
        match result {
            Ok(Some(e)) => Some(Ok(e)),
            Ok(None) => None,
            Err(err) => {
                self.failed = true;
                Some(Err(err))
            }
        }
    }
}

/// Reads lines until one holds an edge. `Ok(None)` at end of input.
pub(super) fn next_edge<R: BufRead + ?Sized>(
    reader: &mut R,
    buf: &mut String,
    lineno: &mut usize,
    interner: &mut Interner,
    mode: ParseMode,
) -> Result<Option<Edge>, GraphError> {
    loop {
        buf.clear();
        if reader.read_line(buf)? == 0 {
            return Ok(None);
        }
        *lineno += 1;
        if let Some(edge) = parse_line(buf, *lineno, interner, mode)? {
            return Ok(Some(edge));
        }
    }
}

/// Writes `edges` in the text format, one `u v` line per edge.
pub fn write_edge_list<'e, W: Write>(
    mut out: W,
    edges: impl IntoIterator<Item = &'e Edge>,
    interner: &Interner,
) -> io::Result<()> {
    for e in edges {
        writeln!(out, "{} {}", interner.label(e.u), interner.label(e.v))?;
    }
    out.flush()
}
