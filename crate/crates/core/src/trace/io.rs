use std::io::{BufRead, Write};
use std::path::Path;

use super::{Letter, Trace, TraceSet};
use crate::ltl::Prop;

#[derive(Debug, thiserror::Error)]
pub enum TraceFormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl TraceFormatError {
    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            TraceFormatError::Malformed { message, .. } => TraceFormatError::Malformed { line, message },
            other => other,
        }
    }
}

fn malformed(message: impl Into<String>) -> TraceFormatError {
    TraceFormatError::Malformed {
        line: 1,
        message: message.into(),
    }
}

fn parse_letter(s: &str) -> Result<Letter, TraceFormatError> {
    let s = s.trim();
    if s == "-" {
        return Ok(Letter::empty());
    }
    if s.is_empty() {
        return Err(malformed("empty letter (write '-' for the empty set)"));
    }
    let props = s
        .split(',')
        .map(|p| Prop::new(p.trim()).map_err(|e| malformed(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Letter::new(props))
}

/// Parses one trace: letters separated by `;`, propositions by `,`, `-` for ∅.
pub fn parse_trace(line: &str) -> Result<Trace, TraceFormatError> {
    let line = line.trim();
    if line.is_empty() {
        return Err(malformed("empty trace"));
    }
    let letters = line.split(';').map(parse_letter).collect::<Result<Vec<_>, _>>()?;
    Trace::new(letters).map_err(|e| malformed(e.to_string()))
}

/// Parses a whole trace file. Blank lines and `#` comments are skipped.
pub fn parse_traces(text: &str) -> Result<TraceSet, TraceFormatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_trace(line).map_err(|e| e.at_line(i + 1))?);
    }
    Ok(out.into_iter().collect())
}

pub fn read_traces<R: BufRead>(mut r: R) -> Result<TraceSet, TraceFormatError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    parse_traces(&text)
}

pub fn load_traces(path: impl AsRef<Path>) -> Result<TraceSet, TraceFormatError> {
    parse_traces(&std::fs::read_to_string(path)?)
}

pub fn write_traces<W: Write>(mut w: W, set: &TraceSet) -> std::io::Result<()> {
    for s in set {
        writeln!(w, "{s}")?;
    }
    Ok(())
}

pub fn save_traces(path: impl AsRef<Path>, set: &TraceSet) -> std::io::Result<()> {
    let mut buf = Vec::new();
    write_traces(&mut buf, set)?;
    std::fs::write(path, buf)
}
