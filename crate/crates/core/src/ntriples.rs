//! Streaming N-Triples reader.
//!
//! Supports the subset of the W3C grammar that matters for subsumption
//! graphs: IRIREF, BLANK_NODE_LABEL and STRING_LITERAL_QUOTE with an optional
//! datatype or language tag. Malformed lines are counted and skipped rather
//! than aborting the scan.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_LINE_LEN: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(String),
    /// Blank node label, without the `_:` prefix.
    Blank(String),
    Literal {
        lexical: String,
        datatype: Option<String>,
        lang: Option<String>,
    },
}

impl Term {
    /// Key used for interning: the bare IRI or `_:label`. Literals have none.
    pub fn node_key(&self) -> Option<String> {
        match self {
            Term::Iri(iri) => Some(iri.clone()),
            Term::Blank(label) => Some(format!("_:{label}")),
            Term::Literal { .. } => None,
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct ParseStats {
    pub lines: u64,
    pub triples: u64,
    pub malformed: u64,
    pub too_long: u64,
}

impl ParseStats {
    pub fn skipped(&self) -> u64 {
        self.malformed + self.too_long
    }

    pub fn merge(&mut self, other: &ParseStats) {
        self.lines += other.lines;
        self.triples += other.triples;
        self.malformed += other.malformed;
        self.too_long += other.too_long;
    }
}

/// Iterator over the triples of an N-Triples stream. Yields `Err` only for
/// I/O failures; everything recoverable ends up in [`ParseStats`].
pub struct NTriplesReader<R> {
    reader: R,
    buf: Vec<u8>,
    max_line_len: usize,
    stats: ParseStats,
    done: bool,
}

impl<R: BufRead> NTriplesReader<R> {
    pub fn new(reader: R) -> Self {
        Self::with_max_line_len(reader, DEFAULT_MAX_LINE_LEN)
    }

    pub fn with_max_line_len(reader: R, max_line_len: usize) -> Self {
        NTriplesReader {
            reader,
            buf: Vec::new(),
            max_line_len,
            stats: ParseStats::default(),
            done: false,
        }
    }

    pub fn set_max_line_len(&mut self, max_line_len: usize) {
        self.max_line_len = max_line_len;
    }

    pub fn stats(&self) -> ParseStats {
        self.stats
    }

    /// Reads one line into `self.buf`. Returns `Ok(None)` at end of input and
    /// `Ok(Some(false))` when the line was longer than the limit (its bytes are
    /// consumed and discarded).
    fn read_line(&mut self) -> io::Result<Option<bool>> {
        self.buf.clear();
        let mut overflow = false;
        let mut any = false;
        loop {
            let available = match self.reader.fill_buf() {
                Ok(b) => b,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e),
            };
            if available.is_empty() {
                return Ok(if any { Some(!overflow) } else { None });
            }
            any = true;
            let (chunk, found_newline) = match available.iter().position(|&b| b == b'\n') {
                Some(i) => (&available[..i], true),
                None => (available, false),
            };
            if !overflow {
                if self.buf.len() + chunk.len() > self.max_line_len {
                    overflow = true;
                    self.buf.clear();
                } else {
                    self.buf.extend_from_slice(chunk);
                }
            }
            let used = chunk.len() + usize::from(found_newline);
            self.reader.consume(used);
            if found_newline {
                return Ok(Some(!overflow));
            }
        }
    }
}

impl<R: BufRead> Iterator for NTriplesReader<R> {
    type Item = Result<Triple>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            let fits = match self.read_line() {
                Ok(Some(fits)) => fits,
                Ok(None) => {
                    self.done = true;
                    return None;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(Error::Io(e)));
                }
            };
            self.stats.lines += 1;
            if !fits {
                self.stats.too_long += 1;
                continue;
            }
            let Ok(line) = std::str::from_utf8(&self.buf) else {
                self.stats.malformed += 1;
                continue;
            };
            match parse_line(line) {
                Ok(Some(triple)) => {
                    self.stats.triples += 1;
                    return Some(Ok(triple));
                }
                Ok(None) => {}
                Err(Malformed) => self.stats.malformed += 1,
            }
        }
        None
    }
}

/// Wraps a byte stream, transparently gunzipping it when it starts with the
/// gzip magic bytes.
pub fn parse_ntriples<R: Read + 'static>(stream: R) -> Result<NTriplesReader<Box<dyn BufRead>>> {
    let mut reader = BufReader::new(stream);
    let gzipped = reader.fill_buf()?.starts_with(&[0x1f, 0x8b]);
    let inner: Box<dyn BufRead> = if gzipped {
        Box::new(BufReader::new(MultiGzDecoder::new(reader)))
    } else {
        Box::new(reader)
    };
    Ok(NTriplesReader::new(inner))
}

pub fn open_ntriples(path: &Path) -> Result<NTriplesReader<Box<dyn BufRead>>> {
    let file = File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    parse_ntriples(file)
}

/// A line that does not match the supported grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Malformed;

impl std::fmt::Display for Malformed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("malformed N-Triples line")
    }
}

impl std::error::Error for Malformed {}

/// Parses one line. `Ok(None)` for blank and comment lines.
pub fn parse_line(line: &str) -> std::result::Result<Option<Triple>, Malformed> {
    let mut cur = Cursor::new(line.trim_end_matches('\r'));
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        Some('_') => Term::Blank(cur.blank()?),
        _ => return Err(Malformed),
    };
    cur.require_ws()?;
    let predicate = cur.iri()?;
    cur.require_ws()?;
    let object = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        Some('_') => Term::Blank(cur.blank()?),
        Some('"') => cur.literal()?,
        _ => return Err(Malformed),
    };
    cur.skip_ws();
    if cur.bump() != Some('.') {
        return Err(Malformed);
    }
    cur.skip_ws();
    if !cur.at_end() && cur.peek() != Some('#') {
        return Err(Malformed);
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

struct Cursor<'a> {
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor { rest: s }
    }

    fn at_end(&self) -> bool {
        self.rest.is_empty()
    }

    fn peek(&self) -> Option<char> {
        self.rest.chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.rest = &self.rest[c.len_utf8()..];
        Some(c)
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t']);
    }

    fn require_ws(&mut self) -> std::result::Result<(), Malformed> {
        let before = self.rest.len();
        self.skip_ws();
        if self.rest.len() == before {
            Err(Malformed)
        } else {
            Ok(())
        }
    }

    fn iri(&mut self) -> std::result::Result<String, Malformed> {
        if self.bump() != Some('<') {
            return Err(Malformed);
        }
        let mut out = String::new();
        loop {
            match self.bump().ok_or(Malformed)? {
                '>' => break,
                '\\' => match self.bump().ok_or(Malformed)? {
                    'u' => out.push(self.hex_char(4)?),
                    'U' => out.push(self.hex_char(8)?),
                    _ => return Err(Malformed),
                },
                c if c <= ' ' || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(Malformed)
                }
                c => out.push(c),
            }
        }
        // absolute IRIs carry a scheme
        match out.find(':') {
            Some(i) if i > 0 => Ok(out),
            _ => Err(Malformed),
        }
    }

    fn blank(&mut self) -> std::result::Result<String, Malformed> {
        if !self.rest.starts_with("_:") {
            return Err(Malformed);
        }
        self.rest = &self.rest[2..];
        let end = self
            .rest
            .find(|c: char| !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.')))
            .unwrap_or(self.rest.len());
        let mut label = &self.rest[..end];
        // a trailing '.' terminates the statement, not the label
        while label.ends_with('.') {
            label = &label[..label.len() - 1];
        }
        if label.is_empty() {
            return Err(Malformed);
        }
        self.rest = &self.rest[label.len()..];
        Ok(label.to_owned())
    }

    fn literal(&mut self) -> std::result::Result<Term, Malformed> {
        if self.bump() != Some('"') {
            return Err(Malformed);
        }
        let mut lexical = String::new();
        loop {
            match self.bump().ok_or(Malformed)? {
                '"' => break,
                '\\' => {
                    let c = match self.bump().ok_or(Malformed)? {
                        't' => '\t',
                        'b' => '\u{8}',
                        'n' => '\n',
                        'r' => '\r',
                        'f' => '\u{c}',
                        '"' => '"',
                        '\'' => '\'',
                        '\\' => '\\',
                        'u' => self.hex_char(4)?,
                        'U' => self.hex_char(8)?,
                        _ => return Err(Malformed),
                    };
                    lexical.push(c);
                }
                '\n' | '\r' => return Err(Malformed),
                c => lexical.push(c),
            }
        }
        let mut datatype = None;
        let mut lang = None;
        if self.rest.starts_with("^^") {
            self.rest = &self.rest[2..];
            datatype = Some(self.iri()?);
        } else if self.rest.starts_with('@') {
            self.rest = &self.rest[1..];
            let end = self
                .rest
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                .unwrap_or(self.rest.len());
            if end == 0 {
                return Err(Malformed);
            }
            lang = Some(self.rest[..end].to_owned());
            self.rest = &self.rest[end..];
        }
        Ok(Term::Literal {
            lexical,
            datatype,
            lang,
        })
    }

    fn hex_char(&mut self, digits: usize) -> std::result::Result<char, Malformed> {
        if self.rest.len() < digits || !self.rest.is_char_boundary(digits) {
            return Err(Malformed);
        }
        let code = u32::from_str_radix(&self.rest[..digits], 16).map_err(|_| Malformed)?;
        self.rest = &self.rest[digits..];
        char::from_u32(code).ok_or(Malformed)
    }
}
