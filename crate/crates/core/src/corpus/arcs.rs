//! Adapter for the syntactic-ngram "arcs" format.
//!
//! Each line is `head_word<TAB>ngram<TAB>total_count<TAB>year,count...` where
//! the ngram is a space-separated list of `word/POS/deplabel/head-index`
//! tokens and head indices are 1-based (0 marks the root). Year columns are
//! ignored: the total count already aggregates them.

use std::fs;
use std::path::Path;

use super::lexicon::GenderLexicon;
use super::table::{parse_canonical_line, Aggregator, Collocation, CountTable, Relation};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MalformedLine(pub String);

struct Token<'a> {
    word: &'a str,
    label: &'a str,
    head: usize,
}

fn parse_token(tok: &str) -> Option<Token<'_>> {
    // Words may themselves contain '/', so split from the right.
    let mut parts = tok.rsplitn(4, '/');
    let head = parts.next()?.parse().ok()?;
    let label = parts.next()?;
    let _pos = parts.next()?;
    let word = parts.next()?;
    if word.is_empty() || label.is_empty() {
        return None;
    }
    Some(Token { word, label, head })
}

/// Extracts every gendered (noun, neighbor) arc from one line.
///
/// For `amod` the noun is the head and the adjective the dependent; for
/// `nsubj` and `dobj` the noun is the dependent and the verb its head.
pub fn parse_arcs_line(line: &str, lex: &GenderLexicon) -> std::result::Result<Vec<Collocation>, MalformedLine> {
    let malformed = |why: &str| MalformedLine(why.to_string());
    let fields: Vec<&str> = line.trim_end_matches(['\r', '\n']).split('\t').collect();
    if fields.len() < 3 {
        return Err(malformed("fewer than three fields"));
    }
    let count: u64 = fields[2].trim().parse().map_err(|_| malformed("bad total count"))?;
    let tokens = fields[1]
        .split_whitespace()
        .map(parse_token)
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| malformed("token is not word/pos/dep/head"))?;
    if tokens.is_empty() {
        return Err(malformed("empty ngram"));
    }
    if tokens.iter().any(|t| t.head > tokens.len()) {
        return Err(malformed("head index out of range"));
    }

    let mut out = Vec::new();
    for tok in &tokens {
        let Ok(relation) = tok.label.parse::<Relation>() else {
            continue;
        };
        if tok.head == 0 {
            continue;
        }
        let head = &tokens[tok.head - 1];
        let (noun, neighbor) = match relation {
            Relation::Amod => (head.word, tok.word),
            Relation::Nsubj | Relation::Dobj => (tok.word, head.word),
        };
        let noun = noun.to_lowercase();
        if !lex.contains(&noun) {
            continue;
        }
        out.push(Collocation {
            noun,
            neighbor: neighbor.to_lowercase(),
            relation,
            count,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    Arcs,
    Canonical,
}

impl InputFormat {
    /// Guesses the format from the first non-empty line.
    pub fn detect(text: &str) -> InputFormat {
        let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
        let fields: Vec<&str> = first.split('\t').collect();
        if fields.len() == 4 && fields[0].parse::<Relation>().is_ok() && !fields[1].contains('/') {
            InputFormat::Canonical
        } else {
            InputFormat::Arcs
        }
    }
}

/// Bulk ingest state: one aggregator per relation plus line counters.
#[derive(Clone, Debug, Default)]
pub struct Ingest {
    aggregators: [Aggregator; 3],
    pub lines: u64,
    pub malformed: u64,
    pub records: u64,
}

impl Ingest {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, c: Collocation) {
        self.records += 1;
        let slot = Relation::ALL.iter().position(|&r| r == c.relation).unwrap();
        self.aggregators[slot].add(&c.neighbor, &c.noun, c.count);
    }

    pub fn arcs_line(&mut self, line: &str, lex: &GenderLexicon) {
        if line.trim().is_empty() {
            return;
        }
        self.lines += 1;
        match parse_arcs_line(line, lex) {
            Ok(records) => records.into_iter().for_each(|c| self.push(c)),
            Err(MalformedLine(why)) => {
                log::debug!("skipping malformed line ({why}): {line:?}");
                self.malformed += 1;
            }
        }
    }

    /// Canonical lines naming a noun outside the lexicon are dropped; lines
    /// that do not parse are counted as malformed.
    pub fn canonical_line(&mut self, line: &str, lex: &GenderLexicon) {
        if line.trim().is_empty() {
            return;
        }
        self.lines += 1;
        match parse_canonical_line(line.trim_end_matches('\r')) {
            Ok(c) if lex.contains(&c.noun) => self.push(c),
            Ok(_) => {}
            Err(why) => {
                log::debug!("skipping malformed line ({why}): {line:?}");
                self.malformed += 1;
            }
        }
    }

    pub fn text(&mut self, text: &str, format: InputFormat, lex: &GenderLexicon) {
        for line in text.lines() {
            match format {
                InputFormat::Arcs => self.arcs_line(line, lex),
                InputFormat::Canonical => self.canonical_line(line, lex),
            }
        }
    }

    pub fn file(&mut self, path: &Path, format: Option<InputFormat>, lex: &GenderLexicon) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let format = format.unwrap_or_else(|| InputFormat::detect(&text));
        self.text(&text, format, lex);
        Ok(())
    }

    /// Associative merge of two partial ingests.
    pub fn merge(&mut self, other: Ingest) {
        for (mine, theirs) in self.aggregators.iter_mut().zip(other.aggregators) {
            mine.merge(theirs);
        }
        self.lines += other.lines;
        self.malformed += other.malformed;
        self.records += other.records;
    }

    pub fn is_empty(&self) -> bool {
        self.aggregators.iter().all(Aggregator::is_empty)
    }

    /// The table for `relation`, or `None` when no pair of that type was seen.
    pub fn table(&self, relation: Relation) -> Option<CountTable> {
        let slot = Relation::ALL.iter().position(|&r| r == relation).unwrap();
        self.aggregators[slot].clone().finish(relation).ok()
    }
}
