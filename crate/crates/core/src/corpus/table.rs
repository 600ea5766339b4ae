use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::lexicon::{Gender, GenderLexicon};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Amod,
    Nsubj,
    Dobj,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::Amod, Relation::Nsubj, Relation::Dobj];

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Amod => "amod",
            Relation::Nsubj => "nsubj",
            Relation::Dobj => "dobj",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "amod" => Ok(Relation::Amod),
            "nsubj" => Ok(Relation::Nsubj),
            "dobj" => Ok(Relation::Dobj),
            other => Err(format!("unsupported relation `{other}`")),
        }
    }
}

/// One observed (noun, neighbor) pair with its frequency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collocation {
    pub noun: String,
    pub neighbor: String,
    pub relation: Relation,
    pub count: u64,
}

/// Order-independent accumulator of collocation counts for one relation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Aggregator {
    counts: BTreeMap<(String, String), u64>,
}

impl Aggregator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, neighbor: &str, noun: &str, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry((neighbor.to_string(), noun.to_string())).or_insert(0) += count;
    }

    pub fn merge(&mut self, other: Aggregator) {
        for ((nb, noun), c) in other.counts {
            *self.counts.entry((nb, noun)).or_insert(0) += c;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn finish(self, relation: Relation) -> Result<CountTable> {
        CountTable::from_map(relation, self.counts)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub neighbor: usize,
    pub noun: usize,
    pub count: u64,
}

/// Sparse counts #(neighbor, noun form) for a single dependency relation.
///
/// Neighbors and noun forms are sorted lexicographically; cells are sorted by
/// (neighbor, noun) and never hold a zero count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    relation: Relation,
    neighbors: Vec<String>,
    nouns: Vec<String>,
    cells: Vec<Cell>,
    total: u64,
}

impl CountTable {
    fn from_map(relation: Relation, counts: BTreeMap<(String, String), u64>) -> Result<Self> {
        let counts: BTreeMap<_, _> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        if counts.is_empty() {
            return Err(Error::EmptyTable);
        }
        let mut neighbors: Vec<String> = counts.keys().map(|(nb, _)| nb.clone()).collect();
        neighbors.dedup();
        let mut nouns: Vec<String> = counts.keys().map(|(_, n)| n.clone()).collect();
        nouns.sort();
        nouns.dedup();

        let cells: Vec<Cell> = counts
            .iter()
            .map(|((nb, n), &c)| Cell {
                neighbor: neighbors.binary_search(nb).expect("neighbor indexed"),
                noun: nouns.binary_search(n).expect("noun indexed"),
                count: c,
            })
            .collect();
        let total = cells.iter().map(|c| c.count).sum();
        Ok(CountTable {
            relation,
            neighbors,
            nouns,
            cells,
            total,
        })
    }

    /// Sums counts per (neighbor, noun) over records of `relation`; records of
    /// other relations are ignored.
    pub fn aggregate<I>(records: I, relation: Relation) -> Result<Self>
    where
        I: IntoIterator<Item = Collocation>,
    {
        let mut agg = Aggregator::new();
        for r in records.into_iter().filter(|r| r.relation == relation) {
            agg.add(&r.neighbor, &r.noun, r.count);
        }
        agg.finish(relation)
    }

    pub fn merge(&self, other: &CountTable) -> Result<CountTable> {
        if self.relation != other.relation {
            return Err(Error::InvalidArgument(format!(
                "cannot merge {} and {} tables",
                self.relation, other.relation
            )));
        }
        let mut agg = self.to_aggregator();
        agg.merge(other.to_aggregator());
        agg.finish(self.relation)
    }

    pub fn to_aggregator(&self) -> Aggregator {
        let mut agg = Aggregator::new();
        for c in &self.cells {
            agg.add(&self.neighbors[c.neighbor], &self.nouns[c.noun], c.count);
        }
        agg
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn neighbors(&self) -> &[String] {
        &self.neighbors
    }

    pub fn nouns(&self) -> &[String] {
        &self.nouns
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn neighbor_index(&self, neighbor: &str) -> Option<usize> {
        self.neighbors.binary_search_by(|n| n.as_str().cmp(neighbor)).ok()
    }

    pub fn count(&self, neighbor: &str, noun: &str) -> u64 {
        let (Some(nb), Ok(n)) = (
            self.neighbor_index(neighbor),
            self.nouns.binary_search_by(|x| x.as_str().cmp(noun)),
        ) else {
            return 0;
        };
        self.cells
            .binary_search_by(|c| (c.neighbor, c.noun).cmp(&(nb, n)))
            .map(|i| self.cells[i].count)
            .unwrap_or(0)
    }

    /// Empirical joint p̂(ν, n) for every non-zero cell.
    pub fn empirical(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let total = self.total as f64;
        self.cells
            .iter()
            .map(move |c| (c.neighbor, c.noun, c.count as f64 / total))
    }

    pub fn neighbor_totals(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.neighbors.len()];
        for c in &self.cells {
            out[c.neighbor] += c.count;
        }
        out
    }

    pub fn noun_totals(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.nouns.len()];
        for c in &self.cells {
            out[c.noun] += c.count;
        }
        out
    }

    /// Fails on the first noun form missing from the lexicon.
    pub fn validate(&self, lex: &GenderLexicon) -> Result<()> {
        match self.nouns.iter().find(|n| !lex.contains(n)) {
            Some(n) => Err(Error::UnknownForm(n.clone())),
            None => Ok(()),
        }
    }

    /// Canonical TSV: `relation<TAB>noun_form<TAB>neighbor_lemma<TAB>count`.
    pub fn to_canonical_tsv(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                self.relation, self.nouns[c.noun], self.neighbors[c.neighbor], c.count
            ));
        }
        out
    }

    pub fn write_canonical(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_canonical_tsv().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    /// SHA-256 of the canonical serialization.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical_tsv().as_bytes()))
    }
}

pub fn parse_canonical_line(line: &str) -> std::result::Result<Collocation, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 4 {
        return Err(format!("expected 4 fields, found {}", fields.len()));
    }
    let relation: Relation = fields[0].trim().parse()?;
    let count: u64 = fields[3]
        .trim()
        .parse()
        .map_err(|_| format!("bad count `{}`", fields[3]))?;
    let noun = fields[1].trim().to_lowercase();
    let neighbor = fields[2].trim().to_lowercase();
    if noun.is_empty() || neighbor.is_empty() {
        return Err("empty noun or neighbor".into());
    }
    Ok(Collocation {
        noun,
        neighbor,
        relation,
        count,
    })
}

pub fn read_canonical(path: impl AsRef<Path>) -> Result<Vec<Collocation>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_canonical_line(l.trim_end_matches('\r')).map_err(|m| Error::parse(path, i + 1, m)))
        .collect()
}

/// Loads a canonical TSV file into the table for `relation`.
pub fn load_count_table(path: impl AsRef<Path>, relation: Relation) -> Result<CountTable> {
    CountTable::aggregate(read_canonical(path)?, relation)
}

/// Total counts per gender; both genders are always present in the result.
pub fn gender_marginals(table: &CountTable, lex: &GenderLexicon) -> BTreeMap<Gender, u64> {
    let mut out: BTreeMap<Gender, u64> = Gender::ALL.iter().map(|&g| (g, 0)).collect();
    let noun_totals = table.noun_totals();
    for (noun, total) in table.nouns().iter().zip(noun_totals) {
        if let Some(g) = lex.gender_of(noun) {
            *out.get_mut(&g).unwrap() += total;
        }
    }
    out
}
