use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ADJECTIVE_SENSES: [&str; 13] = [
    "behavior",
    "body",
    "feeling",
    "mind",
    "miscellaneous",
    "motion",
    "perception",
    "quantity",
    "social",
    "spatial",
    "substance",
    "temporal",
    "weather",
];

pub const VERB_SENSES: [&str; 15] = [
    "body",
    "change",
    "cognition",
    "communication",
    "competition",
    "consumption",
    "contact",
    "creation",
    "emotion",
    "motion",
    "perception",
    "possession",
    "social",
    "stative",
    "weather",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SenseKind {
    Adj,
    Verb,
}

impl SenseKind {
    pub fn senses(self) -> &'static [&'static str] {
        match self {
            SenseKind::Adj => &ADJECTIVE_SENSES,
            SenseKind::Verb => &VERB_SENSES,
        }
    }

    pub fn sense_index(self, name: &str) -> Option<usize> {
        let name = name.to_ascii_lowercase();
        self.senses().iter().position(|s| *s == name)
    }
}

impl fmt::Display for SenseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SenseKind::Adj => "adj",
            SenseKind::Verb => "verb",
        })
    }
}

impl FromStr for SenseKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "adj" | "adjective" => Ok(SenseKind::Adj),
            "verb" => Ok(SenseKind::Verb),
            other => Err(format!("unknown sense inventory kind `{other}`")),
        }
    }
}

/// Per-word distributions over the supersenses of one part of speech.
#[derive(Clone, Debug, PartialEq)]
pub struct SenseInventory {
    kind: SenseKind,
    words: BTreeMap<String, Vec<f64>>,
    duplicates: usize,
}

impl SenseInventory {
    pub fn new(kind: SenseKind) -> Self {
        SenseInventory {
            kind,
            words: BTreeMap::new(),
            duplicates: 0,
        }
    }

    /// Adds `word` with unnormalized sense weights.
    pub fn insert(&mut self, word: &str, weights: &[(&str, f64)]) -> Result<()> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument(format!("empty sense list for `{word}`")));
        }
        let mut dist = vec![0.0; self.kind.senses().len()];
        for &(sense, w) in weights {
            let idx = self
                .kind
                .sense_index(sense)
                .ok_or_else(|| Error::UnknownSense(sense.to_string()))?;
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidArgument(format!("bad weight {w} for `{word}`")));
            }
            dist[idx] += w;
        }
        let total: f64 = dist.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidArgument(format!("all-zero sense weights for `{word}`")));
        }
        dist.iter_mut().for_each(|x| *x /= total);
        let word = word.to_lowercase();
        if self.words.insert(word.clone(), dist).is_some() {
            log::warn!("duplicate sense entry for `{word}`; keeping the last one");
            self.duplicates += 1;
        }
        Ok(())
    }

    /// Parses `word<TAB>sense:weight,sense:weight,...` rows.
    pub fn parse(text: &str, kind: SenseKind, origin: &Path) -> Result<Self> {
        let mut inv = SenseInventory::new(kind);
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (word, list) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, i + 1, "expected word<TAB>senses"))?;
            let mut weights = Vec::new();
            for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (sense, w) = item
                    .split_once(':')
                    .ok_or_else(|| Error::parse(origin, i + 1, format!("expected sense:weight, got `{item}`")))?;
                let w: f64 = w
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(origin, i + 1, format!("bad weight `{w}`")))?;
                weights.push((sense.trim(), w));
            }
            inv.insert(word.trim(), &weights)?;
        }
        Ok(inv)
    }

    pub fn kind(&self) -> SenseKind {
        self.kind
    }

    pub fn senses(&self) -> &'static [&'static str] {
        self.kind.senses()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.words
            .get(word)
            .or_else(|| self.words.get(&word.to_lowercase()))
            .map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.words.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Serializes to the TSV form `load_sense_inventory` reads, dropping
    /// zero-weight senses.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (word, dist) in &self.words {
            let items: Vec<String> = dist
                .iter()
                .zip(self.senses())
                .filter(|(w, _)| **w > 0.0)
                .map(|(w, s)| format!("{s}:{w}"))
                .collect();
            out.push_str(&format!("{word}\t{}\n", items.join(",")));
        }
        out
    }
}

pub fn load_sense_inventory(path: impl AsRef<Path>, kind: SenseKind) -> Result<SenseInventory> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SenseInventory::parse(&text, kind, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, kind: SenseKind) -> Result<SenseInventory> {
        SenseInventory::parse(text, kind, Path::new("test"))
    }

    fn weight(inv: &SenseInventory, word: &str, sense: &str) -> f64 {
        inv.get(word).unwrap()[inv.kind().sense_index(sense).unwrap()]
    }

    #[test]
    fn inventories_match_sense_tables() {
        assert_eq!(ADJECTIVE_SENSES.len(), 13);
        assert_eq!(VERB_SENSES.len(), 15);
    }

    #[test]
    fn normalization() {
        let inv = parse(
            "beautiful\tbody:0.9,miscellaneous:0.1\nbrave\tbehavior:2\n",
            SenseKind::Adj,
        )
        .unwrap();
        assert_eq!(weight(&inv, "beautiful", "body"), 0.9);
        assert_eq!(weight(&inv, "beautiful", "miscellaneous"), 0.1);
        assert_eq!(weight(&inv, "brave", "behavior"), 1.0);
        assert_eq!(inv.get("brave").unwrap().iter().sum::<f64>(), 1.0);

        let verbs = parse("run\tmotion:1,body:1\n", SenseKind::Verb).unwrap();
        assert_eq!(weight(&verbs, "run", "motion"), 0.5);
        assert_eq!(weight(&verbs, "run", "body"), 0.5);
    }

    #[test]
    fn rejects_unknown_sense_and_empty_list() {
        assert!(matches!(
            parse("run\tcognition:1\n", SenseKind::Adj),
            Err(Error::UnknownSense(_))
        ));
        assert!(parse("run\t\n", SenseKind::Verb).is_err());
        assert!(parse("run\n", SenseKind::Verb).is_err());
    }

    #[test]
    fn tsv_round_trip() {
        let inv = parse("a\tbody:3,mind:1\nb\tweather:1\n", SenseKind::Adj).unwrap();
        let again = parse(&inv.to_tsv(), SenseKind::Adj).unwrap();
        assert_eq!(inv, again);
    }
}
