use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sentiment {
    Pos,
    Neg,
    Neu,
}

impl Sentiment {
    pub const ALL: [Sentiment; 3] = [Sentiment::Pos, Sentiment::Neg, Sentiment::Neu];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sentiment::Pos => "pos",
            Sentiment::Neg => "neg",
            Sentiment::Neu => "neu",
        }
    }
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sentiment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "pos" => Ok(Sentiment::Pos),
            "neg" => Ok(Sentiment::Neg),
            "neu" => Ok(Sentiment::Neu),
            other => Err(format!("unknown sentiment `{other}`")),
        }
    }
}

/// External sentiment distribution q(s | ν), ordered (pos, neg, neu).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SentimentPrior {
    entries: BTreeMap<String, [f64; 3]>,
    duplicates: usize,
}

impl SentimentPrior {
    /// Builds a prior from explicit probability triples; each is renormalized.
    pub fn from_probabilities<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, [f64; 3])>,
        S: AsRef<str>,
    {
        let mut prior = SentimentPrior::default();
        for (word, p) in entries {
            let word = word.as_ref().to_lowercase();
            let total: f64 = p.iter().sum();
            if p.iter().any(|x| !x.is_finite() || *x < 0.0) || total <= 0.0 {
                return Err(Error::InvalidArgument(format!("invalid sentiment triple for `{word}`")));
            }
            prior.insert(word, p.map(|x| x / total));
        }
        Ok(prior)
    }

    fn insert(&mut self, word: String, p: [f64; 3]) {
        if self.entries.insert(word.clone(), p).is_some() {
            log::warn!("duplicate sentiment entry for `{word}`; keeping the last one");
            self.duplicates += 1;
        }
    }

    /// Parses `word<TAB>alpha_pos<TAB>alpha_neg<TAB>alpha_neu` Dirichlet
    /// concentrations into their means.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut prior = SentimentPrior::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::parse(
                    origin,
                    i + 1,
                    format!("expected 4 fields, found {}", fields.len()),
                ));
            }
            let word = fields[0].trim().to_lowercase();
            let mut alpha = [0.0; 3];
            for (a, f) in alpha.iter_mut().zip(&fields[1..]) {
                *a = f
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(origin, i + 1, format!("bad concentration `{f}`")))?;
            }
            if alpha.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                return Err(Error::NonPositiveConcentration(word));
            }
            let total: f64 = alpha.iter().sum();
            prior.insert(word, alpha.map(|a| a / total));
        }
        if prior.entries.is_empty() {
            return Err(Error::EmptyLexicon);
        }
        Ok(prior)
    }

    /// Case-folded lookup; `None` means the word carries no sentiment evidence.
    pub fn sentiment_of(&self, word: &str) -> Option<[f64; 3]> {
        self.entries
            .get(word)
            .or_else(|| self.entries.get(&word.to_lowercase()))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of rows that overwrote an earlier row for the same word.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64; 3])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }
}

pub fn load_sentiment_lexicon(path: impl AsRef<Path>) -> Result<SentimentPrior> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SentimentPrior::parse(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<SentimentPrior> {
        SentimentPrior::parse(text, Path::new("test"))
    }

    #[test]
    fn dirichlet_mean() {
        let p = parse("pretty\t6\t1\t1\nstone\t1\t1\t1\n").unwrap();
        assert_eq!(p.sentiment_of("pretty"), Some([0.75, 0.125, 0.125]));
        let stone = p.sentiment_of("stone").unwrap();
        for x in stone {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn three_rows_three_entries() {
        let p = parse("a\t1\t2\t3\nb\t0.5\t0.5\t2\nc\t9\t1\t0.1\n").unwrap();
        assert_eq!(p.len(), 3);
        for (_, q) in p.iter() {
            assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(q.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn non_positive_concentration_names_word() {
        let err = parse("pretty\t0\t1\t1\n").unwrap_err();
        assert!(err.to_string().contains("pretty"));
        assert!(parse("ugly\t-1\t1\t1\n").is_err());
    }

    #[test]
    fn absent_and_case_folded() {
        let p = parse("pretty\t6\t1\t1\n").unwrap();
        assert!(p.sentiment_of("stone").is_none());
        assert_eq!(p.sentiment_of("Pretty"), p.sentiment_of("pretty"));
    }

    #[test]
    fn last_duplicate_wins() {
        let p = parse("pretty\t6\t1\t1\npretty\t1\t1\t2\n").unwrap();
        assert_eq!(p.sentiment_of("pretty"), Some([0.25, 0.25, 0.5]));
        assert_eq!(p.duplicates(), 1);
    }
}
