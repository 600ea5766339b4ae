//! Planted-truth corpora for checking that the pipeline recovers known effects.
//!
//! Every adjective gets a sentiment class, an optional gender lean and a
//! sense distribution. Counts are Poisson draws from
//! p(ν | n) ∝ base(ν) · exp(strength(ν) · [lean(ν) = gender(n)]).
//! With a non-zero `effect`, every female-leaning positive word has that
//! much weight moved onto the `body` sense.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::corpus::{Collocation, CountTable, Gender, GenderLexicon, Relation};
use crate::error::{Error, Result};
use crate::lexicons::{SenseInventory, SenseKind, Sentiment, SentimentPrior, ADJECTIVE_SENSES};

pub const PLANTED_SENSE: &str = "body";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub vocab_size: usize,
    /// Expected number of collocation tokens.
    pub tokens: f64,
    /// Weight added to the planted sense of female-leaning positive words.
    pub effect: f64,
    /// Fraction of words with no gender lean.
    pub neutral_fraction: f64,
    /// Lean strengths are drawn uniformly from this range (log scale).
    pub strength: (f64, f64),
    /// Dirichlet concentration of per-word sense distributions.
    pub sense_concentration: f64,
    /// Concentration on the true class in the emitted sentiment lexicon;
    /// the other two classes get 1.
    pub prior_concentration: f64,
    /// Extra probability that a female-leaning word is positive.
    pub fem_positive: f64,
    /// Share of tokens attached to masculine nouns.
    pub masc_share: f64,
    /// Noun lemmas (from the bundled lexicon) whose forms appear.
    pub lemmas: Vec<String>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            vocab_size: 240,
            tokens: 200_000.0,
            effect: 0.0,
            neutral_fraction: 1.0 / 3.0,
            strength: (0.5, 1.5),
            sense_concentration: 0.5,
            prior_concentration: 8.0,
            fem_positive: 0.0,
            masc_share: 0.6,
            lemmas: ["man", "boy", "king", "father"].map(String::from).to_vec(),
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.vocab_size < 3 {
            return bad("vocabulary must have at least three words");
        }
        if !(self.tokens > 0.0) {
            return bad("token count must be positive");
        }
        if !(0.0..=1.0).contains(&self.effect) || !(0.0..=1.0).contains(&self.fem_positive) {
            return bad("effect sizes must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.neutral_fraction) || !(0.0..1.0).contains(&self.masc_share) {
            return bad("fractions must lie in [0, 1)");
        }
        if !(self.strength.0 >= 0.0 && self.strength.0 <= self.strength.1) {
            return bad("strength range must be ordered and non-negative");
        }
        if !(self.sense_concentration > 0.0 && self.prior_concentration > 0.0) {
            return bad("concentrations must be positive");
        }
        if self.lemmas.is_empty() {
            return bad("at least one noun lemma is required");
        }
        Ok(())
    }
}

/// Ground truth for one synthetic adjective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordTruth {
    pub word: String,
    pub sentiment: Sentiment,
    pub lean: Option<Gender>,
    pub strength: f64,
    pub planted: bool,
    pub senses: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: SynthConfig,
    pub planted_sense: String,
    pub planted_words: usize,
    /// Mean increase of the planted sense weight over planted words.
    pub planted_shift: f64,
    pub fingerprint: String,
    pub words: Vec<WordTruth>,
}

#[derive(Clone, Debug)]
pub struct SynthCorpus {
    pub table: CountTable,
    pub lexicon: GenderLexicon,
    pub prior: SentimentPrior,
    pub senses: SenseInventory,
    pub judgments: BTreeMap<String, f64>,
    pub labels: BTreeMap<String, Gender>,
    pub manifest: Manifest,
}

/// Paths written by [`SynthCorpus::write`].
#[derive(Clone, Debug)]
pub struct SynthFiles {
    pub counts: PathBuf,
    pub lexicon: PathBuf,
    pub sentiment: PathBuf,
    pub senses: PathBuf,
    pub judgments: PathBuf,
    pub labels: PathBuf,
    pub manifest: PathBuf,
}

impl SynthFiles {
    pub fn in_dir(dir: &Path) -> Self {
        SynthFiles {
            counts: dir.join("counts.amod.tsv"),
            lexicon: dir.join("gender_lexicon.tsv"),
            sentiment: dir.join("sentiment.tsv"),
            senses: dir.join("senses_adj.tsv"),
            judgments: dir.join("judgments.tsv"),
            labels: dir.join("labels.tsv"),
            manifest: dir.join("manifest.json"),
        }
    }
}

fn pick_sentiment(rng: &mut ChaCha8Rng, lean: Option<Gender>, fem_positive: f64) -> Sentiment {
    let pos = if lean == Some(Gender::Fem) {
        1.0 / 3.0 + fem_positive * 2.0 / 3.0
    } else {
        1.0 / 3.0
    };
    let u: f64 = rng.gen();
    if u < pos {
        Sentiment::Pos
    } else if u < pos + (1.0 - pos) / 2.0 {
        Sentiment::Neg
    } else {
        Sentiment::Neu
    }
}

/// Moves `effect` onto sense `j`, rescaling the others to keep the sum at 1.
fn plant(weights: &mut [f64], j: usize, effect: f64) -> f64 {
    let before = weights[j];
    let target = (before + effect).min(1.0);
    let rest = 1.0 - before;
    for (i, w) in weights.iter_mut().enumerate() {
        if i == j {
            *w = target;
        } else if rest > 0.0 {
            *w *= (1.0 - target) / rest;
        }
    }
    target - before
}

pub fn generate(config: &SynthConfig) -> Result<SynthCorpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let keep: Vec<&str> = config.lemmas.iter().map(String::as_str).collect();
    let lexicon = GenderLexicon::bundled().restrict_to_lemmas(&keep)?;
    if lexicon.num_forms() == 0 {
        return Err(Error::EmptyLexicon);
    }

    let body = SenseKind::Adj
        .sense_index(PLANTED_SENSE)
        .expect("planted sense is an adjective sense");
    let sense_dist = Dirichlet::new(&vec![config.sense_concentration; ADJECTIVE_SENSES.len()])
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let base_dist = Normal::new(0.0, 0.5).expect("valid normal");
    let width = config.vocab_size.to_string().len();

    let mut words = Vec::with_capacity(config.vocab_size);
    let mut base = Vec::with_capacity(config.vocab_size);
    let (mut planted_words, mut shift) = (0usize, 0.0f64);
    for i in 0..config.vocab_size {
        let lean = if rng.gen::<f64>() < config.neutral_fraction {
            None
        } else if rng.gen::<bool>() {
            Some(Gender::Masc)
        } else {
            Some(Gender::Fem)
        };
        let strength = match lean {
            Some(_) => rng.gen_range(config.strength.0..=config.strength.1),
            None => 0.0,
        };
        let sentiment = pick_sentiment(&mut rng, lean, config.fem_positive);
        let mut senses = sense_dist.sample(&mut rng);
        let planted = config.effect > 0.0 && lean == Some(Gender::Fem) && sentiment == Sentiment::Pos;
        if planted {
            planted_words += 1;
            shift += plant(&mut senses, body, config.effect);
        }
        base.push(base_dist.sample(&mut rng));
        words.push(WordTruth {
            word: format!("adj{i:0width$}"),
            sentiment,
            lean,
            strength,
            planted,
            senses,
        });
    }

    let forms: Vec<(&str, Gender)> = lexicon.forms().map(|(f, e)| (f, e.gender)).collect();
    let n_masc = forms.iter().filter(|f| f.1 == Gender::Masc).count();
    let n_fem = forms.len() - n_masc;
    if n_masc == 0 || n_fem == 0 {
        return Err(Error::MissingGender);
    }
    let mut records = Vec::new();
    for &(form, gender) in &forms {
        let share = match gender {
            Gender::Masc => config.masc_share / n_masc as f64,
            Gender::Fem => (1.0 - config.masc_share) / n_fem as f64,
        };
        let logits: Vec<f64> = words
            .iter()
            .zip(&base)
            .map(|(w, b)| b + if w.lean == Some(gender) { w.strength } else { 0.0 })
            .collect();
        let z: f64 = logits.iter().map(|l| l.exp()).sum();
        for (w, l) in words.iter().zip(&logits) {
            let rate = config.tokens * share * l.exp() / z;
            let count = Poisson::new(rate)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?
                .sample(&mut rng) as u64;
            if count > 0 {
                records.push(Collocation {
                    noun: form.to_string(),
                    neighbor: w.word.clone(),
                    relation: Relation::Amod,
                    count,
                });
            }
        }
    }
    let table = CountTable::aggregate(records, Relation::Amod)?;

    let prior = SentimentPrior::from_probabilities(words.iter().map(|w| {
        let mut alpha = [1.0; 3];
        alpha[w.sentiment.index()] = config.prior_concentration;
        (w.word.clone(), alpha)
    }))?;
    let mut senses = SenseInventory::new(SenseKind::Adj);
    for w in &words {
        let pairs: Vec<(&str, f64)> = ADJECTIVE_SENSES.iter().copied().zip(w.senses.iter().copied()).collect();
        senses.insert(&w.word, &pairs)?;
    }
    let judgments = words
        .iter()
        .map(|w| {
            let signed = match w.lean {
                Some(Gender::Fem) => w.strength,
                Some(Gender::Masc) => -w.strength,
                None => 0.0,
            };
            (w.word.clone(), signed)
        })
        .collect();
    let labels = words
        .iter()
        .filter_map(|w| w.lean.map(|g| (w.word.clone(), g)))
        .collect();

    let manifest = Manifest {
        config: config.clone(),
        planted_sense: PLANTED_SENSE.to_string(),
        planted_words,
        planted_shift: if planted_words > 0 {
            shift / planted_words as f64
        } else {
            0.0
        },
        fingerprint: table.fingerprint(),
        words,
    };
    Ok(SynthCorpus {
        table,
        lexicon,
        prior,
        senses,
        judgments,
        labels,
        manifest,
    })
}

impl SynthCorpus {
    /// Sentiment lexicon in the Dirichlet-concentration format.
    pub fn sentiment_tsv(&self) -> String {
        let c = self.manifest.config.prior_concentration;
        self.manifest
            .words
            .iter()
            .map(|w| {
                let mut alpha = [1.0; 3];
                alpha[w.sentiment.index()] = c;
                format!("{}\t{}\t{}\t{}\n", w.word, alpha[0], alpha[1], alpha[2])
            })
            .collect()
    }

    pub fn write(&self, dir: impl AsRef<Path>) -> Result<SynthFiles> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let files = SynthFiles::in_dir(dir);
        let judgments: String = self.judgments.iter().map(|(w, x)| format!("{w}\t{x}\n")).collect();
        let labels: String = self
            .labels
            .iter()
            .map(|(w, g)| format!("{w}\t{}\n", if *g == Gender::Fem { "f" } else { "m" }))
            .collect();
        let mut manifest = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        manifest.push('\n');
        for (path, text) in [
            (&files.counts, self.table.to_canonical_tsv()),
            (&files.lexicon, self.lexicon.to_tsv()),
            (&files.sentiment, self.sentiment_tsv()),
            (&files.senses, self.senses.to_tsv()),
            (&files.judgments, judgments),
            (&files.labels, labels),
            (&files.manifest, manifest),
        ] {
            fs::write(path, text).map_err(|e| Error::io(path, e))?;
        }
        Ok(files)
    }
}
