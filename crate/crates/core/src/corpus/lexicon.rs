use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FeatureSpace;

const BUNDLED_LEXICON: &str = include_str!("../../data/gender_lexicon.tsv");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Masc,
    Fem,
}

impl Gender {
    pub const ALL: [Gender; 2] = [Gender::Masc, Gender::Fem];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Masc => "masc",
            Gender::Fem => "fem",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "masc" | "m" | "male" => Ok(Gender::Masc),
            "fem" | "f" | "female" => Ok(Gender::Fem),
            other => Err(format!("unknown gender `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Number {
    Sg,
    Pl,
}

impl Number {
    pub const ALL: [Number; 2] = [Number::Sg, Number::Pl];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Number::Sg => "sg",
            Number::Pl => "pl",
        }
    }
}

impl FromStr for Number {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sg" => Ok(Number::Sg),
            "pl" => Ok(Number::Pl),
            other => Err(format!("unknown number `{other}`")),
        }
    }
}

/// Lexical analysis of one gendered noun form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NounEntry {
    pub lemma: usize,
    pub gender: Gender,
    pub number: Number,
}

/// Gendered, animate noun forms grouped into genderless lemmas.
///
/// Every surface form maps to exactly one `(lemma, gender, number)` slot and
/// each lemma fills at most the four masc/fem × sg/pl slots. Lemma ids are
/// assigned in order of first appearance in the source file.
#[derive(Clone, Debug)]
pub struct GenderLexicon {
    lemmas: Vec<String>,
    forms: BTreeMap<String, NounEntry>,
}

impl GenderLexicon {
    /// The 23-row noun list shipped with the crate (90 forms).
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEXICON, Path::new("<bundled gender lexicon>")).expect("bundled lexicon is well formed")
    }

    /// Parses `lemma<TAB>form<TAB>gender<TAB>number` rows.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut lemmas: Vec<String> = Vec::new();
        let mut lemma_ids: HashMap<String, usize> = HashMap::new();
        let mut slots: HashMap<(usize, Gender, Number), String> = HashMap::new();
        let mut forms = BTreeMap::new();

        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::parse(
                    origin,
                    lineno + 1,
                    format!("expected 4 tab-separated fields, found {}", fields.len()),
                ));
            }
            let lemma = fields[0].trim().to_lowercase();
            let form = fields[1].trim().to_lowercase();
            if lemma.is_empty() || form.is_empty() {
                return Err(Error::parse(origin, lineno + 1, "empty lemma or form"));
            }
            let gender: Gender = fields[2]
                .trim()
                .parse()
                .map_err(|e: String| Error::parse(origin, lineno + 1, e))?;
            let number: Number = fields[3]
                .trim()
                .parse()
                .map_err(|e: String| Error::parse(origin, lineno + 1, e))?;

            let next_id = lemmas.len();
            let lemma_id = *lemma_ids.entry(lemma.clone()).or_insert_with(|| {
                lemmas.push(lemma.clone());
                next_id
            });
            if forms.contains_key(&form) {
                return Err(Error::DuplicateForm(form));
            }
            if let Some(prev) = slots.insert((lemma_id, gender, number), form.clone()) {
                return Err(Error::parse(
                    origin,
                    lineno + 1,
                    format!(
                        "lemma `{lemma}` already has a {gender} {} form (`{prev}`)",
                        number.as_str()
                    ),
                ));
            }
            forms.insert(
                form,
                NounEntry {
                    lemma: lemma_id,
                    gender,
                    number,
                },
            );
        }

        if forms.is_empty() {
            return Err(Error::EmptyLexicon);
        }
        Ok(GenderLexicon { lemmas, forms })
    }

    pub fn lemmas(&self) -> &[String] {
        &self.lemmas
    }

    pub fn num_forms(&self) -> usize {
        self.forms.len()
    }

    /// Case-insensitive lookup of a surface form.
    pub fn get(&self, form: &str) -> Option<&NounEntry> {
        match self.forms.get(form) {
            Some(entry) => Some(entry),
            None => self.forms.get(&form.to_lowercase()),
        }
    }

    pub fn contains(&self, form: &str) -> bool {
        self.get(form).is_some()
    }

    pub fn gender_of(&self, form: &str) -> Option<Gender> {
        self.get(form).map(|e| e.gender)
    }

    pub fn forms(&self) -> impl Iterator<Item = (&str, &NounEntry)> {
        self.forms.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Keeps only the rows whose lemma is listed, preserving lemma order.
    pub fn restrict_to_lemmas(&self, keep: &[&str]) -> Result<Self> {
        let mut text = String::new();
        for (id, lemma) in self.lemmas.iter().enumerate() {
            if !keep.contains(&lemma.as_str()) {
                continue;
            }
            for (form, e) in self.forms.iter().filter(|(_, e)| e.lemma == id) {
                text.push_str(&format!("{lemma}\t{form}\t{}\t{}\n", e.gender, e.number.as_str()));
            }
        }
        Self::parse(&text, Path::new("<restricted lexicon>"))
    }

    /// Serializes back to the TSV form `load_gender_lexicon` reads.
    pub fn to_tsv(&self) -> String {
        let mut rows: Vec<(usize, Gender, Number, &str)> = self
            .forms
            .iter()
            .map(|(f, e)| (e.lemma, e.gender, e.number, f.as_str()))
            .collect();
        rows.sort();
        rows.iter()
            .map(|(l, g, n, f)| format!("{}\t{f}\t{g}\t{}\n", self.lemmas[*l], n.as_str()))
            .collect()
    }
}

pub fn load_gender_lexicon(path: impl AsRef<Path>) -> Result<GenderLexicon> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    GenderLexicon::parse(&text, path)
}

/// Multi-hot lexical features of a noun form: one lemma, one gender and one
/// number position in the feature space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NounFeatures {
    pub lemma: usize,
    pub gender: usize,
    pub number: usize,
}

impl NounFeatures {
    pub fn active(&self) -> [usize; 3] {
        [self.lemma, self.gender, self.number]
    }

    pub fn to_dense(&self, dim: usize) -> Vec<u8> {
        let mut v = vec![0u8; dim];
        for i in self.active() {
            v[i] = 1;
        }
        v
    }
}

pub fn featurize_noun(form: &str, lex: &GenderLexicon, space: &FeatureSpace) -> Result<NounFeatures> {
    let entry = lex.get(form).ok_or_else(|| Error::UnknownForm(form.to_string()))?;
    Ok(space.features_of(entry))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex(text: &str) -> Result<GenderLexicon> {
        GenderLexicon::parse(text, Path::new("test"))
    }

    #[test]
    fn stewardesses_row() {
        let l = lex("steward\tstewardesses\tfem\tpl\n").unwrap();
        let e = l.get("stewardesses").unwrap();
        assert_eq!(l.lemmas()[e.lemma], "steward");
        assert_eq!(e.gender, Gender::Fem);
        assert_eq!(e.number, Number::Pl);
    }

    #[test]
    fn bundled_has_ninety_forms() {
        let l = GenderLexicon::bundled();
        assert_eq!(l.lemmas().len(), 23);
        assert_eq!(l.num_forms(), 22 * 4 + 2);
        let he = l.get("he").unwrap();
        let she = l.get("she").unwrap();
        assert_eq!(he.lemma, she.lemma);
        assert_eq!(he.number, Number::Sg);
        assert_eq!(she.gender, Gender::Fem);
    }

    #[test]
    fn empty_file_rejected() {
        assert!(matches!(lex(""), Err(Error::EmptyLexicon)));
        assert!(matches!(lex("\n\n"), Err(Error::EmptyLexicon)));
    }

    #[test]
    fn duplicate_form_names_the_form() {
        let err = lex("man\tman\tmasc\tsg\nboy\tman\tmasc\tsg\n").unwrap_err();
        assert!(err.to_string().contains("`man`"), "{err}");
    }

    #[test]
    fn unknown_tokens_rejected() {
        assert!(lex("man\tman\tneuter\tsg\n").is_err());
        assert!(lex("man\tman\tmasc\tdual\n").is_err());
        assert!(lex("man\tman\tmasc\n").is_err());
    }

    #[test]
    fn fifth_form_for_a_lemma_rejected() {
        let text = "man\tman\tmasc\tsg\nman\tmen\tmasc\tpl\nman\twoman\tfem\tsg\n\
                    man\twomen\tfem\tpl\nman\tfella\tmasc\tsg\n";
        assert!(lex(text).is_err());
    }

    #[test]
    fn featurization_shares_lemma_and_gender_bits() {
        let l = GenderLexicon::bundled();
        let space = FeatureSpace::from_lexicon(&l);
        let sg = featurize_noun("stewardess", &l, &space).unwrap();
        let pl = featurize_noun("stewardesses", &l, &space).unwrap();
        assert_eq!(sg.lemma, pl.lemma);
        assert_eq!(sg.gender, pl.gender);
        assert_ne!(sg.number, pl.number);
        assert_eq!(space.name(pl.lemma), "STEWARD");
        assert_eq!(space.name(pl.gender), "+FEM");
        assert_eq!(space.name(pl.number), "+PL");

        let he = featurize_noun("he", &l, &space).unwrap();
        assert_eq!(space.name(he.gender), "+MASC");
        assert_eq!(space.name(he.number), "+SG");

        let dense = he.to_dense(space.dim());
        assert_eq!(dense.iter().filter(|&&b| b == 1).count(), 3);
    }

    #[test]
    fn unknown_form_is_named() {
        let l = GenderLexicon::bundled();
        let space = FeatureSpace::from_lexicon(&l);
        let err = featurize_noun("house", &l, &space).unwrap_err();
        assert!(err.to_string().contains("house"));
    }

    #[test]
    fn features_equal_iff_same_slot() {
        let l = GenderLexicon::bundled();
        let space = FeatureSpace::from_lexicon(&l);
        let all: Vec<(&str, NounFeatures)> = l
            .forms()
            .map(|(f, _)| (f, featurize_noun(f, &l, &space).unwrap()))
            .collect();
        for (fa, a) in &all {
            for (fb, b) in &all {
                let ea = l.get(fa).unwrap();
                let eb = l.get(fb).unwrap();
                assert_eq!(a == b, ea == eb);
            }
        }
    }

    #[test]
    fn tsv_round_trip() {
        let l = GenderLexicon::bundled();
        let again = lex(&l.to_tsv()).unwrap();
        assert_eq!(again.num_forms(), l.num_forms());
        for (f, e) in l.forms() {
            let e2 = again.get(f).unwrap();
            assert_eq!(l.lemmas()[e.lemma], again.lemmas()[e2.lemma]);
            assert_eq!((e.gender, e.number), (e2.gender, e2.number));
        }
    }
}
