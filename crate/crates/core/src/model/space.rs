use crate::corpus::{Gender, GenderLexicon, NounEntry, NounFeatures, Number};
use crate::error::{Error, Result};

/// Ordered lexical feature basis: every lemma, then +MASC, +FEM, +SG, +PL.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureSpace {
    lemmas: Vec<String>,
}

impl FeatureSpace {
    pub fn from_lexicon(lex: &GenderLexicon) -> Self {
        FeatureSpace {
            lemmas: lex.lemmas().to_vec(),
        }
    }

    /// Rebuilds a space from the names produced by [`FeatureSpace::names`].
    pub fn from_names(names: &[String]) -> Result<Self> {
        let tail = ["+MASC", "+FEM", "+SG", "+PL"];
        if names.len() < tail.len() || names[names.len() - 4..] != tail {
            return Err(Error::Checkpoint(
                "feature names must end with +MASC +FEM +SG +PL".into(),
            ));
        }
        Ok(FeatureSpace {
            lemmas: names[..names.len() - 4].iter().map(|n| n.to_lowercase()).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.lemmas.len() + 4
    }

    pub fn num_lemmas(&self) -> usize {
        self.lemmas.len()
    }

    pub fn gender_index(&self, g: Gender) -> usize {
        self.lemmas.len() + g.index()
    }

    pub fn number_index(&self, n: Number) -> usize {
        self.lemmas.len() + 2 + n.index()
    }

    /// One-hot query vector selecting the given gender coordinate.
    pub fn gender_query(&self, g: Gender) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        v[self.gender_index(g)] = 1.0;
        v
    }

    pub fn features_of(&self, entry: &NounEntry) -> NounFeatures {
        NounFeatures {
            lemma: entry.lemma,
            gender: self.gender_index(entry.gender),
            number: self.number_index(entry.number),
        }
    }

    pub fn name(&self, index: usize) -> String {
        let l = self.lemmas.len();
        match index.checked_sub(l) {
            None => self.lemmas[index].to_uppercase(),
            Some(0) => "+MASC".into(),
            Some(1) => "+FEM".into(),
            Some(2) => "+SG".into(),
            Some(3) => "+PL".into(),
            Some(_) => panic!("feature index {index} out of range"),
        }
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.dim()).map(|i| self.name(i)).collect()
    }
}
