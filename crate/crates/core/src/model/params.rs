use crate::corpus::{featurize_noun, CountTable, Gender, GenderLexicon, NounFeatures, Relation};
use crate::error::{Error, Result};
use crate::lexicons::SentimentPrior;

use super::FeatureSpace;

/// Everything the model needs to know about one corpus: index orders,
/// noun featurization, the empirical distribution and the sentiment prior
/// aligned to the neighbor vocabulary.
#[derive(Clone, Debug)]
pub struct Instance {
    pub relation: Relation,
    pub space: FeatureSpace,
    pub neighbors: Vec<String>,
    pub nouns: Vec<String>,
    pub noun_features: Vec<NounFeatures>,
    pub noun_genders: Vec<Gender>,
    /// Non-zero cells of p̂(ν, n) as (neighbor, noun, probability).
    pub empirical: Vec<(usize, usize, f64)>,
    pub neighbor_marginal: Vec<f64>,
    pub noun_marginal: Vec<f64>,
    /// q(s|ν) per neighbor; `None` for words outside the sentiment lexicon.
    pub prior: Vec<Option<[f64; 3]>>,
    pub fingerprint: String,
}

impl Instance {
    pub fn new(
        table: &CountTable,
        lex: &GenderLexicon,
        space: &FeatureSpace,
        prior: Option<&SentimentPrior>,
    ) -> Result<Self> {
        let noun_features = table
            .nouns()
            .iter()
            .map(|n| featurize_noun(n, lex, space))
            .collect::<Result<Vec<_>>>()?;
        let noun_genders = table
            .nouns()
            .iter()
            .map(|n| lex.gender_of(n).ok_or_else(|| Error::UnknownForm(n.clone())))
            .collect::<Result<Vec<_>>>()?;
        let total = table.total() as f64;
        let neighbor_marginal = table.neighbor_totals().iter().map(|&c| c as f64 / total).collect();
        let noun_marginal = table.noun_totals().iter().map(|&c| c as f64 / total).collect();
        let prior = table
            .neighbors()
            .iter()
            .map(|nb| prior.and_then(|p| p.sentiment_of(nb)))
            .collect();
        Ok(Instance {
            relation: table.relation(),
            space: space.clone(),
            neighbors: table.neighbors().to_vec(),
            nouns: table.nouns().to_vec(),
            noun_features,
            noun_genders,
            empirical: table.empirical().collect(),
            neighbor_marginal,
            noun_marginal,
            prior,
            fingerprint: table.fingerprint(),
        })
    }

    pub fn num_neighbors(&self) -> usize {
        self.neighbors.len()
    }

    pub fn num_nouns(&self) -> usize {
        self.nouns.len()
    }

    pub fn neighbor_index(&self, word: &str) -> Option<usize> {
        self.neighbors.binary_search_by(|n| n.as_str().cmp(word)).ok()
    }

    pub fn has_prior(&self) -> bool {
        self.prior.iter().any(Option::is_some)
    }
}

/// Model parameters.
///
/// `eta` is laid out neighbor-major as `[ν][s][t]`, `omega` as `[n][s]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub num_neighbors: usize,
    pub num_sentiments: usize,
    pub dim: usize,
    pub num_nouns: usize,
    /// Fixed background log-distribution m.
    pub background: Vec<f64>,
    pub eta: Vec<f64>,
    pub omega: Vec<f64>,
    pub xi: Vec<f64>,
}

impl ModelParams {
    /// The independence baseline: η = ω = 0, m = log p̂(ν), ξ = log p̂(n).
    ///
    /// This start consumes no randomness.
    pub fn init(inst: &Instance, num_sentiments: usize) -> Self {
        let v = inst.num_neighbors();
        let g = inst.num_nouns();
        let t = inst.space.dim();
        ModelParams {
            num_neighbors: v,
            num_sentiments,
            dim: t,
            num_nouns: g,
            background: inst.neighbor_marginal.iter().map(|p| p.ln()).collect(),
            eta: vec![0.0; v * num_sentiments * t],
            omega: vec![0.0; g * num_sentiments],
            xi: inst.noun_marginal.iter().map(|p| p.ln()).collect(),
        }
    }

    #[inline]
    pub fn eta_index(&self, neighbor: usize, sentiment: usize, feature: usize) -> usize {
        (neighbor * self.num_sentiments + sentiment) * self.dim + feature
    }

    #[inline]
    pub fn eta(&self, neighbor: usize, sentiment: usize, feature: usize) -> f64 {
        self.eta[self.eta_index(neighbor, sentiment, feature)]
    }

    pub fn set_eta(&mut self, neighbor: usize, sentiment: usize, feature: usize, value: f64) {
        let i = self.eta_index(neighbor, sentiment, feature);
        self.eta[i] = value;
    }

    /// Deviation vector η(ν, s).
    pub fn deviation(&self, neighbor: usize, sentiment: usize) -> &[f64] {
        let start = self.eta_index(neighbor, sentiment, 0);
        &self.eta[start..start + self.dim]
    }

    pub fn l1_norm(&self) -> f64 {
        self.eta.iter().map(|x| x.abs()).sum()
    }

    /// Fraction of η entries with magnitude below `threshold`.
    pub fn sparsity(&self, threshold: f64) -> f64 {
        self.eta.iter().filter(|x| x.abs() < threshold).count() as f64 / self.eta.len() as f64
    }

    pub fn project_nonnegative(&mut self) {
        self.eta.iter_mut().for_each(|x| *x = x.max(0.0));
    }

    pub fn is_finite(&self) -> bool {
        self.eta
            .iter()
            .chain(&self.omega)
            .chain(&self.xi)
            .chain(&self.background)
            .all(|x| x.is_finite())
    }

    pub fn same_shape(&self, other: &ModelParams) -> bool {
        self.num_neighbors == other.num_neighbors
            && self.num_sentiments == other.num_sentiments
            && self.dim == other.dim
            && self.num_nouns == other.num_nouns
    }

    /// Number of free (trainable) coordinates: η, ω and ξ.
    pub fn num_free(&self) -> usize {
        self.eta.len() + self.omega.len() + self.xi.len()
    }

    /// Elementwise arithmetic mean of η, ω and ξ; m is taken from the first run.
    pub fn average(runs: &[&ModelParams]) -> Result<ModelParams> {
        let first = runs
            .first()
            .ok_or_else(|| Error::InvalidArgument("nothing to average".into()))?;
        if runs.iter().any(|r| !r.same_shape(first)) {
            return Err(Error::InvalidArgument(
                "cannot average differently shaped models".into(),
            ));
        }
        let n = runs.len() as f64;
        let mean = |get: fn(&ModelParams) -> &Vec<f64>| -> Vec<f64> {
            let mut acc = vec![0.0; get(first).len()];
            for r in runs {
                for (a, x) in acc.iter_mut().zip(get(r)) {
                    *a += x;
                }
            }
            acc.iter_mut().for_each(|a| *a /= n);
            acc
        };
        Ok(ModelParams {
            eta: mean(|p| &p.eta),
            omega: mean(|p| &p.omega),
            xi: mean(|p| &p.xi),
            ..(*first).clone()
        })
    }
}
