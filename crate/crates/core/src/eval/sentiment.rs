use super::rank::topk;
use super::senses::task_seed;
use super::stats::{permutation_test, TestResult};
use crate::corpus::{Gender, Relation};
use crate::error::{Error, Result};
use crate::lexicons::SentimentPrior;
use crate::model::{Instance, ModelParams};

/// Mean prior sentiment of one gender's top-k list.
#[derive(Clone, Debug, PartialEq)]
pub struct GenderSentiment {
    pub gender: Gender,
    /// Mean q(s|ν) as [pos, neg, neu] over list words in the lexicon.
    pub frequencies: [f64; 3],
    pub covered: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SentimentFrequency {
    pub relation: Relation,
    pub genders: Vec<GenderSentiment>,
    /// One test per sentiment, Bonferroni-corrected over the three.
    pub tests: [TestResult; 3],
}

/// Compares the prior sentiment of male and female top-k lists from a
/// sentiment-free model.
pub fn sentiment_frequency(
    params: &ModelParams,
    inst: &Instance,
    prior: &SentimentPrior,
    k: usize,
    permutations: usize,
    seed: u64,
) -> Result<SentimentFrequency> {
    if params.num_sentiments != 1 {
        return Err(Error::InvalidArgument(
            "sentiment frequencies need a model trained without sentiment components".into(),
        ));
    }
    let mut groups: Vec<Vec<[f64; 3]>> = Vec::new();
    let mut genders = Vec::new();
    for gender in Gender::ALL {
        let list = topk(params, inst, gender, None, k)?;
        let q: Vec<[f64; 3]> = list.words().filter_map(|w| prior.sentiment_of(w)).collect();
        if q.is_empty() {
            return Err(Error::NoCoverage);
        }
        let mut frequencies = [0.0; 3];
        for row in &q {
            for s in 0..3 {
                frequencies[s] += row[s];
            }
        }
        frequencies.iter_mut().for_each(|f| *f /= q.len() as f64);
        genders.push(GenderSentiment {
            gender,
            frequencies,
            covered: q.len(),
        });
        groups.push(q);
    }
    let mut tests = Vec::with_capacity(3);
    for s in 0..3 {
        let a: Vec<f64> = groups[0].iter().map(|q| q[s]).collect();
        let b: Vec<f64> = groups[1].iter().map(|q| q[s]).collect();
        tests.push(permutation_test(&a, &b, permutations, task_seed(seed, 0, s))?.bonferroni(3));
    }
    Ok(SentimentFrequency {
        relation: inst.relation,
        genders,
        tests: [tests[0], tests[1], tests[2]],
    })
}
