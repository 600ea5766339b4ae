use std::fmt;

use crate::corpus::Gender;
use crate::error::{Error, Result};
use crate::lexicons::Sentiment;
use crate::model::{score, Instance, ModelParams};

/// Which sentiment component a list or test was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Sentiment(Sentiment),
    /// The single component of a sentiment-free model.
    Collapsed,
    /// All sentiment lists of one gender concatenated.
    Pooled,
}

impl Slot {
    /// The slots a model with `num_sentiments` components produces lists for.
    pub fn for_model(num_sentiments: usize) -> Vec<Slot> {
        if num_sentiments == 1 {
            vec![Slot::Collapsed]
        } else {
            Sentiment::ALL.iter().map(|&s| Slot::Sentiment(s)).collect()
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Sentiment(s) => f.write_str(s.as_str()),
            Slot::Collapsed => f.write_str("none"),
            Slot::Pooled => f.write_str("pooled"),
        }
    }
}

/// The `k` neighbors with the largest deviation for one gender and sentiment.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedList {
    pub gender: Gender,
    pub slot: Slot,
    pub k: usize,
    /// (neighbor, score), highest score first; equal scores in word order.
    pub entries: Vec<(String, f64)>,
}

impl RankedList {
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(w, _)| w.as_str())
    }
}

/// Ranks the vocabulary by g_genderᵀ η(ν, s) and keeps the first `k`.
///
/// `sentiment` must be given for a three-sentiment model and omitted for a
/// sentiment-free one. `k` larger than the vocabulary returns all of it.
pub fn topk(
    params: &ModelParams,
    inst: &Instance,
    gender: Gender,
    sentiment: Option<Sentiment>,
    k: usize,
) -> Result<RankedList> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let (s, slot) = match (params.num_sentiments, sentiment) {
        (1, None) => (0, Slot::Collapsed),
        (3, Some(s)) => (s.index(), Slot::Sentiment(s)),
        (1, Some(_)) => return Err(Error::InvalidArgument("the model has no sentiment components".into())),
        _ => return Err(Error::InvalidArgument("a sentiment is required for this model".into())),
    };
    let mut entries: Vec<(String, f64)> = inst
        .neighbors
        .iter()
        .enumerate()
        .map(|(v, w)| (w.clone(), score(params, &inst.space, gender, s, v)))
        .collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(k);
    Ok(RankedList {
        gender,
        slot,
        k,
        entries,
    })
}

/// Ranked lists for every gender and sentiment component of the model,
/// gender-major.
pub fn all_lists(params: &ModelParams, inst: &Instance, k: usize) -> Result<Vec<RankedList>> {
    let mut out = Vec::new();
    for gender in Gender::ALL {
        for slot in Slot::for_model(params.num_sentiments) {
            let sentiment = match slot {
                Slot::Sentiment(s) => Some(s),
                _ => None,
            };
            out.push(topk(params, inst, gender, sentiment, k)?);
        }
    }
    Ok(out)
}
