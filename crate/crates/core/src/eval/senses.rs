use rayon::prelude::*;

use super::rank::{topk, RankedList, Slot};
use super::stats::{permutation_test, TestResult};
use crate::corpus::Gender;
use crate::error::{Error, Result};
use crate::lexicons::{SenseInventory, Sentiment};
use crate::model::{Instance, ModelParams};

/// Mean sense distribution of the words in a ranked list.
#[derive(Clone, Debug, PartialEq)]
pub struct SenseProfile {
    pub senses: &'static [&'static str],
    /// Mean weight of each sense over covered entries.
    pub frequencies: Vec<f64>,
    pub covered: usize,
    /// Fraction of list entries found in the inventory.
    pub coverage: f64,
}

fn covered_weights<I>(words: I, inv: &SenseInventory) -> Vec<&[f64]>
where
    I: IntoIterator,
    I::Item: AsRef<str>,
{
    words.into_iter().filter_map(|w| inv.get(w.as_ref())).collect()
}

fn profile_of(total: usize, weights: &[&[f64]], inv: &SenseInventory) -> Result<SenseProfile> {
    if total == 0 {
        return Err(Error::InvalidArgument("empty ranked list".into()));
    }
    if weights.is_empty() {
        return Err(Error::NoCoverage);
    }
    let mut frequencies = vec![0.0; inv.senses().len()];
    for w in weights {
        for (f, x) in frequencies.iter_mut().zip(w.iter()) {
            *f += x;
        }
    }
    for f in &mut frequencies {
        *f /= weights.len() as f64;
    }
    Ok(SenseProfile {
        senses: inv.senses(),
        frequencies,
        covered: weights.len(),
        coverage: weights.len() as f64 / total as f64,
    })
}

pub fn sense_profile(list: &RankedList, inv: &SenseInventory) -> Result<SenseProfile> {
    profile_of(list.entries.len(), &covered_weights(list.words(), inv), inv)
}

/// One sense compared between the male and female lists of a slot.
#[derive(Clone, Debug, PartialEq)]
pub struct SenseRow {
    pub slot: Slot,
    pub sense: &'static str,
    pub freq_masc: f64,
    pub freq_fem: f64,
    pub result: TestResult,
}

/// Seed for one independent test of a family, derived from the run seed.
pub(crate) fn task_seed(seed: u64, a: usize, b: usize) -> u64 {
    let mut z = seed ^ ((a as u64) << 32 | b as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-sense permutation tests of male against female top-k lists.
///
/// Each group holds one sense weight per covered list word. Tests run for
/// every sentiment component and, for a three-sentiment model, once more on
/// the pooled lists. Significance is Bonferroni-corrected over the senses.
pub fn sense_difference_suite(
    params: &ModelParams,
    inst: &Instance,
    inv: &SenseInventory,
    k: usize,
    permutations: usize,
    seed: u64,
) -> Result<Vec<SenseRow>> {
    let mut slots: Vec<(Slot, [Vec<String>; 2])> = Vec::new();
    for slot in Slot::for_model(params.num_sentiments) {
        let sentiment = match slot {
            Slot::Sentiment(s) => Some(s),
            _ => None,
        };
        let words = Gender::ALL
            .map(|g| topk(params, inst, g, sentiment, k).map(|l| l.words().map(str::to_string).collect::<Vec<_>>()));
        let [m, f] = words;
        slots.push((slot, [m?, f?]));
    }
    if params.num_sentiments > 1 {
        let pooled = [0, 1].map(|g| slots.iter().flat_map(|(_, w)| w[g].iter().cloned()).collect::<Vec<_>>());
        slots.push((Slot::Pooled, pooled));
    }

    let n_senses = inv.senses().len();
    let mut tasks = Vec::new();
    for (si, (slot, words)) in slots.iter().enumerate() {
        let masc = covered_weights(&words[0], inv);
        let fem = covered_weights(&words[1], inv);
        let pm = profile_of(words[0].len(), &masc, inv)?;
        let pf = profile_of(words[1].len(), &fem, inv)?;
        for j in 0..n_senses {
            let a: Vec<f64> = masc.iter().map(|w| w[j]).collect();
            let b: Vec<f64> = fem.iter().map(|w| w[j]).collect();
            tasks.push((si, *slot, j, pm.frequencies[j], pf.frequencies[j], a, b));
        }
    }
    tasks
        .into_par_iter()
        .map(|(si, slot, j, freq_masc, freq_fem, a, b)| {
            let result = permutation_test(&a, &b, permutations, task_seed(seed, si, j))?.bonferroni(n_senses);
            Ok(SenseRow {
                slot,
                sense: inv.senses()[j],
                freq_masc,
                freq_fem,
                result,
            })
        })
        .collect()
}

/// The row for `sense` under `sentiment`, if present.
pub fn find_row<'a>(rows: &'a [SenseRow], sentiment: Sentiment, sense: &str) -> Option<&'a SenseRow> {
    rows.iter()
        .find(|r| r.slot == Slot::Sentiment(sentiment) && r.sense == sense)
}
