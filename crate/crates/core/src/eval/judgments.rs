use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::stats::{midranks, pearson, spearman};
use crate::corpus::Gender;
use crate::error::{Error, Result};
use crate::model::{femaleness, Instance, ModelParams};

/// Femaleness above this counts as a female prediction.
pub const AGREEMENT_THRESHOLD: f64 = 0.5;

fn read_pairs(path: &Path) -> Result<Vec<(usize, String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        match (fields.next(), fields.next(), fields.next()) {
            (Some(w), Some(v), None) if !w.is_empty() => out.push((i + 1, w.to_lowercase(), v.trim().to_string())),
            _ => return Err(Error::parse(path, i + 1, "expected `word<TAB>value`")),
        }
    }
    Ok(out)
}

/// Continuous annotations, `word<TAB>score`.
pub fn load_judgments(path: impl AsRef<Path>) -> Result<BTreeMap<String, f64>> {
    let path = path.as_ref();
    read_pairs(path)?
        .into_iter()
        .map(|(line, w, v)| match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok((w, x)),
            _ => Err(Error::parse(path, line, format!("bad score `{v}`"))),
        })
        .collect()
}

/// Binary annotations, `word<TAB>m|f`.
pub fn load_labels(path: impl AsRef<Path>) -> Result<BTreeMap<String, Gender>> {
    let path = path.as_ref();
    read_pairs(path)?
        .into_iter()
        .map(|(line, w, v)| {
            v.parse::<Gender>()
                .map(|g| (w, g))
                .map_err(|_| Error::parse(path, line, format!("bad label `{v}`")))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct WordScore {
    pub word: String,
    /// p(FEM | ν).
    pub femaleness: f64,
    /// Mean over sentiments of the FEM minus MASC deviation.
    pub score_diff: f64,
    pub judgment: Option<f64>,
    pub label: Option<Gender>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Correlation {
    pub rho: f64,
    pub p_value: f64,
    /// Fraction of labeled words whose thresholded femaleness matches the
    /// label; `None` when no labeled word is in the vocabulary.
    pub agreement: Option<f64>,
    /// Words with a continuous judgment in the vocabulary.
    pub n: usize,
    pub n_labeled: usize,
    pub words: Vec<WordScore>,
}

/// Correlates model femaleness p(FEM|ν) with human annotations.
///
/// The p-value for ρ is two-sided, from `permutations` shuffles of the
/// judgments.
pub fn correlate_judgments(
    params: &ModelParams,
    inst: &Instance,
    judgments: &BTreeMap<String, f64>,
    labels: &BTreeMap<String, Gender>,
    permutations: usize,
    seed: u64,
) -> Result<Correlation> {
    let overlap: Vec<(usize, f64)> = judgments
        .iter()
        .filter_map(|(w, &x)| inst.neighbor_index(w).map(|v| (v, x)))
        .collect();
    if overlap.len() < 3 {
        let missing = judgments
            .keys()
            .filter(|w| inst.neighbor_index(w).is_none())
            .cloned()
            .collect();
        return Err(Error::InsufficientOverlap(missing));
    }
    let fem = femaleness(params, inst);
    let model: Vec<f64> = overlap.iter().map(|&(v, _)| fem[v]).collect();
    let human: Vec<f64> = overlap.iter().map(|&(_, x)| x).collect();
    let (lo, hi) = model
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    if hi - lo <= 1e-12 {
        return Err(Error::ConstantInput);
    }
    let rho = spearman(&model, &human)?;

    let model_ranks = midranks(&model);
    let mut shuffled = midranks(&human);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut extreme = 0u64;
    for _ in 0..permutations {
        shuffled.shuffle(&mut rng);
        let r = pearson(&model_ranks, &shuffled).unwrap_or(0.0);
        if r.abs() >= rho.abs() - 1e-12 {
            extreme += 1;
        }
    }
    let p_value = (extreme + 1) as f64 / (permutations + 1) as f64;

    let (mut agree, mut n_labeled) = (0usize, 0usize);
    for (w, &g) in labels {
        if let Some(v) = inst.neighbor_index(w) {
            n_labeled += 1;
            if (fem[v] > AGREEMENT_THRESHOLD) == (g == Gender::Fem) {
                agree += 1;
            }
        }
    }

    let (gm, gf) = (
        inst.space.gender_index(Gender::Masc),
        inst.space.gender_index(Gender::Fem),
    );
    let s = params.num_sentiments;
    let words = inst
        .neighbors
        .iter()
        .enumerate()
        .filter(|(_, w)| judgments.contains_key(*w) || labels.contains_key(*w))
        .map(|(v, w)| WordScore {
            word: w.clone(),
            femaleness: fem[v],
            score_diff: (0..s)
                .map(|si| params.eta(v, si, gf) - params.eta(v, si, gm))
                .sum::<f64>()
                / s as f64,
            judgment: judgments.get(w).copied(),
            label: labels.get(w).copied(),
        })
        .collect();

    Ok(Correlation {
        rho,
        p_value,
        agreement: (n_labeled > 0).then(|| agree as f64 / n_labeled as f64),
        n: overlap.len(),
        n_labeled,
        words,
    })
}
