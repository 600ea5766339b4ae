use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FeatureSpace, Instance, ModelParams, TrainConfig};
use crate::corpus::{Gender, NounFeatures, Relation};
use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "genlang-checkpoint/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NounRecord {
    pub form: String,
    pub gender: Gender,
    /// Active feature positions: lemma, gender, number.
    pub features: [usize; 3],
}

/// Self-describing JSON snapshot of a trained model.
///
/// Holds every index order needed to interpret the parameters without the
/// original corpus. η is stored as sparse `(ν, s, t, value)` triplets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub relation: Relation,
    pub features: Vec<String>,
    pub neighbors: Vec<String>,
    pub nouns: Vec<NounRecord>,
    pub num_sentiments: usize,
    pub background: Vec<f64>,
    pub eta: Vec<(usize, usize, usize, f64)>,
    pub omega: Vec<f64>,
    pub xi: Vec<f64>,
    pub config: TrainConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// SHA-256 of the canonical count table the model was trained on.
    pub fingerprint: String,
}

impl Checkpoint {
    pub fn new(params: &ModelParams, inst: &Instance, config: &TrainConfig, grid: Option<GridSpec>) -> Self {
        let mut eta = Vec::new();
        for nu in 0..params.num_neighbors {
            for s in 0..params.num_sentiments {
                for t in 0..params.dim {
                    let x = params.eta(nu, s, t);
                    if x != 0.0 {
                        eta.push((nu, s, t, x));
                    }
                }
            }
        }
        Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            relation: inst.relation,
            features: inst.space.names(),
            neighbors: inst.neighbors.clone(),
            nouns: inst
                .nouns
                .iter()
                .zip(&inst.noun_features)
                .zip(&inst.noun_genders)
                .map(|((form, f), &gender)| NounRecord {
                    form: form.clone(),
                    gender,
                    features: f.active(),
                })
                .collect(),
            num_sentiments: params.num_sentiments,
            background: params.background.clone(),
            eta,
            omega: params.omega.clone(),
            xi: params.xi.clone(),
            config: config.clone(),
            grid,
            fingerprint: inst.fingerprint.clone(),
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        let v = self.neighbors.len();
        let s = self.num_sentiments;
        let t = self.features.len();
        let g = self.nouns.len();
        if self.background.len() != v || self.omega.len() != g * s || self.xi.len() != g {
            return Err(Error::Checkpoint("parameter lengths do not match index orders".into()));
        }
        let mut params = ModelParams {
            num_neighbors: v,
            num_sentiments: s,
            dim: t,
            num_nouns: g,
            background: self.background.clone(),
            eta: vec![0.0; v * s * t],
            omega: self.omega.clone(),
            xi: self.xi.clone(),
        };
        for &(nu, si, f, x) in &self.eta {
            if nu >= v || si >= s || f >= t {
                return Err(Error::Checkpoint(format!("eta entry ({nu}, {si}, {f}) out of range")));
            }
            params.set_eta(nu, si, f, x);
        }
        Ok(params)
    }

    /// An instance carrying the checkpoint's index orders and featurization
    /// but no empirical data.
    pub fn instance(&self) -> Result<Instance> {
        let space = FeatureSpace::from_names(&self.features)?;
        let t = space.dim();
        if self.nouns.iter().any(|n| n.features.iter().any(|&f| f >= t)) {
            return Err(Error::Checkpoint("noun feature index out of range".into()));
        }
        Ok(Instance {
            relation: self.relation,
            space,
            neighbors: self.neighbors.clone(),
            nouns: self.nouns.iter().map(|n| n.form.clone()).collect(),
            noun_features: self
                .nouns
                .iter()
                .map(|n| NounFeatures {
                    lemma: n.features[0],
                    gender: n.features[1],
                    number: n.features[2],
                })
                .collect(),
            noun_genders: self.nouns.iter().map(|n| n.gender).collect(),
            empirical: Vec::new(),
            neighbor_marginal: self.background.iter().map(|m| m.exp()).collect(),
            noun_marginal: Vec::new(),
            prior: vec![None; self.neighbors.len()],
            fingerprint: self.fingerprint.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("checkpoint serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ck: Checkpoint = serde_json::from_str(text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if ck.format != CHECKPOINT_FORMAT {
            return Err(Error::Checkpoint(format!("unsupported format `{}`", ck.format)));
        }
        Ok(ck)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
