//! Quantifying gendered language in dependency-parsed corpora.
//!
//! Collocations of gendered nouns with adjectives (`amod`) or verbs (`nsubj`,
//! `dobj`) are modeled with a sparse additive log-linear model whose latent
//! sentiment is tied to an external lexicon through posterior
//! regularization. Around the model sit a PMI baseline and the statistical
//! analyses used to interpret it: ranked deviation lists, supersense and
//! sentiment frequency tests, and correlation with human judgments.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod lexicons;
pub mod model;
pub mod pmi;
pub mod synth;

pub use error::{Error, Result};
