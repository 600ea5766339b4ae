//! The latent-sentiment model of neighbor choice given gendered nouns.

mod checkpoint;
mod objective;
mod params;
mod space;
mod train;

#[cfg(test)]
mod tests;

pub use checkpoint::{Checkpoint, GridSpec, NounRecord, CHECKPOINT_FORMAT};
pub use objective::{
    cond_neighbor, evaluate, femaleness, gradient, joint_marginal, mean_posterior_kl, noun_prior, objective,
    posterior_kls, score, sent_given_noun, sentiment_posterior, sentiment_posteriors, Evaluation, Forward, Gradient,
    Penalties,
};
pub use params::{Instance, ModelParams};
pub use space::FeatureSpace;
pub use train::{grid_train_average, train, train_from, GridCell, GridOutcome, TrainConfig, TrainOutcome};
