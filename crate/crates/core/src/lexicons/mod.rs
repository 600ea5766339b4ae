//! External lexical resources: the sentiment prior q(s|ν) and the
//! adjective/verb supersense inventories.

mod senses;
mod sentiment;

pub use senses::{load_sense_inventory, SenseInventory, SenseKind, ADJECTIVE_SENSES, VERB_SENSES};
pub use sentiment::{load_sentiment_lexicon, Sentiment, SentimentPrior};
