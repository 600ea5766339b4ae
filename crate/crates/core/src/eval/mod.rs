//! Ranked lists, sense and sentiment analyses, and the statistics behind them.

mod judgments;
mod rank;
mod senses;
mod sentiment;
pub mod stats;


pub use judgments::{correlate_judgments, load_judgments, load_labels, Correlation, WordScore, AGREEMENT_THRESHOLD};
pub use rank::{all_lists, topk, RankedList, Slot};
pub use senses::{find_row, sense_difference_suite, sense_profile, SenseProfile, SenseRow};
pub use sentiment::{sentiment_frequency, GenderSentiment, SentimentFrequency};
pub use stats::{midranks, pearson, permutation_test, spearman, TestResult};
