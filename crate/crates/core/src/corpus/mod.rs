//! Corpus ingestion: gendered noun lexicon, arcs adapter and count tables.

mod arcs;
mod lexicon;
mod table;

pub use arcs::{parse_arcs_line, Ingest, InputFormat, MalformedLine};
pub use lexicon::{featurize_noun, load_gender_lexicon, Gender, GenderLexicon, NounEntry, NounFeatures, Number};
pub use table::{
    gender_marginals, load_count_table, parse_canonical_line, read_canonical, Aggregator, Cell, Collocation,
    CountTable, Relation,
};
