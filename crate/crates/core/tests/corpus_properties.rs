use std::collections::BTreeMap;
use std::path::Path;

use genlang::corpus::{gender_marginals, load_count_table, Collocation, CountTable, Gender, GenderLexicon, Relation};
use proptest::prelude::*;

const NOUNS: [&str; 6] = ["man", "woman", "boys", "girls", "king", "queen"];
const NEIGHBORS: [&str; 5] = ["tall", "pretty", "brave", "old", "kind"];

fn records() -> impl Strategy<Value = Vec<Collocation>> {
    prop::collection::vec((0..NOUNS.len(), 0..NEIGHBORS.len(), 1u64..1000), 1..60).prop_map(|v| {
        v.into_iter()
            .map(|(n, w, c)| Collocation {
                noun: NOUNS[n].to_string(),
                neighbor: NEIGHBORS[w].to_string(),
                relation: Relation::Amod,
                count: c,
            })
            .collect()
    })
}

/// Per-key sums computed directly from the records.
fn brute_force(records: &[Collocation]) -> BTreeMap<(String, String), u64> {
    let mut out = BTreeMap::new();
    for r in records {
        *out.entry((r.neighbor.clone(), r.noun.clone())).or_insert(0) += r.count;
    }
    out
}

fn as_map(table: &CountTable) -> BTreeMap<(String, String), u64> {
    table
        .cells()
        .iter()
        .map(|c| {
            (
                (table.neighbors()[c.neighbor].clone(), table.nouns()[c.noun].clone()),
                c.count,
            )
        })
        .collect()
}

proptest! {
    #[test]
    fn aggregate_matches_brute_force(recs in records()) {
        let table = CountTable::aggregate(recs.clone(), Relation::Amod).unwrap();
        prop_assert_eq!(as_map(&table), brute_force(&recs));
        prop_assert_eq!(table.total(), recs.iter().map(|r| r.count).sum::<u64>());
    }

    #[test]
    fn merge_of_shards_equals_single_pass(recs in records(), cut in 0.0f64..1.0) {
        let cut = ((recs.len() as f64 * cut) as usize).clamp(1, recs.len());
        let whole = CountTable::aggregate(recs.clone(), Relation::Amod).unwrap();
        let (a, b) = recs.split_at(cut);
        let left = CountTable::aggregate(a.to_vec(), Relation::Amod).unwrap();
        if b.is_empty() {
            prop_assert_eq!(left, whole);
        } else {
            let right = CountTable::aggregate(b.to_vec(), Relation::Amod).unwrap();
            let ab = left.merge(&right).unwrap();
            let ba = right.merge(&left).unwrap();
            prop_assert_eq!(&ab, &whole);
            prop_assert_eq!(&ba, &whole);
            prop_assert_eq!(ab.fingerprint(), whole.fingerprint());
        }
    }

    #[test]
    fn empirical_sums_to_one(recs in records()) {
        let table = CountTable::aggregate(recs, Relation::Amod).unwrap();
        let sum: f64 = table.empirical().map(|(_, _, p)| p).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn marginals_partition_the_total(recs in records()) {
        let table = CountTable::aggregate(recs, Relation::Amod).unwrap();
        let m = gender_marginals(&table, &GenderLexicon::bundled());
        prop_assert_eq!(m[&Gender::Masc] + m[&Gender::Fem], table.total());
    }
}

#[test]
fn merging_different_relations_fails() {
    let rec = |relation| Collocation {
        noun: "man".into(),
        neighbor: "tall".into(),
        relation,
        count: 1,
    };
    let a = CountTable::aggregate([rec(Relation::Amod)], Relation::Amod).unwrap();
    let b = CountTable::aggregate([rec(Relation::Nsubj)], Relation::Nsubj).unwrap();
    assert!(a.merge(&b).is_err());
}

#[test]
fn table1_noun_totals() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/table1_counts.tsv");
    let table = load_count_table(path, Relation::Amod).unwrap();
    let lex = GenderLexicon::bundled();
    table.validate(&lex).unwrap();
    let m = gender_marginals(&table, &lex);
    // Printed per-noun rows are rounded to 0.1M, so their sums drift from
    // the printed totals by up to a few rounding units.
    let fem = m[&Gender::Fem] as f64 / 1e6;
    let masc = m[&Gender::Masc] as f64 / 1e6;
    assert!((fem - 30.2).abs() <= 0.35, "fem {fem}");
    assert!((masc - 62.7).abs() <= 0.35, "masc {masc}");
    assert_eq!(table.nouns().len(), 14);
}
