//! PMI baseline and the sentiment-free restricted model it is equivalent to.
//!
//! With every noun collapsed to its gender class and one-hot gender features,
//! the maximum-likelihood deviations satisfy τ_g(ν) ∝ exp(PMI(ν, g)).
//! [`prop1_check`] trains that restricted model and measures the agreement.

use std::collections::BTreeMap;

use crate::corpus::{CountTable, Gender, GenderLexicon};
use crate::error::{Error, Result};
use crate::eval::stats::{midranks, midranks_with_tolerance, pearson};

/// Counts #(ν, g) with every noun form folded into its gender.
#[derive(Clone, Debug, PartialEq)]
pub struct GenderCollapsedTable {
    neighbors: Vec<String>,
    /// Indexed by [`Gender::index`].
    counts: Vec<[u64; 2]>,
    gender_totals: [u64; 2],
    total: u64,
}

impl GenderCollapsedTable {
    pub fn from_table(table: &CountTable, lex: &GenderLexicon) -> Result<Self> {
        let genders = table
            .nouns()
            .iter()
            .map(|n| lex.gender_of(n).ok_or_else(|| Error::UnknownForm(n.clone())))
            .collect::<Result<Vec<_>>>()?;
        let mut counts = vec![[0u64; 2]; table.neighbors().len()];
        for cell in table.cells() {
            counts[cell.neighbor][genders[cell.noun].index()] += cell.count;
        }
        Self::build(table.neighbors().to_vec(), counts)
    }

    /// Builds a table from `(neighbor, gender, count)` records; repeated
    /// pairs are summed.
    pub fn from_counts<'a, I>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, Gender, u64)>,
    {
        let mut map: BTreeMap<String, [u64; 2]> = BTreeMap::new();
        for (nb, g, c) in records {
            map.entry(nb.to_lowercase()).or_default()[g.index()] += c;
        }
        map.retain(|_, c| c[0] + c[1] > 0);
        let (neighbors, counts) = map.into_iter().unzip();
        Self::build(neighbors, counts)
    }

    fn build(neighbors: Vec<String>, counts: Vec<[u64; 2]>) -> Result<Self> {
        if neighbors.is_empty() {
            return Err(Error::EmptyTable);
        }
        let mut gender_totals = [0u64; 2];
        for c in &counts {
            gender_totals[0] += c[0];
            gender_totals[1] += c[1];
        }
        if gender_totals.contains(&0) {
            return Err(Error::MissingGender);
        }
        Ok(GenderCollapsedTable {
            neighbors,
            counts,
            gender_totals,
            total: gender_totals[0] + gender_totals[1],
        })
    }

    pub fn neighbors(&self) -> &[String] {
        &self.neighbors
    }

    pub fn num_neighbors(&self) -> usize {
        self.neighbors.len()
    }

    pub fn count(&self, neighbor: usize, gender: Gender) -> u64 {
        self.counts[neighbor][gender.index()]
    }

    pub fn gender_total(&self, gender: Gender) -> u64 {
        self.gender_totals[gender.index()]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn neighbor_total(&self, neighbor: usize) -> u64 {
        self.counts[neighbor][0] + self.counts[neighbor][1]
    }

    /// p̂(ν | g).
    pub fn empirical_conditional(&self, neighbor: usize, gender: Gender) -> f64 {
        self.count(neighbor, gender) as f64 / self.gender_total(gender) as f64
    }

    /// Natural-log PMI, or `None` when the pair was never observed.
    ///
    /// Computed as ln(c(ν,g)·N / (c(ν)·c(g))) from integer products, so
    /// pairs with equal count ratios get identical values.
    pub fn pmi(&self, neighbor: usize, gender: Gender) -> Option<f64> {
        let joint = self.count(neighbor, gender);
        if joint == 0 {
            return None;
        }
        let num = joint as u128 * self.total as u128;
        let den = self.neighbor_total(neighbor) as u128 * self.gender_total(gender) as u128;
        Some((num as f64 / den as f64).ln())
    }

    /// All defined PMI values for one gender, highest first (ties by word).
    pub fn ranked_pmi(&self, gender: Gender) -> Vec<(&str, f64)> {
        let mut out: Vec<(&str, f64)> = (0..self.num_neighbors())
            .filter_map(|v| self.pmi(v, gender).map(|p| (self.neighbors[v].as_str(), p)))
            .collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        out
    }
}

/// Optimizer settings for the restricted model.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedConfig {
    pub learning_rate: f64,
    /// Per-step multiplicative learning-rate decay.
    pub decay: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Required max |p(ν|g) − p̂(ν|g)|.
    pub tolerance: f64,
    /// Required max |ln p(ν|g) − ln p̂(ν|g)| over observed pairs.
    pub log_tolerance: f64,
}

impl Default for RestrictedConfig {
    fn default() -> Self {
        RestrictedConfig {
            learning_rate: 0.1,
            decay: 0.9995,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            epsilon: 1e-12,
            max_iterations: 200_000,
            tolerance: 1e-6,
            log_tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RestrictedFit {
    /// η★(ν) as [MASC, FEM] deviations.
    pub eta: Vec<[f64; 2]>,
    /// m_ν = ln p̂(ν).
    pub background: Vec<f64>,
    pub iterations: usize,
    pub max_deviation: f64,
    pub max_log_deviation: f64,
}

impl RestrictedFit {
    /// Fitted p(ν | g) over the vocabulary.
    pub fn conditional(&self, gender: Gender) -> Vec<f64> {
        conditional(&self.background, &self.eta, gender.index())
    }
}

fn conditional(background: &[f64], eta: &[[f64; 2]], g: usize) -> Vec<f64> {
    let logits: Vec<f64> = background.iter().zip(eta).map(|(m, e)| m + e[g]).collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|x| (x - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / z).collect()
}

/// Maximum-likelihood fit of p(ν|g) ∝ exp(m_ν + η★(ν, g)).
///
/// Adam ascent with an exponentially decaying learning rate and no sign
/// constraint on η★. Unobserved pairs have no finite maximizer; their
/// deviation is fixed at −∞ so that p(ν|g) = p̂(ν|g) = 0 exactly.
pub fn restricted_train(table: &GenderCollapsedTable, config: &RestrictedConfig) -> Result<RestrictedFit> {
    if !(config.learning_rate > 0.0 && config.decay > 0.0 && config.decay <= 1.0) {
        return Err(Error::InvalidArgument(
            "learning rate and decay must be positive".into(),
        ));
    }
    let v = table.num_neighbors();
    let n = table.total() as f64;
    let background: Vec<f64> = (0..v).map(|i| (table.neighbor_total(i) as f64 / n).ln()).collect();
    let target: Vec<[f64; 2]> = (0..v)
        .map(|i| {
            [
                table.empirical_conditional(i, Gender::Masc),
                table.empirical_conditional(i, Gender::Fem),
            ]
        })
        .collect();
    let weight = [
        table.gender_total(Gender::Masc) as f64 / n,
        table.gender_total(Gender::Fem) as f64 / n,
    ];

    let observed: Vec<[bool; 2]> = target.iter().map(|t| [t[0] > 0.0, t[1] > 0.0]).collect();
    let mut eta: Vec<[f64; 2]> = observed
        .iter()
        .map(|o| o.map(|seen| if seen { 0.0 } else { f64::NEG_INFINITY }))
        .collect();
    let mut m = vec![[0.0f64; 2]; v];
    let mut s = vec![[0.0f64; 2]; v];
    let mut lr = config.learning_rate;
    let (b1, b2) = (config.adam_beta1, config.adam_beta2);

    for iteration in 0..=config.max_iterations {
        let fitted = [conditional(&background, &eta, 0), conditional(&background, &eta, 1)];
        let (mut dev, mut log_dev) = (0.0f64, 0.0f64);
        for i in 0..v {
            for g in 0..2 {
                dev = dev.max((fitted[g][i] - target[i][g]).abs());
                if target[i][g] > 0.0 {
                    log_dev = log_dev.max((fitted[g][i].ln() - target[i][g].ln()).abs());
                }
            }
        }
        if !dev.is_finite() || !log_dev.is_finite() {
            return Err(Error::Diverged { iteration, value: dev });
        }
        if dev <= config.tolerance && log_dev <= config.log_tolerance {
            return Ok(RestrictedFit {
                eta,
                background,
                iterations: iteration,
                max_deviation: dev,
                max_log_deviation: log_dev,
            });
        }
        if iteration == config.max_iterations {
            return Err(Error::NotConverged {
                iterations: iteration,
                max_deviation: dev,
            });
        }
        let t = (iteration + 1) as i32;
        let (c1, c2) = (1.0 - b1.powi(t), 1.0 - b2.powi(t));
        for i in 0..v {
            for g in (0..2).filter(|&g| observed[i][g]) {
                // ∂/∂η(ν,g) of Σ p̂(ν,g) ln p(ν|g)
                let grad = weight[g] * (target[i][g] - fitted[g][i]);
                m[i][g] = b1 * m[i][g] + (1.0 - b1) * grad;
                s[i][g] = b2 * s[i][g] + (1.0 - b2) * grad * grad;
                eta[i][g] += lr * (m[i][g] / c1) / ((s[i][g] / c2).sqrt() + config.epsilon);
            }
        }
        lr *= config.decay;
    }
    unreachable!("loop returns on its last iteration")
}

/// Agreement between the restricted fit and PMI for one gender.
#[derive(Clone, Debug, PartialEq)]
pub struct Prop1Gender {
    pub gender: Gender,
    /// Max |τ_g(ν) − exp PMI(ν,g)| after normalizing both over observed ν.
    pub max_deviation: f64,
    pub spearman: f64,
    /// Number of neighbors observed with this gender.
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prop1Report {
    pub genders: Vec<Prop1Gender>,
    pub iterations: usize,
    pub fit_deviation: f64,
}

/// Model scores closer than this (in log space) are ranked as ties.
pub const TIE_TOLERANCE: f64 = 1e-8;

fn rank_correlation(reference: &[f64], model: &[f64]) -> f64 {
    let r = midranks(reference);
    let m = midranks_with_tolerance(model, TIE_TOLERANCE);
    match pearson(&r, &m) {
        Some(rho) => rho,
        // all tied on at least one side: agreement iff both sides are
        None if r == m => 1.0,
        None => 0.0,
    }
}

/// Trains the restricted model and compares exp(η★) with exp(PMI).
pub fn prop1_check(table: &GenderCollapsedTable, config: &RestrictedConfig) -> Result<Prop1Report> {
    let fit = restricted_train(table, config)?;
    let genders = Gender::ALL
        .iter()
        .map(|&gender| {
            let g = gender.index();
            let support: Vec<usize> = (0..table.num_neighbors())
                .filter(|&i| table.count(i, gender) > 0)
                .collect();
            let pmi: Vec<f64> = support.iter().map(|&i| table.pmi(i, gender).unwrap()).collect();
            let eta: Vec<f64> = support.iter().map(|&i| fit.eta[i][g]).collect();
            let tau = normalize_exp(&eta);
            let reference = normalize_exp(&pmi);
            let max_deviation = tau
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Prop1Gender {
                gender,
                max_deviation,
                spearman: rank_correlation(&pmi, &eta),
                support: support.len(),
            }
        })
        .collect();
    Ok(Prop1Report {
        genders,
        iterations: fit.iterations,
        fit_deviation: fit.max_deviation,
    })
}

fn normalize_exp(xs: &[f64]) -> Vec<f64> {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = xs.iter().map(|x| (x - max).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|x| x / z).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_by_two() -> GenderCollapsedTable {
        GenderCollapsedTable::from_counts([
            ("a", Gender::Masc, 30),
            ("a", Gender::Fem, 10),
            ("b", Gender::Masc, 10),
            ("b", Gender::Fem, 30),
        ])
        .unwrap()
    }

    #[test]
    fn pmi_hand_values() {
        let t = two_by_two();
        let a = t.pmi(0, Gender::Masc).unwrap();
        assert!((a - (0.375f64 / 0.25).ln()).abs() < 1e-15);
        assert!((a - 0.405_465_108_108_164_4).abs() < 1e-12);
        assert_eq!(t.pmi(1, Gender::Masc).unwrap(), 0.5f64.ln());
        // mirror-image counts give mirror-image values
        assert_eq!(a, t.pmi(1, Gender::Fem).unwrap());
        assert_eq!(t.pmi(0, Gender::Fem), t.pmi(1, Gender::Masc));
    }

    #[test]
    fn balanced_counts_have_zero_pmi() {
        let t = GenderCollapsedTable::from_counts([
            ("a", Gender::Masc, 5),
            ("a", Gender::Fem, 5),
            ("b", Gender::Masc, 7),
            ("b", Gender::Fem, 7),
        ])
        .unwrap();
        for v in 0..2 {
            for g in Gender::ALL {
                assert_eq!(t.pmi(v, g).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn zero_pairs_are_absent() {
        let t =
            GenderCollapsedTable::from_counts([("a", Gender::Masc, 5), ("b", Gender::Fem, 7), ("b", Gender::Masc, 1)])
                .unwrap();
        assert_eq!(t.pmi(0, Gender::Fem), None);
        assert_eq!(t.ranked_pmi(Gender::Fem).len(), 1);
    }

    #[test]
    fn single_gender_is_rejected() {
        let r = GenderCollapsedTable::from_counts([("a", Gender::Masc, 5), ("b", Gender::Masc, 2)]);
        assert!(matches!(r, Err(Error::MissingGender)));
        assert_eq!(Error::MissingGender.to_string(), "both genders required");
    }

    #[test]
    fn collapses_noun_forms() {
        use crate::corpus::{Collocation, Relation};
        let lex = GenderLexicon::bundled();
        let rec = |noun: &str, nb: &str, count| Collocation {
            noun: noun.into(),
            neighbor: nb.into(),
            relation: Relation::Amod,
            count,
        };
        let table = CountTable::aggregate(
            vec![
                rec("man", "tall", 3),
                rec("men", "tall", 2),
                rec("woman", "tall", 4),
                rec("girls", "kind", 1),
            ],
            Relation::Amod,
        )
        .unwrap();
        let c = GenderCollapsedTable::from_table(&table, &lex).unwrap();
        assert_eq!(c.total(), table.total());
        assert_eq!(c.count(1, Gender::Masc), 5);
        assert_eq!(c.count(1, Gender::Fem), 4);
        assert_eq!(c.count(0, Gender::Fem), 1);
    }

    #[test]
    fn saturated_fit_on_two_by_two() {
        let t = two_by_two();
        let fit = restricted_train(&t, &RestrictedConfig::default()).unwrap();
        for g in Gender::ALL {
            let p = fit.conditional(g);
            for v in 0..2 {
                assert!((p[v] - t.empirical_conditional(v, g)).abs() <= 1e-6);
            }
        }
        assert!(fit.eta[0][0] > fit.eta[1][0]);
        let report = prop1_check(&t, &RestrictedConfig::default()).unwrap();
        for g in &report.genders {
            assert_eq!(g.spearman, 1.0);
            assert!(g.max_deviation <= 1e-9);
        }
        // τ_MASC normalized = (0.75, 0.25)
        let tau = normalize_exp(&[fit.eta[0][0], fit.eta[1][0]]);
        assert!((tau[0] - 0.75).abs() < 1e-9 && (tau[1] - 0.25).abs() < 1e-9);
    }

    #[test]
    fn unobserved_pairs_still_converge() {
        let t = GenderCollapsedTable::from_counts([
            ("a", Gender::Masc, 50),
            ("b", Gender::Fem, 7),
            ("b", Gender::Masc, 3),
            ("c", Gender::Fem, 20),
        ])
        .unwrap();
        let report = prop1_check(&t, &RestrictedConfig::default()).unwrap();
        assert!(report.fit_deviation <= 1e-6);
        for g in &report.genders {
            assert_eq!(g.support, 2);
            assert_eq!(g.spearman, 1.0);
        }
    }

    #[test]
    fn iteration_cap_is_an_error() {
        let cfg = RestrictedConfig {
            max_iterations: 3,
            ..Default::default()
        };
        assert!(matches!(
            restricted_train(&two_by_two(), &cfg),
            Err(Error::NotConverged { .. })
        ));
    }

    proptest! {
        #[test]
        fn pmi_weighted_by_joint_is_non_negative(
            counts in proptest::collection::vec((0u64..200, 0u64..200), 2..20),
        ) {
            let names: Vec<String> = (0..counts.len()).map(|i| format!("w{i:02}")).collect();
            let records: Vec<(&str, Gender, u64)> = names
                .iter()
                .zip(&counts)
                .flat_map(|(n, &(m, f))| [(n.as_str(), Gender::Masc, m), (n.as_str(), Gender::Fem, f)])
                .collect();
            let Ok(t) = GenderCollapsedTable::from_counts(records) else { return Ok(()) };
            for g in Gender::ALL {
                let kl: f64 = (0..t.num_neighbors())
                    .filter_map(|v| t.pmi(v, g).map(|p| t.empirical_conditional(v, g) * p))
                    .sum();
                prop_assert!(kl >= -1e-12);
            }
        }
    }
}
