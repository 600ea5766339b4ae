use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::corpus::{Collocation, CountTable, Gender, GenderLexicon, Relation};
use crate::lexicons::SentimentPrior;

const TWO_LEMMAS: &str = "man\tman\tmasc\tsg\nman\twoman\tfem\tsg\nboy\tboys\tmasc\tpl\nboy\tgirls\tfem\tpl\n";

fn lexicon() -> GenderLexicon {
    GenderLexicon::parse(TWO_LEMMAS, Path::new("test")).unwrap()
}

fn table(rows: &[(&str, &str, u64)]) -> CountTable {
    CountTable::aggregate(
        rows.iter().map(|&(noun, nb, count)| Collocation {
            noun: noun.into(),
            neighbor: nb.into(),
            relation: Relation::Amod,
            count,
        }),
        Relation::Amod,
    )
    .unwrap()
}

fn instance(rows: &[(&str, &str, u64)], prior: Option<&SentimentPrior>) -> Instance {
    let lex = lexicon();
    let space = FeatureSpace::from_lexicon(&lex);
    Instance::new(&table(rows), &lex, &space, prior).unwrap()
}

/// Random dense table over `v` neighbors and all four nouns.
fn random_instance(v: usize, seed: u64, prior_every: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nouns = ["man", "woman", "boys", "girls"];
    let names: Vec<String> = (0..v).map(|i| format!("w{i:02}")).collect();
    let mut rows = Vec::new();
    for nb in &names {
        for n in nouns {
            rows.push((n, nb.as_str(), rng.gen_range(1..200u64)));
        }
    }
    let prior = SentimentPrior::from_probabilities(names.iter().enumerate().filter(|(i, _)| i % prior_every == 0).map(
        |(_, w)| {
            (
                w.clone(),
                [
                    rng.gen_range(0.1..5.0),
                    rng.gen_range(0.1..5.0),
                    rng.gen_range(0.1..5.0),
                ],
            )
        },
    ))
    .unwrap();
    instance(&rows, Some(&prior))
}

fn randomize(params: &mut ModelParams, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    params.eta.iter_mut().for_each(|x| *x = rng.gen_range(0.05..1.0));
    params.omega.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
    params.xi.iter_mut().for_each(|x| *x += rng.gen_range(-0.5..0.5));
}

/// Independent evaluation of the objective by explicit enumeration in the
/// probability domain.
fn oracle_objective(params: &ModelParams, inst: &Instance, alpha: f64, beta: f64) -> f64 {
    let (v, s, g) = (params.num_neighbors, params.num_sentiments, params.num_nouns);
    let mut joint3 = vec![vec![vec![0.0; g]; s]; v];
    let xs: Vec<f64> = params.xi.iter().map(|x| x.exp()).collect();
    let xz: f64 = xs.iter().sum();
    for n in 0..g {
        let f = inst.noun_features[n].active();
        let ws: Vec<f64> = (0..s).map(|si| params.omega[n * s + si].exp()).collect();
        let wz: f64 = ws.iter().sum();
        for si in 0..s {
            let un: Vec<f64> = (0..v)
                .map(|nu| (params.background[nu] + f.iter().map(|&t| params.eta(nu, si, t)).sum::<f64>()).exp())
                .collect();
            let z: f64 = un.iter().sum();
            for nu in 0..v {
                joint3[nu][si][n] = un[nu] / z * ws[si] / wz * xs[n] / xz;
            }
        }
    }
    let mut ll = 0.0;
    for &(nu, n, p) in &inst.empirical {
        let pvn: f64 = (0..s).map(|si| joint3[nu][si][n]).sum();
        ll += p * pvn.ln();
    }
    let mut kl = 0.0;
    if s == 3 {
        for (nu, q) in inst.prior.iter().enumerate() {
            if let Some(q) = q {
                let pvs: Vec<f64> = (0..3).map(|si| joint3[nu][si].iter().sum()).collect();
                let pv: f64 = pvs.iter().sum();
                for si in 0..3 {
                    if q[si] > 0.0 {
                        kl += q[si] * (q[si] / (pvs[si] / pv)).ln();
                    }
                }
            }
        }
    }
    let l1: f64 = params.eta.iter().map(|x| x.abs()).sum();
    ll - alpha * l1 - beta * kl
}

fn assert_close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

#[test]
fn init_uniform_counts_give_uniform_background() {
    let inst = instance(
        &[("man", "a", 5), ("man", "b", 5), ("man", "c", 5), ("man", "d", 5)],
        None,
    );
    let p = ModelParams::init(&inst, 3);
    for m in &p.background {
        assert_close(*m, -(4f64).ln(), 1e-15);
    }
}

#[test]
fn init_is_independence_baseline() {
    let inst = random_instance(6, 1, 2);
    let p = ModelParams::init(&inst, 3);
    for (n, f) in inst.noun_features.iter().enumerate() {
        for s in 0..3 {
            let cond = cond_neighbor(&p, f, s);
            for (nu, c) in cond.iter().enumerate() {
                assert_close(*c, inst.neighbor_marginal[nu], 1e-12);
            }
        }
        assert_close(noun_prior(&p)[n], inst.noun_marginal[n], 1e-12);
    }
    let joint = joint_marginal(&p, &inst);
    let g = inst.num_nouns();
    for nu in 0..inst.num_neighbors() {
        for n in 0..g {
            assert_close(
                joint[nu * g + n],
                inst.neighbor_marginal[nu] * inst.noun_marginal[n],
                1e-12,
            );
        }
    }
    assert_eq!(ModelParams::init(&inst, 3), p);
}

#[test]
fn cond_neighbor_hand_value() {
    let inst = instance(&[("man", "a", 5), ("man", "b", 5)], None);
    let mut p = ModelParams::init(&inst, 3);
    let f = inst.noun_features[0];
    p.set_eta(0, 1, f.lemma, 1.0);
    let cond = cond_neighbor(&p, &f, 1);
    let e = 1f64.exp();
    assert_close(cond[0], e / (e + 1.0), 1e-15);
    assert_close(cond[1], 1.0 / (e + 1.0), 1e-15);
    // other sentiments untouched
    assert_close(cond_neighbor(&p, &f, 0)[0], 0.5, 1e-15);

    let mut shifted = p.clone();
    shifted.background.iter_mut().for_each(|m| *m += 7.5);
    let c2 = cond_neighbor(&shifted, &f, 1);
    assert_close(c2[0], cond[0], 1e-14);
}

#[test]
fn sentiment_and_noun_softmax() {
    let inst = instance(&[("man", "a", 1), ("woman", "a", 1), ("boys", "a", 2)], None);
    let mut p = ModelParams::init(&inst, 3);
    for x in sent_given_noun(&p, 0) {
        assert_close(x, 1.0 / 3.0, 1e-15);
    }
    p.omega[0] = 1.0;
    let e = 1f64.exp();
    let s = sent_given_noun(&p, 0);
    assert_close(s[0], e / (e + 2.0), 1e-15);
    assert_close(s[1], 1.0 / (e + 2.0), 1e-15);
    p.omega[0..3].iter_mut().for_each(|x| *x += 3.0);
    assert_close(sent_given_noun(&p, 0)[0], s[0], 1e-15);

    p.xi = vec![0.0, 1.0, 2.0];
    let z = 1.0 + e + e * e;
    let pn = noun_prior(&p);
    assert_close(pn[0], 1.0 / z, 1e-15);
    assert_close(pn[1], e / z, 1e-15);
    assert_close(pn[2], e * e / z, 1e-15);
    p.xi = vec![4.0; 3];
    assert!(noun_prior(&p).iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
}

#[test]
fn joint_matches_three_term_sum() {
    let inst = instance(
        &[("man", "a", 3), ("woman", "b", 1), ("man", "b", 2), ("woman", "a", 4)],
        None,
    );
    let mut p = ModelParams::init(&inst, 3);
    randomize(&mut p, 3);
    let joint = joint_marginal(&p, &inst);
    assert_close(joint.iter().sum::<f64>(), 1.0, 1e-12);
    let pn = noun_prior(&p);
    for nu in 0..2 {
        for n in 0..2 {
            let ps = sent_given_noun(&p, n);
            let brute: f64 = (0..3)
                .map(|s| cond_neighbor(&p, &inst.noun_features[n], s)[nu] * ps[s] * pn[n])
                .sum();
            assert_close(joint[nu * 2 + n], brute, 1e-14);
        }
    }
}

#[test]
fn sentiment_posterior_by_enumeration() {
    let inst = instance(
        &[("man", "a", 3), ("woman", "b", 1), ("man", "b", 2), ("woman", "a", 4)],
        None,
    );
    let mut p = ModelParams::init(&inst, 3);
    randomize(&mut p, 4);
    let pn = noun_prior(&p);
    for nu in 0..2 {
        let mut num = [0.0; 3];
        for n in 0..2 {
            let ps = sent_given_noun(&p, n);
            for s in 0..3 {
                num[s] += cond_neighbor(&p, &inst.noun_features[n], s)[nu] * ps[s] * pn[n];
            }
        }
        let z: f64 = num.iter().sum();
        let post = sentiment_posterior(&p, &inst, nu);
        for s in 0..3 {
            assert_close(post[s], num[s] / z, 1e-14);
        }
    }
}

#[test]
fn sentiment_posterior_single_noun_and_symmetric() {
    let inst = instance(&[("man", "a", 3), ("man", "b", 1)], None);
    let mut p = ModelParams::init(&inst, 3);
    randomize(&mut p, 5);
    let ps = sent_given_noun(&p, 0);
    let num: Vec<f64> = (0..3)
        .map(|s| cond_neighbor(&p, &inst.noun_features[0], s)[0] * ps[s])
        .collect();
    let z: f64 = num.iter().sum();
    let post = sentiment_posterior(&p, &inst, 0);
    for s in 0..3 {
        assert_close(post[s], num[s] / z, 1e-14);
    }

    // ω uniform and η identical across sentiments
    let inst = random_instance(5, 6, 1);
    let mut p = ModelParams::init(&inst, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for nu in 0..5 {
        for t in 0..p.dim {
            let x = rng.gen_range(0.0..2.0);
            for s in 0..3 {
                p.set_eta(nu, s, t, x);
            }
        }
    }
    for row in sentiment_posteriors(&p, &inst) {
        for x in row {
            assert_close(x, 1.0 / 3.0, 1e-12);
        }
    }
}

#[test]
fn objective_matches_enumeration_oracle() {
    for seed in 0..5 {
        let inst = random_instance(7, seed, 2);
        let mut p = ModelParams::init(&inst, 3);
        randomize(&mut p, 100 + seed);
        for (alpha, beta) in [(0.0, 0.0), (1e-3, 0.1), (0.01, 10.0)] {
            let got = objective(&p, &inst, Penalties { alpha, beta });
            let want = oracle_objective(&p, &inst, alpha, beta);
            assert_close(got, want, 1e-11);
        }
    }
}

fn saturated_two_noun() -> (Instance, ModelParams) {
    let inst = instance(
        &[
            ("man", "a", 6),
            ("man", "b", 3),
            ("man", "c", 1),
            ("woman", "a", 1),
            ("woman", "b", 2),
            ("woman", "c", 7),
        ],
        None,
    );
    let mut p = ModelParams::init(&inst, 3);
    let (masc, fem) = (
        inst.space.gender_index(Gender::Masc),
        inst.space.gender_index(Gender::Fem),
    );
    let c = [[6.0, 1.0], [3.0, 2.0], [1.0, 7.0]];
    for nu in 0..3 {
        for s in 0..3 {
            p.set_eta(nu, s, masc, (c[nu][0] / 10.0f64).ln() - p.background[nu]);
            p.set_eta(nu, s, fem, (c[nu][1] / 10.0f64).ln() - p.background[nu]);
        }
    }
    (inst, p)
}

#[test]
fn saturated_fit_attains_negative_entropy() {
    let (inst, p) = saturated_two_noun();
    let neg_entropy: f64 = inst.empirical.iter().map(|(_, _, q)| q * q.ln()).sum();
    let zero = Penalties { alpha: 0.0, beta: 0.0 };
    assert_close(objective(&p, &inst, zero), neg_entropy, 1e-12);
    assert!(gradient(&p, &inst, zero).norm() <= 1e-6);
    // any perturbation is worse (Gibbs)
    let mut q = p.clone();
    q.eta[0] += 0.1;
    assert!(objective(&q, &inst, zero) < neg_entropy);
}

#[test]
fn kl_vanishes_when_prior_equals_posterior() {
    let inst = random_instance(6, 9, 1);
    let mut p = ModelParams::init(&inst, 3);
    randomize(&mut p, 10);
    let post = sentiment_posteriors(&p, &inst);
    let prior = SentimentPrior::from_probabilities(
        inst.neighbors
            .iter()
            .zip(&post)
            .map(|(w, q)| (w.clone(), [q[0], q[1], q[2]])),
    )
    .unwrap();
    let mut inst2 = inst.clone();
    inst2.prior = inst.neighbors.iter().map(|w| prior.sentiment_of(w)).collect();
    for kl in posterior_kls(&p, &inst2).into_iter().flatten() {
        assert!(kl.abs() < 1e-12, "{kl}");
    }
    let plain = objective(&p, &inst2, Penalties { alpha: 0.0, beta: 0.0 });
    assert_close(objective(&p, &inst2, Penalties { alpha: 0.0, beta: 5.0 }), plain, 1e-11);
}

#[test]
fn xi_gradient_vanishes_at_independence() {
    let inst = random_instance(8, 11, 3);
    let p = ModelParams::init(&inst, 3);
    let g = gradient(&p, &inst, Penalties { alpha: 0.0, beta: 0.0 });
    assert!(g.xi.iter().all(|x| x.abs() < 1e-14), "{:?}", g.xi);
}

fn central_difference(p: &ModelParams, inst: &Instance, pen: Penalties, h: f64) -> Gradient {
    let fd = |get: &dyn Fn(&mut ModelParams) -> &mut Vec<f64>, len: usize| -> Vec<f64> {
        (0..len)
            .map(|i| {
                let mut plus = p.clone();
                get(&mut plus)[i] += h;
                let mut minus = p.clone();
                get(&mut minus)[i] -= h;
                (objective(&plus, inst, pen) - objective(&minus, inst, pen)) / (2.0 * h)
            })
            .collect()
    };
    Gradient {
        eta: fd(&|q| &mut q.eta, p.eta.len()),
        omega: fd(&|q| &mut q.omega, p.omega.len()),
        xi: fd(&|q| &mut q.xi, p.xi.len()),
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let inst = random_instance(6, 12, 2);
    let mut p = ModelParams::init(&inst, 3);
    randomize(&mut p, 13);
    let pen = Penalties { alpha: 1e-3, beta: 0.1 };
    let analytic = gradient(&p, &inst, pen);
    let numeric = central_difference(&p, &inst, pen, 1e-5);
    let pairs = analytic
        .eta
        .iter()
        .chain(&analytic.omega)
        .chain(&analytic.xi)
        .zip(numeric.eta.iter().chain(&numeric.omega).chain(&numeric.xi));
    for (a, f) in pairs {
        assert!((a - f).abs() <= 1e-4 * a.abs().max(f.abs()) + 1e-9, "{a} vs {f}");
    }
}

#[test]
fn gradient_single_sentiment_model() {
    let inst = random_instance(5, 14, 2);
    let mut p = ModelParams::init(&inst, 1);
    randomize(&mut p, 15);
    let pen = Penalties { alpha: 1e-3, beta: 1.0 };
    let analytic = gradient(&p, &inst, pen);
    let numeric = central_difference(&p, &inst, pen, 1e-5);
    for (a, f) in analytic.eta.iter().zip(&numeric.eta) {
        assert!((a - f).abs() <= 1e-4 * a.abs().max(f.abs()) + 1e-9, "{a} vs {f}");
    }
    // the sentiment-free model ignores the prior entirely
    assert_close(
        objective(&p, &inst, pen),
        objective(&p, &inst, Penalties { alpha: 1e-3, beta: 0.0 }),
        0.0,
    );
}

#[test]
fn score_reads_gender_coordinate() {
    let inst = instance(&[("woman", "pretty", 5), ("man", "brave", 5)], None);
    let mut p = ModelParams::init(&inst, 3);
    let pretty = inst.neighbor_index("pretty").unwrap();
    let fem = inst.space.gender_index(Gender::Fem);
    p.set_eta(pretty, 0, fem, 3.3);
    assert_eq!(score(&p, &inst.space, Gender::Fem, 0, pretty), 3.3);
    assert_eq!(score(&p, &inst.space, Gender::Masc, 0, pretty), 0.0);
}

#[test]
fn training_keeps_invariants() {
    let inst = random_instance(10, 16, 2);
    let cfg = TrainConfig {
        alpha: 1e-3,
        beta: 1.0,
        max_iterations: 300,
        ..TrainConfig::default()
    };
    let out = train(&inst, &cfg).unwrap();
    assert!(out.params.eta.iter().all(|&x| x >= 0.0));
    assert!(out.trace.windows(2).all(|w| w[1] >= w[0]));
    assert!(out.trace.last().unwrap() > &out.trace[0]);
    assert!(out.params.is_finite());
    let again = train(&inst, &cfg).unwrap();
    assert_eq!(out.params, again.params);
    assert_eq!(out.trace, again.trace);
}

#[test]
fn grid_identities() {
    let inst = random_instance(6, 17, 2);
    let cfg = TrainConfig {
        max_iterations: 100,
        ..TrainConfig::default()
    };
    let single = train(
        &inst,
        &TrainConfig {
            alpha: 1e-3,
            beta: 0.5,
            ..cfg.clone()
        },
    )
    .unwrap();
    let grid = grid_train_average(&inst, &[1e-3], &[0.5], &cfg, 1).unwrap();
    assert_eq!(grid.average, single.params);

    let doubled = grid_train_average(&inst, &[1e-3, 1e-3], &[0.5], &cfg, 2).unwrap();
    assert_eq!(doubled.average, single.params);

    let g = grid_train_average(&inst, &[0.0, 1e-2], &[0.1, 1.0], &cfg, 2).unwrap();
    assert_eq!(g.cells.len(), 4);
    assert_eq!((g.cells[1].alpha, g.cells[1].beta), (0.0, 1.0));
    for i in 0..g.average.eta.len() {
        let manual = g.cells.iter().map(|c| c.outcome.params.eta[i]).sum::<f64>() / 4.0;
        assert_close(g.average.eta[i], manual, 1e-15);
    }

    assert!(grid_train_average(&inst, &[], &[0.5], &cfg, 1).is_err());
}

#[test]
fn invalid_config_rejected() {
    let inst = random_instance(3, 18, 1);
    for cfg in [
        TrainConfig {
            alpha: -1.0,
            ..TrainConfig::default()
        },
        TrainConfig {
            beta: f64::NAN,
            ..TrainConfig::default()
        },
        TrainConfig {
            tolerance: 0.0,
            ..TrainConfig::default()
        },
        TrainConfig {
            num_sentiments: 2,
            ..TrainConfig::default()
        },
    ] {
        assert!(train(&inst, &cfg).is_err());
    }
}

#[test]
fn checkpoint_round_trips_bitwise() {
    let inst = random_instance(6, 19, 2);
    let cfg = TrainConfig {
        beta: 1.0,
        max_iterations: 80,
        ..TrainConfig::default()
    };
    let out = train(&inst, &cfg).unwrap();
    let ck = Checkpoint::new(&out.params, &inst, &cfg, None);
    let json = ck.to_json();
    let back = Checkpoint::from_json(&json).unwrap();
    assert_eq!(back, ck);
    assert_eq!(back.to_json(), json);
    let params = back.params().unwrap();
    for (a, b) in params.eta.iter().zip(&out.params.eta) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    let rebuilt = back.instance().unwrap();
    assert_eq!(rebuilt.noun_features, inst.noun_features);
    assert_eq!(joint_marginal(&params, &rebuilt), joint_marginal(&out.params, &inst));
}
