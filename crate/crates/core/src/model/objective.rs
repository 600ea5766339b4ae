//! Distributions of the latent-sentiment model and its training objective.
//!
//! The joint factorizes as p(ν, n, s) = p(ν|s, n) p(s|n) p(n) with
//!
//! * p(ν|s, n) ∝ exp(m_ν + f_n·η(ν, s))
//! * p(s|n) ∝ exp(ω_s^n)
//! * p(n) ∝ exp(ξ_n)
//!
//! and sentiment marginalized out of the likelihood. The objective maximized
//! during training is
//!
//! ```text
//! L = Σ p̂(ν,n) log p(ν,n) − α‖η‖₁ − β Σ_{ν ∈ lexicon} KL(q(·|ν) ‖ p(·|ν))
//! ```
//!
//! The gradient of every smooth term is a weighted sum of ∂ log p(ν, s, n),
//! so both the likelihood (through responsibilities r(s|ν,n)) and the
//! posterior regularizer reduce to one weight tensor W(ν, s, n).

use crate::corpus::{Gender, NounFeatures};

use super::{Instance, ModelParams};

pub(crate) fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.map(|x| (x - max).exp()).sum::<f64>().ln()
}

pub(crate) fn softmax(xs: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(xs.iter().copied());
    xs.iter().map(|x| (x - lse).exp()).collect()
}

/// p(ν | s, n) over the whole vocabulary.
pub fn cond_neighbor(params: &ModelParams, features: &NounFeatures, sentiment: usize) -> Vec<f64> {
    let scores: Vec<f64> = (0..params.num_neighbors)
        .map(|v| {
            let dev = params.deviation(v, sentiment);
            params.background[v] + features.active().iter().map(|&t| dev[t]).sum::<f64>()
        })
        .collect();
    softmax(&scores)
}

/// p(s | n) for noun index `noun`.
pub fn sent_given_noun(params: &ModelParams, noun: usize) -> Vec<f64> {
    let s = params.num_sentiments;
    softmax(&params.omega[noun * s..(noun + 1) * s])
}

/// p(n) over noun forms.
pub fn noun_prior(params: &ModelParams) -> Vec<f64> {
    softmax(&params.xi)
}

/// Log-domain tables shared by every quantity derived from the joint.
pub struct Forward {
    v: usize,
    s: usize,
    g: usize,
    /// log p(ν|s,n), laid out `[n][s][ν]`.
    log_cond: Vec<f64>,
    /// p(ν|s,n), same layout.
    cond: Vec<f64>,
    /// log p(s|n), `[n][s]`.
    log_sent: Vec<f64>,
    /// log p(n).
    log_noun: Vec<f64>,
}

impl Forward {
    pub fn new(params: &ModelParams, inst: &Instance) -> Self {
        let (v, s, g) = (params.num_neighbors, params.num_sentiments, params.num_nouns);
        let t = params.dim;
        let mut log_cond = vec![0.0; g * s * v];
        let mut cond = vec![0.0; g * s * v];
        for (n, feats) in inst.noun_features.iter().enumerate() {
            let [a, b, c] = feats.active();
            for si in 0..s {
                let range = (n * s + si) * v..(n * s + si + 1) * v;
                let row = &mut log_cond[range.clone()];
                let mut max = f64::NEG_INFINITY;
                for (nu, x) in row.iter_mut().enumerate() {
                    let base = (nu * s + si) * t;
                    *x = params.background[nu] + params.eta[base + a] + params.eta[base + b] + params.eta[base + c];
                    max = max.max(*x);
                }
                let prow = &mut cond[range];
                let mut z = 0.0;
                for (p, x) in prow.iter_mut().zip(row.iter()) {
                    *p = (x - max).exp();
                    z += *p;
                }
                let shift = max + z.ln();
                for (p, x) in prow.iter_mut().zip(row.iter_mut()) {
                    *p /= z;
                    *x -= shift;
                }
            }
        }
        let mut log_sent = vec![0.0; g * s];
        for n in 0..g {
            let row = &params.omega[n * s..(n + 1) * s];
            let lse = log_sum_exp(row.iter().copied());
            for si in 0..s {
                log_sent[n * s + si] = row[si] - lse;
            }
        }
        let lse = log_sum_exp(params.xi.iter().copied());
        let log_noun = params.xi.iter().map(|x| x - lse).collect();
        Forward {
            v,
            s,
            g,
            log_cond,
            cond,
            log_sent,
            log_noun,
        }
    }

    #[inline]
    pub fn log_cond(&self, nu: usize, s: usize, n: usize) -> f64 {
        self.log_cond[(n * self.s + s) * self.v + nu]
    }

    #[inline]
    pub fn log_joint3(&self, nu: usize, s: usize, n: usize) -> f64 {
        self.log_cond(nu, s, n) + self.log_sent[n * self.s + s] + self.log_noun[n]
    }

    /// log p(ν, n) with sentiment summed out.
    pub fn log_joint(&self, nu: usize, n: usize) -> f64 {
        log_sum_exp((0..self.s).map(|s| self.log_joint3(nu, s, n)))
    }

    /// log p(ν, s) as a `[ν][s]` table.
    pub fn log_neighbor_sentiment(&self) -> Vec<f64> {
        let (v, s) = (self.v, self.s);
        let mut max = vec![f64::NEG_INFINITY; v * s];
        for n in 0..self.g {
            for si in 0..s {
                for nu in 0..v {
                    let x = self.log_joint3(nu, si, n);
                    let m = &mut max[nu * s + si];
                    if x > *m {
                        *m = x;
                    }
                }
            }
        }
        let mut acc = vec![0.0; v * s];
        for n in 0..self.g {
            for si in 0..s {
                for nu in 0..v {
                    acc[nu * s + si] += (self.log_joint3(nu, si, n) - max[nu * s + si]).exp();
                }
            }
        }
        max.iter().zip(&acc).map(|(m, a)| m + a.ln()).collect()
    }

    /// Dense p(ν, n), laid out `[ν][n]`.
    pub fn joint(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.v * self.g];
        for nu in 0..self.v {
            for n in 0..self.g {
                out[nu * self.g + n] = self.log_joint(nu, n).exp();
            }
        }
        out
    }
}

/// Dense p(ν, n), laid out `[ν][n]`.
pub fn joint_marginal(params: &ModelParams, inst: &Instance) -> Vec<f64> {
    Forward::new(params, inst).joint()
}

/// p(s | ν) = Σ_n p(ν|s,n) p(s|n) p(n) / p(ν) for every neighbor, `[ν][s]`.
pub fn sentiment_posteriors(params: &ModelParams, inst: &Instance) -> Vec<Vec<f64>> {
    let fwd = Forward::new(params, inst);
    let lns = fwd.log_neighbor_sentiment();
    let s = params.num_sentiments;
    lns.chunks(s).map(softmax).collect()
}

pub fn sentiment_posterior(params: &ModelParams, inst: &Instance, neighbor: usize) -> Vec<f64> {
    sentiment_posteriors(params, inst).swap_remove(neighbor)
}

fn kl_divergence(q: &[f64; 3], log_p: &[f64]) -> f64 {
    q.iter()
        .zip(log_p)
        .filter(|(q, _)| **q > 0.0)
        .map(|(q, lp)| q * (q.ln() - lp))
        .sum()
}

/// KL(q(·|ν) ‖ p(·|ν)) for every neighbor that has a prior.
pub fn posterior_kls(params: &ModelParams, inst: &Instance) -> Vec<Option<f64>> {
    if params.num_sentiments != 3 {
        return vec![None; params.num_neighbors];
    }
    let fwd = Forward::new(params, inst);
    let lns = fwd.log_neighbor_sentiment();
    inst.prior
        .iter()
        .enumerate()
        .map(|(nu, q)| {
            q.as_ref().map(|q| {
                let row = &lns[nu * 3..nu * 3 + 3];
                let lp = log_sum_exp(row.iter().copied());
                let log_post: Vec<f64> = row.iter().map(|x| x - lp).collect();
                kl_divergence(q, &log_post)
            })
        })
        .collect()
}

/// Mean KL(q‖p(s|ν)) over neighbors in the sentiment lexicon (NaN if none).
pub fn mean_posterior_kl(params: &ModelParams, inst: &Instance) -> f64 {
    let kls: Vec<f64> = posterior_kls(params, inst).into_iter().flatten().collect();
    kls.iter().sum::<f64>() / kls.len() as f64
}

/// Posterior gender probability p(FEM | ν) for every neighbor.
pub fn femaleness(params: &ModelParams, inst: &Instance) -> Vec<f64> {
    let fwd = Forward::new(params, inst);
    (0..params.num_neighbors)
        .map(|nu| {
            let logs: Vec<(f64, Gender)> = (0..params.num_nouns)
                .map(|n| (fwd.log_joint(nu, n), inst.noun_genders[n]))
                .collect();
            let all = log_sum_exp(logs.iter().map(|(l, _)| *l));
            let fem = log_sum_exp(logs.iter().filter(|(_, g)| *g == Gender::Fem).map(|(l, _)| *l));
            (fem - all).exp()
        })
        .collect()
}

/// Gradient of the objective with respect to the free parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub eta: Vec<f64>,
    pub omega: Vec<f64>,
    pub xi: Vec<f64>,
}

impl Gradient {
    pub fn norm(&self) -> f64 {
        self.eta
            .iter()
            .chain(&self.omega)
            .chain(&self.xi)
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Penalties {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub objective: f64,
    pub log_likelihood: f64,
    pub l1: f64,
    pub kl: f64,
    pub gradient: Option<Gradient>,
}

/// Objective value only.
pub fn objective(params: &ModelParams, inst: &Instance, penalties: Penalties) -> f64 {
    evaluate(params, inst, penalties, false).objective
}

/// Objective and analytic gradient.
///
/// The L1 term contributes −α·sign(η) with sign(0) taken as +1, the
/// direction that matters under the non-negativity constraint.
pub fn gradient(params: &ModelParams, inst: &Instance, penalties: Penalties) -> Gradient {
    evaluate(params, inst, penalties, true).gradient.unwrap()
}

pub fn evaluate(params: &ModelParams, inst: &Instance, penalties: Penalties, with_gradient: bool) -> Evaluation {
    let (v, s, g, t) = (
        params.num_neighbors,
        params.num_sentiments,
        params.num_nouns,
        params.dim,
    );
    let fwd = Forward::new(params, inst);
    let use_kl = s == 3 && penalties.beta > 0.0 && inst.has_prior();
    let sent: Vec<f64> = fwd.log_sent.iter().map(|x| x.exp()).collect();
    let noun: Vec<f64> = fwd.log_noun.iter().map(|x| x.exp()).collect();
    // p(ν, s, n) = p(ν|s,n) p(s|n) p(n)
    let joint3 = |nu: usize, si: usize, n: usize| fwd.cond[(n * s + si) * v + nu] * sent[n * s + si] * noun[n];

    // W(ν, s, n), laid out like log_cond.
    let mut w = if with_gradient {
        vec![0.0; g * s * v]
    } else {
        Vec::new()
    };

    let mut log_likelihood = 0.0;
    let mut j = vec![0.0; s];
    for &(nu, n, p_hat) in &inst.empirical {
        let mut total = 0.0;
        for (si, x) in j.iter_mut().enumerate() {
            *x = joint3(nu, si, n);
            total += *x;
        }
        log_likelihood += p_hat * total.ln();
        if with_gradient {
            for (si, x) in j.iter().enumerate() {
                w[(n * s + si) * v + nu] += p_hat * x / total;
            }
        }
    }

    let mut kl = 0.0;
    if use_kl {
        // p(ν, s), `[ν][s]`
        let mut pvs = vec![0.0; v * 3];
        for n in 0..g {
            for si in 0..3 {
                for nu in 0..v {
                    pvs[nu * 3 + si] += joint3(nu, si, n);
                }
            }
        }
        let beta = penalties.beta;
        for (nu, q) in inst.prior.iter().enumerate() {
            let Some(q) = q else { continue };
            let row = &pvs[nu * 3..nu * 3 + 3];
            let pv: f64 = row.iter().sum();
            let log_post: Vec<f64> = row.iter().map(|x| (x / pv).ln()).collect();
            kl += kl_divergence(q, &log_post);
            if with_gradient {
                // ∂(−KL_ν) = Σ_{s,n} J(ν,s,n) (q_s / p(ν,s) − 1 / p(ν)) ∂ log J
                let scale: Vec<f64> = (0..3).map(|si| q[si] / row[si] - 1.0 / pv).collect();
                for n in 0..g {
                    for si in 0..3 {
                        w[(n * s + si) * v + nu] += beta * joint3(nu, si, n) * scale[si];
                    }
                }
            }
        }
    }

    let l1 = params.l1_norm();
    let objective = log_likelihood - penalties.alpha * l1 - penalties.beta * if use_kl { kl } else { 0.0 };

    let gradient = with_gradient.then(|| {
        let mut g_eta = vec![0.0; v * s * t];
        let mut g_omega = vec![0.0; g * s];
        let mut g_xi = vec![0.0; g];
        let mut w_noun = vec![0.0; g];
        for n in 0..g {
            let active = inst.noun_features[n].active();
            let mut w_sum_n = 0.0;
            for si in 0..s {
                let range = (n * s + si) * v..(n * s + si + 1) * v;
                let wrow = &w[range.clone()];
                let crow = &fwd.cond[range];
                let w_sn: f64 = wrow.iter().sum();
                w_sum_n += w_sn;
                for (nu, (&wv, &c)) in wrow.iter().zip(crow).enumerate() {
                    let d = wv - c * w_sn;
                    let base = (nu * s + si) * t;
                    for &f in &active {
                        g_eta[base + f] += d;
                    }
                }
                g_omega[n * s + si] = w_sn;
            }
            for si in 0..s {
                g_omega[n * s + si] -= sent[n * s + si] * w_sum_n;
            }
            w_noun[n] = w_sum_n;
        }
        let w_total: f64 = w_noun.iter().sum();
        for n in 0..g {
            g_xi[n] = w_noun[n] - noun[n] * w_total;
        }
        if penalties.alpha != 0.0 {
            for (gr, &x) in g_eta.iter_mut().zip(&params.eta) {
                *gr -= penalties.alpha * if x < 0.0 { -1.0 } else { 1.0 };
            }
        }
        Gradient {
            eta: g_eta,
            omega: g_omega,
            xi: g_xi,
        }
    });

    Evaluation {
        objective,
        log_likelihood,
        l1,
        kl,
        gradient,
    }
}

/// Score of neighbor ν for a gender and sentiment: g_genderᵀ η(ν, s).
///
/// Ranking by this log-scale value is the same as ranking by its exponential.
pub fn score(
    params: &ModelParams,
    space: &super::FeatureSpace,
    gender: Gender,
    sentiment: usize,
    neighbor: usize,
) -> f64 {
    params.eta(neighbor, sentiment, space.gender_index(gender))
}
