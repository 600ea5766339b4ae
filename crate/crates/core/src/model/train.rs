use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::{evaluate, Gradient, Penalties};
use super::{Instance, ModelParams};
use crate::error::{Error, Result};

/// Hyperparameters of one training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// L1 weight on η.
    pub alpha: f64,
    /// Posterior-regularization weight.
    pub beta: f64,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Relative objective change below which training stops.
    pub tolerance: f64,
    /// Number of accepted steps the change is measured over.
    pub window: usize,
    /// 3 for the latent-sentiment model, 1 for the sentiment-free variant.
    pub num_sentiments: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            alpha: 0.0,
            beta: 0.0,
            learning_rate: 0.05,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            epsilon: 1e-8,
            max_iterations: 20_000,
            tolerance: 1e-7,
            window: 50,
            num_sentiments: 3,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be a finite non-negative number");
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad("beta must be a finite non-negative number");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if !(self.learning_rate > 0.0) {
            return bad("learning rate must be positive");
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("Adam decay rates must lie in [0, 1)");
        }
        if self.num_sentiments != 1 && self.num_sentiments != 3 {
            return bad("the model has either 1 or 3 sentiments");
        }
        if self.window == 0 {
            return bad("convergence window must be positive");
        }
        Ok(())
    }

    pub fn penalties(&self) -> Penalties {
        Penalties {
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub params: ModelParams,
    /// Objective after every accepted step, starting with the initial value.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub rejected: usize,
    pub converged: bool,
}

/// Adam moment estimates over the concatenated free parameters (η, ω, ξ).
struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
    beta1: f64,
    beta2: f64,
    eps: f64,
}

impl Adam {
    fn new(n: usize, cfg: &TrainConfig) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            beta1: cfg.adam_beta1,
            beta2: cfg.adam_beta2,
            eps: cfg.epsilon,
        }
    }

    /// Folds in a gradient and returns the bias-corrected ascent direction.
    fn direction(&mut self, grad: &Gradient) -> Vec<f64> {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        grad.eta
            .iter()
            .chain(&grad.omega)
            .chain(&grad.xi)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
            .map(|(&g, (m, v))| {
                *m = self.beta1 * *m + (1.0 - self.beta1) * g;
                *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
                (*m / c1) / ((*v / c2).sqrt() + self.eps)
            })
            .collect()
    }
}

fn take_step(params: &ModelParams, dir: &[f64], lr: f64, project: bool) -> ModelParams {
    let mut next = params.clone();
    let (de, rest) = dir.split_at(next.eta.len());
    let (dw, dx) = rest.split_at(next.omega.len());
    for (x, d) in next.eta.iter_mut().zip(de) {
        *x += lr * d;
    }
    for (x, d) in next.omega.iter_mut().zip(dw) {
        *x += lr * d;
    }
    for (x, d) in next.xi.iter_mut().zip(dx) {
        *x += lr * d;
    }
    if project {
        next.project_nonnegative();
    }
    next
}

/// Learning-rate recovery factor after an accepted step.
const LR_GROWTH: f64 = 1.1;

/// Maximizes the objective with projected Adam.
///
/// After every step η is clipped at zero. A step that lowers the objective is
/// rejected and retried from the same point with half the learning rate and
/// fresh Adam moments, so the recorded trace is non-decreasing; accepted
/// steps let the rate grow back towards its configured value. Training stops when the objective
/// changed by less than `tolerance` (relative) over the last `window`
/// accepted steps, when the step size has collapsed, or at `max_iterations`
/// step attempts.
pub fn train(inst: &Instance, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let start = ModelParams::init(inst, config.num_sentiments);
    train_from(inst, config, start)
}

pub fn train_from(inst: &Instance, config: &TrainConfig, mut params: ModelParams) -> Result<TrainOutcome> {
    config.validate()?;
    let penalties = config.penalties();
    let mut eval = evaluate(&params, inst, penalties, true);
    if !eval.objective.is_finite() {
        return Err(Error::Diverged {
            iteration: 0,
            value: eval.objective,
        });
    }
    let mut trace = vec![eval.objective];
    let mut adam = Adam::new(params.num_free(), config);
    let mut lr = config.learning_rate;
    let min_lr = config.learning_rate * 1e-12;
    let mut dir = adam.direction(eval.gradient.as_ref().unwrap());
    let mut rejected = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        iterations += 1;
        let candidate = take_step(&params, &dir, lr, true);
        let next = evaluate(&candidate, inst, penalties, true);
        if !next.objective.is_finite() {
            return Err(Error::Diverged {
                iteration: iterations,
                value: next.objective,
            });
        }
        if next.objective < eval.objective {
            rejected += 1;
            lr *= 0.5;
            if lr < min_lr {
                converged = true;
                break;
            }
            // Stale momentum can point downhill; restart from the gradient alone.
            adam = Adam::new(params.num_free(), config);
            dir = adam.direction(eval.gradient.as_ref().unwrap());
            continue;
        }
        params = candidate;
        eval = next;
        lr = (lr * LR_GROWTH).min(config.learning_rate);
        trace.push(eval.objective);
        dir = adam.direction(eval.gradient.as_ref().unwrap());

        if trace.len() > config.window {
            let then = trace[trace.len() - 1 - config.window];
            let now = eval.objective;
            if (now - then).abs() <= config.tolerance * now.abs().max(1.0) {
                converged = true;
                break;
            }
        }
    }

    log::debug!(
        "train alpha={} beta={}: {} iterations, {} rejected, objective {:.9}",
        config.alpha,
        config.beta,
        iterations,
        rejected,
        eval.objective
    );
    Ok(TrainOutcome {
        params,
        trace,
        iterations,
        rejected,
        converged,
    })
}

#[derive(Clone, Debug)]
pub struct GridCell {
    pub alpha: f64,
    pub beta: f64,
    pub outcome: TrainOutcome,
}

#[derive(Clone, Debug)]
pub struct GridOutcome {
    /// Runs in grid order: alpha-major, then beta.
    pub cells: Vec<GridCell>,
    pub average: ModelParams,
}

/// Trains one model per (α, β) pair and averages their parameters.
///
/// Cells run concurrently on at most `jobs` threads; the average is reduced
/// in grid order, so the result does not depend on scheduling.
pub fn grid_train_average(
    inst: &Instance,
    alphas: &[f64],
    betas: &[f64],
    base: &TrainConfig,
    jobs: usize,
) -> Result<GridOutcome> {
    if alphas.is_empty() || betas.is_empty() {
        return Err(Error::InvalidArgument("hyperparameter grids must be non-empty".into()));
    }
    let pairs: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .collect();
    let run = |&(alpha, beta): &(f64, f64)| -> Result<GridCell> {
        let cfg = TrainConfig {
            alpha,
            beta,
            ..base.clone()
        };
        train(inst, &cfg)
            .map(|outcome| GridCell { alpha, beta, outcome })
            .map_err(|e| Error::GridCell {
                alpha,
                beta,
                source: Box::new(e),
            })
    };
    let results: Vec<Result<GridCell>> = if jobs <= 1 {
        pairs.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| pairs.par_iter().map(run).collect())
    };
    let cells = results.into_iter().collect::<Result<Vec<_>>>()?;
    let average = ModelParams::average(&cells.iter().map(|c| &c.outcome.params).collect::<Vec<_>>())?;
    Ok(GridOutcome { cells, average })
}
