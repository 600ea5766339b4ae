use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Family-wise significance level before correction.
pub const SIGNIFICANCE: f64 = 0.05;

/// Exhaustive enumeration is used up to this many label splits.
pub const EXACT_LIMIT: u128 = 1_000_000;

/// 1-based ranks with tied values sharing the mean of their positions.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    midranks_with_tolerance(values, 0.0)
}

/// Like [`midranks`], but sorted neighbors closer than `tolerance` are
/// chained into one tie group.
pub fn midranks_with_tolerance(values: &[f64], tolerance: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] - values[order[end - 1]] <= tolerance {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation; `None` when either input has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "inputs have different lengths ({} and {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InvalidArgument(
            "at least three observations are required".into(),
        ));
    }
    Ok(())
}

/// Spearman's ρ: Pearson correlation of midranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&midranks(x), &midranks(y)).ok_or(Error::ConstantInput)
}

/// Outcome of a two-sample permutation test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestResult {
    /// Observed |mean(A) − mean(B)|.
    pub statistic: f64,
    pub p_value: f64,
    pub corrected_alpha: f64,
    pub significant: bool,
    /// Number of label splits evaluated (all of them when `exact`).
    pub permutations: u64,
    pub exact: bool,
}

impl TestResult {
    /// Re-evaluates significance against `SIGNIFICANCE / tests`.
    pub fn bonferroni(self, tests: usize) -> TestResult {
        let corrected_alpha = SIGNIFICANCE / tests.max(1) as f64;
        TestResult {
            corrected_alpha,
            significant: self.p_value < corrected_alpha,
            ..self
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn binomial(n: usize, k: usize, cap: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}

/// Unpaired permutation test on |mean(A) − mean(B)|.
///
/// All C(|A|+|B|, |A|) splits are enumerated when there are at most
/// [`EXACT_LIMIT`] of them, giving p = #{splits at least as extreme} / #splits.
/// Otherwise `permutations` random splits are drawn and
/// p = (b + 1) / (m + 1), which is never zero.
pub fn permutation_test(a: &[f64], b: &[f64], permutations: usize, seed: u64) -> Result<TestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument(
            "permutation test needs two non-empty groups".into(),
        ));
    }
    let observed = (mean(a) - mean(b)).abs();
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let total: f64 = pooled.iter().sum();
    let scale = pooled.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    // Splits whose statistic equals the observed one up to rounding count as extreme.
    let threshold = observed - 1e-12 * scale;
    let (na, nb) = (a.len(), b.len());
    let stat = |sum_a: f64| (sum_a / na as f64 - (total - sum_a) / nb as f64).abs();

    let result = match binomial(na + nb, na, EXACT_LIMIT) {
        Some(splits) => {
            let mut extreme: u64 = 0;
            let mut idx: Vec<usize> = (0..na).collect();
            let n = pooled.len();
            loop {
                let sum_a: f64 = idx.iter().map(|&i| pooled[i]).sum();
                if stat(sum_a) >= threshold {
                    extreme += 1;
                }
                // next combination in lexicographic order
                let mut i = na;
                while i > 0 && idx[i - 1] == n - na + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                idx[i - 1] += 1;
                for j in i..na {
                    idx[j] = idx[j - 1] + 1;
                }
            }
            TestResult {
                statistic: observed,
                p_value: extreme as f64 / splits as f64,
                corrected_alpha: SIGNIFICANCE,
                significant: false,
                permutations: splits as u64,
                exact: true,
            }
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut work = pooled.clone();
            let n = work.len();
            let mut extreme: u64 = 0;
            for _ in 0..permutations {
                let mut sum_a = 0.0;
                for i in 0..na {
                    let j = rng.gen_range(i..n);
                    work.swap(i, j);
                    sum_a += work[i];
                }
                if stat(sum_a) >= threshold {
                    extreme += 1;
                }
            }
            TestResult {
                statistic: observed,
                p_value: (extreme + 1) as f64 / (permutations + 1) as f64,
                corrected_alpha: SIGNIFICANCE,
                significant: false,
                permutations: permutations as u64,
                exact: false,
            }
        }
    };
    Ok(result.bonferroni(1))
}
