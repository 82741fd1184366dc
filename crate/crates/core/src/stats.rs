//! Small statistical toolbox for the experiment drivers: least squares,
//! weighted quantiles, Walker alias sampling and the weighted bootstrap.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Ordinary least squares of `y` against one regressor plus intercept.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<Regression> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "fit",
            detail: format!("need matching samples of length >= 2, got {} / {}", x.len(), y.len()),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx) * (xi - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let syy: f64 = y.iter().map(|yi| (yi - my) * (yi - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter {
            name: "fit",
            detail: "regressor is constant".into(),
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let e = yi - (slope * xi + intercept);
            e * e
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(Regression {
        slope,
        intercept,
        r_squared,
        residual: (ss_res / n).sqrt(),
    })
}

/// Fits `y ~ a phi(t) + b` and returns the regression in the transformed
/// coordinate.
pub fn fit_transformed<F: Fn(f64) -> f64>(phi: F, t: &[f64], y: &[f64]) -> Result<Regression> {
    let x: Vec<f64> = t.iter().map(|ti| phi(*ti)).collect();
    linear_fit(&x, y)
}

/// Mean under normalized weights.
pub fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    values.iter().zip(weights).map(|(v, w)| v * w).sum()
}

/// Smallest value whose cumulative normalized weight reaches `q`.
pub fn weighted_quantile(values: &[f64], weights: &[f64], q: f64) -> f64 {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut acc = 0.0;
    for &i in &idx {
        acc += weights[i];
        if acc >= q {
            return values[i];
        }
    }
    values[*idx.last().expect("nonempty values")]
}

/// Walker alias table for O(1) categorical sampling.
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl AliasTable {
    pub fn new(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "weights",
                detail: "alias table needs nonnegative weights with positive total".into(),
            });
        }
        let n = weights.len();
        let mut prob: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut alias = vec![0usize; n];
        let mut small: Vec<usize> = Vec::new();
        let mut large: Vec<usize> = Vec::new();
        for (i, p) in prob.iter().enumerate() {
            if *p < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(s), Some(l)) = (small.pop(), large.pop()) {
            alias[s] = l;
            prob[l] = (prob[l] + prob[s]) - 1.0;
            if prob[l] < 1.0 {
                small.push(l);
            } else {
                large.push(l);
            }
        }
        // Leftovers are 1 up to roundoff.
        for i in small.into_iter().chain(large) {
            prob[i] = 1.0;
        }
        Ok(AliasTable { prob, alias })
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let n = self.prob.len();
        let i = rng.gen_range(0..n);
        if rng.gen::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i]
        }
    }
}

/// Statistic evaluated inside bootstrap replicas.
#[derive(Debug, Clone, Copy)]
pub enum Statistic {
    Mean,
    Quantile(f64),
}

fn plain_statistic(stat: Statistic, scratch: &mut [f64]) -> f64 {
    match stat {
        Statistic::Mean => scratch.iter().sum::<f64>() / scratch.len() as f64,
        Statistic::Quantile(q) => {
            let k = ((q * scratch.len() as f64).ceil() as usize)
                .clamp(1, scratch.len())
                - 1;
            *scratch
                .select_nth_unstable_by(k, f64::total_cmp)
                .1
        }
    }
}

/// Percentile bootstrap confidence interval for a weighted statistic:
/// each replica resamples `values.len()` points from the weighted empirical
/// distribution and evaluates the plain statistic.
pub fn weighted_bootstrap_ci(
    values: &[f64],
    weights: &[f64],
    stat: Statistic,
    replicas: usize,
    level: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64)> {
    if values.is_empty() || values.len() != weights.len() {
        return Err(Error::InvalidParameter {
            name: "bootstrap",
            detail: "values and weights must be nonempty and matched".into(),
        });
    }
    let table = AliasTable::new(weights)?;
    let m = values.len();
    let mut stats = Vec::with_capacity(replicas);
    let mut scratch = vec![0.0f64; m];
    for _ in 0..replicas {
        for slot in scratch.iter_mut() {
            *slot = values[table.sample(rng)];
        }
        stats.push(plain_statistic(stat, &mut scratch));
    }
    stats.sort_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - level);
    let lo_idx = ((tail * replicas as f64).floor() as usize).min(replicas - 1);
    let hi_idx = (((1.0 - tail) * replicas as f64).ceil() as usize)
        .saturating_sub(1)
        .min(replicas - 1);
    Ok((stats[lo_idx], stats[hi_idx]))
}

/// Do two intervals intersect?
pub fn intervals_overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}
