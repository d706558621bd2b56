//! Summaries and tests over trial records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::TrialRecord;
use crate::error::{Error, Result};
use crate::partition::{cycle_type_probability, partitions_of, IntPartition};
use crate::rational::to_f64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    /// Unbiased sample variance (0 for a single value).
    pub variance: f64,
    pub std_err: f64,
}

impl Moments {
    /// Welford's one-pass mean and variance.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let (mut count, mut mean, mut m2) = (0u64, 0.0, 0.0);
        for x in values {
            count += 1;
            let d = x - mean;
            mean += d / count as f64;
            m2 += d * (x - mean);
        }
        let variance = if count > 1 { m2 / (count - 1) as f64 } else { 0.0 };
        let std_err = if count > 0 { (variance / count as f64).sqrt() } else { f64::NAN };
        Moments {
            count,
            mean,
            variance,
            std_err,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub n: usize,
    pub trials: u64,
    pub t_third: Moments,
    /// `T - t_third`.
    pub second_phase: Moments,
    #[serde(rename = "T")]
    pub absorption: Moments,
}

fn common_n(records: &[TrialRecord]) -> Result<usize> {
    let n = records
        .first()
        .ok_or_else(|| Error::Statistics("no records".into()))?
        .n;
    if records.iter().any(|r| r.n != n) {
        return Err(Error::Statistics("records mix several deck sizes".into()));
    }
    Ok(n)
}

pub fn phase_statistics(records: &[TrialRecord]) -> Result<PhaseSummary> {
    let n = common_n(records)?;
    Ok(PhaseSummary {
        n,
        trials: records.len() as u64,
        t_third: Moments::of(records.iter().map(|r| r.t_third as f64)),
        second_phase: Moments::of(records.iter().map(|r| r.second_phase() as f64)),
        absorption: Moments::of(records.iter().map(|r| r.absorption as f64)),
    })
}

/// Fraction of trials with `T > t` at each grid point.
pub fn separation_bound_curve(records: &[TrialRecord], grid: &[u64]) -> Result<Vec<(u64, f64)>> {
    if records.is_empty() {
        return Err(Error::Statistics("no records".into()));
    }
    let mut times: Vec<u64> = records.iter().map(|r| r.absorption).collect();
    times.sort_unstable();
    let total = times.len() as f64;
    Ok(grid
        .iter()
        .map(|&t| {
            let at_most = times.partition_point(|&x| x <= t);
            (t, (times.len() - at_most) as f64 / total)
        })
        .collect())
}

/// Smallest grid-free `t` with empirical `P(T > t) <= 1/2`.
pub fn median_time(records: &[TrialRecord]) -> Option<u64> {
    let mut times: Vec<u64> = records.iter().map(|r| r.absorption).collect();
    times.sort_unstable();
    let k = times.len().checked_sub(1)? / 2;
    times.get(k).copied()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareCell {
    #[serde(with = "super::io::dashed")]
    pub cycle_type: IntPartition,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub n: usize,
    pub samples: u64,
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
    pub cells: Vec<ChiSquareCell>,
}

/// Pearson chi-square of observed cycle types against the cycle-type law of
/// a uniform permutation. Every cell must expect at least 5 samples.
pub fn chi_square_cycle_types(n: usize, types: &[IntPartition]) -> Result<ChiSquareReport> {
    if n < 2 {
        return Err(Error::DeckTooSmall { n, min: 2 });
    }
    let mut counts: BTreeMap<&IntPartition, u64> = BTreeMap::new();
    for c in types {
        if c.size() as usize != n {
            return Err(Error::Statistics(format!("cycle type {c} is not a partition of {n}")));
        }
        *counts.entry(c).or_default() += 1;
    }
    let samples = types.len() as u64;
    let mut cells = Vec::new();
    let mut statistic = 0.0;
    for lambda in partitions_of(n as u32) {
        let expected = samples as f64 * to_f64(&cycle_type_probability(&lambda));
        if expected < 5.0 {
            return Err(Error::Statistics(format!(
                "cell {lambda} expects {expected:.2} < 5 samples; use more trials or a smaller n"
            )));
        }
        let observed = counts.get(&lambda).copied().unwrap_or(0);
        statistic += (observed as f64 - expected).powi(2) / expected;
        cells.push(ChiSquareCell {
            cycle_type: lambda,
            observed,
            expected,
        });
    }
    let dof = cells.len() as u64 - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Statistics(e.to_string()))?;
    Ok(ChiSquareReport {
        n,
        samples,
        statistic,
        dof,
        p_value: dist.sf(statistic),
        cells,
    })
}

/// Chi-square of the final cycle types in `records`.
pub fn uniformity_chi_square(records: &[TrialRecord]) -> Result<ChiSquareReport> {
    let n = common_n(records)?;
    let types: Vec<IntPartition> = records.iter().map(|r| r.final_cycle_type.clone()).collect();
    chi_square_cycle_types(n, &types)
}

/// Outcome of the two-tier rule: a p-value below `alpha` earns one rerun
/// with a shifted seed, and only two failures in a row fail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoTier {
    pub first: f64,
    pub second: Option<f64>,
    pub passed: bool,
}

/// Seed offset used for the rerun.
pub const RERUN_SEED_SHIFT: u64 = 0x9E37_79B9;

pub fn two_tier(alpha: f64, seed: u64, mut p_value: impl FnMut(u64) -> Result<f64>) -> Result<TwoTier> {
    let first = p_value(seed)?;
    if first >= alpha {
        return Ok(TwoTier {
            first,
            second: None,
            passed: true,
        });
    }
    let second = p_value(seed.wrapping_add(RERUN_SEED_SHIFT))?;
    Ok(TwoTier {
        first,
        second: Some(second),
        passed: second >= alpha,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares fit of `y = slope * x + intercept`.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> Result<Regression> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Statistics("regression needs at least two paired points".into()));
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Statistics("regression with constant x".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(Regression {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// `sum_{k = ceil(n/3)}^{n-1} (1 - p_k) / p_k^2` with
/// `p_k = k(n-k)/(n(n-1))`: the variance of a sum of independent geometric
/// waits, one per size of the largest block.
pub fn second_phase_variance_reference(n: u64) -> f64 {
    let nn = (n * (n - 1)) as f64;
    (n.div_ceil(3)..n)
        .map(|k| {
            let p = (k * (n - k)) as f64 / nn;
            (1.0 - p) / (p * p)
        })
        .sum()
}
