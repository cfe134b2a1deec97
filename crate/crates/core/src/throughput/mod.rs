//! Achievable secret throughput and the search over random-message rates.
//!
//! The throughput lower bound weighs each first-decode event by the
//! probability that secrecy still holds at that slot and by the number of
//! slots it took:
//!
//! ```text
//! T = Σ_k Σ_m  P_D(k,m) · (1 − P_s(k,m)) · R_s / (M(k−1) + m)
//! ```

pub mod delta;
pub mod ir;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, ChannelRealization, FadingConfig, Layout};
use crate::error::{Error, Result};
use crate::estimators::report::Tally;
use crate::estimators::EstimateReport;
use crate::regions::{decode_scan, leak_scan, RateAllocation};
use crate::rng::trial_rng;
use crate::scalar::Scalar;

pub use delta::{
    delta_cdf, ks_noise_floor, ks_statistic, CdfPoint, DeltaReport, DeltaSample, EmpiricalCdf,
};

/// Upper bound on rate vectors evaluated by one search unless overridden.
pub const DEFAULT_MAX_GRID_POINTS: u128 = 200_000;

/// Secret throughput lower bound for the probabilities in `report`.
pub fn throughput_bound<T: Scalar>(report: &EstimateReport<T>, r_s: T) -> T {
    let m = report.slots_per_frame;
    let mut total = T::zero();
    for (k, (decode, secrecy)) in report
        .p_decode
        .iter()
        .zip(&report.p_secrecy_outage)
        .enumerate()
    {
        for (j, (&p_d, &p_s)) in decode.iter().zip(secrecy).enumerate() {
            let slots = T::from_count((m * k + j + 1) as u64);
            total = total + p_d * (T::one() - p_s) * r_s / slots;
        }
    }
    total
}

/// Evenly spaced random-message rates `min, min + step, …` up to `max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateGrid<T> {
    pub min: T,
    pub max: T,
    pub step: T,
}

impl<T: Scalar> Default for RateGrid<T> {
    fn default() -> Self {
        RateGrid {
            min: T::zero(),
            max: T::lit(4.0),
            step: T::lit(0.05),
        }
    }
}

impl<T: Scalar> RateGrid<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > T::zero()) {
            return Err(Error::config("rate_grid.step", "must be finite and > 0"));
        }
        if !(self.min.is_finite() && self.min >= T::zero()) {
            return Err(Error::config("rate_grid.min", "must be finite and >= 0"));
        }
        if !(self.max.is_finite() && self.max >= self.min) {
            return Err(Error::config("rate_grid.max", "must be finite and >= min"));
        }
        Ok(())
    }

    /// Grid values; the `i`-th value is `min + i·step`.
    pub fn values(&self) -> Vec<T> {
        let span = ((self.max - self.min) / self.step + T::lit(1e-9)).floor();
        let n = span.to_u64().unwrap_or(0) + 1;
        (0..n)
            .map(|i| self.min + self.step * T::from_count(i))
            .collect()
    }
}

/// Which maximizer to keep when several rate vectors reach the same bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// Lexicographically smallest rate vector.
    #[default]
    Smallest,
    /// Lexicographically largest rate vector.
    Largest,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchOptions {
    /// Restrict the search to equal rates in every frame.
    #[serde(default)]
    pub symmetric: bool,
    #[serde(default)]
    pub tie_rule: TieRule,
    #[serde(default = "default_max_points")]
    pub max_grid_points: u128,
}

fn default_max_points() -> u128 {
    DEFAULT_MAX_GRID_POINTS
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            symmetric: false,
            tie_rule: TieRule::Smallest,
            max_grid_points: DEFAULT_MAX_GRID_POINTS,
        }
    }
}

/// Best rate allocation found by a grid search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThroughputResult<T> {
    pub t_bound: T,
    pub best_rates: RateAllocation<T>,
    pub grid_evaluations: u64,
    pub report: EstimateReport<T>,
}

/// Candidate rate vectors in lexicographically increasing order.
fn candidates<T: Scalar>(
    r_s: T,
    values: &[T],
    frames: usize,
    options: &SearchOptions,
) -> Result<Vec<RateAllocation<T>>> {
    if values.is_empty() {
        return Err(Error::config("rate_grid", "contains no rate"));
    }
    if options.symmetric {
        return Ok(values
            .iter()
            .map(|&v| RateAllocation::symmetric(r_s, v, frames))
            .collect());
    }
    let points = (values.len() as u128)
        .checked_pow(frames as u32)
        .unwrap_or(u128::MAX);
    if points > options.max_grid_points {
        return Err(Error::GridTooLarge {
            points,
            cap: options.max_grid_points,
        });
    }
    let mut out = Vec::with_capacity(points as usize);
    let mut digits = vec![0usize; frames];
    loop {
        out.push(RateAllocation::new(
            r_s,
            digits.iter().map(|&d| values[d]).collect(),
        ));
        let mut j = frames;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            digits[j] += 1;
            if digits[j] < values.len() {
                break;
            }
            digits[j] = 0;
        }
    }
}

/// Trials drawn at once before every candidate scans them.
const CHUNK: u64 = 8192;

/// Counts decoding and leakage events for every candidate on the same
/// channel draws. `events` maps a candidate and a realization to the flat
/// first-decode and first-leak indices.
pub(crate) fn common_random_tallies<T, C, F>(
    channel: &Channel<T>,
    candidates: &[C],
    trials: u64,
    seed: u64,
    events: F,
) -> Vec<Tally>
where
    T: Scalar,
    C: Sync,
    F: Fn(&C, &ChannelRealization<T>) -> (Option<usize>, Option<usize>) + Sync,
{
    let layout = channel.layout();
    let mut tallies = vec![Tally::new(layout.total_slots()); candidates.len()];
    let mut start = 0;
    while start < trials {
        let end = (start + CHUNK).min(trials);
        let draws: Vec<ChannelRealization<T>> = (start..end)
            .into_par_iter()
            .map(|t| channel.sample(&mut trial_rng(seed, t)))
            .collect();
        tallies
            .par_iter_mut()
            .zip(candidates.par_iter())
            .for_each(|(tally, cand)| {
                for real in &draws {
                    let (d, l) = events(cand, real);
                    tally.record(d, l);
                }
            });
        start = end;
    }
    tallies
}

/// Index of the best score under `rule`; candidates are in increasing order.
pub(crate) fn pick_best<T: Scalar>(scores: &[T], rule: TieRule) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        let better = match rule {
            TieRule::Smallest => s > scores[best],
            TieRule::Largest => s >= scores[best],
        };
        if better {
            best = i;
        }
    }
    best
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    Ok(())
}

fn check_secret_rate<T: Scalar>(r_s: T) -> Result<()> {
    if !(r_s.is_finite() && r_s > T::zero()) {
        return Err(Error::config(
            "rates.r_s",
            "must be finite and > 0 for throughput",
        ));
    }
    Ok(())
}

/// Maximizes the throughput bound over the grid of random-message rates.
///
/// Every rate vector is scored on the same `trials` channel draws, which are
/// the draws [`crate::estimators::estimate`] uses for the same `seed`.
pub fn optimize_rates<T: Scalar>(
    config: &FadingConfig,
    r_s: T,
    grid: &RateGrid<T>,
    trials: u64,
    seed: u64,
    options: &SearchOptions,
) -> Result<ThroughputResult<T>> {
    let channel = Channel::new(config)?;
    check_trials(trials)?;
    check_secret_rate(r_s)?;
    grid.validate()?;
    let layout = channel.layout();
    let cands = candidates(r_s, &grid.values(), layout.frames, options)?;
    let tallies = common_random_tallies(&channel, &cands, trials, seed, |rates, real| {
        (decode_scan(real, rates), leak_scan(real, rates))
    });
    Ok(select(layout, r_s, cands, &tallies, options.tie_rule))
}

fn select<T: Scalar>(
    layout: Layout,
    r_s: T,
    mut cands: Vec<RateAllocation<T>>,
    tallies: &[Tally],
    rule: TieRule,
) -> ThroughputResult<T> {
    let reports: Vec<EstimateReport<T>> = tallies.iter().map(|t| t.report(layout)).collect();
    let scores: Vec<T> = reports.iter().map(|r| throughput_bound(r, r_s)).collect();
    let best = pick_best(&scores, rule);
    ThroughputResult {
        t_bound: scores[best],
        best_rates: cands.swap_remove(best),
        grid_evaluations: scores.len() as u64,
        report: reports[best].clone(),
    }
}

/// Estimates the probabilities at `rates` and the resulting bound.
pub fn evaluate_rates<T: Scalar>(
    config: &FadingConfig,
    rates: &RateAllocation<T>,
    trials: u64,
    seed: u64,
) -> Result<(EstimateReport<T>, T)> {
    check_secret_rate(rates.r_s)?;
    let report = crate::estimators::estimate(config, rates, trials, seed)?;
    let t = throughput_bound(&report, rates.r_s);
    Ok((report, t))
}
