//! Single-codeword IR-HARQ baseline.
//!
//! One random-message rate `R_d^IR` covers the whole transmission: Bob
//! decodes once his pooled information exceeds `R_d^IR + R_s`, and secrecy
//! holds while Eve's pooled information stays within `R_d^IR`. The
//! multi-frame scheme with one frame reduces to this; the code here is kept
//! separate so the two can be checked against each other.

use crate::channel::{Channel, ChannelRealization, FadingConfig, Layout};
use crate::error::{Error, Result};
use crate::estimators::report::Tally;
use crate::estimators::EstimateReport;
use crate::regions::RateAllocation;
use crate::rng::{blocks, trial_rng};
use crate::scalar::Scalar;

use super::{common_random_tallies, pick_best, RateGrid, ThroughputResult, TieRule};

use rayon::prelude::*;

/// First slot (0-based) at which Bob's pooled information covers both rates.
pub fn ir_decode_slot<T: Scalar>(bob: &[T], r_d: T, r_s: T) -> Option<usize> {
    let mut pooled = T::zero();
    for (j, &i) in bob.iter().enumerate() {
        pooled = pooled + i;
        // same rounding as the bracketed multi-frame test
        if pooled - r_d >= r_s {
            return Some(j);
        }
    }
    None
}

/// First slot (0-based) at which Eve's pooled information exceeds `r_d`.
pub fn ir_leak_slot<T: Scalar>(eve: &[T], r_d: T) -> Option<usize> {
    let mut pooled = T::zero();
    for (j, &i) in eve.iter().enumerate() {
        pooled = pooled + i;
        if pooled > r_d {
            return Some(j);
        }
    }
    None
}

fn ir_channel<T: Scalar>(config: &FadingConfig) -> Result<Channel<T>> {
    if config.frames != 1 {
        return Err(Error::config("frames", "IR-HARQ uses a single frame"));
    }
    Channel::new(config)
}

fn check_rates<T: Scalar>(r_d: T, r_s: T) -> Result<()> {
    if !(r_s.is_finite() && r_s > T::zero()) {
        return Err(Error::config("rates.r_s", "must be finite and > 0"));
    }
    if !(r_d.is_finite() && r_d >= T::zero()) {
        return Err(Error::config("rates.r_d[0]", "must be finite and >= 0"));
    }
    Ok(())
}

/// IR-HARQ counterpart of [`crate::estimators::estimate`].
pub fn ir_estimate<T: Scalar>(
    config: &FadingConfig,
    r_d: T,
    r_s: T,
    trials: u64,
    seed: u64,
) -> Result<EstimateReport<T>> {
    let channel = ir_channel::<T>(config)?;
    check_rates(r_d, r_s)?;
    if trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    let layout = channel.layout();
    let tallies: Vec<Tally> = blocks(trials)
        .into_par_iter()
        .map(|range| {
            let mut tally = Tally::new(layout.total_slots());
            let mut real = ChannelRealization::zeros(layout);
            for t in range {
                channel.sample_into(&mut trial_rng(seed, t), &mut real);
                tally.record(
                    ir_decode_slot(real.bob(), r_d, r_s),
                    ir_leak_slot(real.eve(), r_d),
                );
            }
            tally
        })
        .collect();
    let mut total = Tally::new(layout.total_slots());
    for t in &tallies {
        total.merge(t);
    }
    Ok(total.report(layout))
}

/// `Σ_m P_D(m) (1 − P_s(m)) R_s / m`.
pub fn ir_throughput<T: Scalar>(report: &EstimateReport<T>, r_s: T) -> T {
    let decode = &report.p_decode[0];
    let secrecy = &report.p_secrecy_outage[0];
    decode
        .iter()
        .zip(secrecy)
        .enumerate()
        .fold(T::zero(), |acc, (j, (&p_d, &p_s))| {
            acc + p_d * (T::one() - p_s) * r_s / T::from_count(j as u64 + 1)
        })
}

/// IR-HARQ counterpart of [`super::optimize_rates`], searching `R_d^IR`.
pub fn ir_optimize<T: Scalar>(
    config: &FadingConfig,
    r_s: T,
    grid: &RateGrid<T>,
    trials: u64,
    seed: u64,
    tie_rule: TieRule,
) -> Result<ThroughputResult<T>> {
    let channel = ir_channel::<T>(config)?;
    check_rates(T::zero(), r_s)?;
    if trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    grid.validate()?;
    let values = grid.values();
    let tallies = common_random_tallies(&channel, &values, trials, seed, |&r_d, real| {
        (
            ir_decode_slot(real.bob(), r_d, r_s),
            ir_leak_slot(real.eve(), r_d),
        )
    });
    let layout: Layout = channel.layout();
    let reports: Vec<EstimateReport<T>> = tallies.iter().map(|t| t.report(layout)).collect();
    let scores: Vec<T> = reports.iter().map(|r| ir_throughput(r, r_s)).collect();
    let best = pick_best(&scores, tie_rule);
    Ok(ThroughputResult {
        t_bound: scores[best],
        best_rates: RateAllocation::new(r_s, vec![values[best]]),
        grid_evaluations: values.len() as u64,
        report: reports[best].clone(),
    })
}
