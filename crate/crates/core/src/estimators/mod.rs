//! Monte Carlo estimation of outage, decoding and secrecy-outage
//! probabilities, with an exact enumeration path for discrete fading.
//!
//! The estimated quantities are the region probabilities that bound the
//! true `P_o`, `P_D(k,m)` and `P_s(k,m)`; they are reported as the bounds
//! taken with equality.

pub mod oracle;
pub mod report;

use rayon::prelude::*;

use crate::channel::{Channel, ChannelRealization, FadingConfig};
use crate::error::{Error, Result};
use crate::regions::{decode_scan, leak_scan, RateAllocation};
use crate::rng::{blocks, trial_rng};
use crate::scalar::Scalar;

pub use oracle::{
    enumerate_exact, enumerate_oracle, DiscreteFadingSpec, DiscreteLink, ExactReport,
    DEFAULT_ENUMERATION_CAP,
};
pub use report::{EstimateReport, HalfWidths, Z_95};

use report::Tally;

/// Estimates the outage, decoding and secrecy-outage probabilities of
/// `rates` over `trials` independent channel draws.
///
/// Trial `i` uses random substream `i` of `seed`; the result is the same
/// for any size of the current rayon pool.
pub fn estimate<T: Scalar>(
    config: &FadingConfig,
    rates: &RateAllocation<T>,
    trials: u64,
    seed: u64,
) -> Result<EstimateReport<T>> {
    estimate_channel(&Channel::new(config)?, rates, trials, seed)
}

/// [`estimate`] on an already validated channel.
pub fn estimate_channel<T: Scalar>(
    channel: &Channel<T>,
    rates: &RateAllocation<T>,
    trials: u64,
    seed: u64,
) -> Result<EstimateReport<T>> {
    if trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    let layout = channel.layout();
    rates.check_layout(layout)?;
    let tallies: Vec<Tally> = blocks(trials)
        .into_par_iter()
        .map(|range| {
            let mut tally = Tally::new(layout.total_slots());
            let mut real = ChannelRealization::zeros(layout);
            for t in range {
                channel.sample_into(&mut trial_rng(seed, t), &mut real);
                tally.record(decode_scan(&real, rates), leak_scan(&real, rates));
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
