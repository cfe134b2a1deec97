//! Paired per-realization throughput difference between the multi-frame
//! scheme and the IR-HARQ baseline over the same slot budget.
//!
//! On each draw a scheme earns `R_s / slots_used` when Bob first decodes at
//! some slot and Eve is still inside her failure region at that slot, and
//! nothing otherwise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ir::{ir_decode_slot, ir_leak_slot, ir_throughput};
use super::throughput_bound;
use crate::channel::{Channel, ChannelRealization, FadingConfig};
use crate::error::{Error, Result};
use crate::estimators::report::Tally;
use crate::regions::{decode_scan, leak_scan, RateAllocation};
use crate::rng::{blocks, trial_rng};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaSample<T> {
    pub delta: T,
    pub realized_s: T,
    pub realized_ir: T,
}

/// One step of an empirical CDF: `P(Δ ≤ value) = cdf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint<T> {
    pub value: T,
    pub cdf: f64,
}

/// Right-continuous empirical distribution function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf<T> {
    pub points: Vec<CdfPoint<T>>,
    pub samples: u64,
}

impl<T: Scalar> EmpiricalCdf<T> {
    pub fn new(values: &[T]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("throughputs are finite"));
        let n = sorted.len();
        let mut points: Vec<CdfPoint<T>> = Vec::new();
        for (i, &v) in sorted.iter().enumerate() {
            let cdf = (i + 1) as f64 / n as f64;
            match points.last_mut() {
                Some(last) if last.value == v => last.cdf = cdf,
                _ => points.push(CdfPoint { value: v, cdf }),
            }
        }
        EmpiricalCdf {
            points,
            samples: n as u64,
        }
    }

    /// `P(Δ ≤ x)`.
    pub fn eval(&self, x: T) -> f64 {
        let i = self.points.partition_point(|p| p.value <= x);
        if i == 0 {
            0.0
        } else {
            self.points[i - 1].cdf
        }
    }

    /// `P(Δ > x)`.
    pub fn exceedance(&self, x: T) -> f64 {
        1.0 - self.eval(x)
    }
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a − F_b|`.
pub fn ks_statistic<T: Scalar>(a: &EmpiricalCdf<T>, b: &EmpiricalCdf<T>) -> f64 {
    a.points
        .iter()
        .chain(&b.points)
        .map(|p| (a.eval(p.value) - b.eval(p.value)).abs())
        .fold(0.0, f64::max)
}

/// Scale `sqrt((n_a + n_b) / (n_a n_b))` of the KS statistic between two
/// samples of the same law.
pub fn ks_noise_floor(n_a: u64, n_b: u64) -> f64 {
    let (a, b) = (n_a as f64, n_b as f64);
    ((a + b) / (a * b)).sqrt()
}

/// Paired differences, their distribution and the bound-level comparison on
/// the same draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport<T> {
    pub samples: Vec<DeltaSample<T>>,
    pub cdf: EmpiricalCdf<T>,
    /// Fraction of draws where the multi-frame scheme earns strictly more.
    pub p_positive: f64,
    pub mean_delta: T,
    /// Throughput bound of each scheme estimated on the same draws.
    pub t_bound_s: T,
    pub t_bound_ir: T,
    pub delta_bound: T,
}

fn realized<T: Scalar>(decode: Option<usize>, leak: Option<usize>, r_s: T) -> T {
    match decode {
        Some(d) if leak.is_none_or(|l| l > d) => r_s / T::from_count(d as u64 + 1),
        _ => T::zero(),
    }
}

/// Draws `trials` channel realizations and evaluates both schemes on each.
///
/// Both schemes see the same slot sequence unless `ir_seed` names a
/// different seed for the baseline draws.
#[allow(clippy::too_many_arguments)]
pub fn delta_cdf<T: Scalar>(
    config_s: &FadingConfig,
    rates_s: &RateAllocation<T>,
    config_ir: &FadingConfig,
    r_d_ir: T,
    trials: u64,
    seed: u64,
    ir_seed: Option<u64>,
) -> Result<DeltaReport<T>> {
    let channel_s = Channel::<T>::new(config_s)?;
    let channel_ir = Channel::<T>::new(config_ir)?;
    let (layout_s, layout_ir) = (channel_s.layout(), channel_ir.layout());
    if layout_ir.frames != 1 {
        return Err(Error::config(
            "baseline.frames",
            "IR-HARQ uses a single frame",
        ));
    }
    if layout_s.total_slots() != layout_ir.total_slots() {
        return Err(Error::DimensionMismatch(format!(
            "slot budget {}x{} differs from IR-HARQ budget {}",
            layout_s.frames, layout_s.slots_per_frame, layout_ir.slots_per_frame
        )));
    }
    if config_s.bob != config_ir.bob || config_s.eve != config_ir.eve {
        return Err(Error::config(
            "baseline",
            "both schemes must use the same links",
        ));
    }
    if trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    rates_s.check_layout(layout_s)?;
    let r_s = rates_s.r_s;
    if !(r_s.is_finite() && r_s > T::zero()) {
        return Err(Error::config("rates.r_s", "must be finite and > 0"));
    }
    if !(r_d_ir.is_finite() && r_d_ir >= T::zero()) {
        return Err(Error::config("baseline.r_d", "must be finite and >= 0"));
    }
    let ir_seed = ir_seed.unwrap_or(seed);

    type Chunk<T> = (Vec<DeltaSample<T>>, Tally, Tally);
    let chunks: Vec<Chunk<T>> = blocks(trials)
        .into_par_iter()
        .map(|range| {
            let n = layout_s.total_slots();
            let mut samples = Vec::with_capacity((range.end - range.start) as usize);
            let (mut tally_s, mut tally_ir) = (Tally::new(n), Tally::new(n));
            let mut real_s = ChannelRealization::zeros(layout_s);
            let mut real_ir = ChannelRealization::zeros(layout_ir);
            for t in range {
                channel_s.sample_into(&mut trial_rng(seed, t), &mut real_s);
                channel_ir.sample_into(&mut trial_rng(ir_seed, t), &mut real_ir);
                let (d_s, l_s) = (decode_scan(&real_s, rates_s), leak_scan(&real_s, rates_s));
                let (d_ir, l_ir) = (
                    ir_decode_slot(real_ir.bob(), r_d_ir, r_s),
                    ir_leak_slot(real_ir.eve(), r_d_ir),
                );
                tally_s.record(d_s, l_s);
                tally_ir.record(d_ir, l_ir);
                let s = realized(d_s, l_s, r_s);
                let ir = realized(d_ir, l_ir, r_s);
                samples.push(DeltaSample {
                    delta: s - ir,
                    realized_s: s,
                    realized_ir: ir,
                });
            }
            (samples, tally_s, tally_ir)
        })
        .collect();

    let n = layout_s.total_slots();
    let mut samples = Vec::with_capacity(trials as usize);
    let (mut tally_s, mut tally_ir) = (Tally::new(n), Tally::new(n));
    for (s, ts, ti) in chunks {
        samples.extend(s);
        tally_s.merge(&ts);
        tally_ir.merge(&ti);
    }
    let deltas: Vec<T> = samples.iter().map(|s| s.delta).collect();
    let positive = deltas.iter().filter(|&&d| d > T::zero()).count();
    let mean_delta = deltas.iter().fold(T::zero(), |a, &d| a + d) / T::from_count(trials);
    let t_bound_s = throughput_bound(&tally_s.report(layout_s), r_s);
    let t_bound_ir = ir_throughput(&tally_ir.report(layout_ir), r_s);
    Ok(DeltaReport {
        cdf: EmpiricalCdf::new(&deltas),
        samples,
        p_positive: positive as f64 / trials as f64,
        mean_delta,
        t_bound_s,
        t_bound_ir,
        delta_bound: t_bound_s - t_bound_ir,
    })
}
