//! Decodability and secrecy regions.
//!
//! For a frame/slot index `(k', m')` Bob can decode once
//!
//! ```text
//! Σ_{k<k'} [Σ_{m≤M} I^B_{k,m} − R_{d,k}]^+  +  [Σ_{m≤m'} I^B_{k',m} − R_{d,k'}]^+  ≥  R_s
//! ```
//!
//! and nothing about the secret has leaked to Eve while every frame's
//! accumulated Eve information stays within its own random-message rate:
//! `Σ_{m≤M} I^E_{k,m} ≤ R_{d,k}` for `k < k'` and `Σ_{m≤m'} I^E_{k',m} ≤ R_{d,k'}`.
//!
//! Both inequalities are non-strict. Bob's region grows and Eve's region
//! shrinks as the index advances in frame-major order.

pub mod slice;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, Layout};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use slice::{export_region_slice, AxisRange, SliceSample, SliceSpec};

/// 1-based `(frame, slot)` position in the retransmission schedule.
///
/// The derived ordering is frame-major, i.e. chronological.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSlotIndex {
    pub frame: usize,
    pub slot: usize,
}

impl FrameSlotIndex {
    pub fn new(frame: usize, slot: usize) -> Self {
        FrameSlotIndex { frame, slot }
    }

    /// Number of slots spent when decoding at this index, `M(k−1) + m`.
    pub fn slots_used(&self, slots_per_frame: usize) -> usize {
        slots_per_frame * (self.frame - 1) + self.slot
    }

    /// Index immediately before this one; `(k, 0)` wraps to `(k−1, M)` and
    /// the predecessor of `(1, 1)` is the empty region.
    pub fn predecessor(&self, slots_per_frame: usize) -> Option<FrameSlotIndex> {
        match (self.frame, self.slot) {
            (1, 1) => None,
            (k, 1) => Some(FrameSlotIndex::new(k - 1, slots_per_frame)),
            (k, m) => Some(FrameSlotIndex::new(k, m - 1)),
        }
    }
}

impl std::fmt::Display for FrameSlotIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.frame, self.slot)
    }
}

/// Secret rate `R_s` and per-frame random-message rates `R_{d,k}`.
///
/// IR-HARQ with random rate `R_d^IR` is the single-frame case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateAllocation<T> {
    pub r_s: T,
    pub r_d: Vec<T>,
}

impl<T: Scalar> RateAllocation<T> {
    pub fn new(r_s: T, r_d: Vec<T>) -> Self {
        RateAllocation { r_s, r_d }
    }

    /// Same random-message rate in every one of `frames` frames.
    pub fn symmetric(r_s: T, r_d: T, frames: usize) -> Self {
        RateAllocation {
            r_s,
            r_d: vec![r_d; frames],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_s.is_finite() && self.r_s >= T::zero()) {
            return Err(Error::config("rates.r_s", "must be finite and >= 0"));
        }
        if self.r_d.is_empty() {
            return Err(Error::config("rates.r_d", "must have one entry per frame"));
        }
        for (i, r) in self.r_d.iter().enumerate() {
            if !(r.is_finite() && *r >= T::zero()) {
                return Err(Error::config(
                    format!("rates.r_d[{i}]"),
                    "must be finite and >= 0",
                ));
            }
        }
        Ok(())
    }

    /// Validates the allocation against a frame/slot layout.
    pub fn check_layout(&self, layout: Layout) -> Result<()> {
        self.validate()?;
        if self.r_d.len() != layout.frames {
            return Err(Error::DimensionMismatch(format!(
                "{} random-message rates for {} frames",
                self.r_d.len(),
                layout.frames
            )));
        }
        Ok(())
    }
}

/// Which receiver a region belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Bob,
    Eve,
}

/// `[x]^+ = max(x, 0)`.
#[inline]
pub fn positive_part<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x
    } else {
        T::zero()
    }
}

fn check<T: Scalar>(
    real: &ChannelRealization<T>,
    rates: &RateAllocation<T>,
    idx: FrameSlotIndex,
) -> Result<()> {
    rates.check_layout(real.layout())?;
    if !real.layout().contains(idx) {
        return Err(Error::DimensionMismatch(format!(
            "index {idx} outside {}x{} grid",
            real.layout().frames,
            real.layout().slots_per_frame
        )));
    }
    Ok(())
}

fn sum<T: Scalar>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |acc, &x| acc + x)
}

/// Membership of `real` in Bob's decodability set at `idx`.
pub fn in_bob_region<T: Scalar>(
    real: &ChannelRealization<T>,
    rates: &RateAllocation<T>,
    idx: FrameSlotIndex,
) -> Result<bool> {
    check(real, rates, idx)?;
    let earlier = (1..idx.frame).fold(T::zero(), |acc, k| {
        acc + positive_part(sum(real.bob_frame(k)) - rates.r_d[k - 1])
    });
    let current = sum(&real.bob_frame(idx.frame)[..idx.slot]) - rates.r_d[idx.frame - 1];
    Ok(earlier + positive_part(current) >= rates.r_s)
}

/// Membership of `real` in Eve's failure (secrecy) set at `idx`.
pub fn in_eve_region<T: Scalar>(
    real: &ChannelRealization<T>,
    rates: &RateAllocation<T>,
    idx: FrameSlotIndex,
) -> Result<bool> {
    check(real, rates, idx)?;
    let earlier = (1..idx.frame).all(|k| sum(real.eve_frame(k)) <= rates.r_d[k - 1]);
    Ok(earlier && sum(&real.eve_frame(idx.frame)[..idx.slot]) <= rates.r_d[idx.frame - 1])
}

/// Earliest index at which Bob decodes, or `None` on reliability outage.
///
/// Since Bob's regions are nested this is the unique index in
/// `Q^(B)(k,m) \ Q^(B)(predecessor)`.
pub fn first_decode_index<T: Scalar>(
    real: &ChannelRealization<T>,
    rates: &RateAllocation<T>,
) -> Result<Option<FrameSlotIndex>> {
    rates.check_layout(real.layout())?;
    Ok(decode_scan(real, rates).map(|i| real.layout().index_at(i)))
}

/// Earliest index at which Eve leaves her failure region, or `None` when
/// secrecy holds over the whole horizon.
pub fn first_leak_index<T: Scalar>(
    real: &ChannelRealization<T>,
    rates: &RateAllocation<T>,
) -> Result<Option<FrameSlotIndex>> {
    rates.check_layout(real.layout())?;
    Ok(leak_scan(real, rates).map(|i| real.layout().index_at(i)))
}

/// Flat index of the first decode. Sums in the same order as
/// [`in_bob_region`] so both agree bit for bit. Dimensions are not checked.
pub(crate) fn decode_scan<T: Scalar>(
    real: &ChannelRealization<T>,
    rates: &RateAllocation<T>,
) -> Option<usize> {
    let m = real.layout().slots_per_frame;
    let bob = real.bob();
    let mut earlier = T::zero();
    for (k, &r_d) in rates.r_d.iter().enumerate() {
        let mut acc = T::zero();
        for j in 0..m {
            acc = acc + bob[k * m + j];
            if earlier + positive_part(acc - r_d) >= rates.r_s {
                return Some(k * m + j);
            }
        }
        earlier = earlier + positive_part(acc - r_d);
    }
    None
}

/// Flat index of the first secrecy violation. Dimensions are not checked.
pub(crate) fn leak_scan<T: Scalar>(
    real: &ChannelRealization<T>,
    rates: &RateAllocation<T>,
) -> Option<usize> {
    let m = real.layout().slots_per_frame;
    let eve = real.eve();
    for (k, &r_d) in rates.r_d.iter().enumerate() {
        let mut acc = T::zero();
        for j in 0..m {
            acc = acc + eve[k * m + j];
            if acc > r_d || acc.is_nan() {
                return Some(k * m + j);
            }
        }
    }
    None
}
