//! Two-dimensional cuts through the decodability and secrecy regions.

use serde::{Deserialize, Serialize};

use super::{in_bob_region, in_eve_region, FrameSlotIndex, Party, RateAllocation};
use crate::channel::{ChannelRealization, Layout};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `points` equally spaced values from `min` to `max` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange<T> {
    pub min: T,
    pub max: T,
    pub points: usize,
}

impl<T: Scalar> AxisRange<T> {
    pub fn new(min: T, max: T, points: usize) -> Self {
        AxisRange { min, max, points }
    }

    fn validate(&self, field: &str) -> Result<()> {
        if self.points == 0 {
            return Err(Error::config(
                format!("{field}.points"),
                "must be at least 1",
            ));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min >= T::zero()) {
            return Err(Error::config(field, "bounds must be finite and >= 0"));
        }
        if self.max < self.min {
            return Err(Error::config(field, "max must not be below min"));
        }
        Ok(())
    }

    /// Grid values; a single point sits at `min`.
    pub fn values(&self) -> Vec<T> {
        if self.points == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = T::from_count(self.points as u64 - 1);
        (0..self.points)
            .map(|i| self.min + span * T::from_count(i as u64) / last)
            .collect()
    }
}

/// Which slice of which region to sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceSpec<T> {
    pub layout: Layout,
    pub rates: RateAllocation<T>,
    pub party: Party,
    /// Index the region is evaluated at; defaults to the last slot `(K, M)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<FrameSlotIndex>,
    /// Slot whose information runs along the x axis.
    pub x_axis: FrameSlotIndex,
    pub y_axis: FrameSlotIndex,
    pub x_range: AxisRange<T>,
    pub y_range: AxisRange<T>,
    /// Value held by every slot other than the two axis slots.
    #[serde(default)]
    pub pinned: T,
}

impl<T: Scalar> SliceSpec<T> {
    pub fn index(&self) -> FrameSlotIndex {
        self.index.unwrap_or_else(|| self.layout.last())
    }

    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        self.rates.check_layout(self.layout)?;
        for (name, idx) in [
            ("index", self.index()),
            ("x_axis", self.x_axis),
            ("y_axis", self.y_axis),
        ] {
            if !self.layout.contains(idx) {
                return Err(Error::config(
                    name,
                    format!(
                        "slot {idx} is outside the {}x{} layout",
                        self.layout.frames, self.layout.slots_per_frame
                    ),
                ));
            }
        }
        if self.x_axis == self.y_axis {
            return Err(Error::config("y_axis", "must differ from x_axis"));
        }
        if !(self.pinned.is_finite() && self.pinned >= T::zero()) {
            return Err(Error::config("pinned", "must be finite and >= 0"));
        }
        self.x_range.validate("x_range")?;
        self.y_range.validate("y_range")
    }
}

/// One grid sample of a region slice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSample<T> {
    pub x: T,
    pub y: T,
    pub member: bool,
}

/// Evaluates region membership on the rectangular grid of `spec`.
///
/// Samples are ordered with `x` outermost. The information of the party
/// that is not sliced is irrelevant to the region and left at zero.
pub fn export_region_slice<T: Scalar>(spec: &SliceSpec<T>) -> Result<Vec<SliceSample<T>>> {
    spec.validate()?;
    let layout = spec.layout;
    let idx = spec.index();
    let xs = spec.x_range.values();
    let ys = spec.y_range.values();
    let (xi, yi) = (layout.flat(spec.x_axis), layout.flat(spec.y_axis));
    let mut info = vec![spec.pinned; layout.total_slots()];
    let zeros = vec![T::zero(); layout.total_slots()];
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            info[xi] = x;
            info[yi] = y;
            let member = match spec.party {
                Party::Bob => {
                    let real = ChannelRealization::new(layout, info.clone(), zeros.clone())?;
                    in_bob_region(&real, &spec.rates, idx)?
                }
                Party::Eve => {
                    let real = ChannelRealization::new(layout, zeros.clone(), info.clone())?;
                    in_eve_region(&real, &spec.rates, idx)?
                }
            };
            out.push(SliceSample { x, y, member });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(
        layout: (usize, usize),
        party: Party,
        r_s: f64,
        r_d: Vec<f64>,
        points: usize,
    ) -> SliceSpec<f64> {
        let layout = Layout::new(layout.0, layout.1).unwrap();
        let (x_axis, y_axis) = if layout.frames == 2 {
            (FrameSlotIndex::new(1, 1), FrameSlotIndex::new(2, 1))
        } else {
            (FrameSlotIndex::new(1, 1), FrameSlotIndex::new(1, 2))
        };
        SliceSpec {
            layout,
            rates: RateAllocation::new(r_s, r_d),
            party,
            index: None,
            x_axis,
            y_axis,
            x_range: AxisRange::new(0.0, 2.0, points),
            y_range: AxisRange::new(0.0, 2.0, points),
            pinned: 0.0,
        }
    }

    #[test]
    fn eve_two_frames_is_rectangle() {
        let s = spec((2, 1), Party::Eve, 0.3, vec![0.7, 1.1], 41);
        let samples = export_region_slice(&s).unwrap();
        assert_eq!(samples.len(), 41 * 41);
        for p in samples {
            assert_eq!(p.member, p.x <= 0.7 && p.y <= 1.1, "{p:?}");
        }
    }

    #[test]
    fn bob_single_frame_is_half_plane() {
        let s = spec((1, 2), Party::Bob, 0.4, vec![0.9], 41);
        for p in export_region_slice(&s).unwrap() {
            // avoid rounding ties on the line
            if (p.x + p.y - 1.3).abs() > 1e-9 {
                assert_eq!(p.member, p.x + p.y >= 1.3, "{p:?}");
            }
        }
    }

    #[test]
    fn single_point_grid_matches_predicate() {
        let mut s = spec((2, 1), Party::Bob, 1.0, vec![0.5, 0.5], 1);
        s.x_range = AxisRange::new(1.7, 1.7, 1);
        s.y_range = AxisRange::new(0.2, 5.0, 1);
        let samples = export_region_slice(&s).unwrap();
        assert_eq!(samples.len(), 1);
        let real = ChannelRealization::new(s.layout, vec![1.7, 0.2], vec![0.0, 0.0]).unwrap();
        assert_eq!(
            samples[0].member,
            in_bob_region(&real, &s.rates, s.index()).unwrap()
        );
        assert!(samples[0].member);
    }

    #[test]
    fn pinned_coordinates_feed_the_region() {
        let mut s = spec((2, 2), Party::Eve, 1.0, vec![1.0, 1.0], 3);
        s.x_axis = FrameSlotIndex::new(1, 1);
        s.y_axis = FrameSlotIndex::new(2, 2);
        s.pinned = 0.6;
        let samples = export_region_slice(&s).unwrap();
        // x = 0 is the only column where frame 1 stays within R_d1
        for p in samples {
            assert_eq!(p.member, p.x <= 0.4 && p.y <= 0.4, "{p:?}");
        }
    }

    #[test]
    fn invalid_axes() {
        let mut s = spec((2, 1), Party::Eve, 1.0, vec![0.5, 0.5], 5);
        s.y_axis = FrameSlotIndex::new(3, 1);
        assert!(
            matches!(export_region_slice(&s), Err(Error::InvalidConfig { field, .. }) if field == "y_axis")
        );
        s.y_axis = s.x_axis;
        assert!(export_region_slice(&s).is_err());
        let mut s = spec((2, 1), Party::Eve, 1.0, vec![0.5, 0.5], 5);
        s.x_range.points = 0;
        assert!(export_region_slice(&s).is_err());
    }

    #[test]
    fn axis_values_are_inclusive() {
        let v = AxisRange::new(0.0, 2.0, 5).values();
        assert_eq!(v, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}
