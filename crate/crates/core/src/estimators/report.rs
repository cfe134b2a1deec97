use serde::{Deserialize, Serialize};

use crate::channel::Layout;
use crate::regions::FrameSlotIndex;
use crate::scalar::Scalar;

/// z-score of a two-sided 95% normal interval.
pub const Z_95: f64 = 1.96;

/// 95% half-widths, shaped like the probabilities they belong to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfWidths<T> {
    pub outage: T,
    pub decode: Vec<Vec<T>>,
    pub secrecy_outage: Vec<Vec<T>>,
}

/// Reliability outage, first-decode and secrecy-outage probabilities.
///
/// `p_decode[k-1][m-1]` is the probability that Bob first decodes at slot
/// `m` of frame `k`; `p_secrecy_outage[k-1][m-1]` the probability that Eve
/// has left her failure region by that slot. For exact reports `trials`
/// is the number of joint outcomes enumerated and all half-widths are 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport<T> {
    pub frames: usize,
    pub slots_per_frame: usize,
    pub trials: u64,
    pub exact: bool,
    pub p_outage: T,
    pub p_decode: Vec<Vec<T>>,
    pub p_secrecy_outage: Vec<Vec<T>>,
    pub half_width_95: HalfWidths<T>,
}

impl<T: Scalar> EstimateReport<T> {
    pub fn layout(&self) -> Layout {
        Layout {
            frames: self.frames,
            slots_per_frame: self.slots_per_frame,
        }
    }

    pub fn p_decode_at(&self, idx: FrameSlotIndex) -> T {
        self.p_decode[idx.frame - 1][idx.slot - 1]
    }

    pub fn p_secrecy_outage_at(&self, idx: FrameSlotIndex) -> T {
        self.p_secrecy_outage[idx.frame - 1][idx.slot - 1]
    }

    /// `P_o + Σ P_D(k,m)`, which is 1 up to rounding.
    pub fn decode_total(&self) -> T {
        self.p_decode
            .iter()
            .flatten()
            .fold(self.p_outage, |acc, &p| acc + p)
    }

    /// Builds a report from flat frame-major probability vectors.
    pub(crate) fn from_flat(
        layout: Layout,
        trials: u64,
        exact: bool,
        p_outage: T,
        p_decode: &[T],
        p_secrecy_outage: &[T],
    ) -> Self {
        let half_width = |p: T| {
            if exact {
                T::zero()
            } else {
                T::lit(Z_95) * (p * (T::one() - p) / T::from_count(trials)).sqrt()
            }
        };
        let grid = |flat: &[T], f: &dyn Fn(T) -> T| -> Vec<Vec<T>> {
            flat.chunks(layout.slots_per_frame)
                .map(|row| row.iter().map(|&p| f(p)).collect())
                .collect()
        };
        EstimateReport {
            frames: layout.frames,
            slots_per_frame: layout.slots_per_frame,
            trials,
            exact,
            p_outage,
            p_decode: grid(p_decode, &|p| p),
            p_secrecy_outage: grid(p_secrecy_outage, &|p| p),
            half_width_95: HalfWidths {
                outage: half_width(p_outage),
                decode: grid(p_decode, &half_width),
                secrecy_outage: grid(p_secrecy_outage, &half_width),
            },
        }
    }
}

/// Event counts of a batch of trials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Tally {
    pub trials: u64,
    pub outage: u64,
    /// Trials whose first decode is at each flat index.
    pub decode_at: Vec<u64>,
    /// Trials whose first secrecy violation is at each flat index.
    pub leak_at: Vec<u64>,
}

impl Tally {
    pub fn new(slots: usize) -> Self {
        Tally {
            trials: 0,
            outage: 0,
            decode_at: vec![0; slots],
            leak_at: vec![0; slots],
        }
    }

    #[inline]
    pub fn record(&mut self, decode: Option<usize>, leak: Option<usize>) {
        self.trials += 1;
        match decode {
            Some(i) => self.decode_at[i] += 1,
            None => self.outage += 1,
        }
        if let Some(i) = leak {
            self.leak_at[i] += 1;
        }
    }

    pub fn merge(&mut self, other: &Tally) {
        self.trials += other.trials;
        self.outage += other.outage;
        for (a, b) in self.decode_at.iter_mut().zip(&other.decode_at) {
            *a += b;
        }
        for (a, b) in self.leak_at.iter_mut().zip(&other.leak_at) {
            *a += b;
        }
    }

    pub fn report<T: Scalar>(&self, layout: Layout) -> EstimateReport<T> {
        let n = T::from_count(self.trials);
        let frac = |c: u64| T::from_count(c) / n;
        let decode: Vec<T> = self.decode_at.iter().map(|&c| frac(c)).collect();
        // secrecy outage by (k, m) means a violation at or before (k, m)
        let mut leaked = 0;
        let secrecy: Vec<T> = self
            .leak_at
            .iter()
            .map(|&c| {
                leaked += c;
                frac(leaked)
            })
            .collect();
        EstimateReport::from_flat(
            layout,
            self.trials,
            false,
            frac(self.outage),
            &decode,
            &secrecy,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_to_report() {
        let layout = Layout::new(1, 2).unwrap();
        let mut t = Tally::new(2);
        t.record(Some(0), None);
        t.record(Some(1), Some(1));
        t.record(None, Some(0));
        t.record(Some(0), None);
        let r: EstimateReport<f64> = t.report(layout);
        assert_eq!(r.p_outage, 0.25);
        assert_eq!(r.p_decode, vec![vec![0.5, 0.25]]);
        assert_eq!(r.p_secrecy_outage, vec![vec![0.25, 0.5]]);
        assert_eq!(r.decode_total(), 1.0);
        let hw = Z_95 * (0.25f64 * 0.75 / 4.0).sqrt();
        assert_eq!(r.half_width_95.outage, hw);
        assert_eq!(
            r.half_width_95.secrecy_outage[0][1],
            Z_95 * (0.25f64 / 4.0).sqrt()
        );
    }

    #[test]
    fn merge_adds_counts() {
        let mut a = Tally::new(1);
        a.record(Some(0), Some(0));
        let mut b = Tally::new(1);
        b.record(None, None);
        a.merge(&b);
        assert_eq!(a.trials, 2);
        assert_eq!(a.outage, 1);
        assert_eq!(a.decode_at, vec![1]);
        assert_eq!(a.leak_at, vec![1]);
    }
}
