//! Block-fading channel model.
//!
//! Each slot of each frame sees an independent power gain on the Alice-Bob
//! link and an independent power gain on the Alice-Eve link. A gain `g`
//! on a link with mean SNR `γ` yields `log2(1 + γ g)` bits per channel use.
//!
//! All rates and informations are in bits/channel-use. Decibel values exist
//! only in [`FadingConfig`] and are converted once by [`Channel::new`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regions::FrameSlotIndex;
use crate::scalar::Scalar;

/// Frame/slot layout of one secret-message transmission: `frames` frames
/// of `slots_per_frame` slots each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layout {
    pub frames: usize,
    pub slots_per_frame: usize,
}

impl Layout {
    pub fn new(frames: usize, slots_per_frame: usize) -> Result<Self> {
        let layout = Layout {
            frames,
            slots_per_frame,
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::config("frames", "must be at least 1"));
        }
        if self.slots_per_frame == 0 {
            return Err(Error::config("slots_per_frame", "must be at least 1"));
        }
        Ok(())
    }

    /// Total slot budget `K·M`.
    pub fn total_slots(&self) -> usize {
        self.frames * self.slots_per_frame
    }

    /// Frame-major position of `idx` in a flat `K·M` array.
    #[inline]
    pub fn flat(&self, idx: FrameSlotIndex) -> usize {
        (idx.frame - 1) * self.slots_per_frame + (idx.slot - 1)
    }

    /// Inverse of [`Layout::flat`].
    #[inline]
    pub fn index_at(&self, flat: usize) -> FrameSlotIndex {
        FrameSlotIndex {
            frame: flat / self.slots_per_frame + 1,
            slot: flat % self.slots_per_frame + 1,
        }
    }

    pub fn contains(&self, idx: FrameSlotIndex) -> bool {
        (1..=self.frames).contains(&idx.frame) && (1..=self.slots_per_frame).contains(&idx.slot)
    }

    /// Last index `(K, M)` of the horizon.
    pub fn last(&self) -> FrameSlotIndex {
        FrameSlotIndex {
            frame: self.frames,
            slot: self.slots_per_frame,
        }
    }

    /// All indices in chronological (frame-major) order.
    pub fn indices(&self) -> impl Iterator<Item = FrameSlotIndex> + '_ {
        (0..self.total_slots()).map(|i| self.index_at(i))
    }
}

/// One atom of a discrete gain distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub gain: f64,
    pub probability: f64,
}

/// Distribution of the per-slot power gain `|h|²` on one link.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Fading {
    /// Rician fading with the given line-of-sight to scattered power ratio.
    Rician { k_factor_db: f64 },
    /// Rician fading without a line-of-sight component.
    Rayleigh,
    /// No scattering: the gain is always 1.
    LineOfSight,
    /// Finite-support gain distribution, used by the enumeration oracle.
    Discrete { atoms: Vec<Atom> },
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Fading law and mean received SNR of one link.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub fading: Fading,
    pub mean_snr_db: f64,
    /// A muted link has zero SNR and therefore carries zero information.
    #[serde(default, skip_serializing_if = "is_false")]
    pub muted: bool,
}

impl LinkConfig {
    pub fn new(fading: Fading, mean_snr_db: f64) -> Self {
        LinkConfig {
            fading,
            mean_snr_db,
            muted: false,
        }
    }

    /// Link with zero SNR.
    pub fn muted() -> Self {
        LinkConfig {
            fading: Fading::LineOfSight,
            mean_snr_db: 0.0,
            muted: true,
        }
    }

    fn validate(&self, field: &str) -> Result<()> {
        if !self.mean_snr_db.is_finite() {
            return Err(Error::config(
                format!("{field}.mean_snr_db"),
                "must be finite",
            ));
        }
        match &self.fading {
            Fading::Rician { k_factor_db } if !k_factor_db.is_finite() => Err(Error::config(
                format!("{field}.fading.k_factor_db"),
                "must be finite (use kind \"rayleigh\" for no line of sight)",
            )),
            Fading::Discrete { atoms } => validate_atoms(atoms, &format!("{field}.fading.atoms")),
            _ => Ok(()),
        }
    }

    /// Linear mean SNR (zero when muted).
    pub fn snr_linear(&self) -> f64 {
        if self.muted {
            0.0
        } else {
            db_to_linear(self.mean_snr_db)
        }
    }
}

pub(crate) fn validate_atoms(atoms: &[Atom], field: &str) -> Result<()> {
    if atoms.is_empty() {
        return Err(Error::config(field, "must contain at least one atom"));
    }
    for (i, a) in atoms.iter().enumerate() {
        if !(a.gain.is_finite() && a.gain >= 0.0) {
            return Err(Error::config(
                format!("{field}[{i}].gain"),
                "must be finite and >= 0",
            ));
        }
        if !(a.probability.is_finite() && a.probability > 0.0) {
            return Err(Error::config(
                format!("{field}[{i}].probability"),
                "must be finite and > 0",
            ));
        }
    }
    let total: f64 = atoms.iter().map(|a| a.probability).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::config(
            field,
            format!("probabilities sum to {total}, expected 1"),
        ));
    }
    Ok(())
}

/// Experiment parameters for the block-fading wiretap channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingConfig {
    pub frames: usize,
    pub slots_per_frame: usize,
    pub bob: LinkConfig,
    pub eve: LinkConfig,
}

impl FadingConfig {
    pub fn layout(&self) -> Layout {
        Layout {
            frames: self.frames,
            slots_per_frame: self.slots_per_frame,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.layout().validate()?;
        self.bob.validate("bob")?;
        self.eve.validate("eve")
    }

    /// Same links, different frame/slot layout.
    pub fn with_layout(&self, layout: Layout) -> Self {
        FadingConfig {
            frames: layout.frames,
            slots_per_frame: layout.slots_per_frame,
            ..self.clone()
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Gain distribution with parameters in linear scale.
#[derive(Clone, Debug, PartialEq)]
pub enum GainLaw<T> {
    /// Rician with linear factor `k`; `k = 0` is Rayleigh.
    Rician {
        k: T,
    },
    Rayleigh,
    LineOfSight,
    Discrete {
        gains: Vec<T>,
        cumulative: Vec<f64>,
    },
}

impl<T: Scalar> GainLaw<T> {
    pub fn from_fading(fading: &Fading) -> Self {
        match fading {
            Fading::Rician { k_factor_db } => GainLaw::Rician {
                k: T::lit(db_to_linear(*k_factor_db)),
            },
            Fading::Rayleigh => GainLaw::Rayleigh,
            Fading::LineOfSight => GainLaw::LineOfSight,
            Fading::Discrete { atoms } => {
                let total: f64 = atoms.iter().map(|a| a.probability).sum();
                let mut acc = 0.0;
                let mut cumulative: Vec<f64> = atoms
                    .iter()
                    .map(|a| {
                        acc += a.probability / total;
                        acc
                    })
                    .collect();
                if let Some(last) = cumulative.last_mut() {
                    *last = 1.0;
                }
                GainLaw::Discrete {
                    gains: atoms.iter().map(|a| T::lit(a.gain)).collect(),
                    cumulative,
                }
            }
        }
    }
}

/// Draws one power gain `|h|²`.
///
/// For Rician fading `h = sqrt(k/(k+1)) + sqrt(1/(k+1)) g` with `g`
/// circularly-symmetric complex Gaussian of unit variance, so `E|h|² = 1`.
pub fn sample_gain<T: Scalar, R: Rng + ?Sized>(rng: &mut R, law: &GainLaw<T>) -> T {
    let half = T::lit(0.5);
    match law {
        GainLaw::LineOfSight => T::one(),
        GainLaw::Rayleigh => {
            let re = T::standard_normal(rng);
            let im = T::standard_normal(rng);
            (re * re + im * im) * half
        }
        GainLaw::Rician { k } => {
            let denom = *k + T::one();
            let los = (*k / denom).sqrt();
            let spread = (half / denom).sqrt();
            let re = los + spread * T::standard_normal(rng);
            let im = spread * T::standard_normal(rng);
            re * re + im * im
        }
        GainLaw::Discrete { gains, cumulative } => {
            let u: f64 = rng.random();
            let i = cumulative.partition_point(|&c| c <= u).min(gains.len() - 1);
            gains[i]
        }
    }
}

/// Gaussian-input capacity `log2(1 + snr·gain)` of a faded slot.
#[inline]
pub fn mutual_information<T: Scalar>(snr_linear: T, gain: T) -> T {
    (snr_linear * gain).ln_1p() / T::LN_2()
}

/// Per-slot mutual informations `(I^B, I^E)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SlotInformation<T> {
    pub i_bob: T,
    pub i_eve: T,
}

/// One draw of the block-fading process: a `K×M` grid of slot
/// informations, stored frame-major per link.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization<T> {
    layout: Layout,
    bob: Vec<T>,
    eve: Vec<T>,
}

impl<T: Scalar> ChannelRealization<T> {
    /// Builds a realization from frame-major per-link information vectors.
    pub fn new(layout: Layout, bob: Vec<T>, eve: Vec<T>) -> Result<Self> {
        layout.validate()?;
        for (name, v) in [("bob", &bob), ("eve", &eve)] {
            if v.len() != layout.total_slots() {
                return Err(Error::DimensionMismatch(format!(
                    "{name} information has {} entries, layout needs {}",
                    v.len(),
                    layout.total_slots()
                )));
            }
            if v.iter().any(|x| !(x.is_finite() && *x >= T::zero())) {
                return Err(Error::config(name, "information must be finite and >= 0"));
            }
        }
        Ok(ChannelRealization { layout, bob, eve })
    }

    /// Builds a realization from a `K×M` grid of slot informations.
    pub fn from_grid(grid: &[Vec<SlotInformation<T>>]) -> Result<Self> {
        let frames = grid.len();
        let slots = grid.first().map_or(0, Vec::len);
        if grid.iter().any(|row| row.len() != slots) {
            return Err(Error::DimensionMismatch("ragged slot grid".into()));
        }
        let layout = Layout::new(frames, slots)?;
        let flat = grid.iter().flatten();
        ChannelRealization::new(
            layout,
            flat.clone().map(|s| s.i_bob).collect(),
            flat.map(|s| s.i_eve).collect(),
        )
    }

    /// All-zero realization.
    pub fn zeros(layout: Layout) -> Self {
        let n = layout.total_slots();
        ChannelRealization {
            layout,
            bob: vec![T::zero(); n],
            eve: vec![T::zero(); n],
        }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn slot(&self, idx: FrameSlotIndex) -> SlotInformation<T> {
        let i = self.layout.flat(idx);
        SlotInformation {
            i_bob: self.bob[i],
            i_eve: self.eve[i],
        }
    }

    pub fn grid(&self) -> Vec<Vec<SlotInformation<T>>> {
        (1..=self.layout.frames)
            .map(|frame| {
                (1..=self.layout.slots_per_frame)
                    .map(|slot| self.slot(FrameSlotIndex { frame, slot }))
                    .collect()
            })
            .collect()
    }

    pub fn bob(&self) -> &[T] {
        &self.bob
    }

    pub fn eve(&self) -> &[T] {
        &self.eve
    }

    pub(crate) fn bob_mut(&mut self) -> &mut [T] {
        &mut self.bob
    }

    pub(crate) fn eve_mut(&mut self) -> &mut [T] {
        &mut self.eve
    }

    /// Bob's informations in 1-based frame `frame`.
    pub fn bob_frame(&self, frame: usize) -> &[T] {
        let m = self.layout.slots_per_frame;
        &self.bob[(frame - 1) * m..frame * m]
    }

    pub fn eve_frame(&self, frame: usize) -> &[T] {
        let m = self.layout.slots_per_frame;
        &self.eve[(frame - 1) * m..frame * m]
    }

    /// Same slot sequence read under another layout with the same slot budget.
    pub fn relayout(&self, layout: Layout) -> Result<Self> {
        if layout.total_slots() != self.layout.total_slots() {
            return Err(Error::DimensionMismatch(format!(
                "cannot relayout {} slots into {}",
                self.layout.total_slots(),
                layout.total_slots()
            )));
        }
        Ok(ChannelRealization {
            layout,
            bob: self.bob.clone(),
            eve: self.eve.clone(),
        })
    }
}

/// One link with its SNR in linear scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Link<T> {
    pub law: GainLaw<T>,
    pub snr: T,
}

impl<T: Scalar> Link<T> {
    pub fn new(config: &LinkConfig) -> Self {
        Link {
            law: GainLaw::from_fading(&config.fading),
            snr: T::lit(config.snr_linear()),
        }
    }

    fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [T]) {
        for x in out.iter_mut() {
            *x = mutual_information(self.snr, sample_gain(rng, &self.law));
        }
    }
}

/// A validated [`FadingConfig`] ready for sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel<T> {
    layout: Layout,
    bob: Link<T>,
    eve: Link<T>,
}

impl<T: Scalar> Channel<T> {
    pub fn new(config: &FadingConfig) -> Result<Self> {
        config.validate()?;
        Ok(Channel {
            layout: config.layout(),
            bob: Link::new(&config.bob),
            eve: Link::new(&config.eve),
        })
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn bob(&self) -> &Link<T> {
        &self.bob
    }

    pub fn eve(&self) -> &Link<T> {
        &self.eve
    }

    /// Draws a fresh realization.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization<T> {
        let mut real = ChannelRealization::zeros(self.layout);
        self.sample_into(rng, &mut real);
        real
    }

    /// Overwrites `real` with a fresh draw. All `K·M` Bob gains are drawn
    /// first, in slot order, then all Eve gains, so two layouts with the same
    /// slot budget see the same slot sequence from the same generator.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, real: &mut ChannelRealization<T>) {
        debug_assert_eq!(real.layout().total_slots(), self.layout.total_slots());
        self.bob.fill(rng, real.bob_mut());
        self.eve.fill(rng, real.eve_mut());
    }
}

/// Draws one realization for `config`.
pub fn sample_realization<T: Scalar, R: Rng + ?Sized>(
    config: &FadingConfig,
    rng: &mut R,
) -> Result<ChannelRealization<T>> {
    Ok(Channel::new(config)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    fn mean_and_stderr(law: &GainLaw<f64>, n: usize, seed: u64) -> (f64, f64) {
        let mut rng = trial_rng(seed, 0);
        let xs: Vec<f64> = (0..n).map(|_| sample_gain(&mut rng, law)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        (mean, (var / n as f64).sqrt())
    }

    #[test]
    fn line_of_sight_gain_is_one() {
        let mut rng = trial_rng(1, 0);
        for _ in 0..10 {
            assert_eq!(sample_gain::<f64, _>(&mut rng, &GainLaw::LineOfSight), 1.0);
        }
    }

    #[test]
    fn rayleigh_gain_has_unit_mean() {
        let (mean, se) = mean_and_stderr(&GainLaw::Rayleigh, 1_000_000, 11);
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
        assert!((mean - 1.0).abs() < 5.0 * se);
        // exponential(1): variance 1
        assert!((se * 1000.0 - 1.0).abs() < 0.02);
    }

    #[test]
    fn rician_0db_gain_has_unit_mean() {
        let law = GainLaw::from_fading(&Fading::Rician { k_factor_db: 0.0 });
        assert_eq!(law, GainLaw::Rician { k: 1.0 });
        let (mean, se) = mean_and_stderr(&law, 1_000_000, 12);
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
        assert!((mean - 1.0).abs() < 5.0 * se);
    }

    #[test]
    fn rician_normalization_across_k_factors() {
        for (i, db) in [-10.0, 3.0, 10.0, 20.0].into_iter().enumerate() {
            let law = GainLaw::from_fading(&Fading::Rician { k_factor_db: db });
            let (mean, se) = mean_and_stderr(&law, 1_000_000, 20 + i as u64);
            assert!(
                (mean - 1.0).abs() < 5.0 * se,
                "k={db} dB mean {mean} se {se}"
            );
        }
    }

    #[test]
    fn rician_in_f32() {
        let law = GainLaw::<f32>::from_fading(&Fading::Rician { k_factor_db: 0.0 });
        let mut rng = trial_rng(5, 0);
        let n = 200_000;
        let mean: f64 = (0..n)
            .map(|_| sample_gain(&mut rng, &law) as f64)
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0).abs() < 0.02);
    }

    #[test]
    fn discrete_gain_frequencies() {
        let law = GainLaw::<f64>::from_fading(&Fading::Discrete {
            atoms: vec![
                Atom {
                    gain: 0.25,
                    probability: 0.3,
                },
                Atom {
                    gain: 2.0,
                    probability: 0.7,
                },
            ],
        });
        let mut rng = trial_rng(3, 0);
        let n = 100_000;
        let hi = (0..n)
            .filter(|_| sample_gain(&mut rng, &law) == 2.0)
            .count();
        assert!((hi as f64 / n as f64 - 0.7).abs() < 0.01);
    }

    #[test]
    fn mutual_information_values() {
        assert_eq!(mutual_information(0.0, 123.0), 0.0);
        assert_eq!(mutual_information(1.0, 1.0), 1.0);
        let snr = db_to_linear(4.0);
        assert!((snr - 2.511_886_431_509_58).abs() < 1e-12);
        assert!((mutual_information(snr, 1.0) - 1.812_246_191_300_625_4).abs() < 1e-12);
        assert_eq!(mutual_information(1.0f32, 1.0f32), 1.0f32);
    }

    #[test]
    fn mutual_information_is_strictly_increasing() {
        let xs = [1e-6, 0.01, 0.5, 1.0, 3.0, 100.0];
        for w in xs.windows(2) {
            for &other in &xs {
                assert!(mutual_information(w[0], other) < mutual_information(w[1], other));
                assert!(mutual_information(other, w[0]) < mutual_information(other, w[1]));
            }
        }
    }

    fn config(frames: usize, slots: usize) -> FadingConfig {
        FadingConfig {
            frames,
            slots_per_frame: slots,
            bob: LinkConfig::new(Fading::Rician { k_factor_db: 0.0 }, 4.0),
            eve: LinkConfig::new(Fading::Rician { k_factor_db: 0.0 }, 5.0),
        }
    }

    #[test]
    fn zero_snr_realization_is_zero() {
        let cfg = FadingConfig {
            frames: 1,
            slots_per_frame: 1,
            bob: LinkConfig::muted(),
            eve: LinkConfig::muted(),
        };
        let real: ChannelRealization<f64> = sample_realization(&cfg, &mut trial_rng(0, 0)).unwrap();
        assert_eq!(
            real.grid(),
            vec![vec![SlotInformation {
                i_bob: 0.0,
                i_eve: 0.0
            }]]
        );
    }

    #[test]
    fn realization_shape_and_determinism() {
        let cfg = config(2, 3);
        let a: ChannelRealization<f64> = sample_realization(&cfg, &mut trial_rng(9, 1)).unwrap();
        let b: ChannelRealization<f64> = sample_realization(&cfg, &mut trial_rng(9, 1)).unwrap();
        assert_eq!(a, b);
        let grid = a.grid();
        assert_eq!(grid.len(), 2);
        assert!(grid.iter().all(|row| row.len() == 3));
        assert!(grid.iter().flatten().all(|s| s.i_bob.is_finite()
            && s.i_bob >= 0.0
            && s.i_eve.is_finite()
            && s.i_eve >= 0.0));
    }

    #[test]
    fn same_budget_layouts_share_slot_sequence() {
        let a: ChannelRealization<f64> =
            sample_realization(&config(2, 3), &mut trial_rng(4, 2)).unwrap();
        let b: ChannelRealization<f64> =
            sample_realization(&config(1, 6), &mut trial_rng(4, 2)).unwrap();
        assert_eq!(a.bob(), b.bob());
        assert_eq!(a.eve(), b.eve());
        assert_eq!(a.relayout(b.layout()).unwrap(), b);
    }

    #[test]
    fn config_validation() {
        let mut cfg = config(0, 1);
        assert!(
            matches!(cfg.validate(), Err(Error::InvalidConfig { field, .. }) if field == "frames")
        );
        cfg = config(1, 1);
        cfg.eve.mean_snr_db = f64::NAN;
        assert!(cfg.validate().is_err());
        cfg = config(1, 1);
        cfg.bob.fading = Fading::Discrete {
            atoms: vec![Atom {
                gain: 1.0,
                probability: 0.5,
            }],
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn fading_json_shape() {
        let json = r#"{"fading":{"kind":"rician","k_factor_db":0.0},"mean_snr_db":4.0}"#;
        let link: LinkConfig = serde_json::from_str(json).unwrap();
        assert_eq!(
            link,
            LinkConfig::new(Fading::Rician { k_factor_db: 0.0 }, 4.0)
        );
        assert!(serde_json::from_str::<LinkConfig>(
            r#"{"fading":{"kind":"rayleigh"},"mean_snr_db":4.0,"extra":1}"#
        )
        .is_err());
    }
}
