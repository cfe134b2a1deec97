//! Exact probabilities for channels with finitely many gain values.
//!
//! Every assignment of atoms to the `K·M` slots of both links is visited
//! and its probability mass is added to the events it triggers. Masses are
//! kept as exact rationals, so `P_o + Σ P_D = 1` holds without rounding.
//!
//! Bob's events depend only on Bob's gains and Eve's only on Eve's, and the
//! links are independent, so the joint sum factors into one sum per link;
//! the cap still applies to the size of the joint outcome space.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::report::EstimateReport;
use crate::channel::{
    db_to_linear, mutual_information, validate_atoms, Atom, ChannelRealization, Fading,
    FadingConfig, Layout, LinkConfig,
};
use crate::error::{Error, Result};
use crate::regions::{decode_scan, leak_scan, RateAllocation};
use crate::scalar::Scalar;

pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Discrete gain distribution and SNR of one link.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteLink {
    pub mean_snr_db: f64,
    #[serde(default)]
    pub muted: bool,
    pub atoms: Vec<Atom>,
}

impl DiscreteLink {
    fn link_config(&self) -> LinkConfig {
        LinkConfig {
            fading: Fading::Discrete {
                atoms: self.atoms.clone(),
            },
            mean_snr_db: self.mean_snr_db,
            muted: self.muted,
        }
    }

    fn snr_linear(&self) -> f64 {
        if self.muted {
            0.0
        } else {
            db_to_linear(self.mean_snr_db)
        }
    }

    /// Atom probabilities as exact rationals normalized to sum to one.
    fn masses(&self) -> Vec<BigRational> {
        let raw: Vec<BigRational> = self
            .atoms
            .iter()
            .map(|a| BigRational::from_float(a.probability).expect("validated finite"))
            .collect();
        let total = raw.iter().fold(BigRational::zero(), |acc, p| acc + p);
        raw.into_iter().map(|p| p / &total).collect()
    }
}

/// Block-fading channel whose per-slot gains take finitely many values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteFadingSpec {
    pub frames: usize,
    pub slots_per_frame: usize,
    pub bob: DiscreteLink,
    pub eve: DiscreteLink,
}

impl DiscreteFadingSpec {
    pub fn layout(&self) -> Layout {
        Layout {
            frames: self.frames,
            slots_per_frame: self.slots_per_frame,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fading_config().validate()?;
        validate_atoms(&self.bob.atoms, "bob.atoms")?;
        validate_atoms(&self.eve.atoms, "eve.atoms")
    }

    /// The same channel as a samplable fading configuration.
    pub fn fading_config(&self) -> FadingConfig {
        FadingConfig {
            frames: self.frames,
            slots_per_frame: self.slots_per_frame,
            bob: self.bob.link_config(),
            eve: self.eve.link_config(),
        }
    }

    /// Size of the joint outcome space, saturating at `u128::MAX`.
    pub fn joint_outcomes(&self) -> u128 {
        let slots = self.layout().total_slots() as u32;
        let per_link = |n: usize| (n as u128).checked_pow(slots);
        per_link(self.bob.atoms.len())
            .zip(per_link(self.eve.atoms.len()))
            .and_then(|(b, e)| b.checked_mul(e))
            .unwrap_or(u128::MAX)
    }
}

/// Exact probabilities, frame-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactReport {
    pub layout: Layout,
    pub outcomes: u128,
    pub p_outage: BigRational,
    pub p_decode: Vec<BigRational>,
    pub p_secrecy_outage: Vec<BigRational>,
}

impl ExactReport {
    /// `P_o + Σ P_D`, exactly.
    pub fn decode_total(&self) -> BigRational {
        self.p_decode
            .iter()
            .fold(self.p_outage.clone(), |acc, p| acc + p)
    }

    pub fn to_report<T: Scalar>(&self) -> EstimateReport<T> {
        let conv = |p: &BigRational| T::lit(p.to_f64().expect("probability fits in f64"));
        let decode: Vec<T> = self.p_decode.iter().map(conv).collect();
        let secrecy: Vec<T> = self.p_secrecy_outage.iter().map(conv).collect();
        let trials = u64::try_from(self.outcomes).unwrap_or(u64::MAX);
        EstimateReport::from_flat(
            self.layout,
            trials,
            true,
            conv(&self.p_outage),
            &decode,
            &secrecy,
        )
    }
}

/// Visits every atom assignment of one link, with its exact mass.
fn for_each_outcome<T: Scalar>(
    link: &DiscreteLink,
    slots: usize,
    mut visit: impl FnMut(&[T], &BigRational),
) {
    let snr = T::lit(link.snr_linear());
    let info: Vec<T> = link
        .atoms
        .iter()
        .map(|a| mutual_information(snr, T::lit(a.gain)))
        .collect();
    let masses = link.masses();
    let n = info.len();
    let mut digits = vec![0usize; slots];
    // prefix[j] = mass of digits[..j]
    let mut prefix = vec![BigRational::one(); slots + 1];
    let mut values = vec![T::zero(); slots];
    let mut dirty = 0;
    loop {
        for j in dirty..slots {
            values[j] = info[digits[j]];
            prefix[j + 1] = &prefix[j] * &masses[digits[j]];
        }
        visit(&values, &prefix[slots]);
        // odometer, last slot fastest
        let mut j = slots;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            digits[j] += 1;
            if digits[j] < n {
                break;
            }
            digits[j] = 0;
        }
        dirty = j;
    }
}

/// Exact region probabilities for a discrete channel.
///
/// Fails with [`Error::CapExceeded`] when the joint outcome space exceeds
/// `cap`.
pub fn enumerate_exact<T: Scalar>(
    spec: &DiscreteFadingSpec,
    rates: &RateAllocation<T>,
    cap: u128,
) -> Result<ExactReport> {
    spec.validate()?;
    let layout = spec.layout();
    rates.check_layout(layout)?;
    let outcomes = spec.joint_outcomes();
    if outcomes > cap {
        return Err(Error::CapExceeded { outcomes, cap });
    }
    let slots = layout.total_slots();
    let mut real = ChannelRealization::<T>::zeros(layout);

    let mut p_outage = BigRational::zero();
    let mut p_decode = vec![BigRational::zero(); slots];
    for_each_outcome(&spec.bob, slots, |info: &[T], mass| {
        real.bob_mut().copy_from_slice(info);
        match decode_scan(&real, rates) {
            Some(i) => p_decode[i] += mass,
            None => p_outage += mass,
        }
    });

    let mut leak_at = vec![BigRational::zero(); slots];
    for_each_outcome(&spec.eve, slots, |info: &[T], mass| {
        real.eve_mut().copy_from_slice(info);
        if let Some(i) = leak_scan(&real, rates) {
            leak_at[i] += mass;
        }
    });
    let mut leaked = BigRational::zero();
    let p_secrecy_outage = leak_at
        .into_iter()
        .map(|p| {
            leaked += p;
            leaked.clone()
        })
        .collect();

    Ok(ExactReport {
        layout,
        outcomes,
        p_outage,
        p_decode,
        p_secrecy_outage,
    })
}

/// Exact region probabilities as an [`EstimateReport`] with zero half-widths.
pub fn enumerate_oracle<T: Scalar>(
    spec: &DiscreteFadingSpec,
    rates: &RateAllocation<T>,
    cap: u128,
) -> Result<EstimateReport<T>> {
    Ok(enumerate_exact(spec, rates, cap)?.to_report())
}

/// Exact rational from a ratio of small integers.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
