//! Secure HARQ with multiple independent encodings over block-fading
//! wiretap channels.
//!
//! The crate evaluates Bob's decodability region and Eve's failure region
//! exactly, estimates outage, first-decode and secrecy-outage
//! probabilities by Monte Carlo (or exactly, for discrete fading), and
//! searches random-message rates for the best secret throughput bound.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which the command line tool uses.

pub mod channel;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod regions;
pub mod rng;
pub mod scalar;
pub mod throughput;

pub use channel::{
    mutual_information, sample_gain, sample_realization, Atom, Fading, FadingConfig, Layout,
    LinkConfig, SlotInformation,
};
pub use error::{Error, Result};
pub use estimators::{enumerate_oracle, estimate, DiscreteFadingSpec, DiscreteLink};
pub use regions::{
    export_region_slice, first_decode_index, first_leak_index, in_bob_region, in_eve_region,
    positive_part, FrameSlotIndex, Party,
};
pub use scalar::Scalar;
pub use throughput::{
    delta_cdf, optimize_rates, throughput_bound, RateGrid, SearchOptions, TieRule,
};

pub type ChannelRealization = channel::ChannelRealization<f64>;
pub type Channel = channel::Channel<f64>;
pub type RateAllocation = regions::RateAllocation<f64>;
pub type EstimateReport = estimators::EstimateReport<f64>;
pub type ThroughputResult = throughput::ThroughputResult<f64>;
pub type DeltaReport = throughput::DeltaReport<f64>;
pub type SliceSpec = regions::SliceSpec<f64>;

pub type ChannelRealization32 = channel::ChannelRealization<f32>;
pub type RateAllocation32 = regions::RateAllocation<f32>;
pub type EstimateReport32 = estimators::EstimateReport<f32>;
pub type ThroughputResult32 = throughput::ThroughputResult<f32>;
