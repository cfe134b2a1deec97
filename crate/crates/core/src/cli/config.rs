//! Experiment configuration file.
//!
//! One JSON document drives every subcommand; each subcommand reads the
//! sections it needs and reports the first missing or invalid field.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::FadingConfig;
use crate::error::{Error, Result};
use crate::estimators::{DiscreteFadingSpec, DEFAULT_ENUMERATION_CAP};
use crate::regions::SliceSpec;
use crate::throughput::{RateGrid, SearchOptions};
use crate::RateAllocation;

pub const DEFAULT_TRIALS: u64 = 100_000;

/// A named region slice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedSlice {
    pub name: String,
    pub slice: SliceSpec<f64>,
}

/// IR-HARQ baseline of the `cdf` subcommand.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Baseline {
    /// Random-message rate `R_d^IR`; searched on the rate grid when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_d: Option<f64>,
    /// Seed for separate baseline draws; absent means paired draws.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Discrete channel and tolerances of the `oracle-check` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCheck {
    pub spec: DiscreteFadingSpec,
    pub rates: RateAllocation,
    #[serde(default = "default_cap")]
    pub cap: u128,
    /// Absolute tolerance floor; the check uses `max(3·half_width, floor)`.
    #[serde(default = "default_floor")]
    pub floor: f64,
}

fn default_cap() -> u128 {
    DEFAULT_ENUMERATION_CAP
}

fn default_floor() -> f64 {
    0.005
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<FadingConfig>,
    /// Fixed rate allocation (`outage`, optionally `cdf`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<RateAllocation>,
    /// Secret rate for rate searches.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secret_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_grid: Option<RateGrid<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchOptions>,
    /// Trials used by rate searches that precede another run; defaults to `trials`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<Baseline>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub slices: Vec<NamedSlice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
}

fn missing(field: &str) -> Error {
    Error::config(field, "is required by this subcommand")
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            path: origin.to_string(),
            source,
        })
    }

    /// Fills defaults for seed and trials so the embedded copy is complete.
    pub fn resolve(mut self, seed: Option<u64>, trials: Option<u64>) -> Result<Self> {
        self.seed = Some(seed.or(self.seed).unwrap_or(0));
        let trials = trials.or(self.trials).unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        self.trials = Some(trials);
        if self.search_trials == Some(0) {
            return Err(Error::config("search_trials", "must be at least 1"));
        }
        Ok(self)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }

    pub fn search_trials(&self) -> u64 {
        self.search_trials.unwrap_or_else(|| self.trials())
    }

    pub fn channel(&self) -> Result<&FadingConfig> {
        let channel = self.channel.as_ref().ok_or_else(|| missing("channel"))?;
        channel.validate()?;
        Ok(channel)
    }

    pub fn rates(&self) -> Result<&RateAllocation> {
        self.rates.as_ref().ok_or_else(|| missing("rates"))
    }

    /// Secret rate from `secret_rate`, falling back to `rates.r_s`.
    pub fn secret_rate(&self) -> Result<f64> {
        self.secret_rate
            .or(self.rates.as_ref().map(|r| r.r_s))
            .ok_or_else(|| missing("secret_rate"))
    }

    pub fn rate_grid(&self) -> RateGrid<f64> {
        self.rate_grid.unwrap_or_default()
    }

    pub fn search(&self) -> SearchOptions {
        self.search.unwrap_or_default()
    }

    pub fn label(&self) -> String {
        match (&self.label, &self.channel) {
            (Some(l), _) => l.clone(),
            (None, Some(c)) => format!("K{}_M{}", c.frames, c.slots_per_frame),
            (None, None) => "run".to_string(),
        }
    }

    /// Compact single-line JSON embedded in every output file.
    pub fn to_compact_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::parse(r#"{"seed": 1, "trails": 5}"#, "x").unwrap_err();
        assert!(err.to_string().contains("trails"));
        assert_eq!(err.exit_code(), 2);
        assert!(ExperimentConfig::parse(
            r#"{"channel": {"frames": 1, "slots_per_frame": 1, "bob": {"fading": {"kind": "rayleigh"}, "mean_snr_db": 1}, "eve": {"fading": {"kind": "rayleigh"}, "mean_snr_db": 1}, "colour": 1}}"#,
            "x"
        )
        .is_err());
    }

    #[test]
    fn resolve_applies_overrides() {
        let cfg = ExperimentConfig::parse(r#"{"seed": 1, "trials": 5}"#, "x").unwrap();
        let r = cfg.clone().resolve(Some(9), None).unwrap();
        assert_eq!((r.seed(), r.trials()), (9, 5));
        let r = cfg.clone().resolve(None, Some(7)).unwrap();
        assert_eq!((r.seed(), r.trials()), (1, 7));
        let err = cfg.resolve(None, Some(0)).unwrap_err();
        assert!(err.to_string().contains("`trials`"));
        let r = ExperimentConfig::default().resolve(None, None).unwrap();
        assert_eq!(r.to_compact_json(), r#"{"seed":0,"trials":100000}"#);
    }

    #[test]
    fn compact_json_round_trips() {
        let text = include_str!("../../presets/figure4_b.json");
        let cfg = ExperimentConfig::parse(text, "figure4_b").unwrap();
        let again = ExperimentConfig::parse(&cfg.to_compact_json(), "embedded").unwrap();
        assert_eq!(cfg, again);
    }
}
