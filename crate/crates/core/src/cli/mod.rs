//! Command line front end.
//!
//! Every subcommand reads one JSON configuration, resolves seed and trial
//! overrides into it, and writes result files that embed the resolved
//! configuration. Running again from an embedded configuration reproduces
//! the file byte for byte, whatever the worker count.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::channel::FadingConfig;
use crate::error::{Error, Result};
use crate::estimators::{enumerate_exact, estimate, EstimateReport};
use crate::regions::{export_region_slice, FrameSlotIndex};
use crate::throughput::ir::ir_optimize;
use crate::throughput::{delta_cdf, optimize_rates};
use crate::RateAllocation;

pub use config::ExperimentConfig;
pub use output::{embedded_config, OutputFile};

use output::{check_file_stem, json_file, write_all, CsvWriter};

/// The five experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Export region slices as CSV grids.
    Regions,
    /// Estimate outage, first-decode and secrecy-outage probabilities.
    Outage,
    /// Search random-message rates for the best throughput bound.
    Throughput,
    /// Paired throughput difference against IR-HARQ and its CDF.
    Cdf,
    /// Compare Monte Carlo against exact enumeration on a discrete channel.
    OracleCheck,
}

#[derive(Debug, Args)]
struct Flags {
    /// JSON experiment configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Overrides the configured trial count.
    #[arg(long, value_name = "N")]
    trials: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Parser)]
#[command(
    name = "sharq",
    version,
    about = "Secure HARQ over block-fading wiretap channels"
)]
struct Full {
    #[command(subcommand)]
    sub: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Export region slices as CSV grids.
    Regions(Flags),
    /// Estimate outage, first-decode and secrecy-outage probabilities.
    Outage(Flags),
    /// Search random-message rates for the best throughput bound.
    Throughput(Flags),
    /// Paired throughput difference against IR-HARQ and its CDF.
    Cdf(Flags),
    /// Compare Monte Carlo against exact enumeration on a discrete channel.
    OracleCheck(Flags),
}

impl Sub {
    fn split(self) -> (Command, Flags) {
        match self {
            Sub::Regions(f) => (Command::Regions, f),
            Sub::Outage(f) => (Command::Outage, f),
            Sub::Throughput(f) => (Command::Throughput, f),
            Sub::Cdf(f) => (Command::Cdf, f),
            Sub::OracleCheck(f) => (Command::OracleCheck, f),
        }
    }
}

/// Result of one subcommand: its files and whether its check passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub files: Vec<OutputFile>,
    pub passed: bool,
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit status.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let (command, flags) = match Full::try_parse_from(argv) {
        Ok(full) => full.sub.split(),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_flags(command, &flags) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", flags.out.join(&f.name).display());
            }
            if outcome.passed {
                0
            } else {
                eprintln!("error: oracle check failed");
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_flags(command: Command, flags: &Flags) -> Result<Outcome> {
    let config = ExperimentConfig::load(&flags.config)?.resolve(flags.seed, flags.trials)?;
    let outcome = match flags.workers {
        None => execute(command, &config)?,
        Some(0) => return Err(Error::config("workers", "must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("workers", e.to_string()))?
            .install(|| execute(command, &config))?,
    };
    write_all(&flags.out, &outcome.files)?;
    Ok(outcome)
}

/// Runs `command` on an already resolved configuration without touching
/// the file system.
pub fn execute(command: Command, config: &ExperimentConfig) -> Result<Outcome> {
    let files = match command {
        Command::Regions => regions(config)?,
        Command::Outage => outage(config)?,
        Command::Throughput => throughput(config)?,
        Command::Cdf => cdf(config)?,
        Command::OracleCheck => return oracle_check(config),
    };
    Ok(Outcome {
        files,
        passed: true,
    })
}

fn regions(config: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    if config.slices.is_empty() {
        return Err(Error::config("slices", "must name at least one slice"));
    }
    let mut files = Vec::with_capacity(config.slices.len());
    for s in &config.slices {
        check_file_stem("slices.name", &s.name)?;
        let name = format!("region_{}.csv", s.name);
        if files.iter().any(|f: &OutputFile| f.name == name) {
            return Err(Error::config(
                "slices.name",
                format!("{:?} is used twice", s.name),
            ));
        }
        let mut csv = CsvWriter::new(name, config, &["x", "y", "member"]);
        for p in export_region_slice(&s.slice)? {
            csv.row(&[&p.x, &p.y, &u8::from(p.member)]);
        }
        files.push(csv.finish());
    }
    Ok(files)
}

fn outage(config: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    let report = estimate(
        config.channel()?,
        config.rates()?,
        config.trials(),
        config.seed(),
    )?;
    Ok(vec![
        json_file("outage.json".into(), config, &report),
        report_csv("outage.csv".into(), config, &report),
    ])
}

fn report_csv(name: String, config: &ExperimentConfig, r: &EstimateReport<f64>) -> OutputFile {
    let mut csv = CsvWriter::new(
        name,
        config,
        &[
            "frame",
            "slot",
            "p_decode",
            "half_width_decode",
            "p_secrecy_outage",
            "half_width_secrecy",
            "p_outage",
        ],
    );
    for idx in r.layout().indices() {
        let (k, m) = (idx.frame - 1, idx.slot - 1);
        csv.row(&[
            &idx.frame,
            &idx.slot,
            &r.p_decode[k][m],
            &r.half_width_95.decode[k][m],
            &r.p_secrecy_outage[k][m],
            &r.half_width_95.secrecy_outage[k][m],
            &r.p_outage,
        ]);
    }
    csv.finish()
}

fn throughput(config: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    let result = optimize_rates(
        config.channel()?,
        config.secret_rate()?,
        &config.rate_grid(),
        config.trials(),
        config.seed(),
        &config.search(),
    )?;
    Ok(vec![json_file("throughput.json".into(), config, &result)])
}

/// Single-frame channel with the same slot budget and links.
pub fn ir_config(config: &FadingConfig) -> FadingConfig {
    FadingConfig {
        frames: 1,
        slots_per_frame: config.frames * config.slots_per_frame,
        bob: config.bob.clone(),
        eve: config.eve.clone(),
    }
}

#[derive(Serialize)]
struct CdfSummary {
    rates: RateAllocation,
    r_d_ir: f64,
    rates_searched: bool,
    trials: u64,
    paired: bool,
    p_positive: f64,
    mean_delta: f64,
    t_bound_s: f64,
    t_bound_ir: f64,
    delta_bound: f64,
    cdf_points: usize,
}

fn cdf(config: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    let label = config.label();
    check_file_stem("label", &label)?;
    let channel = config.channel()?;
    let baseline_channel = ir_config(channel);
    let baseline = config.baseline.clone().unwrap_or_default();
    let (seed, search_trials) = (config.seed(), config.search_trials());
    let grid = config.rate_grid();
    let search = config.search();

    let (rates, rates_searched) = match &config.rates {
        Some(r) => (r.clone(), false),
        None => {
            let r_s = config.secret_rate()?;
            let best = optimize_rates(channel, r_s, &grid, search_trials, seed, &search)?;
            (best.best_rates, true)
        }
    };
    let r_d_ir = match baseline.r_d {
        Some(r) => r,
        None => {
            let best = ir_optimize(
                &baseline_channel,
                rates.r_s,
                &grid,
                search_trials,
                seed,
                search.tie_rule,
            )?;
            best.best_rates.r_d[0]
        }
    };
    let report = delta_cdf(
        channel,
        &rates,
        &baseline_channel,
        r_d_ir,
        config.trials(),
        seed,
        baseline.seed,
    )?;

    let mut csv = CsvWriter::new(format!("delta_cdf_{label}.csv"), config, &["delta", "cdf"]);
    for p in &report.cdf.points {
        csv.row(&[&p.value, &p.cdf]);
    }
    let summary = CdfSummary {
        rates,
        r_d_ir,
        rates_searched,
        trials: config.trials(),
        paired: baseline.seed.is_none_or(|s| s == seed),
        p_positive: report.p_positive,
        mean_delta: report.mean_delta,
        t_bound_s: report.t_bound_s,
        t_bound_ir: report.t_bound_ir,
        delta_bound: report.delta_bound,
        cdf_points: report.cdf.points.len(),
    };
    Ok(vec![
        csv.finish(),
        json_file(format!("delta_summary_{label}.json"), config, &summary),
    ])
}

#[derive(Serialize)]
struct Comparison {
    quantity: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<FrameSlotIndex>,
    exact: f64,
    exact_rational: String,
    estimate: f64,
    half_width_95: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct OracleSummary {
    pass: bool,
    outcomes: u128,
    trials: u64,
    floor: f64,
    comparisons: Vec<Comparison>,
}

fn oracle_check(config: &ExperimentConfig) -> Result<Outcome> {
    let oracle = config
        .oracle
        .as_ref()
        .ok_or_else(|| Error::config("oracle", "is required by this subcommand"))?;
    if !(oracle.floor.is_finite() && oracle.floor >= 0.0) {
        return Err(Error::config("oracle.floor", "must be finite and >= 0"));
    }
    let exact = enumerate_exact(&oracle.spec, &oracle.rates, oracle.cap)?;
    let mc = estimate(
        &oracle.spec.fading_config(),
        &oracle.rates,
        config.trials(),
        config.seed(),
    )?;

    let compare = |quantity, index, exact: &num_rational::BigRational, estimate: f64, hw: f64| {
        let value = exact.to_f64().expect("probability fits in f64");
        let tolerance = (3.0 * hw).max(oracle.floor);
        Comparison {
            quantity,
            index,
            exact: value,
            exact_rational: exact.to_string(),
            estimate,
            half_width_95: hw,
            tolerance,
            pass: (estimate - value).abs() <= tolerance,
        }
    };
    let mut comparisons = vec![compare(
        "p_outage",
        None,
        &exact.p_outage,
        mc.p_outage,
        mc.half_width_95.outage,
    )];
    for (flat, idx) in exact.layout.indices().enumerate() {
        let (k, m) = (idx.frame - 1, idx.slot - 1);
        comparisons.push(compare(
            "p_decode",
            Some(idx),
            &exact.p_decode[flat],
            mc.p_decode[k][m],
            mc.half_width_95.decode[k][m],
        ));
        comparisons.push(compare(
            "p_secrecy_outage",
            Some(idx),
            &exact.p_secrecy_outage[flat],
            mc.p_secrecy_outage[k][m],
            mc.half_width_95.secrecy_outage[k][m],
        ));
    }
    let summary = OracleSummary {
        pass: comparisons.iter().all(|c| c.pass),
        outcomes: exact.outcomes,
        trials: config.trials(),
        floor: oracle.floor,
        comparisons,
    };
    Ok(Outcome {
        passed: summary.pass,
        files: vec![json_file("oracle_check.json".into(), config, &summary)],
    })
}
