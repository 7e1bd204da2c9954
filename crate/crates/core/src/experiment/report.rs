//! CSV and JSON artefacts of an experiment run.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::{Algorithm, DerivedSeeds, ExperimentConfig};
use super::run::ExperimentResult;
use crate::diffusion::mean;
use crate::{Error, Result};

pub const RESULTS_HEADER: [&str; 10] = [
    "algorithm",
    "budget",
    "instance",
    "profit_mean",
    "profit_std",
    "fairness_mean",
    "tau_ok",
    "seed_size",
    "seed_cost",
    "seconds",
];

/// Metadata written to `run_meta.json`. Everything in it is deterministic.
#[derive(Clone, Debug, Serialize)]
pub struct RunMeta {
    pub crate_version: &'static str,
    pub config: ExperimentConfig,
    pub seeds: DerivedSeeds,
    pub train_config_hash: Option<String>,
    pub agent_source: Option<String>,
    pub parallel: bool,
    pub excluded_baselines: Vec<&'static str>,
    pub seconds_scope: &'static str,
}

impl RunMeta {
    pub fn new(config: &ExperimentConfig) -> Self {
        RunMeta {
            crate_version: env!("CARGO_PKG_VERSION"),
            config: config.clone(),
            seeds: config.seeds(),
            train_config_hash: None,
            agent_source: None,
            parallel: cfg!(feature = "parallel"),
            excluded_baselines: vec!["crosswalk"],
            seconds_scope: "seed selection only; Monte Carlo evaluation excluded",
        }
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

/// Write results.csv. The `seconds` column is left empty unless
/// `with_seconds`, so that reruns of the same config are byte-identical.
pub fn write_results(rows: &[ExperimentResult], path: &Path, with_seconds: bool) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.to_string(),
            r.budget.to_string(),
            r.instance.to_string(),
            r.profit_mean.to_string(),
            r.profit_std.to_string(),
            r.fairness_mean.to_string(),
            r.tau_ok.to_string(),
            r.seed_size.to_string(),
            r.seed_cost.to_string(),
            if with_seconds {
                r.seconds.to_string()
            } else {
                String::new()
            },
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One line per algorithm × budget, averaged over instances.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub budget: f64,
    pub instances: usize,
    pub profit_mean: f64,
    pub profit_std_mean: f64,
    pub fairness_mean: f64,
    pub tau_ok_rate: f64,
    pub seed_size_mean: f64,
    pub seed_cost_mean: f64,
    pub seconds_mean: f64,
}

pub fn summarize(rows: &[ExperimentResult]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(Algorithm, u64), Vec<&ExperimentResult>> = BTreeMap::new();
    for r in rows {
        // budgets are positive, so the bit pattern orders like the value
        groups
            .entry((r.algorithm, r.budget.to_bits()))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((algorithm, bits), g)| {
            let avg = |f: &dyn Fn(&ExperimentResult) -> f64| {
                mean(&g.iter().map(|r| f(r)).collect::<Vec<_>>())
            };
            SummaryRow {
                algorithm,
                budget: f64::from_bits(bits),
                instances: g.len(),
                profit_mean: avg(&|r| r.profit_mean),
                profit_std_mean: avg(&|r| r.profit_std),
                fairness_mean: avg(&|r| r.fairness_mean),
                tau_ok_rate: avg(&|r| f64::from(u8::from(r.tau_ok))),
                seed_size_mean: avg(&|r| r.seed_size as f64),
                seed_cost_mean: avg(&|r| r.seed_cost),
                seconds_mean: avg(&|r| r.seconds),
            }
        })
        .collect()
}

pub fn write_summary(rows: &[ExperimentResult], path: &Path, with_seconds: bool) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "algorithm",
        "budget",
        "instances",
        "profit_mean",
        "profit_std_mean",
        "fairness_mean",
        "tau_ok_rate",
        "seed_size_mean",
        "seed_cost_mean",
        "seconds_mean",
    ])?;
    for s in summarize(rows) {
        w.write_record([
            s.algorithm.to_string(),
            s.budget.to_string(),
            s.instances.to_string(),
            s.profit_mean.to_string(),
            s.profit_std_mean.to_string(),
            s.fairness_mean.to_string(),
            s.tau_ok_rate.to_string(),
            s.seed_size_mean.to_string(),
            s.seed_cost_mean.to_string(),
            if with_seconds {
                s.seconds_mean.to_string()
            } else {
                String::new()
            },
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_timing(rows: &[ExperimentResult], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["algorithm", "budget", "instance", "seconds"])?;
    for r in rows {
        w.write_record([
            r.algorithm.to_string(),
            r.budget.to_string(),
            r.instance.to_string(),
            r.seconds.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Write results.csv, summary.csv, timing.csv and run_meta.json into `dir`.
pub fn emit_report(rows: &[ExperimentResult], dir: impl AsRef<Path>, meta: &RunMeta) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let timing = meta.config.timing;
    write_results(rows, &dir.join("results.csv"), timing)?;
    write_summary(rows, &dir.join("summary.csv"), timing)?;
    write_timing(rows, &dir.join("timing.csv"))?;
    let path = dir.join("run_meta.json");
    let mut f = File::create(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::to_writer_pretty(&mut f, meta)?;
    writeln!(f).map_err(|e| Error::io(&path, e))
}
