//! Monte Carlo estimate of the exact-recovery rate as the sample length grows.

use std::io::Write;

use ergoclust::clustering::threshold_components;
use ergoclust::process::derive_seed;
use ergoclust::{
    cluster_known_k, distance_matrix, generate_dataset, partition_equal, DistanceMatrix64,
};
use log::info;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Procedure};
use crate::error::{CliError, Result};

pub const CSV_VERSION: &str = "# ergoclust-experiment v1";
pub const CSV_COLUMNS: [&str; 6] = [
    "n",
    "trials",
    "exact_recovery_count",
    "rate",
    "mean_within_distance",
    "mean_between_distance",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub trials: usize,
    pub exact_recovery_count: usize,
    pub rate: f64,
    /// `None` when no two samples share a cluster.
    pub mean_within_distance: Option<f64>,
    pub mean_between_distance: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Trial {
    recovered: bool,
    within: (f64, usize),
    between: (f64, usize),
}

/// Seed of trial `t` at length `n`.
pub fn trial_seed(master: u64, n: usize, t: usize) -> u64 {
    derive_seed(master, n as u64, t as u64)
}

fn pair_sums(dm: &DistanceMatrix64, labels: &[usize]) -> ((f64, usize), (f64, usize)) {
    let mut within = (0.0, 0);
    let mut between = (0.0, 0);
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            let acc = if labels[i] == labels[j] {
                &mut within
            } else {
                &mut between
            };
            acc.0 += dm.get(i, j);
            acc.1 += 1;
        }
    }
    (within, between)
}

fn run_trial(config: &ExperimentConfig, n: usize, t: usize) -> Result<Trial> {
    let plan = config.plan(n)?;
    let ds = generate_dataset::<f64>(&config.coupling, n, trial_seed(config.seed, n, t))
        .map_err(CliError::input)?;
    let dm = distance_matrix(&ds.samples, &plan.estimator).map_err(CliError::Compute)?;
    let found = match plan.procedure {
        Procedure::KnownK(k) => cluster_known_k(&dm, k),
        Procedure::Threshold(delta) => threshold_components(&dm, delta),
    }
    .map_err(CliError::Compute)?;
    let recovered = partition_equal(&found, &ds.target).map_err(CliError::Compute)?;
    let (within, between) = pair_sums(&dm, ds.target.labels());
    Ok(Trial {
        recovered,
        within,
        between,
    })
}

fn mean((sum, count): (f64, usize)) -> Option<f64> {
    (count > 0).then(|| sum / count as f64)
}

/// Runs every (n, trial) cell. Trials run in parallel; rows come out in
/// length order and each trial's sums are folded in trial order.
pub fn run(config: &ExperimentConfig) -> Result<Vec<Row>> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.lengths.len());
    for &n in &config.lengths {
        info!("n = {n}: {} trials", config.trials);
        let trials: Vec<Trial> = (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, n, t))
            .collect::<Result<_>>()?;
        let mut acc = Trial::default();
        let mut recovered = 0;
        for t in &trials {
            recovered += t.recovered as usize;
            acc.within.0 += t.within.0;
            acc.within.1 += t.within.1;
            acc.between.0 += t.between.0;
            acc.between.1 += t.between.1;
        }
        let row = Row {
            n,
            trials: config.trials,
            exact_recovery_count: recovered,
            rate: recovered as f64 / config.trials as f64,
            mean_within_distance: mean(acc.within),
            mean_between_distance: mean(acc.between),
        };
        info!("n = {n}: rate {}", row.rate);
        rows.push(row);
    }
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(out: W, rows: &[Row], target: &str) -> Result<()> {
    let io_err = |e: std::io::Error| CliError::write(target, e);
    let mut out = out;
    writeln!(out, "{CSV_VERSION}").map_err(io_err)?;
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| CliError::write(target, e.into());
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.trials.to_string(),
            r.exact_recovery_count.to_string(),
            r.rate.to_string(),
            opt(r.mean_within_distance),
            opt(r.mean_between_distance),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}
