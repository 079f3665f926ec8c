//! Subcommand definitions and their implementations. Results go to the
//! supplied writer; diagnostics go through `log`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ergoclust::bounds::{error_bound_from_gammas, Alg2Params};
use ergoclust::clustering::threshold_components;
use ergoclust::{
    cluster_known_k, default_schedule, distance_matrix, emp_distance_exact_with,
    emp_distance_truncated, error_bound, generate_dataset, partition_equal, Clustering,
    CouplingSpec, Estimator, ExactConfig, MixingSchedule, TruncationSchedule,
};
use log::{info, warn};
use serde::Deserialize;
use serde_json::json;

use crate::config::{
    parse_mixing, validate_estimator, AlgorithmConfig, ExperimentConfig, Procedure,
};
use crate::error::{CliError, Result};
use crate::experiment;
use crate::manifest::{DatasetManifest, SampleSource, ValueRange};
use crate::sample_io::{read_sample, write_sample};

#[derive(Debug, Parser)]
#[command(
    name = "ergoclust",
    version,
    about = "Cluster time series by their generating process"
)]
pub struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance between two sample files.
    Dist(DistArgs),
    /// Cluster the samples listed in a manifest.
    Cluster(ClusterArgs),
    /// Generate a seeded dataset and its manifest.
    Gen(GenArgs),
    /// Estimate recovery rates over sample lengths.
    Experiment(ExperimentArgs),
    /// Evaluate the threshold-clustering error bound.
    Bound(BoundArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorKind {
    Exact,
    Truncated,
}

#[derive(Debug, Clone, Args)]
pub struct EstimatorArgs {
    /// Distance estimator; --m-max/--l-max alone imply truncated.
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorKind>,
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long)]
    pub l_max: Option<u32>,
}

impl EstimatorArgs {
    pub fn resolve(&self) -> Result<Option<Estimator>> {
        let schedule = || match (self.m_max, self.l_max) {
            (Some(m), Some(l)) => TruncationSchedule::new(m, l).map_err(CliError::input),
            _ => Err(CliError::input(
                "the truncated estimator needs --m-max and --l-max",
            )),
        };
        let e = match self.estimator {
            Some(EstimatorKind::Exact) => Some(Estimator::Exact(ExactConfig::default())),
            Some(EstimatorKind::Truncated) => Some(Estimator::Truncated(schedule()?)),
            None if self.m_max.is_some() || self.l_max.is_some() => {
                Some(Estimator::Truncated(schedule()?))
            }
            None => None,
        };
        if let Some(e) = &e {
            validate_estimator(e)?;
        }
        Ok(e)
    }
}

#[derive(Debug, Args)]
pub struct DistArgs {
    pub file1: PathBuf,
    pub file2: PathBuf,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// Machine-readable output.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    pub manifest: PathBuf,
    /// Known number of clusters.
    #[arg(long, conflicts_with_all = ["delta", "mixing"])]
    pub k: Option<usize>,
    /// Threshold for the unknown-k procedure.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Mixing bound (exp:c,r | poly:c,s | none); derives δ from the default schedule.
    #[arg(long)]
    pub mixing: Option<String>,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[arg(long)]
    pub json: bool,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// TOML file with a `[coupling]` table (an experiment config works).
    pub config: PathBuf,
    /// Sample length.
    #[arg(long)]
    pub n: usize,
    /// Master seed; defaults to the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for the sample files and manifest.toml.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Comma-separated sample lengths.
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<usize>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Minimal sample length.
    #[arg(long)]
    pub n: Option<u64>,
    /// Number of samples N.
    #[arg(long, default_value_t = 2)]
    pub samples: u64,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub l: Option<u64>,
    #[arg(long)]
    pub b: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Mixing bound (exp:c,r | poly:c,s | none).
    #[arg(long)]
    pub mixing: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon_rho: Option<f64>,
    /// Use this γ(δ_n) instead of evaluating it.
    #[arg(long, requires = "gamma_eps")]
    pub gamma_delta: Option<f64>,
    /// Use this γ(ε_ρ) instead of evaluating it.
    #[arg(long, requires = "gamma_delta")]
    pub gamma_eps: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Dist(a) => cmd_dist(a, out),
        Command::Cluster(a) => cmd_cluster(a, out),
        Command::Gen(a) => cmd_gen(a, out),
        Command::Experiment(a) => cmd_experiment(a, out),
        Command::Bound(a) => cmd_bound(a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::write("stdout", e))
}

pub fn cmd_dist(args: &DistArgs, out: &mut dyn Write) -> Result<()> {
    let x1 = read_sample(&args.file1)?;
    let x2 = read_sample(&args.file2)?;
    let estimator = args.estimator.resolve()?;
    let exact =
        emp_distance_exact_with(&x1, &x2, &ExactConfig::default()).map_err(CliError::Compute)?;
    let truncated = match &estimator {
        Some(Estimator::Truncated(s)) => Some((
            s,
            emp_distance_truncated(&x1, &x2, s).map_err(CliError::Compute)?,
        )),
        _ => None,
    };

    let text = if args.json {
        let mut doc = json!({
            "exact": {
                "distance": exact.total,
                "per_m": exact.per_m,
                "level": exact.level,
                "s_min": exact.s_min,
                "pointwise_tail": exact.pointwise_tail,
            }
        });
        if let Some((s, d)) = truncated {
            doc["truncated"] = json!({ "distance": d, "m_max": s.m_max, "l_max": s.l_max });
        }
        format!("{doc}\n")
    } else {
        let mut t = format!("exact {}\n", exact.total);
        if let Some((s, d)) = truncated {
            t += &format!("truncated {d} (m_max {}, l_max {})\n", s.m_max, s.l_max);
        }
        t += &format!("level {}\n", exact.level);
        match exact.s_min {
            Some(s) => t += &format!("s_min {s}\n"),
            None => t += "s_min none\n",
        }
        if exact.pointwise_tail {
            t += "pointwise_tail true\n";
        }
        t += "m,contribution\n";
        for (i, c) in exact.per_m.iter().enumerate() {
            t += &format!("{},{c}\n", i + 1);
        }
        t
    };
    emit(out, &text)
}

fn open_output(path: &Option<PathBuf>, out: &mut dyn Write, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::write(p.display().to_string(), e)),
        None => emit(out, text),
    }
}

pub fn cmd_cluster(args: &ClusterArgs, out: &mut dyn Write) -> Result<()> {
    let data = DatasetManifest::load(&args.manifest)?;
    let estimator = args.estimator.resolve()?;
    let algorithm = match (args.k, args.delta, &args.mixing) {
        (Some(k), _, _) => AlgorithmConfig::KnownK { k: Some(k) },
        (None, None, None) => return Err(CliError::input("pass --k, --delta or --mixing")),
        (None, delta, mixing) => AlgorithmConfig::Threshold {
            delta,
            mixing: mixing.as_deref().map(parse_mixing).transpose()?,
        },
    };
    let n_min = data.samples.iter().map(|s| s.len()).min().unwrap();
    let plan = algorithm.plan(n_min, data.samples.len(), None, estimator.as_ref())?;
    info!(
        "clustering {} samples, estimator {:?}",
        data.samples.len(),
        plan.estimator
    );

    let dm = distance_matrix(&data.samples, &plan.estimator).map_err(CliError::Compute)?;
    let found = match plan.procedure {
        Procedure::KnownK(k) => cluster_known_k(&dm, k),
        Procedure::Threshold(delta) => {
            if !matches!(plan.estimator, Estimator::Truncated(_)) {
                warn!("threshold clustering is calibrated for the truncated estimator");
            }
            if !dm.data_in_unit_interval() {
                warn!("samples leave [0, 1]; the truncated estimator ignores those values");
            }
            threshold_components(&dm, delta)
        }
    }
    .map_err(CliError::Compute)?;
    let exact_match = data
        .labels
        .as_ref()
        .map(|t| partition_equal(&found, t))
        .transpose()
        .map_err(CliError::Compute)?;

    let text = if args.json {
        let doc = json!({
            "k": found.k(),
            "labels": found.labels(),
            "centers": found.centers(),
            "clusters": found.clusters(),
            "delta": match plan.procedure { Procedure::Threshold(d) => Some(d), _ => None },
            "schedule": plan.schedule,
            "exact_match": exact_match,
            "sources": data.sources.iter().map(|s| s.path.display().to_string()).collect::<Vec<_>>(),
        });
        format!("{doc}\n")
    } else {
        cluster_csv(&found, &data.sources, &plan.procedure, exact_match)
    };
    open_output(&args.out, out, &text)
}

fn cluster_csv(
    found: &Clustering,
    sources: &[SampleSource],
    procedure: &Procedure,
    exact_match: Option<bool>,
) -> String {
    let mut t = match procedure {
        Procedure::KnownK(k) => format!("# known-k k={k}\n"),
        Procedure::Threshold(d) => format!("# threshold delta={d} k={}\n", found.k()),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let labelled = exact_match.is_some();
    let mut header = vec!["index", "path", "cluster"];
    if labelled {
        header.push("label");
    }
    w.write_record(&header).unwrap();
    for (i, src) in sources.iter().enumerate() {
        let mut rec = vec![
            i.to_string(),
            src.path.display().to_string(),
            found.label(i).to_string(),
        ];
        if labelled {
            rec.push(src.label.clone().unwrap_or_default());
        }
        w.write_record(&rec).unwrap();
    }
    t += &String::from_utf8(w.into_inner().unwrap()).unwrap();
    if let Some(m) = exact_match {
        t += &format!("# exact_match={m}\n");
    }
    t
}

fn io_error(p: &Path, e: std::io::Error) -> CliError {
    CliError::write(p.display().to_string(), e)
}

#[derive(Debug, Deserialize)]
struct GenConfig {
    #[serde(default)]
    seed: u64,
    coupling: CouplingSpec,
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let text = fs::read_to_string(&args.config).map_err(|source| CliError::Read {
        path: args.config.clone(),
        source,
    })?;
    let config: GenConfig = toml::from_str(&text).map_err(|e| CliError::Config {
        path: args.config.clone(),
        reason: e.to_string(),
    })?;
    let seed = args.seed.unwrap_or(config.seed);
    let ds = generate_dataset::<f64>(&config.coupling, args.n, seed).map_err(CliError::input)?;

    fs::create_dir_all(&args.out).map_err(|e| io_error(&args.out, e))?;
    let mut manifest = DatasetManifest {
        range: Some(ValueRange { min: 0.0, max: 1.0 }),
        samples: Vec::new(),
    };
    for (i, s) in ds.samples.iter().enumerate() {
        let name = PathBuf::from(format!("sample_{i:03}.txt"));
        write_sample(&args.out.join(&name), s)?;
        manifest.samples.push(SampleSource {
            path: name,
            label: Some(format!("c{}", ds.target.label(i))),
        });
    }
    let manifest_path = args.out.join("manifest.toml");
    let body = format!("# seed = {seed}, n = {}\n{}", args.n, manifest.to_toml());
    fs::write(&manifest_path, body).map_err(|e| io_error(&manifest_path, e))?;
    emit(out, &format!("{}\n", manifest_path.display()))
}

pub fn cmd_experiment(args: &ExperimentArgs, out: &mut dyn Write) -> Result<()> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(l) = &args.lengths {
        config.lengths = l.clone();
    }
    if args.out.is_some() {
        config.out = args.out.clone();
    }
    let rows = experiment::run(&config)?;
    match &config.out {
        Some(path) => {
            let target = path.display().to_string();
            let file = File::create(path).map_err(|e| CliError::write(&*target, e))?;
            experiment::write_csv(BufWriter::new(file), &rows, &target)
        }
        None => experiment::write_csv(out, &rows, "stdout"),
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::input(format!(
            "{name} = {v} must be finite and positive"
        )))
    }
}

/// Schedule from explicit flags, with missing entries taken from the default
/// schedule for `n`.
fn bound_schedule(
    args: &BoundArgs,
    alpha: &MixingSchedule<f64>,
) -> Result<(Alg2Params<f64>, bool)> {
    let n = args.n.ok_or_else(|| CliError::input("bound needs --n"))?;
    let given =
        [args.m, args.l, args.b, args.q].iter().all(Option::is_some) && args.delta.is_some();
    let mut p = if given {
        Alg2Params {
            n,
            m_n: args.m.unwrap(),
            l_n: args.l.unwrap(),
            b_n: args.b.unwrap(),
            q_n: args.q.unwrap(),
            delta_n: args.delta.unwrap(),
            num_samples: args.samples,
        }
    } else {
        default_schedule(n, args.samples, alpha).map_err(CliError::input)?
    };
    p.m_n = args.m.unwrap_or(p.m_n);
    p.l_n = args.l.unwrap_or(p.l_n);
    p.b_n = args.b.unwrap_or(p.b_n);
    p.q_n = args.q.unwrap_or(p.q_n);
    p.delta_n = args.delta.unwrap_or(p.delta_n);
    p.validate().map_err(CliError::input)?;
    Ok((p, !given))
}

pub fn cmd_bound(args: &BoundArgs, out: &mut dyn Write) -> Result<()> {
    if let Some(e) = args.epsilon_rho {
        check_positive("epsilon_rho", e)?;
    }
    let (bound, schedule, derived) = match (args.gamma_delta, args.gamma_eps) {
        (Some(gd), Some(ge)) => {
            let b = error_bound_from_gammas(
                args.samples,
                args.m.unwrap_or(1),
                args.l.unwrap_or(1),
                args.b.unwrap_or(1),
                gd,
                ge,
            )
            .map_err(CliError::input)?;
            (b, None, false)
        }
        _ => {
            let alpha = parse_mixing(
                args.mixing
                    .as_deref()
                    .ok_or_else(|| CliError::input("bound needs --mixing"))?,
            )?;
            let eps = args
                .epsilon_rho
                .ok_or_else(|| CliError::input("bound needs --epsilon-rho"))?;
            let (p, derived) = bound_schedule(args, &alpha)?;
            let b = error_bound(&p, &alpha, eps).map_err(CliError::input)?;
            (b, Some(p), derived)
        }
    };

    let text = if args.json {
        let doc = json!({
            "gamma_delta": bound.gamma_delta,
            "gamma_epsilon": bound.gamma_epsilon,
            "raw": bound.raw,
            "clamped": bound.clamped,
            "schedule": schedule,
            "schedule_derived": derived,
        });
        format!("{doc}\n")
    } else {
        let mut t = String::new();
        if let Some(p) = &schedule {
            t += &format!(
                "schedule ({}) n={} N={} m_n={} l_n={} b_n={} q_n={} delta_n={}\n",
                if derived { "derived" } else { "given" },
                p.n,
                p.num_samples,
                p.m_n,
                p.l_n,
                p.b_n,
                p.q_n,
                p.delta_n
            );
        }
        t += &format!(
            "gamma_delta {}\ngamma_epsilon {}\nraw {}\nclamped {}\n",
            bound.gamma_delta, bound.gamma_epsilon, bound.raw, bound.clamped
        );
        t
    };
    emit(out, &text)
}
